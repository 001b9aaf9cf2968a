use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use hochops::algebra::{act, ChainJson, GradedCommutativeAlgebra, HochschildChain};
use hochops::circle::{aw, q_map, ProductSimplex};
use hochops::formal::{build_x_fs, enumerate_a_basis, MultiChain, OperationSpec, Signature};
use hochops::homology::nat_homology_report;
use hochops::loday::{
    b_family, bk_family, connes_b_component, l_op, lambda_family, lambda_op, r_op, sh_family, sh_op, OperationFamily,
};
use hochops::verify::{self, Bounds, Suite, Witness};
use hochops::{Error, Field, Morphism, Result};

#[derive(Parser)]
#[command(name = "hochops", version, about = "Exact formal operations on Hochschild complexes")]
struct Cli {
    /// Base field: q or fp:<prime>.
    #[arg(long, global = true, default_value = "q")]
    field: String,
    /// Emit canonical JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to a file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for verification.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Rerun the failing checks recorded in a witness or report file.
    #[arg(long, global = true)]
    replay: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Print one component of an operation family.
    Op(OpArgs),
    /// Homology of the truncated Nat complex.
    Homology(HomologyArgs),
    /// Apply an operation to a chain.
    Eval(EvalArgs),
    /// Alexander-Whitney images and the Q coefficients of sh^k and B^k.
    Aw(AwArgs),
    /// Build a generator x_(f,s), or list a basis of generators.
    Build(BuildArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// prop23, inversion, multiplicativity, aw, cycles, nat-homology,
    /// example, dsquare, chain-actions or all.
    suite: String,
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    #[arg(long, default_value_t = 3)]
    max_k: usize,
    /// Nat truncation.
    #[arg(long = "K", default_value_t = 4)]
    truncation: usize,
    /// Truncation for the x_(f,s) cycle sweep.
    #[arg(long, default_value_t = 3)]
    formal_k: usize,
    /// Largest signature n1,m1,n2,m2 in the x_(f,s) sweep.
    #[arg(long, default_value = "2,2,2,1")]
    max_sig: String,
}

#[derive(Args)]
struct OpArgs {
    /// sh, lambda, l, B, Bk or R.
    #[arg(long)]
    family: String,
    /// Family index (k for sh, lambda, l, Bk; l for R).
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Component index.
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct HomologyArgs {
    #[arg(long = "K", default_value_t = 4)]
    truncation: usize,
    #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
    lmin: i64,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    lmax: i64,
    /// Skip the comparison with the truncation at K + 1.
    #[arg(long)]
    no_stability: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// A family (sh:<k>, lambda:<k>, Bk:<k>, B) or an operation spec as
    /// JSON or a JSON file.
    #[arg(long)]
    op: String,
    /// A chain as JSON, a JSON file, or text: Hochschild words joined by ⊗,
    /// separated by |, then ; and algebra letters, e.g. "q0|r0⊗r1;g,h".
    #[arg(long)]
    chain: String,
    /// Algebra for text chains.
    #[arg(long, default_value = "poly4")]
    algebra: String,
}

#[derive(Args)]
struct AwArgs {
    /// Largest component index for the Q table.
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Apply AW to one product simplex instead, given by its points.
    #[arg(long)]
    simplex: Option<String>,
    /// Simplicial level of --simplex.
    #[arg(long)]
    level: Option<usize>,
}

#[derive(Args)]
struct BuildArgs {
    /// Operation spec as JSON or a JSON file.
    #[arg(long)]
    op: Option<String>,
    /// List the generators of a signature n1,m1,n2,m2 instead.
    #[arg(long)]
    sig: Option<String>,
    /// Multidegree k for --sig, comma separated.
    #[arg(long, default_value = "")]
    k: String,
    #[arg(long = "K", default_value_t = 2)]
    truncation: usize,
}

/// What a command produced: JSON, text, and whether all checks passed.
struct Output {
    json: Value,
    text: String,
    passed: bool,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn csv_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("expected a number, got '{t}'"))))
        .collect()
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

/// Inline JSON, or the contents of a file.
fn json_arg(s: &str) -> Result<Value> {
    let t = s.trim();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(serde_json::from_str(t)?);
    }
    Ok(serde_json::from_str(&fs::read_to_string(Path::new(t))?)?)
}

fn cmd_verify(a: &VerifyArgs, field: Field) -> Result<Output> {
    let suite: Suite = a.suite.parse()?;
    let sig = csv_list(&a.max_sig)?;
    let sig: [usize; 4] = sig.try_into().map_err(|_| usage("--max-sig needs four entries"))?;
    let bounds = Bounds {
        max_n: a.max_n,
        max_k: a.max_k,
        truncation: a.truncation,
        formal_truncation: a.formal_k,
        max_signature: Signature::from(sig),
        field,
    };
    let report = verify::run(suite, &bounds)?;
    Ok(Output { json: to_value(&report)?, text: report.to_text(), passed: report.passed() })
}

fn cmd_replay(path: &Path) -> Result<Output> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let witnesses: Vec<Witness> = if let Some(checks) = v.get("checks").and_then(Value::as_array) {
        checks
            .iter()
            .filter_map(|c| c.get("witness"))
            .map(|w| serde_json::from_value(w.clone()))
            .collect::<std::result::Result<_, _>>()?
    } else if v.is_array() {
        serde_json::from_value(v)?
    } else {
        vec![serde_json::from_value(v)?]
    };
    if witnesses.is_empty() {
        return Err(usage("no witnesses in replay file"));
    }
    let mut results = Vec::new();
    for w in &witnesses {
        results.push(verify::replay(w)?);
    }
    let passed = results.iter().all(|r| r.status == verify::Status::Pass);
    let text = results
        .iter()
        .map(|r| {
            let detail = r.witness.as_ref().map(|w| format!("\n     {}", w.detail)).unwrap_or_default();
            format!("{} {}{detail}\n", if r.status == verify::Status::Pass { "PASS" } else { "FAIL" }, r.id)
        })
        .collect();
    Ok(Output { json: to_value(&results)?, text, passed })
}

fn morphism_text(m: &Morphism) -> String {
    let mut s = format!("Com({},{}), {} maps\n", m.source(), m.target(), m.len());
    for (f, c) in m.terms() {
        let img: Vec<String> = f.image().iter().map(|t| t.to_string()).collect();
        s.push_str(&format!("{c}\t[{}]\n", img.join(",")));
    }
    s
}

fn cmd_op(a: &OpArgs, field: Field) -> Result<Output> {
    let (n, k) = (a.n, a.k);
    let m = match a.family.as_str() {
        "sh" => sh_op(n, k, field),
        "lambda" => lambda_op(n, k, field),
        "l" => l_op(n, k, field),
        "B" => connes_b_component(n, field),
        "Bk" => bk_family(n, k, field).component(n).cloned().expect("component n"),
        "R" => r_op(n, k, field),
        other => return Err(usage(format!("unknown family '{other}' (expected sh, lambda, l, B, Bk or R)"))),
    };
    let json = json!({"family": a.family, "k": k, "n": n, "field": field, "morphism": m});
    let text = format!("{}^{k}_{n}: {}", a.family, morphism_text(&m));
    Ok(Output { json, text, passed: true })
}

fn cmd_homology(a: &HomologyArgs, field: Field) -> Result<Output> {
    let r = nat_homology_report(a.truncation, a.lmin, a.lmax, field, !a.no_stability)?;
    let opt = |v: Option<usize>| v.map_or(String::new(), |x| x.to_string());
    let mut text = String::from("degree,dim,stable_dim,boundary_dim,class_rank\n");
    for row in &r.rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            row.degree,
            row.dim,
            opt(row.stable_dim),
            opt(row.boundary_dim),
            opt(row.class_rank)
        ));
    }
    Ok(Output { json: to_value(&r)?, text, passed: true })
}

fn parse_family(s: &str, truncation: usize, field: Field) -> Result<Option<OperationFamily>> {
    let (name, k) = match s.split_once(':') {
        Some((n, k)) => (n, Some(k.parse::<usize>().map_err(|_| Error::Parse(format!("bad index in '{s}'")))?)),
        None => (s, None),
    };
    Ok(Some(match (name, k) {
        ("sh", Some(k)) => sh_family(truncation, k, field),
        ("lambda", Some(k)) => lambda_family(truncation, k, field),
        ("Bk", Some(k)) => bk_family(truncation, k, field),
        ("B", None) => b_family(truncation, field),
        _ => return Ok(None),
    }))
}

/// Hochschild blocks and algebra letters of a text chain.
fn parse_text_chain(s: &str) -> (Vec<Vec<String>>, Vec<String>) {
    let (blocks, letters) = s.split_once(';').unwrap_or((s, ""));
    let words = |t: &str, sep: &[char]| -> Vec<String> {
        t.split(sep).map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
    };
    let blocks = blocks.split('|').map(|b| words(b, &['⊗', ','])).filter(|b| !b.is_empty()).collect();
    (blocks, words(letters, &[',', ' ']))
}

type ParsedChain = (Arc<GradedCommutativeAlgebra>, Vec<Vec<String>>, Vec<String>);

fn chain_arg(s: &str, algebra: &str, field: Field) -> Result<ParsedChain> {
    let t = s.trim();
    if t.starts_with('{') || Path::new(t).is_file() {
        let j: ChainJson = serde_json::from_value(json_arg(t)?)?;
        let alg = Arc::new(GradedCommutativeAlgebra::builtin(&j.algebra, field)?);
        if j.terms.len() != 1 || !j.terms[0].coeff.is_one() {
            // a general linear combination: only usable with families
            return Err(usage("JSON chains with several terms are evaluated with family operations only"));
        }
        return Ok((alg, vec![j.terms[0].word.clone()], Vec::new()));
    }
    let alg = Arc::new(GradedCommutativeAlgebra::builtin(algebra, field)?);
    let (blocks, letters) = parse_text_chain(t);
    Ok((alg, blocks, letters))
}

fn chain_json(c: &HochschildChain) -> Result<Value> {
    to_value(&c.to_json())
}

fn cmd_eval(a: &EvalArgs, field: Field) -> Result<Output> {
    let t = a.chain.trim();
    // family operations act on arbitrary chains
    let family_chain = || -> Result<HochschildChain> {
        if t.starts_with('{') || Path::new(t).is_file() {
            let j: ChainJson = serde_json::from_value(json_arg(t)?)?;
            return HochschildChain::from_json(&j, field);
        }
        let alg = Arc::new(GradedCommutativeAlgebra::builtin(&a.algebra, field)?);
        let (blocks, letters) = parse_text_chain(t);
        if blocks.len() != 1 || !letters.is_empty() {
            return Err(usage("family operations take a single Hochschild word"));
        }
        let labels: Vec<&str> = blocks[0].iter().map(String::as_str).collect();
        HochschildChain::word(alg, &labels)
    };
    if !a.op.trim().starts_with('{') && !Path::new(a.op.trim()).is_file() {
        let c = family_chain()?;
        let truncation = c.max_word_length().saturating_sub(1);
        let x = parse_family(a.op.trim(), truncation, field)?.ok_or_else(|| {
            usage(format!("unknown operation '{}' (expected sh:<k>, lambda:<k>, Bk:<k>, B or a spec)", a.op))
        })?;
        let r = act(&x, &c)?;
        return Ok(Output { json: chain_json(&r)?, text: format!("{r}\n"), passed: true });
    }
    let spec: OperationSpec = serde_json::from_value(json_arg(&a.op)?)?;
    spec.validate()?;
    let (alg, blocks, letters) = chain_arg(t, &a.algebra, field)?;
    let truncation = blocks.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1).max(1);
    let b: Vec<Vec<&str>> = blocks.iter().map(|b| b.iter().map(String::as_str).collect()).collect();
    let b: Vec<&[&str]> = b.iter().map(Vec::as_slice).collect();
    let l: Vec<&str> = letters.iter().map(String::as_str).collect();
    let c = MultiChain::from_labels(alg.clone(), &b, &l)?;
    let r = build_x_fs(&spec, truncation, field)?.evaluate(&c)?;
    let label = |w: &[usize]| -> Vec<&str> { w.iter().map(|&x| alg.label(x)).collect() };
    let terms: Vec<Value> = r
        .terms()
        .map(|(w, s)| json!({"blocks": w.blocks.iter().map(|b| label(b)).collect::<Vec<_>>(), "letters": label(&w.letters), "coeff": s}))
        .collect();
    let mut text = String::new();
    for (w, s) in r.terms() {
        text.push_str(&format!("{s}\t{}\n", r.render(w)));
    }
    if r.is_empty() {
        text.push_str("0\n");
    }
    Ok(Output { json: json!({"algebra": alg.name(), "terms": terms}), text, passed: true })
}

fn cmd_aw(a: &AwArgs, field: Field) -> Result<Output> {
    if let Some(pts) = &a.simplex {
        let points = csv_list(pts)?;
        let level = a.level.ok_or_else(|| usage("--simplex needs --level"))?;
        let r = aw(&[(ProductSimplex::new(level, points)?, field.one())])?;
        let text = if r.is_empty() { "0\n".to_string() } else { r.iter().map(|t| format!("{t}\n")).collect() };
        return Ok(Output { json: to_value(&r)?, text, passed: true });
    }
    let mut rows: BTreeMap<&str, Vec<Vec<String>>> = BTreeMap::new();
    let mut text = String::new();
    for (name, f) in [("sh", sh_family as fn(usize, usize, Field) -> OperationFamily), ("Bk", bk_family)] {
        text.push_str(&format!("Q({name}^k)_n, rows k, columns n = 0..{}\n", a.max_n));
        for k in 0..=a.max_n {
            let q: Vec<String> = q_map(&f(a.max_n, k, field))?.iter().map(|s| s.to_string()).collect();
            text.push_str(&format!("{k}: {}\n", q.join(",")));
            rows.entry(name).or_default().push(q);
        }
    }
    Ok(Output { json: json!({"max_n": a.max_n, "field": field, "q": rows}), text, passed: true })
}

fn cmd_build(a: &BuildArgs, field: Field) -> Result<Output> {
    match (&a.op, &a.sig) {
        (Some(op), None) => {
            let spec: OperationSpec = serde_json::from_value(json_arg(op)?)?;
            spec.validate()?;
            let x = build_x_fs(&spec, a.truncation, field)?;
            let mut text =
                format!("degree {}, {} components, {} maps\n", x.degree(), x.components().count(), x.term_count());
            for (j, h, m) in x.components() {
                text.push_str(&format!("{j:?} -> {h:?}: {}", morphism_text(m)));
            }
            Ok(Output { json: to_value(&x)?, text, passed: true })
        }
        (None, Some(sig)) => {
            let s: [usize; 4] = csv_list(sig)?.try_into().map_err(|_| usage("--sig needs four entries"))?;
            let basis = enumerate_a_basis(Signature::from(s), &csv_list(&a.k)?)?;
            let text = basis
                .iter()
                .map(|b| serde_json::to_string(b).map(|s| s + "\n"))
                .collect::<std::result::Result<String, _>>()?;
            Ok(Output { json: to_value(&basis)?, text, passed: true })
        }
        _ => Err(usage("build needs exactly one of --op and --sig")),
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let field: Field = cli.field.parse()?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    if let Some(path) = &cli.replay {
        return cmd_replay(path);
    }
    match &cli.command {
        Some(Command::Verify(a)) => cmd_verify(a, field),
        Some(Command::Op(a)) => cmd_op(a, field),
        Some(Command::Homology(a)) => cmd_homology(a, field),
        Some(Command::Eval(a)) => cmd_eval(a, field),
        Some(Command::Aw(a)) => cmd_aw(a, field),
        Some(Command::Build(a)) => cmd_build(a, field),
        None => Err(usage("no command given (try --help)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let body = if cli.json {
        serde_json::to_string_pretty(&out.json).expect("JSON values serialize") + "\n"
    } else {
        out.text
    };
    let written = match &cli.out {
        Some(p) => fs::write(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if out.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
