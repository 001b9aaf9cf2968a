//! Verification suites behind `hochops verify`.
//!
//! A suite expands into independent cases. A case is a check name plus
//! JSON parameters; a failure witness records exactly those, so any failing
//! case can be rerun alone with [`replay`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{
    act, connes_b, hochschild_differential, reduce, reduced_homology, shuffle_product, GradedCommutativeAlgebra,
    HochschildChain, Word,
};
use crate::circle::{aw, q_map, triangular_apply, triangular_solve, Letter, ProductSimplex};
use crate::error::{Error, Result};
use crate::formal::{
    build_x_fs, enumerate_a_basis, multidegrees, signatures_up_to, CycleChecker, MultiChain, MultiOperation, MultiWord,
    OperationSpec, Signature,
};
use crate::homology::nat::{d_co, d_h, nat_differential};
use crate::homology::{nat_complex, nat_homology_report};
use crate::loday::{
    b_family, bk_family, eulerian_embedded, eulerian_number, l_op, lambda_family, lambda_op, sh_combination, sh_family,
    sh_op, sh_op_via_shuffles, OperationFamily, Permutation,
};
use crate::scalar::{binomial, binomial_i64, sign, Field, Scalar};
use crate::Morphism;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Prop23,
    Inversion,
    Multiplicativity,
    Aw,
    Cycles,
    NatHomology,
    Example,
    Dsquare,
    ChainActions,
    All,
}

impl Suite {
    /// Every concrete suite, in the order `all` runs them.
    pub const CONCRETE: [Suite; 9] = [
        Suite::Prop23,
        Suite::Inversion,
        Suite::Multiplicativity,
        Suite::Aw,
        Suite::Cycles,
        Suite::NatHomology,
        Suite::Example,
        Suite::Dsquare,
        Suite::ChainActions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop23 => "prop23",
            Suite::Inversion => "inversion",
            Suite::Multiplicativity => "multiplicativity",
            Suite::Aw => "aw",
            Suite::Cycles => "cycles",
            Suite::NatHomology => "nat-homology",
            Suite::Example => "example",
            Suite::Dsquare => "dsquare",
            Suite::ChainActions => "chain-actions",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::CONCRETE.into_iter().chain([Suite::All]).find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::CONCRETE.iter().map(|x| x.name()).collect();
            Error::Parse(format!("unknown suite '{s}' (expected one of {}, all)", names.join(", ")))
        })
    }
}

/// Size parameters of a run.
///
/// `max_n` bounds component indices (Hochschild words up to length
/// `max_n + 1` for the differential checks, `max_n - 1` for the operation
/// actions); `truncation` is the Nat truncation `K`; the formal generators
/// are swept at `formal_truncation` over all signatures up to
/// `max_signature`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_n: usize,
    pub max_k: usize,
    #[serde(rename = "K")]
    pub truncation: usize,
    pub formal_truncation: usize,
    pub max_signature: Signature,
    pub field: Field,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds {
            max_n: 6,
            max_k: 3,
            truncation: 4,
            formal_truncation: 3,
            max_signature: Signature::new(2, 2, 2, 1),
            field: Field::Rational,
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

impl Bounds {
    /// Rejects bounds whose largest objects would not fit in memory, with
    /// an estimate of their size.
    pub fn check_feasible(&self) -> Result<()> {
        let reject = |what: String| Err(Error::InvalidArgument(format!("infeasible bounds: {what}")));
        if self.max_n > 9 {
            return reject(format!(
                "max_n = {} needs components with about {:.1e} maps (limit max_n <= 9)",
                self.max_n,
                factorial(self.max_n + 1)
            ));
        }
        if self.truncation > 6 {
            return reject(format!(
                "K = {} needs a Nat complex with about {:.1e} basis maps in degree 0 (limit K <= 6)",
                self.truncation,
                factorial(self.truncation + 2)
            ));
        }
        if self.formal_truncation > 3 {
            return reject(format!(
                "formal truncation {} produces components with up to {:.1e} maps (limit 3)",
                self.formal_truncation,
                factorial(2 * self.formal_truncation + 4)
            ));
        }
        let s = self.max_signature;
        if s.n1 > 2 || s.m1 > 2 || s.n2 > 2 || s.m2 > 2 {
            return reject(format!("signature {:?} exceeds (2,2,2,2)", <[usize; 4]>::from(s)));
        }
        if self.max_k > 8 {
            return reject(format!(
                "max_k = {} gives sh products up to sh^{} (limit max_k <= 8)",
                self.max_k,
                self.max_k * self.max_k
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Everything needed to rerun one failing case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub suite: Suite,
    pub check: String,
    pub params: Value,
    pub field: Field,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub bounds: Bounds,
    pub checks: Vec<CheckResult>,
    pub tables: Vec<Table>,
    pub wall_time_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// One line per check, plus the tables.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let st = if c.status == Status::Pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{st} {}\n", c.id));
            if let Some(w) = &c.witness {
                out.push_str(&format!("     {}\n", w.detail));
            }
        }
        for t in &self.tables {
            out.push_str(&format!("\n{}\n{}\n", t.name, t.header.join("\t")));
            for r in &t.rows {
                out.push_str(&format!("{}\n", r.join("\t")));
            }
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "\n{}: {} checks, {} failed, {} ms\n",
            self.suite,
            self.checks.len(),
            failed,
            self.wall_time_ms
        ));
        out
    }
}

struct Case {
    suite: Suite,
    check: &'static str,
    params: Value,
}

impl Case {
    fn id(&self) -> String {
        format!("{}/{}{}", self.suite, self.check, self.params)
    }
}

struct Row {
    table: String,
    header: Vec<String>,
    cells: Vec<String>,
}

#[derive(Default)]
struct Outcome {
    failure: Option<String>,
    rows: Vec<Row>,
}

impl Outcome {
    fn fail(&mut self, msg: String) {
        if self.failure.is_none() {
            self.failure = Some(msg);
        }
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }

    fn row(&mut self, table: impl Into<String>, header: &[String], cells: Vec<String>) {
        self.rows.push(Row { table: table.into(), header: header.to_vec(), cells });
    }
}

fn strs(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn shorten(mut s: String) -> String {
    const MAX: usize = 400;
    if s.len() > MAX {
        let mut cut = MAX;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
        s.push_str("...");
    }
    s
}

fn morphism_mismatch(what: impl fmt::Display, a: &Morphism, b: &Morphism) -> Option<String> {
    if a == b {
        return None;
    }
    Some(match a.sub(b) {
        Ok(d) => {
            let first = d.terms().next().map(|(m, c)| format!("{c}*{:?}", m.image())).unwrap_or_default();
            format!("{what}: {} maps differ, first {first}", d.len())
        }
        Err(e) => format!("{what}: {e}"),
    })
}

fn family_mismatch(what: impl fmt::Display, a: &OperationFamily, b: &OperationFamily) -> Option<String> {
    for (n, m) in a.components() {
        let other = match b.component(n) {
            Some(o) => o,
            None => return Some(format!("{what}: component {n} missing")),
        };
        if let Some(msg) = morphism_mismatch(format!("{what}, component {n}"), m, other) {
            return Some(msg);
        }
    }
    None
}

fn param_usize(p: &Value, key: &str) -> Result<usize> {
    p.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::Parse(format!("parameter '{key}' missing or not a non-negative integer")))
}

fn param_i64(p: &Value, key: &str) -> Result<i64> {
    p.get(key)
        .and_then(Value::as_i64)
        .ok_or_else(|| Error::Parse(format!("parameter '{key}' missing or not an integer")))
}

fn param_str<'a>(p: &'a Value, key: &str) -> Result<&'a str> {
    p.get(key).and_then(Value::as_str).ok_or_else(|| Error::Parse(format!("parameter '{key}' missing or not a string")))
}

const ALGEBRAS: [&str; 3] = ["hs1", "poly3", "z2"];

fn algebra(name: &str, field: Field) -> Result<Arc<GradedCommutativeAlgebra>> {
    Ok(Arc::new(GradedCommutativeAlgebra::builtin(name, field)?))
}

fn all_words(dim: usize, len: usize) -> Vec<Word> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| (0..dim).map(move |a| [w.clone(), vec![a]].concat())).collect();
    }
    out
}

fn basis_word(alg: &Arc<GradedCommutativeAlgebra>, w: Word) -> Result<HochschildChain> {
    HochschildChain::from_terms(alg.clone(), vec![(w, alg.field().one())])
}

/// Words of every length `1..=max_len`.
fn words_up_to(alg: &Arc<GradedCommutativeAlgebra>, max_len: usize) -> Result<Vec<HochschildChain>> {
    (1..=max_len).flat_map(|l| all_words(alg.dim(), l)).map(|w| basis_word(alg, w)).collect()
}

fn named_family(name: &str, truncation: usize, k: usize, field: Field) -> Result<OperationFamily> {
    Ok(match name {
        "sh" => sh_family(truncation, k, field),
        "lambda" => lambda_family(truncation, k, field),
        "Bk" => bk_family(truncation, k, field),
        "B" => b_family(truncation, field),
        _ => return Err(Error::Parse(format!("unknown family '{name}'"))),
    })
}

// ---- checks ---------------------------------------------------------------

fn check_l_differential(p: &Value, field: Field) -> Result<Outcome> {
    let (n, k) = (param_usize(p, "n")?, param_usize(p, "k")?);
    let mut out = Outcome::default();
    if n == 0 {
        out.fail("n must be at least 1".into());
        return Ok(out);
    }
    let prev = match k {
        0 => l_op(n - 1, 0, field),
        _ => l_op(n - 1, k, field).sub(&l_op(n - 1, k - 1, field))?,
    };
    let lhs = d_h(&l_op(n, k, field));
    let rhs = d_co(&prev);
    if let Some(m) =
        morphism_mismatch(format!("d_h(l_{n}^{k}) vs d_co(l_{}^{k} - l_{}^{})", n - 1, n - 1, k as i64 - 1), &lhs, &rhs)
    {
        out.fail(m);
    }
    Ok(out)
}

fn check_eulerian_count(p: &Value, _field: Field) -> Result<Outcome> {
    let n = param_usize(p, "n")?;
    let mut out = Outcome::default();
    let mut total = 0usize;
    for k in 1..=n {
        let got = eulerian_embedded(n, k).len();
        total += got;
        let expect = eulerian_number(n, k - 1);
        out.require(num_bigint::BigInt::from(got) == expect, || {
            format!("|Σ¹_({},{k})| = {got}, A({n},{}) = {expect}", n + 1, k - 1)
        });
    }
    let fact = (1..=n).product::<usize>();
    out.require(total == fact, || format!("Eulerian sets of Σ_{n} cover {total} of {fact} permutations"));
    Ok(out)
}

fn check_sh_shuffles(p: &Value, field: Field) -> Result<Outcome> {
    let n = param_usize(p, "n")?;
    let mut out = Outcome::default();
    for k in 0..=n + 1 {
        if let Some(m) = morphism_mismatch(format!("sh_{n}^{k}"), &sh_op(n, k, field), &sh_op_via_shuffles(n, k, field))
        {
            out.fail(m);
        }
    }
    Ok(out)
}

fn check_inversion(p: &Value, field: Field) -> Result<Outcome> {
    let (n, k) = (param_usize(p, "n")?, param_usize(p, "k")?);
    let mut out = Outcome::default();
    let mut lam = Morphism::zero(n + 1, n + 1, field);
    let mut sh = Morphism::zero(n + 1, n + 1, field);
    for m in 0..=k {
        let b = binomial_i64(k as i64, m as i64);
        lam = lam.add(&sh_op(n, m, field).scale_i64(b))?;
        sh = sh.add(&lambda_op(n, m, field).scale_i64(b * sign((k - m) as i64)))?;
    }
    if let Some(m) = morphism_mismatch(format!("λ_{n}^{k} vs Σ binom({k},m) sh^m"), &lambda_op(n, k, field), &lam) {
        out.fail(m);
    }
    if let Some(m) =
        morphism_mismatch(format!("sh_{n}^{k} vs Σ (-1)^({k}-m) binom({k},m) λ^m"), &sh_op(n, k, field), &sh)
    {
        out.fail(m);
    }
    Ok(out)
}

fn check_lambda_product(p: &Value, field: Field) -> Result<Outcome> {
    let (k, k2, t) = (param_usize(p, "k")?, param_usize(p, "k2")?, param_usize(p, "max_n")?);
    let mut out = Outcome::default();
    let lhs = lambda_family(t, k, field).then(&lambda_family(t, k2, field))?;
    if let Some(m) = family_mismatch(format!("λ^{k}∘λ^{k2} vs λ^{}", k * k2), &lhs, &lambda_family(t, k * k2, field))
    {
        out.fail(m);
    }
    Ok(out)
}

/// Coefficients of `sh^j` in `sh^k · sh^{k'}` from the triple sum.
pub fn sh_product_coefficients(k: usize, k2: usize) -> Vec<i64> {
    let mut c = vec![0i64; k * k2 + 1];
    for i in 0..=k {
        for i2 in 0..=k2 {
            let s =
                sign((k + k2 - i - i2) as i64) * binomial_i64(k as i64, i as i64) * binomial_i64(k2 as i64, i2 as i64);
            for (j, cj) in c.iter_mut().enumerate().take(i * i2 + 1) {
                *cj += s * binomial_i64((i * i2) as i64, j as i64);
            }
        }
    }
    c
}

fn check_sh_product(p: &Value, field: Field) -> Result<Outcome> {
    let (k, k2, t) = (param_usize(p, "k")?, param_usize(p, "k2")?, param_usize(p, "max_n")?);
    let mut out = Outcome::default();
    let lhs = sh_family(t, k, field).then(&sh_family(t, k2, field))?;
    let coeffs: Vec<Scalar> = sh_product_coefficients(k, k2).into_iter().map(|c| field.from_i64(c)).collect();
    if let Some(m) = family_mismatch(format!("sh^{k}∘sh^{k2} vs triple sum"), &lhs, &sh_combination(t, &coeffs, field))
    {
        out.fail(m);
    }
    Ok(out)
}

fn check_aw_permutations(p: &Value, field: Field) -> Result<Outcome> {
    let n = param_usize(p, "n")?;
    let shifted = p.get("shifted").and_then(Value::as_bool).unwrap_or(false);
    let mut out = Outcome::default();
    let id = Permutation::identity(n);
    let mut expected = vec![Letter::Y; n];
    if !shifted {
        expected.insert(0, Letter::One);
    }
    for perm in Permutation::all(n) {
        let simplex = if shifted {
            ProductSimplex::new(n, perm.one_line().iter().map(|&t| t as usize + 1).collect())?
        } else {
            ProductSimplex::from_map(&perm.embed())?
        };
        let r = aw(&[(simplex, field.one())])?;
        let ok = if perm == id {
            r.len() == 1 && r[0].letters == expected && r[0].coefficient.is_one()
        } else {
            r.is_empty()
        };
        if !ok {
            let shown: Vec<String> = r.iter().map(|t| t.to_string()).collect();
            out.fail(format!(
                "AW of {:?}{} = [{}]",
                perm.one_line(),
                if shifted { " (shifted)" } else { "" },
                shown.join(", ")
            ));
            break;
        }
    }
    Ok(out)
}

fn check_q_binomial(p: &Value, field: Field) -> Result<Outcome> {
    let (k, t) = (param_usize(p, "k")?, param_usize(p, "max_n")?);
    let fam = param_str(p, "family")?;
    let x = match fam {
        "sh" => sh_family(t, k, field),
        "Bk" => bk_family(t, k, field),
        _ => return Err(Error::Parse(format!("q-binomial needs family sh or Bk, got '{fam}'"))),
    };
    let q = q_map(&x)?;
    let mut out = Outcome::default();
    for (n, v) in q.iter().enumerate() {
        let expect = if n == 0 {
            field.from_i64((k == 0) as i64)
        } else {
            field.from_bigint(&binomial(n as i64 - 1, n as i64 - k as i64))
        };
        out.require(*v == expect, || format!("Q({fam}^{k})_{n} = {v}, expected {expect}"));
    }
    let mut header = vec!["k".to_string()];
    header.extend((0..=t).map(|n| format!("n={n}")));
    let mut cells = vec![k.to_string()];
    cells.extend(q.iter().map(|v| v.to_string()));
    let (basis, shown) = if fam == "sh" { ("a^n", "sh") } else { ("b^n", "B") };
    out.row(format!("coefficient of {basis} in Q({shown}^k)_n"), &header, cells);
    Ok(out)
}

fn check_nat_cycle(p: &Value, field: Field) -> Result<Outcome> {
    let (k, t) = (param_usize(p, "k")?, param_usize(p, "K")?);
    let fam = param_str(p, "family")?;
    let x = named_family(fam, t, k, field)?;
    let d = nat_differential(&x);
    let mut out = Outcome::default();
    if let Some((j, m)) = d.components().find(|(_, m)| !m.is_zero()) {
        out.fail(format!("D({fam}^{k}) has {} maps in component {j}", m.len()));
    }
    Ok(out)
}

fn check_x_fs_cycles(p: &Value, field: Field) -> Result<Outcome> {
    let sig: Signature = serde_json::from_value(p.get("sig").cloned().unwrap_or(Value::Null))?;
    let t = param_usize(p, "K")?;
    let mut checker = CycleChecker::new(t, field);
    let mut out = Outcome::default();
    let mut count = 0usize;
    for k in multidegrees(sig.n1, t) {
        for spec in enumerate_a_basis(sig, &k)? {
            count += 1;
            if !checker.check(&spec)? {
                out.fail(format!("x_(f,s) is not a cycle: {}", serde_json::to_string(&spec)?));
            }
        }
    }
    let s: [usize; 4] = sig.into();
    out.row(
        "x_(f,s) cycles",
        &strs(&["signature", "K", "generators"]),
        vec![format!("{s:?}"), t.to_string(), count.to_string()],
    );
    Ok(out)
}

fn check_homology(p: &Value, field: Field) -> Result<Outcome> {
    let (t, lmin, lmax) = (param_usize(p, "K")?, param_i64(p, "lmin")?, param_i64(p, "lmax")?);
    let report = nat_homology_report(t, lmin, lmax, field, true)?;
    let mut out = Outcome::default();
    let header = strs(&["degree", "dim", "stable_dim", "boundary_dim", "class_rank"]);
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
    for r in &report.rows {
        if r.degree == 0 || r.degree == 1 {
            out.require(r.class_rank == Some(t + 1), || {
                format!("degree {}: classes of the {} generators span rank {}", r.degree, t + 1, opt(r.class_rank))
            });
        } else {
            out.require(r.stable_dim == Some(0), || {
                format!("degree {}: stable homology of dimension {}", r.degree, opt(r.stable_dim))
            });
        }
        out.row(
            format!("Nat homology, K = {t}, {field}"),
            &header,
            vec![r.degree.to_string(), r.dim.to_string(), opt(r.stable_dim), opt(r.boundary_dim), opt(r.class_rank)],
        );
    }
    Ok(out)
}

fn check_homology_fields_agree(p: &Value, field: Field) -> Result<Outcome> {
    let (t, lmin, lmax) = (param_usize(p, "K")?, param_i64(p, "lmin")?, param_i64(p, "lmax")?);
    let a = nat_homology_report(t, lmin, lmax, field, true)?;
    let b = nat_homology_report(t, lmin, lmax, Field::Rational, true)?;
    let mut out = Outcome::default();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        let same = (x.dim, x.stable_dim, x.class_rank) == (y.dim, y.stable_dim, y.class_rank);
        out.require(same, || format!("degree {}: {field} gives {:?}, q gives {:?}", x.degree, x, y));
    }
    Ok(out)
}

fn check_triangular(p: &Value, field: Field) -> Result<Outcome> {
    let (seed, len, t) = (param_usize(p, "seed")?, param_usize(p, "len")?, param_usize(p, "K")?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let f: Vec<Scalar> = (0..len).map(|_| field.from_i64(rng.gen_range(-50..=50))).collect();
    let c = triangular_solve(&f)?;
    let mut out = Outcome::default();
    out.require(triangular_apply(&c)? == f, || format!("triangular round trip failed for f = {f:?}"));
    // the solved combination really has Q = f on the low components
    let top = t.min(len.saturating_sub(1)).min(5);
    if len > 0 {
        let q = q_map(&sh_combination(top, &c[..=top], field))?;
        out.require(q[..] == f[..=top], || format!("Q(Σ c_k sh^k) = {q:?}, target {:?}", &f[..=top]));
    }
    Ok(out)
}

/// The Example: `x_{f,s}` of signature (2,2,2,1) evaluated on
/// `(q0) ⊗ (r0⊗r1⊗r2) ⊗ g ⊗ h`.
fn check_worked_example(_p: &Value, field: Field) -> Result<Outcome> {
    let spec: OperationSpec = serde_json::from_str(r#"{"sig":[2,2,2,1],"f":[3,2,3,2],"s":{"2":0,"4":1},"k":[0,2]}"#)?;
    let alg = algebra("free2:q0,r0,r1,r2,g,h", field)?;
    let x = build_x_fs(&spec, 2, field)?;
    let c = MultiChain::from_labels(alg.clone(), &[&["q0"], &["r0", "r1", "r2"]], &["g", "h"])?;
    let r = x.evaluate(&c)?;
    let one = alg.index_of("1")?;
    let q0g = alg.index_of("q0·g")?;
    let mut out = Outcome::default();
    for word in [["r0", "h", "r2", "r1"], ["r0", "r2", "h", "r1"], ["r0", "r2", "r1", "h"]] {
        let block = word.iter().map(|l| alg.index_of(l)).collect::<Result<Vec<usize>>>()?;
        let w = MultiWord { blocks: vec![vec![one], block], letters: vec![q0g] };
        let coeff = r.coeff(&w);
        out.require(coeff.is_one() || coeff.scale_i64(-1).is_one(), || {
            format!("{} has coefficient {coeff}", r.render(&w))
        });
    }
    out.require(r.len() == 6, || format!("evaluation has {} terms, expected 6", r.len()));
    for (w, s) in r.terms() {
        out.row("Example evaluation", &strs(&["coefficient", "term"]), vec![s.to_string(), r.render(w)]);
    }
    Ok(out)
}

fn check_a_basis_1010(p: &Value, field: Field) -> Result<Outcome> {
    let (k, t) = (param_usize(p, "k")?, param_usize(p, "K")?);
    let basis = enumerate_a_basis(Signature::new(1, 0, 1, 0), &[k])?;
    let mut out = Outcome::default();
    out.require(basis.len() == 2, || format!("{} generators for k = {k}, expected 2", basis.len()));
    let mut seen_sh = false;
    let mut seen_b = false;
    for b in &basis {
        let x = build_x_fs(b, t, field)?;
        let is_b = b.s.get(&1) == Some(&1);
        let expected = if is_b { bk_family(t, k, field) } else { sh_family(t, k, field) };
        if is_b {
            seen_b = true;
        } else {
            seen_sh = true;
        }
        out.require(x == MultiOperation::from_family(&expected), || {
            format!(
                "{} differs from {}^{k}",
                serde_json::to_string(b).unwrap_or_default(),
                if is_b { "B" } else { "sh" }
            )
        });
    }
    out.require(seen_sh && seen_b, || "basis does not contain both sh^k and B^k".into());
    Ok(out)
}

fn check_eval_connes_b(p: &Value, field: Field) -> Result<Outcome> {
    let t = param_usize(p, "K")?.max(1);
    let alg = algebra("poly4", field)?;
    let mut out = Outcome::default();
    let c = MultiChain::from_labels(alg.clone(), &[&["t", "t^2"]], &[])?;
    let eval = |k: usize| -> Result<MultiChain> {
        let spec =
            OperationSpec { sig: Signature::new(1, 0, 1, 0), f: vec![1], s: BTreeMap::from([(1, 1)]), k: vec![k] };
        build_x_fs(&spec, t, field)?.evaluate(&c)
    };
    let b = connes_b(&HochschildChain::word(alg.clone(), &["t", "t^2"])?);
    let mut expected = MultiChain::zero(alg.clone());
    for (w, s) in b.terms() {
        expected.add_term(MultiWord { blocks: vec![w.clone()], letters: vec![] }, s.clone());
    }
    let got = eval(1)?;
    out.require(got == expected, || {
        format!("x_(f,s) with k = 1 on t⊗t^2 gives {} terms, B gives {}", got.len(), expected.len())
    });
    out.require(eval(0)?.is_empty(), || "B^0 is nonzero on a word of length 2".into());
    Ok(out)
}

fn check_hochschild_d2(p: &Value, field: Field) -> Result<Outcome> {
    let len = param_usize(p, "len")?;
    let alg = algebra(param_str(p, "algebra")?, field)?;
    let mut out = Outcome::default();
    for w in all_words(alg.dim(), len) {
        let c = basis_word(&alg, w)?;
        let dc = hochschild_differential(&c);
        if !hochschild_differential(&dc).is_zero() {
            out.fail(format!("d(d({c})) != 0"));
            break;
        }
        if !reduce(&hochschild_differential(&reduce(&dc))).is_zero() {
            out.fail(format!("reduced d(d({c})) != 0"));
            break;
        }
    }
    Ok(out)
}

fn check_hs1_homology(p: &Value, field: Field) -> Result<Outcome> {
    let max_len = param_usize(p, "max_len")?;
    let alg = algebra("hs1", field)?;
    let mut out = Outcome::default();
    let cells = reduced_homology(&alg, max_len);
    for len in 1..=max_len {
        for deg in [0, -1] {
            let dim: usize = cells.iter().filter(|c| c.length == len && c.degree == deg).map(|c| c.dim).sum();
            out.require(dim == 1, || format!("length {len}, degree {deg}: dimension {dim}"));
        }
    }
    for c in &cells {
        if c.degree != 0 && c.degree != -1 {
            out.require(c.dim == 0, || format!("length {}, degree {}: dimension {}", c.length, c.degree, c.dim));
        }
        out.row(
            "reduced Hochschild homology of H*(S^1)",
            &strs(&["length", "degree", "dim"]),
            vec![c.length.to_string(), c.degree.to_string(), c.dim.to_string()],
        );
    }
    Ok(out)
}

fn check_nat_d_squared(p: &Value, field: Field) -> Result<Outcome> {
    let (t, lmin, lmax) = (param_usize(p, "K")?, param_i64(p, "lmin")?, param_i64(p, "lmax")?);
    let mut out = Outcome::default();
    // construction verifies D ∘ D = 0 degree by degree
    if let Err(e) = nat_complex(t, lmin, lmax, field) {
        out.fail(format!("Nat complex at K = {t}: {e}"));
    }
    Ok(out)
}

fn check_connes_b_squared(p: &Value, field: Field) -> Result<Outcome> {
    let max_len = param_usize(p, "max_len")?;
    let alg = algebra(param_str(p, "algebra")?, field)?;
    let mut out = Outcome::default();
    for c in words_up_to(&alg, max_len)? {
        let c = reduce(&c);
        if !reduce(&connes_b(&reduce(&connes_b(&c)))).is_zero() {
            out.fail(format!("B(B({c})) != 0"));
            break;
        }
    }
    Ok(out)
}

fn check_chain_map(p: &Value, field: Field) -> Result<Outcome> {
    let (k, max_len) = (param_usize(p, "k")?, param_usize(p, "max_len")?);
    let fam = param_str(p, "family")?;
    let alg = algebra(param_str(p, "algebra")?, field)?;
    let x = named_family(fam, max_len.saturating_sub(1), k, field)?;
    let mut out = Outcome::default();
    for c in words_up_to(&alg, max_len)? {
        let l = hochschild_differential(&act(&x, &c)?);
        let r = act(&x, &hochschild_differential(&c))?;
        if reduce(&l) != reduce(&r) {
            out.fail(format!("d∘{fam}^{k} != {fam}^{k}∘d on {c}"));
            break;
        }
    }
    Ok(out)
}

fn check_shuffle_product(p: &Value, field: Field) -> Result<Outcome> {
    let max_len = param_usize(p, "max_len")?;
    let alg = algebra(param_str(p, "algebra")?, field)?;
    let words = words_up_to(&alg, max_len)?;
    let len = |c: &HochschildChain| c.max_word_length();
    let deg = |c: &HochschildChain| c.degree().unwrap_or(0);
    let d = hochschild_differential;
    let unit = basis_word(&alg, vec![alg.unit()])?;
    let mut out = Outcome::default();
    for x in &words {
        if shuffle_product(&unit, x)? != *x || shuffle_product(x, &unit)? != *x {
            out.fail(format!("1 is not a unit on {x}"));
            return Ok(out);
        }
        for y in words.iter().filter(|y| len(x) + len(y) - 1 <= max_len) {
            let xy = shuffle_product(x, y)?;
            let yx = shuffle_product(y, x)?;
            if xy != yx.scale_i64(sign(deg(x) * deg(y))) {
                out.fail(format!("{x} · {y} is not graded commutative"));
                return Ok(out);
            }
            let leibniz = shuffle_product(&d(x), y)?.add(&shuffle_product(x, &d(y))?.scale_i64(sign(deg(x))))?;
            if d(&xy) != leibniz {
                out.fail(format!("Leibniz rule fails on {x} · {y}"));
                return Ok(out);
            }
            for z in words.iter().filter(|z| len(x) + len(y) + len(z) - 2 <= max_len) {
                let l = shuffle_product(&xy, z)?;
                let r = shuffle_product(x, &shuffle_product(y, z)?)?;
                if l != r {
                    out.fail(format!("({x} · {y}) · {z} != {x} · ({y} · {z})"));
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

type CheckFn = fn(&Value, Field) -> Result<Outcome>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("l-differential", check_l_differential),
    ("eulerian-count", check_eulerian_count),
    ("sh-via-shuffles", check_sh_shuffles),
    ("lambda-sh-inversion", check_inversion),
    ("lambda-product", check_lambda_product),
    ("sh-product", check_sh_product),
    ("aw-permutations", check_aw_permutations),
    ("q-binomial", check_q_binomial),
    ("nat-cycle", check_nat_cycle),
    ("x-fs-cycles", check_x_fs_cycles),
    ("homology", check_homology),
    ("homology-fields-agree", check_homology_fields_agree),
    ("triangular-roundtrip", check_triangular),
    ("worked-example", check_worked_example),
    ("a-basis-1010", check_a_basis_1010),
    ("eval-connes-b", check_eval_connes_b),
    ("hochschild-d2", check_hochschild_d2),
    ("hs1-homology", check_hs1_homology),
    ("nat-d-squared", check_nat_d_squared),
    ("connes-b-squared", check_connes_b_squared),
    ("chain-map", check_chain_map),
    ("shuffle-product", check_shuffle_product),
];

fn lookup(check: &str) -> Result<(&'static str, CheckFn)> {
    CHECKS
        .iter()
        .find(|(name, _)| *name == check)
        .copied()
        .ok_or_else(|| Error::Parse(format!("unknown check '{check}'")))
}

// ---- plans ----------------------------------------------------------------

fn plan(suite: Suite, b: &Bounds) -> Vec<Case> {
    let mut cases = Vec::new();
    let mut add = |check: &'static str, params: Value| cases.push(Case { suite, check, params });
    let (max_n, max_k, t) = (b.max_n, b.max_k, b.truncation);
    // Hochschild word lengths for the operation actions
    let act_len = max_n.saturating_sub(1);
    match suite {
        Suite::Prop23 => {
            for n in 1..=max_n {
                for k in 0..=n + 1 {
                    add("l-differential", json!({"n": n, "k": k}));
                }
            }
        }
        Suite::Inversion => {
            for n in 1..=max_n {
                add("eulerian-count", json!({"n": n}));
            }
            for n in 0..=max_n {
                add("sh-via-shuffles", json!({"n": n}));
            }
            for n in 0..=max_n {
                for k in 0..=max_k {
                    add("lambda-sh-inversion", json!({"n": n, "k": k}));
                }
            }
        }
        Suite::Multiplicativity => {
            for k in 0..=max_k {
                for k2 in 0..=max_k {
                    add("lambda-product", json!({"k": k, "k2": k2, "max_n": max_n}));
                    add("sh-product", json!({"k": k, "k2": k2, "max_n": max_n}));
                }
            }
        }
        Suite::Aw => {
            for n in 0..=max_n {
                add("aw-permutations", json!({"n": n, "shifted": false}));
            }
            for n in 1..=max_n {
                add("aw-permutations", json!({"n": n, "shifted": true}));
            }
            for fam in ["sh", "Bk"] {
                for k in 0..=max_n {
                    add("q-binomial", json!({"family": fam, "k": k, "max_n": max_n}));
                }
            }
        }
        Suite::Cycles => {
            for fam in ["sh", "lambda", "Bk"] {
                for k in 0..=t {
                    add("nat-cycle", json!({"family": fam, "k": k, "K": t}));
                }
            }
            add("nat-cycle", json!({"family": "B", "k": 0, "K": t}));
            for sig in signatures_up_to(b.max_signature) {
                add("x-fs-cycles", json!({"sig": sig, "K": b.formal_truncation}));
            }
        }
        Suite::NatHomology => {
            add("homology", json!({"K": t, "lmin": -2, "lmax": 2}));
            if b.field != Field::Rational && t <= 4 {
                add("homology-fields-agree", json!({"K": t, "lmin": -2, "lmax": 2}));
            }
            for seed in 0..5 {
                add("triangular-roundtrip", json!({"seed": seed, "len": 10, "K": t}));
            }
        }
        Suite::Example => {
            add("worked-example", json!({}));
            for k in 0..=t {
                add("a-basis-1010", json!({"k": k, "K": t}));
            }
            add("eval-connes-b", json!({"K": t}));
        }
        Suite::Dsquare => {
            for alg in ALGEBRAS {
                for len in 1..=max_n + 1 {
                    add("hochschild-d2", json!({"algebra": alg, "len": len}));
                }
            }
            if max_n > 0 {
                add("hs1-homology", json!({"max_len": max_n + 1}));
            }
            add("nat-d-squared", json!({"K": t, "lmin": -2, "lmax": 2}));
        }
        Suite::ChainActions => {
            if act_len > 0 {
                for alg in ALGEBRAS {
                    add("connes-b-squared", json!({"algebra": alg, "max_len": act_len}));
                    for fam in ["sh", "lambda"] {
                        for k in 0..=max_k {
                            add("chain-map", json!({"algebra": alg, "family": fam, "k": k, "max_len": act_len}));
                        }
                    }
                    add("chain-map", json!({"algebra": alg, "family": "B", "k": 0, "max_len": act_len}));
                    add("shuffle-product", json!({"algebra": alg, "max_len": act_len}));
                }
            }
        }
        Suite::All => {}
    }
    cases
}

fn run_case(case: &Case, field: Field) -> (CheckResult, Vec<Row>) {
    let outcome = lookup(case.check).and_then(|(_, f)| f(&case.params, field));
    let (failure, rows) = match outcome {
        Ok(o) => (o.failure, o.rows),
        Err(e) => (Some(format!("error: {e}")), Vec::new()),
    };
    let witness = failure.map(|detail| Witness {
        suite: case.suite,
        check: case.check.to_string(),
        params: case.params.clone(),
        field,
        detail: shorten(detail),
    });
    let status = if witness.is_some() { Status::Fail } else { Status::Pass };
    (CheckResult { id: case.id(), status, witness }, rows)
}

/// Runs a suite (or all of them) at the given bounds. Cases run in
/// parallel on the current rayon pool; results keep the plan order.
pub fn run(suite: Suite, bounds: &Bounds) -> Result<SuiteReport> {
    bounds.check_feasible()?;
    let start = Instant::now();
    let suites: Vec<Suite> = if suite == Suite::All { Suite::CONCRETE.to_vec() } else { vec![suite] };
    let cases: Vec<Case> = suites.iter().flat_map(|s| plan(*s, bounds)).collect();
    let results: Vec<(CheckResult, Vec<Row>)> = cases.par_iter().map(|c| run_case(c, bounds.field)).collect();
    let mut checks = Vec::with_capacity(results.len());
    let mut tables: Vec<Table> = Vec::new();
    for (check, rows) in results {
        checks.push(check);
        for r in rows {
            match tables.iter_mut().find(|t| t.name == r.table) {
                Some(t) => t.rows.push(r.cells),
                None => tables.push(Table { name: r.table, header: r.header, rows: vec![r.cells] }),
            }
        }
    }
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        bounds: bounds.clone(),
        checks,
        tables,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Reruns the single case recorded in a witness.
pub fn replay(witness: &Witness) -> Result<CheckResult> {
    let (check, _) = lookup(&witness.check)?;
    let case = Case { suite: witness.suite, check, params: witness.params.clone() };
    Ok(run_case(&case, witness.field).0)
}
