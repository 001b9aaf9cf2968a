use std::process::{Command, Output};

use serde_json::Value;

fn hochops(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hochops")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn op_sh_2_3_lists_five_maps_deterministically() {
    let a = hochops(&["op", "--family", "sh", "--k", "2", "--n", "3", "--json"]);
    assert!(a.status.success());
    let v = json(&a);
    let terms = v["morphism"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 5);
    assert_eq!(terms[0]["coeff"], "2");
    let b = hochops(&["op", "--family", "sh", "--k", "2", "--n", "3", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn homology_ranks_in_degrees_zero_and_one() {
    let out = hochops(&["homology", "--K", "3", "--lmin", "-2", "--lmax", "2", "--json"]);
    assert!(out.status.success());
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    for r in rows {
        match r["degree"].as_i64().unwrap() {
            0 | 1 => assert_eq!(r["class_rank"], 4),
            _ => assert_eq!(r["stable_dim"], 0),
        }
    }
    let text = hochops(&["homology", "--K", "3", "--lmin", "0", "--lmax", "1"]);
    assert!(String::from_utf8_lossy(&text.stdout).starts_with("degree,dim,stable_dim,boundary_dim,class_rank\n0,"));
}

#[test]
fn eval_spec_gives_connes_b() {
    let b1 = r#"{"sig":[1,0,1,0],"f":[1],"s":{"1":1},"k":[1]}"#;
    let out = hochops(&["eval", "--op", b1, "--chain", "t⊗t^2", "--json"]);
    assert!(out.status.success());
    let v = json(&out);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["blocks"][0], serde_json::json!(["1", "t", "t^2"]));
    assert_eq!(terms[0]["coeff"], "1");
    assert_eq!(terms[1]["coeff"], "-1");
    let fam = json(&hochops(&["eval", "--op", "B", "--chain", "t⊗t^2", "--json"]));
    assert_eq!(fam["terms"].as_array().unwrap().len(), 2);
    let b0 = r#"{"sig":[1,0,1,0],"f":[1],"s":{"1":1},"k":[0]}"#;
    let zero = hochops(&["eval", "--op", b0, "--chain", "t⊗t^2"]);
    assert_eq!(String::from_utf8_lossy(&zero.stdout), "0\n");
}

#[test]
fn eval_reads_chain_files_and_writes_out() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("c.json");
    std::fs::write(&chain, r#"{"algebra":"hs1","terms":[{"word":["1","x","x"],"coeff":"3"}]}"#).unwrap();
    let out = dir.path().join("r.json");
    let r = hochops(&[
        "eval",
        "--op",
        "sh:1",
        "--chain",
        chain.to_str().unwrap(),
        "--json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["terms"][0]["coeff"], "3");
}

#[test]
fn build_and_basis() {
    let v = json(&hochops(&["build", "--sig", "1,0,1,0", "--k", "2", "--json"]));
    assert_eq!(v.as_array().unwrap().len(), 2);
    let x = json(&hochops(&["build", "--op", r#"{"sig":[0,2,0,1],"f":[1,1],"s":{},"k":[]}"#, "--json"]));
    assert_eq!(x["sig"], serde_json::json!([0, 2, 0, 1]));
    assert_eq!(x["components"].as_array().unwrap().len(), 1);
}

#[test]
fn aw_table_and_simplex() {
    let v = json(&hochops(&["aw", "--max-n", "4", "--json"]));
    assert_eq!(v["q"]["sh"][2], serde_json::json!(["0", "0", "1", "2", "3"]));
    let s = hochops(&["aw", "--simplex", "1,2,3", "--level", "2"]);
    assert_eq!(String::from_utf8_lossy(&s.stdout), "1·1⊗y⊗y\n");
}

#[test]
fn verify_exit_codes_and_replay() {
    let ok = hochops(&["verify", "prop23", "--max-n", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("0 failed"));
    assert_eq!(hochops(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(hochops(&["--field", "fp:9", "verify", "prop23"]).status.code(), Some(2));
    assert_eq!(hochops(&["verify", "aw", "--max-n", "12"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("w.json");
    std::fs::write(&bad, r#"{"suite":"prop23","check":"l-differential","params":{"n":0,"k":1},"field":"q","detail":""}"#)
        .unwrap();
    let r = hochops(&["--replay", bad.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    let good = dir.path().join("g.json");
    std::fs::write(
        &good,
        r#"[{"suite":"prop23","check":"l-differential","params":{"n":5,"k":3},"field":"fp:101","detail":""}]"#,
    )
    .unwrap();
    assert_eq!(hochops(&["--replay", good.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn verify_all_with_degenerate_bounds() {
    let out = hochops(&["verify", "all", "--max-n", "0", "--K", "2", "--formal-k", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["suite"], "all");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}
