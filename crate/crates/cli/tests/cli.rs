use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn lawvere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lawvere")).args(args).current_dir(root()).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let o = lawvere(&[args, &["--format", "json"]].concat());
    (code(&o), serde_json::from_slice(&o.stdout).expect("json report"))
}

/// Writes a report to a scratch file and re-checks its witness.
fn verify(name: &str, report: &Value) -> i32 {
    let dir = root().join("target/witness-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string(report).unwrap()).unwrap();
    code(&lawvere(&["verify-witness", path.to_str().unwrap()]))
}

#[test]
fn graph_square_of_an_edge_decomposes() {
    let o = lawvere(&["presheaf", "decompose", "gph:ExE"]);
    assert_eq!(code(&o), 0);
    let mut summands: Vec<String> = stdout(&o).trim().split(" + ").map(String::from).collect();
    summands.sort();
    assert_eq!(summands, ["E", "V", "V"]);
    assert_eq!(stdout(&lawvere(&["presheaf", "decompose", "gph:VxE"])).trim(), "V + V");
    assert_eq!(stdout(&lawvere(&["presheaf", "decompose", "gph:V×V"])).trim(), "V");
    assert_eq!(stdout(&lawvere(&["presheaf", "decompose", "inj:y(1)xy(1)@2"])).trim(), "1 + 2");
}

#[test]
fn terminal_graph_is_not_preserved_with_a_checkable_witness() {
    let (c, r) = json(&["presheaf", "preserves", "gph:terminal", "--colimit", "gph:reflexive-coeq"]);
    assert_eq!(c, 1);
    assert_eq!(r["witness"]["image_colimit"], 0);
    assert_eq!(r["witness"]["hom_into_apex"], 1);
    assert_eq!(verify("not-preserved", &r), 0);
    let (c, _) = json(&["presheaf", "preserves", "gph:E+V", "--colimit", "gph:reflexive-coeq"]);
    assert_eq!(c, 0);
}

#[test]
fn reflexive_edge_square_witness() {
    let (c, r) = json(&["presheaf", "decompose", "rgph:ExE"]);
    assert_eq!(c, 1);
    assert_eq!(verify("not-decomposable", &r), 0);
    let mut forged = r["witness"].clone();
    forged["presheaf"] = "rgph:E".into();
    assert_ne!(verify("forged-decomposable", &forged), 0);
}

#[test]
fn shipped_theories_check() {
    for t in ["monoid", "group", "semilattice", "fixtures/monoid.thy", "fixtures/pointed.thy"] {
        assert_eq!(code(&lawvere(&["theory", "check", t])), 0, "{t}");
    }
}

#[test]
fn non_confluent_rules_give_a_critical_pair() {
    let (c, r) = json(&["theory", "check", "fixtures/nonconfluent.thy"]);
    assert_eq!(c, 1);
    assert_eq!(r["witness"]["kind"], "critical-pair");
    assert_eq!(verify("critical-pair", &r), 0);
    // without --unsafe the theory is refused for computation
    assert_eq!(code(&lawvere(&["theory", "hom", "fixtures/nonconfluent.thy", "-m", "1", "-n", "1"])), 2);
}

#[test]
fn model_check_and_tampered_witness() {
    assert_eq!(code(&lawvere(&["model", "check", "fixtures/z2.toml"])), 0);
    let (c, r) = json(&["model", "check", "fixtures/not-a-monoid.toml"]);
    assert_eq!(c, 1);
    assert_eq!(verify("not-a-model", &r), 0);
    let mut bad = r.clone();
    bad["witness"]["right"] = bad["witness"]["left"].clone();
    assert_eq!(verify("not-a-model-tampered", &bad), 1);
}

#[test]
fn theory_morphisms() {
    let ok = ["theory", "morphism", "monoid", "commutative-monoid", "fixtures/monoid-to-commutative-monoid.map"];
    assert_eq!(code(&lawvere(&ok)), 0);
    let (c, r) =
        json(&["theory", "morphism", "commutative-monoid", "monoid", "fixtures/commutative-monoid-to-monoid.map"]);
    assert_eq!(c, 1);
    assert_eq!(verify("morphism-failure", &r), 0);
}

#[test]
fn siftedness_witnesses() {
    assert_eq!(code(&lawvere(&["category", "sifted", "shape:reflexive-pair"])), 0);
    let (c, r) = json(&["category", "sifted", "fixtures/parallel.toml"]);
    assert_eq!(c, 1);
    assert_eq!(r["witness"]["components"], 3);
    assert_eq!(verify("sifted", &r), 0);
    let (c, r) = json(&["category", "sifted", "shape:empty"]);
    assert_eq!(c, 1);
    assert_eq!(verify("sifted-empty", &r), 0);
    assert_eq!(code(&lawvere(&["category", "check", "fixtures/parallel.toml"])), 0);
}

#[test]
fn models_free_hom_quotient() {
    let (c, r) = json(&["model", "free", "semilattice", "--generators", "2"]);
    assert_eq!((c, r["elements"].as_array().unwrap().len()), (0, 4));
    let (c, r) = json(&["model", "hom", "fixtures/z2.toml", "fixtures/z2.toml"]);
    assert_eq!((c, r["count"].as_u64()), (0, Some(2)));
    let (c, r) = json(&["model", "quotient", "fixtures/z2.toml", "--relate", "0=1"]);
    assert_eq!((c, r["carriers"].clone()), (0, serde_json::json!([1])));
}

#[test]
fn free_pointed_set_left_adjoint() {
    let (c, r) = json(&[
        "adjoint",
        "apply",
        "--source",
        "pointed",
        "--target",
        "semilattice",
        "--map",
        "fixtures/pointed-to-semilattice.map",
        "--model",
        "fixtures/pointed-two.toml",
    ]);
    assert_eq!(c, 0);
    assert_eq!(r["carriers"], serde_json::json!([4]));
    assert_eq!(r["certificate"]["holds"], true);
}

#[test]
fn monad_commands() {
    let (c, r) = json(&["monad", "build", "monoid", "--set", "1", "--depth", "3"]);
    assert_eq!(c, 0);
    assert_eq!(r["laws"]["holds"], true);
    assert_eq!(r["elements"].as_array().unwrap().len(), 5);
    assert_eq!(code(&lawvere(&["monad", "roundtrip", "pointed", "--arity", "3"])), 0);
    let (c, r) = json(&["monad", "em", "pointed", "--carrier", "2"]);
    assert_eq!((c, r["algebras"].as_u64()), (0, Some(2)));
}

#[test]
fn exit_codes_for_bad_input_and_exhaustion() {
    assert_eq!(code(&lawvere(&["theory", "check", "fixtures/missing.thy"])), 2);
    assert_eq!(code(&lawvere(&["presheaf", "decompose", "gph:ExQ"])), 2);
    assert_eq!(code(&lawvere(&["presheaf", "decompose", "inj:y(3)@2"])), 2);
    assert_eq!(code(&lawvere(&["suite", "nonsense"])), 2);
    // the free monoid on one generator never closes
    assert_eq!(code(&lawvere(&["model", "free", "monoid", "--generators", "1"])), 3);
    assert_eq!(code(&lawvere(&["theory", "hom", "monoid", "-m", "2", "-n", "2", "--bound", "10"])), 3);
}

#[test]
fn reports_are_reproducible() {
    let args = ["suite", "properties", "--seed", "42", "--instances", "25", "--format", "json"];
    let (a, b) = (lawvere(&args), lawvere(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 42);
}
