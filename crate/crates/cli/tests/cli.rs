use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn dlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlab")).args(args).env_remove("DLAB_DIGIT_GUARD").output().expect("spawn dlab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn hand_pair(dir: &TempDir) -> (PathBuf, PathBuf) {
    let u = dir.path().join("u.csv");
    let v = dir.path().join("v.csv");
    std::fs::write(&u, "t,value_num,value_den\n1,1,1\n4,3,10\n10,1,10\n20,,\n").unwrap();
    std::fs::write(&v, "t,value_num,value_den\n2,1,2\n6,1,5\n15,1,20\n20,,\n").unwrap();
    (u, v)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_thm1_matches_recurrence() {
    let out = dlab(&["construct", "--scheme", "thm1", "--gamma", "3/2", "--depth", "6"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["scheme"], "thm1");
    assert_eq!(doc["theta"]["a0"], "0");
    // a_{ν+1} = q_ν from the seed [0; 1]
    assert_eq!(doc["theta"]["tail"], serde_json::json!(["1", "1", "2", "5", "27", "734"]));
}

#[test]
fn cf_reports_distances_as_fractions() {
    let out = dlab(&["cf", "[0; 2, 2, 2]"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    let d: Vec<&str> = doc["distances"].as_array().unwrap().iter().map(|r| r["distance"].as_str().unwrap()).collect();
    assert_eq!(d, ["5/12", "1/6", "1/12"]);
}

#[test]
fn measure_csv_feeds_back() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("psi.csv");
    let out = dlab(&["measure", "--cf", "[0; 2, 2, 2]", "--kind", "psi", "--out", s(&csv)]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "t,value_num,value_den\n1,5,12\n2,1,6\n5,,\n");
    let svg = dir.path().join("psi.svg");
    assert_eq!(code(&dlab(&["plot", "--step", s(&csv), "--out", s(&svg)])), 0);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<?xml"));
}

#[test]
fn verify_theorem_three_is_near_equality() {
    let out = dlab(&["verify", "--theorem", "T3", "--gamma", "1/1", "--depth", "10"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["satisfied"], true);
    assert!(doc["slack"].as_f64().unwrap().abs() < 0.15);
}

#[test]
fn exit_codes() {
    // not applicable counts as a failed check
    let out = dlab(&["verify", "--theorem", "T2", "--scheme", "thm1", "--gamma", "3/2", "--depth", "12"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["status"], "not_applicable");

    assert_eq!(code(&dlab(&["verify", "--theorem", "T7", "--gamma", "1"])), 2);
    assert_eq!(code(&dlab(&["construct", "--scheme", "thm1", "--gamma", "5/2"])), 2);
    assert_eq!(code(&dlab(&["cf", "[0; 0]"])), 2);
    assert_eq!(code(&dlab(&["frobnicate"])), 2);

    let guarded = Command::new(env!("CARGO_BIN_EXE_dlab"))
        .args(["construct", "--scheme", "thm3", "--gamma", "1", "--depth", "12"])
        .env("DLAB_DIGIT_GUARD", "20")
        .output()
        .unwrap();
    assert_eq!(code(&guarded), 3);
    let flag = dlab(&["construct", "--scheme", "thm3", "--gamma", "1", "--depth", "12", "--digit-guard", "20"]);
    assert_eq!(code(&flag), 3);
}

#[test]
fn lemma_control_pair_has_no_witness() {
    let out = dlab(&["lemma1", "--seed", "5", "--no-alternation"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["conditions"]["a_holds"], false);
    assert_eq!(doc["witnesses"], serde_json::json!([]));
    assert_eq!(doc["expected"]["witness"], false);
}

#[test]
fn hand_pair_plot_marks_the_witness() {
    let dir = TempDir::new().unwrap();
    let (u, v) = hand_pair(&dir);
    let report = dir.path().join("lemma.json");
    let out = dlab(&["lemma1", "--u", s(&u), "--v", s(&v), "--window-start", "2", "--window-end", "15", "--out", s(&report)]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["witnesses"][0]["q"], serde_json::json!(["4", "10"]));
    assert_eq!(doc["witnesses"][0]["s"], serde_json::json!(["6", "15"]));
    assert_eq!(doc["verified"], serde_json::json!([true]));

    let svg_path = dir.path().join("hand.svg");
    let out = dlab(&["plot", "--step", s(&u), "--step", s(&v), "--witnesses", s(&report), "--out", s(&svg_path)]);
    assert_eq!(code(&out), 0);
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    // three pieces per trace, one filled and one open dot each
    assert_eq!(svg.matches("<circle").count(), 12);
    assert_eq!(svg.matches(r#"r="3.5" fill="white"/>"#).count(), 6);
    for label in ["q_nu* = 4", "s_mu* = 6", "q_nu*+1 = 10", "s_mu*+1 = 15"] {
        assert!(svg.contains(label), "missing {label}");
    }
    assert_eq!(svg.matches("stroke-dasharray").count(), 4);
}

#[test]
fn upsilon_below_t_psi_on_one_canvas() {
    let dir = TempDir::new().unwrap();
    let psi = dir.path().join("psi.csv");
    let ups = dir.path().join("ups.csv");
    assert_eq!(code(&dlab(&["measure", "--cf", "[0; 2, 2, 2]", "--kind", "psi", "--out", s(&psi)])), 0);
    assert_eq!(code(&dlab(&["measure", "--cf", "[0; 2, 2, 2]", "--kind", "upsilon", "--out", s(&ups)])), 0);
    let read = |p: &Path| dlab_read(p);
    let (psi_f, ups_f) = (read(&psi), read(&ups));
    for (start, _, v) in ups_f.pieces() {
        let t = num_rational::BigRational::from(start.clone());
        assert!(v <= &(t.clone() * psi_f.eval(&t).unwrap()));
    }
    let out = dlab(&["plot", "--step", s(&psi), "--step", s(&ups), "--label", "psi", "--label", "upsilon"]);
    assert_eq!(code(&out), 0);
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.contains(">psi</text>") && svg.contains(">upsilon</text>"));
}

fn dlab_read(p: &Path) -> dlab_core::StepFunction {
    dlab::formats::read_step_csv(std::fs::File::open(p).unwrap()).unwrap()
}
