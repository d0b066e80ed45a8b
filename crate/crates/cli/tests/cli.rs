use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn bddts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bddts")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> String {
        self.0.path().join(name).to_string_lossy().into_owned()
    }
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn scenario_to_saturated_model_matches_the_shipped_door() {
    let dir = Dir::new();
    let (raw, sat, shipped) = (dir.path("raw.json"), dir.path("sat.json"), dir.path("door_sat.json"));
    assert_eq!(code(&bddts(&["parse", &s(&data("door.feature")), "-o", &raw])), 0);
    assert_eq!(code(&bddts(&["saturate", &raw, "-o", &sat])), 0);
    assert_eq!(code(&bddts(&["saturate", &s(&data("door.json")), "-o", &shipped])), 0);
    let iso = bddts(&["iso", &sat, &shipped]);
    assert_eq!(code(&iso), 0);
    assert!(stdout(&iso).starts_with("isomorphic"));
    let not = bddts(&["iso", &raw, &shipped]);
    assert_eq!(code(&not), 1);
    assert_eq!(stdout(&not).trim(), "not isomorphic");
}

#[test]
fn validate_reports_saturation_and_errors() {
    let dir = Dir::new();
    let out = bddts(&["validate", &s(&data("door.json")), "--json"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["valid"], true);
    assert_eq!(report["saturated"], false);

    let mut broken: serde_json::Value = serde_json::from_str(include_str!("../../core/data/door.json")).unwrap();
    broken["initial"] = "1".into();
    let path = dir.path("broken.json");
    std::fs::write(&path, broken.to_string()).unwrap();
    let out = bddts(&["validate", &path]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("is not open"));
}

#[test]
fn equivalence_of_a_set_and_its_composition() {
    let dir = Dir::new();
    let (a, b, c) = (dir.path("a.json"), dir.path("b.json"), dir.path("c.json"));
    bddts(&["saturate", &s(&data("door.json")), "-o", &a]);
    let mut variant: serde_json::Value = serde_json::from_str(include_str!("../../core/data/door.json")).unwrap();
    variant["locations"][2]["og"] = "Door == DoorState::CLOSED".into();
    let raw_variant = dir.path("variant.json");
    std::fs::write(&raw_variant, variant.to_string()).unwrap();
    bddts(&["saturate", &raw_variant, "-o", &b]);
    assert_eq!(code(&bddts(&["compose", &a, &b, "-o", &c])), 0);

    let ini = s(&data("door_ini.json"));
    let left = format!("{a},{b}");
    let ok = bddts(&[
        "check-equiv",
        "--left",
        &left,
        "--right",
        &c,
        "--ini",
        &ini,
        "--max-sigma",
        "3",
    ]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert!(stdout(&ok).starts_with("equivalent up to"));

    let bad = bddts(&["check-equiv", "--left", &a, "--right", &b, "--ini", &ini, "--json"]);
    assert_eq!(code(&bad), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(report["equivalent"], false);
    assert_eq!(report["side"], "GoalImplication");
    assert_eq!(report["sigma"], serde_json::json!(["verify_badge", "trigger_door"]));
}

#[test]
fn generated_tests_pass_the_door_and_catch_the_mutant() {
    let dir = Dir::new();
    let (sat, tc) = (dir.path("sat.json"), dir.path("tc.json"));
    bddts(&["saturate", &s(&data("door.json")), "-o", &sat]);
    let gen = bddts(&[
        "gen-tests",
        &sat,
        "--ini",
        &s(&data("door_ini.json")),
        "--depth",
        "4",
        "-o",
        &tc,
    ]);
    assert_eq!(code(&gen), 0);
    for seed in ["1", "2", "3"] {
        let good = bddts(&["run", &tc, "--sut", &s(&data("door_sut.json")), "--seed", seed]);
        assert_eq!(code(&good), 0, "{}", stdout(&good));
        assert!(stdout(&good).ends_with("verdict: pass\n"));
        let bad = bddts(&[
            "run",
            &tc,
            "--sut",
            &s(&data("door_sut_mutant.json")),
            "--seed",
            seed,
            "--json",
        ]);
        assert_eq!(code(&bad), 1);
        let report: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
        assert_eq!(report["verdict"], "fail");
        assert_eq!(report["transcript"].as_array().unwrap().len(), 2);
    }
    let v = bddts(&["verdict", &tc, "verify_badge(1234) trigger_door(1, CLOSED)"]);
    assert_eq!(code(&v), 1);
    assert!(stdout(&v).starts_with("fail"));
    let v = bddts(&["verdict", &tc, "verify_badge(1234) trigger_door(1, OPEN)"]);
    assert_eq!(code(&v), 0);
}

#[test]
fn dot_export_handles_models_and_test_cases() {
    let dir = Dir::new();
    let (sat, tc) = (dir.path("sat.json"), dir.path("tc.json"));
    bddts(&["saturate", &s(&data("door.json")), "-o", &sat]);
    bddts(&["gen-tests", &sat, "--ini", &s(&data("door_ini.json")), "-o", &tc]);
    let m = bddts(&["export-dot", &sat]);
    assert_eq!(code(&m), 0);
    assert!(stdout(&m).starts_with("digraph bddts {"));
    let t = bddts(&["export-dot", &tc]);
    assert!(stdout(&t).starts_with("digraph testcase {"));
    assert!(stdout(&t).contains("doubleoctagon"));
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(code(&bddts(&["iso"])), 2);
    assert_eq!(code(&bddts(&["validate", "/nonexistent/model.json"])), 2);
    let out = bddts(&["compose", &s(&data("door.json")), &s(&data("door.json"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not saturated"));
    let dir = Dir::new();
    let bad = dir.path("bad.feature");
    std::fs::write(&bad, "sort N = int 0..\n").unwrap();
    let out = bddts(&["parse", &bad]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:14"));
}
