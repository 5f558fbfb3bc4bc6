use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn swlab(args: &[&str], config: &Path, out: &Path, envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_swlab"));
    cmd.args(args).arg("--config").arg(config).arg("--out").arg(out);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

struct Case {
    dir: TempDir,
}

impl Case {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn config(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, command: &str, config: &str, out: &str) -> (Output, PathBuf) {
        let cfg = self.config(&format!("{out}.json"), config);
        let dir = self.out(out);
        (swlab(&[command], &cfg, &dir, &[]), dir)
    }
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const WEIGHTED: &str = r#""params":{"n":"3","s":"1","p":"2","r":"4","alpha":"0.5","gamma":"0.25"}"#;

#[test]
fn validate_weighted_tuple_passes_every_condition() {
    let case = Case::new();
    let (o, dir) = case.run("validate", &format!(r#"{{"command":"validate","theorem":"maximizer",{WEIGHTED}}}"#), "v");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == Value::Bool(true)), "{report}");
    assert_eq!(summary(&dir)["status"], "ok");
}

#[test]
fn validation_failure_exits_2_and_names_the_condition() {
    let case = Case::new();
    let cfg = r#"{"command":"verify","verifier":"pseudo-poincare",
        "params":{"n":"3","s":"1","p":"2","q":"1.5","alpha":"0.5","beta":"0.5"}}"#;
    let (o, dir) = case.run("verify", cfg, "pp");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("p ≤ q required"), "{}", stderr(&o));
    let s = summary(&dir);
    assert_eq!(s["exit_code"], 2);
    assert!(s["error"].as_str().unwrap().contains("p ≤ q required"));
}

#[test]
fn config_errors_exit_1_with_the_key() {
    let case = Case::new();
    let (o, _) = case.run("validate", r#"{"command":"validate","theorem":"ckn","params":{"alpa":"1"}}"#, "typo");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpa"), "{}", stderr(&o));
    let (o, _) = case.run("validate", "", "empty");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing command"), "{}", stderr(&o));
    let (o, _) = case.run("riesz", r#"{"command":"heat","params":{"n":"3","p":"2"}}"#, "mismatch");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn conformal_maximize_meets_the_anchor() {
    let case = Case::new();
    let cfg = r#"{"command":"maximize","params":{"n":"3","s":"1","p":"2","r":"6","alpha":"0","gamma":"0"},
        "solver":{"refine":false}}"#;
    let (o, dir) = case.run("maximize", cfg, "conf");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = summary(&dir);
    assert_eq!(s["converged"], true);
    let ratio = s["anchor"]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 5e-3, "{ratio}");
    let trace = fs::read_to_string(dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iter,S_k,t_k\n"));
    let extremal = fs::read_to_string(dir.join("extremal.csv")).unwrap();
    assert_eq!(extremal.lines().count(), 513);
}

#[test]
fn run_directory_reproduces_from_its_config() {
    let case = Case::new();
    let cfg = format!(r#"{{"command":"maximize",{WEIGHTED},"grid":{{"N":"256"}},"solver":{{"refine":false}}}}"#);
    let (o, first) = case.run("maximize", &cfg, "first");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let echoed: Value = serde_json::from_str(&fs::read_to_string(first.join("config.json")).unwrap()).unwrap();
    // Every default is written out.
    for key in ["max_iter", "tol", "t_grid", "seed", "refine", "mode"] {
        assert!(echoed["solver"].get(key).is_some(), "{key} missing from {echoed}");
    }
    assert_eq!(echoed["grid"]["r_min"], "0.000001");
    let second = case.out("second");
    let o = swlab(&["maximize"], &first.join("config.json"), &second, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["trace.csv", "extremal.csv"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn profile_input_round_trips_through_riesz() {
    let case = Case::new();
    let grid = r#""grid":{"r_min":"1e-4","r_max":"1e2","N":"128"}"#;
    let (o, a) = case.run(
        "riesz",
        &format!(r#"{{"command":"riesz","params":{{"n":"3","s":"1"}},{grid},"profile":{{"family":"heat_kernel","t":"0.5"}}}}"#),
        "a",
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // Feed the potential back in as a profile.
    let input = a.join("potential.csv");
    let cfg = format!(
        r#"{{"command":"riesz","params":{{"n":"3","s":"0.5"}},{grid},"io":{{"input":{}}}}}"#,
        serde_json::to_string(&input).unwrap()
    );
    let (o, b) = case.run("riesz", &cfg, "b");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(b.join("potential.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("r,value"));
    assert_eq!(text.lines().count(), 129);
}

#[test]
fn heat_and_besov_outputs() {
    let case = Case::new();
    let grid = r#""grid":{"r_min":"1e-4","r_max":"1e3","N":"128"}"#;
    let cfg = format!(
        r#"{{"command":"heat","params":{{"n":"3","p":"2","alpha":"0.9","delta":"0.5"}},{grid},
            "profile":{{"family":"slow_decay"}},"solver":{{"t_grid":{{"lo":"1e-2","hi":"1e2","count":"9"}}}}}}"#
    );
    let (o, dir) = case.run("heat", &cfg, "heat");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(dir.join("decay.csv")).unwrap().starts_with("t,C_of_t\n"));
    assert!(fs::read_to_string(dir.join("tail.csv")).unwrap().starts_with("k,tail_sup\n"));
    assert!(summary(&dir)["tail_slope"].as_f64().unwrap() < -0.49);

    let cfg = format!(r#"{{"command":"besov","params":{{"n":"3","delta":"1"}},{grid},"solver":{{"t_grid":{{"lo":"1e-3","hi":"1e1","count":"13"}}}}}}"#);
    let (o, dir) = case.run("besov", &cfg, "besov");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let b: Value = serde_json::from_str(&fs::read_to_string(dir.join("besov.json")).unwrap()).unwrap();
    let keys: Vec<&str> = b.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["value", "argmax_t", "endpoint_flag"]);
    // sup_t t^{1/2}(4π(1+t))^{-3/2} at t = 1/2.
    let exact = 0.5f64.sqrt() * (6.0 * std::f64::consts::PI).powf(-1.5);
    assert!((b["value"].as_f64().unwrap() / exact - 1.0).abs() < 1e-4, "{b}");
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let case = Case::new();
    let grid = r#""grid":{"r_min":"1e-4","r_max":"1e2","N":"96"}"#;
    let cfg = format!(
        r#"{{"command":"sweep","runs":[
            {{"command":"verify","verifier":"stein_weiss",{WEIGHTED},{grid},"solver":{{"refine":false,"seed":"11"}}}},
            {{"command":"riesz","params":{{"n":"3","s":"1.5"}},{grid},"method":"heat"}},
            {{"command":"validate","theorem":"stein_weiss",{WEIGHTED}}},
            {{"command":"riesz","params":{{"n":"3","s":"0.5"}},{grid},"profile":{{"family":"power_gaussian","a":"2"}}}}
        ]}}"#
    );
    let path = case.config("sweep.json", &cfg);
    let (one, four) = (case.out("one"), case.out("four"));
    let o = swlab(&["sweep"], &path, &one, &[("SWLAB_WORKERS", "1")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = swlab(&["sweep"], &path, &four, &[("SWLAB_WORKERS", "4")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in [
        "sweep.csv",
        "000-verify/ratios.csv",
        "001-riesz/potential.csv",
        "003-riesz/potential.csv",
    ] {
        assert_eq!(fs::read(one.join(f)).unwrap(), fs::read(four.join(f)).unwrap(), "{f}");
    }
    assert!(one.join("002-validate/report.json").exists());
}

#[test]
fn failing_sweep_member_sets_the_exit_code() {
    let case = Case::new();
    let cfg = r#"{"command":"sweep","runs":[
        {"command":"validate","theorem":"stein_weiss","params":{"n":"3","s":"1","p":"2","r":"4","alpha":"0.5","gamma":"0.3"}}
    ]}"#;
    let (o, dir) = case.run("sweep", cfg, "bad");
    assert_eq!(o.status.code(), Some(2));
    let csv = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert!(csv.ends_with(",2\n"), "{csv}");
}
