use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use otto_cli::sweep::csv_max_diff;
use otto_cli::FIGURES;
use serde_json::Value;

fn otto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otto")).args(args).output().expect("binary runs")
}

fn otto_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otto"))
        .args(args)
        .env(key, val)
        .output()
        .expect("binary runs")
}

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

struct TempConfig(PathBuf);

impl TempConfig {
    fn new(tag: &str, body: &str) -> Self {
        let path = std::env::temp_dir().join(format!("otto-test-{}-{tag}.json", std::process::id()));
        std::fs::write(&path, body).unwrap();
        TempConfig(path)
    }

    fn path(&self) -> &str {
        self.0.to_str().unwrap()
    }
}

impl Drop for TempConfig {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn report_perfect_cycle_work() {
    let c = TempConfig::new("perfect", r#"{"beta": 0.6, "nu1": 1, "nu2": 2, "delta": 0, "chi": "pi/2", "mode": "dephased"}"#);
    let doc = json_of(&otto(&["report", "--config", c.path()]));
    let w = doc["dephased"]["cumulants"]["avg_w"].as_f64().unwrap();
    assert!((w - 0.537050).abs() < 1e-6);
    assert!(doc.get("undephased").is_none());
    assert!(doc["transition_probs"]["theta"].is_number());
}

#[test]
fn report_infinite_temperature_is_idle() {
    let c = TempConfig::new("idle", r#"{"beta": 0, "delta": 0.3, "alpha": "pi/3", "chi": 1}"#);
    let doc = json_of(&otto(&["report", "--config", c.path()]));
    for mode in ["dephased", "undephased"] {
        let r = &doc[mode]["cumulants"];
        for k in ["avg_w", "avg_qm", "avg_qc"] {
            assert!(r[k].as_f64().unwrap().abs() < 1e-12, "{mode} {k}");
        }
        assert_eq!(r["regime"], "idle");
    }
}

#[test]
fn report_modes_agree_without_transitions() {
    let c = TempConfig::new("adiabatic", r#"{"beta": 1.3, "delta": 0, "phi": 0.4, "alpha": 1.1, "chi": 2.5}"#);
    let doc = json_of(&otto(&["report", "--config", c.path(), "--mode", "both"]));
    for k in ["avg_w", "avg_qm", "avg_qc", "var_qc"] {
        let a = doc["dephased"]["cumulants"][k].as_f64().unwrap();
        let b = doc["undephased"]["cumulants"][k].as_f64().unwrap();
        assert!((a - b).abs() <= 1e-10, "{k}: {a} vs {b}");
    }
}

#[test]
fn report_general_dimension_spec() {
    let c = TempConfig::new(
        "qutrit",
        &format!(r#"{{"spec_file": {:?}, "mode": "both"}}"#, manifest("tests/data/qutrit.json")),
    );
    let doc = json_of(&otto(&["report", "--config", c.path()]));
    assert_eq!(doc["dim"], 3);
    assert!(doc["transition_probs"].is_null());
    let j = &doc["undephased"]["cumulants"]["jarzynski"];
    assert!((j[0].as_f64().unwrap() - 1.0).abs() < 1e-10 && j[1].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn infinite_beta_serializes_as_string() {
    let c = TempConfig::new("inf", r#"{"beta": "inf", "delta": 0.2, "alpha": 0.5}"#);
    let doc = json_of(&otto(&["report", "--config", c.path()]));
    assert_eq!(doc["beta"], "inf");
    assert!(doc["dephased"]["cumulants"]["jarzynski"].is_null());
}

#[test]
fn exit_codes() {
    let bad_json = TempConfig::new("badjson", "{");
    assert_eq!(otto(&["report", "--config", bad_json.path()]).status.code(), Some(2));
    let unknown = TempConfig::new("unknown", r#"{"gamma": 1}"#);
    assert_eq!(otto(&["report", "--config", unknown.path()]).status.code(), Some(2));
    let range = TempConfig::new("range", r#"{"alpha": 4}"#);
    assert_eq!(otto(&["report", "--config", range.path()]).status.code(), Some(3));
    let fig5 = manifest("configs/fig5.json");
    let out = otto(&["sweep", "--config", fig5.to_str().unwrap(), "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(4));
    let undefined = TempConfig::new("undef", r#"{"beta": 0, "target": "efficiency", "mode": "dephased"}"#);
    assert_eq!(otto(&["optimize", "--config", undefined.path()]).status.code(), Some(5));
    assert_eq!(otto(&["report", "--mode", "sideways"]).status.code(), Some(2));
}

#[test]
fn check_passes_and_detects_injected_fault() {
    let ok = otto(&["check", "--seed", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.lines().count() >= 15);
    assert!(!text.contains("FAIL"));

    let bad = otto(&["check", "--inject-fault", "non-unital"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL") && l.contains("qmath.channel_unital")));
}

#[test]
fn check_at_zero_temperature_skips_jarzynski() {
    let c = TempConfig::new("cold", r#"{"beta": "inf"}"#);
    let out = otto(&["check", "--config", c.path()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("engine.jarzynski")).unwrap();
    assert!(line.starts_with("N/A"), "{line}");
}

#[test]
fn figures_match_golden_files() {
    for (name, _) in FIGURES {
        let out = otto(&["figure", name]);
        assert!(out.status.success());
        let golden = std::fs::read_to_string(manifest(&format!("golden/{name}.csv"))).unwrap();
        let fresh = String::from_utf8(out.stdout).unwrap();
        csv_max_diff(&fresh, &golden, 1e-9).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let cfg = manifest("configs/fig3.json");
    let cfg = cfg.to_str().unwrap();
    let a = otto(&["sweep", "--config", cfg]);
    let b = otto_env(&["sweep", "--config", cfg], "OTTO_THREADS", "1");
    let c = otto_env(&["sweep", "--config", cfg], "OTTO_THREADS", "3");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn sweep_header_and_order() {
    let c = TempConfig::new(
        "grid",
        r#"{"beta": 1, "mode": "undephased", "sweep": {"axis1": {"name": "delta", "from": 0, "to": 0.5, "steps": 3},
            "axis2": {"name": "chi", "from": 0, "to": "pi", "steps": 2}}}"#,
    );
    let out = otto(&["sweep", "--config", c.path()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("delta,chi,undephased_avg_w,undephased_avg_qm,undephased_avg_qc,undephased_var_w_re"));
    let firsts: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(firsts, ["0.0", "0.0", "0.25", "0.25", "0.5", "0.5"]);
    assert!(lines[2].split(',').nth(1).unwrap().starts_with("3.14159"));
}

#[test]
fn svg_and_json_outputs() {
    let fig6 = manifest("configs/fig6.json");
    let svg = otto(&["sweep", "--config", fig6.to_str().unwrap(), "--format", "svg"]);
    let text = String::from_utf8(svg.stdout).unwrap();
    assert!(text.starts_with("<svg") && text.contains("polyline") && text.contains("undephased_tur_bound"));
    let heat = otto(&["figure", "fig4", "--format", "svg"]);
    assert!(String::from_utf8(heat.stdout).unwrap().matches("<rect").count() > 33 * 33);
    let json = otto(&["figure", "fig5", "--format", "json"]);
    let rows: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 51);
}

#[test]
fn optimize_examples() {
    let xz = TempConfig::new("xz", r#"{"beta": "inf", "delta": 0.1, "phi": 0, "target": "work", "mode": "undephased"}"#);
    let doc = json_of(&otto(&["optimize", "--config", xz.path()]));
    let r = &doc["results"]["undephased"];
    let v = r["value"].as_f64().unwrap();
    assert!((0.95..=0.99).contains(&v), "{v}");
    assert!(r["chi"].as_f64().unwrap().sin().abs() <= 1e-2);

    let adiabatic = TempConfig::new("adiabatic-opt", r#"{"beta": "inf", "delta": 0, "target": "work", "mode": "dephased"}"#);
    let doc = json_of(&otto(&["optimize", "--config", adiabatic.path()]));
    assert!((doc["results"]["dephased"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let xy = TempConfig::new("xy", r#"{"beta": "inf", "delta": 0.3, "phi": "pi/2", "mode": "undephased"}"#);
    let doc = json_of(&otto(&["optimize", "--config", xy.path(), "--target", "work"]));
    let r = &doc["results"]["undephased"];
    assert!((r["alpha"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
    assert_eq!(r["named"], "xy");
}
