use std::path::Path;
use std::process::{Command, Output};

fn pfrac(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfrac")).args(args).current_dir(cwd).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn plate(dir: &Path, extra: &str, steps: usize) -> String {
    let text = format!(
        r#"{{
  "scenario": "mode_I",
  "geometry": {{ "width_mm": 40.0, "height_mm": 40.0, "nx": 20, "ny": 20 }},
  "material": {{ "E_MPa": 50400.0, "nu": 0.2 }},
  "drive": {{ "variant": "griffith" }},
  "evolution": {{ "lc_mm": 4.0, "Gc_N_per_mm": 0.075 }},
  "loading": {{ "du_mm": 0.001, "steps": {steps} }}{extra}
}}"#
    );
    let p = dir.join("plate.json");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn value(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("{key} missing in {out}"))
        .parse()
        .unwrap()
}

#[test]
fn validate_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = plate(dir.path(), "", 5);
    let o = pfrac(&["validate", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scenario"], "mode_I");

    let coarse = std::fs::read_to_string(&cfg).unwrap().replace("\"lc_mm\": 4.0", "\"lc_mm\": 1.0");
    std::fs::write(&cfg, coarse).unwrap();
    let o = pfrac(&["validate", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2h"));

    std::fs::write(&cfg, "{ \"scenario\": \"mode_I\", ").unwrap();
    assert_eq!(pfrac(&["validate", &cfg], dir.path()).status.code(), Some(2));
}

#[test]
fn run_then_postprocess() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = plate(dir.path(), "", 60);
    let o = pfrac(&["run", &cfg, "--out", "r"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let run = dir.path().join("r");
    let curve = std::fs::read_to_string(run.join("curve.csv")).unwrap();
    assert_eq!(curve.lines().next(), Some("step,u_mm,F_N,max_z,iters,seconds"));
    for f in ["manifest.json", "summary.json", "field_final.vtk"] {
        assert!(run.join(f).exists(), "{f}");
    }

    let o = pfrac(&["postprocess", "fmax", "r"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(value(&out, "F_max") > 0.0);
    assert!(value(&out, "u_at_F_max_mm") > 0.0);

    // Mode I runs straight through the ligament.
    let o = pfrac(&["postprocess", "kink", "r"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let angle = value(&stdout(&o), "kink_angle_deg");
    assert!((angle - 180.0).abs() < 10.0, "{angle}");
}

#[test]
fn solver_failure_keeps_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = plate(dir.path(), r#", "solver": { "max_iterations": 0 }"#, 5);
    let o = pfrac(&["run", &cfg, "--out", "r"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let run = dir.path().join("r");
    let curve = std::fs::read_to_string(run.join("curve.csv")).unwrap();
    assert_eq!(curve.trim_end(), "step,u_mm,F_N,max_z,iters,seconds");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "solver_failure");
    assert!(run.join("manifest.json").exists());
}

#[test]
fn sweep_prints_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = plate(dir.path(), "", 3);
    let o = pfrac(&["sweep", &cfg, "--axis", "evolution.lc_mm", "--values", "4", "6", "--out", "s"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "evolution.lc_mm,F_max_N,ratio,status");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("4,") && rows[2].starts_with("6,"));

    let o = pfrac(&["sweep", &cfg, "--axis", "evolution.lc_mm", "--values", "4", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = pfrac(&["sweep", &cfg, "--axis", "evolution.nope", "--values", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn kink_needs_a_notched_plate() {
    let dir = tempfile::tempdir().unwrap();
    let bar = dir.path().join("bar.json");
    std::fs::write(
        &bar,
        r#"{ "scenario": "bar_1d", "drive": { "variant": "griffith" },
  "evolution": { "lc_mm": 1.0, "Gc_N_per_mm": 1.0 }, "loading": { "steps": 5 } }"#,
    )
    .unwrap();
    assert_eq!(pfrac(&["run", bar.to_str().unwrap(), "--out", "b"], dir.path()).status.code(), Some(0));
    assert_eq!(pfrac(&["postprocess", "kink", "b"], dir.path()).status.code(), Some(2));
}
