use cli_reports::output::strip_timestamp;
use std::path::Path;
use std::process::{Command, Output};

fn restrictlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_restrictlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("RESTRICTLAB_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn contact_cubic_has_order_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = restrictlab(&["contact", "--symbol", "torus_laplace", "--curve", "poly:t,t^3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).contains("sigma_global = 2"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("contact.json")).unwrap()).unwrap();
    assert_eq!(json["sigma_global"], serde_json::json!(2));
    assert!(dir.path().join("contact.csv").exists());
}

#[test]
fn contact_oscillator_orbit_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let o = restrictlab(&["contact", "--symbol", "hermite", "--curve", "circle:0,0,0.7071067811865476"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).contains(">= j_max (8)"), "{}", stdout(&o));
}

#[test]
fn malformed_curve_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = restrictlab(&["contact", "--curve", "poly:t,,t^3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("curve"));
    let o = restrictlab(&["contact", "--curve", "spiral:1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_flags_and_bad_config_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(restrictlab(&["predict", "--colour", "red"], dir.path()).status.code(), Some(1));
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"lambda_grid": {"max": 20000}}"#).unwrap();
    let o = restrictlab(&["verify-torus", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = restrictlab(&["verify-sphere", "--symbol", "hermite"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = restrictlab(&["predict", "--q", "3/2"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let o = Command::new(env!("CARGO_BIN_EXE_restrictlab")).arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn predict_table_has_six_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = restrictlab(&["predict", "--q", "2,4", "--sigma", "1,2,inf"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("predict.csv")).unwrap();
    let body = strip_timestamp(&text);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "q,sigma,rho,rho_float,hermite,hermite_float,flags");
    assert_eq!(lines.len(), 7);
    assert!(lines.contains(&"2,1,1/6,0.16666666666666666,-1/6,-0.16666666666666666,"));
    assert!(lines.contains(&"2,2,1/5,0.2,-1/10,-0.1,"));
    assert!(lines.iter().filter(|l| l.starts_with("4,")).all(|l| l.contains(",1/4,0.25,")));
}

#[test]
fn polylab_to_twenty_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = restrictlab(&["polylab", "--sigma-max", "20"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("polylab.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], serde_json::json!(true));
}

#[test]
fn reruns_are_identical_apart_from_the_timestamp() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["verify-torus", "--lambda-min", "60", "--lambda-max", "200", "--seed", "9"];
    let oa = restrictlab(&args, a.path());
    let ob = restrictlab(&args, b.path());
    assert_eq!(oa.status.code(), ob.status.code());
    let ta = std::fs::read_to_string(a.path().join("samples.csv")).unwrap();
    let tb = std::fs::read_to_string(b.path().join("samples.csv")).unwrap();
    assert!(ta.starts_with("# generated_unix="));
    assert_eq!(strip_timestamp(&ta), strip_timestamp(&tb));
    for name in ["verdict.json", "fit.json"] {
        let ja = std::fs::read_to_string(a.path().join(name)).unwrap().replace(a.path().to_str().unwrap(), "");
        let jb = std::fs::read_to_string(b.path().join(name)).unwrap().replace(b.path().to_str().unwrap(), "");
        assert_eq!(ja, jb, "{name}");
    }
}

#[test]
fn jobs_setting_does_not_change_results() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["verify-torus", "--lambda-min", "60", "--lambda-max", "200"];
    restrictlab(&args, a.path());
    let o = Command::new(env!("CARGO_BIN_EXE_restrictlab"))
        .args(args)
        .arg("--out")
        .arg(b.path())
        .env("RESTRICTLAB_JOBS", "2")
        .output()
        .unwrap();
    assert!(matches!(o.status.code(), Some(0 | 2 | 3)));
    let read = |d: &Path| strip_timestamp(&std::fs::read_to_string(d.join("samples.csv")).unwrap());
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn verify_sphere_equator_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = restrictlab(&["verify-sphere", "--lambda-max", "400"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verdict.json")).unwrap()).unwrap();
    assert_eq!(v["sigma_detected"], "inf");
    assert_eq!(v["rho_target"], "1/4");
    assert_eq!(v["pass"], true);
}

#[test]
fn samples_survive_a_failed_fit() {
    // two groups are too few to fit; the raw samples are still written
    let dir = tempfile::tempdir().unwrap();
    let o = restrictlab(&["verify-hermite", "--lambda-min", "200", "--lambda-max", "210", "--points-per-decade", "1"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    let text = std::fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    assert!(strip_timestamp(&text).lines().count() > 1);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verdict.json")).unwrap()).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["error"].is_string());
}

#[test]
fn extremize_reports_caps() {
    let dir = tempfile::tempdir().unwrap();
    let o = restrictlab(&["extremize", "--sigma", "2", "--lambda", "300", "--q", "2,4", "--ascent-steps", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("cap size") && s.contains("q = 4: cap ratio"), "{s}");
    let j: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("extremize.json")).unwrap()).unwrap();
    let cap2 = j["ratios"][0][1].as_f64().unwrap();
    assert!(cap2 <= j["gram_norm"].as_f64().unwrap());
}
