use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinetic-levy"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn missing_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["tails", "--config", "/nonexistent/kl.toml"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
}

#[test]
fn physical_parameters_have_no_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["tails", "--delta", "0.5", "--gamma", "1", "--N", "1e6"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing field `B`"));
}

#[test]
fn tails_csv_follows_the_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["tails", "--delta", "0.5", "--B", "1", "--gamma", "1", "--N", "1e6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "tails.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,r,tail,scaled,theory,rel_err"));
    assert_eq!(lines.count(), 3);
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "tails.manifest.json")).unwrap();
    assert_eq!(manifest["subcommand"], "tails");
    assert_eq!(manifest["config_digest"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_sections_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[levy-exponent]\nB = 1.0\ngamma = 1.0\ndelta = 0.75\ntheta = [0.0, 0.5, 1.0]\n\n[tails]\nB = 2\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let o = run(dir.path(), &["levy-exponent", "--config", c]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(dir.path(), "levy_exponent.csv");
    assert!(text.starts_with("theta,phi,regime,B,gamma\n0.0,0.0,"), "{text}");
    let first = read(dir.path(), "levy-exponent.manifest.json");
    let o = run(dir.path(), &["levy-exponent", "--config", c, "--gamma", "2"]);
    assert_eq!(code(&o), 0);
    let second = read(dir.path(), "levy-exponent.manifest.json");
    let digest = |s: &str| serde_json::from_str::<serde_json::Value>(s).unwrap()["config_digest"].clone();
    assert_ne!(digest(&first), digest(&second));
    let o = run(dir.path(), &["levy-exponent", "--config", c, "--set", "bogus=1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn monte_carlo_outputs_are_reproducible_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |threads: &'static str| {
        vec![
            "--seed", "7", "--threads", threads, "mc-charfn", "--B", "1", "--gamma", "1", "--delta", "0.75", "--N", "100,1000", "--set", "t=1",
            "--set", "ensemble=300", "--set", "thetas=[0.5, 1.0]",
        ]
    };
    let oa = run(a.path(), &args("1"));
    let ob = run(b.path(), &args("3"));
    assert!(matches!(code(&oa), 0 | 3), "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(code(&oa), code(&ob));
    for f in ["mc_charfn.csv", "mc_charfn.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
    let da = read(a.path(), "mc-charfn.manifest.json");
    let db = read(b.path(), "mc-charfn.manifest.json");
    let key = |s: &str| {
        let v: serde_json::Value = serde_json::from_str(s).unwrap();
        (v["config_digest"].clone(), v["seed"].clone(), v["version"].clone())
    };
    assert_eq!(key(&da), key(&db));
}

#[test]
fn invalid_experiment_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["mc-clock", "--B", "1", "--gamma", "1", "--delta", "0.75", "--N", "100", "--set", "t=1", "--set", "ensemble=10", "--seed", "1"],
    );
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_all_reports_each_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify-all", "--criteria", "1,2,3", "--seed", "42"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
    assert_eq!(read(dir.path(), "verify_all.csv"), "id,name,pass\n1,spectral identities,true\n2,eigenmode lemma,true\n3,implicit roots,true\n");
    let o = run(dir.path(), &["verify-all", "--criteria", "11"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn spectral_table_and_pde_limit() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["spectral-table", "--B", "1", "--gamma", "1", "--set", "k_points=8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(dir.path(), "spectral_table.csv").lines().count(), 17);
    let o = run(
        dir.path(),
        &["pde-limit", "--gamma", "1", "--set", "B=[1.0, 0.01, 0.0001]", "--set", "t=[0.0, 0.5, 1.0]", "--set", "n_points=1024", "--set", "half_width=32"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(dir.path(), "pde_limit.csv").lines().count(), 4);
}
