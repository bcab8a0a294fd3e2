use std::fs;
use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mkdvb-lab"))
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "experiment = \"scaling\"\n[grid]\npoints = 128\n[time]\nfinal = 0.1\ndt = 0.01\n").unwrap();
    let out = dir.path().join("out");
    let status = lab()
        .args(["scaling", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--lambda", "1", "--set", "time.record_every=5"])
        .env("MKDVB_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["scaling"]["lambda"], 1.0);
    assert_eq!(manifest["config"]["grid"]["points"], 128);
    assert_eq!(manifest["config"]["time"]["record_every"], 5);
    assert_eq!(manifest["status"]["state"], "complete");
    assert!(out.join("scaling.csv").exists());
}

#[test]
fn bad_configs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let o = lab().args(args).arg("--out").arg(dir.path()).output().unwrap();
        (o.status.code(), String::from_utf8_lossy(&o.stderr).into_owned())
    };
    let (code, err) = run(&["evolve", "--family", "mkdv-b", "--epsilon", "2"]);
    assert_eq!(code, Some(1));
    assert!(err.contains("ε ∈ (0, 1]"), "{err}");
    let (code, err) = run(&["evolve", "--epsilon", "0.1"]);
    assert_eq!(code, Some(1));
    assert!(err.contains("mkdv-b"), "{err}");
    let (code, err) = run(&["evolve", "--set", "grid.spacing=1"]);
    assert_eq!(code, Some(1));
    assert!(err.contains("spacing"), "{err}");

    let cfg = dir.path().join("miura.toml");
    fs::write(&cfg, "experiment = \"miura\"\n").unwrap();
    let o = lab().arg("evolve").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn blow_up_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab()
        .args(["evolve", "--family", "kdv", "--profile", "cosine", "--amplitude", "40", "--set", "data.mode=1"])
        .args(["--length", "6.283185307179586", "--points", "32", "--final-time", "5", "--dt", "0.05"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("blow-up"));
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"partial\""));
}
