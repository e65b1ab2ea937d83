use std::process::Command;

fn rcoop(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rcoop")).args(args).output().unwrap()
}

#[test]
fn sweep_writes_every_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = rcoop(&["sweep", "--config", "preset:smoke", "--seed", "3", "--workers", "2", "--out", out]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for f in ["simulation.csv", "recovery_sim.csv", "analysis.csv", "recovery_analysis.csv", "bounds.csv"] {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(text.starts_with("# config_hash="), "{f}");
        assert!(text.lines().next().unwrap().ends_with("master_seed=3"), "{f}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "M = 2\nk = \"many\"\n").unwrap();
    let r = rcoop(&["simulate", "--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("k"));
    assert_eq!(rcoop(&["bounds", "--config", "preset:fig7a", "--out", out]).status.code(), Some(2));
    assert!(!std::path::Path::new(out).exists());
    // clap's own usage errors also exit with 2
    assert_eq!(rcoop(&["simulate"]).status.code(), Some(2));
    let r = rcoop(&["optimize", "--config", "preset:table1-m1", "--out", out]);
    assert_eq!(r.status.code(), Some(0));
}
