use std::time::Instant;

use rateless_coop::harness::{
    cmd_analyze, cmd_bounds, cmd_optimize, cmd_simulate, presets, Experiment, HarnessError, RunOptions,
};
use rateless_coop::optimizer::DesignParams;

fn opts(dir: &std::path::Path) -> RunOptions {
    RunOptions { seed: None, workers: Some(2), out: dir.to_path_buf() }
}

fn write_config(dir: &std::path::Path, text: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const TINY: &str = r#"
M = 2
k = 200
N = 20
scheme = "pcc"
trials = 1
master_seed = 9
precode = { kind = "none" }
[erasures]
user_to_dest = [0.2, 0.6]
inter_user = 0.3
[sweep]
axis = "e_inter"
values = [0.0, 0.5]
[[sweep.variants]]
scheme = "pcc"
[[sweep.variants]]
scheme = "nocoop"
[[sweep.variants]]
label = "fcc-custom"
scheme = "fcc"
fcc = ["fcc-m1", "fcc-m2"]
"#;

#[test]
fn identical_inputs_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = write_config(a.path(), TINY);
    cmd_simulate(&cfg, &opts(a.path())).unwrap();
    let mut o = opts(b.path());
    o.workers = Some(1);
    cmd_simulate(&cfg, &o).unwrap();
    for f in ["simulation.csv", "recovery_sim.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn sweep_rows_cover_every_value_and_variant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), TINY);
    cmd_simulate(&cfg, &opts(dir.path())).unwrap();
    cmd_analyze(&cfg, &opts(dir.path())).unwrap();
    for f in ["simulation.csv", "analysis.csv"] {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# config_hash="));
        let header = lines.next().unwrap();
        assert!(header.starts_with("variant,scheme,M,k,N,e_inter,e_1,e_2,F,trials,mean_throughput,ci95,mean_frames,incomplete_count"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 6, "{f}");
        assert!(rows.iter().any(|r| r.starts_with("fcc-custom,fcc,")));
    }
}

#[test]
fn seed_override_changes_header_and_results() {
    let a = tempfile::tempdir().unwrap();
    let cfg = write_config(a.path(), TINY);
    cmd_simulate(&cfg, &opts(a.path())).unwrap();
    let first = std::fs::read_to_string(a.path().join("simulation.csv")).unwrap();
    let mut o = opts(a.path());
    o.seed = Some(10);
    cmd_simulate(&cfg, &o).unwrap();
    let second = std::fs::read_to_string(a.path().join("simulation.csv")).unwrap();
    assert!(second.lines().next().unwrap().ends_with("master_seed=10"));
    assert_ne!(first, second);
}

#[test]
fn config_errors_exit_with_two_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = RunOptions { seed: None, workers: None, out: out.clone() };
    let bad_key = write_config(dir.path(), &TINY.replace("k = 200", "k = 0"));
    let err = cmd_simulate(&bad_key, &o).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("`k`"), "{err}");
    let bad_axis = write_config(dir.path(), &TINY.replace("\"e_inter\"", "\"gamma\""));
    assert_eq!(cmd_analyze(&bad_axis, &o).unwrap_err().exit_code(), 2);
    let bad_design = write_config(dir.path(), "kind = \"pcc\"\nM = 2\nk = 100\n");
    assert_eq!(cmd_optimize(&bad_design, &o).unwrap_err().exit_code(), 2);
    assert!(matches!(cmd_simulate("preset:nope", &o), Err(HarnessError::UnknownPreset(_))));
    assert_eq!(cmd_simulate("/nonexistent/exp.toml", &o).unwrap_err().exit_code(), 2);
    assert!(!out.exists());
}

#[test]
fn bounds_need_two_users() {
    let dir = tempfile::tempdir().unwrap();
    let err = cmd_bounds("preset:fig7a", &opts(dir.path())).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert_eq!(err.to_string(), "bounds defined for 2-user CMAC");
}

#[test]
fn smoke_preset_is_quick() {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    cmd_simulate("preset:smoke", &opts(dir.path())).unwrap();
    assert!(t.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn every_preset_parses() {
    for (name, text) in presets::PRESETS {
        if name.starts_with("table1") || name.starts_with("table3") {
            DesignParams::from_toml(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        } else {
            let exp = Experiment::from_toml(text, None).unwrap_or_else(|e| panic!("{name}: {e}"));
            exp.points().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn optimize_writes_a_parseable_distribution() {
    let dir = tempfile::tempdir().unwrap();
    cmd_optimize("preset:table1-m2", &opts(dir.path())).unwrap();
    let text = std::fs::read_to_string(dir.path().join("distribution.txt")).unwrap();
    let dist = rateless_coop::codec::parse_distribution(&text).unwrap();
    let report = std::fs::read_to_string(dir.path().join("design_report.csv")).unwrap();
    let mu: f64 = report.lines().find_map(|l| l.strip_prefix("mean_degree,")).unwrap().parse().unwrap();
    assert!((dist.mean() - mu).abs() < 1e-12);
}
