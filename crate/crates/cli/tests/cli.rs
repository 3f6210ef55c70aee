use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubit-chern"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn output_is_byte_deterministic() {
    let args = ["chern", "--shots", "800", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["chern", "--shots", "800", "--seed", "10"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn header_records_resolved_config() {
    let out = run(&["tomography", "--set", "theta_points=51", "--no-dissipation"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(&format!("# qubit-chern {}\n", env!("CARGO_PKG_VERSION"))));
    assert!(text.contains("# dissipation = false\n"));
    assert!(text.contains("# theta_points = 51\n"));
    assert!(text.contains("\nt_meas_us,theta,sx,sy,sz\n"));
    assert_eq!(data_rows(&text).len(), 51);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# test config\nseed = 5\nshots = 300\ndelta2_mhz = 45\n").unwrap();
    let out_path = dir.path().join("chern.csv");
    let out = run(&[
        "chern",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "77",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("# seed = 77\n"));
    assert!(text.contains("# shots = 300\n"));
    assert!(text.contains("# delta2_mhz = 45\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c1_raw = "));
}

#[test]
fn multi_table_commands_write_sibling_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rr.csv");
    let out = run(&[
        "ramp-rate",
        "--set",
        "ramp_t_ramps_us=0.5,1",
        "--workers",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let c1 = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(data_rows(&c1).len(), 2);
    assert!(Path::new(&dir.path().join("rr.map.csv")).exists());
}

#[test]
fn oracle_command() {
    let out = run(&[
        "oracle",
        "--set",
        "lattice_size=24",
        "--set",
        "oracle_t_ramps_us=1",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lattice_chern = 1"));
    let out = run(&["oracle", "--set", "delta2_mhz=45", "--set", "oracle_t_ramps_us=1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lattice_chern = 0"));
    let out = run(&["oracle", "--set", "delta2_mhz=30"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        &["transition", "--set", "delta2_ratios="][..],
        &["chern", "--set", "bogus=1"],
        &["chern", "--set", "fidelity"],
        &["chern", "--shots", "many"],
        &["chern", "--workers", "0"],
        &["chern", "--config", "/nonexistent/run.cfg"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(out.stdout.is_empty(), "{args:?} wrote output");
    }
}
