use std::fs;
use std::process::Command;

use lais::config::RunConfig;
use lais::runner::{GAUSSIAN_COLUMNS, SAMPLER_COLUMNS, SPECTRAL_COLUMNS};

fn lais() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lais"))
}

fn body(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

fn header_of(text: &str) -> Vec<String> {
    let b = body(text);
    let mut rdr = csv::Reader::from_reader(b.as_bytes());
    rdr.headers().unwrap().iter().map(String::from).collect()
}

const QUICK: &[&str] = &[
    "--epsilon_target",
    "0.3",
    "--override_T",
    "0.05",
    "--override_N",
    "40",
    "--n_replications",
    "2",
    "--grid_points",
    "512",
    "--fourier_n_max",
    "8",
];

#[test]
fn run_ais_is_reproducible_from_its_own_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let st = lais().arg("run-ais").args(QUICK).arg("-o").arg(&first).status().unwrap();
    assert!(st.success());
    // feed the emitted file back as the config
    let st = lais().arg("run-ais").arg(&first).arg("-o").arg(&second).status().unwrap();
    assert!(st.success());
    let a = fs::read_to_string(&first).unwrap();
    let b = fs::read_to_string(&second).unwrap();
    assert_eq!(a, b);
    assert_eq!(header_of(&a), SAMPLER_COLUMNS.to_vec());
    let cfg = RunConfig::parse(&a).unwrap();
    assert_eq!(cfg.override_n, Some(40));
    assert_eq!(cfg.epsilon_target, 0.3);
}

#[test]
fn validation_errors_exit_with_two() {
    let out = lais().args(["run-ais", "--override_K", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("override_K"));
    let out = lais().args(["run-ais", "--set", "no_such_key=1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = lais().args(["run-ais", "--epsilon_target", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# quick run\nepsilon_target = 0.3\noverride_T = 0.05\noverride_N = 40\nn_replications = 2\ngrid_points = 512\nfourier_n_max = 8\n").unwrap();
    let out = lais().arg("run-anais").arg(&cfg).args(["--override_N", "30"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# lais run-anais\n"));
    assert!(text.contains("# resolved.N = 30\n"));
    let b = body(&text);
    let mut rdr = csv::Reader::from_reader(b.as_bytes());
    assert_eq!(rdr.records().count(), 6);
}

#[test]
fn sweep_with_no_values_emits_only_the_header() {
    let out = lais().args(["sweep", "--sweep_param", "N"]).args(QUICK).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let h = header_of(&text);
    assert_eq!(&h[..2], ["sweep_param", "sweep_value"]);
    assert_eq!(&h[2..], SAMPLER_COLUMNS);
    assert_eq!(body(&text).lines().count(), 1);
}

#[test]
fn sweep_over_n() {
    let out = lais()
        .args(["sweep", "--sweep_param", "N", "--sweep_values", "10,20"])
        .args(QUICK)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let b = body(&text);
    let mut rdr = csv::Reader::from_reader(b.as_bytes());
    let ns: Vec<String> = rdr.records().map(|r| r.unwrap()[6].to_string()).collect();
    assert_eq!(ns.len(), 12);
    assert!(ns[..6].iter().all(|n| n == "10") && ns[6..].iter().all(|n| n == "20"));
}

#[test]
fn gaussian_and_spectral_reports() {
    let out = lais()
        .args(["run-gaussian", "--d", "2", "--eps_list", "0.5,0.25", "--n_samples", "2000"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(header_of(&text), GAUSSIAN_COLUMNS.to_vec());
    assert_eq!(body(&text).lines().count(), 5);

    let out = lais()
        .args(["spectral-report", "--eps_list", "0.5,1", "--grid_points", "1024", "--override_T", "0.2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(header_of(&text), SPECTRAL_COLUMNS.to_vec());
    let b = body(&text);
    let mut rdr = csv::Reader::from_reader(b.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    let lam1: f64 = rows[0][1].parse().unwrap();
    assert!(lam1.abs() < 1e-8);
    // no ladder ends at ε_1 itself
    assert_eq!(&rows[1][5], "");
}

#[test]
fn calibrate_writes_and_reuses_its_cache() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "calibrate",
        "--epsilon_target",
        "0.3",
        "--grid_points",
        "1024",
        "--pilot_chains",
        "200",
        "--cache_dir",
    ];
    let first = lais().args(args).arg(dir.path()).output().unwrap();
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = lais().args(args).arg(dir.path()).output().unwrap();
    let fresh = lais().args(args).arg(dir.path()).arg("--no-cache").output().unwrap();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, fresh.stdout);
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert!(v["calibration"]["constants"]["t_mix_inf_eps1"].as_f64().unwrap() > 0.0);
}
