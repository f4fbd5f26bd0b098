use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use lais_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    unsafe {
        lais_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn potential() -> *mut LaisPotential {
    let name = CString::new("double_well_1d").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { lais_potential_new(name.as_ptr(), 0.0, &mut p) }, LaisStatus::Ok);
    p
}

#[test]
fn potential_and_quadrature() {
    let p = potential();
    unsafe {
        assert_eq!(lais_potential_dim(p), 1);
        let mut u = f64::NAN;
        assert_eq!(lais_potential_energy(p, [0.25].as_ptr(), 1, &mut u), LaisStatus::Ok);
        assert!((u - 1.0).abs() < 1e-15);
        assert_eq!(lais_potential_energy(p, [0.25, 0.1].as_ptr(), 2, &mut u), LaisStatus::InvalidArgument);
        let mut log_z = f64::NAN;
        assert_eq!(lais_quadrature_log_z(p, 0.02, 8192, &mut log_z), LaisStatus::Ok);
        let laplace = (0.02 / std::f64::consts::PI).sqrt();
        assert!((log_z.exp() / laplace - 1.0).abs() < 0.02);
        lais_potential_free(p);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let bad = CString::new("no_such_landscape").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { lais_potential_new(bad.as_ptr(), 0.0, &mut p) }, LaisStatus::Config);
    assert!(p.is_null());
    assert!(last_error().contains("no_such_landscape"));
    assert!(lais_last_error_length() > 0);
    assert_eq!(unsafe { lais_potential_new(ptr::null(), 0.0, &mut p) }, LaisStatus::NullPointer);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { lais_schedule_new(2.0, 1.0, 1.0, &mut s) }, LaisStatus::InvalidArgument);
    assert!(last_error().contains("epsilon_target"));
    unsafe {
        lais_potential_free(ptr::null_mut());
        lais_measure_free(ptr::null_mut());
        assert_eq!(lais_measure_len(ptr::null()), 0);
    }
}

#[test]
fn sampler_handles() {
    let p = potential();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(lais_schedule_new(0.2, 1.0, 1.0, &mut s), LaisStatus::Ok);
        let k = lais_schedule_transitions(s);
        assert_eq!(k, 5);
        let mut levels = vec![0.0; k + 1];
        assert_eq!(lais_schedule_levels(s, levels.as_mut_ptr(), k + 1), LaisStatus::Ok);
        assert_eq!((levels[0], levels[k]), (1.0, 0.2));
        for anais in [false, true] {
            let mut m = ptr::null_mut();
            let st = if anais {
                lais_anais_run(p, s, 0.05, 100, 1.0, 1, 3, &mut m)
            } else {
                lais_ais_run(p, s, 0.05, 100, 1.0, 1, 3, &mut m)
            };
            assert_eq!(st, LaisStatus::Ok, "{}", last_error());
            assert_eq!((lais_measure_len(m), lais_measure_dim(m)), (100, 1));
            assert!(lais_measure_total_steps(m) > 0);
            let mut w = vec![0.0; 100];
            assert_eq!(lais_measure_weights(m, w.as_mut_ptr(), 100), LaisStatus::Ok);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let mut x = vec![f64::NAN; 100];
            assert_eq!(lais_measure_points(m, x.as_mut_ptr(), 100), LaisStatus::Ok);
            assert!(x.iter().all(|v| (0.0..1.0).contains(v)));
            let mut e = 0.0;
            assert_eq!(lais_measure_ess(m, &mut e), LaisStatus::Ok);
            let direct = 1.0 / w.iter().map(|v| v * v).sum::<f64>();
            assert!((e - direct).abs() < 1e-9);
            assert_eq!(lais_measure_weights(m, w.as_mut_ptr(), 99), LaisStatus::InvalidArgument);
            lais_measure_free(m);
        }
        lais_schedule_free(s);
        lais_potential_free(p);
    }
}

#[test]
fn spectrum_handle() {
    let p = potential();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(lais_spectrum_new(p, 1.0, 1024, 16, &mut s), LaisStatus::Ok);
        assert_eq!(lais_spectrum_len(s), 16);
        let mut ev = vec![0.0; 16];
        assert_eq!(lais_spectrum_eigenvalues(s, ev.as_mut_ptr(), 16), LaisStatus::Ok);
        assert!(ev[0].abs() < 1e-8 && ev.windows(2).all(|w| w[0] <= w[1]));
        let mut t = 0.0;
        assert_eq!(lais_spectrum_mixing_time(s, &mut t), LaisStatus::Ok);
        assert!(t > 0.0 && t < 1.0);
        lais_spectrum_free(s);
        let mut bad = ptr::null_mut();
        assert_eq!(lais_spectrum_new(p, 1.0, 63, 4, &mut bad), LaisStatus::InvalidArgument);
        lais_potential_free(p);
    }
}

#[test]
fn config_run_returns_csv() {
    let cfg = CString::new(
        "epsilon_target = 0.3\noverride_T = 0.05\noverride_N = 20\nn_replications = 2\ngrid_points = 512\nfourier_n_max = 8\n",
    )
    .unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(lais_run_config(cfg.as_ptr(), &mut out), LaisStatus::Ok, "{}", last_error());
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        lais_string_free(out);
        assert!(text.starts_with("# lais run-ais\n"));
        assert!(text.contains("\nreplication,eps_target,K,T,N,h,seed,f_name,"));
        let bad = CString::new("override_K = 0").unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(lais_run_config(bad.as_ptr(), &mut none), LaisStatus::Config);
        assert!(none.is_null());
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(crate_dir().join("include/lais.h")).unwrap();
    for name in [
        "lais_potential_new",
        "lais_schedule_new",
        "lais_ais_run",
        "lais_anais_run",
        "lais_measure_weights",
        "lais_spectrum_new",
        "lais_run_config",
        "lais_last_error_message",
        "LAIS_STATUS_ORACLE = 3",
        "typedef struct LaisMeasure LaisMeasure;",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

fn which(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

/// The static library sits next to the `deps/` directory holding this test.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("liblais_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_the_static_library() {
    if !which("cc") {
        eprintln!("no C compiler on PATH; header-only check");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let include = crate_dir().join("include");
    let syntax = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(crate_dir().join("tests/smoke.c"))
        .status()
        .unwrap();
    assert!(syntax.success());
    let Some(lib) = static_lib() else {
        eprintln!("static library not built in this profile; syntax check only");
        return;
    };
    let exe = dir.path().join("smoke");
    let st = Command::new("cc")
        .arg("-I")
        .arg(&include)
        .arg(crate_dir().join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(Path::new(&exe)).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("n=64 sum=1.0"));
}
