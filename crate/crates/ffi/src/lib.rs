//! C interface to `lais`.
//!
//! Every fallible call returns a [`LaisStatus`] and writes its result through
//! an out-pointer. On failure the message is kept per thread and can be read
//! with [`lais_last_error_message`]. Handles are opaque and must be released
//! with the matching `*_free` function; passing NULL to a `*_free` is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lais::config::{Algorithm, RunConfig};
use lais::diagnostics::{ess, EmpiricalMeasure};
use lais::dynamics::default_step_size;
use lais::oracle::{
    build_symmetrized_generator, eigen_decompose, quadrature_log_z, uniform_mixing_time, Grid1D, SpectralDecomposition,
};
use lais::potential::Potential;
use lais::sampler::{ais_ensemble, anais_ensemble, langevin_kernel, Start};
use lais::schedule::TemperingSchedule;
use lais::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaisStatus {
    Ok = 0,
    InvalidArgument = 1,
    Config = 2,
    Oracle = 3,
    DegenerateWeights = 4,
    Io = 5,
    NullPointer = 6,
    Panic = 7,
}

pub struct LaisPotential(Potential);

pub struct LaisSchedule(TemperingSchedule);

pub struct LaisMeasure {
    measure: EmpiricalMeasure,
    total_steps: u64,
}

pub struct LaisSpectrum(SpectralDecomposition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> LaisStatus {
    match e {
        Error::InvalidParameter { .. } => LaisStatus::InvalidArgument,
        Error::Config { .. } => LaisStatus::Config,
        Error::Oracle(_) => LaisStatus::Oracle,
        Error::DegenerateWeights => LaisStatus::DegenerateWeights,
        _ => LaisStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LaisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LaisStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("`{what}` is NULL"));
            LaisStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            LaisStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure::Lib(Error::Config {
            key: what.to_string(),
            reason: "not valid UTF-8".into(),
        })
    })
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn size_mismatch(what: &'static str, got: usize, want: usize) -> Failure {
    Failure::Lib(Error::InvalidParameter {
        name: what,
        reason: format!("buffer holds {got} values, need {want}"),
    })
}

/// Length in bytes of the last error message on this thread, excluding the NUL; 0 if none.
#[no_mangle]
pub extern "C" fn lais_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |s| s.as_bytes().len()))
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len - 1` bytes). Returns the number of bytes written, excluding the NUL.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lais_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |s| s.as_bytes());
        let n = bytes.len().min(len - 1);
        ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
        n
    })
}

/// Builds a named landscape (`double_well_1d`, `double_well_2d`, `flat_1d`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lais_potential_new(name: *const c_char, asymmetry: f64, out_handle: *mut *mut LaisPotential) -> LaisStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let p = Potential::from_name(text(name, "name")?, asymmetry)?;
        *slot = Box::into_raw(Box::new(LaisPotential(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from [`lais_potential_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lais_potential_free(p: *mut LaisPotential) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Dimension of the torus; 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lais_potential_dim(p: *const LaisPotential) -> usize {
    p.as_ref().map_or(0, |p| p.0.dim())
}

/// `U(x)` for a point of `dim` coordinates.
///
/// # Safety
/// `x` must point to `dim` values; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lais_potential_energy(
    p: *const LaisPotential,
    x: *const f64,
    dim: usize,
    out_value: *mut f64,
) -> LaisStatus {
    guard(|| {
        let p = &deref(p, "potential")?.0;
        if dim != p.dim() {
            return Err(size_mismatch("x", dim, p.dim()));
        }
        *out(out_value, "out")? = p.energy(slice(x, dim, "x")?);
        Ok(())
    })
}

/// `log Z_ε` by periodic trapezoid quadrature on `n_points` nodes per axis.
///
/// # Safety
/// `p` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lais_quadrature_log_z(
    p: *const LaisPotential,
    eps: f64,
    n_points: usize,
    out_value: *mut f64,
) -> LaisStatus {
    guard(|| {
        let p = &deref(p, "potential")?.0;
        *out(out_value, "out")? = quadrature_log_z(p, eps, &Grid1D::new(n_points)?)?;
        Ok(())
    })
}

/// Ladder from `eps_1` down to `eps_target` with `K = ⌈1/(ε ν)⌉` transitions.
///
/// # Safety
/// `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lais_schedule_new(
    eps_target: f64,
    eps_1: f64,
    nu: f64,
    out_handle: *mut *mut LaisSchedule,
) -> LaisStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        *slot = Box::into_raw(Box::new(LaisSchedule(TemperingSchedule::new(eps_target, eps_1, nu)?)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`lais_schedule_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lais_schedule_free(s: *mut LaisSchedule) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of transitions `K`; 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lais_schedule_transitions(s: *const LaisSchedule) -> usize {
    s.as_ref().map_or(0, |s| s.0.k())
}

/// Copies the `K + 1` temperatures into `out_levels`.
///
/// # Safety
/// `out_levels` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn lais_schedule_levels(s: *const LaisSchedule, out_levels: *mut f64, len: usize) -> LaisStatus {
    guard(|| {
        let levels = deref(s, "schedule")?.0.levels();
        if len != levels.len() {
            return Err(size_mismatch("out_levels", len, levels.len()));
        }
        slice_mut(out_levels, len, "out_levels")?.copy_from_slice(levels);
        Ok(())
    })
}

/// Runs `n` Langevin AIS chains for time `t` per level with step
/// `step_factor` times the default step. `burn_in` nonzero starts each chain
/// with a level-1 simulation of length `t` from the first well.
///
/// # Safety
/// Handles must be live; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lais_ais_run(
    p: *const LaisPotential,
    s: *const LaisSchedule,
    t: f64,
    n: usize,
    step_factor: f64,
    burn_in: i32,
    seed: u64,
    out_handle: *mut *mut LaisMeasure,
) -> LaisStatus {
    sampler_run(p, s, t, n, step_factor, burn_in, seed, false, out_handle)
}

/// Autonormalized variant of [`lais_ais_run`]; the ensemble is renormalized after every level.
///
/// # Safety
/// As [`lais_ais_run`].
#[no_mangle]
pub unsafe extern "C" fn lais_anais_run(
    p: *const LaisPotential,
    s: *const LaisSchedule,
    t: f64,
    n: usize,
    step_factor: f64,
    burn_in: i32,
    seed: u64,
    out_handle: *mut *mut LaisMeasure,
) -> LaisStatus {
    sampler_run(p, s, t, n, step_factor, burn_in, seed, true, out_handle)
}

#[allow(clippy::too_many_arguments)]
unsafe fn sampler_run(
    p: *const LaisPotential,
    s: *const LaisSchedule,
    t: f64,
    n: usize,
    step_factor: f64,
    burn_in: i32,
    seed: u64,
    autonormalized: bool,
    out_handle: *mut *mut LaisMeasure,
) -> LaisStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let p = &deref(p, "potential")?.0;
        let s = &deref(s, "schedule")?.0;
        let kernel = langevin_kernel(p, s, step_factor * default_step_size(p, s.eps_first()))?;
        let point = p.wells().first().map_or_else(|| vec![0.0; p.dim()], |w| w.location.clone());
        let start = if burn_in != 0 {
            Start::BurnIn { point, time: t }
        } else {
            Start::Fixed(point)
        };
        let handle = if autonormalized {
            let run = anais_ensemble(&kernel, t, &vec![start; n], seed)?;
            LaisMeasure {
                measure: run.measure,
                total_steps: run.total_steps,
            }
        } else {
            let run = ais_ensemble(&kernel, t, n, &start, seed)?;
            LaisMeasure {
                measure: run.measure,
                total_steps: run.total_steps,
            }
        };
        *slot = Box::into_raw(Box::new(handle));
        Ok(())
    })
}

/// # Safety
/// `m` must come from a run function and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lais_measure_free(m: *mut LaisMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of atoms; 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lais_measure_len(m: *const LaisMeasure) -> usize {
    m.as_ref().map_or(0, |m| m.measure.len())
}

/// Dimension of each atom; 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lais_measure_dim(m: *const LaisMeasure) -> usize {
    m.as_ref().map_or(0, |m| m.measure.dim())
}

/// Integrator steps spent producing the measure, burn-in included.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lais_measure_total_steps(m: *const LaisMeasure) -> u64 {
    m.as_ref().map_or(0, |m| m.total_steps)
}

/// Copies the normalized weights (`len` must equal the atom count).
///
/// # Safety
/// `out_weights` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn lais_measure_weights(m: *const LaisMeasure, out_weights: *mut f64, len: usize) -> LaisStatus {
    guard(|| {
        let w = deref(m, "measure")?.measure.weights();
        if len != w.len() {
            return Err(size_mismatch("out_weights", len, w.len()));
        }
        slice_mut(out_weights, len, "out_weights")?.copy_from_slice(w);
        Ok(())
    })
}

/// Copies the atoms row-major (`len` must equal atoms times dimension).
///
/// # Safety
/// `out_points` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn lais_measure_points(m: *const LaisMeasure, out_points: *mut f64, len: usize) -> LaisStatus {
    guard(|| {
        let pts = deref(m, "measure")?.measure.points();
        if len != pts.len() {
            return Err(size_mismatch("out_points", len, pts.len()));
        }
        slice_mut(out_points, len, "out_points")?.copy_from_slice(pts);
        Ok(())
    })
}

/// Effective sample size `1/Σ w_i²`.
///
/// # Safety
/// `m` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lais_measure_ess(m: *const LaisMeasure, out_value: *mut f64) -> LaisStatus {
    guard(|| {
        let m = deref(m, "measure")?;
        *out(out_value, "out")? = ess(m.measure.weights())?;
        Ok(())
    })
}

/// Lowest `k` eigenpairs of the generator of a 1D landscape at temperature `eps`.
///
/// # Safety
/// `p` must be a live handle; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lais_spectrum_new(
    p: *const LaisPotential,
    eps: f64,
    n_points: usize,
    k: usize,
    out_handle: *mut *mut LaisSpectrum,
) -> LaisStatus {
    guard(|| {
        let slot = out(out_handle, "out")?;
        let p = &deref(p, "potential")?.0;
        let op = build_symmetrized_generator(p, eps, &Grid1D::new(n_points)?)?;
        *slot = Box::into_raw(Box::new(LaisSpectrum(eigen_decompose(&op, k)?)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`lais_spectrum_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lais_spectrum_free(s: *mut LaisSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of computed eigenpairs; 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lais_spectrum_len(s: *const LaisSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Copies the ascending eigenvalues (`len` must equal the pair count).
///
/// # Safety
/// `out_values` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn lais_spectrum_eigenvalues(s: *const LaisSpectrum, out_values: *mut f64, len: usize) -> LaisStatus {
    guard(|| {
        let ev = deref(s, "spectrum")?.0.eigenvalues();
        if len != ev.len() {
            return Err(size_mismatch("out_values", len, ev.len()));
        }
        slice_mut(out_values, len, "out_values")?.copy_from_slice(ev);
        Ok(())
    })
}

/// Uniform mixing time from the eigen-expansion.
///
/// # Safety
/// `s` must be a live handle; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lais_spectrum_mixing_time(s: *const LaisSpectrum, out_value: *mut f64) -> LaisStatus {
    guard(|| {
        let s = deref(s, "spectrum")?;
        *out(out_value, "out")? = uniform_mixing_time(&s.0)?;
        Ok(())
    })
}

/// Runs a sampler config (the CLI's `key = value` text) and returns the CSV.
/// `algorithm` in the text selects AIS or the autonormalized sampler.
/// The string must be released with [`lais_string_free`].
///
/// # Safety
/// `config` must be a NUL-terminated string; `out_csv` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lais_run_config(config: *const c_char, out_csv: *mut *mut c_char) -> LaisStatus {
    guard(|| {
        let slot = out(out_csv, "out_csv")?;
        let cfg = RunConfig::parse(text(config, "config")?)?;
        if cfg.algorithm == Algorithm::Gaussian {
            return Err(Failure::Lib(Error::Config {
                key: "algorithm".into(),
                reason: "only ais and anais configs run through this call".into(),
            }));
        }
        let (csv, _) = lais::runner::run_csv(&cfg)?;
        *slot = CString::new(csv).expect("CSV has no NUL bytes").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lais_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
