//! Experiment pipelines behind the CLI: calibration, sampler runs, sweeps,
//! spectral reports and the Gaussian variance experiment.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Algorithm, RunConfig, SweepParam};
use crate::diagnostics::{DiagnosticsReport, ReplicationMetrics, TestFunction};
use crate::dynamics::{default_step_size, replication_seed};
use crate::error::{Error, Result};
use crate::gaussian::variance_experiment;
use crate::oracle::{
    build_axis_generator, eigen_decompose, gibbs_fourier, product_mixing_time, quadrature_expect, Grid1D,
    LadderSpectra, SpectralDecomposition,
};
use crate::potential::Potential;
use crate::sampler::{ais_ensemble, anais_ensemble, langevin_kernel, LangevinKernel, Start};
use crate::schedule::{choose_ais_params, choose_anais_params, CalibrationConstants, TemperingSchedule};

/// Column names of sampler CSVs.
pub const SAMPLER_COLUMNS: [&str; 15] = [
    "replication",
    "eps_target",
    "K",
    "T",
    "N",
    "h",
    "seed",
    "f_name",
    "estimate",
    "truth",
    "error",
    "ess",
    "hs_error_sq",
    "total_steps",
    "wall_ms",
];

pub const SPECTRAL_COLUMNS: [&str; 6] = ["eps", "lambda1", "lambda2", "lambda3", "t_mix_inf", "log_cp_T"];

pub const GAUSSIAN_COLUMNS: [&str; 6] = ["d", "eps", "K", "mode", "second_moment", "stderr"];

/// Calibrated constants plus the oracle quantities they came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub constants: CalibrationConstants,
    /// `Λ = min_k λ_3(ε_k)` over the ladder.
    pub lambda_floor: f64,
    /// Simulation time used by the weight pilot.
    pub pilot_t: f64,
}

fn axis_spectra(p: &Potential, eps: f64, grid: &Grid1D, modes: usize) -> Result<Vec<SpectralDecomposition>> {
    (0..p.dim())
        .map(|axis| eigen_decompose(&build_axis_generator(p, axis, eps, grid)?, modes))
        .collect()
}

/// Lowest three eigenvalues of the separable generator, from the axis spectra.
fn lowest_three(specs: &[SpectralDecomposition]) -> [f64; 3] {
    let mut sums = vec![0.0];
    for s in specs {
        let mut next: Vec<f64> = sums
            .iter()
            .flat_map(|a| s.eigenvalues().iter().take(3).map(move |b| a + b))
            .collect();
        next.sort_by(f64::total_cmp);
        next.truncate(3);
        sums = next;
    }
    [sums[0], sums[1], sums[2]]
}

/// `t^∞_mix` at the top temperature and the floor `Λ` of `λ_3` over the ladder.
pub fn spectral_constants(p: &Potential, sched: &TemperingSchedule, grid: &Grid1D, modes: usize) -> Result<(f64, f64)> {
    let top = axis_spectra(p, sched.eps_first(), grid, modes)?;
    let t_mix = product_mixing_time(&top)?;
    let mut floor = lowest_three(&top)[2];
    for k in 2..=sched.k() {
        floor = floor.min(lowest_three(&axis_spectra(p, sched.eps(k), grid, 4)?)[2]);
    }
    if !(floor > 0.0) {
        return Err(Error::Oracle(format!("λ_3 floor is not positive: {floor:e}")));
    }
    Ok((t_mix, floor))
}

/// `C_T = 2‖U‖_∞/Λ`: the time over which `‖U‖_∞`-sized log-ratios decay at rate `Λ`.
fn time_constant(p: &Potential, lambda_floor: f64) -> f64 {
    2.0 * p.sup_energy().max(1.0) / lambda_floor
}

/// `sup_f Var(w̃ f(X)/E w̃)/‖f‖²_∞` over the battery, divided by four.
pub fn pilot_weight_constant(kernel: &LangevinKernel, t: f64, start: &Start, chains: usize, seed: u64) -> Result<f64> {
    let run = ais_ensemble(kernel, t, chains, start, seed)?;
    let n = chains as f64;
    let mut worst: f64 = 0.0;
    for f in TestFunction::battery(kernel.potential()) {
        let y: Vec<f64> = run
            .measure
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| n * w * f.eval(run.measure.point(i)))
            .collect();
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        worst = worst.max(var / (f.sup_norm() * f.sup_norm()));
    }
    // floor keeps N ≥ 1 meaningful when every chain carries the same weight
    Ok((worst / 4.0).max(1e-3))
}

/// Everything a sampler run needs once parameters are resolved.
#[derive(Debug, Clone)]
pub struct Plan {
    pub potential: Potential,
    pub schedule: TemperingSchedule,
    pub t: f64,
    pub n: usize,
    pub h: f64,
    pub calibration: Option<Calibration>,
}

fn build_schedule(cfg: &RunConfig) -> Result<TemperingSchedule> {
    match cfg.override_k {
        Some(k) => TemperingSchedule::with_levels(cfg.epsilon_target, cfg.epsilon_1, k),
        None => TemperingSchedule::new(cfg.epsilon_target, cfg.epsilon_1, cfg.nu),
    }
}

fn start_for(p: &Potential, t: f64, burn_in: bool) -> Start {
    let point = p
        .wells()
        .first()
        .map_or_else(|| vec![0.0; p.dim()], |w| w.location.clone());
    if burn_in {
        Start::BurnIn { point, time: t }
    } else {
        Start::Fixed(point)
    }
}

#[derive(Serialize)]
struct CacheKey<'a> {
    potential: String,
    epsilon_1: f64,
    levels: &'a [f64],
    delta: f64,
    grid_points: usize,
    modes: usize,
    h: f64,
    pilot_chains: usize,
    pilot_seed: u64,
    burn_in: bool,
    alpha: f64,
}

fn cache_path(cfg: &RunConfig, p: &Potential, sched: &TemperingSchedule, h: f64) -> Result<PathBuf> {
    let key = CacheKey {
        potential: p.describe(),
        epsilon_1: cfg.epsilon_1,
        levels: sched.levels(),
        delta: cfg.delta,
        grid_points: cfg.grid_points,
        modes: cfg.modes,
        h,
        pilot_chains: cfg.pilot_chains,
        pilot_seed: cfg.pilot_seed,
        burn_in: cfg.burn_in,
        alpha: cfg.alpha,
    };
    let digest = Sha256::digest(serde_json::to_vec(&key)?);
    Ok(cfg.cache_dir.join(format!("calibration-{}.json", hex::encode(&digest[..16]))))
}

/// Calibrates the rule constants, reading and writing the sidecar cache.
pub fn calibrate(cfg: &RunConfig, p: &Potential, sched: &TemperingSchedule, h: f64) -> Result<Calibration> {
    let path = cache_path(cfg, p, sched, h)?;
    if !cfg.no_cache {
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(cal) = serde_json::from_str::<Calibration>(&text) {
                return Ok(cal);
            }
        }
    }
    let grid = Grid1D::new(cfg.grid_points)?;
    let (t_mix, floor) = spectral_constants(p, sched, &grid, cfg.modes)?;
    let c_t = time_constant(p, floor);
    let mut constants = CalibrationConstants {
        c_t,
        c_w_bar: 1.0,
        t_mix_inf_eps1: t_mix,
        c_hat_t: c_t,
        c_n: 64.0,
        alpha: cfg.alpha,
    };
    let (pilot_t, _) = choose_ais_params(cfg.delta, sched, &constants)?;
    let kernel = langevin_kernel(p, sched, h)?;
    let start = start_for(p, pilot_t, cfg.burn_in);
    constants.c_w_bar = pilot_weight_constant(&kernel, pilot_t, &start, cfg.pilot_chains, cfg.pilot_seed)?;
    constants.c_n = 64.0 * constants.c_w_bar;
    constants.validate()?;
    let cal = Calibration {
        constants,
        lambda_floor: floor,
        pilot_t,
    };
    if !cfg.no_cache {
        // a failed cache write only costs a recomputation next time
        if fs::create_dir_all(&cfg.cache_dir).is_ok() {
            let _ = fs::write(&path, serde_json::to_string_pretty(&cal)?);
        }
    }
    Ok(cal)
}

/// Resolves `(K, T, N, h)` for a sampler run, calibrating only when an
/// override leaves a parameter open.
pub fn plan(cfg: &RunConfig) -> Result<Plan> {
    cfg.validate()?;
    let potential = Potential::from_name(&cfg.potential, cfg.asymmetry)?;
    let schedule = build_schedule(cfg)?;
    let h = cfg.step_size_factor * default_step_size(&potential, cfg.epsilon_1);
    let calibration = match (cfg.override_t, cfg.override_n) {
        (Some(_), Some(_)) => None,
        _ => Some(calibrate(cfg, &potential, &schedule, h)?),
    };
    let (t, n) = match &calibration {
        None => (0.0, 0),
        Some(cal) => match cfg.algorithm {
            Algorithm::Anais => choose_anais_params(cfg.delta, &schedule, &cal.constants, potential.barrier_ratio())?,
            _ => choose_ais_params(cfg.delta, &schedule, &cal.constants)?,
        },
    };
    Ok(Plan {
        t: cfg.override_t.unwrap_or(t),
        n: cfg.override_n.unwrap_or(n),
        potential,
        schedule,
        h,
        calibration,
    })
}

/// One CSV row of a sampler run.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerRow {
    pub replication: usize,
    pub eps_target: f64,
    pub k: usize,
    pub t: f64,
    pub n: usize,
    pub h: f64,
    pub seed: u64,
    pub f_name: String,
    pub metrics: ReplicationMetrics,
    pub truth: f64,
    pub total_steps: u64,
    pub wall_ms: u64,
}

impl SamplerRow {
    fn record(&self) -> Vec<String> {
        vec![
            self.replication.to_string(),
            self.eps_target.to_string(),
            self.k.to_string(),
            self.t.to_string(),
            self.n.to_string(),
            self.h.to_string(),
            self.seed.to_string(),
            self.f_name.clone(),
            self.metrics.estimate.to_string(),
            self.truth.to_string(),
            self.metrics.error.to_string(),
            self.metrics.ess.to_string(),
            self.metrics.hs_error_sq.to_string(),
            self.total_steps.to_string(),
            self.wall_ms.to_string(),
        ]
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub plan: Plan,
    pub rows: Vec<SamplerRow>,
    /// One report per test function; empty with a single replication.
    pub reports: Vec<DiagnosticsReport>,
    /// Largest `|Σ_i w_k^i - 1|` over levels and replications (autonormalized runs).
    pub level_sum_deviation: f64,
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    pool.install(f)
}

/// Builds the plan and executes every replication.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    with_pool(cfg.threads, || run_in_pool(cfg))
}

fn run_in_pool(cfg: &RunConfig) -> Result<RunOutput> {
    if cfg.algorithm == Algorithm::Gaussian {
        return Err(Error::config("algorithm", "gaussian experiments run through run-gaussian"));
    }
    let plan = plan(cfg)?;
    let p = &plan.potential;
    let grid = Grid1D::new(cfg.grid_points)?;
    let battery = TestFunction::battery(p);
    let truths = battery
        .iter()
        .map(|f| quadrature_expect(f, p, cfg.epsilon_target, &grid))
        .collect::<Result<Vec<_>>>()?;
    let fourier = gibbs_fourier(p, cfg.epsilon_target, &grid, cfg.fourier_n_max)?;
    let kernel = langevin_kernel(p, &plan.schedule, plan.h)?;
    let start = start_for(p, plan.t, cfg.burn_in);
    let k = plan.schedule.k();
    let total_steps = k as u64 * kernel.steps_per_level(plan.t) * plan.n as u64;

    let per_rep: Vec<(Vec<SamplerRow>, f64)> = (0..cfg.n_replications)
        .into_par_iter()
        .map(|r| -> Result<(Vec<SamplerRow>, f64)> {
            let seed = replication_seed(cfg.master_seed, r as u64);
            let clock = Instant::now();
            let (measure, deviation) = match cfg.algorithm {
                Algorithm::Anais => {
                    let starts = vec![start.clone(); plan.n];
                    let out = anais_ensemble(&kernel, plan.t, &starts, seed)?;
                    let dev = out.level_weight_sums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
                    (out.measure, dev)
                }
                _ => (ais_ensemble(&kernel, plan.t, plan.n, &start, seed)?.measure, 0.0),
            };
            let wall_ms = if cfg.timing { clock.elapsed().as_millis() as u64 } else { 0 };
            let rows = battery
                .iter()
                .zip(&truths)
                .map(|(f, &truth)| {
                    let metrics = ReplicationMetrics::compute(
                        &measure,
                        f,
                        truth,
                        |n| fourier.coefficient(n),
                        cfg.sobolev_s,
                        cfg.fourier_n_max,
                    )?;
                    Ok(SamplerRow {
                        replication: r,
                        eps_target: cfg.epsilon_target,
                        k,
                        t: plan.t,
                        n: plan.n,
                        h: plan.h,
                        seed,
                        f_name: f.name().to_string(),
                        metrics,
                        truth,
                        total_steps,
                        wall_ms,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((rows, deviation))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(per_rep.len() * battery.len());
    let mut level_sum_deviation: f64 = 0.0;
    for (r, dev) in per_rep {
        rows.extend(r);
        level_sum_deviation = level_sum_deviation.max(dev);
    }
    let reports = if cfg.n_replications >= 2 {
        battery
            .iter()
            .map(|f| {
                let m: Vec<ReplicationMetrics> = rows.iter().filter(|r| r.f_name == f.name()).map(|r| r.metrics).collect();
                DiagnosticsReport::from_metrics(f, &m)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(RunOutput {
        plan,
        rows,
        reports,
        level_sum_deviation,
    })
}

fn command_name(cfg: &RunConfig) -> &'static str {
    match cfg.algorithm {
        Algorithm::Ais => "run-ais",
        Algorithm::Anais => "run-anais",
        Algorithm::Gaussian => "run-gaussian",
    }
}

fn resolved_lines(out: &mut String, plan: &Plan) {
    let _ = writeln!(out, "# resolved.K = {}", plan.schedule.k());
    let _ = writeln!(out, "# resolved.T = {}", plan.t);
    let _ = writeln!(out, "# resolved.N = {}", plan.n);
    let _ = writeln!(out, "# resolved.h = {}", plan.h);
    if let Some(cal) = &plan.calibration {
        let c = &cal.constants;
        let _ = writeln!(out, "# resolved.C_T = {}", c.c_t);
        let _ = writeln!(out, "# resolved.C_w_bar = {}", c.c_w_bar);
        let _ = writeln!(out, "# resolved.t_mix_inf_eps1 = {}", c.t_mix_inf_eps1);
        let _ = writeln!(out, "# resolved.C_N = {}", c.c_n);
        let _ = writeln!(out, "# resolved.lambda_floor = {}", cal.lambda_floor);
    }
}

fn write_csv(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in records {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// A sampler run as CSV, echoed configuration first.
pub fn run_csv(cfg: &RunConfig) -> Result<(String, RunOutput)> {
    let out = run(cfg)?;
    let mut text = cfg.echo(command_name(cfg));
    resolved_lines(&mut text, &out.plan);
    text.push_str(&write_csv(&SAMPLER_COLUMNS, out.rows.iter().map(SamplerRow::record))?);
    Ok((text, out))
}

/// Applies one sweep value to a copy of the base configuration.
pub fn sweep_config(base: &RunConfig, param: SweepParam, value: f64) -> Result<RunConfig> {
    let mut cfg = base.clone();
    match param {
        SweepParam::EpsilonTarget => cfg.epsilon_target = value,
        SweepParam::Delta => cfg.delta = value,
        SweepParam::T => cfg.override_t = Some(value),
        SweepParam::N => {
            if !(value >= 1.0) || value.fract() != 0.0 {
                return Err(Error::config("sweep_values", format!("N must be a positive integer, got {value}")));
            }
            cfg.override_n = Some(value as usize);
        }
    }
    Ok(cfg)
}

/// One run per value under a common header; rows gain `sweep_param` and
/// `sweep_value` columns in front.
pub fn sweep(base: &RunConfig) -> Result<(String, Vec<RunOutput>)> {
    let param = base
        .sweep_param
        .ok_or_else(|| Error::config("sweep_param", "a sweep needs sweep_param"))?;
    base.validate()?;
    let mut text = base.echo("sweep");
    let mut header = vec!["sweep_param", "sweep_value"];
    header.extend(SAMPLER_COLUMNS);
    let mut records = Vec::new();
    let mut outputs = Vec::new();
    for &value in &base.sweep_values {
        let out = run(&sweep_config(base, param, value)?)?;
        for row in &out.rows {
            let mut rec = vec![param.as_str().to_string(), value.to_string()];
            rec.extend(row.record());
            records.push(rec);
        }
        outputs.push(out);
    }
    text.push_str(&write_csv(&header, records)?);
    Ok((text, outputs))
}

/// One row of `spectral-report`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRow {
    pub eps: f64,
    pub lambda: [f64; 3],
    pub t_mix_inf: f64,
    /// `log C_P(T)` for the ladder from `ε_1` to `eps`; absent when `eps ≥ ε_1`.
    pub log_cp_t: Option<f64>,
}

/// Lowest eigenvalues, mixing time and `log C_P(T)` for each `eps` in `eps_list`.
/// `T` is `override_T` when given, otherwise the plain-AIS time rule.
pub fn spectral_report(cfg: &RunConfig) -> Result<(String, Vec<SpectralRow>)> {
    cfg.validate()?;
    let p = Potential::from_name(&cfg.potential, cfg.asymmetry)?;
    if p.dim() != 1 {
        return Err(Error::Oracle(format!("spectral-report is one-dimensional, got {p}")));
    }
    let grid = Grid1D::new(cfg.grid_points)?;
    let rows = with_pool(cfg.threads, || {
        cfg.eps_list
            .par_iter()
            .map(|&eps| -> Result<SpectralRow> {
                let spec = axis_spectra(&p, eps, &grid, cfg.modes)?;
                let lambda = lowest_three(&spec);
                let t_mix_inf = product_mixing_time(&spec)?;
                let log_cp_t = if eps < cfg.epsilon_1 {
                    let sched = match cfg.override_k {
                        Some(k) => TemperingSchedule::with_levels(eps, cfg.epsilon_1, k)?,
                        None => TemperingSchedule::new(eps, cfg.epsilon_1, cfg.nu)?,
                    };
                    let t = match cfg.override_t {
                        Some(t) => t,
                        None => {
                            let (t_mix1, floor) = spectral_constants(&p, &sched, &grid, cfg.modes)?;
                            let c_t = time_constant(&p, floor);
                            let cal = CalibrationConstants {
                                c_t,
                                c_w_bar: 1.0,
                                t_mix_inf_eps1: t_mix1,
                                c_hat_t: c_t,
                                c_n: 64.0,
                                alpha: cfg.alpha,
                            };
                            choose_ais_params(cfg.delta, &sched, &cal)?.0
                        }
                    };
                    Some(LadderSpectra::new(&p, &sched, &grid, cfg.modes)?.log_cp(t)?)
                } else {
                    None
                };
                Ok(SpectralRow {
                    eps,
                    lambda,
                    t_mix_inf,
                    log_cp_t,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut text = cfg.echo("spectral-report");
    text.push_str(&write_csv(
        &SPECTRAL_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.eps.to_string(),
                r.lambda[0].to_string(),
                r.lambda[1].to_string(),
                r.lambda[2].to_string(),
                r.t_mix_inf.to_string(),
                r.log_cp_t.map_or(String::new(), |v| v.to_string()),
            ]
        }),
    )?);
    Ok((text, rows))
}

/// Relative weight second moments for every `eps` in `eps_list` and every
/// selected mode, at dimension `d`.
pub fn run_gaussian(cfg: &RunConfig) -> Result<(String, Vec<crate::gaussian::VarianceEstimate>)> {
    cfg.validate()?;
    let jobs: Vec<_> = cfg
        .eps_list
        .iter()
        .flat_map(|&eps| cfg.mode.choices().into_iter().map(move |c| (eps, c)))
        .collect();
    let rows = with_pool(cfg.threads, || {
        jobs.iter()
            .enumerate()
            .map(|(i, &(eps, choice))| {
                variance_experiment(cfg.d, eps, choice, cfg.n_samples, replication_seed(cfg.master_seed, i as u64))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut text = cfg.echo("run-gaussian");
    text.push_str(&write_csv(
        &GAUSSIAN_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.d.to_string(),
                r.eps.to_string(),
                r.k.to_string(),
                r.mode.as_str().to_string(),
                r.second_moment.to_string(),
                r.stderr.to_string(),
            ]
        }),
    )?);
    Ok((text, rows))
}

/// JSON summary of a calibration and the parameters it implies.
pub fn calibrate_json(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let mut forced = cfg.clone();
    forced.override_t = None;
    forced.override_n = None;
    let plan = with_pool(cfg.threads, || plan(&forced))?;
    let cal = plan.calibration.expect("calibration runs without overrides");
    let value = serde_json::json!({
        "potential": plan.potential.describe(),
        "epsilon_1": cfg.epsilon_1,
        "epsilon_target": cfg.epsilon_target,
        "K": plan.schedule.k(),
        "h": plan.h,
        "T": plan.t,
        "N": plan.n,
        "calibration": cal,
    });
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunConfig {
        RunConfig {
            epsilon_target: 0.3,
            override_t: Some(0.05),
            override_n: Some(50),
            n_replications: 3,
            grid_points: 512,
            fourier_n_max: 8,
            no_cache: true,
            ..RunConfig::default()
        }
    }

    #[test]
    fn overrides_skip_calibration() {
        let out = run(&quick()).unwrap();
        assert!(out.plan.calibration.is_none());
        assert_eq!(out.rows.len(), 9);
        assert_eq!(out.reports.len(), 3);
        let r = &out.rows[0];
        assert_eq!(r.total_steps, r.k as u64 * (0.05 / r.h).ceil() as u64 * 50);
    }

    #[test]
    fn lowest_three_of_a_product() {
        let grid = Grid1D::new(256).unwrap();
        let p = Potential::double_well_2d();
        let specs = axis_spectra(&p, 0.5, &grid, 6).unwrap();
        let mut all: Vec<f64> = specs[0]
            .eigenvalues()
            .iter()
            .flat_map(|a| specs[1].eigenvalues().iter().map(move |b| a + b))
            .collect();
        all.sort_by(f64::total_cmp);
        let got = lowest_three(&specs);
        for i in 0..3 {
            assert!((got[i] - all[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_is_deterministic_and_parseable() {
        let (a, _) = run_csv(&quick()).unwrap();
        let (b, _) = run_csv(&RunConfig { threads: 3, ..quick() }).unwrap();
        assert_eq!(a, b);
        let body: String = a.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), SAMPLER_COLUMNS.to_vec());
        assert_eq!(rdr.records().count(), 9);
    }

    #[test]
    fn empty_sweep_has_only_the_header() {
        let cfg = RunConfig {
            sweep_param: Some(SweepParam::T),
            ..quick()
        };
        let (text, outs) = sweep(&cfg).unwrap();
        assert!(outs.is_empty());
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body.len(), 1);
        assert!(body[0].starts_with("sweep_param,sweep_value,replication"));
    }
}
