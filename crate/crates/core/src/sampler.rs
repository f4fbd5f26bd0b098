//! Annealed importance sampling over an abstract reversible kernel, the
//! Langevin instantiation, and the autonormalized ensemble variant.

use rayon::prelude::*;

use crate::diagnostics::{log_sum_exp, normalize_log_weights, EmpiricalMeasure};
use crate::dynamics::{simulate_with, LangevinConfig, RngStream, STABILITY_LIMIT};
use crate::error::{Error, Result};
use crate::potential::{canonicalize, Potential};
use crate::schedule::TemperingSchedule;

/// A ladder of Markov kernels `P_1, …, P_K` with their density ratios.
///
/// States are opaque coordinate vectors, so the same sampler drives torus
/// and Euclidean problems.
pub trait MarkovKernel: Sync {
    fn dim(&self) -> usize;

    /// Number of transitions `K`.
    fn level_count(&self) -> usize;

    /// Replaces `x` by one draw from `P_k^T(x, ·)` (`k` is 1-based) and
    /// returns the number of integrator steps spent.
    fn advance(&self, x: &mut [f64], k: usize, t: f64, rng: &RngStream) -> u64;

    /// `log r̃_k(x) = log π̃_{k+1}(x) - log π̃_k(x)`.
    fn log_density_ratio(&self, x: &[f64], k: usize) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    pub position: Vec<f64>,
    pub log_weight: f64,
}

/// How chains are initialised before the first transition.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// Every chain starts at this point.
    Fixed(Vec<f64>),
    /// Start at the point, then run `P_1` for `time` on stream level 0.
    BurnIn { point: Vec<f64>, time: f64 },
}

impl Start {
    pub fn point(&self) -> &[f64] {
        match self {
            Start::Fixed(p) | Start::BurnIn { point: p, .. } => p,
        }
    }

    fn initialise<M: MarkovKernel + ?Sized>(&self, kernel: &M, rng: &RngStream) -> (Vec<f64>, u64) {
        let mut x = self.point().to_vec();
        let steps = match self {
            Start::Fixed(_) => 0,
            Start::BurnIn { time, .. } => kernel.advance(&mut x, 1, *time, &rng.at_level(0)),
        };
        (x, steps)
    }
}

/// One AIS chain from `x0`. Transition `k` draws from stream level `k`; the
/// weight update uses the post-move point.
pub fn ais_chain<M: MarkovKernel + ?Sized>(kernel: &M, t: f64, x0: &[f64], rng: &RngStream) -> (WeightedSample, u64) {
    let mut x = x0.to_vec();
    let mut log_weight = 0.0;
    let mut steps = 0;
    for k in 1..=kernel.level_count() {
        steps += kernel.advance(&mut x, k, t, &rng.at_level(k as u64));
        log_weight += kernel.log_density_ratio(&x, k);
    }
    (WeightedSample { position: x, log_weight }, steps)
}

/// Output of [`ais_ensemble`].
#[derive(Debug, Clone)]
pub struct AisRun {
    pub measure: EmpiricalMeasure,
    /// Unnormalized `log w̃_i` in chain order.
    pub log_weights: Vec<f64>,
    /// Integrator steps including burn-in.
    pub total_steps: u64,
}

fn check_run(t: f64, n: usize) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid("T", format!("must be nonnegative and finite, got {t}")));
    }
    if n == 0 {
        return Err(Error::invalid("N", "need at least one chain"));
    }
    Ok(())
}

/// `N` independent chains on streams `(seed, i, ·)`, self-normalized.
///
/// Chains run on the current rayon pool; results are gathered and reduced in
/// chain order, so the output does not depend on the thread count.
pub fn ais_ensemble<M: MarkovKernel + ?Sized>(kernel: &M, t: f64, n: usize, start: &Start, seed: u64) -> Result<AisRun> {
    check_run(t, n)?;
    let d = kernel.dim();
    let chains: Vec<(WeightedSample, u64)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let rng = RngStream::new(seed, i, 0);
            let (x0, burn) = start.initialise(kernel, &rng);
            let (s, steps) = ais_chain(kernel, t, &x0, &rng);
            (s, burn + steps)
        })
        .collect();
    let mut points = Vec::with_capacity(n * d);
    let mut log_weights = Vec::with_capacity(n);
    let mut total_steps = 0;
    for (s, steps) in chains {
        if !s.log_weight.is_finite() {
            return Err(Error::DegenerateWeights);
        }
        points.extend_from_slice(&s.position);
        log_weights.push(s.log_weight);
        total_steps += steps;
    }
    let measure = EmpiricalMeasure::from_log_weights(d, points, &log_weights)?;
    Ok(AisRun {
        measure,
        log_weights,
        total_steps,
    })
}

/// Output of [`anais_ensemble`].
#[derive(Debug, Clone)]
pub struct AnaisRun {
    pub measure: EmpiricalMeasure,
    /// `Σ_i w_k^i` after the renormalization of each level.
    pub level_weight_sums: Vec<f64>,
    /// `log W̃_k`, the pre-normalization mass of each level.
    pub level_log_masses: Vec<f64>,
    pub total_steps: u64,
}

/// Autonormalized AIS: all chains advance through level `k`, get multiplied
/// by `r̃_k`, and the ensemble is renormalized before level `k + 1`.
pub fn anais_ensemble<M: MarkovKernel + ?Sized>(kernel: &M, t: f64, starts: &[Start], seed: u64) -> Result<AnaisRun> {
    let n = starts.len();
    check_run(t, n)?;
    let d = kernel.dim();
    let init: Vec<(Vec<f64>, u64)> = starts
        .par_iter()
        .enumerate()
        .map(|(i, s)| s.initialise(kernel, &RngStream::new(seed, i as u64, 0)))
        .collect();
    let mut total_steps: u64 = init.iter().map(|(_, s)| s).sum();
    let mut states: Vec<Vec<f64>> = init.into_iter().map(|(x, _)| x).collect();
    let mut log_w = vec![-(n as f64).ln(); n];
    let mut level_weight_sums = Vec::with_capacity(kernel.level_count());
    let mut level_log_masses = Vec::with_capacity(kernel.level_count());
    for k in 1..=kernel.level_count() {
        let moved: Vec<(f64, u64)> = states
            .par_iter_mut()
            .enumerate()
            .map(|(i, x)| {
                let steps = kernel.advance(x, k, t, &RngStream::new(seed, i as u64, k as u64));
                (kernel.log_density_ratio(x, k), steps)
            })
            .collect();
        for (lw, (r, steps)) in log_w.iter_mut().zip(&moved) {
            *lw += r;
            total_steps += steps;
        }
        if log_w.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
            return Err(Error::DegenerateWeights);
        }
        let mass = log_sum_exp(&log_w);
        if mass == f64::NEG_INFINITY {
            return Err(Error::DegenerateWeights);
        }
        log_w.iter_mut().for_each(|l| *l -= mass);
        level_log_masses.push(mass);
        level_weight_sums.push(log_w.iter().map(|l| l.exp()).sum());
    }
    let points: Vec<f64> = states.into_iter().flatten().collect();
    debug_assert_eq!(points.len(), n * d);
    let weights = normalize_log_weights(&log_w)?;
    Ok(AnaisRun {
        measure: EmpiricalMeasure::new(d, points, weights)?,
        level_weight_sums,
        level_log_masses,
        total_steps,
    })
}

/// Euler–Maruyama Langevin dynamics at each ladder temperature.
#[derive(Debug, Clone)]
pub struct LangevinKernel {
    potential: Potential,
    schedule: TemperingSchedule,
    step_size: f64,
}

/// Kernel simulating `dX = -∇U dt + √(2ε_k) dB` with step `step_size` at level `k`.
pub fn langevin_kernel(p: &Potential, sched: &TemperingSchedule, step_size: f64) -> Result<LangevinKernel> {
    if !(step_size > 0.0) || step_size * p.grad_lipschitz() > STABILITY_LIMIT {
        return Err(Error::invalid(
            "step_size",
            format!("h = {step_size} must be positive with h·Lip(∇U) ≤ {STABILITY_LIMIT}"),
        ));
    }
    Ok(LangevinKernel {
        potential: p.clone(),
        schedule: sched.clone(),
        step_size,
    })
}

impl LangevinKernel {
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn schedule(&self) -> &TemperingSchedule {
        &self.schedule
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    /// Integrator steps one level of duration `t` costs.
    pub fn steps_per_level(&self, t: f64) -> u64 {
        if t == 0.0 {
            return 0;
        }
        LangevinConfig {
            eps: self.schedule.eps_first(),
            total_time: t,
            step_size: self.step_size.min(t),
        }
        .step_count()
    }
}

impl MarkovKernel for LangevinKernel {
    fn dim(&self) -> usize {
        self.potential.dim()
    }

    fn level_count(&self) -> usize {
        self.schedule.k()
    }

    fn advance(&self, x: &mut [f64], k: usize, t: f64, rng: &RngStream) -> u64 {
        canonicalize(x);
        if t == 0.0 {
            return 0;
        }
        let cfg = LangevinConfig {
            eps: self.schedule.eps(k),
            total_time: t,
            step_size: self.step_size.min(t),
        };
        simulate_with(x, &self.potential, &cfg, &mut rng.generator())
    }

    fn log_density_ratio(&self, x: &[f64], k: usize) -> f64 {
        self.potential.energy(x) * self.schedule.inverse_gap(k)
    }
}
