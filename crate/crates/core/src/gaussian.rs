//! Exact-sampling AIS between centred Gaussians on ℝ^d.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::RngStream;
use crate::error::{Error, Result};
use crate::sampler::{ais_chain, MarkovKernel};
use crate::schedule::TemperingSchedule;

/// Variances `1 = ε_1 > … > ε_{K+1} = ε` with linearly spaced inverses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianLadder {
    dim: usize,
    schedule: TemperingSchedule,
}

impl GaussianLadder {
    pub fn new(dim: usize, eps: f64, k: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("d", "dimension must be positive"));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::invalid("eps", format!("must lie in (0, 1), got {eps}")));
        }
        let schedule = TemperingSchedule::with_levels(eps, 1.0, k)?;
        if schedule.levels().windows(2).any(|w| !(w[1] < 2.0 * w[0])) {
            return Err(Error::invalid("eps", "consecutive variances must satisfy ε_{k+1} < 2ε_k"));
        }
        Ok(Self { dim, schedule })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn schedule(&self) -> &TemperingSchedule {
        &self.schedule
    }
}

/// Kernel `P_k^∞`: an independent draw from `N(0, ε_k I_d)`.
#[derive(Debug, Clone)]
pub struct GaussianExactKernel {
    ladder: GaussianLadder,
}

pub fn gaussian_exact_kernel(ladder: &GaussianLadder) -> GaussianExactKernel {
    GaussianExactKernel { ladder: ladder.clone() }
}

impl MarkovKernel for GaussianExactKernel {
    fn dim(&self) -> usize {
        self.ladder.dim
    }

    fn level_count(&self) -> usize {
        self.ladder.schedule.k()
    }

    fn advance(&self, x: &mut [f64], k: usize, _t: f64, rng: &RngStream) -> u64 {
        let sd = self.ladder.schedule.eps(k).sqrt();
        let mut gen = rng.generator();
        gen.fill_standard_normal(x);
        x.iter_mut().for_each(|v| *v *= sd);
        0
    }

    fn log_density_ratio(&self, x: &[f64], k: usize) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        0.5 * r2 * self.ladder.schedule.inverse_gap(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelChoice {
    /// Plain importance sampling, `K = 1`.
    OneShot,
    /// `K = ⌈d/ε⌉`.
    Annealed,
}

impl LevelChoice {
    pub fn levels(self, d: usize, eps: f64) -> usize {
        match self {
            LevelChoice::OneShot => 1,
            LevelChoice::Annealed => ((d as f64 / eps) * (1.0 - 1e-12)).ceil().max(1.0) as usize,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LevelChoice::OneShot => "one_shot",
            LevelChoice::Annealed => "annealed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "one_shot" => Ok(LevelChoice::OneShot),
            "annealed" => Ok(LevelChoice::Annealed),
            other => Err(Error::config("mode", format!("expected one_shot or annealed, got {other:?}"))),
        }
    }
}

/// Relative second moment `E[w̃²]/(E w̃)²` with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub d: usize,
    pub eps: f64,
    pub k: usize,
    pub mode: LevelChoice,
    pub second_moment: f64,
    pub stderr: f64,
}

/// `N Σ w_i²` over `n_samples` exact-kernel AIS chains (with the delta-method
/// standard error of the ratio of means).
pub fn variance_experiment(d: usize, eps: f64, mode: LevelChoice, n_samples: usize, seed: u64) -> Result<VarianceEstimate> {
    if n_samples < 2 {
        return Err(Error::invalid("n_samples", "need at least two samples"));
    }
    let k = mode.levels(d, eps);
    let ladder = GaussianLadder::new(d, eps, k)?;
    let kernel = gaussian_exact_kernel(&ladder);
    let x0 = vec![0.0; d];
    let log_w: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| ais_chain(&kernel, f64::INFINITY, &x0, &RngStream::new(seed, i, 0)).0.log_weight)
        .collect();
    let (second_moment, stderr) = relative_second_moment(&log_w)?;
    Ok(VarianceEstimate {
        d,
        eps,
        k,
        mode,
        second_moment,
        stderr,
    })
}

/// `m2/m1²` of `a_i = exp(l_i - max l)`, and its delta-method standard error.
pub fn relative_second_moment(log_w: &[f64]) -> Result<(f64, f64)> {
    let n = log_w.len() as f64;
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::DegenerateWeights);
    }
    let a: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let m1 = a.iter().sum::<f64>() / n;
    let m2 = a.iter().map(|v| v * v).sum::<f64>() / n;
    let ratio = m2 / (m1 * m1);
    // gradient of m2/m1² with respect to (m1, m2)
    let (g1, g2) = (-2.0 * m2 / (m1 * m1 * m1), 1.0 / (m1 * m1));
    let var = a
        .iter()
        .map(|v| {
            let e = g1 * (v - m1) + g2 * (v * v - m2);
            e * e
        })
        .sum::<f64>()
        / (n - 1.0);
    Ok((ratio, (var / n).sqrt()))
}
