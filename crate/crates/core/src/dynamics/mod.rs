//! Euler–Maruyama simulation of `dX = -∇U(X) dt + √(2ε) dB` on the torus.

mod stream;

pub use stream::{replication_seed, splitmix64, RngStream, StreamRng};

use crate::error::{Error, Result};
use crate::potential::{canonical, Potential};

/// Largest admissible `h · Lip(∇U)`.
pub const STABILITY_LIMIT: f64 = 0.5;

/// Per-level simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinConfig {
    pub eps: f64,
    pub total_time: f64,
    pub step_size: f64,
}

impl LangevinConfig {
    /// Validated configuration. A step longer than `total_time` is shortened to
    /// `total_time`, so a short level is simulated by a single exact-length step.
    pub fn new(p: &Potential, eps: f64, total_time: f64, step_size: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
        }
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::invalid("total_time", format!("must be positive, got {total_time}")));
        }
        if !(step_size > 0.0) {
            return Err(Error::invalid("step_size", format!("must be positive, got {step_size}")));
        }
        if step_size * p.grad_lipschitz() > STABILITY_LIMIT {
            return Err(Error::invalid(
                "step_size",
                format!(
                    "h = {step_size} violates h·Lip(∇U) ≤ {STABILITY_LIMIT} (Lip = {})",
                    p.grad_lipschitz()
                ),
            ));
        }
        Ok(Self {
            eps,
            total_time,
            step_size: step_size.min(total_time),
        })
    }

    /// Number of integrator steps, counting the final partial step.
    pub fn step_count(&self) -> u64 {
        let (full, rest) = split_time(self.total_time, self.step_size);
        full + u64::from(rest > 0.0)
    }
}

/// Default step `min(0.01, 0.25·ε_ref / (1 + Lip(∇U)))`.
///
/// The runner passes `ε_ref = ε_1` so the same step serves every level.
pub fn default_step_size(p: &Potential, eps_ref: f64) -> f64 {
    (0.25 * eps_ref / (1.0 + p.grad_lipschitz())).min(0.01)
}

/// Full steps and leftover time; leftovers below `1e-12·h` are rounding noise.
fn split_time(total: f64, h: f64) -> (u64, f64) {
    let full = (total / h).floor();
    let mut rest = total - full * h;
    if rest <= 1e-12 * h {
        rest = 0.0;
    }
    (full as u64, rest)
}

/// One Euler–Maruyama step: `(x - h∇U(x) + √(2εh) z) mod 1`.
pub fn em_step(x: &[f64], p: &Potential, eps: f64, h: f64, z: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    let mut grad = vec![0.0; x.len()];
    em_step_in_place(&mut out, p, eps, h, z, &mut grad);
    out
}

/// In-place variant of [`em_step`]; `grad` is scratch space of length `d`.
#[inline]
pub fn em_step_in_place(x: &mut [f64], p: &Potential, eps: f64, h: f64, z: &[f64], grad: &mut [f64]) {
    p.gradient(x, grad);
    let noise = (2.0 * eps.max(0.0) * h).sqrt();
    for j in 0..x.len() {
        x[j] = canonical(x[j] - h * grad[j] + noise * z[j]);
    }
}

/// Endpoint of `⌈T/h⌉` Euler–Maruyama steps from `x0`, the last one covering
/// the leftover time `T - ⌊T/h⌋h`. Draws come from `rng` in order.
pub fn simulate(x0: &[f64], p: &Potential, cfg: &LangevinConfig, rng: &RngStream) -> Vec<f64> {
    let mut x: Vec<f64> = x0.iter().map(|&t| canonical(t)).collect();
    let mut gen = rng.generator();
    simulate_with(&mut x, p, cfg, &mut gen);
    x
}

/// Advances `x` in place using draws from an already-positioned generator.
/// Returns the number of steps taken.
pub fn simulate_with(x: &mut [f64], p: &Potential, cfg: &LangevinConfig, gen: &mut StreamRng) -> u64 {
    let d = x.len();
    let mut z = vec![0.0; d];
    let mut grad = vec![0.0; d];
    let (full, rest) = split_time(cfg.total_time, cfg.step_size);
    for _ in 0..full {
        gen.fill_standard_normal(&mut z);
        em_step_in_place(x, p, cfg.eps, cfg.step_size, &z, &mut grad);
    }
    if rest > 0.0 {
        gen.fill_standard_normal(&mut z);
        em_step_in_place(x, p, cfg.eps, rest, &z, &mut grad);
        full + 1
    } else {
        full
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn well() -> Potential {
        Potential::double_well_1d(0.0).unwrap()
    }

    #[test]
    fn well_is_fixed_point() {
        let p = well();
        assert_eq!(em_step(&[0.0], &p, 0.3, 0.01, &[0.0]), vec![0.0]);
        assert_eq!(em_step(&[0.5], &p, 0.3, 0.01, &[0.0]), vec![0.5]);
    }

    #[test]
    fn drift_points_to_the_well() {
        let p = well();
        let x = em_step(&[0.1], &p, 0.0, 0.01, &[0.0]);
        let expected = 0.1 - 0.01 * 2.0 * PI * (0.4 * PI).sin();
        assert!((x[0] - expected).abs() < 1e-15);
        assert!(x[0] < 0.1);
    }

    #[test]
    fn wraps_around() {
        let p = Potential::flat(1);
        // √(2·ε·h)·z = 0.1 with ε = 0.5, h = 0.01
        let x = em_step(&[0.95], &p, 0.5, 0.01, &[1.0]);
        assert!((x[0] - 0.05).abs() < 1e-12, "{}", x[0]);
    }

    #[test]
    fn single_step_when_time_equals_step() {
        let p = well();
        let cfg = LangevinConfig::new(&p, 0.4, 0.005, 0.005).unwrap();
        assert_eq!(cfg.step_count(), 1);
        let rng = RngStream::new(7, 0, 0);
        let mut g = rng.generator();
        let z = g.standard_normal();
        let manual = em_step(&[0.1], &p, 0.4, 0.005, &[z]);
        assert_eq!(simulate(&[0.1], &p, &cfg, &rng), manual);
    }

    #[test]
    fn partial_final_step() {
        let p = well();
        let cfg = LangevinConfig::new(&p, 0.4, 0.0125, 0.005).unwrap();
        assert_eq!(cfg.step_count(), 3);
        let rng = RngStream::new(3, 1, 2);
        let mut g = rng.generator();
        let mut x = vec![0.3];
        for h in [0.005, 0.005] {
            x = em_step(&x, &p, 0.4, h, &[g.standard_normal()]);
        }
        let rest = 0.0125 - 2.0 * 0.005;
        x = em_step(&x, &p, 0.4, rest, &[g.standard_normal()]);
        assert_eq!(simulate(&[0.3], &p, &cfg, &rng), x);
        // an exact multiple must not produce a spurious extra step
        let cfg = LangevinConfig::new(&p, 0.4, 0.3, 0.1 / 100.0).unwrap();
        assert_eq!(cfg.step_count(), 300);
    }

    #[test]
    fn deterministic_and_in_domain() {
        let p = Potential::double_well_2d();
        let cfg = LangevinConfig::new(&p, 0.7, 0.37, 0.003).unwrap();
        let rng = RngStream::new(11, 5, 1);
        let a = simulate(&[0.9, 0.2], &p, &cfg, &rng);
        let b = simulate(&[0.9, 0.2], &p, &cfg, &rng);
        assert_eq!(a, b);
        assert!(a.iter().all(|&t| (0.0..1.0).contains(&t)));
    }

    #[test]
    fn config_validation() {
        let p = well();
        assert!(LangevinConfig::new(&p, 0.0, 1.0, 0.001).is_err());
        assert!(LangevinConfig::new(&p, 0.1, 0.0, 0.001).is_err());
        assert!(LangevinConfig::new(&p, 0.1, 1.0, 0.01).is_err());
        let short = LangevinConfig::new(&p, 0.1, 0.001, 0.005).unwrap();
        assert_eq!(short.step_size, 0.001);
    }

    #[test]
    fn default_step_is_stable() {
        let p = well();
        let h = default_step_size(&p, 1.0);
        assert!(h * p.grad_lipschitz() <= STABILITY_LIMIT);
        assert!((h - 0.25 / (1.0 + 8.0 * PI * PI)).abs() < 1e-15);
        assert_eq!(default_step_size(&Potential::flat(1), 1.0), 0.01);
    }
}
