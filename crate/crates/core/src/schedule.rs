//! Tempering ladders with linearly spaced inverse temperatures, and the
//! level/time/particle rules for both samplers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Temperatures `ε_1 > ε_2 > … > ε_{K+1}`, stored with both endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperingSchedule {
    levels: Vec<f64>,
    nu: f64,
}

impl TemperingSchedule {
    /// `K = ⌈1/(ε ν)⌉` levels from `eps1` down to `eps_target`.
    pub fn new(eps_target: f64, eps1: f64, nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::invalid("nu", format!("must be positive, got {nu}")));
        }
        check_endpoints(eps_target, eps1)?;
        // the relative nudge keeps exact quotients such as 1/(0.4·2.5) from rounding up
        let k = ((1.0 / (eps_target * nu)) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let mut s = Self::with_levels(eps_target, eps1, k)?;
        s.nu = nu;
        Ok(s)
    }

    /// Ladder with an explicit number of transitions `k`. `nu` is reported as
    /// `1/(ε k)`, the density that would have produced this `k`.
    pub fn with_levels(eps_target: f64, eps1: f64, k: usize) -> Result<Self> {
        check_endpoints(eps_target, eps1)?;
        if k == 0 {
            return Err(Error::invalid("K", "need at least one transition"));
        }
        let (b1, b) = (1.0 / eps1, 1.0 / eps_target);
        let step = (b - b1) / k as f64;
        let mut levels: Vec<f64> = (0..=k).map(|i| 1.0 / (b1 + i as f64 * step)).collect();
        levels[0] = eps1;
        levels[k] = eps_target;
        Ok(Self {
            levels,
            nu: 1.0 / (eps_target * k as f64),
        })
    }

    /// `k + 1` copies of `eps`; every density ratio is identically one.
    pub fn constant(eps: f64, k: usize) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
        }
        if k == 0 {
            return Err(Error::invalid("K", "need at least one transition"));
        }
        Ok(Self {
            levels: vec![eps; k + 1],
            nu: f64::INFINITY,
        })
    }

    /// Number of transitions `K`.
    pub fn k(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// All `K + 1` temperatures.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// `ε_k`, 1-based.
    pub fn eps(&self, k: usize) -> f64 {
        self.levels[k - 1]
    }

    pub fn eps_first(&self) -> f64 {
        self.levels[0]
    }

    pub fn eps_target(&self) -> f64 {
        *self.levels.last().unwrap()
    }

    /// `1/ε_k - 1/ε_{k+1}` for transition `k` (1-based); non-positive.
    pub fn inverse_gap(&self, k: usize) -> f64 {
        1.0 / self.levels[k - 1] - 1.0 / self.levels[k]
    }
}

/// `ε_k` from the closed form `εK/((k-1)(1-ε) + εK)`, valid when `ε_1 = 1`.
pub fn closed_form_level(eps_target: f64, k_total: usize, k: usize) -> f64 {
    let kf = k_total as f64;
    eps_target * kf / ((k as f64 - 1.0) * (1.0 - eps_target) + eps_target * kf)
}

fn check_endpoints(eps_target: f64, eps1: f64) -> Result<()> {
    if !(eps_target > 0.0) || !eps_target.is_finite() {
        return Err(Error::invalid("epsilon_target", format!("must be positive, got {eps_target}")));
    }
    if !(eps_target < eps1) || !eps1.is_finite() {
        return Err(Error::invalid(
            "epsilon_target",
            format!("must be below epsilon_1 = {eps1}, got {eps_target}"),
        ));
    }
    Ok(())
}

/// `make_schedule` under its usual name.
pub fn make_schedule(eps_target: f64, eps1: f64, nu: f64) -> Result<TemperingSchedule> {
    TemperingSchedule::new(eps_target, eps1, nu)
}

/// Calibrated values of the constants the convergence theorems only assert exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConstants {
    pub c_t: f64,
    pub c_w_bar: f64,
    pub t_mix_inf_eps1: f64,
    pub c_hat_t: f64,
    pub c_n: f64,
    pub alpha: f64,
}

impl CalibrationConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("C_T", self.c_t),
            ("C_w_bar", self.c_w_bar),
            ("t_mix_inf_eps1", self.t_mix_inf_eps1),
            ("C_hat_T", self.c_hat_t),
            ("C_N", self.c_n),
            ("alpha", self.alpha),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("calibration constant must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Simulation time and chain count for plain AIS:
/// `T = max(C_T(1/ε + ln K), (4 + |log₂ δ|) t_mix)`, `N = ⌈64 C̄_w / δ²⌉`.
pub fn choose_ais_params(delta: f64, sched: &TemperingSchedule, cal: &CalibrationConstants) -> Result<(f64, usize)> {
    check_delta(delta)?;
    let k = sched.k() as f64;
    let energy_term = cal.c_t * (1.0 / sched.eps_target() + k.ln());
    let mixing_term = (4.0 + delta.log2().abs()) * cal.t_mix_inf_eps1;
    let n = (64.0 * cal.c_w_bar / (delta * delta)).ceil().max(1.0) as usize;
    Ok((energy_term.max(mixing_term), n))
}

/// Simulation time and particle count for the autonormalized sampler:
/// `N = ⌈C_N/δ²⌉ K²`, `T = Ĉ_T(K^{(1+α)γ̂_r} + 1/ε + ln(1/δ) + ln N)`.
pub fn choose_anais_params(
    delta: f64,
    sched: &TemperingSchedule,
    cal: &CalibrationConstants,
    barrier_ratio: f64,
) -> Result<(f64, usize)> {
    check_delta(delta)?;
    let k = sched.k();
    let n = (cal.c_n / (delta * delta)).ceil().max(1.0) as usize * k * k;
    let exponent = (1.0 + cal.alpha) * barrier_ratio;
    let t = cal.c_hat_t * ((k as f64).powf(exponent) + 1.0 / sched.eps_target() + (1.0 / delta).ln() + (n as f64).ln());
    Ok((t, n))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid("delta", format!("must be positive, got {delta}")));
    }
    Ok(())
}
