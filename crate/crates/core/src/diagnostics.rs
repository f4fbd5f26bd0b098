//! Weighted point clouds and the error metrics computed on them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Basin, Potential};

/// Tolerance on `|Σ w_i - 1|` for a normalized measure.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// `log Σ exp(x_i)`, accumulated in index order.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || !max.is_finite() {
        return max;
    }
    let mut acc = 0.0;
    for &v in values {
        acc += (v - max).exp();
    }
    max + acc.ln()
}

/// Normalized weights `w_i = exp(l_i - LSE(l))`.
pub fn normalize_log_weights(log_weights: &[f64]) -> Result<Vec<f64>> {
    if log_weights.is_empty() {
        return Err(Error::invalid("weights", "empty weight vector"));
    }
    if log_weights.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(Error::invalid("weights", "log-weights must not be NaN or +inf"));
    }
    let lse = log_sum_exp(log_weights);
    if lse == f64::NEG_INFINITY {
        return Err(Error::DegenerateWeights);
    }
    Ok(log_weights.iter().map(|l| (l - lse).exp()).collect())
}

/// `μ_N = Σ w_i δ_{X_i}` with points stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.len() != dim * weights.len() {
            return Err(Error::invalid(
                "points",
                format!("expected {} coordinates for {} weights in dimension {dim}", dim * weights.len(), weights.len()),
            ));
        }
        if weights.is_empty() {
            return Err(Error::invalid("weights", "empty measure"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights", "weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() >= NORMALIZATION_TOL {
            return Err(Error::invalid("weights", format!("weights sum to {total}, not 1")));
        }
        Ok(Self { dim, points, weights })
    }

    /// Builds the measure by log-sum-exp normalization of `log_weights`.
    pub fn from_log_weights(dim: usize, points: Vec<f64>, log_weights: &[f64]) -> Result<Self> {
        let weights = normalize_log_weights(log_weights)?;
        Self::new(dim, points, weights)
    }

    /// Equal weights `1/N`.
    pub fn uniform(dim: usize, points: Vec<f64>) -> Result<Self> {
        let n = points.len() / dim.max(1);
        let w = 1.0 / n as f64;
        let mut weights = vec![w; n];
        // push the rounding residue onto the last weight so the sum is 1 to the ulp
        let total: f64 = weights.iter().sum();
        if let Some(last) = weights.last_mut() {
            *last += 1.0 - total;
        }
        Self::new(dim, points, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `⟨μ, e_n⟩ = Σ_i w_i exp(2πi n·X_i)`.
    pub fn fourier_coefficient(&self, n: &[i64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &w) in self.weights.iter().enumerate() {
            let phase: f64 = self.point(i).iter().zip(n).map(|(x, &m)| m as f64 * x).sum();
            acc += w * Complex64::from_polar(1.0, 2.0 * PI * phase);
        }
        acc
    }
}

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Basin { potential: Box<Potential>, basin: usize },
    Cos { axis: usize, freq: f64 },
    Constant(f64),
    Custom(EvalFn),
}

/// A bounded observable with its sup and oscillation norms.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    kind: Kind,
    sup_norm: f64,
    osc_norm: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("sup_norm", &self.sup_norm)
            .field("osc_norm", &self.osc_norm)
            .finish()
    }
}

impl TestFunction {
    /// `1_{Ω_basin}`; separatrix points count one half.
    pub fn basin_indicator(p: &Potential, basin: usize) -> Self {
        Self {
            name: format!("indicator_basin{basin}"),
            kind: Kind::Basin {
                potential: Box::new(p.clone()),
                basin,
            },
            sup_norm: 1.0,
            osc_norm: 1.0,
        }
    }

    /// `cos(2π·freq·x_axis)`.
    pub fn cosine(axis: usize, freq: f64) -> Self {
        let name = if axis == 0 {
            format!("cos{}pi", fmt_freq(2.0 * freq))
        } else {
            format!("cos{}pi_x{axis}", fmt_freq(2.0 * freq))
        };
        Self {
            name,
            kind: Kind::Cos { axis, freq },
            sup_norm: 1.0,
            osc_norm: 2.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            name: format!("constant_{c}"),
            kind: Kind::Constant(c),
            sup_norm: c.abs(),
            osc_norm: 0.0,
        }
    }

    /// Arbitrary observable with known `sup f` and `inf f`.
    pub fn custom(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, sup: f64, inf: f64) -> Self {
        Self {
            name: name.into(),
            kind: Kind::Custom(Arc::new(f)),
            sup_norm: sup.abs().max(inf.abs()),
            osc_norm: sup - inf,
        }
    }

    /// The default battery: `1_{Ω_1}`, `cos 4πx`, `cos 2πx`.
    pub fn battery(p: &Potential) -> Vec<TestFunction> {
        vec![Self::basin_indicator(p, 1), Self::cosine(0, 2.0), Self::cosine(0, 1.0)]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn osc_norm(&self) -> f64 {
        self.osc_norm
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Basin { potential, basin } => match potential.classify_basin(x) {
                Basin::Well(b) if b == *basin => 1.0,
                Basin::Well(_) => 0.0,
                Basin::Boundary => 0.5,
            },
            Kind::Cos { axis, freq } => (2.0 * PI * freq * x[*axis]).cos(),
            Kind::Constant(c) => *c,
            Kind::Custom(f) => f(x),
        }
    }
}

fn fmt_freq(f: f64) -> String {
    if f.fract() == 0.0 {
        format!("{}", f as i64)
    } else {
        format!("{f}")
    }
}

/// Effective sample size `1/Σ w_i²` of normalized weights.
pub fn ess(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::invalid("weights", "ESS of an empty weight vector"));
    }
    let s: f64 = weights.iter().map(|w| w * w).sum();
    Ok(1.0 / s)
}

/// `⟨f, μ⟩ = Σ_i w_i f(X_i)`, in index order.
pub fn integrate(f: &TestFunction, mu: &EmpiricalMeasure) -> f64 {
    let mut acc = 0.0;
    for (i, &w) in mu.weights().iter().enumerate() {
        acc += w * f.eval(mu.point(i));
    }
    acc
}

/// Truncated `Ḣ^{-s}` error and a bound on the omitted modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsError {
    pub head: f64,
    pub tail_bound: f64,
}

fn check_sobolev(d: usize, s: f64) -> Result<()> {
    if d == 0 || d > 2 {
        return Err(Error::invalid("dim", format!("Sobolev diagnostics support d ∈ {{1, 2}}, got {d}")));
    }
    if !(s > d as f64 / 2.0) {
        return Err(Error::invalid("s", format!("need s > d/2 = {}, got {s}", d as f64 / 2.0)));
    }
    Ok(())
}

/// Visits every `n ∈ ℤ^d` with `0 < |n|_∞ ≤ n_max`.
fn for_each_mode(d: usize, n_max: i64, mut f: impl FnMut(&[i64])) {
    let mut n = vec![-n_max; d];
    loop {
        if n.iter().any(|&c| c != 0) {
            f(&n);
        }
        let mut j = 0;
        loop {
            if j == d {
                return;
            }
            n[j] += 1;
            if n[j] <= n_max {
                break;
            }
            n[j] = -n_max;
            j += 1;
        }
    }
}

fn norm_sq(n: &[i64]) -> f64 {
    n.iter().map(|&c| (c * c) as f64).sum()
}

/// `∫_ℝ (1 + u²)^{-s} du = 2∫_0^{π/2} cos^{2s-2}θ dθ`, by composite Simpson.
fn cauchy_integral(s: f64) -> f64 {
    let m = 2000;
    let h = 0.5 * PI / m as f64;
    let g = |t: f64| t.cos().max(0.0).powf(2.0 * s - 2.0);
    let mut acc = g(0.0) + g(0.5 * PI);
    for i in 1..m {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
    }
    2.0 * acc * h / 3.0
}

/// Upper bound on `Σ_{|n|_∞ > n_max} |n|^{-2s}`.
pub fn sobolev_tail(d: usize, s: f64, n_max: usize) -> Result<f64> {
    check_sobolev(d, s)?;
    let nf = n_max.max(1) as f64;
    let one_axis = 2.0 * nf.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0);
    Ok(match d {
        1 => one_axis,
        _ => {
            // union over the two axes; inner sum over the free coordinate bounded by
            // its central term plus the integral of the unimodal profile
            let inner = one_axis + cauchy_integral(s) * 2.0 * nf.powf(2.0 - 2.0 * s) / (2.0 * s - 2.0);
            2.0 * inner
        }
    })
}

/// `C_s = Σ_{n≠0} |n|^{-2s}`: partial sum over the `n_max` cube plus the tail bound.
pub fn sobolev_constant(d: usize, s: f64, n_max: usize) -> Result<(f64, f64)> {
    check_sobolev(d, s)?;
    let mut head = 0.0;
    for_each_mode(d, n_max as i64, |n| head += norm_sq(n).powf(-s));
    Ok((head, sobolev_tail(d, s, n_max)?))
}

/// `Σ_{0<|n|_∞≤n_max} |⟨μ,e_n⟩ - ⟨π,e_n⟩|² / |n|^{2s}`, with tail bound
/// `4 Σ_{|n|_∞>n_max} |n|^{-2s}` (each mode error is at most 2 in modulus).
pub fn hs_error_sq(
    mu: &EmpiricalMeasure,
    pi_fourier: impl Fn(&[i64]) -> Complex64,
    s: f64,
    n_max: usize,
) -> Result<HsError> {
    let d = mu.dim();
    check_sobolev(d, s)?;
    let n_max_i = n_max as i64;
    let side = 2 * n_max + 1;
    // per-axis phase tables: e^{2πi m x_{i,j}} for m ∈ [-n_max, n_max]
    let count = mu.len();
    let mut tables = vec![Complex64::new(0.0, 0.0); count * d * side];
    for i in 0..count {
        for (j, &x) in mu.point(i).iter().enumerate() {
            let base = Complex64::from_polar(1.0, 2.0 * PI * x);
            let row = &mut tables[(i * d + j) * side..(i * d + j + 1) * side];
            row[n_max] = Complex64::new(1.0, 0.0);
            for m in 1..=n_max {
                row[n_max + m] = row[n_max + m - 1] * base;
                row[n_max - m] = row[n_max + m].conj();
            }
        }
    }
    let mut head = 0.0;
    for_each_mode(d, n_max_i, |n| {
        let mut coeff = Complex64::new(0.0, 0.0);
        for (i, &w) in mu.weights().iter().enumerate() {
            let mut phase = Complex64::new(w, 0.0);
            for (j, &m) in n.iter().enumerate() {
                phase *= tables[(i * d + j) * side + (m + n_max_i) as usize];
            }
            coeff += phase;
        }
        head += (coeff - pi_fourier(n)).norm_sqr() / norm_sq(n).powf(s);
    });
    Ok(HsError {
        head,
        tail_bound: 4.0 * sobolev_tail(d, s, n_max)?,
    })
}

/// `χ²(N(0, ε_{k+1}I); N(0, ε_k I)) = (ε_k²/(2ε_kε_{k+1} - ε_{k+1}²))^{d/2} - 1`.
pub fn chi2_gaussian(eps_k: f64, eps_k1: f64, d: usize) -> Result<f64> {
    if !(eps_k > 0.0) || !(eps_k1 > 0.0) {
        return Err(Error::invalid("eps", "variances must be positive"));
    }
    if eps_k1 >= 2.0 * eps_k {
        return Err(Error::invalid(
            "eps",
            format!("chi-squared diverges for ε_(k+1) = {eps_k1} ≥ 2ε_k = {}", 2.0 * eps_k),
        ));
    }
    let ratio = eps_k * eps_k / (2.0 * eps_k * eps_k1 - eps_k1 * eps_k1);
    Ok((0.5 * d as f64 * ratio.ln()).exp_m1().max(0.0))
}

/// `exp(Σ_k χ²(π_{k+1}; π_k))` over a Gaussian ladder of variances.
pub fn chi2_product_bound(levels: &[f64], d: usize) -> Result<f64> {
    let mut sum = 0.0;
    for w in levels.windows(2) {
        sum += chi2_gaussian(w[0], w[1], d)?;
    }
    Ok(sum.exp())
}

/// Metrics of one replication for one observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationMetrics {
    pub estimate: f64,
    pub error: f64,
    pub ess: f64,
    pub hs_error_sq: f64,
}

impl ReplicationMetrics {
    pub fn compute(
        mu: &EmpiricalMeasure,
        f: &TestFunction,
        truth: f64,
        pi_fourier: impl Fn(&[i64]) -> Complex64,
        s: f64,
        n_max: usize,
    ) -> Result<Self> {
        let estimate = integrate(f, mu);
        Ok(Self {
            estimate,
            error: estimate - truth,
            ess: ess(mu.weights())?,
            hs_error_sq: hs_error_sq(mu, pi_fourier, s, n_max)?.head,
        })
    }
}

/// Replication-averaged error summary for one observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub f_name: String,
    pub mse: f64,
    pub bias_abs: f64,
    pub ess_mean: f64,
    pub hs_error_sq: f64,
    pub replication_count: usize,
    pub stderr_mse: f64,
    pub sup_norm: f64,
    pub osc_norm: f64,
}

impl DiagnosticsReport {
    /// Aggregates per-replication metrics; needs at least two replications.
    pub fn from_metrics(f: &TestFunction, rows: &[ReplicationMetrics]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::invalid("replications", "a report needs at least two replications"));
        }
        let r = rows.len() as f64;
        let sq: Vec<f64> = rows.iter().map(|m| m.error * m.error).collect();
        let mse = sq.iter().sum::<f64>() / r;
        let var_sq = sq.iter().map(|e| (e - mse).powi(2)).sum::<f64>() / (r - 1.0);
        let mean_err = rows.iter().map(|m| m.error).sum::<f64>() / r;
        Ok(Self {
            f_name: f.name().to_string(),
            mse,
            bias_abs: mean_err.abs(),
            ess_mean: rows.iter().map(|m| m.ess).sum::<f64>() / r,
            hs_error_sq: rows.iter().map(|m| m.hs_error_sq).sum::<f64>() / r,
            replication_count: rows.len(),
            stderr_mse: (var_sq / r).sqrt(),
            sup_norm: f.sup_norm(),
            osc_norm: f.osc_norm(),
        })
    }
}

/// Report over repeated sampler outputs against a known truth.
pub fn run_report(
    runs: &[EmpiricalMeasure],
    f: &TestFunction,
    truth: f64,
    pi_fourier: impl Fn(&[i64]) -> Complex64 + Copy,
    s: f64,
    n_max: usize,
) -> Result<DiagnosticsReport> {
    let rows = runs
        .iter()
        .map(|mu| ReplicationMetrics::compute(mu, f, truth, pi_fourier, s, n_max))
        .collect::<Result<Vec<_>>>()?;
    DiagnosticsReport::from_metrics(f, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_fourier(n: &[i64]) -> Complex64 {
        let _ = n;
        Complex64::new(0.0, 0.0)
    }

    #[test]
    fn ess_examples() {
        assert!((ess(&[0.25; 4]).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(ess(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert!((ess(&[0.5, 0.25, 0.25]).unwrap() - 8.0 / 3.0).abs() < 1e-12);
        assert!(ess(&[]).is_err());
    }

    #[test]
    fn log_normalization() {
        let w = normalize_log_weights(&[-1000.0, -1000.0, -1001.0]).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((w[0] / w[2] - 1f64.exp()).abs() < 1e-12);
        assert!(matches!(
            normalize_log_weights(&[f64::NEG_INFINITY; 3]),
            Err(Error::DegenerateWeights)
        ));
        assert!(normalize_log_weights(&[0.0, f64::NAN]).is_err());
        let mu = EmpiricalMeasure::from_log_weights(1, vec![0.1, 0.2], &[3.0, 3.0]).unwrap();
        assert!(mu.weights().iter().all(|w| (w - 0.5).abs() < 1e-15));
    }

    #[test]
    fn integrate_examples() {
        let mu = EmpiricalMeasure::uniform(1, vec![0.1, 0.3, 0.7]).unwrap();
        assert!((integrate(&TestFunction::constant(2.5), &mu) - 2.5).abs() < 1e-15);
        let single = EmpiricalMeasure::new(1, vec![0.125], vec![1.0]).unwrap();
        let f = TestFunction::cosine(0, 2.0);
        assert!((integrate(&f, &single) - (0.5 * PI).cos()).abs() < 1e-15);
        let pair = EmpiricalMeasure::uniform(1, vec![0.0, 0.25]).unwrap();
        let g = TestFunction::custom("x", |x| x[0], 1.0, 0.0);
        assert!((integrate(&g, &pair) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn norms() {
        let p = Potential::double_well_1d(0.0).unwrap();
        for f in TestFunction::battery(&p) {
            assert!(f.osc_norm() <= 2.0 * f.sup_norm());
        }
        let names: Vec<String> = TestFunction::battery(&p).iter().map(|f| f.name().to_string()).collect();
        assert_eq!(names, ["indicator_basin1", "cos4pi", "cos2pi"]);
        let ind = TestFunction::basin_indicator(&p, 1);
        assert_eq!(ind.eval(&[0.1]), 1.0);
        assert_eq!(ind.eval(&[0.6]), 0.0);
        assert_eq!(ind.eval(&[0.25]), 0.5);
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(EmpiricalMeasure::new(1, vec![0.1, 0.2], vec![0.5, 0.6]).is_err());
        assert!(EmpiricalMeasure::new(1, vec![0.1, 0.2], vec![1.5, -0.5]).is_err());
        assert!(EmpiricalMeasure::new(2, vec![0.1, 0.2], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn dirac_against_uniform_gives_basel_sum() {
        let mu = EmpiricalMeasure::new(1, vec![0.0], vec![1.0]).unwrap();
        let e = hs_error_sq(&mu, uniform_fourier, 1.0, 10_000).unwrap();
        let exact = PI * PI / 3.0;
        assert!(e.head < exact && exact - e.head <= e.tail_bound / 4.0 + 1e-12);
        assert!((e.head - exact).abs() < 2.1e-4);
    }

    #[test]
    fn matching_coefficients_give_zero() {
        let mu = EmpiricalMeasure::new(1, vec![0.2, 0.7], vec![0.3, 0.7]).unwrap();
        let copy = mu.clone();
        let e = hs_error_sq(&mu, |n| copy.fourier_coefficient(n), 1.0, 32).unwrap();
        assert!(e.head < 1e-24);
        let mu2 = EmpiricalMeasure::new(2, vec![0.2, 0.1, 0.7, 0.4], vec![0.3, 0.7]).unwrap();
        let copy2 = mu2.clone();
        let e2 = hs_error_sq(&mu2, |n| copy2.fourier_coefficient(n), 1.5, 8).unwrap();
        assert!(e2.head < 1e-24);
    }

    #[test]
    fn sobolev_checks() {
        let mu = EmpiricalMeasure::new(1, vec![0.0], vec![1.0]).unwrap();
        assert!(hs_error_sq(&mu, uniform_fourier, 0.5, 8).is_err());
        let (c, tail) = sobolev_constant(1, 1.0, 100_000).unwrap();
        assert!((c - PI * PI / 3.0).abs() < 1e-4 && tail < 3e-5);
        // 2D: partial sums increase towards the bound
        let (h8, t8) = sobolev_constant(2, 1.5, 8).unwrap();
        let (h32, _) = sobolev_constant(2, 1.5, 32).unwrap();
        assert!(h32 > h8 && h32 < h8 + t8);
    }

    #[test]
    fn tail_bound_dominates_direct_sum() {
        for (d, s, n) in [(1usize, 1.0, 16usize), (1, 1.7, 8), (2, 1.5, 6), (2, 2.0, 4)] {
            let (head_n, tail) = sobolev_constant(d, s, n).unwrap();
            let (head_big, _) = sobolev_constant(d, s, 400 / d / d).unwrap();
            assert!(head_big - head_n <= tail, "d={d} s={s}");
        }
    }

    #[test]
    fn chi2_examples() {
        assert_eq!(chi2_gaussian(0.7, 0.7, 3).unwrap(), 0.0);
        assert!((chi2_gaussian(1.0, 0.5, 1).unwrap() - (1.0f64 / 0.75).sqrt() + 1.0).abs() < 1e-15);
        assert!((chi2_gaussian(1.0, 0.5, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(chi2_gaussian(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn chi2_matches_quadrature_and_is_asymmetric() {
        // ∫ p²/q - 1 over ℝ by the trapezoid rule on [-20, 20]
        let chi2_quad = |vp: f64, vq: f64| {
            let dens = |x: f64, v: f64| (-x * x / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
            let m = 200_000;
            let h = 40.0 / m as f64;
            (0..=m)
                .map(|i| {
                    let x = -20.0 + i as f64 * h;
                    let wgt = if i == 0 || i == m { 0.5 } else { 1.0 };
                    wgt * dens(x, vp).powi(2) / dens(x, vq)
                })
                .sum::<f64>()
                * h
                - 1.0
        };
        let forward = chi2_quad(0.5, 1.0);
        assert!((forward - chi2_gaussian(1.0, 0.5, 1).unwrap()).abs() < 1e-9);
        // the reverse order diverges: N(0,1) against N(0,1/2) has infinite χ²
        assert!(chi2_gaussian(0.5, 1.0, 1).is_err());
        let backward = chi2_quad(0.8, 0.5);
        assert!((backward - chi2_gaussian(0.5, 0.8, 1).unwrap()).abs() < 1e-9);
        let forward_pair = chi2_quad(0.5, 0.8);
        assert!((forward_pair - chi2_gaussian(0.8, 0.5, 1).unwrap()).abs() < 1e-9);
        assert!((forward_pair - backward).abs() > 0.01);
    }

    #[test]
    fn chi2_products() {
        assert_eq!(chi2_product_bound(&[0.3, 0.3], 2).unwrap(), 1.0);
        let ladder = |k: usize| -> Vec<f64> { (0..=k).map(|i| 1.0 / (1.0 + i as f64 / k as f64)).collect() };
        let b4 = chi2_product_bound(&ladder(4), 2).unwrap();
        let b8 = chi2_product_bound(&ladder(8), 2).unwrap();
        let direct: f64 = ladder(4)
            .windows(2)
            .map(|w| (w[0] * w[0] / (2.0 * w[0] * w[1] - w[1] * w[1])) - 1.0)
            .sum::<f64>()
            .exp();
        assert!((b4 - direct).abs() < 1e-12);
        assert!(b4 <= std::f64::consts::E);
        assert!(b8 <= b4);
    }

    #[test]
    fn report_examples() {
        let f = TestFunction::constant(1.0);
        let zero = ReplicationMetrics {
            estimate: 1.0,
            error: 0.0,
            ess: 10.0,
            hs_error_sq: 0.0,
        };
        let r = DiagnosticsReport::from_metrics(&f, &[zero, zero]).unwrap();
        assert_eq!(r.mse, 0.0);
        let e = 0.3;
        let plus = ReplicationMetrics { error: e, ..zero };
        let minus = ReplicationMetrics { error: -e, ..zero };
        let r = DiagnosticsReport::from_metrics(&f, &[plus, minus]).unwrap();
        assert!(r.bias_abs < 1e-15);
        assert!((r.mse - e * e).abs() < 1e-15);
        assert!(DiagnosticsReport::from_metrics(&f, &[zero]).is_err());
        let json = serde_json::to_value(&r).unwrap();
        for key in ["mse", "bias_abs", "ess_mean", "hs_error_sq", "replication_count", "stderr_mse"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn integrate_is_permutation_invariant(
                pts in prop::collection::vec(0.0f64..1.0, 2..30),
                raw in prop::collection::vec(-5.0f64..5.0, 30),
                seed in 0usize..1000,
            ) {
                let n = pts.len();
                let mu = EmpiricalMeasure::from_log_weights(1, pts.clone(), &raw[..n]).unwrap();
                let mut order: Vec<usize> = (0..n).collect();
                order.rotate_left(seed % n);
                order.reverse();
                let perm_pts: Vec<f64> = order.iter().map(|&i| pts[i]).collect();
                let perm_lw: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
                let nu = EmpiricalMeasure::from_log_weights(1, perm_pts, &perm_lw).unwrap();
                let f = TestFunction::cosine(0, 1.0);
                prop_assert!((integrate(&f, &mu) - integrate(&f, &nu)).abs() < 1e-12);
                prop_assert!((mu.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let e = ess(mu.weights()).unwrap();
                prop_assert!(e >= 1.0 - 1e-12 && e <= n as f64 + 1e-9);
            }

            #[test]
            fn hs_bounded_by_max_mode_error(
                pts in prop::collection::vec(0.0f64..1.0, 1..10),
                shift in 0.0f64..1.0,
            ) {
                let mu = EmpiricalMeasure::uniform(1, pts.clone()).unwrap();
                let other = EmpiricalMeasure::uniform(1, pts.iter().map(|x| (x + shift).fract()).collect()).unwrap();
                let n_max = 16;
                let mut max_err: f64 = 0.0;
                for m in -16i64..=16 {
                    if m != 0 {
                        max_err = max_err.max((mu.fourier_coefficient(&[m]) - other.fourier_coefficient(&[m])).norm());
                    }
                }
                let e = hs_error_sq(&mu, |n| other.fourier_coefficient(n), 1.0, n_max).unwrap();
                let (c_s, _) = sobolev_constant(1, 1.0, n_max).unwrap();
                prop_assert!(e.head <= c_s * max_err * max_err * (1.0 + 1e-12) + 1e-15);
            }
        }
    }
}
