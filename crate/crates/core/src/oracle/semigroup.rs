use super::quadrature::axis_log_z;
use super::spectral::{build_symmetrized_generator, eigen_decompose, SpectralDecomposition};
use super::Grid1D;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::schedule::TemperingSchedule;

/// `P^T f` on the grid together with the truncation bound `e^{-λ_k T}‖f‖_π`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelOutput {
    pub values: Vec<f64>,
    pub truncation_bound: f64,
}

/// `P^T f = Σ_i e^{-λ_i T} ⟨f, ψ_i⟩_π ψ_i` over the computed modes.
///
/// `T = f64::INFINITY` keeps only the projection onto constants. The constant
/// mode always carries factor 1, so `P^T 1 = 1`.
pub fn kernel_apply(spec: &SpectralDecomposition, t: f64, f: &[f64]) -> Result<KernelOutput> {
    if !(t >= 0.0) {
        return Err(Error::invalid("T", format!("must be nonnegative, got {t}")));
    }
    if f.len() != spec.n_points() {
        return Err(Error::invalid("f", format!("grid vector has {} entries, expected {}", f.len(), spec.n_points())));
    }
    let n = f.len();
    let mut values = vec![0.0; n];
    let mut captured = 0.0;
    for i in 0..spec.len() {
        let psi = spec.eigenfunction(i);
        let c = spec.inner(f, psi);
        captured += c * c;
        let factor = if i == 0 { 1.0 } else { (-spec.eigenvalues()[i] * t).exp() };
        if factor == 0.0 {
            continue;
        }
        values.iter_mut().zip(psi).for_each(|(v, p)| *v += factor * c * p);
    }
    let norm_sq = spec.inner(f, f);
    let omitted = (norm_sq - captured).max(0.0).sqrt();
    let lam_top = *spec.eigenvalues().last().unwrap();
    let truncation_bound = if spec.len() == 1 { omitted } else { (-lam_top * t).exp() * omitted };
    Ok(KernelOutput {
        values,
        truncation_bound,
    })
}

/// Per-level spectra of a ladder, reusable across several simulation times.
#[derive(Debug, Clone)]
pub struct LadderSpectra {
    spectra: Vec<SpectralDecomposition>,
    /// `log r_k²` on the grid, level by level.
    log_r2: Vec<Vec<f64>>,
}

impl LadderSpectra {
    pub fn new(p: &Potential, sched: &TemperingSchedule, grid: &Grid1D, k_modes: usize) -> Result<Self> {
        if p.dim() != 1 {
            return Err(Error::Oracle(format!("C_P(T) oracle is one-dimensional, got {p}")));
        }
        let energy: Vec<f64> = grid.points().map(|x| p.energy(&[x])).collect();
        let log_z: Vec<f64> = sched.levels().iter().map(|&e| axis_log_z(p, 0, e, grid)).collect();
        let mut spectra = Vec::with_capacity(sched.k());
        let mut log_r2 = Vec::with_capacity(sched.k());
        for k in 1..=sched.k() {
            let op = build_symmetrized_generator(p, sched.eps(k), grid)?;
            spectra.push(eigen_decompose(&op, k_modes)?);
            let gap = sched.inverse_gap(k);
            let dz = log_z[k - 1] - log_z[k];
            log_r2.push(energy.iter().map(|u| 2.0 * u * gap + 2.0 * dz).collect());
        }
        Ok(Self { spectra, log_r2 })
    }

    pub fn spectra(&self) -> &[SpectralDecomposition] {
        &self.spectra
    }

    /// `log ‖P_k^T r_k²‖_∞` for each level, and the summed truncation bound.
    pub fn level_terms(&self, t: f64) -> Result<(Vec<f64>, f64)> {
        let mut terms = Vec::with_capacity(self.spectra.len());
        let mut trunc = 0.0;
        for (spec, lr) in self.spectra.iter().zip(&self.log_r2) {
            let term = if t == 0.0 {
                lr.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            } else {
                // factor out the maximum so the expansion is applied to a vector bounded by 1
                let top = lr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let r2: Vec<f64> = lr.iter().map(|l| (l - top).exp()).collect();
                if t == f64::INFINITY {
                    top + spec.inner(&r2, &vec![1.0; r2.len()]).ln()
                } else {
                    let out = kernel_apply(spec, t, &r2)?;
                    trunc += out.truncation_bound * top.exp();
                    let max = out.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    top + max.ln()
                }
            };
            terms.push(term);
        }
        Ok((terms, trunc))
    }

    /// `log C_P(T) = Σ_k log ‖P_k^T r_k²‖_∞`.
    pub fn log_cp(&self, t: f64) -> Result<f64> {
        Ok(self.level_terms(t)?.0.iter().sum())
    }
}

/// `log C_P(T)` for the ladder, using `k_modes` eigenpairs per level.
pub fn cp_product(p: &Potential, sched: &TemperingSchedule, t: f64, grid: &Grid1D, k_modes: usize) -> Result<f64> {
    LadderSpectra::new(p, sched, grid, k_modes)?.log_cp(t)
}

/// `max_x Σ_{i≥2} e^{-λ_i t} ψ_i(x)²` over the computed modes.
///
/// The kernel `K_t(x, y) = p_t(x, y)/π(y) - 1` is positive semidefinite, so its
/// supremum over pairs is attained on the diagonal.
fn kernel_diagonal_sup(spec: &SpectralDecomposition, t: f64) -> f64 {
    let n = spec.n_points();
    let mut diag = vec![0.0; n];
    for i in 1..spec.len() {
        let factor = (-spec.eigenvalues()[i] * t).exp();
        if factor == 0.0 {
            continue;
        }
        diag.iter_mut().zip(spec.eigenfunction(i)).for_each(|(d, p)| *d += factor * p * p);
    }
    diag.into_iter().fold(0.0, f64::max)
}

/// Estimated contribution of the modes beyond the computed ones at time `t`.
///
/// Assumes the missing eigenvalues keep growing at least at half the slope of
/// the top two computed gaps and that their eigenfunctions are no larger than
/// the upper half of the computed ones.
pub fn mixing_tail_estimate(spec: &SpectralDecomposition, t: f64) -> f64 {
    let k = spec.len();
    if k < 3 {
        return f64::INFINITY;
    }
    let lam = spec.eigenvalues();
    let slope = 0.5 * (lam[k - 1] - lam[k - 3]);
    if !(slope > 0.0) {
        return f64::INFINITY;
    }
    let amp = (k / 2..k)
        .map(|i| spec.eigenfunction(i).iter().map(|x| x * x).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let q = (-slope * t).exp();
    amp * (-lam[k - 1] * t).exp() * q / (1.0 - q)
}

/// Smallest `t` with `sup_{x,y} |p_t(x,y)/π(y) - 1| < 1/2`, by bisection.
pub fn uniform_mixing_time(spec: &SpectralDecomposition) -> Result<f64> {
    product_mixing_time(std::slice::from_ref(spec))
}

/// Uniform mixing time of the product of independent axis semigroups.
///
/// The product kernel is `Π_a (1 + K_a) - 1` with every factor positive
/// semidefinite, so its diagonal supremum is `Π_a (1 + sup_a) - 1`.
pub fn product_mixing_time(specs: &[SpectralDecomposition]) -> Result<f64> {
    const THRESHOLD: f64 = 0.5;
    if specs.is_empty() || specs.iter().any(|s| s.len() < 3) {
        return Err(Error::Oracle("mixing time needs at least three modes per axis".into()));
    }
    let lam2 = specs.iter().map(|s| s.eigenvalues()[1]).fold(f64::INFINITY, f64::min);
    if !(lam2 > 0.0) {
        return Err(Error::Oracle(format!("spectral gap is not positive: λ_2 = {lam2:e}")));
    }
    let sup = |t: f64| specs.iter().map(|s| 1.0 + kernel_diagonal_sup(s, t)).product::<f64>() - 1.0;
    let mut hi = 1.0 / lam2;
    let mut guard = 0;
    while sup(hi) >= THRESHOLD {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::Oracle("could not bracket the mixing time".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sup(mid) >= THRESHOLD {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    let tail = specs.iter().map(|s| mixing_tail_estimate(s, hi)).sum::<f64>() * (1.0 + THRESHOLD);
    if !(tail < 0.01) {
        return Err(Error::Oracle(format!(
            "{} modes cannot certify the mixing threshold at t = {hi:e} (tail estimate {tail:e})",
            specs[0].len()
        )));
    }
    Ok(hi)
}

/// `#{i : λ_i ≤ λ}`; `λ` must lie below the largest computed eigenvalue.
pub fn weyl_count(spec: &SpectralDecomposition, lambda: f64) -> Result<usize> {
    let top = *spec.eigenvalues().last().unwrap();
    if !(lambda < top) {
        return Err(Error::invalid(
            "lambda",
            format!("λ = {lambda} is not below the largest computed eigenvalue {top}"),
        ));
    }
    Ok(spec.eigenvalues().iter().filter(|&&l| l <= lambda).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::make_schedule;
    use std::f64::consts::PI;

    fn well() -> Potential {
        Potential::double_well_1d(0.0).unwrap()
    }

    fn spec(p: &Potential, eps: f64, n: usize, k: usize) -> SpectralDecomposition {
        let g = Grid1D::new(n).unwrap();
        eigen_decompose(&build_symmetrized_generator(p, eps, &g).unwrap(), k).unwrap()
    }

    #[test]
    fn kernel_limits() {
        let s = spec(&well(), 0.5, 512, 20);
        let g = Grid1D::new(512).unwrap();
        let f: Vec<f64> = g.points().map(|x| (2.0 * PI * x).cos() + 0.3 * (6.0 * PI * x).sin()).collect();
        let ones = kernel_apply(&s, 0.37, &vec![1.0; 512]).unwrap();
        assert!(ones.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let inf = kernel_apply(&s, f64::INFINITY, &f).unwrap();
        let mean = s.inner(&f, &vec![1.0; 512]);
        assert!(inf.values.iter().all(|v| (v - mean).abs() < 1e-14));
        // T = 0 reproduces f up to the omitted modes
        let zero = kernel_apply(&s, 0.0, &f).unwrap();
        let diff: Vec<f64> = zero.values.iter().zip(&f).map(|(a, b)| a - b).collect();
        let err = s.inner(&diff, &diff).sqrt();
        assert!(err <= zero.truncation_bound * (1.0 + 1e-6) + 1e-12, "{err}");
        assert!(err < 1e-4, "{err}");
        let mut last = f64::INFINITY;
        for t in [0.0, 0.01, 0.05, 0.2, 1.0, 5.0] {
            let sup = kernel_apply(&s, t, &f).unwrap().values.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(sup <= last + 1e-12);
            last = sup;
        }
    }

    #[test]
    fn flat_mixing_time_matches_heat_kernel() {
        let s = spec(&Potential::flat(1), 1.0, 1024, 24);
        let t = uniform_mixing_time(&s).unwrap();
        // 2 Σ_m e^{-4π²m²t} = 1/2, solved by bisection on the series
        let series = |t: f64| 2.0 * (1..50).map(|m| (-4.0 * PI * PI * (m * m) as f64 * t).exp()).sum::<f64>();
        let (mut lo, mut hi) = (1e-4, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if series(mid) >= 0.5 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((t / hi - 1.0).abs() < 1e-4, "{t} vs {hi}");

        // flat 2-torus: (1 + series)² - 1 = 1/2
        let t2 = product_mixing_time(&[s.clone(), s]).unwrap();
        let want = 1.5f64.sqrt() - 1.0;
        let (mut lo, mut hi) = (1e-4, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if series(mid) >= want {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((t2 / hi - 1.0).abs() < 1e-4, "{t2} vs {hi}");
        assert!(t2 > t);
    }

    #[test]
    fn mixing_time_grows_as_temperature_drops() {
        let t1 = uniform_mixing_time(&spec(&well(), 1.0, 1024, 16)).unwrap();
        let t_half = uniform_mixing_time(&spec(&well(), 0.5, 1024, 16)).unwrap();
        assert!(t_half >= t1);
        let t1_fine = uniform_mixing_time(&spec(&well(), 1.0, 2048, 16)).unwrap();
        assert!((t1_fine / t1 - 1.0).abs() < 0.01);
    }

    #[test]
    fn weyl_counts() {
        let eps = 0.3;
        let s = spec(&Potential::flat(1), eps, 512, 31);
        for lam in [0.5, 20.0, 100.0, 400.0] {
            let want = 1 + 2 * ((lam / eps).sqrt() / (2.0 * PI)).floor() as usize;
            assert_eq!(weyl_count(&s, lam).unwrap(), want, "λ={lam}");
        }
        let below = s.eigenvalues()[1] * 0.5;
        assert_eq!(weyl_count(&s, below).unwrap(), 1);
        assert!(weyl_count(&s, 1e9).is_err());
    }

    #[test]
    fn cp_limits_and_monotonicity() {
        let p = well();
        let sched = make_schedule(0.25, 1.0, 1.0).unwrap();
        let g = Grid1D::new(512).unwrap();
        let ladder = LadderSpectra::new(&p, &sched, &g, 16).unwrap();
        let at_zero = ladder.log_cp(0.0).unwrap();
        let at_inf = ladder.log_cp(f64::INFINITY).unwrap();
        // T = 0: Σ log max r_k²
        let energy: Vec<f64> = g.points().map(|x| p.energy(&[x])).collect();
        let direct: f64 = (1..=sched.k())
            .map(|k| {
                let zk = axis_log_z(&p, 0, sched.eps(k), &g);
                let zk1 = axis_log_z(&p, 0, sched.eps(k + 1), &g);
                energy
                    .iter()
                    .map(|u| 2.0 * u * sched.inverse_gap(k) + 2.0 * (zk - zk1))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum();
        assert!((at_zero - direct).abs() < 1e-12);
        // T = ∞: Σ log ⟨r_k², π_k⟩ with weights from the quadrature grid
        assert!(at_inf > 0.0 && at_inf < at_zero);
        let mut last = at_zero;
        for t in [0.001, 0.01, 0.1, 1.0, 5.0, 25.0] {
            let v = ladder.log_cp(t).unwrap();
            assert!(v <= last + 1e-12, "t={t}");
            last = v;
        }
        assert!((ladder.log_cp(200.0).unwrap() - at_inf).abs() < 1e-9);
    }
}
