use num_complex::Complex64;

use super::Grid1D;
use crate::diagnostics::{log_sum_exp, TestFunction};
use crate::error::{Error, Result};
use crate::potential::{Landscape, Potential};

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
    }
    Ok(())
}

fn check_supported(p: &Potential) -> Result<()> {
    if p.dim() > 2 || !p.is_separable() {
        return Err(Error::Oracle(format!(
            "quadrature supports 1D and separable 2D landscapes, got {p}"
        )));
    }
    Ok(())
}

/// `log` of the trapezoid approximation to `∫_0^1 e^{-u(x)/ε} dx` on one axis.
pub fn axis_log_z(p: &Potential, axis: usize, eps: f64, grid: &Grid1D) -> f64 {
    let logs: Vec<f64> = grid.points().map(|x| -p.axis_energy(axis, x) / eps).collect();
    log_sum_exp(&logs) - (grid.n_points() as f64).ln()
}

/// Normalized trapezoid weights `π_j ∝ e^{-u(x_j)/ε}` on one axis; they sum to 1.
pub fn axis_weights(p: &Potential, axis: usize, eps: f64, grid: &Grid1D) -> Vec<f64> {
    let logs: Vec<f64> = grid.points().map(|x| -p.axis_energy(axis, x) / eps).collect();
    let lse = log_sum_exp(&logs);
    logs.iter().map(|l| (l - lse).exp()).collect()
}

/// `log Z_ε` by the periodic trapezoid rule, with the largest exponent factored out.
pub fn quadrature_log_z(p: &Potential, eps: f64, grid: &Grid1D) -> Result<f64> {
    check_eps(eps)?;
    check_supported(p)?;
    if let Landscape::Flat { .. } = p.landscape() {
        return Ok(0.0);
    }
    Ok((0..p.dim()).map(|axis| axis_log_z(p, axis, eps, grid)).sum())
}

/// `Z_ε = ∫ e^{-U/ε}`.
pub fn quadrature_z(p: &Potential, eps: f64, grid: &Grid1D) -> Result<f64> {
    Ok(quadrature_log_z(p, eps, grid)?.exp())
}

/// `⟨f, π_ε⟩` by the same rule (tensor grid in 2D).
pub fn quadrature_expect(f: &TestFunction, p: &Potential, eps: f64, grid: &Grid1D) -> Result<f64> {
    check_eps(eps)?;
    check_supported(p)?;
    let wx = axis_weights(p, 0, eps, grid);
    match p.dim() {
        1 => Ok(grid.points().zip(&wx).map(|(x, w)| w * f.eval(&[x])).sum()),
        _ => {
            let wy = axis_weights(p, 1, eps, grid);
            let mut acc = 0.0;
            for (x, a) in grid.points().zip(&wx) {
                let mut row = 0.0;
                for (y, b) in grid.points().zip(&wy) {
                    row += b * f.eval(&[x, y]);
                }
                acc += a * row;
            }
            Ok(acc)
        }
    }
}

/// `⟨π_ε, e_n⟩ = ∫ e^{2πi n·x} π_ε(dx)` for `|n|_∞ ≤ n_max`, per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTable {
    n_max: usize,
    /// `axes[j][m + n_max]` is the coefficient of mode `m` of the axis-`j` marginal.
    axes: Vec<Vec<Complex64>>,
}

impl FourierTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Coefficient of mode `n`; the density factorizes, so 2D modes are products.
    pub fn coefficient(&self, n: &[i64]) -> Complex64 {
        let mut c = Complex64::new(1.0, 0.0);
        for (axis, &m) in self.axes.iter().zip(n) {
            assert!(m.unsigned_abs() as usize <= self.n_max, "mode {m} beyond table size {}", self.n_max);
            c *= axis[(m + self.n_max as i64) as usize];
        }
        c
    }
}

/// Fourier coefficients of the Gibbs measure up to `n_max` per axis.
pub fn gibbs_fourier(p: &Potential, eps: f64, grid: &Grid1D, n_max: usize) -> Result<FourierTable> {
    check_eps(eps)?;
    check_supported(p)?;
    if n_max >= grid.n_points() / 2 {
        return Err(Error::invalid(
            "fourier_n_max",
            format!("n_max = {n_max} must stay below half the grid size {}", grid.n_points()),
        ));
    }
    let axes = (0..p.dim())
        .map(|axis| {
            let w = axis_weights(p, axis, eps, grid);
            let mut row = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
            row[n_max] = Complex64::new(w.iter().sum(), 0.0);
            for m in 1..=n_max {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, wj) in grid.points().zip(&w) {
                    acc += wj * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 * x);
                }
                row[n_max + m] = acc;
                row[n_max - m] = acc.conj();
            }
            row
        })
        .collect();
    Ok(FourierTable { n_max, axes })
}
