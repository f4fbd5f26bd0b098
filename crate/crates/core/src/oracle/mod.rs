//! Ground truth on one-dimensional and separable two-dimensional landscapes:
//! periodic-trapezoid quadrature, the spectrum of the generator, the semigroup
//! `P^T` by eigen-expansion, `C_P(T)` and the uniform mixing time.

mod quadrature;
mod semigroup;
mod spectral;

pub use quadrature::{
    axis_log_z, axis_weights, gibbs_fourier, quadrature_expect, quadrature_log_z, quadrature_z, FourierTable,
};
pub use semigroup::{
    cp_product, kernel_apply, mixing_tail_estimate, product_mixing_time, uniform_mixing_time, weyl_count, KernelOutput, LadderSpectra,
};
pub use spectral::{
    build_axis_generator, build_symmetrized_generator, dense_eigenvalues, eigen_decompose, nonsymmetric_eigenvalues,
    separable_eigenvalues, SpectralDecomposition, SymmetrizedGenerator,
};

use crate::error::{Error, Result};

/// Default grid size for the spectral oracle.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Default number of eigenpairs kept per decomposition.
pub const DEFAULT_MODES: usize = 16;

/// Uniform periodic grid `x_j = j/n` on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid1D {
    n_points: usize,
}

impl Grid1D {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 64 || !n_points.is_multiple_of(2) {
            return Err(Error::invalid(
                "grid_points",
                format!("need an even grid size of at least 64, got {n_points}"),
            ));
        }
        Ok(Self { n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n_points as f64
    }

    /// Grid nodes in ascending order.
    pub fn points(&self) -> impl Iterator<Item = f64> + Clone {
        let n = self.n_points as f64;
        (0..self.n_points).map(move |j| j as f64 / n)
    }

    /// Twice as many points.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * self.n_points,
        }
    }
}
