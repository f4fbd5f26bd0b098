use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Grid1D;
use crate::diagnostics::log_sum_exp;
use crate::error::{Error, Result};
use crate::potential::Potential;

/// Flux-form discretization of the generator `Lf = ε e^{U/ε}(e^{-U/ε} f')'` on a
/// periodic grid, together with its symmetrization.
///
/// With `c_{i+½} = (ε/h²) e^{-U_{i+½}/ε}` and `a_i = e^{U_i/2ε}` the symmetrized
/// operator `S = -Π^{1/2} L Π^{-1/2}` is the edge sum
/// `vᵀ S v = Σ_i c_{i+½} (a_i v_i - a_{i+1} v_{i+1})²`, so `Π^{1/2}·1` is an exact
/// zero mode and the quadratic form is evaluated without cancellation.
#[derive(Debug, Clone)]
pub struct SymmetrizedGenerator {
    eps: f64,
    /// `a_i = e^{U_i/2ε}`.
    scale: Vec<f64>,
    /// `c_{i+½}`, edge `i` joins nodes `i` and `i+1 mod n`.
    edge: Vec<f64>,
    /// Normalized grid Gibbs weights `π_i`.
    weights: Vec<f64>,
}

impl SymmetrizedGenerator {
    /// Builds the operator for the energy profile `u` at temperature `eps`.
    pub fn from_profile(u: impl Fn(f64) -> f64, eps: f64, grid: &Grid1D) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
        }
        let n = grid.n_points();
        let h = grid.spacing();
        let nodes: Vec<f64> = grid.points().map(&u).collect();
        let shift = nodes.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = nodes.iter().map(|v| (0.5 * (v - shift) / eps).exp()).collect();
        let edge = (0..n)
            .map(|i| eps / (h * h) * (-(u((i as f64 + 0.5) * h) - shift) / eps).exp())
            .collect();
        let logs: Vec<f64> = nodes.iter().map(|v| -v / eps).collect();
        let lse = log_sum_exp(&logs);
        let weights = logs.iter().map(|l| (l - lse).exp()).collect();
        Ok(Self {
            eps,
            scale,
            edge,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.scale.len()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn gibbs_weights(&self) -> &[f64] {
        &self.weights
    }

    fn next(&self, i: usize) -> usize {
        if i + 1 == self.n() {
            0
        } else {
            i + 1
        }
    }

    /// Diagonal entries.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let prev = (i + n - 1) % n;
                let a2 = self.scale[i] * self.scale[i];
                a2 * (self.edge[i] + self.edge[prev])
            })
            .collect()
    }

    /// `S_{i,i+1}` (the wrap-around entry is `S_{n-1,0}`).
    pub fn off_diagonal(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| -self.edge[i] * self.scale[i] * self.scale[self.next(i)])
            .collect()
    }

    /// `S v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let j = self.next(i);
            let flux = self.edge[i] * (self.scale[i] * v[i] - self.scale[j] * v[j]);
            out[i] += self.scale[i] * flux;
            out[j] -= self.scale[j] * flux;
        }
        out
    }

    /// `vᵀ S w` from the edge sum.
    pub fn form(&self, v: &[f64], w: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n() {
            let j = self.next(i);
            acc += self.edge[i] * (self.scale[i] * v[i] - self.scale[j] * v[j]) * (self.scale[i] * w[i] - self.scale[j] * w[j]);
        }
        acc
    }

    /// `vᵀ S v / vᵀ v`.
    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        self.form(v, v) / v.iter().map(|x| x * x).sum::<f64>()
    }

    /// Exact zero mode `√π`, unit Euclidean norm.
    pub fn ground_state(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.sqrt()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        let (d, o) = (self.diagonal(), self.off_diagonal());
        for i in 0..n {
            m[(i, i)] += d[i];
            let j = self.next(i);
            m[(i, j)] += o[i];
            m[(j, i)] += o[i];
        }
        m
    }

    /// The unsymmetrized generator `-L` as a dense matrix; rows sum to zero.
    pub fn generator_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let j = self.next(i);
            // rate i → j is c_{i+½} a_i², rate j → i is c_{i+½} a_j²
            let up = self.edge[i] * self.scale[i] * self.scale[i];
            let down = self.edge[i] * self.scale[j] * self.scale[j];
            m[(i, i)] += up;
            m[(i, j)] -= up;
            m[(j, j)] += down;
            m[(j, i)] -= down;
        }
        m
    }
}

/// `-H_ε` for a 1D potential.
pub fn build_symmetrized_generator(p: &Potential, eps: f64, grid: &Grid1D) -> Result<SymmetrizedGenerator> {
    if p.dim() != 1 {
        return Err(Error::Oracle(format!("spectral oracle is one-dimensional, got {p}")));
    }
    build_axis_generator(p, 0, eps, grid)
}

/// Generator of one factor of a separable landscape.
pub fn build_axis_generator(p: &Potential, axis: usize, eps: f64, grid: &Grid1D) -> Result<SymmetrizedGenerator> {
    if axis >= p.dim() || !p.is_separable() {
        return Err(Error::Oracle(format!("axis {axis} is not a separable factor of {p}")));
    }
    SymmetrizedGenerator::from_profile(|t| p.axis_energy(axis, t), eps, grid)
}

/// Cholesky factor of a symmetric positive definite cyclic tridiagonal matrix
/// (diagonal `a`, couplings `b_i = A_{i,i+1}`, corner `A_{n-1,0} = b_{n-1}`).
///
/// The factor is lower bidiagonal plus a dense last row `r`.
struct CyclicCholesky {
    d: Vec<f64>,
    l: Vec<f64>,
    r: Vec<f64>,
}

impl CyclicCholesky {
    fn new(a: &[f64], b: &[f64]) -> Result<Self> {
        let n = a.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut r = vec![0.0; n];
        let corner = b[n - 1];
        let sqrt = |x: f64, i: usize| {
            if x > 0.0 {
                Ok(x.sqrt())
            } else {
                Err(Error::Oracle(format!("shifted generator is not positive definite at row {i}")))
            }
        };
        d[0] = sqrt(a[0], 0)?;
        l[0] = b[0] / d[0];
        r[0] = corner / d[0];
        for i in 1..n - 2 {
            d[i] = sqrt(a[i] - l[i - 1] * l[i - 1], i)?;
            l[i] = b[i] / d[i];
            r[i] = -r[i - 1] * l[i - 1] / d[i];
        }
        d[n - 2] = sqrt(a[n - 2] - l[n - 3] * l[n - 3], n - 2)?;
        r[n - 2] = (b[n - 2] - r[n - 3] * l[n - 3]) / d[n - 2];
        let tail: f64 = r[..n - 1].iter().map(|x| x * x).sum();
        d[n - 1] = sqrt(a[n - 1] - tail, n - 1)?;
        Ok(Self { d, l, r })
    }

    /// Solves `A x = y` in place.
    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        // forward: rows 0..n-2 are bidiagonal, the last row is dense
        x[0] /= self.d[0];
        for i in 1..n - 1 {
            x[i] = (x[i] - self.l[i - 1] * x[i - 1]) / self.d[i];
        }
        let dot: f64 = (0..n - 1).map(|j| self.r[j] * x[j]).sum();
        x[n - 1] = (x[n - 1] - dot) / self.d[n - 1];
        // backward with the transposed factor
        let last = x[n - 1] / self.d[n - 1];
        x[n - 1] = last;
        x[n - 2] = (x[n - 2] - self.r[n - 2] * last) / self.d[n - 2];
        for i in (0..n - 2).rev() {
            x[i] = (x[i] - self.l[i] * x[i + 1] - self.r[i] * last) / self.d[i];
        }
    }
}

/// Lowest eigenpairs of the generator, with eigenfunctions orthonormal in the
/// discrete `L²(π_ε)` inner product.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eps: f64,
    eigenvalues: Vec<f64>,
    /// `eigenfunctions[i][j] = ψ_{i+1}(x_j)`.
    eigenfunctions: Vec<Vec<f64>>,
    weights: Vec<f64>,
    residuals: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n_points(&self) -> usize {
        self.weights.len()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Ascending `λ_1 ≤ λ_2 ≤ …`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `ψ_i` on the grid, 0-based (`eigenfunction(0)` is the constant mode).
    pub fn eigenfunction(&self, i: usize) -> &[f64] {
        &self.eigenfunctions[i]
    }

    /// Grid Gibbs weights `π_j`, summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `‖S v_i - λ_i v_i‖₂` for each returned pair.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// `⟨f, g⟩_{L²(π)}`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights.iter().zip(f).zip(g).map(|((w, a), b)| w * a * b).sum()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..=i {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.inner(&self.eigenfunctions[i], &self.eigenfunctions[j]) - target).abs());
            }
        }
        worst
    }
}

/// Lowest `k` eigenpairs by shift-inverted subspace iteration with
/// Rayleigh–Ritz projection. The ground state `√π` is seeded exactly.
pub fn eigen_decompose(op: &SymmetrizedGenerator, k: usize) -> Result<SpectralDecomposition> {
    const SHIFT: f64 = 1.0;
    const MAX_ITER: usize = 2000;
    // Ritz values carry ~1e-14 relative noise from the edge differences
    const TOL: f64 = 1e-12;
    let n = op.n();
    if k == 0 || k > n / 2 {
        return Err(Error::invalid("k_modes", format!("need 1 ≤ k ≤ n/2 = {}, got {k}", n / 2)));
    }
    let m = (k + k / 2 + 8).min(n);
    let diag: Vec<f64> = op.diagonal().iter().map(|d| d + SHIFT).collect();
    let chol = CyclicCholesky::new(&diag, &op.off_diagonal())?;
    let ground = op.ground_state();

    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_e1e5);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    basis.push(ground.clone());
    for _ in 1..m {
        basis.push((0..n).map(|_| rng.random::<f64>() - 0.5).collect());
    }
    orthonormalize(&mut basis)?;

    let mut theta = vec![f64::INFINITY; m];
    let mut converged = false;
    for iter in 0..MAX_ITER {
        for v in basis.iter_mut().skip(1) {
            chol.solve(v);
        }
        orthonormalize(&mut basis)?;
        let (values, vectors) = ritz(op, &basis);
        basis = rotate(&basis, &vectors);
        let change = (0..k)
            .map(|j| (values[j] - theta[j]).abs() / (values[j].abs() + SHIFT))
            .fold(0.0, f64::max);
        theta = values;
        // the ground state must stay first; re-seed it exactly
        basis[0].clone_from(&ground);
        for v in basis.iter_mut().skip(1) {
            let dot: f64 = v.iter().zip(&ground).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(&ground).for_each(|(x, g)| *x -= dot * g);
        }
        if iter >= 3 && change < TOL {
            converged = true;
            break;
        }
    }

    let residuals: Vec<f64> = (0..k)
        .map(|j| {
            let sv = op.apply(&basis[j]);
            let lam = op.form(&basis[j], &basis[j]);
            sv.iter().zip(&basis[j]).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    if !converged {
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        return Err(Error::Oracle(format!(
            "subspace iteration did not converge in {MAX_ITER} sweeps at eps = {}; worst residual {worst:e}",
            op.eps()
        )));
    }

    let weights = op.gibbs_weights().to_vec();
    let mut order: Vec<(f64, usize)> = basis.iter().take(k).enumerate().map(|(j, v)| (op.form(v, v), j)).collect();
    // nearly degenerate pairs may swap once the ground state is re-seeded
    order[1..].sort_by(|a, b| a.0.total_cmp(&b.0));
    let residuals = order.iter().map(|&(_, j)| residuals[j]).collect();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenfunctions = Vec::with_capacity(k);
    for &(lam, j) in &order {
        let v = &basis[j];
        eigenvalues.push(lam);
        let mut psi: Vec<f64> = if j == 0 {
            vec![1.0; n]
        } else {
            v.iter().zip(&weights).map(|(x, w)| x / w.sqrt()).collect()
        };
        // sign convention: the entry of largest modulus is positive
        let (_, big) = psi.iter().fold((0.0, 1.0), |(m, s), &x| if x.abs() > m { (x.abs(), x) } else { (m, s) });
        if big < 0.0 {
            psi.iter_mut().for_each(|x| *x = -*x);
        }
        eigenfunctions.push(psi);
    }
    Ok(SpectralDecomposition {
        eps: op.eps(),
        eigenvalues,
        eigenfunctions,
        weights,
        residuals,
    })
}

/// Modified Gram–Schmidt, two passes.
fn orthonormalize(basis: &mut [Vec<f64>]) -> Result<()> {
    for i in 0..basis.len() {
        for _ in 0..2 {
            for j in 0..i {
                let (head, tail) = basis.split_at_mut(i);
                let dot: f64 = head[j].iter().zip(&tail[0]).map(|(a, b)| a * b).sum();
                tail[0].iter_mut().zip(&head[j]).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let norm = basis[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 1e-300) {
            return Err(Error::Oracle("subspace collapsed during orthonormalization".into()));
        }
        basis[i].iter_mut().for_each(|x| *x /= norm);
    }
    Ok(())
}

/// Ascending Ritz values and coefficient vectors of the projected operator.
fn ritz(op: &SymmetrizedGenerator, basis: &[Vec<f64>]) -> (Vec<f64>, DMatrix<f64>) {
    let m = basis.len();
    let mut h = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = op.form(&basis[i], &basis[j]);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn rotate(basis: &[Vec<f64>], coeffs: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = basis[0].len();
    let m = basis.len();
    (0..m)
        .map(|c| {
            let mut out = vec![0.0; n];
            for (r, v) in basis.iter().enumerate() {
                let w = coeffs[(r, c)];
                out.iter_mut().zip(v).for_each(|(o, x)| *o += w * x);
            }
            out
        })
        .collect()
}

/// Lowest `k` eigenvalues of `-L` computed directly from the nonsymmetric
/// dense generator (real parts, ascending).
///
/// An independent route for small grids; `O(n³)`.
pub fn nonsymmetric_eigenvalues(op: &SymmetrizedGenerator, k: usize) -> Vec<f64> {
    let mut values: Vec<f64> = op.generator_dense().complex_eigenvalues().iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);
    values.truncate(k);
    values
}

/// Lowest `k` eigenvalues of a 2D separable landscape: sums of axis spectra.
pub fn separable_eigenvalues(p: &Potential, eps: f64, grid: &Grid1D, k: usize) -> Result<Vec<f64>> {
    let axes = (0..p.dim())
        .map(|axis| Ok(eigen_decompose(&build_axis_generator(p, axis, eps, grid)?, k)?.eigenvalues))
        .collect::<Result<Vec<_>>>()?;
    let mut sums = vec![0.0];
    for ax in &axes {
        let mut next: Vec<f64> = sums.iter().flat_map(|s| ax.iter().map(move |l| s + l)).collect();
        next.sort_by(f64::total_cmp);
        next.truncate(k);
        sums = next;
    }
    Ok(sums)
}

/// Dense symmetric eigenvalues, for cross-checks on small grids.
pub fn dense_eigenvalues(op: &SymmetrizedGenerator) -> DVector<f64> {
    let mut v = SymmetricEigen::new(op.to_dense()).eigenvalues;
    v.as_mut_slice().sort_by(f64::total_cmp);
    v
}
