//! Energy landscapes on the unit torus `[0, 1)^d`.
//!
//! All potentials are normalized so the global minimum is `0`. Densities are
//! only ever handled in log form, `log π̃_ε(x) = -U(x) / ε`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Points closer than this to a separatrix are reported as [`Basin::Boundary`].
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Largest admissible `|asymmetry|` for [`Potential::double_well_1d`].
pub const MAX_ASYMMETRY: f64 = 0.1;

const TWO_PI: f64 = 2.0 * PI;
const FOUR_PI: f64 = 4.0 * PI;

/// Result of basin classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basin {
    /// Basin of attraction of the well with this (1-based) id.
    Well(usize),
    /// Within [`BOUNDARY_TOL`] of a separatrix, or on a critical point that is not a minimum.
    Boundary,
}

impl Basin {
    /// Integer label used by the CSV and C interfaces; `-1` marks the boundary.
    pub fn as_label(self) -> i32 {
        match self {
            Basin::Well(id) => id as i32,
            Basin::Boundary => -1,
        }
    }
}

/// A local minimum of the potential.
#[derive(Debug, Clone, PartialEq)]
pub struct WellInfo {
    pub location: Vec<f64>,
    pub energy: f64,
    pub basin_id: usize,
}

/// The closed family of landscapes shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Landscape {
    /// `U(x) = (1 - cos 4πx)/2 + a sin 2πx + a²/4`.
    DoubleWell1d { asymmetry: f64 },
    /// `U(x, y) = (1 - cos 4πx)/2 + (1 - cos 2πy)/2`.
    DoubleWell2d,
    /// `U ≡ 0`; used by the oracle tests as a flat-torus reference.
    Flat { dim: usize },
}

/// An energy function on `T^d` together with its structural metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    landscape: Landscape,
    sup_energy: f64,
    grad_lipschitz: f64,
    wells: Vec<WellInfo>,
    saddle_height: f64,
    energy_barrier: f64,
}

impl Potential {
    /// The 1D cosine double well with an optional `sin 2πx` tilt.
    ///
    /// Critical points are closed-form: maxima stay at `1/4` and `3/4` (heights
    /// `1 ± a + a²/4` after the shift), minima solve `sin 2πx = -a/2` and both sit at
    /// energy 0. The reflection `x ↦ 1/2 - x` leaves `U` invariant and swaps the
    /// basins, so `π_ε(Ω_1) = 1/2` for every tilt.
    pub fn double_well_1d(asymmetry: f64) -> Result<Self> {
        if !asymmetry.is_finite() || asymmetry.abs() > MAX_ASYMMETRY {
            return Err(Error::invalid(
                "asymmetry",
                format!("|asymmetry| must be at most {MAX_ASYMMETRY}, got {asymmetry}"),
            ));
        }
        let shift = (asymmetry / 2.0).asin() / TWO_PI;
        let wells = vec![
            WellInfo {
                location: vec![canonical(-shift)],
                energy: 0.0,
                basin_id: 1,
            },
            WellInfo {
                location: vec![canonical(0.5 + shift)],
                energy: 0.0,
                basin_id: 2,
            },
        ];
        let offset = 0.25 * asymmetry * asymmetry;
        let saddle_height = 1.0 - asymmetry.abs() + offset;
        Ok(Self {
            landscape: Landscape::DoubleWell1d { asymmetry },
            sup_energy: 1.0 + asymmetry.abs() + offset,
            grad_lipschitz: 8.0 * PI * PI + 4.0 * PI * PI * asymmetry.abs(),
            wells,
            saddle_height,
            // both wells sit at zero energy, so the barrier out of well 2 equals the saddle height
            energy_barrier: saddle_height,
        })
    }

    pub fn double_well_2d() -> Self {
        Self {
            landscape: Landscape::DoubleWell2d,
            sup_energy: 2.0,
            grad_lipschitz: 8.0 * PI * PI,
            wells: vec![
                WellInfo {
                    location: vec![0.0, 0.0],
                    energy: 0.0,
                    basin_id: 1,
                },
                WellInfo {
                    location: vec![0.5, 0.0],
                    energy: 0.0,
                    basin_id: 2,
                },
            ],
            saddle_height: 1.0,
            energy_barrier: 1.0,
        }
    }

    pub fn flat(dim: usize) -> Self {
        Self {
            landscape: Landscape::Flat { dim: dim.max(1) },
            sup_energy: 0.0,
            grad_lipschitz: 0.0,
            wells: Vec::new(),
            saddle_height: 0.0,
            energy_barrier: 0.0,
        }
    }

    /// Looks a potential up by its config name.
    pub fn from_name(name: &str, asymmetry: f64) -> Result<Self> {
        match name {
            "double_well_1d" => Self::double_well_1d(asymmetry),
            "double_well_2d" => Ok(Self::double_well_2d()),
            "flat_1d" => Ok(Self::flat(1)),
            other => Err(Error::config(
                "potential",
                format!("unknown potential `{other}` (expected double_well_1d or double_well_2d)"),
            )),
        }
    }

    pub fn landscape(&self) -> Landscape {
        self.landscape
    }

    pub fn dim(&self) -> usize {
        match self.landscape {
            Landscape::DoubleWell1d { .. } => 1,
            Landscape::DoubleWell2d => 2,
            Landscape::Flat { dim } => dim,
        }
    }

    /// `true` for landscapes of the form `U(x) = Σ_j u_j(x_j)`.
    pub fn is_separable(&self) -> bool {
        true
    }

    /// `‖U‖_∞`.
    pub fn sup_energy(&self) -> f64 {
        self.sup_energy
    }

    /// Lipschitz constant of `∇U`.
    pub fn grad_lipschitz(&self) -> f64 {
        self.grad_lipschitz
    }

    pub fn wells(&self) -> &[WellInfo] {
        &self.wells
    }

    /// `Û`: the lowest peak energy along any path joining the two wells.
    pub fn saddle_height(&self) -> f64 {
        self.saddle_height
    }

    /// `γ̂`: saddle height minus the energy of the shallower well.
    pub fn energy_barrier(&self) -> f64 {
        self.energy_barrier
    }

    /// `γ̂_r = Û / γ̂`, taken as 1 for the well-free flat torus.
    pub fn barrier_ratio(&self) -> f64 {
        if self.energy_barrier > 0.0 {
            self.saddle_height / self.energy_barrier
        } else {
            1.0
        }
    }

    /// Energy at `x`; any real representative of the torus point is accepted.
    pub fn energy(&self, x: &[f64]) -> f64 {
        match self.landscape {
            Landscape::DoubleWell1d { asymmetry } => energy_1d(x[0], asymmetry),
            Landscape::DoubleWell2d => {
                0.5 * (1.0 - (FOUR_PI * x[0]).cos()) + 0.5 * (1.0 - (TWO_PI * x[1]).cos())
            }
            Landscape::Flat { .. } => 0.0,
        }
    }

    /// Writes `∇U(x)` into `grad`.
    pub fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        match self.landscape {
            Landscape::DoubleWell1d { asymmetry } => {
                grad[0] = TWO_PI * (FOUR_PI * x[0]).sin() + TWO_PI * asymmetry * (TWO_PI * x[0]).cos();
            }
            Landscape::DoubleWell2d => {
                grad[0] = TWO_PI * (FOUR_PI * x[0]).sin();
                grad[1] = PI * (TWO_PI * x[1]).sin();
            }
            Landscape::Flat { .. } => grad.iter_mut().for_each(|g| *g = 0.0),
        }
    }

    /// Energy of the one-dimensional factor `u_axis` of a separable landscape.
    pub fn axis_energy(&self, axis: usize, t: f64) -> f64 {
        match (self.landscape, axis) {
            (Landscape::DoubleWell1d { asymmetry }, _) => energy_1d(t, asymmetry),
            (Landscape::DoubleWell2d, 0) => 0.5 * (1.0 - (FOUR_PI * t).cos()),
            (Landscape::DoubleWell2d, _) => 0.5 * (1.0 - (TWO_PI * t).cos()),
            (Landscape::Flat { .. }, _) => 0.0,
        }
    }

    /// `log π̃_ε(x) = -U(x)/ε`.
    pub fn log_unnormalized_density(&self, x: &[f64], eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::invalid("eps", format!("temperature must be positive, got {eps}")));
        }
        Ok(-self.energy(x) / eps)
    }

    /// Basin of attraction of `x` under the gradient flow `ẏ = -∇U(y)`.
    ///
    /// Builtin landscapes use their closed-form separatrices.
    pub fn classify_basin(&self, x: &[f64]) -> Basin {
        match self.landscape {
            Landscape::DoubleWell1d { .. } => basin_from_x(canonical(x[0])),
            Landscape::DoubleWell2d => {
                if (canonical(x[1]) - 0.5).abs() < BOUNDARY_TOL {
                    Basin::Boundary
                } else {
                    basin_from_x(canonical(x[0]))
                }
            }
            Landscape::Flat { .. } => Basin::Boundary,
        }
    }

    /// Canonical parameter string; feeds the calibration cache key.
    pub fn describe(&self) -> String {
        match self.landscape {
            Landscape::DoubleWell1d { asymmetry } => {
                format!("double_well_1d(asymmetry={asymmetry:?})")
            }
            Landscape::DoubleWell2d => "double_well_2d".to_string(),
            Landscape::Flat { dim } => format!("flat(dim={dim})"),
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[inline]
fn energy_1d(x: f64, asymmetry: f64) -> f64 {
    0.5 * (1.0 - (FOUR_PI * x).cos()) + asymmetry * (TWO_PI * x).sin() + 0.25 * asymmetry * asymmetry
}

fn basin_from_x(x: f64) -> Basin {
    if (x - 0.25).abs() < BOUNDARY_TOL || (x - 0.75).abs() < BOUNDARY_TOL {
        Basin::Boundary
    } else if x > 0.25 && x < 0.75 {
        Basin::Well(2)
    } else {
        Basin::Well(1)
    }
}

/// Reduces a coordinate to `[0, 1)`.
#[inline]
pub fn canonical(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Reduces every coordinate of `x` to `[0, 1)` in place.
pub fn canonicalize(x: &mut [f64]) {
    x.iter_mut().for_each(|t| *t = canonical(*t));
}

/// Signed distance from `a` to `b` on the unit circle, in `[-1/2, 1/2)`.
pub fn torus_delta(a: f64, b: f64) -> f64 {
    let d = b - a;
    d - (d + 0.5).floor()
}

/// Basin classification by explicit RK4 integration of the gradient flow
/// (step `1e-3`, at most `1e5` steps).
///
/// Used for landscapes without an analytic separatrix and as a cross-check of
/// [`Potential::classify_basin`].
pub fn classify_by_gradient_flow(p: &Potential, x: &[f64]) -> Basin {
    const STEP: f64 = 1e-3;
    const MAX_STEPS: usize = 100_000;
    let d = p.dim();
    let mut y = x.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    let stage = |y: &[f64], k: &[f64], scale: f64, tmp: &mut [f64]| {
        for j in 0..y.len() {
            tmp[j] = y[j] - scale * STEP * k[j];
        }
    };
    for _ in 0..MAX_STEPS {
        p.gradient(&y, &mut k1);
        if k1.iter().map(|g| g * g).sum::<f64>().sqrt() < 1e-10 {
            break;
        }
        stage(&y, &k1, 0.5, &mut tmp);
        p.gradient(&tmp, &mut k2);
        stage(&y, &k2, 0.5, &mut tmp);
        p.gradient(&tmp, &mut k3);
        stage(&y, &k3, 1.0, &mut tmp);
        p.gradient(&tmp, &mut k4);
        for j in 0..d {
            y[j] -= STEP / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    canonicalize(&mut y);
    p.wells()
        .iter()
        .find(|w| {
            w.location
                .iter()
                .zip(&y)
                .all(|(a, b)| torus_delta(*a, *b).abs() < 1e-3)
        })
        .map(|w| Basin::Well(w.basin_id))
        .unwrap_or(Basin::Boundary)
}
