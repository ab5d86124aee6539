//! Quasi-steady elliptic solve: given the parabolic state `u`, find `v`
//! with `(gamma - d^2/dx^2) v = beta * u` and homogeneous Neumann
//! conditions. Discretized with the ghost-node closure (`v_{-1} = v_1`,
//! `v_{n+1} = v_{n-1}`) and solved by the Thomas algorithm. A cosine-series
//! projection provides an independent reference for testing.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::Error;
use crate::grid::{Field, Grid};
use crate::params::PhysicalParams;

/// Tridiagonal form of `(gamma*I - D2)` with the Neumann ghost closure.
///
/// Interior rows carry `gamma + 2/h^2` on the diagonal and `-1/h^2` on both
/// off-diagonals; the two boundary rows fold the ghost node into a single
/// off-diagonal entry of `-2/h^2`. For `gamma > 0` every row is strictly
/// diagonally dominant, so the Thomas algorithm is stable without pivoting.
#[derive(Debug, Clone)]
pub struct EllipticSystem {
    grid: Arc<Grid>,
    gamma: f64,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl EllipticSystem {
    pub fn assemble(grid: Arc<Grid>, gamma: f64) -> Result<Self, Error> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidCoefficient {
                name: "gamma",
                value: gamma,
                requirement: "must be positive and finite",
            });
        }
        let n = grid.intervals();
        let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
        let diag = vec![gamma + 2.0 * inv_h2; n + 1];
        // lower[i] multiplies v_{i-1} in row i; upper[i] multiplies v_{i+1}.
        let mut lower = vec![-inv_h2; n + 1];
        let mut upper = vec![-inv_h2; n + 1];
        lower[0] = 0.0;
        upper[n] = 0.0;
        upper[0] = -2.0 * inv_h2;
        lower[n] = -2.0 * inv_h2;
        Ok(Self {
            grid,
            gamma,
            lower,
            diag,
            upper,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Coefficient bands `(lower, diag, upper)` of the discrete operator.
    pub fn bands(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.lower, &self.diag, &self.upper)
    }

    /// Solves `(gamma*I - D2) v = rhs`. The boundary rows are halved before
    /// the sweep, which makes the solved system symmetric; the solution is
    /// unchanged.
    pub fn solve(&self, rhs: &Field) -> Result<Field, Error> {
        if rhs.grid() != &self.grid && !Arc::ptr_eq(rhs.grid(), &self.grid) {
            return Err(Error::IncompatibleGrids {
                left: self.grid.intervals(),
                right: rhs.grid().intervals(),
            });
        }
        let n = self.grid.intervals();
        let mut lower = self.lower.clone();
        let mut diag = self.diag.clone();
        let mut upper = self.upper.clone();
        let mut b: Vec<f64> = rhs.values().to_vec();
        for idx in [0, n] {
            diag[idx] *= 0.5;
            lower[idx] *= 0.5;
            upper[idx] *= 0.5;
            b[idx] *= 0.5;
        }
        let v = solve_thomas(&lower, &diag, &upper, &b);
        Field::new(self.grid.clone(), v)
    }

    /// The nonlocal coupling map: `v = (gamma*I - D2)^{-1} (beta * u)`.
    /// Linear in `u`.
    pub fn response(&self, u: &Field, beta: f64) -> Result<Field, Error> {
        self.solve(&u.scaled(beta))
    }

    /// Max-norm residual `|| (gamma*I - D2) v - rhs ||_inf` evaluated with
    /// the unscaled bands.
    pub fn residual(&self, v: &Field, rhs: &Field) -> f64 {
        let n = self.grid.intervals();
        let x = v.values();
        let b = rhs.values();
        let mut worst = 0.0f64;
        for i in 0..=n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.lower[i] * x[i - 1];
            }
            if i < n {
                acc += self.upper[i] * x[i + 1];
            }
            worst = worst.max((acc - b[i]).abs());
        }
        worst
    }
}

/// Thomas sweep for a tridiagonal system; `lower[0]` and `upper[n-1]` are
/// ignored. Assumes diagonal dominance (no pivoting).
pub(crate) fn solve_thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut scratch = vec![0.0; n];
    let mut x = vec![0.0; n];
    scratch[0] = upper[0] / diag[0];
    x[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = upper[i] / denom;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        x[i] -= scratch[i] * x[i + 1];
    }
    x
}

/// Gain with which the coupling map scales the `cos(n*pi*x)` mode:
/// `beta / (gamma + (n*pi)^2)`.
pub fn mode_gain(gamma: f64, beta: f64, n: usize) -> f64 {
    let k = n as f64 * PI;
    beta / (gamma + k * k)
}

/// Independent reference for [`EllipticSystem::response`]: projects `u`
/// onto `{1, cos(pi x), ..., cos(modes*pi x)}` by quadrature, scales mode
/// `n` by `beta/(gamma + (n*pi)^2)` and resynthesizes.
pub fn cosine_series_response(u: &Field, params: &PhysicalParams, modes: usize) -> Field {
    assert!(modes >= 1, "cosine_series_response needs at least one mode");
    let grid = u.grid().clone();
    let mut out = vec![0.0; grid.node_count()];
    for k in 0..=modes {
        let phi = Field::from_fn(grid.clone(), |x| (k as f64 * PI * x).cos())
            .expect("cosine samples are finite");
        let num = u.inner_product(&phi).expect("same grid");
        let den = phi.inner_product(&phi).expect("same grid");
        let coeff = num / den * mode_gain(params.gamma, params.beta, k);
        for (o, p) in out.iter_mut().zip(phi.values()) {
            *o += coeff * p;
        }
    }
    Field::new(grid, out).expect("finite synthesis")
}
