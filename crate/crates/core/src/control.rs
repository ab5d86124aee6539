//! Sliding variable, sign regularizations, the switching boundary control
//! law and its gain certificate.
//!
//! The controller measures the scalar `s = <psi, u>` for a fixed test
//! function `psi` with nonzero boundary value, and drives it to zero in
//! finite time with a discontinuous flux command at the right endpoint.
//! The law is invariant under positive rescaling of `psi`, so test
//! functions are stored in a canonical scaling with unit boundary value;
//! this also fixes the orientation the reaching analysis needs when the
//! supplied function is negative at the boundary.

use std::sync::Arc;

use crate::error::Error;
use crate::grid::{Field, Grid};
use crate::params::PhysicalParams;

/// Shape from which a test function is sampled; kept for config echoes.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunctionShape {
    /// `psi(x) = 1`.
    ConstantOne,
    /// `psi(x) = c_0 + c_1 x + ... + c_k x^k`.
    Polynomial(Vec<f64>),
    /// Raw nodal samples.
    Tabulated(Vec<f64>),
}

/// Grid-sampled test function with its derivative and boundary value,
/// canonically scaled so that `psi(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    shape: TestFunctionShape,
    samples: Field,
    derivative_samples: Field,
    boundary_value: f64,
}

impl TestFunction {
    /// The default choice: `psi = 1`, which zeroes the derivative part of
    /// the remainder term.
    pub fn constant_one(grid: Arc<Grid>) -> Self {
        let samples = Field::constant(grid.clone(), 1.0).expect("constant is finite");
        let derivative_samples = Field::zeros(grid);
        Self {
            shape: TestFunctionShape::ConstantOne,
            samples,
            derivative_samples,
            boundary_value: 1.0,
        }
    }

    /// Polynomial test function with analytic derivative samples.
    pub fn polynomial(grid: Arc<Grid>, coeffs: &[f64]) -> Result<Self, Error> {
        if coeffs.is_empty() || !coeffs.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite {
                context: "test-function coefficients",
            });
        }
        let eval = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let eval_deriv = |x: f64| {
            coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c)
        };
        let samples = Field::from_fn(grid.clone(), eval)?;
        let derivative_samples = Field::from_fn(grid, eval_deriv)?;
        Self::canonicalize(
            TestFunctionShape::Polynomial(coeffs.to_vec()),
            samples,
            derivative_samples,
        )
    }

    /// Tabulated test function; the derivative is estimated by central
    /// differences (one-sided at the endpoints).
    pub fn tabulated(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self, Error> {
        let samples = Field::new(grid, values.clone())?;
        let derivative_samples = samples.derivative();
        Self::canonicalize(
            TestFunctionShape::Tabulated(values),
            samples,
            derivative_samples,
        )
    }

    fn canonicalize(
        shape: TestFunctionShape,
        samples: Field,
        derivative_samples: Field,
    ) -> Result<Self, Error> {
        let raw_boundary = *samples.values().last().expect("grids are non-empty");
        if raw_boundary == 0.0 {
            return Err(Error::InvalidCoefficient {
                name: "psi(1)",
                value: raw_boundary,
                requirement: "test function must be nonzero at x = 1",
            });
        }
        let inv = 1.0 / raw_boundary;
        Ok(Self {
            shape,
            samples: samples.scaled(inv),
            derivative_samples: derivative_samples.scaled(inv),
            boundary_value: 1.0,
        })
    }

    pub fn shape(&self) -> &TestFunctionShape {
        &self.shape
    }

    pub fn samples(&self) -> &Field {
        &self.samples
    }

    pub fn derivative_samples(&self) -> &Field {
        &self.derivative_samples
    }

    /// Always 1 in the canonical scaling.
    pub fn boundary_value(&self) -> f64 {
        self.boundary_value
    }

    /// Sliding variable `s = <psi, u>`.
    pub fn sliding_value(&self, u: &Field) -> Result<f64, Error> {
        self.samples.inner_product(u)
    }

    /// Drift of the sliding variable that the switching term must
    /// dominate: `R = -<psi_x, u_x> + alpha * <psi, v>`, with `v` the
    /// quasi-steady response to `u`.
    pub fn remainder(&self, u: &Field, v: &Field, alpha: f64) -> Result<f64, Error> {
        let du = u.derivative();
        let grad_part = self.derivative_samples.inner_product(&du)?;
        let coupling_part = self.samples.inner_product(v)?;
        Ok(-grad_part + alpha * coupling_part)
    }
}

/// Realization of the discontinuous switching term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignMode {
    /// Exact sign with the convention `sign(0) = 0`.
    Ideal,
    /// Linear boundary layer: `clamp(s/eps, -1, 1)`.
    Saturation { eps: f64 },
    /// Smooth boundary layer: `tanh(s/eps)`.
    SmoothTanh { eps: f64 },
}

impl SignMode {
    pub fn validate(&self) -> Result<(), Error> {
        match *self {
            SignMode::Ideal => Ok(()),
            SignMode::Saturation { eps } | SignMode::SmoothTanh { eps } => {
                if eps.is_finite() && eps > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidCoefficient {
                        name: "eps",
                        value: eps,
                        requirement: "boundary-layer width must be positive",
                    })
                }
            }
        }
    }

    /// Regularized sign of `s`; odd and bounded by 1 in magnitude.
    pub fn evaluate(&self, s: f64) -> f64 {
        match *self {
            SignMode::Ideal => {
                if s > 0.0 {
                    1.0
                } else if s < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            SignMode::Saturation { eps } => (s / eps).clamp(-1.0, 1.0),
            SignMode::SmoothTanh { eps } => (s / eps).tanh(),
        }
    }

    /// Width of the boundary layer in `s`-units (zero for the ideal sign);
    /// enters the reaching-band estimate.
    pub fn boundary_layer(&self) -> f64 {
        match *self {
            SignMode::Ideal => 0.0,
            SignMode::Saturation { eps } | SignMode::SmoothTanh { eps } => eps,
        }
    }
}

/// Which boundary law to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlLaw {
    /// `omega = -K*sgn(s) + (rho/psi(1))*s`.
    Basic,
    /// Basic law plus cancellation of the measured drift:
    /// `omega -= R/psi(1)`. Relaxes the gain requirement to the
    /// disturbance bound alone.
    Compensated,
}

/// Gain, law variant, sign regularization and test function.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    pub gain: f64,
    pub law: ControlLaw,
    pub sign_mode: SignMode,
    pub psi: TestFunction,
}

/// One evaluation of the boundary law, together with the intermediate
/// quantities recorded in traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSample {
    pub sliding_value: f64,
    pub remainder: f64,
    pub omega: f64,
}

impl ControllerConfig {
    pub fn new(
        gain: f64,
        law: ControlLaw,
        sign_mode: SignMode,
        psi: TestFunction,
    ) -> Result<Self, Error> {
        if !gain.is_finite() || gain <= 0.0 {
            return Err(Error::InvalidCoefficient {
                name: "gain",
                value: gain,
                requirement: "must be positive and finite",
            });
        }
        sign_mode.validate()?;
        Ok(Self {
            gain,
            law,
            sign_mode,
            psi,
        })
    }

    /// Evaluates the boundary law for the current state. `v` must be the
    /// quasi-steady response to `u`; it only enters through the drift
    /// term.
    pub fn output(
        &self,
        params: &PhysicalParams,
        u: &Field,
        v: &Field,
    ) -> Result<ControlSample, Error> {
        let s = self.psi.sliding_value(u)?;
        let remainder = self.psi.remainder(u, v, params.alpha)?;
        let psi_boundary = self.psi.boundary_value();
        let mut omega = -self.gain * self.sign_mode.evaluate(s) + params.rho / psi_boundary * s;
        if self.law == ControlLaw::Compensated {
            omega -= remainder / psi_boundary;
        }
        Ok(ControlSample {
            sliding_value: s,
            remainder,
            omega,
        })
    }

    /// Certificate for this controller against the given disturbance and
    /// drift bounds.
    pub fn certificate(&self, d_max: f64, r_max: f64, s0: f64) -> GainCertificate {
        gain_certificate(self.gain, self.psi.boundary_value(), d_max, r_max, s0)
    }
}

/// Finite-time reaching certificate: whether the gain dominates the
/// disturbance and drift bounds, and if so within what time the sliding
/// variable must vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainCertificate {
    pub gain: f64,
    pub psi_boundary: f64,
    pub d_max: f64,
    pub r_max: f64,
    pub s0: f64,
    /// Smallest gain that satisfies the reaching condition:
    /// `(|psi(1)|*d_max + r_max) / |psi(1)|`.
    pub required_gain: f64,
    /// Guaranteed decay rate of `|s|`:
    /// `K*|psi(1)| - (|psi(1)|*d_max + r_max)`.
    pub eta: f64,
    pub satisfied: bool,
    /// `|s0|/eta` when satisfied, `+inf` otherwise.
    pub settling_bound: f64,
}

/// Evaluates the reaching condition. `psi_boundary` must be nonzero;
/// `d_max` and `r_max` must be non-negative.
pub fn gain_certificate(
    gain: f64,
    psi_boundary: f64,
    d_max: f64,
    r_max: f64,
    s0: f64,
) -> GainCertificate {
    debug_assert!(psi_boundary != 0.0);
    debug_assert!(d_max >= 0.0 && r_max >= 0.0);
    let pb = psi_boundary.abs();
    let threat = pb * d_max + r_max;
    let required_gain = threat / pb;
    let eta = gain * pb - threat;
    let satisfied = eta > 0.0;
    let settling_bound = if satisfied {
        s0.abs() / eta
    } else {
        f64::INFINITY
    };
    GainCertificate {
        gain,
        psi_boundary,
        d_max,
        r_max,
        s0,
        required_gain,
        eta,
        satisfied,
        settling_bound,
    }
}
