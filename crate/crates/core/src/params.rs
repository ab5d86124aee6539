use crate::error::Error;

/// Coefficients of the coupled system: `u_t = u_xx - rho*u + alpha*v`,
/// `0 = v_xx - gamma*v + beta*u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Elliptic reaction coefficient; must be positive so the quasi-steady
    /// operator stays invertible and well conditioned.
    pub gamma: f64,
    /// Parabolic reaction coefficient.
    pub rho: f64,
    /// Coupling gain of the elliptic field into the parabolic equation.
    pub alpha: f64,
    /// Source gain of the parabolic state into the elliptic equation.
    pub beta: f64,
}

impl PhysicalParams {
    pub fn new(gamma: f64, rho: f64, alpha: f64, beta: f64) -> Result<Self, Error> {
        if !(gamma.is_finite() && rho.is_finite() && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::NonFinite {
                context: "physical parameters",
            });
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidCoefficient {
                name: "gamma",
                value: gamma,
                requirement: "must be positive",
            });
        }
        Ok(Self {
            gamma,
            rho,
            alpha,
            beta,
        })
    }

    /// Zero-mode gain of the coupling loop, `alpha*beta/gamma`. The
    /// uncontrolled system is exponentially stable iff `rho` exceeds it
    /// (for a non-negative coupling product).
    pub fn coupling_gain(&self) -> f64 {
        self.alpha * self.beta / self.gamma
    }
}
