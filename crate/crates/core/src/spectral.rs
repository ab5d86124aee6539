//! Closed-form modal analysis of the uncontrolled dynamics. With
//! homogeneous Neumann conditions the reduced evolution operator is
//! diagonal in the cosine basis, so eigenvalues, the stability margin and
//! exact single-mode solutions are all available in closed form; the
//! latter serve as integration oracles for the time stepper.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::elliptic::mode_gain;
use crate::grid::{Field, Grid};
use crate::params::PhysicalParams;

/// Default number of modes listed by a report; eigenvalues fall off like
/// `-(n*pi)^2`, so higher modes carry no information at desk scale.
pub const DEFAULT_MODE_COUNT: usize = 32;

/// Eigenvalue of mode `n`:
/// `lambda_n = -rho + alpha*beta/(gamma + (n*pi)^2) - (n*pi)^2`.
pub fn eigenvalue(params: &PhysicalParams, n: usize) -> f64 {
    let k = n as f64 * PI;
    -params.rho + params.alpha * mode_gain(params.gamma, params.beta, n) - k * k
}

/// Spectrum summary of the uncontrolled system.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalReport {
    /// `(mode index, eigenvalue)` for modes `0..=n_max`.
    pub eigenvalues: Vec<(usize, f64)>,
    /// Eigenvalue of mode 0, `-rho + alpha*beta/gamma`.
    pub dominant: f64,
    /// Exponential stability flag.
    pub stable: bool,
    /// `rho - alpha*beta/gamma`; positive exactly when stable in the
    /// mode-0-dominant regime.
    pub margin: f64,
    /// True when `alpha*beta >= 0`, where mode 0 is provably the largest
    /// eigenvalue. Outside that regime `stable` is decided by the sign of
    /// the largest *computed* eigenvalue and should be read as a report,
    /// not a certificate.
    pub lambda0_dominant: bool,
}

/// Evaluates modes `0..=n_max` and the stability criterion.
pub fn modal_report(params: &PhysicalParams, n_max: usize) -> ModalReport {
    let eigenvalues: Vec<(usize, f64)> = (0..=n_max).map(|n| (n, eigenvalue(params, n))).collect();
    let dominant = eigenvalues[0].1;
    let margin = params.rho - params.coupling_gain();
    let lambda0_dominant = params.alpha * params.beta >= 0.0;
    let stable = if lambda0_dominant {
        margin > 0.0
    } else {
        eigenvalues
            .iter()
            .map(|&(_, l)| l)
            .fold(f64::NEG_INFINITY, f64::max)
            < 0.0
    };
    ModalReport {
        eigenvalues,
        dominant,
        stable,
        margin,
        lambda0_dominant,
    }
}

/// Exact uncontrolled solution from `u0 = cos(n*pi*x)`:
/// `u(x,t) = exp(lambda_n t) cos(n*pi*x)`.
pub fn mode_solution(params: &PhysicalParams, n: usize, t: f64, grid: &Arc<Grid>) -> Field {
    debug_assert!(t >= 0.0, "mode solutions are evaluated forward in time");
    let amplitude = (eigenvalue(params, n) * t).exp();
    let k = n as f64 * PI;
    Field::from_fn(grid.clone(), |x| amplitude * (k * x).cos())
        .expect("mode samples are finite for t >= 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn demo_params() -> PhysicalParams {
        PhysicalParams::new(0.25, 1.0 / 3.0, 0.25, 0.5).unwrap()
    }

    #[test]
    fn eigenvalue_closed_form() {
        let p = demo_params();
        assert_abs_diff_eq!(eigenvalue(&p, 0), 1.0 / 6.0, epsilon = 1e-12);
        // frozen from the formula: -1/3 + 0.125/(0.25 + pi^2) - pi^2
        assert_abs_diff_eq!(eigenvalue(&p, 1), -10.190585472906763, epsilon = 1e-9);
        let decoupled = PhysicalParams::new(0.25, 2.0, 0.0, 0.5).unwrap();
        for n in 0..5usize {
            let k = n as f64 * PI;
            assert_abs_diff_eq!(eigenvalue(&decoupled, n), -2.0 - k * k, epsilon = 1e-12);
        }
    }

    #[test]
    fn report_flags_demo_parameters_unstable() {
        let report = modal_report(&demo_params(), 4);
        assert!(!report.stable);
        assert!(report.lambda0_dominant);
        assert_abs_diff_eq!(report.dominant, 1.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.margin, -1.0 / 6.0, epsilon = 1e-12);
        assert_eq!(report.eigenvalues.len(), 5);
    }

    #[test]
    fn report_stable_cases() {
        let p = PhysicalParams::new(0.25, 1.0, 0.25, 0.5).unwrap();
        let report = modal_report(&p, 4);
        assert!(report.stable);
        assert_abs_diff_eq!(report.dominant, -0.5, epsilon = 1e-12);

        let decoupled = PhysicalParams::new(0.25, 1.0, 0.0, 0.5).unwrap();
        let report = modal_report(&decoupled, 4);
        assert!(report.stable);
        assert_abs_diff_eq!(report.dominant, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn mode_solution_examples() {
        let p = demo_params();
        let grid = Grid::uniform(64).unwrap();
        let flat = mode_solution(&p, 0, 0.0, &grid);
        assert!(flat.values().iter().all(|&v| (v - 1.0).abs() <= 1e-15));

        let grown = mode_solution(&p, 0, 6.0, &grid);
        for &v in grown.values() {
            assert_abs_diff_eq!(v, 1.0f64.exp(), epsilon = 1e-12);
        }

        // frozen from the formula: lambda_2 = -1/3 + 0.125/(0.25+4pi^2) - 4pi^2
        let lambda2 = eigenvalue(&p, 2);
        assert_abs_diff_eq!(lambda2, -39.808604575274705, epsilon = 1e-9);
        let f = mode_solution(&p, 2, 1.0, &grid);
        let expected = lambda2.exp();
        assert_abs_diff_eq!(f.values()[0], expected, epsilon = 1e-20);
        assert_abs_diff_eq!(
            f.values()[16],
            expected * (2.0 * PI * 0.25).cos(),
            epsilon = 1e-20
        );
    }

    fn arb_params_nonneg_coupling() -> impl Strategy<Value = PhysicalParams> {
        (
            0.05f64..5.0,
            -5.0f64..5.0,
            0.0f64..3.0,
            0.0f64..3.0,
        )
            .prop_map(|(gamma, rho, alpha, beta)| {
                PhysicalParams::new(gamma, rho, alpha, beta).unwrap()
            })
    }

    proptest! {
        #[test]
        fn eigenvalues_strictly_decrease(p in arb_params_nonneg_coupling()) {
            let report = modal_report(&p, 64);
            for pair in report.eigenvalues.windows(2) {
                prop_assert!(pair[0].1 > pair[1].1);
            }
        }

        #[test]
        fn stability_flag_matches_dominant_sign(p in arb_params_nonneg_coupling()) {
            let report = modal_report(&p, 8);
            // margin > 0 and dominant < 0 coincide except exactly at zero
            prop_assert_eq!(report.stable, report.dominant < 0.0);
            prop_assert_eq!(report.stable, report.margin > 0.0);
        }

        #[test]
        fn eigenvalue_matches_coupling_gain_decomposition(
            p in arb_params_nonneg_coupling(),
            n in 0usize..32,
        ) {
            // lambda_n = -rho - (n pi)^2 + alpha * mu_n with mu_n the
            // cosine-mode gain of the elliptic response
            let k = n as f64 * PI;
            let expected = -p.rho - k * k + p.alpha * mode_gain(p.gamma, p.beta, n);
            let got = eigenvalue(&p, n);
            prop_assert!((got - expected).abs() <= 1e-12 * got.abs().max(1.0));
        }
    }
}
