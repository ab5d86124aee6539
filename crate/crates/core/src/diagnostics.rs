//! Post-processing of recorded traces: log-linear rate fits for
//! growth/decay exponents and an audit that checks the finite-time
//! reaching certificate against measured quantities.

use crate::control::{gain_certificate, GainCertificate};
use crate::error::Error;
use crate::sim::{detect_reaching, SimTrace};

/// Which recorded series an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSeries {
    Sliding,
    Control,
    Disturbance,
    NormUL2,
    NormVL2,
    NormUH1,
}

impl TraceSeries {
    pub fn name(&self) -> &'static str {
        match self {
            TraceSeries::Sliding => "s",
            TraceSeries::Control => "omega",
            TraceSeries::Disturbance => "d",
            TraceSeries::NormUL2 => "norm_u_l2",
            TraceSeries::NormVL2 => "norm_v_l2",
            TraceSeries::NormUH1 => "norm_u_h1",
        }
    }

    fn values<'a>(&self, trace: &'a SimTrace) -> &'a [f64] {
        match self {
            TraceSeries::Sliding => &trace.sliding,
            TraceSeries::Control => &trace.control,
            TraceSeries::Disturbance => &trace.disturbance,
            TraceSeries::NormUL2 => &trace.norm_u_l2,
            TraceSeries::NormVL2 => &trace.norm_v_l2,
            TraceSeries::NormUH1 => &trace.norm_u_h1,
        }
    }
}

/// Result of a log-linear least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Fitted exponent of `series ~ C * exp(rate * t)`.
    pub rate: f64,
    pub window: (f64, f64),
    /// RMS residual of the fit in log space.
    pub residual: f64,
    pub series: TraceSeries,
}

/// Least-squares slope of `log(series)` against `t` over the window
/// (inclusive, with a tiny tolerance since times are step multiples).
/// Errors when the window contains non-positive values or fewer than two
/// samples.
pub fn fit_rate(
    trace: &SimTrace,
    series: TraceSeries,
    window: (f64, f64),
) -> Result<RateFit, Error> {
    let (t0, t1) = window;
    if !(t0.is_finite() && t1.is_finite()) || t0 >= t1 {
        return Err(Error::Unfittable {
            reason: format!("window ({t0}, {t1}) is empty or non-finite"),
        });
    }
    let tol = 1e-9 * t1.abs().max(1.0);
    let values = series.values(trace);
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (&t, &y) in trace.times.iter().zip(values) {
        if t < t0 - tol || t > t1 + tol {
            continue;
        }
        if y <= 0.0 {
            return Err(Error::Unfittable {
                reason: format!("series {} is non-positive at t = {t}", series.name()),
            });
        }
        ts.push(t);
        logs.push(y.ln());
    }
    if ts.len() < 2 {
        return Err(Error::Unfittable {
            reason: format!(
                "window ({t0}, {t1}) contains {} sample(s); need at least 2",
                ts.len()
            ),
        });
    }
    let n = ts.len() as f64;
    let t_mean = ts.iter().sum::<f64>() / n;
    let z_mean = logs.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (&t, &z) in ts.iter().zip(&logs) {
        cov += (t - t_mean) * (z - z_mean);
        var += (t - t_mean) * (t - t_mean);
    }
    let rate = cov / var;
    let intercept = z_mean - rate * t_mean;
    let ss: f64 = ts
        .iter()
        .zip(&logs)
        .map(|(&t, &z)| {
            let r = z - (intercept + rate * t);
            r * r
        })
        .sum();
    Ok(RateFit {
        rate,
        window,
        residual: (ss / n).sqrt(),
        series,
    })
}

/// Bounds the audit is run against: the controller gain, the boundary
/// value of the test function and the certified disturbance bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateInputs {
    pub gain: f64,
    pub psi_boundary: f64,
    pub d_max: f64,
}

/// Outcome of auditing a closed-loop trace against the reaching
/// certificate with the measured drift bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditReport {
    /// Measured `sup |R(t)|` along the trajectory.
    pub r_max: f64,
    /// Number of drift samples the supremum was taken over.
    pub samples: usize,
    /// Certificate evaluated with the measured drift bound.
    pub certificate: GainCertificate,
    /// Width used for reaching detection:
    /// `boundary_layer * |psi(1)| + 5 * dt * (K + d_max)`.
    pub band: f64,
    pub reaching_time: Option<f64>,
    /// `reaching_time <= 1.05 * settling_bound`; `None` when the
    /// certificate is unsatisfied or reaching was not detected.
    pub reaching_within_bound: Option<bool>,
}

/// Audits a trace: measures the drift bound, evaluates the certificate
/// and compares the detected reaching time against the settling bound.
/// The drift series is taken from the trace when recorded, otherwise
/// recomputed from field snapshots.
pub fn audit_certificate(trace: &SimTrace, inputs: CertificateInputs) -> Result<AuditReport, Error> {
    let controller = trace
        .config
        .controller
        .as_ref()
        .ok_or(Error::InsufficientTrace)?;
    if trace.len() < 2 {
        return Err(Error::InsufficientTrace);
    }

    let drift: Vec<f64> = match &trace.remainder {
        Some(series) if !series.is_empty() => series.clone(),
        _ => {
            if trace.snapshots.is_empty() {
                return Err(Error::InsufficientTrace);
            }
            let alpha = trace.config.params.alpha;
            let mut recomputed = Vec::with_capacity(trace.snapshots.len());
            for snap in &trace.snapshots {
                recomputed.push(controller.psi.remainder(&snap.u, &snap.v, alpha)?);
            }
            recomputed
        }
    };
    let r_max = drift.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let s0 = trace.sliding[0];
    let certificate = gain_certificate(inputs.gain, inputs.psi_boundary, inputs.d_max, r_max, s0);

    let dt = trace.times[1] - trace.times[0];
    let eps = controller.sign_mode.boundary_layer();
    let band = eps * inputs.psi_boundary.abs() + 5.0 * dt * (inputs.gain + inputs.d_max);
    let reaching_time = detect_reaching(trace, band);
    let reaching_within_bound = match (certificate.satisfied, reaching_time) {
        (true, Some(t_r)) => Some(t_r <= 1.05 * certificate.settling_bound),
        _ => None,
    };
    Ok(AuditReport {
        r_max,
        samples: drift.len(),
        certificate,
        band,
        reaching_time,
        reaching_within_bound,
    })
}
