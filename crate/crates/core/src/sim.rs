//! Closed-loop time integration. Diffusion and the linear reaction are
//! advanced implicitly by Crank-Nicolson; the elliptic coupling and the
//! boundary flux (control + disturbance, sampled once per step) enter
//! explicitly. The quasi-steady constraint is re-solved after every step,
//! so the recorded `v` is always slaved to the current `u`.
//!
//! Both Neumann conditions are imposed through ghost-node closures, which
//! keeps the scheme second order in space up to the boundary: at `x = 0`
//! the closure is `u_{-1} = u_1`, and at `x = 1` the prescribed flux adds
//! `2*(omega + d)/h` to the last row of the load.

use std::sync::Arc;

use crate::control::ControllerConfig;
use crate::disturbance::DisturbanceModel;
use crate::elliptic::{solve_thomas, EllipticSystem};
use crate::error::Error;
use crate::grid::{Field, Grid};
use crate::params::PhysicalParams;

/// Initial profile for the parabolic state. The elliptic field is always
/// derived from it; the constraint is algebraic, so an independent initial
/// `v` is not representable.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `amplitude * sin(pi x)`.
    SinPi { amplitude: f64 },
    /// `amplitude * cos(mode * pi * x)` — an eigenmode of the uncontrolled
    /// dynamics, handy as an integration oracle.
    CosineMode { mode: usize, amplitude: f64 },
    Constant { value: f64 },
    Tabulated { values: Vec<f64> },
}

impl InitialCondition {
    pub fn sample(&self, grid: &Arc<Grid>) -> Result<Field, Error> {
        match self {
            InitialCondition::SinPi { amplitude } => {
                let a = *amplitude;
                Field::from_fn(grid.clone(), |x| a * (std::f64::consts::PI * x).sin())
            }
            InitialCondition::CosineMode { mode, amplitude } => {
                let a = *amplitude;
                let k = *mode as f64 * std::f64::consts::PI;
                Field::from_fn(grid.clone(), |x| a * (k * x).cos())
            }
            InitialCondition::Constant { value } => Field::constant(grid.clone(), *value),
            InitialCondition::Tabulated { values } => Field::new(grid.clone(), values.clone()),
        }
    }
}

/// Fully resolved run description.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: PhysicalParams,
    pub grid: Arc<Grid>,
    pub dt: f64,
    pub t_final: f64,
    /// `None` runs open loop (`omega = 0`).
    pub controller: Option<ControllerConfig>,
    pub disturbance: DisturbanceModel,
    pub initial: InitialCondition,
    /// Record field snapshots every this many steps; 0 disables them.
    pub snapshot_stride: usize,
}

impl SimConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        params: PhysicalParams,
        grid: Arc<Grid>,
        dt: f64,
        t_final: f64,
        controller: Option<ControllerConfig>,
        disturbance: DisturbanceModel,
        initial: InitialCondition,
        snapshot_stride: usize,
    ) -> Result<Self, Error> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidConfig {
                field: "dt",
                message: format!("must be positive and finite, got {dt}"),
            });
        }
        if !t_final.is_finite() || t_final <= 0.0 {
            return Err(Error::InvalidConfig {
                field: "t_final",
                message: format!("must be positive and finite, got {t_final}"),
            });
        }
        if dt > t_final {
            return Err(Error::InvalidConfig {
                field: "dt",
                message: format!("dt = {dt} exceeds t_final = {t_final}"),
            });
        }
        // The coupling and boundary terms are integrated explicitly; their
        // rates must stay well inside the step.
        let explicit_rate = params.rho.abs().max(params.coupling_gain().abs());
        if dt * explicit_rate > 0.5 {
            return Err(Error::InvalidConfig {
                field: "dt",
                message: format!(
                    "explicit-part stability guard violated: dt * max(|rho|, |alpha*beta|/gamma) = {} > 0.5",
                    dt * explicit_rate
                ),
            });
        }
        if let Some(ctrl) = &controller {
            ctrl.psi
                .samples()
                .check_same_grid(&Field::zeros(grid.clone()))
                .map_err(|_| Error::InvalidConfig {
                    field: "controller.psi",
                    message: "test function sampled on a different grid".to_string(),
                })?;
        }
        disturbance.validate()?;
        if let InitialCondition::Tabulated { values } = &initial {
            if values.len() != grid.node_count() {
                return Err(Error::InvalidConfig {
                    field: "initial.values",
                    message: format!(
                        "expected {} nodal values, got {}",
                        grid.node_count(),
                        values.len()
                    ),
                });
            }
        }
        initial.sample(&grid).map_err(|_| Error::InvalidConfig {
            field: "initial",
            message: "initial profile must be finite".to_string(),
        })?;
        Ok(Self {
            params,
            grid,
            dt,
            t_final,
            controller,
            disturbance,
            initial,
            snapshot_stride,
        })
    }

    /// Number of time steps a run performs.
    pub fn step_count(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }
}

/// State of the march at one time level.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u: Field,
    /// Quasi-steady response to `u`, re-solved every step.
    pub v: Field,
    /// Control applied over the step that produced this state.
    pub omega: f64,
    /// Disturbance applied over that step.
    pub d: f64,
    /// Sliding value of the current `u` (0 when running open loop).
    pub s: f64,
}

/// Per-step inputs, sampled at the start of the step and held constant
/// across it.
#[derive(Debug, Clone, Copy)]
pub struct StepInputs {
    pub omega: f64,
    pub d: f64,
    pub sliding: f64,
    pub remainder: Option<f64>,
}

/// Stored fields at one recorded time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub u: Field,
    pub v: Field,
}

/// Time series recorded by a run: one row per recorded sample, plus
/// optional field snapshots and the configuration that produced it.
#[derive(Debug, Clone)]
pub struct SimTrace {
    pub times: Vec<f64>,
    pub sliding: Vec<f64>,
    pub control: Vec<f64>,
    pub disturbance: Vec<f64>,
    pub norm_u_l2: Vec<f64>,
    pub norm_v_l2: Vec<f64>,
    pub norm_u_h1: Vec<f64>,
    /// Drift term per row; `Some` exactly when a controller was active.
    pub remainder: Option<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    pub config: SimConfig,
}

impl SimTrace {
    pub fn empty(config: SimConfig) -> Self {
        let remainder = config.controller.as_ref().map(|_| Vec::new());
        Self {
            times: Vec::new(),
            sliding: Vec::new(),
            control: Vec::new(),
            disturbance: Vec::new(),
            norm_u_l2: Vec::new(),
            norm_v_l2: Vec::new(),
            norm_u_h1: Vec::new(),
            remainder,
            snapshots: Vec::new(),
            config,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn record(&mut self, state: &SimState, inputs: &StepInputs) {
        self.times.push(state.t);
        self.sliding.push(inputs.sliding);
        self.control.push(inputs.omega);
        self.disturbance.push(inputs.d);
        self.norm_u_l2.push(state.u.l2_norm());
        self.norm_v_l2.push(state.v.l2_norm());
        self.norm_u_h1.push(state.u.h1_norm());
        if let (Some(series), Some(r)) = (self.remainder.as_mut(), inputs.remainder) {
            series.push(r);
        }
    }
}

/// Precomputed operators for one configuration. A single march is
/// sequential; independent simulators may run concurrently.
#[derive(Debug)]
pub struct Simulator {
    config: SimConfig,
    elliptic: EllipticSystem,
    cn_lower: Vec<f64>,
    cn_diag: Vec<f64>,
    cn_upper: Vec<f64>,
}

impl Simulator {
    pub fn new(config: &SimConfig) -> Result<Self, Error> {
        let grid = &config.grid;
        let n = grid.intervals();
        let h = grid.spacing();
        let dt = config.dt;
        let rho = config.params.rho;
        let inv_h2 = 1.0 / (h * h);

        // Crank-Nicolson left-hand matrix I - (dt/2)(D2 - rho*I) with the
        // ghost-node Neumann closure folded into the boundary rows.
        let diag_value = 1.0 + dt * inv_h2 + 0.5 * dt * rho;
        let cn_diag = vec![diag_value; n + 1];
        let mut cn_lower = vec![-0.5 * dt * inv_h2; n + 1];
        let mut cn_upper = vec![-0.5 * dt * inv_h2; n + 1];
        cn_lower[0] = 0.0;
        cn_upper[n] = 0.0;
        cn_upper[0] = -dt * inv_h2;
        cn_lower[n] = -dt * inv_h2;

        let elliptic = EllipticSystem::assemble(grid.clone(), config.params.gamma)?;
        Ok(Self {
            config: config.clone(),
            elliptic,
            cn_lower,
            cn_diag,
            cn_upper,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn elliptic(&self) -> &EllipticSystem {
        &self.elliptic
    }

    /// State at `t = 0`; the elliptic field is derived from the initial
    /// profile.
    pub fn initial_state(&self) -> Result<SimState, Error> {
        let u = self.config.initial.sample(&self.config.grid)?;
        let v = self.elliptic.response(&u, self.config.params.beta)?;
        let s = match &self.config.controller {
            Some(ctrl) => ctrl.psi.sliding_value(&u)?,
            None => 0.0,
        };
        Ok(SimState {
            t: 0.0,
            u,
            v,
            omega: 0.0,
            d: 0.0,
            s,
        })
    }

    /// Control and disturbance sampled at the state's time, held constant
    /// over the following step.
    pub fn control_inputs(&self, state: &SimState) -> Result<StepInputs, Error> {
        let d = self.config.disturbance.evaluate(state.t)?;
        Ok(match &self.config.controller {
            Some(ctrl) => {
                let sample = ctrl.output(&self.config.params, &state.u, &state.v)?;
                StepInputs {
                    omega: sample.omega,
                    d,
                    sliding: sample.sliding_value,
                    remainder: Some(sample.remainder),
                }
            }
            None => StepInputs {
                omega: 0.0,
                d,
                sliding: 0.0,
                remainder: None,
            },
        })
    }

    /// One Crank-Nicolson step with the explicit load held at its
    /// start-of-step values; `t_next` is the time label of the new state.
    pub fn advance(
        &self,
        state: &SimState,
        inputs: &StepInputs,
        t_next: f64,
    ) -> Result<SimState, Error> {
        let grid = &self.config.grid;
        let n = grid.intervals();
        let h = grid.spacing();
        let dt = self.config.dt;
        let rho = self.config.params.rho;
        let alpha = self.config.params.alpha;
        let inv_h2 = 1.0 / (h * h);

        let u = state.u.values();
        let v = state.v.values();

        // rhs = (I + (dt/2)(D2 - rho*I)) u + dt * (alpha*v + flux)
        let diag_rhs = 1.0 - dt * inv_h2 - 0.5 * dt * rho;
        let off = 0.5 * dt * inv_h2;
        let mut rhs = vec![0.0; n + 1];
        rhs[0] = diag_rhs * u[0] + 2.0 * off * u[1] + dt * alpha * v[0];
        for i in 1..n {
            rhs[i] = off * u[i - 1] + diag_rhs * u[i] + off * u[i + 1] + dt * alpha * v[i];
        }
        let flux = 2.0 * (inputs.omega + inputs.d) / h;
        rhs[n] = 2.0 * off * u[n - 1] + diag_rhs * u[n] + dt * alpha * v[n] + dt * flux;

        let new_values = solve_thomas(&self.cn_lower, &self.cn_diag, &self.cn_upper, &rhs);
        if !new_values.iter().all(|x| x.is_finite()) {
            return Err(Error::Diverged {
                time: t_next,
                partial: None,
            });
        }
        let u_new = Field::new(grid.clone(), new_values)?;
        let v_new = self
            .elliptic
            .response(&u_new, self.config.params.beta)
            .map_err(|_| Error::Diverged {
                time: t_next,
                partial: None,
            })?;
        let s = match &self.config.controller {
            Some(ctrl) => ctrl.psi.sliding_value(&u_new)?,
            None => 0.0,
        };
        Ok(SimState {
            t: t_next,
            u: u_new,
            v: v_new,
            omega: inputs.omega,
            d: inputs.d,
            s,
        })
    }

    /// Samples the inputs at the state's time and advances one step.
    pub fn step(&self, state: &SimState) -> Result<SimState, Error> {
        let inputs = self.control_inputs(state)?;
        self.advance(state, &inputs, state.t + self.config.dt)
    }
}

/// Integrates the configuration from `t = 0` to `t_final`, recording one
/// row per time level (including the initial one). On divergence the
/// partial trace is attached to the error.
pub fn run(config: &SimConfig) -> Result<SimTrace, Error> {
    let sim = Simulator::new(config)?;
    let steps = config.step_count();
    let dt = config.dt;
    let mut state = sim.initial_state()?;
    let mut trace = SimTrace::empty(config.clone());

    for k in 0..=steps {
        let inputs = sim.control_inputs(&state)?;
        trace.record(&state, &inputs);
        if config.snapshot_stride > 0 && k % config.snapshot_stride == 0 {
            trace.snapshots.push(Snapshot {
                t: state.t,
                u: state.u.clone(),
                v: state.v.clone(),
            });
        }
        if k == steps {
            break;
        }
        match sim.advance(&state, &inputs, (k + 1) as f64 * dt) {
            Ok(next) => state = next,
            Err(Error::Diverged { time, .. }) => {
                return Err(Error::Diverged {
                    time,
                    partial: Some(Box::new(trace)),
                })
            }
            Err(other) => return Err(other),
        }
    }
    Ok(trace)
}

/// First recorded time `t_r` with `|s(t)| <= band` for every recorded
/// `t >= t_r`; `None` when the series still leaves the band at the end.
pub fn detect_reaching(trace: &SimTrace, band: f64) -> Option<f64> {
    assert!(band > 0.0, "reaching band must be positive");
    if trace.is_empty() {
        return None;
    }
    match trace.sliding.iter().rposition(|s| s.abs() > band) {
        None => Some(trace.times[0]),
        Some(i) if i + 1 < trace.sliding.len() => Some(trace.times[i + 1]),
        Some(_) => None,
    }
}
