//! Explicit Runge–Kutta integration of autonomous systems, and the
//! trajectories of flows, geodesics, asymptotic lines and extended
//! geodesics built on it.
//!
//! `Rkf45` uses the classical Fehlberg 4(5) tableau. The difference of the
//! embedded pair controls the step and the fifth-order solution is carried
//! forward (local extrapolation).

mod asymptotic;
mod implicit;
mod systems;

pub use asymptotic::{
    asymptotic_directions, integrate_asymptotic, AsymptoticDirection, AsymptoticSet, COLLISION_TOLERANCE,
};
pub use implicit::{trace_implicit_curve, ImplicitCurve};
pub use systems::{
    add_base_deviation, integrate_extended, integrate_flow, integrate_geodesic, integrate_psi_covariant, integrate_psi_expanded,
    trajectory_states,
};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::GeometryError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Rk4,
    Rkf45,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::Rkf45 => "rkf45",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step for `Rk4`, initial step for `Rkf45`.
    pub step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub s_end: f64,
    /// Record samples only on this grid instead of at every step.
    pub output_step: Option<f64>,
}

impl IntegratorConfig {
    pub fn rk4(step: f64, s_end: f64) -> IntegratorConfig {
        IntegratorConfig {
            method: Method::Rk4,
            step,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_steps: 10_000_000,
            s_end,
            output_step: None,
        }
    }

    pub fn rkf45(tol: f64, s_end: f64) -> IntegratorConfig {
        IntegratorConfig {
            method: Method::Rkf45,
            step: 1e-3,
            rel_tol: tol,
            abs_tol: tol,
            max_steps: 10_000_000,
            s_end,
            output_step: None,
        }
    }

    pub fn with_output_step(mut self, h: f64) -> IntegratorConfig {
        self.output_step = Some(h);
        self
    }

    pub fn with_max_steps(mut self, n: usize) -> IntegratorConfig {
        self.max_steps = n;
        self
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.step) {
            return Err(OdeError::InvalidConfig("step must be positive"));
        }
        if self.method == Method::Rkf45 && !(positive(self.rel_tol) && positive(self.abs_tol)) {
            return Err(OdeError::InvalidConfig("tolerances must be positive"));
        }
        if self.max_steps == 0 {
            return Err(OdeError::InvalidConfig("max_steps must be at least 1"));
        }
        if !(self.s_end >= 0.0) || !self.s_end.is_finite() {
            return Err(OdeError::InvalidConfig("s_end must be finite and nonnegative"));
        }
        if let Some(h) = self.output_step {
            if !positive(h) {
                return Err(OdeError::InvalidConfig("output step must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("field vanishes at the point; tangent plane undefined")]
    UndefinedPlane,
    #[error("no real asymptotic direction at the initial point")]
    NoDirection,
    #[error("initial direction violates the Pfaff constraint")]
    InvalidDirection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    Completed,
    SingularPoint,
    StepLimit,
    BranchLoss,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::SingularPoint => "singular_point",
            Termination::StepLimit => "step_limit",
            Termination::BranchLoss => "branch_loss",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reason a right-hand side refuses to continue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    Singular,
    BranchLoss,
}

impl From<Stop> for Termination {
    fn from(s: Stop) -> Termination {
        match s {
            Stop::Singular => Termination::SingularPoint,
            Stop::BranchLoss => Termination::BranchLoss,
        }
    }
}

impl From<GeometryError> for Stop {
    fn from(_: GeometryError) -> Stop {
        Stop::Singular
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monitor {
    pub name: String,
    pub values: Vec<f64>,
}

/// Samples `(s, state)` with strictly increasing `s`, named monitor series of
/// the same length, and the reason integration stopped.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub columns: Vec<String>,
    pub s: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub monitors: Vec<Monitor>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[f64])> {
        Some((*self.s.last()?, self.states.last()?.as_slice()))
    }

    pub fn monitor(&self, name: &str) -> Option<&[f64]> {
        self.monitors.iter().find(|m| m.name == name).map(|m| m.values.as_slice())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.states.iter().map(|st| st[k]).collect())
    }

    pub fn add_monitor<F: FnMut(&[f64]) -> f64>(&mut self, name: &str, mut f: F) {
        let values = self.states.iter().map(|st| f(st)).collect();
        self.monitors.push(Monitor {
            name: String::from(name),
            values,
        });
    }
}

/// An autonomous system `y' = f(y)` with an optional hook run after every
/// accepted step.
pub trait OdeSystem<const N: usize> {
    fn rhs(&mut self, y: &[f64; N]) -> Result<[f64; N], Stop>;

    fn accept(&mut self, _y: &[f64; N]) -> Result<(), Stop> {
        Ok(())
    }
}

/// Adapts a closure to [`OdeSystem`].
pub struct FnSystem<F>(pub F);

impl<const N: usize, F: FnMut(&[f64; N]) -> Result<[f64; N], Stop>> OdeSystem<N> for FnSystem<F> {
    fn rhs(&mut self, y: &[f64; N]) -> Result<[f64; N], Stop> {
        (self.0)(y)
    }
}

/// Raw output of [`integrate`].
#[derive(Clone, Debug)]
pub struct Solution<const N: usize> {
    pub s: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub termination: Termination,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    core::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn finite<const N: usize>(y: &[f64; N]) -> Result<(), Stop> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Stop::Singular)
    }
}

fn checked<const N: usize, S: OdeSystem<N>>(sys: &mut S, y: &[f64; N]) -> Result<[f64; N], Stop> {
    let k = sys.rhs(y)?;
    finite(&k)?;
    Ok(k)
}

fn rk4_step<const N: usize, S: OdeSystem<N>>(sys: &mut S, y: &[f64; N], h: f64) -> Result<[f64; N], Stop> {
    let k1 = checked(sys, y)?;
    let k2 = checked(sys, &axpy(y, h, &[(0.5, &k1)]))?;
    let k3 = checked(sys, &axpy(y, h, &[(0.5, &k2)]))?;
    let k4 = checked(sys, &axpy(y, h, &[(1.0, &k3)]))?;
    Ok(axpy(y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)]))
}

/// One Fehlberg step: fifth-order solution and the error estimate vector.
fn rkf45_step<const N: usize, S: OdeSystem<N>>(
    sys: &mut S,
    y: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N]), Stop> {
    let k1 = checked(sys, y)?;
    let k2 = checked(sys, &axpy(y, h, &[(1.0 / 4.0, &k1)]))?;
    let k3 = checked(sys, &axpy(y, h, &[(3.0 / 32.0, &k1), (9.0 / 32.0, &k2)]))?;
    let k4 = checked(
        sys,
        &axpy(y, h, &[(1932.0 / 2197.0, &k1), (-7200.0 / 2197.0, &k2), (7296.0 / 2197.0, &k3)]),
    )?;
    let k5 = checked(
        sys,
        &axpy(
            y,
            h,
            &[(439.0 / 216.0, &k1), (-8.0, &k2), (3680.0 / 513.0, &k3), (-845.0 / 4104.0, &k4)],
        ),
    )?;
    let k6 = checked(
        sys,
        &axpy(
            y,
            h,
            &[
                (-8.0 / 27.0, &k1),
                (2.0, &k2),
                (-3544.0 / 2565.0, &k3),
                (1859.0 / 4104.0, &k4),
                (-11.0 / 40.0, &k5),
            ],
        ),
    )?;
    let y4 = axpy(
        y,
        h,
        &[(25.0 / 216.0, &k1), (1408.0 / 2565.0, &k3), (2197.0 / 4104.0, &k4), (-1.0 / 5.0, &k5)],
    );
    // fifth-order minus fourth-order weights
    let err = axpy(
        &[0.0; N],
        h,
        &[
            (16.0 / 135.0 - 25.0 / 216.0, &k1),
            (6656.0 / 12825.0 - 1408.0 / 2565.0, &k3),
            (28561.0 / 56430.0 - 2197.0 / 4104.0, &k4),
            (-9.0 / 50.0 + 1.0 / 5.0, &k5),
            (2.0 / 55.0, &k6),
        ],
    );
    Ok((core::array::from_fn(|i| y4[i] + err[i]), err))
}

/// Integrates from `s = 0` to `cfg.s_end`. Samples land exactly on the
/// output grid and on `s_end`.
pub fn integrate<const N: usize, S: OdeSystem<N>>(sys: &mut S, y0: [f64; N], cfg: &IntegratorConfig) -> Solution<N> {
    let mut out = Solution {
        s: alloc::vec![0.0],
        y: alloc::vec![y0],
        termination: Termination::Completed,
    };
    if let Err(stop) = finite(&y0).and_then(|_| checked(sys, &y0).map(|_| ())) {
        out.termination = stop.into();
        return out;
    }
    let mut s = 0.0;
    let mut y = y0;
    let mut h = cfg.step.min(cfg.s_end.max(f64::MIN_POSITIVE));
    let mut steps = 0usize;
    let mut k_out = 1usize;
    let next_stop = |k: usize| match cfg.output_step {
        Some(d) => (k as f64 * d).min(cfg.s_end),
        None => cfg.s_end,
    };
    while s < cfg.s_end {
        if steps >= cfg.max_steps {
            out.termination = Termination::StepLimit;
            return out;
        }
        let stop_at = next_stop(k_out);
        let mut hh = h.min(stop_at - s);
        let lands = hh == stop_at - s;
        let result = match cfg.method {
            Method::Rk4 => {
                hh = cfg.step.min(stop_at - s);
                rk4_step(sys, &y, hh).map(Some)
            }
            Method::Rkf45 => rkf45_step(sys, &y, hh).map(|(y5, err)| {
                let mut norm = 0.0f64;
                for i in 0..N {
                    let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y5[i].abs());
                    norm = norm.max((err[i] / sc).abs());
                }
                let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                if norm <= 1.0 {
                    h = if lands { h.max(hh * factor) } else { hh * factor };
                    Some(y5)
                } else {
                    h = hh * factor;
                    None
                }
            }),
        };
        steps += 1;
        match result {
            Err(stop) => {
                if cfg.method == Method::Rkf45 && stop == Stop::Singular && hh > 1e-12 * s.abs().max(1.0) {
                    // retry closer before declaring the point singular
                    h = hh * 0.25;
                    continue;
                }
                out.termination = stop.into();
                return out;
            }
            Ok(None) => {
                if h < 1e-13 * s.abs().max(1.0) {
                    out.termination = Termination::SingularPoint;
                    return out;
                }
            }
            Ok(Some(y_new)) => {
                let s_new = if hh == stop_at - s { stop_at } else { s + hh };
                if let Err(stop) = finite(&y_new).and_then(|_| sys.accept(&y_new)) {
                    out.termination = stop.into();
                    return out;
                }
                s = s_new;
                y = y_new;
                let on_grid = s == stop_at;
                if on_grid {
                    k_out += 1;
                }
                if cfg.output_step.is_none() || on_grid {
                    out.s.push(s);
                    out.y.push(y);
                }
            }
        }
    }
    out
}

pub(crate) fn to_trajectory<const N: usize>(sol: Solution<N>, columns: &[&str]) -> Trajectory {
    Trajectory {
        columns: columns.iter().map(|c| String::from(*c)).collect(),
        s: sol.s,
        states: sol.y.into_iter().map(|y| y.to_vec()).collect(),
        monitors: Vec::new(),
        termination: sol.termination,
    }
}
