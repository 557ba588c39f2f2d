use alloc::vec::Vec;

use super::{integrate, to_trajectory, FnSystem, IntegratorConfig, OdeError, Stop, Termination, Trajectory};
use crate::extension::{covariant_psi_rate, jacobi_matrices, transport_rhs, CompiledMetric6};
use crate::field::CompiledField;
use crate::geometry::{geodesic_rhs, CompiledConnection};

const FLOW_COLUMNS: [&str; 3] = ["x", "y", "z"];
const GEODESIC_COLUMNS: [&str; 6] = ["x", "y", "z", "dx", "dy", "dz"];
const EXTENDED_COLUMNS: [&str; 12] = [
    "x", "y", "z", "psi1", "psi2", "psi3", "dx", "dy", "dz", "dpsi1", "dpsi2", "dpsi3",
];
const PSI_COLUMNS: [&str; 12] = [
    "x", "y", "z", "dx", "dy", "dz", "psi1", "psi2", "psi3", "dpsi1", "dpsi2", "dpsi3",
];

fn split3(y: &[f64]) -> ([f64; 3], [f64; 3]) {
    ([y[0], y[1], y[2]], [y[3], y[4], y[5]])
}

/// Integral curve of `ẋ = N(x)`.
pub fn integrate_flow(f: &CompiledField, init: [f64; 3], cfg: &IntegratorConfig) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    let mut sys = FnSystem(|y: &[f64; 3]| f.eval(y).map_err(|_| Stop::Singular));
    Ok(to_trajectory(integrate(&mut sys, init, cfg), &FLOW_COLUMNS))
}

/// Geodesic of the connection from `(pos, vel)`, monitored by the
/// contraction `N · ẋ`, which the equation conserves.
pub fn integrate_geodesic(
    c: &CompiledConnection,
    pos: [f64; 3],
    vel: [f64; 3],
    cfg: &IntegratorConfig,
) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    c.checked_field(&pos)?;
    let mut sys = FnSystem(|y: &[f64; 6]| {
        let (p, v) = split3(y);
        let a = geodesic_rhs(c, &p, &v)?;
        Ok([v[0], v[1], v[2], a[0], a[1], a[2]])
    });
    let y0 = [pos[0], pos[1], pos[2], vel[0], vel[1], vel[2]];
    let mut t = to_trajectory(integrate(&mut sys, y0, cfg), &GEODESIC_COLUMNS);
    t.add_monitor("pfaff_contraction", |y| {
        let (p, v) = split3(y);
        match c.checked_field(&p) {
            Ok(n) => n[0] * v[0] + n[1] * v[1] + n[2] * v[2],
            Err(_) => f64::NAN,
        }
    });
    Ok(t)
}

/// Geodesic of the six-dimensional metric, monitored by `g(q̇, q̇)`.
pub fn integrate_extended(
    m: &CompiledMetric6,
    q: [f64; 6],
    v: [f64; 6],
    cfg: &IntegratorConfig,
) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    m.metric_at(&q)?;
    let mut sys = FnSystem(|y: &[f64; 12]| {
        let q: [f64; 6] = core::array::from_fn(|k| y[k]);
        let v: [f64; 6] = core::array::from_fn(|k| y[6 + k]);
        let a = m.acceleration(&q, &v)?;
        Ok(core::array::from_fn(|k| if k < 6 { v[k] } else { a[k - 6] }))
    });
    let y0 = core::array::from_fn(|k| if k < 6 { q[k] } else { v[k - 6] });
    let mut t = to_trajectory(integrate(&mut sys, y0, cfg), &EXTENDED_COLUMNS);
    t.add_monitor("metric_norm", |y| {
        let q: [f64; 6] = core::array::from_fn(|k| y[k]);
        let v: [f64; 6] = core::array::from_fn(|k| y[6 + k]);
        m.norm(&q, &v).unwrap_or(f64::NAN)
    });
    Ok(t)
}

fn require_derivatives(c: &CompiledConnection) {
    assert!(c.has_derivatives(), "connection compiled without derivatives");
}

/// Base geodesic together with the covariant transport of `Ψ`, carried as
/// `(Ψ, δΨ/ds)`. The output columns hold `Ψ̇`, converted back from `δΨ/ds`.
///
/// # Panics
/// If `c` was compiled without derivatives.
pub fn integrate_psi_covariant(
    c: &CompiledConnection,
    pos: [f64; 3],
    vel: [f64; 3],
    psi: [f64; 3],
    psi_dot: [f64; 3],
    cfg: &IntegratorConfig,
) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    require_derivatives(c);
    let jet0 = c.jet(&pos)?;
    let phi0 = covariant_psi_rate(&jet0, &vel, &psi, &psi_dot);
    let mut sys = FnSystem(|y: &[f64; 12]| {
        let (p, v) = split3(&y[..6]);
        let (psi, phi) = split3(&y[6..]);
        let jet = c.jet(&p)?;
        let a = geodesic_rhs(c, &p, &v)?;
        let (dpsi, dphi) = transport_rhs(&jet, &v, &psi, &phi);
        Ok(stack(&v, &a, &dpsi, &dphi))
    });
    let sol = integrate(&mut sys, stack(&pos, &vel, &psi, &phi0), cfg);
    let mut t = to_trajectory(sol, &PSI_COLUMNS);
    for y in t.states.iter_mut() {
        let (p, v) = split3(&y[..6]);
        let (psi, phi) = split3(&y[6..]);
        if let Ok(jet) = c.jet(&p) {
            let (dpsi, _) = transport_rhs(&jet, &v, &psi, &phi);
            y[9..12].copy_from_slice(&dpsi);
        }
    }
    Ok(t)
}

/// Base geodesic together with `Ψ̈ + A Ψ̇ + B Ψ = 0`.
///
/// # Panics
/// If `c` was compiled without derivatives.
pub fn integrate_psi_expanded(
    c: &CompiledConnection,
    pos: [f64; 3],
    vel: [f64; 3],
    psi: [f64; 3],
    psi_dot: [f64; 3],
    cfg: &IntegratorConfig,
) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    require_derivatives(c);
    c.checked_field(&pos)?;
    let mut sys = FnSystem(|y: &[f64; 12]| {
        let (p, v) = split3(&y[..6]);
        let (psi, dpsi) = split3(&y[6..]);
        let jet = c.jet(&p)?;
        let acc = geodesic_rhs(c, &p, &v)?;
        let (a, b) = jacobi_matrices(&jet, &v);
        let ddpsi: [f64; 3] =
            core::array::from_fn(|k| -(0..3).map(|l| a[k][l] * dpsi[l] + b[k][l] * psi[l]).sum::<f64>());
        Ok(stack(&v, &acc, &dpsi, &ddpsi))
    });
    let sol = integrate(&mut sys, stack(&pos, &vel, &psi, &psi_dot), cfg);
    Ok(to_trajectory(sol, &PSI_COLUMNS))
}

fn stack(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3], d: &[f64; 3]) -> [f64; 12] {
    core::array::from_fn(|k| match k / 3 {
        0 => a[k],
        1 => b[k - 3],
        2 => c[k - 6],
        _ => d[k - 9],
    })
}

/// `(s, position, velocity)` samples of a trajectory whose first six
/// columns are position and velocity.
pub fn trajectory_states(t: &Trajectory) -> Vec<(f64, [f64; 3], [f64; 3])> {
    t.s.iter()
        .zip(&t.states)
        .map(|(s, y)| {
            let (p, v) = split3(y);
            (*s, p, v)
        })
        .collect()
}

/// Adds the monitor `base_deviation`: the distance between the base part of
/// an extended geodesic and the geodesic of the connection integrated
/// separately over the same sample grid.
pub fn add_base_deviation(t: &mut Trajectory, c: &CompiledConnection, cfg: &IntegratorConfig) -> Result<(), OdeError> {
    let mut values = Vec::with_capacity(t.len());
    let first = match t.states.first() {
        Some(y) => y.clone(),
        None => return Ok(()),
    };
    let mut state = [first[0], first[1], first[2], first[6], first[7], first[8]];
    values.push(0.0);
    for w in 1..t.len() {
        let ds = t.s[w] - t.s[w - 1];
        let leg = IntegratorConfig {
            s_end: ds,
            step: cfg.step.min(ds),
            output_step: None,
            ..*cfg
        };
        let g = integrate_geodesic(c, [state[0], state[1], state[2]], [state[3], state[4], state[5]], &leg)?;
        if g.termination != Termination::Completed {
            values.resize(t.len(), f64::NAN);
            break;
        }
        let (_, end) = g.last().expect("nonempty");
        state = core::array::from_fn(|k| end[k]);
        let y = &t.states[w];
        let d = (0..3).map(|k| (y[k] - state[k]).powi(2)).sum::<f64>().sqrt();
        values.push(d);
    }
    t.monitors.push(super::Monitor {
        name: alloc::string::String::from("base_deviation"),
        values,
    });
    Ok(())
}
