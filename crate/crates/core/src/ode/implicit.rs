use num_traits::Float;

use super::{IntegratorConfig, OdeError, Termination, Trajectory};
use crate::symcore::{CompiledExpr, ExprError, ParamValues, RationalExpr, Symbol};

/// A plane curve `F(x, y) = 0`, evaluated in the chart `z = 1`.
#[derive(Clone, Debug)]
pub struct ImplicitCurve {
    f: CompiledExpr,
    fx: CompiledExpr,
    fy: CompiledExpr,
}

impl ImplicitCurve {
    pub fn new(f: &RationalExpr, params: &ParamValues) -> Result<ImplicitCurve, ExprError> {
        Ok(ImplicitCurve {
            f: CompiledExpr::compile(f, params)?,
            fx: CompiledExpr::compile(&f.differentiate(&Symbol::x())?, params)?,
            fy: CompiledExpr::compile(&f.differentiate(&Symbol::y())?, params)?,
        })
    }

    pub fn value(&self, p: &[f64; 2]) -> Result<f64, ExprError> {
        self.f.eval(&[p[0], p[1], 1.0])
    }

    pub fn gradient(&self, p: &[f64; 2]) -> Result<[f64; 2], ExprError> {
        let pt = [p[0], p[1], 1.0];
        Ok([self.fx.eval(&pt)?, self.fy.eval(&pt)?])
    }

    /// Newton iterations along the gradient back onto the curve.
    fn project(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        let mut p = p;
        for _ in 0..8 {
            let v = self.value(&p).ok()?;
            let g = self.gradient(&p).ok()?;
            let gg = g[0] * g[0] + g[1] * g[1];
            if !(gg > 0.0) || !gg.is_finite() {
                return None;
            }
            let t = v / gg;
            p = [p[0] - t * g[0], p[1] - t * g[1]];
            if (t * gg.sqrt()).abs() < 1e-15 * (1.0 + p[0].abs() + p[1].abs()) {
                break;
            }
        }
        Some(p)
    }

    fn tangent(&self, p: &[f64; 2]) -> Option<[f64; 2]> {
        let g = self.gradient(p).ok()?;
        let n = (g[0] * g[0] + g[1] * g[1]).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        Some([-g[1] / n, g[0] / n])
    }
}

/// Predictor–corrector continuation of an implicit curve from `start`
/// (projected onto the curve first), heading along `direction`. Steps of
/// `cfg.step` are halved while the corrector fails or the tangent turns by
/// more than 0.1 rad. Stops when `stop` returns true, at `cfg.s_end` of arc
/// length, or where the gradient vanishes.
pub fn trace_implicit_curve<S: FnMut(&[f64; 2]) -> bool>(
    curve: &ImplicitCurve,
    start: [f64; 2],
    direction: [f64; 2],
    cfg: &IntegratorConfig,
    mut stop: S,
) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    let mut p = curve.project(start).ok_or(OdeError::UndefinedPlane)?;
    let mut t = curve.tangent(&p).ok_or(OdeError::UndefinedPlane)?;
    if t[0] * direction[0] + t[1] * direction[1] < 0.0 {
        t = [-t[0], -t[1]];
    }
    let mut out = Trajectory {
        columns: ["x", "y"].iter().map(|c| alloc::string::String::from(*c)).collect(),
        s: alloc::vec![0.0],
        states: alloc::vec![p.to_vec()],
        monitors: alloc::vec::Vec::new(),
        termination: Termination::Completed,
    };
    let mut s = 0.0;
    let mut steps = 0usize;
    let min_step = cfg.step * 1e-12;
    while s < cfg.s_end && !stop(&p) {
        if steps >= cfg.max_steps {
            out.termination = Termination::StepLimit;
            break;
        }
        steps += 1;
        let mut h = cfg.step.min(cfg.s_end - s);
        let accepted = loop {
            if h < min_step {
                break None;
            }
            let guess = [p[0] + h * t[0], p[1] + h * t[1]];
            if let Some(q) = curve.project(guess) {
                if let Some(tq) = curve.tangent(&q) {
                    let turn = t[0] * tq[0] + t[1] * tq[1];
                    let dist = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
                    if turn.abs() > 0.1.cos() && dist < 2.0 * h {
                        let tq = if turn < 0.0 { [-tq[0], -tq[1]] } else { tq };
                        break Some((q, tq, dist));
                    }
                }
            }
            h *= 0.5;
        };
        match accepted {
            Some((q, tq, dist)) => {
                p = q;
                t = tq;
                s += dist;
                out.s.push(s);
                out.states.push(p.to_vec());
            }
            None => {
                out.termination = Termination::SingularPoint;
                break;
            }
        }
    }
    out.add_monitor("residual", |y| curve.value(&[y[0], y[1]]).unwrap_or(f64::NAN));
    Ok(out)
}
