use alloc::vec::Vec;

use super::{integrate, to_trajectory, IntegratorConfig, OdeError, OdeSystem, Stop, Trajectory};
use crate::field::CompiledField;

/// Normalized discriminants below this count as a collision of the two
/// branches.
pub const COLLISION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticDirection {
    /// Unit vector in the plane orthogonal to `N`.
    pub direction: [f64; 3],
    pub branch: u8,
    /// `b² − ac` of the form restricted to an orthonormal basis of the plane.
    pub discriminant: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticSet {
    pub directions: Vec<AsymptoticDirection>,
    /// The restricted form vanishes: every direction of the plane qualifies.
    pub all_directions: bool,
    pub discriminant: f64,
    /// Discriminant divided by `(|a| + |b| + |c|)²`.
    pub normalized_discriminant: f64,
    pub normal: [f64; 3],
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = dot(&a, &a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Orthonormal basis of the plane orthogonal to `n`.
fn plane_basis(n: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let nh = unit(*n);
    let k = (0..3)
        .min_by(|&i, &j| nh[i].abs().total_cmp(&nh[j].abs()))
        .unwrap_or(0);
    let mut axis = [0.0; 3];
    axis[k] = 1.0;
    let e1 = unit(cross(&nh, &axis));
    let e2 = cross(&nh, &e1);
    (e1, e2)
}

/// Directions `u ⟂ N` with `uᵀ M u = 0`, `M` the symmetrized Jacobian. Roots
/// of the restricted form `aα² + 2bαβ + cβ²` are taken in the cancellation
/// free form `q = b + sgn(b)√D`.
pub fn asymptotic_directions(f: &CompiledField, point: &[f64; 3]) -> Result<AsymptoticSet, OdeError> {
    let n = f.eval(point).map_err(|_| OdeError::UndefinedPlane)?;
    let nn = dot(&n, &n);
    if !(nn > 0.0) || !nn.is_finite() {
        return Err(OdeError::UndefinedPlane);
    }
    let jac = f.jacobian(point).map_err(|_| OdeError::UndefinedPlane)?;
    let m: [[f64; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| 0.5 * (jac[i][j] + jac[j][i])));
    let (e1, e2) = plane_basis(&n);
    let form = |u: &[f64; 3], v: &[f64; 3]| -> f64 {
        (0..3).map(|i| (0..3).map(|j| u[i] * m[i][j] * v[j]).sum::<f64>()).sum()
    };
    let (a, b, c) = (form(&e1, &e1), form(&e1, &e2), form(&e2, &e2));
    let d = b * b - a * c;
    let size = a.abs() + b.abs() + c.abs();
    let m_norm = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut out = AsymptoticSet {
        directions: Vec::new(),
        all_directions: false,
        discriminant: d,
        normalized_discriminant: if size > 0.0 { d / (size * size) } else { 0.0 },
        normal: n,
    };
    if size <= 1e-13 * m_norm || m_norm == 0.0 {
        out.all_directions = true;
        return Ok(out);
    }
    if d < 0.0 {
        return Ok(out);
    }
    let q = b + b.signum() * d.sqrt();
    let q = if b == 0.0 { d.sqrt() } else { q };
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    if q != 0.0 {
        pairs.push((-q, a));
        if d > 0.0 {
            pairs.push((c, -q));
        }
    } else if a == 0.0 {
        pairs.push((1.0, 0.0));
    } else {
        pairs.push((0.0, 1.0));
    }
    for (branch, (al, be)) in pairs.into_iter().enumerate() {
        let u = unit([
            al * e1[0] + be * e2[0],
            al * e1[1] + be * e2[1],
            al * e1[2] + be * e2[2],
        ]);
        out.directions.push(AsymptoticDirection {
            direction: u,
            branch: branch as u8,
            discriminant: d,
        });
    }
    Ok(out)
}

struct Continuation<'a> {
    f: &'a CompiledField,
    reference: [f64; 3],
}

impl Continuation<'_> {
    /// The asymptotic direction at `p` closest to the reference, with the
    /// reference's orientation.
    fn select(&self, p: &[f64; 3]) -> Result<[f64; 3], Stop> {
        let set = asymptotic_directions(self.f, p).map_err(|_| Stop::Singular)?;
        if set.all_directions {
            let n = unit(set.normal);
            let r = &self.reference;
            let k = dot(r, &n);
            return Ok(unit([r[0] - k * n[0], r[1] - k * n[1], r[2] - k * n[2]]));
        }
        let mut scored: Vec<(f64, [f64; 3])> = set
            .directions
            .iter()
            .map(|d| (dot(&d.direction, &self.reference), d.direction))
            .collect();
        if scored.is_empty() {
            return Err(Stop::BranchLoss);
        }
        scored.sort_by(|x, y| y.0.abs().total_cmp(&x.0.abs()));
        if scored.len() == 2
            && set.normalized_discriminant.abs() < COLLISION_TOLERANCE
            && (scored[0].0.abs() - scored[1].0.abs()).abs() < 1e-9
        {
            return Err(Stop::BranchLoss);
        }
        let (k, u) = scored[0];
        Ok(if k < 0.0 { [-u[0], -u[1], -u[2]] } else { u })
    }
}

impl OdeSystem<3> for Continuation<'_> {
    fn rhs(&mut self, y: &[f64; 3]) -> Result<[f64; 3], Stop> {
        self.select(y)
    }

    fn accept(&mut self, y: &[f64; 3]) -> Result<(), Stop> {
        self.reference = self.select(y)?;
        Ok(())
    }
}

/// Arc-length parametrized asymptotic line through `init`, leaving along the
/// asymptotic direction closest to `direction`. Integration stops with
/// `branch_loss` when no real direction remains or the two branches collide
/// with no way to tell them apart.
pub fn integrate_asymptotic(
    f: &CompiledField,
    init: [f64; 3],
    direction: [f64; 3],
    cfg: &IntegratorConfig,
) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    let len = dot(&direction, &direction).sqrt();
    if !(len > 0.0) || !len.is_finite() {
        return Err(OdeError::InvalidDirection);
    }
    let set = asymptotic_directions(f, &init)?;
    if set.directions.is_empty() && !set.all_directions {
        return Err(OdeError::NoDirection);
    }
    let mut sys = Continuation {
        f,
        reference: unit(direction),
    };
    sys.reference = sys.select(&init).map_err(|_| OdeError::NoDirection)?;
    let sol = integrate(&mut sys, init, cfg);
    let mut t = to_trajectory(sol, &["x", "y", "z"]);
    t.add_monitor("discriminant", |y| {
        asymptotic_directions(f, &[y[0], y[1], y[2]])
            .map(|s| s.discriminant)
            .unwrap_or(f64::NAN)
    });
    Ok(t)
}
