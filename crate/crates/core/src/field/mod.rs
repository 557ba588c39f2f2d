//! Vector fields `N = (P, Q, R)` read either as flows or as Pfaff forms
//! `P dx + Q dy + R dz`.
//!
//! Curl convention, used everywhere in the crate:
//! `curl N = (R_y - Q_z, P_z - R_x, Q_x - P_y)`.

mod catalog;

pub use catalog::{catalog, catalog_names, catalog_with, CatalogEntry};

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use num_rational::BigRational;

use crate::symcore::{
    CompiledExpr, ExprError, ParamValues, Polynomial, RationalExpr, Symbol,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("all three components vanish identically")]
    ZeroField,
    #[error("field vanishes at the point; tangent plane undefined")]
    UndefinedPlane,
    #[error("unknown catalog system `{0}`")]
    UnknownSystem(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
    #[error("`{param}` is not a parameter of `{system}`")]
    UnexpectedParameter { system: String, param: String },
    #[error("planar system must not mention `{0}`")]
    NotPlanar(Symbol),
    #[error("planar system has degree zero")]
    ConstantSystem,
}

/// Maps a compile-time missing-value error to the caller-facing parameter
/// error.
pub(crate) fn missing_param(e: ExprError) -> FieldError {
    match e {
        ExprError::Unassigned(s) => FieldError::MissingParameter(String::from(s.name())),
        other => FieldError::Expr(other),
    }
}

/// Three components `(P, Q, R)` over a shared symbol context.
#[derive(Clone, Debug)]
pub struct VectorField3 {
    c: [RationalExpr; 3],
}

impl VectorField3 {
    /// Field from components; rejects the identically zero triple.
    pub fn new(p: RationalExpr, q: RationalExpr, r: RationalExpr) -> Result<VectorField3, FieldError> {
        let f = VectorField3 { c: [p, q, r] };
        if f.is_identically_zero() {
            return Err(FieldError::ZeroField);
        }
        Ok(f)
    }

    /// No nonzero check; for derived fields such as a curl.
    pub(crate) fn raw(c: [RationalExpr; 3]) -> VectorField3 {
        VectorField3 { c }
    }

    pub fn from_polys(p: Polynomial, q: Polynomial, r: Polynomial) -> Result<VectorField3, FieldError> {
        VectorField3::new(p.into(), q.into(), r.into())
    }

    pub fn p(&self) -> &RationalExpr {
        &self.c[0]
    }

    pub fn q(&self) -> &RationalExpr {
        &self.c[1]
    }

    pub fn r(&self) -> &RationalExpr {
        &self.c[2]
    }

    pub fn components(&self) -> &[RationalExpr; 3] {
        &self.c
    }

    pub fn is_identically_zero(&self) -> bool {
        self.c.iter().all(RationalExpr::is_zero)
    }

    /// `jac[j][k] = ∂N_k/∂x_j`.
    pub fn jacobian(&self) -> Result<[[RationalExpr; 3]; 3], ExprError> {
        let base = Symbol::base();
        let mut out: [[RationalExpr; 3]; 3] = Default::default();
        for (j, v) in base.iter().enumerate() {
            for k in 0..3 {
                out[j][k] = self.c[k].differentiate(v)?;
            }
        }
        Ok(out)
    }

    /// `(R_y - Q_z, P_z - R_x, Q_x - P_y)`.
    pub fn curl(&self) -> Result<VectorField3, ExprError> {
        let [x, y, z] = Symbol::base();
        let (p, q, r) = (self.p(), self.q(), self.r());
        Ok(VectorField3::raw([
            r.differentiate(&y)?.checked_sub(&q.differentiate(&z)?)?,
            p.differentiate(&z)?.checked_sub(&r.differentiate(&x)?)?,
            q.differentiate(&x)?.checked_sub(&p.differentiate(&y)?)?,
        ]))
    }

    pub fn dot(&self, other: &VectorField3) -> Result<RationalExpr, ExprError> {
        let mut acc = RationalExpr::zero();
        for k in 0..3 {
            acc = acc.checked_add(&self.c[k].checked_mul(&other.c[k])?)?;
        }
        Ok(acc)
    }

    /// Object of holonomicity `(N, curl N)`; zero iff the form is integrable.
    pub fn holonomicity(&self) -> Result<RationalExpr, ExprError> {
        self.dot(&self.curl()?)
    }

    /// `(P_y - Q_x, Q_z - R_y, R_x - P_z)`; all zero iff the form is closed.
    pub fn exactness_residuals(&self) -> Result<[RationalExpr; 3], ExprError> {
        let [x, y, z] = Symbol::base();
        let (p, q, r) = (self.p(), self.q(), self.r());
        Ok([
            p.differentiate(&y)?.checked_sub(&q.differentiate(&x)?)?,
            q.differentiate(&z)?.checked_sub(&r.differentiate(&y)?)?,
            r.differentiate(&x)?.checked_sub(&p.differentiate(&z)?)?,
        ])
    }

    /// `xP + yQ + zR`; vanishes for projective extensions.
    pub fn euler_contraction(&self) -> Result<RationalExpr, ExprError> {
        let mut acc = RationalExpr::zero();
        for (k, s) in Symbol::base().into_iter().enumerate() {
            acc = acc.checked_add(&RationalExpr::var(s).checked_mul(&self.c[k])?)?;
        }
        Ok(acc)
    }

    /// `Δ = P² + Q² + R²`.
    pub fn magnitude_squared(&self) -> Result<RationalExpr, ExprError> {
        self.dot(self)
    }

    /// Replaces parameters by exact values.
    pub fn specialize(&self, values: &BTreeMap<Symbol, BigRational>) -> Result<VectorField3, FieldError> {
        let c = [
            self.c[0].specialize(values)?,
            self.c[1].specialize(values)?,
            self.c[2].specialize(values)?,
        ];
        VectorField3::new(c[0].clone(), c[1].clone(), c[2].clone())
    }

    /// Numeric evaluator with the given parameter values.
    pub fn compile(&self, params: &ParamValues) -> Result<CompiledField, FieldError> {
        let comp = |e: &RationalExpr| CompiledExpr::compile(e, params).map_err(missing_param);
        let jac = self.jacobian()?;
        let mut cj: [[CompiledExpr; 3]; 3] = Default::default();
        for j in 0..3 {
            for k in 0..3 {
                cj[j][k] = comp(&jac[j][k])?;
            }
        }
        Ok(CompiledField {
            c: [comp(&self.c[0])?, comp(&self.c[1])?, comp(&self.c[2])?],
            jac: cj,
        })
    }

    pub fn symbols(&self) -> alloc::vec::Vec<Symbol> {
        let mut out = alloc::vec::Vec::new();
        for e in &self.c {
            for s in e.symbols() {
                if let Err(k) = out.binary_search(&s) {
                    out.insert(k, s);
                }
            }
        }
        out
    }

    /// Parameters mentioned by any component.
    pub fn parameters(&self) -> alloc::vec::Vec<Symbol> {
        self.symbols().into_iter().filter(|s| !s.is_coordinate()).collect()
    }
}

impl fmt::Display for VectorField3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.c[0], self.c[1], self.c[2])
    }
}

/// Gradient of a scalar expression.
pub fn gradient(phi: &RationalExpr) -> Result<VectorField3, ExprError> {
    let [x, y, z] = Symbol::base();
    Ok(VectorField3::raw([
        phi.differentiate(&x)?,
        phi.differentiate(&y)?,
        phi.differentiate(&z)?,
    ]))
}

/// Field and Jacobian compiled for binary64 evaluation.
#[derive(Clone, Debug)]
pub struct CompiledField {
    c: [CompiledExpr; 3],
    jac: [[CompiledExpr; 3]; 3],
}

impl CompiledField {
    pub fn eval(&self, pt: &[f64; 3]) -> Result<[f64; 3], ExprError> {
        Ok([self.c[0].eval(pt)?, self.c[1].eval(pt)?, self.c[2].eval(pt)?])
    }

    /// `jac[j][k] = ∂N_k/∂x_j` at the point.
    pub fn jacobian(&self, pt: &[f64; 3]) -> Result<[[f64; 3]; 3], ExprError> {
        let mut out = [[0.0; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                out[j][k] = self.jac[j][k].eval(pt)?;
            }
        }
        Ok(out)
    }
}

/// Planar polynomial system `x' = p(x, y)`, `y' = q(x, y)`.
#[derive(Clone, Debug)]
pub struct PlanarPolySystem {
    p: Polynomial,
    q: Polynomial,
}

impl PlanarPolySystem {
    pub fn new(p: Polynomial, q: Polynomial) -> Result<PlanarPolySystem, FieldError> {
        for poly in [&p, &q] {
            if let Some(s) = poly
                .symbols()
                .into_iter()
                .find(|s| s.is_coordinate() && s.slot() >= Some(2))
            {
                return Err(FieldError::NotPlanar(s));
            }
        }
        let sys = PlanarPolySystem { p, q };
        if sys.degree() == 0 {
            return Err(FieldError::ConstantSystem);
        }
        Ok(sys)
    }

    pub fn p(&self) -> &Polynomial {
        &self.p
    }

    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    /// Maximum total degree in x and y (parameters do not count).
    pub fn degree(&self) -> u32 {
        let xy = [Symbol::x(), Symbol::y()];
        [&self.p, &self.q]
            .iter()
            .flat_map(|poly| {
                poly.terms().map(|(m, _)| xy.iter().map(|s| m.exponent(s)).sum::<u32>())
            })
            .max()
            .unwrap_or(0)
    }

    /// Homogenization of p and q in z to the system degree.
    pub fn homogenized(&self) -> Result<(Polynomial, Polynomial), ExprError> {
        let d = self.degree();
        Ok((homogenize_xy(&self.p, d)?, homogenize_xy(&self.q, d)?))
    }
}

/// Homogenizes in z counting only x, y degrees, so parameters stay put.
fn homogenize_xy(p: &Polynomial, d: u32) -> Result<Polynomial, ExprError> {
    let (x, y, z) = (Symbol::x(), Symbol::y(), Symbol::z());
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        let k = m.exponent(&x) + m.exponent(&y);
        let pad = crate::symcore::Monomial::from_powers([(z.clone(), d - k)])?;
        out = &out + &Polynomial::term(c.clone(), m.checked_mul(&pad)?);
    }
    Ok(out)
}

/// Pfaff form of the projectively extended planar system: with `P̃, Q̃` the
/// degree-d homogenizations, returns `(-z Q̃, z P̃, x Q̃ - y P̃)`.
pub fn projective_extension(s: &PlanarPolySystem) -> Result<VectorField3, FieldError> {
    let (ph, qh) = s.homogenized()?;
    let x = Polynomial::var(Symbol::x());
    let y = Polynomial::var(Symbol::y());
    let z = Polynomial::var(Symbol::z());
    let p = -&z.checked_mul(&qh)?;
    let q = z.checked_mul(&ph)?;
    let r = &x.checked_mul(&qh)? - &y.checked_mul(&ph)?;
    VectorField3::from_polys(p, q, r)
}

/// Plane `n · (X - base) = 0` through a point with normal `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneEquation {
    pub normal: [f64; 3],
    pub base: [f64; 3],
}

impl PlaneEquation {
    pub fn eval(&self, pt: &[f64; 3]) -> f64 {
        (0..3).map(|k| self.normal[k] * (pt[k] - self.base[k])).sum()
    }
}

/// Tangent plane of the Pfaff variety at a point.
pub fn tangent_plane(
    f: &VectorField3,
    point: [f64; 3],
    params: &ParamValues,
) -> Result<PlaneEquation, FieldError> {
    let mut normal = [0.0; 3];
    let mut scale = 0.0;
    for (k, c) in f.components().iter().enumerate() {
        let cp = CompiledExpr::compile(c, params).map_err(missing_param)?;
        normal[k] = cp.eval(&point)?;
        scale += normal[k].abs();
    }
    if scale == 0.0 || !scale.is_finite() {
        return Err(FieldError::UndefinedPlane);
    }
    Ok(PlaneEquation { normal, base: point })
}
