//! The affine connection `Π^i_jk = N^i S_jk / Δ` of a Pfaff form, where
//! `S` is the symmetrized Jacobian of `N` and `Δ = P² + Q² + R²`, together
//! with its curvature, the asymptotic and curvature-line forms and the
//! Chern–Simons density.
//!
//! Index conventions (0-based in code):
//!
//! - `pi[i][j][k] = Π^i_jk`, symmetric in `j, k`;
//! - `riem[l][k][j][i] = ∂_j Π^l_ik − ∂_i Π^l_jk + Π^l_jm Π^m_ik − Π^l_im Π^m_jk`;
//! - `ricci[k][i] = Σ_l riem[l][k][l][i]`.

mod chern_simons;
mod lorenz_lines;
mod numeric;

pub use chern_simons::{
    chern_simons_density, chern_simons_numeric, lorenz_cs_parts, lorenz_cs_reference, CsMode,
};
pub use lorenz_lines::{lorenz_conic_residual, lorenz_line_coefficients, lorenz_singular_conic};
pub use numeric::{geodesic_rhs, geodesic_rhs_pfaff, CompiledConnection, ConnectionJet};

use crate::field::{FieldError, VectorField3};
use crate::symcore::{ExprError, ParamValues, RationalExpr, Symbol};

pub type Tensor3<T> = [[[T; 3]; 3]; 3];
pub type Tensor4<T> = [[[[T; 3]; 3]; 3]; 3];
pub type Matrix3<T> = [[T; 3]; 3];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("P² + Q² + R² vanishes identically")]
    DegenerateField,
    #[error("P² + Q² + R² vanishes at the point")]
    Singular,
}

/// Symmetrized Jacobian `S_jk = (∂_j N_k + ∂_k N_j) / 2`.
pub fn symmetric_jacobian(f: &VectorField3) -> Result<Matrix3<RationalExpr>, ExprError> {
    let jac = f.jacobian()?;
    let half = RationalExpr::fraction(1, 2);
    let mut s: Matrix3<RationalExpr> = Default::default();
    for j in 0..3 {
        for k in j..3 {
            s[j][k] = if j == k {
                jac[j][j].clone()
            } else {
                jac[j][k].checked_add(&jac[k][j])?.checked_mul(&half)?
            };
            s[k][j] = s[j][k].clone();
        }
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct Connection3 {
    field: VectorField3,
    delta: RationalExpr,
    pi: Tensor3<RationalExpr>,
}

pub fn build_connection(f: &VectorField3) -> Result<Connection3, GeometryError> {
    let delta = f.magnitude_squared()?;
    if delta.is_zero() {
        return Err(GeometryError::DegenerateField);
    }
    let inv = delta.recip()?;
    let s = symmetric_jacobian(f)?;
    let mut pi: Tensor3<RationalExpr> = Default::default();
    for i in 0..3 {
        let scaled = f.components()[i].checked_mul(&inv)?;
        for j in 0..3 {
            for k in j..3 {
                pi[i][j][k] = scaled.checked_mul(&s[j][k])?;
                pi[i][k][j] = pi[i][j][k].clone();
            }
        }
    }
    Ok(Connection3 {
        field: f.clone(),
        delta,
        pi,
    })
}

impl Connection3 {
    pub fn field(&self) -> &VectorField3 {
        &self.field
    }

    pub fn delta(&self) -> &RationalExpr {
        &self.delta
    }

    pub fn pi(&self) -> &Tensor3<RationalExpr> {
        &self.pi
    }

    pub fn nonzero_count(&self) -> usize {
        let mut n = 0;
        for i in 0..3 {
            for j in 0..3 {
                for k in j..3 {
                    if !self.pi[i][j][k].is_zero() {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    /// `dpi[n][i][j][k] = ∂_n Π^i_jk`.
    pub fn derivatives(&self) -> Result<Tensor4<RationalExpr>, ExprError> {
        let mut d: Tensor4<RationalExpr> = Default::default();
        for (n, v) in Symbol::base().iter().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    for k in j..3 {
                        d[n][i][j][k] = self.pi[i][j][k].differentiate(v)?;
                        d[n][i][k][j] = d[n][i][j][k].clone();
                    }
                }
            }
        }
        Ok(d)
    }

    pub fn compile(&self, params: &ParamValues) -> Result<CompiledConnection, GeometryError> {
        CompiledConnection::new(self, params, false)
    }

    /// Compiles the first derivatives of Π as well, needed for curvature
    /// and Ψ-transport.
    pub fn compile_with_derivatives(&self, params: &ParamValues) -> Result<CompiledConnection, GeometryError> {
        CompiledConnection::new(self, params, true)
    }
}

#[derive(Clone, Debug)]
pub struct CurvatureTensor3 {
    riem: Tensor4<RationalExpr>,
}

impl CurvatureTensor3 {
    /// `riem[l][k][j][i]`.
    pub fn riem(&self) -> &Tensor4<RationalExpr> {
        &self.riem
    }

    pub fn is_flat(&self) -> bool {
        self.riem.iter().flatten().flatten().flatten().all(RationalExpr::is_zero)
    }
}

pub fn curvature_tensor(c: &Connection3) -> Result<CurvatureTensor3, ExprError> {
    let d = c.derivatives()?;
    let pi = &c.pi;
    let mut riem: Tensor4<RationalExpr> = Default::default();
    for l in 0..3 {
        for k in 0..3 {
            for j in 0..3 {
                for i in (j + 1)..3 {
                    let mut acc = d[j][l][i][k].checked_sub(&d[i][l][j][k])?;
                    for m in 0..3 {
                        acc = acc.checked_add(&pi[l][j][m].checked_mul(&pi[m][i][k])?)?;
                        acc = acc.checked_sub(&pi[l][i][m].checked_mul(&pi[m][j][k])?)?;
                    }
                    riem[l][k][i][j] = -&acc;
                    riem[l][k][j][i] = acc;
                }
            }
        }
    }
    Ok(CurvatureTensor3 { riem })
}

pub fn ricci(r: &CurvatureTensor3) -> Result<Matrix3<RationalExpr>, ExprError> {
    let mut out: Matrix3<RationalExpr> = Default::default();
    for k in 0..3 {
        for i in 0..3 {
            let mut acc = RationalExpr::zero();
            for l in 0..3 {
                acc = acc.checked_add(&r.riem[l][k][l][i])?;
            }
            out[k][i] = acc;
        }
    }
    Ok(out)
}

/// Symmetric quadratic form in a direction `u = (dx, dy, dz)`.
#[derive(Clone, Debug, Default)]
pub struct QuadraticForm(pub Matrix3<RationalExpr>);

impl QuadraticForm {
    /// `uᵀ M u` for a direction given by expressions.
    pub fn apply(&self, u: &[RationalExpr; 3]) -> Result<RationalExpr, ExprError> {
        let mut acc = RationalExpr::zero();
        for j in 0..3 {
            for k in 0..3 {
                if self.0[j][k].is_zero() {
                    continue;
                }
                acc = acc.checked_add(&self.0[j][k].checked_mul(&u[j])?.checked_mul(&u[k])?)?;
            }
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(RationalExpr::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|j| (0..3).all(|k| self.0[j][k].equals(&self.0[k][j])))
    }

    pub fn eval(&self, pt: &[f64; 3], params: &ParamValues) -> Result<Matrix3<f64>, ExprError> {
        let mut m = [[0.0; 3]; 3];
        for j in 0..3 {
            for k in 0..3 {
                m[j][k] = crate::symcore::CompiledExpr::compile(&self.0[j][k], params)?.eval(pt)?;
            }
        }
        Ok(m)
    }
}

/// Linear constraint `N · u = 0` plus the quadratic condition `uᵀ M u = 0`
/// defining asymptotic directions.
#[derive(Clone, Debug)]
pub struct DirectionForm {
    pub linear: [RationalExpr; 3],
    pub quadratic: QuadraticForm,
}

pub fn asymptotic_form(f: &VectorField3) -> Result<DirectionForm, ExprError> {
    Ok(DirectionForm {
        linear: f.components().clone(),
        quadratic: QuadraticForm(symmetric_jacobian(f)?),
    })
}

/// `det[2 M u; N; u]` as a symmetric quadratic form in `u`. Writing
/// `K u = N × u`, the determinant is `2 (M u)·(K u)`, so the matrix is
/// `M K − K M`.
pub fn curvature_line_form(f: &VectorField3) -> Result<QuadraticForm, ExprError> {
    let m = symmetric_jacobian(f)?;
    let [p, q, r] = f.components().clone();
    let zero = RationalExpr::zero();
    let k = [
        [zero.clone(), -&r, q.clone()],
        [r.clone(), zero.clone(), -&p],
        [-&q, p, zero],
    ];
    let mut c: Matrix3<RationalExpr> = Default::default();
    for a in 0..3 {
        for b in a..3 {
            let mut acc = RationalExpr::zero();
            for n in 0..3 {
                acc = acc.checked_add(&m[a][n].checked_mul(&k[n][b])?)?;
                acc = acc.checked_sub(&k[a][n].checked_mul(&m[n][b])?)?;
            }
            c[a][b] = acc.clone();
            c[b][a] = acc;
        }
    }
    Ok(QuadraticForm(c))
}

/// The asymptotic condition in the chart `z = 1` for directions with
/// `dz = 0`: `Q² M₁₁ − 2PQ M₁₂ + P² M₂₂` restricted to `z = 1`.
///
/// For projective extensions the 3D asymptotic directions degenerate along
/// the radial rulings, so the slope families of the planar system live in
/// this locus.
pub fn asymptotic_chart_residual(f: &VectorField3) -> Result<RationalExpr, ExprError> {
    let form = asymptotic_form(f)?;
    let u = [f.q().clone(), -f.p(), RationalExpr::zero()];
    form.quadratic.apply(&u)?.substitute(&Symbol::z(), &RationalExpr::one())
}
