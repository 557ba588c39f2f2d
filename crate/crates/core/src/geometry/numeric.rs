use super::{Connection3, GeometryError, Tensor3, Tensor4};
use crate::field::{missing_param, CompiledField};
use crate::symcore::{CompiledExpr, ExprError, ParamValues};

/// Relative threshold for `Δ` against the squared magnitude scale of the
/// field at the point.
pub const SINGULAR_RELATIVE: f64 = 1e-12;

fn singular(e: ExprError) -> GeometryError {
    match e {
        ExprError::Singular => GeometryError::Singular,
        other => GeometryError::Expr(other),
    }
}

/// A connection compiled for binary64 evaluation.
#[derive(Clone, Debug)]
pub struct CompiledConnection {
    field: [CompiledExpr; 3],
    pi: Tensor3<CompiledExpr>,
    dpi: Option<Tensor4<CompiledExpr>>,
}

impl CompiledConnection {
    pub(super) fn new(c: &Connection3, params: &ParamValues, derivs: bool) -> Result<CompiledConnection, GeometryError> {
        let comp = |e| CompiledExpr::compile(e, params).map_err(missing_param);
        let f = c.field.components();
        let field = [comp(&f[0])?, comp(&f[1])?, comp(&f[2])?];
        let mut pi: Tensor3<CompiledExpr> = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                for k in j..3 {
                    pi[i][j][k] = comp(&c.pi[i][j][k])?;
                    pi[i][k][j] = pi[i][j][k].clone();
                }
            }
        }
        let dpi = if derivs {
            let d = c.derivatives()?;
            let mut out: Tensor4<CompiledExpr> = Default::default();
            for n in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        for k in j..3 {
                            out[n][i][j][k] = comp(&d[n][i][j][k])?;
                            out[n][i][k][j] = out[n][i][j][k].clone();
                        }
                    }
                }
            }
            Some(out)
        } else {
            None
        };
        Ok(CompiledConnection { field, pi, dpi })
    }

    /// Field value at the point, or `Singular` when `Δ` is negligible next
    /// to the squared term scale of the components.
    pub fn checked_field(&self, pos: &[f64; 3]) -> Result<[f64; 3], GeometryError> {
        let mut n = [0.0; 3];
        let mut scale = 0.0;
        for k in 0..3 {
            let (v, s) = self.field[k].eval_scaled(pos).map_err(singular)?;
            n[k] = v;
            scale += s;
        }
        let delta = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
        if !delta.is_finite() || delta == 0.0 || delta < SINGULAR_RELATIVE * scale * scale {
            return Err(GeometryError::Singular);
        }
        Ok(n)
    }

    pub fn pi_at(&self, pos: &[f64; 3]) -> Result<Tensor3<f64>, GeometryError> {
        self.checked_field(pos)?;
        let mut out = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in j..3 {
                    out[i][j][k] = self.pi[i][j][k].eval(pos).map_err(singular)?;
                    out[i][k][j] = out[i][j][k];
                }
            }
        }
        Ok(out)
    }

    pub fn has_derivatives(&self) -> bool {
        self.dpi.is_some()
    }

    /// Π and its first derivatives at the point.
    ///
    /// # Panics
    /// If compiled without derivatives.
    pub fn jet(&self, pos: &[f64; 3]) -> Result<ConnectionJet, GeometryError> {
        let pi = self.pi_at(pos)?;
        let d = self
            .dpi
            .as_ref()
            .expect("connection compiled without derivatives");
        let mut dpi = [[[[0.0; 3]; 3]; 3]; 3];
        for n in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    for k in j..3 {
                        dpi[n][i][j][k] = d[n][i][j][k].eval(pos).map_err(singular)?;
                        dpi[n][i][k][j] = dpi[n][i][j][k];
                    }
                }
            }
        }
        Ok(ConnectionJet { pi, dpi })
    }

    /// `ẍ^i = −Π^i_jk ẋ^j ẋ^k`.
    pub fn acceleration(&self, pos: &[f64; 3], vel: &[f64; 3]) -> Result<[f64; 3], GeometryError> {
        Ok(contract(&self.pi_at(pos)?, vel))
    }
}

/// `−Π^i_jk v^j v^k`.
pub(crate) fn contract(pi: &Tensor3<f64>, v: &[f64; 3]) -> [f64; 3] {
    let mut a = [0.0; 3];
    for i in 0..3 {
        let mut s = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                s += pi[i][j][k] * v[j] * v[k];
            }
        }
        a[i] = -s;
    }
    a
}

/// Geodesic acceleration of the connection.
pub fn geodesic_rhs(c: &CompiledConnection, pos: &[f64; 3], vel: &[f64; 3]) -> Result<[f64; 3], GeometryError> {
    c.acceleration(pos, vel)
}

/// The same acceleration from the Pfaff system directly: the acceleration
/// is parallel to `N`, and differentiating `N · ẋ = 0` along the curve fixes
/// its size, `ẍ = −N (ẋᵀ J ẋ) / Δ`.
pub fn geodesic_rhs_pfaff(f: &CompiledField, pos: &[f64; 3], vel: &[f64; 3]) -> Result<[f64; 3], GeometryError> {
    let n = f.eval(pos).map_err(singular)?;
    let jac = f.jacobian(pos).map_err(singular)?;
    let delta = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(GeometryError::Singular);
    }
    let mut dn_ds = [0.0; 3];
    for k in 0..3 {
        dn_ds[k] = (0..3).map(|j| jac[j][k] * vel[j]).sum();
    }
    let w: f64 = (0..3).map(|k| dn_ds[k] * vel[k]).sum();
    Ok([-n[0] * w / delta, -n[1] * w / delta, -n[2] * w / delta])
}

/// Π and `dpi[n][i][j][k] = ∂_n Π^i_jk` at a point.
#[derive(Clone, Copy, Debug)]
pub struct ConnectionJet {
    pub pi: Tensor3<f64>,
    pub dpi: Tensor4<f64>,
}

impl ConnectionJet {
    /// `riem[l][k][j][i]`, same convention as the symbolic tensor.
    pub fn curvature(&self) -> Tensor4<f64> {
        let (pi, d) = (&self.pi, &self.dpi);
        let mut r = [[[[0.0; 3]; 3]; 3]; 3];
        for l in 0..3 {
            for k in 0..3 {
                for j in 0..3 {
                    for i in 0..3 {
                        let mut acc = d[j][l][i][k] - d[i][l][j][k];
                        for m in 0..3 {
                            acc += pi[l][j][m] * pi[m][i][k] - pi[l][i][m] * pi[m][j][k];
                        }
                        r[l][k][j][i] = acc;
                    }
                }
            }
        }
        r
    }

    pub fn ricci(&self) -> [[f64; 3]; 3] {
        let r = self.curvature();
        let mut out = [[0.0; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                out[k][i] = (0..3).map(|l| r[l][k][l][i]).sum();
            }
        }
        out
    }
}
