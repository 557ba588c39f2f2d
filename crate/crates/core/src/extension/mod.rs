//! Riemann extension of the connection: the metric on `(x, y, z, psi1, psi2, psi3)`
//!
//! ```text
//! ds² = −2 Π^k_ij Ψ_k dx^i dx^j + 2 dΨ_k dx^k
//! ```
//!
//! stored as a symmetric 6×6 matrix `[[C, I], [I, 0]]` with
//! `C_ij = −2 Π^k_ij Ψ_k`. Its inverse is `[[0, I], [I, −C]]` and its
//! determinant is `−1`.
//!
//! Geodesics split into base geodesics of Π and a linear transport of Ψ.
//! With `δΨ_k/ds = Ψ̇_k − Π^l_jk ẋ^j Ψ_l` the transport reads
//! `δ²Ψ_k/ds² + riem[l][j][k][i] ẋ^j ẋ^i Ψ_l = 0`; the free index sits in
//! the antisymmetric pair, since `riem[l][k][j][i] ẋ^j ẋ^i` vanishes
//! identically. Expanded, `Ψ̈ + A Ψ̇ + B Ψ = 0` with
//!
//! ```text
//! A_kl = −2 Π^l_jk ẋ^j
//! B_kl = −∂_n Π^l_jk ẋ^n ẋ^j + Π^l_jk Π^j_mn ẋ^m ẋ^n + Π^m_jk Π^l_nm ẋ^j ẋ^n + riem[l][j][k][i] ẋ^j ẋ^i
//! ```
//!
//! Rows of `A`, `B` index `k`, columns index `l`.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{CompiledConnection, Connection3, ConnectionJet, GeometryError, Matrix3};
use crate::symcore::{CompiledExpr, ExprError, ParamValues, RationalExpr, Symbol};

pub type Matrix6<T> = [[T; 6]; 6];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample parameters must be strictly increasing")]
    NonMonotone,
}

#[derive(Clone, Debug)]
pub struct ExtendedMetric6 {
    g: Matrix6<RationalExpr>,
    conn: Connection3,
}

pub fn build_extension(c: &Connection3) -> Result<ExtendedMetric6, ExprError> {
    let mut g: Matrix6<RationalExpr> = Default::default();
    let psi: [RationalExpr; 3] = core::array::from_fn(|k| RationalExpr::var(Symbol::coordinate(3 + k)));
    let minus_two = RationalExpr::int(-2);
    for i in 0..3 {
        for j in i..3 {
            let mut acc = RationalExpr::zero();
            for (k, p) in psi.iter().enumerate() {
                acc = acc.checked_add(&c.pi()[k][i][j].checked_mul(p)?)?;
            }
            g[i][j] = acc.checked_mul(&minus_two)?;
            g[j][i] = g[i][j].clone();
        }
        g[i][3 + i] = RationalExpr::one();
        g[3 + i][i] = RationalExpr::one();
    }
    Ok(ExtendedMetric6 { g, conn: c.clone() })
}

impl ExtendedMetric6 {
    pub fn g(&self) -> &Matrix6<RationalExpr> {
        &self.g
    }

    pub fn connection(&self) -> &Connection3 {
        &self.conn
    }

    /// Checks the identity, zero and `−2ΠΨ` blocks exactly.
    pub fn block_invariants_hold(&self) -> bool {
        let psi: [RationalExpr; 3] = core::array::from_fn(|k| RationalExpr::var(Symbol::coordinate(3 + k)));
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { RationalExpr::one() } else { RationalExpr::zero() };
                if !self.g[i][3 + j].equals(&delta) || !self.g[3 + j][i].equals(&delta) {
                    return false;
                }
                if !self.g[3 + i][3 + j].is_zero() {
                    return false;
                }
                let mut want = RationalExpr::zero();
                for (k, p) in psi.iter().enumerate() {
                    want = want + self.conn.pi()[k][i][j].clone() * p.clone();
                }
                if !self.g[i][j].equals(&(want * RationalExpr::int(-2))) {
                    return false;
                }
            }
        }
        true
    }

    /// Symbolic determinant by Laplace expansion along the sparsest line.
    pub fn determinant(&self) -> Result<RationalExpr, ExprError> {
        let rows: Vec<Vec<RationalExpr>> = self.g.iter().map(|r| r.to_vec()).collect();
        laplace_det(&rows)
    }

    /// Closed-form inverse `[[0, I], [I, −C]]`.
    pub fn inverse(&self) -> Matrix6<RationalExpr> {
        let mut inv: Matrix6<RationalExpr> = Default::default();
        for i in 0..3 {
            inv[i][3 + i] = RationalExpr::one();
            inv[3 + i][i] = RationalExpr::one();
            for j in 0..3 {
                inv[3 + i][3 + j] = -&self.g[i][j];
            }
        }
        inv
    }

    pub fn compile(&self, params: &ParamValues) -> Result<CompiledMetric6, ExtensionError> {
        let comp = |e: &RationalExpr| {
            CompiledExpr::compile(e, params).map_err(|e| ExtensionError::Geometry(GeometryError::Field(crate::field::missing_param(e))))
        };
        let mut g: Matrix6<CompiledExpr> = Default::default();
        let mut dg: [Matrix6<CompiledExpr>; 6] = Default::default();
        for a in 0..6 {
            for b in a..6 {
                g[a][b] = comp(&self.g[a][b])?;
                g[b][a] = g[a][b].clone();
                for c in 0..6 {
                    let d = self.g[a][b].differentiate(&Symbol::coordinate(c))?;
                    dg[c][a][b] = comp(&d)?;
                    dg[c][b][a] = dg[c][a][b].clone();
                }
            }
        }
        Ok(CompiledMetric6 {
            guard: self.conn.compile(params)?,
            g,
            dg,
        })
    }
}

fn laplace_det(m: &[Vec<RationalExpr>]) -> Result<RationalExpr, ExprError> {
    let n = m.len();
    if n == 0 {
        return Ok(RationalExpr::one());
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let nonzero = |r: &Vec<RationalExpr>| r.iter().filter(|e| !e.is_zero()).count();
    let (row, _) = m
        .iter()
        .enumerate()
        .min_by_key(|(_, r)| nonzero(r))
        .expect("nonempty");
    let mut acc = RationalExpr::zero();
    for col in 0..n {
        let e = &m[row][col];
        if e.is_zero() {
            continue;
        }
        let minor: Vec<Vec<RationalExpr>> = m
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != row)
            .map(|(_, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = e.checked_mul(&laplace_det(&minor)?)?;
        acc = if (row + col) % 2 == 0 {
            acc.checked_add(&term)?
        } else {
            acc.checked_sub(&term)?
        };
    }
    Ok(acc)
}

/// Metric and its first derivatives compiled for binary64 evaluation.
#[derive(Clone, Debug)]
pub struct CompiledMetric6 {
    guard: CompiledConnection,
    g: Matrix6<CompiledExpr>,
    dg: [Matrix6<CompiledExpr>; 6],
}

impl CompiledMetric6 {
    pub fn metric_at(&self, q: &[f64; 6]) -> Result<Matrix6<f64>, GeometryError> {
        let base = [q[0], q[1], q[2]];
        self.guard.checked_field(&base)?;
        let mut out = [[0.0; 6]; 6];
        for a in 0..6 {
            for b in 0..6 {
                out[a][b] = self.g[a][b].eval(q).map_err(|_| GeometryError::Singular)?;
            }
        }
        Ok(out)
    }

    /// `g_ab v^a v^b`.
    pub fn norm(&self, q: &[f64; 6], v: &[f64; 6]) -> Result<f64, GeometryError> {
        let g = self.metric_at(q)?;
        Ok((0..6).map(|a| (0..6).map(|b| g[a][b] * v[a] * v[b]).sum::<f64>()).sum())
    }

    /// `ẍ^a = −Γ̂^a_bc ẋ^b ẋ^c` with the Christoffel symbols of the metric,
    /// `Γ̂^a_bc = ½ g^{ad} (∂_b g_dc + ∂_c g_db − ∂_d g_bc)`, and the inverse
    /// taken from the block formula.
    pub fn acceleration(&self, q: &[f64; 6], v: &[f64; 6]) -> Result<[f64; 6], GeometryError> {
        let g = self.metric_at(q)?;
        let mut dg = [[[0.0; 6]; 6]; 6];
        for c in 0..6 {
            for a in 0..6 {
                for b in a..6 {
                    dg[c][a][b] = self.dg[c][a][b].eval(q).map_err(|_| GeometryError::Singular)?;
                    dg[c][b][a] = dg[c][a][b];
                }
            }
        }
        let mut inv = [[0.0; 6]; 6];
        for i in 0..3 {
            inv[i][3 + i] = 1.0;
            inv[3 + i][i] = 1.0;
            for j in 0..3 {
                inv[3 + i][3 + j] = -g[i][j];
            }
        }
        // lowered symbols contracted with the velocity twice
        let mut low = [0.0; 6];
        for d in 0..6 {
            let mut s = 0.0;
            for b in 0..6 {
                for c in 0..6 {
                    s += 0.5 * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]) * v[b] * v[c];
                }
            }
            low[d] = s;
        }
        let mut acc = [0.0; 6];
        for a in 0..6 {
            acc[a] = -(0..6).map(|d| inv[a][d] * low[d]).sum::<f64>();
        }
        Ok(acc)
    }
}

/// `A` and `B` of the expanded transport at one base state.
pub fn jacobi_matrices(jet: &ConnectionJet, vel: &[f64; 3]) -> (Matrix3<f64>, Matrix3<f64>) {
    let (pi, d) = (&jet.pi, &jet.dpi);
    let riem = jet.curvature();
    let v = vel;
    let mut a = [[0.0; 3]; 3];
    let mut b = [[0.0; 3]; 3];
    // ẍ from the base geodesic equation
    let mut acc = [0.0; 3];
    for j in 0..3 {
        acc[j] = -(0..3)
            .map(|m| (0..3).map(|n| pi[j][m][n] * v[m] * v[n]).sum::<f64>())
            .sum::<f64>();
    }
    for k in 0..3 {
        for l in 0..3 {
            a[k][l] = -2.0 * (0..3).map(|j| pi[l][j][k] * v[j]).sum::<f64>();
            let mut s = 0.0;
            for j in 0..3 {
                s -= pi[l][j][k] * acc[j];
                for n in 0..3 {
                    s -= d[n][l][j][k] * v[n] * v[j];
                    s += (0..3).map(|m| pi[m][j][k] * pi[l][n][m]).sum::<f64>() * v[j] * v[n];
                    s += riem[l][j][k][n] * v[j] * v[n];
                }
            }
            b[k][l] = s;
        }
    }
    (a, b)
}

/// Right-hand side of the covariant form of the transport with
/// `Φ_k = δΨ_k/ds`: returns `(Ψ̇, Φ̇)`.
pub fn transport_rhs(jet: &ConnectionJet, vel: &[f64; 3], psi: &[f64; 3], phi: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pi = &jet.pi;
    let riem = jet.curvature();
    let mut dpsi = [0.0; 3];
    let mut dphi = [0.0; 3];
    for k in 0..3 {
        let mut s = phi[k];
        let mut t = 0.0;
        for l in 0..3 {
            for j in 0..3 {
                s += pi[l][j][k] * vel[j] * psi[l];
                t += pi[l][j][k] * vel[j] * phi[l];
                for i in 0..3 {
                    t -= riem[l][j][k][i] * vel[j] * vel[i] * psi[l];
                }
            }
        }
        dpsi[k] = s;
        dphi[k] = t;
    }
    (dpsi, dphi)
}

/// `Φ_k = Ψ̇_k − Π^l_jk ẋ^j Ψ_l`.
pub fn covariant_psi_rate(jet: &ConnectionJet, vel: &[f64; 3], psi: &[f64; 3], psi_dot: &[f64; 3]) -> [f64; 3] {
    core::array::from_fn(|k| {
        psi_dot[k]
            - (0..3)
                .map(|l| (0..3).map(|j| jet.pi[l][j][k] * vel[j] * psi[l]).sum::<f64>())
                .sum::<f64>()
    })
}

/// `A(s)`, `B(s)` sampled along a base curve.
#[derive(Clone, Debug, Default)]
pub struct JacobiSystem {
    pub s: Vec<f64>,
    pub a: Vec<Matrix3<f64>>,
    pub b: Vec<Matrix3<f64>>,
}

/// Samples `A`, `B` at base states `(s, position, velocity)`.
pub fn psi_system_matrices(
    c: &CompiledConnection,
    samples: &[(f64, [f64; 3], [f64; 3])],
) -> Result<JacobiSystem, ExtensionError> {
    let mut out = JacobiSystem::default();
    for (s, pos, vel) in samples {
        let jet = c.jet(pos)?;
        let (a, b) = jacobi_matrices(&jet, vel);
        if a.iter().chain(b.iter()).flatten().any(|v| !v.is_finite()) {
            return Err(GeometryError::Singular.into());
        }
        out.s.push(*s);
        out.a.push(a);
        out.b.push(b);
    }
    Ok(out)
}

/// `E = B − A′/2 − A²/4` sampled, with eigenvalues as `(re, im)` pairs.
#[derive(Clone, Debug, Default)]
pub struct InvariantE {
    pub s: Vec<f64>,
    pub e: Vec<Matrix3<f64>>,
    pub eigenvalues: Vec<[(f64, f64); 3]>,
}

/// Derivative of sampled matrices on a possibly nonuniform grid: three-point
/// centered formula inside, one-sided three-point formula at the ends.
pub fn sample_derivative(s: &[f64], a: &[Matrix3<f64>]) -> Result<Vec<Matrix3<f64>>, ExtensionError> {
    let n = s.len();
    if n < 3 {
        return Err(ExtensionError::TooFewSamples(n));
    }
    if s.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ExtensionError::NonMonotone);
    }
    let weights = |i: usize, at: usize| -> [f64; 3] {
        // Lagrange derivative weights for nodes i, i+1, i+2 evaluated at node `at`
        let (x0, x1, x2) = (s[i], s[i + 1], s[i + 2]);
        let t = s[at];
        [
            ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2)),
            ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2)),
            ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1)),
        ]
    };
    let mut out = vec![[[0.0; 3]; 3]; n];
    for at in 0..n {
        let i = at.saturating_sub(1).min(n - 3);
        let w = weights(i, at);
        for r in 0..3 {
            for c in 0..3 {
                out[at][r][c] = w[0] * a[i][r][c] + w[1] * a[i + 1][r][c] + w[2] * a[i + 2][r][c];
            }
        }
    }
    Ok(out)
}

pub fn invariant_e(j: &JacobiSystem) -> Result<InvariantE, ExtensionError> {
    let da = sample_derivative(&j.s, &j.a)?;
    let mut out = InvariantE {
        s: j.s.clone(),
        ..InvariantE::default()
    };
    for (idx, (a, b)) in j.a.iter().zip(&j.b).enumerate() {
        let e = e_matrix(a, b, &da[idx]);
        out.eigenvalues.push(eigenvalues3(&e));
        out.e.push(e);
    }
    Ok(out)
}

/// `B − A′/2 − A²/4`.
pub fn e_matrix(a: &Matrix3<f64>, b: &Matrix3<f64>, da: &Matrix3<f64>) -> Matrix3<f64> {
    core::array::from_fn(|r| {
        core::array::from_fn(|c| {
            let a2: f64 = (0..3).map(|m| a[r][m] * a[m][c]).sum();
            b[r][c] - 0.5 * da[r][c] - 0.25 * a2
        })
    })
}

/// Roots of the characteristic cubic as `(re, im)` pairs, real parts
/// ascending.
pub fn eigenvalues3(m: &Matrix3<f64>) -> [(f64, f64); 3] {
    use num_traits::Float;
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // λ³ − tr λ² + minors λ − det = 0; shift λ = t + tr/3
    let shift = tr / 3.0;
    let p = minors - tr * tr / 3.0;
    let q = -(2.0 * tr * tr * tr / 27.0 - tr * minors / 3.0 + det);
    // t³ + p t + q = 0
    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let mut out = if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        let re = -(u + v) / 2.0 + shift;
        let im = (u - v) * 3.0.sqrt() / 2.0;
        [(u + v + shift, 0.0), (re, -im.abs()), (re, im.abs())]
    } else if p == 0.0 {
        [(shift, 0.0); 3]
    } else {
        let r = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let two_pi_3 = 2.0 * core::f64::consts::PI / 3.0;
        [
            (2.0 * r * phi.cos() + shift, 0.0),
            (2.0 * r * (phi - two_pi_3).cos() + shift, 0.0),
            (2.0 * r * (phi + two_pi_3).cos() + shift, 0.0),
        ]
    };
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

#[cfg(test)]
mod tests;
