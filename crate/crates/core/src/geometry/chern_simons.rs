use super::{Connection3, ConnectionJet, Tensor3, Tensor4};
use crate::symcore::{parse_expr, ExprError, Polynomial, RationalExpr, SymbolTable};

/// Reading of the derivative `Γ^q_{kp;j}` in the density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CsMode {
    /// Plain partial derivative `∂_j`.
    Partial,
    /// Covariant derivative with both lower indices treated as covariant.
    Covariant,
}

impl CsMode {
    pub fn name(self) -> &'static str {
        match self {
            CsMode::Partial => "partial",
            CsMode::Covariant => "covariant",
        }
    }
}

const PERMS: [([usize; 3], i64); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
    ([1, 0, 2], -1),
];

/// `ε^{ijk} (Γ^p_{iq} D_j Γ^q_{kp} + (2/3) Γ^p_{iq} Γ^q_{jr} Γ^r_{kp})`.
pub fn chern_simons_density(c: &Connection3, mode: CsMode) -> Result<RationalExpr, ExprError> {
    let g = c.pi();
    let d = c.derivatives()?;
    let dcov = |j: usize, q: usize, k: usize, p: usize| -> Result<RationalExpr, ExprError> {
        let mut acc = d[j][q][k][p].clone();
        if mode == CsMode::Covariant {
            for m in 0..3 {
                acc = acc
                    .checked_add(&g[q][j][m].checked_mul(&g[m][k][p])?)?
                    .checked_sub(&g[m][j][k].checked_mul(&g[q][m][p])?)?
                    .checked_sub(&g[m][j][p].checked_mul(&g[q][k][m])?)?;
            }
        }
        Ok(acc)
    };
    let two_thirds = RationalExpr::fraction(2, 3);
    let mut total = RationalExpr::zero();
    for ([i, j, k], sign) in PERMS {
        let mut term = RationalExpr::zero();
        for p in 0..3 {
            for q in 0..3 {
                if g[p][i][q].is_zero() {
                    continue;
                }
                let mut inner = dcov(j, q, k, p)?;
                let mut cubic = RationalExpr::zero();
                for r in 0..3 {
                    cubic = cubic.checked_add(&g[q][j][r].checked_mul(&g[r][k][p])?)?;
                }
                inner = inner.checked_add(&two_thirds.checked_mul(&cubic)?)?;
                term = term.checked_add(&g[p][i][q].checked_mul(&inner)?)?;
            }
        }
        total = total.checked_add(&term.checked_mul(&RationalExpr::int(sign))?)?;
    }
    Ok(total)
}

/// The density evaluated from a numeric jet of the connection.
pub fn chern_simons_numeric(jet: &ConnectionJet, mode: CsMode) -> f64 {
    let g: &Tensor3<f64> = &jet.pi;
    let d: &Tensor4<f64> = &jet.dpi;
    let mut total = 0.0;
    for ([i, j, k], sign) in PERMS {
        let mut term = 0.0;
        for p in 0..3 {
            for q in 0..3 {
                let mut inner = d[j][q][k][p];
                if mode == CsMode::Covariant {
                    for m in 0..3 {
                        inner += g[q][j][m] * g[m][k][p] - g[m][j][k] * g[q][m][p] - g[m][j][p] * g[q][k][m];
                    }
                }
                let cubic: f64 = (0..3).map(|r| g[q][j][r] * g[r][k][p]).sum();
                term += g[p][i][q] * (inner + 2.0 / 3.0 * cubic);
            }
        }
        total += sign as f64 * term;
    }
    total
}

const LORENZ_L: &str = "(2*b + 2 - 2*sigma)*x^2*y^2 \
    + (3*sigma^2 + 4*sigma*r - 4*r*b - 2*b*sigma - 4*r)*z*x^2 \
    + (2*b + 2 - 2*sigma)*z^2*x^2 \
    + (-3*r*sigma^2 + 4*sigma^2*b - 5*sigma^3 + 2*b*sigma*r - 2*sigma*r^2 + 4*sigma^2 + 2*b*r^2 + 2*r^2)*x^2 \
    + (-2*r*b - 4*r + 9*sigma^3 + 2*r*sigma^2)*y*x \
    + (-2*sigma + 4 - 2*sigma^2 - 2*sigma*r + 2*b*sigma - 4*b^2)*z*y*x \
    - ((b*sigma*r + 2*sigma^2 + sigma^2*b - sigma*z^2 - 2*sigma*r - sigma*r^2)*y - sigma*y^3)*x \
    + (-2*sigma*b^2 + 2*b^3 - 2*b^2)*z^2 \
    + (-4*sigma^3 - sigma^2*b + 2 - 2*b - sigma^2 + sigma*r + (-sigma + b*sigma)*z - b*sigma*r - 2*sigma)*y^2 \
    + (-2*sigma*b^2 + 2*r*b^2 + 2*b^2*r*sigma - 2*b^2*sigma^2)*z";

const LORENZ_M: &str = "(x^2 + b^2)*z^2 + ((-2*b + 2)*x*y - 2*r*x^2)*z \
    + (sigma^2 + 1 + x^2)*y^2 + (-2*sigma^2 - 2*r)*x*y + (sigma^2 + r^2)*x^2";

/// The reference closed-form numerator `L` and denominator base `M` for
/// the Lorenz field, in the parameters `sigma, r, b`.
pub fn lorenz_cs_parts() -> (Polynomial, Polynomial) {
    let t = SymbolTable::with_params(["sigma", "r", "b"]).expect("valid names");
    let poly = |s: &str| {
        parse_expr(s, &t)
            .expect("transcribed display parses")
            .as_polynomial()
            .cloned()
            .expect("display is polynomial")
    };
    (poly(LORENZ_L), poly(LORENZ_M))
}

/// `L / (2 M²)`.
pub fn lorenz_cs_reference() -> RationalExpr {
    let (l, m) = lorenz_cs_parts();
    let den = &m.pow(2) * &Polynomial::int(2);
    RationalExpr::ratio(l, &den).expect("M is nonzero")
}
