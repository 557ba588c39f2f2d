//! Published closed forms for the asymptotic lines of the Lorenz field,
//! written in the plane `(z, y)` with `y' = dy/dz`.

use crate::symcore::{parse_expr, ExprError, Polynomial, RationalExpr, Symbol, SymbolTable};

const L_REDUCED: &str = "-z^4*b^2 + (2*sigma*b^2 + b*y^2 + 2*r*b^2)*z^3 \
    + ((-2*r*b - 2*sigma*b)*y^2 + 4*sigma*b^2 - r^2*b^2 - sigma^2*b^2 - 2*sigma*b^2*r)*z^2 \
    + (y^4 + (sigma^2*b + 2*sigma*r*b + r^2*b - 4*sigma*b)*y^2)*z + (1 - r)*y^4";

const M_REDUCED: &str = "-2*z^3*b^2 + (3*sigma*b^2 + 3*r*b^2 + b*y^2)*z^2 \
    + ((-2*sigma*b - r*b - 2*b)*y^2 - 2*sigma*b^2*r - sigma^2*b^2 + 4*sigma*b^2 - r^2*b^2)*z \
    + y^4 + (-3*sigma*b + sigma*r*b + r*b + sigma^2*b)*y^2";

const N_FULL: &str = "b^3*z^4 + (-3*y^2*b^2 - 2*r*b^3 + 2*sigma*b^3)*z^3 \
    + (b*y^4 + (5*r*b^2 + 4*sigma*b^2)*y^2 + sigma^2*b^3 + r^2*b^3 - 2*sigma*b^3*r)*z^2 \
    + ((-r*b - 2*sigma*b - 3*b)*y^4 + (-8*sigma*b^2*r - 2*r^2*b^2 + 12*sigma*b^2 - 2*sigma^2*b^2)*y^2)*z \
    + y^6 + (2*r*b + sigma^2*b + 2*sigma*r*b - b - 4*sigma*b)*y^4 \
    + (4*sigma*b^2 + 4*sigma*r^2*b^2 - 8*sigma*b^2*r)*y^2";

const CONIC: &str = "z^2*b + (-2*sigma*b - 2*r*b)*z + y^2 + 2*b*r*sigma + b*r^2 - 4*sigma*b + b*sigma^2";

fn poly(src: &str) -> Polynomial {
    let t = SymbolTable::with_params(["sigma", "r", "b"]).expect("valid names");
    parse_expr(src, &t)
        .expect("transcribed display parses")
        .as_polynomial()
        .cloned()
        .expect("display is polynomial")
}

/// Coefficients `(L, M, N)` of `L y'² + M y' + N = 0`.
pub fn lorenz_line_coefficients() -> (Polynomial, Polynomial, Polynomial) {
    let shift = poly("1 - r + z");
    let l = &shift * &poly(L_REDUCED);
    let m = &(&poly("-2*y") * &shift) * &poly(M_REDUCED);
    (l, m, poly(N_FULL))
}

/// The second-order curve carrying a singular solution of the line equation.
pub fn lorenz_singular_conic() -> Polynomial {
    poly(CONIC)
}

/// `M² − 4LN` with `y²` replaced by its value on the conic. Zero when the
/// conic is a singular solution.
pub fn lorenz_conic_residual() -> Result<RationalExpr, ExprError> {
    let (l, m, n) = lorenz_line_coefficients();
    let disc = &m.checked_mul(&m)? - &l.checked_mul(&n)?.scale(&num_rational::BigRational::from_integer(4.into()));
    let conic = lorenz_singular_conic();
    let y = Symbol::y();
    // y² = y² − conic
    let y2 = &Polynomial::var(y.clone()).pow(2) - &conic;
    Ok(RationalExpr::from(disc.substitute_power(&y, 2, &y2)?))
}
