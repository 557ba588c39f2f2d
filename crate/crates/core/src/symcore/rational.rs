use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::rat;
use super::{ExprError, Polynomial, Symbol};

/// Values below this magnitude in a denominator count as a singular point.
pub const SINGULAR_DENOMINATOR: f64 = 1e-300;

/// Ratio of polynomials with exact rational coefficients.
///
/// The denominator is held as a product of tracked factors, each
/// nonconstant and monic (leading coefficient 1), e.g. `Δ^2 * x`. Factors are
/// matched structurally when expressions are combined, so sums over a shared
/// denominator stay compact. No polynomial gcd is ever taken; equality and
/// zero tests go through cross-multiplied numerators.
#[derive(Clone, Debug, Default)]
pub struct RationalExpr {
    num: Polynomial,
    den: Vec<(Polynomial, u32)>,
}

/// Splits a polynomial into `scalar * Π factor^exp` with monic factors.
/// Monomials are broken into their single-symbol factors.
fn normalize_factor(p: &Polynomial) -> (BigRational, Vec<(Polynomial, u32)>) {
    if let Some(c) = p.as_constant() {
        return (c, Vec::new());
    }
    if p.len() == 1 {
        let (m, c) = p.leading().expect("nonempty");
        let factors = m
            .powers()
            .iter()
            .map(|(s, e)| (Polynomial::var(s.clone()), *e))
            .collect();
        return (c.clone(), factors);
    }
    let (lc, monic) = p.monic().expect("nonzero");
    (lc, alloc::vec![(monic, 1)])
}

fn push_factor(den: &mut Vec<(Polynomial, u32)>, f: Polynomial, e: u32) {
    if e == 0 {
        return;
    }
    match den.iter_mut().find(|(g, _)| *g == f) {
        Some((_, k)) => *k += e,
        None => den.push((f, e)),
    }
}

fn exponent_of(den: &[(Polynomial, u32)], f: &Polynomial) -> u32 {
    den.iter().find(|(g, _)| g == f).map_or(0, |(_, e)| *e)
}

fn product(factors: &[(Polynomial, u32)]) -> Result<Polynomial, ExprError> {
    let mut out = Polynomial::one();
    for (f, e) in factors {
        out = out.checked_mul(&f.checked_pow(*e)?)?;
    }
    Ok(out)
}

impl RationalExpr {
    pub fn zero() -> RationalExpr {
        RationalExpr::from(Polynomial::zero())
    }

    pub fn one() -> RationalExpr {
        RationalExpr::from(Polynomial::one())
    }

    pub fn int(n: i64) -> RationalExpr {
        RationalExpr::from(Polynomial::int(n))
    }

    pub fn constant(c: BigRational) -> RationalExpr {
        RationalExpr::from(Polynomial::constant(c))
    }

    /// `n / d` for small integers.
    pub fn fraction(n: i64, d: i64) -> RationalExpr {
        assert!(d != 0, "zero denominator");
        RationalExpr::constant(rat(n) / rat(d))
    }

    pub fn var(s: Symbol) -> RationalExpr {
        RationalExpr::from(Polynomial::var(s))
    }

    /// `num / den`; fails when `den` is the zero polynomial.
    pub fn ratio(num: Polynomial, den: &Polynomial) -> Result<RationalExpr, ExprError> {
        RationalExpr::from(num).checked_div(&RationalExpr::from(den.clone()))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    /// Denominator factors as stored.
    pub fn den_factors(&self) -> &[(Polynomial, u32)] {
        &self.den
    }

    /// Expanded denominator.
    pub fn denominator(&self) -> Polynomial {
        product(&self.den).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_polynomial() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Cross-multiplication equality.
    pub fn equals(&self, other: &RationalExpr) -> bool {
        self.checked_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    fn scaled(&self, c: &BigRational) -> RationalExpr {
        RationalExpr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn checked_add(&self, other: &RationalExpr) -> Result<RationalExpr, ExprError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let mut lcm: Vec<(Polynomial, u32)> = self.den.clone();
        for (f, e) in &other.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*e),
                None => lcm.push((f.clone(), *e)),
            }
        }
        let lift = |x: &RationalExpr| -> Result<Polynomial, ExprError> {
            let missing: Vec<(Polynomial, u32)> = lcm
                .iter()
                .map(|(f, e)| (f.clone(), e - exponent_of(&x.den, f)))
                .filter(|(_, e)| *e > 0)
                .collect();
            x.num.checked_mul(&product(&missing)?)
        };
        let num = &lift(self)? + &lift(other)?;
        if num.is_zero() {
            return Ok(RationalExpr::zero());
        }
        Ok(RationalExpr { num, den: lcm })
    }

    pub fn checked_sub(&self, other: &RationalExpr) -> Result<RationalExpr, ExprError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &RationalExpr) -> Result<RationalExpr, ExprError> {
        if self.is_zero() || other.is_zero() {
            return Ok(RationalExpr::zero());
        }
        let num = self.num.checked_mul(&other.num)?;
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            push_factor(&mut den, f.clone(), *e);
        }
        Ok(RationalExpr { num, den })
    }

    pub fn recip(&self) -> Result<RationalExpr, ExprError> {
        if self.num.is_zero() {
            return Err(ExprError::ZeroDenominator);
        }
        let (scalar, factors) = normalize_factor(&self.num);
        let num = product(&self.den)?.scale(&scalar.recip());
        Ok(RationalExpr { num, den: factors })
    }

    pub fn checked_div(&self, other: &RationalExpr) -> Result<RationalExpr, ExprError> {
        self.checked_mul(&other.recip()?)
    }

    /// Integer power; negative exponents invert.
    pub fn checked_pow(&self, e: i32) -> Result<RationalExpr, ExprError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        if k > super::poly::MAX_EXPONENT {
            return Err(ExprError::PowerTooLarge(e));
        }
        Ok(RationalExpr {
            num: base.num.checked_pow(k)?,
            den: base
                .den
                .iter()
                .map(|(f, d)| (f.clone(), d * k))
                .collect(),
        })
    }

    /// Exact partial derivative with respect to a coordinate.
    pub fn differentiate(&self, v: &Symbol) -> Result<RationalExpr, ExprError> {
        if !v.is_coordinate() {
            return Err(ExprError::NotACoordinate(v.clone()));
        }
        let dnum = self.num.derivative(v);
        // factors whose derivative is nonzero
        let active: Vec<(usize, Polynomial)> = self
            .den
            .iter()
            .enumerate()
            .map(|(k, (f, _))| (k, f.derivative(v)))
            .filter(|(_, df)| !df.is_zero())
            .collect();
        if active.is_empty() {
            return Ok(RationalExpr {
                num: dnum,
                den: self.den.clone(),
            });
        }
        // d(n / Π f^e) = (n' F - n Σ e f' F/f) / (Π f^e · F),  F = Π_active f
        let mut f_all = Polynomial::one();
        for (k, _) in &active {
            f_all = f_all.checked_mul(&self.den[*k].0)?;
        }
        let mut num = dnum.checked_mul(&f_all)?;
        for (k, df) in &active {
            let mut others = Polynomial::one();
            for (j, _) in &active {
                if j != k {
                    others = others.checked_mul(&self.den[*j].0)?;
                }
            }
            let e = rat(self.den[*k].1 as i64);
            let t = self.num.checked_mul(df)?.checked_mul(&others)?.scale(&e);
            num = &num - &t;
        }
        let mut den = self.den.clone();
        for (k, _) in &active {
            den[*k].1 += 1;
        }
        if num.is_zero() {
            return Ok(RationalExpr::zero());
        }
        Ok(RationalExpr { num, den })
    }

    /// Numeric value at a point; `lookup` must cover every symbol.
    pub fn eval_with<F>(&self, mut lookup: F) -> Result<f64, ExprError>
    where
        F: FnMut(&Symbol) -> Option<f64>,
    {
        let mut d = 1.0;
        for (f, e) in &self.den {
            d *= super::poly::powu(f.eval_with(&mut lookup)?, *e);
        }
        if d.abs() < SINGULAR_DENOMINATOR {
            return Err(ExprError::Singular);
        }
        Ok(self.num.eval_with(&mut lookup)? / d)
    }

    pub fn evaluate(&self, values: &BTreeMap<Symbol, f64>) -> Result<f64, ExprError> {
        self.eval_with(|s| values.get(s).copied())
    }

    /// Replaces symbols by exact rational values. A denominator factor that
    /// becomes zero is a [`ExprError::ZeroDenominator`].
    pub fn specialize(&self, values: &BTreeMap<Symbol, BigRational>) -> Result<RationalExpr, ExprError> {
        let mut out = RationalExpr::from(self.num.specialize(values));
        for (f, e) in &self.den {
            let g = RationalExpr::from(f.specialize(values));
            out = out.checked_div(&g.checked_pow(*e as i32)?)?;
        }
        Ok(out)
    }

    /// Capture-free substitution `v <- r`.
    ///
    /// A denominator that collapses to zero is kept symbolically; the error
    /// surfaces when the result is evaluated.
    pub fn substitute(&self, v: &Symbol, r: &RationalExpr) -> Result<RationalExpr, ExprError> {
        let mut out = subst_poly(&self.num, v, r)?;
        for (f, e) in &self.den {
            let g = subst_poly(f, v, r)?;
            if g.is_zero() {
                push_factor(&mut out.den, Polynomial::zero(), *e);
            } else {
                out = out.checked_div(&g.checked_pow(*e as i32)?)?;
            }
        }
        Ok(out)
    }

    /// All symbols mentioned in numerator or denominator.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = self.num.symbols();
        for (f, _) in &self.den {
            for s in f.symbols() {
                if let Err(k) = out.binary_search(&s) {
                    out.insert(k, s);
                }
            }
        }
        out
    }

    /// Multiplies by a rational constant.
    pub fn scale(&self, c: &BigRational) -> RationalExpr {
        if c.is_zero() {
            RationalExpr::zero()
        } else {
            self.scaled(c)
        }
    }
}

fn subst_poly(p: &Polynomial, v: &Symbol, r: &RationalExpr) -> Result<RationalExpr, ExprError> {
    let coeffs = p.coefficients_in(v);
    // Horner in r
    let mut acc = RationalExpr::zero();
    for c in coeffs.iter().rev() {
        acc = acc.checked_mul(r)?.checked_add(&RationalExpr::from(c.clone()))?;
    }
    Ok(acc)
}

impl From<Polynomial> for RationalExpr {
    fn from(num: Polynomial) -> RationalExpr {
        RationalExpr {
            num,
            den: Vec::new(),
        }
    }
}

impl From<Symbol> for RationalExpr {
    fn from(s: Symbol) -> RationalExpr {
        RationalExpr::var(s)
    }
}

impl PartialEq for RationalExpr {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &RationalExpr {
            type Output = RationalExpr;
            fn $method(self, rhs: &RationalExpr) -> RationalExpr {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait for RationalExpr {
            type Output = RationalExpr;
            fn $method(self, rhs: RationalExpr) -> RationalExpr {
                (&self).$checked(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        self.scaled(&-BigRational::one())
    }
}

impl Neg for RationalExpr {
    type Output = RationalExpr;
    fn neg(self) -> RationalExpr {
        -&self
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        f.write_str("/")?;
        let wrap = self.den.len() > 1;
        if wrap {
            f.write_str("(")?;
        }
        for (k, (p, e)) in self.den.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if p.len() > 1 || p.is_zero() {
                write!(f, "({p})")?;
            } else {
                write!(f, "{p}")?;
            }
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: Symbol) -> RationalExpr {
        RationalExpr::var(s)
    }

    #[test]
    fn shared_denominators_do_not_grow() {
        let x = v(Symbol::x());
        let y = v(Symbol::y());
        let d = &(&x * &x) + &(&y * &y);
        let a = &x / &d;
        let b = &y / &d;
        let s = &a + &b;
        assert_eq!(s.den_factors().len(), 1);
        assert_eq!(s.den_factors()[0].1, 1);
        assert!(s.equals(&(&(&x + &y) / &d)));
    }

    #[test]
    fn quotient_rule() {
        // d/dx ((x+y)/x) = -y/x^2
        let x = v(Symbol::x());
        let y = v(Symbol::y());
        let e = &(&x + &y) / &x;
        let d = e.differentiate(&Symbol::x()).unwrap();
        let expected = &(-&y) / &(&x * &x);
        assert!(d.equals(&expected), "{d}");
    }

    #[test]
    fn parameters_are_not_differentiable() {
        let s = Symbol::param("sigma");
        assert!(matches!(
            v(s.clone()).differentiate(&s),
            Err(ExprError::NotACoordinate(_))
        ));
        // but d(sigma)/dx = 0
        assert!(v(s).differentiate(&Symbol::x()).unwrap().is_zero());
    }

    #[test]
    fn division_by_zero_polynomial() {
        let x = v(Symbol::x());
        assert!(matches!(
            x.checked_div(&(&x - &x)),
            Err(ExprError::ZeroDenominator)
        ));
    }

    #[test]
    fn substitution_into_denominator_is_deferred() {
        let y = v(Symbol::y());
        let e = RationalExpr::one().checked_div(&y).unwrap();
        let s = e.substitute(&Symbol::y(), &RationalExpr::zero()).unwrap();
        let vals = BTreeMap::new();
        assert!(matches!(s.evaluate(&vals), Err(ExprError::Singular)));
    }

    #[test]
    fn negative_powers() {
        let x = v(Symbol::x());
        let e = x.checked_pow(-2).unwrap();
        assert!((&e * &(&x * &x)).equals(&RationalExpr::one()));
    }
}
