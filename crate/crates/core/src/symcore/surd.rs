use core::fmt;

use super::{ExprError, RationalExpr};

/// Element `rational + coeff * sqrt(radicand)` of a quadratic extension over
/// rational expressions. Used to check identities involving closed-form roots
/// without floating point.
#[derive(Clone, Debug)]
pub struct Surd {
    pub rational: RationalExpr,
    pub coeff: RationalExpr,
    pub radicand: RationalExpr,
}

impl Surd {
    pub fn new(rational: RationalExpr, coeff: RationalExpr, radicand: RationalExpr) -> Surd {
        Surd {
            rational,
            coeff,
            radicand,
        }
    }

    /// Embeds `a` with the given radicand and zero surd part.
    pub fn from_rational(a: RationalExpr, radicand: &RationalExpr) -> Surd {
        Surd::new(a, RationalExpr::zero(), radicand.clone())
    }

    fn check(&self, other: &Surd) -> Result<(), ExprError> {
        if self.radicand.equals(&other.radicand) {
            Ok(())
        } else {
            Err(ExprError::RadicandMismatch)
        }
    }

    pub fn add(&self, other: &Surd) -> Result<Surd, ExprError> {
        self.check(other)?;
        Ok(Surd::new(
            self.rational.checked_add(&other.rational)?,
            self.coeff.checked_add(&other.coeff)?,
            self.radicand.clone(),
        ))
    }

    pub fn mul(&self, other: &Surd) -> Result<Surd, ExprError> {
        self.check(other)?;
        // (a + b√d)(c + e√d) = (ac + be·d) + (ae + bc)√d
        let rational = self
            .rational
            .checked_mul(&other.rational)?
            .checked_add(&self.coeff.checked_mul(&other.coeff)?.checked_mul(&self.radicand)?)?;
        let coeff = self
            .rational
            .checked_mul(&other.coeff)?
            .checked_add(&self.coeff.checked_mul(&other.rational)?)?;
        Ok(Surd::new(rational, coeff, self.radicand.clone()))
    }

    pub fn scale(&self, k: &RationalExpr) -> Result<Surd, ExprError> {
        Ok(Surd::new(
            self.rational.checked_mul(k)?,
            self.coeff.checked_mul(k)?,
            self.radicand.clone(),
        ))
    }

    /// Evaluates `c2*s^2 + c1*s + c0` at this element.
    pub fn quadratic(
        &self,
        c2: &RationalExpr,
        c1: &RationalExpr,
        c0: &RationalExpr,
    ) -> Result<Surd, ExprError> {
        let sq = self.mul(self)?.scale(c2)?;
        let lin = self.scale(c1)?;
        sq.add(&lin)?.add(&Surd::from_rational(c0.clone(), &self.radicand))
    }

    /// Both parts vanish identically.
    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.coeff.is_zero()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*sqrt({})", self.rational, self.coeff, self.radicand)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_root() {
        // (1 + √5)/2 solves s^2 - s - 1 = 0
        let half = RationalExpr::fraction(1, 2);
        let phi = Surd::new(half.clone(), half, RationalExpr::int(5));
        let r = phi
            .quadratic(&RationalExpr::one(), &RationalExpr::int(-1), &RationalExpr::int(-1))
            .unwrap();
        assert!(r.is_zero());
        let wrong = phi
            .quadratic(&RationalExpr::one(), &RationalExpr::int(1), &RationalExpr::int(-1))
            .unwrap();
        assert!(!wrong.is_zero());
    }
}
