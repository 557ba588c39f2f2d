use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::poly::{powu, rational_to_f64};
use super::rational::SINGULAR_DENOMINATOR;
use super::{ExprError, Polynomial, RationalExpr, Symbol};

/// Numeric parameter values used when compiling expressions.
pub type ParamValues = BTreeMap<Symbol, f64>;

/// A polynomial with parameters folded into binary64 coefficients, evaluated
/// against a coordinate array `[x, y, z, psi1, psi2, psi3]` (only as many
/// slots as the polynomial uses need be present).
#[derive(Clone, Debug, Default)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn compile(p: &Polynomial, params: &ParamValues) -> Result<CompiledPoly, ExprError> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let mut coeff = rational_to_f64(c);
            let mut powers = Vec::new();
            for (s, e) in m.powers() {
                match s.slot() {
                    Some(slot) => powers.push((slot, *e)),
                    None => {
                        let v = params
                            .get(s)
                            .ok_or_else(|| ExprError::Unassigned(s.clone()))?;
                        coeff *= powu(*v, *e);
                    }
                }
            }
            terms.push((coeff, powers));
        }
        Ok(CompiledPoly { terms })
    }

    pub fn eval(&self, pt: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, pw)| pw.iter().fold(*c, |acc, (slot, e)| acc * powu(pt[*slot], *e)))
            .sum()
    }

    /// Value together with the sum of absolute term values, a cancellation-free
    /// magnitude scale.
    pub fn eval_scaled(&self, pt: &[f64]) -> (f64, f64) {
        let mut v = 0.0;
        let mut scale = 0.0;
        for (c, pw) in &self.terms {
            let t = pw.iter().fold(*c, |acc, (slot, e)| acc * powu(pt[*slot], *e));
            v += t;
            scale += t.abs();
        }
        (v, scale)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Compiled [`RationalExpr`].
#[derive(Clone, Debug, Default)]
pub struct CompiledExpr {
    num: CompiledPoly,
    den: Vec<(CompiledPoly, u32)>,
}

impl CompiledExpr {
    pub fn compile(e: &RationalExpr, params: &ParamValues) -> Result<CompiledExpr, ExprError> {
        let num = CompiledPoly::compile(e.numerator(), params)?;
        let den = e
            .den_factors()
            .iter()
            .map(|(f, k)| Ok((CompiledPoly::compile(f, params)?, *k)))
            .collect::<Result<Vec<_>, ExprError>>()?;
        Ok(CompiledExpr { num, den })
    }

    pub fn eval(&self, pt: &[f64]) -> Result<f64, ExprError> {
        if self.num.is_zero() {
            return Ok(0.0);
        }
        let d = self.den_value(pt);
        if d.abs() < SINGULAR_DENOMINATOR || !d.is_finite() {
            return Err(ExprError::Singular);
        }
        Ok(self.num.eval(pt) / d)
    }

    /// Value together with `Σ|numerator terms| / |denominator|`.
    pub fn eval_scaled(&self, pt: &[f64]) -> Result<(f64, f64), ExprError> {
        if self.num.is_zero() {
            return Ok((0.0, 0.0));
        }
        let d = self.den_value(pt);
        if d.abs() < SINGULAR_DENOMINATOR || !d.is_finite() {
            return Err(ExprError::Singular);
        }
        let (v, s) = self.num.eval_scaled(pt);
        Ok((v / d, s / d.abs()))
    }

    /// Value without the singularity check; may be infinite or NaN.
    pub fn eval_unchecked(&self, pt: &[f64]) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        self.num.eval(pt) / self.den_value(pt)
    }

    fn den_value(&self, pt: &[f64]) -> f64 {
        self.den
            .iter()
            .fold(1.0, |acc, (f, k)| acc * powu(f.eval(pt), *k))
    }
}
