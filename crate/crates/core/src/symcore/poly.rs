use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExprError, Symbol};

/// Largest exponent a single symbol may carry.
pub const MAX_EXPONENT: u32 = u16::MAX as u32;

/// Product of symbol powers, stored sparsely and sorted by symbol order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol) -> Monomial {
        Monomial(alloc::vec![(s, 1)])
    }

    pub fn from_powers<I: IntoIterator<Item = (Symbol, u32)>>(
        powers: I,
    ) -> Result<Monomial, ExprError> {
        let mut m = Monomial::one();
        for (s, e) in powers {
            m = m.checked_mul(&Monomial(alloc::vec![(s, e)]))?;
        }
        m.0.retain(|(_, e)| *e > 0);
        Ok(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.0
            .iter()
            .find(|(t, _)| t == s)
            .map_or(0, |(_, e)| *e)
    }

    pub fn powers(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial, ExprError> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e > MAX_EXPONENT {
                        return Err(ExprError::ExponentOverflow(a[i].0.clone()));
                    }
                    out.push((a[i].0.clone(), e));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(Monomial(out))
    }

    /// Splits off every power of `s`: returns `(exponent, rest)`.
    pub fn split(&self, s: &Symbol) -> (u32, Monomial) {
        let mut rest = self.0.clone();
        match rest.iter().position(|(t, _)| t == s) {
            Some(k) => {
                let (_, e) = rest.remove(k);
                (e, Monomial(rest))
            }
            None => (0, Monomial(rest)),
        }
    }
}

/// Graded lexicographic order: total degree first, then the exponent of the
/// earliest symbol in symbol order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a[i].1.cmp(&b[j].1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            }
        }
        (a.len() - i).cmp(&(b.len() - j))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Multivariate polynomial with exact rational coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Polynomial {
        Polynomial::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Polynomial {
        Polynomial::constant(rat(n))
    }

    pub fn var(s: Symbol) -> Polynomial {
        Polynomial::term(BigRational::one(), Monomial::var(s))
    }

    pub fn term(c: BigRational, m: Monomial) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Value if the polynomial has no symbols.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for m in self.terms.keys() {
            for (s, _) in m.powers() {
                if let Err(k) = out.binary_search(s) {
                    out.insert(k, s.clone());
                }
            }
        }
        out
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, ExprError> {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.checked_mul(mb)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn checked_pow(&self, e: u32) -> Result<Polynomial, ExprError> {
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        self.checked_pow(e).unwrap_or_else(|err| panic!("{err}"))
    }

    /// Partial derivative. Parameters count as constants here; the
    /// coordinate-only restriction lives on [`super::RationalExpr`].
    pub fn derivative(&self, s: &Symbol) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(s);
            if e == 0 {
                continue;
            }
            let m2 = if e == 1 {
                rest
            } else {
                rest.checked_mul(&Monomial(alloc::vec![(s.clone(), e - 1)]))
                    .expect("lowering an exponent cannot overflow")
            };
            out.add_term(m2, c * rat(e as i64));
        }
        out
    }

    /// Groups terms by the power of `s`: entry `k` is the coefficient of `s^k`.
    pub fn coefficients_in(&self, s: &Symbol) -> Vec<Polynomial> {
        let mut out = alloc::vec![Polynomial::zero(); self.degree_in(s) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(s);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    /// Replaces parameters by exact values; symbols absent from `values` stay.
    pub fn specialize(&self, values: &BTreeMap<Symbol, BigRational>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut kept = Vec::new();
            for (s, e) in m.powers() {
                match values.get(s) {
                    Some(v) => coeff *= num_traits::pow(v.clone(), *e as usize),
                    None => kept.push((s.clone(), *e)),
                }
            }
            out.add_term(Monomial(kept), coeff);
        }
        out
    }

    /// Replaces `s^k` by `r` in a polynomial whose exponents of `s` are all
    /// multiples of `k`.
    pub fn substitute_power(
        &self,
        s: &Symbol,
        k: u32,
        r: &Polynomial,
    ) -> Result<Polynomial, ExprError> {
        assert!(k > 0, "power must be positive");
        let coeffs = self.coefficients_in(s);
        let mut out = Polynomial::zero();
        let mut r_pow = Polynomial::one();
        for (e, c) in coeffs.iter().enumerate() {
            if !(e as u32).is_multiple_of(k) {
                if !c.is_zero() {
                    return Err(ExprError::IndivisibleExponent {
                        symbol: s.clone(),
                        power: k,
                    });
                }
                continue;
            }
            if e > 0 {
                r_pow = r_pow.checked_mul(r)?;
            }
            out = &out + &c.checked_mul(&r_pow)?;
        }
        Ok(out)
    }

    /// Polynomial made of the terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Lowest total degree with a nonzero term.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    /// Total-degree homogenization in `s` up to degree `d`: each term of
    /// degree `k` picks up `s^(d-k)`.
    pub fn homogenize(&self, s: &Symbol, d: u32) -> Result<Polynomial, ExprError> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let k = m.degree();
            if k > d {
                return Err(ExprError::DegreeTooHigh { degree: k, target: d });
            }
            let m2 = if k == d {
                m.clone()
            } else {
                m.checked_mul(&Monomial(alloc::vec![(s.clone(), d - k)]))?
            };
            out.add_term(m2, c.clone());
        }
        Ok(out)
    }

    /// Splits into `lc * monic` where `monic` has leading coefficient 1.
    pub fn monic(&self) -> Option<(BigRational, Polynomial)> {
        let (_, lc) = self.leading()?;
        let lc = lc.clone();
        let inv = lc.recip();
        Some((lc, self.scale(&inv)))
    }

    /// Numeric value; `lookup` supplies every symbol.
    pub fn eval_with<F>(&self, mut lookup: F) -> Result<f64, ExprError>
    where
        F: FnMut(&Symbol) -> Option<f64>,
    {
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (s, e) in m.powers() {
                let v = lookup(s).ok_or_else(|| ExprError::Unassigned(s.clone()))?;
                t *= powu(v, *e);
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Content-free integer form: multiplies through by the lcm of the
    /// coefficient denominators. Handy for compact printing of residuals.
    pub fn clear_denominators(&self) -> Polynomial {
        let l = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        self.scale(&BigRational::from_integer(l))
    }
}

pub(crate) fn powu(v: f64, e: u32) -> f64 {
    let mut result = 1.0;
    let mut base = v;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result *= base;
        }
        e >>= 1;
        base *= base;
    }
    result
}

pub fn rational_to_f64(c: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (c.numer().to_i64(), c.denom().to_i64()) {
        if n.unsigned_abs() < (1 << 53) && d < (1 << 53) {
            return n as f64 / d as f64;
        }
    }
    c.to_f64().unwrap_or(f64::NAN)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

/// Panics on exponent overflow; see [`Polynomial::checked_mul`].
impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var(Symbol::x())
    }
    fn y() -> Polynomial {
        Polynomial::var(Symbol::y())
    }

    #[test]
    fn graded_lex_order_prints_highest_degree_first() {
        let p = &(&y() + &(&x() * &x())) + &Polynomial::int(3);
        assert_eq!(alloc::format!("{p}"), "x^2 + y + 3");
        let q = &(&x() * &y()) - &(&y() * &y());
        assert_eq!(alloc::format!("{q}"), "x*y - y^2");
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = &(&x() + &y()) - &x();
        assert_eq!(p, y());
        assert!((&p - &y()).is_zero());
    }

    #[test]
    fn exponent_overflow_is_an_error() {
        let big = x().checked_pow(40_000).unwrap();
        assert!(matches!(
            big.checked_mul(&big),
            Err(ExprError::ExponentOverflow(_))
        ));
    }

    #[test]
    fn derivative_power_rule() {
        // d/dx x^2 y = 2xy
        let p = &(&x() * &x()) * &y();
        let d = p.derivative(&Symbol::x());
        assert_eq!(d, (&x() * &y()).scale(&rat(2)));
    }

    #[test]
    fn substitute_even_power() {
        // x^4 + 3x^2 with x^2 <- y gives y^2 + 3y
        let p = &x().pow(4) + &x().pow(2).scale(&rat(3));
        let r = p.substitute_power(&Symbol::x(), 2, &y()).unwrap();
        assert_eq!(r, &y().pow(2) + &y().scale(&rat(3)));
        assert!(x().substitute_power(&Symbol::x(), 2, &y()).is_err());
    }

    #[test]
    fn homogenize_pads_lower_degrees() {
        let p = &(&x() * &x()) + &y();
        let h = p.homogenize(&Symbol::z(), 2).unwrap();
        let z = Polynomial::var(Symbol::z());
        assert_eq!(h, &(&x() * &x()) + &(&y() * &z));
    }
}
