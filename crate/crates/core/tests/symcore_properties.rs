use std::collections::BTreeMap;

use nonholo_core::symcore::{parse_expr, Monomial, Polynomial, RationalExpr, Symbol, SymbolTable};
use num_rational::BigRational;
use proptest::prelude::*;

fn syms() -> [Symbol; 5] {
    [Symbol::x(), Symbol::y(), Symbol::z(), Symbol::param("a"), Symbol::param("b")]
}

/// Polynomials of total degree ≤ 4 in x, y, z and the parameters a, b.
fn poly() -> impl Strategy<Value = Polynomial> {
    let term = (-6i64..=6, proptest::collection::vec(0u32..=2, 5)).prop_map(|(c, exps)| {
        let mut budget = 4u32;
        let powers: Vec<(Symbol, u32)> = syms()
            .into_iter()
            .zip(exps)
            .map(|(s, e)| {
                let e = e.min(budget);
                budget -= e;
                (s, e)
            })
            .collect();
        Polynomial::term(BigRational::from_integer(c.into()), Monomial::from_powers(powers).unwrap())
    });
    proptest::collection::vec(term, 0..6).prop_map(|ts| ts.iter().fold(Polynomial::zero(), |acc, t| &acc + t))
}

fn expr() -> impl Strategy<Value = RationalExpr> {
    (poly(), poly()).prop_map(|(n, d)| {
        let den = &d + &Polynomial::int(3);
        if den.is_zero() {
            RationalExpr::from(n)
        } else {
            RationalExpr::ratio(n, &den).unwrap()
        }
    })
}

fn table() -> SymbolTable {
    SymbolTable::with_params(["a", "b"]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn differentiation_is_linear_and_leibniz(p in poly(), q in poly(), k in -5i64..5) {
        let (p, q) = (RationalExpr::from(p), RationalExpr::from(q));
        for v in [Symbol::x(), Symbol::y(), Symbol::z()] {
            let c = RationalExpr::int(k);
            let lhs = p.checked_mul(&c).unwrap().checked_add(&q).unwrap().differentiate(&v).unwrap();
            let rhs = p.differentiate(&v).unwrap().checked_mul(&c).unwrap()
                .checked_add(&q.differentiate(&v).unwrap()).unwrap();
            prop_assert!(lhs.checked_sub(&rhs).unwrap().is_zero());

            let lhs = p.checked_mul(&q).unwrap().differentiate(&v).unwrap();
            let rhs = p.differentiate(&v).unwrap().checked_mul(&q).unwrap()
                .checked_add(&p.checked_mul(&q.differentiate(&v).unwrap()).unwrap()).unwrap();
            prop_assert!(lhs.checked_sub(&rhs).unwrap().is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn mixed_partials_commute(e in expr()) {
        let xy = e.differentiate(&Symbol::x()).unwrap().differentiate(&Symbol::y()).unwrap();
        let yx = e.differentiate(&Symbol::y()).unwrap().differentiate(&Symbol::x()).unwrap();
        prop_assert!(xy.checked_sub(&yx).unwrap().is_zero());
    }

    #[test]
    fn derivative_matches_central_difference(
        e in expr(),
        pt in proptest::collection::vec(-1.5f64..1.5, 5),
    ) {
        let at = |dx: f64| -> BTreeMap<Symbol, f64> {
            syms().into_iter().zip(&pt).enumerate()
                .map(|(i, (s, v))| (s, if i == 0 { v + dx } else { *v }))
                .collect()
        };
        let den: f64 = RationalExpr::from(e.denominator()).evaluate(&at(0.0)).unwrap();
        prop_assume!(den.abs() > 0.1);
        let d = e.differentiate(&Symbol::x()).unwrap().evaluate(&at(0.0)).unwrap();
        let h = 1e-6;
        let (fp, fm) = (e.evaluate(&at(h)), e.evaluate(&at(-h)));
        prop_assume!(fp.is_ok() && fm.is_ok());
        let fd = (fp.unwrap() - fm.unwrap()) / (2.0 * h);
        let scale = d.abs().max(e.evaluate(&at(0.0)).unwrap().abs()).max(1.0);
        prop_assert!((fd - d).abs() <= 1e-5 * scale, "fd {} vs {}", fd, d);
    }

    #[test]
    fn parse_print_parse_round_trips(e in expr()) {
        let t = table();
        let once = parse_expr(&e.to_string(), &t).unwrap();
        let twice = parse_expr(&once.to_string(), &t).unwrap();
        prop_assert!(once.equals(&e));
        prop_assert!(twice.equals(&once));
    }
}
