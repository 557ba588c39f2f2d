use super::*;
use crate::field::{catalog, catalog_names, VectorField3};
use crate::geometry::{build_connection, geodesic_rhs};
use crate::symcore::{parse_expr, SymbolTable};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};

fn lorenz_values() -> ParamValues {
    let mut p = ParamValues::new();
    p.insert(Symbol::param("sigma"), 10.0);
    p.insert(Symbol::param("r"), 28.0);
    p.insert(Symbol::param("b"), 8.0 / 3.0);
    p
}

fn constant_field() -> VectorField3 {
    let t = SymbolTable::new();
    VectorField3::new(
        parse_expr("1", &t).unwrap(),
        parse_expr("2", &t).unwrap(),
        parse_expr("3", &t).unwrap(),
    )
    .unwrap()
}

#[test]
fn flat_extension() {
    let c = build_connection(&constant_field()).unwrap();
    let m = build_extension(&c).unwrap();
    for a in 0..6 {
        for b in 0..6 {
            let want = if (a + 3 == b) || (b + 3 == a) { 1 } else { 0 };
            assert!(m.g()[a][b].equals(&RationalExpr::int(want)));
        }
    }
    assert!(m.block_invariants_hold());
    let cm = m.compile(&ParamValues::new()).unwrap();
    let acc = cm
        .acceleration(&[0.1, 0.2, 0.3, 1.0, -1.0, 2.0], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        .unwrap();
    assert_eq!(acc, [0.0; 6]);
    let jet = c.compile_with_derivatives(&ParamValues::new()).unwrap().jet(&[0.0; 3]).unwrap();
    let (a, b) = jacobi_matrices(&jet, &[1.0, -1.0, 0.5]);
    assert_eq!(a, [[0.0; 3]; 3]);
    assert_eq!(b, [[0.0; 3]; 3]);
}

#[test]
fn lorenz_metric_entry() {
    let c = build_connection(&catalog("lorenz").unwrap().field).unwrap();
    let m = build_extension(&c).unwrap();
    assert!(m.block_invariants_hold());
    let mut at = lorenz_values();
    for (k, v) in [1.0, 1.0, 1.0, 0.0, 1.0, 0.0].into_iter().enumerate() {
        at.insert(Symbol::coordinate(k), v);
    }
    // −2 Π^2_11 with Π^2_11 = −2340/6109
    let g11 = m.g()[0][0].evaluate(&at).unwrap();
    assert!((g11 - 4680.0 / 6109.0).abs() < 1e-14);
}

#[test]
fn determinant_is_minus_one_for_catalog() {
    for name in catalog_names() {
        let c = build_connection(&catalog(name).unwrap().field).unwrap();
        let m = build_extension(&c).unwrap();
        let det = m.determinant().unwrap();
        assert_eq!(det.as_constant(), Some(BigRational::from_integer((-1).into())), "{name}");
    }
}

#[test]
fn closed_form_inverse() {
    let c = build_connection(&catalog("triple_product").unwrap().field).unwrap();
    let m = build_extension(&c).unwrap();
    let inv = m.inverse();
    for a in 0..6 {
        for b in 0..6 {
            let mut acc = RationalExpr::zero();
            for d in 0..6 {
                acc = acc.checked_add(&m.g()[a][d].checked_mul(&inv[d][b]).unwrap()).unwrap();
            }
            let want = RationalExpr::int(if a == b { 1 } else { 0 });
            assert!(acc.equals(&want));
        }
    }
}

fn random_state(rng: &mut impl Rng) -> ([f64; 6], [f64; 6]) {
    let q = core::array::from_fn(|k| if k < 3 { rng.gen_range(-4.0..4.0) } else { rng.gen_range(-1.0..1.0) });
    let v = core::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    (q, v)
}

#[test]
fn decomposition_and_fiber_transport() {
    let params = lorenz_values();
    let c = build_connection(&catalog("lorenz").unwrap().field).unwrap();
    let cc = c.compile_with_derivatives(&params).unwrap();
    let m = build_extension(&c).unwrap().compile(&params).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let (q, v) = random_state(&mut rng);
        let (pos, vel) = ([q[0], q[1], q[2]], [v[0], v[1], v[2]]);
        let (psi, psi_dot) = ([q[3], q[4], q[5]], [v[3], v[4], v[5]]);
        let acc6 = m.acceleration(&q, &v).unwrap();
        let acc3 = geodesic_rhs(&cc, &pos, &vel).unwrap();
        let scale = 1.0 + acc6.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for k in 0..3 {
            assert!((acc6[k] - acc3[k]).abs() < 1e-12 * scale);
        }

        let jet = cc.jet(&pos).unwrap();
        // expanded form: Ψ̈ = −A Ψ̇ − B Ψ
        let (a, b) = jacobi_matrices(&jet, &vel);
        for k in 0..3 {
            let want: f64 = -(0..3).map(|l| a[k][l] * psi_dot[l] + b[k][l] * psi[l]).sum::<f64>();
            assert!((acc6[3 + k] - want).abs() < 1e-10 * scale, "{} vs {want}", acc6[3 + k]);
        }

        // covariant form: Ψ̈_k = Φ̇_k + d/ds(Π^l_jk ẋ^j Ψ_l)
        let phi = covariant_psi_rate(&jet, &vel, &psi, &psi_dot);
        let (dpsi, dphi) = transport_rhs(&jet, &vel, &psi, &phi);
        for k in 0..3 {
            assert!((dpsi[k] - psi_dot[k]).abs() < 1e-12 * scale);
            let mut total = dphi[k];
            for l in 0..3 {
                for j in 0..3 {
                    let dpi_ds: f64 = (0..3).map(|n| jet.dpi[n][l][j][k] * vel[n]).sum();
                    total += dpi_ds * vel[j] * psi[l]
                        + jet.pi[l][j][k] * acc3[j] * psi[l]
                        + jet.pi[l][j][k] * vel[j] * psi_dot[l];
                }
            }
            assert!((acc6[3 + k] - total).abs() < 1e-10 * scale);
        }
    }
}

#[test]
fn e_matrix_special_cases() {
    let b = [[1.0, 2.0, 0.0], [0.0, -1.0, 3.0], [4.0, 0.0, 0.5]];
    let s = [0.0, 0.1, 0.3, 0.6];
    let zero = JacobiSystem {
        s: s.to_vec(),
        a: alloc::vec![[[0.0; 3]; 3]; 4],
        b: alloc::vec![b; 4],
    };
    let e = invariant_e(&zero).unwrap();
    assert!(e.e.iter().all(|m| *m == b));

    let a = [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 2.0]];
    let constant = JacobiSystem {
        a: alloc::vec![a; 4],
        ..zero.clone()
    };
    let e = invariant_e(&constant).unwrap();
    // A² = diag(−1, −1, 4)
    let want = [[1.25, 2.0, 0.0], [0.0, -0.75, 3.0], [4.0, 0.0, -0.5]];
    for m in &e.e {
        for r in 0..3 {
            for c in 0..3 {
                assert!((m[r][c] - want[r][c]).abs() < 1e-12);
            }
        }
    }

    let short = JacobiSystem {
        s: alloc::vec![0.0, 1.0],
        a: alloc::vec![a; 2],
        b: alloc::vec![b; 2],
    };
    assert_eq!(invariant_e(&short).unwrap_err(), ExtensionError::TooFewSamples(2));
}

#[test]
fn sample_derivative_is_second_order() {
    let f = |s: f64| [[s.sin(), s * s, 0.0], [0.0, s.exp(), 1.0], [s.cos(), 0.0, s]];
    let df = |s: f64| [[s.cos(), 2.0 * s, 0.0], [0.0, s.exp(), 0.0], [-s.sin(), 0.0, 1.0]];
    let err = |n: usize| {
        // mildly nonuniform grid on [0, 1]
        let s: Vec<f64> = (0..=n).map(|i| {
            let t = i as f64 / n as f64;
            t + 0.1 * t * (1.0 - t)
        }).collect();
        let a: Vec<_> = s.iter().map(|&x| f(x)).collect();
        let d = sample_derivative(&s, &a).unwrap();
        let mut worst = 0.0f64;
        for (i, &x) in s.iter().enumerate() {
            let want = df(x);
            for r in 0..3 {
                for c in 0..3 {
                    worst = worst.max((d[i][r][c] - want[r][c]).abs());
                }
            }
        }
        worst
    };
    let (e1, e2) = (err(40), err(80));
    let order = (e1 / e2).log2();
    assert!(order > 1.8, "order {order}");
}

#[test]
fn eigenvalues() {
    let d = eigenvalues3(&[[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]]);
    assert_eq!(d.map(|(re, _)| (re * 1e9).round() / 1e9), [-1.0, 2.0, 3.0]);
    // rotation by 90° in the xy plane, scale 2 on z
    let r = eigenvalues3(&[[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 2.0]]);
    assert!((r[0].0).abs() < 1e-12 && (r[0].1 + 1.0).abs() < 1e-12);
    assert!((r[1].0).abs() < 1e-12 && (r[1].1 - 1.0).abs() < 1e-12);
    assert!((r[2].0 - 2.0).abs() < 1e-12 && r[2].1 == 0.0);
}
