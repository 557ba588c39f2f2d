//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so every line is shown.

use std::collections::BTreeMap;

use nonholo::tangent_velocity;
use nonholo::verify::{
    contraction_drift, cs_lorenz_comparison, decomposition_errors, power_law_drift, power_law_exponent,
    power_law_roots, vdp_slope_residuals,
};
use nonholo_core::extension::build_extension;
use nonholo_core::field::{catalog, catalog_names, catalog_with, CompiledField};
use nonholo_core::geometry::{build_connection, lorenz_conic_residual};
use nonholo_core::ode::{asymptotic_directions, integrate_extended, integrate_flow, IntegratorConfig, Termination};
use nonholo_core::symcore::{parse_expr, ParamValues, Symbol, SymbolTable};
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn values(pairs: &[(&str, f64)]) -> ParamValues {
    pairs.iter().map(|(k, v)| (Symbol::param(k), *v)).collect()
}

fn lorenz_values() -> ParamValues {
    values(&[("sigma", 10.0), ("r", 28.0), ("b", 8.0 / 3.0)])
}

fn holonomicity_equals(name: &str, want: &str, params: &[&str]) -> Outcome {
    let h = catalog(name).map_err(|e| e.to_string())?.field.holonomicity().map_err(|e| e.to_string())?;
    let t = SymbolTable::with_params(params.iter().copied()).unwrap();
    let want = parse_expr(want, &t).unwrap();
    let diff = h.checked_sub(&want).unwrap();
    if diff.is_zero() {
        Ok(format!("(N, rot N) = {h}"))
    } else {
        Err(format!("difference {diff}"))
    }
}

fn criterion_1() -> Outcome {
    holonomicity_equals(
        "lorenz",
        "sigma*x*y - 2*sigma*x^2 + y^2 - b*z*r + b*z^2 + b*z*sigma",
        &["sigma", "r", "b"],
    )
}

fn criterion_2() -> Outcome {
    holonomicity_equals("rossler", "-x + x*z - a*y - a*y*z + 2*b - 2*c*z", &["a", "b", "c"])
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let names = ["k", "l", "m", "n", "a", "b", "c", "e", "f", "h"];
    for trial in 0..50 {
        let assignment: BTreeMap<String, BigRational> = names
            .iter()
            .map(|n| {
                let v = BigRational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=7).into());
                (n.to_string(), v)
            })
            .collect();
        let e = catalog_with("quadratic10", &assignment).map_err(|e| e.to_string())?;
        let h = e.field.holonomicity().map_err(|e| e.to_string())?;
        if !h.is_zero() {
            return Err(format!("assignment {trial}: {h}"));
        }
    }
    for name in ["vdp_projective", "quartic_center"] {
        let h = catalog(name).unwrap().field.holonomicity().map_err(|e| e.to_string())?;
        if !h.is_zero() {
            return Err(format!("{name}: {h}"));
        }
    }
    Ok("50 random quadratic10 assignments, vdp_projective and quartic_center are holonomic".to_string())
}

fn criterion_4() -> Outcome {
    let worst = contraction_drift(20, 10.0, 1e-10).map_err(|e| e.to_string())?;
    let line = format!("max |P ẋ + Q ẏ + R ż| = {worst:.3e} over 20 velocities, s ∈ [0, 10] (bound 1e-8)");
    if worst < 1e-8 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_5() -> Outcome {
    let e = decomposition_errors(5.0).map_err(|e| e.to_string())?;
    let line = format!(
        "base {:.3e}; fiber 6D/covariant {:.3e}, 6D/expanded {:.3e}, covariant/expanded {:.3e} (bound 1e-6)",
        e.base, e.psi_covariant, e.psi_expanded, e.psi_pair
    );
    if e.base < 1e-6 && e.psi_covariant < 1e-6 && e.psi_expanded < 1e-6 && e.psi_pair < 1e-6 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_6() -> Outcome {
    let minus_one = BigRational::from_integer((-1).into());
    for name in catalog_names() {
        let c = build_connection(&catalog(name).unwrap().field).map_err(|e| e.to_string())?;
        let det = build_extension(&c).unwrap().determinant().map_err(|e| e.to_string())?;
        if det.as_constant() != Some(minus_one.clone()) {
            return Err(format!("{name}: det = {det}"));
        }
    }
    // metric norm along extended geodesics of two fields from several states
    let mut worst = decomposition_errors(5.0).map_err(|e| e.to_string())?.metric_drift;
    let rossler = values(&[("a", 0.2), ("b", 0.2), ("c", 5.7)]);
    let mut rng = StdRng::seed_from_u64(6);
    for (name, params) in [("lorenz", lorenz_values()), ("rossler", rossler)] {
        let conn = build_connection(&catalog(name).unwrap().field).unwrap();
        let m = build_extension(&conn).unwrap().compile(&params).unwrap();
        for _ in 0..3 {
            let q: [f64; 6] = std::array::from_fn(|k| if k < 3 { rng.gen_range(1.0..3.0) } else { rng.gen_range(-1.0..1.0) });
            let v: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-0.5..0.5));
            let t = integrate_extended(&m, q, v, &IntegratorConfig::rkf45(1e-10, 5.0)).map_err(|e| e.to_string())?;
            if t.termination != Termination::Completed {
                return Err(format!("{name} extended geodesic ended with {}", t.termination));
            }
            let g = t.monitor("metric_norm").unwrap();
            worst = worst.max(g.iter().map(|x| (x - g[0]).abs()).fold(0.0, f64::max));
        }
    }
    let line = format!("det g = -1 for all catalog fields; max g(ẋ, ẋ) drift {worst:.3e} (bound 1e-8)");
    if worst < 1e-8 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_7() -> Outcome {
    for (k, res) in power_law_roots() {
        if !res.is_zero() {
            return Err(format!("closed-form K = {k} leaves residual {res}"));
        }
    }
    let k = power_law_exponent(2, -1, 1)?;
    if k != BigRational::new((-1).into(), 3.into()) {
        return Err(format!("K(2, -1, 1) = {k}, expected -1/3"));
    }
    let drift = power_law_drift(-1.0 / 3.0, 2.0).map_err(|e| e.to_string())?;
    let line = format!("quadratic exact, K = {k}; max |z·y^(1/3) − C| = {drift:.3e} over s ∈ [0, 2] (bound 1e-6)");
    if drift < 1e-6 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_8() -> Outcome {
    for (k, res) in vdp_slope_residuals() {
        if !res.is_zero() {
            return Err(format!("k = {k} leaves {res}"));
        }
    }
    Ok("both slope families satisfy k² − μ²k + 1 = 0 and 2k² + 4μ²k − 1 = 0 exactly".to_string())
}

fn criterion_9() -> Outcome {
    let r = lorenz_conic_residual().map_err(|e| e.to_string())?;
    if r.is_zero() {
        Ok("M² − 4LN restricted to the conic is identically zero".to_string())
    } else {
        Err(format!("nonzero residual: {r}"))
    }
}

fn criterion_10() -> Outcome {
    let modes = cs_lorenz_comparison(100, 10).map_err(|e| e.to_string())?;
    let text = modes
        .iter()
        .map(|m| format!("{} {:.6e}", m.mode, m.max_relative_deviation))
        .collect::<Vec<_>>()
        .join(", ");
    match modes.iter().find(|m| m.max_relative_deviation < 1e-8) {
        Some(m) => Ok(format!("matching mode {}; max relative error {text}", m.mode)),
        None => Err(format!("no mode matches L/(2M²) within 1e-8; max relative error {text}")),
    }
}

/// Closed-form directions against a 10⁵-sample scan of the constraint
/// circle, sign changes refined by bisection.
fn scan_oracle(f: &CompiledField, p: &[f64; 3]) -> Vec<[f64; 3]> {
    let n = f.eval(p).unwrap();
    let jac = f.jacobian(p).unwrap();
    let q = |t: f64| {
        let u = tangent_velocity(&n, t);
        (0..3).map(|i| (0..3).map(|j| u[i] * jac[i][j] * u[j]).sum::<f64>()).sum::<f64>()
    };
    let samples = 100_000;
    let step = std::f64::consts::PI / samples as f64;
    let mut roots = Vec::new();
    for i in 0..samples {
        let (mut lo, mut hi) = (i as f64 * step, (i + 1) as f64 * step);
        if q(lo) == 0.0 {
            roots.push(tangent_velocity(&n, lo));
            continue;
        }
        if q(lo).signum() == q(hi).signum() {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if q(mid).signum() == q(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(tangent_velocity(&n, 0.5 * (lo + hi)));
    }
    roots
}

fn criterion_11() -> Outcome {
    let f = catalog("lorenz").unwrap().field.compile(&lorenz_values()).unwrap();
    let endpoint = |cfg: &IntegratorConfig| {
        let t = integrate_flow(&f, [1.0, 1.0, 1.0], cfg).unwrap();
        let (_, y) = t.last().unwrap();
        [y[0], y[1], y[2]]
    };
    let reference = endpoint(&IntegratorConfig::rkf45(1e-13, 1.0));
    let err = |h: f64| {
        let e = endpoint(&IntegratorConfig::rk4(h, 1.0));
        (0..3).map(|k| (e[k] - reference[k]).abs()).fold(0.0, f64::max)
    };
    let errs = [err(0.01), err(0.005), err(0.0025)];
    let order = errs.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    if order < 3.8 {
        return Err(format!("rk4 order {order:.3}, errors {errs:?}"));
    }

    let fields = [
        catalog("lorenz").unwrap().field.compile(&lorenz_values()).unwrap(),
        catalog("rossler").unwrap().field.compile(&values(&[("a", 0.2), ("b", 0.2), ("c", 5.7)])).unwrap(),
        catalog("triple_product").unwrap().field.compile(&values(&[("a", 2.0), ("b", -1.0), ("c", 1.0)])).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut compared = 0;
    for pair in 0..50 {
        let f = &fields[pair % 3];
        let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let set = asymptotic_directions(f, &p).map_err(|e| e.to_string())?;
        let oracle = scan_oracle(f, &p);
        if set.directions.len() != oracle.len() {
            return Err(format!("at {p:?}: {} closed-form vs {} scanned directions", set.directions.len(), oracle.len()));
        }
        for d in &set.directions {
            let u = d.direction;
            let angle = oracle
                .iter()
                .map(|o| (o[0] * u[0] + o[1] * u[1] + o[2] * u[2]).abs().min(1.0).acos())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(angle);
            compared += 1;
        }
    }
    let line = format!("rk4 order {order:.3}; {compared} directions on 50 pairs, max angle {worst:.3e} (bound 1e-6)");
    if worst < 1e-6 {
        Ok(line)
    } else {
        Err(line)
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("Lorenz holonomicity", criterion_1),
        ("Rössler holonomicity", criterion_2),
        ("projective-extension holonomicity", criterion_3),
        ("geodesic contraction identity", criterion_4),
        ("extension decomposition", criterion_5),
        ("extended metric determinant and norm", criterion_6),
        ("power law", criterion_7),
        ("van der Pol slopes", criterion_8),
        ("Lorenz singular conic", criterion_9),
        ("Chern–Simons cross-check", criterion_10),
        ("numerical hygiene", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|f| f == &id) {
            continue;
        }
        let start = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("acceptance {id:>2} PASS {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                println!("acceptance {id:>2} FAIL {name}: {d} [{secs:.1}s]");
                failed.push(id);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
