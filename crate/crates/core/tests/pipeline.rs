use std::collections::BTreeMap;

use nonholo_core::extension::build_extension;
use nonholo_core::field::{catalog_with, projective_extension, PlanarPolySystem};
use nonholo_core::geometry::build_connection;
use nonholo_core::ode::{integrate_geodesic, IntegratorConfig, Termination};
use nonholo_core::symcore::{parse_expr, parse_rational, ParamValues, SymbolTable};

fn lorenz_params() -> BTreeMap<String, num_rational::BigRational> {
    [("sigma", "10"), ("r", "28"), ("b", "8/3")]
        .into_iter()
        .map(|(k, v)| (k.to_string(), parse_rational(v).unwrap()))
        .collect()
}

#[test]
fn lorenz_from_text_to_geodesic() {
    let entry = catalog_with("lorenz", &lorenz_params()).unwrap();
    assert!(entry.field.parameters().is_empty());
    let conn = build_connection(&entry.field).unwrap();
    let c = conn.compile(&ParamValues::new()).unwrap();
    let n = entry.field.compile(&ParamValues::new()).unwrap().eval(&[1.0, 2.0, 3.0]).unwrap();
    // n × e_z lies in the tangent plane
    let vel = [n[1], -n[0], 0.0];
    let len = (vel[0] * vel[0] + vel[1] * vel[1]).sqrt();
    let vel = [vel[0] / len, vel[1] / len, 0.0];
    let t = integrate_geodesic(&c, [1.0, 2.0, 3.0], vel, &IntegratorConfig::rkf45(1e-10, 2.0)).unwrap();
    assert_eq!(t.termination, Termination::Completed);
    assert!(t.monitor("pfaff_contraction").unwrap().iter().all(|v| v.abs() < 1e-8));

    let m = build_extension(&conn).unwrap();
    assert_eq!(m.determinant().unwrap().as_constant().unwrap(), parse_rational("-1").unwrap());
}

#[test]
fn parsed_planar_system_extends_holonomically() {
    let t = SymbolTable::with_params(["k"]).unwrap();
    let p = parse_expr("x - y + k*x^2", &t).unwrap();
    let q = parse_expr("x*y + y^3", &t).unwrap();
    let sys = PlanarPolySystem::new(p.as_polynomial().unwrap().clone(), q.as_polynomial().unwrap().clone()).unwrap();
    let f = projective_extension(&sys).unwrap();
    assert!(f.holonomicity().unwrap().is_zero());
    assert!(f.euler_contraction().unwrap().is_zero());
}
