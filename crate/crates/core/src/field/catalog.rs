use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_rational::BigRational;

use super::{projective_extension, FieldError, PlanarPolySystem, VectorField3};
use crate::symcore::{parse_expr, Symbol, SymbolTable};

/// A named system with its parameters kept symbolic.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub field: VectorField3,
    pub params: Vec<Symbol>,
    /// Source planar system for projective entries.
    pub planar: Option<PlanarPolySystem>,
}

struct Def {
    name: &'static str,
    params: &'static [&'static str],
    body: Body,
}

enum Body {
    Field([&'static str; 3]),
    Planar([&'static str; 2]),
}

const DEFS: &[Def] = &[
    Def {
        name: "lorenz",
        params: &["sigma", "r", "b"],
        body: Body::Field(["sigma*(y - x)", "r*x - y - z*x", "x*y - b*z"]),
    },
    Def {
        name: "rossler",
        params: &["a", "b", "c"],
        body: Body::Field(["-y - z", "x + a*y", "b + x*z - c*z"]),
    },
    Def {
        name: "triple_product",
        params: &["a", "b", "c"],
        body: Body::Field(["a*y*z", "b*x*z", "c*x*y"]),
    },
    Def {
        name: "vdp_projective",
        params: &["mu"],
        body: Body::Planar(["y", "-x - x^2*y + mu^2*y"]),
    },
    Def {
        name: "quadratic10",
        params: &["k", "l", "m", "n", "a", "b", "c", "e", "f", "h"],
        body: Body::Planar([
            "k*x + l*y + a*x^2 + b*x*y + c*y^2",
            "m*x + n*y + e*x^2 + f*x*y + h*y^2",
        ]),
    },
    Def {
        name: "cubic_node",
        params: &["a", "b"],
        body: Body::Planar(["-y + a*x*(x^2 + y^2 - 1)", "x + b*y*(x^2 + y^2 - 1)"]),
    },
    Def {
        name: "quartic_center",
        params: &["A", "a"],
        body: Body::Planar(["-A*y + y*x^2 - x^4", "a*x - x^3"]),
    },
];

pub fn catalog_names() -> impl Iterator<Item = &'static str> {
    DEFS.iter().map(|d| d.name)
}

/// The named system with symbolic parameters.
pub fn catalog(name: &str) -> Result<CatalogEntry, FieldError> {
    let def = DEFS
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| FieldError::UnknownSystem(name.to_string()))?;
    let table = SymbolTable::with_params(def.params.iter().copied())?;
    let params = def.params.iter().map(|p| Symbol::param(p)).collect();
    let (field, planar) = match &def.body {
        Body::Field([p, q, r]) => (
            VectorField3::new(
                parse_expr(p, &table)?,
                parse_expr(q, &table)?,
                parse_expr(r, &table)?,
            )?,
            None,
        ),
        Body::Planar([p, q]) => {
            let poly = |s: &str| -> Result<_, FieldError> {
                Ok(parse_expr(s, &table)?
                    .as_polynomial()
                    .cloned()
                    .expect("catalog planar entries are polynomial"))
            };
            let sys = PlanarPolySystem::new(poly(p)?, poly(q)?)?;
            (projective_extension(&sys)?, Some(sys))
        }
    };
    Ok(CatalogEntry {
        name: def.name,
        field,
        params,
        planar,
    })
}

/// The named system with the given parameters replaced by exact values;
/// parameters not listed stay symbolic.
pub fn catalog_with(name: &str, values: &BTreeMap<String, BigRational>) -> Result<CatalogEntry, FieldError> {
    let entry = catalog(name)?;
    let mut subs = BTreeMap::new();
    for (k, v) in values {
        let s = entry
            .params
            .iter()
            .find(|p| p.name() == k)
            .ok_or_else(|| FieldError::UnexpectedParameter {
                system: name.to_string(),
                param: k.clone(),
            })?;
        subs.insert(s.clone(), v.clone());
    }
    let field = entry.field.specialize(&subs)?;
    let planar = match &entry.planar {
        Some(s) => Some(PlanarPolySystem::new(s.p().specialize(&subs), s.q().specialize(&subs))?),
        None => None,
    };
    Ok(CatalogEntry {
        name: entry.name,
        field,
        params: entry.params.into_iter().filter(|p| !subs.contains_key(p)).collect(),
        planar,
    })
}
