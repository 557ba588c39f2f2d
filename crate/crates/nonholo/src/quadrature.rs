//! Midpoint-rule integration over boxes and the Chern–Simons box integral.

use nonholo_core::geometry::{
    build_connection, chern_simons_numeric, lorenz_cs_reference, CompiledConnection, CsMode,
};
use nonholo_core::symcore::{CompiledExpr, ParamValues, Symbol};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::System;
use crate::SCHEMA;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3 {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Box3 {
    /// Parses `x0,x1,y0,y1,z0,z1`.
    pub fn parse(text: &str) -> Result<Box3> {
        let v: Vec<f64> = text
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Usage(format!("box `{text}` is not six numbers")))?;
        if v.len() != 6 {
            return Err(Error::Usage(format!("box `{text}` is not six numbers")));
        }
        let b = Box3 {
            lo: [v[0], v[2], v[4]],
            hi: [v[1], v[3], v[5]],
        };
        if (0..3).any(|k| !(b.hi[k] > b.lo[k]) || !b.lo[k].is_finite() || !b.hi[k].is_finite()) {
            return Err(Error::Usage(format!("box `{text}` has an empty or infinite side")));
        }
        Ok(b)
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|k| self.hi[k] - self.lo[k]).product()
    }

    /// Cell centers of the uniform `n³` grid.
    pub fn midpoints(&self, n: usize) -> impl Iterator<Item = [f64; 3]> + '_ {
        let h: [f64; 3] = std::array::from_fn(|k| (self.hi[k] - self.lo[k]) / n as f64);
        (0..n * n * n).map(move |idx| {
            let ijk = [idx / (n * n), (idx / n) % n, idx % n];
            std::array::from_fn(|k| self.lo[k] + (ijk[k] as f64 + 0.5) * h[k])
        })
    }
}

/// `Σ f(center) · cell volume` over the `n³` grid, evaluated in parallel.
pub fn midpoint<F>(f: F, b: &Box3, n: usize) -> Result<f64>
where
    F: Fn(&[f64; 3]) -> Result<f64> + Sync,
{
    if n == 0 {
        return Err(Error::Usage("grid must be at least 1".to_string()));
    }
    let pts: Vec<[f64; 3]> = b.midpoints(n).collect();
    // evaluate in parallel, sum in grid order so the result does not depend
    // on the thread count
    let values = pts.par_iter().map(&f).collect::<Result<Vec<f64>>>()?;
    Ok(values.iter().sum::<f64>() * b.volume() / (n * n * n) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub grid: usize,
    pub value: f64,
    pub refined_grid: usize,
    pub refined_value: f64,
    /// `|refined − coarse| / |refined|`.
    pub relative_change: f64,
}

pub fn refine<F>(f: F, b: &Box3, n: usize) -> Result<Refinement>
where
    F: Fn(&[f64; 3]) -> Result<f64> + Sync,
{
    let value = midpoint(&f, b, n)?;
    let refined_value = midpoint(&f, b, 2 * n)?;
    Ok(Refinement {
        grid: n,
        value,
        refined_grid: 2 * n,
        refined_value,
        relative_change: if refined_value == 0.0 {
            (refined_value - value).abs()
        } else {
            ((refined_value - value) / refined_value).abs()
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDeviation {
    pub mode: String,
    pub max_relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernSimonsReport {
    pub schema: String,
    pub system: String,
    pub mode: String,
    #[serde(rename = "box")]
    pub region: Box3,
    pub quadrature: Refinement,
    /// Lorenz only: deviation from the closed form `L / (2M²)` per mode.
    pub reference_comparison: Option<Vec<ModeDeviation>>,
    pub matching_mode: Option<String>,
}

/// Agreement threshold with the reference Lorenz density.
pub const REFERENCE_TOLERANCE: f64 = 1e-8;

fn singular_at(p: &[f64; 3]) -> Error {
    Error::Singular(format!("box meets Δ = 0 or M = 0 near ({}, {}, {})", p[0], p[1], p[2]))
}

/// Density evaluator for a system whose parameters are all assigned.
pub struct DensityEvaluator {
    conn: CompiledConnection,
}

impl DensityEvaluator {
    pub fn new(sys: &System) -> Result<DensityEvaluator> {
        let c = build_connection(&sys.field)?;
        Ok(DensityEvaluator {
            conn: c.compile_with_derivatives(&ParamValues::new())?,
        })
    }

    pub fn density(&self, p: &[f64; 3], mode: CsMode) -> Result<f64> {
        let jet = self.conn.jet(p).map_err(|_| singular_at(p))?;
        let v = chern_simons_numeric(&jet, mode);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(singular_at(p))
        }
    }
}

/// Lorenz closed form `L / (2M²)` for the given parameter values.
pub fn lorenz_reference(sigma: f64, r: f64, b: f64) -> Result<CompiledExpr> {
    let params: ParamValues = [("sigma", sigma), ("r", r), ("b", b)]
        .into_iter()
        .map(|(k, v)| (Symbol::param(k), v))
        .collect();
    Ok(CompiledExpr::compile(&lorenz_cs_reference(), &params)?)
}

fn lorenz_parameters(sys: &System) -> Option<(f64, f64, f64)> {
    use nonholo_core::symcore::{rational_to_f64, Monomial, RationalExpr};
    if sys.name != "lorenz" || !sys.free.is_empty() {
        return None;
    }
    // recover σ, r, b from the specialized components: P = σ(y − x), Q = rx − y − xz, R = xy − bz
    let coeff = |e: &RationalExpr, m: &[(Symbol, u32)]| {
        let p = e.as_polynomial()?;
        let mono = Monomial::from_powers(m.iter().cloned()).ok()?;
        Some(rational_to_f64(&p.coefficient(&mono)))
    };
    let f = sys.field.components();
    let sigma = coeff(&f[0], &[(Symbol::y(), 1)])?;
    let r = coeff(&f[1], &[(Symbol::x(), 1)])?;
    let b = -coeff(&f[2], &[(Symbol::z(), 1)])?;
    Some((sigma, r, b))
}

/// Integrates the density over the box on grids `n` and `2n`, after a
/// singularity scan, and compares against the reference Lorenz density when
/// the system is Lorenz.
pub fn chern_simons_box(sys: &System, mode: CsMode, region: &Box3, n: usize) -> Result<ChernSimonsReport> {
    let eval = DensityEvaluator::new(sys)?;
    let reference = match lorenz_parameters(sys) {
        Some((s, r, b)) => Some(lorenz_reference(s, r, b)?),
        None => None,
    };
    // singularity scan on a coarse grid including the corners
    let scan = 6;
    for i in 0..=scan {
        for j in 0..=scan {
            for k in 0..=scan {
                let t = [i, j, k].map(|v| v as f64 / scan as f64);
                let p: [f64; 3] = std::array::from_fn(|a| region.lo[a] + t[a] * (region.hi[a] - region.lo[a]));
                eval.density(&p, mode)?;
                if let Some(r) = &reference {
                    r.eval(&p).map_err(|_| singular_at(&p))?;
                }
            }
        }
    }
    let quadrature = refine(|p| eval.density(p, mode), region, n)?;
    let mut comparison = None;
    let mut matching = None;
    if let Some(r) = &reference {
        let mut devs = Vec::new();
        for m in [CsMode::Partial, CsMode::Covariant] {
            let pts: Vec<[f64; 3]> = region.midpoints(n).collect();
            let worst = pts
                .par_iter()
                .map(|p| -> Result<f64> {
                    let want = r.eval(p).map_err(|_| singular_at(p))?;
                    let got = eval.density(p, m)?;
                    Ok(((got - want) / want).abs())
                })
                .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
            if worst < REFERENCE_TOLERANCE && matching.is_none() {
                matching = Some(m.name().to_string());
            }
            devs.push(ModeDeviation {
                mode: m.name().to_string(),
                max_relative_deviation: worst,
            });
        }
        comparison = Some(devs);
    }
    Ok(ChernSimonsReport {
        schema: SCHEMA.to_string(),
        system: sys.name.clone(),
        mode: mode.name().to_string(),
        region: *region,
        quadrature,
        reference_comparison: comparison,
        matching_mode: matching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::parse_param_args;

    #[test]
    fn box_parsing() {
        let b = Box3::parse("1,2, 1,2,1,2").unwrap();
        assert_eq!(b.volume(), 1.0);
        assert!(Box3::parse("1,2,3").is_err());
        assert!(Box3::parse("2,1,0,1,0,1").is_err());
        assert!(Box3::parse("a,1,0,1,0,1").is_err());
    }

    #[test]
    fn midpoint_is_exact_for_linear_and_second_order() {
        let b = Box3 {
            lo: [0.0, 1.0, -1.0],
            hi: [1.0, 3.0, 0.0],
        };
        let lin = midpoint(|p| Ok(p[0] + 2.0 * p[1] - p[2]), &b, 3).unwrap();
        assert!((lin - (0.5 * 2.0 + 2.0 * 4.0 + 0.5 * 2.0)).abs() < 1e-12);
        let r = refine(|p| Ok(p[0] * p[0]), &b, 4).unwrap();
        // error of x² shrinks by four under halving
        let exact = 2.0 / 3.0;
        let ratio = (r.value - exact) / (r.refined_value - exact);
        assert!((ratio - 4.0).abs() < 1e-9);
    }

    #[test]
    fn flat_field_integrates_to_zero() {
        let file: crate::system::SystemFile = serde_json::from_str(r#"{ "P": "1", "Q": "2", "R": "3" }"#).unwrap();
        let sys = System::from_file(&file, &Default::default()).unwrap();
        let b = Box3::parse("0,1,0,1,0,1").unwrap();
        let r = chern_simons_box(&sys, CsMode::Partial, &b, 3).unwrap();
        assert_eq!(r.quadrature.value, 0.0);
        assert!(r.reference_comparison.is_none());
    }

    #[test]
    fn lorenz_parameters_are_recovered() {
        let p = parse_param_args(&["sigma=10".into(), "r=28".into(), "b=8/3".into()]).unwrap();
        let sys = System::from_catalog("lorenz", &p).unwrap();
        let (s, r, b) = lorenz_parameters(&sys).unwrap();
        assert_eq!((s, r), (10.0, 28.0));
        assert!((b - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn singular_box_is_reported() {
        let p = parse_param_args(&["sigma=10".into(), "r=28".into(), "b=8/3".into()]).unwrap();
        let sys = System::from_catalog("lorenz", &p).unwrap();
        let b = Box3::parse("-1,1,-1,1,-1,1").unwrap();
        let err = chern_simons_box(&sys, CsMode::Partial, &b, 2).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
