use nonholo_core::geometry::build_connection;
use nonholo_core::symcore::RationalExpr;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::system::System;
use crate::SCHEMA;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExprReport {
    pub text: String,
    pub is_zero: bool,
}

impl From<&RationalExpr> for ExprReport {
    fn from(e: &RationalExpr) -> ExprReport {
        ExprReport {
            text: e.to_string(),
            is_zero: e.is_zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionSummary {
    pub delta: String,
    /// Nonzero coefficients among the 18 distinct `Π^i_jk`.
    pub nonzero_coefficients: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernSimonsAvailability {
    pub available: bool,
    pub modes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub system: String,
    pub parameters: Vec<String>,
    pub field: [String; 3],
    pub curl: [String; 3],
    pub holonomicity: ExprReport,
    pub exactness_residuals: [ExprReport; 3],
    pub exact: bool,
    pub euler_contraction: ExprReport,
    pub connection: Option<ConnectionSummary>,
    pub chern_simons: ChernSimonsAvailability,
}

pub fn analyze(sys: &System) -> Result<AnalysisReport> {
    let f = &sys.field;
    let curl = f.curl()?;
    let [a, b, c] = f.exactness_residuals()?;
    let residuals = [ExprReport::from(&a), ExprReport::from(&b), ExprReport::from(&c)];
    let connection = build_connection(f).ok().map(|c| ConnectionSummary {
        delta: c.delta().to_string(),
        nonzero_coefficients: c.nonzero_count(),
    });
    let modes = ["partial", "covariant"].iter().map(|m| m.to_string()).collect();
    Ok(AnalysisReport {
        schema: SCHEMA.to_string(),
        system: sys.name.clone(),
        parameters: sys.free.iter().map(|s| s.name().to_string()).collect(),
        field: f.components().clone().map(|e| e.to_string()),
        curl: curl.components().clone().map(|e| e.to_string()),
        holonomicity: ExprReport::from(&f.holonomicity()?),
        exact: residuals.iter().all(|r| r.is_zero),
        exactness_residuals: residuals,
        euler_contraction: ExprReport::from(&f.euler_contraction()?),
        chern_simons: ChernSimonsAvailability {
            available: connection.is_some(),
            modes,
        },
        connection,
    })
}

impl AnalysisReport {
    /// Every expression text in the report, labelled.
    pub fn expressions(&self) -> Vec<(String, &str)> {
        let mut out = Vec::new();
        for (i, t) in self.field.iter().enumerate() {
            out.push((format!("field[{i}]"), t.as_str()));
        }
        for (i, t) in self.curl.iter().enumerate() {
            out.push((format!("curl[{i}]"), t.as_str()));
        }
        out.push(("holonomicity".to_string(), self.holonomicity.text.as_str()));
        for (i, r) in self.exactness_residuals.iter().enumerate() {
            out.push((format!("exactness_residuals[{i}]"), r.text.as_str()));
        }
        out.push(("euler_contraction".to_string(), self.euler_contraction.text.as_str()));
        if let Some(c) = &self.connection {
            out.push(("connection.delta".to_string(), c.delta.as_str()));
        }
        out
    }
}
