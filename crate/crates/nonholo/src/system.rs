//! Loading a system from the catalog or from a JSON system file.
//!
//! A system file holds either a catalog reference
//!
//! ```json
//! { "catalog": "lorenz", "params": { "sigma": 10, "r": 28, "b": "8/3" } }
//! ```
//!
//! or explicit components, with `symbols` naming parameters left symbolic:
//!
//! ```json
//! { "P": "a*y*z", "Q": "-x*z", "R": "x*y", "params": { "a": 2 } }
//! { "planar": { "p": "y", "q": "-x + k*y" }, "symbols": ["k"] }
//! ```
//!
//! `planar` builds the projective extension of the planar system.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nonholo_core::field::{catalog_with, projective_extension, PlanarPolySystem, VectorField3};
use nonholo_core::symcore::{parse_expr, parse_rational, Polynomial, Symbol, SymbolTable};
use num_rational::BigRational;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ParamText {
    Text(String),
    Number(serde_json::Number),
}

impl ParamText {
    fn parse(&self) -> Result<BigRational> {
        let text = match self {
            ParamText::Text(s) => s.clone(),
            ParamText::Number(n) => n.to_string(),
        };
        Ok(parse_rational(&text)?)
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct PlanarText {
    pub p: String,
    pub q: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub catalog: Option<String>,
    #[serde(rename = "P", default)]
    pub p: Option<String>,
    #[serde(rename = "Q", default)]
    pub q: Option<String>,
    #[serde(rename = "R", default)]
    pub r: Option<String>,
    #[serde(default)]
    pub planar: Option<PlanarText>,
    #[serde(default)]
    pub params: BTreeMap<String, ParamText>,
    #[serde(default)]
    pub symbols: Vec<String>,
}

impl SystemFile {
    pub fn read(path: &Path) -> Result<SystemFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::SystemFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Where the system comes from.
#[derive(Debug, Clone)]
pub enum SystemSource {
    Catalog(String),
    File(PathBuf),
}

/// A field with every supplied parameter substituted exactly.
#[derive(Debug, Clone)]
pub struct System {
    pub name: String,
    pub field: VectorField3,
    pub planar: Option<PlanarPolySystem>,
    /// Parameters still symbolic.
    pub free: Vec<Symbol>,
}

/// Parses `name=value` pairs with exact rational values.
pub fn parse_param_args(args: &[String]) -> Result<BTreeMap<String, BigRational>> {
    let mut out = BTreeMap::new();
    for a in args {
        let (k, v) = a
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("parameter `{a}` is not of the form name=value")))?;
        out.insert(k.trim().to_string(), parse_rational(v.trim())?);
    }
    Ok(out)
}

impl System {
    /// Loads the system; `overrides` take precedence over file parameters.
    pub fn load(source: &SystemSource, overrides: &BTreeMap<String, BigRational>) -> Result<System> {
        match source {
            SystemSource::Catalog(name) => System::from_catalog(name, overrides),
            SystemSource::File(path) => {
                let file = SystemFile::read(path)?;
                System::from_file(&file, overrides).map_err(|e| match e {
                    Error::Usage(message) => Error::SystemFile {
                        path: path.clone(),
                        message,
                    },
                    other => other,
                })
            }
        }
    }

    pub fn from_catalog(name: &str, params: &BTreeMap<String, BigRational>) -> Result<System> {
        let entry = catalog_with(name, params)?;
        Ok(System {
            name: entry.name.to_string(),
            field: entry.field,
            planar: entry.planar,
            free: entry.params,
        })
    }

    pub fn from_file(file: &SystemFile, overrides: &BTreeMap<String, BigRational>) -> Result<System> {
        let mut params = BTreeMap::new();
        for (k, v) in &file.params {
            params.insert(k.clone(), v.parse()?);
        }
        params.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));

        let explicit = [&file.p, &file.q, &file.r].iter().filter(|c| c.is_some()).count();
        let sources = usize::from(file.catalog.is_some()) + usize::from(explicit > 0) + usize::from(file.planar.is_some());
        if sources != 1 {
            return Err(Error::Usage(
                "give exactly one of `catalog`, `P`/`Q`/`R` or `planar`".to_string(),
            ));
        }
        if let Some(name) = &file.catalog {
            let mut sys = System::from_catalog(name, &params)?;
            if let Some(n) = &file.name {
                sys.name = n.clone();
            }
            return Ok(sys);
        }

        let mut names: Vec<&str> = params.keys().map(String::as_str).collect();
        names.extend(file.symbols.iter().map(String::as_str));
        let table = SymbolTable::with_params(names)?;
        let values: BTreeMap<Symbol, BigRational> =
            params.iter().map(|(k, v)| (Symbol::param(k), v.clone())).collect();
        let name = file.name.clone().unwrap_or_else(|| "custom".to_string());

        let (field, planar) = if let Some(pl) = &file.planar {
            let poly = |s: &str| -> Result<Polynomial> {
                parse_expr(s, &table)?
                    .as_polynomial()
                    .map(|p| p.specialize(&values))
                    .ok_or_else(|| Error::Usage(format!("planar component `{s}` is not a polynomial")))
            };
            let sys = PlanarPolySystem::new(poly(&pl.p)?, poly(&pl.q)?)?;
            (projective_extension(&sys)?, Some(sys))
        } else {
            if explicit != 3 {
                return Err(Error::Usage("`P`, `Q` and `R` must all be given".to_string()));
            }
            let comp = |c: &Option<String>| parse_expr(c.as_deref().unwrap_or_default(), &table);
            let f = VectorField3::new(comp(&file.p)?, comp(&file.q)?, comp(&file.r)?)?;
            (f.specialize(&values)?, None)
        };
        let free = field.parameters();
        Ok(System {
            name,
            field,
            planar,
            free,
        })
    }

    /// Symbol table that re-reads expressions printed for this system.
    pub fn symbol_table(&self) -> SymbolTable {
        SymbolTable::with_params(self.free.iter().map(|s| s.name().to_string())).expect("names came from a table")
    }
}
