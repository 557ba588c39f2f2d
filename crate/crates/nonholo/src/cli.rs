//! Command-line interface. [`run`] returns the process exit code.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonholo_core::extension::build_extension;
use nonholo_core::field::{catalog, catalog_names};
use nonholo_core::geometry::{build_connection, chern_simons_density, CsMode};
use nonholo_core::ode::{
    add_base_deviation, asymptotic_directions, integrate_asymptotic, integrate_extended, integrate_flow,
    integrate_geodesic, IntegratorConfig, Method, Termination, Trajectory,
};
use nonholo_core::symcore::ParamValues;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{chern_simons_box, Box3, ChernSimonsReport};
use crate::report::analyze;
use crate::system::{parse_param_args, System, SystemSource};
use crate::trajectory_csv::write_trajectory;
use crate::{thread_pool, verify, SCHEMA};

#[derive(Debug, Parser)]
#[command(name = "nonholo", version, about = "Geometry of 3D Pfaff equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holonomicity, exactness, Euler contraction and connection summary (JSON).
    Analyze {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integral curve of the field (CSV).
    Flow {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        integ: IntegrateArgs,
        /// Initial point x,y,z.
        #[arg(long)]
        init: String,
    },
    /// Geodesic of the connection with the contraction monitor (CSV).
    Geodesic {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        integ: IntegrateArgs,
        #[arg(long)]
        init: String,
        /// Initial velocity x,y,z.
        #[arg(long)]
        vel: String,
    },
    /// Asymptotic line by branch continuation (CSV).
    Asymptotic {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        integ: IntegrateArgs,
        #[arg(long)]
        init: String,
        /// Leave along the asymptotic direction closest to x,y,z.
        #[arg(long, conflicts_with = "branch")]
        dir: Option<String>,
        /// Leave along branch 0 or 1 of the closed form.
        #[arg(long)]
        branch: Option<u8>,
    },
    /// Geodesic of the six-dimensional extension (CSV).
    Extend {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        integ: IntegrateArgs,
        /// x,y,z,psi1,psi2,psi3
        #[arg(long)]
        init: String,
        /// Six velocity components.
        #[arg(long)]
        vel: String,
    },
    /// Chern–Simons density and its midpoint quadrature over a box (JSON).
    ChernSimons {
        #[command(flatten)]
        system: SystemArgs,
        /// x0,x1,y0,y1,z0,z1
        #[arg(long = "box", allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Partial)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List catalog systems (JSON).
    Catalog {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite.
    Verify {
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// JSON system file.
    #[arg(long, required_unless_present = "catalog")]
    pub system: Option<PathBuf>,
    /// Catalog system name.
    #[arg(long, conflicts_with = "system")]
    pub catalog: Option<String>,
    /// Parameter value name=value, exact rationals such as 8/3.
    #[arg(long = "param", allow_hyphen_values = true)]
    pub params: Vec<String>,
}

impl SystemArgs {
    pub fn load(&self) -> Result<System> {
        let source = match (&self.system, &self.catalog) {
            (Some(p), None) => SystemSource::File(p.clone()),
            (None, Some(c)) => SystemSource::Catalog(c.clone()),
            _ => return Err(Error::Usage("give one of --system or --catalog".to_string())),
        };
        System::load(&source, &parse_param_args(&self.params)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rk4,
    Rkf45,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Partial,
    Covariant,
}

impl From<ModeArg> for CsMode {
    fn from(m: ModeArg) -> CsMode {
        match m {
            ModeArg::Partial => CsMode::Partial,
            ModeArg::Covariant => CsMode::Covariant,
        }
    }
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Rkf45)]
    pub method: MethodArg,
    /// Fixed step for rk4, initial step for rkf45.
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Relative and absolute tolerance for rkf45.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long = "s-end", default_value_t = 10.0)]
    pub s_end: f64,
    /// Sample the output on this grid instead of at every step.
    #[arg(long = "output-step")]
    pub output_step: Option<f64>,
    #[arg(long = "max-steps", default_value_t = 10_000_000)]
    pub max_steps: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl IntegrateArgs {
    pub fn config(&self) -> Result<IntegratorConfig> {
        let cfg = IntegratorConfig {
            method: match self.method {
                MethodArg::Rk4 => Method::Rk4,
                MethodArg::Rkf45 => Method::Rkf45,
            },
            step: self.step,
            rel_tol: self.tol,
            abs_tol: self.tol,
            max_steps: self.max_steps,
            s_end: self.s_end,
            output_step: self.output_step,
        };
        cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn parse_vec<const N: usize>(flag: &str, text: &str) -> Result<[f64; N]> {
    let v: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Usage(format!("--{flag} `{text}` is not a list of numbers")))?;
    v.try_into()
        .map_err(|_| Error::Usage(format!("--{flag} needs {N} comma-separated numbers")))
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let target = out.as_deref().unwrap_or(Path::new("<stdout>"));
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::io(target, e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(target, e))
}

fn emit_trajectory(out: &Option<PathBuf>, t: &Trajectory) -> Result<u8> {
    let target = out.as_deref().unwrap_or(Path::new("<stdout>"));
    let mut w = open_out(out)?;
    write_trajectory(&mut w, t)?;
    w.flush().map_err(|e| Error::io(target, e))?;
    Ok(match t.termination {
        Termination::SingularPoint => {
            eprintln!("nonholo: trajectory stopped at a singular point (s = {})", t.s.last().copied().unwrap_or(0.0));
            3
        }
        Termination::StepLimit => {
            eprintln!("nonholo: step limit reached");
            0
        }
        _ => 0,
    })
}

fn require_assigned(sys: &System) -> Result<()> {
    if sys.free.is_empty() {
        Ok(())
    } else {
        let names: Vec<&str> = sys.free.iter().map(|s| s.name()).collect();
        Err(Error::Usage(format!("missing values for parameters: {}", names.join(", "))))
    }
}

#[derive(Serialize)]
struct CatalogItem {
    name: &'static str,
    parameters: Vec<String>,
    field: [String; 3],
    projective: bool,
}

#[derive(Serialize)]
struct CatalogReport {
    schema: &'static str,
    systems: Vec<CatalogItem>,
}

#[derive(Serialize)]
struct ChernSimonsOutput {
    density: String,
    #[serde(flatten)]
    report: ChernSimonsReport,
}

fn execute(cmd: Command) -> Result<u8> {
    let none = ParamValues::new();
    match cmd {
        Command::Analyze { system, out } => {
            write_json(&out, &analyze(&system.load()?)?)?;
            Ok(0)
        }
        Command::Flow { system, integ, init } => {
            let sys = system.load()?;
            require_assigned(&sys)?;
            let t = integrate_flow(&sys.field.compile(&none)?, parse_vec("init", &init)?, &integ.config()?)?;
            emit_trajectory(&integ.out, &t)
        }
        Command::Geodesic { system, integ, init, vel } => {
            let sys = system.load()?;
            require_assigned(&sys)?;
            let c = build_connection(&sys.field)?.compile(&none)?;
            let t = integrate_geodesic(&c, parse_vec("init", &init)?, parse_vec("vel", &vel)?, &integ.config()?)?;
            emit_trajectory(&integ.out, &t)
        }
        Command::Asymptotic { system, integ, init, dir, branch } => {
            let sys = system.load()?;
            require_assigned(&sys)?;
            let f = sys.field.compile(&none)?;
            let p: [f64; 3] = parse_vec("init", &init)?;
            let direction = match dir {
                Some(d) => parse_vec("dir", &d)?,
                None => {
                    let set = asymptotic_directions(&f, &p)?;
                    let want = branch.unwrap_or(0);
                    set.directions
                        .iter()
                        .find(|d| d.branch == want)
                        .map(|d| d.direction)
                        .ok_or(Error::Ode(nonholo_core::ode::OdeError::NoDirection))?
                }
            };
            let t = integrate_asymptotic(&f, p, direction, &integ.config()?)?;
            emit_trajectory(&integ.out, &t)
        }
        Command::Extend { system, integ, init, vel } => {
            let sys = system.load()?;
            require_assigned(&sys)?;
            let conn = build_connection(&sys.field)?;
            let m = build_extension(&conn)?.compile(&none)?;
            let cfg = integ.config()?;
            let mut t = integrate_extended(&m, parse_vec("init", &init)?, parse_vec("vel", &vel)?, &cfg)?;
            add_base_deviation(&mut t, &conn.compile(&none)?, &cfg)?;
            emit_trajectory(&integ.out, &t)
        }
        Command::ChernSimons { system, region, grid, mode, out } => {
            let sys = system.load()?;
            require_assigned(&sys)?;
            let region = Box3::parse(&region)?;
            let density = chern_simons_density(&build_connection(&sys.field)?, mode.into())?;
            let report = chern_simons_box(&sys, mode.into(), &region, grid)?;
            write_json(
                &out,
                &ChernSimonsOutput {
                    density: density.to_string(),
                    report,
                },
            )?;
            Ok(0)
        }
        Command::Catalog { out } => {
            let mut systems = Vec::new();
            for name in catalog_names() {
                let e = catalog(name)?;
                systems.push(CatalogItem {
                    name,
                    parameters: e.params.iter().map(|s| s.name().to_string()).collect(),
                    field: e.field.components().clone().map(|c| c.to_string()),
                    projective: e.planar.is_some(),
                });
            }
            write_json(&out, &CatalogReport { schema: SCHEMA, systems })?;
            Ok(0)
        }
        Command::Verify { out, inject } => {
            let report = verify::run(inject.as_deref())?;
            print!("{}", report.to_text());
            if out.is_some() {
                write_json(&out, &report)?;
            }
            if report.passed {
                Ok(0)
            } else {
                Err(Error::Verification(report.failures()))
            }
        }
    }
}

/// Parses `args` and runs the command, printing errors to standard error.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| execute(cli.command)));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nonholo: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_flags() {
        assert_eq!(parse_vec::<3>("init", "1, 2,-3").unwrap(), [1.0, 2.0, -3.0]);
        assert!(parse_vec::<3>("init", "1,2").is_err());
        assert!(parse_vec::<3>("init", "1,b,2").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["nonholo", "analyze"]), 2);
        assert_eq!(run(["nonholo", "bogus"]), 2);
        assert_eq!(run(["nonholo", "analyze", "--catalog", "nope"]), 2);
        assert_eq!(
            run(["nonholo", "flow", "--catalog", "lorenz", "--init", "1,1,1", "--s-end", "0.1"]),
            2,
            "unassigned parameters"
        );
    }
}
