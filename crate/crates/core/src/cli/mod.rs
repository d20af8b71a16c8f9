//! Command-line front end: config loading, subcommand dispatch, output files.

pub mod config;
pub mod svg;
pub mod validate;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::caustic::{conjugate_time, extract_symbol, slice_with, CausticSlice, Side, SliceSettings};
use crate::classifier::classify;
use crate::flow::{hamiltonian, integrate, CotangentState};
use crate::model::FrameField;

pub use config::{ScenarioConfig, SideSelection};
pub use validate::{run_validation, Check, Status, ValidationReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("validation mismatch: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Validation(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "contact-caustic", version, about = "Conjugate locus slices and singularity symbols for 3D contact normal forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario JSON; defaults to the Heisenberg configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub h: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub side: Option<SideSelection>,
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub steps_per_period: Option<usize>,
    #[arg(long, global = true)]
    pub tol_energy: Option<f64>,
    /// Also write an SVG for `slice`.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Geodesic arc CSV for the config's `geodesic` request.
    Geodesic,
    /// First conjugate times over a (φ, r) grid.
    Conjugate,
    /// Slice CSV plus cusp/crossing JSON.
    Slice,
    /// Canonical symbol of each slice.
    Symbol,
    /// Closed-form classifier report.
    Classify,
    /// Numeric vs closed-form cross-check suite.
    Validate,
    /// SVG of each slice.
    Plot,
}

impl Cli {
    /// Config file (or defaults) with flag overrides applied.
    pub fn scenario(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig { name: "heisenberg".into(), ..Default::default() },
        };
        if let Some(h) = self.h {
            cfg.h = h;
        }
        if let Some(s) = self.side {
            cfg.side = s;
        }
        if let Some(n) = self.grid {
            cfg.n_grid = n;
        }
        if let Some(n) = self.steps_per_period {
            cfg.steps_per_period = n;
        }
        if let Some(t) = self.tol_energy {
            cfg.tol_energy = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let p = dir.join(name);
    std::fs::write(&p, contents)?;
    Ok(p)
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn field(cfg: &ScenarioConfig) -> Result<FrameField, CliError> {
    FrameField::new(&cfg.coefficients).map_err(|e| CliError::Config(e.to_string()))
}

fn slices(cfg: &ScenarioConfig) -> Result<Vec<CausticSlice>, CliError> {
    let f = field(cfg)?;
    let settings = SliceSettings { n_grid: cfg.n_grid, integrator: cfg.integrator(), ..Default::default() };
    cfg.side.sides().into_iter().map(|s| slice_with(&f, cfg.h, s, &settings).map_err(numerical)).collect()
}

fn title(cfg: &ScenarioConfig, side: Side, h: f64) -> String {
    let name = if cfg.name.is_empty() { "slice" } else { cfg.name.as_str() };
    format!("{name}, side {}, h = {h}", side.label())
}

fn slice_json(s: &CausticSlice) -> serde_json::Value {
    json!({
        "h": s.h,
        "side": s.side.label(),
        "n_samples": s.samples.len(),
        "failed": s.failed,
        "collapsed": s.collapsed,
        "cusp_angles": s.cusp_angles,
        "crossings": s.crossings.iter().map(|c| json!({
            "phi_a": c.phi_a, "phi_b": c.phi_b, "point": c.point,
        })).collect::<Vec<_>>(),
    })
}

/// Runs one subcommand; returns the files written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = cli.scenario()?;
    let out = &cli.out;
    let mut files = Vec::new();
    match cli.command {
        Command::Geodesic => {
            let f = field(&cfg)?;
            let g = &cfg.geodesic;
            if g.r == 0.0 && g.t_final.is_none() {
                return Err(CliError::Config("geodesic.t_final is required when r = 0".into()));
            }
            let t_final = g.t_final.unwrap_or(std::f64::consts::TAU / g.r.abs());
            let arc = integrate(&f, CotangentState::initial(g.phi, g.r), t_final, &cfg.integrator())
                .map_err(numerical)?;
            let mut csv = String::from("t,x,y,w,p,q,r,H\n");
            for (t, s) in arc.times.iter().zip(&arc.states) {
                let _ = writeln!(csv, "{t},{},{},{},{},{},{},{}", s.x, s.y, s.w, s.p, s.q, s.r, hamiltonian(&f, s));
            }
            files.push(write(out, "geodesic.csv", &csv)?);
        }
        Command::Conjugate => {
            let f = field(&cfg)?;
            let integ = cfg.integrator();
            let mut csv = String::from("phi,r,tau\n");
            for &r in &cfg.conjugate.r_values {
                for phi in crate::fitseries::uniform_grid(cfg.conjugate.n_phi) {
                    let tau = conjugate_time(&f, phi, r, &integ).map_err(numerical)?;
                    let _ = writeln!(csv, "{phi},{r},{tau}");
                }
            }
            files.push(write(out, "conjugate.csv", &csv)?);
        }
        Command::Slice => {
            for s in slices(&cfg)? {
                let label = s.side.label();
                files.push(write(out, &format!("slice_{label}.csv"), &s.to_csv())?);
                files.push(write(out, &format!("slice_{label}.json"), &to_json(&slice_json(&s)))?);
                if cli.svg {
                    let svg = svg::slice_svg(&s, &title(&cfg, s.side, cfg.h));
                    files.push(write(out, &format!("slice_{label}.svg"), &svg)?);
                }
            }
        }
        Command::Symbol => {
            let mut entries = serde_json::Map::new();
            for s in slices(&cfg)? {
                let sym = extract_symbol(&s).map_err(numerical)?;
                entries.insert(
                    s.side.label().to_string(),
                    json!({
                        "symbol": sym.to_string(),
                        "canonical": sym.canonical().to_string(),
                        "name": sym.name(),
                        "cusps": s.cusp_angles.len(),
                        "crossings": s.crossings.len(),
                    }),
                );
            }
            files.push(write(out, "symbol.json", &to_json(&entries))?);
        }
        Command::Classify => {
            let report = classify(&cfg.coefficients).map_err(numerical)?;
            files.push(write(out, "classify.json", &to_json(&report))?);
        }
        Command::Validate => {
            let report = run_validation(&cfg)?;
            files.push(write(out, "validate.json", &to_json(&report))?);
            if !report.passed {
                let failed: Vec<_> =
                    report.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.as_str()).collect();
                return Err(CliError::Validation(failed.join(", ")));
            }
        }
        Command::Plot => {
            for s in slices(&cfg)? {
                let svg = svg::slice_svg(&s, &title(&cfg, s.side, cfg.h));
                files.push(write(out, &format!("plot_{}.svg", s.side.label()), &svg)?);
            }
        }
    }
    Ok(files)
}

/// Entry point used by the binary.
pub fn run(cli: Cli) -> ExitCode {
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(CliError::Config(e.to_string())),
        },
        None => execute(&cli),
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cli = Cli::parse_from(["contact-caustic", "classify", "--h", "0.05", "--side", "minus", "--grid", "600"]);
        let cfg = cli.scenario().unwrap();
        assert_eq!(cfg.h, 0.05);
        assert_eq!(cfg.side, SideSelection::Minus);
        assert_eq!(cfg.n_grid, 600);
    }

    #[test]
    fn bad_override_is_config_error() {
        let cli = Cli::parse_from(["contact-caustic", "slice", "--grid", "100"]);
        assert_eq!(cli.scenario().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn classify_writes_report() {
        let dir = std::env::temp_dir().join(format!("cc-cli-{}", std::process::id()));
        let cli = Cli::parse_from(["contact-caustic", "classify", "--out", dir.to_str().unwrap()]);
        let files = execute(&cli).unwrap();
        let text = std::fs::read_to_string(&files[0]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["regime"], "DEGENERATE_B");
        let _ = std::fs::remove_dir_all(dir);
    }
}
