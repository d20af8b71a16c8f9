use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::caustic::{NamedSymbol, Side};
use crate::fitseries::{DEFAULT_DEGREE, DEFAULT_FIT_GRID, DEFAULT_H_LIST};
use crate::flow::IntegratorSettings;
use crate::model::NormalFormCoefficients;

use super::CliError;

/// `plus`, `minus` or `both`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SideSelection {
    Plus,
    Minus,
    Both,
}

impl SideSelection {
    pub fn sides(self) -> Vec<Side> {
        match self {
            SideSelection::Plus => vec![Side::Plus],
            SideSelection::Minus => vec![Side::Minus],
            SideSelection::Both => vec![Side::Plus, Side::Minus],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedSymbols {
    pub plus: Option<NamedSymbol>,
    pub minus: Option<NamedSymbol>,
}

impl ExpectedSymbols {
    pub fn get(&self, side: Side) -> Option<NamedSymbol> {
        match side {
            Side::Plus => self.plus,
            Side::Minus => self.minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicRequest {
    pub phi: f64,
    pub r: f64,
    /// Final time; defaults to one Heisenberg period `2π/|r|`.
    pub t_final: Option<f64>,
}

impl Default for GeodesicRequest {
    fn default() -> Self {
        Self { phi: 0.0, r: 1.0, t_final: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConjugateRequest {
    pub n_phi: usize,
    pub r_values: Vec<f64>,
}

impl Default for ConjugateRequest {
    fn default() -> Self {
        Self { n_phi: 8, r_values: vec![0.5, 1.0, 2.0, 5.0, 10.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    /// Where the coefficients came from.
    pub provenance: String,
    pub coefficients: NormalFormCoefficients,
    pub h: f64,
    pub side: SideSelection,
    pub n_grid: usize,
    pub h_list: Vec<f64>,
    pub fit_degree: usize,
    pub fit_grid: usize,
    pub steps_per_period: usize,
    pub tol_energy: f64,
    /// Declared slice symbols, checked by `validate`.
    pub expected: ExpectedSymbols,
    pub geodesic: GeodesicRequest,
    pub conjugate: ConjugateRequest,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let integ = IntegratorSettings::default();
        Self {
            name: String::new(),
            description: String::new(),
            provenance: String::new(),
            coefficients: NormalFormCoefficients::default(),
            h: 0.02,
            side: SideSelection::Both,
            n_grid: 1024,
            h_list: DEFAULT_H_LIST.to_vec(),
            fit_degree: DEFAULT_DEGREE,
            fit_grid: DEFAULT_FIT_GRID,
            steps_per_period: integ.steps_per_period,
            tol_energy: integ.tol_energy,
            expected: ExpectedSymbols::default(),
            geodesic: GeodesicRequest::default(),
            conjugate: ConjugateRequest::default(),
        }
    }
}

/// Valid slice heights: the expansions are asymptotic in `h`.
pub const H_RANGE: (f64, f64) = (1e-3, 0.2);

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.coefficients.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.h >= H_RANGE.0 && self.h <= H_RANGE.1) {
            return Err(CliError::Config(format!(
                "h = {} outside [{}, {}]",
                self.h, H_RANGE.0, H_RANGE.1
            )));
        }
        if self.n_grid < 512 {
            return Err(CliError::Config(format!("n_grid must be at least 512, got {}", self.n_grid)));
        }
        if self.h_list.iter().any(|h| !(*h >= H_RANGE.0 && *h <= H_RANGE.1)) {
            return Err(CliError::Config("h_list entries outside the valid range".into()));
        }
        if self.steps_per_period < 16 || !(self.tol_energy > 0.0) {
            return Err(CliError::Config("integrator settings out of range".into()));
        }
        if self.fit_grid < 8 {
            return Err(CliError::Config("fit_grid must be at least 8".into()));
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorSettings {
        IntegratorSettings { steps_per_period: self.steps_per_period, tol_energy: self.tol_energy }
    }
}
