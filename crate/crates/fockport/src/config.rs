//! Sweep configuration files (JSON).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use fockport_core::{DeformationFn, DisplacementVariant, Operation};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    FidelityCoherent,
    FidelitySqueezed,
    FidelityVsZ,
    Entanglement,
    EprVariance,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::FidelityCoherent => "fidelity_coherent",
            Target::FidelitySqueezed => "fidelity_squeezed",
            Target::FidelityVsZ => "fidelity_vs_z",
            Target::Entanglement => "entanglement",
            Target::EprVariance => "epr_variance",
        }
    }

    pub fn axis_variable(self) -> AxisVariable {
        match self {
            Target::FidelityVsZ => AxisVariable::Z,
            _ => AxisVariable::Alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisVariable {
    Alpha,
    Z,
}

impl fmt::Display for AxisVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisVariable::Alpha => "alpha",
            AxisVariable::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Series,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub variable: AxisVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    /// Grid points `start + i step` up to `stop` (inclusive, with a little slack
    /// for rounding in the step).
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub operations: Vec<String>,
    pub deformations: Vec<String>,
}

/// Parameters held constant along the sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixed {
    /// Resource displacement when the axis is `z`.
    pub alpha: Option<f64>,
    /// Coherent input amplitude `[re, im]`; the fidelity does not depend on it.
    pub alpha0: Option<[f64; 2]>,
    /// Squeezing modulus of the input for `fidelity_squeezed`.
    pub r: Option<f64>,
    /// Squeezing phase of the input.
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffOverride {
    pub nmax: Option<usize>,
    pub tail_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: Option<String>,
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub target: Target,
    pub grid: Grid,
    pub axis: Axis,
    #[serde(default)]
    pub fixed: Fixed,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub variant: Option<String>,
    #[serde(default)]
    pub cutoff: CutoffOverride,
    #[serde(default)]
    pub output: Output,
}

/// A config after every string field has been parsed.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub raw: SweepConfig,
    pub operations: Vec<Operation>,
    pub deformations: Vec<DeformationFn>,
    pub variant: DisplacementVariant,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<ValidatedConfig, ConfigError> {
        let raw: SweepConfig = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        raw.validate()
    }

    pub fn from_path(path: &Path) -> Result<ValidatedConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        SweepConfig::from_json(&text)
    }

    pub fn validate(self) -> Result<ValidatedConfig, ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(field(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let ax = &self.axis;
        if ax.variable != self.target.axis_variable() {
            return Err(field(
                "axis.variable",
                format!("target {} sweeps over {}", self.target.name(), self.target.axis_variable()),
            ));
        }
        if !(ax.start.is_finite() && ax.stop.is_finite()) {
            return Err(field("axis.start", "start and stop must be finite"));
        }
        if !(ax.step > 0.0 && ax.step.is_finite()) {
            return Err(field("axis.step", "must be > 0"));
        }
        if ax.start > ax.stop {
            return Err(field("axis.stop", "must not be below axis.start"));
        }
        if ax.variable == AxisVariable::Z && ax.start < 0.0 {
            return Err(field("axis.start", "squeezing modulus must be >= 0"));
        }
        if ax.points().len() > 1_000_000 {
            return Err(field("axis.step", "more than a million grid points"));
        }
        let g = &self.grid;
        for (name, empty) in [
            ("grid.n", g.n.is_empty()),
            ("grid.k", g.k.is_empty()),
            ("grid.operations", g.operations.is_empty()),
            ("grid.deformations", g.deformations.is_empty()),
        ] {
            if empty {
                return Err(field(name, "must not be empty"));
            }
        }
        let mut operations = Vec::new();
        for (i, s) in g.operations.iter().enumerate() {
            let op = Operation::from_str(s).map_err(|_| {
                field(format!("grid.operations[{i}]"), format!("unknown operation {s:?} (none, add, sub)"))
            })?;
            operations.push(op);
        }
        let mut deformations = Vec::new();
        for (i, s) in g.deformations.iter().enumerate() {
            let f = DeformationFn::from_str(s)
                .map_err(|e| field(format!("grid.deformations[{i}]"), format!("{s:?}: {e}")))?;
            f.validate().map_err(|e| field(format!("grid.deformations[{i}]"), e.to_string()))?;
            deformations.push(f);
        }
        let variant = match &self.variant {
            None => DisplacementVariant::default(),
            Some(s) => DisplacementVariant::from_str(s)
                .map_err(|_| field("variant", format!("unknown variant {s:?} (prime, double_prime)")))?,
        };
        let fx = &self.fixed;
        if let Some(a) = fx.alpha {
            if !a.is_finite() {
                return Err(field("fixed.alpha", "must be finite"));
            }
        }
        if let Some([re, im]) = fx.alpha0 {
            if !(re.is_finite() && im.is_finite()) {
                return Err(field("fixed.alpha0", "must be finite"));
            }
        }
        if let Some(r) = fx.r {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(field("fixed.r", "must be finite and >= 0"));
            }
        }
        if let Some(z) = fx.zeta {
            if !z.is_finite() {
                return Err(field("fixed.zeta", "must be finite"));
            }
        }
        if self.target == Target::FidelitySqueezed && fx.r.is_none() {
            return Err(field("fixed.r", "required for fidelity_squeezed"));
        }
        if let Some(n) = self.cutoff.nmax {
            if n == 0 {
                return Err(field("cutoff.nmax", "must be >= 1"));
            }
        }
        if let Some(t) = self.cutoff.tail_tol {
            if !(0.0..1.0).contains(&t) {
                return Err(field("cutoff.tail_tol", "must lie in [0, 1)"));
            }
        }
        Ok(ValidatedConfig { raw: self, operations, deformations, variant })
    }
}

impl ValidatedConfig {
    /// File-name stem for the outputs.
    pub fn prefix(&self) -> String {
        self.raw
            .output
            .prefix
            .clone()
            .or_else(|| self.raw.name.clone())
            .unwrap_or_else(|| self.raw.target.name().to_string())
    }
}
