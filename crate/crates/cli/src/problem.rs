use std::fs;
use std::path::Path;

use fixpoint_vi::oracle::VIOracleParams;
use fixpoint_vi::solver::{SchemeParams, StoppingRule};
use fixpoint_vi::{Contraction, MonotoneOperator, NonexpansiveOp, Schedule, Vector};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// On-disk problem description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub family: Vec<NonexpansiveOp>,
    pub f: Contraction,
    #[serde(rename = "A")]
    pub a: MonotoneOperator,
    pub mu: f64,
    pub gamma: f64,
    #[serde(default = "Schedule::harmonic")]
    pub schedule: Schedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vector>,
    #[serde(default)]
    pub stopping: StoppingRule,
    #[serde(default)]
    pub oracle: VIOracleParams,
}

impl ProblemFile {
    pub fn from_params(
        p: &SchemeParams,
        x0: Option<Vector>,
        stopping: StoppingRule,
        oracle: VIOracleParams,
    ) -> Self {
        Self {
            dimension: p.dim(),
            family: p.family.clone(),
            f: p.f.clone(),
            a: p.a.clone(),
            mu: p.mu,
            gamma: p.gamma,
            schedule: p.schedule.clone(),
            x0,
            stopping,
            oracle,
        }
    }

    pub fn to_params(&self) -> SchemeParams {
        SchemeParams {
            mu: self.mu,
            gamma: self.gamma,
            family: self.family.clone(),
            f: self.f.clone(),
            a: self.a.clone(),
            schedule: self.schedule.clone(),
        }
    }

    /// The starting point, the origin when the file omits it.
    pub fn start(&self) -> Vector {
        self.x0.clone().unwrap_or_else(|| Vector::zeros(self.dimension))
    }

    /// Parses JSON text; errors name the offending field and position.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Input(format!(
                "field `{path}`: {inner} (line {}, column {})",
                inner.line(),
                inner.column()
            ))
        })?;
        file.check_dimensions()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn check_dimensions(&self) -> Result<(), CliError> {
        let d = self.dimension;
        let mismatch = |field: &str, found: usize| {
            CliError::Input(format!(
                "field `{field}`: dimension {found} does not match `dimension` = {d}"
            ))
        };
        if d == 0 {
            return Err(CliError::Input("field `dimension`: must be at least 1".into()));
        }
        if self.family.is_empty() {
            return Err(CliError::Input("field `family`: needs at least one operator".into()));
        }
        for (i, op) in self.family.iter().enumerate() {
            if let Some(k) = op.dim().filter(|&k| k != d) {
                return Err(mismatch(&format!("family[{i}]"), k));
            }
        }
        if self.f.dim() != d {
            return Err(mismatch("f", self.f.dim()));
        }
        if self.a.dim() != d {
            return Err(mismatch("A", self.a.dim()));
        }
        if let Some(x0) = &self.x0 {
            if x0.dim() != d {
                return Err(mismatch("x0", x0.dim()));
            }
        }
        Ok(())
    }
}
