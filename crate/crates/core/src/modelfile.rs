//! JSON model files read by the command-line driver.
//!
//! ```json
//! {
//!   "model": { "kind": "logistic", "b": 1.0, "a": -3.0 },
//!   "x0": [1.0],
//!   "order": 4,
//!   "grid": { "end": 1.0, "count": 11 },
//!   "tolerances": { "rel_tol": 1e-10, "abs_tol": 1e-12 }
//! }
//! ```
//!
//! `model.kind` is one of `logistic`, `two_species` (fields `b1`, `b2`,
//! `a11`, `a12`, `a21`, `a22`), `spiral` (field `a`) or `polynomial`, which
//! lists the terms of each component explicitly:
//!
//! ```json
//! { "kind": "polynomial",
//!   "components": [[ { "coef": 1.0, "exponents": [1] },
//!                    { "coef": -3.0, "exponents": [2] } ]] }
//! ```
//!
//! `order`, `grid` and `tolerances` are optional.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::integrator::IntegrationConfig;
use crate::model::{preset_ivp, InitialValueProblem, ModelPreset, PolyVectorField, Polynomial};
use crate::series::DEFAULT_ORDER;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Logistic {
        b: f64,
        a: f64,
    },
    TwoSpecies {
        b1: f64,
        b2: f64,
        a11: f64,
        a12: f64,
        a21: f64,
        a22: f64,
    },
    Spiral {
        a: f64,
    },
    Polynomial {
        components: Vec<Vec<TermSpec>>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coef: f64,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub end: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { end: 1.0, count: 11 }
    }
}

impl GridSpec {
    /// `count` equally spaced times from 0 to `end` inclusive.
    pub fn times(&self) -> Vec<f64> {
        linspace(self.end, self.count)
    }
}

pub fn linspace(end: f64, count: usize) -> Vec<f64> {
    let last = (count - 1) as f64;
    (0..count)
        .map(|k| if k + 1 == count { end } else { end * k as f64 / last })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        let d = IntegrationConfig::default();
        ToleranceSpec {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub model: ModelSpec,
    pub x0: Vec<f64>,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self, ModelFileError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
            path: name.clone(),
            source,
        })?;
        Self::parse(&text, &name)
    }

    /// Parses and validates a model file; `origin` labels diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ModelFileError> {
        let mf: ModelFile = serde_json::from_str(text).map_err(|e| ModelFileError::Parse {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        mf.validate().map_err(|message| ModelFileError::Invalid {
            path: origin.to_string(),
            message,
        })?;
        Ok(mf)
    }

    fn validate(&self) -> Result<(), String> {
        if !(self.grid.end > 0.0 && self.grid.end.is_finite()) {
            return Err(format!("grid.end must be positive, got {}", self.grid.end));
        }
        if self.grid.count < 2 {
            return Err(format!("grid.count must be at least 2, got {}", self.grid.count));
        }
        if self.order < 1 {
            return Err("order must be at least 1".into());
        }
        if !(self.tolerances.rel_tol > 0.0 && self.tolerances.abs_tol > 0.0) {
            return Err("tolerances must be positive".into());
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            return Err("x0 must be finite".into());
        }
        self.ivp().map(|_| ()).map_err(|e| e.to_string())
    }

    pub fn preset(&self) -> Option<ModelPreset> {
        match self.model {
            ModelSpec::Logistic { b, a } => Some(ModelPreset::Logistic { b, a }),
            ModelSpec::TwoSpecies {
                b1,
                b2,
                a11,
                a12,
                a21,
                a22,
            } => Some(ModelPreset::TwoSpecies {
                b1,
                b2,
                a11,
                a12,
                a21,
                a22,
            }),
            ModelSpec::Spiral { a } => Some(ModelPreset::Spiral { a }),
            ModelSpec::Polynomial { .. } => None,
        }
    }

    pub fn field(&self) -> crate::Result<PolyVectorField> {
        match (&self.model, self.preset()) {
            (_, Some(p)) => Ok(p.field()),
            (ModelSpec::Polynomial { components }, None) => {
                let n = components.len();
                let polys = components
                    .iter()
                    .map(|terms| {
                        Polynomial::from_terms(n, terms.iter().map(|t| (t.coef, t.exponents.clone())))
                    })
                    .collect::<crate::Result<Vec<_>>>()?;
                PolyVectorField::new(polys)
            }
            _ => unreachable!("every non-polynomial kind is a preset"),
        }
    }

    pub fn ivp(&self) -> crate::Result<InitialValueProblem> {
        match self.preset() {
            Some(p) => preset_ivp(p, &self.x0),
            None => InitialValueProblem::new(self.field()?, self.x0.clone()),
        }
    }

    pub fn integration_config(&self) -> IntegrationConfig {
        IntegrationConfig {
            rel_tol: self.tolerances.rel_tol,
            abs_tol: self.tolerances.abs_tol,
            ..IntegrationConfig::default()
        }
    }
}
