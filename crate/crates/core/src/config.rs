//! Partial parameter sets: the `key = value` configuration format and the
//! override layer the CLI and benchmark harness share.
//!
//! An override set mirrors [`ColonyParams`](crate::colony::ColonyParams)
//! field for field, but every entry is optional. Applying it to a concrete
//! parameter set touches only the fields present, which is what lets one
//! template span instances of different sizes: anything left unset keeps its
//! per-instance derived default (ant count, elitist weight).

use thiserror::Error;

use crate::colony::{ColonyParams, ElitistTarget, ParamError};
use crate::Time;

/// Optional overrides for every tunable of a colony run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamOverrides {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub q: Option<f64>,
    pub elitist_weight: Option<f64>,
    pub cycles: Option<usize>,
    pub ants: Option<usize>,
    pub tau0: Option<f64>,
    pub delay_limit: Option<Time>,
    pub delay_penalty_per_unit: Option<f64>,
    pub seed: Option<u64>,
    pub elitist_target: Option<ElitistTarget>,
}

/// A configuration source that cannot be parsed. Lines are 1-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: {value:?} is not a valid value for {key}: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
}

impl ParamOverrides {
    /// Parses `key = value` lines. Blank lines and `#` comments are ignored;
    /// keys are the `ColonyParams` field names; later lines win over earlier
    /// ones.
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let mut overrides = Self::default();
        for (index, raw) in source.lines().enumerate() {
            let line = index + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let (key, value) = text.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line,
                text: text.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |reason: String| ConfigError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
                reason,
            };
            match key {
                "alpha" => overrides.alpha = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "beta" => overrides.beta = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "rho" => overrides.rho = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "q" => overrides.q = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "elitist_weight" => {
                    overrides.elitist_weight = Some(value.parse().map_err(|e| bad(format!("{e}")))?)
                }
                "cycles" => overrides.cycles = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "ants" => overrides.ants = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "tau0" => overrides.tau0 = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "delay_limit" => {
                    overrides.delay_limit = Some(value.parse().map_err(|e| bad(format!("{e}")))?)
                }
                "delay_penalty_per_unit" => {
                    overrides.delay_penalty_per_unit =
                        Some(value.parse().map_err(|e| bad(format!("{e}")))?)
                }
                "seed" => overrides.seed = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "elitist_target" => {
                    overrides.elitist_target = Some(value.parse().map_err(bad)?)
                }
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
            }
        }
        Ok(overrides)
    }

    /// Folds another override set on top of this one: fields set in `other`
    /// win. Used to layer explicit CLI flags over a configuration file.
    pub fn layered_under(mut self, other: &Self) -> Self {
        macro_rules! take {
            ($field:ident) => {
                if other.$field.is_some() {
                    self.$field = other.$field.clone();
                }
            };
        }
        take!(alpha);
        take!(beta);
        take!(rho);
        take!(q);
        take!(elitist_weight);
        take!(cycles);
        take!(ants);
        take!(tau0);
        take!(delay_limit);
        take!(delay_penalty_per_unit);
        take!(seed);
        take!(elitist_target);
        self
    }

    /// Applies the overrides to a concrete parameter set.
    ///
    /// `alpha` is applied through `set_alpha`, so `beta` follows it. An
    /// explicit `beta` is accepted only as a consistency assertion — it must
    /// match the derived `1 - alpha` within 1e-9 (the derived value is kept);
    /// anything else is rejected rather than silently decoupling the
    /// exponents. The final set is re-validated.
    pub fn apply_to(&self, params: &mut ColonyParams<f64>) -> Result<(), ParamError> {
        if let Some(alpha) = self.alpha {
            params.set_alpha(alpha);
        }
        if let Some(beta) = self.beta {
            if (beta - params.beta).abs() > 1e-9 {
                return Err(ParamError {
                    field: "beta",
                    value: beta.to_string(),
                    requirement: "must equal 1 - alpha (beta is derived, not free)",
                });
            }
        }
        if let Some(rho) = self.rho {
            params.rho = rho;
        }
        if let Some(q) = self.q {
            params.q = q;
        }
        if let Some(weight) = self.elitist_weight {
            params.elitist_weight = weight;
        }
        if let Some(cycles) = self.cycles {
            params.cycles = cycles;
        }
        if let Some(ants) = self.ants {
            params.ants = ants;
        }
        if let Some(tau0) = self.tau0 {
            params.tau0 = tau0;
        }
        if let Some(limit) = self.delay_limit {
            params.delay_limit = limit;
        }
        if let Some(penalty) = self.delay_penalty_per_unit {
            params.delay_penalty_per_unit = penalty;
        }
        if let Some(seed) = self.seed {
            params.seed = seed;
        }
        if let Some(target) = self.elitist_target {
            params.elitist_target = target;
        }
        params.validate()
    }
}
