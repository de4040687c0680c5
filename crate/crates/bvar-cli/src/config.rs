//! Run configuration: a single JSON file with documented defaults.

use std::path::PathBuf;

use bvar_core::MinnesotaHyper;
use serde::{Deserialize, Serialize};

use crate::pipeline::{PipelineError, Stage};

/// Minnesota hyperparameters as they appear in the config file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct HyperConfig {
    pub gamma: f64,
    pub decay_exponent: f64,
    pub cross_tightness: f64,
    pub constant_scale: f64,
}

impl Default for HyperConfig {
    fn default() -> Self {
        let h = MinnesotaHyper::default();
        Self {
            gamma: h.gamma,
            decay_exponent: h.decay_exponent,
            cross_tightness: h.cross_tightness,
            constant_scale: h.constant_scale,
        }
    }
}

impl From<&HyperConfig> for MinnesotaHyper {
    fn from(c: &HyperConfig) -> Self {
        MinnesotaHyper {
            gamma: c.gamma,
            decay_exponent: c.decay_exponent,
            cross_tightness: c.cross_tightness,
            constant_scale: c.constant_scale,
        }
    }
}

fn default_d_max() -> usize {
    4
}

fn default_horizon() -> usize {
    50
}

fn default_true() -> bool {
    true
}

fn default_settle_tolerance() -> f64 {
    1e-3
}

/// Validated pipeline configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Response variable the effect verdicts are computed for.
    pub target: String,
    #[serde(default = "default_d_max")]
    pub d_max: usize,
    /// Optional lag-order override; winners are still reported.
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default = "default_true")]
    pub constant: bool,
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default)]
    pub hyper: HyperConfig,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub orthogonalized: bool,
    #[serde(default = "default_settle_tolerance")]
    pub settle_tolerance: f64,
}

/// Parse and validate a JSON config. Unknown keys, missing keys and type
/// mismatches are rejected with the offending key in the message.
pub fn parse_config(text: &str) -> Result<RunConfig, PipelineError> {
    let config: RunConfig = serde_json::from_str(text)
        .map_err(|e| PipelineError::new(Stage::Config, format!("config parse: {e}")))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |key: &str, detail: String| {
            Err(PipelineError::new(Stage::Config, format!("invalid `{key}`: {detail}")))
        };
        if self.target.is_empty() {
            return bad("target", "must name a variable".into());
        }
        if let Some(d) = self.d {
            if d < 1 {
                return bad("d", "lag order must be at least 1".into());
            }
            if d > self.d_max {
                return bad("d_max", format!("must be >= chosen d = {d}, got {}", self.d_max));
            }
        }
        if !(self.hyper.gamma > 0.0) {
            return bad("hyper.gamma", format!("must be positive, got {}", self.hyper.gamma));
        }
        if !(self.hyper.decay_exponent > 0.0) {
            return bad(
                "hyper.decay_exponent",
                format!("must be positive, got {}", self.hyper.decay_exponent),
            );
        }
        if !(self.hyper.cross_tightness > 0.0 && self.hyper.cross_tightness <= 1.0) {
            return bad(
                "hyper.cross_tightness",
                format!("must lie in (0, 1], got {}", self.hyper.cross_tightness),
            );
        }
        if !(self.hyper.constant_scale > 0.0) {
            return bad(
                "hyper.constant_scale",
                format!("must be positive, got {}", self.hyper.constant_scale),
            );
        }
        if self.horizon < 1 {
            return bad("horizon", "must be at least 1".into());
        }
        if !(self.settle_tolerance > 0.0) {
            return bad(
                "settle_tolerance",
                format!("must be positive, got {}", self.settle_tolerance),
            );
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(
            r#"{"input": "panel.csv", "output": "out", "target": "accidents"}"#,
        )
        .unwrap();
        assert_eq!(cfg.d_max, 4);
        assert_eq!(cfg.horizon, 50);
        assert_eq!(cfg.hyper.gamma, 0.1);
        assert_eq!(cfg.hyper.decay_exponent, 1.0);
        assert_eq!(cfg.hyper.cross_tightness, 0.5);
        assert!(cfg.constant);
        assert!(cfg.normalize);
        assert!(!cfg.orthogonalized);
        assert_eq!(cfg.settle_tolerance, 1e-3);
        assert_eq!(cfg.d, None);
    }

    #[test]
    fn negative_gamma_names_key() {
        let err = parse_config(
            r#"{"input": "p.csv", "output": "o", "target": "a", "hyper": {"gamma": -1}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("hyper.gamma"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config(
            r#"{"input": "p.csv", "output": "o", "target": "a", "bogus": 1}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn missing_key_rejected() {
        let err = parse_config(r#"{"input": "p.csv", "output": "o"}"#).unwrap_err();
        assert!(err.to_string().contains("target"), "{err}");
    }

    #[test]
    fn d_must_not_exceed_d_max() {
        let err = parse_config(
            r#"{"input": "p.csv", "output": "o", "target": "a", "d": 3, "d_max": 2}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("d_max"), "{err}");
    }

    #[test]
    fn serialize_parse_serialize_fixpoint() {
        let text = r#"{
            "input": "panel.csv",
            "output": "out",
            "target": "accidents",
            "d_max": 2,
            "d": 1,
            "constant": true,
            "normalize": false,
            "hyper": {"gamma": 0.2, "decay_exponent": 1.5, "cross_tightness": 0.4, "constant_scale": 500.0},
            "horizon": 30,
            "orthogonalized": true,
            "settle_tolerance": 0.01
        }"#;
        let cfg = parse_config(text).unwrap();
        let once = serde_json::to_string_pretty(&cfg).unwrap();
        let reparsed: RunConfig = serde_json::from_str(&once).unwrap();
        let twice = serde_json::to_string_pretty(&reparsed).unwrap();
        assert_eq!(once, twice);
        assert_eq!(cfg, reparsed);
    }
}
