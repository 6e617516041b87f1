//! Flat `key = value` run configuration.
//!
//! ```text
//! # reference device, second drive on
//! eps_dp = 0.005
//! omega_dp = 6.098
//! representation = time_independent
//! sweep.axis1 = omega_d, 6.40, 6.50, 101
//! sweep.workers = 2
//! ```
//!
//! Unknown keys are errors. Physical keys that are absent keep their
//! default (reference device) values. Numbers are in units of 2π·GHz.

use std::collections::BTreeMap;
use std::path::Path;

use oqs_core::algebra::BellState;
use oqs_core::model::{ModelError, Representation, SystemParams};
use thiserror::Error;

use crate::sweep::{Axis, Output, SweepSpec, TdSettings};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("{key}: cannot parse {value:?}: {reason}")]
    Parse { key: String, value: String, reason: String },
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("sweep: {0}")]
    Sweep(String),
}

/// Everything a run needs besides the subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: SystemParams,
    /// Bell state whose fidelity is optimized and summarized.
    pub target: BellState,
    pub sweep: Option<SweepSpec>,
    pub td: TdSettings,
    pub workers: usize,
    /// Soft warnings from validation.
    pub warnings: Vec<String>,
    /// Every key that was set, as given, for provenance.
    pub echo: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: SystemParams::default(),
            target: BellState::T0,
            sweep: None,
            td: TdSettings::default(),
            workers: 1,
            warnings: Vec::new(),
            echo: BTreeMap::new(),
        }
    }
}

/// Keys of [`SystemParams`] that hold real numbers; the only ones a sweep
/// axis may vary.
pub const REAL_KEYS: [&str; 11] =
    ["omega_c", "omega_q", "g", "j", "kappa", "gamma", "gamma_phi", "eps_d", "omega_d", "eps_dp", "omega_dp"];

/// Sets a real-valued parameter by name.
pub fn set_real(p: &mut SystemParams, key: &str, v: f64) -> Result<(), ConfigError> {
    let slot = match key {
        "omega_c" => &mut p.omega_c,
        "omega_q" => &mut p.omega_q,
        "g" => &mut p.g,
        "j" => &mut p.j,
        "kappa" => &mut p.kappa,
        "gamma" => &mut p.gamma,
        "gamma_phi" => &mut p.gamma_phi,
        "eps_d" => &mut p.eps_d,
        "omega_d" => &mut p.omega_d,
        "eps_dp" => &mut p.eps_dp,
        "omega_dp" => &mut p.omega_dp,
        _ => return Err(ConfigError::UnknownKey(key.to_string())),
    };
    *slot = v;
    Ok(())
}

pub fn get_real(p: &SystemParams, key: &str) -> Option<f64> {
    Some(match key {
        "omega_c" => p.omega_c,
        "omega_q" => p.omega_q,
        "g" => p.g,
        "j" => p.j,
        "kappa" => p.kappa,
        "gamma" => p.gamma,
        "gamma_phi" => p.gamma_phi,
        "eps_d" => p.eps_d,
        "omega_d" => p.omega_d,
        "eps_dp" => p.eps_dp,
        "omega_dp" => p.omega_dp,
        _ => return None,
    })
}

/// All parameters as a JSON object keyed like the config file.
pub fn params_json(p: &SystemParams) -> serde_json::Value {
    let mut m: serde_json::Map<String, serde_json::Value> =
        REAL_KEYS.iter().map(|k| (k.to_string(), get_real(p, k).into())).collect();
    m.insert("n_max_sym".into(), p.n_max_sym.into());
    m.insert("n_max_asym".into(), p.n_max_asym.into());
    m.insert("include_quadratic_fluct".into(), p.include_quadratic_fluct.into());
    m.insert("representation".into(), p.representation.as_str().into());
    m.into()
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::Parse { key: key.into(), value: value.into(), reason: e.to_string() })
}

fn parse_real(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::Parse { key: key.into(), value: value.into(), reason: "not finite".into() })
    }
}

fn parse_axis(key: &str, value: &str) -> Result<Axis, ConfigError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let [name, start, stop, count] = parts[..] else {
        return Err(ConfigError::Parse {
            key: key.into(),
            value: value.into(),
            reason: "expected `param, start, stop, count`".into(),
        });
    };
    Ok(Axis {
        key: name.to_string(),
        start: parse_real(key, start)?,
        stop: parse_real(key, stop)?,
        count: parse(key, count)?,
    })
}

/// Partially specified sweep collected while reading keys.
#[derive(Default)]
struct SweepDraft {
    axis1: Option<Axis>,
    axis2: Option<Axis>,
    outputs: Option<Vec<Output>>,
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    fn assign(&mut self, draft: &mut SweepDraft, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            k if REAL_KEYS.contains(&k) => set_real(&mut self.params, k, parse_real(k, value)?)?,
            "n_max_sym" => self.params.n_max_sym = parse(key, value)?,
            "n_max_asym" => self.params.n_max_asym = parse(key, value)?,
            "n_max" => {
                let n = parse(key, value)?;
                self.params.n_max_sym = n;
                self.params.n_max_asym = n;
            }
            "include_quadratic_fluct" => self.params.include_quadratic_fluct = parse(key, value)?,
            "representation" => self.params.representation = value.parse::<Representation>()?,
            "target" => {
                self.target = match value.parse::<BellState>() {
                    Ok(b @ (BellState::T0 | BellState::S)) => b,
                    _ => {
                        return Err(ConfigError::Parse {
                            key: key.into(),
                            value: value.into(),
                            reason: "target must be T0 or S".into(),
                        })
                    }
                }
            }
            "sweep.axis1" => draft.axis1 = Some(parse_axis(key, value)?),
            "sweep.axis2" => draft.axis2 = Some(parse_axis(key, value)?),
            "sweep.outputs" => {
                let outs = value
                    .split(',')
                    .map(|s| s.trim().parse::<Output>().map_err(|reason| ConfigError::Parse {
                        key: key.into(),
                        value: value.into(),
                        reason,
                    }))
                    .collect::<Result<Vec<_>, _>>()?;
                draft.outputs = Some(outs);
            }
            "sweep.workers" => self.workers = parse(key, value)?,
            "sweep.t_end" => self.td.t_end = Some(parse_real(key, value)?),
            "sweep.rtol" => self.td.rtol = parse_real(key, value)?,
            "sweep.atol" => self.td.atol = parse_real(key, value)?,
            "sweep.tail" => self.td.tail = parse_real(key, value)?,
            "sweep.drift_tol" => self.td.drift_tol = parse_real(key, value)?,
            "sweep.initial" => {
                self.td.initial = value.parse::<BellState>().map_err(|e| ConfigError::Parse {
                    key: key.into(),
                    value: value.into(),
                    reason: e.to_string(),
                })?
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        self.echo.insert(key.to_string(), value.to_string());
        Ok(())
    }

    fn apply_lines(&mut self, draft: &mut SweepDraft, text: &str) -> Result<(), ConfigError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: n + 1, text: raw.to_string() });
            };
            self.assign(draft, k.trim(), v.trim())?;
        }
        Ok(())
    }

    fn finish(mut self, draft: SweepDraft) -> Result<Self, ConfigError> {
        self.sweep = match (draft.axis1, draft.axis2) {
            (Some(axis1), axis2) => {
                let spec = SweepSpec {
                    axis1,
                    axis2,
                    outputs: draft.outputs.unwrap_or_else(|| Output::ALL.to_vec()),
                };
                spec.validate()?;
                Some(spec)
            }
            (None, Some(_)) => return Err(ConfigError::Sweep("sweep.axis2 given without sweep.axis1".into())),
            (None, None) => None,
        };
        if self.workers == 0 {
            return Err(ConfigError::Parse { key: "sweep.workers".into(), value: "0".into(), reason: "must be >= 1".into() });
        }
        self.td.validate()?;
        self.warnings = self.params.validate()?;
        if self.params.representation == Representation::TimeIndependent && self.params.eps_dp == 0.0 {
            self.warnings.push("eps_dp = 0: the purification drive is inactive".into());
        }
        Ok(self)
    }

    /// Parses config text, then applies `overrides` (`key=value`) on top.
    pub fn parse_with(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut draft = SweepDraft::default();
        cfg.apply_lines(&mut draft, text)?;
        for o in overrides {
            cfg.apply_lines(&mut draft, o)?;
        }
        cfg.finish(draft)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with(text, &[])
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    load_config_with(Some(path), &[])
}

/// As [`load_config`], with optional file and command-line overrides.
pub fn load_config_with(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|source| ConfigError::Io { path: p.display().to_string(), source })?,
        None => String::new(),
    };
    RunConfig::parse_with(&text, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_reference_device() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg.params, SystemParams::default());
        assert_eq!(cfg.params.eps_dp, 0.0);
        assert!(cfg.sweep.is_none());
        assert!(cfg.warnings.iter().any(|w| w.contains("purification")));
    }

    #[test]
    fn comments_whitespace_and_overrides() {
        let cfg = RunConfig::parse_with("  kappa = 5e-4  # lossy\n\n# nothing\neps_d=0.25\n", &["kappa=2e-4".into()]).unwrap();
        assert_eq!(cfg.params.kappa, 2e-4);
        assert_eq!(cfg.params.eps_d, 0.25);
        assert_eq!(cfg.echo["kappa"], "2e-4");
    }

    #[test]
    fn fails_closed() {
        assert!(matches!(RunConfig::parse("kapa = 1"), Err(ConfigError::UnknownKey(k)) if k == "kapa"));
        assert!(matches!(RunConfig::parse("sweep.bogus = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(RunConfig::parse("g = abc"), Err(ConfigError::Parse { .. })));
        assert!(matches!(RunConfig::parse("g 0.1"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(RunConfig::parse("target = T+"), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn negative_rate_names_key() {
        let err = RunConfig::parse("kappa = -1").unwrap_err();
        assert!(err.to_string().contains("kappa"), "{err}");
    }

    #[test]
    fn sweep_keys() {
        let cfg = RunConfig::parse("sweep.axis1 = omega_d, 6.40, 6.50, 101\nsweep.outputs = F_T0, n_asym\nsweep.workers = 3").unwrap();
        let s = cfg.sweep.unwrap();
        assert_eq!(s.axis1.count, 101);
        assert_eq!(s.outputs, vec![Output::FT0, Output::NAsym]);
        assert_eq!(cfg.workers, 3);
        assert!(RunConfig::parse("sweep.axis1 = omega_d, 6.4, 6.4, 5").is_err());
        assert!(RunConfig::parse("sweep.axis1 = omega_d, 6.4, 6.5, 1").is_err());
        assert!(RunConfig::parse("sweep.axis1 = n_max_sym, 1, 3, 3").is_err());
        assert!(RunConfig::parse("sweep.axis2 = g, 0.1, 0.2, 3").is_err());
    }
}
