use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

/// Scientific notation with 12 significant digits; `NaN` for missing values.
pub fn fmt_sci(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.11e}")
    }
}

/// `git describe`-style version string.
pub fn version_string() -> String {
    match option_env!("OQS_GIT_DESCRIBE") {
        Some(d) if !d.is_empty() => d.to_string(),
        _ => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

/// A pass/fail check against a documented threshold.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: String,
    pub pass: bool,
}

impl Check {
    pub fn at_least(name: &str, value: f64, min: f64) -> Self {
        Check { name: name.into(), value, threshold: format!(">= {min}"), pass: value >= min }
    }

    pub fn below(name: &str, value: f64, max: f64) -> Self {
        Check { name: name.into(), value, threshold: format!("< {max}"), pass: value < max }
    }

    pub fn at_most(name: &str, value: f64, max: f64) -> Self {
        Check { name: name.into(), value, threshold: format!("<= {max}"), pass: value <= max }
    }

    pub fn within(name: &str, value: f64, center: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold: format!("{center} +/- {tol}"),
            pass: (value - center).abs() <= tol,
        }
    }

    pub fn holds(name: &str, pass: bool) -> Self {
        Check { name: name.into(), value: if pass { 1.0 } else { 0.0 }, threshold: "true".into(), pass }
    }
}

/// JSON summary: `{settings, peaks, warnings, provenance, checks}`.
#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub settings: BTreeMap<String, Value>,
    pub peaks: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
    pub config_echo: BTreeMap<String, String>,
}

impl Summary {
    pub fn peak(&mut self, name: &str, value: f64, argmax: Value) {
        self.peaks.insert(name.into(), json!({ "value": value, "argmax": argmax }));
    }

    pub fn setting(&mut self, name: &str, value: impl Serialize) {
        self.settings.insert(name.into(), serde_json::to_value(value).expect("serializable setting"));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "settings": self.settings,
            "peaks": self.peaks,
            "warnings": self.warnings,
            "checks": self.checks,
            "provenance": { "version": version_string(), "config": self.config_echo },
        })
    }
}

/// Writes `text` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, text: &[u8]) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sci(0.815240000001), "8.15240000001e-1");
        assert_eq!(fmt_sci(6.098), "6.09800000000e0");
        assert_eq!(fmt_sci(f64::NAN), "NaN");
        assert_eq!(fmt_sci(-1.25e-7), "-1.25000000000e-7");
    }

    #[test]
    fn summary_shape() {
        let mut s = Summary::default();
        s.peak("F_T0", 0.8, json!({"omega_d": 6.455}));
        s.checks.push(Check::at_least("gain", 0.12, 0.1));
        let v = s.to_json();
        for k in ["settings", "peaks", "warnings", "provenance", "checks"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert!(s.all_pass());
        assert!(v["provenance"]["version"].as_str().unwrap().starts_with('v'));
    }
}
