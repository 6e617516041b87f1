//! Analytic rate report: every rate, the optimal drive frequencies and the
//! backward ratio at the steady-state antisymmetric occupation, each with
//! its inputs.

use std::io::Write;

use oqs_core::algebra::BellState;
use oqs_core::model::{Representation, SystemParams};
use oqs_core::rates::{
    backward_ratio, drive_peak_estimate, effective_dephasing_rate, fgr_rate_detail, optimal_frequencies,
    purification_peak_estimate, purification_rate_detail, PurificationDirection, RateEntry, RateTable, RatesError, Scheme,
};
use oqs_core::solve::observables;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::params_json;
use crate::output::{fmt_sci, version_string};

/// One reported quantity. `value` is NaN when `error` is set.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ReportEntry {
    pub name: String,
    pub value: f64,
    pub unit: &'static str,
    /// Cavity branch and bath frequency probed, for golden-rule rates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportEntry {
    fn scalar(name: &str, unit: &'static str, r: Result<f64, String>) -> Self {
        match r {
            Ok(value) => ReportEntry { name: name.into(), value, unit, branch: None, probe: None, error: None },
            Err(e) => ReportEntry { name: name.into(), value: f64::NAN, unit, branch: None, probe: None, error: Some(e) },
        }
    }

    fn rate(name: &str, r: Result<RateEntry, RatesError>) -> Self {
        match r {
            Ok(e) => ReportEntry {
                name: name.into(),
                value: e.rate,
                unit: RATE_UNIT,
                branch: Some(e.branch.as_str()),
                probe: Some(e.probe),
                error: None,
            },
            Err(e) => Self::scalar(name, RATE_UNIT, Err(e.to_string())),
        }
    }
}

pub const RATE_UNIT: &str = "2pi GHz";

#[derive(Clone, Debug)]
pub struct RatesReport {
    pub params: SystemParams,
    pub entries: Vec<ReportEntry>,
}

/// Every analytic quantity at `p`. A failing component becomes an entry
/// with an error instead of aborting the report. The backward ratio needs
/// the antisymmetric occupation, taken from the steady state of the
/// time-independent model at the same parameters.
pub fn rates_report(p: &SystemParams) -> RatesReport {
    use BellState::*;
    let s = |r: Result<f64, RatesError>| r.map_err(|e| e.to_string());
    let mut entries = vec![
        ReportEntry::rate("gamma_Tm_T0", fgr_rate_detail(TMinus, T0, p)),
        ReportEntry::rate("gamma_T0_Tp", fgr_rate_detail(T0, TPlus, p)),
        ReportEntry::rate("gamma_Tm_S", fgr_rate_detail(TMinus, S, p)),
        ReportEntry::rate("gamma_S_Tp", fgr_rate_detail(S, TPlus, p)),
        ReportEntry::rate("gamma_prime_S_T0", purification_rate_detail(PurificationDirection::SToT0, p)),
        ReportEntry::rate("gamma_prime_T0_S", purification_rate_detail(PurificationDirection::T0ToS, p)),
        ReportEntry::scalar("gamma_eff_T0_S", RATE_UNIT, s(effective_dephasing_rate(p))),
        ReportEntry::scalar("peak_drive_Tm_T0", RATE_UNIT, s(drive_peak_estimate(p))),
        ReportEntry::scalar("peak_purification", RATE_UNIT, s(purification_peak_estimate(p))),
    ];
    for (target, scheme) in [(T0, Scheme::Direct), (S, Scheme::Direct), (S, Scheme::Switching)] {
        let tag = format!("{target}_{}", scheme.as_str());
        match optimal_frequencies(target, scheme, p) {
            Ok(o) => {
                let note = (!o.converged).then(|| "fixed-point iteration did not converge".to_string());
                entries.push(ReportEntry { error: note, ..ReportEntry::scalar(&format!("omega_d_opt_{tag}"), "2pi GHz", Ok(o.omega_d)) });
                entries.push(ReportEntry::scalar(&format!("omega_dp_opt_{tag}"), "2pi GHz", Ok(o.omega_dp)));
            }
            Err(e) => {
                entries.push(ReportEntry::scalar(&format!("omega_d_opt_{tag}"), "2pi GHz", Err(e.to_string())));
                entries.push(ReportEntry::scalar(&format!("omega_dp_opt_{tag}"), "2pi GHz", Err(e.to_string())));
            }
        }
    }
    let q = SystemParams { representation: Representation::TimeIndependent, ..p.clone() };
    let n_asym = oqs_core::steady_state_for(&q).map_err(|e| e.to_string()).and_then(|r| {
        if r.converged() {
            Ok(observables(&r.rho).n_asym)
        } else {
            Err(format!("steady state not converged (scaled residual {:e})", r.scaled_residual))
        }
    });
    entries.push(ReportEntry::scalar("n_asym_steady", "photons", n_asym.clone()));
    entries.push(ReportEntry::scalar("backward_ratio", "1", n_asym.map(backward_ratio)));
    RatesReport { params: p.clone(), entries }
}

impl RatesReport {
    pub fn get(&self, name: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn to_json(&self) -> Value {
        let rad: serde_json::Map<String, Value> = self
            .entries
            .iter()
            .filter(|e| e.unit == RATE_UNIT && e.error.is_none())
            .map(|e| (e.name.clone(), json!(RateTable::to_rad_per_ns(e.value))))
            .collect();
        json!({
            "inputs": params_json(&self.params),
            "entries": self.entries,
            "rates_rad_per_ns": rad,
            "provenance": { "version": version_string() },
        })
    }

    /// `name,value,unit,branch,probe,error`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(["name", "value", "unit", "branch", "probe", "error"])?;
        for e in &self.entries {
            out.write_record([
                e.name.clone(),
                fmt_sci(e.value),
                e.unit.to_string(),
                e.branch.unwrap_or("").to_string(),
                e.probe.map(fmt_sci).unwrap_or_default(),
                e.error.clone().unwrap_or_default(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(p: SystemParams) -> SystemParams {
        SystemParams { n_max_sym: 2, n_max_asym: 2, ..p }
    }

    #[test]
    fn failures_are_per_entry() {
        let p = small(SystemParams { j: 0.0, eps_d: 0.1, ..Default::default() });
        let r = rates_report(&p);
        let eff = r.get("gamma_eff_T0_S").unwrap();
        assert!(eff.value.is_nan() && eff.error.is_some());
        assert!(r.get("gamma_Tm_T0").unwrap().error.is_none());
    }

    #[test]
    fn csv_has_one_row_per_entry() {
        let r = rates_report(&small(SystemParams { eps_dp: 0.01, ..Default::default() }));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), r.entries.len() + 1);
        assert!(text.starts_with("name,value,unit,branch,probe,error\n"));
    }
}
