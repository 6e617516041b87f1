use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// Which Hamiltonian level a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Full cavity-qubit model in the frame rotating at the first drive.
    FullRotating,
    /// Displaced-frame effective model keeping the `ω_d' − ω_d` harmonic.
    EffectiveTd,
    /// Static Hamiltonian obtained after also rotating the antisymmetric
    /// fluctuation mode at `ω_d' − ω_d`.
    TimeIndependent,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::FullRotating => "full_rotating",
            Representation::EffectiveTd => "effective_td",
            Representation::TimeIndependent => "time_independent",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "full_rotating" => Ok(Representation::FullRotating),
            "effective_td" => Ok(Representation::EffectiveTd),
            "time_independent" => Ok(Representation::TimeIndependent),
            other => Err(ModelError::UnknownRepresentation(other.to_string())),
        }
    }
}

/// Physical and numerical parameters.
///
/// Frequencies, rates and drive amplitudes are in units of 2π·GHz, i.e. the
/// numbers are the ones quoted for the device (`omega_q = 7` means
/// `ω_q = 2π × 7 GHz`). Operators handed to the integrators are scaled to
/// rad/ns; time is in ns.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    pub omega_c: f64,
    pub omega_q: f64,
    pub g: f64,
    pub j: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_phi: f64,
    pub eps_d: f64,
    pub omega_d: f64,
    pub eps_dp: f64,
    pub omega_dp: f64,
    pub n_max_sym: usize,
    pub n_max_asym: usize,
    pub include_quadratic_fluct: bool,
    pub representation: Representation,
}

/// Above this `g/Δ` the dispersive treatment is flagged.
pub const DISPERSIVE_WARN: f64 = 0.15;
/// Above this `g/Δ` parameters are rejected.
pub const DISPERSIVE_LIMIT: f64 = 0.3;

impl Default for SystemParams {
    /// Reference device: `ω_c = 6, ω_q = 7, g = J = 0.1, κ = 1e-4,
    /// γ = 1e-5`, `γ_φ = 5e-6`, first drive `ε_d = 0.1` at `ω_d = 6.4548`,
    /// second drive off (`ε_d' = 0`, `ω_d' = 6.098`), five photons per mode.
    fn default() -> Self {
        SystemParams {
            omega_c: 6.0,
            omega_q: 7.0,
            g: 0.1,
            j: 0.1,
            kappa: 1e-4,
            gamma: 1e-5,
            gamma_phi: 5e-6,
            eps_d: 0.1,
            omega_d: 6.4548,
            eps_dp: 0.0,
            omega_dp: 6.098,
            n_max_sym: 5,
            n_max_asym: 5,
            include_quadratic_fluct: true,
            representation: Representation::TimeIndependent,
        }
    }
}

impl SystemParams {
    pub fn detuning(&self) -> f64 {
        self.omega_q - self.omega_c
    }

    /// Checks the parameter invariants. Returns soft warnings on success.
    pub fn validate(&self) -> Result<Vec<String>, ModelError> {
        let fields = [
            ("omega_c", self.omega_c),
            ("omega_q", self.omega_q),
            ("g", self.g),
            ("j", self.j),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_phi", self.gamma_phi),
            ("eps_d", self.eps_d),
            ("omega_d", self.omega_d),
            ("eps_dp", self.eps_dp),
            ("omega_dp", self.omega_dp),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(ModelError::InvalidParam { key: name, reason: "not finite".into() });
            }
        }
        for (name, v) in [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma_phi", self.gamma_phi),
            ("eps_d", self.eps_d),
            ("eps_dp", self.eps_dp),
            ("g", self.g),
            ("j", self.j),
        ] {
            if v < 0.0 {
                return Err(ModelError::InvalidParam { key: name, reason: format!("must be >= 0, got {v}") });
            }
        }
        if self.omega_q <= self.omega_c {
            return Err(ModelError::InvalidParam {
                key: "omega_q",
                reason: format!("qubit must lie above the cavity (omega_q = {} <= omega_c = {})", self.omega_q, self.omega_c),
            });
        }
        if self.n_max_sym < 1 {
            return Err(ModelError::InvalidParam { key: "n_max_sym", reason: "must be >= 1".into() });
        }
        if self.n_max_asym < 1 {
            return Err(ModelError::InvalidParam { key: "n_max_asym", reason: "must be >= 1".into() });
        }
        let ratio = self.g / self.detuning();
        if ratio >= DISPERSIVE_LIMIT {
            return Err(ModelError::InvalidParam {
                key: "g",
                reason: format!("g/Delta = {ratio:.3} outside the dispersive regime (limit {DISPERSIVE_LIMIT})"),
            });
        }
        let mut warnings = Vec::new();
        if ratio > DISPERSIVE_WARN {
            warnings.push(format!("g/Delta = {ratio:.3} exceeds {DISPERSIVE_WARN}; perturbative shifts are unreliable"));
        }
        if self.j == 0.0 {
            warnings.push("J = 0: singlet and triplet are degenerate, purification cannot distinguish them".into());
        }
        Ok(warnings)
    }
}
