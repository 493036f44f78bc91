//! Run configuration: the flat TOML schema and its conversion into the
//! library types.
//!
//! Keys mirror how parameter sets are usually quoted (coupling Ω, point
//! counts, phases in units of π, delays), so a published configuration
//! transcribes directly. The file round-trips losslessly: parsing the
//! serialized form reproduces the parsed value exactly.

use std::fmt;
use std::path::Path;

use gmol::analysis::GridMode;
use gmol::model::{Chirality, MoleculeConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Coordinate convention for the sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Coords {
    /// Axes are the shifted detunings (Δ̃, δ̃); static Lamb shifts are
    /// folded out. Natural for Markovian configurations.
    Tilde,
    /// Axes are the bare detunings (Δ, δ).
    #[default]
    Bare,
}

impl Coords {
    pub fn grid_mode(self) -> GridMode {
        match self {
            Coords::Tilde => GridMode::TildeCoordinates,
            Coords::Bare => GridMode::BareCoordinates,
        }
    }
}

impl fmt::Display for Coords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coords::Tilde => "tilde",
            Coords::Bare => "bare",
        })
    }
}

fn default_resolution() -> u32 {
    401
}

fn default_tolerance() -> f64 {
    1e-9
}

/// One complete run: molecule parameters, sweep window, and output options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Exchange coupling Ω in units of the single-point rate Γ.
    pub omega: f64,
    /// Coupling points of atom 1 / atom 2.
    pub n1: u32,
    pub n2: u32,
    /// Static inter-point phases in units of π.
    pub phi_a_static_over_pi: f64,
    pub phi_b_static_over_pi: f64,
    /// Inter-point delays in units of 1/Γ.
    #[serde(default)]
    pub tau_a: f64,
    #[serde(default)]
    pub tau_b: f64,
    /// Ideal chiral coupling (both atoms talk to right-movers only).
    #[serde(default)]
    pub chiral: bool,
    /// Sweep window for the probe-detuning axis.
    pub probe_min: f64,
    pub probe_max: f64,
    /// Sweep window for the atomic-detuning axis.
    pub atoms_min: f64,
    pub atoms_max: f64,
    #[serde(default = "default_resolution")]
    pub resolution_probe: u32,
    #[serde(default = "default_resolution")]
    pub resolution_atoms: u32,
    #[serde(default)]
    pub coords: Coords,
    /// |C − 1| window for the Critical regime label.
    #[serde(default = "default_tolerance")]
    pub tolerance_critical: f64,
    /// Output directory; the CLI --out flag takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    /// Worker-thread count; the CLI --workers flag takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<u32>,
}

impl RunConfig {
    /// Reads and validates a TOML run configuration.
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig = toml::from_str(&raw)
            .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Serializes back to the TOML schema.
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialize: {e}")))
    }

    /// Structural checks beyond what the type system enforces. The molecule
    /// parameters are validated through the library constructor so the two
    /// layers cannot drift apart.
    pub fn validate(&self) -> Result<(), CliError> {
        self.molecule()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.resolution_probe < 1 || self.resolution_atoms < 1 {
            return Err(CliError::Config(format!(
                "resolutions must be >= 1, got {}x{}",
                self.resolution_probe, self.resolution_atoms
            )));
        }
        for (name, lo, hi, n) in [
            (
                "probe",
                self.probe_min,
                self.probe_max,
                self.resolution_probe,
            ),
            (
                "atoms",
                self.atoms_min,
                self.atoms_max,
                self.resolution_atoms,
            ),
        ] {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(CliError::Config(format!("{name} window must be finite")));
            }
            if n > 1 && hi <= lo {
                return Err(CliError::Config(format!(
                    "{name} window must be increasing, got [{lo}, {hi}]"
                )));
            }
        }
        if !self.tolerance_critical.is_finite() || self.tolerance_critical <= 0.0 {
            return Err(CliError::Config(format!(
                "tolerance_critical must be positive, got {}",
                self.tolerance_critical
            )));
        }
        Ok(())
    }

    /// The physical molecule described by this run.
    pub fn molecule(&self) -> MoleculeConfig {
        MoleculeConfig {
            omega: self.omega,
            n1: self.n1,
            n2: self.n2,
            phi_a_static: self.phi_a_static_over_pi * std::f64::consts::PI,
            phi_b_static: self.phi_b_static_over_pi * std::f64::consts::PI,
            tau_a: self.tau_a,
            tau_b: self.tau_b,
            chirality: if self.chiral {
                Chirality::IdealChiral
            } else {
                Chirality::Symmetric
            },
        }
    }

    pub fn probe_window(&self) -> (f64, f64) {
        (self.probe_min, self.probe_max)
    }

    pub fn atoms_window(&self) -> (f64, f64) {
        (self.atoms_min, self.atoms_max)
    }

    pub fn resolution(&self) -> (usize, usize) {
        (
            self.resolution_probe as usize,
            self.resolution_atoms as usize,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig {
            omega: 1.0,
            n1: 4,
            n2: 4,
            phi_a_static_over_pi: 0.8,
            phi_b_static_over_pi: 0.8,
            tau_a: 0.0,
            tau_b: 0.0,
            chiral: false,
            probe_min: -6.0,
            probe_max: 6.0,
            atoms_min: -6.0,
            atoms_max: 6.0,
            resolution_probe: 401,
            resolution_atoms: 401,
            coords: Coords::Tilde,
            tolerance_critical: 1e-9,
            out_dir: None,
            workers: None,
        }
    }

    #[test]
    fn serialization_round_trip_is_a_fixed_point() {
        let config = sample();
        let once = config.to_toml().unwrap();
        let reparsed: RunConfig = toml::from_str(&once).unwrap();
        assert_eq!(reparsed, config);
        let twice = reparsed.to_toml().unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn optional_keys_may_be_omitted() {
        let minimal = "\
omega = 1.0
n1 = 4
n2 = 4
phi_a_static_over_pi = 0.8
phi_b_static_over_pi = 0.8
probe_min = -6.0
probe_max = 6.0
atoms_min = -6.0
atoms_max = 6.0
";
        let config: RunConfig = toml::from_str(minimal).unwrap();
        assert_eq!(config.resolution_probe, 401);
        assert_eq!(config.coords, Coords::Bare);
        assert_eq!(config.tau_a, 0.0);
        assert!(!config.chiral);
        assert_eq!(config.tolerance_critical, 1e-9);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = sample().to_toml().unwrap();
        text.push_str("mystery_knob = 3\n");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        let mut bad = sample();
        bad.omega = -1.0;
        assert!(bad.validate().is_err());
        let mut bad = sample();
        bad.tau_a = -0.2;
        assert!(bad.validate().is_err());
        let mut bad = sample();
        bad.resolution_probe = 0;
        assert!(bad.validate().is_err());
        let mut bad = sample();
        bad.probe_max = bad.probe_min - 1.0;
        assert!(bad.validate().is_err());
        let mut bad = sample();
        bad.tolerance_critical = 0.0;
        assert!(bad.validate().is_err());
        assert!(sample().validate().is_ok());
    }

    #[test]
    fn phases_are_quoted_in_units_of_pi() {
        let molecule = sample().molecule();
        assert!((molecule.phi_a_static - 0.8 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn chiral_flag_selects_the_coupling_orientation() {
        let mut config = sample();
        config.chiral = true;
        assert_eq!(config.molecule().chirality, Chirality::IdealChiral);
    }
}
