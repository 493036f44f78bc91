//! Shipped example configurations.
//!
//! All presets use four coupling points per atom and Ω = Γ. The static
//! phases are not quoted as rounded decimals; they are solved so the
//! effective decay rates land exactly on the intended values, which keeps
//! derived quantities like the cooperativity clean (C = 1 to machine
//! precision rather than to three digits).

use gmol::phase_for_decay_rate;

use crate::config::{Coords, RunConfig};

/// Names of all shipped configurations, in catalog order.
pub const NAMES: [&str; 15] = [
    "fig2a", "fig3a", "fig4a", "fig5a", "fig5d", "fig5g", "fig6a", "fig6d", "fig6g", "fig7a",
    "fig7b", "fig7c", "fig7d", "fig7e", "fig7f",
];

/// Static phase (in units of π) of a four-point atom with effective decay
/// rate `rate`. Rate 1 is the exact analytic point φ = 4π/5; the others are
/// bisected inside brackets known to contain a single crossing.
fn phase_over_pi(rate: f64) -> f64 {
    if rate == 1.0 {
        return 0.8;
    }
    let bracket = if rate == 2.0 {
        (0.9, 1.4)
    } else if rate == 0.5 {
        (1.8, 2.0)
    } else if rate == 0.25 {
        (1.6, 1.9)
    } else if rate == 0.125 {
        (2.9, 3.1)
    } else {
        panic!("no bracket recorded for rate {rate}");
    };
    phase_for_decay_rate(4, rate, bracket).expect("bracketed solve cannot fail")
        / std::f64::consts::PI
}

/// Markovian baseline: window [-6, 6]^2 in shifted coordinates at 401x401.
fn base(gamma1: f64, gamma2: f64) -> RunConfig {
    RunConfig {
        omega: 1.0,
        n1: 4,
        n2: 4,
        phi_a_static_over_pi: phase_over_pi(gamma1),
        phi_b_static_over_pi: phase_over_pi(gamma2),
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

/// Adds equal inter-point delays. Delayed runs sweep bare detunings, since
/// the Lamb shifts then depend on the probe and a global shift of the axes
/// no longer removes them.
fn delayed(mut config: RunConfig, tau: f64) -> RunConfig {
    config.tau_a = tau;
    config.tau_b = tau;
    config.coords = Coords::Bare;
    config
}

fn chiral(mut config: RunConfig) -> RunConfig {
    config.chiral = true;
    config
}

/// Looks up a shipped configuration by name.
pub fn preset(name: &str) -> Option<RunConfig> {
    Some(match name {
        "fig2a" => base(2.0, 2.0),
        "fig3a" => base(1.0, 1.0),
        "fig4a" => base(0.25, 0.25),
        "fig5a" => delayed(base(2.0, 2.0), 0.01),
        "fig5d" => delayed(base(2.0, 2.0), 0.04),
        "fig5g" => delayed(base(2.0, 2.0), 0.4),
        "fig6a" => delayed(base(0.25, 0.25), 0.04),
        "fig6d" => delayed(base(0.25, 0.25), 0.24),
        "fig6g" => delayed(base(0.25, 0.25), 0.4),
        "fig7a" => chiral(base(0.25, 0.25)),
        "fig7b" => chiral(base(0.5, 0.125)),
        "fig7c" => chiral(base(0.125, 0.5)),
        "fig7d" => chiral(delayed(base(0.25, 0.25), 0.04)),
        "fig7e" => chiral(delayed(base(0.25, 0.25), 0.24)),
        "fig7f" => chiral(delayed(base(0.25, 0.25), 0.4)),
        _ => return None,
    })
}
