//! Physical configuration and the phase-dependent effective couplings.
//!
//! Each atom couples to its waveguide at `n` points separated by a phase
//! φ = k·d per segment. Interference across the points turns the bare decay
//! rate Γ into an effective rate Γ_eff(φ) = Γ sin²(Nφ/2)/sin²(φ/2) and
//! induces a level shift Δ_ls(φ) = Γ (N sinφ − sin Nφ)/(1 − cosφ). With a
//! finite inter-point delay τ the phase picks up a detuning-dependent part,
//! φₐ = φ̃ₐ + Δτᵃ and φ_b = φ̃_b + (Δ−δ)τᵇ, which is what makes the
//! non-Markovian regime nontrivial.

use crate::error::{Error, Result};

/// Coupling orientation of the atoms to their waveguides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    /// Each coupling point talks to both propagation directions.
    Symmetric,
    /// Both atoms couple to right-movers only (total rate kept at Γ_eff),
    /// which removes reflection and backward transfer entirely.
    IdealChiral,
}

/// Full physical parameterization of the two-atom molecule, in units of the
/// single-point decay rate Γ = g²/v_g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoleculeConfig {
    /// Interatomic exchange coupling Ω ≥ 0.
    pub omega: f64,
    /// Number of coupling points of atom 1 to waveguide A (≥ 1).
    pub n1: u32,
    /// Number of coupling points of atom 2 to waveguide B (≥ 1).
    pub n2: u32,
    /// Static inter-point phase φ̃ₐ = k₁|z₂ᵃ−z₁ᵃ| (radians, unnormalized).
    pub phi_a_static: f64,
    /// Static inter-point phase φ̃_b = k₂|z₂ᵇ−z₁ᵇ| (radians, unnormalized).
    pub phi_b_static: f64,
    /// Inter-point propagation delay in waveguide A, units of 1/Γ (0 = Markovian).
    pub tau_a: f64,
    /// Inter-point propagation delay in waveguide B, units of 1/Γ.
    pub tau_b: f64,
    pub chirality: Chirality,
}

impl MoleculeConfig {
    /// Checks the documented invariants: Ω ≥ 0, n ≥ 1, τ ≥ 0, all finite.
    pub fn validate(&self) -> Result<()> {
        if !self.omega.is_finite() || self.omega < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "omega must be finite and >= 0, got {}",
                self.omega
            )));
        }
        if self.n1 < 1 || self.n2 < 1 {
            return Err(Error::InvalidConfig(format!(
                "coupling-point counts must be >= 1, got n1 = {}, n2 = {}",
                self.n1, self.n2
            )));
        }
        if !self.phi_a_static.is_finite() || !self.phi_b_static.is_finite() {
            return Err(Error::InvalidConfig("static phases must be finite".into()));
        }
        for (name, tau) in [("tau_a", self.tau_a), ("tau_b", self.tau_b)] {
            if !tau.is_finite() || tau < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and >= 0, got {tau}"
                )));
            }
        }
        Ok(())
    }

    /// True when both delays vanish, so phases do not depend on detuning.
    pub fn is_markovian(&self) -> bool {
        self.tau_a == 0.0 && self.tau_b == 0.0
    }

    /// Copy of this configuration with the delays removed.
    pub fn markovian(&self) -> MoleculeConfig {
        MoleculeConfig {
            tau_a: 0.0,
            tau_b: 0.0,
            ..*self
        }
    }

    /// Markovian-validity diagnostics |Δ|τᵃ and |Δ−δ|τᵇ. Small values mean
    /// the static-phase approximation is good; no cutoff is enforced.
    pub fn markovian_products(&self, det: &Detunings) -> (f64, f64) {
        (
            det.delta_probe.abs() * self.tau_a,
            (det.delta_probe - det.delta_atoms).abs() * self.tau_b,
        )
    }
}

/// Probe and atomic detunings, both in Γ units and unrestricted in sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detunings {
    /// Probe detuning Δ = ω(k) − ω₁.
    pub delta_probe: f64,
    /// Atomic detuning δ = ω₂ − ω₁.
    pub delta_atoms: f64,
}

impl Detunings {
    pub fn new(delta_probe: f64, delta_atoms: f64) -> Self {
        Detunings {
            delta_probe,
            delta_atoms,
        }
    }
}

/// Derived per-atom couplings at one detuning point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCouplings {
    /// Effective decay rate Γ₁ of atom 1 into waveguide A (Γ units, ≥ 0).
    pub gamma1: f64,
    /// Effective decay rate Γ₂ of atom 2 into waveguide B.
    pub gamma2: f64,
    /// Lamb shift Δ_ls,1 of atom 1 (Γ units).
    pub lamb1: f64,
    /// Lamb shift Δ_ls,2 of atom 2.
    pub lamb2: f64,
    /// Full phase φₐ actually used (static + retardation correction).
    pub phi_a: f64,
    /// Full phase φ_b actually used.
    pub phi_b: f64,
    /// Cooperativity C = Ω²/(Γ₁Γ₂); +∞ when Γ₁Γ₂ = 0.
    pub cooperativity: f64,
    /// Decay-rate asymmetry R = Γ₁/Γ₂ (non-finite when Γ₂ = 0).
    pub ratio: f64,
}

/// Coupling regime at one point of parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Weak,
    Critical,
    Strong,
    /// One of the effective decay rates vanishes (within tolerance).
    Decoupled,
}

impl Regime {
    /// Lower-case label used in datasets.
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Weak => "weak",
            Regime::Critical => "critical",
            Regime::Strong => "strong",
            Regime::Decoupled => "decoupled",
        }
    }
}

/// Default tolerance on |C−1| (and on Γ_j ≈ 0) for regime classification.
pub const DEFAULT_CRITICAL_TOL: f64 = 1e-9;

/// Below this value of |sin(φ/2)| the closed forms for Γ_eff and Δ_ls switch
/// to their Taylor expansions around φ ≡ 0 mod 2π.
pub const PHASE_SERIES_SWITCH: f64 = 1e-6;

/// Reduces a phase to the branch (−π, π] so the series expansions around
/// φ ≡ 0 mod 2π see the small parameter directly.
fn reduce_phase(phi: f64) -> f64 {
    let x = phi.rem_euclid(std::f64::consts::TAU);
    if x > std::f64::consts::PI {
        x - std::f64::consts::TAU
    } else {
        x
    }
}

/// 4th-order expansion of the decay ratio around φ ≡ 0 mod 2π, in the
/// reduced phase x: N²[1 − (N²−1)x²/12 + (N²−1)(2N²−3)x⁴/720].
fn decay_series(n: u32, x: f64) -> f64 {
    let n2 = f64::from(n) * f64::from(n);
    let x2 = x * x;
    n2 * (1.0 - (n2 - 1.0) * x2 / 12.0 + (n2 - 1.0) * (2.0 * n2 - 3.0) * x2 * x2 / 720.0)
}

fn decay_direct(n: u32, phi: f64) -> f64 {
    let ratio = (f64::from(n) * phi / 2.0).sin() / (phi / 2.0).sin();
    ratio * ratio
}

/// 4th-order expansion of the Lamb shift around φ ≡ 0 mod 2π:
/// ((N³−N)/3)·x·[1 − (3N²−2)x²/60].
fn lamb_series(n: u32, x: f64) -> f64 {
    let nf = f64::from(n);
    let n2 = nf * nf;
    (nf * n2 - nf) / 3.0 * x * (1.0 - (3.0 * n2 - 2.0) * x * x / 60.0)
}

/// Lattice-sum form of the Lamb shift, 2 Σ_{s=1}^{N−1} (N−s) sin(sφ).
/// Identical to the ratio form (N sinφ − sin Nφ)/(1 − cosφ) but free of the
/// 0/0 cancellation near φ ≡ 0 mod 2π.
fn lamb_sum(n: u32, phi: f64) -> f64 {
    let mut sum = 0.0;
    for s in 1..n {
        sum += f64::from(n - s) * (f64::from(s) * phi).sin();
    }
    2.0 * sum
}

/// Effective decay rate Γ_eff/Γ = sin²(Nφ/2)/sin²(φ/2) of an `n`-point atom,
/// switching to the Taylor expansion when |sin(φ/2)| < [`PHASE_SERIES_SWITCH`].
pub fn effective_decay(n: u32, phi: f64) -> f64 {
    if (phi / 2.0).sin().abs() < PHASE_SERIES_SWITCH {
        decay_series(n, reduce_phase(phi))
    } else {
        decay_direct(n, phi)
    }
}

/// Lamb shift Δ_ls/Γ = (N sinφ − sin Nφ)/(1 − cosφ) of an `n`-point atom,
/// switching to the Taylor expansion when |sin(φ/2)| < [`PHASE_SERIES_SWITCH`].
pub fn lamb_shift(n: u32, phi: f64) -> f64 {
    if (phi / 2.0).sin().abs() < PHASE_SERIES_SWITCH {
        lamb_series(n, reduce_phase(phi))
    } else {
        lamb_sum(n, phi)
    }
}

/// Retardation-corrected propagation phases (φₐ, φ_b) at the given detunings.
///
/// φₐ = φ̃ₐ + Δτᵃ and φ_b = φ̃_b + (Δ−δ)τᵇ; with zero delays the static
/// phases come back unchanged (Markovian limit).
pub fn effective_phase(config: &MoleculeConfig, det: &Detunings) -> (f64, f64) {
    (
        config.phi_a_static + det.delta_probe * config.tau_a,
        config.phi_b_static + (det.delta_probe - det.delta_atoms) * config.tau_b,
    )
}

/// Evaluates both atoms' decay rates, Lamb shifts, cooperativity, and
/// asymmetry ratio at the retardation-corrected phases.
pub fn effective_couplings(config: &MoleculeConfig, det: &Detunings) -> EffectiveCouplings {
    let (phi_a, phi_b) = effective_phase(config, det);
    let gamma1 = effective_decay(config.n1, phi_a);
    let gamma2 = effective_decay(config.n2, phi_b);
    let product = gamma1 * gamma2;
    let cooperativity = if product > 0.0 {
        config.omega * config.omega / product
    } else {
        f64::INFINITY
    };
    EffectiveCouplings {
        gamma1,
        gamma2,
        lamb1: lamb_shift(config.n1, phi_a),
        lamb2: lamb_shift(config.n2, phi_b),
        phi_a,
        phi_b,
        cooperativity,
        ratio: gamma1 / gamma2,
    }
}

/// Classifies a point by cooperativity: Weak (C < 1−tol), Critical
/// (|C−1| ≤ tol), Strong (C > 1+tol); Decoupled when either effective decay
/// rate is zero within the same tolerance.
pub fn classify_regime(ec: &EffectiveCouplings, tol: f64) -> Regime {
    debug_assert!(tol > 0.0, "classification tolerance must be positive");
    if ec.gamma1 <= tol || ec.gamma2 <= tol {
        return Regime::Decoupled;
    }
    let c = ec.cooperativity;
    if (c - 1.0).abs() <= tol {
        Regime::Critical
    } else if c < 1.0 {
        Regime::Weak
    } else {
        Regime::Strong
    }
}

/// Solves Γ_eff(n, φ) = `target` for the phase by bisection on `bracket`.
///
/// The decay profile oscillates, so the caller supplies a bracket across
/// which it crosses the target (opposite signs of Γ_eff − target at the two
/// ends). This pins a configuration to an exact effective rate instead of a
/// truncated phase literal.
pub fn phase_for_decay_rate(n: u32, target: f64, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !lo.is_finite() || !hi.is_finite() || hi <= lo {
        return Err(Error::InvalidConfig(format!(
            "bracket must be finite and increasing, got [{lo}, {hi}]"
        )));
    }
    let max_rate = f64::from(n) * f64::from(n);
    if !(0.0..=max_rate).contains(&target) {
        return Err(Error::InvalidConfig(format!(
            "target decay rate {target} outside the attainable range [0, {max_rate}]"
        )));
    }
    let f = |phi: f64| effective_decay(n, phi) - target;
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo < 0.0) == (f_hi < 0.0) {
        return Err(Error::InvalidConfig(format!(
            "effective decay rate does not cross {target} on [{lo}, {hi}]"
        )));
    }
    let negative_lo = f_lo < 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if (f(mid) < 0.0) == negative_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
