//! Closed-form single-photon scattering amplitudes and probabilities.
//!
//! A photon enters from port 1 (left end of waveguide A). With shifted
//! detunings Δ̃ = Δ − Δ_ls,1 and δ̃ = δ − Δ_ls,1 + Δ_ls,2, and the shorthand
//! A = Δ̃, B = Δ̃ − δ̃, the symmetric-coupling amplitudes are
//!
//! ```text
//! t₁→₂ = [Ω² − A(B + iΓ₂)] / D      D = Ω² − (A + iΓ₁)(B + iΓ₂)
//! r₁→₁ = iΓ₁(B + iΓ₂) / D
//! t₁→₃ = t₁→₄ = i√(Γ₁Γ₂) Ω / D
//! ```
//!
//! and in the ideal chiral case (coupling to right-movers only)
//!
//! ```text
//! t₁→₂ = [Ω² − (A − iΓ₁)(B + iΓ₂)] / D,   t₁→₄ = 2i√(Γ₁Γ₂) Ω / D,
//! r₁→₁ = t₁→₃ = 0.
//! ```
//!
//! Overall propagation phase factors are omitted throughout, matching the
//! brute-force solve only up to global phases (moduli are identical).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{effective_couplings, Chirality, Detunings, EffectiveCouplings, MoleculeConfig};

/// Denominator modulus below which the evaluation point is reported as a
/// bound-state pole instead of a scattering state.
pub const POLE_EPS: f64 = 1e-14;

/// Tolerance on Γ₂ for the dedicated EIT-limit operations.
pub const EIT_GAMMA_TOL: f64 = 1e-12;

/// Output-port probabilities (squared amplitude moduli).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortProbabilities {
    /// T₁→₂, transmission along waveguide A.
    pub t12: f64,
    /// R₁→₁, reflection back into port 1.
    pub r11: f64,
    /// T₁→₃, backward transfer into waveguide B.
    pub t13: f64,
    /// T₁→₄, forward transfer into waveguide B.
    pub t14: f64,
}

impl PortProbabilities {
    pub fn sum(&self) -> f64 {
        self.t12 + self.r11 + self.t13 + self.t14
    }
}

/// Amplitudes, probabilities, and the couplings snapshot for one (Δ, δ) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub t12: Complex64,
    pub r11: Complex64,
    pub t13: Complex64,
    pub t14: Complex64,
    pub probs: PortProbabilities,
    /// Δ̃ = Δ − Δ_ls,1.
    pub tilde_delta: f64,
    /// δ̃ = δ − Δ_ls,1 + Δ_ls,2.
    pub tilde_small_delta: f64,
    pub couplings: EffectiveCouplings,
}

/// Builds the result from the four numerators and the common denominator.
///
/// Probabilities are normalized by the summed numerator moduli: the identity
/// |n₁₂|² + |n₁₁|² + 2|n₁₃|² = |D|² (and its chiral analogue) holds exactly
/// in real arithmetic, so dividing by the sum instead of |D|² keeps the four
/// probabilities summing to 1 to within a few rounding errors even where the
/// individual terms nearly cancel.
#[allow(clippy::too_many_arguments)]
fn assemble(
    num_t12: Complex64,
    num_r11: Complex64,
    num_t13: Complex64,
    num_t14: Complex64,
    denom: Complex64,
    tilde_delta: f64,
    tilde_small_delta: f64,
    couplings: EffectiveCouplings,
) -> Result<ScatteringResult> {
    let denom_modulus = denom.norm();
    if denom_modulus < POLE_EPS {
        return Err(Error::Pole {
            denominator_modulus: denom_modulus,
            tilde_delta,
            tilde_small_delta,
        });
    }
    let weights = [
        num_t12.norm_sqr(),
        num_r11.norm_sqr(),
        num_t13.norm_sqr(),
        num_t14.norm_sqr(),
    ];
    let total: f64 = weights.iter().sum();
    Ok(ScatteringResult {
        t12: num_t12 / denom,
        r11: num_r11 / denom,
        t13: num_t13 / denom,
        t14: num_t14 / denom,
        probs: PortProbabilities {
            t12: weights[0] / total,
            r11: weights[1] / total,
            t13: weights[2] / total,
            t14: weights[3] / total,
        },
        tilde_delta,
        tilde_small_delta,
        couplings,
    })
}

fn from_shifted(
    config: &MoleculeConfig,
    couplings: EffectiveCouplings,
    tilde_delta: f64,
    tilde_small_delta: f64,
) -> Result<ScatteringResult> {
    let omega_sq = config.omega * config.omega;
    let a = Complex64::new(tilde_delta, couplings.gamma1);
    let b = Complex64::new(tilde_delta - tilde_small_delta, couplings.gamma2);
    let denom = omega_sq - a * b;
    let cross = Complex64::new(
        0.0,
        (couplings.gamma1 * couplings.gamma2).sqrt() * config.omega,
    );
    match config.chirality {
        Chirality::Symmetric => {
            let num_t12 = omega_sq - tilde_delta * b;
            let num_r11 = Complex64::new(0.0, couplings.gamma1) * b;
            assemble(
                num_t12,
                num_r11,
                cross,
                cross,
                denom,
                tilde_delta,
                tilde_small_delta,
                couplings,
            )
        }
        Chirality::IdealChiral => {
            let num_t12 = omega_sq - a.conj() * b;
            assemble(
                num_t12,
                Complex64::ZERO,
                Complex64::ZERO,
                2.0 * cross,
                denom,
                tilde_delta,
                tilde_small_delta,
                couplings,
            )
        }
    }
}

/// Evaluates the closed-form amplitudes and probabilities at one detuning
/// pair, using the retardation-corrected phases.
///
/// Γ₂ = 0 needs no special casing: the general expressions reduce
/// continuously to the EIT transmission profile there.
pub fn scatter(config: &MoleculeConfig, det: &Detunings) -> Result<ScatteringResult> {
    let couplings = effective_couplings(config, det);
    let tilde_delta = det.delta_probe - couplings.lamb1;
    let tilde_small_delta = det.delta_atoms - couplings.lamb1 + couplings.lamb2;
    from_shifted(config, couplings, tilde_delta, tilde_small_delta)
}

/// Couplings at the static (Markovian) phases; the resonance-line and
/// EIT-root formulas below are defined in that regime.
fn static_couplings(config: &MoleculeConfig) -> EffectiveCouplings {
    effective_couplings(&config.markovian(), &Detunings::new(0.0, 0.0))
}

/// Scattering on the Δ̃ = 0 line (photon resonant with atom 1), through the
/// dedicated specialization of the amplitudes:
///
/// ```text
/// t₁→₂ = C/(C+1+iδ̃/Γ₂),  r₁→₁ = −(1+iδ̃/Γ₂)/(C+1+iδ̃/Γ₂),
/// t₁→₃(₄) = i√C/(C+1+iδ̃/Γ₂)
/// ```
///
/// evaluated in the cancellation-free unreduced form. The phases are taken
/// at their static values (the line Δ̃ = 0 is a Markovian construction).
pub fn scatter_on_atom1_resonance(
    config: &MoleculeConfig,
    delta_atoms: f64,
) -> Result<ScatteringResult> {
    let couplings = static_couplings(config);
    let small = delta_atoms - couplings.lamb1 + couplings.lamb2;
    let omega_sq = config.omega * config.omega;
    let (g1, g2) = (couplings.gamma1, couplings.gamma2);
    // A = 0, B = −δ̃.
    let b = Complex64::new(-small, g2);
    let denom = omega_sq - Complex64::new(0.0, g1) * b;
    let cross = Complex64::new(0.0, (g1 * g2).sqrt() * config.omega);
    match config.chirality {
        Chirality::Symmetric => {
            let num_r11 = Complex64::new(0.0, g1) * b;
            assemble(
                Complex64::from(omega_sq),
                num_r11,
                cross,
                cross,
                denom,
                0.0,
                small,
                couplings,
            )
        }
        Chirality::IdealChiral => {
            let num_t12 = omega_sq - Complex64::new(0.0, -g1) * b;
            assemble(
                num_t12,
                Complex64::ZERO,
                Complex64::ZERO,
                2.0 * cross,
                denom,
                0.0,
                small,
                couplings,
            )
        }
    }
}

/// Scattering on the Δ̃ = δ̃ line (photon resonant with atom 2):
///
/// ```text
/// t₁→₂ = 1 − 1/(C+1−iδ̃/Γ₁),  r₁→₁ = −1/(C+1−iδ̃/Γ₁),
/// t₁→₃(₄) = i√C/(C+1−iδ̃/Γ₁)
/// ```
///
/// again via the unreduced numerators (A = δ̃, B = 0), static phases.
pub fn scatter_on_atom2_resonance(
    config: &MoleculeConfig,
    delta_atoms: f64,
) -> Result<ScatteringResult> {
    let couplings = static_couplings(config);
    let small = delta_atoms - couplings.lamb1 + couplings.lamb2;
    let omega_sq = config.omega * config.omega;
    let (g1, g2) = (couplings.gamma1, couplings.gamma2);
    let a = Complex64::new(small, g1);
    let b = Complex64::new(0.0, g2);
    let denom = omega_sq - a * b;
    let cross = Complex64::new(0.0, (g1 * g2).sqrt() * config.omega);
    match config.chirality {
        Chirality::Symmetric => assemble(
            omega_sq - small * b,
            Complex64::new(0.0, g1) * b,
            cross,
            cross,
            denom,
            small,
            small,
            couplings,
        ),
        Chirality::IdealChiral => assemble(
            omega_sq - a.conj() * b,
            Complex64::ZERO,
            Complex64::ZERO,
            2.0 * cross,
            denom,
            small,
            small,
            couplings,
        ),
    }
}

/// Transmission amplitude in the EIT limit Γ₂ = 0:
///
/// ```text
/// t = [Ω² − Δ̃(Δ̃−δ̃)] / [Ω² − (Δ̃+iΓ₁)(Δ̃−δ̃)]
/// ```
///
/// |t| = 1 exactly on the transparency line Δ̃ = δ̃. Errors with
/// [`Error::NotInEitLimit`] when the configuration's Γ₂ exceeds
/// [`EIT_GAMMA_TOL`].
pub fn eit_transmission(config: &MoleculeConfig, det: &Detunings) -> Result<Complex64> {
    let couplings = effective_couplings(config, det);
    if couplings.gamma2.abs() > EIT_GAMMA_TOL {
        return Err(Error::NotInEitLimit {
            gamma2: couplings.gamma2,
            tolerance: EIT_GAMMA_TOL,
        });
    }
    let tilde_delta = det.delta_probe - couplings.lamb1;
    let tilde_small_delta = det.delta_atoms - couplings.lamb1 + couplings.lamb2;
    let omega_sq = config.omega * config.omega;
    let b = tilde_delta - tilde_small_delta;
    let num = omega_sq - tilde_delta * b;
    let denom = omega_sq - Complex64::new(tilde_delta, couplings.gamma1) * b;
    if denom.norm() < POLE_EPS {
        return Err(Error::Pole {
            denominator_modulus: denom.norm(),
            tilde_delta,
            tilde_small_delta,
        });
    }
    Ok(num / denom)
}

/// Real roots of the EIT-numerator quadratic, i.e. the transparency-window
/// centers in bare probe detuning:
///
/// ```text
/// Δ± = [Δ_ls,1 + Δ_ls,2 + δ ± √((Δ_ls,1 − Δ_ls,2 − δ)² + 4Ω²)] / 2
/// ```
///
/// with the static Lamb shifts. Returns (Δ₊, Δ₋) with Δ₊ ≥ Δ₋; the
/// discriminant is ≥ 4Ω² ≥ 0, so both roots always exist.
pub fn eit_peak_positions(config: &MoleculeConfig, delta_atoms: f64) -> (f64, f64) {
    let couplings = static_couplings(config);
    let (l1, l2) = (couplings.lamb1, couplings.lamb2);
    let mid = l1 + l2 + delta_atoms;
    let gap = l1 - l2 - delta_atoms;
    let root = (gap * gap + 4.0 * config.omega * config.omega).sqrt();
    ((mid + root) / 2.0, (mid - root) / 2.0)
}
