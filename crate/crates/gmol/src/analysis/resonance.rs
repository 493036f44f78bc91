//! Self-consistent resonance conditions under retardation.
//!
//! With propagation delays the Lamb shifts depend on the very detuning they
//! shift, so each atom's resonance condition becomes an implicit equation:
//!
//! ```text
//! atom 1:  Δ − Δ_ls,1(φ̃ₐ + Δ τₐ)          = 0
//! atom 2:  (Δ − δ) − Δ_ls,2(φ̃_b + (Δ−δ) τ_b) = 0
//! ```
//!
//! For τ = 0 each condition has exactly one root (the static shift); finite
//! delay bends the right-hand side periodically and the conditions can be
//! met at several probe detunings.

use crate::error::Result;
use crate::model::{lamb_shift, MoleculeConfig};

/// Default number of bracketing intervals across the probe window.
const DEFAULT_BRACKET_STEPS: usize = 20_000;

/// Residual below which a bisected root is accepted.
const ROOT_RESIDUAL: f64 = 1e-12;

/// Probe detunings satisfying each atom's dressed resonance condition.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResonanceRoots {
    /// Roots of Δ − Δ_ls,1(φₐ(Δ)) = 0, ascending.
    pub atom1: Vec<f64>,
    /// Roots of (Δ−δ) − Δ_ls,2(φ_b(Δ, δ)) = 0, ascending.
    pub atom2: Vec<f64>,
}

impl ResonanceRoots {
    pub fn total(&self) -> usize {
        self.atom1.len() + self.atom2.len()
    }
}

/// Finds every self-consistent resonance in `probe_window` by scanning
/// [`DEFAULT_BRACKET_STEPS`] intervals for sign changes and bisecting each
/// bracket.
pub fn locate_resonances(
    config: &MoleculeConfig,
    delta_atoms: f64,
    probe_window: (f64, f64),
) -> Result<ResonanceRoots> {
    locate_resonances_with_steps(config, delta_atoms, probe_window, DEFAULT_BRACKET_STEPS)
}

/// [`locate_resonances`] with an explicit bracketing resolution. Roots closer
/// together than one scan interval can be missed; halving the step and
/// checking the count is stable is the cheap way to build confidence.
pub fn locate_resonances_with_steps(
    config: &MoleculeConfig,
    delta_atoms: f64,
    probe_window: (f64, f64),
    steps: usize,
) -> Result<ResonanceRoots> {
    config.validate()?;
    if !probe_window.0.is_finite()
        || !probe_window.1.is_finite()
        || probe_window.1 <= probe_window.0
    {
        return Err(crate::error::Error::InvalidConfig(format!(
            "probe window must be finite and increasing, got [{}, {}]",
            probe_window.0, probe_window.1
        )));
    }
    if !delta_atoms.is_finite() {
        return Err(crate::error::Error::InvalidConfig(
            "atomic detuning must be finite".into(),
        ));
    }
    if steps < 2 {
        return Err(crate::error::Error::InvalidConfig(
            "bracket scan needs at least 2 intervals".into(),
        ));
    }
    let cond1 =
        |delta: f64| delta - lamb_shift(config.n1, config.phi_a_static + delta * config.tau_a);
    let cond2 = |delta: f64| {
        let d2 = delta - delta_atoms;
        d2 - lamb_shift(config.n2, config.phi_b_static + d2 * config.tau_b)
    };
    Ok(ResonanceRoots {
        atom1: bracketed_roots(&cond1, probe_window, steps),
        atom2: bracketed_roots(&cond2, probe_window, steps),
    })
}

/// All roots of `f` in `window`, one per sign-change bracket.
fn bracketed_roots(f: &dyn Fn(f64) -> f64, window: (f64, f64), steps: usize) -> Vec<f64> {
    let (lo, hi) = window;
    let step = (hi - lo) / steps as f64;
    let mut roots = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for k in 1..=steps {
        // Recompute from the window edge so the grid is exact regardless of
        // accumulation order.
        let x = if k == steps { hi } else { lo + k as f64 * step };
        let fx = f(x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if fx != 0.0 && (f_prev < 0.0) != (fx < 0.0) {
            roots.push(bisect(f, x_prev, x, f_prev));
        }
        x_prev = x;
        f_prev = fx;
    }
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    roots
}

/// Bisection on a sign-change bracket, run until the residual is below
/// [`ROOT_RESIDUAL`] or the bracket collapses to adjacent floats.
fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, f_a: f64) -> f64 {
    let negative_left = f_a < 0.0;
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return mid;
        }
        let fm = f(mid);
        if fm.abs() < ROOT_RESIDUAL {
            return mid;
        }
        if (fm < 0.0) == negative_left {
            a = mid;
        } else {
            b = mid;
        }
    }
}
