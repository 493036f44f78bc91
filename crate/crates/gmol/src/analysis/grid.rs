//! Dense (Δ, δ) sweeps and cooperativity phase diagrams.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    classify_regime, effective_couplings, Detunings, EffectiveCouplings, MoleculeConfig, Regime,
    DEFAULT_CRITICAL_TOL,
};
use crate::scattering::{scatter, ScatteringResult};

/// Whether grid axes are the shifted detunings (Δ̃, δ̃) or the bare (Δ, δ).
///
/// Shifted axes are the natural frame for Markovian spectra (the static Lamb
/// shifts are inverted out of the axes); bare axes are the only meaningful
/// frame once delays make the shifts detuning-dependent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    TildeCoordinates,
    BareCoordinates,
}

/// One evaluated grid point. A pole is kept as a flagged cell (the `Err`
/// carries the offending point) rather than aborting the grid.
#[derive(Debug, Clone)]
pub struct GridCell {
    pub result: std::result::Result<ScatteringResult, Error>,
    pub regime: Regime,
    /// Bare detunings the cell was evaluated at (the axes may be shifted).
    pub detunings: Detunings,
}

/// Rectangular sweep over probe and atomic detuning.
#[derive(Debug, Clone)]
pub struct SpectrumGrid {
    /// Strictly increasing probe-detuning axis (Δ̃ or Δ per `mode`).
    pub axis_probe: Vec<f64>,
    /// Strictly increasing atomic-detuning axis (δ̃ or δ per `mode`).
    pub axis_atoms: Vec<f64>,
    /// Row-major cells, atomic detuning outer: `cells[ia * n_probe + ip]`.
    pub cells: Vec<GridCell>,
    pub mode: GridMode,
}

impl SpectrumGrid {
    pub fn cell(&self, ip: usize, ia: usize) -> &GridCell {
        &self.cells[ia * self.axis_probe.len() + ip]
    }

    /// Number of cells flagged as poles.
    pub fn pole_count(&self) -> usize {
        self.cells.iter().filter(|c| c.result.is_err()).count()
    }
}

/// Uniform, strictly increasing axis with `n` points over `range` (a single
/// point sits at the lower edge).
pub(crate) fn linspace(range: (f64, f64), n: usize) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if n == 0 {
        return Err(Error::InvalidConfig("axis resolution must be >= 1".into()));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidConfig("axis range must be finite".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if hi <= lo {
        return Err(Error::InvalidConfig(format!(
            "axis range must be increasing, got [{lo}, {hi}]"
        )));
    }
    let step = (hi - lo) / (n as f64 - 1.0);
    Ok((0..n).map(|k| lo + k as f64 * step).collect())
}

/// Static Lamb shifts used to translate shifted axes into bare detunings.
pub(crate) fn static_lamb_shifts(config: &MoleculeConfig) -> (f64, f64) {
    let ec = effective_couplings(&config.markovian(), &Detunings::new(0.0, 0.0));
    (ec.lamb1, ec.lamb2)
}

pub(crate) fn to_bare(mode: GridMode, x: f64, y: f64, lambs: (f64, f64)) -> Detunings {
    match mode {
        GridMode::BareCoordinates => Detunings::new(x, y),
        // Δ = Δ̃ + Δ_ls,1 and δ = δ̃ + Δ_ls,1 − Δ_ls,2.
        GridMode::TildeCoordinates => Detunings::new(x + lambs.0, y + lambs.0 - lambs.1),
    }
}

/// Dense evaluation of the scattering problem over a rectangular window,
/// using the default regime-classification tolerance.
pub fn sweep(
    config: &MoleculeConfig,
    probe_range: (f64, f64),
    atoms_range: (f64, f64),
    resolution: (usize, usize),
    mode: GridMode,
) -> Result<SpectrumGrid> {
    sweep_with_tol(
        config,
        probe_range,
        atoms_range,
        resolution,
        mode,
        DEFAULT_CRITICAL_TOL,
    )
}

/// [`sweep`] with an explicit |C−1| tolerance for the regime labels.
///
/// Cells are evaluated in parallel but stored in a fixed row-major order,
/// so results are identical for any worker count.
pub fn sweep_with_tol(
    config: &MoleculeConfig,
    probe_range: (f64, f64),
    atoms_range: (f64, f64),
    resolution: (usize, usize),
    mode: GridMode,
    tol: f64,
) -> Result<SpectrumGrid> {
    config.validate()?;
    let axis_probe = linspace(probe_range, resolution.0)?;
    let axis_atoms = linspace(atoms_range, resolution.1)?;
    let lambs = static_lamb_shifts(config);
    let n_probe = axis_probe.len();
    let cells: Vec<GridCell> = (0..n_probe * axis_atoms.len())
        .into_par_iter()
        .map(|idx| {
            let det = to_bare(
                mode,
                axis_probe[idx % n_probe],
                axis_atoms[idx / n_probe],
                lambs,
            );
            let result = scatter(config, &det);
            let couplings = match &result {
                Ok(res) => res.couplings,
                Err(_) => effective_couplings(config, &det),
            };
            GridCell {
                result,
                regime: classify_regime(&couplings, tol),
                detunings: det,
            }
        })
        .collect();
    Ok(SpectrumGrid {
        axis_probe,
        axis_atoms,
        cells,
        mode,
    })
}

/// Cooperativity map with regime labels and the C = 1 boundary.
#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub axis_probe: Vec<f64>,
    pub axis_atoms: Vec<f64>,
    /// Row-major effective couplings (atomic detuning outer); the
    /// cooperativity entry is +∞ where Γ₁Γ₂ = 0.
    pub couplings: Vec<EffectiveCouplings>,
    pub regimes: Vec<Regime>,
    /// C = 1 contour as line segments in bare (Δ, δ), in deterministic
    /// scan order. Cells touching a decoupled corner are excluded.
    pub boundary: Vec<[(f64, f64); 2]>,
}

impl PhaseDiagram {
    pub fn cooperativity_at(&self, ip: usize, ia: usize) -> f64 {
        self.couplings[ia * self.axis_probe.len() + ip].cooperativity
    }

    /// Fraction of grid cells in the strong-coupling region C > 1
    /// (decoupled cells, C = +∞, count as strong for this tally).
    pub fn strong_fraction(&self) -> f64 {
        let n = self.couplings.len();
        let strong = self
            .couplings
            .iter()
            .filter(|ec| ec.cooperativity > 1.0)
            .count();
        strong as f64 / n as f64
    }
}

/// Cooperativity phase diagram in bare coordinates with the default regime
/// tolerance. Markovian configurations give a constant map (the phases do
/// not depend on the detunings) and hence an empty or degenerate boundary.
pub fn phase_diagram(
    config: &MoleculeConfig,
    probe_range: (f64, f64),
    atoms_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<PhaseDiagram> {
    phase_diagram_with_tol(
        config,
        probe_range,
        atoms_range,
        resolution,
        DEFAULT_CRITICAL_TOL,
    )
}

/// [`phase_diagram`] with an explicit |C−1| tolerance.
pub fn phase_diagram_with_tol(
    config: &MoleculeConfig,
    probe_range: (f64, f64),
    atoms_range: (f64, f64),
    resolution: (usize, usize),
    tol: f64,
) -> Result<PhaseDiagram> {
    config.validate()?;
    let axis_probe = linspace(probe_range, resolution.0)?;
    let axis_atoms = linspace(atoms_range, resolution.1)?;
    let n_probe = axis_probe.len();
    let per_cell: Vec<(EffectiveCouplings, Regime)> = (0..n_probe * axis_atoms.len())
        .into_par_iter()
        .map(|idx| {
            let det = Detunings::new(axis_probe[idx % n_probe], axis_atoms[idx / n_probe]);
            let ec = effective_couplings(config, &det);
            let regime = classify_regime(&ec, tol);
            (ec, regime)
        })
        .collect();
    let cooperativity: Vec<f64> = per_cell.iter().map(|(ec, _)| ec.cooperativity).collect();
    let boundary = unit_contour(&axis_probe, &axis_atoms, &cooperativity);
    let regimes: Vec<Regime> = per_cell.iter().map(|(_, r)| *r).collect();
    let couplings: Vec<EffectiveCouplings> = per_cell.into_iter().map(|(ec, _)| ec).collect();
    Ok(PhaseDiagram {
        axis_probe,
        axis_atoms,
        couplings,
        regimes,
        boundary,
    })
}

/// Marching squares with linear interpolation for the C = 1 level set.
/// Emits raw per-cell segments (overlay quality, no sub-cell polishing).
fn unit_contour(
    axis_probe: &[f64],
    axis_atoms: &[f64],
    cooperativity: &[f64],
) -> Vec<[(f64, f64); 2]> {
    let n_probe = axis_probe.len();
    let n_atoms = axis_atoms.len();
    let mut segments = Vec::new();
    if n_probe < 2 || n_atoms < 2 {
        return segments;
    }
    let value = |ip: usize, ia: usize| cooperativity[ia * n_probe + ip] - 1.0;
    for ia in 0..n_atoms - 1 {
        for ip in 0..n_probe - 1 {
            // Corner order: 0 = (ip,ia), 1 = (ip+1,ia), 2 = (ip+1,ia+1), 3 = (ip,ia+1).
            let f = [
                value(ip, ia),
                value(ip + 1, ia),
                value(ip + 1, ia + 1),
                value(ip, ia + 1),
            ];
            if f.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let xs = [axis_probe[ip], axis_probe[ip + 1]];
            let ys = [axis_atoms[ia], axis_atoms[ia + 1]];
            // Zero crossings on the four edges, in edge order bottom, right, top, left.
            let edges = [
                (f[0], f[1], (xs[0], ys[0]), (xs[1], ys[0])),
                (f[1], f[2], (xs[1], ys[0]), (xs[1], ys[1])),
                (f[2], f[3], (xs[1], ys[1]), (xs[0], ys[1])),
                (f[3], f[0], (xs[0], ys[1]), (xs[0], ys[0])),
            ];
            let mut hits: Vec<(f64, f64)> = Vec::with_capacity(4);
            for (fa, fb, pa, pb) in edges {
                if (fa < 0.0 && fb >= 0.0) || (fa >= 0.0 && fb < 0.0) {
                    let t = fa / (fa - fb);
                    hits.push((pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1)));
                }
            }
            match hits.len() {
                2 => segments.push([hits[0], hits[1]]),
                4 => {
                    // Saddle cell: the center mean decides which opposite
                    // corners stay connected, keeping the pairing deterministic.
                    let center = 0.25 * (f[0] + f[1] + f[2] + f[3]);
                    if (center >= 0.0) == (f[0] >= 0.0) {
                        // Corners 1 and 3 are isolated islands.
                        segments.push([hits[0], hits[1]]);
                        segments.push([hits[2], hits[3]]);
                    } else {
                        // Corners 0 and 2 are isolated islands.
                        segments.push([hits[0], hits[3]]);
                        segments.push([hits[1], hits[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    segments
}
