//! Grid sweeps and derived quantities: spectra over (Δ, δ), cooperativity
//! phase diagrams with the C = 1 boundary, 1-D feature extraction,
//! self-consistent resonance location, and optimal-transfer search.

mod features;
mod grid;
mod resonance;
mod transfer;

pub use features::{
    anticrossing_gap, anticrossing_gap_scan, find_features_1d, find_features_1d_with, FeatureSet,
    SpectralFeature, DEFAULT_PROMINENCE,
};
pub use grid::{
    phase_diagram, phase_diagram_with_tol, sweep, sweep_with_tol, GridCell, GridMode, PhaseDiagram,
    SpectrumGrid,
};
pub use resonance::{locate_resonances, locate_resonances_with_steps, ResonanceRoots};
pub use transfer::{grid_max_transfer, optimal_transfer, optimal_transfer_in, TransferPoint};
