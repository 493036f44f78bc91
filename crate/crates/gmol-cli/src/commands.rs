//! Subcommand implementations. Each command computes first (in parallel
//! where the library parallelizes) and then writes its datasets serially,
//! so the emitted bytes depend only on the configuration.

use std::fs;
use std::io::Write;
use std::path::Path;

use gmol::analysis::{
    anticrossing_gap, find_features_1d, grid_max_transfer, locate_resonances, optimal_transfer,
    phase_diagram_with_tol, sweep_with_tol, FeatureSet, GridMode, SpectrumGrid, TransferPoint,
};
use gmol::oracle::{residual, solve_exact};
use gmol::{effective_couplings, scatter, Chirality, Detunings, Error as LibError, MoleculeConfig};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{create, fmt_f64, io_error, write_json, SCHEMA_VERSION};
use crate::CliError;

/// Conservation check: |T₁₂ + R₁₁ + T₁₃ + T₁₄ − 1|.
const CONSERVATION_TOL: f64 = 1e-12;
/// Agreement between closed-form and oracle port probabilities.
const PORT_TOL: f64 = 1e-10;
/// Max-norm defect of the oracle solution in its own linear system.
const RESIDUAL_TOL: f64 = 1e-9;

fn lib_err(e: LibError) -> CliError {
    CliError::Config(e.to_string())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

fn coords_label(mode: GridMode) -> &'static str {
    match mode {
        GridMode::TildeCoordinates => "tilde",
        GridMode::BareCoordinates => "bare",
    }
}

/// Uniform axis used for the resonance rows (the library keeps its own
/// private version for grids).
fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.0];
    }
    let step = (range.1 - range.0) / (n as f64 - 1.0);
    (0..n).map(|k| range.0 + k as f64 * step).collect()
}

// ---------------------------------------------------------------- spectrum

#[derive(Serialize)]
struct ExtremumJson {
    value: f64,
    probe: f64,
    atoms: f64,
}

#[derive(Serialize)]
struct PortExtremaJson {
    port: &'static str,
    min: ExtremumJson,
    max: ExtremumJson,
}

#[derive(Serialize)]
struct FeatureJson {
    location: f64,
    value: f64,
    fwhm: Option<f64>,
    prominence: f64,
}

#[derive(Serialize)]
struct TraceFeaturesJson {
    trace: &'static str,
    at_atoms: f64,
    peaks: Vec<FeatureJson>,
    dips: Vec<FeatureJson>,
}

#[derive(Serialize)]
struct SpectrumSummary {
    schema_version: u32,
    command: &'static str,
    config: RunConfig,
    pole_cells: usize,
    extrema: Vec<PortExtremaJson>,
    features: Vec<TraceFeaturesJson>,
}

const SPECTRUM_HEADER: &str =
    "probe_detuning,atomic_detuning,T12,R11,T13,T14,C,regime,gamma1,gamma2,lamb1,lamb2,phi_a,phi_b";

pub fn cmd_spectrum(config: &RunConfig, out_dir: &Path, strict: bool) -> Result<(), CliError> {
    let molecule = config.molecule();
    let grid = sweep_with_tol(
        &molecule,
        config.probe_window(),
        config.atoms_window(),
        config.resolution(),
        config.coords.grid_mode(),
        config.tolerance_critical,
    )
    .map_err(lib_err)?;
    let pole_cells = grid.pole_count();
    if strict && pole_cells > 0 {
        return Err(CliError::StrictPole(format!(
            "{pole_cells} grid cell(s) hit the scattering pole"
        )));
    }
    ensure_dir(out_dir)?;

    let csv_path = out_dir.join("spectrum.csv");
    let mut w = create(&csv_path)?;
    writeln!(w, "{SPECTRUM_HEADER}").map_err(|e| io_error(&csv_path, e))?;
    for ia in 0..grid.axis_atoms.len() {
        for ip in 0..grid.axis_probe.len() {
            let cell = grid.cell(ip, ia);
            let (probs, ec) = match &cell.result {
                Ok(res) => (
                    [res.probs.t12, res.probs.r11, res.probs.t13, res.probs.t14],
                    res.couplings,
                ),
                // Pole cells keep their couplings but have no defined
                // probabilities; the CSV records them as nan.
                Err(_) => (
                    [f64::NAN; 4],
                    effective_couplings(&molecule, &cell.detunings),
                ),
            };
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(grid.axis_probe[ip]),
                fmt_f64(grid.axis_atoms[ia]),
                fmt_f64(probs[0]),
                fmt_f64(probs[1]),
                fmt_f64(probs[2]),
                fmt_f64(probs[3]),
                fmt_f64(ec.cooperativity),
                cell.regime.label(),
                fmt_f64(ec.gamma1),
                fmt_f64(ec.gamma2),
                fmt_f64(ec.lamb1),
                fmt_f64(ec.lamb2),
                fmt_f64(ec.phi_a),
                fmt_f64(ec.phi_b),
            )
            .map_err(|e| io_error(&csv_path, e))?;
        }
    }
    w.flush().map_err(|e| io_error(&csv_path, e))?;

    let summary = SpectrumSummary {
        schema_version: SCHEMA_VERSION,
        command: "spectrum",
        config: config.clone(),
        pole_cells,
        extrema: port_extrema(&grid),
        features: central_row_features(&grid, &molecule),
    };
    let json_path = out_dir.join("spectrum.json");
    write_json(&json_path, &summary)?;
    println!(
        "spectrum: {} x {} cells ({} pole), wrote {} and {}",
        grid.axis_probe.len(),
        grid.axis_atoms.len(),
        pole_cells,
        csv_path.display(),
        json_path.display()
    );
    Ok(())
}

/// Per-port minima and maxima over the non-pole cells, ties resolved to the
/// first cell in row-major order.
fn port_extrema(grid: &SpectrumGrid) -> Vec<PortExtremaJson> {
    const PORTS: [&str; 4] = ["T12", "R11", "T13", "T14"];
    let n_probe = grid.axis_probe.len();
    let mut best: Vec<(f64, usize, f64, usize)> =
        vec![(f64::INFINITY, usize::MAX, f64::NEG_INFINITY, usize::MAX); 4];
    for (idx, cell) in grid.cells.iter().enumerate() {
        let Ok(res) = &cell.result else { continue };
        let values = [res.probs.t12, res.probs.r11, res.probs.t13, res.probs.t14];
        for (slot, v) in best.iter_mut().zip(values) {
            if v < slot.0 {
                (slot.0, slot.1) = (v, idx);
            }
            if v > slot.2 {
                (slot.2, slot.3) = (v, idx);
            }
        }
    }
    if best[0].1 == usize::MAX {
        return Vec::new();
    }
    let at = |value: f64, idx: usize| ExtremumJson {
        value,
        probe: grid.axis_probe[idx % n_probe],
        atoms: grid.axis_atoms[idx / n_probe],
    };
    PORTS
        .iter()
        .zip(best)
        .map(|(port, (min_v, min_i, max_v, max_i))| PortExtremaJson {
            port,
            min: at(min_v, min_i),
            max: at(max_v, max_i),
        })
        .collect()
}

/// Feature extraction along the probe axis at the atomic-detuning row
/// closest to zero: the transmission trace and the transfer trace for the
/// configured chirality.
fn central_row_features(grid: &SpectrumGrid, molecule: &MoleculeConfig) -> Vec<TraceFeaturesJson> {
    let ia = grid
        .axis_atoms
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let transfer_port = match molecule.chirality {
        Chirality::Symmetric => "T13",
        Chirality::IdealChiral => "T14",
    };
    let mut out = Vec::new();
    for trace in ["T12", transfer_port] {
        let mut xs = Vec::with_capacity(grid.axis_probe.len());
        let mut ys = Vec::with_capacity(grid.axis_probe.len());
        for ip in 0..grid.axis_probe.len() {
            if let Ok(res) = &grid.cell(ip, ia).result {
                xs.push(grid.axis_probe[ip]);
                ys.push(match trace {
                    "T12" => res.probs.t12,
                    "T13" => res.probs.t13,
                    _ => res.probs.t14,
                });
            }
        }
        if let Ok(set) = find_features_1d(&xs, &ys) {
            out.push(TraceFeaturesJson {
                trace,
                at_atoms: grid.axis_atoms[ia],
                peaks: feature_json(&set, true),
                dips: feature_json(&set, false),
            });
        }
    }
    out
}

fn feature_json(set: &FeatureSet, peaks: bool) -> Vec<FeatureJson> {
    let list = if peaks { &set.peaks } else { &set.dips };
    list.iter()
        .map(|f| FeatureJson {
            location: f.location,
            value: f.value,
            fwhm: f.fwhm,
            prominence: f.prominence,
        })
        .collect()
}

// ----------------------------------------------------------- phase diagram

#[derive(Serialize)]
struct PhaseDiagramSummary {
    schema_version: u32,
    command: &'static str,
    config: RunConfig,
    strong_fraction: f64,
    /// C = 1 contour as [[Δ, δ], [Δ, δ]] segments in bare coordinates.
    boundary: Vec<[(f64, f64); 2]>,
}

const PHASE_HEADER: &str =
    "probe_detuning,atomic_detuning,C,regime,gamma1,gamma2,lamb1,lamb2,phi_a,phi_b";

/// Cooperativity map over the configured window. Always works in bare
/// detunings: for Markovian molecules the map is constant anyway, and with
/// delays the shifted frame is not a rigid translation of the axes.
pub fn cmd_phase_diagram(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let molecule = config.molecule();
    let pd = phase_diagram_with_tol(
        &molecule,
        config.probe_window(),
        config.atoms_window(),
        config.resolution(),
        config.tolerance_critical,
    )
    .map_err(lib_err)?;
    ensure_dir(out_dir)?;

    let csv_path = out_dir.join("phase_diagram.csv");
    let mut w = create(&csv_path)?;
    writeln!(w, "{PHASE_HEADER}").map_err(|e| io_error(&csv_path, e))?;
    let n_probe = pd.axis_probe.len();
    for ia in 0..pd.axis_atoms.len() {
        for ip in 0..n_probe {
            let ec = &pd.couplings[ia * n_probe + ip];
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(pd.axis_probe[ip]),
                fmt_f64(pd.axis_atoms[ia]),
                fmt_f64(ec.cooperativity),
                pd.regimes[ia * n_probe + ip].label(),
                fmt_f64(ec.gamma1),
                fmt_f64(ec.gamma2),
                fmt_f64(ec.lamb1),
                fmt_f64(ec.lamb2),
                fmt_f64(ec.phi_a),
                fmt_f64(ec.phi_b),
            )
            .map_err(|e| io_error(&csv_path, e))?;
        }
    }
    w.flush().map_err(|e| io_error(&csv_path, e))?;

    let summary = PhaseDiagramSummary {
        schema_version: SCHEMA_VERSION,
        command: "phase-diagram",
        config: config.clone(),
        strong_fraction: pd.strong_fraction(),
        boundary: pd.boundary.clone(),
    };
    let json_path = out_dir.join("phase_diagram.json");
    write_json(&json_path, &summary)?;
    println!(
        "phase-diagram: {} x {} cells, strong fraction {:.4}, {} boundary segments, wrote {} and {}",
        n_probe,
        pd.axis_atoms.len(),
        pd.strong_fraction(),
        summary.boundary.len(),
        csv_path.display(),
        json_path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------- optimize

#[derive(Serialize)]
struct TransferPointJson {
    coords: &'static str,
    probe: f64,
    atoms: f64,
    transfer: f64,
}

impl From<&TransferPoint> for TransferPointJson {
    fn from(p: &TransferPoint) -> Self {
        TransferPointJson {
            coords: coords_label(p.mode),
            probe: p.delta_probe,
            atoms: p.delta_atoms,
            transfer: p.transfer,
        }
    }
}

#[derive(Serialize)]
struct OptimizeSummary {
    schema_version: u32,
    command: &'static str,
    config: RunConfig,
    /// Operating points from the closed-form law (Markovian) or the refined
    /// numeric search (with delays), with the transfer evaluated exactly.
    predicted: Vec<TransferPointJson>,
    /// Best cell of a dense scan over the configured window, as an
    /// independent verification.
    grid_best: TransferPointJson,
    anticrossing_gap: Option<f64>,
    gap_note: Option<String>,
}

pub fn cmd_optimize(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let molecule = config.molecule();
    let predicted = optimal_transfer(&molecule).map_err(lib_err)?;
    let grid_best = grid_max_transfer(
        &molecule,
        config.probe_window(),
        config.atoms_window(),
        config.resolution(),
        config.coords.grid_mode(),
    )
    .map_err(lib_err)?;
    let (gap, gap_note) = match anticrossing_gap(&molecule) {
        Ok(g) => (Some(g), None),
        Err(LibError::GapUnresolved(msg)) => (None, Some(msg)),
        Err(e) => return Err(lib_err(e)),
    };
    ensure_dir(out_dir)?;

    let summary = OptimizeSummary {
        schema_version: SCHEMA_VERSION,
        command: "optimize",
        config: config.clone(),
        predicted: predicted.iter().map(TransferPointJson::from).collect(),
        grid_best: TransferPointJson::from(&grid_best),
        anticrossing_gap: gap,
        gap_note,
    };
    let json_path = out_dir.join("optimize.json");
    write_json(&json_path, &summary)?;
    let best_predicted = predicted
        .iter()
        .map(|p| p.transfer)
        .fold(f64::NEG_INFINITY, f64::max);
    println!(
        "optimize: predicted best transfer {}, grid best {}, gap {}, wrote {}",
        fmt_f64(best_predicted),
        fmt_f64(grid_best.transfer),
        summary
            .anticrossing_gap
            .map_or_else(|| "unresolved".to_owned(), fmt_f64),
        json_path.display()
    );
    Ok(())
}

// -------------------------------------------------------------- resonances

#[derive(Serialize)]
struct ResonanceRowJson {
    delta_atoms: f64,
    atom1: Vec<f64>,
    atom2: Vec<f64>,
}

#[derive(Serialize)]
struct ResonancesSummary {
    schema_version: u32,
    command: &'static str,
    config: RunConfig,
    total_roots: usize,
    rows: Vec<ResonanceRowJson>,
}

/// Self-consistent resonance roots across the atomic-detuning axis. The
/// windows are interpreted as bare detunings: the resonance conditions are
/// statements about the bare probe frequency.
pub fn cmd_resonances(config: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let molecule = config.molecule();
    let atoms_axis = axis(config.atoms_window(), config.resolution().1);
    let rows: Vec<ResonanceRowJson> = atoms_axis
        .par_iter()
        .map(|&delta_atoms| {
            locate_resonances(&molecule, delta_atoms, config.probe_window()).map(|roots| {
                ResonanceRowJson {
                    delta_atoms,
                    atom1: roots.atom1,
                    atom2: roots.atom2,
                }
            })
        })
        .collect::<Result<_, _>>()
        .map_err(lib_err)?;
    ensure_dir(out_dir)?;

    let total_roots = rows.iter().map(|r| r.atom1.len() + r.atom2.len()).sum();
    let summary = ResonancesSummary {
        schema_version: SCHEMA_VERSION,
        command: "resonances",
        config: config.clone(),
        total_roots,
        rows,
    };
    let json_path = out_dir.join("resonances.json");
    write_json(&json_path, &summary)?;
    println!(
        "resonances: {} rows, {} roots, wrote {}",
        summary.rows.len(),
        total_roots,
        json_path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------- validate

#[derive(Serialize)]
struct PartitionJson {
    probe: f64,
    atoms: f64,
    t12: f64,
    r11: f64,
    t13: f64,
    t14: f64,
}

#[derive(Serialize)]
struct ValidateSummary {
    schema_version: u32,
    command: &'static str,
    mode: &'static str,
    config: Option<RunConfig>,
    draws: Option<usize>,
    seed: Option<u64>,
    cells_checked: usize,
    pole_cells: usize,
    max_conservation_deviation: f64,
    conservation_tolerance: f64,
    max_port_deviation: f64,
    port_tolerance: f64,
    max_oracle_residual: f64,
    residual_tolerance: f64,
    /// Port partition at the doubly resonant point (Δ̃ = δ̃ = 0 mapped to
    /// bare detunings via the static Lamb shifts); config mode only.
    resonant_partition: Option<PartitionJson>,
    failures: Vec<String>,
    passed: bool,
}

#[derive(Default)]
struct Deviations {
    cells_checked: usize,
    pole_cells: usize,
    conservation: f64,
    ports: f64,
    residual: f64,
    failures: Vec<String>,
}

impl Deviations {
    /// Runs all cross-checks at one point and folds the deviations in.
    fn check(&mut self, molecule: &MoleculeConfig, det: &Detunings, label: &str) {
        let res = match scatter(molecule, det) {
            Ok(res) => res,
            Err(LibError::Pole { .. }) => {
                self.pole_cells += 1;
                return;
            }
            Err(e) => {
                self.failures.push(format!("{label}: scatter failed: {e}"));
                return;
            }
        };
        self.cells_checked += 1;

        let conservation = (res.probs.sum() - 1.0).abs();
        if conservation > self.conservation {
            self.conservation = conservation;
        }
        if conservation > CONSERVATION_TOL {
            self.failures.push(format!(
                "{label}: probabilities sum to 1{:+e}",
                res.probs.sum() - 1.0
            ));
        }

        let sol = match solve_exact(molecule, det) {
            Ok(sol) => sol,
            Err(e) => {
                self.failures.push(format!("{label}: oracle failed: {e}"));
                return;
            }
        };
        let defect = residual(&sol, molecule, det);
        if defect > self.residual {
            self.residual = defect;
        }
        if defect > RESIDUAL_TOL {
            self.failures
                .push(format!("{label}: oracle residual {defect:e}"));
        }

        let closed = [res.probs.t12, res.probs.r11, res.probs.t13, res.probs.t14];
        let exact = sol.port_probabilities();
        let port_dev = closed
            .iter()
            .zip(exact)
            .map(|(c, e)| (c - e).abs())
            .fold(0.0, f64::max);
        if port_dev > self.ports {
            self.ports = port_dev;
        }
        if port_dev > PORT_TOL {
            self.failures.push(format!(
                "{label}: port probabilities differ by {port_dev:e}"
            ));
        }
    }
}

/// Cross-checks the closed forms against the exact linear system on a
/// subsampled grid of the configured window, plus the doubly resonant point.
pub fn cmd_validate_config(
    config: &RunConfig,
    out_dir: &Path,
    strict: bool,
) -> Result<(), CliError> {
    let molecule = config.molecule();
    let (res_p, res_a) = config.resolution();
    let probe_axis = axis(config.probe_window(), res_p.min(41));
    let atoms_axis = axis(config.atoms_window(), res_a.min(41));
    let lambs = effective_couplings(&molecule.markovian(), &Detunings::new(0.0, 0.0));

    let mut dev = Deviations::default();
    for &da in &atoms_axis {
        for &dp in &probe_axis {
            let det = match config.coords.grid_mode() {
                GridMode::BareCoordinates => Detunings::new(dp, da),
                GridMode::TildeCoordinates => {
                    Detunings::new(dp + lambs.lamb1, da + lambs.lamb1 - lambs.lamb2)
                }
            };
            dev.check(&molecule, &det, &format!("probe {dp} atoms {da}"));
        }
    }

    let origin = Detunings::new(lambs.lamb1, lambs.lamb1 - lambs.lamb2);
    let resonant_partition = match scatter(&molecule, &origin) {
        Ok(res) => Some(PartitionJson {
            probe: origin.delta_probe,
            atoms: origin.delta_atoms,
            t12: res.probs.t12,
            r11: res.probs.r11,
            t13: res.probs.t13,
            t14: res.probs.t14,
        }),
        Err(_) => None,
    };

    if strict && dev.pole_cells > 0 {
        dev.failures.push(format!(
            "strict mode: {} cell(s) hit the scattering pole",
            dev.pole_cells
        ));
    }

    finish_validate(
        out_dir,
        ValidateSummary {
            schema_version: SCHEMA_VERSION,
            command: "validate",
            mode: "config",
            config: Some(config.clone()),
            draws: None,
            seed: None,
            cells_checked: dev.cells_checked,
            pole_cells: dev.pole_cells,
            max_conservation_deviation: dev.conservation,
            conservation_tolerance: CONSERVATION_TOL,
            max_port_deviation: dev.ports,
            port_tolerance: PORT_TOL,
            max_oracle_residual: dev.residual,
            residual_tolerance: RESIDUAL_TOL,
            resonant_partition,
            failures: dev.failures,
            passed: false,
        },
    )
}

/// Cross-checks `draws` random configurations (alternating symmetric and
/// ideal chiral coupling) against the exact linear system.
pub fn cmd_validate_random(draws: usize, seed: u64, out_dir: &Path) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = Deviations::default();
    for i in 0..draws {
        let molecule = MoleculeConfig {
            omega: rng.gen_range(0.0..3.0),
            n1: rng.gen_range(1..=6),
            n2: rng.gen_range(1..=6),
            phi_a_static: rng.gen_range(-6.0..6.0),
            phi_b_static: rng.gen_range(-6.0..6.0),
            tau_a: rng.gen_range(0.0..0.5),
            tau_b: rng.gen_range(0.0..0.5),
            chirality: if i % 2 == 0 {
                Chirality::Symmetric
            } else {
                Chirality::IdealChiral
            },
        };
        let det = Detunings::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
        dev.check(&molecule, &det, &format!("draw {i}"));
    }

    finish_validate(
        out_dir,
        ValidateSummary {
            schema_version: SCHEMA_VERSION,
            command: "validate",
            mode: "random",
            config: None,
            draws: Some(draws),
            seed: Some(seed),
            cells_checked: dev.cells_checked,
            pole_cells: dev.pole_cells,
            max_conservation_deviation: dev.conservation,
            conservation_tolerance: CONSERVATION_TOL,
            max_port_deviation: dev.ports,
            port_tolerance: PORT_TOL,
            max_oracle_residual: dev.residual,
            residual_tolerance: RESIDUAL_TOL,
            resonant_partition: None,
            failures: dev.failures,
            passed: false,
        },
    )
}

/// Writes validate.json and turns recorded failures into exit code 1. The
/// failure list is capped in the report to keep it readable.
fn finish_validate(out_dir: &Path, mut summary: ValidateSummary) -> Result<(), CliError> {
    summary.passed = summary.failures.is_empty();
    let shown = summary.failures.len().min(50);
    let hidden = summary.failures.len() - shown;
    summary.failures.truncate(shown);
    if hidden > 0 {
        summary.failures.push(format!("... and {hidden} more"));
    }
    ensure_dir(out_dir)?;
    let json_path = out_dir.join("validate.json");
    write_json(&json_path, &summary)?;
    println!(
        "validate: {} checked, {} pole, max conservation {}, max port {}, max residual {}: {}",
        summary.cells_checked,
        summary.pole_cells,
        fmt_f64(summary.max_conservation_deviation),
        fmt_f64(summary.max_port_deviation),
        fmt_f64(summary.max_oracle_residual),
        if summary.passed { "PASS" } else { "FAIL" }
    );
    if summary.passed {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{} check(s) failed, see {}",
            summary.failures.len(),
            json_path.display()
        )))
    }
}
