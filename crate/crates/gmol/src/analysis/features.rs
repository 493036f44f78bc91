//! Peak/dip extraction from 1-D probability traces and the anti-crossing gap.

use crate::error::{Error, Result};
use crate::model::{effective_couplings, Detunings, MoleculeConfig};
use crate::scattering::scatter;

/// Default absolute prominence threshold. Low enough to keep the shallow
/// (1+C)⁻² ≈ 3.5e−3 reflection features at C = 16, high enough to drop
/// grid-noise extrema.
pub const DEFAULT_PROMINENCE: f64 = 1e-4;

/// One extremum of a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFeature {
    /// Sub-grid location from quadratic interpolation through the extremum.
    pub location: f64,
    /// Interpolated extremum value.
    pub value: f64,
    /// Full width at half maximum; `None` when a half-level crossing walks
    /// out of the scanned window. Peaks are measured at half the peak value
    /// (probability traces sit on a zero floor); dips at half the prominence
    /// above the dip floor.
    pub fwhm: Option<f64>,
    /// Topographic prominence relative to the enclosing higher terrain.
    pub prominence: f64,
}

impl SpectralFeature {
    /// The width, or [`Error::FeatureNotResolved`] if it left the window.
    pub fn fwhm_resolved(&self) -> Result<f64> {
        self.fwhm.ok_or_else(|| {
            Error::FeatureNotResolved(format!(
                "half-level crossing for the feature at {} exits the scan window",
                self.location
            ))
        })
    }
}

/// Peaks and dips of one 1-D cut.
#[derive(Debug, Clone, Default)]
pub struct FeatureSet {
    pub peaks: Vec<SpectralFeature>,
    pub dips: Vec<SpectralFeature>,
}

/// Extracts all local maxima and minima above the default prominence
/// threshold ([`DEFAULT_PROMINENCE`]) from a trace sampled at strictly
/// increasing positions `x` (length ≥ 5).
pub fn find_features_1d(x: &[f64], y: &[f64]) -> Result<FeatureSet> {
    find_features_1d_with(x, y, DEFAULT_PROMINENCE)
}

/// [`find_features_1d`] with an explicit prominence threshold.
pub fn find_features_1d_with(x: &[f64], y: &[f64], prominence: f64) -> Result<FeatureSet> {
    if x.len() != y.len() {
        return Err(Error::InvalidConfig(format!(
            "trace axes disagree: {} positions vs {} values",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 5 {
        return Err(Error::InvalidConfig(format!(
            "trace too short for feature extraction: {} points (need >= 5)",
            x.len()
        )));
    }
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "trace positions must be strictly increasing".into(),
        ));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("trace values must be finite".into()));
    }
    let negated: Vec<f64> = y.iter().map(|v| -v).collect();
    Ok(FeatureSet {
        peaks: maxima(x, y, prominence, HalfLevel::HalfValue),
        dips: maxima(x, &negated, prominence, HalfLevel::HalfProminence)
            .into_iter()
            .map(|f| SpectralFeature {
                value: -f.value,
                ..f
            })
            .collect(),
    })
}

/// How the half level for width measurement is defined for a maximum.
#[derive(Clone, Copy, PartialEq)]
enum HalfLevel {
    /// value/2: natural for probability peaks over a zero background.
    HalfValue,
    /// value − prominence/2: natural for dips carved into a background.
    HalfProminence,
}

/// All sufficiently prominent local maxima of `y`, with quadratic-interpolated
/// locations and linear-interpolated half-level widths.
fn maxima(x: &[f64], y: &[f64], threshold: f64, half: HalfLevel) -> Vec<SpectralFeature> {
    let n = y.len();
    let mut out = Vec::new();
    for i in 1..n - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        let prom = prominence_at(y, i);
        if prom < threshold {
            continue;
        }
        let (location, value) = refine_vertex(x, y, i);
        let half_level = match half {
            HalfLevel::HalfValue => value / 2.0,
            HalfLevel::HalfProminence => value - prom / 2.0,
        };
        let left = half_crossing(x, y, i, half_level, -1);
        let right = half_crossing(x, y, i, half_level, 1);
        let fwhm = match (left, right) {
            (Some(l), Some(r)) => Some(r - l),
            _ => None,
        };
        out.push(SpectralFeature {
            location,
            value,
            fwhm,
            prominence: prom,
        });
    }
    out
}

/// Topographic prominence of the maximum at `i`: height above the higher of
/// the two minima separating it from taller terrain (window edges count as
/// terrain boundaries).
fn prominence_at(y: &[f64], i: usize) -> f64 {
    let mut left_min = y[i];
    for j in (0..i).rev() {
        left_min = left_min.min(y[j]);
        if y[j] > y[i] {
            break;
        }
    }
    let mut right_min = y[i];
    for value in &y[i + 1..] {
        right_min = right_min.min(*value);
        if *value > y[i] {
            break;
        }
    }
    y[i] - left_min.max(right_min)
}

/// Vertex of the parabola through the three samples around `i`.
fn refine_vertex(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    // Newton form through the three points.
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature.abs() < f64::MIN_POSITIVE || !curvature.is_finite() {
        return (x1, y1);
    }
    let vertex = 0.5 * (x0 + x1 - d01 / curvature);
    if vertex < x0 || vertex > x2 {
        return (x1, y1);
    }
    let value = y0 + d01 * (vertex - x0) + curvature * (vertex - x0) * (vertex - x1);
    (vertex, value)
}

/// Linear-interpolated position where the trace crosses `level` walking from
/// `i` in `direction`; `None` if it leaves the window first.
fn half_crossing(x: &[f64], y: &[f64], i: usize, level: f64, direction: isize) -> Option<f64> {
    let n = y.len() as isize;
    let mut prev = i as isize;
    loop {
        let next = prev + direction;
        if next < 0 || next >= n {
            return None;
        }
        let (pa, pb) = (prev as usize, next as usize);
        if (y[pa] >= level) != (y[pb] >= level) {
            let t = (level - y[pa]) / (y[pb] - y[pa]);
            return Some(x[pa] + t * (x[pb] - x[pa]));
        }
        prev = next;
    }
}

/// Separation of the two hybridized transmission dips along the probe axis
/// at δ̃ = 0, scanned with an automatically sized window.
///
/// Errors with [`Error::GapUnresolved`] when fewer than two dips are found
/// (the weak-coupling merged case).
pub fn anticrossing_gap(config: &MoleculeConfig) -> Result<f64> {
    let ec = effective_couplings(&config.markovian(), &Detunings::new(0.0, 0.0));
    let splitting = (config.omega * config.omega + ec.gamma1 * ec.gamma2).sqrt();
    let half_width = 3.0 * splitting + 5.0 * ec.gamma1.max(ec.gamma2) + 1.0;
    anticrossing_gap_scan(config, half_width, 16001)
}

/// [`anticrossing_gap`] with an explicit scan half-width and point count.
///
/// The cut runs along bare Δ at the fixed atomic detuning that zeroes δ̃ at
/// the static phases; for delayed configurations this is a bare-axis cut
/// through the static anti-crossing point.
pub fn anticrossing_gap_scan(
    config: &MoleculeConfig,
    half_width: f64,
    points: usize,
) -> Result<f64> {
    config.validate()?;
    let ec = effective_couplings(&config.markovian(), &Detunings::new(0.0, 0.0));
    // δ̃ = 0 in bare coordinates: δ = Δ_ls,1 − Δ_ls,2.
    let delta_atoms = ec.lamb1 - ec.lamb2;
    let center = ec.lamb1;
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    let step = 2.0 * half_width / (points as f64 - 1.0);
    for k in 0..points {
        let delta = center - half_width + k as f64 * step;
        let det = Detunings::new(delta, delta_atoms);
        match scatter(config, &det) {
            Ok(res) => {
                xs.push(delta);
                ys.push(res.probs.t12);
            }
            Err(Error::Pole { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let features = find_features_1d(&xs, &ys)?;
    if features.dips.len() < 2 {
        return Err(Error::GapUnresolved(format!(
            "found {} transmission dip(s); the hybridized doublet is not resolved",
            features.dips.len()
        )));
    }
    let mut dips = features.dips;
    // The two deepest (most prominent) dips are the hybridized pair.
    dips.sort_by(|a, b| b.prominence.total_cmp(&a.prominence));
    Ok((dips[0].location - dips[1].location).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Chirality;

    fn lorentzian_trace(peak: f64, width: f64, half_window: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let step = 2.0 * half_window / (n as f64 - 1.0);
        let xs: Vec<f64> = (0..n).map(|k| -half_window + k as f64 * step).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| peak / (1.0 + (x / width).powi(2)))
            .collect();
        (xs, ys)
    }

    #[test]
    fn lorentzian_fwhm_is_twice_the_width_parameter() {
        let w = 1.7;
        // Resolution 1e−3 of the width over a ±6w window.
        let n = (12.0 / 1.0e-3) as usize + 1;
        let (xs, ys) = lorentzian_trace(0.8, w, 6.0 * w, n);
        let features = find_features_1d(&xs, &ys).unwrap();
        assert_eq!(features.peaks.len(), 1);
        let peak = &features.peaks[0];
        assert!(peak.location.abs() < 1e-6);
        assert!((peak.value - 0.8).abs() < 1e-6);
        let fwhm = peak.fwhm_resolved().unwrap();
        assert!((fwhm - 2.0 * w).abs() < 2.0 * w * 1e-3, "fwhm {fwhm}");
    }

    #[test]
    fn unresolved_half_crossing_reports_no_width() {
        // Window barely wider than the core: half-level crossings exist,
        // then shrink the window until they do not.
        let (xs, ys) = lorentzian_trace(1.0, 1.0, 0.5, 101);
        let features = find_features_1d(&xs, &ys).unwrap();
        assert_eq!(features.peaks.len(), 1);
        assert!(features.peaks[0].fwhm.is_none());
        assert!(features.peaks[0].fwhm_resolved().is_err());
    }

    #[test]
    fn dip_widths_use_the_local_floor() {
        // Inverted Lorentzian on a background of 1: FWHM still 2w. The
        // window must be wide enough that the in-window prominence is close
        // to the asymptotic depth (the tails decay only quadratically).
        let w = 0.9;
        let n = 50_001;
        let (xs, ys) = lorentzian_trace(0.8, w, 25.0 * w, n);
        let dipped: Vec<f64> = ys.iter().map(|v| 1.0 - v).collect();
        let features = find_features_1d(&xs, &dipped).unwrap();
        assert_eq!(features.dips.len(), 1);
        let dip = &features.dips[0];
        assert!((dip.value - 0.2).abs() < 1e-6);
        let fwhm = dip.fwhm_resolved().unwrap();
        assert!((fwhm - 2.0 * w).abs() < 2.0 * w * 2e-3, "fwhm {fwhm}");
    }

    #[test]
    fn shallow_extrema_below_prominence_are_dropped() {
        let xs: Vec<f64> = (0..101).map(|k| k as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 + 1e-5 * (x * 3.0).sin()).collect();
        let features = find_features_1d(&xs, &ys).unwrap();
        assert!(features.peaks.is_empty());
        assert!(features.dips.is_empty());
    }

    #[test]
    fn short_or_malformed_traces_are_rejected() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 1.0, 0.0, 0.0];
        assert!(find_features_1d(&xs, &ys).is_err());
        let xs = [0.0, 1.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 1.0, 0.0, 0.0, 0.0];
        assert!(find_features_1d(&xs, &ys).is_err());
    }

    #[test]
    fn strong_hybridization_gap_approaches_twice_the_exchange_coupling() {
        // Single-point atoms give Γ₁ = Γ₂ = 1; with Ω = 10 the dips sit at
        // ±√(Ω²+Γ₁Γ₂), so the gap is 2√101 ≈ 2Ω.
        let config = MoleculeConfig {
            omega: 10.0,
            n1: 1,
            n2: 1,
            phi_a_static: 0.0,
            phi_b_static: 0.0,
            tau_a: 0.0,
            tau_b: 0.0,
            chirality: Chirality::Symmetric,
        };
        let gap = anticrossing_gap(&config).unwrap();
        let expected = 2.0 * (config.omega * config.omega + 1.0).sqrt();
        assert!(
            (gap - expected).abs() < 1e-2 * expected,
            "gap {gap} vs {expected}"
        );
    }

    #[test]
    fn weak_coupling_dips_merge_into_an_unresolved_gap() {
        // C = 1/4: the doublet is washed out and only one dip survives.
        let config = MoleculeConfig {
            omega: 0.5,
            n1: 1,
            n2: 1,
            phi_a_static: 0.0,
            phi_b_static: 0.0,
            tau_a: 0.0,
            tau_b: 0.0,
            chirality: Chirality::Symmetric,
        };
        match anticrossing_gap(&config) {
            Err(Error::GapUnresolved(_)) => {}
            Ok(gap) => panic!("expected unresolved gap, got {gap}"),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
