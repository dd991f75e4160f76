//! Cross-correlation audits, beam patterns, and sweep comparisons.
//!
//! These are the measurement routines: given bases or scenarios produced by
//! the other modules, they quantify orthogonality (`20·log10|⟨f_m, f_n⟩|`),
//! sample received beam shapes on arbitrary grids, and tabulate every mode
//! counter against the measured SVD/focusing counts across a parameter
//! sweep.

use crate::basis::{focusing_basis, BasisSet};
use crate::em::{green_unchecked, SampledProfile};
use crate::geometry::ScenarioGeometry;
use crate::modes::{mode_count_report, svd_modes, ModeCountReport};
use crate::{carg, lit, Error, Result, Scalar};
use nalgebra::{DMatrix, Normed};
use num_complex::Complex;
use rayon::prelude::*;

/// dB floor applied when serializing correlations (exact zeros map to −∞).
pub const DB_FLOOR: f64 = -160.0;

/// Pairwise cross-correlation audit of a basis set.
#[derive(Clone, Debug)]
pub struct CrossCorrelation<T: Scalar> {
    db: DMatrix<T>,
    worst_db: Option<T>,
}

impl<T: Scalar> CrossCorrelation<T> {
    /// Full symmetric matrix of `20·log10|⟨f_m, f_n⟩|`; diagonal 0 dB.
    pub fn db(&self) -> &DMatrix<T> {
        &self.db
    }

    /// Worst (largest) off-diagonal entry; `None` for a single member.
    pub fn worst_db(&self) -> Option<T> {
        self.worst_db
    }
}

/// Measure `20·log10|⟨f_m, f_n⟩|` over all pairs of a basis set.
pub fn cross_correlation_db<T: Scalar>(b: &BasisSet<T>) -> CrossCorrelation<T> {
    let n = b.len();
    let mut db = DMatrix::from_element(n, n, T::zero());
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let vals: Vec<T> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mag = b.member(i).inner(b.member(j)).expect("shared mesh").norm();
            if mag > T::zero() {
                lit::<T>(20.0) * mag.log10()
            } else {
                lit::<T>(f64::NEG_INFINITY)
            }
        })
        .collect();
    let mut worst: Option<T> = None;
    for (&(i, j), &v) in pairs.iter().zip(&vals) {
        db[(i, j)] = v;
        db[(j, i)] = v;
        worst = Some(match worst {
            Some(w) if w >= v => w,
            _ => v,
        });
    }
    CrossCorrelation {
        db,
        worst_db: worst,
    }
}

/// A received field sampled on an arbitrary receive-axis grid.
#[derive(Clone, Debug)]
pub struct BeamPattern<T> {
    /// Grid coordinates, meters.
    pub y: Vec<T>,
    /// Complex field samples.
    pub field: Vec<Complex<T>>,
    /// |ψ(y)|, max-normalized to 1 when requested.
    pub magnitude: Vec<T>,
    /// Field phase, radians.
    pub phase: Vec<T>,
}

/// Radiate a transmit profile onto an explicit grid of receive-axis points.
///
/// The grid must stay within the receive segment extended by ±L_R on both
/// sides (the model's sampled region); `normalize` rescales magnitudes to a
/// unit maximum, as in per-curve normalized figures.
pub fn beam_pattern<T: Scalar>(
    profile: &SampledProfile<T>,
    g: &ScenarioGeometry<T>,
    y_grid: &[T],
    normalize: bool,
) -> Result<BeamPattern<T>> {
    if y_grid.is_empty() {
        return Err(Error::InvalidArgument("empty pattern grid".into()));
    }
    let reach = lit::<T>(1.5) * g.rx_length();
    let yc = g.rx_center_offset();
    if let Some(&bad) = y_grid
        .iter()
        .find(|&&y| (y - yc).abs() > reach * (T::one() + lit::<T>(1e-12)))
    {
        return Err(Error::InvalidArgument(format!(
            "grid point {bad} outside the receive segment extended ±L_R"
        )));
    }
    let kappa = g.wavenumber();
    let eta = profile.mesh().coordinates();
    let wt = profile.mesh().weights();
    let field: Result<Vec<Complex<T>>> = y_grid
        .par_iter()
        .map(|&y| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for ((&e, &w), v) in eta.iter().zip(wt).zip(profile.values()) {
                let r = g.point_distance(e, y);
                if !(r > T::zero()) {
                    return Err(Error::InvalidGeometry(
                        "grid point touches the transmit segment".into(),
                    ));
                }
                acc += green_unchecked(r, kappa) * *v * w;
            }
            Ok(acc)
        })
        .collect();
    let field = field?;
    let mut magnitude: Vec<T> = field.iter().map(|v| v.norm()).collect();
    if normalize {
        let peak = magnitude
            .iter()
            .fold(T::zero(), |a, &b| if a > b { a } else { b });
        if peak > T::zero() {
            for m in &mut magnitude {
                *m /= peak;
            }
        }
    }
    let phase: Vec<T> = field.iter().map(|&v| carg(v)).collect();
    Ok(BeamPattern {
        y: y_grid.to_vec(),
        field,
        magnitude,
        phase,
    })
}

/// Side-by-side mode counts from the numerical SVD, the focusing null
/// search, and the closed-form counter, with the focusing-basis gram worsts.
#[derive(Clone, Debug, serde::Serialize)]
pub struct MethodComparison<T: Scalar> {
    pub n_svd: usize,
    pub n_focusing: usize,
    /// Rounded generic counter; absent when its `y_c = 0` precondition
    /// fails.
    pub n_closed_form: Option<u64>,
    pub gram_worst_tx_db: Option<T>,
    pub gram_worst_rx_db: Option<T>,
    /// Full counter report with the measured counts filled in.
    pub report: ModeCountReport<T>,
}

/// Compare the three mode-counting methods on one scenario at default
/// meshes.
pub fn compare_methods<T: Scalar>(
    g: &ScenarioGeometry<T>,
    energy_fraction: T,
) -> Result<MethodComparison<T>> {
    let tx_mesh = g.tx_mesh_default();
    let rx_mesh = g.rx_mesh_default();
    let sol = svd_modes(g, &tx_mesh, &rx_mesh, energy_fraction)?;
    let (tx_basis, rx_basis) = focusing_basis(g, &tx_mesh, &rx_mesh)?;
    let mut report = mode_count_report(g);
    report.n_svd = Some(sol.mode_count());
    report.n_focusing = Some(tx_basis.len());
    let n_closed_form = if g.rx_center_offset() == T::zero() {
        Some(report.n_generic_rounded)
    } else {
        None
    };
    Ok(MethodComparison {
        n_svd: sol.mode_count(),
        n_focusing: tx_basis.len(),
        n_closed_form,
        gram_worst_tx_db: tx_basis.gram_worst_db(),
        gram_worst_rx_db: rx_basis.gram_worst_db(),
        report,
    })
}

/// Swept parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum SweepAxis {
    /// `F = z/L_R`: the distance is set to `F·L_R`.
    FRatio,
    /// Transmitter rotation θ, radians.
    Theta,
    /// Link distance z, meters.
    Distance,
    /// Carrier frequency, Hz.
    Frequency,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::FRatio => "F",
            SweepAxis::Theta => "theta_rad",
            SweepAxis::Distance => "z_m",
            SweepAxis::Frequency => "f0_hz",
        }
    }
}

/// Sweep controls: which points get the expensive measured counts.
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions<T> {
    /// Run SVD + focusing search at every k-th point (`None`: closed forms
    /// only).
    pub marker_every: Option<usize>,
    /// Energy fraction for the SVD count.
    pub energy_fraction: T,
}

impl<T: Scalar> Default for SweepOptions<T> {
    fn default() -> Self {
        Self {
            marker_every: Some(5),
            energy_fraction: lit(0.99),
        }
    }
}

/// One sweep sample: the counter report, or the per-point failure.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SweepRow<T: Scalar> {
    pub value: T,
    pub report: Option<ModeCountReport<T>>,
    pub error: Option<String>,
}

/// Sweep output: one row per axis value, in axis order.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SweepResult<T: Scalar> {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow<T>>,
    /// Template scenario the axis values were applied to.
    pub template: ScenarioSnapshot<T>,
}

/// Plain-data snapshot of a scenario (provenance for serialized artifacts).
#[derive(Clone, Debug, serde::Serialize)]
pub struct ScenarioSnapshot<T> {
    pub tx_length_m: T,
    pub rx_length_m: T,
    pub rx_center_offset_m: T,
    pub tx_rotation_rad: T,
    pub distance_m: T,
    pub frequency_hz: T,
}

impl<T: Scalar> ScenarioSnapshot<T> {
    pub fn of(g: &ScenarioGeometry<T>) -> Self {
        Self {
            tx_length_m: g.tx_length(),
            rx_length_m: g.rx_length(),
            rx_center_offset_m: g.rx_center_offset(),
            tx_rotation_rad: g.tx_rotation(),
            distance_m: g.distance(),
            frequency_hz: g.frequency(),
        }
    }
}

fn scenario_at<T: Scalar>(
    template: &ScenarioGeometry<T>,
    axis: SweepAxis,
    value: T,
) -> Result<ScenarioGeometry<T>> {
    let (mut theta, mut z, mut f0) = (
        template.tx_rotation(),
        template.distance(),
        template.frequency(),
    );
    match axis {
        SweepAxis::FRatio => z = value * template.rx_length(),
        SweepAxis::Theta => theta = value,
        SweepAxis::Distance => z = value,
        SweepAxis::Frequency => f0 = value,
    }
    ScenarioGeometry::new(
        template.tx_length(),
        template.rx_length(),
        template.rx_center_offset(),
        theta,
        z,
        f0,
    )
}

/// Evaluate the counter report along an axis, filling the measured SVD and
/// focusing counts at marker points. Per-point failures are recorded in the
/// row and the sweep continues.
pub fn sweep<T: Scalar>(
    template: &ScenarioGeometry<T>,
    axis: SweepAxis,
    values: &[T],
    opts: SweepOptions<T>,
) -> Result<SweepResult<T>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty sweep range".into()));
    }
    for w in values.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidArgument(
                "sweep values must be strictly increasing".into(),
            ));
        }
    }
    let is_marker = |i: usize| opts.marker_every.is_some_and(|k| k != 0 && i.is_multiple_of(k));
    let rows: Vec<SweepRow<T>> = values
        .par_iter()
        .enumerate()
        .map(|(i, &value)| {
            let outcome = scenario_at(template, axis, value).and_then(|g| {
                if is_marker(i) {
                    compare_methods(&g, opts.energy_fraction).map(|c| c.report)
                } else {
                    Ok(mode_count_report(&g))
                }
            });
            match outcome {
                Ok(report) => SweepRow {
                    value,
                    report: Some(report),
                    error: None,
                },
                Err(e) => SweepRow {
                    value,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(SweepResult {
        axis,
        rows,
        template: ScenarioSnapshot::of(template),
    })
}
