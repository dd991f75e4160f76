//! Artifact emitters.
//!
//! Every CSV starts with one `#` comment line carrying the resolved config,
//! then a header row. Floats are printed as `{:.12e}` so reruns are
//! byte-identical; dB values are floored at −160 dB (exact zeros would
//! otherwise print as −inf).

use crate::config::ScenarioConfig;
use nfmodes::analysis::{BeamPattern, CrossCorrelation, MethodComparison, SweepResult};
use nfmodes::basis::Focus;
use nfmodes::{Basis, Counts, Modes};
use serde::Serialize;
use std::io::{self, Write};

/// Serialization floor for correlation/gram levels, dB.
pub const DB_FLOOR: f64 = -160.0;

/// Deterministic float rendering used in every CSV cell.
pub fn fl(x: f64) -> String {
    format!("{x:.12e}")
}

/// Clamp a dB level to the serialization floor; non-finite → floor.
pub fn floor_db(x: f64) -> f64 {
    if x.is_finite() {
        x.max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// One-line `#` comment with the resolved scenario plus command extras.
pub fn config_comment(cfg: &ScenarioConfig, extras: &[(&str, String)]) -> String {
    let mut parts = vec![
        format!("tx_length_m={}", fl(cfg.tx_length_m)),
        format!("rx_length_m={}", fl(cfg.rx_length_m)),
        format!("rx_center_offset_m={}", fl(cfg.rx_center_offset_m)),
        format!("tx_rotation_deg={}", fl(cfg.tx_rotation_deg)),
        format!("distance_m={}", fl(cfg.distance_m)),
        format!("frequency_hz={}", fl(cfg.frequency_hz)),
    ];
    if let Some(s) = cfg.mesh_spacing_m {
        parts.push(format!("mesh_spacing_m={}", fl(s)));
    }
    for (k, v) in extras {
        parts.push(format!("{k}={v}"));
    }
    format!("# {}", parts.join(" "))
}

fn csv_writer<W: Write>(mut w: W, comment: &str) -> io::Result<csv::Writer<W>> {
    writeln!(w, "{comment}")?;
    Ok(csv::WriterBuilder::new().from_writer(w))
}

/// Pretty JSON plus trailing newline.
pub fn write_json<W: Write, S: Serialize>(w: &mut W, value: &S) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

pub fn write_count_csv<W: Write>(w: W, comment: &str, r: &Counts) -> io::Result<()> {
    let mut c = csv_writer(w, comment)?;
    c.write_record([
        "f_ratio",
        "phi_max_rad",
        "n_classic",
        "n_classic_rounded",
        "n_parallel",
        "n_parallel_rounded",
        "n_perpendicular",
        "n_perpendicular_rounded",
        "n_generic",
        "n_generic_rounded",
        "n_limit",
        "n_limit_rounded",
    ])?;
    c.write_record([
        fl(r.f_ratio),
        fl(r.phi_max),
        fl(r.n_classic),
        r.n_classic_rounded.to_string(),
        fl(r.n_parallel),
        r.n_parallel_rounded.to_string(),
        fl(r.n_perpendicular),
        r.n_perpendicular_rounded.to_string(),
        fl(r.n_generic),
        r.n_generic_rounded.to_string(),
        fl(r.n_limit),
        r.n_limit_rounded.to_string(),
    ])?;
    c.flush()
}

pub fn write_spectrum_csv<W: Write>(w: W, comment: &str, m: &Modes) -> io::Result<()> {
    let mut c = csv_writer(w, comment)?;
    c.write_record(["index", "sigma", "sigma_sq", "cumulative_fraction"])?;
    let cum = m.cumulative_fractions();
    for (i, (&s, f)) in m.singular_values().iter().zip(cum).enumerate() {
        c.write_record([(i + 1).to_string(), fl(s), fl(s * s), fl(f)])?;
    }
    c.flush()
}

/// Mode-solution summary written next to the spectrum.
#[derive(Serialize)]
pub struct SvdSummary<'a> {
    pub scenario: &'a ScenarioConfig,
    pub energy_fraction: f64,
    pub mode_count: usize,
    pub materialized_modes: usize,
    pub spectrum_length: usize,
    pub sigma1: f64,
    pub total_power_sigma_sq: f64,
    pub tx_gram_worst_db: Option<f64>,
    pub rx_gram_worst_db: Option<f64>,
    pub warnings: &'a [String],
}

impl<'a> SvdSummary<'a> {
    pub fn of(scenario: &'a ScenarioConfig, m: &'a Modes, energy_fraction: f64) -> Self {
        Self {
            scenario,
            energy_fraction,
            mode_count: m.mode_count(),
            materialized_modes: m.tx_modes().len(),
            spectrum_length: m.singular_values().len(),
            sigma1: m.singular_values()[0],
            total_power_sigma_sq: m.total_power(),
            tx_gram_worst_db: m.tx_modes().gram_worst_db().map(floor_db),
            rx_gram_worst_db: m.rx_modes().gram_worst_db().map(floor_db),
            warnings: m.warnings(),
        }
    }
}

pub fn write_basis_csv<W: Write>(w: W, comment: &str, b: &Basis) -> io::Result<()> {
    let mut c = csv_writer(w, comment)?;
    c.write_record(["member_index", "coordinate_m", "re", "im"])?;
    for (i, member) in b.members().iter().enumerate() {
        for (&x, v) in member.mesh().coordinates().iter().zip(member.values()) {
            c.write_record([i.to_string(), fl(x), fl(v.re), fl(v.im)])?;
        }
    }
    c.flush()
}

/// Focal tag in serialized form.
#[derive(Serialize)]
pub struct FocusOut {
    pub kind: &'static str,
    pub value: f64,
}

/// JSON sidecar accompanying a basis CSV.
#[derive(Serialize)]
pub struct BasisSidecar<'a> {
    pub scenario: &'a ScenarioConfig,
    pub side: &'static str,
    pub method: &'a str,
    pub member_count: usize,
    pub foci: Vec<FocusOut>,
    pub gram_worst_db: Option<f64>,
    pub warnings: &'a [String],
}

impl<'a> BasisSidecar<'a> {
    pub fn of(scenario: &'a ScenarioConfig, b: &'a Basis, method: &'a str) -> Self {
        Self {
            scenario,
            side: match b.side() {
                nfmodes::geometry::Side::Tx => "tx",
                nfmodes::geometry::Side::Rx => "rx",
            },
            method,
            member_count: b.len(),
            foci: b
                .foci()
                .iter()
                .map(|f| match *f {
                    Focus::Point(y) => FocusOut {
                        kind: "point_m",
                        value: y,
                    },
                    Focus::Angle(a) => FocusOut {
                        kind: "angle_rad",
                        value: a,
                    },
                })
                .collect(),
            gram_worst_db: b.gram_worst_db().map(floor_db),
            warnings: b.warnings(),
        }
    }
}

pub fn write_pattern_csv<W: Write>(w: W, comment: &str, p: &BeamPattern<f64>) -> io::Result<()> {
    let mut c = csv_writer(w, comment)?;
    c.write_record(["y_m", "magnitude", "phase_rad"])?;
    for ((&y, &m), &ph) in p.y.iter().zip(&p.magnitude).zip(&p.phase) {
        c.write_record([fl(y), fl(m), fl(ph)])?;
    }
    c.flush()
}

pub fn write_sweep_csv<W: Write>(w: W, comment: &str, s: &SweepResult<f64>) -> io::Result<()> {
    let mut c = csv_writer(w, comment)?;
    c.write_record([
        "axis_value",
        "N_classic",
        "N_parallel",
        "N_perpendicular",
        "N_generic",
        "N_svd",
        "N_focusing",
    ])?;
    for row in &s.rows {
        match &row.report {
            Some(r) => c.write_record([
                fl(row.value),
                fl(r.n_classic),
                fl(r.n_parallel),
                fl(r.n_perpendicular),
                fl(r.n_generic),
                r.n_svd.map(|n| n.to_string()).unwrap_or_default(),
                r.n_focusing.map(|n| n.to_string()).unwrap_or_default(),
            ])?,
            None => c.write_record([
                fl(row.value),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ])?,
        }
    }
    c.flush()
}

pub fn write_correlation_csv<W: Write>(
    w: W,
    comment: &str,
    corr: &CrossCorrelation<f64>,
) -> io::Result<()> {
    let mut c = csv_writer(w, comment)?;
    c.write_record(["m", "n", "db"])?;
    let d = corr.db();
    for m in 0..d.nrows() {
        for n in 0..d.ncols() {
            c.write_record([m.to_string(), n.to_string(), fl(floor_db(d[(m, n)]))])?;
        }
    }
    c.flush()
}

pub fn write_compare_csv<W: Write>(
    w: W,
    comment: &str,
    cmp: &MethodComparison<f64>,
) -> io::Result<()> {
    let mut c = csv_writer(w, comment)?;
    c.write_record([
        "n_svd",
        "n_focusing",
        "n_closed_form",
        "gram_worst_tx_db",
        "gram_worst_rx_db",
    ])?;
    c.write_record([
        cmp.n_svd.to_string(),
        cmp.n_focusing.to_string(),
        cmp.n_closed_form.map(|n| n.to_string()).unwrap_or_default(),
        cmp.gram_worst_tx_db
            .map(|v| fl(floor_db(v)))
            .unwrap_or_default(),
        cmp.gram_worst_rx_db
            .map(|v| fl(floor_db(v)))
            .unwrap_or_default(),
    ])?;
    c.flush()
}

/// Method-comparison summary (JSON form).
#[derive(Serialize)]
pub struct CompareSummary<'a> {
    pub scenario: &'a ScenarioConfig,
    pub n_svd: usize,
    pub n_focusing: usize,
    pub n_closed_form: Option<u64>,
    pub gram_worst_tx_db: Option<f64>,
    pub gram_worst_rx_db: Option<f64>,
    pub report: &'a Counts,
}

impl<'a> CompareSummary<'a> {
    pub fn of(scenario: &'a ScenarioConfig, cmp: &'a MethodComparison<f64>) -> Self {
        Self {
            scenario,
            n_svd: cmp.n_svd,
            n_focusing: cmp.n_focusing,
            n_closed_form: cmp.n_closed_form,
            gram_worst_tx_db: cmp.gram_worst_tx_db.map(floor_db),
            gram_worst_rx_db: cmp.gram_worst_rx_db.map(floor_db),
            report: &cmp.report,
        }
    }
}

/// Beam-pattern summary (JSON form).
#[derive(Serialize)]
pub struct PatternSummary<'a> {
    pub scenario: &'a ScenarioConfig,
    pub profile: &'a str,
    pub normalized: bool,
    pub y_m: &'a [f64],
    pub magnitude: &'a [f64],
    pub phase_rad: &'a [f64],
}
