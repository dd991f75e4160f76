//! Config-driven frontend for the near-field mode library.
//!
//! One command per invocation; the scenario always comes from `--config`.
//! With `--out <dir>` each command writes its full artifact set into the
//! directory; without it the primary artifact goes to stdout in the selected
//! `--format`. Exit codes: 0 success, 2 config error, 3 numerical failure.

mod config;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use config::ScenarioConfig;
use nfmodes::analysis::{
    beam_pattern, compare_methods, cross_correlation_db, sweep, SweepAxis, SweepOptions,
};
use nfmodes::basis::{
    focusing_basis, focusing_profile, fresnel_downlink_bases, sis_uplink_bases, steering_profile,
};
use nfmodes::em::SampledProfile;
use nfmodes::modes::{mode_count_report, svd_modes};
use nfmodes::{Mesh, Profile, Scenario};
use num_complex::Complex;
use output::*;
use serde::Serialize;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "nfmodes",
    version,
    about = "Communication modes between two linear apertures"
)]
struct Cli {
    /// Scenario config file (flat key = value, lengths in m, angles in deg)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; omit to print the primary artifact on stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for stdout / single-artifact commands
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Mesh spacing override in meters (svd, basis, pattern)
    #[arg(long, global = true)]
    mesh_spacing: Option<f64>,
    /// σ²-energy fraction captured by the reported mode count
    #[arg(long, global = true, default_value_t = 0.99)]
    energy_fraction: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Focusing,
    SisUplink,
    FresnelDownlink,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Focusing => "focusing",
            Method::SisUplink => "sis-uplink",
            Method::FresnelDownlink => "fresnel-downlink",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Axis {
    /// F = z/L_R
    F,
    /// Transmitter rotation (degrees on the command line)
    Theta,
    /// Link distance, meters
    Z,
    /// Carrier frequency, Hz
    F0,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form mode counters for the scenario
    Count,
    /// Exact modes: singular spectrum plus orthonormal mode sets
    Svd {
        /// Also write tx_modes/rx_modes member CSVs (requires --out)
        #[arg(long)]
        emit_basis: bool,
    },
    /// Near-orthogonal transmit/receive basis construction
    Basis {
        #[arg(long, value_enum, default_value_t = Method::Focusing)]
        method: Method,
    },
    /// Received beam pattern of one transmit profile
    Pattern {
        /// rect | steer:<deg> | focus:<y_m>
        #[arg(long)]
        profile: String,
        /// Grid points across the receive segment extended ±L_R/2
        #[arg(long, default_value_t = 401)]
        points: usize,
        /// Emit raw field magnitudes instead of per-curve max normalization
        #[arg(long)]
        raw: bool,
    },
    /// Counter report swept along one axis
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Axis start (F, degrees, meters or Hz depending on --axis)
        #[arg(long)]
        start: f64,
        /// Axis stop, inclusive
        #[arg(long)]
        stop: f64,
        /// Number of samples, endpoints included
        #[arg(long)]
        steps: usize,
        /// Measure SVD + focusing counts at every k-th sample (0 disables)
        #[arg(long, default_value_t = 5)]
        marker_every: usize,
    },
    /// Mode counts from SVD, focusing search, and closed form side by side
    Compare,
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<nfmodes::Error> for CliError {
    fn from(e: nfmodes::Error) -> Self {
        match e {
            nfmodes::Error::Numerical(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(format!("i/o failure: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(()) => 0,
        Err(CliError::Config(m)) => {
            eprintln!("config error: {m}");
            2
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            3
        }
    });
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("missing --config <path>".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = ScenarioConfig::parse(&text).map_err(CliError::Config)?;
    let g = cfg.to_scenario().map_err(CliError::Config)?;
    let spacing = cli.mesh_spacing.or(cfg.mesh_spacing_m);
    let dir = cli.out.as_deref();

    match cli.command {
        Command::Count => cmd_count(&cfg, &g, cli.format, dir),
        Command::Svd { emit_basis } => {
            let (tx, rx) = meshes(&g, spacing)?;
            cmd_svd(
                &cfg,
                &g,
                &tx,
                &rx,
                cli.energy_fraction,
                emit_basis,
                cli.format,
                dir,
            )
        }
        Command::Basis { method } => {
            let (tx, rx) = meshes(&g, spacing)?;
            cmd_basis(&cfg, &g, &tx, &rx, method, cli.format, dir)
        }
        Command::Pattern {
            profile,
            points,
            raw,
        } => {
            let (tx, _) = meshes(&g, spacing)?;
            cmd_pattern(&cfg, &g, &tx, &profile, points, !raw, cli.format, dir)
        }
        Command::Sweep {
            axis,
            start,
            stop,
            steps,
            marker_every,
        } => {
            if cli.mesh_spacing.is_some() {
                return Err(CliError::Config(
                    "--mesh-spacing is not supported for sweep (marker points use default meshes)"
                        .into(),
                ));
            }
            cmd_sweep(
                &cfg,
                &g,
                axis,
                start,
                stop,
                steps,
                marker_every,
                cli.energy_fraction,
                cli.format,
                dir,
            )
        }
        Command::Compare => {
            if cli.mesh_spacing.is_some() {
                return Err(CliError::Config(
                    "--mesh-spacing is not supported for compare (defaults are used)".into(),
                ));
            }
            cmd_compare(&cfg, &g, cli.energy_fraction, cli.format, dir)
        }
    }
}

fn meshes(g: &Scenario, spacing: Option<f64>) -> Result<(Mesh, Mesh), CliError> {
    Ok(match spacing {
        Some(s) => (g.tx_mesh(s)?, g.rx_mesh(s)?),
        None => (g.tx_mesh_default(), g.rx_mesh_default()),
    })
}

fn deliver(dir: Option<&Path>, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            std::fs::write(d.join(name), bytes)?;
        }
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes<S: Serialize>(value: &S) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_json(&mut buf, value)?;
    Ok(buf)
}

#[derive(Serialize)]
struct CountSummary<'a> {
    scenario: &'a ScenarioConfig,
    report: &'a nfmodes::Counts,
}

fn cmd_count(
    cfg: &ScenarioConfig,
    g: &Scenario,
    format: Format,
    dir: Option<&Path>,
) -> Result<(), CliError> {
    let report = mode_count_report(g);
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            let comment = config_comment(cfg, &[("command", "count".into())]);
            write_count_csv(&mut buf, &comment, &report)?;
            buf
        }
        Format::Json => json_bytes(&CountSummary {
            scenario: cfg,
            report: &report,
        })?,
    };
    deliver(
        dir,
        if format == Format::Csv {
            "report.csv"
        } else {
            "report.json"
        },
        &bytes,
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_svd(
    cfg: &ScenarioConfig,
    g: &Scenario,
    tx_mesh: &Mesh,
    rx_mesh: &Mesh,
    energy_fraction: f64,
    emit_basis: bool,
    format: Format,
    dir: Option<&Path>,
) -> Result<(), CliError> {
    if emit_basis && dir.is_none() {
        return Err(CliError::Config("--emit-basis requires --out <dir>".into()));
    }
    let sol = svd_modes(g, tx_mesh, rx_mesh, energy_fraction)?;
    let comment = config_comment(
        cfg,
        &[
            ("command", "svd".into()),
            ("energy_fraction", fl(energy_fraction)),
            ("tx_spacing_m", fl(tx_mesh.spacing())),
            ("rx_spacing_m", fl(rx_mesh.spacing())),
        ],
    );
    let summary = SvdSummary::of(cfg, &sol, energy_fraction);
    match dir {
        Some(d) => {
            let mut spec = Vec::new();
            write_spectrum_csv(&mut spec, &comment, &sol)?;
            deliver(Some(d), "spectrum.csv", &spec)?;
            deliver(Some(d), "summary.json", &json_bytes(&summary)?)?;
            if emit_basis {
                for (name, basis) in [("tx_modes", sol.tx_modes()), ("rx_modes", sol.rx_modes())] {
                    let mut buf = Vec::new();
                    write_basis_csv(&mut buf, &comment, basis)?;
                    deliver(Some(d), &format!("{name}.csv"), &buf)?;
                    let sidecar = BasisSidecar::of(cfg, basis, "svd");
                    deliver(Some(d), &format!("{name}.json"), &json_bytes(&sidecar)?)?;
                }
            }
            Ok(())
        }
        None => match format {
            Format::Csv => {
                let mut buf = Vec::new();
                write_spectrum_csv(&mut buf, &comment, &sol)?;
                deliver(None, "", &buf)
            }
            Format::Json => deliver(None, "", &json_bytes(&summary)?),
        },
    }
}

#[derive(Serialize)]
struct BasisPairSummary<'a> {
    tx: BasisSidecar<'a>,
    rx: BasisSidecar<'a>,
}

fn cmd_basis(
    cfg: &ScenarioConfig,
    g: &Scenario,
    tx_mesh: &Mesh,
    rx_mesh: &Mesh,
    method: Method,
    format: Format,
    dir: Option<&Path>,
) -> Result<(), CliError> {
    let (tx, rx) = match method {
        Method::Focusing => focusing_basis(g, tx_mesh, rx_mesh)?,
        Method::SisUplink => sis_uplink_bases(g, tx_mesh, rx_mesh)?,
        Method::FresnelDownlink => fresnel_downlink_bases(g, tx_mesh, rx_mesh)?,
    };
    for w in tx.warnings().iter().chain(rx.warnings()) {
        eprintln!("warning: {w}");
    }
    let summary = BasisPairSummary {
        tx: BasisSidecar::of(cfg, &tx, method.name()),
        rx: BasisSidecar::of(cfg, &rx, method.name()),
    };
    match dir {
        Some(d) => {
            let comment = config_comment(
                cfg,
                &[
                    ("command", "basis".into()),
                    ("method", method.name().into()),
                    ("tx_spacing_m", fl(tx_mesh.spacing())),
                    ("rx_spacing_m", fl(rx_mesh.spacing())),
                ],
            );
            for (name, basis, sidecar) in [
                ("tx_basis", &tx, &summary.tx),
                ("rx_basis", &rx, &summary.rx),
            ] {
                let mut buf = Vec::new();
                write_basis_csv(&mut buf, &comment, basis)?;
                deliver(Some(d), &format!("{name}.csv"), &buf)?;
                deliver(Some(d), &format!("{name}.json"), &json_bytes(sidecar)?)?;
                let mut corr = Vec::new();
                write_correlation_csv(&mut corr, &comment, &cross_correlation_db(basis))?;
                deliver(Some(d), &format!("{name}_correlation.csv"), &corr)?;
            }
            Ok(())
        }
        None => match format {
            Format::Json => deliver(None, "", &json_bytes(&summary)?),
            Format::Csv => Err(CliError::Config(
                "basis emits two member CSVs; pass --out <dir> (or --format json)".into(),
            )),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_pattern(
    cfg: &ScenarioConfig,
    g: &Scenario,
    tx_mesh: &Mesh,
    profile_spec: &str,
    points: usize,
    normalize: bool,
    format: Format,
    dir: Option<&Path>,
) -> Result<(), CliError> {
    if points < 2 {
        return Err(CliError::Config(
            "pattern needs at least 2 grid points".into(),
        ));
    }
    let profile = build_profile(profile_spec, g, tx_mesh)?;
    let reach = g.rx_length();
    let yc = g.rx_center_offset();
    let step = 2.0 * reach / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| yc - reach + i as f64 * step).collect();
    let pat = beam_pattern(&profile, g, &grid, normalize)?;
    let bytes = match format {
        Format::Csv => {
            let comment = config_comment(
                cfg,
                &[
                    ("command", "pattern".into()),
                    ("profile", profile_spec.into()),
                    ("normalized", normalize.to_string()),
                    ("tx_spacing_m", fl(tx_mesh.spacing())),
                ],
            );
            let mut buf = Vec::new();
            write_pattern_csv(&mut buf, &comment, &pat)?;
            buf
        }
        Format::Json => json_bytes(&PatternSummary {
            scenario: cfg,
            profile: profile_spec,
            normalized: normalize,
            y_m: &pat.y,
            magnitude: &pat.magnitude,
            phase_rad: &pat.phase,
        })?,
    };
    deliver(
        dir,
        if format == Format::Csv {
            "pattern.csv"
        } else {
            "pattern.json"
        },
        &bytes,
    )
}

fn build_profile(spec: &str, g: &Scenario, mesh: &Mesh) -> Result<Profile, CliError> {
    if spec == "rect" {
        return Ok(SampledProfile::from_fn(mesh.clone(), |_| Complex::new(1.0, 0.0)).normalized()?);
    }
    if let Some(deg) = spec.strip_prefix("steer:") {
        let deg: f64 = deg
            .parse()
            .map_err(|_| CliError::Config(format!("bad steering angle `{deg}`")))?;
        return Ok(steering_profile(deg.to_radians(), g, mesh)?.into_profile());
    }
    if let Some(y) = spec.strip_prefix("focus:") {
        let y: f64 = y
            .parse()
            .map_err(|_| CliError::Config(format!("bad focus coordinate `{y}`")))?;
        return Ok(focusing_profile(y, g, mesh).into_profile());
    }
    Err(CliError::Config(format!(
        "unknown profile `{spec}` (expected rect | steer:<deg> | focus:<y_m>)"
    )))
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    cfg: &ScenarioConfig,
    g: &Scenario,
    axis: Axis,
    start: f64,
    stop: f64,
    steps: usize,
    marker_every: usize,
    energy_fraction: f64,
    format: Format,
    dir: Option<&Path>,
) -> Result<(), CliError> {
    if steps == 0 {
        return Err(CliError::Config("empty sweep range (steps = 0)".into()));
    }
    // θ comes in as degrees; the library wants radians.
    let (lib_axis, to_internal): (SweepAxis, fn(f64) -> f64) = match axis {
        Axis::F => (SweepAxis::FRatio, std::convert::identity),
        Axis::Theta => (SweepAxis::Theta, f64::to_radians),
        Axis::Z => (SweepAxis::Distance, std::convert::identity),
        Axis::F0 => (SweepAxis::Frequency, std::convert::identity),
    };
    let values: Vec<f64> = if steps == 1 {
        vec![to_internal(start)]
    } else {
        (0..steps)
            .map(|i| to_internal(start + i as f64 * (stop - start) / (steps - 1) as f64))
            .collect()
    };
    let opts = SweepOptions {
        marker_every: if marker_every == 0 {
            None
        } else {
            Some(marker_every)
        },
        energy_fraction,
    };
    let res = sweep(g, lib_axis, &values, opts)?;
    for row in &res.rows {
        if let Some(err) = &row.error {
            eprintln!("warning: {}={}: {err}", lib_axis.name(), row.value);
        }
    }
    let bytes = match format {
        Format::Csv => {
            let comment = config_comment(
                cfg,
                &[
                    ("command", "sweep".into()),
                    ("axis", lib_axis.name().into()),
                    ("start", fl(start)),
                    ("stop", fl(stop)),
                    ("steps", steps.to_string()),
                    ("marker_every", marker_every.to_string()),
                    ("energy_fraction", fl(energy_fraction)),
                ],
            );
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &comment, &res)?;
            buf
        }
        Format::Json => json_bytes(&res)?,
    };
    deliver(
        dir,
        if format == Format::Csv {
            "sweep.csv"
        } else {
            "sweep.json"
        },
        &bytes,
    )
}

fn cmd_compare(
    cfg: &ScenarioConfig,
    g: &Scenario,
    energy_fraction: f64,
    format: Format,
    dir: Option<&Path>,
) -> Result<(), CliError> {
    let cmp = compare_methods(g, energy_fraction)?;
    let bytes = match format {
        Format::Csv => {
            let comment = config_comment(
                cfg,
                &[
                    ("command", "compare".into()),
                    ("energy_fraction", fl(energy_fraction)),
                ],
            );
            let mut buf = Vec::new();
            write_compare_csv(&mut buf, &comment, &cmp)?;
            buf
        }
        Format::Json => json_bytes(&CompareSummary::of(cfg, &cmp))?,
    };
    deliver(
        dir,
        if format == Format::Csv {
            "compare.csv"
        } else {
            "compare.json"
        },
        &bytes,
    )
}
