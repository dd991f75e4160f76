//! Exact communication modes by SVD, and closed-form mode counters.
//!
//! The continuous coupling operator `(Pφ)(y) = ∫ G(r(η,y)) φ(η) dη` is
//! discretized with symmetric square-root quadrature weighting,
//!
//! ```text
//! M[m,n] = √w_m · G(r(η_n, y_m)) · √w_n ,
//! ```
//!
//! so the singular values of `M` approximate the continuous coupling
//! intensities `ξ_n` directly and `Σσ²` equals the quadrature sum rule
//! exactly. The factorization runs on the smaller-side Gram matrix
//! (`MᴴM` or `MMᴴ`), whose eigenpairs give `σ²` and one singular basis;
//! the other side follows from `u = Mv/σ` with a Gram–Schmidt polish.
//!
//! Closed-form counters (all `+1` for the center beam):
//!
//! ```text
//! N_classic = L_T L_R/(λz)                        (paraxial)
//! N_par     = 1 + 2 L_T L_R/(λ √(4z²+L_R²))       (θ = 0)
//! N_perp    = 1 + (L_T/λ)(√(4z²+L_R²) − 2z)/√(4z²+L_R²)   (θ = π/2)
//! N(θ)      = 1 + n⁺ + n⁻,  φ_max = arctan(L_R/2z)
//!    n⁺ = (L_T/λ)[sin(φ_max − θ) + sinθ]
//!    n⁻ = max(0, (L_T/λ)[sin(φ_max + θ) − sinθ])  (zero for θ ≥ π/2 − φ_max/2)
//! N_limit   = 1 + (2L_T/λ)cosθ   (θ ≤ π/4),  1 + (L_T/λ)(cosθ + sinθ)  (θ ≥ π/4)
//! ```

use crate::basis::BasisSet;
use crate::em::{green_unchecked, SampledProfile};
use crate::geometry::{build_mesh, AntennaMesh, ScenarioGeometry, Side};
use crate::{as_f64, lit, Error, Result, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

/// Largest per-side sample count fed to the dense factorization; finer
/// meshes are coarsened (with a warning) instead of failing.
pub const SVD_MESH_CAP: usize = 4096;

/// Which cumulative spectrum the mode-count criterion sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub enum EnergyRule {
    /// Cumulative σ² (power / coupling gain). The sum rule is quadratic in
    /// the coupling intensities, so this is the default.
    #[default]
    SigmaSquared,
    /// Cumulative σ, for measuring how much the convention matters.
    Sigma,
}

/// SVD mode solution: full singular spectrum plus the materialized
/// strongly-coupled mode functions on both sides.
#[derive(Clone, Debug)]
pub struct ModeSolution<T: Scalar> {
    singular_values: Vec<T>,
    tx_modes: BasisSet<T>,
    rx_modes: BasisSet<T>,
    mode_count: usize,
    energy_fraction: T,
    rule: EnergyRule,
    warnings: Vec<String>,
}

impl<T: Scalar> ModeSolution<T> {
    /// Full singular spectrum, descending (length = min mesh side).
    pub fn singular_values(&self) -> &[T] {
        &self.singular_values
    }

    /// Transmit-side mode functions (≥ `mode_count` members).
    pub fn tx_modes(&self) -> &BasisSet<T> {
        &self.tx_modes
    }

    /// Receive-side mode functions, aligned with `tx_modes`.
    pub fn rx_modes(&self) -> &BasisSet<T> {
        &self.rx_modes
    }

    /// Smallest `k` whose cumulative energy reaches the requested fraction.
    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn energy_fraction(&self) -> T {
        self.energy_fraction
    }

    pub fn rule(&self) -> EnergyRule {
        self.rule
    }

    /// Mesh-coarsening notes (empty when the requested meshes were used).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Σσ² over the full spectrum (the discretized sum rule).
    pub fn total_power(&self) -> T {
        self.singular_values
            .iter()
            .fold(T::zero(), |acc, &s| acc + s * s)
    }

    /// Cumulative energy fractions under the solution's rule; the last entry
    /// is 1 (up to rounding).
    pub fn cumulative_fractions(&self) -> Vec<T> {
        let weight = |s: T| match self.rule {
            EnergyRule::SigmaSquared => s * s,
            EnergyRule::Sigma => s,
        };
        let total = self
            .singular_values
            .iter()
            .fold(T::zero(), |acc, &s| acc + weight(s));
        let mut acc = T::zero();
        self.singular_values
            .iter()
            .map(|&s| {
                acc += weight(s);
                acc / total
            })
            .collect()
    }
}

fn count_by_rule<T: Scalar>(sigmas: &[T], fraction: T, rule: EnergyRule) -> usize {
    let weight = |s: T| match rule {
        EnergyRule::SigmaSquared => s * s,
        EnergyRule::Sigma => s,
    };
    let total = sigmas.iter().fold(T::zero(), |acc, &s| acc + weight(s));
    let target = fraction * total;
    let mut acc = T::zero();
    for (i, &s) in sigmas.iter().enumerate() {
        acc += weight(s);
        if acc >= target {
            return i + 1;
        }
    }
    sigmas.len()
}

/// Coarsen a mesh to the factorization cap, keeping its extent and center.
fn cap_mesh<T: Scalar>(mesh: &AntennaMesh<T>, lam: T) -> Result<(AntennaMesh<T>, Option<String>)> {
    let quarter = lam / lit::<T>(4.0);
    if mesh.len() <= SVD_MESH_CAP {
        if mesh.spacing() > quarter * (T::one() + lit::<T>(1e-9)) {
            return Err(Error::InvalidMesh(format!(
                "mesh spacing {} exceeds λ/4 = {quarter}",
                mesh.spacing()
            )));
        }
        return Ok((mesh.clone(), None));
    }
    let length = mesh.total_weight();
    let center = (mesh.coordinates()[0] + mesh.coordinates()[mesh.len() - 1]) / lit::<T>(2.0);
    let spacing = length / lit::<T>(SVD_MESH_CAP as f64) * (T::one() + lit::<T>(1e-12));
    let coarse = build_mesh(length, spacing)?
        .shifted(center)
        .with_label(mesh.label());
    let mut note = format!(
        "{:?} mesh coarsened from {} to {} samples for the factorization cap",
        mesh.label(),
        mesh.len(),
        coarse.len()
    );
    if coarse.spacing() > quarter {
        note.push_str("; coarsened spacing exceeds λ/4, spectrum accuracy degraded");
    }
    Ok((coarse, Some(note)))
}

/// Discretized coupling operator `M[m,n] = √w_m G(r(η_n, y_m)) √w_n`
/// (rows: receive samples, columns: transmit samples).
pub fn weighted_coupling_matrix<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    rx_mesh: &AntennaMesh<T>,
) -> Result<DMatrix<Complex<T>>> {
    let kappa = g.wavenumber();
    let sqrt_wt: Vec<T> = tx_mesh.weights().iter().map(|&w| w.sqrt()).collect();
    let rows: Result<Vec<Vec<Complex<T>>>> = rx_mesh
        .coordinates()
        .par_iter()
        .zip(rx_mesh.weights().par_iter())
        .map(|(&y, &wy)| {
            let sy = wy.sqrt();
            tx_mesh
                .coordinates()
                .iter()
                .zip(&sqrt_wt)
                .map(|(&e, &se)| {
                    let r = g.point_distance(e, y);
                    if !(r > T::zero()) {
                        return Err(Error::InvalidGeometry(
                            "receive sample coincides with the transmit segment".into(),
                        ));
                    }
                    Ok(green_unchecked(r, kappa) * (sy * se))
                })
                .collect()
        })
        .collect();
    let rows = rows?;
    let (nr, nc) = (rx_mesh.len(), tx_mesh.len());
    let flat: Vec<Complex<T>> = rows.into_iter().flatten().collect();
    Ok(DMatrix::from_row_iterator(nr, nc, flat))
}

/// Hermitian Gram `WᴴW` of the matrix columns, assembled pairwise in
/// parallel (nalgebra's matmul is single-threaded).
fn column_gram<T: Scalar>(w: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let k = w.ncols();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let vals: Vec<Complex<T>> = pairs
        .par_iter()
        .map(|&(i, j)| w.column(i).dotc(&w.column(j)))
        .collect();
    let mut a = DMatrix::from_element(k, k, Complex::new(T::zero(), T::zero()));
    for (&(i, j), &v) in pairs.iter().zip(&vals) {
        if i == j {
            a[(i, i)] = Complex::new(v.re, T::zero());
        } else {
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
    a
}

/// In-place modified Gram–Schmidt on the columns (conjugate inner product).
fn orthonormalize_columns<T: Scalar>(m: &mut DMatrix<Complex<T>>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..j {
            let prev = m.column(i).clone_owned();
            let proj = prev.dotc(&m.column(j));
            m.column_mut(j)
                .axpy(-proj, &prev, Complex::new(T::one(), T::zero()));
        }
        let n = m.column(j).norm();
        if !(n > lit::<T>(1e-12)) {
            return Err(Error::Numerical(
                "singular vectors degenerate during orthonormalization".into(),
            ));
        }
        m.column_mut(j).unscale_mut(n);
    }
    Ok(())
}

/// Exact communication modes at the default 99% σ²-energy criterion.
pub fn svd_modes<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    rx_mesh: &AntennaMesh<T>,
    energy_fraction: T,
) -> Result<ModeSolution<T>> {
    svd_modes_with_rule(g, tx_mesh, rx_mesh, energy_fraction, EnergyRule::default())
}

/// Exact communication modes with an explicit energy rule.
pub fn svd_modes_with_rule<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    rx_mesh: &AntennaMesh<T>,
    energy_fraction: T,
    rule: EnergyRule,
) -> Result<ModeSolution<T>> {
    if !(energy_fraction > T::zero() && energy_fraction < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "energy fraction must lie in (0, 1), got {energy_fraction}"
        )));
    }
    let lam = g.wavelength();
    let (tx_mesh, tx_note) = cap_mesh(tx_mesh, lam)?;
    let (rx_mesh, rx_note) = cap_mesh(rx_mesh, lam)?;
    let warnings: Vec<String> = [tx_note, rx_note].into_iter().flatten().collect();

    let m = weighted_coupling_matrix(g, &tx_mesh, &rx_mesh)?;
    // Gram on the smaller side; its eigenvectors are that side's singular
    // vectors and its eigenvalues the σ².
    let small_is_tx = m.ncols() <= m.nrows();
    let adjoint_storage;
    let w = if small_is_tx {
        &m
    } else {
        adjoint_storage = m.adjoint();
        &adjoint_storage
    };
    let gram = column_gram(w);
    let eig = gram.symmetric_eigen();

    let k = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalue")
    });
    let sigmas: Vec<T> = order
        .iter()
        .map(|&i| eig.eigenvalues[i].max(T::zero()).sqrt())
        .collect();
    let sigma1 = sigmas[0];
    if !(sigma1 > T::zero()) {
        return Err(Error::Numerical(
            "coupling operator is numerically zero".into(),
        ));
    }

    let n_modes = count_by_rule(&sigmas, energy_fraction, rule);
    // Materialize every mode down to σ₁/1000, and at least the counted ones.
    let floor = sigma1 * lit::<T>(1e-3);
    let kept = sigmas
        .iter()
        .take_while(|&&s| s >= floor)
        .count()
        .max(n_modes)
        .min(k);

    let mut small = DMatrix::from_element(k, kept, Complex::new(T::zero(), T::zero()));
    for (col, &src) in order[..kept].iter().enumerate() {
        small.set_column(col, &eig.eigenvectors.column(src));
    }
    let mut derived = w * &small;
    for (col, &sigma) in sigmas.iter().enumerate().take(kept) {
        derived.column_mut(col).unscale_mut(sigma);
    }
    orthonormalize_columns(&mut small)?;
    orthonormalize_columns(&mut derived)?;

    let (tx_cols, rx_cols) = if small_is_tx {
        (&small, &derived)
    } else {
        (&derived, &small)
    };
    let tx_modes = unweighted_members(tx_cols, &tx_mesh)?;
    let rx_modes = unweighted_members(rx_cols, &rx_mesh)?;
    Ok(ModeSolution {
        singular_values: sigmas,
        tx_modes: BasisSet::from_members(tx_modes, Side::Tx)?,
        rx_modes: BasisSet::from_members(rx_modes, Side::Rx)?,
        mode_count: n_modes,
        energy_fraction,
        rule,
        warnings,
    })
}

/// Divide the √w quadrature weighting back out of each column, yielding
/// sampled functions with unit weighted norm.
fn unweighted_members<T: Scalar>(
    cols: &DMatrix<Complex<T>>,
    mesh: &AntennaMesh<T>,
) -> Result<Vec<SampledProfile<T>>> {
    let inv_sqrt: Vec<T> = mesh.weights().iter().map(|&w| w.sqrt().recip()).collect();
    (0..cols.ncols())
        .map(|j| {
            let values: Vec<Complex<T>> = cols
                .column(j)
                .iter()
                .zip(&inv_sqrt)
                .map(|(v, &s)| *v * s)
                .collect();
            SampledProfile::new(mesh.clone(), values)
        })
        .collect()
}

/// Paraxial estimate `N = L_T L_R/(λz)` (valid for `L_R ≪ z`, provided for
/// comparison everywhere).
pub fn count_classic_paraxial<T: Scalar>(g: &ScenarioGeometry<T>) -> T {
    g.tx_length() * g.rx_length() / (g.wavelength() * g.distance())
}

fn parallel_count_value<T: Scalar>(lt: T, lr: T, z: T, lam: T) -> T {
    let den = (lit::<T>(4.0) * z * z + lr * lr).sqrt();
    T::one() + lit::<T>(2.0) * lt * lr / (lam * den)
}

fn perpendicular_count_value<T: Scalar>(lt: T, lr: T, z: T, lam: T) -> T {
    let den = (lit::<T>(4.0) * z * z + lr * lr).sqrt();
    T::one() + lt * (den - lit::<T>(2.0) * z) / (lam * den)
}

/// Broadside counter `N = 1 + 2L_T L_R/(λ√(4z²+L_R²))`. The formula is
/// derived for `θ = 0`, `y_c = 0` and evaluated from the lengths alone.
pub fn count_parallel<T: Scalar>(g: &ScenarioGeometry<T>) -> T {
    parallel_count_value(g.tx_length(), g.rx_length(), g.distance(), g.wavelength())
}

/// Perpendicular counter `N = 1 + (L_T/λ)(√(4z²+L_R²) − 2z)/√(4z²+L_R²)`,
/// derived for `θ = π/2`, `y_c = 0`.
pub fn count_perpendicular<T: Scalar>(g: &ScenarioGeometry<T>) -> T {
    perpendicular_count_value(g.tx_length(), g.rx_length(), g.distance(), g.wavelength())
}

fn generic_count_value<T: Scalar>(lt: T, lr: T, z: T, lam: T, theta: T) -> T {
    let phi_max = (lr / (lit::<T>(2.0) * z)).atan();
    let per = lt / lam;
    let n_plus = per * ((phi_max - theta).sin() + theta.sin());
    let n_minus = (per * ((phi_max + theta).sin() - theta.sin())).max(T::zero());
    T::one() + n_plus + n_minus
}

/// Rotated-transmitter counter `N(θ) = 1 + n⁺ + n⁻` for `θ ∈ [0, π/2]`,
/// `y_c = 0`; reduces to the parallel/perpendicular forms at the endpoints.
pub fn count_generic<T: Scalar>(g: &ScenarioGeometry<T>) -> Result<T> {
    let theta = g.tx_rotation();
    if theta < T::zero() || theta > T::frac_pi_2() {
        return Err(Error::InvalidArgument(format!(
            "generic counter needs θ ∈ [0, π/2], got {theta} (mirror the scenario first)"
        )));
    }
    Ok(generic_count_value(
        g.tx_length(),
        g.rx_length(),
        g.distance(),
        g.wavelength(),
        theta,
    ))
}

/// Infinite-receiver / zero-distance limit of the generic counter:
/// `1 + (2L_T/λ)cosθ` for `θ ≤ π/4`, `1 + (L_T/λ)(cosθ + sinθ)` for
/// `θ ≥ π/4`. Upper-bounds [`count_generic`] for every finite geometry.
pub fn count_limit<T: Scalar>(g: &ScenarioGeometry<T>) -> T {
    let theta = g.tx_rotation().abs();
    let per = g.tx_length() / g.wavelength();
    if theta <= T::frac_pi_4() {
        T::one() + lit::<T>(2.0) * per * theta.cos()
    } else {
        T::one() + per * (theta.cos() + theta.sin())
    }
}

/// Parallel and perpendicular counters as functions of `F = z/L_R` alone:
/// `1 + 2L_T/(λ√(1+4F²))` and `1 + L_T(√(1+4F²) − 2F)/(λ√(1+4F²))`.
pub fn f_ratio_counts<T: Scalar>(f_ratio: T, lt: T, lam: T) -> Result<(T, T)> {
    if !(f_ratio > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "F must be positive, got {f_ratio}"
        )));
    }
    let root = (T::one() + lit::<T>(4.0) * f_ratio * f_ratio).sqrt();
    let par = T::one() + lit::<T>(2.0) * lt / (lam * root);
    let perp = T::one() + lt * (root - lit::<T>(2.0) * f_ratio) / (lam * root);
    Ok((par, perp))
}

/// Fraunhofer distance `r_ff = 2D²/λ` of an aperture of size `D`.
pub fn fraunhofer_distance<T: Scalar>(d: T, lam: T) -> Result<T> {
    if !(d > T::zero() && lam > T::zero()) {
        return Err(Error::InvalidArgument(
            "aperture size and wavelength must be positive".into(),
        ));
    }
    Ok(lit::<T>(2.0) * d * d / lam)
}

/// Paraxial count written through the two Fraunhofer distances:
/// `N = √(r_ff_tx · r_ff_rx)/(2z)` (identical to `L_T L_R/(λz)`).
pub fn count_from_fraunhofer<T: Scalar>(r_ff_tx: T, r_ff_rx: T, z: T) -> T {
    (r_ff_tx * r_ff_rx).sqrt() / (lit::<T>(2.0) * z)
}

/// Round-half-away-from-zero with a floor of one mode.
pub fn round_count<T: Scalar>(n: T) -> u64 {
    as_f64(n.round()).max(1.0) as u64
}

/// Every closed-form counter evaluated on one scenario, plus slots for the
/// measured counts.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ModeCountReport<T: Scalar> {
    /// `F = z/L_R`.
    pub f_ratio: T,
    /// Angle subtended by the receiver half-length: `arctan(L_R/2z)`.
    pub phi_max: T,
    pub n_classic: T,
    pub n_classic_rounded: u64,
    pub n_parallel: T,
    pub n_parallel_rounded: u64,
    pub n_perpendicular: T,
    pub n_perpendicular_rounded: u64,
    /// Generic counter at `|θ|`.
    pub n_generic: T,
    pub n_generic_rounded: u64,
    pub n_limit: T,
    pub n_limit_rounded: u64,
    /// Measured SVD count, when computed.
    pub n_svd: Option<usize>,
    /// Focusing null-search count, when computed.
    pub n_focusing: Option<usize>,
}

/// Evaluate every closed-form counter on one scenario. The generic counter
/// uses `|θ|` (the count is mirror-symmetric for a centered receiver).
pub fn mode_count_report<T: Scalar>(g: &ScenarioGeometry<T>) -> ModeCountReport<T> {
    let z = g.distance();
    let lr = g.rx_length();
    let n_classic = count_classic_paraxial(g);
    let n_parallel = count_parallel(g);
    let n_perpendicular = count_perpendicular(g);
    let n_generic =
        generic_count_value(g.tx_length(), lr, z, g.wavelength(), g.tx_rotation().abs());
    let n_limit = count_limit(g);
    ModeCountReport {
        f_ratio: z / lr,
        phi_max: (lr / (lit::<T>(2.0) * z)).atan(),
        n_classic,
        n_classic_rounded: round_count(n_classic),
        n_parallel,
        n_parallel_rounded: round_count(n_parallel),
        n_perpendicular,
        n_perpendicular_rounded: round_count(n_perpendicular),
        n_generic,
        n_generic_rounded: round_count(n_generic),
        n_limit,
        n_limit_rounded: round_count(n_limit),
        n_svd: None,
        n_focusing: None,
    }
}
