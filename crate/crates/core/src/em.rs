//! Green function, field propagation, coupling kernels, and the sum rule.
//!
//! The scalar free-space Green function is `G(r) = e^{−jκr}/(4πr)`. A source
//! current `φ(η)` on the transmit aperture produces the received field
//!
//! ```text
//! ψ(y) = ∫ G(r(η, y)) φ(η) dη
//! ```
//!
//! The coupling kernels are
//!
//! ```text
//! K_R(y, y′) = ∫_TX G(r(η, y)) G*(r(η, y′)) dη
//! K_T(η, η′) = ∫_RX G(r(η, y)) G*(r(η′, y)) dy
//! ```
//!
//! (both Hermitian in their argument pair), with an amplitude-approximate
//! variant that replaces the `1/(4πr)` denominators by `1/(4πd_c)`. The sum
//! rule `γ_RT = (1/4π)² ∬ 1/r² dη dy` equals the total squared coupling of
//! any complete orthonormal basis pair and bounds that of partial ones.

use crate::basis::BasisSet;
use crate::geometry::{AntennaMesh, ScenarioGeometry};
use crate::{cis, lit, Error, Result, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

/// `G(r) = e^{−jκr}/(4πr)` without the domain check; callers guarantee r > 0.
#[inline]
pub(crate) fn green_unchecked<T: Scalar>(r: T, kappa: T) -> Complex<T> {
    let amp = (lit::<T>(4.0) * T::pi() * r).recip();
    cis(-kappa * r) * amp
}

/// Free-space scalar Green function `G(r) = e^{−jκr}/(4πr)`.
///
/// Rejects `r ≤ 0`: the model excludes the source point and the reactive
/// region around it.
pub fn green<T: Scalar>(r: T, kappa: T) -> Result<Complex<T>> {
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "green function requires r > 0, got {r}"
        )));
    }
    Ok(green_unchecked(r, kappa))
}

/// Complex-valued function sampled on an aperture mesh.
///
/// Holds source currents (dimensionless) or received fields (field units are
/// folded into the Green function). The inner product and norm are weighted
/// by the mesh quadrature weights.
#[derive(Clone, Debug)]
pub struct SampledProfile<T> {
    mesh: AntennaMesh<T>,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> SampledProfile<T> {
    /// Wrap explicit sample values; the length must match the mesh.
    pub fn new(mesh: AntennaMesh<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::InvalidMesh(format!(
                "profile has {} values for a mesh of {} samples",
                values.len(),
                mesh.len()
            )));
        }
        Ok(Self { mesh, values })
    }

    /// Sample a function of the mesh coordinate.
    pub fn from_fn(mesh: AntennaMesh<T>, mut f: impl FnMut(T) -> Complex<T>) -> Self {
        let values = mesh.coordinates().iter().map(|&c| f(c)).collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &AntennaMesh<T> {
        &self.mesh
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// Weighted squared norm `Σ w_i |v_i|²`.
    pub fn norm_sq(&self) -> T {
        self.values
            .iter()
            .zip(self.mesh.weights())
            .fold(T::zero(), |acc, (v, &w)| acc + w * v.norm_sqr())
    }

    /// Weighted norm.
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// Weighted inner product `⟨self, other⟩ = Σ w_i conj(self_i) other_i`.
    /// The profiles must share a mesh.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.mesh != other.mesh {
            return Err(Error::InvalidMesh(
                "inner product requires both profiles on the same mesh".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.mesh.weights())
            .fold(Complex::new(T::zero(), T::zero()), |acc, ((a, b), &w)| {
                acc + a.conj() * *b * w
            }))
    }

    /// Rescale to unit weighted norm.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > T::zero()) {
            return Err(Error::Numerical("cannot normalize a zero profile".into()));
        }
        let inv = n.recip();
        for v in &mut self.values {
            *v *= inv;
        }
        Ok(self)
    }
}

fn check_spacing<T: Scalar>(mesh: &AntennaMesh<T>, g: &ScenarioGeometry<T>) -> Result<()> {
    let max = g.wavelength() / lit::<T>(4.0);
    // Tiny slack so a mesh coarsened to exactly λ/4 passes.
    if mesh.spacing() > max * (T::one() + lit::<T>(1e-9)) {
        return Err(Error::InvalidMesh(format!(
            "mesh spacing {} exceeds λ/4 = {max}",
            mesh.spacing()
        )));
    }
    Ok(())
}

/// Propagate a transmit profile to the receive mesh by quadrature:
/// `ψ(y_m) = Σ_n w_n G(r(η_n, y_m)) φ(η_n)`.
///
/// Both meshes must satisfy the λ/4 spacing invariant; any receive sample
/// coinciding with a transmit sample is rejected.
pub fn propagate<T: Scalar>(
    profile: &SampledProfile<T>,
    g: &ScenarioGeometry<T>,
    rx_mesh: &AntennaMesh<T>,
) -> Result<SampledProfile<T>> {
    check_spacing(profile.mesh(), g)?;
    check_spacing(rx_mesh, g)?;
    let kappa = g.wavenumber();
    let eta = profile.mesh().coordinates();
    let wt = profile.mesh().weights();
    let values: Result<Vec<Complex<T>>> = rx_mesh
        .coordinates()
        .par_iter()
        .map(|&y| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for ((&e, &w), v) in eta.iter().zip(wt).zip(profile.values()) {
                let r = g.point_distance(e, y);
                if !(r > T::zero()) {
                    return Err(Error::InvalidGeometry(
                        "receive sample coincides with the transmit segment".into(),
                    ));
                }
                acc += green_unchecked(r, kappa) * *v * w;
            }
            Ok(acc)
        })
        .collect();
    SampledProfile::new(rx_mesh.clone(), values?)
}

/// Kernel evaluation mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    /// Integrate `G·G*` exactly (denominators keep their own `r`).
    Exact,
    /// Replace both denominators by the center distance `d_c`:
    /// `(1/(4πd_c))² ∫ e^{−jκr} e^{+jκr′}`.
    AmplitudeApprox,
}

/// `K_R(y, y′)` integrated over an explicit transmit mesh.
pub fn kernel_kr_on<T: Scalar>(
    g: &ScenarioGeometry<T>,
    y: T,
    y_prime: T,
    mode: KernelMode,
    tx_mesh: &AntennaMesh<T>,
) -> Complex<T> {
    let kappa = g.wavenumber();
    let mut acc = Complex::new(T::zero(), T::zero());
    match mode {
        KernelMode::Exact => {
            for (&e, &w) in tx_mesh.coordinates().iter().zip(tx_mesh.weights()) {
                let r = g.point_distance(e, y);
                let rp = g.point_distance(e, y_prime);
                acc += green_unchecked(r, kappa) * green_unchecked(rp, kappa).conj() * w;
            }
            acc
        }
        KernelMode::AmplitudeApprox => {
            for (&e, &w) in tx_mesh.coordinates().iter().zip(tx_mesh.weights()) {
                let r = g.point_distance(e, y);
                let rp = g.point_distance(e, y_prime);
                acc += cis(kappa * (rp - r)) * w;
            }
            let scale = (lit::<T>(4.0) * T::pi() * g.center_distance()).recip();
            acc * (scale * scale)
        }
    }
}

/// Receive-side coupling kernel `K_R(y, y′)` at the default transmit mesh.
pub fn kernel_kr<T: Scalar>(
    g: &ScenarioGeometry<T>,
    y: T,
    y_prime: T,
    mode: KernelMode,
) -> Complex<T> {
    kernel_kr_on(g, y, y_prime, mode, &g.tx_mesh_default())
}

/// `K_T(η, η′)` integrated over an explicit receive mesh.
pub fn kernel_kt_on<T: Scalar>(
    g: &ScenarioGeometry<T>,
    eta: T,
    eta_prime: T,
    mode: KernelMode,
    rx_mesh: &AntennaMesh<T>,
) -> Complex<T> {
    let kappa = g.wavenumber();
    let mut acc = Complex::new(T::zero(), T::zero());
    match mode {
        KernelMode::Exact => {
            for (&y, &w) in rx_mesh.coordinates().iter().zip(rx_mesh.weights()) {
                let r = g.point_distance(eta, y);
                let rp = g.point_distance(eta_prime, y);
                acc += green_unchecked(r, kappa) * green_unchecked(rp, kappa).conj() * w;
            }
            acc
        }
        KernelMode::AmplitudeApprox => {
            for (&y, &w) in rx_mesh.coordinates().iter().zip(rx_mesh.weights()) {
                let r = g.point_distance(eta, y);
                let rp = g.point_distance(eta_prime, y);
                acc += cis(kappa * (rp - r)) * w;
            }
            let scale = (lit::<T>(4.0) * T::pi() * g.center_distance()).recip();
            acc * (scale * scale)
        }
    }
}

/// Transmit-side coupling kernel `K_T(η, η′)` at the default receive mesh.
pub fn kernel_kt<T: Scalar>(
    g: &ScenarioGeometry<T>,
    eta: T,
    eta_prime: T,
    mode: KernelMode,
) -> Complex<T> {
    kernel_kt_on(g, eta, eta_prime, mode, &g.rx_mesh_default())
}

/// Sum rule `γ_RT = (1/4π)² ∬ 1/r² dη dy` over explicit meshes.
pub fn sum_rule_on<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    rx_mesh: &AntennaMesh<T>,
) -> T {
    let c = (lit::<T>(4.0) * T::pi()).recip();
    let c2 = c * c;
    rx_mesh
        .coordinates()
        .par_iter()
        .zip(rx_mesh.weights().par_iter())
        .map(|(&y, &wy)| {
            let mut acc = T::zero();
            for (&e, &we) in tx_mesh.coordinates().iter().zip(tx_mesh.weights()) {
                let r = g.point_distance(e, y);
                acc += we / (r * r);
            }
            acc * wy
        })
        .reduce(T::zero, |a, b| a + b)
        * c2
}

/// Sum rule at the default meshes. The integrand `1/r²` is smooth, so the
/// default midpoint quadrature is accurate to well below 1e-6 relative.
pub fn sum_rule<T: Scalar>(g: &ScenarioGeometry<T>) -> T {
    sum_rule_on(g, &g.tx_mesh_default(), &g.rx_mesh_default())
}

/// Coupling intensities between two basis families.
///
/// Entry `(m, n)` is `ξ_mn = ∬ ψ_m*(y) G(r) φ_n(η) dη dy`, i.e. the receive
/// member `m` correlated with the propagated transmit member `n`.
#[derive(Clone, Debug)]
pub struct CouplingMatrix<T: Scalar> {
    entries: DMatrix<Complex<T>>,
}

impl<T: Scalar> CouplingMatrix<T> {
    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex<T> {
        self.entries[(m, n)]
    }

    /// Σ |ξ_mn|².
    pub fn total_power(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, v| acc + v.norm_sqr())
    }

    /// Off-diagonal power divided by diagonal power (diagnostic for how
    /// close a basis pair is to the optimal, diagonalizing one).
    pub fn off_diagonal_power_ratio(&self) -> T {
        let mut diag = T::zero();
        let mut off = T::zero();
        for m in 0..self.entries.nrows() {
            for n in 0..self.entries.ncols() {
                let p = self.entries[(m, n)].norm_sqr();
                if m == n {
                    diag += p;
                } else {
                    off += p;
                }
            }
        }
        off / diag
    }
}

/// Compute the coupling matrix of a transmit/receive basis pair by nested
/// quadrature. All transmit members must share one mesh, ditto receive.
pub fn coupling_matrix<T: Scalar>(
    tx_basis: &BasisSet<T>,
    rx_basis: &BasisSet<T>,
    g: &ScenarioGeometry<T>,
) -> Result<CouplingMatrix<T>> {
    let rx_mesh = rx_basis
        .members()
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty receive basis".into()))?
        .mesh()
        .clone();
    let propagated: Result<Vec<SampledProfile<T>>> = tx_basis
        .members()
        .par_iter()
        .map(|p| propagate(p, g, &rx_mesh))
        .collect();
    let propagated = propagated?;
    let m = rx_basis.members().len();
    let n = propagated.len();
    let mut entries = DMatrix::from_element(m, n, Complex::new(T::zero(), T::zero()));
    for (j, field) in propagated.iter().enumerate() {
        for (i, psi) in rx_basis.members().iter().enumerate() {
            entries[(i, j)] = psi.inner(field)?;
        }
    }
    Ok(CouplingMatrix { entries })
}
