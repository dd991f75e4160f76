//! Transmit/receive basis construction.
//!
//! The general recipe: a transmit *focusing function*
//!
//! ```text
//! F_T(η)|_{y′} = rect(η/L_T) · e^{+jκ r(η, y′)} / √L_T
//! ```
//!
//! concentrates the received field around `y′`. Starting from the receive
//! center `y_c`, new foci are placed at the nulls (or local minima) of the
//! receive kernel `|K_R(y, y_c)|`, sweeping outward in both directions until
//! the receive segment ends; focusing at a null of the kernel makes the new
//! beam nearly orthogonal to the center one. Two closed-form regimes are also
//! provided:
//!
//! * small transmitter (first-order Maclaurin of `r`): phase-linear steering
//!   members `e^{+jκηρ_n}/√L_T` with `ρ_n = ρ_c + nλ/L_T`, receive members
//!   `∝ sinc((L_T/λ)(ρ(y) − ρ_n))`, where `ρ(y)` is the directional cosine
//!   `(z sinθ − y cosθ)/√(z²+y²)`;
//! * Fresnel regime (broadside, centered): quadratic-plus-linear phase
//!   members `e^{jπη²/(λz)} e^{−j2πnη/L_T}/√L_T` with foci `y_n = nλz/L_T`.

use crate::em::{kernel_kr_on, propagate, KernelMode, SampledProfile};
use crate::geometry::{AntennaMesh, ScenarioGeometry, Side};
use crate::{as_f64, cis, lit, Error, Result, Scalar};
use nalgebra::Normed;
use num_complex::Complex;
use rayon::prelude::*;

/// How a profile's phase law was generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ProfileKind {
    /// Linear phase, beam toward a fixed direction.
    Steering,
    /// Exact spherical phase toward a focal point.
    Focusing,
    /// Quadratic-plus-linear (Fresnel) phase toward a focal point.
    FresnelFocusing,
}

/// What a basis member points at: a focal point on the receive axis, or a
/// steering direction.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub enum Focus<T> {
    /// Focal point, meters on the receive axis.
    Point(T),
    /// Steering angle, radians off broadside.
    Angle(T),
}

impl<T: Copy> Focus<T> {
    /// The raw coordinate or angle.
    pub fn value(&self) -> T {
        match *self {
            Focus::Point(v) | Focus::Angle(v) => v,
        }
    }
}

/// A single transmit profile with its focal point (or direction) and kind.
///
/// Values are phase-only with constant magnitude `1/√L_T`, so the profile has
/// unit weighted norm on its mesh.
#[derive(Clone, Debug)]
pub struct FocusingProfile<T: Scalar> {
    focus: Focus<T>,
    kind: ProfileKind,
    profile: SampledProfile<T>,
}

impl<T: Scalar> FocusingProfile<T> {
    pub fn focus(&self) -> Focus<T> {
        self.focus
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn profile(&self) -> &SampledProfile<T> {
        &self.profile
    }

    pub fn into_profile(self) -> SampledProfile<T> {
        self.profile
    }
}

/// An ordered family of unit-norm profiles on one side of the link.
#[derive(Clone, Debug)]
pub struct BasisSet<T: Scalar> {
    members: Vec<SampledProfile<T>>,
    foci: Vec<Focus<T>>,
    side: Side,
    gram_worst_db: Option<T>,
    warnings: Vec<String>,
}

impl<T: Scalar> BasisSet<T> {
    /// Build a set from members and their foci, validating unit norms and a
    /// shared mesh, and measuring the worst-case pairwise cross-correlation.
    pub fn new(members: Vec<SampledProfile<T>>, foci: Vec<Focus<T>>, side: Side) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("empty basis".into()));
        }
        if !foci.is_empty() && foci.len() != members.len() {
            return Err(Error::InvalidArgument(format!(
                "{} foci for {} members",
                foci.len(),
                members.len()
            )));
        }
        let mesh = members[0].mesh();
        for (i, m) in members.iter().enumerate() {
            if m.mesh() != mesh {
                return Err(Error::InvalidMesh(format!(
                    "member {i} is sampled on a different mesh"
                )));
            }
            let dev = (m.norm() - T::one()).abs();
            if dev > lit::<T>(1e-10) {
                return Err(Error::InvalidArgument(format!(
                    "member {i} is not unit-norm (|‖·‖−1| = {dev})"
                )));
            }
        }
        let gram_worst_db = measured_gram_worst_db(&members);
        Ok(Self {
            members,
            foci,
            side,
            gram_worst_db,
            warnings: Vec::new(),
        })
    }

    /// Build a set without focal metadata (e.g. SVD mode vectors).
    pub fn from_members(members: Vec<SampledProfile<T>>, side: Side) -> Result<Self> {
        Self::new(members, Vec::new(), side)
    }

    fn with_warnings(mut self, warnings: Vec<String>) -> Self {
        self.warnings = warnings;
        self
    }

    pub fn members(&self) -> &[SampledProfile<T>] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &SampledProfile<T> {
        &self.members[i]
    }

    /// Focal points / angles, aligned with `members`; empty when the members
    /// carry no focal metadata.
    pub fn foci(&self) -> &[Focus<T>] {
        &self.foci
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Measured max over distinct pairs of `20·log10|⟨f_m, f_n⟩|`;
    /// `None` for a single-member set.
    pub fn gram_worst_db(&self) -> Option<T> {
        self.gram_worst_db
    }

    /// Validity notes attached during construction (approximation regimes).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn measured_gram_worst_db<T: Scalar>(members: &[SampledProfile<T>]) -> Option<T> {
    if members.len() < 2 {
        return None;
    }
    let pairs: Vec<(usize, usize)> = (0..members.len())
        .flat_map(|i| (i + 1..members.len()).map(move |j| (i, j)))
        .collect();
    let worst = pairs
        .par_iter()
        .map(|&(i, j)| members[i].inner(&members[j]).expect("shared mesh").norm())
        .reduce(T::zero, |a, b| if a > b { a } else { b });
    Some(if worst > T::zero() {
        lit::<T>(20.0) * worst.log10()
    } else {
        lit::<T>(f64::NEG_INFINITY)
    })
}

/// Phase-linear profile steering a beam `φ_angle` off broadside:
/// `e^{−jκη sinφ}/√L_T`. Rejects `|φ_angle| > π/2`.
pub fn steering_profile<T: Scalar>(
    phi_angle: T,
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
) -> Result<FocusingProfile<T>> {
    if phi_angle.abs() > T::frac_pi_2() {
        return Err(Error::InvalidArgument(format!(
            "steering angle {phi_angle} outside [−π/2, π/2]"
        )));
    }
    let kappa = g.wavenumber();
    let s = phi_angle.sin();
    let amp = g.tx_length().sqrt().recip();
    let profile = SampledProfile::from_fn(tx_mesh.clone(), |e| cis(-kappa * e * s) * amp);
    Ok(FocusingProfile {
        focus: Focus::Angle(phi_angle),
        kind: ProfileKind::Steering,
        profile,
    })
}

/// Focusing profile toward the receive-axis point `y_focus`:
/// `e^{+jκ r(η, y_focus)}/√L_T`.
pub fn focusing_profile<T: Scalar>(
    y_focus: T,
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
) -> FocusingProfile<T> {
    let kappa = g.wavenumber();
    let amp = g.tx_length().sqrt().recip();
    let profile = SampledProfile::from_fn(tx_mesh.clone(), |e| {
        cis(kappa * g.point_distance(e, y_focus)) * amp
    });
    FocusingProfile {
        focus: Focus::Point(y_focus),
        kind: ProfileKind::Focusing,
        profile,
    }
}

/// Coarsest search step that still resolves the expected null spacing:
/// one twentieth of the kernel lobe width `λ·d_c/L_T`.
pub fn default_search_resolution<T: Scalar>(g: &ScenarioGeometry<T>) -> T {
    g.wavelength() * g.center_distance() / g.tx_length() / lit::<T>(20.0)
}

/// Iterated three-point refinement of a one-dimensional minimum.
///
/// Fits a parabola to `ln f` at `c−h, c, c+h`, moves to the best of the three
/// samples and the clamped parabola vertex, halves `h`, and repeats until `h`
/// drops below `tol`. Log-magnitude fitting makes near-zero kernel nulls
/// quadratic again, so the vertex lands on machine-precision nulls.
fn refine_log_parabolic<T: Scalar>(f: impl Fn(T) -> T, mut c: T, mut h: T, tol: T) -> T {
    let safe_ln = |v: T| {
        if v > T::zero() {
            v.ln()
        } else {
            lit::<T>(-745.0)
        }
    };
    let mut fc = f(c);
    let mut iterations = 0usize;
    while h > tol && iterations < 80 {
        let (xl, xr) = (c - h, c + h);
        let (fl, fr) = (f(xl), f(xr));
        let (l0, l1, l2) = (safe_ln(fl), safe_ln(fc), safe_ln(fr));
        let den = l0 - l1 - l1 + l2;
        let mut d = T::zero();
        if den > T::zero() {
            d = (l0 - l2) / (den + den);
            if d > T::one() {
                d = T::one();
            } else if d < -T::one() {
                d = -T::one();
            }
        }
        let xv = c + d * h;
        let fv = f(xv);
        if fl < fc {
            c = xl;
            fc = fl;
        }
        if fr < fc {
            c = xr;
            fc = fr;
        }
        if fv < fc {
            c = xv;
            fc = fv;
        }
        h *= lit::<T>(0.5);
        iterations += 1;
    }
    c
}

/// Focal points for a focusing basis: `y_c` plus every local minimum of the
/// amplitude-approximate `|K_R(y, y_c)|` strictly inside the receive segment,
/// sorted ascending.
pub fn find_orthogonal_foci<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    search_resolution: T,
) -> Result<Vec<T>> {
    find_orthogonal_foci_mode(g, tx_mesh, search_resolution, KernelMode::AmplitudeApprox)
}

/// As [`find_orthogonal_foci`], with an explicit kernel mode.
pub fn find_orthogonal_foci_mode<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    search_resolution: T,
    mode: KernelMode,
) -> Result<Vec<T>> {
    if !(search_resolution > T::zero()) {
        return Err(Error::InvalidArgument(
            "search resolution must be positive".into(),
        ));
    }
    let coarsest = default_search_resolution(g);
    if search_resolution > coarsest * (T::one() + lit::<T>(1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "search resolution {search_resolution} too coarse: needs ≤ (λ·d_c/L_T)/20 = {coarsest}"
        )));
    }
    let yc = g.rx_center_offset();
    let half = g.rx_length() / lit::<T>(2.0);
    let (lo, hi) = (yc - half, yc + half);
    let cells = as_f64((hi - lo) / search_resolution).ceil().max(1.0) as usize;
    let step = (hi - lo) / lit::<T>(cells as f64);
    let kernel_mag = |y: T| kernel_kr_on(g, y, yc, mode, tx_mesh).norm();
    let magnitudes: Vec<T> = (0..=cells)
        .into_par_iter()
        .map(|i| kernel_mag(lo + step * lit::<T>(i as f64)))
        .collect();
    let tol = lit::<T>(1e-13) * g.center_distance().max(T::one());
    let mut foci: Vec<T> = (1..cells)
        .filter(|&i| magnitudes[i] < magnitudes[i - 1] && magnitudes[i] < magnitudes[i + 1])
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i| refine_log_parabolic(kernel_mag, lo + step * lit::<T>(i as f64), step, tol))
        .filter(|&y| y > lo && y < hi)
        .collect();
    foci.push(yc);
    foci.sort_by(|a, b| a.partial_cmp(b).expect("finite focus"));
    Ok(foci)
}

/// Focusing basis pair: transmit members are focusing profiles at the kernel
/// nulls, receive members their propagated fields, unit-normalized.
pub fn focusing_basis<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    rx_mesh: &AntennaMesh<T>,
) -> Result<(BasisSet<T>, BasisSet<T>)> {
    let foci = find_orthogonal_foci(g, tx_mesh, default_search_resolution(g))?;
    let tx_members: Vec<SampledProfile<T>> = foci
        .iter()
        .map(|&y| focusing_profile(y, g, tx_mesh).into_profile())
        .collect();
    let rx_members: Result<Vec<SampledProfile<T>>> = tx_members
        .par_iter()
        .map(|m| propagate(m, g, rx_mesh)?.normalized())
        .collect();
    let focus_tags: Vec<Focus<T>> = foci.iter().map(|&y| Focus::Point(y)).collect();
    let tx = BasisSet::new(tx_members, focus_tags.clone(), Side::Tx)?;
    let rx = BasisSet::new(rx_members?, focus_tags, Side::Rx)?;
    Ok((tx, rx))
}

/// Directional cosine of the receive point `y` seen from the rotated
/// transmitter: `ρ(y) = (z sinθ − y cosθ)/√(z²+y²)`.
pub fn directional_cosine<T: Scalar>(g: &ScenarioGeometry<T>, y: T) -> T {
    let z = g.distance();
    let (s, c) = (g.tx_rotation().sin(), g.tx_rotation().cos());
    (z * s - y * c) / (z * z + y * y).sqrt()
}

/// Small-transmitter foci with their index set.
#[derive(Clone, Debug)]
pub struct SisFoci<T> {
    /// Basis indices `n`, aligned with `foci` (ascending focus order).
    pub indices: Vec<i64>,
    /// Focal points on the receive axis, ascending; `n = 0` sits at `y_c`.
    pub foci: Vec<T>,
    /// Directional cosine of the receive center.
    pub rho_c: T,
}

/// Closed-form foci of the small-transmitter (uplink) basis:
/// `y_n = z·tan(arcsin(−ρ_c − nλ/L_T) + θ)` for every integer `n` with
/// `|ρ_c + nλ/L_T| ≤ 1`, keeping forward beams that land strictly inside the
/// receive segment.
pub fn sis_uplink_foci<T: Scalar>(g: &ScenarioGeometry<T>) -> SisFoci<T> {
    let rho_c = directional_cosine(g, g.rx_center_offset());
    let step = g.wavelength() / g.tx_length();
    let n_lo = as_f64((-T::one() - rho_c) / step).ceil() as i64;
    let n_hi = as_f64((T::one() - rho_c) / step).floor() as i64;
    let theta = g.tx_rotation();
    let z = g.distance();
    let half = g.rx_length() / lit::<T>(2.0);
    let (lo, hi) = (g.rx_center_offset() - half, g.rx_center_offset() + half);
    let mut hits: Vec<(i64, T)> = Vec::new();
    for n in n_lo..=n_hi {
        let rho_n = rho_c + step * lit::<T>(n as f64);
        let u = (-rho_n).clamp(-T::one(), T::one());
        // Beam elevation off the z-axis; discard backward directions, whose
        // tangent would alias into the receive segment from behind.
        let beta = u.asin() + theta;
        if beta <= -T::frac_pi_2() || beta >= T::frac_pi_2() {
            continue;
        }
        let y = z * beta.tan();
        if y > lo && y < hi {
            hits.push((n, y));
        }
    }
    hits.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite focus"));
    SisFoci {
        indices: hits.iter().map(|&(n, _)| n).collect(),
        foci: hits.iter().map(|&(_, y)| y).collect(),
        rho_c,
    }
}

/// Peak phase, in radians, of the second-order Maclaurin term dropped by the
/// small-transmitter closed forms: `κ L_T² (1−ρ_c²)/(8 d_c)`.
pub fn maclaurin_phase_error<T: Scalar>(g: &ScenarioGeometry<T>) -> T {
    let rho_c = directional_cosine(g, g.rx_center_offset());
    let lt = g.tx_length();
    g.wavenumber() * lt * lt * (T::one() - rho_c * rho_c) / (lit::<T>(8.0) * g.center_distance())
}

fn maclaurin_warning<T: Scalar>(g: &ScenarioGeometry<T>) -> Vec<String> {
    let err = maclaurin_phase_error(g);
    if err > T::frac_pi_8() {
        vec![format!(
            "small-transmitter closed form drops a quadratic phase term reaching \
             {err} rad (> π/8); members are built anyway but lose orthogonality"
        )]
    } else {
        Vec::new()
    }
}

/// Closed-form small-transmitter basis pair: phase-linear transmit members
/// `e^{+jκηρ_n}/√L_T` and receive members `∝ sinc((L_T/λ)(ρ(y) − ρ_n))`,
/// unit-normalized on the receive mesh.
pub fn sis_uplink_bases<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    rx_mesh: &AntennaMesh<T>,
) -> Result<(BasisSet<T>, BasisSet<T>)> {
    let sis = sis_uplink_foci(g);
    let kappa = g.wavenumber();
    let amp = g.tx_length().sqrt().recip();
    let step = g.wavelength() / g.tx_length();
    let lt_over_lambda = g.tx_length() / g.wavelength();
    let mut tx_members = Vec::with_capacity(sis.indices.len());
    let mut rx_members = Vec::with_capacity(sis.indices.len());
    for &n in &sis.indices {
        let rho_n = sis.rho_c + step * lit::<T>(n as f64);
        tx_members.push(SampledProfile::from_fn(tx_mesh.clone(), |e| {
            cis(kappa * e * rho_n) * amp
        }));
        let rx = SampledProfile::from_fn(rx_mesh.clone(), |y| {
            Complex::new(
                sinc(lt_over_lambda * (directional_cosine(g, y) - rho_n)),
                T::zero(),
            )
        });
        rx_members.push(rx.normalized()?);
    }
    let focus_tags: Vec<Focus<T>> = sis.foci.iter().map(|&y| Focus::Point(y)).collect();
    let warnings = maclaurin_warning(g);
    let tx =
        BasisSet::new(tx_members, focus_tags.clone(), Side::Tx)?.with_warnings(warnings.clone());
    let rx = BasisSet::new(rx_members, focus_tags, Side::Rx)?.with_warnings(warnings);
    Ok((tx, rx))
}

/// `sin(πx)/(πx)`.
fn sinc<T: Scalar>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        let p = T::pi() * x;
        p.sin() / p
    }
}

/// Closed-form Fresnel (downlink) basis pair for a broadside, centered link:
/// transmit members `e^{jπη²/(λz)} e^{−j2πnη/L_T}/√L_T` focused at
/// `y_n = nλz/L_T`, receive members `∝ sinc((L_T/(λz))y − n)`. Only foci
/// strictly inside the receive segment are kept.
pub fn fresnel_downlink_bases<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    rx_mesh: &AntennaMesh<T>,
) -> Result<(BasisSet<T>, BasisSet<T>)> {
    if g.tx_rotation() != T::zero() || g.rx_center_offset() != T::zero() {
        return Err(Error::Unsupported(
            "the Fresnel closed form requires θ = 0 and y_c = 0; use focusing_basis".into(),
        ));
    }
    let lam = g.wavelength();
    let z = g.distance();
    let lt = g.tx_length();
    let spacing = lam * z / lt;
    let mut n_max = as_f64(g.rx_length() / (lit::<T>(2.0) * spacing)).floor() as i64;
    // Strict membership: a focus exactly on ±L_R/2 is excluded.
    while n_max > 0 && !(spacing * lit::<T>(n_max as f64) < g.rx_length() / lit::<T>(2.0)) {
        n_max -= 1;
    }
    let amp = lt.sqrt().recip();
    let quad = T::pi() / (lam * z);
    let lin = lit::<T>(2.0) * T::pi() / lt;
    let rx_scale = lt / (lam * z);
    let mut tx_members = Vec::new();
    let mut rx_members = Vec::new();
    let mut foci = Vec::new();
    for n in -n_max..=n_max {
        let nf = lit::<T>(n as f64);
        tx_members.push(SampledProfile::from_fn(tx_mesh.clone(), |e| {
            cis(quad * e * e - lin * nf * e) * amp
        }));
        let rx = SampledProfile::from_fn(rx_mesh.clone(), |y| {
            Complex::new(sinc(rx_scale * y - nf), T::zero())
        });
        rx_members.push(rx.normalized()?);
        foci.push(Focus::Point(spacing * nf));
    }
    let warnings = fresnel_phase_warning(g, tx_mesh, n_max, spacing);
    let tx = BasisSet::new(tx_members, foci.clone(), Side::Tx)?.with_warnings(warnings.clone());
    let rx = BasisSet::new(rx_members, foci, Side::Rx)?.with_warnings(warnings);
    Ok((tx, rx))
}

/// Compare the extreme Fresnel member's phase against the exact focusing
/// phase toward the same focus; warn when they differ by more than π/8 after
/// removing the best global phase.
fn fresnel_phase_warning<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
    n_max: i64,
    spacing: T,
) -> Vec<String> {
    let kappa = g.wavenumber();
    let lam = g.wavelength();
    let z = g.distance();
    let y_focus = spacing * lit::<T>(n_max as f64);
    let quad = T::pi() / (lam * z);
    let lin = lit::<T>(2.0) * T::pi() / g.tx_length() * lit::<T>(n_max as f64);
    let mut min_res = T::zero();
    let mut max_res = T::zero();
    for (i, &e) in tx_mesh.coordinates().iter().enumerate() {
        let res = kappa * g.point_distance(e, y_focus) - (quad * e * e - lin * e);
        if i == 0 {
            min_res = res;
            max_res = res;
        } else {
            min_res = min_res.min(res);
            max_res = max_res.max(res);
        }
    }
    let err = (max_res - min_res) / lit::<T>(2.0);
    if err > T::frac_pi_8() {
        vec![format!(
            "Fresnel phase law deviates from exact focusing by up to {err} rad \
             (> π/8) at the outermost focus"
        )]
    } else {
        Vec::new()
    }
}

/// Orthogonal steering family covering the forward hemisphere:
/// `sinφ_n = nλ/L_T` for all integers with `|sinφ_n| ≤ 1`.
pub fn hemisphere_steering_basis<T: Scalar>(
    g: &ScenarioGeometry<T>,
    tx_mesh: &AntennaMesh<T>,
) -> Result<BasisSet<T>> {
    let per = g.tx_length() / g.wavelength();
    let n_max = as_f64(per).floor() as i64;
    let mut members = Vec::new();
    let mut foci = Vec::new();
    for n in -n_max..=n_max {
        let s = (lit::<T>(n as f64) / per).clamp(-T::one(), T::one());
        let angle = s.asin();
        members.push(steering_profile(angle, g, tx_mesh)?.into_profile());
        foci.push(Focus::Angle(angle));
    }
    BasisSet::new(members, foci, Side::Tx)
}
