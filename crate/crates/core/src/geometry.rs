//! Scenario description, coordinate conventions, distances, mesh construction.
//!
//! The transmit aperture occupies `η ∈ [−L_T/2, L_T/2]` along an axis rotated
//! counterclockwise by `θ` from the y-axis; the receive aperture occupies
//! `y ∈ [y_c − L_R/2, y_c + L_R/2]` on the y-axis at horizontal distance `z`.
//! The distance between transmit point `η` and receive point `y` is
//!
//! ```text
//! r = sqrt((z + η sinθ)² + (y − η cosθ)²)
//! ```
//!
//! and the center-to-center distance is `d_c = sqrt(z² + y_c²)`.
//!
//! Apertures are discretized with uniform midpoint-rule meshes: the integrands
//! are smooth oscillatory phasors, so the midpoint rule with spacing ≤ λ/8
//! (default; λ/4 is the hard invariant) keeps the phase error per cell small.

use crate::{lit, Error, Result, Scalar, SPEED_OF_LIGHT};

/// Which aperture a mesh discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Side {
    Tx,
    Rx,
}

/// Full 2D link description.
///
/// Immutable after construction; all accessors are pure.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioGeometry<T> {
    tx_length: T,
    rx_length: T,
    rx_center_offset: T,
    tx_rotation: T,
    distance: T,
    frequency: T,
}

impl<T: Scalar> ScenarioGeometry<T> {
    /// Validate and build a scenario.
    ///
    /// # Arguments
    /// * `tx_length` — transmit aperture length `L_T` > 0, meters.
    /// * `rx_length` — receive aperture length `L_R` > 0, meters.
    /// * `rx_center_offset` — receive center `y_c`, meters.
    /// * `tx_rotation` — `θ` in radians, counterclockwise positive,
    ///   `θ ∈ (−π/2, π/2]`. Closed-form counters additionally require
    ///   `θ ∈ [0, π/2]`; mirror the geometry first for negative angles
    ///   (see [`Self::mirrored`]).
    /// * `distance` — horizontal separation `z` > 0, meters. Must satisfy
    ///   `z ≥ 5λ` (the scalar model excludes the reactive near field) and
    ///   keep the segments from touching.
    /// * `frequency` — carrier `f0` > 0, hertz.
    pub fn new(
        tx_length: T,
        rx_length: T,
        rx_center_offset: T,
        tx_rotation: T,
        distance: T,
        frequency: T,
    ) -> Result<Self> {
        let pos = |v: T, name: &str| -> Result<()> {
            if !(v > T::zero()) {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
            Ok(())
        };
        pos(tx_length, "tx_length")?;
        pos(rx_length, "rx_length")?;
        pos(distance, "distance")?;
        pos(frequency, "frequency")?;
        let half_pi = T::frac_pi_2();
        if !(tx_rotation > -half_pi && tx_rotation <= half_pi) {
            return Err(Error::InvalidGeometry(format!(
                "tx_rotation must lie in (-pi/2, pi/2], got {tx_rotation}"
            )));
        }
        let g = Self {
            tx_length,
            rx_length,
            rx_center_offset,
            tx_rotation,
            distance,
            frequency,
        };
        let min_z = lit::<T>(5.0) * g.wavelength();
        if distance < min_z {
            return Err(Error::InvalidGeometry(format!(
                "distance {distance} is below 5 wavelengths ({min_z}); the scalar \
                 Green-function model excludes the reactive near field"
            )));
        }
        // The transmit segment reaches x = −(L_T/2)·|sinθ| at worst; keep it
        // strictly left of the receive plane so every pairwise distance is
        // positive.
        let reach = tx_length / lit::<T>(2.0) * tx_rotation.sin().abs();
        if distance <= reach {
            return Err(Error::InvalidGeometry(format!(
                "rotated transmit segment reaches the receive plane \
                 (z = {distance} ≤ (L_T/2)|sinθ| = {reach})"
            )));
        }
        Ok(g)
    }

    pub fn tx_length(&self) -> T {
        self.tx_length
    }
    pub fn rx_length(&self) -> T {
        self.rx_length
    }
    pub fn rx_center_offset(&self) -> T {
        self.rx_center_offset
    }
    pub fn tx_rotation(&self) -> T {
        self.tx_rotation
    }
    pub fn distance(&self) -> T {
        self.distance
    }
    pub fn frequency(&self) -> T {
        self.frequency
    }

    /// Wavelength λ = c/f0, meters.
    pub fn wavelength(&self) -> T {
        lit::<T>(SPEED_OF_LIGHT) / self.frequency
    }

    /// Wavenumber κ = 2π/λ, rad/m.
    pub fn wavenumber(&self) -> T {
        T::two_pi() / self.wavelength()
    }

    /// Center-to-center distance d_c = sqrt(z² + y_c²).
    pub fn center_distance(&self) -> T {
        self.distance.hypot(self.rx_center_offset)
    }

    /// Distance between transmit point `η` and receive point `y`,
    /// `r = sqrt((z + η sinθ)² + (y − η cosθ)²)`, evaluated exactly as
    /// written.
    pub fn point_distance(&self, eta: T, y: T) -> T {
        let a = self.distance + eta * self.tx_rotation.sin();
        let b = y - eta * self.tx_rotation.cos();
        (a * a + b * b).sqrt()
    }

    /// Default mesh spacing for an aperture of the given length:
    /// `min(λ/8, length/64)`, so short apertures still get ≥ 64 samples.
    pub fn default_spacing(&self, length: T) -> T {
        let l8 = self.wavelength() / lit::<T>(8.0);
        let l64 = length / lit::<T>(64.0);
        if l8 < l64 {
            l8
        } else {
            l64
        }
    }

    /// Transmit mesh at the default spacing.
    pub fn tx_mesh_default(&self) -> AntennaMesh<T> {
        self.tx_mesh(self.default_spacing(self.tx_length))
            .expect("default spacing is positive")
    }

    /// Receive mesh at the default spacing (shifted to `y_c`).
    pub fn rx_mesh_default(&self) -> AntennaMesh<T> {
        self.rx_mesh(self.default_spacing(self.rx_length))
            .expect("default spacing is positive")
    }

    /// Transmit mesh at an explicit maximum spacing.
    pub fn tx_mesh(&self, max_spacing: T) -> Result<AntennaMesh<T>> {
        let mut m = build_mesh(self.tx_length, max_spacing)?;
        m.label = Side::Tx;
        Ok(m)
    }

    /// Receive mesh at an explicit maximum spacing, shifted to `y_c`.
    pub fn rx_mesh(&self, max_spacing: T) -> Result<AntennaMesh<T>> {
        let mut m = build_mesh(self.rx_length, max_spacing)?.shifted(self.rx_center_offset);
        m.label = Side::Rx;
        Ok(m)
    }

    /// Mirror the scenario through the z-axis (`y → −y`): flips the signs of
    /// `θ` and `y_c`. Pairwise distances are preserved, so counters needing
    /// `θ ∈ [0, π/2]` can be fed a mirrored negative-`θ` scenario.
    pub fn mirrored(&self) -> Self {
        Self {
            tx_rotation: -self.tx_rotation,
            rx_center_offset: -self.rx_center_offset,
            ..self.clone()
        }
    }
}

/// Uniform midpoint-rule discretization of an aperture segment.
///
/// Coordinates are sample positions along the antenna's own axis (`η` for the
/// transmitter, `y` for the receiver); weights are the quadrature weights
/// (all equal to the spacing). Σ weights = aperture length.
#[derive(Clone, Debug, PartialEq)]
pub struct AntennaMesh<T> {
    coordinates: Vec<T>,
    weights: Vec<T>,
    spacing: T,
    label: Side,
}

impl<T: Scalar> AntennaMesh<T> {
    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    pub fn coordinates(&self) -> &[T] {
        &self.coordinates
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Uniform sample spacing.
    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn label(&self) -> Side {
        self.label
    }

    /// Σ weights (= covered length).
    pub fn total_weight(&self) -> T {
        self.weights.iter().fold(T::zero(), |acc, &w| acc + w)
    }

    /// Translate every coordinate by `dy`.
    pub fn shifted(mut self, dy: T) -> Self {
        for c in &mut self.coordinates {
            *c += dy;
        }
        self
    }

    pub(crate) fn with_label(mut self, label: Side) -> Self {
        self.label = label;
        self
    }
}

/// Build a midpoint-rule mesh covering `[−length/2, length/2]` with uniform
/// spacing ≤ `max_spacing`. The sample count is `ceil(length/max_spacing)`
/// and every weight equals the realized spacing.
pub fn build_mesh<T: Scalar>(length: T, max_spacing: T) -> Result<AntennaMesh<T>> {
    if !(length > T::zero()) {
        return Err(Error::InvalidMesh(format!(
            "length must be > 0, got {length}"
        )));
    }
    if !(max_spacing > T::zero()) {
        return Err(Error::InvalidMesh(format!(
            "max_spacing must be > 0, got {max_spacing}"
        )));
    }
    let n_real = (length / max_spacing).ceil();
    let n = num_traits::ToPrimitive::to_usize(&n_real)
        .ok_or_else(|| Error::InvalidMesh("mesh size overflows usize".into()))?
        .max(1);
    let h = length / lit::<T>(n as f64);
    let half = length / lit::<T>(2.0);
    let coordinates: Vec<T> = (0..n)
        .map(|k| (lit::<T>(k as f64) + lit::<T>(0.5)) * h - half)
        .collect();
    let weights = vec![h; n];
    Ok(AntennaMesh {
        coordinates,
        weights,
        spacing: h,
        label: Side::Tx,
    })
}
