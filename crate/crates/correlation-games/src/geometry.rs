//! Unit directions on the sphere, spherical parameterization, and seeded
//! uniform sampling.
//!
//! A player's move is a [`Direction`]; the shared measurement axis is
//! [`Direction::Z`]. Directions are stored as Cartesian components; the
//! spherical form is a constructor/view only, since dot products dominate
//! usage.

use std::f64::consts::{PI, TAU};
use std::ops::Neg;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm tolerance accepted by [`Direction::new`].
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A unit vector in 3-space; a player's move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    x: f64,
    y: f64,
    z: f64,
}

impl Direction {
    /// The shared measurement axis.
    pub const Z: Direction = Direction {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Builds a direction from Cartesian components, rejecting vectors with
    /// `|x^2 + y^2 + z^2 - 1| > 1e-12`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm_sq = x * x + y * y + z * z;
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitVector { x, y, z, norm_sq });
        }
        Ok(Self { x, y, z })
    }

    /// Builds the direction `(sin t cos f, sin t sin f, cos t)`.
    pub fn from_spherical(angles: SphericalAngles) -> Self {
        let (st, ct) = angles.theta.sin_cos();
        let (sf, cf) = angles.phi.sin_cos();
        Self {
            x: st * cf,
            y: st * sf,
            z: ct,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Spherical view of this direction. At the poles `phi` is reported as 0.
    pub fn spherical(&self) -> SphericalAngles {
        let planar = self.x * self.x + self.y * self.y;
        let theta = planar.sqrt().atan2(self.z);
        let mut phi = if planar == 0.0 {
            0.0
        } else {
            self.y.atan2(self.x)
        };
        if phi < 0.0 {
            phi += TAU;
        }
        if phi >= TAU {
            phi = 0.0;
        }
        SphericalAngles {
            theta: theta.clamp(0.0, PI),
            phi,
        }
    }

    /// Rotates this direction by `angle` about the shared z-axis.
    pub fn rotated_about_z(&self, angle: f64) -> Direction {
        let (s, c) = angle.sin_cos();
        let out = Direction {
            x: self.x * c - self.y * s,
            y: self.x * s + self.y * c,
            z: self.z,
        };
        out.renormalized()
    }

    /// Rescales to unit norm, absorbing rounding from arithmetic on
    /// components.
    pub(crate) fn renormalized(&self) -> Direction {
        let norm = self.dot(self).sqrt();
        Direction {
            x: self.x / norm,
            y: self.y / norm,
            z: self.z / norm,
        }
    }
}

impl Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        Direction {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Polar angle in `[0, pi]` and azimuthal angle in `[0, 2*pi)`, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalAngles {
    theta: f64,
    phi: f64,
}

impl SphericalAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&phi) {
            return Err(Error::AnglesOutOfRange { theta, phi });
        }
        Ok(Self { theta, phi })
    }

    /// Accepts `theta` in `[0, 180]` and `phi` in `[0, 360)` degrees.
    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta_degrees(&self) -> f64 {
        self.theta.to_degrees()
    }

    pub fn phi_degrees(&self) -> f64 {
        self.phi.to_degrees()
    }
}

/// Angle between two unit vectors, in `[0, pi]`.
///
/// Computed as `atan2(|a x b|, a . b)`, which equals `arccos` of the clamped
/// dot product but stays accurate near parallel and antiparallel pairs.
pub fn angle_between(a: &Direction, b: &Direction) -> f64 {
    let cx = a.y * b.z - a.z * b.y;
    let cy = a.z * b.x - a.x * b.z;
    let cz = a.x * b.y - a.y * b.x;
    let cross = (cx * cx + cy * cy + cz * cz).sqrt();
    cross.atan2(a.dot(b))
}

/// Draws a direction uniformly distributed on the unit sphere.
///
/// Uses the exact construction: `z` uniform on `[-1, 1]`, azimuth uniform on
/// `[0, 2*pi)`. Deterministic for a fixed generator state.
pub fn sample_uniform_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    Direction {
        x: r * c,
        y: r * s,
        z,
    }
}
