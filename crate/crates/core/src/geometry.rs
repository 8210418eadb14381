//! Coordinate conventions and physical constants.
//!
//! Right-handed frame: `x` points forward, `y` to the left, `z` up.
//! Azimuth is measured counterclockwise from `+x` (so `+90°` is left),
//! elevation is positive upwards. Public angles are degrees; radians are
//! used only inside computations.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default speed of sound in m/s.
pub const SPEED_OF_SOUND: f64 = 343.0;

/// Wraps an azimuth into `(-180, 180]`.
pub fn wrap_azimuth(azimuth_deg: f64) -> f64 {
    let mut a = azimuth_deg % 360.0;
    if a <= -180.0 {
        a += 360.0;
    } else if a > 180.0 {
        a -= 360.0;
    }
    a
}

/// Cartesian position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub const ORIGIN: Position3D = Position3D { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Reflection about the median (x-z) plane.
    pub fn mirrored(self) -> Self {
        Self::new(self.x, -self.y, self.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Direction of this vector seen from the origin.
    pub fn direction(self) -> Direction {
        let horizontal = self.x.hypot(self.y);
        Direction::new(
            self.y.atan2(self.x).to_degrees(),
            self.z.atan2(horizontal).to_degrees(),
        )
    }
}

impl Add for Position3D {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Position3D {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Position3D {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Position3D {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Serialize for Position3D {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Position3D {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        let p = Position3D::new(x, y, z);
        if !p.is_finite() {
            return Err(serde::de::Error::custom("position components must be finite"));
        }
        Ok(p)
    }
}

/// A direction given as azimuth and elevation in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction {
    pub azimuth: f64,
    pub elevation: f64,
}

impl Direction {
    /// Builds a normalized direction: azimuth wrapped into `(-180, 180]`,
    /// elevation clamped to `[-90, 90]`.
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Self {
            azimuth: wrap_azimuth(azimuth),
            elevation: elevation.clamp(-90.0, 90.0),
        }
    }

    pub fn horizontal(azimuth: f64) -> Self {
        Self::new(azimuth, 0.0)
    }

    pub fn unit_vector(self) -> Position3D {
        let az = self.azimuth.to_radians();
        let el = self.elevation.to_radians();
        Position3D::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin())
    }

    pub fn mirrored(self) -> Self {
        Self::new(-self.azimuth, self.elevation)
    }

    /// Great-circle angle to another direction, degrees in `[0, 180]`.
    pub fn angle_to(self, other: Direction) -> f64 {
        angle_between(self.unit_vector(), other.unit_vector())
    }
}

#[derive(Deserialize)]
struct RawDirection {
    azimuth: f64,
    #[serde(default)]
    elevation: f64,
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDirection::deserialize(d)?;
        if !raw.azimuth.is_finite() || !raw.elevation.is_finite() {
            return Err(serde::de::Error::custom("direction angles must be finite"));
        }
        Ok(Direction::new(raw.azimuth, raw.elevation))
    }
}

/// Angle in degrees between two (not necessarily unit) vectors.
pub fn angle_between(a: Position3D, b: Position3D) -> f64 {
    // atan2 form stays accurate near 0° and 180°.
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Speed of sound in m/s.
    pub speed_of_sound: f64,
}

impl PhysicalConstants {
    pub fn new(speed_of_sound: f64) -> Result<Self> {
        if !(speed_of_sound.is_finite() && speed_of_sound > 0.0) {
            return Err(Error::InvalidInput(format!(
                "speed of sound must be positive, got {speed_of_sound}"
            )));
        }
        Ok(Self { speed_of_sound })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { speed_of_sound: SPEED_OF_SOUND }
    }
}
