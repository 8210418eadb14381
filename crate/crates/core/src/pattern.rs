//! First-order microphone directivity, `g(θ) = a + (1 − a)·cos θ`.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// A first-order polar pattern identified by its omni coefficient `a`.
///
/// `a = 1` is omnidirectional, `a = 0` a figure-of-eight. The wide
/// (hypo-) cardioid used throughout the array design is `a = 2/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarPattern {
    omni_coefficient: f64,
}

impl PolarPattern {
    pub const OMNI: PolarPattern = PolarPattern { omni_coefficient: 1.0 };
    pub const WIDE_CARDIOID: PolarPattern = PolarPattern { omni_coefficient: 2.0 / 3.0 };
    pub const CARDIOID: PolarPattern = PolarPattern { omni_coefficient: 0.5 };
    pub const SUPERCARDIOID: PolarPattern = PolarPattern { omni_coefficient: 0.366 };
    pub const HYPERCARDIOID: PolarPattern = PolarPattern { omni_coefficient: 0.25 };
    pub const FIGURE_EIGHT: PolarPattern = PolarPattern { omni_coefficient: 0.0 };

    /// Named patterns accepted on input. Separators and case are ignored.
    pub const NAMED: [(&'static str, PolarPattern); 9] = [
        ("omni", Self::OMNI),
        ("widecardioid", Self::WIDE_CARDIOID),
        ("cardioid", Self::CARDIOID),
        ("supercardioid", Self::SUPERCARDIOID),
        ("hypercardioid", Self::HYPERCARDIOID),
        ("figure8", Self::FIGURE_EIGHT),
        ("figureeight", Self::FIGURE_EIGHT),
        ("figureofeight", Self::FIGURE_EIGHT),
        ("bidirectional", Self::FIGURE_EIGHT),
    ];

    pub fn new(omni_coefficient: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&omni_coefficient) {
            return Err(Error::InvalidInput(format!(
                "omni coefficient must lie in [0, 1], got {omni_coefficient}"
            )));
        }
        Ok(Self { omni_coefficient })
    }

    pub fn from_name(name: &str) -> Result<Self> {
        let key = name.trim().to_ascii_lowercase().replace(['-', '_', ' '], "");
        Self::NAMED
            .iter()
            .find(|(n, _)| *n == key)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::InvalidInput(format!("unknown polar pattern '{name}'")))
    }

    /// Parses either a pattern name or a bare omni coefficient.
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().parse::<f64>() {
            Ok(a) => Self::new(a),
            Err(_) => Self::from_name(text),
        }
    }

    pub fn omni_coefficient(self) -> f64 {
        self.omni_coefficient
    }

    /// Gain at `off_axis_deg` from the main axis. Unity on axis.
    pub fn gain(self, off_axis_deg: f64) -> f64 {
        self.gain_from_cos(off_axis_deg.to_radians().cos())
    }

    /// Gain for a known cosine of the off-axis angle.
    pub fn gain_from_cos(self, cos_theta: f64) -> f64 {
        let a = self.omni_coefficient;
        a + (1.0 - a) * cos_theta
    }

    /// Gain at 180°, `2a − 1`.
    pub fn rear_gain(self) -> f64 {
        2.0 * self.omni_coefficient - 1.0
    }

    /// Largest attenuation (dB, relative to on-axis) this pattern reaches in
    /// the rear half, or infinity for patterns with a null (`a ≤ 1/2`).
    pub fn max_attenuation_db(self) -> f64 {
        let rear = self.rear_gain();
        if rear <= 0.0 {
            f64::INFINITY
        } else {
            -20.0 * rear.log10()
        }
    }

    /// Smallest off-axis angle in `[0°, 180°]` at which the gain is
    /// `attenuation_db` below on-axis.
    pub fn attenuation_angle(self, attenuation_db: f64) -> Result<f64> {
        if !attenuation_db.is_finite() || attenuation_db < 0.0 {
            return Err(Error::InvalidInput(format!(
                "attenuation must be a finite non-negative dB value, got {attenuation_db}"
            )));
        }
        if attenuation_db == 0.0 {
            return Ok(0.0);
        }
        let a = self.omni_coefficient;
        let target = 10f64.powf(-attenuation_db / 20.0);
        if a >= 1.0 || target < self.rear_gain() {
            return Err(Error::Unreachable(format!(
                "{attenuation_db} dB exceeds the {:.2} dB maximum attenuation of a pattern with a = {a}",
                self.max_attenuation_db()
            )));
        }
        let cos_theta = ((target - a) / (1.0 - a)).clamp(-1.0, 1.0);
        Ok(cos_theta.acos().to_degrees())
    }
}

impl Default for PolarPattern {
    fn default() -> Self {
        Self::WIDE_CARDIOID
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPattern {
    Object { omni_coefficient: f64 },
    Name(String),
    Coefficient(f64),
}

impl<'de> Deserialize<'de> for PolarPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parsed = match RawPattern::deserialize(d)? {
            RawPattern::Object { omni_coefficient } | RawPattern::Coefficient(omni_coefficient) => {
                PolarPattern::new(omni_coefficient)
            }
            RawPattern::Name(name) => PolarPattern::from_name(&name),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Free-function form of [`PolarPattern::gain`].
pub fn polar_gain(pattern: PolarPattern, off_axis_deg: f64) -> f64 {
    pattern.gain(off_axis_deg)
}

/// Free-function form of [`PolarPattern::attenuation_angle`].
pub fn attenuation_angle(pattern: PolarPattern, attenuation_db: f64) -> Result<f64> {
    pattern.attenuation_angle(attenuation_db)
}
