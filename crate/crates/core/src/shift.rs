//! Phantom-image shift model.
//!
//! Interchannel time and level differences move the phantom image between
//! two loudspeakers. The stereo half-base is split into two regions: up to
//! `region_boundary` percent the image moves at the region-1 rates, beyond
//! it at half those rates. Rates are percent of the half-base per 0.1 ms of
//! ICTD and per dB of ICLD, calibrated for a 60° base; other base angles
//! divide them by the time and level scale factors.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pattern::PolarPattern;

/// Curve giving a scale factor as a function of loudspeaker base angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaleCurve {
    /// `sin(α/2) / sin(30°)`.
    #[serde(rename = "sine-law")]
    SineLaw,
    /// Spherical-head ITD, `(α/2 + sin(α/2)) / (π/6 + sin(π/6))`.
    #[serde(rename = "woodworth")]
    Woodworth,
}

impl ScaleCurve {
    pub fn parse(id: &str) -> Result<Self> {
        match id {
            "sine-law" => Ok(Self::SineLaw),
            "woodworth" => Ok(Self::Woodworth),
            other => Err(Error::UnknownModel(format!(
                "'{other}' (known models: sine-law, woodworth)"
            ))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Self::SineLaw => "sine-law",
            Self::Woodworth => "woodworth",
        }
    }

    pub fn factor(self, base_angle_deg: f64) -> f64 {
        let half = (base_angle_deg / 2.0).to_radians();
        match self {
            Self::SineLaw => half.sin() / (PI / 6.0).sin(),
            Self::Woodworth => (half + half.sin()) / (PI / 6.0 + (PI / 6.0).sin()),
        }
    }
}

// Model identifiers travel as strings so unknown names surface as
// UnknownModel rather than a generic parse failure.
fn curve_id<S: serde::Serializer>(c: &ScaleCurve, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(c.id())
}

fn curve_from_id<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<ScaleCurve, D::Error> {
    let id = String::deserialize(d)?;
    ScaleCurve::parse(&id).map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShiftModel {
    /// Edge of region 1, percent of the half-base.
    pub region_boundary: f64,
    /// Region-1 image shift, percent per 0.1 ms of ICTD.
    pub time_rate_region1: f64,
    /// Region-1 image shift, percent per dB of ICLD.
    pub level_rate_region1: f64,
    #[serde(serialize_with = "curve_id", deserialize_with = "curve_from_id")]
    pub itd_scale_model: ScaleCurve,
    #[serde(serialize_with = "curve_id", deserialize_with = "curve_from_id")]
    pub ild_scale_model: ScaleCurve,
    /// Weight of the time factor in the combined scale factor.
    pub itd_weight: f64,
}

impl Default for ShiftModel {
    fn default() -> Self {
        Self {
            region_boundary: 66.7,
            time_rate_region1: 13.3,
            level_rate_region1: 7.8,
            itd_scale_model: ScaleCurve::SineLaw,
            ild_scale_model: ScaleCurve::SineLaw,
            itd_weight: 2.0 / 3.0,
        }
    }
}

impl ShiftModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.region_boundary > 0.0 && self.region_boundary < 100.0) {
            return Err(Error::InvalidInput(format!(
                "region boundary must lie in (0, 100), got {}",
                self.region_boundary
            )));
        }
        if !(self.time_rate_region1 > 0.0 && self.level_rate_region1 > 0.0) {
            return Err(Error::InvalidInput("shift rates must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.itd_weight) {
            return Err(Error::InvalidInput(format!(
                "itd_weight must lie in [0, 1], got {}",
                self.itd_weight
            )));
        }
        Ok(())
    }

    /// Effective region-1 units for a cue pair: what the shift would be if
    /// region 1 extended indefinitely. Opposing cues cancel.
    pub fn effective_units(&self, cues: CueSet, base_angle_deg: f64) -> f64 {
        let sf = scale_factors(base_angle_deg, self);
        let time = cues.ictd / 0.1 * self.time_rate_region1 / sf.itd_factor;
        let level = if cues.icld.is_infinite() {
            cues.icld
        } else {
            cues.icld * self.level_rate_region1 / sf.ild_factor
        };
        time + level
    }

    /// Maps effective units onto the two-region shift, signed, capped at 100.
    pub fn shift_from_units(&self, units: f64) -> f64 {
        let m = units.abs();
        let shift = if m <= self.region_boundary {
            m
        } else {
            self.region_boundary + (m - self.region_boundary) / 2.0
        };
        shift.min(100.0).copysign(units)
    }

    /// Effective units at which the image reaches the loudspeaker.
    pub fn full_shift_units(&self) -> f64 {
        self.region_boundary + 2.0 * (100.0 - self.region_boundary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleFactors {
    #[serde(rename = "itd")]
    pub itd_factor: f64,
    #[serde(rename = "ild")]
    pub ild_factor: f64,
    pub combined: f64,
}

/// Interchannel cues of one source, positive toward the first channel.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CueSet {
    /// Milliseconds; positive when the first channel leads.
    pub ictd: f64,
    /// dB; positive when the first channel is louder. May be infinite.
    pub icld: f64,
}

impl CueSet {
    pub fn new(ictd: f64, icld: f64) -> Self {
        Self { ictd, icld }
    }
}

pub fn scale_factors(base_angle_deg: f64, model: &ShiftModel) -> ScaleFactors {
    let itd = model.itd_scale_model.factor(base_angle_deg);
    let ild = model.ild_scale_model.factor(base_angle_deg);
    ScaleFactors {
        itd_factor: itd,
        ild_factor: ild,
        combined: model.itd_weight * itd + (1.0 - model.itd_weight) * ild,
    }
}

/// Checked variant of [`scale_factors`] for external input.
pub fn checked_scale_factors(base_angle_deg: f64, model: &ShiftModel) -> Result<ScaleFactors> {
    if !(base_angle_deg > 0.0 && base_angle_deg < 180.0) {
        return Err(Error::OutOfRange(format!(
            "base angle must lie in (0, 180), got {base_angle_deg}"
        )));
    }
    model.validate()?;
    Ok(scale_factors(base_angle_deg, model))
}

/// Image shift in percent of the half-base (signed, toward the first
/// channel when positive).
pub fn shift_percent(cues: CueSet, base_angle_deg: f64, model: &ShiftModel) -> f64 {
    model.shift_from_units(model.effective_units(cues, base_angle_deg))
}

/// Minimum level difference (dB) between height and base layer for layer
/// separation at a given interchannel time difference.
pub fn min_vertical_icld(ictd_ms: f64) -> Result<f64> {
    if !(0.0..=10.0).contains(&ictd_ms) {
        return Err(Error::OutOfRange(format!(
            "vertical ICTD must lie in [0, 10] ms, got {ictd_ms}"
        )));
    }
    Ok(if ictd_ms >= 1.0 { 7.0 } else { 9.5 - 2.5 * ictd_ms })
}

/// Angle between base and height microphone axes giving the required
/// vertical level difference for a source on the base microphone's axis.
pub fn required_vertical_angle(pattern: PolarPattern, ictd_ms: f64) -> Result<f64> {
    pattern.attenuation_angle(min_vertical_icld(ictd_ms)?)
}
