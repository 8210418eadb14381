//! Stereo recording angle of first-order microphone pairs.
//!
//! A far-field source in the horizontal plane reaches the two microphones
//! with a time difference set by their displacement and a level difference
//! set by their polar patterns. The shift model turns those cues into a
//! phantom-image position; the recording angle is the span of source
//! azimuths whose images stay inside the loudspeaker base.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{wrap_azimuth, Direction, PhysicalConstants, Position3D};
use crate::pattern::PolarPattern;
use crate::shift::{scale_factors, shift_percent, CueSet, ShiftModel};

/// Half-width of the azimuth sweep around the pair center, degrees.
pub const SWEEP_HALF_WIDTH: f64 = 90.0;
const SWEEP_STEP: f64 = 0.1;
const CURVE_STEP: f64 = 1.0;
const ANGLE_TOLERANCE: f64 = 1e-6;

/// Search interval of the spacing solver, meters.
pub const MAX_SPACING: f64 = 5.0;
const SPACING_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicSpec {
    #[serde(rename = "position_m")]
    pub position: Position3D,
    #[serde(rename = "axis_deg")]
    pub axis: Direction,
    #[serde(default)]
    pub pattern: PolarPattern,
}

impl MicSpec {
    pub fn new(position: Position3D, axis: Direction, pattern: PolarPattern) -> Self {
        Self { position, axis, pattern }
    }

    /// Gain toward a unit source direction.
    pub fn gain_toward(&self, source: Position3D) -> f64 {
        self.pattern.gain_from_cos(self.axis.unit_vector().dot(source).clamp(-1.0, 1.0))
    }

    pub fn mirrored(&self) -> Self {
        Self::new(self.position.mirrored(), self.axis.mirrored(), self.pattern)
    }
}

/// Two microphones feeding one loudspeaker pair. `left` is the first
/// channel of every cue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGeometry {
    pub left: MicSpec,
    pub right: MicSpec,
    /// Reproduction angle of the loudspeaker pair, degrees.
    pub base_angle: f64,
}

impl PairGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_angle > 0.0 && self.base_angle < 180.0) {
            return Err(Error::InvalidInput(format!(
                "base angle must lie in (0, 180), got {}",
                self.base_angle
            )));
        }
        if !self.left.position.is_finite() || !self.right.position.is_finite() {
            return Err(Error::InvalidInput("microphone positions must be finite".into()));
        }
        if self.left.position.distance(self.right.position) < 1e-12
            && self.left.axis.angle_to(self.right.axis) < 1e-9
            && self.left.pattern == self.right.pattern
        {
            return Err(Error::InvalidInput("coincident identical microphones carry no cues".into()));
        }
        Ok(())
    }

    /// Azimuth the pair faces: bisector of the horizontal axis projections,
    /// or perpendicular to the displacement for opposed axes.
    pub fn center_azimuth(&self) -> f64 {
        let l = self.left.axis.unit_vector();
        let r = self.right.axis.unit_vector();
        let (x, y) = (l.x + r.x, l.y + r.y);
        if x.hypot(y) > 1e-9 {
            return y.atan2(x).to_degrees();
        }
        let d = self.left.position - self.right.position;
        // left mic sits counterclockwise of the facing direction
        wrap_azimuth(d.y.atan2(d.x).to_degrees() - 90.0)
    }

    pub fn mirrored(&self) -> Self {
        // swapping keeps `left` on the counterclockwise side
        Self {
            left: self.right.mirrored(),
            right: self.left.mirrored(),
            base_angle: self.base_angle,
        }
    }
}

/// Cues for a horizontal plane wave arriving from `source_azimuth_deg`.
pub fn interchannel_cues(pair: &PairGeometry, source_azimuth_deg: f64, constants: &PhysicalConstants) -> CueSet {
    let s = Direction::horizontal(source_azimuth_deg).unit_vector();
    cues_for_direction(pair, s, constants)
}

/// Cues for an arbitrary unit source direction.
pub fn cues_for_direction(pair: &PairGeometry, source: Position3D, constants: &PhysicalConstants) -> CueSet {
    // The wavefront reaches the mic further along `source` first.
    let ictd = source.dot(pair.left.position - pair.right.position) / constants.speed_of_sound * 1e3;
    let gl = pair.left.gain_toward(source).abs();
    let gr = pair.right.gain_toward(source).abs();
    const NULL: f64 = 1e-12;
    let icld = match (gl < NULL, gr < NULL) {
        (true, true) => 0.0,
        (true, false) => f64::NEG_INFINITY,
        (false, true) => f64::INFINITY,
        (false, false) => 20.0 * (gl / gr).log10(),
    };
    CueSet { ictd, icld }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub azimuth_deg: f64,
    pub ictd_ms: f64,
    pub icld_db: f64,
    pub shift_percent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfAngles {
    /// Toward the first (left) microphone.
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingAngleResult {
    /// Full recording angle, degrees.
    pub sra: f64,
    pub half_angles: HalfAngles,
    /// Source azimuth whose image sits mid-base.
    pub center_azimuth: f64,
    /// Cues and image shift over the sweep, 1° steps.
    pub curve: Vec<CurvePoint>,
}

impl RecordingAngleResult {
    /// Azimuth halfway between the two recording-angle edges.
    pub fn span_center(&self) -> f64 {
        wrap_azimuth(self.center_azimuth + (self.half_angles.left - self.half_angles.right) / 2.0)
    }
}

struct Sweep<'a> {
    pair: &'a PairGeometry,
    model: &'a ShiftModel,
    constants: &'a PhysicalConstants,
}

impl Sweep<'_> {
    fn shift(&self, azimuth: f64) -> f64 {
        shift_percent(interchannel_cues(self.pair, azimuth, self.constants), self.pair.base_angle, self.model)
    }

    fn full(&self, azimuth: f64) -> bool {
        self.shift(azimuth).abs() >= 100.0
    }

    /// Zero-shift azimuth nearest the sweep center.
    fn image_center(&self, center: f64) -> Option<f64> {
        let s0 = self.shift(center);
        if s0 == 0.0 {
            return Some(center);
        }
        let steps = (SWEEP_HALF_WIDTH / SWEEP_STEP).round() as usize;
        for k in 1..=steps {
            for dir in [1.0, -1.0] {
                let prev = center + dir * (k - 1) as f64 * SWEEP_STEP;
                let here = center + dir * k as f64 * SWEEP_STEP;
                let (sp, sh) = (self.shift(prev), self.shift(here));
                if sh == 0.0 {
                    return Some(here);
                }
                if sp.signum() != sh.signum() && sp.is_finite() && sh.is_finite() {
                    return Some(self.bisect(prev, here, |az| self.shift(az).signum() == sh.signum()));
                }
            }
        }
        None
    }

    /// Bisects between `outside` (predicate false) and `inside` (true).
    fn bisect(&self, mut outside: f64, mut inside: f64, pred: impl Fn(f64) -> bool) -> f64 {
        while (inside - outside).abs() > ANGLE_TOLERANCE {
            let mid = 0.5 * (outside + inside);
            if pred(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (outside + inside)
    }

    /// Offset from `start` (in direction `dir`) where the image first reaches
    /// a loudspeaker, and the sign of that shift.
    fn edge(&self, start: f64, dir: f64, limit: f64) -> Option<(f64, f64)> {
        let mut offset = 0.0;
        while offset < limit {
            let next = (offset + SWEEP_STEP).min(limit);
            if self.full(start + dir * next) {
                let off = self.bisect(offset, next, |o| self.full(start + dir * o));
                let sign = self.shift(start + dir * next).signum();
                return Some((off, sign));
            }
            offset = next;
        }
        None
    }
}

/// Recording angle of a pair, measured on the base-angle-scaled shift model.
pub fn recording_angle(
    pair: &PairGeometry,
    model: &ShiftModel,
    constants: &PhysicalConstants,
) -> Result<RecordingAngleResult> {
    pair.validate()?;
    model.validate()?;
    let sweep = Sweep { pair, model, constants };
    let center = pair.center_azimuth();
    let image_center = sweep.image_center(center).ok_or_else(|| {
        Error::Unbounded("the image never passes mid-base within the ±90° sweep".into())
    })?;
    let ccw_limit = center + SWEEP_HALF_WIDTH - image_center;
    let cw_limit = image_center - (center - SWEEP_HALF_WIDTH);
    let ccw = sweep.edge(image_center, 1.0, ccw_limit);
    let cw = sweep.edge(image_center, -1.0, cw_limit);
    let (Some((ccw_off, ccw_sign)), Some((cw_off, _))) = (ccw, cw) else {
        let side = if ccw.is_none() { "counterclockwise" } else { "clockwise" };
        return Err(Error::Unbounded(format!(
            "image never reaches the loudspeaker on the {side} side within ±90° of the pair center"
        )));
    };
    let half_angles = if ccw_sign >= 0.0 {
        HalfAngles { left: ccw_off, right: cw_off }
    } else {
        HalfAngles { left: cw_off, right: ccw_off }
    };

    let n = (2.0 * SWEEP_HALF_WIDTH / CURVE_STEP).round() as usize;
    let curve = (0..=n)
        .map(|i| {
            let az = center - SWEEP_HALF_WIDTH + i as f64 * CURVE_STEP;
            let cues = interchannel_cues(pair, az, constants);
            CurvePoint {
                azimuth_deg: wrap_azimuth(az),
                ictd_ms: cues.ictd,
                icld_db: cues.icld,
                shift_percent: shift_percent(cues, pair.base_angle, model),
            }
        })
        .collect();

    Ok(RecordingAngleResult {
        sra: ccw_off + cw_off,
        half_angles,
        center_azimuth: wrap_azimuth(image_center),
        curve,
    })
}

/// Pair with the given absolute axis azimuths, `spacing` apart laterally
/// and the right mic `longitudinal_offset` ahead of the left one.
pub fn spaced_pair(
    pattern: PolarPattern,
    axis_angles: (f64, f64),
    spacing: f64,
    longitudinal_offset: f64,
    base_angle: f64,
) -> PairGeometry {
    PairGeometry {
        left: MicSpec::new(
            Position3D::new(0.0, spacing / 2.0, 0.0),
            Direction::horizontal(axis_angles.0),
            pattern,
        ),
        right: MicSpec::new(
            Position3D::new(longitudinal_offset, -spacing / 2.0, 0.0),
            Direction::horizontal(axis_angles.1),
            pattern,
        ),
        base_angle,
    }
}

/// Finds the parameter in `[lo, hi]` at which a recording angle that
/// shrinks with the parameter equals `target`.
///
/// `sra_at` returns `None` where the recording angle is unbounded, which
/// counts as wider than any target.
pub fn solve_decreasing(
    lo: f64,
    hi: f64,
    target: f64,
    tolerance: f64,
    sra_at: impl Fn(f64) -> Result<Option<f64>>,
) -> Result<f64> {
    let above = |v: Option<f64>| v.is_none_or(|s| s > target);
    let at_lo = sra_at(lo)?;
    if !above(at_lo) {
        return Err(Error::Unreachable(format!(
            "recording angle at the smallest setting ({:.2}°) is already below the {target}° target",
            at_lo.unwrap_or(f64::NAN)
        )));
    }
    if let Some(s) = sra_at(hi)? {
        if s > target {
            return Err(Error::Unreachable(format!(
                "recording angle is still {s:.2}° at the largest setting, above the {target}° target"
            )));
        }
    } else {
        return Err(Error::Unreachable(format!(
            "recording angle is unbounded even at the largest setting; {target}° not reachable"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if above(sra_at(mid)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maps unbounded recording angles to `None`; other errors propagate.
pub fn sra_or_unbounded(pair: &PairGeometry, model: &ShiftModel, constants: &PhysicalConstants) -> Result<Option<f64>> {
    match recording_angle(pair, model, constants) {
        Ok(r) => Ok(Some(r.sra)),
        Err(Error::Unbounded(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Lateral spacing at which a pair reaches `target_sra`.
#[allow(clippy::too_many_arguments)]
pub fn solve_spacing(
    pattern: PolarPattern,
    axis_angles: (f64, f64),
    target_sra: f64,
    base_angle: f64,
    model: &ShiftModel,
    longitudinal_offset: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if !(target_sra > 0.0 && target_sra < 180.0) {
        return Err(Error::InvalidInput(format!("target SRA must lie in (0, 180), got {target_sra}")));
    }
    solve_decreasing(0.0, MAX_SPACING, target_sra, SPACING_TOLERANCE, |d| {
        let pair = spaced_pair(pattern, axis_angles, d, longitudinal_offset, base_angle);
        if pair.validate().is_err() {
            // coincident identical mics: no cues, image never moves
            return Ok(None);
        }
        sra_or_unbounded(&pair, model, constants)
    })
}

/// Distance scaling shortcut: multiply a 60°-calibrated spacing by the
/// combined scale factor of the actual base angle.
pub fn apply_distance_scale(spacing: f64, base_angle: f64, model: &ShiftModel) -> f64 {
    spacing * scale_factors(base_angle, model).combined
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn symmetric_pair_on_axis_source_has_no_cues() {
        let pair = spaced_pair(PolarPattern::WIDE_CARDIOID, (44.0, -44.0), 0.3, 0.0, 60.0);
        let cues = interchannel_cues(&pair, 0.0, &c());
        assert_abs_diff_eq!(cues.ictd, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cues.icld, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn spaced_omnis_lateral_source() {
        let pair = spaced_pair(PolarPattern::OMNI, (0.0, 0.0), 0.343, 0.0, 60.0);
        let cues = interchannel_cues(&pair, 90.0, &c());
        assert_abs_diff_eq!(cues.ictd, 1.0, epsilon = 1e-12);
        assert_eq!(cues.icld, 0.0);
    }

    #[test]
    fn coincident_wide_cardioid_level_difference() {
        let pair = spaced_pair(PolarPattern::WIDE_CARDIOID, (44.0, -44.0), 0.0, 0.0, 60.0);
        let cues = interchannel_cues(&pair, 60.0, &c());
        let g = |t: f64| PolarPattern::WIDE_CARDIOID.gain(t);
        assert_abs_diff_eq!(cues.icld, 20.0 * (g(16.0) / g(104.0)).log10(), epsilon = 1e-12);
        assert_abs_diff_eq!(cues.icld, 4.53, epsilon = 0.01);
    }

    #[test]
    fn null_gain_reports_infinite_level_difference() {
        let pair = spaced_pair(PolarPattern::FIGURE_EIGHT, (0.0, -90.0), 0.0, 0.0, 60.0);
        let cues = interchannel_cues(&pair, 0.0, &c());
        assert_eq!(cues.icld, f64::INFINITY);
    }

    #[test]
    fn blumlein_recording_angle() {
        let pair = spaced_pair(PolarPattern::FIGURE_EIGHT, (45.0, -45.0), 0.0, 0.0, 60.0);
        let r = recording_angle(&pair, &ShiftModel::default(), &c()).unwrap();
        // pure level: full shift at 133.3/7.8 dB, tan θ = (k − 1)/(k + 1)
        let k = 10f64.powf(ShiftModel::default().full_shift_units() / 7.8 / 20.0);
        let half = ((k - 1.0) / (k + 1.0)).atan().to_degrees();
        assert_abs_diff_eq!(r.sra, 2.0 * half, epsilon = 1e-4);
        assert_abs_diff_eq!(r.sra, 74.0, epsilon = 0.2);
        assert_abs_diff_eq!(r.half_angles.left, r.half_angles.right, epsilon = 1e-4);
        assert_eq!(r.curve.len(), 181);
    }

    #[test]
    fn narrow_coincident_pair_is_unbounded() {
        let pair = spaced_pair(PolarPattern::WIDE_CARDIOID, (10.0, -10.0), 0.0, 0.0, 60.0);
        let err = recording_angle(&pair, &ShiftModel::default(), &c()).unwrap_err();
        assert_eq!(err.name(), "Unbounded");
    }

    #[test]
    fn degenerate_pair_rejected() {
        let pair = spaced_pair(PolarPattern::CARDIOID, (0.0, 0.0), 0.0, 0.0, 60.0);
        assert_eq!(recording_angle(&pair, &ShiftModel::default(), &c()).unwrap_err().name(), "InvalidInput");
    }

    #[test]
    fn rear_facing_pair_is_handled() {
        let m = ShiftModel::default();
        let front = spaced_pair(PolarPattern::WIDE_CARDIOID, (44.0, -44.0), 0.3, 0.0, 60.0);
        let rear = spaced_pair(PolarPattern::WIDE_CARDIOID, (136.0, -136.0), 0.3, 0.0, 60.0);
        let a = recording_angle(&front, &m, &c()).unwrap();
        let b = recording_angle(&rear, &m, &c()).unwrap();
        assert_abs_diff_eq!(a.sra, b.sra, epsilon = 1e-4);
        assert_abs_diff_eq!(b.center_azimuth.abs(), 180.0, epsilon = 1e-4);
    }

    #[test]
    fn solver_round_trip_and_errors() {
        let m = ShiftModel::default();
        let wc = PolarPattern::WIDE_CARDIOID;
        let d = solve_spacing(wc, (44.0, -44.0), 120.0, 60.0, &m, 0.0, &c()).unwrap();
        let pair = spaced_pair(wc, (44.0, -44.0), d, 0.0, 60.0);
        let r = recording_angle(&pair, &m, &c()).unwrap();
        assert_abs_diff_eq!(r.sra, 120.0, epsilon = 0.05);
        // wide targets stay reachable because near-coincident pairs are unbounded
        assert!(solve_spacing(wc, (44.0, -44.0), 170.0, 60.0, &m, 0.0, &c()).is_ok());
        // omnis 5 m apart still cover more than 5°
        assert_eq!(
            solve_spacing(PolarPattern::OMNI, (0.0, 0.0), 5.0, 60.0, &m, 0.0, &c()).unwrap_err().name(),
            "Unreachable"
        );
    }

    #[test]
    fn distance_scale() {
        let m = ShiftModel::default();
        assert_abs_diff_eq!(apply_distance_scale(0.5, 60.0, &m), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(apply_distance_scale(0.24, 120.0, &m), 0.24 * 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn pair_json_shape() {
        let pair = spaced_pair(PolarPattern::CARDIOID, (30.0, -30.0), 0.2, 0.0, 60.0);
        let v = serde_json::to_value(pair).unwrap();
        assert_eq!(v["left"]["position_m"], serde_json::json!([0.0, 0.1, 0.0]));
        assert_eq!(v["right"]["axis_deg"]["azimuth"], serde_json::json!(-30.0));
        let back: PairGeometry = serde_json::from_value(v).unwrap();
        assert_eq!(back, pair);
    }
}
