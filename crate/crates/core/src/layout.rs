//! AURO-3D 9.0 loudspeaker geometry.
//!
//! The base layer is an ITU 5.0 ring of radius `r`. Height speakers sit at
//! elevation `ε`. Placed directly above their base speakers, an elevated
//! pair subtends a narrower angle than its base pair; the front height pair
//! can instead be moved outwards in the plane of the base front speakers so
//! that it keeps both the base pair angle and the elevation. The surround
//! pair has no such position for the default 120° spread and stays above
//! the base surrounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_between, Direction, PhysicalConstants, Position3D};

/// Enclosed angle of an elevated speaker pair whose base pair subtends
/// `base_pair_deg`, both speakers lifted straight up to `elevation_deg`.
pub fn height_pair_angle(base_pair_deg: f64, elevation_deg: f64) -> f64 {
    let half = (base_pair_deg / 2.0).to_radians();
    let s = (half.sin() * elevation_deg.to_radians().cos()).clamp(-1.0, 1.0);
    2.0 * s.asin().to_degrees()
}

fn default_front_angle() -> f64 {
    60.0
}

fn default_surround_angle() -> f64 {
    120.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutSpec {
    /// Base-layer speaker distance from the listening position, meters.
    pub radius: f64,
    /// Height-layer elevation, degrees.
    pub elevation: f64,
    /// Angle subtended by the base L/R pair, degrees.
    #[serde(default = "default_front_angle")]
    pub base_front_angle: f64,
    /// Angle subtended by the base Ls/Rs pair, degrees.
    #[serde(default = "default_surround_angle")]
    pub base_surround_angle: f64,
    /// Move the height-front pair so it subtends `base_front_angle`.
    #[serde(default = "default_true")]
    pub compensate_height_front: bool,
    /// Same for the height-surround pair. Fails for the default geometry.
    #[serde(default)]
    pub compensate_height_surround: bool,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        Self {
            radius: 3.0,
            elevation: 30.0,
            base_front_angle: default_front_angle(),
            base_surround_angle: default_surround_angle(),
            compensate_height_front: true,
            compensate_height_surround: false,
            constants: PhysicalConstants::default(),
        }
    }
}

impl LayoutSpec {
    pub fn new(radius: f64, elevation: f64) -> Result<Self> {
        let spec = Self { radius, elevation, ..Self::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidInput(format!("radius must be positive, got {}", self.radius)));
        }
        if !(0.0..90.0).contains(&self.elevation) {
            return Err(Error::InvalidInput(format!(
                "elevation must lie in [0, 90), got {}",
                self.elevation
            )));
        }
        for (name, angle) in [
            ("base_front_angle", self.base_front_angle),
            ("base_surround_angle", self.base_surround_angle),
        ] {
            if !(angle > 0.0 && angle < 180.0) {
                return Err(Error::InvalidInput(format!("{name} must lie in (0, 180), got {angle}")));
            }
        }
        PhysicalConstants::new(self.constants.speed_of_sound)?;
        Ok(())
    }
}

/// Position of an elevated speaker that keeps both the pair angle and the
/// elevation, for a pair centered on azimuth 0.
///
/// The speaker lies in the vertical plane through the base pair
/// (`x = r·cos(α/2)`). Returns the left (`+y`) member.
fn compensated_position(radius: f64, pair_deg: f64, elevation_deg: f64) -> Result<Position3D> {
    let half = (pair_deg / 2.0).to_radians();
    let eps = elevation_deg.to_radians();
    let plane = radius * half.cos();
    let cot2 = (half.cos() / half.sin()).powi(2);
    let tan2 = eps.tan().powi(2);
    let denom = cot2 - tan2;
    // Relative guard: at equality the two loci meet only at infinity.
    if denom <= 1e-12 * cot2.max(tan2) || plane <= 0.0 {
        return Err(Error::NoSolution(format!(
            "a {pair_deg}° pair at {elevation_deg}° elevation cannot keep its angle in the base-pair plane (the loci meet at infinity)"
        )));
    }
    let y2 = plane * plane / eps.cos().powi(2) / denom;
    let y = y2.sqrt();
    let z = eps.tan() * (plane * plane + y2).sqrt();
    Ok(Position3D::new(plane, y, z))
}

/// Compensated height-front position (left member of the mirrored pair).
pub fn compensated_height_front(spec: &LayoutSpec) -> Result<Position3D> {
    compensated_position(spec.radius, spec.base_front_angle, spec.elevation)
}

/// Delay (ms) that aligns a speaker at `position` with the base ring.
pub fn time_compensation(position: Position3D, spec: &LayoutSpec) -> Result<f64> {
    let excess = position.norm() - spec.radius;
    // tolerate rounding for speakers on the ring itself
    if excess < -1e-12 * spec.radius {
        return Err(Error::NegativeDelay(format!(
            "position is {:.6} m closer than the {} m base radius",
            -excess, spec.radius
        )));
    }
    Ok(excess.max(0.0) / spec.constants.speed_of_sound * 1e3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Base,
    Height,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerChannel {
    pub label: String,
    pub layer: Layer,
    #[serde(rename = "position_m")]
    pub position: Position3D,
    #[serde(rename = "delay_ms")]
    pub delay_compensation: f64,
}

/// Reproduction angles of the adjacent loudspeaker pairs, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairAngles {
    /// L–R.
    pub front: f64,
    /// L–C (and C–R).
    pub front_center: f64,
    /// Ls–Rs.
    pub surround: f64,
    /// L–Ls (and R–Rs).
    pub side: f64,
    pub height_front: f64,
    pub height_surround: f64,
    /// Nominal HL–HLs angle from the elevated-pair formula on the base side angle.
    pub height_side: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerLayout {
    pub spec: LayoutSpec,
    pub channels: Vec<SpeakerChannel>,
    #[serde(rename = "pair_angles_deg")]
    pub pair_angles: PairAngles,
}

/// Channel order of every exported layout.
pub const CHANNEL_ORDER: [&str; 9] = ["L", "R", "C", "Ls", "Rs", "HL", "HR", "HLs", "HRs"];

impl SpeakerLayout {
    pub fn channel(&self, label: &str) -> Option<&SpeakerChannel> {
        self.channels.iter().find(|c| c.label == label)
    }

    /// Angle two channels subtend at the listening position.
    pub fn subtended_angle(&self, a: &str, b: &str) -> Option<f64> {
        Some(angle_between(self.channel(a)?.position, self.channel(b)?.position))
    }

    /// Sum of the four height-layer pair angles around the listener.
    pub fn height_angle_sum(&self) -> f64 {
        let p = &self.pair_angles;
        p.height_front + p.height_surround + 2.0 * p.height_side
    }
}

fn on_ring(radius: f64, azimuth: f64) -> Position3D {
    Direction::horizontal(azimuth).unit_vector() * radius
}

/// Rotates a position given in a frame whose `+x` points at `azimuth_deg`.
fn rotate_about_z(p: Position3D, azimuth_deg: f64) -> Position3D {
    let (s, c) = azimuth_deg.to_radians().sin_cos();
    Position3D::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
}

/// Builds the nine-channel layout in the fixed [`CHANNEL_ORDER`].
pub fn build_auro9_layout(spec: &LayoutSpec) -> Result<SpeakerLayout> {
    spec.validate()?;
    let r = spec.radius;
    let half_front = spec.base_front_angle / 2.0;
    let surround_az = 180.0 - spec.base_surround_angle / 2.0;
    let lift = r * spec.elevation.to_radians().tan();

    let left = on_ring(r, half_front);
    let left_surround = on_ring(r, surround_az);

    let height_front = if spec.compensate_height_front {
        compensated_height_front(spec).map_err(|e| e.within("height front"))?
    } else {
        left + Position3D::new(0.0, 0.0, lift)
    };
    let height_surround = if spec.compensate_height_surround {
        // the surround pair is centered on azimuth 180
        let local = compensated_position(r, spec.base_surround_angle, spec.elevation)
            .map_err(|e| e.within("height surround"))?;
        rotate_about_z(local.mirrored(), 180.0)
    } else {
        left_surround + Position3D::new(0.0, 0.0, lift)
    };

    let base = |label: &str, position: Position3D| SpeakerChannel {
        label: label.to_string(),
        layer: Layer::Base,
        position,
        delay_compensation: 0.0,
    };
    let height = |label: &str, position: Position3D| -> Result<SpeakerChannel> {
        Ok(SpeakerChannel {
            label: label.to_string(),
            layer: Layer::Height,
            position,
            delay_compensation: time_compensation(position, spec)?,
        })
    };

    let channels = vec![
        base("L", left),
        base("R", left.mirrored()),
        base("C", on_ring(r, 0.0)),
        base("Ls", left_surround),
        base("Rs", left_surround.mirrored()),
        height("HL", height_front)?,
        height("HR", height_front.mirrored())?,
        height("HLs", height_surround)?,
        height("HRs", height_surround.mirrored())?,
    ];

    let side = angle_between(left, left_surround);
    let pair_angles = PairAngles {
        front: angle_between(left, left.mirrored()),
        front_center: angle_between(left, on_ring(r, 0.0)),
        surround: angle_between(left_surround, left_surround.mirrored()),
        side,
        height_front: angle_between(height_front, height_front.mirrored()),
        height_surround: angle_between(height_surround, height_surround.mirrored()),
        height_side: height_pair_angle(side, spec.elevation),
    };

    Ok(SpeakerLayout { spec: *spec, channels, pair_angles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn elevated_pair_angles() {
        assert_abs_diff_eq!(height_pair_angle(60.0, 30.0), 51.3, epsilon = 0.05);
        assert_abs_diff_eq!(height_pair_angle(120.0, 30.0), 97.2, epsilon = 0.05);
        assert_abs_diff_eq!(height_pair_angle(90.0, 30.0), 75.5, epsilon = 0.05);
        assert_abs_diff_eq!(height_pair_angle(73.0, 0.0), 73.0, epsilon = 1e-12);
    }

    #[test]
    fn compensated_front_reference_case() {
        let spec = LayoutSpec::default();
        let p = compensated_height_front(&spec).unwrap();
        assert_abs_diff_eq!(p.x, 2.598, epsilon = 1e-3);
        assert_abs_diff_eq!(p.y, 1.837, epsilon = 1e-3);
        assert_abs_diff_eq!(p.z, 1.837, epsilon = 1e-3);
        assert_abs_diff_eq!(p.norm(), 3.674, epsilon = 1e-3);
        // independent check: pair angle and elevation from the vectors
        assert_abs_diff_eq!(angle_between(p, p.mirrored()), 60.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.direction().elevation, 30.0, epsilon = 1e-9);
        // 0.33 m further out than the uncompensated speaker
        assert_abs_diff_eq!(p.y - 3.0 * 30f64.to_radians().sin(), 0.337, epsilon = 1e-3);
    }

    #[test]
    fn compensated_surround_has_no_solution() {
        let spec = LayoutSpec { base_front_angle: 120.0, ..LayoutSpec::default() };
        assert!(matches!(compensated_height_front(&spec), Err(Error::NoSolution(_))));
    }

    #[test]
    fn compensated_collapses_at_zero_elevation() {
        let spec = LayoutSpec { radius: 1.0, elevation: 0.0, ..LayoutSpec::default() };
        let p = compensated_height_front(&spec).unwrap();
        assert_abs_diff_eq!(p.x, 0.866025, epsilon = 1e-6);
        assert_abs_diff_eq!(p.y, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn delays() {
        let spec = LayoutSpec::default();
        let front = time_compensation(compensated_height_front(&spec).unwrap(), &spec).unwrap();
        // (sqrt(1.5) - 1)·3/343 s
        assert_abs_diff_eq!(front, (1.5f64.sqrt() - 1.0) * 3.0 / 343.0 * 1e3, epsilon = 1e-9);
        let above_surround = on_ring(3.0, 120.0) + Position3D::new(0.0, 0.0, 3.0 * 30f64.to_radians().tan());
        assert_abs_diff_eq!(time_compensation(above_surround, &spec).unwrap(), 1.353, epsilon = 1e-3);
        assert_eq!(time_compensation(on_ring(3.0, 77.0), &spec).unwrap(), 0.0);
        assert!(matches!(
            time_compensation(Position3D::new(1.0, 0.0, 0.0), &spec),
            Err(Error::NegativeDelay(_))
        ));
    }

    #[test]
    fn default_layout() {
        let layout = build_auro9_layout(&LayoutSpec::default()).unwrap();
        let labels: Vec<_> = layout.channels.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, CHANNEL_ORDER);
        let p = layout.pair_angles;
        assert_abs_diff_eq!(p.front, 60.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.front_center, 30.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.surround, 120.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.side, 90.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.height_front, 60.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.height_surround, 97.18, epsilon = 0.01);
        assert_abs_diff_eq!(p.height_side, 75.52, epsilon = 0.01);
        assert!(layout.height_angle_sum() < 360.0);
        let hls = layout.channel("HLs").unwrap();
        assert_abs_diff_eq!(hls.position.z, 1.732, epsilon = 1e-3);
        assert_abs_diff_eq!(hls.delay_compensation, 1.353, epsilon = 1e-3);
        assert!(layout.channel("HL").unwrap().delay_compensation > 1.9);
        for ch in layout.channels.iter().filter(|c| c.layer == Layer::Base) {
            assert_eq!(ch.delay_compensation, 0.0);
        }
        // pair angles agree with the channel positions
        assert_abs_diff_eq!(layout.subtended_angle("HLs", "HRs").unwrap(), p.height_surround, epsilon = 1e-9);
        assert_abs_diff_eq!(layout.subtended_angle("HL", "HR").unwrap(), p.height_front, epsilon = 1e-9);
        assert_abs_diff_eq!(layout.subtended_angle("L", "Ls").unwrap(), p.side, epsilon = 1e-9);
    }

    #[test]
    fn flat_layout_has_coincident_heights() {
        let spec = LayoutSpec { elevation: 0.0, ..LayoutSpec::default() };
        let layout = build_auro9_layout(&spec).unwrap();
        for (base, height) in [("L", "HL"), ("R", "HR"), ("Ls", "HLs"), ("Rs", "HRs")] {
            let b = layout.channel(base).unwrap().position;
            let h = layout.channel(height).unwrap();
            assert!(b.distance(h.position) < 1e-12);
            assert_eq!(h.delay_compensation, 0.0);
        }
    }

    #[test]
    fn uncompensated_front_sits_above_base() {
        let spec = LayoutSpec { compensate_height_front: false, ..LayoutSpec::default() };
        let layout = build_auro9_layout(&spec).unwrap();
        assert_abs_diff_eq!(layout.pair_angles.height_front, 51.3, epsilon = 0.05);
        // 0.58 r versus 0.61 r for the compensated speaker
        assert_abs_diff_eq!(layout.channel("HL").unwrap().position.z / 3.0, 0.577, epsilon = 1e-3);
    }

    #[test]
    fn compensated_surround_request_fails() {
        let spec = LayoutSpec { compensate_height_surround: true, ..LayoutSpec::default() };
        let err = build_auro9_layout(&spec).unwrap_err();
        assert_eq!(err.name(), "NoSolution");
        assert!(err.detail().starts_with("height surround"));
    }

    #[test]
    fn compensated_surround_works_for_narrow_pairs() {
        let spec = LayoutSpec {
            base_surround_angle: 100.0,
            elevation: 20.0,
            compensate_height_surround: true,
            ..LayoutSpec::default()
        };
        let layout = build_auro9_layout(&spec).unwrap();
        assert_abs_diff_eq!(layout.pair_angles.height_surround, 100.0, epsilon = 1e-9);
        let hls = layout.channel("HLs").unwrap().position;
        assert!(hls.x < 0.0 && hls.y > 0.0);
        assert_abs_diff_eq!(hls.direction().elevation, 20.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(LayoutSpec::new(0.0, 30.0).is_err());
        assert!(LayoutSpec::new(3.0, 90.0).is_err());
        let spec = LayoutSpec { base_front_angle: 180.0, ..LayoutSpec::default() };
        assert!(build_auro9_layout(&spec).is_err());
    }

    proptest! {
        #[test]
        fn elevated_angle_shrinks_with_elevation(alpha in 1.0f64..179.0, e1 in 0.0f64..89.0, de in 0.01f64..1.0) {
            let a1 = height_pair_angle(alpha, e1);
            let a2 = height_pair_angle(alpha, e1 + de);
            prop_assert!(a1 <= alpha + 1e-9);
            prop_assert!(a2 < a1);
        }

        #[test]
        fn compensated_position_keeps_angle_and_elevation(r in 0.5f64..10.0, alpha in 10.0f64..100.0, frac in 0.0f64..0.9) {
            // keep clear of the no-solution boundary cot²(α/2) = tan²ε
            let max_eps = (90.0 - alpha / 2.0) * frac;
            let spec = LayoutSpec { radius: r, elevation: max_eps, base_front_angle: alpha, ..LayoutSpec::default() };
            let p = compensated_height_front(&spec).unwrap();
            prop_assert!((angle_between(p, p.mirrored()) - alpha).abs() < 1e-9);
            prop_assert!((p.direction().elevation - max_eps).abs() < 1e-9);
        }

        #[test]
        fn layout_is_mirror_symmetric(r in 1.0f64..6.0, eps in 0.0f64..40.0) {
            let layout = build_auro9_layout(&LayoutSpec::new(r, eps).unwrap()).unwrap();
            for ch in &layout.channels {
                let m = ch.position.mirrored();
                prop_assert!(layout.channels.iter().any(|o| o.position.distance(m) < 1e-12 && (o.delay_compensation - ch.delay_compensation).abs() < 1e-12));
            }
        }

        #[test]
        fn delay_grows_with_distance(r in 1.0f64..5.0, e1 in 0.0f64..3.0, de in 1e-6f64..1.0) {
            let spec = LayoutSpec::new(r, 30.0).unwrap();
            let p1 = Position3D::new(r + e1, 0.0, 0.0);
            let p2 = Position3D::new(r + e1 + de, 0.0, 0.0);
            prop_assert!(time_compensation(p2, &spec).unwrap() > time_compensation(p1, &spec).unwrap());
        }
    }
}
