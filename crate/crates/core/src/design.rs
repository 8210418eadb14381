//! Nine-microphone array matched to an AURO-3D 9.0 layout.
//!
//! Every horizontally adjacent microphone pair is sized so that its
//! recording angle equals the reproduction angle of the loudspeaker pair it
//! feeds. Base layer: L–C–R triplet, Ls/Rs pair, and the L–Ls / R–Rs side
//! pairs. Height layer: HL/HR, HLs/HRs and the two height side pairs, lifted
//! by the vertical spacing.
//!
//! Two scaling workflows are supported. `Distance` solves each pair on the
//! 60° reference model and multiplies the spacing by the combined scale
//! factor of the real reproduction angle. `Model` solves directly on the
//! shift model scaled to that angle.

use serde::{Deserialize, Serialize};

use crate::diffuse::decorrelation_cutoff;
use crate::error::{Error, Result};
use crate::geometry::{angle_between, wrap_azimuth, Direction, PhysicalConstants, Position3D};
use crate::imaging::{
    cues_for_direction, recording_angle, solve_decreasing, sra_or_unbounded, MicSpec, PairGeometry,
    MAX_SPACING,
};
use crate::layout::{build_auro9_layout, SpeakerLayout};
use crate::output::{to_csv, to_json, Cell};
use crate::pattern::PolarPattern;
use crate::shift::{min_vertical_icld, scale_factors, ShiftModel};

/// Reference base angle on which the distance workflow solves.
pub const REFERENCE_BASE_ANGLE: f64 = 60.0;
/// Threshold used for the per-pair decorrelation cutoff.
pub const DFC_THRESHOLD: f64 = 0.1;
const RECOMMENDED_VERTICAL: (f64, f64) = (0.25, 0.30);
const ALLOWED_VERTICAL: (f64, f64) = (0.20, 0.40);
const SOLVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScalingWorkflow {
    #[default]
    Distance,
    Model,
}

impl ScalingWorkflow {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(Self::Distance),
            "model" => Ok(Self::Model),
            other => Err(Error::InvalidInput(format!(
                "unknown scaling workflow '{other}' (distance, model)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignConfig {
    pub layout: crate::layout::LayoutSpec,
    pub pattern: PolarPattern,
    /// Azimuth of L (and −R), degrees.
    pub front_side_axis: f64,
    /// Forward offset of C from the L–R line before any scaling, meters.
    pub center_offset: f64,
    /// Ls/Rs aim, degrees off the rear axis.
    pub surround_axis_offset: f64,
    pub height_front_axis: f64,
    /// HLs/HRs aim, degrees off the rear axis.
    pub height_surround_axis: f64,
    pub vertical_spacing: f64,
    /// 3D angle between each base mic axis and the height mic above it.
    pub base_height_axis_angle: f64,
    pub scaling_workflow: ScalingWorkflow,
    /// Scale the center offset along with the front span (distance workflow).
    pub scale_center_offset: bool,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            layout: crate::layout::LayoutSpec::default(),
            pattern: PolarPattern::WIDE_CARDIOID,
            front_side_axis: 60.0,
            center_offset: 0.14,
            surround_axis_offset: 44.0,
            height_front_axis: 43.0,
            height_surround_axis: 44.0,
            vertical_spacing: 0.30,
            base_height_axis_angle: 90.0,
            scaling_workflow: ScalingWorkflow::Distance,
            scale_center_offset: false,
        }
    }
}

impl DesignConfig {
    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        let (lo, hi) = ALLOWED_VERTICAL;
        if !(lo..=hi).contains(&self.vertical_spacing) {
            return Err(Error::InvalidInput(format!(
                "vertical spacing must lie in [{lo}, {hi}] m, got {}",
                self.vertical_spacing
            )));
        }
        for (name, v) in [
            ("front_side_axis", self.front_side_axis),
            ("surround_axis_offset", self.surround_axis_offset),
            ("height_front_axis", self.height_front_axis),
            ("height_surround_axis", self.height_surround_axis),
        ] {
            if !(v > 0.0 && v <= 90.0) {
                return Err(Error::InvalidInput(format!("{name} must lie in (0, 90], got {v}")));
            }
        }
        if !(self.base_height_axis_angle > 0.0 && self.base_height_axis_angle <= 180.0) {
            return Err(Error::InvalidInput(format!(
                "base_height_axis_angle must lie in (0, 180], got {}",
                self.base_height_axis_angle
            )));
        }
        if !(self.center_offset >= 0.0 && self.center_offset < 1.0) {
            return Err(Error::InvalidInput(format!(
                "center offset must lie in [0, 1) m, got {}",
                self.center_offset
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedMic {
    pub name: String,
    #[serde(flatten)]
    pub mic: MicSpec,
}

/// Distances between microphones, meters. All recomputable from positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedDimensions {
    /// L to R.
    pub front_span: f64,
    /// L to C.
    pub front_adjacent: f64,
    /// C ahead of the L–R line.
    pub center_offset: f64,
    /// Ls to Rs.
    pub surround_spacing: f64,
    /// L–R line to Ls–Rs line.
    pub surround_setback: f64,
    /// L to Ls.
    pub side_spacing: f64,
    pub height_front_spacing: f64,
    pub height_surround_spacing: f64,
    /// HL to HLs.
    pub height_side_spacing: f64,
    /// Height plane above base plane.
    pub vertical_spacing: f64,
}

impl DerivedDimensions {
    pub fn entries(&self) -> [(&'static str, f64); 10] {
        [
            ("front_span", self.front_span),
            ("front_adjacent", self.front_adjacent),
            ("center_offset", self.center_offset),
            ("surround_spacing", self.surround_spacing),
            ("surround_setback", self.surround_setback),
            ("side_spacing", self.side_spacing),
            ("height_front_spacing", self.height_front_spacing),
            ("height_surround_spacing", self.height_surround_spacing),
            ("height_side_spacing", self.height_side_spacing),
            ("vertical_spacing", self.vertical_spacing),
        ]
    }

    fn from_mics(mics: &[NamedMic]) -> Result<Self> {
        let p = |name: &str| find_mic(mics, name).map(|m| m.position);
        let (l, r, c) = (p("L")?, p("R")?, p("C")?);
        let (ls, rs) = (p("Ls")?, p("Rs")?);
        let (hl, hr, hls, hrs) = (p("HL")?, p("HR")?, p("HLs")?, p("HRs")?);
        Ok(Self {
            front_span: l.distance(r),
            front_adjacent: l.distance(c),
            center_offset: c.x - 0.5 * (l.x + r.x),
            surround_spacing: ls.distance(rs),
            surround_setback: 0.5 * (l.x + r.x) - 0.5 * (ls.x + rs.x),
            side_spacing: l.distance(ls),
            height_front_spacing: hl.distance(hr),
            height_surround_spacing: hls.distance(hrs),
            height_side_spacing: hl.distance(hls),
            vertical_spacing: 0.5 * (hl.z + hls.z) - 0.5 * (l.z + ls.z),
        })
    }
}

fn find_mic<'a>(mics: &'a [NamedMic], name: &str) -> Result<&'a MicSpec> {
    mics.iter()
        .find(|m| m.name == name)
        .map(|m| &m.mic)
        .ok_or_else(|| Error::InvalidInput(format!("design has no microphone '{name}'")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub name: String,
    /// First (counterclockwise) and second microphone.
    pub mics: [String; 2],
    pub target_deg: f64,
    /// `None` when the recording angle is unbounded.
    pub achieved_deg: Option<f64>,
    pub delta_deg: Option<f64>,
    /// Middle of the recording angle minus the loudspeaker-pair bisector.
    pub tilt_deg: Option<f64>,
    pub cutoff_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerticalCheck {
    pub base: String,
    pub height: String,
    pub axis_angle_deg: f64,
    /// Cues for a far source on the base mic's axis.
    pub ictd_ms: f64,
    pub icld_db: f64,
    pub required_icld_db: Option<f64>,
    pub satisfied: bool,
    pub cutoff_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pairs: Vec<PairCheck>,
    pub vertical: Vec<VerticalCheck>,
    pub max_abs_delta_deg: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayDesign {
    pub config: DesignConfig,
    pub model: ShiftModel,
    pub mics: Vec<NamedMic>,
    #[serde(rename = "derived_dimensions_m")]
    pub derived_dimensions: DerivedDimensions,
    pub validation: ValidationReport,
}

impl ArrayDesign {
    pub fn mic(&self, name: &str) -> Option<&MicSpec> {
        find_mic(&self.mics, name).ok()
    }
}

/// Microphone names in export order.
pub const MIC_ORDER: [&str; 9] = ["L", "R", "C", "Ls", "Rs", "HL", "HR", "HLs", "HRs"];

/// Adjacent pairs: (name, first mic, second mic). The first mic is the
/// counterclockwise one seen from the array center looking outwards.
pub const ADJACENT_PAIRS: [(&str, &str, &str); 9] = [
    ("front_left", "L", "C"),
    ("front_right", "C", "R"),
    ("surround", "Rs", "Ls"),
    ("side_left", "Ls", "L"),
    ("side_right", "R", "Rs"),
    ("height_front", "HL", "HR"),
    ("height_surround", "HRs", "HLs"),
    ("height_side_left", "HLs", "HL"),
    ("height_side_right", "HR", "HRs"),
];

/// Base/height microphone pairs stacked across the layers.
pub const VERTICAL_PAIRS: [(&str, &str); 4] = [("L", "HL"), ("R", "HR"), ("Ls", "HLs"), ("Rs", "HRs")];

fn pair_target(layout: &SpeakerLayout, name: &str) -> f64 {
    let a = &layout.pair_angles;
    match name {
        "front_left" | "front_right" => a.front_center,
        "surround" => a.surround,
        "side_left" | "side_right" => a.side,
        "height_front" => a.height_front,
        "height_surround" => a.height_surround,
        _ => a.height_side,
    }
}

fn speaker_for_mic(name: &str) -> &str {
    name
}

/// Elevation magnitude for a base mic tilted down and its height partner
/// tilted up by the same amount, so their axes are `axis_angle` apart.
fn layer_tilt(base_azimuth: f64, height_azimuth: f64, axis_angle: f64) -> Result<f64> {
    let daz = wrap_azimuth(base_azimuth - height_azimuth).to_radians();
    let cos2 = (1.0 + axis_angle.to_radians().cos()) / (1.0 + daz.cos());
    if !(0.0..=1.0 + 1e-12).contains(&cos2) {
        return Err(Error::NoSolution(format!(
            "base/height axes {:.2}° apart in azimuth cannot be set {axis_angle}° apart",
            daz.to_degrees().abs()
        )));
    }
    Ok(cos2.min(1.0).sqrt().acos().to_degrees())
}

struct Planner<'a> {
    config: &'a DesignConfig,
    model: &'a ShiftModel,
    constants: &'a PhysicalConstants,
}

impl Planner<'_> {
    /// Base angle the solver runs on for a pair reproduced at `angle`.
    fn solve_base(&self, angle: f64) -> f64 {
        match self.config.scaling_workflow {
            ScalingWorkflow::Distance => REFERENCE_BASE_ANGLE,
            ScalingWorkflow::Model => angle,
        }
    }

    fn post_scale(&self, angle: f64) -> f64 {
        match self.config.scaling_workflow {
            ScalingWorkflow::Distance => scale_factors(angle, self.model).combined,
            ScalingWorkflow::Model => 1.0,
        }
    }

    fn mic(&self, position: Position3D, axis: Direction) -> MicSpec {
        MicSpec::new(position, axis, self.config.pattern)
    }

    /// Solves a pair-shape parameter for `target`, with the pair built by `build`.
    fn solve(&self, what: &str, target: f64, build: impl Fn(f64) -> PairGeometry) -> Result<f64> {
        solve_decreasing(0.0, MAX_SPACING, target, SOLVE_TOLERANCE, |x| {
            let pair = build(x);
            if pair.validate().is_err() {
                return Ok(None);
            }
            sra_or_unbounded(&pair, self.model, self.constants)
        })
        .map_err(|e| e.within(what))
    }

    /// Lateral spacing of a mirror-symmetric pair `(mic at +y, axis)`.
    fn symmetric_spacing(&self, what: &str, axis: Direction, target: f64) -> Result<f64> {
        let base = self.solve_base(target);
        let d = self.solve(what, target, |d| {
            let left = self.mic(Position3D::new(0.0, d / 2.0, 0.0), axis);
            PairGeometry { left, right: left.mirrored(), base_angle: base }
        })?;
        Ok(d * self.post_scale(target))
    }

    /// Longitudinal setback placing the second row of a side pair.
    ///
    /// `front` is the front-row mic (on +y) and `rear_lateral` the lateral
    /// position of the rear-row mic. The distance workflow solves the pair as
    /// a symmetric pair and places it with Pythagoras; the model workflow
    /// bisects on the setback with the real geometry.
    fn side_setback(&self, what: &str, front: MicSpec, rear_axis: Direction, rear_lateral: f64, target: f64) -> Result<f64> {
        let lateral = front.position.y - rear_lateral;
        match self.config.scaling_workflow {
            ScalingWorkflow::Distance => {
                let opening = angle_between(front.axis.unit_vector(), rear_axis.unit_vector()) / 2.0;
                let base = self.solve_base(target);
                let d = self.solve(what, target, |d| PairGeometry {
                    left: MicSpec::new(
                        Position3D::new(0.0, d / 2.0, 0.0),
                        Direction::new(opening, rear_axis.elevation),
                        self.config.pattern,
                    ),
                    right: MicSpec::new(
                        Position3D::new(0.0, -d / 2.0, 0.0),
                        Direction::new(-opening, front.axis.elevation),
                        self.config.pattern,
                    ),
                    base_angle: base,
                })? * self.post_scale(target);
                if d < lateral.abs() {
                    return Err(Error::NoSolution(format!(
                        "{what}: spacing {d:.3} m is shorter than the {:.3} m lateral offset between rows",
                        lateral.abs()
                    )));
                }
                Ok((d * d - lateral * lateral).sqrt())
            }
            ScalingWorkflow::Model => self.solve(what, target, |s| PairGeometry {
                left: self.mic(
                    Position3D::new(front.position.x - s, rear_lateral, front.position.z),
                    rear_axis,
                ),
                right: front,
                base_angle: target,
            }),
        }
    }
}

/// Designs the nine-microphone array for the configured layout.
pub fn design_auro9(config: &DesignConfig, model: &ShiftModel) -> Result<ArrayDesign> {
    config.validate()?;
    model.validate()?;
    let layout = build_auro9_layout(&config.layout).map_err(|e| e.within("speaker layout"))?;
    if config.layout.elevation == 0.0 {
        return Err(Error::NoSolution(
            "speaker layout: height speakers coincide with the base layer at 0° elevation".into(),
        ));
    }
    let constants = config.layout.constants;
    let planner = Planner { config, model, constants: &constants };
    let angles = layout.pair_angles;
    let axis_angle = config.base_height_axis_angle;

    let front_az = config.front_side_axis;
    let surround_az = 180.0 - config.surround_axis_offset;
    let hfront_az = config.height_front_axis;
    let hsurround_az = 180.0 - config.height_surround_axis;
    let front_tilt = layer_tilt(front_az, hfront_az, axis_angle).map_err(|e| e.within("front tilt"))?;
    let surround_tilt = layer_tilt(surround_az, hsurround_az, axis_angle).map_err(|e| e.within("surround tilt"))?;

    let l_axis = Direction::new(front_az, -front_tilt);
    let c_axis = Direction::new(0.0, -front_tilt);
    let ls_axis = Direction::new(surround_az, -surround_tilt);
    let hl_axis = Direction::new(hfront_az, front_tilt);
    let hls_axis = Direction::new(hsurround_az, surround_tilt);

    // Front triplet: the L–C pair, C ahead of the L–R line.
    let front_target = angles.front_center;
    let front_base = planner.solve_base(front_target);
    let offset = config.center_offset;
    let half_span = planner.solve("front pair", front_target, |w| PairGeometry {
        left: planner.mic(Position3D::new(0.0, w, 0.0), l_axis),
        right: planner.mic(Position3D::new(offset, 0.0, 0.0), c_axis),
        base_angle: front_base,
    })? * planner.post_scale(front_target);
    let center_offset = if config.scale_center_offset && config.scaling_workflow == ScalingWorkflow::Distance {
        offset * planner.post_scale(front_target)
    } else {
        offset
    };

    let surround_spacing = planner.symmetric_spacing("surround pair", ls_axis, angles.surround)?;
    let l_mic = planner.mic(Position3D::new(0.0, half_span, 0.0), l_axis);
    let setback = planner.side_setback("side pair", l_mic, ls_axis, surround_spacing / 2.0, angles.side)?;

    let h = config.vertical_spacing;
    let hf_spacing = planner.symmetric_spacing("height front pair", hl_axis, angles.height_front)?;
    let hs_spacing = planner.symmetric_spacing("height surround pair", hls_axis, angles.height_surround)?;
    let hl_mic = planner.mic(Position3D::new(0.0, hf_spacing / 2.0, h), hl_axis);
    let h_setback = planner.side_setback("height side pair", hl_mic, hls_axis, hs_spacing / 2.0, angles.height_side)?;

    let c_mic = planner.mic(Position3D::new(center_offset, 0.0, 0.0), c_axis);
    let ls_mic = planner.mic(Position3D::new(-setback, surround_spacing / 2.0, 0.0), ls_axis);
    let hls_mic = planner.mic(Position3D::new(-h_setback, hs_spacing / 2.0, h), hls_axis);

    let mics = vec![
        NamedMic { name: "L".into(), mic: l_mic },
        NamedMic { name: "R".into(), mic: l_mic.mirrored() },
        NamedMic { name: "C".into(), mic: c_mic },
        NamedMic { name: "Ls".into(), mic: ls_mic },
        NamedMic { name: "Rs".into(), mic: ls_mic.mirrored() },
        NamedMic { name: "HL".into(), mic: hl_mic },
        NamedMic { name: "HR".into(), mic: hl_mic.mirrored() },
        NamedMic { name: "HLs".into(), mic: hls_mic },
        NamedMic { name: "HRs".into(), mic: hls_mic.mirrored() },
    ];
    let derived_dimensions = DerivedDimensions::from_mics(&mics)?;
    let mut design = ArrayDesign {
        config: *config,
        model: *model,
        mics,
        derived_dimensions,
        validation: ValidationReport { pairs: vec![], vertical: vec![], max_abs_delta_deg: None, warnings: vec![] },
    };
    design.validation = validate_design(&design, &layout, model, &constants)?;
    Ok(design)
}

/// Pair of design mics named `first`, `second`, at reproduction angle `base`.
pub fn design_pair(design: &ArrayDesign, first: &str, second: &str, base_angle: f64) -> Result<PairGeometry> {
    Ok(PairGeometry {
        left: *find_mic(&design.mics, first)?,
        right: *find_mic(&design.mics, second)?,
        base_angle,
    })
}

fn speaker_bisector(layout: &SpeakerLayout, a: &str, b: &str) -> Result<f64> {
    let pos = |n: &str| {
        layout
            .channel(speaker_for_mic(n))
            .map(|c| c.position)
            .ok_or_else(|| Error::InvalidInput(format!("layout has no channel '{n}'")))
    };
    let (pa, pb) = (pos(a)?, pos(b)?);
    let sum = pa * (1.0 / pa.norm()) + pb * (1.0 / pb.norm());
    Ok(sum.y.atan2(sum.x).to_degrees())
}

/// Recomputes recording angles, decorrelation cutoffs and the vertical
/// level check for every pair of a design.
pub fn validate_design(
    design: &ArrayDesign,
    layout: &SpeakerLayout,
    model: &ShiftModel,
    constants: &PhysicalConstants,
) -> Result<ValidationReport> {
    let mut warnings = Vec::new();
    let mut pairs = Vec::with_capacity(ADJACENT_PAIRS.len());
    for (name, first, second) in ADJACENT_PAIRS {
        let target = pair_target(layout, name);
        let pair = design_pair(design, first, second, target)?;
        let (achieved, tilt) = match recording_angle(&pair, model, constants) {
            Ok(r) => {
                let bisector = speaker_bisector(layout, first, second)?;
                (Some(r.sra), Some(wrap_azimuth(r.span_center() - bisector)))
            }
            Err(Error::Unbounded(d)) => {
                warnings.push(format!("{name}: recording angle unbounded ({d})"));
                (None, None)
            }
            Err(e) => return Err(e.within(name)),
        };
        let cutoff = match decorrelation_cutoff(&pair, DFC_THRESHOLD, constants) {
            Ok(f) => Some(f),
            Err(Error::NeverDecorrelates(d)) => {
                warnings.push(format!("{name}: {d}"));
                None
            }
            Err(e) => return Err(e.within(name)),
        };
        pairs.push(PairCheck {
            name: name.to_string(),
            mics: [first.to_string(), second.to_string()],
            target_deg: target,
            achieved_deg: achieved,
            delta_deg: achieved.map(|a| a - target),
            tilt_deg: tilt,
            cutoff_hz: cutoff,
        });
    }

    let mut vertical = Vec::with_capacity(VERTICAL_PAIRS.len());
    for (base, height) in VERTICAL_PAIRS {
        let pair = design_pair(design, base, height, REFERENCE_BASE_ANGLE)?;
        let source = pair.left.axis.unit_vector();
        let cues = cues_for_direction(&pair, source, constants);
        let required = min_vertical_icld(cues.ictd.abs()).ok();
        let satisfied = required.is_some_and(|r| cues.icld >= r);
        if !satisfied {
            warnings.push(format!(
                "{base}/{height}: on-axis level difference {:.2} dB is below the {} dB layer-separation guideline for distant sources",
                cues.icld,
                required.map_or("n/a".to_string(), |r| format!("{r:.2}")),
            ));
        }
        let cutoff = decorrelation_cutoff(&pair, DFC_THRESHOLD, constants).ok();
        vertical.push(VerticalCheck {
            base: base.to_string(),
            height: height.to_string(),
            axis_angle_deg: pair.left.axis.angle_to(pair.right.axis),
            ictd_ms: cues.ictd,
            icld_db: cues.icld,
            required_icld_db: required,
            satisfied,
            cutoff_hz: cutoff,
        });
    }

    let (lo, hi) = RECOMMENDED_VERTICAL;
    let dv = design.derived_dimensions.vertical_spacing;
    if !(lo - 1e-9..=hi + 1e-9).contains(&dv) {
        warnings.push(format!("vertical spacing {dv:.3} m lies outside the recommended {lo}–{hi} m"));
    }
    if design.config.scaling_workflow == ScalingWorkflow::Distance {
        warnings.push(
            "distance workflow: spacings were scaled after a 60° solve, so recording angles only approximate their targets"
                .into(),
        );
        if !design.config.scale_center_offset {
            warnings.push("center offset kept at its unscaled value".into());
        }
    }
    let max_abs_delta_deg = pairs
        .iter()
        .filter_map(|p| p.delta_deg.map(f64::abs))
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));

    Ok(ValidationReport { pairs, vertical, max_abs_delta_deg, warnings })
}

/// Renders a design as `json` (full document) or `csv` (dimension table).
pub fn export_design(design: &ArrayDesign, format: &str) -> Result<String> {
    match format {
        "json" => to_json(design),
        "csv" => Ok(to_csv(
            &["dimension", "value_m"],
            design
                .derived_dimensions
                .entries()
                .into_iter()
                .map(|(name, v)| vec![Cell::Text(name), Cell::Num(v)]),
        )),
        other => Err(Error::UnknownFormat(format!("'{other}' (json, csv)"))),
    }
}
