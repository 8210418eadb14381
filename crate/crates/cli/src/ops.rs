//! Request types and handlers shared by the command line and the HTTP API.
//!
//! Each handler takes a request value and returns the rendered document, so
//! both front ends emit the same bytes for the same logical request.

use serde::{Deserialize, Serialize};
use sra_core::design::{design_auro9, export_design, validate_design, ArrayDesign, DesignConfig};
use sra_core::diffuse::{coincident_dfc, decorrelation_cutoff, dfc_curve, log_frequencies};
use sra_core::imaging::{apply_distance_scale, recording_angle, solve_spacing, spaced_pair, PairGeometry};
use sra_core::layout::{build_auro9_layout, LayoutSpec};
use sra_core::output::{to_csv, to_json, Cell};
use sra_core::pattern::PolarPattern;
use sra_core::shift::{checked_scale_factors, ScaleCurve, ShiftModel};
use sra_core::{Error, PhysicalConstants, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::UnknownFormat(format!("'{other}' (json, csv)"))),
        }
    }
}

fn default_model() -> ShiftModel {
    ShiftModel::default()
}

/// Larger azimuth first: the counterclockwise mic is the pair's `left`.
fn ordered_axes(axes: [f64; 2]) -> (f64, f64) {
    (axes[0].max(axes[1]), axes[0].min(axes[1]))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleFactorQuery {
    pub angle: f64,
    pub itd_scale_model: Option<String>,
    pub ild_scale_model: Option<String>,
}

impl ScaleFactorQuery {
    fn model(&self) -> Result<ShiftModel> {
        let mut m = ShiftModel::default();
        if let Some(id) = &self.itd_scale_model {
            m.itd_scale_model = ScaleCurve::parse(id)?;
        }
        if let Some(id) = &self.ild_scale_model {
            m.ild_scale_model = ScaleCurve::parse(id)?;
        }
        Ok(m)
    }
}

pub fn scale_factor(q: &ScaleFactorQuery) -> Result<String> {
    to_json(&checked_scale_factors(q.angle, &q.model()?)?)
}

/// Curves behind the scale-factor figures: `fig6` is the time factor,
/// `fig7` the level factor.
pub fn scale_factor_sweep(preset: &str, q: &ScaleFactorQuery, format: Format) -> Result<String> {
    let column = match preset {
        "fig6" => "itd",
        "fig7" => "ild",
        other => return Err(Error::InvalidInput(format!("unknown sweep preset '{other}' (fig6, fig7)"))),
    };
    let model = q.model()?;
    let rows = (10..=170)
        .map(|a| {
            let a = a as f64;
            let sf = checked_scale_factors(a, &model)?;
            Ok((a, if column == "itd" { sf.itd_factor } else { sf.ild_factor }))
        })
        .collect::<Result<Vec<_>>>()?;
    match format {
        Format::Csv => Ok(to_csv(
            &["angle_deg", column],
            rows.iter().map(|&(a, v)| vec![Cell::Num(a), Cell::Num(v)]),
        )),
        Format::Json => {
            #[derive(Serialize)]
            struct Point {
                angle_deg: f64,
                factor: f64,
            }
            #[derive(Serialize)]
            struct Sweep<'a> {
                preset: &'a str,
                factor: &'a str,
                points: Vec<Point>,
            }
            to_json(&Sweep {
                preset,
                factor: column,
                points: rows.into_iter().map(|(angle_deg, factor)| Point { angle_deg, factor }).collect(),
            })
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutQuery {
    pub radius: Option<f64>,
    pub elevation: Option<f64>,
    pub base_front_angle: Option<f64>,
    pub base_surround_angle: Option<f64>,
    pub compensate_height_front: Option<bool>,
    pub compensate_height_surround: Option<bool>,
    pub speed_of_sound: Option<f64>,
}

impl LayoutQuery {
    pub fn spec(&self) -> Result<LayoutSpec> {
        let d = LayoutSpec::default();
        let spec = LayoutSpec {
            radius: self.radius.unwrap_or(d.radius),
            elevation: self.elevation.unwrap_or(d.elevation),
            base_front_angle: self.base_front_angle.unwrap_or(d.base_front_angle),
            base_surround_angle: self.base_surround_angle.unwrap_or(d.base_surround_angle),
            compensate_height_front: self.compensate_height_front.unwrap_or(d.compensate_height_front),
            compensate_height_surround: self.compensate_height_surround.unwrap_or(d.compensate_height_surround),
            constants: match self.speed_of_sound {
                Some(c) => PhysicalConstants::new(c)?,
                None => d.constants,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn layout(q: &LayoutQuery) -> Result<String> {
    to_json(&build_auro9_layout(&q.spec()?)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SraRequest {
    #[serde(flatten)]
    pub pair: PairGeometry,
    #[serde(default = "default_model")]
    pub model: ShiftModel,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

pub fn sra(req: &SraRequest, format: Format) -> Result<String> {
    req.pair.validate()?;
    let result = recording_angle(&req.pair, &req.model, &req.constants)?;
    match format {
        Format::Json => to_json(&result),
        Format::Csv => Ok(to_csv(
            &["azimuth_deg", "ictd_ms", "icld_db", "shift_percent"],
            result.curve.iter().map(|p| {
                vec![Cell::Num(p.azimuth_deg), Cell::Num(p.ictd_ms), Cell::Num(p.icld_db), Cell::Num(p.shift_percent)]
            }),
        )),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRequest {
    #[serde(default)]
    pub pattern: PolarPattern,
    /// Axis azimuths of the two mics, degrees, either order.
    pub axes: [f64; 2],
    pub target_sra: f64,
    #[serde(default = "default_base_angle")]
    pub base_angle: f64,
    #[serde(default)]
    pub longitudinal_offset: f64,
    /// Also report the spacing scaled by this reproduction angle's factor.
    #[serde(default)]
    pub scale_to_angle: Option<f64>,
    #[serde(default = "default_model")]
    pub model: ShiftModel,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

fn default_base_angle() -> f64 {
    60.0
}

#[derive(Debug, Serialize)]
struct ScaledSpacing {
    base_angle_deg: f64,
    factor: f64,
    spacing_m: f64,
}

#[derive(Debug, Serialize)]
struct SolveResponse {
    spacing_m: f64,
    recording_angle_deg: f64,
    scaled: Option<ScaledSpacing>,
}

pub fn solve(req: &SolveRequest) -> Result<String> {
    req.model.validate()?;
    let axes = ordered_axes(req.axes);
    let d = solve_spacing(
        req.pattern,
        axes,
        req.target_sra,
        req.base_angle,
        &req.model,
        req.longitudinal_offset,
        &req.constants,
    )?;
    let pair = spaced_pair(req.pattern, axes, d, req.longitudinal_offset, req.base_angle);
    let achieved = recording_angle(&pair, &req.model, &req.constants)?.sra;
    let scaled = match req.scale_to_angle {
        Some(a) => {
            let factor = checked_scale_factors(a, &req.model)?.combined;
            Some(ScaledSpacing { base_angle_deg: a, factor, spacing_m: apply_distance_scale(d, a, &req.model) })
        }
        None => None,
    };
    to_json(&SolveResponse { spacing_m: d, recording_angle_deg: achieved, scaled })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfcRequest {
    #[serde(default)]
    pub pattern: PolarPattern,
    pub spacing: f64,
    pub axes: [f64; 2],
    /// Lay the pair out vertically (second mic `spacing` above the first).
    #[serde(default)]
    pub vertical: bool,
    /// Elevation of both axes for vertical pairs: first, second.
    #[serde(default)]
    pub elevations: [f64; 2],
    #[serde(default = "default_fmin")]
    pub fmin: f64,
    #[serde(default = "default_fmax")]
    pub fmax: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

fn default_fmin() -> f64 {
    20.0
}
fn default_fmax() -> f64 {
    20_000.0
}
fn default_points() -> usize {
    256
}
fn default_threshold() -> f64 {
    0.1
}

impl DfcRequest {
    /// Wide cardioids 1 m apart at ±60°.
    pub fn fig11() -> Self {
        Self {
            pattern: PolarPattern::WIDE_CARDIOID,
            spacing: 1.0,
            axes: [60.0, -60.0],
            vertical: false,
            elevations: [0.0, 0.0],
            fmin: default_fmin(),
            fmax: default_fmax(),
            points: default_points(),
            threshold: default_threshold(),
            constants: PhysicalConstants::default(),
        }
    }

    pub fn pair(&self) -> Result<PairGeometry> {
        if !(self.spacing >= 0.0 && self.spacing.is_finite()) {
            return Err(Error::InvalidInput(format!("spacing must be non-negative, got {}", self.spacing)));
        }
        if self.points > 4096 {
            return Err(Error::InvalidInput(format!("at most 4096 points, got {}", self.points)));
        }
        let axes = ordered_axes(self.axes);
        let mut pair = spaced_pair(self.pattern, axes, self.spacing, 0.0, 60.0);
        if self.vertical {
            use sra_core::{Direction, Position3D};
            pair.left.position = Position3D::new(0.0, 0.0, 0.0);
            pair.right.position = Position3D::new(0.0, 0.0, self.spacing);
            pair.left.axis = Direction::new(self.axes[0], self.elevations[0]);
            pair.right.axis = Direction::new(self.axes[1], self.elevations[1]);
        }
        Ok(pair)
    }
}

#[derive(Debug, Serialize)]
struct DfcPoint {
    frequency_hz: f64,
    dfc: f64,
}

#[derive(Debug, Serialize)]
struct DfcResponse {
    pair: PairGeometry,
    threshold: f64,
    /// `None` when the pair never decorrelates within the audio band.
    cutoff_hz: Option<f64>,
    points: Vec<DfcPoint>,
}

pub fn dfc(req: &DfcRequest, format: Format) -> Result<String> {
    let pair = req.pair()?;
    let freqs = log_frequencies(req.fmin, req.fmax, req.points)?;
    let curve = dfc_curve(&pair, &freqs, &req.constants)?;
    match format {
        Format::Csv => Ok(to_csv(
            &["frequency_hz", "dfc"],
            curve.points.iter().map(|&(f, v)| vec![Cell::Num(f), Cell::Num(v)]),
        )),
        Format::Json => {
            let cutoff_hz = match decorrelation_cutoff(&pair, req.threshold, &req.constants) {
                Ok(f) => Some(f),
                Err(Error::NeverDecorrelates(_)) => None,
                Err(e) => return Err(e),
            };
            to_json(&DfcResponse {
                pair,
                threshold: req.threshold,
                cutoff_hz,
                points: curve.points.into_iter().map(|(frequency_hz, dfc)| DfcPoint { frequency_hz, dfc }).collect(),
            })
        }
    }
}

const FIG3_PATTERNS: [&str; 6] = ["omni", "wide-cardioid", "cardioid", "supercardioid", "hypercardioid", "figure-eight"];

/// Coincident-pair correlation against the angle between the axes, one
/// column per named pattern, 0–180° in 1° steps.
pub fn dfc_fig3(format: Format) -> Result<String> {
    let patterns = FIG3_PATTERNS
        .iter()
        .map(|n| PolarPattern::from_name(n))
        .collect::<Result<Vec<_>>>()?;
    let angles: Vec<f64> = (0..=180).map(f64::from).collect();
    match format {
        Format::Csv => {
            let mut header = vec!["angle_deg"];
            header.extend(FIG3_PATTERNS);
            Ok(to_csv(
                &header,
                angles.iter().map(|&a| {
                    let mut row = vec![Cell::Num(a)];
                    row.extend(patterns.iter().map(|&p| Cell::Num(coincident_dfc(p, a))));
                    row
                }),
            ))
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Series<'a> {
                pattern: &'a str,
                values: Vec<f64>,
            }
            #[derive(Serialize)]
            struct Table<'a> {
                angles_deg: &'a [f64],
                curves: Vec<Series<'a>>,
            }
            to_json(&Table {
                angles_deg: &angles,
                curves: FIG3_PATTERNS
                    .iter()
                    .zip(&patterns)
                    .map(|(&name, &p)| Series { pattern: name, values: angles.iter().map(|&a| coincident_dfc(p, a)).collect() })
                    .collect(),
            })
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct DesignRequest {
    #[serde(flatten)]
    pub config: DesignConfig,
    #[serde(default = "default_model")]
    pub model: ShiftModel,
}

pub fn design(req: &DesignRequest, format: Format) -> Result<String> {
    let d = design_auro9(&req.config, &req.model)?;
    export_design(&d, match format {
        Format::Json => "json",
        Format::Csv => "csv",
    })
}

pub fn preset_auro9() -> Result<String> {
    to_json(&DesignConfig::default())
}

/// Re-checks a stored design against the layout its config describes.
pub fn validate(design_json: &str) -> Result<String> {
    let design: ArrayDesign = serde_json::from_str(design_json)
        .map_err(|e| Error::InvalidInput(format!("not a design document: {e}")))?;
    let layout = build_auro9_layout(&design.config.layout)?;
    let report = validate_design(&design, &layout, &design.model, &design.config.layout.constants)?;
    to_json(&report)
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    detail: &'a str,
}

/// `{"error": name, "detail": text}` for a failed request.
pub fn error_json(name: &str, detail: &str) -> String {
    to_json(&ErrorBody { error: name, detail }).unwrap_or_else(|_| format!("{{\"error\": \"{name}\"}}\n"))
}
