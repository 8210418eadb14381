use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sra_core::design::{DesignConfig, ScalingWorkflow};
use sra_core::pattern::PolarPattern;
use sra_core::Result;

use crate::ops::{self, DesignRequest, DfcRequest, Format, LayoutQuery, ScaleFactorQuery, SolveRequest, SraRequest};

/// Loudspeaker-layout and recording-angle designer for nine-channel 3D
/// microphone arrays.
#[derive(Debug, Parser)]
#[command(name = "sra", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nine-channel loudspeaker positions, delays and pair angles.
    Layout(LayoutArgs),
    /// Recording angle and shift curve of a spaced pair.
    Sra(SraArgs),
    /// Spacing that gives a pair the target recording angle.
    Solve(SolveArgs),
    /// Diffuse-field correlation curves.
    Dfc(DfcArgs),
    /// Scale factors for a loudspeaker base angle.
    ScaleFactor(ScaleFactorArgs),
    /// Full array design.
    Design(DesignArgs),
    /// Re-check a stored design file.
    Validate(ValidateArgs),
    /// Run the HTTP API and web frontend.
    Serve(ServeArgs),
}

fn parse_pattern(s: &str) -> std::result::Result<PolarPattern, String> {
    PolarPattern::parse(s).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected two comma-separated numbers such as -44,44, got '{s}'"));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    Ok([num(a)?, num(b)?])
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    Format::parse(s).map_err(|e| e.to_string())
}

fn parse_workflow(s: &str) -> std::result::Result<ScalingWorkflow, String> {
    ScalingWorkflow::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of standard output.
    #[arg(short = 'o', long = "output")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    #[arg(long, default_value_t = 3.0)]
    radius: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    elevation: f64,
    #[arg(long, default_value_t = 60.0)]
    base_front_angle: f64,
    #[arg(long, default_value_t = 120.0)]
    base_surround_angle: f64,
    /// Keep the height-front speakers straight above the base ones.
    #[arg(long)]
    no_front_compensation: bool,
    /// Try to match the height-surround angle to the base one as well.
    #[arg(long)]
    surround_compensation: bool,
    #[arg(long)]
    speed_of_sound: Option<f64>,
    #[command(flatten)]
    output: Output,
}

impl LayoutArgs {
    fn query(&self) -> LayoutQuery {
        LayoutQuery {
            radius: Some(self.radius),
            elevation: Some(self.elevation),
            base_front_angle: Some(self.base_front_angle),
            base_surround_angle: Some(self.base_surround_angle),
            compensate_height_front: Some(!self.no_front_compensation),
            compensate_height_surround: Some(self.surround_compensation),
            speed_of_sound: self.speed_of_sound,
        }
    }
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Polar pattern name or omni coefficient.
    #[arg(long, default_value = "wide-cardioid", value_parser = parse_pattern)]
    pattern: PolarPattern,
    /// Axis azimuths in degrees, e.g. -44,44.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    axes: [f64; 2],
    /// Reproduction angle of the loudspeaker pair.
    #[arg(long, default_value_t = 60.0)]
    base_angle: f64,
    /// Forward offset of the right mic, meters.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    offset: f64,
}

#[derive(Debug, Args)]
pub struct SraArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    spacing: f64,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    target_sra: f64,
    /// Also scale the spacing by the factor of this reproduction angle.
    #[arg(long)]
    scale_to: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct DfcArgs {
    /// fig3: coincident pairs against axis angle; fig11: 1 m wide cardioids at ±60°.
    #[arg(long, value_parser = ["fig3", "fig11"], conflicts_with_all = ["spacing", "axes", "vertical"])]
    preset: Option<String>,
    #[arg(long, default_value = "wide-cardioid", value_parser = parse_pattern)]
    pattern: PolarPattern,
    #[arg(long, required_unless_present = "preset")]
    spacing: Option<f64>,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, required_unless_present = "preset")]
    axes: Option<[f64; 2]>,
    /// Stack the second mic above the first.
    #[arg(long)]
    vertical: bool,
    /// Axis elevations for vertical pairs, e.g. 0,90.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, requires = "vertical")]
    elevations: Option<[f64; 2]>,
    #[arg(long, default_value_t = 20.0)]
    fmin: f64,
    #[arg(long, default_value_t = 20_000.0)]
    fmax: f64,
    #[arg(long, default_value_t = 256)]
    points: usize,
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct ScaleFactorArgs {
    #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
    angle: Option<f64>,
    /// fig6: time factor curve; fig7: level factor curve.
    #[arg(long, value_parser = ["fig6", "fig7"])]
    sweep: Option<String>,
    #[arg(long)]
    itd_model: Option<String>,
    #[arg(long)]
    ild_model: Option<String>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Layout preset; only auro9 is available.
    #[arg(value_parser = ["auro9"])]
    preset: String,
    /// Start from this DesignConfig JSON instead of the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    elevation: Option<f64>,
    #[arg(long, value_parser = parse_workflow)]
    workflow: Option<ScalingWorkflow>,
    #[arg(long)]
    vertical_spacing: Option<f64>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Design JSON written by `sra design`.
    #[arg(long)]
    design: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "SRA_PORT", default_value_t = 8080)]
    pub port: u16,
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| sra_core::Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

/// Document produced by a one-shot command and where it should go.
pub struct Rendered {
    pub text: String,
    pub path: Option<PathBuf>,
}

/// Runs any subcommand except `serve`.
pub fn render(command: &Command) -> Result<Rendered> {
    let done = |text: String, out: &Output| Rendered { text, path: out.path.clone() };
    match command {
        Command::Layout(a) => Ok(done(ops::layout(&a.query())?, &a.output)),
        Command::Sra(a) => {
            let p = &a.pair;
            let axes = (p.axes[0].max(p.axes[1]), p.axes[0].min(p.axes[1]));
            let req = SraRequest {
                pair: sra_core::imaging::spaced_pair(p.pattern, axes, a.spacing, p.offset, p.base_angle),
                model: Default::default(),
                constants: Default::default(),
            };
            Ok(done(ops::sra(&req, a.format)?, &a.output))
        }
        Command::Solve(a) => {
            let p = &a.pair;
            let req = SolveRequest {
                pattern: p.pattern,
                axes: p.axes,
                target_sra: a.target_sra,
                base_angle: p.base_angle,
                longitudinal_offset: p.offset,
                scale_to_angle: a.scale_to,
                model: Default::default(),
                constants: Default::default(),
            };
            Ok(done(ops::solve(&req)?, &a.output))
        }
        Command::Dfc(a) => {
            let text = match a.preset.as_deref() {
                Some("fig3") => ops::dfc_fig3(a.format)?,
                Some(_) => ops::dfc(&DfcRequest { pattern: a.pattern, ..DfcRequest::fig11() }, a.format)?,
                None => {
                    let req = DfcRequest {
                        pattern: a.pattern,
                        spacing: a.spacing.unwrap_or_default(),
                        axes: a.axes.unwrap_or_default(),
                        vertical: a.vertical,
                        elevations: a.elevations.unwrap_or_default(),
                        fmin: a.fmin,
                        fmax: a.fmax,
                        points: a.points,
                        threshold: a.threshold,
                        constants: Default::default(),
                    };
                    ops::dfc(&req, a.format)?
                }
            };
            Ok(done(text, &a.output))
        }
        Command::ScaleFactor(a) => {
            let q = ScaleFactorQuery {
                angle: a.angle.unwrap_or_default(),
                itd_scale_model: a.itd_model.clone(),
                ild_scale_model: a.ild_model.clone(),
            };
            let text = match &a.sweep {
                Some(preset) => ops::scale_factor_sweep(preset, &q, a.format)?,
                None => ops::scale_factor(&q)?,
            };
            Ok(done(text, &a.output))
        }
        Command::Design(a) => {
            let mut req = match &a.config {
                Some(path) => serde_json::from_str::<DesignRequest>(&read_file(path)?)
                    .map_err(|e| sra_core::Error::InvalidInput(format!("bad design config: {e}")))?,
                None => DesignRequest { config: DesignConfig::default(), model: Default::default() },
            };
            let c = &mut req.config;
            c.layout.radius = a.radius.unwrap_or(c.layout.radius);
            c.layout.elevation = a.elevation.unwrap_or(c.layout.elevation);
            c.scaling_workflow = a.workflow.unwrap_or(c.scaling_workflow);
            c.vertical_spacing = a.vertical_spacing.unwrap_or(c.vertical_spacing);
            Ok(done(ops::design(&req, a.format)?, &a.output))
        }
        Command::Validate(a) => Ok(done(ops::validate(&read_file(&a.design)?)?, &a.output)),
        Command::Serve(_) => Err(sra_core::Error::InvalidInput("serve is not a one-shot command".into())),
    }
}
