//! Loudspeaker-layout geometry and recording-angle design tools for
//! nine-channel 3D microphone arrays.

pub mod design;
pub mod diffuse;
pub mod error;
pub mod geometry;
pub mod imaging;
pub mod layout;
pub mod output;
pub mod pattern;
pub mod quadrature;
pub mod shift;

pub use design::{design_auro9, export_design, validate_design, ArrayDesign, DesignConfig, ScalingWorkflow};
pub use error::{Error, Result};
pub use geometry::{Direction, PhysicalConstants, Position3D};
pub use imaging::{recording_angle, solve_spacing, MicSpec, PairGeometry, RecordingAngleResult};
pub use layout::{build_auro9_layout, LayoutSpec, SpeakerLayout};
pub use pattern::PolarPattern;
pub use shift::{scale_factors, shift_percent, CueSet, ShiftModel};
