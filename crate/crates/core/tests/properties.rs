use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use sra_core::diffuse::spaced_dfc;
use sra_core::imaging::{
    apply_distance_scale, interchannel_cues, recording_angle, solve_spacing, spaced_pair, PairGeometry,
};
use sra_core::shift::{min_vertical_icld, shift_percent, CueSet};
use sra_core::{Direction, MicSpec, PhysicalConstants, PolarPattern, Position3D, ShiftModel};

const WC: PolarPattern = PolarPattern::WIDE_CARDIOID;

fn c() -> PhysicalConstants {
    PhysicalConstants::default()
}

/// Cues from explicit path lengths out of a distant wavefront plane and
/// gains from the off-axis angle, without the library's vector shortcuts.
fn brute_force_cues(pair: &PairGeometry, azimuth: f64, c: f64) -> (f64, f64) {
    let (sa, ca) = azimuth.to_radians().sin_cos();
    let plane_distance = 1000.0;
    let path = |p: Position3D| plane_distance - (p.x * ca + p.y * sa);
    let ictd = (path(pair.right.position) - path(pair.left.position)) / c * 1000.0;
    let gain = |m: &MicSpec| {
        let (az, el) = (m.axis.azimuth.to_radians(), m.axis.elevation.to_radians());
        let axis = [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()];
        let cos_off = (axis[0] * ca + axis[1] * sa).clamp(-1.0, 1.0);
        let off = cos_off.acos();
        let a = m.pattern.omni_coefficient();
        (a + (1.0 - a) * off.cos()).abs()
    };
    (ictd, 20.0 * (gain(&pair.left) / gain(&pair.right)).log10())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cues_match_brute_force(
        a in 0.0f64..=1.0,
        xl in -1.0f64..1.0, yl in -1.0f64..1.0, zl in -0.5f64..0.5,
        xr in -1.0f64..1.0, yr in -1.0f64..1.0, zr in -0.5f64..0.5,
        azl in -180.0f64..180.0, ell in -60.0f64..60.0,
        azr in -180.0f64..180.0, elr in -60.0f64..60.0,
        source in -180.0f64..180.0,
    ) {
        let p = PolarPattern::new(a).unwrap();
        let pair = PairGeometry {
            left: MicSpec::new(Position3D::new(xl, yl, zl), Direction::new(azl, ell), p),
            right: MicSpec::new(Position3D::new(xr, yr, zr), Direction::new(azr, elr), p),
            base_angle: 60.0,
        };
        let cues = interchannel_cues(&pair, source, &c());
        let (ictd, icld) = brute_force_cues(&pair, source, 343.0);
        prop_assert!((cues.ictd - ictd).abs() < 1e-9, "ictd {} vs {}", cues.ictd, ictd);
        let gl = pair.left.gain_toward(Direction::horizontal(source).unit_vector()).abs();
        let gr = pair.right.gain_toward(Direction::horizontal(source).unit_vector()).abs();
        // level ratios near a null are ill-conditioned in either form
        if gl > 1e-3 && gr > 1e-3 {
            prop_assert!((cues.icld - icld).abs() < 1e-9, "icld {} vs {}", cues.icld, icld);
        }
    }

    #[test]
    fn mirrored_pairs_have_equal_half_angles(
        half_axis in 30.0f64..70.0,
        spacing in 0.3f64..1.2,
    ) {
        let pair = spaced_pair(WC, (half_axis, -half_axis), spacing, 0.0, 60.0);
        let r = recording_angle(&pair, &ShiftModel::default(), &c()).unwrap();
        prop_assert!((r.half_angles.left - r.half_angles.right).abs() < 0.01);
        prop_assert!(r.center_azimuth.abs() < 0.01);
    }

    #[test]
    fn shift_is_odd_and_bounded(t in -3.0f64..3.0, l in -40.0f64..40.0, base in 20.0f64..150.0) {
        let m = ShiftModel::default();
        let s = shift_percent(CueSet::new(t, l), base, &m);
        let n = shift_percent(CueSet::new(-t, -l), base, &m);
        prop_assert!(s.abs() <= 100.0);
        prop_assert!((s + n).abs() < 1e-12);
    }

    #[test]
    fn omni_dfc_stays_inside_the_sinc_envelope(d in 0.05f64..1.5, f in 50.0f64..5000.0) {
        let pair = spaced_pair(PolarPattern::OMNI, (0.0, 0.0), d, 0.0, 60.0);
        let kd = 2.0 * std::f64::consts::PI * f / 343.0 * d;
        let v = spaced_dfc(&pair, f, &c()).unwrap();
        prop_assert!(v.abs() <= 1.0 / kd + 1e-3);
    }
}

#[test]
fn sra_shrinks_with_spacing_for_several_aims() {
    let m = ShiftModel::default();
    for half in [30.0, 44.0, 60.0] {
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let d = 0.3 + 0.04 * i as f64;
            let sra = recording_angle(&spaced_pair(WC, (half, -half), d, 0.0, 60.0), &m, &c()).unwrap().sra;
            assert!(sra < prev, "±{half}° at {d} m: {sra} after {prev}");
            prev = sra;
        }
    }
}

fn consistency_ratio(angle: f64) -> f64 {
    let m = ShiftModel::default();
    let model_level = solve_spacing(WC, (44.0, -44.0), angle, angle, &m, 0.0, &c()).unwrap();
    let reference = solve_spacing(WC, (44.0, -44.0), angle, 60.0, &m, 0.0, &c()).unwrap();
    model_level / apply_distance_scale(reference, angle, &m)
}

#[test]
fn distance_scaling_tracks_model_scaling_near_sixty_degrees() {
    for angle in [90.0, 97.2] {
        let r = consistency_ratio(angle);
        assert!((r - 1.0).abs() <= 0.10, "{angle}°: ratio {r}");
    }
}

/// The distance shortcut drifts further from model-level scaling at 120°
/// than at the narrower angles; pinned so a change in either path shows up.
#[test]
fn distance_scaling_drift_at_120_degrees() {
    let r = consistency_ratio(120.0);
    assert!(r > 1.10 && r < 1.20, "ratio {r}");
}

#[test]
fn vertical_icld_rule_shape() {
    assert_eq!(min_vertical_icld(0.0).unwrap(), 9.5);
    assert_abs_diff_eq!(min_vertical_icld(0.5).unwrap(), 8.25, epsilon = 1e-12);
    assert_eq!(min_vertical_icld(1.0).unwrap(), 7.0);
    assert_eq!(min_vertical_icld(10.0).unwrap(), 7.0);
    assert_eq!(min_vertical_icld(10.5).unwrap_err().name(), "OutOfRange");
    assert_eq!(min_vertical_icld(-0.1).unwrap_err().name(), "OutOfRange");
    let mut prev = f64::INFINITY;
    for i in 0..=100 {
        let v = min_vertical_icld(i as f64 * 0.1).unwrap();
        assert!(v <= prev);
        prev = v;
    }
}

#[test]
fn unbounded_and_unreachable_cases() {
    let m = ShiftModel::default();
    let narrow = spaced_pair(WC, (10.0, -10.0), 0.0, 0.0, 60.0);
    assert_eq!(recording_angle(&narrow, &m, &c()).unwrap_err().name(), "Unbounded");
    let err = solve_spacing(PolarPattern::OMNI, (0.0, 0.0), 5.0, 60.0, &m, 0.0, &c()).unwrap_err();
    assert_eq!(err.name(), "Unreachable");
    let blumlein = spaced_pair(PolarPattern::FIGURE_EIGHT, (45.0, -45.0), 0.0, 0.0, 60.0);
    assert_abs_diff_eq!(recording_angle(&blumlein, &m, &c()).unwrap().sra, 74.0, epsilon = 2.0);
}
