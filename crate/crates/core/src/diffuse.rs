//! Correlation of two microphone signals in an isotropic diffuse field.
//!
//! For plane waves arriving uniformly from all directions, the normalized
//! cross-correlation of two first-order microphones is
//!
//! ```text
//!            ∫ gL(Ω) gR(Ω) cos(k Δp·Ω) dΩ
//! DFC(f) = ───────────────────────────────── ,   k = 2πf/c
//!          √(∫ gL(Ω)² dΩ · ∫ gR(Ω)² dΩ)
//! ```
//!
//! Coincident pairs have a closed form. Spaced pairs are integrated on a
//! Gauss–Legendre × uniform product grid whose polar axis is aligned with
//! the displacement, so the phase term depends on the polar node only.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{PhysicalConstants, Position3D};
use crate::imaging::PairGeometry;
use crate::pattern::PolarPattern;
use crate::quadrature::{cached_rule, rung_for, LADDER};

/// Azimuthal nodes. The gain product is a degree-2 trigonometric
/// polynomial in azimuth, so any count above 2 is exact.
const AZIMUTH_NODES: usize = 24;
/// Lower bound on total grid nodes.
pub const MIN_NODES: usize = 2902;
/// Largest change allowed between a grid and its doubling.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-4;
/// Log sweep used by [`decorrelation_cutoff`].
pub const CUTOFF_SWEEP: (f64, f64, usize) = (20.0, 20_000.0, 512);

/// Closed-form diffuse-field correlation of two coincident identical
/// first-order microphones whose axes are `axis_angle_deg` apart.
pub fn coincident_dfc(pattern: PolarPattern, axis_angle_deg: f64) -> f64 {
    let a = pattern.omni_coefficient();
    let b2 = (1.0 - a).powi(2);
    (a * a + b2 * axis_angle_deg.to_radians().cos() / 3.0) / (a * a + b2 / 3.0)
}

fn orthonormal_frame(axis: Position3D) -> (Position3D, Position3D, Position3D) {
    let e = axis;
    let helper = if e.x.abs() < 0.9 {
        Position3D::new(1.0, 0.0, 0.0)
    } else {
        Position3D::new(0.0, 1.0, 0.0)
    };
    let e1 = e.cross(helper);
    let e1 = e1 * (1.0 / e1.norm());
    let e2 = e.cross(e1);
    (e, e1, e2)
}

/// Diffuse-field integrals of a pair, evaluated on one grid.
fn dfc_on_grid(pair: &PairGeometry, k: f64, rung: usize) -> f64 {
    let displacement = pair.left.position - pair.right.position;
    let d = displacement.norm();
    let polar_axis = if d > 0.0 {
        displacement * (1.0 / d)
    } else {
        Position3D::new(0.0, 0.0, 1.0)
    };
    let (e, e1, e2) = orthonormal_frame(polar_axis);
    let axis_l = pair.left.axis.unit_vector();
    let axis_r = pair.right.axis.unit_vector();
    let (pl, pr) = (pair.left.pattern, pair.right.pattern);

    // Project the axes once: direction = μ e + s (cos φ e1 + sin φ e2).
    let proj = |v: Position3D| (v.dot(e), v.dot(e1), v.dot(e2));
    let (l0, l1, l2) = proj(axis_l);
    let (r0, r1, r2) = proj(axis_r);
    let trig: Vec<(f64, f64)> = (0..AZIMUTH_NODES)
        .map(|j| (2.0 * PI * j as f64 / AZIMUTH_NODES as f64).sin_cos())
        .collect();

    let rule = cached_rule(rung);
    let (mut cross, mut auto_l, mut auto_r) = (0.0, 0.0, 0.0);
    for (&mu, &w) in rule.nodes.iter().zip(&rule.weights) {
        let s = (1.0 - mu * mu).max(0.0).sqrt();
        let (mut c, mut al, mut ar) = (0.0, 0.0, 0.0);
        for &(sin_phi, cos_phi) in &trig {
            let gl = pl.gain_from_cos(mu * l0 + s * (cos_phi * l1 + sin_phi * l2));
            let gr = pr.gain_from_cos(mu * r0 + s * (cos_phi * r1 + sin_phi * r2));
            c += gl * gr;
            al += gl * gl;
            ar += gr * gr;
        }
        cross += w * c * (k * d * mu).cos();
        auto_l += w * al;
        auto_r += w * ar;
    }
    (cross / (auto_l * auto_r).sqrt()).clamp(-1.0, 1.0)
}

/// Diffuse-field correlation coefficient of a (possibly spaced) pair at
/// `frequency_hz`. Real part, so anti-correlation keeps its sign.
pub fn spaced_dfc(pair: &PairGeometry, frequency_hz: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(frequency_hz > 0.0 && frequency_hz.is_finite()) {
        return Err(Error::InvalidInput(format!("frequency must be positive, got {frequency_hz}")));
    }
    let k = 2.0 * PI * frequency_hz / constants.speed_of_sound;
    let kd = k * pair.left.position.distance(pair.right.position);
    // The polar rule must resolve cos(kd·μ): about kd/2 oscillations.
    let wanted = (kd.ceil() as usize + 32).max(MIN_NODES.div_ceil(AZIMUTH_NODES));
    let rung = rung_for(wanted)
        .filter(|&r| r + 1 < LADDER.len())
        .ok_or_else(|| {
            Error::QuadratureUnconverged(format!("k·d = {kd:.1} is beyond the largest quadrature grid"))
        })?;
    let value = dfc_on_grid(pair, k, rung);
    let check = dfc_on_grid(pair, k, rung + 1);
    if (value - check).abs() > CONVERGENCE_TOLERANCE {
        return Err(Error::QuadratureUnconverged(format!(
            "grid doubling changed the coefficient by {:.2e} at {frequency_hz} Hz",
            (value - check).abs()
        )));
    }
    Ok(check)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    pub pair: PairGeometry,
    /// `(frequency Hz, coefficient)`, frequency strictly increasing.
    pub points: Vec<(f64, f64)>,
}

/// `count` log-spaced frequencies from `fmin` to `fmax` inclusive.
pub fn log_frequencies(fmin: f64, fmax: f64, count: usize) -> Result<Vec<f64>> {
    if !(fmin > 0.0 && fmax > fmin && fmax.is_finite()) || count < 2 {
        return Err(Error::InvalidInput(format!(
            "need 0 < fmin < fmax and at least 2 points, got {fmin}..{fmax} with {count}"
        )));
    }
    let (lo, hi) = (fmin.ln(), fmax.ln());
    let step = (hi - lo) / (count - 1) as f64;
    let mut out: Vec<f64> = (0..count).map(|i| (lo + step * i as f64).exp()).collect();
    out[0] = fmin;
    out[count - 1] = fmax;
    Ok(out)
}

pub fn dfc_curve(pair: &PairGeometry, frequencies: &[f64], constants: &PhysicalConstants) -> Result<CorrelationCurve> {
    if frequencies.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("frequencies must be strictly increasing".into()));
    }
    let points = frequencies
        .iter()
        .map(|&f| Ok((f, spaced_dfc(pair, f, constants)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationCurve { pair: *pair, points })
}

/// Lowest frequency at which the pair's |DFC| first falls to `threshold`,
/// i.e. the upper edge of the low-frequency correlation lobe.
///
/// Sampled on a 512-point log sweep from 20 Hz to 20 kHz and refined by
/// bisection. A pair already below the threshold at 20 Hz reports 20 Hz.
pub fn decorrelation_cutoff(pair: &PairGeometry, threshold: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidInput(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let (fmin, fmax, count) = CUTOFF_SWEEP;
    let freqs = log_frequencies(fmin, fmax, count)?;
    let below = |f: f64| -> Result<bool> { Ok(spaced_dfc(pair, f, constants)?.abs() <= threshold) };
    let mut prev: Option<f64> = None;
    let mut min_seen = f64::INFINITY;
    for &f in &freqs {
        let v = spaced_dfc(pair, f, constants)?;
        min_seen = min_seen.min(v.abs());
        if v.abs() <= threshold {
            let Some(mut lo) = prev else { return Ok(f) };
            let mut hi = f;
            while hi / lo > 1.0 + 1e-6 {
                let mid = (lo * hi).sqrt();
                if below(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(hi);
        }
        prev = Some(f);
    }
    Err(Error::NeverDecorrelates(format!(
        "|DFC| never drops below {threshold} between {fmin} Hz and {fmax} Hz (minimum {min_seen:.3})"
    )))
}

/// Spacing whose omni-pair correlation has its first null at
/// `target_cutoff_hz`: `d = c / (2 f)`. A rule of thumb, not a solve.
pub fn spacing_for_cutoff(target_cutoff_hz: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(target_cutoff_hz > 0.0 && target_cutoff_hz.is_finite()) {
        return Err(Error::InvalidInput(format!("cutoff must be positive, got {target_cutoff_hz}")));
    }
    Ok(constants.speed_of_sound / (2.0 * target_cutoff_hz))
}
