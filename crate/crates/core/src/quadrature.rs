//! Numerical integration of smooth, Gaussian-decaying integrands.
//!
//! The trapezoid rule on a uniform grid converges geometrically for analytic
//! integrands whose tails vanish at the interval ends, so successive step
//! halving is enough to reach double precision in a handful of levels.

use crate::error::{Error, Result};

/// Half-width margin, in PSF widths, added beyond the outermost center.
pub const TAIL_MARGIN: f64 = 12.0;

const MAX_LEVELS: usize = 20;
const MIN_LEVELS: usize = 4;
const REL_TOL: f64 = 1e-14;

/// Integrates `f` over `[lo, hi]` by trapezoid refinement until two
/// successive estimates agree to `1e-14` (relative, floor 1).
pub fn integrate(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::Domain(format!("bad integration interval [{lo}, {hi}]")));
    }
    let width = hi - lo;
    // Start near unit spacing.
    let mut panels = (width.ceil() as usize).max(1);
    let mut h = width / panels as f64;
    let mut sum = 0.5 * (f(lo) + f(hi)) + (1..panels).map(|i| f(lo + i as f64 * h)).sum::<f64>();
    let mut prev = sum * h;

    for level in 1..=MAX_LEVELS {
        // Midpoints of the current panels.
        let mids: f64 = (0..panels).map(|i| f(lo + (i as f64 + 0.5) * h)).sum();
        sum += mids;
        panels *= 2;
        h *= 0.5;
        let cur = sum * h;
        if !cur.is_finite() {
            return Err(Error::Numerical("integrand produced a non-finite value".into()));
        }
        if level >= MIN_LEVELS && (cur - prev).abs() <= REL_TOL * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Numerical(format!(
        "trapezoid refinement did not converge on [{lo}, {hi}] after {MAX_LEVELS} levels"
    )))
}

/// Unit-width Gaussian point-spread amplitude centered at `center`
/// (lengths in units of the PSF width).
#[inline]
pub fn psf_amplitude(x: f64, center: f64) -> f64 {
    let norm = (2.0 * std::f64::consts::PI).powf(-0.25);
    let u = x - center;
    norm * (-u * u / 4.0).exp()
}

/// Integration window covering every center with the standard tail margin.
pub fn window(centers: &[f64]) -> (f64, f64) {
    let lo = centers.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = centers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo - TAIL_MARGIN, hi + TAIL_MARGIN)
}
