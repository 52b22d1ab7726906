//! Helstrom bound after `m` detections.
//!
//! Two independent routes:
//!
//! * **Dense**: build `P2 rho2^{⊗m} - P1 rho1^{⊗m}` entry by entry in the
//!   original basis and diagonalize it. Exact up to the eigensolver, limited
//!   to dimension [`DENSE_DIM_CAP`].
//! * **Fast**: `rho2` has rank at most two, so `rho2^{⊗m}` is diagonal in the
//!   product eigenbasis with eigenvalues `mu1^a mu2^(m-a)` (plus zero on
//!   anything touching the kernel). `rho1^{⊗m}` is a rank-one projector, so
//!   the difference is a diagonal matrix minus a rank-one term. Inside each
//!   degenerate group the component orthogonal to the projector keeps the
//!   group eigenvalue; the remaining one-vector-per-group problem is solved
//!   through its secular equation `1 = P1 sum_g w_g / (P2 d_g - lambda)`.
//!   Cost is `O(m)` groups instead of `dim^m`.

use faer::{Mat, Side};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_states, HypothesisPair, ScenarioParams};

use super::{direct_guess, helstrom_one_shot, BoundReport, SpectralLine, TIE_TOL};

/// Largest Kronecker-power dimension the dense route will diagonalize.
pub const DENSE_DIM_CAP: usize = 8192;

/// Eigenvalues of `rho2` below this are treated as kernel.
const KERNEL_TOL: f64 = 1e-12;
/// Groups lighter than this keep their eigenvalue at full multiplicity when
/// the interior secular roots are located.
const DEFLATION_WEIGHT: f64 = 1e-15;
const MERGE_RTOL: f64 = 1e-14;
const MAX_BISECTION: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum MShotPath {
    /// One-shot solver for `m = 1`, fast route otherwise.
    #[default]
    Auto,
    Dense,
    Fast,
}

pub fn helstrom_m_shot(params: &ScenarioParams, m: u32) -> Result<BoundReport> {
    helstrom_m_shot_with(params, m, MShotPath::Auto)
}

pub fn helstrom_m_shot_with(params: &ScenarioParams, m: u32, path: MShotPath) -> Result<BoundReport> {
    if m == 0 {
        return Err(Error::Domain("m must be ≥ 1".into()));
    }
    params.validate()?;
    match path {
        MShotPath::Auto if m == 1 => helstrom_one_shot(params),
        MShotPath::Auto | MShotPath::Fast => fast_report(params, m),
        MShotPath::Dense => dense_report(params, m),
    }
}

/// Only the optimal error probability, via the fast route without the
/// interior part of the spectrum.
pub fn helstrom_m_shot_error(params: &ScenarioParams, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be ≥ 1".into()));
    }
    params.validate()?;
    let pair = build_states(params)?;
    let groups = product_groups(&pair, m, params.p2())?;
    Ok(bottom_root(&groups, params.p1).e_min)
}

// ---------------------------------------------------------------------------
// Dense route

fn dense_report(params: &ScenarioParams, m: u32) -> Result<BoundReport> {
    let pair = build_states(params)?;
    let d = pair.rho2.dim();
    let dim = checked_power(d, m).filter(|&n| n <= DENSE_DIM_CAP).ok_or_else(|| {
        Error::Capacity(format!(
            "dense path is limited to dimension {DENSE_DIM_CAP}; {d}^{m} requested"
        ))
    })?;

    let (p1, p2) = (params.p1, params.p2());
    let r1 = pair.rho1.matrix();
    let r2 = pair.rho2.matrix();
    let digits: Vec<Vec<usize>> = (0..dim)
        .map(|mut idx| {
            let mut ds = vec![0; m as usize];
            for slot in ds.iter_mut().rev() {
                *slot = idx % d;
                idx /= d;
            }
            ds
        })
        .collect();

    let omega = Mat::<f64>::from_fn(dim, dim, |i, j| {
        let (di, dj) = (&digits[i], &digits[j]);
        let mut a = 1.0;
        let mut b = 1.0;
        for t in 0..m as usize {
            a *= r2.get(di[t], dj[t]);
            b *= r1.get(di[t], dj[t]);
        }
        p2 * a - p1 * b
    });
    let values = omega
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("dense eigensolver: {e:?}")))?;
    let spectrum = values
        .into_iter()
        .map(|value| SpectralLine { value, multiplicity: 1.0 })
        .collect();
    Ok(BoundReport::from_spectrum(*params, m, spectrum))
}

fn checked_power(base: usize, exp: u32) -> Option<usize> {
    base.checked_pow(exp)
}

// ---------------------------------------------------------------------------
// Fast route

/// A degenerate eigenspace of `P2 rho2^{⊗m}`.
#[derive(Debug, Clone, Copy)]
struct Group {
    /// Scaled eigenvalue `P2 d`.
    value: f64,
    /// Squared norm of the `rho1^{⊗m}` vector's projection onto the group.
    weight: f64,
    /// Dimension of the group (may be astronomically large).
    size: f64,
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// `a * ln(p)` with `0 * ln(0) = 0`.
fn xlny(a: f64, p: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * p.ln()
    }
}

fn product_groups(pair: &HypothesisPair, m: u32, p2: f64) -> Result<Vec<Group>> {
    let dim = pair.rho2.dim();
    let eig = pair.rho2.clamped_eigen()?;
    // rho1 is pure; its top eigenvector is the reference state.
    let phi = pair.rho1.clamped_eigen()?.vectors.swap_remove(0);
    let proj = |v: &[f64]| -> f64 {
        let dot: f64 = v.iter().zip(&phi).map(|(a, b)| a * b).sum();
        dot * dot
    };

    let mut support = Vec::new();
    let mut kernel_weight = 0.0;
    for (mu, v) in eig.values.iter().zip(&eig.vectors) {
        if *mu > KERNEL_TOL {
            support.push((*mu, proj(v)));
        } else {
            kernel_weight += proj(v);
        }
    }
    let rank = support.len();
    if rank == 0 || rank > 2 {
        return Err(Error::Numerical(format!(
            "fast path needs a rank-1 or rank-2 state, found rank {rank}"
        )));
    }

    let mf = m as f64;
    let mut groups = Vec::with_capacity(m as usize + 2);
    match rank {
        1 => {
            let (mu, p) = support[0];
            groups.push(Group {
                value: p2 * mu.powi(m as i32),
                weight: p.powi(m as i32),
                size: 1.0,
            });
        }
        _ => {
            let (mu1, pa) = support[0];
            let (mu2, pb) = support[1];
            let lnf = ln_factorials(m as usize);
            for a in 0..=m as usize {
                let b = m as usize - a;
                let ln_binom = lnf[m as usize] - lnf[a] - lnf[b];
                let (af, bf) = (a as f64, b as f64);
                let ln_w = ln_binom + xlny(af, pa) + xlny(bf, pb);
                groups.push(Group {
                    value: p2 * (af * mu1.ln() + bf * mu2.ln()).exp(),
                    weight: ln_w.exp(),
                    size: ln_binom.exp().round(),
                });
            }
        }
    }
    if rank < dim {
        // Every product vector touching the kernel has eigenvalue zero.
        let total = (dim as f64).powf(mf);
        let supported = (rank as f64).powf(mf);
        groups.push(Group {
            value: 0.0,
            weight: -(mf * (-kernel_weight).ln_1p()).exp_m1(),
            size: total - supported,
        });
    }

    groups.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut merged: Vec<Group> = Vec::with_capacity(groups.len());
    for g in groups {
        match merged.last_mut() {
            Some(last) if g.value - last.value <= MERGE_RTOL * g.value.abs() => {
                last.weight += g.weight;
                last.size += g.size;
            }
            _ => merged.push(g),
        }
    }
    Ok(merged)
}

struct BottomRoot {
    /// Smallest eigenvalue of the difference operator.
    lambda: f64,
    e_min: f64,
}

/// Smallest secular root, solved for `e = P1 + lambda` so that tiny optimal
/// errors keep full relative precision. In that variable the secular
/// function is `g(e) = sum_g w_g (D_g - e) / (D_g + P1 - e)`, homogeneous in
/// the weights and decreasing on `(-inf, P1 + D_min)`.
fn bottom_root(groups: &[Group], p1: f64) -> BottomRoot {
    let active: Vec<&Group> = groups.iter().filter(|g| g.weight > 0.0).collect();
    if p1 == 0.0 || active.is_empty() {
        let lambda = groups.iter().map(|g| g.value).fold(f64::INFINITY, f64::min);
        return BottomRoot { lambda, e_min: 0.0 };
    }
    let g = |e: f64| -> f64 {
        let (mut pos, mut neg) = (0.0, 0.0);
        for grp in &active {
            let t = grp.weight * (grp.value - e) / (grp.value + p1 - e);
            if t >= 0.0 {
                pos += t;
            } else {
                neg -= t;
            }
        }
        pos - neg
    };

    let d_min = active[0].value;
    let (mut lo, mut hi) = (0.0_f64, p1 + d_min);
    if g(lo) <= 0.0 {
        return BottomRoot { lambda: -p1, e_min: 0.0 };
    }
    for _ in 0..MAX_BISECTION {
        let mid = if lo == 0.0 {
            if hi < f64::MIN_POSITIVE {
                break;
            }
            0.5 * hi
        } else if hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = 0.5 * (lo + hi);
    BottomRoot {
        lambda: e - p1,
        e_min: e.min(p1),
    }
}

/// Root of the secular equation strictly between two adjacent poles.
fn interior_root(poles: &[Group], lower: usize, p1: f64) -> f64 {
    let (a, b) = (poles[lower].value, poles[lower + 1].value);
    let gap = b - a;
    let f = |origin: f64, t: f64| -> f64 {
        let mut s = 0.0;
        for p in poles {
            s += p.weight / ((p.value - origin) - t);
        }
        1.0 - p1 * s
    };
    // f decreases from +inf at a to -inf at b; shift the origin to the
    // closer pole so the distance to it is resolved in relative terms.
    let half = 0.5 * gap;
    let (origin, mut lo, mut hi) = if f(a, half) > 0.0 {
        (b, -half, 0.0)
    } else {
        (a, 0.0, half)
    };
    for _ in 0..MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(origin, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    origin + 0.5 * (lo + hi)
}

fn fast_report(params: &ScenarioParams, m: u32) -> Result<BoundReport> {
    let pair = build_states(params)?;
    let p1 = params.p1;
    let groups = product_groups(&pair, m, params.p2())?;
    let mut spectrum = Vec::with_capacity(2 * groups.len());

    if p1 == 0.0 {
        spectrum.extend(groups.iter().map(|g| SpectralLine {
            value: g.value,
            multiplicity: g.size,
        }));
        return Ok(BoundReport::from_spectrum(*params, m, spectrum));
    }

    let (poles, deflated): (Vec<Group>, Vec<Group>) =
        groups.iter().partition(|g| g.weight >= DEFLATION_WEIGHT);
    for g in &deflated {
        spectrum.push(SpectralLine {
            value: g.value,
            multiplicity: g.size,
        });
    }
    for g in &poles {
        if g.size > 1.0 {
            spectrum.push(SpectralLine {
                value: g.value,
                multiplicity: g.size - 1.0,
            });
        }
    }
    let bottom = bottom_root(&groups, p1);
    spectrum.push(SpectralLine {
        value: bottom.lambda,
        multiplicity: 1.0,
    });
    for j in 0..poles.len().saturating_sub(1) {
        spectrum.push(SpectralLine {
            value: interior_root(&poles, j, p1),
            multiplicity: 1.0,
        });
    }
    spectrum.retain(|l| l.multiplicity > 0.0);

    let mut report = BoundReport::from_spectrum(*params, m, spectrum);
    if !report.forbidden {
        // The trace-norm sum loses everything below ~1e-16 to cancellation;
        // the secular root carries the optimal error to full precision.
        report.e_min = bottom.e_min;
        report.advantage = super::Advantage::from_errors(report.e_guess, report.e_min, false);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Minimal number of detections

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinimalM {
    Found(u32),
    /// No `m <= cap` beats the guess.
    Exceeded(u32),
}

impl MinimalM {
    /// Value for tabular output; `-1` marks the exceeded sentinel.
    pub fn as_i64(self) -> i64 {
        match self {
            MinimalM::Found(m) => m as i64,
            MinimalM::Exceeded(_) => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimalMReport {
    pub m_min: MinimalM,
    /// Optimal error at `m_min`, or at the cap when exceeded.
    pub e_min_at_m: f64,
}

/// Smallest `m` whose optimal error is below the direct guess by more than
/// the tie tolerance. Uses galloping then bisection, relying on the optimal
/// error being non-increasing in `m`.
pub fn minimal_m(params: &ScenarioParams, m_cap: u32) -> Result<MinimalMReport> {
    if m_cap == 0 {
        return Err(Error::Domain("m_cap must be ≥ 1".into()));
    }
    let e_guess = direct_guess(params.p1)?;
    let beats = |m: u32| -> Result<(bool, f64)> {
        let e = helstrom_m_shot_error(params, m)?;
        Ok((e < e_guess - TIE_TOL, e))
    };

    let (ok, e1) = beats(1)?;
    if ok {
        return Ok(MinimalMReport { m_min: MinimalM::Found(1), e_min_at_m: e1 });
    }
    let mut lo = 1u32;
    let mut hi;
    let mut e_hi;
    loop {
        hi = lo.saturating_mul(2).min(m_cap);
        if hi == lo {
            return Ok(MinimalMReport { m_min: MinimalM::Exceeded(m_cap), e_min_at_m: e1 });
        }
        let (ok, e) = beats(hi)?;
        e_hi = e;
        if ok {
            break;
        }
        if hi == m_cap {
            return Ok(MinimalMReport { m_min: MinimalM::Exceeded(m_cap), e_min_at_m: e });
        }
        lo = hi;
    }
    // beats(lo) is false, beats(hi) is true.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let (ok, e) = beats(mid)?;
        if ok {
            hi = mid;
            e_hi = e;
        } else {
            lo = mid;
        }
    }
    Ok(MinimalMReport { m_min: MinimalM::Found(hi), e_min_at_m: e_hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScenarioKind::{self, *};

    fn params(kind: ScenarioKind, k: f64, q: f64, p1: f64) -> ScenarioParams {
        ScenarioParams::new(kind, k, q, p1).unwrap()
    }

    #[test]
    fn one_shot_agreement() {
        for kind in ScenarioKind::ALL {
            let p = params(kind, 0.8, 0.4, 0.35);
            let one = helstrom_one_shot(&p).unwrap();
            assert_eq!(helstrom_m_shot(&p, 1).unwrap(), one);
            let dense = helstrom_m_shot_with(&p, 1, MShotPath::Dense).unwrap();
            let fast = helstrom_m_shot_with(&p, 1, MShotPath::Fast).unwrap();
            assert!((dense.e_min - one.e_min).abs() < 1e-14);
            assert!((fast.e_min - one.e_min).abs() < 1e-13);
        }
    }

    #[test]
    fn fast_matches_dense_small_m() {
        for kind in ScenarioKind::ALL {
            let max_m = if kind == Symmetric { 5 } else { 8 };
            for &(k, q, p1) in &[(0.5, 0.3, 0.3), (1.0, 0.5, 0.5), (2.0, 0.7, 0.1), (0.2, 0.0, 0.6)] {
                let p = params(kind, k, q, p1);
                for m in 1..=max_m {
                    let d = helstrom_m_shot_with(&p, m, MShotPath::Dense).unwrap();
                    let f = helstrom_m_shot_with(&p, m, MShotPath::Fast).unwrap();
                    assert!(
                        (d.trace_norm() - f.trace_norm()).abs() < 1e-10,
                        "{kind} k={k} q={q} p1={p1} m={m}: {} vs {}",
                        d.trace_norm(),
                        f.trace_norm()
                    );
                    assert!((d.e_min - f.e_min).abs() < 1e-10);
                    assert_eq!(d.forbidden, f.forbidden, "{kind} k={k} q={q} p1={p1} m={m}");
                    let total: f64 = f.spectrum.iter().map(|l| l.multiplicity).sum();
                    assert_eq!(total, (kind.dim() as f64).powi(m as i32));
                }
            }
        }
    }

    #[test]
    fn coincident_sources_never_separate() {
        for kind in ScenarioKind::ALL {
            for m in [1, 2, 7, 40] {
                let r = helstrom_m_shot(&params(kind, 0.0, 0.5, 0.3), m).unwrap();
                assert_eq!(r.e_min, 0.3);
                assert!(r.forbidden);
            }
        }
    }

    #[test]
    fn dense_capacity_error() {
        let p = params(Symmetric, 1.0, 0.5, 0.5);
        assert!(matches!(
            helstrom_m_shot_with(&p, 9, MShotPath::Dense),
            Err(Error::Capacity(_))
        ));
        assert!(helstrom_m_shot_with(&p, 0, MShotPath::Fast).is_err());
    }

    #[test]
    fn monotone_in_m() {
        for kind in ScenarioKind::ALL {
            let p = params(kind, 0.7, 0.4, 0.2);
            let mut prev = f64::INFINITY;
            for m in 1..=120 {
                let e = helstrom_m_shot_error(&p, m).unwrap();
                assert!(e <= prev + 1e-12, "{kind} m={m}");
                prev = e;
            }
        }
    }

    #[test]
    fn minimal_m_cases() {
        let outside = params(Asymmetric, 1.0, 0.5, 0.45);
        assert_eq!(minimal_m(&outside, 50).unwrap().m_min, MinimalM::Found(1));
        for kind in ScenarioKind::ALL {
            for k in [0.3, 1.0, 2.0] {
                let p = params(kind, k, 0.6, 0.5);
                assert_eq!(minimal_m(&p, 50).unwrap().m_min, MinimalM::Found(1));
            }
        }
        // q^m < P1/P2 boundary: q = 0.5, P1/P2 = 1/3 -> m = 2.
        let r = minimal_m(&params(Asymmetric, 2.0, 0.5, 0.25), 50).unwrap();
        assert_eq!(r.m_min, MinimalM::Found(2));
        // Guess can never be beaten when the prior is certain.
        let r = minimal_m(&params(Asymmetric, 2.0, 0.5, 0.0), 20).unwrap();
        assert_eq!(r.m_min, MinimalM::Exceeded(20));
        assert_eq!(MinimalM::Exceeded(20).as_i64(), -1);
        assert!(minimal_m(&outside, 0).is_err());
    }

    #[test]
    fn tiny_errors_keep_relative_precision() {
        // Symmetric, k = 1: E_min(m) ~ exp(-m/16) / 2 down to ~1e-14 at m = 500.
        let p = params(Symmetric, 1.0, 0.5, 0.5);
        let e = helstrom_m_shot_error(&p, 500).unwrap();
        assert!(e > 0.0 && e < 1e-12, "{e}");
        let e2 = helstrom_m_shot_error(&p, 510).unwrap();
        let slope = -(e2 / e).ln() / 10.0;
        assert!((slope - 0.0625).abs() < 0.0625 * 0.15, "{slope}");
        // The full report must agree: the positive eigenvalues are all far
        // below the tie tolerance individually but not collectively.
        let r = helstrom_m_shot(&p, 500).unwrap();
        assert!(!r.forbidden);
        assert_eq!(r.e_min, e);
    }
}
