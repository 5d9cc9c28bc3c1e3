//! Quadratic-variation covariance estimation and walk-time ergodic
//! averages.

use super::{holding_time, step, TwoSidedTrace, WalkTrace};
use crate::dyadic::DyadicSystem1D;
use crate::environment::{CellConfiguration, CellId};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::harmonic::Embedding;
use crate::rng::stream_rng;
use rand::Rng;
use rayon::prelude::*;

const DIAG: Point = Point { x: std::f64::consts::FRAC_1_SQRT_2, y: std::f64::consts::FRAC_1_SQRT_2 };

/// Directional quadratic-variation rates and the assembled covariance.
#[derive(Debug, Clone)]
pub struct SigmaEstimate {
    /// Rates for directions `(1,0)`, `(0,1)`, `(1/sqrt2, 1/sqrt2)`.
    pub c_10: f64,
    pub c_01: f64,
    pub c_diag: f64,
    pub se_10: f64,
    pub se_01: f64,
    pub se_diag: f64,
    /// `c_diag - (c_10 + c_01) / 2`.
    pub rho: f64,
    pub rho_se: f64,
    /// `[[c_10, rho], [rho, c_01]]`; absent when any rate is statistically
    /// indistinguishable from zero (within two standard errors).
    pub sigma: Option<[[f64; 2]; 2]>,
    pub walks_used: usize,
    pub walks_discarded: usize,
    /// Set when more than 10% of the batch hit the frozen boundary before
    /// the horizon (finite-window bias).
    pub boundary_warning: bool,
    pub horizon: f64,
}

/// Estimates the directional quadratic-variation rates `V^v_T / T` over a
/// batch of independent walks from `start`, and assembles the covariance
/// matrix. Walks touching the frozen boundary layer before the horizon are
/// discarded (and counted).
pub fn estimate_sigma(
    config: &CellConfiguration,
    embedding: &Embedding,
    start: CellId,
    n_walks: usize,
    horizon: f64,
    seed: u64,
) -> Result<SigmaEstimate> {
    config.check_id(start)?;
    if n_walks < 2 {
        return Err(Error::InvalidArgument("need at least 2 walks".into()));
    }
    // streamed per-walk accumulation; walk index = rng stream
    let results: Vec<Option<(f64, f64, f64)>> = (0..n_walks)
        .into_par_iter()
        .map(|w| {
            let mut rng = stream_rng(seed, w as u64);
            let hold0 = holding_time(config, start);
            let theta: f64 = rng.random_range(0.0..hold0);
            let mut t_next = -theta + hold0;
            let mut cur = start;
            let (mut vx, mut vy, mut vd) = (0.0, 0.0, 0.0);
            while t_next < horizon {
                if config.is_frozen(cur) {
                    return None;
                }
                let next = step(config, cur, &mut rng).ok()?;
                let d = embedding.value(next) - embedding.value(cur);
                let px = d.x;
                let py = d.y;
                let pd = DIAG.dot(d);
                vx += px * px;
                vy += py * py;
                vd += pd * pd;
                cur = next;
                t_next += holding_time(config, cur);
            }
            Some((vx / horizon, vy / horizon, vd / horizon))
        })
        .collect();

    let kept: Vec<(f64, f64, f64)> = results.iter().copied().flatten().collect();
    let discarded = n_walks - kept.len();
    if kept.len() < 2 {
        return Err(Error::InvalidArgument(
            "all walks hit the boundary before the horizon; enlarge the window".into(),
        ));
    }
    let stats = |sel: &dyn Fn(&(f64, f64, f64)) -> f64| {
        let n = kept.len() as f64;
        let mean = kept.iter().map(sel).sum::<f64>() / n;
        let var = kept.iter().map(|v| (sel(v) - mean).powi(2)).sum::<f64>() / n;
        (mean, (var / n).sqrt())
    };
    let (c_10, se_10) = stats(&|v| v.0);
    let (c_01, se_01) = stats(&|v| v.1);
    let (c_diag, se_diag) = stats(&|v| v.2);
    let (rho, rho_se) = stats(&|v| v.2 - 0.5 * v.0 - 0.5 * v.1);

    let positive = c_10 > 2.0 * se_10 && c_01 > 2.0 * se_01 && c_diag > 2.0 * se_diag;
    let sigma = positive.then_some([[c_10, rho], [rho, c_01]]);
    Ok(SigmaEstimate {
        c_10,
        c_01,
        c_diag,
        se_10,
        se_01,
        se_diag,
        rho,
        rho_se,
        sigma,
        walks_used: kept.len(),
        walks_discarded: discarded,
        boundary_warning: discarded * 10 > n_walks,
        horizon,
    })
}

/// Large-jump truncation statistics.
#[derive(Debug, Clone, Copy)]
pub struct TruncationStats {
    /// `T^{-1} sum over jumps by T of (v.dphi)^2 1{|v.dphi| >= delta sqrt(T)}`.
    pub sum_large_jumps: f64,
    /// The compensator: the same sum with each term replaced by its
    /// conditional expectation over the full neighbor fan.
    pub sum_compensator: f64,
    pub threshold: f64,
}

/// Computes both truncation statistics along a realized trace.
pub fn jump_truncation_stats(
    config: &CellConfiguration,
    embedding: &Embedding,
    trace: &WalkTrace,
    v: Point,
    delta: f64,
    horizon: f64,
) -> Result<TruncationStats> {
    if horizon > trace.horizon() + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} exceeds the trace horizon {}",
            trace.horizon()
        )));
    }
    let threshold = delta * horizon.sqrt();
    let mut large = 0.0;
    let mut comp = 0.0;
    for j in 1..trace.len() {
        if trace.jump_times()[j] > horizon {
            break;
        }
        let prev = trace.cells()[j - 1];
        let dj = v.dot(embedding.value(trace.cells()[j]) - embedding.value(prev));
        if dj.abs() >= threshold {
            large += dj * dj;
        }
        // full neighbor sum at the departure cell
        let pi = config.pi(prev);
        let mut e = 0.0;
        for &(nb, c) in config.neighbors(prev) {
            let d = v.dot(embedding.value(nb) - embedding.value(prev));
            if d.abs() >= threshold {
                e += c * d * d;
            }
        }
        comp += e / pi;
    }
    Ok(TruncationStats {
        sum_large_jumps: large / horizon,
        sum_compensator: comp / horizon,
        threshold,
    })
}

/// Time-averages of a functional along a two-sided walk over the
/// origin-containing 1D dyadic intervals of occupied length at most `a`,
/// by exact piecewise-constant integration over the holding intervals.
///
/// The functional sees the trace and a holding-interval index and may look
/// ahead one step (`trace.cell(j + 1)`).
pub fn walk_ergodic_average(
    trace: &TwoSidedTrace,
    d1: &DyadicSystem1D,
    functional: &dyn Fn(&TwoSidedTrace, i64) -> f64,
    a_levels: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let (t_min, t_max) = trace.span();
    let (j_min, j_max) = trace.index_range();
    let mut out = Vec::with_capacity(a_levels.len());
    for &a in a_levels {
        let (lo, hi) = d1.mass_interval(t_min, t_max, a)?;
        if lo < t_min - 1e-9 || hi > t_max + 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "trace horizon does not cover the dyadic interval for a = {a}"
            )));
        }
        let mut acc = 0.0;
        // the look-ahead excludes the last forward interval
        for j in j_min..j_max {
            let (t0, t1) = trace.interval(j);
            let overlap = (t1.min(hi) - t0.max(lo)).max(0.0);
            if overlap > 0.0 {
                acc += overlap * functional(trace, j);
            }
        }
        out.push((a, acc / (hi - lo)));
    }
    Ok(out)
}
