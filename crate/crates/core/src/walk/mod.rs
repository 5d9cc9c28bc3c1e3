//! Conductance-weighted random walks with area-over-pi holding times.
//!
//! A walk jumps from a cell to a neighbor with probability proportional to
//! the edge conductance and spends `Area(H) / pi(H)` units of time in each
//! cell it visits. The initial holding interval is offset by a uniform
//! phase so that time 0 is not special.

mod coupling;
mod recurrence;
mod sigma;

pub use coupling::{exit_coupling_tv, exit_law_prokhorov, loop_erase, CouplingReport, ExitLawReport};
pub use recurrence::{
    log_annulus_energy_oracle, recurrence_resistance, return_time_stats, RecurrenceRow,
    ReturnReport,
};
pub use sigma::{
    estimate_sigma, jump_truncation_stats, walk_ergodic_average, SigmaEstimate, TruncationStats,
};

use crate::environment::{CellConfiguration, CellId};
use crate::error::{Error, Result};
use crate::geometry::{Point, TimedCurve};
use crate::harmonic::Embedding;
use crate::rng::stream_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One transition of the conductance-weighted walk: a neighbor of `cell`
/// drawn with probability `c(H, H') / pi(H)`.
pub fn step(config: &CellConfiguration, cell: CellId, rng: &mut ChaCha8Rng) -> Result<CellId> {
    let neighbors = config.neighbors(cell);
    if neighbors.is_empty() {
        return Err(Error::IsolatedCell(cell.0));
    }
    let pi = config.pi(cell);
    let u: f64 = rng.random_range(0.0..pi);
    let mut acc = 0.0;
    for &(nb, c) in neighbors {
        acc += c;
        if u < acc {
            return Ok(nb);
        }
    }
    Ok(neighbors[neighbors.len() - 1].0)
}

/// Holding time of a cell.
#[inline]
pub fn holding_time(config: &CellConfiguration, cell: CellId) -> f64 {
    config.area(cell) / config.pi(cell)
}

/// Stopping rule for a walk run.
#[derive(Debug, Clone, Copy)]
pub enum StopRule {
    /// Exactly this many jumps.
    Steps(usize),
    /// Run until the holding intervals cover `[0, T]`.
    Horizon(f64),
}

/// A realized walk: visited cells and jump times.
///
/// `jump_times[j]` is the entry time of `cells[j]`; the walk occupies
/// `cells[j]` on `[jump_times[j], jump_times[j] + hold)`. The first entry
/// time is `-theta` for a uniform phase `theta` in the first holding
/// interval.
#[derive(Debug, Clone)]
pub struct WalkTrace {
    cells: Vec<CellId>,
    jump_times: Vec<f64>,
    theta: f64,
    /// Set when the walk was stopped by first contact with the frozen
    /// window boundary layer.
    pub truncated_at_boundary: bool,
    horizon: f64,
}

impl WalkTrace {
    pub fn cells(&self) -> &[CellId] {
        &self.cells
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// End of the last complete holding interval.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of jumps with `jump_time <= t` (the jump counter `n_t`).
    pub fn jumps_by(&self, t: f64) -> usize {
        // jump_times[0] is the initial entry, not a jump
        self.jump_times[1..].partition_point(|&tau| tau <= t)
    }
}

/// Runs a walk from `start` under the given stopping rule.
///
/// With `stop_on_boundary`, the walk is truncated on first contact with the
/// frozen boundary layer of the window (the truncation is recorded).
pub fn run_walk(
    config: &CellConfiguration,
    start: CellId,
    rule: StopRule,
    seed: u64,
    stop_on_boundary: bool,
) -> Result<WalkTrace> {
    config.check_id(start)?;
    let mut rng = stream_rng(seed, 0);
    run_walk_with_rng(config, start, rule, &mut rng, stop_on_boundary)
}

fn run_walk_with_rng(
    config: &CellConfiguration,
    start: CellId,
    rule: StopRule,
    rng: &mut ChaCha8Rng,
    stop_on_boundary: bool,
) -> Result<WalkTrace> {
    let hold0 = holding_time(config, start);
    let theta: f64 = rng.random_range(0.0..hold0);
    let mut cells = vec![start];
    let mut jump_times = vec![-theta];
    let mut t_next = -theta + hold0;
    let mut cur = start;
    let mut truncated = false;
    loop {
        let done = match rule {
            StopRule::Steps(n) => cells.len() > n,
            StopRule::Horizon(big_t) => t_next >= big_t,
        };
        if done {
            break;
        }
        if stop_on_boundary && config.is_frozen(cur) {
            truncated = true;
            break;
        }
        cur = step(config, cur, rng)?;
        cells.push(cur);
        jump_times.push(t_next);
        t_next += holding_time(config, cur);
    }
    Ok(WalkTrace {
        cells,
        jump_times,
        theta,
        truncated_at_boundary: truncated,
        horizon: t_next,
    })
}

/// How to place each visited cell in the plane.
pub enum CellPlacement<'a> {
    /// Use an embedding (e.g. centroids or a harmonic embedding).
    Embedded(&'a Embedding),
    /// Draw an independent uniform point of the cell for every holding
    /// interval, seeded per jump.
    UniformPoint { seed: u64 },
}

/// The embedded image of a walk as a timed curve: one position per holding
/// interval, sampled at the jump times.
pub fn embed_walk(
    config: &CellConfiguration,
    trace: &WalkTrace,
    placement: &CellPlacement<'_>,
) -> Result<TimedCurve> {
    let mut samples = Vec::with_capacity(trace.len().max(2));
    for (j, (&cell, &tau)) in trace.cells.iter().zip(&trace.jump_times).enumerate() {
        let pos = match placement {
            CellPlacement::Embedded(emb) => {
                let p = emb.value(cell);
                if !p.is_finite() {
                    return Err(Error::MissingValue(cell.0));
                }
                p
            }
            CellPlacement::UniformPoint { seed } => {
                let mut rng = stream_rng(*seed, j as u64);
                uniform_point_in_cell(config, cell, &mut rng)
            }
        };
        samples.push((tau, pos));
    }
    // close the final holding interval so single-cell traces are curves too
    let last = *samples.last().unwrap();
    samples.push((trace.horizon.max(last.0 + 1e-300), last.1));
    TimedCurve::new(samples)
}

/// Uniform point of a cell by rejection sampling in its bounding box.
pub fn uniform_point_in_cell(
    config: &CellConfiguration,
    cell: CellId,
    rng: &mut ChaCha8Rng,
) -> Point {
    let region = config.region(cell);
    let (lo, hi) = region.bbox();
    for _ in 0..10_000 {
        let p = Point::new(
            rng.random_range(lo.x..hi.x.max(lo.x + f64::MIN_POSITIVE)),
            rng.random_range(lo.y..hi.y.max(lo.y + f64::MIN_POSITIVE)),
        );
        if region.contains(p) {
            return p;
        }
    }
    config.centroid(cell)
}

/// Quadratic variation of the embedded walk along direction `v` up to time
/// `t`: the sum of `(v . d phi)^2` over completed jumps.
pub fn quadratic_variation(
    trace: &WalkTrace,
    embedding: &Embedding,
    v: Point,
    t: f64,
) -> Result<f64> {
    quadratic_variation_between(trace, embedding, v, f64::NEG_INFINITY, t)
}

/// Quadratic variation restricted to jumps with `s < jump_time <= t`.
pub fn quadratic_variation_between(
    trace: &WalkTrace,
    embedding: &Embedding,
    v: Point,
    s: f64,
    t: f64,
) -> Result<f64> {
    if t > trace.horizon + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "time {t} exceeds the trace horizon {}",
            trace.horizon
        )));
    }
    let mut acc = 0.0;
    for j in 1..trace.len() {
        let tau = trace.jump_times[j];
        if tau <= s {
            continue;
        }
        if tau > t {
            break;
        }
        let d = embedding.value(trace.cells[j]) - embedding.value(trace.cells[j - 1]);
        let proj = v.dot(d);
        acc += proj * proj;
    }
    Ok(acc)
}

/// A two-sided walk: two independent one-sided walks glued at time zero,
/// sharing the start cell and the phase.
///
/// Holding intervals are indexed by integers: index 0 is the start cell's
/// interval containing time 0; positive indices follow the forward walk;
/// negative indices follow the backward walk.
pub struct TwoSidedTrace {
    forward: WalkTrace,
    /// Backward cells b_1, b_2, ... (b_0 = start omitted); entry times are
    /// derived from the shared theta.
    backward_cells: Vec<CellId>,
    backward_times: Vec<f64>,
    t_min: f64,
}

impl TwoSidedTrace {
    /// Index range `(j_min, j_max)` of complete holding intervals.
    pub fn index_range(&self) -> (i64, i64) {
        (
            -(self.backward_cells.len() as i64),
            self.forward.len() as i64 - 1,
        )
    }

    pub fn cell(&self, j: i64) -> CellId {
        if j >= 0 {
            self.forward.cells[j as usize]
        } else {
            self.backward_cells[(-j) as usize - 1]
        }
    }

    /// Holding interval `[t0, t1)` of index `j`.
    pub fn interval(&self, j: i64) -> (f64, f64) {
        if j >= 0 {
            let t0 = self.forward.jump_times[j as usize];
            let t1 = if (j as usize) + 1 < self.forward.len() {
                self.forward.jump_times[j as usize + 1]
            } else {
                self.forward.horizon
            };
            (t0, t1)
        } else {
            let i = (-j) as usize - 1;
            let t1 = if i == 0 {
                self.forward.jump_times[0]
            } else {
                self.backward_times[i - 1]
            };
            (self.backward_times[i], t1)
        }
    }

    /// Time span covered by complete intervals.
    pub fn span(&self) -> (f64, f64) {
        (self.t_min, self.forward.horizon)
    }
}

/// Runs the glued two-sided walk from `start` covering `[-horizon, horizon]`.
pub fn run_two_sided_walk(
    config: &CellConfiguration,
    start: CellId,
    horizon: f64,
    seed: u64,
) -> Result<TwoSidedTrace> {
    config.check_id(start)?;
    let mut rng_f = stream_rng(seed, 0);
    let forward =
        run_walk_with_rng(config, start, StopRule::Horizon(horizon), &mut rng_f, false)?;
    let mut rng_b = stream_rng(seed, 1);
    let mut backward_cells = Vec::new();
    let mut backward_times = Vec::new();
    let mut cur = start;
    let mut t = forward.jump_times[0]; // -theta: start of interval 0
    while t > -horizon {
        cur = step(config, cur, &mut rng_b)?;
        backward_cells.push(cur);
        t -= holding_time(config, cur);
        backward_times.push(t);
    }
    Ok(TwoSidedTrace { forward, backward_cells, backward_times, t_min: t })
}
