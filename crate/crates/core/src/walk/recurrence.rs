//! Recurrence diagnostics: effective-resistance lower bounds from radial
//! test functions, and empirical return statistics.

use super::step;
use crate::dyadic::DyadicSystem2D;
use crate::environment::{CellConfiguration, CellId};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use rayon::prelude::*;

/// One annulus row of the resistance diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct RecurrenceRow {
    pub r: u32,
    /// Dirichlet energy of the radial-logarithmic test function.
    pub energy: f64,
    /// `1 / energy`: a lower bound on the effective resistance from the
    /// inner ball to the complement of the outer ball.
    pub resistance_bound: f64,
}

/// Builds the radial test functions of the recurrence argument on the
/// origin squares of the dyadic system and reports their energies.
///
/// For each `r` in `2..=r_max`, the test function vanishes on the cells
/// meeting the ball of radius `2 |S_k|` around the center of `S_k`, equals
/// one outside the ball of radius `2^r |S_k|`, and interpolates
/// logarithmically in between; its energy reciprocal bounds the effective
/// resistance across the annulus from below. The level `k` is the largest
/// for which the outer ball at `r_max` stays inside the window.
pub fn recurrence_resistance(
    config: &CellConfiguration,
    d: &DyadicSystem2D,
    r_max: u32,
) -> Result<Vec<RecurrenceRow>> {
    if r_max < 2 {
        return Err(Error::InvalidArgument("r_max must be at least 2".into()));
    }
    let window = config.window();
    // largest k whose outer ball fits
    let mut k = None;
    for cand in (-16..=16).rev() {
        let side = match d.side(cand) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let center = d.origin_square(cand)?.center();
        let radius = 2f64.powi(r_max as i32) * side;
        let fits = center.x - radius >= window.anchor.x
            && center.y - radius >= window.anchor.y
            && center.x + radius <= window.anchor.x + window.side
            && center.y + radius <= window.anchor.y + window.side;
        if fits {
            k = Some(cand);
            break;
        }
    }
    let Some(k) = k else {
        return Err(Error::WindowTooSmall(format!(
            "no dyadic level fits the outer ball at r_max = {r_max}"
        )));
    };
    let side = d.side(k)?;
    let center = d.origin_square(k)?.center();

    let mut rows = Vec::with_capacity((r_max - 1) as usize);
    for r in 2..=r_max {
        let r_in = 2.0 * side;
        let r_out = 2f64.powi(r as i32) * side;
        let log_span = ((r - 1) as f64) * std::f64::consts::LN_2;
        // cells meeting the outer ball plus a one-cell margin carry all the
        // nonconstant values
        let max_diam = config
            .ids()
            .map(|id| config.diameter(id))
            .fold(0.0f64, f64::max);
        let carrier = config.cells_in_ball(center, r_out + max_diam + 1.0);
        let value = |id: CellId| -> f64 {
            let region = config.region(id);
            if region.dist_to_point(center) <= r_in {
                return 0.0;
            }
            // does the cell reach past the outer circle?
            let reaches_out = region
                .rings()
                .flatten()
                .any(|&p| (p - center).norm() > r_out);
            if reaches_out {
                return 1.0;
            }
            let z = config.centroid(id);
            (((z - center).norm() / r_in).ln() / log_span).clamp(0.0, 1.0)
        };
        let values: std::collections::BTreeMap<CellId, f64> =
            carrier.iter().map(|&id| (id, value(id))).collect();
        let mut energy = 0.0;
        for &id in &carrier {
            let fi = values[&id];
            for &(nb, c) in config.neighbors(id) {
                if nb > id {
                    let fj = values.get(&nb).copied().unwrap_or(1.0);
                    energy += c * (fi - fj) * (fi - fj);
                }
            }
        }
        rows.push(RecurrenceRow { r, energy, resistance_bound: 1.0 / energy });
    }
    Ok(rows)
}

/// Return-frequency report.
#[derive(Debug, Clone)]
pub struct ReturnReport {
    pub excursions: usize,
    /// Fraction of excursions that returned to the start within the cap.
    pub return_fraction: f64,
    /// Median number of jumps among returning excursions.
    pub median_return_steps: Option<usize>,
    /// Excursions cut off by the step cap or by the frozen boundary layer.
    pub censored: usize,
}

/// Runs independent excursions from `start` and reports how often the walk
/// returns within `step_cap` jumps. Excursions touching this frozen window
/// boundary are censored, except in degenerate configurations whose start
/// cell is itself frozen (there the whole graph is rim and censoring would
/// be vacuous).
pub fn return_time_stats(
    config: &CellConfiguration,
    start: CellId,
    n_excursions: usize,
    step_cap: usize,
    seed: u64,
) -> Result<ReturnReport> {
    config.check_id(start)?;
    let censor = !config.is_frozen(start);
    let outcomes: Vec<Option<usize>> = (0..n_excursions)
        .into_par_iter()
        .map(|e| {
            let mut rng = stream_rng(seed, e as u64);
            let mut cur = start;
            for s in 1..=step_cap {
                cur = step(config, cur, &mut rng).expect("non-isolated");
                if cur == start {
                    return Some(s);
                }
                if censor && config.is_frozen(cur) {
                    return None;
                }
            }
            None
        })
        .collect();
    let mut returns: Vec<usize> = outcomes.iter().copied().flatten().collect();
    returns.sort_unstable();
    let censored = n_excursions - returns.len();
    let median = if returns.is_empty() {
        None
    } else {
        Some(returns[returns.len() / 2])
    };
    Ok(ReturnReport {
        excursions: n_excursions,
        return_fraction: returns.len() as f64 / n_excursions as f64,
        median_return_steps: median,
        censored,
    })
}

/// Continuum oracle for the unit-grid annulus energy: the Dirichlet energy
/// of the logarithmic profile between radii `2 |S|` and `2^r |S|` is
/// `2 pi / ((r - 1) ln 2)`, independent of `|S|`.
pub fn log_annulus_energy_oracle(r: u32) -> f64 {
    2.0 * std::f64::consts::PI / ((r as f64 - 1.0) * std::f64::consts::LN_2)
}
