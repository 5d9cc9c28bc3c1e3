//! Loop erasure, the spanning-tree exit-law coupling bound, and the
//! exit-law comparison against diffusion harmonic measure.

use super::step;
use crate::analysis::{prokhorov_distance, EmpiricalMeasure};
use crate::environment::{CellConfiguration, CellId};
use crate::error::{Error, Result};
use crate::geometry::{Point, Square};
use crate::harmonic::CellSet;
use crate::rng::stream_rng;
use rand::Rng;
use rayon::prelude::*;

/// Chronological loop erasure of a cell path: whenever the path revisits a
/// cell, the loop in between is removed. The output is simple, is a
/// subsequence of the input, and preserves both endpoints.
pub fn loop_erase(path: &[CellId]) -> Vec<CellId> {
    let mut out: Vec<CellId> = Vec::new();
    let mut pos: std::collections::BTreeMap<CellId, usize> = std::collections::BTreeMap::new();
    for &cell in path {
        if let Some(&at) = pos.get(&cell) {
            for dropped in out.drain(at + 1..) {
                pos.remove(&dropped);
            }
        } else {
            pos.insert(cell, out.len());
            out.push(cell);
        }
    }
    out
}

/// Outcome of the exit-law coupling experiment.
#[derive(Debug, Clone)]
pub struct CouplingReport {
    /// Bias-corrected empirical total variation between the two exit
    /// distributions (split-half correction; consistent as samples grow).
    pub tv: f64,
    /// Uncorrected plug-in total variation, which overshoots the true value
    /// by roughly `sqrt(support / samples) / 2` even for identical laws.
    pub tv_raw: f64,
    /// The split-half estimate of that finite-sample bias.
    pub tv_bias: f64,
    pub tv_se: f64,
    /// Empirical probability that the walk from `x` disconnects `y` from
    /// the target before hitting it.
    pub disconnect_prob: f64,
    pub disconnect_se: f64,
    /// Whether `tv <= 1 - disconnect_prob + 3 * joint se`.
    pub bound_satisfied: bool,
    pub samples: usize,
}

/// Empirically compares the exit distributions on `target` of walks started
/// at `x` and at `y`, against the disconnection bound realized by the
/// spanning-tree coupling: the total variation distance is at most one
/// minus the probability that the walk from `x` separates `y` from the
/// target.
pub fn exit_coupling_tv(
    config: &CellConfiguration,
    x: CellId,
    y: CellId,
    target: &CellSet,
    n_samples: usize,
    seed: u64,
) -> Result<CouplingReport> {
    config.check_id(x)?;
    config.check_id(y)?;
    if target.is_empty() {
        return Err(Error::InvalidArgument("empty target set".into()));
    }
    let step_cap = 200 * config.n_cells().max(1024);

    struct Sample {
        exit_x: Option<CellId>,
        exit_y: Option<CellId>,
        disconnects: bool,
    }
    let samples: Vec<Sample> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            // walk from x, recording its range
            let mut visited = vec![false; config.n_cells()];
            let mut cur = x;
            visited[cur.idx()] = true;
            let mut exit_x = None;
            if target.contains(cur) {
                exit_x = Some(cur);
            } else {
                for _ in 0..step_cap {
                    cur = step(config, cur, &mut rng).expect("non-isolated");
                    visited[cur.idx()] = true;
                    if target.contains(cur) {
                        exit_x = Some(cur);
                        break;
                    }
                }
            }
            // does the range of the x-walk separate y from the target?
            let disconnects = if visited[y.idx()] {
                true
            } else {
                let mut reach_target = false;
                let mut seen = vec![false; config.n_cells()];
                let mut stack = vec![y];
                seen[y.idx()] = true;
                'bfs: while let Some(c) = stack.pop() {
                    for &(nb, _) in config.neighbors(c) {
                        if visited[nb.idx()] || seen[nb.idx()] {
                            continue;
                        }
                        if target.contains(nb) {
                            reach_target = true;
                            break 'bfs;
                        }
                        seen[nb.idx()] = true;
                        stack.push(nb);
                    }
                }
                !reach_target
            };
            // independent walk from y
            let mut rng_y = stream_rng(seed ^ 0x9e3779b97f4a7c15, i as u64);
            let mut cur = y;
            let mut exit_y = None;
            if target.contains(cur) {
                exit_y = Some(cur);
            } else {
                for _ in 0..step_cap {
                    cur = step(config, cur, &mut rng_y).expect("non-isolated");
                    if target.contains(cur) {
                        exit_y = Some(cur);
                        break;
                    }
                }
            }
            Sample { exit_x, exit_y, disconnects }
        })
        .collect();

    let exits_x: Vec<CellId> = samples.iter().filter_map(|s| s.exit_x).collect();
    let exits_y: Vec<CellId> = samples.iter().filter_map(|s| s.exit_y).collect();
    let disc = samples.iter().filter(|s| s.disconnects).count();
    let p = disc as f64 / n_samples as f64;
    let p_se = (p * (1.0 - p) / n_samples as f64).sqrt();
    if exits_x.is_empty() || exits_y.is_empty() {
        // the walks live in a component not meeting the target; vacuous
        return Ok(CouplingReport {
            tv: 0.0,
            tv_raw: 0.0,
            tv_bias: 0.0,
            tv_se: 0.0,
            disconnect_prob: p,
            disconnect_se: p_se,
            bound_satisfied: true,
            samples: n_samples,
        });
    }

    let (tv_raw, tv_se) = empirical_tv(&exits_x, &exits_y);
    // split-half bias estimate: the plug-in TV of two same-law samples of
    // size n/2 is sqrt(2) times the bias at size n
    let bias = {
        let (hx, _) = empirical_tv(&exits_x[..exits_x.len() / 2], &exits_x[exits_x.len() / 2..]);
        let (hy, _) = empirical_tv(&exits_y[..exits_y.len() / 2], &exits_y[exits_y.len() / 2..]);
        0.5 * (hx + hy) / std::f64::consts::SQRT_2
    };
    let tv = (tv_raw - bias).max(0.0);
    let joint = (tv_se * tv_se + p_se * p_se).sqrt();
    Ok(CouplingReport {
        tv,
        tv_raw,
        tv_bias: bias,
        tv_se,
        disconnect_prob: p,
        disconnect_se: p_se,
        bound_satisfied: tv <= 1.0 - p + 3.0 * joint,
        samples: n_samples,
    })
}

/// Plug-in total variation between two samples, with the frozen-sign delta
/// method standard error.
fn empirical_tv(a: &[CellId], b: &[CellId]) -> (f64, f64) {
    let mut hist_a: std::collections::BTreeMap<CellId, f64> = Default::default();
    let mut hist_b: std::collections::BTreeMap<CellId, f64> = Default::default();
    for &e in a {
        *hist_a.entry(e).or_insert(0.0) += 1.0;
    }
    for &e in b {
        *hist_b.entry(e).or_insert(0.0) += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let keys: std::collections::BTreeSet<CellId> =
        hist_a.keys().chain(hist_b.keys()).copied().collect();
    let mut tv = 0.0;
    let mut mass_pos_a = 0.0;
    let mut mass_pos_b = 0.0;
    for k in keys {
        let pa = hist_a.get(&k).copied().unwrap_or(0.0) / na;
        let pb = hist_b.get(&k).copied().unwrap_or(0.0) / nb;
        tv += (pa - pb).abs();
        if pa > pb {
            mass_pos_a += pa;
            mass_pos_b += pb;
        }
    }
    tv /= 2.0;
    let var = mass_pos_a * (1.0 - mass_pos_a) / na + mass_pos_b * (1.0 - mass_pos_b) / nb;
    (tv, var.max(0.0).sqrt())
}

/// Exit-law comparison report.
#[derive(Debug, Clone)]
pub struct ExitLawReport {
    /// Prokhorov distance between the walk exit measure and the diffusion
    /// harmonic measure on the enlarged square boundary, in units of the
    /// square side.
    pub prokhorov: f64,
    pub walk_samples: usize,
    pub diffusion_samples: usize,
    /// Boundary-snapping tolerance of the diffusion oracle, in units of the
    /// square side (the oracle's bias is of this order).
    pub step_over_side: f64,
}

/// First crossing point of the segment `a -> b` with the boundary of a
/// square containing `a`.
fn boundary_crossing(s: &Square, a: Point, b: Point) -> Point {
    let d = b - a;
    let mut best = 1.0f64;
    for (lo, hi, da, pa) in [
        (s.anchor.x, s.anchor.x + s.side, d.x, a.x),
        (s.anchor.y, s.anchor.y + s.side, d.y, a.y),
    ] {
        if da != 0.0 {
            for bound in [lo, hi] {
                let t = (bound - pa) / da;
                if (0.0..=1.0).contains(&t) {
                    let p = a + d.scale(t);
                    if s.contains(p, 1e-9 * s.side) {
                        best = best.min(t);
                    }
                }
            }
        }
    }
    a + d.scale(best)
}

/// Compares the law of the walk's exit position from the triple enlargement
/// of `square` (started at `start`) against the harmonic measure of the
/// Brownian motion with covariance `sigma`.
///
/// The diffusion oracle is sampled by walk-on-spheres in the coordinates
/// that make the motion isotropic (the enlarged square maps to a
/// parallelogram), with boundary snapping at `side / 512`; the snapping
/// bias is of that order. Both exit measures are centered at the square
/// center, scaled by `1 / side`, and coalesced to quarter-cell resolution
/// before the flow-based Prokhorov evaluation.
pub fn exit_law_prokhorov(
    config: &CellConfiguration,
    start: CellId,
    square: &Square,
    sigma: [[f64; 2]; 2],
    n_samples: usize,
    seed: u64,
) -> Result<ExitLawReport> {
    config.check_id(start)?;
    let enlarged = square.triple();
    let window = config.window();
    if !window.contains_square(&enlarged, 1e-9 * window.side) {
        return Err(Error::WindowTooSmall(
            "triple enlargement leaves the environment window".into(),
        ));
    }
    let center = square.center();
    let side = square.side;
    let step_cap = 4_000_000usize;

    // walk exits
    let walk_exits: Vec<Point> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut cur = start;
            let mut pos = config.centroid(cur);
            for _ in 0..step_cap {
                let next = step(config, cur, &mut rng).expect("non-isolated");
                let npos = config.centroid(next);
                if !enlarged.contains(npos, 0.0) {
                    let hit = boundary_crossing(&enlarged, pos, npos);
                    return (hit - center).scale(1.0 / side);
                }
                cur = next;
                pos = npos;
            }
            (pos - center).scale(1.0 / side)
        })
        .collect();

    // diffusion oracle: standard planar BM in the whitened coordinates
    // u = L^-1 (z - center), where L L^T = sigma; the enlarged square maps
    // to a parallelogram and walk-on-spheres samples its harmonic measure
    let l11 = sigma[0][0].sqrt();
    if !(l11 > 0.0) {
        return Err(Error::InvalidArgument("sigma must be positive definite".into()));
    }
    let l21 = sigma[1][0] / l11;
    let l22 = (sigma[1][1] - l21 * l21).max(0.0).sqrt();
    if !(l22 > 0.0) {
        return Err(Error::InvalidArgument("sigma must be positive definite".into()));
    }
    let to_u = |z: Point| -> Point {
        let d = z - center;
        let ux = d.x / l11;
        Point::new(ux, (d.y - l21 * ux) / l22)
    };
    let to_z = |u: Point| -> Point {
        center + Point::new(l11 * u.x, l21 * u.x + l22 * u.y)
    };
    let corners = enlarged.corners().map(to_u);
    let snap_eps = (side / 512.0) / l11.max(l22);
    let start_u = to_u(config.centroid(start));
    let bm_exits: Vec<Point> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed ^ 0xb5ad_4ece_da1c_e2a9, i as u64);
            let mut u = start_u;
            loop {
                // distance to the parallelogram boundary
                let mut best = f64::INFINITY;
                let mut nearest = u;
                for e in 0..4 {
                    let (a, b) = (corners[e], corners[(e + 1) % 4]);
                    let ab = b - a;
                    let t = ((u - a).dot(ab) / ab.norm2()).clamp(0.0, 1.0);
                    let p = a + ab.scale(t);
                    let d2 = (u - p).norm2();
                    if d2 < best {
                        best = d2;
                        nearest = p;
                    }
                }
                let r = best.sqrt();
                if r <= snap_eps {
                    let z = clamp_to_square(&enlarged, to_z(nearest));
                    return (z - center).scale(1.0 / side);
                }
                let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                u = u + Point::new(r * theta.cos(), r * theta.sin());
            }
        })
        .collect();

    let mu = EmpiricalMeasure::from_samples(&walk_exits)?.coalesce(0.25 / side);
    let nu = EmpiricalMeasure::from_samples(&bm_exits)?.coalesce(0.25 / side);
    // resolve well below the distances of interest so nearby sides do not
    // quantize to the same bisection grid point
    let dist = prokhorov_distance(&mu, &nu, 2e-4);
    Ok(ExitLawReport {
        prokhorov: dist,
        walk_samples: walk_exits.len(),
        diffusion_samples: bm_exits.len(),
        step_over_side: 1.0 / 512.0,
    })
}

/// Projects a point near the square boundary onto it exactly.
fn clamp_to_square(s: &Square, z: Point) -> Point {
    let x = z.x.clamp(s.anchor.x, s.anchor.x + s.side);
    let y = z.y.clamp(s.anchor.y, s.anchor.y + s.side);
    // push to the nearest edge
    let dl = x - s.anchor.x;
    let dr = s.anchor.x + s.side - x;
    let db = y - s.anchor.y;
    let dt = s.anchor.y + s.side - y;
    let m = dl.min(dr).min(db).min(dt);
    if m == dl {
        Point::new(s.anchor.x, y)
    } else if m == dr {
        Point::new(s.anchor.x + s.side, y)
    } else if m == db {
        Point::new(x, s.anchor.y)
    } else {
        Point::new(x, s.anchor.y + s.side)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_grid, ConductanceLaw, GridSpec};

    fn cid(v: u32) -> CellId {
        CellId(v)
    }

    #[test]
    fn loop_erase_examples() {
        // a simple path maps to itself
        let p = vec![cid(0), cid(1), cid(2)];
        assert_eq!(loop_erase(&p), p);
        // a, b, a, c -> a, c
        assert_eq!(
            loop_erase(&[cid(0), cid(1), cid(0), cid(2)]),
            vec![cid(0), cid(2)]
        );
        // a, b, c, b, d -> a, b, d
        assert_eq!(
            loop_erase(&[cid(0), cid(1), cid(2), cid(1), cid(3)]),
            vec![cid(0), cid(1), cid(3)]
        );
    }

    #[test]
    fn loop_erase_output_is_simple_subsequence() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(13, 0);
        for _ in 0..50 {
            let path: Vec<CellId> =
                (0..60).map(|_| cid(rng.random_range(0..12))).collect();
            let le = loop_erase(&path);
            // simple
            let set: std::collections::BTreeSet<_> = le.iter().collect();
            assert_eq!(set.len(), le.len());
            // endpoints preserved
            assert_eq!(le.first(), path.first());
            assert_eq!(le.last(), path.last());
            // subsequence
            let mut it = path.iter();
            for want in &le {
                assert!(it.any(|got| got == want), "not a subsequence");
            }
        }
    }

    #[test]
    fn identical_starts_have_zero_tv_within_noise() {
        let g = gen_grid(&GridSpec {
            n: 24,
            law: ConductanceLaw::Constant(1.0),
            shift: false,
            seed: 0,
        })
        .unwrap();
        let x = g.center_cell();
        let frame: Vec<CellId> = g.ids().filter(|&id| g.is_frozen(id)).collect();
        let target = CellSet::new(frame, g.n_cells());
        let report = exit_coupling_tv(&g, x, x, &target, 2_000, 7).unwrap();
        // raw plug-in TV carries the finite-sample bias; the corrected value
        // is zero within noise
        assert!(report.tv_raw > 0.0);
        assert!(
            report.tv <= 3.0 * report.tv_se.max(0.01),
            "corrected tv {} (raw {}, bias {})",
            report.tv,
            report.tv_raw,
            report.tv_bias
        );
        assert!(report.bound_satisfied);
    }

    #[test]
    fn adjacent_starts_satisfy_disconnection_bound() {
        let g = gen_grid(&GridSpec {
            n: 32,
            law: ConductanceLaw::Constant(1.0),
            shift: false,
            seed: 0,
        })
        .unwrap();
        let x = g.center_cell();
        let y = g.neighbors(x)[0].0;
        let frame: Vec<CellId> = g.ids().filter(|&id| g.is_frozen(id)).collect();
        let target = CellSet::new(frame, g.n_cells());
        let report = exit_coupling_tv(&g, x, y, &target, 2_000, 11).unwrap();
        assert!(report.disconnect_prob > 0.3, "p_disc {}", report.disconnect_prob);
        assert!(report.bound_satisfied, "tv {} vs 1 - {}", report.tv, report.disconnect_prob);
    }

    #[test]
    fn separated_components_give_vacuous_bound() {
        use crate::environment::CellConfigurationBuilder;
        use crate::geometry::{Region, Square};
        // a path x - t - y: the target separates the two starts
        let window = Square::new(Point::new(0.0, 0.0), 3.0).unwrap();
        let mut b = CellConfigurationBuilder::new(window);
        for i in 0..3 {
            let a = Point::new(i as f64, 0.0);
            b.add_cell(
                Region::from_ring(vec![
                    a,
                    a + Point::new(1.0, 0.0),
                    a + Point::new(1.0, 1.0),
                    a + Point::new(0.0, 1.0),
                ])
                .unwrap(),
            );
        }
        b.add_edge(cid(0), cid(1), 1.0);
        b.add_edge(cid(1), cid(2), 1.0);
        let g = b.build().unwrap();
        let target = CellSet::new(vec![cid(1)], g.n_cells());
        let report = exit_coupling_tv(&g, cid(0), cid(2), &target, 200, 3).unwrap();
        // both absorb at the single target cell: tv = 0, bound holds
        assert_eq!(report.tv, 0.0);
        assert!(report.bound_satisfied);
    }

    #[test]
    fn exit_law_concentrates_when_start_is_on_the_boundary() {
        let g = gen_grid(&GridSpec {
            n: 48,
            law: ConductanceLaw::Constant(1.0),
            shift: false,
            seed: 0,
        })
        .unwrap();
        let square = Square::centered(Point::new(0.0, 0.0), 8.0).unwrap();
        // start on the boundary of the triple enlargement
        let start = g.cell_at(Point::new(11.6, 0.4)).unwrap();
        let report = exit_law_prokhorov(&g, start, &square, [[2.0, 0.0], [0.0, 2.0]], 400, 5)
            .unwrap();
        assert!(report.prokhorov < 0.2, "distance {}", report.prokhorov);
    }

    #[test]
    fn exit_law_window_overflow_errors() {
        let g = gen_grid(&GridSpec {
            n: 16,
            law: ConductanceLaw::Constant(1.0),
            shift: false,
            seed: 0,
        })
        .unwrap();
        let square = Square::centered(Point::new(0.0, 0.0), 8.0).unwrap();
        let err =
            exit_law_prokhorov(&g, g.center_cell(), &square, [[2.0, 0.0], [0.0, 2.0]], 10, 5)
                .unwrap_err();
        assert!(matches!(err, Error::WindowTooSmall(_)));
    }
}
