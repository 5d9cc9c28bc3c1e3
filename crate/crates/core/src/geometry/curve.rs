//! Timed piecewise-linear curves and the metric on curves viewed modulo
//! time parameterization.
//!
//! The metric infimizes the sup-distance over increasing reparameterizations
//! of one curve against the other. For piecewise-linear curves this equals
//! the (continuous) Fréchet distance, computed here with the Alt-Godau
//! free-space decision procedure plus bisection.

use super::{Point, Square};
use crate::error::{Error, Result};

/// A piecewise-linear curve with strictly increasing time stamps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedCurve {
    samples: Vec<(f64, Point)>,
}

impl TimedCurve {
    pub fn new(samples: Vec<(f64, Point)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidGeometry(format!(
                "timed curve needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidGeometry(
                    "timed curve needs strictly increasing times".into(),
                ));
            }
        }
        if samples.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite curve sample".into()));
        }
        Ok(TimedCurve { samples })
    }

    pub fn samples(&self) -> &[(f64, Point)] {
        &self.samples
    }

    pub fn positions(&self) -> Vec<Point> {
        self.samples.iter().map(|&(_, p)| p).collect()
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    /// The polyline truncated at its first exit from the closed ball
    /// `B_r(0)`. Returns the vertex list of the stopped curve (which may be a
    /// single point when the curve starts outside the ball).
    pub fn stopped_at_ball_exit(&self, r: f64) -> Vec<Point> {
        let pts = self.positions();
        if pts[0].norm() > r {
            return vec![pts[0]];
        }
        let mut out = vec![pts[0]];
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.norm() <= r {
                out.push(b);
                continue;
            }
            // first crossing of |a + t (b - a)| = r on [0, 1]
            let d = b - a;
            let qa = d.norm2();
            let qb = 2.0 * a.dot(d);
            let qc = a.norm2() - r * r;
            let disc = qb * qb - 4.0 * qa * qc;
            let t = if qa == 0.0 || disc < 0.0 {
                1.0
            } else {
                ((-qb + disc.sqrt()) / (2.0 * qa)).clamp(0.0, 1.0)
            };
            out.push(a + d.scale(t));
            return out;
        }
        out
    }
}

/// Distance between two curves modulo time parameterization.
///
/// Zero iff the curves traverse the same trace in the same order; invariant
/// under strictly increasing retiming of either argument (the time stamps do
/// not enter at all). The result is accurate to 1e-10 and never smaller than
/// the true value.
pub fn dcmp(a: &TimedCurve, b: &TimedCurve) -> f64 {
    frechet_polyline(&a.positions(), &b.positions(), 1e-10)
}

/// Result of the locally-integrated curve comparison.
#[derive(Debug, Clone, Copy)]
pub struct DcmpLocResult {
    /// Midpoint-rule value of the integral over `[1, r_max]`.
    pub value: f64,
    /// Upper bound `e^{-r_max}` for the truncated tail.
    pub tail_bound: f64,
}

/// Local variant: integrates `e^{-r} (1 and dcmp of the curves stopped at
/// their first exits from B_r(0))` over `r in [1, r_max]` by the midpoint
/// rule with `n_quad` nodes. The discarded tail is bounded by `e^{-r_max}`,
/// reported separately.
pub fn dcmp_loc(a: &TimedCurve, b: &TimedCurve, r_max: f64, n_quad: usize) -> Result<DcmpLocResult> {
    if !(r_max > 1.0) {
        return Err(Error::InvalidArgument(format!("r_max must exceed 1, got {r_max}")));
    }
    if n_quad < 2 {
        return Err(Error::InvalidArgument(format!("n_quad must be at least 2, got {n_quad}")));
    }
    let h = (r_max - 1.0) / n_quad as f64;
    let mut acc = 0.0;
    for i in 0..n_quad {
        let r = 1.0 + (i as f64 + 0.5) * h;
        let pa = a.stopped_at_ball_exit(r);
        let pb = b.stopped_at_ball_exit(r);
        let d = frechet_polyline(&pa, &pb, 1e-10);
        acc += (-r).exp() * d.min(1.0) * h;
    }
    Ok(DcmpLocResult { value: acc, tail_bound: (-r_max).exp() })
}

/// Continuous Fréchet distance between two polylines, to within `tol`.
///
/// Argument order is canonicalized so the function is exactly symmetric.
pub fn frechet_polyline(p: &[Point], q: &[Point], tol: f64) -> f64 {
    let (p, q) = if lex_le(p, q) { (p, q) } else { (q, p) };
    if p.len() == 1 || q.len() == 1 {
        // distance from a point to a polyline traversed entirely
        let (pt, poly) = if p.len() == 1 { (p[0], q) } else { (q[0], p) };
        return poly.iter().map(|&v| v.dist(pt)).fold(0.0, f64::max);
    }

    let lo0 = p[0].dist(q[0]).max(p[p.len() - 1].dist(q[q.len() - 1]));
    let mut hi = lo0;
    for &a in p {
        for &b in q {
            hi = hi.max(a.dist(b));
        }
    }
    if free_space_feasible(p, q, lo0) {
        return lo0;
    }
    let mut lo = lo0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if free_space_feasible(p, q, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn lex_le(p: &[Point], q: &[Point]) -> bool {
    for (a, b) in p.iter().zip(q.iter()) {
        for (x, y) in [(a.x, b.x), (a.y, b.y)] {
            if x < y {
                return true;
            }
            if x > y {
                return false;
            }
        }
    }
    p.len() <= q.len()
}

/// Free interval `[a, b]` of parameters `t` on segment `s0`-`s1` with
/// `|point - s(t)| <= eps`, or `None`.
fn free_interval(point: Point, s0: Point, s1: Point, eps: f64) -> Option<(f64, f64)> {
    let d = s1 - s0;
    let f = s0 - point;
    let qa = d.norm2();
    if qa == 0.0 {
        return if f.norm() <= eps { Some((0.0, 1.0)) } else { None };
    }
    let qb = 2.0 * f.dot(d);
    let qc = f.norm2() - eps * eps;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = ((-qb - sq) / (2.0 * qa)).max(0.0);
    let t1 = ((-qb + sq) / (2.0 * qa)).min(1.0);
    if t0 > t1 {
        None
    } else {
        Some((t0, t1))
    }
}

/// Alt-Godau decision procedure: is the Fréchet distance at most `eps`?
fn free_space_feasible(p: &[Point], q: &[Point], eps: f64) -> bool {
    let np = p.len();
    let nq = q.len();
    if p[0].dist(q[0]) > eps || p[np - 1].dist(q[nq - 1]) > eps {
        return false;
    }

    // l_free[i][j]: free interval on the vertical edge at p-vertex i spanning
    // q-segment j. b_free[i][j]: free interval on the horizontal edge at
    // q-vertex j spanning p-segment i.
    let lf = |i: usize, j: usize| free_interval(p[i], q[j], q[j + 1], eps);
    let bf = |i: usize, j: usize| free_interval(q[j], p[i], p[i + 1], eps);

    // reachable portions, rolled column by column over i
    let mut reach_l: Vec<Option<(f64, f64)>> = vec![None; nq - 1];
    let mut reach_b_up: Vec<Option<(f64, f64)>> = vec![None; nq]; // B[i][j] for current i

    // left boundary (i = 0): climb while the free intervals connect through 0
    let mut open = true;
    #[allow(clippy::needless_range_loop)] // j indexes lf() and reach_l together
    for j in 0..nq - 1 {
        if open {
            match lf(0, j) {
                Some((a, b)) if a <= 0.0 => {
                    reach_l[j] = Some((0.0, b));
                    if b < 1.0 {
                        open = false;
                    }
                }
                _ => open = false,
            }
        }
    }

    for i in 0..np - 1 {
        // bottom edge of row j = 0 for this column
        reach_b_up[0] = if i == 0 {
            bf(0, 0).and_then(|(a, b)| if a <= 0.0 { Some((0.0, b)) } else { None })
        } else {
            // reachable iff the previous bottom edge reaches s = 1
            match (reach_b_up[0], bf(i, 0)) {
                (Some((_, pb)), Some((a, b))) if pb >= 1.0 && a <= 0.0 => Some((0.0, b)),
                _ => None,
            }
        };
        let mut new_l: Vec<Option<(f64, f64)>> = vec![None; nq - 1];
        for j in 0..nq - 1 {
            let cur_l = reach_l[j];
            let cur_b = reach_b_up[j];
            // right edge of cell (i, j) = left edge at p-vertex i+1
            new_l[j] = match (cur_b, cur_l, lf(i + 1, j)) {
                (Some(_), _, Some(free)) => Some(free),
                (None, Some((c, _)), Some((a, b))) => {
                    let lo = a.max(c);
                    if lo <= b {
                        Some((lo, b))
                    } else {
                        None
                    }
                }
                _ => None,
            };
            // top edge of cell (i, j) = bottom edge at q-vertex j+1
            reach_b_up[j + 1] = match (cur_l, cur_b, bf(i, j + 1)) {
                (Some(_), _, Some(free)) => Some(free),
                (None, Some((c, _)), Some((a, b))) => {
                    let lo = a.max(c);
                    if lo <= b {
                        Some((lo, b))
                    } else {
                        None
                    }
                }
                _ => None,
            };
        }
        reach_l = new_l;
    }

    // end corner: top of the last left edge or right of the last bottom edge
    let via_l = reach_l[nq - 2].is_some_and(|(_, b)| b >= 1.0);
    let via_b = reach_b_up[nq - 1].is_some_and(|(_, b)| b >= 1.0);
    via_l || via_b
}

/// First exit time of a timed curve from an axis-aligned square, linearly
/// interpolated between samples; `None` when the curve never leaves.
pub fn first_exit_time(curve: &TimedCurve, square: &Square) -> Option<f64> {
    let s = curve.samples();
    if !square.contains(s[0].1, 0.0) {
        return Some(s[0].0);
    }
    for w in s.windows(2) {
        let ((t0, a), (t1, b)) = (w[0], w[1]);
        if square.contains(b, 0.0) {
            continue;
        }
        // first boundary crossing along a -> b
        let mut best = 1.0f64;
        let d = b - a;
        for (axis_lo, axis_hi, da, pa) in [
            (square.anchor.x, square.anchor.x + square.side, d.x, a.x),
            (square.anchor.y, square.anchor.y + square.side, d.y, a.y),
        ] {
            if da != 0.0 {
                for bound in [axis_lo, axis_hi] {
                    let t = (bound - pa) / da;
                    if (0.0..=1.0).contains(&t) {
                        let pt = a + d.scale(t);
                        if square.contains(pt, 1e-12) {
                            best = best.min(t);
                        }
                    }
                }
            }
        }
        return Some(t0 + best * (t1 - t0));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(pts: &[(f64, f64)]) -> TimedCurve {
        TimedCurve::new(
            pts.iter()
                .enumerate()
                .map(|(i, &(x, y))| (i as f64, Point::new(x, y)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_curves_have_distance_zero() {
        let a = curve(&[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)]);
        assert_eq!(dcmp(&a, &a), 0.0);
    }

    #[test]
    fn parallel_translation() {
        let a = curve(&[(0.0, 0.0), (1.0, 0.0)]);
        let delta = 0.37;
        let b = curve(&[(0.0, delta), (1.0, delta)]);
        let d = dcmp(&a, &b);
        assert!((d - delta).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn retiming_is_invisible() {
        let a = TimedCurve::new(vec![
            (0.0, Point::new(0.0, 0.0)),
            (1.0, Point::new(1.0, 0.0)),
            (2.0, Point::new(2.0, 1.0)),
        ])
        .unwrap();
        let b = TimedCurve::new(vec![
            (0.0, Point::new(0.0, 0.0)),
            (1.0, Point::new(1.0, 0.0)),
            (4.0, Point::new(2.0, 1.0)),
        ])
        .unwrap();
        assert_eq!(dcmp(&a, &b), 0.0);
    }

    #[test]
    fn symmetric_exactly() {
        let a = curve(&[(0.0, 0.0), (1.0, 2.0), (2.0, 0.0), (3.5, 1.0)]);
        let b = curve(&[(0.0, 0.5), (2.0, 0.5), (3.0, 0.1)]);
        assert_eq!(dcmp(&a, &b), dcmp(&b, &a));
    }

    #[test]
    fn continuous_beats_discrete() {
        // zig against a straight line: continuous Fréchet sees the segment
        // interior, so the distance is the peak height
        let a = curve(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        let b = curve(&[(0.0, 0.0), (2.0, 0.0)]);
        let d = dcmp(&a, &b);
        assert!((d - 1.0).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn needs_monotone_matching() {
        let a = curve(&[(0.0, 0.0), (2.0, 2.0)]);
        let b = curve(&[(0.0, 2.0), (2.0, 0.0)]);
        let d = dcmp(&a, &b);
        assert!((d - 2.0).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn curve_needs_increasing_times() {
        assert!(TimedCurve::new(vec![
            (0.0, Point::new(0.0, 0.0)),
            (0.0, Point::new(1.0, 0.0)),
        ])
        .is_err());
    }

    #[test]
    fn stopped_at_ball() {
        let a = curve(&[(0.0, 0.0), (3.0, 0.0)]);
        let stopped = a.stopped_at_ball_exit(2.0);
        assert_eq!(stopped.len(), 2);
        assert!((stopped[1].x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dcmp_loc_argument_validation() {
        let a = curve(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!(dcmp_loc(&a, &a, 0.5, 8).is_err()); // r_max must exceed 1
        assert!(dcmp_loc(&a, &a, 4.0, 1).is_err()); // n_quad at least 2
    }

    #[test]
    fn dcmp_loc_identical_is_zero() {
        let a = curve(&[(0.0, 0.0), (3.0, 0.0), (3.0, 4.0)]);
        let r = dcmp_loc(&a, &a, 6.0, 16).unwrap();
        assert_eq!(r.value, 0.0);
        assert!((r.tail_bound - (-6.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn dcmp_loc_divergence_outside_window_is_invisible() {
        // identical inside B_5, divergent outside; integral over [1, 5] is 0
        let a = curve(&[(0.0, 0.0), (4.0, 0.0), (10.0, 0.0)]);
        let b = curve(&[(0.0, 0.0), (4.0, 0.0), (10.0, 8.0)]);
        let r = dcmp_loc(&a, &b, 5.0, 64).unwrap();
        assert!(r.value <= (-5.0f64).exp());
    }

    #[test]
    fn dcmp_loc_generic_curves_in_unit_range() {
        let a = curve(&[(0.0, 0.0), (1.5, 0.4), (2.5, -0.6), (4.0, 0.2)]);
        let b = curve(&[(0.0, 0.1), (1.0, -0.8), (3.0, 0.9), (4.5, -0.3)]);
        let r = dcmp_loc(&a, &b, 8.0, 64).unwrap();
        assert!(r.value > 0.0 && r.value <= 1.0);
    }

    #[test]
    fn first_exit() {
        let c = curve(&[(0.0, 0.0), (4.0, 0.0)]);
        let s = Square::new(Point::new(-1.0, -1.0), 2.0).unwrap();
        let t = first_exit_time(&c, &s).unwrap();
        assert!((t - 0.25).abs() < 1e-12); // crossing x = 1 a quarter through
        let big = Square::new(Point::new(-10.0, -10.0), 20.0).unwrap();
        assert!(first_exit_time(&c, &big).is_none());
    }
}
