//! Uniform dyadic systems of squares (2D) and intervals (1D).
//!
//! A dyadic system is a nested family of closed squares with side lengths
//! `2^(s+k)`, `k` ranging over the integers, such that every square's four
//! dyadic children belong to the family and exactly one of its four dyadic
//! parents does. The uniform version draws `s` uniformly from `[0, 1)`, the
//! anchor offset uniformly from `[0, 2^s)^2`, and each successive parent
//! uniformly among the four choices. Parent choices are a pure function of
//! `(seed, level)`, so materialization is independent of access order.
//!
//! The scale offset makes the family's law invariant (in distribution) under
//! any fixed scaling and translation of the plane, which is what the
//! environment diagnostics lean on.

use crate::environment::CellConfiguration;
use crate::error::{Error, Result};
use crate::geometry::{Point, Square};
use crate::rng::{counter_choice, stream_rng};
use rand::Rng;

/// Levels are clamped so that `|s + k| <= MAX_EXPONENT` keeps side lengths
/// comfortably inside the representable floating range.
pub const MAX_EXPONENT: f64 = 500.0;

/// Chain level of the materialized root square. The root has side
/// `2^(s + ROOT_LEVEL)`, about `1.1e12..2.2e12` plane units: any desk-scale
/// geometry sits deep inside it. Every query is answered by exact midpoint
/// descent from this single root, so squares at different levels nest and
/// agree bit-for-bit.
const ROOT_LEVEL: i32 = 40;

/// A uniform dyadic system of squares.
#[derive(Debug, Clone)]
pub struct DyadicSystem2D {
    /// Scale offset in `[0, 1)`.
    s: f64,
    root: Square,
}

impl DyadicSystem2D {
    /// Draws the system determined by `seed`.
    pub fn sample_uniform(seed: u64) -> DyadicSystem2D {
        let mut rng = stream_rng(seed, u64::MAX);
        let s: f64 = rng.random_range(0.0..1.0);
        let side = 2f64.powf(s);
        let wx: f64 = rng.random_range(0.0..side);
        let wy: f64 = rng.random_range(0.0..side);
        DyadicSystem2D::from_chain(seed, s, Point::new(-wx, -wy))
    }

    /// Test hook: a system with prescribed scale offset and `S_0` anchor;
    /// parent choices all toward the upper-right (choice 0).
    pub fn with_params(s: f64, anchor0: Point) -> Result<DyadicSystem2D> {
        if !(0.0..1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!("s must lie in [0,1), got {s}")));
        }
        let side = 2f64.powf(s);
        if anchor0.x > 0.0 || anchor0.y > 0.0 || anchor0.x <= -side || anchor0.y <= -side {
            return Err(Error::InvalidArgument(
                "anchor must put the origin inside S_0".into(),
            ));
        }
        Ok(DyadicSystem2D::from_chain(u64::MAX, s, anchor0))
    }

    /// Materializes the root by accumulating the parent chain upward from
    /// `S_0`. Seed `u64::MAX` forces choice 0 everywhere (test hook).
    fn from_chain(seed: u64, s: f64, anchor0: Point) -> DyadicSystem2D {
        let base = 2f64.powf(s);
        let mut a = anchor0;
        for j in 1..=ROOT_LEVEL {
            let child_side = base * ((j - 1) as f64).exp2();
            let choice = if seed == u64::MAX { 0 } else { counter_choice(seed, j as u64, 4) };
            let (dx, dy) = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)][choice as usize];
            a = a - Point::new(dx * child_side, dy * child_side);
        }
        let root = Square { anchor: a, side: base * (ROOT_LEVEL as f64).exp2() };
        DyadicSystem2D { s, root }
    }

    pub fn scale_offset(&self) -> f64 {
        self.s
    }

    /// Side length of level-`k` squares, exactly `2^s * 2^k`: consecutive
    /// levels differ by an exact factor of two.
    pub fn side(&self, k: i32) -> Result<f64> {
        if k > ROOT_LEVEL || (self.s + k as f64).abs() > MAX_EXPONENT {
            return Err(Error::DyadicRange(k as i64));
        }
        Ok(2f64.powf(self.s) * (k as f64).exp2())
    }

    /// The origin-containing square of side `2^(s+k)`.
    pub fn origin_square(&self, k: i32) -> Result<Square> {
        self.containing_square(Point::new(0.0, 0.0), k)
    }

    /// The square of the system with side `2^(s+k)` containing `z`.
    ///
    /// Points on shared square boundaries resolve by the half-open rule
    /// (ties toward the square extending up-right, i.e. broken toward the
    /// lower-left edges of that square).
    ///
    /// Location descends by midpoint splitting from the root, the same
    /// subdivision as [`Self::children_of`], so results at different levels
    /// and for different interior points agree exactly in coordinates.
    pub fn containing_square(&self, z: Point, k: i32) -> Result<Square> {
        self.side(k)?; // range check
        if !self.root.contains_half_open(z) {
            return Err(Error::DyadicRange(ROOT_LEVEL as i64));
        }
        let mut sq = self.root;
        for _ in k..ROOT_LEVEL {
            let h = sq.side / 2.0;
            let mid = sq.anchor + Point::new(h, h);
            let dx = if z.x < mid.x { 0.0 } else { h };
            let dy = if z.y < mid.y { 0.0 } else { h };
            sq = Square { anchor: sq.anchor + Point::new(dx, dy), side: h };
        }
        Ok(sq)
    }

    /// The unique parent of `square` inside the system (one level up).
    pub fn parent_of(&self, square: &Square) -> Result<Square> {
        let z = square.anchor + Point::new(square.side / 2.0, square.side / 2.0);
        let k = self.level_of(square)?;
        let parent = self.containing_square(z, k + 1)?;
        debug_assert!(parent.contains_square(square, 1e-9 * square.side));
        Ok(parent)
    }

    /// The four dyadic children (quadrants), all inside the system.
    pub fn children_of(&self, square: &Square) -> [Square; 4] {
        let h = square.side / 2.0;
        let a = square.anchor;
        [
            Square { anchor: a, side: h },
            Square { anchor: a + Point::new(h, 0.0), side: h },
            Square { anchor: a + Point::new(0.0, h), side: h },
            Square { anchor: a + Point::new(h, h), side: h },
        ]
    }

    /// Level `k` with `side = 2^(s+k)`.
    pub fn level_of(&self, square: &Square) -> Result<i32> {
        let k = (square.side.log2() - self.s).round();
        if k.abs() > MAX_EXPONENT {
            return Err(Error::DyadicRange(k as i64));
        }
        Ok(k as i32)
    }

    /// The largest system square containing `z` whose fractional cell mass
    /// does not exceed `m`.
    ///
    /// The mass of `S` is `sum over cells H meeting S of Area(H and S) /
    /// Area(H)`, computed by exact polygon clipping. If no square containing
    /// `z` has mass at most `m`, the smallest materialized square is
    /// returned (floor at 6 dyadic levels below the smallest cell size).
    /// Errors with `WindowTooSmall` when the answer cannot be certified
    /// inside the environment window.
    pub fn mass_square(&self, config: &CellConfiguration, z: Point, m: f64) -> Result<Square> {
        if !(m > 0.0) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
        }
        let window = config.window();
        let mut k = self.floor_level(config)?;
        let mut cur = self.containing_square(z, k)?;
        if config.fractional_mass(&cur) > m {
            // documented floor: every square containing z is heavier than m
            return Ok(cur);
        }
        loop {
            let next = self.containing_square(z, k + 1)?;
            if config.fractional_mass(&next) > m {
                return Ok(cur);
            }
            if !window.contains_square(&next, 1e-9 * window.side) {
                // next escapes the window while its in-window mass is still
                // at most m: the true mass is unknowable here
                return Err(Error::WindowTooSmall(format!(
                    "mass square at ({:.3}, {:.3}) still below mass {m} when leaving the window",
                    z.x, z.y
                )));
            }
            cur = next;
            k += 1;
        }
    }

    /// The mass-`m` partition restricted to `region`: the maximal system
    /// squares of fractional mass at most `m` whose union covers `region`.
    /// Squares intersect only along boundaries. All returned squares must
    /// fit inside the environment window.
    pub fn partition(
        &self,
        config: &CellConfiguration,
        m: f64,
        region: &Square,
    ) -> Result<Vec<Square>> {
        if !(m > 0.0) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
        }
        let window = config.window();
        // ascend to a covering ancestor with mass above m
        let mut k = self.level_of_len(region.side)?;
        let mut top;
        loop {
            top = self.containing_square(region.center(), k)?;
            if top.contains_square(region, 1e-9 * region.side.max(1.0)) {
                if config.fractional_mass(&top) > m {
                    break;
                }
                if !window.contains_square(&top, 1e-9 * window.side) {
                    return Err(Error::WindowTooSmall(
                        "partition ancestor leaves the window while its mass is still small"
                            .into(),
                    ));
                }
                // top itself is the (single) partition square if its parent
                // inside the system is heavier
                let parent = self.parent_of(&top)?;
                if config.fractional_mass(&parent) > m {
                    return Ok(vec![top]);
                }
            }
            k += 1;
            if (self.s + k as f64) > MAX_EXPONENT {
                return Err(Error::DyadicRange(k as i64));
            }
        }

        // descend: children of an overweight square, keep those meeting the
        // region, emit when the mass drops to m or the floor is reached
        let floor_level = self.floor_level(config)?;
        let floor_side = self.side(floor_level)?;
        let mut out = Vec::new();
        let mut stack = vec![top];
        while let Some(s) = stack.pop() {
            for child in self.children_of(&s) {
                if child.anchor.x > region.anchor.x + region.side + 1e-12
                    || child.anchor.y > region.anchor.y + region.side + 1e-12
                    || child.max_corner().x < region.anchor.x - 1e-12
                    || child.max_corner().y < region.anchor.y - 1e-12
                {
                    continue; // misses the region entirely
                }
                if config.fractional_mass(&child) <= m || child.side <= floor_side {
                    out.push(child);
                } else {
                    stack.push(child);
                }
            }
        }
        // deterministic order: by anchor
        out.sort_by(|a, b| {
            (a.anchor.y, a.anchor.x, a.side)
                .partial_cmp(&(b.anchor.y, b.anchor.x, b.side))
                .unwrap()
        });
        if out.iter().any(|s| !window.contains_square(s, 1e-9 * window.side)) {
            return Err(Error::WindowTooSmall(
                "partition square leaves the environment window".into(),
            ));
        }
        Ok(out)
    }

    fn floor_level(&self, config: &CellConfiguration) -> Result<i32> {
        let min_diam = config
            .ids()
            .map(|id| config.diameter(id))
            .fold(f64::INFINITY, f64::min);
        self.level_of_len(min_diam.min(config.window().side) / 64.0)
    }

    fn level_of_len(&self, len: f64) -> Result<i32> {
        let k = (len.log2() - self.s).floor();
        if k.abs() > MAX_EXPONENT {
            return Err(Error::DyadicRange(k as i64));
        }
        Ok(k as i32)
    }
}

/// Monte Carlo estimate of the ergodic average `|S_k|^{-2} int_{S_k}
/// F(config, z) dz`: sample mean and standard error over `n_samples`
/// uniform points of the level-`k` origin square.
pub fn ergodic_average(
    config: &CellConfiguration,
    d: &DyadicSystem2D,
    functional: &dyn Fn(&CellConfiguration, Point) -> f64,
    k: i32,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let square = d.origin_square(k)?;
    let mut acc = 0.0;
    let mut acc2 = 0.0;
    for i in 0..n_samples {
        let mut rng = stream_rng(seed, i as u64);
        let z = Point::new(
            square.anchor.x + rng.random_range(0.0..square.side),
            square.anchor.y + rng.random_range(0.0..square.side),
        );
        let v = functional(config, z);
        acc += v;
        acc2 += v * v;
    }
    let n = n_samples as f64;
    let mean = acc / n;
    let var = (acc2 / n - mean * mean).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Kernel signature of a mass-transport rule.
pub type TransportKernel = Box<dyn Fn(&CellConfiguration, Point, Point) -> f64 + Sync>;

/// A mass-transport rule: a nonnegative kernel `F(config, source, target)`,
/// declared to vanish when `|target - source| > support_radius`.
pub struct TransportRule {
    pub name: &'static str,
    pub support_radius: f64,
    pub eval: TransportKernel,
}

impl TransportRule {
    /// Spreads the mass of the source cell uniformly over itself:
    /// `F(H, w0, w1) = 1{w1 in H_{w0}} / Area(H_{w0})`. Covariant.
    pub fn identity(support_radius: f64) -> TransportRule {
        TransportRule {
            name: "identity",
            support_radius,
            eval: Box::new(|config, w0, w1| match config.cell_at(w0) {
                Some(h) if config.region(h).contains(w1) => 1.0 / config.area(h),
                _ => 0.0,
            }),
        }
    }

    /// Spreads the mass of the source cell uniformly over its rightmost
    /// neighbor (largest centroid x-offset, id as tie break). Covariant.
    pub fn to_right_neighbor(support_radius: f64) -> TransportRule {
        TransportRule {
            name: "to_right_neighbor",
            support_radius,
            eval: Box::new(|config, w0, w1| {
                let Some(h) = config.cell_at(w0) else { return 0.0 };
                let Some(r) = right_neighbor(config, h) else { return 0.0 };
                if config.region(r).contains(w1) {
                    1.0 / config.area(r)
                } else {
                    0.0
                }
            }),
        }
    }

    /// Sends unit density (not mass) to the cells directly above:
    /// `F(H, w0, w1) = 1{w1 in some upward neighbor of H_{w0}}`. This rule
    /// transforms with `C^0` instead of `C^{-2}` under dilations, so it is
    /// deliberately *not* covariant.
    pub fn upward_broken(support_radius: f64) -> TransportRule {
        TransportRule {
            name: "upward_broken",
            support_radius,
            eval: Box::new(|config, w0, w1| {
                let Some(h) = config.cell_at(w0) else { return 0.0 };
                let hit = upward_neighbors(config, h)
                    .into_iter()
                    .any(|u| config.region(u).contains(w1));
                if hit {
                    1.0
                } else {
                    0.0
                }
            }),
        }
    }

    /// Covariant repair of [`TransportRule::upward_broken`]: spreads the
    /// source cell's unit mass uniformly over the union of its upward
    /// neighbors.
    pub fn upward_covariant(support_radius: f64) -> TransportRule {
        TransportRule {
            name: "upward_covariant",
            support_radius,
            eval: Box::new(|config, w0, w1| {
                let Some(h) = config.cell_at(w0) else { return 0.0 };
                let ups = upward_neighbors(config, h);
                let total: f64 = ups.iter().map(|&u| config.area(u)).sum();
                if total <= 0.0 {
                    return 0.0;
                }
                let hit = ups.into_iter().any(|u| config.region(u).contains(w1));
                if hit {
                    1.0 / total
                } else {
                    0.0
                }
            }),
        }
    }

    /// Numeric spot-check of the covariance requirement
    /// `F(C(H - z), C(w0 - z), C(w1 - z)) = C^{-2} F(H, w0, w1)` on a given
    /// configuration and sample points. Returns the worst relative error.
    pub fn covariance_defect(
        &self,
        config: &CellConfiguration,
        samples: &[(Point, Point)],
        scale: f64,
        shift: Point,
    ) -> f64 {
        let transformed = config.scaled_translated(scale, shift);
        let mut worst = 0.0f64;
        for &(w0, w1) in samples {
            let base = (self.eval)(config, w0, w1);
            let t0 = Point::new(scale * w0.x + shift.x, scale * w0.y + shift.y);
            let t1 = Point::new(scale * w1.x + shift.x, scale * w1.y + shift.y);
            let moved = (self.eval)(&transformed, t0, t1);
            let expect = base / (scale * scale);
            let scale_ref = expect.abs().max(moved.abs()).max(1e-300);
            worst = worst.max((moved - expect).abs() / scale_ref);
        }
        worst
    }
}

fn right_neighbor(
    config: &CellConfiguration,
    h: crate::environment::CellId,
) -> Option<crate::environment::CellId> {
    let c = config.centroid(h);
    config
        .neighbors(h)
        .iter()
        .map(|&(nb, _)| (nb, config.centroid(nb).x - c.x))
        .filter(|&(_, dx)| dx > 0.0)
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)))
        .map(|(nb, _)| nb)
}

fn upward_neighbors(
    config: &CellConfiguration,
    h: crate::environment::CellId,
) -> Vec<crate::environment::CellId> {
    let c = config.centroid(h);
    config
        .neighbors(h)
        .iter()
        .map(|&(nb, _)| nb)
        .filter(|&nb| {
            let d = config.centroid(nb) - c;
            d.y > 0.0 && d.y >= d.x.abs()
        })
        .collect()
}

/// Outcome of the mass-transport balance check.
#[derive(Debug, Clone)]
pub struct BalanceReport {
    pub outflow_mean: f64,
    pub outflow_se: f64,
    pub inflow_mean: f64,
    pub inflow_se: f64,
    /// Mean and standard error of the paired per-sample difference.
    pub diff_mean: f64,
    pub diff_se: f64,
    /// `diff_mean / diff_se` (0 when the difference is identically zero).
    pub z_score: f64,
    /// Set when the rule was seen nonzero near the integration radius.
    pub support_warning: bool,
    pub samples: usize,
}

/// Target draws per recentring point: the inner Monte Carlo estimate of the
/// `w`-integrals. Averaging within each sample keeps the paired difference
/// sensitive to genuine imbalance instead of single-draw shot noise.
const TRANSPORT_W_SUBSAMPLES: usize = 32;

/// Compares `E int F(H, 0, w) dw` against `E int F(H, w, 0) dw` by paired
/// Monte Carlo over fresh environments.
///
/// Protocol: for each sample, draw an environment from `sampler`, recenter
/// it at a uniform point of the margin-shrunk window, rescale so the
/// origin-containing cell has unit area (the canonical representative of
/// the environment modulo scaling), then estimate both `w`-integrals over
/// `B_radius(0)` with a shared batch of uniform target points. Covariant
/// rules are insensitive to the canonical rescaling; rules missing the
/// `C^{-2}` factor are exposed by it on environments with more than one
/// cell scale.
pub fn mass_transport_check(
    sampler: &(dyn Fn(u64) -> CellConfiguration + Sync),
    rule: &TransportRule,
    n_envs: usize,
    n_points: usize,
    radius: f64,
    seed: u64,
) -> BalanceReport {
    use rayon::prelude::*;

    let margin_frac = 0.25;
    let per_env: Vec<(Vec<f64>, Vec<f64>, bool)> = (0..n_envs)
        .into_par_iter()
        .map(|e| {
            let env = sampler(seed.wrapping_add(e as u64));
            let window = env.window();
            let margin = margin_frac * window.side;
            let mut outs = Vec::with_capacity(n_points);
            let mut ins = Vec::with_capacity(n_points);
            let mut warn = false;
            let ball_area = std::f64::consts::PI * radius * radius;
            for i in 0..n_points {
                let mut rng = stream_rng(seed ^ 0x5eed_cafe, (e * n_points + i) as u64);
                let z = Point::new(
                    window.anchor.x + margin + rng.random_range(0.0..window.side - 2.0 * margin),
                    window.anchor.y + margin + rng.random_range(0.0..window.side - 2.0 * margin),
                );
                let Some(h) = env.cell_at(z) else {
                    outs.push(0.0);
                    ins.push(0.0);
                    continue;
                };
                let c = 1.0 / env.area(h).sqrt();
                // canonical representative: origin cell has unit area
                let canon = env.scaled_translated(c, Point::new(-c * z.x, -c * z.y));
                let origin = Point::new(0.0, 0.0);
                let mut f_out = 0.0;
                let mut f_in = 0.0;
                for _ in 0..TRANSPORT_W_SUBSAMPLES {
                    let w = loop {
                        let x: f64 = rng.random_range(-radius..radius);
                        let y: f64 = rng.random_range(-radius..radius);
                        if x * x + y * y <= radius * radius {
                            break Point::new(x, y);
                        }
                    };
                    let o = (rule.eval)(&canon, origin, w);
                    let i = (rule.eval)(&canon, w, origin);
                    if (o > 0.0 || i > 0.0) && w.norm() > 0.95 * radius {
                        warn = true;
                    }
                    f_out += o;
                    f_in += i;
                }
                let inv = 1.0 / TRANSPORT_W_SUBSAMPLES as f64;
                outs.push(ball_area * f_out * inv);
                ins.push(ball_area * f_in * inv);
            }
            (outs, ins, warn)
        })
        .collect();

    let mut outs = Vec::new();
    let mut ins = Vec::new();
    let mut warn = false;
    for (o, i, w) in per_env {
        outs.extend(o);
        ins.extend(i);
        warn |= w;
    }
    let stats = |v: &[f64]| {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        (mean, (var / n).sqrt())
    };
    let (om, ose) = stats(&outs);
    let (im, ise) = stats(&ins);
    let diffs: Vec<f64> = outs.iter().zip(&ins).map(|(o, i)| o - i).collect();
    let (dm, dse) = stats(&diffs);
    let z = if dse > 0.0 { dm / dse } else { 0.0 };
    BalanceReport {
        outflow_mean: om,
        outflow_se: ose,
        inflow_mean: im,
        inflow_se: ise,
        diff_mean: dm,
        diff_se: dse,
        z_score: z,
        support_warning: warn,
        samples: outs.len(),
    }
}

/// A uniform dyadic system of intervals on the line.
#[derive(Debug, Clone)]
pub struct DyadicSystem1D {
    s: f64,
    root_left: f64,
    root_len: f64,
}

impl DyadicSystem1D {
    pub fn sample_uniform(seed: u64) -> DyadicSystem1D {
        let mut rng = stream_rng(seed, u64::MAX - 1);
        let s: f64 = rng.random_range(0.0..1.0);
        let base = 2f64.powf(s);
        let w: f64 = rng.random_range(0.0..base);
        let mut left = -w;
        for j in 1..=ROOT_LEVEL {
            if counter_choice(seed, j as u64, 2) == 1 {
                left -= base * ((j - 1) as f64).exp2();
            }
        }
        DyadicSystem1D { s, root_left: left, root_len: base * (ROOT_LEVEL as f64).exp2() }
    }

    pub fn length(&self, k: i32) -> Result<f64> {
        if k > ROOT_LEVEL || (self.s + k as f64).abs() > MAX_EXPONENT {
            return Err(Error::DyadicRange(k as i64));
        }
        Ok(2f64.powf(self.s) * (k as f64).exp2())
    }

    /// The system interval of length `2^(s+k)` containing `t` (half-open
    /// tie-break toward the right interval). Descends by exact midpoint
    /// splitting from the root.
    pub fn containing_interval(&self, t: f64, k: i32) -> Result<(f64, f64)> {
        self.length(k)?; // range check
        if t < self.root_left || t >= self.root_left + self.root_len {
            return Err(Error::DyadicRange(ROOT_LEVEL as i64));
        }
        let (mut lo, mut hi) = (self.root_left, self.root_left + self.root_len);
        for _ in k..ROOT_LEVEL {
            let mid = lo + (hi - lo) / 2.0;
            if t < mid {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo, hi))
    }

    /// The largest origin interval whose overlap with `[lo, hi]` has length
    /// at most `a` (the 1D mass square, with occupied time as the mass).
    pub fn mass_interval(&self, lo: f64, hi: f64, a: f64) -> Result<(f64, f64)> {
        if !(a > 0.0) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {a}")));
        }
        let occupied = |iv: (f64, f64)| (iv.1.min(hi) - iv.0.max(lo)).max(0.0);
        let mut k = ((a.min(1.0) / 64.0).log2() - self.s).floor() as i32;
        let mut cur = self.containing_interval(0.0, k)?;
        if occupied(cur) > a {
            return Ok(cur);
        }
        loop {
            let next = self.containing_interval(0.0, k + 1)?;
            if occupied(next) > a {
                return Ok(cur);
            }
            if next.0 <= lo && next.1 >= hi {
                // the whole trace is inside: mass can no longer grow
                return Ok(next);
            }
            cur = next;
            k += 1;
        }
    }
}
