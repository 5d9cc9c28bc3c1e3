//! Polygonal regions: compact planar cells with multiple components and
//! holes, plus the measurements the environment needs (area, centroid,
//! diameter, clipping, intersection area).

use super::{point_segment_dist2, segment_segment_dist, Point, Square};
use crate::error::{Error, Result};

/// A closed polygonal ring (vertex list, implicitly closed).
pub type Ring = Vec<Point>;

/// One connected polygonal piece: an outer ring and optional holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Counterclockwise outer ring.
    pub outer: Ring,
    /// Clockwise hole rings.
    pub holes: Vec<Ring>,
}

/// A compact planar region: a union of polygonal components, holes allowed.
///
/// Components are stored independently; the region's area is the sum of the
/// component ring areas minus the hole areas. Overlap between components is
/// not subtracted (the generators only produce overlapping components for
/// cosmetic zero-width connectors, where the double count is negligible).
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub components: Vec<Component>,
}

fn signed_ring_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a.cross(b);
    }
    acc / 2.0
}

fn validate_ring(ring: &[Point]) -> Result<()> {
    if ring.len() < 3 {
        return Err(Error::InvalidGeometry(format!(
            "ring needs at least 3 vertices, got {}",
            ring.len()
        )));
    }
    if ring.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidGeometry("non-finite ring vertex".into()));
    }
    if signed_ring_area(ring) == 0.0 {
        return Err(Error::InvalidGeometry(
            "degenerate ring: zero signed area (collinear vertices)".into(),
        ));
    }
    Ok(())
}

fn orient(mut ring: Ring, ccw: bool) -> Ring {
    if (signed_ring_area(&ring) > 0.0) != ccw {
        ring.reverse();
    }
    ring
}

impl Region {
    /// Region with a single outer ring and no holes. The ring orientation is
    /// normalized to counterclockwise.
    pub fn from_ring(ring: Ring) -> Result<Self> {
        Region::new(vec![(ring, Vec::new())])
    }

    /// Region from `(outer, holes)` pairs. Orientations are normalized
    /// (outer counterclockwise, holes clockwise).
    pub fn new(components: Vec<(Ring, Vec<Ring>)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidGeometry("region needs at least one component".into()));
        }
        let mut out = Vec::with_capacity(components.len());
        for (outer, holes) in components {
            validate_ring(&outer)?;
            for h in &holes {
                validate_ring(h)?;
            }
            out.push(Component {
                outer: orient(outer, true),
                holes: holes.into_iter().map(|h| orient(h, false)).collect(),
            });
        }
        let region = Region { components: out };
        if !(region.area() > 0.0) {
            return Err(Error::InvalidGeometry("region has nonpositive area".into()));
        }
        Ok(region)
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        self.components
            .iter()
            .flat_map(|c| std::iter::once(&c.outer).chain(c.holes.iter()))
    }

    fn signed_rings(&self) -> impl Iterator<Item = (&Ring, f64)> {
        self.components.iter().flat_map(|c| {
            std::iter::once((&c.outer, 1.0)).chain(c.holes.iter().map(|h| (h, -1.0)))
        })
    }

    /// Shoelace area summed over components, holes subtracted.
    pub fn area(&self) -> f64 {
        self.signed_rings()
            .map(|(ring, _)| signed_ring_area(ring))
            .sum()
    }

    /// Area-weighted centroid over all components (holes carry negative
    /// weight).
    pub fn centroid(&self) -> Result<Point> {
        let mut ax = 0.0;
        let mut ay = 0.0;
        let mut total = 0.0;
        for (ring, _) in self.signed_rings() {
            let n = ring.len();
            for i in 0..n {
                let a = ring[i];
                let b = ring[(i + 1) % n];
                let w = a.cross(b);
                ax += w * (a.x + b.x);
                ay += w * (a.y + b.y);
                total += w;
            }
        }
        if total.abs() <= f64::MIN_POSITIVE {
            return Err(Error::InvalidGeometry("centroid of a zero-area region".into()));
        }
        Ok(Point::new(ax / (3.0 * total), ay / (3.0 * total)))
    }

    /// Maximum pairwise distance between boundary vertices. Exact for
    /// polygons: the diameter of a polygon is attained at vertices.
    pub fn diameter(&self) -> f64 {
        let verts: Vec<Point> = self.rings().flatten().copied().collect();
        let mut best = 0.0f64;
        for i in 0..verts.len() {
            for j in (i + 1)..verts.len() {
                best = best.max((verts[i] - verts[j]).norm2());
            }
        }
        best.sqrt()
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for ring in self.rings() {
            for p in ring {
                lo.x = lo.x.min(p.x);
                lo.y = lo.y.min(p.y);
                hi.x = hi.x.max(p.x);
                hi.y = hi.y.max(p.y);
            }
        }
        (lo, hi)
    }

    /// Even-odd point membership, holes handled via the signed ring set.
    pub fn contains(&self, p: Point) -> bool {
        self.components.iter().any(|c| {
            point_in_ring(p, &c.outer) && !c.holes.iter().any(|h| point_in_ring(p, h))
        })
    }

    /// Distance from the region (as a closed set) to a point.
    pub fn dist_to_point(&self, p: Point) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for ring in self.rings() {
            let n = ring.len();
            for i in 0..n {
                best = best.min(point_segment_dist2(p, ring[i], ring[(i + 1) % n]));
            }
        }
        best.sqrt()
    }

    /// Distance from the region to a closed segment.
    pub fn dist_to_segment(&self, a: Point, b: Point) -> f64 {
        if self.contains(a) || self.contains(b) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for ring in self.rings() {
            let n = ring.len();
            for i in 0..n {
                best = best.min(segment_segment_dist(ring[i], ring[(i + 1) % n], a, b));
                if best == 0.0 {
                    return 0.0;
                }
            }
        }
        best
    }

    /// Distance from the region to a closed square.
    pub fn dist_to_square(&self, s: &Square) -> f64 {
        // region vertex inside the square, or square corner inside the region
        if self.rings().flatten().any(|&p| s.contains(p, 0.0)) {
            return 0.0;
        }
        if s.corners().iter().any(|&c| self.contains(c)) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for (a, b) in s.boundary_segments() {
            best = best.min(self.dist_to_segment(a, b));
            if best == 0.0 {
                return 0.0;
            }
        }
        best
    }

    /// Distance between two regions as closed sets.
    pub fn dist_to_region(&self, other: &Region) -> f64 {
        if self.rings().flatten().any(|&p| other.contains(p))
            || other.rings().flatten().any(|&p| self.contains(p))
        {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for ra in self.rings() {
            let na = ra.len();
            for i in 0..na {
                let (a0, a1) = (ra[i], ra[(i + 1) % na]);
                for rb in other.rings() {
                    let nb = rb.len();
                    for j in 0..nb {
                        best = best.min(segment_segment_dist(a0, a1, rb[j], rb[(j + 1) % nb]));
                        if best == 0.0 {
                            return 0.0;
                        }
                    }
                }
            }
        }
        best
    }

    /// Area of the intersection with an axis-aligned square, by exact
    /// polygon clipping of each ring against the box.
    pub fn clip_area(&self, s: &Square) -> f64 {
        self.signed_rings()
            .map(|(ring, sign)| sign * clip_ring_box_area(ring, s).abs())
            .sum()
    }

    /// Translate by `dz` and scale about the origin by `c` (`p -> c * (p + dz)`
    /// is *not* the convention; this computes `p -> c * p + dz`).
    pub fn scaled_translated(&self, c: f64, dz: Point) -> Region {
        let map = |p: &Point| Point::new(c * p.x + dz.x, c * p.y + dz.y);
        Region {
            components: self
                .components
                .iter()
                .map(|comp| Component {
                    outer: comp.outer.iter().map(map).collect(),
                    holes: comp.holes.iter().map(|h| h.iter().map(map).collect()).collect(),
                })
                .collect(),
        }
    }
}

/// Even-odd ray casting.
fn point_in_ring(p: Point, ring: &[Point]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = ring[i];
        let b = ring[j];
        // boundary points count as inside: check proximity to the edge
        if point_segment_dist2(p, a, b) == 0.0 {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Absolute area of `ring` clipped to the box, via Sutherland-Hodgman
/// against the four half-planes. Valid for arbitrary simple subject rings
/// (the degenerate bridge edges the algorithm can introduce enclose zero
/// area).
fn clip_ring_box_area(ring: &[Point], s: &Square) -> f64 {
    let x0 = s.anchor.x;
    let y0 = s.anchor.y;
    let x1 = s.anchor.x + s.side;
    let y1 = s.anchor.y + s.side;

    let mut poly: Vec<Point> = ring.to_vec();
    // inside tests and segment-boundary intersections for each half-plane
    let clip = |poly: &[Point], inside: &dyn Fn(Point) -> bool, cross: &dyn Fn(Point, Point) -> Point| {
        let mut out = Vec::with_capacity(poly.len() + 4);
        let n = poly.len();
        for i in 0..n {
            let cur = poly[i];
            let prev = poly[(i + n - 1) % n];
            let cur_in = inside(cur);
            let prev_in = inside(prev);
            if cur_in {
                if !prev_in {
                    out.push(cross(prev, cur));
                }
                out.push(cur);
            } else if prev_in {
                out.push(cross(prev, cur));
            }
        }
        out
    };

    let lerp_x = |a: Point, b: Point, x: f64| {
        let t = (x - a.x) / (b.x - a.x);
        Point::new(x, a.y + t * (b.y - a.y))
    };
    let lerp_y = |a: Point, b: Point, y: f64| {
        let t = (y - a.y) / (b.y - a.y);
        Point::new(a.x + t * (b.x - a.x), y)
    };

    poly = clip(&poly, &|p| p.x >= x0, &|a, b| lerp_x(a, b, x0));
    if poly.len() < 3 {
        return 0.0;
    }
    poly = clip(&poly, &|p| p.x <= x1, &|a, b| lerp_x(a, b, x1));
    if poly.len() < 3 {
        return 0.0;
    }
    poly = clip(&poly, &|p| p.y >= y0, &|a, b| lerp_y(a, b, y0));
    if poly.len() < 3 {
        return 0.0;
    }
    poly = clip(&poly, &|p| p.y <= y1, &|a, b| lerp_y(a, b, y1));
    if poly.len() < 3 {
        return 0.0;
    }
    signed_ring_area(&poly)
}

/// Ear-clipping triangulation of a simple ring (no holes). O(n^2); rings in
/// this codebase are small.
fn triangulate_ring(ring: &[Point]) -> Vec<[Point; 3]> {
    let mut idx: Vec<usize> = (0..ring.len()).collect();
    // work on a counterclockwise copy
    let ccw = signed_ring_area(ring) > 0.0;
    if !ccw {
        idx.reverse();
    }
    let mut tris = Vec::with_capacity(ring.len().saturating_sub(2));
    let mut guard = 0usize;
    while idx.len() > 3 && guard < 10_000 {
        guard += 1;
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let a = ring[idx[(i + n - 1) % n]];
            let b = ring[idx[i]];
            let c = ring[idx[(i + 1) % n]];
            if (b - a).cross(c - a) <= 0.0 {
                continue; // reflex corner
            }
            // no other vertex inside the candidate ear
            let mut ear = true;
            for &other in &idx {
                let p = ring[other];
                if p == a || p == b || p == c {
                    continue;
                }
                if point_in_triangle(p, a, b, c) {
                    ear = false;
                    break;
                }
            }
            if ear {
                tris.push([a, b, c]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            break; // numerically stuck; fall through with the remainder fan
        }
    }
    if idx.len() == 3 {
        tris.push([ring[idx[0]], ring[idx[1]], ring[idx[2]]]);
    } else if idx.len() > 3 {
        for i in 1..idx.len() - 1 {
            tris.push([ring[idx[0]], ring[idx[i]], ring[idx[i + 1]]]);
        }
    }
    tris
}

fn point_in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    let d1 = (b - a).cross(p - a);
    let d2 = (c - b).cross(p - b);
    let d3 = (a - c).cross(p - c);
    d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0
}

/// Area of the intersection of two convex polygons (Sutherland-Hodgman).
fn convex_clip_area(subject: &[Point], clip: &[Point]) -> f64 {
    let mut poly = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if poly.len() < 3 {
            return 0.0;
        }
        let a = clip[i];
        let b = clip[(i + 1) % n];
        let dir = b - a;
        let mut out = Vec::with_capacity(poly.len() + 2);
        let m = poly.len();
        for j in 0..m {
            let cur = poly[j];
            let prev = poly[(j + m - 1) % m];
            let cur_in = dir.cross(cur - a) >= 0.0;
            let prev_in = dir.cross(prev - a) >= 0.0;
            let cross_pt = |p: Point, q: Point| {
                let dp = dir.cross(p - a);
                let dq = dir.cross(q - a);
                let t = dp / (dp - dq);
                p + (q - p).scale(t)
            };
            if cur_in {
                if !prev_in {
                    out.push(cross_pt(prev, cur));
                }
                out.push(cur);
            } else if prev_in {
                out.push(cross_pt(prev, cur));
            }
        }
        poly = out;
    }
    if poly.len() < 3 {
        0.0
    } else {
        signed_ring_area(&poly).abs()
    }
}

/// Area of the intersection of two regions.
///
/// Each region is decomposed into signed triangles (ear clipping of each
/// ring, holes negative); the intersection area is the signed sum of
/// pairwise triangle-triangle intersection areas.
pub fn region_intersection_area(a: &Region, b: &Region) -> f64 {
    // cheap bbox reject
    let (alo, ahi) = a.bbox();
    let (blo, bhi) = b.bbox();
    if alo.x > bhi.x || blo.x > ahi.x || alo.y > bhi.y || blo.y > ahi.y {
        return 0.0;
    }
    let tri_a: Vec<([Point; 3], f64)> = a
        .signed_rings()
        .flat_map(|(ring, sign)| triangulate_ring(ring).into_iter().map(move |t| (t, sign)))
        .collect();
    let tri_b: Vec<([Point; 3], f64)> = b
        .signed_rings()
        .flat_map(|(ring, sign)| triangulate_ring(ring).into_iter().map(move |t| (t, sign)))
        .collect();
    let mut total = 0.0;
    for (ta, sa) in &tri_a {
        // ccw order for the clipper
        let ta = ccw_triangle(*ta);
        for (tb, sb) in &tri_b {
            let tb = ccw_triangle(*tb);
            total += sa * sb * convex_clip_area(&ta, &tb);
        }
    }
    total
}

fn ccw_triangle(t: [Point; 3]) -> Vec<Point> {
    if (t[1] - t[0]).cross(t[2] - t[0]) >= 0.0 {
        t.to_vec()
    } else {
        vec![t[0], t[2], t[1]]
    }
}
