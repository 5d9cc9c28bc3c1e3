//! Planar primitives: points, axis-aligned squares, polygonal regions, and
//! timed curves with the curves-modulo-parameterization metric.

mod curve;
mod region;

pub use curve::{dcmp, dcmp_loc, first_exit_time, DcmpLocResult, TimedCurve};
pub use region::{region_intersection_area, Region, Ring};

use crate::error::{Error, Result};

/// Absolute geometric tolerance, in plane units, for intersection and
/// adjacency predicates. Windows are O(100) units across, so this is far
/// below any feature size the generators produce.
pub const GEOM_TOL: f64 = 1e-9;

/// A point of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Cross product z-component of `self` and `other` as vectors.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn scale(self, c: f64) -> Point {
        Point::new(c * self.x, c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// A closed axis-aligned square, anchored at its lower-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    pub anchor: Point,
    pub side: f64,
}

impl Square {
    pub fn new(anchor: Point, side: f64) -> Result<Self> {
        if !(side > 0.0) || !anchor.is_finite() || !side.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "square needs a finite anchor and side > 0, got anchor ({}, {}), side {}",
                anchor.x, anchor.y, side
            )));
        }
        Ok(Square { anchor, side })
    }

    /// Square centered at `center`.
    pub fn centered(center: Point, side: f64) -> Result<Self> {
        Square::new(center - Point::new(side / 2.0, side / 2.0), side)
    }

    pub fn center(&self) -> Point {
        self.anchor + Point::new(self.side / 2.0, self.side / 2.0)
    }

    pub fn max_corner(&self) -> Point {
        self.anchor + Point::new(self.side, self.side)
    }

    /// Corners in counterclockwise order starting at the anchor.
    pub fn corners(&self) -> [Point; 4] {
        let a = self.anchor;
        let s = self.side;
        [
            a,
            Point::new(a.x + s, a.y),
            Point::new(a.x + s, a.y + s),
            Point::new(a.x, a.y + s),
        ]
    }

    /// Boundary as four segments, counterclockwise.
    pub fn boundary_segments(&self) -> [(Point, Point); 4] {
        let c = self.corners();
        [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]
    }

    /// Membership in the closed square, within `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x >= self.anchor.x - tol
            && p.y >= self.anchor.y - tol
            && p.x <= self.anchor.x + self.side + tol
            && p.y <= self.anchor.y + self.side + tol
    }

    /// Membership in the half-open square `[x0, x0+s) x [y0, y0+s)`.
    ///
    /// This is the tie-break rule for dyadic point location: points on the
    /// shared boundary of two squares belong to the upper-right one of the
    /// pair, i.e. ties go toward the square whose lower-left region they
    /// start.
    pub fn contains_half_open(&self, p: Point) -> bool {
        p.x >= self.anchor.x
            && p.y >= self.anchor.y
            && p.x < self.anchor.x + self.side
            && p.y < self.anchor.y + self.side
    }

    /// Whether `other` lies inside this square, within `tol`.
    pub fn contains_square(&self, other: &Square, tol: f64) -> bool {
        self.contains(other.anchor, tol) && self.contains(other.max_corner(), tol)
    }

    /// The concentric square with side `3 * side` (the union of the four
    /// dyadic parents).
    pub fn triple(&self) -> Square {
        Square {
            anchor: self.anchor - Point::new(self.side, self.side),
            side: 3.0 * self.side,
        }
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn as_region(&self) -> Region {
        Region::from_ring(self.corners().to_vec()).expect("square ring is valid")
    }
}

/// Squared distance from point `p` to segment `a`-`b`.
pub fn point_segment_dist2(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return (p - a).norm2();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    let proj = a + ab.scale(t);
    (p - proj).norm2()
}

/// Whether segments `a0`-`a1` and `b0`-`b1` intersect (closed segments).
pub fn segments_intersect(a0: Point, a1: Point, b0: Point, b1: Point) -> bool {
    let d1 = (a1 - a0).cross(b0 - a0);
    let d2 = (a1 - a0).cross(b1 - a0);
    let d3 = (b1 - b0).cross(a0 - b0);
    let d4 = (b1 - b0).cross(a1 - b0);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |d: f64, p: Point, q0: Point, q1: Point| {
        d == 0.0
            && p.x >= q0.x.min(q1.x)
            && p.x <= q0.x.max(q1.x)
            && p.y >= q0.y.min(q1.y)
            && p.y <= q0.y.max(q1.y)
    };
    on(d1, b0, a0, a1) || on(d2, b1, a0, a1) || on(d3, a0, b0, b1) || on(d4, a1, b0, b1)
}

/// Distance between two closed segments.
pub fn segment_segment_dist(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    if segments_intersect(a0, a1, b0, b1) {
        return 0.0;
    }
    let d2 = point_segment_dist2(a0, b0, b1)
        .min(point_segment_dist2(a1, b0, b1))
        .min(point_segment_dist2(b0, a0, a1))
        .min(point_segment_dist2(b1, a0, a1));
    d2.sqrt()
}
