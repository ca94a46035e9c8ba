//! Exact integer geometry: orientation, segment intersection, hulls and
//! general-position validation.
//!
//! Every predicate here is evaluated with integer arithmetic only. Input
//! coordinates are bounded by [`COORD_BOUND`], which keeps every 3-point
//! determinant far inside `i64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest admissible absolute coordinate value (2^20).
pub const COORD_BOUND: i64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn in_bounds(&self) -> bool {
        self.x.abs() <= COORD_BOUND && self.y.abs() <= COORD_BOUND
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(i64, i64)> for Point {
    fn from((x, y): (i64, i64)) -> Self {
        Point::new(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    pub fn sign(self) -> i32 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }

    fn from_det(det: i64) -> Self {
        match det.cmp(&0) {
            Ordering::Less => Orientation::Clockwise,
            Ordering::Equal => Orientation::Collinear,
            Ordering::Greater => Orientation::CounterClockwise,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("orientation determinant overflowed; coordinates exceed the supported bound")]
    Overflow,
    #[error("point {index} at {point} exceeds the coordinate bound of {bound}")]
    OutOfBounds { index: usize, point: Point, bound: i64 },
    #[error("point set is not in general position: {0}")]
    Degenerate(PositionViolation),
}

/// First offending configuration found by [`validate_general_position`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositionViolation {
    Duplicate(usize, usize),
    Collinear(usize, usize, usize),
}

impl fmt::Display for PositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionViolation::Duplicate(i, j) => write!(f, "points {i} and {j} coincide"),
            PositionViolation::Collinear(i, j, k) => {
                write!(f, "points {i}, {j} and {k} are collinear")
            }
        }
    }
}

/// Exact orientation of the triple `(p, q, r)`: the sign of `(q - p) x (r - p)`.
pub fn orient(p: Point, q: Point, r: Point) -> Result<Orientation, GeometryError> {
    let det = (|| {
        let ux = q.x.checked_sub(p.x)?;
        let uy = q.y.checked_sub(p.y)?;
        let vx = r.x.checked_sub(p.x)?;
        let vy = r.y.checked_sub(p.y)?;
        ux.checked_mul(vy)?.checked_sub(uy.checked_mul(vx)?)
    })()
    .ok_or(GeometryError::Overflow)?;
    Ok(Orientation::from_det(det))
}

// Coordinates inside COORD_BOUND cannot overflow.
fn orient_bounded(p: Point, q: Point, r: Point) -> i32 {
    let det = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    det.signum() as i32
}

/// `r` lies in the axis-aligned box spanned by `p` and `q`.
fn in_box(p: Point, q: Point, r: Point) -> bool {
    p.x.min(q.x) <= r.x && r.x <= p.x.max(q.x) && p.y.min(q.y) <= r.y && r.y <= p.y.max(q.y)
}

/// Closed segments `ab` and `cd` have at least one common point.
pub fn closed_segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient_bounded(a, b, c);
    let o2 = orient_bounded(a, b, d);
    let o3 = orient_bounded(c, d, a);
    let o4 = orient_bounded(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && in_box(a, b, c))
        || (o2 == 0 && in_box(a, b, d))
        || (o3 == 0 && in_box(c, d, a))
        || (o4 == 0 && in_box(c, d, b))
}

/// Two drawn segments conflict: they meet anywhere except at a single shared
/// endpoint. Segments with one geometric endpoint in common only conflict
/// when they overlap along a line.
pub fn segments_conflict(a: Point, b: Point, c: Point, d: Point) -> bool {
    let shared = [(a, c), (a, d), (b, c), (b, d)]
        .iter()
        .filter(|(u, v)| u == v)
        .count();
    match shared {
        0 => closed_segments_intersect(a, b, c, d),
        1 => {
            // Overlap beyond the shared point requires all four collinear.
            let (far1, far2, common) = if a == c {
                (b, d, a)
            } else if a == d {
                (b, c, a)
            } else if b == c {
                (a, d, b)
            } else {
                (a, c, b)
            };
            orient_bounded(common, far1, far2) == 0
                && (far1.x - common.x) * (far2.x - common.x) + (far1.y - common.y) * (far2.y - common.y) > 0
        }
        // Same geometric endpoints: drawn on top of each other unless the
        // caller treats them as distinct combinatorial copies.
        _ => false,
    }
}

/// The open segment `pq` (endpoints excluded) meets the closed segment `ab`.
pub fn open_segment_hits(p: Point, q: Point, a: Point, b: Point) -> bool {
    let o_pa = orient_bounded(p, q, a);
    let o_pb = orient_bounded(p, q, b);
    if o_pa == 0 && o_pb == 0 {
        // Collinear: compare intervals along the dominant axis.
        let key = |r: Point| if p.x != q.x { r.x } else { r.y };
        let (lo, hi) = (key(p).min(key(q)), key(p).max(key(q)));
        let (slo, shi) = (key(a).min(key(b)), key(a).max(key(b)));
        return shi > lo && slo < hi;
    }
    let strictly_inside = |r: Point| orient_bounded(p, q, r) == 0 && in_box(p, q, r) && r != p && r != q;
    if strictly_inside(a) || strictly_inside(b) {
        return true;
    }
    let o_ap = orient_bounded(a, b, p);
    let o_aq = orient_bounded(a, b, q);
    o_pa * o_pb < 0 && o_ap * o_aq < 0
}

/// The open segment `pq` is blocked by at least one of `segs`.
pub fn open_segment_blocked<I>(p: Point, q: Point, segs: I) -> bool
where
    I: IntoIterator<Item = (Point, Point)>,
{
    segs.into_iter().any(|(a, b)| open_segment_hits(p, q, a, b))
}

/// Distinctness and no-three-collinear check. Duplicates are reported before
/// collinear triples; within each class the lexicographically first index
/// tuple wins.
pub fn validate_general_position(points: &[Point]) -> Result<(), PositionViolation> {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                return Err(PositionViolation::Duplicate(i, j));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if orient_bounded(points[i], points[j], points[k]) == 0 {
                    return Err(PositionViolation::Collinear(i, j, k));
                }
            }
        }
    }
    Ok(())
}

/// Normalized segment between two point indices (`a < b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    a: usize,
    b: usize,
}

impl Segment {
    /// Panics if `u == v`.
    pub fn new(u: usize, v: usize) -> Self {
        assert_ne!(u, v, "segment endpoints must differ");
        Segment { a: u.min(v), b: u.max(v) }
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint opposite `v`, if `v` is an endpoint.
    pub fn other(&self, v: usize) -> Option<usize> {
        if v == self.a {
            Some(self.b)
        } else if v == self.b {
            Some(self.a)
        } else {
            None
        }
    }

    pub fn shares_endpoint(&self, other: &Segment) -> bool {
        self.contains(other.a) || self.contains(other.b)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// An immutable point set in general position with bounded integer
/// coordinates. Points are labelled by their index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self, GeometryError> {
        if let Some((index, &point)) = points.iter().enumerate().find(|(_, p)| !p.in_bounds()) {
            return Err(GeometryError::OutOfBounds { index, point, bound: COORD_BOUND });
        }
        validate_general_position(&points).map_err(GeometryError::Degenerate)?;
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn orient(&self, i: usize, j: usize, k: usize) -> Orientation {
        match orient_bounded(self.points[i], self.points[j], self.points[k]) {
            -1 => Orientation::Clockwise,
            0 => Orientation::Collinear,
            _ => Orientation::CounterClockwise,
        }
    }

    /// Sub-point-set on the given indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> PointSet {
        PointSet { points: indices.iter().map(|&i| self.points[i]).collect() }
    }

    /// Closed-segment crossing between two index segments. Segments sharing
    /// an endpoint never cross.
    pub fn segments_cross(&self, s: Segment, t: Segment) -> bool {
        if s.shares_endpoint(&t) {
            return false;
        }
        closed_segments_intersect(self[s.a], self[s.b], self[t.a], self[t.b])
    }

    /// Point `v` lies inside or on the boundary of triangle `(i, j, k)`.
    pub fn in_triangle(&self, i: usize, j: usize, k: usize, v: usize) -> bool {
        let turn = self.orient(i, j, k).sign();
        let s1 = self.orient(i, j, v).sign() * turn;
        let s2 = self.orient(j, k, v).sign() * turn;
        let s3 = self.orient(k, i, v).sign() * turn;
        s1 >= 0 && s2 >= 0 && s3 >= 0
    }

    /// First point other than the corners inside triangle `(i, j, k)`.
    pub fn triangle_witness(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        (0..self.len()).find(|&v| v != i && v != j && v != k && self.in_triangle(i, j, k, v))
    }

    /// Triangle `(i, j, k)` contains no other point of the set.
    pub fn triangle_is_empty(&self, i: usize, j: usize, k: usize) -> bool {
        self.triangle_witness(i, j, k).is_none()
    }

    pub fn is_convex_position(&self) -> bool {
        self.len() < 3 || convex_hull(self).len() == self.len()
    }
}

impl Index<usize> for PointSet {
    type Output = Point;

    fn index(&self, i: usize) -> &Point {
        &self.points[i]
    }
}

/// Both segments strictly straddle each other's supporting line. Equivalent to
/// [`PointSet::segments_cross`] for disjoint-endpoint segments in general
/// position.
pub fn strictly_straddle(ps: &PointSet, s: Segment, t: Segment) -> bool {
    let (a, b) = s.endpoints();
    let (c, d) = t.endpoints();
    ps.orient(a, b, c).sign() * ps.orient(a, b, d).sign() < 0
        && ps.orient(c, d, a).sign() * ps.orient(c, d, b).sign() < 0
}

/// Indices sorted by `(x, y)`.
pub fn sort_left_to_right(ps: &PointSet) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ps.len()).collect();
    order.sort_by_key(|&i| (ps[i].x, ps[i].y));
    order
}

/// Convex hull vertices in counterclockwise order, starting from the
/// lexicographically smallest point (monotone chain).
pub fn convex_hull(ps: &PointSet) -> Vec<usize> {
    let order = sort_left_to_right(ps);
    if order.len() < 3 {
        return order;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2 && ps.orient(lower[lower.len() - 2], lower[lower.len() - 1], i) != Orientation::CounterClockwise {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2 && ps.orient(upper[upper.len() - 2], upper[upper.len() - 1], i) != Orientation::CounterClockwise {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
