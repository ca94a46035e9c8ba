//! Plane almost-perfect matchings and the two flip rules.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{convex_hull, sort_left_to_right, PointSet, Segment};

/// Which moves connect two matchings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum FlipRule {
    /// Match the unmatched point to any visible matched point.
    #[default]
    #[serde(rename = "flip")]
    EdgeFlip,
    /// Edge flip whose removed and added edge span an empty triangle.
    #[serde(rename = "rotation")]
    EmptyTriangleRotation,
}

impl FlipRule {
    pub fn name(self) -> &'static str {
        match self {
            FlipRule::EdgeFlip => "flip",
            FlipRule::EmptyTriangleRotation => "rotation",
        }
    }
}

impl std::str::FromStr for FlipRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flip" | "edge" | "edge-flip" => Ok(FlipRule::EdgeFlip),
            "rotation" | "empty-triangle" => Ok(FlipRule::EmptyTriangleRotation),
            other => Err(format!("unknown flip rule `{other}` (expected flip or rotation)")),
        }
    }
}

impl fmt::Display for FlipRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One flip: the unmatched point `p` is matched to the pivot `q`, and `q`'s
/// former partner `r` becomes unmatched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flip {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl Flip {
    pub fn new(p: usize, q: usize, r: usize) -> Self {
        Flip { p, q, r }
    }

    /// The flip that undoes this one.
    pub fn reversed(self) -> Flip {
        Flip { p: self.r, q: self.q, r: self.p }
    }

    pub fn added(self) -> Segment {
        Segment::new(self.p, self.q)
    }

    pub fn removed(self) -> Segment {
        Segment::new(self.q, self.r)
    }
}

impl fmt::Display for Flip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.p, self.q, self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("almost-perfect matchings need an odd number of points, got {0}")]
    EvenPointCount(usize),
    #[error("expected {expected} edges, got {got}")]
    WrongEdgeCount { expected: usize, got: usize },
    #[error("point index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("point {0} is used more than once")]
    Reused(usize),
    #[error("segments {0} and {1} cross")]
    NotPlane(Segment, Segment),
    #[error("point set is not in convex position")]
    NotConvex,
    #[error("matching is on {got} points, point set has {expected}")]
    HostMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error("flip starts at {got}, but the unmatched point is {expected}")]
    WrongUnmatched { expected: usize, got: usize },
    #[error("pivot {0} is not a matched point")]
    PivotNotMatched(usize),
    #[error("pivot {q} is matched to {actual}, flip names {claimed}")]
    WrongPartner { q: usize, actual: usize, claimed: usize },
    #[error("new segment {added} crosses {blocker}")]
    Crossing { added: Segment, blocker: Segment },
    #[error("triangle {p}-{q}-{r} contains point {witness}")]
    NonEmptyTriangle { p: usize, q: usize, r: usize, witness: usize },
}

/// A plane almost-perfect matching on a point set with `n = 2m + 1` points.
///
/// Stored as a mate table: `mate[v]` is `v`'s partner and the unmatched point
/// is its own mate. Two matchings are equal iff their edge sets and unmatched
/// points agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    mate: Vec<usize>,
    unmatched: usize,
}

impl Matching {
    /// Validates structure and planarity against `ps`.
    pub fn new(ps: &PointSet, edges: &[(usize, usize)], unmatched: usize) -> Result<Self, MatchingError> {
        let m = Self::from_edges(ps.len(), edges, unmatched)?;
        m.check_plane(ps)?;
        Ok(m)
    }

    /// Validates structure only (no crossing test).
    pub fn from_edges(n: usize, edges: &[(usize, usize)], unmatched: usize) -> Result<Self, MatchingError> {
        if n.is_multiple_of(2) {
            return Err(MatchingError::EvenPointCount(n));
        }
        if edges.len() != n / 2 {
            return Err(MatchingError::WrongEdgeCount { expected: n / 2, got: edges.len() });
        }
        if unmatched >= n {
            return Err(MatchingError::IndexOutOfRange(unmatched));
        }
        let mut mate = vec![usize::MAX; n];
        mate[unmatched] = unmatched;
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(MatchingError::IndexOutOfRange(w));
                }
                if mate[w] != usize::MAX {
                    return Err(MatchingError::Reused(w));
                }
            }
            if u == v {
                return Err(MatchingError::Reused(u));
            }
            mate[u] = v;
            mate[v] = u;
        }
        Ok(Matching { mate, unmatched })
    }

    pub fn point_count(&self) -> usize {
        self.mate.len()
    }

    pub fn edge_count(&self) -> usize {
        self.mate.len() / 2
    }

    pub fn unmatched(&self) -> usize {
        self.unmatched
    }

    /// Partner of `v`, or `None` for the unmatched point.
    pub fn mate(&self, v: usize) -> Option<usize> {
        let w = self.mate[v];
        (w != v).then_some(w)
    }

    pub fn has_edge(&self, s: Segment) -> bool {
        self.mate[s.a()] == s.b() && s.a() != s.b()
    }

    /// Edges in ascending order.
    pub fn edges(&self) -> Vec<Segment> {
        (0..self.mate.len())
            .filter(|&v| self.mate[v] > v)
            .map(|v| Segment::new(v, self.mate[v]))
            .collect()
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges().iter().map(Segment::endpoints).collect()
    }

    fn check_plane(&self, ps: &PointSet) -> Result<(), MatchingError> {
        if ps.len() != self.mate.len() {
            return Err(MatchingError::HostMismatch { expected: ps.len(), got: self.mate.len() });
        }
        let edges = self.edges();
        for (i, &s) in edges.iter().enumerate() {
            for &t in &edges[i + 1..] {
                if ps.segments_cross(s, t) {
                    return Err(MatchingError::NotPlane(s, t));
                }
            }
        }
        Ok(())
    }

    pub fn is_plane(&self, ps: &PointSet) -> bool {
        self.check_plane(ps).is_ok()
    }

    /// First matching edge crossed by the segment `pq`.
    fn blocker(&self, ps: &PointSet, added: Segment) -> Option<Segment> {
        self.edges().into_iter().find(|&s| ps.segments_cross(added, s))
    }

    /// All flips allowed by `rule`, ordered by pivot index.
    pub fn legal_flips(&self, ps: &PointSet, rule: FlipRule) -> Vec<Flip> {
        let p = self.unmatched;
        let edges = self.edges();
        (0..self.mate.len())
            .filter(|&q| q != p)
            .filter_map(|q| {
                let r = self.mate[q];
                let added = Segment::new(p, q);
                if edges.iter().any(|&s| ps.segments_cross(added, s)) {
                    return None;
                }
                if rule == FlipRule::EmptyTriangleRotation && !ps.triangle_is_empty(p, q, r) {
                    return None;
                }
                Some(Flip { p, q, r })
            })
            .collect()
    }

    /// Validates `f` under `rule` and returns the flipped matching.
    pub fn apply_flip(&self, ps: &PointSet, f: Flip, rule: FlipRule) -> Result<Matching, FlipError> {
        if f.p != self.unmatched {
            return Err(FlipError::WrongUnmatched { expected: self.unmatched, got: f.p });
        }
        if f.q >= self.mate.len() || f.q == f.p {
            return Err(FlipError::PivotNotMatched(f.q));
        }
        let actual = self.mate[f.q];
        if actual != f.r {
            return Err(FlipError::WrongPartner { q: f.q, actual, claimed: f.r });
        }
        let added = f.added();
        if let Some(blocker) = self.blocker(ps, added) {
            return Err(FlipError::Crossing { added, blocker });
        }
        if rule == FlipRule::EmptyTriangleRotation {
            if let Some(witness) = ps.triangle_witness(f.p, f.q, f.r) {
                return Err(FlipError::NonEmptyTriangle { p: f.p, q: f.q, r: f.r, witness });
            }
        }
        Ok(self.apply_unchecked(f))
    }

    /// Applies a flip already known to be legal.
    pub fn apply_unchecked(&self, f: Flip) -> Matching {
        let mut mate = self.mate.clone();
        mate[f.p] = f.q;
        mate[f.q] = f.p;
        mate[f.r] = f.r;
        Matching { mate, unmatched: f.r }
    }

    /// Edges present in exactly one of the two matchings.
    pub fn symmetric_difference(&self, other: &Matching) -> Vec<Segment> {
        let mine = self.edges();
        let theirs = other.edges();
        let mut out: Vec<Segment> = mine.iter().filter(|s| !other.has_edge(**s)).copied().collect();
        out.extend(theirs.iter().filter(|s| !self.has_edge(**s)));
        out.sort();
        out
    }

    /// Sub-matching on `indices` (local labels are positions in `indices`).
    /// Every edge touching `indices` must stay inside it.
    pub fn restrict(&self, indices: &[usize]) -> Option<Matching> {
        let mut local = vec![usize::MAX; self.mate.len()];
        for (i, &v) in indices.iter().enumerate() {
            local[v] = i;
        }
        let mut mate = Vec::with_capacity(indices.len());
        for &v in indices {
            let w = local[self.mate[v]];
            if w == usize::MAX {
                return None;
            }
            mate.push(w);
        }
        let unmatched = local[self.unmatched];
        (unmatched != usize::MAX).then_some(Matching { mate, unmatched })
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.edges().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}} unmatched {}", self.unmatched)
    }
}

/// Pairs consecutive points in left-to-right order; the rightmost point is
/// left unmatched.
pub fn canonical_matching(ps: &PointSet) -> Result<Matching, MatchingError> {
    let order = sort_left_to_right(ps);
    if order.len().is_multiple_of(2) {
        return Err(MatchingError::EvenPointCount(order.len()));
    }
    let edges: Vec<_> = order.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Matching::new(ps, &edges, *order.last().unwrap())
}

/// Matching of hull edges only: with hull order `x = q0, q1, ..., q2m`
/// counterclockwise, pairs `(q1, q2), (q3, q4), ...` and leaves `x`
/// unmatched.
pub fn convex_hull_matching(ps: &PointSet, x: usize) -> Result<Matching, MatchingError> {
    let n = ps.len();
    if n.is_multiple_of(2) {
        return Err(MatchingError::EvenPointCount(n));
    }
    if x >= n {
        return Err(MatchingError::IndexOutOfRange(x));
    }
    let order = hull_order_from(ps, x).ok_or(MatchingError::NotConvex)?;
    let edges: Vec<_> = order[1..].chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Matching::new(ps, &edges, x)
}

/// Counterclockwise hull order rotated to start at `x`; `None` unless every
/// point is a hull vertex.
pub fn hull_order_from(ps: &PointSet, x: usize) -> Option<Vec<usize>> {
    let mut hull = convex_hull(ps);
    if hull.len() != ps.len() && ps.len() >= 3 {
        return None;
    }
    let start = hull.iter().position(|&v| v == x)?;
    hull.rotate_left(start);
    Some(hull)
}
