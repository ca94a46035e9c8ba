//! Segment endpoint visibility graphs and plane Hamiltonian polygons.
//!
//! The unmatched point of a matching is duplicated combinatorially: the
//! companion `p'` gets the id `host.len()`, shares `p`'s coordinates and sees
//! exactly what `p` sees. Planarity tests treat `p` and `p'` as one
//! geometric point at which edges meet without crossing.

use std::fmt;

use thiserror::Error;

use crate::geometry::{open_segment_blocked, segments_conflict, Point, PointSet, Segment};
use crate::matching::Matching;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VisibilityError {
    #[error("segments {0} and {1} cross")]
    NotPlane(Segment, Segment),
    #[error("point {0} is an endpoint of more than one segment")]
    SharedEndpoint(usize),
    #[error("point index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("point {0} cannot be duplicated: it is a segment endpoint")]
    NotIsolated(usize),
    #[error("no plane Hamiltonian polygon found on {vertices} vertices (segments: {segments})")]
    SearchExhausted { vertices: usize, segments: String },
}

/// Plane set of segments on a host point set, optionally with a duplicated
/// isolated point.
#[derive(Debug, Clone)]
pub struct SegmentSet<'a> {
    host: &'a PointSet,
    segments: Vec<Segment>,
    duplicate: Option<usize>,
}

impl<'a> SegmentSet<'a> {
    pub fn new(host: &'a PointSet, segments: Vec<Segment>) -> Result<Self, VisibilityError> {
        let mut used = vec![false; host.len()];
        for s in &segments {
            for v in [s.a(), s.b()] {
                if v >= host.len() {
                    return Err(VisibilityError::IndexOutOfRange(v));
                }
                if std::mem::replace(&mut used[v], true) {
                    return Err(VisibilityError::SharedEndpoint(v));
                }
            }
        }
        for (i, &s) in segments.iter().enumerate() {
            for &t in &segments[i + 1..] {
                if host.segments_cross(s, t) {
                    return Err(VisibilityError::NotPlane(s, t));
                }
            }
        }
        Ok(SegmentSet { host, segments, duplicate: None })
    }

    /// Adds the zero-length companion segment `p p'`.
    pub fn with_duplicate(mut self, p: usize) -> Result<Self, VisibilityError> {
        if p >= self.host.len() {
            return Err(VisibilityError::IndexOutOfRange(p));
        }
        if self.segments.iter().any(|s| s.contains(p)) || self.duplicate.is_some() {
            return Err(VisibilityError::NotIsolated(p));
        }
        self.duplicate = Some(p);
        Ok(self)
    }

    pub fn host(&self) -> &PointSet {
        self.host
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn duplicate(&self) -> Option<usize> {
        self.duplicate
    }

    /// Id of the companion point, if any.
    pub fn companion(&self) -> Option<usize> {
        self.duplicate.map(|_| self.host.len())
    }

    /// Ids of all segment endpoints, including the duplicate pair.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.segments.iter().flat_map(|s| [s.a(), s.b()]).collect();
        if let Some(p) = self.duplicate {
            v.push(p);
            v.push(self.host.len());
        }
        v.sort_unstable();
        v
    }

    /// Coordinates of a vertex id; the companion maps onto its original.
    pub fn coord(&self, v: usize) -> Point {
        match self.duplicate {
            Some(p) if v == self.host.len() => self.host[p],
            _ => self.host[v],
        }
    }

    /// Geometric point behind an id.
    fn base(&self, v: usize) -> usize {
        match self.duplicate {
            Some(p) if v == self.host.len() => p,
            _ => v,
        }
    }

    /// `u v` is one of the segments, counting the companion pair.
    pub fn is_segment(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        if let (Some(p), Some(c)) = (self.duplicate, self.companion()) {
            if (u == p && v == c) || (u == c && v == p) {
                return true;
            }
        }
        u < self.host.len() && v < self.host.len() && self.segments.contains(&Segment::new(u, v))
    }

    /// Segment-connected or mutually visible.
    pub fn sees(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        if self.is_segment(u, v) {
            return true;
        }
        let (bu, bv) = (self.base(u), self.base(v));
        if bu == bv {
            return false;
        }
        let obstacles = self.segments.iter().map(|s| (self.host[s.a()], self.host[s.b()]));
        !open_segment_blocked(self.host[bu], self.host[bv], obstacles)
    }

    /// Drawn edges `ab` and `cd` cross somewhere other than a common
    /// (geometric) endpoint.
    pub fn edges_conflict(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
        if a == c || a == d || b == c || b == d {
            return false;
        }
        segments_conflict(self.coord(a), self.coord(b), self.coord(c), self.coord(d))
    }
}

/// The matching's segments plus the companion of its unmatched point.
pub fn duplicate_unmatched<'a>(ps: &'a PointSet, m: &Matching) -> Result<SegmentSet<'a>, VisibilityError> {
    SegmentSet::new(ps, m.edges())?.with_duplicate(m.unmatched())
}

/// Visibility graph over segment endpoints, with local vertex indices
/// `0..len()` mapped to point ids by [`VisibilityGraph::id`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityGraph {
    ids: Vec<usize>,
    coords: Vec<Point>,
    adj: Vec<Vec<bool>>,
    segment_mate: Vec<Option<usize>>,
    companion: Option<(usize, usize)>,
}

impl VisibilityGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, local: usize) -> usize {
        self.ids[local]
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn local(&self, id: usize) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().enumerate().filter(|(_, &e)| e).map(|(v, _)| v)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|row| row.iter().filter(|&&e| e).count()).sum::<usize>() / 2
    }

    /// Local indices of the duplicated point and its companion.
    pub fn companion(&self) -> Option<(usize, usize)> {
        self.companion
    }

    /// Local index of the segment partner.
    pub fn segment_mate(&self, u: usize) -> Option<usize> {
        self.segment_mate[u]
    }

    fn conflict(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
        if a == c || a == d || b == c || b == d {
            return false;
        }
        segments_conflict(self.coords[a], self.coords[b], self.coords[c], self.coords[d])
    }
}

pub fn build_visibility_graph(ss: &SegmentSet<'_>) -> VisibilityGraph {
    let ids = ss.vertices();
    let k = ids.len();
    let coords = ids.iter().map(|&v| ss.coord(v)).collect();
    let mut adj = vec![vec![false; k]; k];
    let mut segment_mate = vec![None; k];
    for i in 0..k {
        for j in i + 1..k {
            if ss.sees(ids[i], ids[j]) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
            if ss.is_segment(ids[i], ids[j]) {
                segment_mate[i] = Some(j);
                segment_mate[j] = Some(i);
            }
        }
    }
    let companion = ss.duplicate().map(|p| {
        let local = |id| ids.binary_search(&id).unwrap();
        (local(p), local(ss.host().len()))
    });
    VisibilityGraph { ids, coords, adj, segment_mate, companion }
}

/// Cyclic order of point ids (the companion uses id `host.len()`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonianPolygon {
    pub cycle: Vec<usize>,
}

impl HamiltonianPolygon {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.cycle.len();
        (0..k).map(move |i| (self.cycle[i], self.cycle[(i + 1) % k]))
    }
}

impl fmt::Display for HamiltonianPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cycle.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Exact backtracking search for a plane Hamiltonian cycle.
///
/// The walk starts at the lexicographically smallest vertex (a hull vertex),
/// tries the segment partner first and then the remaining neighbours by
/// distance. A branch is cut as soon as a new edge crosses a chosen one or an
/// unvisited vertex is left with fewer than two usable neighbours.
pub fn plane_hamiltonian_polygon(vg: &VisibilityGraph) -> Result<HamiltonianPolygon, VisibilityError> {
    let k = vg.len();
    if k < 2 {
        return Err(VisibilityError::SearchExhausted { vertices: k, segments: String::new() });
    }
    let start = (0..k).min_by_key(|&v| (vg.coords[v].x, vg.coords[v].y, v)).unwrap();
    if k == 2 {
        return if vg.has_edge(0, 1) {
            Ok(HamiltonianPolygon { cycle: vec![vg.id(start), vg.id(1 - start)] })
        } else {
            Err(exhausted(vg))
        };
    }
    let mut search = Search {
        vg,
        start,
        path: vec![start],
        visited: vec![false; k],
        chosen: Vec::new(),
    };
    search.visited[start] = true;
    if search.extend() {
        Ok(HamiltonianPolygon { cycle: search.path.iter().map(|&v| vg.id(v)).collect() })
    } else {
        Err(exhausted(vg))
    }
}

fn exhausted(vg: &VisibilityGraph) -> VisibilityError {
    let segments: Vec<String> = (0..vg.len())
        .filter_map(|u| vg.segment_mate(u).filter(|&v| u < v).map(|v| format!("{}-{}", vg.id(u), vg.id(v))))
        .collect();
    VisibilityError::SearchExhausted { vertices: vg.len(), segments: segments.join(",") }
}

struct Search<'g> {
    vg: &'g VisibilityGraph,
    start: usize,
    path: Vec<usize>,
    visited: Vec<bool>,
    chosen: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn usable(&self, e: (usize, usize)) -> bool {
        self.vg.has_edge(e.0, e.1) && !self.chosen.iter().any(|&c| self.vg.conflict(c, e))
    }

    fn dist2(&self, u: usize, v: usize) -> i64 {
        let (a, b) = (self.vg.coords[u], self.vg.coords[v]);
        (a.x - b.x).pow(2) + (a.y - b.y).pow(2)
    }

    /// Every unvisited vertex keeps two usable neighbours among the unvisited
    /// vertices and the two open ends.
    fn feasible(&self, tip: usize) -> bool {
        let k = self.vg.len();
        (0..k).filter(|&u| !self.visited[u]).all(|u| {
            let mut count = 0;
            for w in 0..k {
                let open_end = w == tip || w == self.start;
                if w != u && (!self.visited[w] || open_end) && self.usable((u, w)) {
                    count += 1;
                    if count >= 2 {
                        return true;
                    }
                }
            }
            false
        })
    }

    fn extend(&mut self) -> bool {
        let k = self.vg.len();
        let tip = *self.path.last().unwrap();
        if self.path.len() == k {
            return self.usable((tip, self.start));
        }
        let mut candidates: Vec<usize> = self
            .vg
            .neighbors(tip)
            .filter(|&w| !self.visited[w] && self.usable((tip, w)))
            .collect();
        let partner = self.vg.segment_mate(tip);
        candidates.sort_by_key(|&w| (Some(w) != partner, self.dist2(tip, w), w));
        for w in candidates {
            self.visited[w] = true;
            self.path.push(w);
            self.chosen.push((tip, w));
            if self.feasible(w) && self.extend() {
                return true;
            }
            self.chosen.pop();
            self.path.pop();
            self.visited[w] = false;
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonViolation {
    #[error("cycle is not Hamiltonian (missing {missing:?}, repeated {repeated:?})")]
    NotHamiltonian { missing: Option<usize>, repeated: Option<usize> },
    #[error("{0}-{1} is not a visibility edge")]
    NotAnEdge(usize, usize),
    #[error("cycle edges {0:?} and {1:?} cross")]
    CycleCrossing((usize, usize), (usize, usize)),
    #[error("cycle edge {0:?} crosses segment {1:?}")]
    SegmentCrossing((usize, usize), (usize, usize)),
}

/// Exact check of a polygon against its segment set: Hamiltonian, built from
/// visibility edges, and plane together with the segments.
pub fn validate_polygon(hp: &HamiltonianPolygon, ss: &SegmentSet<'_>) -> Result<(), PolygonViolation> {
    let vertices = ss.vertices();
    let mut sorted = hp.cycle.clone();
    sorted.sort_unstable();
    if sorted != vertices {
        let repeated = sorted.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]);
        let missing = vertices.iter().copied().find(|v| !sorted.contains(v));
        return Err(PolygonViolation::NotHamiltonian { missing, repeated });
    }
    let edges: Vec<(usize, usize)> = hp.edges().collect();
    for &(u, v) in &edges {
        if !ss.sees(u, v) {
            return Err(PolygonViolation::NotAnEdge(u, v));
        }
    }
    if edges.len() < 3 {
        return Ok(());
    }
    for (i, &e) in edges.iter().enumerate() {
        for &f in &edges[i + 1..] {
            if ss.edges_conflict(e, f) {
                return Err(PolygonViolation::CycleCrossing(e, f));
            }
        }
    }
    let mut segs: Vec<(usize, usize)> = ss.segments().iter().map(Segment::endpoints).collect();
    if let (Some(p), Some(c)) = (ss.duplicate(), ss.companion()) {
        segs.push((p, c));
    }
    for &e in &edges {
        for &s in &segs {
            if ss.edges_conflict(e, s) {
                return Err(PolygonViolation::SegmentCrossing(e, s));
            }
        }
    }
    Ok(())
}
