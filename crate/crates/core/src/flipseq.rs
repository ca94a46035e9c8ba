//! Flip sequences: routing the unmatched point along an alternating path,
//! canonicalization, reversal, and the dual-tree router for convex position.

use thiserror::Error;

use crate::altpath::{find_alternating_path, AltGraph, AltPathError, EdgeLabel};
use crate::geometry::{sort_left_to_right, PointSet, Segment};
use crate::matching::{convex_hull_matching, hull_order_from, Flip, FlipError, FlipRule, Matching, MatchingError};
use crate::visibility::{build_visibility_graph, duplicate_unmatched, plane_hamiltonian_polygon, VisibilityError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("matchings live on different point sets ({0} vs {1} points)")]
    HostMismatch(usize, usize),
    #[error("point index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error(transparent)]
    Polygon(#[from] VisibilityError),
    #[error(transparent)]
    AltPath(#[from] AltPathError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("constructed flip {index} is illegal: {reason}")]
    IllegalStep { index: usize, reason: FlipError },
    #[error("internal routing invariant violated: {0}")]
    Internal(String),
    #[error("point set is not in convex position")]
    NotConvex,
    #[error("target is not a hull-edge matching")]
    NotHullTarget,
    #[error("convex routing stalled at {0}")]
    Stall(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("start matching is invalid: {0}")]
    InvalidStart(MatchingError),
    #[error("flip {index} is illegal: {reason}")]
    IllegalFlip { index: usize, reason: FlipError },
}

impl SequenceError {
    /// Index of the first failing step (`None` if the start itself is bad).
    pub fn index(&self) -> Option<usize> {
        match self {
            SequenceError::InvalidStart(_) => None,
            SequenceError::IllegalFlip { index, .. } => Some(*index),
        }
    }
}

/// A start matching and the flips applied to it in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipSequence {
    pub start: Matching,
    pub flips: Vec<Flip>,
}

impl FlipSequence {
    pub fn empty(start: Matching) -> Self {
        FlipSequence { start, flips: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.flips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }

    /// Every matching along the sequence, start and end included. Flips are
    /// applied without legality checks; see [`validate_sequence`].
    pub fn matchings(&self) -> Vec<Matching> {
        let mut out = Vec::with_capacity(self.flips.len() + 1);
        out.push(self.start.clone());
        for &f in &self.flips {
            let next = out.last().unwrap().apply_unchecked(f);
            out.push(next);
        }
        out
    }

    pub fn end(&self) -> Matching {
        self.flips.iter().fold(self.start.clone(), |m, &f| m.apply_unchecked(f))
    }
}

/// Replays `s`, checking every flip under the edge-flip rule.
pub fn validate_sequence(ps: &PointSet, s: &FlipSequence) -> Result<(), SequenceError> {
    validate_sequence_with(ps, s, FlipRule::EdgeFlip)
}

pub fn validate_sequence_with(ps: &PointSet, s: &FlipSequence, rule: FlipRule) -> Result<(), SequenceError> {
    let pairs = s.start.edge_pairs();
    let mut cur = Matching::new(ps, &pairs, s.start.unmatched()).map_err(SequenceError::InvalidStart)?;
    for (index, &f) in s.flips.iter().enumerate() {
        cur = cur.apply_flip(ps, f, rule).map_err(|reason| SequenceError::IllegalFlip { index, reason })?;
    }
    Ok(())
}

/// The same walk backwards: starts at `s`'s end and returns to `s.start`.
pub fn reverse(s: &FlipSequence) -> FlipSequence {
    FlipSequence { start: s.end(), flips: s.flips.iter().rev().map(|f| f.reversed()).collect() }
}

/// Removes adjacent flip/undo pairs.
pub fn cancel_backtracks(s: FlipSequence) -> FlipSequence {
    let mut kept: Vec<Flip> = Vec::with_capacity(s.flips.len());
    for f in s.flips {
        if kept.last() == Some(&f.reversed()) {
            kept.pop();
        } else {
            kept.push(f);
        }
    }
    FlipSequence { start: s.start, flips: kept }
}

fn replay_checked(ps: &PointSet, start: &Matching, flips: &[Flip]) -> Result<Matching, RouteError> {
    let mut cur = start.clone();
    for (index, &f) in flips.iter().enumerate() {
        cur = cur.apply_flip(ps, f, FlipRule::EdgeFlip).map_err(|reason| RouteError::IllegalStep { index, reason })?;
    }
    Ok(cur)
}

/// Flips that make `t` the unmatched point, together with the alternating
/// path they were read from (point ids, ending at the old unmatched point).
pub fn route_unmatched_with_path(
    ps: &PointSet,
    m: &Matching,
    t: usize,
) -> Result<(FlipSequence, Vec<usize>), RouteError> {
    let n = ps.len();
    if m.point_count() != n {
        return Err(RouteError::HostMismatch(n, m.point_count()));
    }
    if t >= n {
        return Err(RouteError::IndexOutOfRange(t));
    }
    let p = m.unmatched();
    if t == p {
        return Ok((FlipSequence::empty(m.clone()), vec![t]));
    }

    let ss = duplicate_unmatched(ps, m)?;
    let companion = ss.companion().expect("duplicate was added");
    let polygon = plane_hamiltonian_polygon(&build_visibility_graph(&ss))?;
    let mut pairs = m.edge_pairs();
    pairs.push((p, companion));
    let g = AltGraph::new(n + 1, polygon.cycle.clone(), &pairs)?;
    let u = m.mate(t).expect("t is matched");
    let mut path = find_alternating_path(&g, (t, u), p)?;

    // Fold the companion back onto p: the walk can only reach p through it
    // as its final matching step.
    if let Some(i) = path.vertices.iter().position(|&v| v == companion) {
        if i + 2 != path.vertices.len() || path.labels.last() != Some(&EdgeLabel::Matching) {
            return Err(RouteError::Internal(format!("companion in unexpected position {i} of {:?}", path.vertices)));
        }
        path.vertices.remove(i);
        path.labels.pop();
    }
    if path.labels.last() != Some(&EdgeLabel::Cycle) {
        return Err(RouteError::Internal("path must enter the unmatched point by a non-matching edge".into()));
    }

    // Read the path from p: each (non-matching step into q, matching step q-r)
    // becomes one flip.
    let rev: Vec<usize> = path.vertices.iter().rev().copied().collect();
    let mut flips = Vec::with_capacity(rev.len() / 2);
    let mut free = p;
    for pair in rev[1..].chunks_exact(2) {
        let (q, r) = (pair[0], pair[1]);
        flips.push(Flip::new(free, q, r));
        free = r;
    }
    let end = replay_checked(ps, m, &flips)?;

    let mut expected: std::collections::BTreeSet<Segment> = m.edges().into_iter().collect();
    for (x, y, label) in path.edges() {
        let s = Segment::new(x, y);
        match label {
            EdgeLabel::Matching => expected.remove(&s),
            EdgeLabel::Cycle => expected.insert(s),
        };
    }
    if end.unmatched() != t || end.edges().into_iter().collect::<std::collections::BTreeSet<_>>() != expected {
        return Err(RouteError::Internal("end matching differs from start XOR path".into()));
    }
    Ok((FlipSequence { start: m.clone(), flips }, path.vertices))
}

/// At most `m` flips after which `t` is the unmatched point.
pub fn route_unmatched(ps: &PointSet, m: &Matching, t: usize) -> Result<FlipSequence, RouteError> {
    route_unmatched_with_path(ps, m, t).map(|(s, _)| s)
}

/// Flips `m` to the canonical left-to-right matching, fixing one canonical
/// edge at a time from the left.
pub fn to_canonical(ps: &PointSet, m: &Matching) -> Result<FlipSequence, RouteError> {
    if m.point_count() != ps.len() {
        return Err(RouteError::HostMismatch(ps.len(), m.point_count()));
    }
    let order = sort_left_to_right(ps);
    let mut cur = m.clone();
    let mut flips = Vec::new();
    for i in 0..m.edge_count() {
        let (a, b) = (order[2 * i], order[2 * i + 1]);
        if cur.has_edge(Segment::new(a, b)) {
            continue;
        }
        // Everything left of a is already canonical, so the suffix carries a
        // self-contained plane almost-perfect matching.
        let suffix = &order[2 * i..];
        let sub_ps = ps.restrict(suffix);
        let sub_m = cur
            .restrict(suffix)
            .ok_or_else(|| RouteError::Internal(format!("suffix from {a} is not closed under the matching")))?;
        let local = route_unmatched(&sub_ps, &sub_m, 0)?;
        for f in local.flips {
            let g = Flip::new(suffix[f.p], suffix[f.q], suffix[f.r]);
            cur = cur
                .apply_flip(ps, g, FlipRule::EdgeFlip)
                .map_err(|reason| RouteError::IllegalStep { index: flips.len(), reason })?;
            flips.push(g);
        }
        let r = cur.mate(b).ok_or_else(|| RouteError::Internal(format!("{b} unexpectedly unmatched")))?;
        let g = Flip::new(a, b, r);
        cur = cur
            .apply_flip(ps, g, FlipRule::EdgeFlip)
            .map_err(|reason| RouteError::IllegalStep { index: flips.len(), reason })?;
        flips.push(g);
    }
    Ok(FlipSequence { start: m.clone(), flips })
}

/// `m1` to `m2` through the canonical matching, with immediate undo pairs
/// removed at the junction.
pub fn route(ps: &PointSet, m1: &Matching, m2: &Matching) -> Result<FlipSequence, RouteError> {
    if m1.point_count() != m2.point_count() {
        return Err(RouteError::HostMismatch(m1.point_count(), m2.point_count()));
    }
    if m1 == m2 {
        return Ok(FlipSequence::empty(m1.clone()));
    }
    let mut there = to_canonical(ps, m1)?;
    let back = reverse(&to_canonical(ps, m2)?);
    there.flips.extend(back.flips);
    Ok(cancel_backtracks(there))
}

/// Faces of a convex polygon cut along the chords of a matching, rooted at
/// the face that holds the unmatched point. Face `0` is the root; every
/// other face hangs off its parent across one chord.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualTree {
    /// Boundary vertices of each face, counterclockwise.
    pub faces: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
    /// Chord shared with the parent face.
    pub chord: Vec<Option<Segment>>,
}

impl DualTree {
    pub fn build(ps: &PointSet, m: &Matching) -> Result<DualTree, RouteError> {
        let order = hull_order_from(ps, m.unmatched()).ok_or(RouteError::NotConvex)?;
        let mut pos = vec![0; ps.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut tree = DualTree { faces: vec![vec![order[0]]], parent: vec![None], chord: vec![None] };
        let mut stack = vec![0usize];
        for &v in &order[1..] {
            let w = m.mate(v).ok_or_else(|| RouteError::Internal(format!("{v} should be matched")))?;
            let top = *stack.last().unwrap();
            if pos[w] > pos[v] {
                tree.faces[top].push(v);
                tree.faces.push(vec![v]);
                tree.parent.push(Some(top));
                tree.chord.push(Some(Segment::new(v, w)));
                stack.push(tree.faces.len() - 1);
            } else {
                if tree.chord[top] != Some(Segment::new(v, w)) {
                    return Err(RouteError::Internal(format!("chords cross at {v}")));
                }
                tree.faces[top].push(v);
                stack.pop();
                let parent = *stack.last().unwrap();
                tree.faces[parent].push(v);
            }
        }
        Ok(tree)
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn children(&self, f: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(move |&g| self.parent[g] == Some(f))
    }

    pub fn is_leaf(&self, f: usize) -> bool {
        self.children(f).next().is_none()
    }

    /// Connected and acyclic: `faces - 1` tree edges and every parent chain
    /// reaches the root.
    pub fn is_tree(&self) -> bool {
        let edges = self.parent.iter().filter(|p| p.is_some()).count();
        if edges + 1 != self.faces.len() || self.parent[0].is_some() {
            return false;
        }
        (0..self.faces.len()).all(|mut f| {
            for _ in 0..self.faces.len() {
                match self.parent[f] {
                    None => return f == 0,
                    Some(g) => f = g,
                }
            }
            false
        })
    }
}

/// Label of a vertex relative to the hull-edge target with unmatched `x`:
/// hull position `k` counted counterclockwise from `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullLabel {
    X,
    /// First endpoint (counterclockwise) of target edge `e_i`.
    V(usize),
    /// Second endpoint of target edge `e_i`.
    W(usize),
}

impl HullLabel {
    pub fn from_position(k: usize) -> HullLabel {
        match k {
            0 => HullLabel::X,
            k if k % 2 == 1 => HullLabel::V(k.div_ceil(2)),
            k => HullLabel::W(k / 2),
        }
    }
}

/// Linear-length route to a hull-edge matching for points in convex
/// position, driven by the dual tree of the current matching.
pub fn convex_route_to_hull(ps: &PointSet, m: &Matching, target: &Matching) -> Result<FlipSequence, RouteError> {
    if m.point_count() != ps.len() || target.point_count() != ps.len() {
        return Err(RouteError::HostMismatch(ps.len(), m.point_count()));
    }
    if !ps.is_convex_position() {
        return Err(RouteError::NotConvex);
    }
    let x = target.unmatched();
    if convex_hull_matching(ps, x)? != *target {
        return Err(RouteError::NotHullTarget);
    }
    let order = hull_order_from(ps, x).ok_or(RouteError::NotConvex)?;
    let mut pos = vec![0; ps.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }

    let mut cur = m.clone();
    let mut flips = Vec::new();
    let budget = 2 * ps.len();
    while cur != *target {
        if flips.len() >= budget {
            return Err(RouteError::Stall(format!("{cur} after {budget} flips")));
        }
        let p = cur.unmatched();
        let flip = match HullLabel::from_position(pos[p]) {
            HullLabel::V(_) | HullLabel::W(_) => {
                // p's target edge lies on the hull and crosses nothing.
                let q = target.mate(p).expect("labelled points are matched in the target");
                Flip::new(p, q, cur.mate(q).expect("only p is unmatched"))
            }
            HullLabel::X => {
                let tree = DualTree::build(ps, &cur)?;
                let child = tree
                    .children(tree.root())
                    .find(|&f| !tree.is_leaf(f))
                    .ok_or_else(|| RouteError::Stall(format!("{cur}: every root chord is a hull edge")))?;
                let chord = tree.chord[child].expect("non-root faces have a chord");
                let (v, w) = if pos[chord.a()] < pos[chord.b()] { chord.endpoints() } else { (chord.b(), chord.a()) };
                match (HullLabel::from_position(pos[v]), HullLabel::from_position(pos[w])) {
                    (HullLabel::V(i), HullLabel::W(j)) if i < j => Flip::new(p, v, w),
                    labels => return Err(RouteError::Internal(format!("root chord {chord} has labels {labels:?}"))),
                }
            }
        };
        cur = cur
            .apply_flip(ps, flip, FlipRule::EdgeFlip)
            .map_err(|reason| RouteError::IllegalStep { index: flips.len(), reason })?;
        flips.push(flip);
    }
    Ok(FlipSequence { start: m.clone(), flips })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::matching::canonical_matching;

    fn set(coords: &[(i64, i64)]) -> PointSet {
        PointSet::new(coords.iter().map(|&c| Point::from(c)).collect()).unwrap()
    }

    fn triangle() -> PointSet {
        set(&[(0, 0), (4, 0), (1, 3)])
    }

    fn pentagon() -> PointSet {
        set(&[(0, 0), (4, 0), (5, 3), (2, 5), (-1, 3)])
    }

    #[test]
    fn triangle_route() {
        let ps = triangle();
        let m = Matching::new(&ps, &[(0, 1)], 2).unwrap();
        let s = route_unmatched(&ps, &m, 0).unwrap();
        assert_eq!(s.flips, vec![Flip::new(2, 1, 0)]);
        let end = s.end();
        assert_eq!(end.edge_pairs(), vec![(1, 2)]);
        assert_eq!(end.unmatched(), 0);
        assert!(route_unmatched(&ps, &m, 2).unwrap().is_empty());
    }

    #[test]
    fn triangle_canonical() {
        let ps = triangle();
        let target = canonical_matching(&ps).unwrap();
        for (edge, free) in [((0, 1), 2), ((0, 2), 1), ((1, 2), 0)] {
            let m = Matching::new(&ps, &[edge], free).unwrap();
            let s = to_canonical(&ps, &m).unwrap();
            assert!(s.len() <= 2);
            assert_eq!(s.end(), target);
            assert_eq!(validate_sequence(&ps, &s), Ok(()));
        }
        assert!(to_canonical(&ps, &target).unwrap().is_empty());
    }

    #[test]
    fn route_between_triangle_matchings() {
        let ps = triangle();
        let a = Matching::new(&ps, &[(0, 1)], 2).unwrap();
        let b = Matching::new(&ps, &[(1, 2)], 0).unwrap();
        let s = route(&ps, &a, &b).unwrap();
        assert_eq!(s.end(), b);
        assert_eq!(validate_sequence(&ps, &s), Ok(()));
        assert!(route(&ps, &a, &a).unwrap().is_empty());
    }

    #[test]
    fn reverse_examples() {
        let ps = triangle();
        let m = Matching::new(&ps, &[(0, 1)], 2).unwrap();
        let empty = FlipSequence::empty(m.clone());
        assert_eq!(reverse(&empty), empty);
        let one = FlipSequence { start: m.clone(), flips: vec![Flip::new(2, 0, 1)] };
        let r = reverse(&one);
        assert_eq!(r.flips, vec![Flip::new(1, 0, 2)]);
        assert_eq!(r.end(), m);
        assert_eq!(reverse(&r), one);
    }

    #[test]
    fn cancel_removes_undo_pairs() {
        let ps = triangle();
        let m = Matching::new(&ps, &[(0, 1)], 2).unwrap();
        let f = Flip::new(2, 0, 1);
        let s = FlipSequence { start: m.clone(), flips: vec![f, f.reversed(), f] };
        assert_eq!(cancel_backtracks(s).flips, vec![f]);
    }

    #[test]
    fn validate_reports_first_bad_step() {
        let ps = pentagon();
        let m = Matching::new(&ps, &[(0, 2), (3, 4)], 1).unwrap();
        // 1-3 crosses 0-2
        let bad = FlipSequence { start: m.clone(), flips: vec![Flip::new(1, 3, 4)] };
        assert_eq!(validate_sequence(&ps, &bad).unwrap_err().index(), Some(0));
        let f = Flip::new(1, 0, 2);
        let mismatched = FlipSequence { start: m, flips: vec![f, f] };
        assert_eq!(validate_sequence(&ps, &mismatched).unwrap_err().index(), Some(1));
        let crossing_start = Matching::from_edges(5, &[(0, 2), (1, 3)], 4).unwrap();
        let s = FlipSequence::empty(crossing_start);
        assert!(matches!(validate_sequence(&ps, &s), Err(SequenceError::InvalidStart(_))));
    }

    #[test]
    fn dual_tree_of_pentagon() {
        let ps = pentagon();
        // chord 1-4 splits off 2-3; unmatched 0 sits in the root face
        let m = Matching::new(&ps, &[(1, 4), (2, 3)], 0).unwrap();
        let tree = DualTree::build(&ps, &m).unwrap();
        assert!(tree.is_tree());
        assert_eq!(tree.len(), 3);
        assert_eq!(tree.faces[0], vec![0, 1, 4]);
        assert_eq!(tree.faces[1], vec![1, 2, 3, 4]);
        assert_eq!(tree.faces[2], vec![2, 3]);
        assert!(tree.is_leaf(2));
        assert!(!tree.is_leaf(1));
    }

    #[test]
    fn convex_route_examples() {
        let ps = pentagon();
        let target = convex_hull_matching(&ps, 0).unwrap();
        assert!(convex_route_to_hull(&ps, &target, &target).unwrap().is_empty());
        let m = Matching::new(&ps, &[(1, 4), (2, 3)], 0).unwrap();
        let s = convex_route_to_hull(&ps, &m, &target).unwrap();
        assert!(s.len() <= 10);
        assert_eq!(s.end(), target);
        assert_eq!(validate_sequence(&ps, &s), Ok(()));
        // x case first: 0-1 added, 4 freed, then e_2 = 3-4 flipped in
        assert_eq!(s.flips[0], Flip::new(0, 1, 4));
    }

    #[test]
    fn convex_route_rejects_bad_input() {
        let ps = pentagon();
        let m = Matching::new(&ps, &[(1, 4), (2, 3)], 0).unwrap();
        assert_eq!(convex_route_to_hull(&ps, &m, &m), Err(RouteError::NotHullTarget));
        let inner = set(&[(0, 0), (10, 0), (10, 10), (0, 10), (3, 4)]);
        let m = Matching::new(&inner, &[(0, 1), (2, 3)], 4).unwrap();
        assert_eq!(convex_route_to_hull(&inner, &m, &m), Err(RouteError::NotConvex));
    }

    #[test]
    fn hull_labels() {
        assert_eq!(HullLabel::from_position(0), HullLabel::X);
        assert_eq!(HullLabel::from_position(1), HullLabel::V(1));
        assert_eq!(HullLabel::from_position(2), HullLabel::W(1));
        assert_eq!(HullLabel::from_position(5), HullLabel::V(3));
    }
}
