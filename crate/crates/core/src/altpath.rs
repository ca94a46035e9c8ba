//! Alternating paths in the union of a Hamiltonian cycle and a perfect
//! matching.
//!
//! The constructive search first contracts matching edges that lie on the
//! cycle, then grows a sequence of graphs `G_2, G_3, ...` whose unique
//! non-cyclic component is an alternating path starting with the prescribed
//! matching edge, until the target vertex is reached. The path is finally
//! expanded back through the contractions.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Matching,
    Cycle,
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeLabel::Matching => "M",
            EdgeLabel::Cycle => "C",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AltPathError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("({0}, {1}) is not a matching edge")]
    NotMatchingEdge(usize, usize),
    #[error("target {0} equals the start vertex")]
    TargetIsStart(usize),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),
    #[error("stage {stage} violates property ({property})")]
    StageInvariant { stage: usize, property: u8 },
    #[error("iteration did not reach the target within {0} stages")]
    NoTermination(usize),
    #[error("brute force is limited to {limit} vertices, got {got}")]
    TooLarge { got: usize, limit: usize },
}

/// Union of a Hamiltonian cycle `C` and a perfect matching `M` on the
/// vertices `0..vertex_count`. After contraction only a subset of the ids is
/// live; the cycle order then lists exactly the live vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltGraph {
    cycle: Vec<usize>,
    pos: Vec<Option<usize>>,
    mate: Vec<Option<usize>>,
}

impl AltGraph {
    pub fn new(
        vertex_count: usize,
        cycle_order: Vec<usize>,
        matching_pairs: &[(usize, usize)],
    ) -> Result<Self, AltPathError> {
        let invalid = |msg: String| Err(AltPathError::InvalidGraph(msg));
        if vertex_count < 2 || !vertex_count.is_multiple_of(2) {
            return invalid(format!("vertex count {vertex_count} must be even and at least 2"));
        }
        if cycle_order.len() != vertex_count {
            return invalid(format!("cycle has {} vertices, expected {vertex_count}", cycle_order.len()));
        }
        let mut pos = vec![None; vertex_count];
        for (i, &v) in cycle_order.iter().enumerate() {
            if v >= vertex_count || pos[v].is_some() {
                return invalid(format!("cycle order is not a permutation (vertex {v})"));
            }
            pos[v] = Some(i);
        }
        let mut mate = vec![None; vertex_count];
        for &(u, v) in matching_pairs {
            if u >= vertex_count || v >= vertex_count || u == v {
                return invalid(format!("bad matching pair ({u}, {v})"));
            }
            if mate[u].is_some() || mate[v].is_some() {
                return invalid(format!("matching pair ({u}, {v}) reuses a vertex"));
            }
            mate[u] = Some(v);
            mate[v] = Some(u);
        }
        if let Some(v) = mate.iter().position(Option::is_none) {
            return invalid(format!("vertex {v} is unmatched"));
        }
        Ok(AltGraph { cycle: cycle_order, pos, mate })
    }

    pub fn vertex_count(&self) -> usize {
        self.cycle.len()
    }

    pub fn cycle_order(&self) -> &[usize] {
        &self.cycle
    }

    pub fn contains(&self, v: usize) -> bool {
        self.pos.get(v).is_some_and(Option::is_some)
    }

    pub fn mate(&self, v: usize) -> Option<usize> {
        self.mate.get(v).copied().flatten()
    }

    /// Matching pairs `(u, v)` with `u < v`, ordered by `u`.
    pub fn matching_pairs(&self) -> Vec<(usize, usize)> {
        self.cycle
            .iter()
            .filter_map(|&u| self.mate(u).filter(|&v| u < v).map(|v| (u, v)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// The two cycle neighbours of `v` (successor first).
    pub fn cycle_neighbors(&self, v: usize) -> Option<(usize, usize)> {
        let i = self.pos.get(v).copied().flatten()?;
        let len = self.cycle.len();
        Some((self.cycle[(i + 1) % len], self.cycle[(i + len - 1) % len]))
    }

    pub fn is_cycle_edge(&self, u: usize, v: usize) -> bool {
        self.cycle_neighbors(u).is_some_and(|(s, p)| s == v || p == v)
    }

    pub fn is_matching_edge(&self, u: usize, v: usize) -> bool {
        self.mate(u) == Some(v)
    }

    /// Matching edges that also lie on the cycle, as `(u, v)` with `u` first
    /// in cycle order.
    pub fn matching_edges_on_cycle(&self) -> Vec<(usize, usize)> {
        let len = self.cycle.len();
        (0..len)
            .filter_map(|i| {
                let (u, v) = (self.cycle[i], self.cycle[(i + 1) % len]);
                self.is_matching_edge(u, v).then_some((u, v))
            })
            .collect()
    }

    fn edge_position(&self, i: usize) -> (usize, usize) {
        (self.cycle[i], self.cycle[(i + 1) % self.cycle.len()])
    }

    fn check_edge(&self, (a, b): (usize, usize)) -> Result<(), AltPathError> {
        for v in [a, b] {
            if !self.contains(v) {
                return Err(AltPathError::UnknownVertex(v));
            }
        }
        if !self.is_matching_edge(a, b) {
            return Err(AltPathError::NotMatchingEdge(a, b));
        }
        Ok(())
    }

    /// Removes the matching edge `u1u2` sitting at cycle positions `i, i+1`
    /// and joins its cycle neighbours directly.
    fn contract_at(&mut self, i: usize) -> Contraction {
        let len = self.cycle.len();
        let u0 = self.cycle[(i + len - 1) % len];
        let u1 = self.cycle[i];
        let u2 = self.cycle[(i + 1) % len];
        let u3 = self.cycle[(i + 2) % len];
        self.cycle.retain(|&v| v != u1 && v != u2);
        for v in [u1, u2] {
            self.pos[v] = None;
            self.mate[v] = None;
        }
        for (j, &v) in self.cycle.iter().enumerate() {
            self.pos[v] = Some(j);
        }
        Contraction { u0, u1, u2, u3 }
    }
}

/// One contraction: matching edge `u1u2` on the cycle path `u0 u1 u2 u3`
/// replaced by the cycle edge `u0u3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contraction {
    pub u0: usize,
    pub u1: usize,
    pub u2: usize,
    pub u3: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractionRecord {
    pub steps: Vec<Contraction>,
}

impl ContractionRecord {
    /// Re-applies the history to `g`.
    pub fn replay(&self, g: &AltGraph) -> Result<AltGraph, AltPathError> {
        let mut g = g.clone();
        for step in &self.steps {
            let i = g.pos.get(step.u1).copied().flatten().ok_or(AltPathError::UnknownVertex(step.u1))?;
            let len = g.cycle.len();
            let ok = g.cycle[(i + 1) % len] == step.u2 && g.is_matching_edge(step.u1, step.u2);
            if !ok {
                return Err(AltPathError::InvalidGraph(format!("cannot replay contraction {step:?}")));
            }
            let done = g.contract_at(i);
            if done != *step {
                return Err(AltPathError::InvalidGraph(format!("replay diverged at {step:?}")));
            }
        }
        Ok(g)
    }
}

/// Contracts every matching edge on the cycle except `e` and the matching
/// edge at the target `c`, so that afterwards `C ∩ M ⊆ {e, f_c}`.
///
/// Keeping `f_c` alive guarantees that `c` survives; the growth loop never
/// toggles the cycle copy of `f_c` because `c` is absent from every `G_k`
/// until the final stage.
pub fn contract_reduce(
    g: &AltGraph,
    e: (usize, usize),
    c: usize,
) -> Result<(AltGraph, ContractionRecord), AltPathError> {
    g.check_edge(e)?;
    if !g.contains(c) {
        return Err(AltPathError::UnknownVertex(c));
    }
    if c == e.0 {
        return Err(AltPathError::TargetIsStart(c));
    }
    let mut reduced = g.clone();
    let mut record = ContractionRecord::default();
    loop {
        let len = reduced.cycle.len();
        let target = (0..len).find(|&i| {
            let (u, v) = reduced.edge_position(i);
            reduced.is_matching_edge(u, v) && !(u == e.0 || u == e.1) && u != c && v != c
        });
        match target {
            Some(i) => record.steps.push(reduced.contract_at(i)),
            None => return Ok((reduced, record)),
        }
    }
}

/// Ordered vertex list with alternating labels, starting with a matching edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltPath {
    pub vertices: Vec<usize>,
    pub labels: Vec<EdgeLabel>,
}

impl AltPath {
    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("paths are non-empty")
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, EdgeLabel)> + '_ {
        self.vertices.windows(2).zip(&self.labels).map(|(w, &l)| (w[0], w[1], l))
    }

    pub fn matching_edge_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == EdgeLabel::Matching).count()
    }

    /// Checks the path against the simple graph `C ∪ M`: matching steps use
    /// `M`, cycle steps use `C \ M`, labels alternate starting with `M`, and
    /// no vertex repeats.
    pub fn validate(&self, g: &AltGraph) -> Result<(), String> {
        if self.vertices.len() != self.labels.len() + 1 || self.labels.is_empty() {
            return Err("label count must be one less than the vertex count".into());
        }
        let mut seen = std::collections::HashSet::new();
        for &v in &self.vertices {
            if !g.contains(v) {
                return Err(format!("vertex {v} is not in the graph"));
            }
            if !seen.insert(v) {
                return Err(format!("vertex {v} repeats"));
            }
        }
        for (i, (u, v, label)) in self.edges().enumerate() {
            let expected = if i % 2 == 0 { EdgeLabel::Matching } else { EdgeLabel::Cycle };
            if label != expected {
                return Err(format!("edge {i} is labelled {label}, expected {expected}"));
            }
            let ok = match label {
                EdgeLabel::Matching => g.is_matching_edge(u, v),
                EdgeLabel::Cycle => g.is_cycle_edge(u, v) && !g.is_matching_edge(u, v),
            };
            if !ok {
                return Err(format!("edge {u}-{v} is not a {label} edge"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageEdge {
    pub u: usize,
    pub v: usize,
    pub label: EdgeLabel,
}

/// Snapshot of an intermediate graph `G_k`: vertices in insertion order
/// `v_1..v_k` and its labelled edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub vertices: Vec<usize>,
    pub edges: Vec<StageEdge>,
}

/// Verifies properties (1)-(4) of a stage and returns the index of the first
/// one that fails.
pub fn check_stage_invariants(stage: &Stage, k: usize, a: usize, b: usize) -> Result<(), u8> {
    use std::collections::HashMap;

    let mut distinct = stage.vertices.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if stage.vertices.len() != k || distinct.len() != k {
        return Err(1);
    }
    let mut incident: HashMap<usize, Vec<EdgeLabel>> = stage.vertices.iter().map(|&v| (v, Vec::new())).collect();
    for e in &stage.edges {
        for v in [e.u, e.v] {
            match incident.get_mut(&v) {
                Some(list) => list.push(e.label),
                None => return Err(1),
            }
        }
    }
    let last = *stage.vertices.last().ok_or(1u8)?;
    let leaves: Vec<usize> = stage.vertices.iter().copied().filter(|v| incident[v].len() == 1).collect();
    if leaves.len() != 2 || !leaves.contains(&a) || !leaves.contains(&last) {
        return Err(2);
    }
    for v in &stage.vertices {
        if *v == a || *v == last {
            continue;
        }
        let labels = &incident[v];
        let m = labels.iter().filter(|&&l| l == EdgeLabel::Matching).count();
        if labels.len() != 2 || m != 1 {
            return Err(3);
        }
    }
    if stage.vertices[0] != a || stage.vertices.get(1) != Some(&b) {
        return Err(4);
    }
    Ok(())
}

/// Mutable state of the growth loop on a reduced graph.
struct Growth<'g> {
    g: &'g AltGraph,
    order: Vec<usize>,
    in_stage: Vec<bool>,
    matched_in: Vec<bool>,
    cycle_in: Vec<bool>,
    last_is_matching: bool,
}

impl<'g> Growth<'g> {
    fn new(g: &'g AltGraph, (a, b): (usize, usize)) -> Self {
        let ids = g.pos.len();
        let mut growth = Growth {
            g,
            order: vec![a, b],
            in_stage: vec![false; ids],
            matched_in: vec![false; ids],
            cycle_in: vec![false; g.cycle.len()],
            last_is_matching: true,
        };
        for v in [a, b] {
            growth.in_stage[v] = true;
            growth.matched_in[v] = true;
        }
        growth
    }

    fn tip(&self) -> usize {
        *self.order.last().unwrap()
    }

    fn push(&mut self, w: usize) {
        self.order.push(w);
        self.in_stage[w] = true;
    }

    /// Tip's last edge is a cycle edge: add its matching edge.
    fn extend_by_matching(&mut self) {
        let v = self.tip();
        let w = self.g.mate(v).expect("live vertices are matched");
        self.matched_in[v] = true;
        self.matched_in[w] = true;
        self.push(w);
        self.last_is_matching = true;
    }

    /// Tip's last edge is a matching edge: walk the cycle towards `c` on the
    /// side that avoids `a`, toggling edges until the first new vertex.
    fn extend_along_cycle(&mut self, a: usize, c: usize) {
        let g = self.g;
        let len = g.cycle.len();
        let start = g.pos[self.tip()].unwrap();
        let (pa, pc) = (g.pos[a].unwrap(), g.pos[c].unwrap());
        let forward_dist = |p: usize| (p + len - start) % len;
        // Forward direction reaches c before a, otherwise walk backwards.
        let forward = forward_dist(pc) < forward_dist(pa);
        let mut i = start;
        loop {
            let (edge, next) = if forward { (i, (i + 1) % len) } else { ((i + len - 1) % len, (i + len - 1) % len) };
            self.cycle_in[edge] = !self.cycle_in[edge];
            i = next;
            let w = g.cycle[i];
            if !self.in_stage[w] {
                self.push(w);
                break;
            }
        }
        self.last_is_matching = false;
    }

    fn snapshot(&self) -> Stage {
        let mut edges = Vec::new();
        for &v in &self.order {
            if self.matched_in[v] {
                let w = self.g.mate(v).unwrap();
                if v < w {
                    edges.push(StageEdge { u: v, v: w, label: EdgeLabel::Matching });
                }
            }
        }
        for (i, &on) in self.cycle_in.iter().enumerate() {
            if on {
                let (u, v) = self.g.edge_position(i);
                edges.push(StageEdge { u, v, label: EdgeLabel::Cycle });
            }
        }
        Stage { vertices: self.order.clone(), edges }
    }

    /// Follows the component of `a` in the final stage.
    fn extract_path(&self, a: usize, c: usize) -> AltPath {
        let g = self.g;
        let len = g.cycle.len();
        let mut vertices = vec![a];
        let mut labels = Vec::new();
        let mut cur = a;
        let mut take_matching = true;
        while cur != c {
            let next = if take_matching {
                g.mate(cur).unwrap()
            } else {
                let i = g.pos[cur].unwrap();
                let prev = (i + len - 1) % len;
                if self.cycle_in[i] { g.cycle[(i + 1) % len] } else { debug_assert!(self.cycle_in[prev]); g.cycle[prev] }
            };
            labels.push(if take_matching { EdgeLabel::Matching } else { EdgeLabel::Cycle });
            vertices.push(next);
            cur = next;
            take_matching = !take_matching;
        }
        AltPath { vertices, labels }
    }
}

/// Alternating path from `a` through the matching edge `e = (a, b)` to `c`.
pub fn find_alternating_path(g: &AltGraph, e: (usize, usize), c: usize) -> Result<AltPath, AltPathError> {
    find_alternating_path_traced(g, e, c).map(|(path, _)| path)
}

/// Same as [`find_alternating_path`], also returning every intermediate
/// stage `G_2..G_K` of the reduced graph.
pub fn find_alternating_path_traced(
    g: &AltGraph,
    e: (usize, usize),
    c: usize,
) -> Result<(AltPath, Vec<Stage>), AltPathError> {
    let (a, b) = e;
    g.check_edge(e)?;
    if !g.contains(c) {
        return Err(AltPathError::UnknownVertex(c));
    }
    if c == a {
        return Err(AltPathError::TargetIsStart(c));
    }
    if c == b {
        let path = AltPath { vertices: vec![a, b], labels: vec![EdgeLabel::Matching] };
        let stage = Stage { vertices: vec![a, b], edges: vec![StageEdge { u: a, v: b, label: EdgeLabel::Matching }] };
        return Ok((path, vec![stage]));
    }

    let (reduced, record) = contract_reduce(g, e, c)?;
    let mut growth = Growth::new(&reduced, e);
    let mut stages = Vec::new();
    let limit = reduced.vertex_count();
    loop {
        let k = growth.order.len();
        let stage = growth.snapshot();
        check_stage_invariants(&stage, k, a, b).map_err(|property| AltPathError::StageInvariant { stage: k, property })?;
        stages.push(stage);
        if growth.tip() == c {
            break;
        }
        if k >= limit {
            return Err(AltPathError::NoTermination(limit));
        }
        if growth.last_is_matching {
            growth.extend_along_cycle(a, c);
        } else {
            growth.extend_by_matching();
        }
    }

    let mut path = growth.extract_path(a, c);
    for step in record.steps.iter().rev() {
        expand(&mut path, step);
    }
    path.validate(g).map_err(AltPathError::InvalidGraph)?;
    Ok((path, stages))
}

/// Replaces a cycle step `u0-u3` by `u0-u1-u2-u3` (or its reverse).
fn expand(path: &mut AltPath, step: &Contraction) {
    let hit = path.edges().position(|(x, y, l)| {
        l == EdgeLabel::Cycle && ((x == step.u0 && y == step.u3) || (x == step.u3 && y == step.u0))
    });
    if let Some(i) = hit {
        let inner = if path.vertices[i] == step.u0 { [step.u1, step.u2] } else { [step.u2, step.u1] };
        path.vertices.splice(i + 1..i + 1, inner);
        path.labels.splice(i..i + 1, [EdgeLabel::Cycle, EdgeLabel::Matching, EdgeLabel::Cycle]);
    }
}

/// Largest graph accepted by [`brute_force_alt_path`].
pub const BRUTE_FORCE_LIMIT: usize = 16;

/// Exhaustive depth-first search over alternating paths from `a` starting
/// with `e`. Returns the first path that reaches `c`.
pub fn brute_force_alt_path(g: &AltGraph, e: (usize, usize), c: usize) -> Result<Option<AltPath>, AltPathError> {
    if g.vertex_count() > BRUTE_FORCE_LIMIT {
        return Err(AltPathError::TooLarge { got: g.vertex_count(), limit: BRUTE_FORCE_LIMIT });
    }
    g.check_edge(e)?;
    if c == e.0 {
        return Err(AltPathError::TargetIsStart(c));
    }
    let mut path = AltPath { vertices: vec![e.0, e.1], labels: vec![EdgeLabel::Matching] };
    Ok(dfs(g, c, &mut path).then_some(path))
}

fn dfs(g: &AltGraph, c: usize, path: &mut AltPath) -> bool {
    let tip = path.end();
    if tip == c {
        return true;
    }
    let next_matching = *path.labels.last().unwrap() == EdgeLabel::Cycle;
    let candidates: Vec<usize> = if next_matching {
        g.mate(tip).into_iter().collect()
    } else {
        let (s, p) = g.cycle_neighbors(tip).unwrap();
        [s, p].into_iter().filter(|&w| !g.is_matching_edge(tip, w)).collect()
    };
    let label = if next_matching { EdgeLabel::Matching } else { EdgeLabel::Cycle };
    for w in candidates {
        if path.vertices.contains(&w) {
            continue;
        }
        path.vertices.push(w);
        path.labels.push(label);
        if dfs(g, c, path) {
            return true;
        }
        path.vertices.pop();
        path.labels.pop();
    }
    false
}
