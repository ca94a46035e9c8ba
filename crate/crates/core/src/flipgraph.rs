//! Exhaustive enumeration of plane almost-perfect matchings and analysis of
//! the resulting flip graph.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flipseq::FlipSequence;
use crate::geometry::{PointSet, Segment};
use crate::matching::{Flip, FlipRule, Matching};

pub const DEFAULT_CAP_N: usize = 11;
pub const VERTEX_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{n} points exceed the enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("point count must be odd, got {0}")]
    EvenPointCount(usize),
    #[error("flip graph is disconnected: component sizes {0:?}")]
    Disconnected(Vec<usize>),
    #[error("search visited more than {0} matchings")]
    VertexCapExceeded(usize),
    #[error("matching has {got} points, expected {expected}")]
    HostMismatch { expected: usize, got: usize },
}

/// Every plane almost-perfect matching on `ps`, each once, sorted by
/// (edge list, unmatched point).
pub fn enumerate_matchings(ps: &PointSet, cap: usize) -> Result<Vec<Matching>, GraphError> {
    let n = ps.len();
    if n > cap {
        return Err(GraphError::CapExceeded { n, cap });
    }
    if n.is_multiple_of(2) {
        return Err(GraphError::EvenPointCount(n));
    }
    let mut out = Vec::new();
    let mut state = Enumeration { ps, covered: vec![false; n], edges: Vec::new(), unmatched: None };
    state.run(&mut out);
    out.sort_by_cached_key(|m| (m.edge_pairs(), m.unmatched()));
    Ok(out)
}

struct Enumeration<'a> {
    ps: &'a PointSet,
    covered: Vec<bool>,
    edges: Vec<Segment>,
    unmatched: Option<usize>,
}

impl Enumeration<'_> {
    fn run(&mut self, out: &mut Vec<Matching>) {
        let Some(v) = self.covered.iter().position(|&c| !c) else {
            let pairs: Vec<(usize, usize)> = self.edges.iter().map(|s| s.endpoints()).collect();
            let m = Matching::from_edges(self.ps.len(), &pairs, self.unmatched.expect("odd count"))
                .expect("enumeration builds valid matchings");
            out.push(m);
            return;
        };
        self.covered[v] = true;
        if self.unmatched.is_none() {
            self.unmatched = Some(v);
            self.run(out);
            self.unmatched = None;
        }
        for w in v + 1..self.ps.len() {
            if self.covered[w] {
                continue;
            }
            let s = Segment::new(v, w);
            if self.edges.iter().any(|&t| self.ps.segments_cross(s, t)) {
                continue;
            }
            self.covered[w] = true;
            self.edges.push(s);
            self.run(out);
            self.edges.pop();
            self.covered[w] = false;
        }
        self.covered[v] = false;
    }
}

/// Flip graph over all plane almost-perfect matchings of a point set.
#[derive(Debug, Clone)]
pub struct FlipGraph {
    pub host: PointSet,
    pub rule: FlipRule,
    pub vertices: Vec<Matching>,
    /// Sorted, deduplicated neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
    index: HashMap<Matching, usize>,
}

impl FlipGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn index_of(&self, m: &Matching) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn is_symmetric(&self) -> bool {
        self.adjacency
            .iter()
            .enumerate()
            .all(|(u, adj)| adj.iter().all(|&v| self.adjacency[v].binary_search(&u).is_ok()))
    }

    /// Single-source distances; `None` for unreachable vertices.
    pub fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap() + 1;
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

pub fn build_flip_graph(ps: &PointSet, rule: FlipRule, cap: usize) -> Result<FlipGraph, GraphError> {
    let vertices = enumerate_matchings(ps, cap)?;
    if vertices.len() > VERTEX_CAP {
        return Err(GraphError::VertexCapExceeded(VERTEX_CAP));
    }
    let index: HashMap<Matching, usize> = vertices.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let adjacency = vertices
        .iter()
        .map(|m| {
            let mut adj: Vec<usize> = m
                .legal_flips(ps, rule)
                .into_iter()
                .map(|f| index[&m.apply_unchecked(f)])
                .collect();
            adj.sort_unstable();
            adj.dedup();
            adj
        })
        .collect();
    Ok(FlipGraph { host: ps.clone(), rule, vertices, adjacency, index })
}

/// Component id per vertex, numbered in order of first appearance.
pub fn component_labels(g: &FlipGraph) -> Vec<usize> {
    let mut label = vec![usize::MAX; g.len()];
    let mut next = 0;
    for s in 0..g.len() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &g.adjacency[u] {
                if label[v] == usize::MAX {
                    label[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Component sizes, largest first.
pub fn connected_components(g: &FlipGraph) -> Vec<usize> {
    let labels = component_labels(g);
    let mut sizes = vec![0; labels.iter().max().map_or(0, |&l| l + 1)];
    for l in labels {
        sizes[l] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Diameter {
    pub value: usize,
    /// Vertex indices at distance `value`; lexicographically smallest such pair.
    pub witness: (usize, usize),
}

/// All-pairs BFS. Sources are split across `threads` scoped workers; the
/// result does not depend on the thread count.
pub fn diameter(g: &FlipGraph, threads: usize) -> Result<Diameter, GraphError> {
    let sizes = connected_components(g);
    if sizes.len() > 1 {
        return Err(GraphError::Disconnected(sizes));
    }
    if g.is_empty() {
        return Ok(Diameter { value: 0, witness: (0, 0) });
    }
    let sweep = |sources: std::ops::Range<usize>| -> Diameter {
        let mut best = Diameter { value: 0, witness: (sources.start, sources.start) };
        for s in sources {
            for (t, d) in g.bfs(s).into_iter().enumerate() {
                let d = d.expect("connected");
                if d > best.value {
                    best = Diameter { value: d, witness: (s, t) };
                }
            }
        }
        best
    };
    let threads = threads.clamp(1, g.len());
    if threads == 1 {
        return Ok(sweep(0..g.len()));
    }
    let chunk = g.len().div_ceil(threads);
    let partial: Vec<Diameter> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..g.len())
            .step_by(chunk)
            .map(|lo| {
                let sweep = &sweep;
                scope.spawn(move || sweep(lo..(lo + chunk).min(g.len())))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    // Chunks are in source order, so keeping the first strict maximum
    // reproduces the sequential tie-break.
    let mut best = partial[0];
    for d in &partial[1..] {
        if d.value > best.value {
            best = *d;
        }
    }
    Ok(best)
}

/// Breadth-first search from `start` over matchings reachable by legal
/// flips, without enumerating the whole graph. Returns a shortest sequence to
/// the first matching satisfying `goal`, or `None` if none is reachable.
pub fn bfs_until<F>(
    ps: &PointSet,
    start: &Matching,
    rule: FlipRule,
    max_states: usize,
    goal: F,
) -> Result<Option<FlipSequence>, GraphError>
where
    F: Fn(&Matching) -> bool,
{
    if start.point_count() != ps.len() {
        return Err(GraphError::HostMismatch { expected: ps.len(), got: start.point_count() });
    }
    let mut parent: HashMap<Matching, Option<(Matching, Flip)>> = HashMap::from([(start.clone(), None)]);
    let mut queue = VecDeque::from([start.clone()]);
    let mut found = None;
    while let Some(m) = queue.pop_front() {
        if goal(&m) {
            found = Some(m);
            break;
        }
        for f in m.legal_flips(ps, rule) {
            let next = m.apply_unchecked(f);
            if parent.contains_key(&next) {
                continue;
            }
            if parent.len() >= max_states {
                return Err(GraphError::VertexCapExceeded(max_states));
            }
            parent.insert(next.clone(), Some((m.clone(), f)));
            queue.push_back(next);
        }
    }
    let Some(mut cur) = found else { return Ok(None) };
    let mut flips = Vec::new();
    while let Some(Some((prev, f))) = parent.get(&cur) {
        flips.push(*f);
        cur = prev.clone();
    }
    flips.reverse();
    Ok(Some(FlipSequence { start: start.clone(), flips }))
}

/// A point set whose flip graph is disconnected.
#[derive(Debug, Clone)]
pub struct DisconnectedWitness {
    /// Position of the instance in the scanned stream.
    pub position: usize,
    pub points: PointSet,
    pub components: Vec<usize>,
    /// A matching without any legal flip, when one exists.
    pub isolated: Option<Matching>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub examined: usize,
    pub found: Option<DisconnectedWitness>,
}

/// Scans `instances` and stops at the first one with a disconnected flip
/// graph under `rule`.
pub fn search_disconnected<I>(instances: I, rule: FlipRule, cap: usize) -> Result<SearchOutcome, GraphError>
where
    I: IntoIterator<Item = PointSet>,
{
    let mut examined = 0;
    for (position, ps) in instances.into_iter().enumerate() {
        examined += 1;
        let g = build_flip_graph(&ps, rule, cap)?;
        let components = connected_components(&g);
        if components.len() > 1 {
            let isolated = (0..g.len()).find(|&v| g.adjacency[v].is_empty()).map(|v| g.vertices[v].clone());
            return Ok(SearchOutcome {
                examined,
                found: Some(DisconnectedWitness { position, points: ps, components, isolated }),
            });
        }
    }
    Ok(SearchOutcome { examined, found: None })
}

/// Matching in report form: sorted edges plus the unmatched point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingRecord {
    pub unmatched: usize,
    pub edges: Vec<(usize, usize)>,
}

impl From<&Matching> for MatchingRecord {
    fn from(m: &Matching) -> Self {
        MatchingRecord { unmatched: m.unmatched(), edges: m.edge_pairs() }
    }
}

/// Summary of one flip-graph analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub rule: FlipRule,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub components: usize,
    pub diameter: Option<usize>,
    pub witness_pair: Option<(MatchingRecord, MatchingRecord)>,
    pub runtime_ms: Option<u64>,
}

/// Enumerates, builds the graph, and measures components and (when
/// connected) the diameter. `runtime_ms` is left unset.
pub fn analyze(ps: &PointSet, rule: FlipRule, cap: usize, threads: usize) -> Result<AnalysisReport, GraphError> {
    let g = build_flip_graph(ps, rule, cap)?;
    let components = connected_components(&g).len();
    let (diameter, witness_pair) = if components == 1 {
        let d = diameter(&g, threads)?;
        let (s, t) = d.witness;
        (Some(d.value), Some(((&g.vertices[s]).into(), (&g.vertices[t]).into())))
    } else {
        (None, None)
    };
    Ok(AnalysisReport {
        n: ps.len(),
        rule,
        vertex_count: g.len(),
        edge_count: g.edge_count(),
        components,
        diameter,
        witness_pair,
        runtime_ms: None,
    })
}
