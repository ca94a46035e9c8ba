//! Plain-text formats for point sets, matchings and flip sequences.
//!
//! Blank lines and lines starting with `#` are ignored everywhere. Error
//! messages carry 1-based physical line numbers.

use std::fmt::Write as _;

use thiserror::Error;

use crate::flipseq::FlipSequence;
use crate::geometry::{GeometryError, Point, PointSet};
use crate::matching::{Flip, Matching, MatchingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Missing(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Non-comment lines with their 1-based line numbers, split into tokens.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn parse_num<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T, ParseError> {
    token.parse().map_err(|_| syntax(line, format!("expected {what}, found `{token}`")))
}

fn parse_indices<const K: usize>(line: usize, tokens: &[&str], n: usize) -> Result<[usize; K], ParseError> {
    if tokens.len() != K {
        return Err(syntax(line, format!("expected {K} indices, found {} tokens", tokens.len())));
    }
    let mut out = [0; K];
    for (slot, tok) in out.iter_mut().zip(tokens) {
        *slot = parse_num(line, tok, "a point index")?;
        if *slot >= n {
            return Err(syntax(line, format!("index {slot} out of range for {n} points")));
        }
    }
    Ok(out)
}

/// One point per line as two integers; index is the order of appearance.
pub fn parse_points(text: &str) -> Result<PointSet, ParseError> {
    let mut pts = Vec::new();
    for (line, tokens) in content_lines(text) {
        if tokens.len() != 2 {
            return Err(syntax(line, format!("expected two integers, found {} tokens", tokens.len())));
        }
        pts.push(Point::new(parse_num(line, tokens[0], "an integer")?, parse_num(line, tokens[1], "an integer")?));
    }
    Ok(PointSet::new(pts)?)
}

pub fn write_points(ps: &PointSet) -> String {
    let mut out = String::new();
    for p in ps.points() {
        writeln!(out, "{} {}", p.x, p.y).unwrap();
    }
    out
}

fn parse_matching_lines<'a, I>(mut lines: I, n: usize) -> Result<Matching, ParseError>
where
    I: Iterator<Item = (usize, Vec<&'a str>)>,
{
    let (line, head) = lines.next().ok_or_else(|| ParseError::Missing("missing `unmatched <i>` line".into()))?;
    if head.len() != 2 || head[0] != "unmatched" {
        return Err(syntax(line, "expected `unmatched <i>`"));
    }
    let [unmatched] = parse_indices::<1>(line, &head[1..], n)?;
    let mut edges = Vec::new();
    for (line, tokens) in lines {
        let [u, v] = parse_indices::<2>(line, &tokens, n)?;
        edges.push((u, v));
    }
    Ok(Matching::from_edges(n, &edges, unmatched)?)
}

/// `unmatched <i>` followed by one `<i> <j>` line per edge. Only structure is
/// checked here; planarity needs the point set (see [`Matching::new`]).
pub fn parse_matching(text: &str, n: usize) -> Result<Matching, ParseError> {
    parse_matching_lines(content_lines(text), n)
}

pub fn write_matching(m: &Matching) -> String {
    let mut out = format!("unmatched {}\n", m.unmatched());
    for (u, v) in m.edge_pairs() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// `start`, a matching block, then one `flip <p> <q> <r>` line per step.
pub fn parse_sequence(text: &str, n: usize) -> Result<FlipSequence, ParseError> {
    let lines: Vec<(usize, Vec<&str>)> = content_lines(text).collect();
    let (line, head) = lines.first().ok_or_else(|| ParseError::Missing("missing `start` line".into()))?;
    if head.as_slice() != ["start"] {
        return Err(syntax(*line, "expected `start`"));
    }
    let split = lines.iter().position(|(_, t)| t[0] == "flip").unwrap_or(lines.len());
    let start = parse_matching_lines(lines[1..split].iter().cloned(), n)?;
    let mut flips = Vec::new();
    for (line, tokens) in &lines[split..] {
        if tokens[0] != "flip" {
            return Err(syntax(*line, "expected `flip <p> <q> <r>`"));
        }
        let [p, q, r] = parse_indices::<3>(*line, &tokens[1..], n)?;
        flips.push(Flip::new(p, q, r));
    }
    Ok(FlipSequence { start, flips })
}

pub fn write_sequence(s: &FlipSequence) -> String {
    let mut out = String::from("start\n");
    out.push_str(&write_matching(&s.start));
    for f in &s.flips {
        writeln!(out, "flip {} {} {}", f.p, f.q, f.r).unwrap();
    }
    out
}
