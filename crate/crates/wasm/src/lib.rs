//! Browser bindings. Points travel as `[[x, y], ...]` and matchings as
//! `{"unmatched": i, "edges": [[u, v], ...]}`, both JSON strings.

use serde_json::json;
use wasm_bindgen::prelude::*;

use planeflip::flipgraph::{analyze as analyze_graph, bfs_until, MatchingRecord, DEFAULT_CAP_N, VERTEX_CAP};
use planeflip::flipseq::{convex_route_to_hull, route as canonical_route, FlipSequence};
use planeflip::generate;
use planeflip::geometry::{Point, PointSet};
use planeflip::matching::{canonical_matching, convex_hull_matching, Flip, FlipRule, Matching};
use planeflip::svg;

type Res<T> = Result<T, String>;

fn points(json: &str) -> Res<PointSet> {
    let raw: Vec<(i64, i64)> = serde_json::from_str(json).map_err(|e| format!("points: {e}"))?;
    PointSet::new(raw.into_iter().map(Point::from).collect()).map_err(|e| e.to_string())
}

fn points_json(ps: &PointSet) -> serde_json::Value {
    json!(ps.points().iter().map(|p| [p.x, p.y]).collect::<Vec<_>>())
}

fn matching(ps: &PointSet, json: &str) -> Res<Matching> {
    let rec: MatchingRecord = serde_json::from_str(json).map_err(|e| format!("matching: {e}"))?;
    Matching::new(ps, &rec.edges, rec.unmatched).map_err(|e| e.to_string())
}

fn matching_json(m: &Matching) -> serde_json::Value {
    serde_json::to_value(MatchingRecord::from(m)).expect("plain data")
}

fn rule(name: &str) -> Res<FlipRule> {
    name.parse()
}

/// `{points, matching}` for a generated set; nested and windmill come with
/// their built-in matching, the others with the canonical one.
pub fn generate_json(kind: &str, size: usize, seed: u64) -> Res<String> {
    let err = |e: generate::GenError| e.to_string();
    let (ps, m) = match kind {
        "convex" => (generate::convex(size, seed).map_err(err)?, None),
        "random" => (generate::random(size, seed).map_err(err)?, None),
        "nested" => {
            let inst = generate::nested(size, seed).map_err(err)?;
            (inst.points, Some(inst.walls))
        }
        "windmill" => {
            let (ps, m) = generate::windmill(size, seed).map_err(err)?;
            (ps, Some(m))
        }
        other => return Err(format!("unknown kind `{other}`")),
    };
    let m = match m {
        Some(m) => m,
        None => canonical_matching(&ps).map_err(|e| e.to_string())?,
    };
    Ok(json!({ "points": points_json(&ps), "matching": matching_json(&m) }).to_string())
}

pub fn render_json(points_s: &str, matching_s: &str) -> Res<String> {
    let ps = points(points_s)?;
    Ok(svg::render_matching(&ps, &matching(&ps, matching_s)?))
}

/// Flips the unmatched point onto `q`. Returns `{matching, svg}`.
pub fn flip_to_json(points_s: &str, matching_s: &str, q: usize, rule_s: &str) -> Res<String> {
    let ps = points(points_s)?;
    let m = matching(&ps, matching_s)?;
    let r = m.mate(q).ok_or_else(|| format!("{q} is the unmatched point"))?;
    let f = Flip::new(m.unmatched(), q, r);
    let next = m.apply_flip(&ps, f, rule(rule_s)?).map_err(|e| e.to_string())?;
    let frame = svg::render_frame(&ps, &next, Some(f.removed()), Some(f.added()), &format!("flip {} {} {}", f.p, f.q, f.r));
    Ok(json!({ "matching": matching_json(&next), "svg": frame }).to_string())
}

/// Route to `target` (`canonical` or `hull`) and one SVG per step.
/// `shortest` switches to breadth-first search (small sets only).
pub fn route_json(points_s: &str, matching_s: &str, target: &str, shortest: bool) -> Res<String> {
    let ps = points(points_s)?;
    let m = matching(&ps, matching_s)?;
    let goal = match target {
        "canonical" => canonical_matching(&ps),
        "hull" => convex_hull_matching(&ps, m.unmatched()),
        other => return Err(format!("unknown target `{other}`")),
    }
    .map_err(|e| e.to_string())?;
    let seq: FlipSequence = if shortest {
        if ps.len() > DEFAULT_CAP_N {
            return Err(format!("shortest routes are limited to {DEFAULT_CAP_N} points"));
        }
        bfs_until(&ps, &m, FlipRule::EdgeFlip, VERTEX_CAP, |x| *x == goal)
            .map_err(|e| e.to_string())?
            .ok_or("target unreachable")?
    } else if target == "hull" {
        convex_route_to_hull(&ps, &m, &goal).map_err(|e| e.to_string())?
    } else {
        canonical_route(&ps, &m, &goal).map_err(|e| e.to_string())?
    };
    let flips: Vec<[usize; 3]> = seq.flips.iter().map(|f| [f.p, f.q, f.r]).collect();
    Ok(json!({
        "length": seq.len(),
        "flips": flips,
        "frames": svg::render_sequence(&ps, &seq),
        "end": matching_json(&seq.end()),
    })
    .to_string())
}

pub fn analyze_json(points_s: &str, rule_s: &str) -> Res<String> {
    let ps = points(points_s)?;
    let report = analyze_graph(&ps, rule(rule_s)?, DEFAULT_CAP_N, 1).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

fn js(r: Res<String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn generate(kind: &str, size: usize, seed: u32) -> Result<String, JsValue> {
    js(generate_json(kind, size, seed as u64))
}

#[wasm_bindgen]
pub fn render(points: &str, matching: &str) -> Result<String, JsValue> {
    js(render_json(points, matching))
}

#[wasm_bindgen]
pub fn flip_to(points: &str, matching: &str, q: usize, rule: &str) -> Result<String, JsValue> {
    js(flip_to_json(points, matching, q, rule))
}

#[wasm_bindgen]
pub fn route(points: &str, matching: &str, target: &str, shortest: bool) -> Result<String, JsValue> {
    js(route_json(points, matching, target, shortest))
}

#[wasm_bindgen]
pub fn analyze(points: &str, rule: &str) -> Result<String, JsValue> {
    js(analyze_json(points, rule))
}
