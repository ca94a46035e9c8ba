//! Seeded point-set generators. Every output passes general-position
//! validation; the same seed always yields the same coordinates.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{validate_general_position, Point, PointSet, COORD_BOUND};
use crate::matching::Matching;

const RETRY_LIMIT: usize = 200;
pub const MAX_NESTED_LAYERS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("point count must be odd, got {0}")]
    EvenCount(usize),
    #[error("unsupported size: {0}")]
    Size(String),
    #[error("{kind}: no valid instance after {attempts} attempts")]
    RetryLimit { kind: &'static str, attempts: usize },
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn polar(radius: f64, angle: f64) -> (f64, f64) {
    (radius * angle.cos(), radius * angle.sin())
}

fn round(p: (f64, f64)) -> Point {
    Point::new(p.0.round() as i64, p.1.round() as i64)
}

fn jitter(rng: &mut ChaCha8Rng, p: Point, amount: i64) -> Point {
    if amount == 0 {
        return p;
    }
    Point::new(p.x + rng.random_range(-amount..=amount), p.y + rng.random_range(-amount..=amount))
}

fn check_odd(n: usize) -> Result<(), GenError> {
    if n.is_multiple_of(2) {
        Err(GenError::EvenCount(n))
    } else {
        Ok(())
    }
}

/// A perturbed regular `n`-gon: convex position, no three points collinear.
pub fn convex(n: usize, seed: u64) -> Result<PointSet, GenError> {
    check_odd(n)?;
    let radius = (20 * n * n).max(1000) as f64;
    if radius * 1.01 > COORD_BOUND as f64 {
        return Err(GenError::Size(format!("convex n={n} exceeds the coordinate bound")));
    }
    let sagitta = radius * (1.0 - (PI / n as f64).cos());
    let amount = (sagitta / 4.0).floor() as i64;
    let mut rng = rng(seed);
    for _ in 0..RETRY_LIMIT {
        let offset = rng.random_range(0.0..2.0 * PI);
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let p = round(polar(radius, offset + 2.0 * PI * i as f64 / n as f64));
                jitter(&mut rng, p, amount)
            })
            .collect();
        if let Ok(ps) = PointSet::new(pts) {
            if ps.is_convex_position() {
                return Ok(ps);
            }
        }
    }
    Err(GenError::RetryLimit { kind: "convex", attempts: RETRY_LIMIT })
}

/// `n` points drawn uniformly from a square, rejecting any draw that would
/// duplicate a point or complete a collinear triple.
pub fn random(n: usize, seed: u64) -> Result<PointSet, GenError> {
    check_odd(n)?;
    let half = (10 * n as i64).max(1000);
    if half > COORD_BOUND {
        return Err(GenError::Size(format!("random n={n} exceeds the coordinate bound")));
    }
    let mut rng = rng(seed);
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let mut placed = false;
        for _ in 0..RETRY_LIMIT {
            let candidate = Point::new(rng.random_range(-half..=half), rng.random_range(-half..=half));
            pts.push(candidate);
            if validate_last(&pts) {
                placed = true;
                break;
            }
            pts.pop();
        }
        if !placed {
            return Err(GenError::RetryLimit { kind: "random", attempts: RETRY_LIMIT });
        }
    }
    Ok(PointSet::new(pts).expect("every point was checked on insertion"))
}

/// True if the last point of `pts` keeps the set in general position,
/// assuming the prefix already is.
fn validate_last(pts: &[Point]) -> bool {
    let (&c, rest) = pts.split_last().expect("non-empty");
    for (i, &a) in rest.iter().enumerate() {
        if a == c {
            return false;
        }
        for &b in &rest[i + 1..] {
            if validate_general_position(&[a, b, c]).is_err() {
                return false;
            }
        }
    }
    true
}

/// Concentric layers of three matched segments around a single unmatched
/// centre point.
#[derive(Debug, Clone)]
pub struct Nested {
    pub points: PointSet,
    /// Wall segments matched, centre unmatched.
    pub walls: Matching,
    /// Layer of every point; the centre is layer 0, walls are 1..=layers.
    pub layer_of: Vec<usize>,
}

/// Each layer is a triangle whose three sides are segments that overshoot
/// one corner and stop just short of the next, so that the segments of a
/// layer block every line of sight from inside it to anything outside it.
/// Point 0 is the centre; layer `j` holds points `6j-5..=6j`.
pub fn nested(layers: usize, seed: u64) -> Result<Nested, GenError> {
    if layers == 0 || layers > MAX_NESTED_LAYERS {
        return Err(GenError::Size(format!("nested layers must be in 1..={MAX_NESTED_LAYERS}, got {layers}")));
    }
    const OVERSHOOT: f64 = 0.4;
    const GAP: f64 = 0.02;
    let mut rng = rng(seed);
    for _ in 0..RETRY_LIMIT {
        let mut pts = vec![jitter(&mut rng, Point::new(0, 0), 3)];
        let mut layer_of = vec![0];
        for j in 1..=layers {
            let radius = 1000.0 * 4f64.powi(j as i32 - 1);
            let turn = rng.random_range(0.0..2.0 * PI / 3.0);
            let corners: Vec<(f64, f64)> =
                (0..3).map(|c| polar(radius, turn + PI / 2.0 + 2.0 * PI * c as f64 / 3.0)).collect();
            for c in 0..3 {
                let (a, b) = (corners[c], corners[(c + 1) % 3]);
                let start = (a.0 + OVERSHOOT * (a.0 - b.0), a.1 + OVERSHOOT * (a.1 - b.1));
                let end = (b.0 - GAP * (b.0 - a.0), b.1 - GAP * (b.1 - a.1));
                pts.push(jitter(&mut rng, round(start), 2));
                pts.push(jitter(&mut rng, round(end), 2));
                layer_of.extend([j, j]);
            }
        }
        let Ok(ps) = PointSet::new(pts) else { continue };
        let edges: Vec<(usize, usize)> = (0..3 * layers).map(|s| (2 * s + 1, 2 * s + 2)).collect();
        let walls = Matching::new(&ps, &edges, 0).expect("walls of distinct layers are disjoint");
        return Ok(Nested { points: ps, walls, layer_of });
    }
    Err(GenError::RetryLimit { kind: "nested", attempts: RETRY_LIMIT })
}

/// `arms` segments arranged as a pinwheel around an unmatched centre. Each
/// arm runs from an inner point outward and sweeps past the next arm's inner
/// point, so the triangle spanned by the centre and any arm contains
/// another point: the centre admits no empty-triangle rotation. Point 0 is
/// the centre; arm `i` is `(2i+1, 2i+2)` with the inner point first.
pub fn windmill(arms: usize, seed: u64) -> Result<(PointSet, Matching), GenError> {
    if !(3..=5).contains(&arms) {
        return Err(GenError::Size(format!("windmill arms must be in 3..=5, got {arms}")));
    }
    let step = 2.0 * PI / arms as f64;
    // Heading of each arm off the outward radial, and the polar angle its
    // far end reaches. The heading stays below 90° + step/2 so the arm is
    // still moving outward when it passes the next inner point.
    let heading = (step + PI / 2.0 + step / 2.0) / 2.0;
    let reach = (step + heading) / 2.0;
    let inner = 1000.0;
    let outer = inner * heading.sin() / (heading - reach).sin();
    let mut rng = rng(seed);
    for _ in 0..RETRY_LIMIT {
        let turn = rng.random_range(0.0..step);
        let mut pts = vec![jitter(&mut rng, Point::new(0, 0), 3)];
        for i in 0..arms {
            let base = turn + step * i as f64;
            pts.push(jitter(&mut rng, round(polar(inner, base)), 3));
            pts.push(jitter(&mut rng, round(polar(outer, base + reach)), 3));
        }
        let Ok(ps) = PointSet::new(pts) else { continue };
        let edges: Vec<(usize, usize)> = (0..arms).map(|i| (2 * i + 1, 2 * i + 2)).collect();
        if let Ok(m) = Matching::new(&ps, &edges, 0) {
            return Ok((ps, m));
        }
    }
    Err(GenError::RetryLimit { kind: "windmill", attempts: RETRY_LIMIT })
}
