use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use planeflip::geometry::convex_hull;
use planeflip::io::{parse_matching, parse_points, parse_sequence};
use planeflip_cli::{exit_code, run, Cli, Output};

use clap::Parser;

fn cli(args: &[&str]) -> anyhow::Result<Output> {
    let argv = std::iter::once("planeflip").chain(args.iter().copied());
    run(Cli::try_parse_from(argv)?)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const TRIANGLE: &str = "0 0\n4 0\n1 3\n";

#[test]
fn gen_convex_and_random() {
    let out = cli(&["gen", "convex", "--n", "5", "--seed", "1"]).unwrap();
    assert!(parse_points(&out.stdout).unwrap().is_convex_position());
    let out = cli(&["gen", "random", "--n", "9", "--seed", "7"]).unwrap();
    assert_eq!(parse_points(&out.stdout).unwrap().len(), 9);
    assert_eq!(out, cli(&["gen", "random", "--n", "9", "--seed", "7"]).unwrap());
}

#[test]
fn gen_nested_writes_walls() {
    let dir = tempfile::tempdir().unwrap();
    let walls = dir.path().join("walls.txt");
    let out = cli(&["gen", "nested", "--layers", "3", "--matching-out", s(&walls)]).unwrap();
    let ps = parse_points(&out.stdout).unwrap();
    assert_eq!(ps.len(), 19);
    let m = parse_matching(&fs::read_to_string(&walls).unwrap(), ps.len()).unwrap();
    assert_eq!(m.unmatched(), 0);
    assert!(m.is_plane(&ps));
    assert!(cli(&["gen", "nested", "--n", "8"]).is_err());
    assert_eq!(cli(&["gen", "nested", "--n", "13"]).unwrap().stdout.lines().count(), 13);
}

#[test]
fn nested_needs_layer_count_flips_to_reach_hull() {
    let inst = planeflip::generate::nested(3, 0).unwrap();
    let hull = convex_hull(&inst.points);
    let s = planeflip::flipgraph::bfs_until(
        &inst.points,
        &inst.walls,
        planeflip::matching::FlipRule::EdgeFlip,
        planeflip::flipgraph::VERTEX_CAP,
        |m| hull.contains(&m.unmatched()),
    )
    .unwrap()
    .unwrap();
    assert!(s.len() >= 3, "{}", s.len());
}

#[test]
fn analyze_examples() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "tri.txt", TRIANGLE);
    let out = cli(&["analyze", s(&tri), "--format", "json", "--no-timing"]).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!((v["vertex_count"].as_u64(), v["components"].as_u64(), v["diameter"].as_u64()), (Some(3), Some(1), Some(1)));
    assert!(v["runtime_ms"].is_null());

    let c5 = write(dir.path(), "c5.txt", &cli(&["gen", "convex", "--n", "5"]).unwrap().stdout);
    let v: serde_json::Value =
        serde_json::from_str(&cli(&["analyze", s(&c5), "--format", "json"]).unwrap().stdout).unwrap();
    assert_eq!((v["vertex_count"].as_u64(), v["components"].as_u64()), (Some(10), Some(1)));
    assert!(v["runtime_ms"].is_u64());

    let c7 = write(dir.path(), "c7.txt", &cli(&["gen", "convex", "--n", "7"]).unwrap().stdout);
    let v: serde_json::Value =
        serde_json::from_str(&cli(&["analyze", s(&c7), "--rule", "rotation", "--format", "json"]).unwrap().stdout)
            .unwrap();
    assert!(v["components"].as_u64().unwrap() >= 1);
    assert_eq!(v["rule"], "rotation");

    let text = cli(&["analyze", s(&tri)]).unwrap().stdout;
    assert!(text.contains("components 1\n") && text.contains("diameter 1\n"));
}

#[test]
fn route_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let c5 = write(d, "c5.txt", &cli(&["gen", "convex", "--n", "5", "--seed", "2"]).unwrap().stdout);
    let ps = parse_points(&fs::read_to_string(&c5).unwrap()).unwrap();
    let hull = convex_hull(&ps);
    // edge-disjoint hull matchings
    let a = write(d, "a.txt", &format!("unmatched {}\n{} {}\n{} {}\n", hull[0], hull[1], hull[2], hull[3], hull[4]));
    let b = write(d, "b.txt", &format!("unmatched {}\n{} {}\n{} {}\n", hull[4], hull[0], hull[1], hull[2], hull[3]));

    let same = cli(&["route", s(&c5), s(&a), s(&a)]).unwrap();
    assert!(parse_sequence(&same.stdout, 5).unwrap().is_empty());

    let v: serde_json::Value =
        serde_json::from_str(&cli(&["route", s(&c5), s(&a), s(&b), "--mode", "bfs", "--format", "json"]).unwrap().stdout)
            .unwrap();
    assert!(v["length"].as_u64().unwrap() >= 2);
    assert_eq!(v["length"], v["bound"]);

    let v: serde_json::Value = serde_json::from_str(
        &cli(&["route", s(&c5), s(&a), s(&b), "--mode", "convex", "--format", "json"]).unwrap().stdout,
    )
    .unwrap();
    assert!(v["length"].as_u64().unwrap() <= 10);

    let r7 = write(d, "r7.txt", &cli(&["gen", "random", "--n", "7", "--seed", "3"]).unwrap().stdout);
    let ps7 = parse_points(&fs::read_to_string(&r7).unwrap()).unwrap();
    let order = planeflip::geometry::sort_left_to_right(&ps7);
    let a7 = write(d, "a7.txt", &format!("unmatched {}\n{} {}\n{} {}\n{} {}\n", order[0], order[1], order[2], order[3], order[4], order[5], order[6]));
    let b7 = write(d, "b7.txt", &format!("unmatched {}\n{} {}\n{} {}\n{} {}\n", order[3], order[0], order[1], order[2], order[4], order[5], order[6]));
    let seq = dir.path().join("seq7.txt");
    cli(&["route", s(&r7), s(&a7), s(&b7), "--out", s(&seq)]).unwrap();
    let parsed = parse_sequence(&fs::read_to_string(&seq).unwrap(), 7).unwrap();
    assert!(parsed.len() <= 3 * 6);
    assert_eq!(cli(&["verify", s(&r7), s(&seq)]).unwrap().code, 0);

    // convex mode rejects a non-convex set
    let err = cli(&["route", s(&r7), s(&a7), s(&b7), "--mode", "convex"]).unwrap_err();
    assert_eq!(exit_code(&err), 1);
}

#[test]
fn render_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let tri = write(d, "tri.txt", TRIANGLE);
    let m = write(d, "m.txt", "unmatched 2\n0 1\n");
    let svg = cli(&["render", s(&tri), s(&m)]).unwrap().stdout;
    assert_eq!(svg.matches("<circle").count(), 3);
    assert_eq!(svg.matches("<line").count(), 1);
    assert_eq!(svg, cli(&["render", s(&tri), s(&m)]).unwrap().stdout);

    let seq = write(d, "seq.txt", "start\nunmatched 2\n0 1\nflip 2 1 0\n");
    let listing = cli(&["render", s(&tri), s(&seq), "--out-dir", s(&d.join("frames"))]).unwrap().stdout;
    assert_eq!(listing.lines().count(), 2);
    assert!(cli(&["render", s(&tri), s(&seq)]).is_err());

    let crossing = write(d, "bad.txt", "start\nunmatched 2\n0 1\nflip 0 1 2\n");
    assert!(cli(&["render", s(&tri), s(&crossing), "--out-dir", s(&d.join("x"))]).is_err());
}

#[test]
fn verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let tri = write(d, "tri.txt", TRIANGLE);
    let empty = write(d, "empty.txt", "start\nunmatched 2\n0 1\n");
    assert_eq!(cli(&["verify", s(&tri), s(&empty)]).unwrap().code, 0);
    let good = write(d, "good.txt", "start\nunmatched 2\n0 1\nflip 2 1 0\nflip 0 1 2\n");
    assert_eq!(cli(&["verify", s(&tri), s(&good)]).unwrap().code, 0);
    let bad = write(d, "bad.txt", "start\nunmatched 2\n0 1\nflip 2 1 0\nflip 2 1 0\n");
    let out = cli(&["verify", s(&tri), s(&bad)]).unwrap();
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("invalid at step 1"), "{}", out.stdout);
}

#[test]
fn polygon_and_search() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let tri = write(d, "tri.txt", TRIANGLE);
    let m = write(d, "m.txt", "unmatched 2\n0 1\n");
    let out = cli(&["polygon", s(&tri), s(&m)]).unwrap().stdout;
    let cycle: Vec<usize> = out.lines().last().unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
    assert_eq!(cycle.len(), 4);
    assert!(cli(&["search", "windmill", "--count", "1", "--rule", "rotation"]).unwrap().stdout.contains("isolated"));
    assert!(cli(&["search", "convex", "--size", "7", "--count", "3", "--rule", "rotation"])
        .unwrap()
        .stdout
        .starts_with("# none"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_planeflip");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bad = write(d, "bad.txt", "0 0\n1 x\n");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["analyze", s(&bad)]), Some(2));
    assert_eq!(code(&["analyze", s(&d.join("missing.txt"))]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    let big = write(d, "big.txt", &cli(&["gen", "convex", "--n", "13"]).unwrap().stdout);
    assert_eq!(code(&["analyze", s(&big)]), Some(3));
    assert_eq!(code(&["analyze", s(&big), "--cap-n", "7"]), Some(3));
    let tri = write(d, "tri.txt", TRIANGLE);
    let seq = write(d, "seq.txt", "start\nunmatched 2\n0 1\nflip 1 0 2\n");
    assert_eq!(code(&["verify", s(&tri), s(&seq)]), Some(1));
    let out = Command::new(bin).args(["analyze", s(&tri), "--format", "json", "--no-timing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"vertex_count\": 3"));
}
