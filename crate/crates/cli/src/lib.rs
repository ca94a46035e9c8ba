//! Command implementations behind the `planeflip` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use planeflip::flipgraph::{analyze, bfs_until, search_disconnected, GraphError, MatchingRecord, VERTEX_CAP};
use planeflip::flipseq::{convex_route_to_hull, route, validate_sequence, FlipSequence};
use planeflip::generate;
use planeflip::geometry::PointSet;
use planeflip::io::{self, ParseError};
use planeflip::matching::{FlipRule, Matching};
use planeflip::svg;
use planeflip::visibility::{build_visibility_graph, duplicate_unmatched, plane_hamiltonian_polygon, validate_polygon};

#[derive(Debug, Parser)]
#[command(name = "planeflip", version, about = "Flip graphs of plane almost-perfect matchings")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Flip rule: flip or rotation.
    #[arg(long, global = true, default_value = "flip")]
    pub rule: FlipRule,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for all-pairs BFS.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Largest point count accepted for exhaustive work.
    #[arg(long = "cap-n", global = true, default_value_t = planeflip::flipgraph::DEFAULT_CAP_N)]
    pub cap_n: usize,
    /// Report `runtime_ms` as null so output is byte-stable.
    #[arg(long = "no-timing", global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Convex,
    Random,
    Nested,
    Windmill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Canonical,
    Bfs,
    Convex,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a point set.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        /// Point count (convex, random; nested accepts 6L+1).
        #[arg(long)]
        n: Option<usize>,
        /// Layer count for nested.
        #[arg(long)]
        layers: Option<usize>,
        /// Arm count for windmill.
        #[arg(long, default_value_t = 3)]
        arms: usize,
        /// Write the points here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// For nested and windmill, also write the built-in start matching.
        #[arg(long)]
        matching_out: Option<PathBuf>,
    },
    /// Enumerate matchings and report components and diameter.
    Analyze { points: PathBuf },
    /// Flip sequence from matching A to matching B.
    Route {
        points: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Canonical)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a matching, or every step of a sequence, as SVG.
    Render {
        points: PathBuf,
        file: PathBuf,
        /// Directory for sequence frames (`frame_000.svg`, ...).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Replay a sequence and report the first illegal step.
    Verify { points: PathBuf, sequence: PathBuf },
    /// Hamiltonian polygon of a matching with its unmatched point doubled.
    Polygon { points: PathBuf, matching: PathBuf },
    /// Look for a point set whose flip graph is disconnected.
    Search {
        #[arg(value_enum, default_value_t = Kind::Windmill)]
        family: Kind,
        /// Instances to scan.
        #[arg(long, default_value_t = 10)]
        count: u64,
        /// Size parameter: arms (windmill), layers (nested) or n.
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
}

/// Text printed to stdout and the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: u8,
}

impl Output {
    fn ok(stdout: String) -> Output {
        Output { stdout, code: 0 }
    }
}

/// Exit status for an error: 2 for unreadable or malformed input, 3 for cap
/// violations, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ParseError>().is_some() || cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
        if let Some(g) = cause.downcast_ref::<GraphError>() {
            if matches!(g, GraphError::CapExceeded { .. } | GraphError::VertexCapExceeded(_)) {
                return 3;
            }
        }
    }
    1
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_points(path: &Path) -> Result<PointSet> {
    io::parse_points(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_matching(path: &Path, ps: &PointSet) -> Result<Matching> {
    let m = io::parse_matching(&read(path)?, ps.len()).with_context(|| format!("parsing {}", path.display()))?;
    Matching::new(ps, &m.edge_pairs(), m.unmatched()).with_context(|| format!("validating {}", path.display()))
}

fn write_or_return(out: &Option<PathBuf>, text: String) -> Result<String> {
    match out {
        Some(p) => {
            fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn check_cap(ps: &PointSet, cap: usize) -> Result<()> {
    if ps.len() > cap {
        return Err(GraphError::CapExceeded { n: ps.len(), cap }.into());
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<Output> {
    let g = &cli.global;
    match cli.command {
        Command::Gen { kind, n, layers, arms, out, matching_out } => cmd_gen(g, kind, n, layers, arms, &out, &matching_out),
        Command::Analyze { points } => cmd_analyze(g, &points),
        Command::Route { points, a, b, mode, out } => cmd_route(g, &points, &a, &b, mode, &out),
        Command::Render { points, file, out_dir } => cmd_render(&points, &file, &out_dir),
        Command::Verify { points, sequence } => cmd_verify(g, &points, &sequence),
        Command::Polygon { points, matching } => cmd_polygon(&points, &matching),
        Command::Search { family, count, size } => cmd_search(g, family, count, size),
    }
}

fn generate_instance(kind: Kind, n: Option<usize>, layers: Option<usize>, arms: usize, seed: u64) -> Result<(PointSet, Option<Matching>)> {
    Ok(match kind {
        Kind::Convex => (generate::convex(n.context("convex needs --n")?, seed)?, None),
        Kind::Random => (generate::random(n.context("random needs --n")?, seed)?, None),
        Kind::Nested => {
            let layers = match (layers, n) {
                (Some(l), _) => l,
                (None, Some(n)) if n % 6 == 1 => n / 6,
                (None, Some(n)) => bail!("nested point counts are 6L+1, got {n}"),
                (None, None) => bail!("nested needs --layers or --n"),
            };
            let inst = generate::nested(layers, seed)?;
            (inst.points, Some(inst.walls))
        }
        Kind::Windmill => {
            let (ps, m) = generate::windmill(arms, seed)?;
            (ps, Some(m))
        }
    })
}

fn cmd_gen(
    g: &Global,
    kind: Kind,
    n: Option<usize>,
    layers: Option<usize>,
    arms: usize,
    out: &Option<PathBuf>,
    matching_out: &Option<PathBuf>,
) -> Result<Output> {
    let (ps, m) = generate_instance(kind, n, layers, arms, g.seed)?;
    if let Some(path) = matching_out {
        let m = m.context("only nested and windmill have a built-in matching")?;
        fs::write(path, io::write_matching(&m)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Output::ok(write_or_return(out, io::write_points(&ps))?))
}

fn cmd_analyze(g: &Global, points: &Path) -> Result<Output> {
    let ps = load_points(points)?;
    let clock = Instant::now();
    let mut report = analyze(&ps, g.rule, g.cap_n, g.threads)?;
    if !g.no_timing {
        report.runtime_ms = Some(clock.elapsed().as_millis() as u64);
    }
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        _ => {
            let mut s = String::new();
            writeln!(s, "n {}", report.n)?;
            writeln!(s, "rule {}", report.rule)?;
            writeln!(s, "vertices {}", report.vertex_count)?;
            writeln!(s, "edges {}", report.edge_count)?;
            writeln!(s, "components {}", report.components)?;
            match report.diameter {
                Some(d) => writeln!(s, "diameter {d}")?,
                None => writeln!(s, "diameter undefined (disconnected)")?,
            }
            if let Some(ms) = report.runtime_ms {
                writeln!(s, "runtime_ms {ms}")?;
            }
            s
        }
    };
    Ok(Output::ok(text))
}

fn record_json(m: &Matching) -> serde_json::Value {
    serde_json::to_value(MatchingRecord::from(m)).expect("plain data")
}

fn cmd_route(g: &Global, points: &Path, a: &Path, b: &Path, mode: Mode, out: &Option<PathBuf>) -> Result<Output> {
    let ps = load_points(points)?;
    let ma = load_matching(a, &ps)?;
    let mb = load_matching(b, &ps)?;
    let m = ps.len() / 2;
    let (seq, bound) = match mode {
        Mode::Canonical => (route(&ps, &ma, &mb)?, m * (m + 3)),
        Mode::Convex => (convex_route_to_hull(&ps, &ma, &mb)?, 2 * ps.len()),
        Mode::Bfs => {
            check_cap(&ps, g.cap_n)?;
            let s = bfs_until(&ps, &ma, FlipRule::EdgeFlip, VERTEX_CAP, |x| *x == mb)?
                .context("target matching is unreachable")?;
            let d = s.len();
            (s, d)
        }
    };
    validate_sequence(&ps, &seq).context("constructed sequence failed validation")?;
    let end = seq.end();
    let mode_name = format!("{mode:?}").to_lowercase();
    let text = match g.format {
        Format::Json => {
            let flips: Vec<[usize; 3]> = seq.flips.iter().map(|f| [f.p, f.q, f.r]).collect();
            let doc = json!({
                "mode": mode_name,
                "length": seq.len(),
                "bound": bound,
                "start": record_json(&seq.start),
                "flips": flips,
                "end": record_json(&end),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        _ => {
            let mut s = io::write_sequence(&seq);
            writeln!(s, "# mode {mode_name}, length {}, bound {bound}", seq.len())?;
            writeln!(s, "# end matching")?;
            for l in io::write_matching(&end).lines() {
                writeln!(s, "# {l}")?;
            }
            s
        }
    };
    Ok(Output::ok(write_or_return(out, text)?))
}

fn cmd_render(points: &Path, file: &Path, out_dir: &Option<PathBuf>) -> Result<Output> {
    let ps = load_points(points)?;
    let text = read(file)?;
    let is_sequence = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')) == Some("start");
    let frames = if is_sequence {
        let seq = io::parse_sequence(&text, ps.len()).with_context(|| format!("parsing {}", file.display()))?;
        if let Err(e) = validate_sequence(&ps, &seq) {
            bail!("refusing to render an invalid sequence: {e}");
        }
        svg::render_sequence(&ps, &seq)
    } else {
        let m = load_matching(file, &ps)?;
        vec![svg::render_matching(&ps, &m)]
    };
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let mut listing = String::new();
            for (i, frame) in frames.iter().enumerate() {
                let path = dir.join(format!("frame_{i:03}.svg"));
                fs::write(&path, frame).with_context(|| format!("writing {}", path.display()))?;
                writeln!(listing, "{}", path.display())?;
            }
            Ok(Output::ok(listing))
        }
        None if frames.len() == 1 => Ok(Output::ok(frames.into_iter().next().unwrap())),
        None => bail!("a sequence renders to {} frames; pass --out-dir", frames.len()),
    }
}

fn cmd_verify(g: &Global, points: &Path, sequence: &Path) -> Result<Output> {
    let ps = load_points(points)?;
    let seq: FlipSequence =
        io::parse_sequence(&read(sequence)?, ps.len()).with_context(|| format!("parsing {}", sequence.display()))?;
    Ok(match planeflip::flipseq::validate_sequence_with(&ps, &seq, g.rule) {
        Ok(()) => Output::ok(format!("ok: {} flips\n", seq.len())),
        Err(e) => {
            let at = e.index().map_or("start".to_string(), |i| format!("step {i}"));
            Output { stdout: format!("invalid at {at}: {e}\n"), code: 1 }
        }
    })
}

fn cmd_polygon(points: &Path, matching: &Path) -> Result<Output> {
    let ps = load_points(points)?;
    let m = load_matching(matching, &ps)?;
    let ss = duplicate_unmatched(&ps, &m)?;
    let hp = plane_hamiltonian_polygon(&build_visibility_graph(&ss))?;
    validate_polygon(&hp, &ss).map_err(|v| anyhow::anyhow!("polygon failed validation: {v:?}"))?;
    Ok(Output::ok(format!(
        "# vertex {} is the copy of unmatched point {}\n{hp}\n",
        ss.companion().expect("duplicated"),
        m.unmatched()
    )))
}

/// Instances scanned by `search`: `count` consecutive seeds of one family.
pub fn search_family(family: Kind, size: usize, seed: u64, count: u64) -> Result<Vec<PointSet>> {
    (seed..seed + count)
        .map(|s| {
            Ok(match family {
                Kind::Convex => generate::convex(size, s)?,
                Kind::Random => generate::random(size, s)?,
                Kind::Nested => generate::nested(size, s)?.points,
                Kind::Windmill => generate::windmill(size, s)?.0,
            })
        })
        .collect()
}

fn cmd_search(g: &Global, family: Kind, count: u64, size: usize) -> Result<Output> {
    let instances = search_family(family, size, g.seed, count)?;
    let outcome = search_disconnected(instances, g.rule, g.cap_n)?;
    let mut s = String::new();
    match outcome.found {
        None => writeln!(s, "# none of {} instances is disconnected under {}", outcome.examined, g.rule)?,
        Some(w) => {
            writeln!(s, "# instance {} (seed {}) is disconnected under {}", w.position, g.seed + w.position as u64, g.rule)?;
            writeln!(s, "# component sizes {:?}", w.components)?;
            s.push_str(&io::write_points(&w.points));
            if let Some(m) = w.isolated {
                writeln!(s, "# isolated matching")?;
                for l in io::write_matching(&m).lines() {
                    writeln!(s, "# {l}")?;
                }
            }
        }
    }
    Ok(Output::ok(s))
}
