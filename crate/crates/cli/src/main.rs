use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asdim_core::checks::{self, CheckResult};
use asdim_core::generators::{self, GenSpec};
use asdim_core::io::{self as files, CoverFile, GraphFile};
use asdim_core::median::DEFAULT_CLIQUE_CAP;
use asdim_core::{net, Error, MedianGraph, NetBuilder, NormalGeometry};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "asdim", version, about = "Median graphs, normal cube paths and bounded covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tree,
    Grid,
    TreeProduct,
    Staircase,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Level {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a median graph and write it as JSON
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Vertex count for trees
        #[arg(long)]
        n: Option<usize>,
        /// Factor sizes for grids, tree products and staircases
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print hyperplanes, dimension and validation status
    Inspect {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Normal cube path between two vertices
    NormalPath {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the cover U_l at a basepoint
    Cover {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        base: usize,
        #[arg(long)]
        l: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the invariant suite; exit status 1 if any check fails
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        base: usize,
        /// Scale or inclusive range of scales, e.g. `2` or `1..3`
        #[arg(long, value_parser = parse_scales, default_value = "1")]
        l: Scales,
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// CSV of cover mesh and multiplicity against the bounds, per instance and scale
    AdReport {
        /// Graph files
        #[arg(short, long, num_args = 1..)]
        input: Vec<PathBuf>,
        /// JSON array of generator specs
        #[arg(long)]
        instances: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        base: usize,
        #[arg(long, value_parser = parse_scales, default_value = "1..3")]
        l: Scales,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Graphviz export, optionally coloured by a cover
    ExportDot {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        cover: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Debug)]
struct Scales(Vec<usize>);

fn parse_scales(text: &str) -> Result<Scales, String> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("{s}: {e}"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let l = parse(text)?;
            (l, l)
        }
    };
    if lo == 0 || hi < lo {
        return Err(format!("scales must satisfy 1 <= lo <= hi, got {text}"));
    }
    Ok(Scales((lo..=hi).collect()))
}

enum Failure {
    Violation,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(output: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    emit(output, &text)
}

fn check_distinct(input: &Path, output: Option<&Path>) -> Result<(), Failure> {
    if output == Some(input) {
        return Err(Failure::Input("input and output paths must differ".into()));
    }
    Ok(())
}

fn load(path: &Path) -> Result<MedianGraph, Failure> {
    let graph = files::load_graph(path)?;
    if !graph.is_validated() {
        return Err(Failure::Input(format!(
            "{} is too large to validate and is not marked validated",
            path.display()
        )));
    }
    Ok(graph)
}

fn gen_spec(kind: Kind, n: Option<usize>, dims: Vec<usize>, seed: u64) -> Result<GenSpec, Failure> {
    let need_dims = |dims: Vec<usize>| {
        if dims.is_empty() {
            Err(Failure::Input("--dims is required for this kind".into()))
        } else {
            Ok(dims)
        }
    };
    Ok(match kind {
        Kind::Tree => GenSpec::Tree {
            n: n.ok_or_else(|| Failure::Input("--n is required for trees".into()))?,
            seed,
        },
        Kind::Grid => GenSpec::Grid { dims: need_dims(dims)? },
        Kind::TreeProduct => GenSpec::TreeProduct {
            sizes: need_dims(dims)?,
            seed,
        },
        Kind::Staircase => GenSpec::Staircase {
            dims: need_dims(dims)?,
            seed,
        },
    })
}

#[derive(Serialize)]
struct WallSummary {
    id: usize,
    minus: Vec<usize>,
    plus: Vec<usize>,
    edges: usize,
}

#[derive(Serialize)]
struct Inspection {
    vertices: usize,
    edges: usize,
    validated: bool,
    diameter: u32,
    dimension: usize,
    hyperplanes: Vec<WallSummary>,
}

fn inspect(input: &Path) -> Result<(), Failure> {
    let graph = load(input)?;
    let hyperplanes = graph
        .hyperplanes()?
        .iter()
        .map(|h| WallSummary {
            id: h.id,
            minus: h.minus.ones().collect(),
            plus: h.plus.ones().collect(),
            edges: h.edges.len(),
        })
        .collect();
    emit_json(
        None,
        &Inspection {
            vertices: graph.vertex_count(),
            edges: graph.edges().len(),
            validated: graph.is_validated(),
            diameter: graph.diameter(),
            dimension: graph.dimension(None, DEFAULT_CLIQUE_CAP)?,
            hyperplanes,
        },
    )
}

#[derive(Serialize)]
struct VerifyReport {
    instance: String,
    base: usize,
    l: Vec<usize>,
    level: Level,
    checks: Vec<CheckResult>,
    passed: bool,
}

fn verify(input: &Path, base: usize, scales: &Scales, level: Level) -> Result<VerifyReport, Failure> {
    let graph = load(input)?;
    graph.check_vertex(base)?;
    let mut results = Vec::new();
    if level == Level::Full {
        results.extend(checks::graph_checks(&graph));
        results.extend(checks::normal_checks(&graph)?);
    } else {
        results.push(checks::separation_count(&graph));
        results.push(checks::halfspace_convexity(&graph));
        let geo = NormalGeometry::new(&graph)?;
        let paths = checks::PathTable::new(&geo)?;
        results.push(checks::normal_path_structure(&graph, &paths));
        results.push(checks::normal_metric(&graph, &geo, &paths));
    }
    for &l in &scales.0 {
        let builder = NetBuilder::new(&graph, l)?;
        results.push(checks::h_map_containment(&graph, builder.geometry(), &[base], l));
        if level == Level::Full {
            results.extend(checks::net_invariants(&builder));
        }
        results.extend(checks::pipeline(&builder, base)?.checks);
    }
    Ok(VerifyReport {
        instance: input.display().to_string(),
        base,
        l: scales.0.clone(),
        level,
        passed: results.iter().all(|r| r.passed),
        checks: results,
    })
}

fn spec_name(spec: &GenSpec) -> String {
    let join = |v: &[usize]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x");
    match spec {
        GenSpec::Tree { n, seed } => format!("tree-{n}-s{seed}"),
        GenSpec::Grid { dims } => format!("grid-{}", join(dims)),
        GenSpec::TreeProduct { sizes, seed } => format!("tree_product-{}-s{seed}", join(sizes)),
        GenSpec::Staircase { dims, seed } => format!("staircase-{}-s{seed}", join(dims)),
    }
}

fn ad_report(
    inputs: &[PathBuf],
    family: Option<&Path>,
    base: usize,
    scales: &Scales,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let mut instances: Vec<(String, String, MedianGraph)> = Vec::new();
    for path in inputs {
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into());
        instances.push((name, "input".into(), load(path)?));
    }
    if let Some(path) = family {
        let specs: Vec<GenSpec> = files::read_json(path)?;
        for spec in specs {
            instances.push((spec_name(&spec), spec.kind().into(), generators::generate(&spec)?));
        }
    }
    if instances.is_empty() {
        return Err(Failure::Input("no instances: pass -i files or --instances".into()));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header = ["instance", "kind", "vertices", "eta", "l", "mesh", "m_l", "bound_mesh", "bound_N"];
    writer.write_record(header).map_err(|e| Failure::Input(e.to_string()))?;
    for (name, kind, graph) in &instances {
        graph.check_vertex(base)?;
        for &l in &scales.0 {
            let builder = NetBuilder::new(graph, l)?;
            let c = builder.constants()?;
            let cover = net::build_cover(graph, base, l)?;
            let row = [
                name.clone(),
                kind.clone(),
                graph.vertex_count().to_string(),
                c.eta.to_string(),
                l.to_string(),
                cover.metrics.mesh.to_string(),
                cover.metrics.m_r.to_string(),
                c.radius(l as u64).to_string(),
                c.n.to_string(),
            ];
            writer.write_record(&row).map_err(|e| Failure::Input(e.to_string()))?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    emit(output, &String::from_utf8_lossy(&bytes))
}

fn export_dot(input: &Path, cover: Option<&Path>) -> Result<String, Failure> {
    let graph = load(input)?;
    let n = graph.vertex_count();
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut names = Vec::new();
    if let Some(path) = cover {
        let file: CoverFile = files::read_json(path)?;
        let cover = file.to_cover(n)?;
        for (i, set) in cover.sets.iter().enumerate() {
            set.ones().for_each(|x| membership[x].push(i));
        }
        names = cover.names;
    }
    let mut dot = String::from("graph G {\n");
    for (v, member_of) in membership.iter().enumerate() {
        let _ = write!(dot, "  {v} [label=\"{}\"", graph.label(v));
        if let Some(&first) = member_of.first() {
            let sets: Vec<&str> = member_of.iter().map(|&i| names[i].as_str()).collect();
            let _ = write!(
                dot,
                ", style=filled, fillcolor=\"/set312/{}\", sets=\"{}\"",
                first % 12 + 1,
                sets.join(" ")
            );
        }
        dot.push_str("];\n");
    }
    for (u, neighbours) in (0..n).map(|u| (u, graph.neighbors_with_walls(u))) {
        for (v, wall) in neighbours.filter(|&(v, _)| v > u) {
            let _ = writeln!(dot, "  {u} -- {v} [wall={wall}];");
        }
    }
    dot.push_str("}\n");
    Ok(dot)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen {
            kind,
            n,
            dims,
            seed,
            output,
        } => {
            let graph = generators::generate(&gen_spec(kind, n, dims, seed)?)?;
            emit_json(output.as_deref(), &GraphFile::from_graph(&graph))
        }
        Command::Inspect { input } => inspect(&input),
        Command::NormalPath {
            input,
            from,
            to,
            output,
        } => {
            check_distinct(&input, output.as_deref())?;
            let graph = load(&input)?;
            graph.check_vertex(from)?;
            graph.check_vertex(to)?;
            let path = NormalGeometry::new(&graph)?.path(from, to)?;
            emit_json(output.as_deref(), &path)
        }
        Command::Cover {
            input,
            base,
            l,
            output,
        } => {
            check_distinct(&input, output.as_deref())?;
            let graph = load(&input)?;
            graph.check_vertex(base)?;
            let cover = net::build_cover(&graph, base, l)?;
            emit_json(output.as_deref(), &CoverFile::from_cover(&cover))
        }
        Command::Verify {
            input,
            base,
            l,
            level,
            output,
        } => {
            check_distinct(&input, output.as_deref())?;
            let report = verify(&input, base, &l, level)?;
            emit_json(output.as_deref(), &report)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Violation)
            }
        }
        Command::AdReport {
            input,
            instances,
            base,
            l,
            output,
        } => ad_report(&input, instances.as_deref(), base, &l, output.as_deref()),
        Command::ExportDot {
            input,
            cover,
            output,
        } => {
            check_distinct(&input, output.as_deref())?;
            let dot = export_dot(&input, cover.as_deref())?;
            emit(output.as_deref(), &dot)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("asdim: {msg}");
            ExitCode::from(2)
        }
    }
}
