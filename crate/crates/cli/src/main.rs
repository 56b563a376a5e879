mod output;
mod report;
mod tables;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use euler_core::classical::classical_approx;
use euler_core::compare::Family;
use euler_core::exact::{
    cycle_product_ratio, descent_count, euler_exact, product_counts, tree_conjecture_scan,
    TREE_SCAN_LIMIT,
};
use euler_core::geometry::{
    build_nystrom_with, positivity_checks, sym_eig, NystromConfig, DEFAULT_TOP_K,
    DEFAULT_VOLUME_SAMPLES,
};
use euler_core::graph::{BipartiteGraph, Digraph};
use euler_core::ode::DEFAULT_STEPS_PER_UNIT;

use output::{num, text, Table};

#[derive(Parser)]
#[command(
    name = "bieuler",
    version,
    about = "Euler numbers of bipartite graphs: exact counts and spectral asymptotics"
)]
struct Cli {
    /// Print JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Euler numbers by down-set dynamic programming.
    Exact(ExactArgs),
    /// Nyström spectrum of the transfer operator for a graph and vertex subset.
    Spectrum(SpectrumArgs),
    /// Shooting residual over a range of λ.
    Scan(ScanArgs),
    /// Eigenpairs of the comb operator and the series they give.
    Comb(ShootArgs),
    /// Eigenpairs of the 2 × m array operator and the series they give.
    Grid2(ShootArgs),
    /// Closed-form approximations of the classical Euler numbers.
    Classical(ClassicalArgs),
    /// Exact counts against spectral approximations; exit code 1 on any miss.
    Compare(CompareArgs),
    /// Write every table and figure dataset plus a manifest.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactFamily {
    Comb,
    Grid2,
    Path,
    Cycle,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["family", "graph", "digraph", "trees"])))]
struct ExactArgs {
    /// Built-in family, evaluated for m = 1..=m-max (cycles use C_2m, m ≥ 2).
    #[arg(long, value_enum)]
    family: Option<ExactFamily>,
    /// Graph file: vertex count, then one `u v` edge per line.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Vertex subset S (comma-separated, `-` for empty); with --graph counts G □_S P_m.
    #[arg(long)]
    s: Option<String>,
    /// With --graph and --s: ratios E(G □_S C_2m) / E(G □_S P_2m).
    #[arg(long, requires = "s")]
    cycle_ratio: bool,
    /// Directed graph file; counts labelings increasing along every arc.
    #[arg(long)]
    digraph: Option<PathBuf>,
    /// Compare every tree on up to N vertices with the path.
    #[arg(long, value_name = "N")]
    trees: Option<usize>,
    #[arg(long, default_value_t = 10)]
    m_max: usize,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Vertex subset S (comma-separated, `-` for empty).
    #[arg(long)]
    s: String,
    #[arg(long, default_value_t = 2000)]
    nodes: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top: usize,
    #[arg(long, default_value_t = DEFAULT_VOLUME_SAMPLES)]
    volume_samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Comb,
    Grid2,
    Classical,
}

impl Problem {
    fn name(self) -> &'static str {
        match self {
            Problem::Comb => "comb",
            Problem::Grid2 => "grid2",
            Problem::Classical => "classical",
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    lmin: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    lmax: f64,
    /// Grid points (per side with --log).
    #[arg(long, default_value_t = 2001)]
    points: usize,
    /// RK4 steps per unit length.
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_UNIT)]
    steps: usize,
    /// Log-spaced grid on ±[lmin, lmax].
    #[arg(long)]
    log: bool,
}

#[derive(Args)]
struct ShootArgs {
    /// Number of eigenvalues (at most 4).
    #[arg(long, default_value_t = 4)]
    roots: usize,
    /// RK4 steps per unit length.
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_UNIT)]
    steps: usize,
    /// Series approximations for m = 1..=m-max (0 to skip).
    #[arg(long, default_value_t = 10)]
    m_max: usize,
    /// Write sampled eigenfunctions to this CSV file.
    #[arg(long, value_name = "FILE")]
    emit_eigenfunctions: Option<PathBuf>,
    /// Keep every stride-th grid point in the eigenfunction file.
    #[arg(long, default_value_t = 256)]
    stride: usize,
}

#[derive(Args)]
struct ClassicalArgs {
    #[arg(long, default_value_t = 10)]
    m_max: usize,
    #[arg(long, default_value_t = 4)]
    terms: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareFamily {
    Comb,
    Grid2,
    Path,
}

impl From<CompareFamily> for Family {
    fn from(f: CompareFamily) -> Self {
        match f {
            CompareFamily::Comb => Family::Comb,
            CompareFamily::Grid2 => Family::Grid2,
            CompareFamily::Path => Family::Path,
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_enum)]
    family: CompareFamily,
    #[arg(long, default_value_t = 10)]
    m_max: usize,
    /// Spectral terms in the series.
    #[arg(long, default_value_t = 4)]
    roots: usize,
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_UNIT)]
    steps: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// Output directory (default: report-<unix time> in the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rerun with the settings recorded in an earlier manifest.
    #[arg(long, value_name = "MANIFEST", conflicts_with_all = ["families", "m_max", "roots", "steps", "scan_points", "stride"])]
    from_manifest: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "comb,grid2")]
    families: Vec<String>,
    #[arg(long, default_value_t = 10)]
    m_max: usize,
    #[arg(long, default_value_t = 4)]
    roots: usize,
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_UNIT)]
    steps: usize,
    #[arg(long, default_value_t = 2001)]
    scan_points: usize,
    #[arg(long, default_value_t = 256)]
    stride: usize,
}

fn parse_subset(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() || s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("bad vertex `{v}` in S"))
        })
        .collect()
}

fn load_graph(path: &Path) -> Result<BipartiteGraph> {
    let g =
        BipartiteGraph::from_file(path).with_context(|| format!("loading {}", path.display()))?;
    if !g.is_bipartite() {
        eprintln!(
            "warning: {} is not bipartite; its Euler number is 0",
            path.display()
        );
    }
    Ok(g)
}

fn cmd_exact(a: &ExactArgs) -> Result<Table> {
    if let Some(fam) = a.family {
        let mut t = Table::new("exact Euler numbers", &["m", "n", "euler"]);
        let graphs: Vec<(usize, BipartiteGraph)> = match fam {
            ExactFamily::Cycle => (2..=a.m_max)
                .map(|m| Ok((m, BipartiteGraph::cycle(2 * m)?)))
                .collect::<Result<_>>()?,
            ExactFamily::Comb => (1..=a.m_max)
                .map(|m| Ok((m, Family::Comb.graph(m)?)))
                .collect::<Result<_>>()?,
            ExactFamily::Grid2 => (1..=a.m_max)
                .map(|m| Ok((m, Family::Grid2.graph(m)?)))
                .collect::<Result<_>>()?,
            ExactFamily::Path => (1..=a.m_max)
                .map(|m| Ok((m, Family::Path.graph(m)?)))
                .collect::<Result<_>>()?,
        };
        for (m, g) in graphs {
            t.push(vec![json!(m), json!(g.n()), text(euler_exact(&g)?)]);
        }
        return Ok(t.meta("family", fam.to_possible_value().expect("named").get_name()));
    }
    if let Some(path) = &a.graph {
        let g = load_graph(path)?;
        let meta_graph = path.display().to_string();
        let Some(s) = &a.s else {
            let mut t = Table::new("exact Euler number", &["n", "euler"]).meta("graph", meta_graph);
            t.push(vec![json!(g.n()), text(euler_exact(&g)?)]);
            return Ok(t);
        };
        let s_set = parse_subset(s)?;
        if a.cycle_ratio {
            let ratios = cycle_product_ratio(&g, &s_set, a.m_max)?;
            let mut t = Table::new("cycle/path product ratio", &["m", "ratio", "ratio_f64"])
                .meta("graph", meta_graph)
                .meta("s", format!("{s_set:?}"));
            for (i, r) in ratios.iter().enumerate() {
                let f = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN)
                    / r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
                t.push(vec![json!(i + 1), text(r), num(f)]);
            }
            return Ok(t);
        }
        let counts = product_counts(&g, &s_set, a.m_max)?;
        let mut t = Table::new("exact Euler numbers of G □_S P_m", &["m", "euler"])
            .meta("graph", meta_graph)
            .meta("s", format!("{s_set:?}"));
        for (i, c) in counts.iter().enumerate() {
            t.push(vec![json!(i + 1), text(c)]);
        }
        return Ok(t);
    }
    if let Some(path) = &a.digraph {
        let text_in =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let d = Digraph::parse(&text_in)?;
        if !d.is_acyclic() {
            eprintln!(
                "warning: {} has a directed cycle; no labeling exists",
                path.display()
            );
        }
        let mut t = Table::new("labelings increasing along arcs", &["n", "count"])
            .meta("digraph", path.display());
        t.push(vec![json!(d.n()), text(descent_count(&d)?)]);
        return Ok(t);
    }
    let Some(max_n) = a.trees else {
        bail!("no mode selected")
    };
    if max_n > TREE_SCAN_LIMIT {
        bail!("--trees is limited to {TREE_SCAN_LIMIT}");
    }
    let scan = tree_conjecture_scan(max_n)?;
    let mut t = Table::new(
        "trees vs paths",
        &[
            "n",
            "trees",
            "min_euler",
            "path_euler",
            "below_path",
            "non_path_equal",
        ],
    );
    for n in 1..=max_n {
        let rows: Vec<_> = scan.rows.iter().filter(|r| r.tree.n() == n).collect();
        let min = rows
            .iter()
            .map(|r| &r.euler)
            .min()
            .cloned()
            .unwrap_or_default();
        let path = rows
            .first()
            .map(|r| r.path_euler.clone())
            .unwrap_or_default();
        t.push(vec![
            json!(n),
            json!(rows.len()),
            text(min),
            text(path),
            json!(rows.iter().filter(|r| r.violates()).count()),
            json!(rows.iter().filter(|r| r.non_path_equality()).count()),
        ]);
    }
    for r in scan.violations().chain(scan.non_path_equalities()) {
        eprintln!(
            "finding: tree with E = {} vs path {}: {}",
            r.euler,
            r.path_euler,
            r.tree.to_string().replace('\n', " ")
        );
    }
    Ok(t)
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<String> {
    let g = load_graph(&a.graph)?;
    let s_set = parse_subset(&a.s)?;
    let cfg = NystromConfig {
        n_nodes: a.nodes,
        seed: a.seed,
        volume_samples: a.volume_samples,
    };
    let op = build_nystrom_with(&g, &s_set, &cfg)?;
    let spec = sym_eig(&op, a.top)?;
    let positivity = if spec.len() >= 2 {
        Some(positivity_checks(&spec)?)
    } else {
        None
    };
    let out = json!({
        "graph": a.graph.display().to_string(),
        "n": g.n(),
        "s": s_set,
        "nodes": op.n_nodes(),
        "seed": a.seed,
        "acceptance": op.nodes.acceptance(),
        "volume": op.volume,
        "entries": spec,
        "positivity": positivity,
    });
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

fn cmd_scan(a: &ScanArgs) -> Result<Table> {
    let grid = tables::scan_grid(a.lmin, a.lmax, a.points, a.log)?;
    tables::scan_table(
        a.problem.name(),
        &grid,
        a.steps,
        if a.log { "log" } else { "uniform" },
    )
}

fn emit_eigenfunctions(path: &Path, t: &Table) -> Result<()> {
    std::fs::write(path, t.to_csv()).with_context(|| format!("writing {}", path.display()))
}

fn render_pair(eig: Table, series: Option<Table>, as_json: bool) -> String {
    match (series, as_json) {
        (None, _) => eig.render(as_json),
        (Some(s), true) => {
            serde_json::to_string_pretty(
                &json!({ "eigenpairs": eig.to_json(), "series": s.to_json() }),
            )
            .expect("json")
                + "\n"
        }
        (Some(s), false) => format!("{}\n{}", eig.to_csv(), s.to_csv()),
    }
}

fn cmd_comb(a: &ShootArgs, as_json: bool) -> Result<String> {
    let spec = tables::comb_spectrum(a.roots, a.steps)?;
    if let Some(path) = &a.emit_eigenfunctions {
        emit_eigenfunctions(
            path,
            &tables::eigenfunction_table(Some(&spec), None, a.stride, a.steps)?,
        )?;
    }
    let series = (a.m_max > 0).then(|| tables::comb_series(&spec, a.m_max));
    Ok(render_pair(
        tables::comb_table(&spec, a.steps),
        series,
        as_json,
    ))
}

fn cmd_grid2(a: &ShootArgs, as_json: bool) -> Result<String> {
    let spec = tables::grid_spectrum(a.roots, a.steps)?;
    if let Some(path) = &a.emit_eigenfunctions {
        emit_eigenfunctions(
            path,
            &tables::eigenfunction_table(None, Some(&spec), a.stride, a.steps)?,
        )?;
    }
    let series = (a.m_max > 0).then(|| tables::grid_series(&spec, a.m_max));
    Ok(render_pair(
        tables::grid_table(&spec, a.steps),
        series,
        as_json,
    ))
}

fn cmd_classical(a: &ClassicalArgs) -> Result<Table> {
    if a.terms == 0 {
        bail!("--terms must be positive");
    }
    let mut t = Table::new(
        "classical Euler numbers",
        &["m", "exact", "approx", "rel_err"],
    )
    .meta("terms", a.terms);
    for m in 1..=a.m_max {
        let approx = classical_approx(m, a.terms);
        let exact = euler_exact(&BipartiteGraph::path(m)?)?;
        t.push(vec![
            json!(m),
            text(&exact),
            text(approx),
            num(approx.rel_err(&exact)),
        ]);
    }
    Ok(t)
}

fn cmd_report(a: &ReportArgs) -> Result<String> {
    let settings = match &a.from_manifest {
        Some(path) => report::Manifest::load(path)?.settings,
        None => report::Settings {
            families: a.families.clone(),
            m_max: a.m_max,
            roots: a.roots,
            steps_per_unit: a.steps,
            scan_points: a.scan_points,
            stride: a.stride,
        },
    };
    let out = a.out.clone().unwrap_or_else(|| {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        PathBuf::from(format!("report-{secs}"))
    });
    let manifest = report::run(&settings, &out)?;
    let mut t = Table::new("report", &["file", "bytes", "sha256"]).meta("directory", out.display());
    for f in &manifest.files {
        t.push(vec![text(&f.name), json!(f.bytes), text(&f.sha256)]);
    }
    Ok(t.to_csv())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("EULER_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("EULER_THREADS=`{v}` is not a count"))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    let json = cli.json;
    let (body, ok) = match &cli.command {
        Command::Exact(a) => (cmd_exact(a)?.render(json), true),
        Command::Spectrum(a) => (cmd_spectrum(a)?, true),
        Command::Scan(a) => (cmd_scan(a)?.render(json), true),
        Command::Comb(a) => (cmd_comb(a, json)?, true),
        Command::Grid2(a) => (cmd_grid2(a, json)?, true),
        Command::Classical(a) => (cmd_classical(a)?.render(json), true),
        Command::Compare(a) => {
            let (t, ok) = tables::compare_table(a.family.into(), a.m_max, a.roots, a.steps)?;
            (t.render(json), ok)
        }
        Command::Report(a) => (cmd_report(a)?, true),
    };
    print!("{body}");
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
