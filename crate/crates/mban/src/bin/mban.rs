//! Command-line surface: generators, verifier, enumerator, and inspection
//! tools behind one binary. JSON goes to standard output, diagnostics to
//! standard error. Exit codes: 0 = success / solver, 1 = verified
//! non-solver, 2 = usage or domain error.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use mban::enumerate::{self, CensusOptions, UniverseOptions};
use mban::families::{FamilyKind, FamilySpec};
use mban::report::{self, InputDigest, RunManifest};
use mban::verify;
use mban::{default_max_steps, Configuration, Digraph, GraphFormat, MajorityNetwork};

#[derive(Parser)]
#[command(name = "mban", version, about = "Majority Boolean automata network toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
    Edges,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => GraphFormat::Json,
            FormatArg::Dot => GraphFormat::Dot,
            FormatArg::Edges => GraphFormat::Edges,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named network family.
    Gen {
        /// One of: complete, cycle, generated, complete-cycle, left-right,
        /// circle-triangle, two-cycles.
        family: String,
        /// Node count (derived from --inner for `generated`).
        #[arg(long)]
        n: Option<usize>,
        /// Cross point for `two-cycles`; defaults to the smallest legal value.
        #[arg(long)]
        cross: Option<usize>,
        /// Inner graph file for `generated`.
        #[arg(long)]
        inner: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a network solves the density classification task.
    Verify {
        graph: PathBuf,
        /// Sweep all 2^n configurations (the default mode).
        #[arg(long)]
        exhaustive: bool,
        /// Check this many stratified samples instead of sweeping.
        #[arg(long, conflicts_with = "exhaustive")]
        samples: Option<u64>,
        /// Sampling seed (sampled mode only).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to the available cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Per-orbit step budget in sampled mode.
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the orbit of one configuration step by step.
    Evolve {
        graph: PathBuf,
        /// Initial configuration as a '0'/'1' string, automaton 0 leftmost.
        #[arg(long)]
        init: String,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Count solver networks of size n, up to isomorphism.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        jobs: Option<usize>,
        /// Omit the per-class code listing from the report.
        #[arg(long)]
        count_only: bool,
        /// Persist progress to this file and resume from it if present.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Restrict the universe to graphs without self-loops.
        #[arg(long)]
        no_self_loops: bool,
        /// Restrict the universe to graphs with odd in-degrees only.
        #[arg(long)]
        odd_degrees_only: bool,
        /// Restrict the universe to weakly connected graphs.
        #[arg(long)]
        weakly_connected: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Network metrics plus the per-density convergence profile.
    Stats {
        graph: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    });
}

struct Run {
    started: Instant,
    command: String,
    inputs: Vec<InputDigest>,
    seed: Option<u64>,
    jobs: usize,
}

impl Run {
    fn new() -> Self {
        Self {
            started: Instant::now(),
            command: std::env::args().collect::<Vec<_>>().join(" "),
            inputs: Vec::new(),
            seed: None,
            jobs: rayon::current_num_threads(),
        }
    }

    fn manifest(&self) -> RunManifest {
        RunManifest {
            command: self.command.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            jobs: self.jobs,
            inputs: self.inputs.clone(),
            wall_ms: self.started.elapsed().as_millis() as u64,
        }
    }

    fn read_graph(&mut self, path: &Path) -> Result<Digraph, String> {
        let bytes =
            std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        self.inputs
            .push(InputDigest::of(&path.display().to_string(), &bytes));
        let text = String::from_utf8(bytes)
            .map_err(|_| format!("{} is not valid UTF-8", path.display()))?;
        Digraph::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Gen {
            family,
            n,
            cross,
            inner,
            format,
            out,
        } => cmd_gen(family, n, cross, inner, format, out),
        Command::Verify {
            graph,
            exhaustive,
            samples,
            seed,
            jobs,
            max_steps,
            out,
        } => {
            let _ = exhaustive; // the default mode; flag kept for explicitness
            cmd_verify(graph, samples, seed, jobs, max_steps, out)
        }
        Command::Evolve {
            graph,
            init,
            max_steps,
        } => cmd_evolve(graph, init, max_steps),
        Command::Enumerate {
            n,
            jobs,
            count_only,
            resume,
            no_self_loops,
            odd_degrees_only,
            weakly_connected,
            out,
        } => {
            let universe = UniverseOptions {
                no_self_loops,
                odd_degrees_only,
                weakly_connected,
            };
            cmd_enumerate(n, jobs, count_only, resume, universe, out)
        }
        Command::Stats { graph, jobs, out } => cmd_stats(graph, jobs, out),
    }
}

/// Runs `body` inside a thread pool of the requested size, recording the
/// effective worker count in the manifest.
fn with_jobs<T>(
    run: &mut Run,
    jobs: Option<usize>,
    body: impl FnOnce() -> T + Send,
) -> Result<T, String>
where
    T: Send,
{
    match jobs {
        None => Ok(body()),
        Some(0) => Err("--jobs must be at least 1".into()),
        Some(k) => {
            run.jobs = k;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| format!("cannot build thread pool: {e}"))?;
            Ok(pool.install(body))
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(doc: serde_json::Value, out: Option<&Path>) -> Result<(), String> {
    emit(&format!("{doc}\n"), out)
}

fn cmd_gen(
    family: String,
    n: Option<usize>,
    cross: Option<usize>,
    inner: Option<PathBuf>,
    format: FormatArg,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let mut run = Run::new();
    let kind = FamilyKind::from_name(&family).map_err(|e| e.to_string())?;
    let spec = if kind == FamilyKind::Generated {
        let path = inner.ok_or("family `generated` requires --inner FILE")?;
        let inner_graph = run.read_graph(&path)?;
        let derived = 2 * inner_graph.n() + 1;
        if let Some(n) = n {
            if n != derived {
                return Err(format!(
                    "--n {n} contradicts the {}-node inner graph (expands to {derived})",
                    inner_graph.n()
                ));
            }
        }
        FamilySpec {
            kind,
            n: derived,
            cross_point: None,
            inner: Some(inner_graph),
        }
    } else {
        FamilySpec {
            kind,
            n: n.ok_or("--n is required")?,
            cross_point: cross,
            inner: None,
        }
    };
    let graph = spec.build().map_err(|e| e.to_string())?;
    let mut text = graph.to_format(format.into());
    if !text.ends_with('\n') {
        text.push('\n');
    }
    emit(&text, out.as_deref())?;
    Ok(0)
}

fn cmd_verify(
    graph: PathBuf,
    samples: Option<u64>,
    seed: Option<u64>,
    jobs: Option<usize>,
    max_steps: Option<u64>,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let mut run = Run::new();
    let g = run.read_graph(&graph)?;
    let net = MajorityNetwork::new(g);
    let verdict = match samples {
        Some(k) => {
            let seed = seed.unwrap_or(0);
            run.seed = Some(seed);
            let budget = max_steps.unwrap_or_else(|| default_max_steps(net.n()));
            with_jobs(&mut run, jobs, || {
                verify::verify_dct_sampled_bounded(&net, k, seed, budget)
            })?
        }
        None => with_jobs(&mut run, jobs, || verify::verify_dct_exhaustive(&net))?,
    }
    .map_err(|e| e.to_string())?;
    let exit = if verdict.solves { 0 } else { 1 };
    let doc = report::with_manifest(report::verdict_payload(&verdict), &run.manifest());
    emit_json(doc, out.as_deref())?;
    Ok(exit)
}

fn cmd_evolve(graph: PathBuf, init: String, max_steps: Option<u64>) -> Result<i32, String> {
    let mut run = Run::new();
    let g = run.read_graph(&graph)?;
    let net = MajorityNetwork::new(g);
    let x = Configuration::from_text(&init).map_err(|e| e.to_string())?;
    let budget = max_steps.unwrap_or_else(|| default_max_steps(net.n()));
    let outcome = net.evolve(&x, budget).map_err(|e| e.to_string())?;
    let mut cur = x;
    for _ in 0..outcome.transient + outcome.cycle_length {
        println!("{cur}");
        cur = net.step(&cur).map_err(|e| e.to_string())?;
    }
    println!(
        "transient={} cycle={}",
        outcome.transient, outcome.cycle_length
    );
    Ok(0)
}

fn cmd_enumerate(
    n: usize,
    jobs: Option<usize>,
    count_only: bool,
    resume: Option<PathBuf>,
    universe: UniverseOptions,
    out: Option<PathBuf>,
) -> Result<i32, String> {
    let mut run = Run::new();
    let options = CensusOptions {
        universe,
        allow_large: false,
        resume_path: resume,
    };
    let census = with_jobs(&mut run, jobs, || enumerate::enumerate_solvers(n, &options))?
        .map_err(|e| e.to_string())?;
    let doc = report::with_manifest(
        report::census_payload(&census, !count_only),
        &run.manifest(),
    );
    emit_json(doc, out.as_deref())?;
    Ok(0)
}

fn cmd_stats(graph: PathBuf, jobs: Option<usize>, out: Option<PathBuf>) -> Result<i32, String> {
    let mut run = Run::new();
    let g = run.read_graph(&graph)?;
    let metrics = g.metrics();
    let n = g.n();
    let net = MajorityNetwork::new(g);
    let profile = if n % 2 == 1 && n <= verify::DEFAULT_EXHAUSTIVE_MAX_N {
        Some(
            with_jobs(&mut run, jobs, || verify::convergence_profile(&net))?
                .map_err(|e| e.to_string())?,
        )
    } else {
        eprintln!(
            "note: convergence profile omitted (needs odd n <= {})",
            verify::DEFAULT_EXHAUSTIVE_MAX_N
        );
        None
    };
    let doc = report::with_manifest(
        report::stats_payload(n, &metrics, profile.as_ref()),
        &run.manifest(),
    );
    emit_json(doc, out.as_deref())?;
    Ok(0)
}
