//! Command-line front end: graph measurements, certified paths,
//! verification suites, and DOT/CSV exports.
//!
//! Exit codes: 0 success, 1 usage or failed checks, 2 guard exceeded,
//! 3 central input, 4 prime modulus (no constructive path there).

use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use commgraph::{
    build_graph, component_suite, dets_identity_suite, export_graph, path3,
    path_exhaustive_suite, pmatrix_suite, units_suite, verify_path, DomainKind, DomainSpec,
    Error, ExportFormat, ModMatrix, PathCheck, TrialOutcome, DEFAULT_EXPORT_GUARD,
    DEFAULT_SCAN_GUARD, DEFAULT_VERTEX_GUARD,
};

#[derive(Parser)]
#[command(
    name = "commgraph",
    version,
    about = "Commuting graphs of matrix rings and groups over Z_m"
)]
struct Cli {
    /// Output mode: human-readable table or one key=value record per line.
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Table)]
    output: OutputMode,

    /// Guard override: enumeration elements for builds and scans, vertex
    /// count for exports.
    #[arg(long, global = true, env = "COMMGRAPH_GUARD")]
    guard: Option<u64>,

    /// Worker threads for the diameter sweep (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Table,
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    /// Full matrix ring M(n, Z_m).
    M,
    /// Invertible matrices GL(n, Z_m).
    Gl,
    /// Determinant-one matrices SL(n, Z_m).
    Sl,
}

impl DomainArg {
    fn kind(self) -> DomainKind {
        match self {
            DomainArg::M => DomainKind::MatrixRing,
            DomainArg::Gl => DomainKind::GeneralLinear,
            DomainArg::Sl => DomainKind::SpecialLinear,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    /// Determinant identity on random invertible pairs.
    Dets,
    /// Unit identity on random coprime tuples.
    Units,
    /// Exhaustive distance lower bound for the bidiagonal pair.
    Pmatrix,
    /// Isolated component over a prime modulus.
    Component,
    /// Certified paths for every ordered vertex pair.
    PathExhaustive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Dot,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build the commuting graph; report vertex count, components, diameter.
    Diameter {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        m: u64,
        #[arg(long, value_enum, default_value_t = DomainArg::M)]
        domain: DomainArg,
    },
    /// Construct a certified path of length <= 3 between two vertices.
    Path {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        m: u64,
        #[arg(long, value_enum, default_value_t = DomainArg::M)]
        domain: DomainArg,
        /// First endpoint: canonical text n:m:[entries] or encoded index.
        #[arg(long)]
        x: String,
        /// Second endpoint, same formats.
        #[arg(long)]
        y: String,
    },
    /// Run a verification suite; exit 0 only if every check passes.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        m: u64,
        #[arg(long, value_enum, default_value_t = DomainArg::M)]
        domain: DomainArg,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Write the graph as DOT or CSV to a file or stdout.
    Export {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        m: u64,
        #[arg(long, value_enum, default_value_t = DomainArg::M)]
        domain: DomainArg,
        #[arg(long, value_enum)]
        format: FormatArg,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            match &err {
                Error::PrimeModulus(_) => {
                    eprintln!("error: out of scope for constructive oracle: {err}")
                }
                _ => eprintln!("error: {err}"),
            }
            match err {
                Error::GuardExceeded { .. } => 2,
                Error::CentralInput(_) => 3,
                Error::PrimeModulus(_) => 4,
                _ => 1,
            }
        }
    };
    std::process::exit(code);
}

/// Domain label without spaces, safe inside key=value records.
fn compact(spec: DomainSpec) -> String {
    spec.to_string().replace(' ', "")
}

fn threads(cli: &Cli) -> usize {
    cli.threads.unwrap_or_else(|| {
        std::thread::available_parallelism().map(usize::from).unwrap_or(1)
    })
}

fn parse_matrix(text: &str, n: usize, m: u64) -> Result<ModMatrix, Error> {
    if text.contains(':') {
        ModMatrix::parse_text(text)
    } else {
        let idx: u128 = text
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("expected matrix text or index, got {text:?}")))?;
        ModMatrix::decode(n, m, idx)
    }
}

fn run(cli: &Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::Diameter { n, m, domain } => {
            let spec = DomainSpec::new(domain.kind(), *n, *m)?;
            let guard = cli.guard.unwrap_or(DEFAULT_VERTEX_GUARD);
            let start = Instant::now();
            let g = build_graph(spec, guard)?;
            let report = g.components();
            let diam = g.diameter(threads(cli))?;
            let diam_text = diam.map_or_else(|| "inf".to_string(), |d| d.to_string());
            match cli.output {
                OutputMode::Records => println!(
                    "record=diameter domain={} vertices={} components={} diameter={}",
                    compact(spec),
                    g.vertex_count(),
                    report.component_count,
                    diam_text
                ),
                OutputMode::Table => {
                    println!("domain:     {spec}");
                    println!("vertices:   {}", g.vertex_count());
                    println!("components: {}", report.component_count);
                    println!("diameter:   {diam_text}");
                    println!("elapsed:    {} ms", start.elapsed().as_millis());
                }
            }
            Ok(0)
        }
        Command::Path { n, m, domain, x, y } => {
            let spec = DomainSpec::new(domain.kind(), *n, *m)?;
            let guard = cli.guard.unwrap_or(DEFAULT_VERTEX_GUARD);
            let xm = parse_matrix(x, *n, *m)?;
            let ym = parse_matrix(y, *n, *m)?;
            let witness = path3(&xm, &ym, spec)?;
            let check = verify_path(&witness, guard);
            let bfs_text = match build_graph(spec, guard) {
                Ok(g) => match g.bfs_distance(&xm, &ym)? {
                    Some(d) => d.to_string(),
                    None => "inf".to_string(),
                },
                Err(Error::GuardExceeded { .. }) => "skipped".to_string(),
                Err(e) => return Err(e),
            };
            match cli.output {
                OutputMode::Records => {
                    let texts: Vec<String> =
                        witness.sequence().iter().map(|v| v.to_string()).collect();
                    println!(
                        "record=path domain={} len={} verified={} check={} bfs={} path={}",
                        compact(spec),
                        witness.len(),
                        witness.verified,
                        if check.is_pass() { "pass" } else { "fail" },
                        bfs_text,
                        texts.join("~")
                    );
                }
                OutputMode::Table => {
                    println!("path:  {witness}");
                    match &check {
                        PathCheck::Pass => println!("check: pass"),
                        PathCheck::Fail(defect) => println!("check: FAIL ({defect})"),
                    }
                    println!("bfs:   {bfs_text}");
                }
            }
            Ok(if check.is_pass() { 0 } else { 1 })
        }
        Command::Verify { suite, n, m, domain, trials, seed } => {
            let start = Instant::now();
            let outcome: TrialOutcome = match suite {
                SuiteArg::Dets => dets_identity_suite(*n, *m, *trials, *seed)?,
                SuiteArg::Units => units_suite(*trials, *seed, 64, 8)?,
                SuiteArg::Pmatrix => {
                    pmatrix_suite(*n, *m, cli.guard.unwrap_or(DEFAULT_SCAN_GUARD))?
                }
                SuiteArg::Component => {
                    component_suite(*m, cli.guard.unwrap_or(DEFAULT_VERTEX_GUARD))?
                }
                SuiteArg::PathExhaustive => path_exhaustive_suite(
                    domain.kind(),
                    *n,
                    *m,
                    cli.guard.unwrap_or(DEFAULT_VERTEX_GUARD),
                )?,
            };
            let name = match suite {
                SuiteArg::Dets => "dets",
                SuiteArg::Units => "units",
                SuiteArg::Pmatrix => "pmatrix",
                SuiteArg::Component => "component",
                SuiteArg::PathExhaustive => "path-exhaustive",
            };
            match cli.output {
                OutputMode::Records => println!(
                    "record=suite suite={} trials={} failures={} status={}",
                    name,
                    outcome.trials,
                    outcome.failures,
                    if outcome.passed() { "pass" } else { "fail" }
                ),
                OutputMode::Table => {
                    println!("suite:   {name}");
                    println!("result:  {outcome}");
                    println!("elapsed: {} ms", start.elapsed().as_millis());
                }
            }
            Ok(if outcome.passed() { 0 } else { 1 })
        }
        Command::Export { n, m, domain, format, out } => {
            let spec = DomainSpec::new(domain.kind(), *n, *m)?;
            let build_guard = cli.guard.unwrap_or(DEFAULT_VERTEX_GUARD);
            let export_guard = cli.guard.unwrap_or(DEFAULT_EXPORT_GUARD);
            let g = build_graph(spec, build_guard)?;
            let fmt = match format {
                FormatArg::Dot => ExportFormat::Dot,
                FormatArg::Csv => ExportFormat::Csv,
            };
            let bytes = export_graph(&g, fmt, export_guard)?;
            match out {
                Some(path) => {
                    std::fs::write(path, &bytes)?;
                    match cli.output {
                        OutputMode::Records => println!(
                            "record=export domain={} format={} bytes={} path={}",
                            compact(spec),
                            if *format == FormatArg::Dot { "dot" } else { "csv" },
                            bytes.len(),
                            path.display()
                        ),
                        OutputMode::Table => {
                            println!("wrote {} ({} bytes)", path.display(), bytes.len())
                        }
                    }
                }
                None => std::io::stdout().write_all(&bytes)?,
            }
            Ok(0)
        }
    }
}
