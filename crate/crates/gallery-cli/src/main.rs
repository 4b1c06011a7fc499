//! Command-line front end: solve art gallery instances, run the standalone
//! CSP solver, generate random polygons, render SVG figures.
//!
//! Exit codes: 0 Yes/satisfiable, 1 No/unsatisfiable, 2 parse or validation
//! error, 3 oracle disagreement.

mod report;
mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use gallery_core::csp::{parse_csp, solve_csp, write_csp, CspOutcome};
use gallery_core::geom::{parse_polygon, vertex_visibility, write_polygon, Polygon};
use gallery_core::oracle::{brute_force_problem, random_polygon, OracleCaps, PolygonSpec};
use gallery_core::structured::{solve_with_vis, Problem, SolveOptions, SolveRun, Variant};

use report::{ReportFormat, RunReport};

#[derive(Parser)]
#[command(name = "gallery", version, about = "Exact art gallery solver, FPT in reflex vertices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a guarding instance.
    Solve(SolveArgs),
    /// Solve a monotone 2-CSP instance file.
    Csp(CspArgs),
    /// Generate a random simple polygon.
    Gen(GenArgs),
    /// Render a polygon (and optional guards) as SVG.
    Viz(VizArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Polygon file.
    #[arg(long)]
    polygon: PathBuf,
    /// Guard budget.
    #[arg(long)]
    k: usize,
    /// Problem variant: vv, vb or bv.
    #[arg(long)]
    variant: Variant,
    /// Report the smallest k that admits a solution instead of deciding k.
    #[arg(long)]
    min_k: bool,
    /// Cross-check against the brute-force oracle; exit 3 on disagreement.
    #[arg(long)]
    oracle: bool,
    /// Write an SVG of the result.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Dump every built CSP instance into this directory.
    #[arg(long)]
    dump_csp: Option<PathBuf>,
    /// Report format.
    #[arg(long, default_value = "text")]
    report: ReportFormat,
    /// Worker threads for guess evaluation (or GALLERY_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    /// Print a guess counter to stderr while solving.
    #[arg(long)]
    progress: bool,
}

#[derive(Args)]
struct CspArgs {
    /// CSP instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Report format.
    #[arg(long, default_value = "text")]
    report: ReportFormat,
}

#[derive(Args)]
struct GenArgs {
    /// Vertex count.
    #[arg(long)]
    n: usize,
    /// RNG seed.
    #[arg(long)]
    seed: u64,
    /// Desired reflex vertex count (best effort).
    #[arg(long)]
    reflex: Option<usize>,
    /// Output polygon file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VizArgs {
    /// Polygon file.
    #[arg(long)]
    polygon: PathBuf,
    /// Comma-separated 1-based vertex ids to highlight as guards.
    #[arg(long)]
    guards: Option<String>,
    /// Draw visibility segments from each guard.
    #[arg(long)]
    rays: bool,
    /// Output SVG file.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Csp(args) => cmd_csp(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Viz(args) => cmd_viz(args),
    };
    match code {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_polygon(path: &PathBuf) -> Result<Polygon, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_polygon(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn thread_count(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("GALLERY_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, String> {
    let poly = read_polygon(&args.polygon)?;
    let problem = Problem::build(&poly, args.variant).map_err(|e| e.to_string())?;
    let vis = vertex_visibility(&problem.work);
    let threads = thread_count(args.threads);
    let started = Instant::now();

    if let Some(dir) = &args.dump_csp {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }

    let mut total_tried = 0u64;
    let mut solve_at = |k: usize| -> Result<SolveRun, String> {
        let mut dump_error: Option<String> = None;
        let mut dump = |ordinal: u64, csp: &gallery_core::csp::CspInstance| {
            let dir = args.dump_csp.as_ref().unwrap();
            let path = dir.join(format!("guess-{ordinal:06}.csp"));
            if let Err(e) = fs::write(&path, write_csp(csp)) {
                dump_error = Some(format!("{}: {e}", path.display()));
            }
        };
        let mut progress = |tried: u64| {
            eprintln!("guesses tried: {tried}");
        };
        let opts = SolveOptions {
            threads,
            on_instance: args.dump_csp.as_ref().map(|_| &mut dump as &mut dyn FnMut(u64, &_)),
            progress: args.progress.then_some(&mut progress as &mut dyn FnMut(u64)),
        };
        let run = solve_with_vis(&problem, k, vis.clone(), opts).map_err(|e| e.to_string())?;
        if let Some(e) = dump_error {
            return Err(e);
        }
        total_tried += run.guesses_tried;
        Ok(run)
    };

    let (k_reported, run) = if args.min_k {
        let upper = problem.work.reflex_count().max(1);
        let mut found: Option<(usize, SolveRun)> = None;
        for k in 0..=upper {
            let run = solve_at(k)?;
            if run.is_yes() {
                found = Some((k, run));
                break;
            }
        }
        match found {
            Some(hit) => hit,
            None => (upper, SolveRun { solution: None, guesses_tried: 0 }),
        }
    } else {
        let run = solve_at(args.k)?;
        (args.k, run)
    };

    if args.oracle {
        let caps = OracleCaps::default();
        let oracle = brute_force_problem(&problem, &vis, k_reported, &caps)
            .map_err(|e| e.to_string())?;
        if oracle.is_yes() != run.is_yes() {
            eprintln!(
                "oracle disagreement: solver says {}, brute force says {}",
                if run.is_yes() { "yes" } else { "no" },
                if oracle.is_yes() { "yes" } else { "no" }
            );
            return Ok(ExitCode::from(3));
        }
    }

    let elapsed_ms = started.elapsed().as_millis() as u64;
    let guards = run.solution.as_ref().map(|s| s.guards.as_slice());
    let report = RunReport::new(
        args.variant,
        k_reported,
        guards,
        &problem.work,
        total_tried,
        elapsed_ms,
    );
    report.print(args.report);

    if let Some(path) = &args.svg {
        let image = svg::render(&problem.work, guards.unwrap_or(&[]), true);
        fs::write(path, image).map_err(|e| format!("{}: {e}", path.display()))?;
    }

    Ok(ExitCode::from(u8::from(!run.is_yes())))
}

fn cmd_csp(args: CspArgs) -> Result<ExitCode, String> {
    let text = fs::read_to_string(&args.instance)
        .map_err(|e| format!("{}: {e}", args.instance.display()))?;
    let inst = parse_csp(&text).map_err(|e| e.to_string())?;
    match solve_csp(&inst).map_err(|e| e.to_string())? {
        CspOutcome::Satisfiable(alpha) => {
            match args.report {
                ReportFormat::Json => {
                    println!(
                        "{}",
                        serde_json::json!({ "answer": "satisfiable", "assignment": alpha })
                    );
                }
                ReportFormat::Text => {
                    let rendered: Vec<String> = alpha
                        .iter()
                        .enumerate()
                        .map(|(i, v)| format!("x{i}={v}"))
                        .collect();
                    println!("satisfiable: {}", rendered.join(" "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        CspOutcome::Unsatisfiable => {
            match args.report {
                ReportFormat::Json => {
                    println!("{}", serde_json::json!({ "answer": "unsatisfiable" }));
                }
                ReportFormat::Text => println!("unsatisfiable"),
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, String> {
    if args.n < 3 {
        return Err("n must be at least 3".into());
    }
    let spec = PolygonSpec {
        n: args.n,
        target_reflex: args.reflex,
        seed: args.seed,
    };
    let poly = random_polygon(&spec).map_err(|e| e.to_string())?;
    fs::write(&args.out, write_polygon(&poly))
        .map_err(|e| format!("{}: {e}", args.out.display()))?;
    println!("r: {}", poly.reflex_count());
    Ok(ExitCode::SUCCESS)
}

fn cmd_viz(args: VizArgs) -> Result<ExitCode, String> {
    let poly = read_polygon(&args.polygon)?;
    let guards: Vec<usize> = match &args.guards {
        None => Vec::new(),
        Some(list) => list
            .split(',')
            .map(|t| {
                let id: usize = t
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad guard id `{t}`"))?;
                if id == 0 || id > poly.n() {
                    return Err(format!("guard id {id} out of range 1..={}", poly.n()));
                }
                Ok(id)
            })
            .collect::<Result<_, _>>()?,
    };
    let image = svg::render(&poly, &guards, args.rays);
    fs::write(&args.out, image).map_err(|e| format!("{}: {e}", args.out.display()))?;
    Ok(ExitCode::SUCCESS)
}
