mod build;
mod commands;
mod config;
mod fail;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{DehnArgs, VerifyArgs};
use crate::config::{Caps, CoefficientSource, PipelineConfig, UnderlyingSource};
use crate::fail::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "rscancel", version, about = "Graphical small cancellation over the free group on a, b")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build Γ from coefficients and an underlying graph, certify it and
    /// write report.json, gamma.json, gamma.dot, presentation.txt and
    /// witnesses.json.
    Build(BuildArgs),
    /// Run the small cancellation criterion on a labeled graph.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "1/6")]
        lambda: String,
    },
    /// Check that A and B embed and that witnesses keep their
    /// factorizations unique in the quotient.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        witnesses: PathBuf,
        #[arg(long, default_value = "1/6")]
        lambda: String,
        #[arg(long, default_value_t = 6)]
        relator_cap: usize,
        /// Build the relator index even when the criterion does not
        /// certify λ ≤ 1/6; group verdicts are then conditional.
        #[arg(long = "unsafe")]
        allow_unsafe: bool,
        #[arg(long, default_value_t = 2000)]
        max_pairs: usize,
        #[arg(long, env = config::SEED_ENV, default_value_t = 0)]
        seed: u64,
    },
    /// Dehn's algorithm on one word; prints a JSON-lines trace.
    Dehn {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "1/6")]
        lambda: String,
        /// Relator cap; defaults to what makes the verdict definitive.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long = "unsafe")]
        allow_unsafe: bool,
    },
    /// Monte Carlo estimates for random presentations and graphs.
    #[command(subcommand)]
    Genericity(Genericity),
    #[command(subcommand)]
    Coefficients(Coefficients),
    #[command(subcommand)]
    Underlying(Underlying),
}

#[derive(Args)]
struct BuildArgs {
    /// TOML configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `instructive` for the three-vertex example.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    coefficients: Option<PathBuf>,
    /// Rows of the power-of-ten coefficient table.
    #[arg(long, value_delimiter = ',')]
    rows: Option<Vec<u32>>,
    #[arg(long)]
    underlying: Option<PathBuf>,
    /// `pg27`: incidence graph of the projective plane of order 7.
    #[arg(long)]
    underlying_preset: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    girth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    attempts: Option<usize>,
    #[arg(long)]
    cycle_cap: Option<usize>,
    #[arg(long)]
    relator_cap: Option<usize>,
}

#[derive(Subcommand)]
enum Genericity {
    /// Probability that some relator of a random n-relator presentation
    /// contains a Rips-Segev pattern; CSV per t.
    FewRelator {
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, env = config::SEED_ENV, default_value_t = 0)]
        seed: u64,
        /// Append the exact probability column.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probability that a randomly labeled subdivision reads a pattern of
    /// the given length; CSV per threshold.
    Graphical {
        /// Base graph as JSON `{"n": .., "edges": [[u, v], ..]}`.
        #[arg(long, conflicts_with = "cycle")]
        delta: Option<PathBuf>,
        /// Use the cycle on this many vertices as the base graph.
        #[arg(long)]
        cycle: Option<usize>,
        #[arg(long)]
        j: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        threshold: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, env = config::SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Coefficients {
    /// Run the distinctness check on a coefficient file.
    Check {
        #[arg(long)]
        file: PathBuf,
    },
    /// Power-of-ten coefficients for the given rows, or rows 1..=count.
    Generate {
        #[arg(long, value_delimiter = ',', conflicts_with = "count")]
        rows: Option<Vec<u32>>,
        #[arg(long)]
        count: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Underlying {
    /// Random 8-regular multigraph with the four-permutation structure.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        girth: usize,
        #[arg(long, env = config::SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        attempts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate an underlying graph file and report its girth.
    Load {
        #[arg(long)]
        file: PathBuf,
    },
}

fn build(args: BuildArgs) -> CliResult<ExitCode> {
    let file = match &args.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let flags = PipelineConfig {
        preset: args.preset,
        lambda: args.lambda,
        out: args.out,
        coefficients: CoefficientSource { file: args.coefficients, rows: args.rows },
        underlying: UnderlyingSource {
            file: args.underlying,
            preset: args.underlying_preset,
            n: args.n,
            girth: args.girth,
            seed: args.seed,
            attempts: args.attempts,
        },
        caps: Caps { cycle: args.cycle_cap, relator: args.relator_cap, dehn: None },
    };
    let cfg = config::resolve(&file.overlay(flags))?;
    let artifacts = build::run(&cfg)?;
    build::write_artifacts(&artifacts, &cfg.out)?;
    let r = &artifacts.report;
    if let Some(rs) = &r.rs_condition {
        println!("distinctness condition: {}", if rs.pass { "pass" } else { "FAIL" });
        if let Some(reason) = rs.reason() {
            println!("  {reason}");
        }
    }
    if let Some(sc) = &r.small_cancellation {
        let value = sc.criterion_value.map_or("unbounded".into(), |v| v.to_string());
        println!(
            "Λ = {}, γ = {}, (Λ+2)/γ = {value}, C'({}): {}",
            sc.lambda_piece,
            sc.gamma.map_or("∞".into(), |g| g.to_string()),
            sc.lambda,
            if sc.certified() { "certified" } else { "not certified" }
        );
    }
    if let Some(w) = &r.witnesses {
        println!("witnesses: {} ({} unique in F), structural check {}", w.count, w.unique_in_f, if w.structural_pass { "pass" } else { "FAIL" });
    }
    println!("artifacts written to {}", cfg.out.display());
    let rs_ok = r.rs_condition.as_ref().is_none_or(|c| c.pass);
    if r.structural_ok && rs_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CliError::structural("build did not pass its structural checks; see report.json"))
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Build(args) => build(args),
        Command::Check { graph, lambda } => {
            let r = commands::check(&graph, commands::lambda(&lambda)?)?;
            commands::print_json(&r);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { graph, witnesses, lambda, relator_cap, allow_unsafe, max_pairs, seed } => {
            let r = commands::verify(&VerifyArgs {
                graph: &graph,
                witnesses: &witnesses,
                lambda: commands::lambda(&lambda)?,
                relator_cap,
                allow_unsafe,
                max_pairs,
                seed,
            })?;
            commands::print_json(&r);
            for c in &r.clauses {
                let cond = if c.conditional { " (conditional)" } else { "" };
                eprintln!("{}: {}{cond}: {}", c.status, c.clause, c.detail);
            }
            if r.clauses.iter().any(|c| c.status == "FAIL") {
                Err(CliError::structural("verification failed"))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Dehn { word, graph, lambda, cap, allow_unsafe } => {
            let args = DehnArgs { word: &word, graph: &graph, lambda: commands::lambda(&lambda)?, cap, allow_unsafe };
            commands::dehn(&args, &mut std::io::stdout().lock())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Genericity(Genericity::FewRelator { t, n, trials, seed, exact, out }) => {
            if n == 0 || trials == 0 {
                return Err(CliError::usage("--n and --trials must be positive"));
            }
            commands::few_relator(&t, n, trials, seed, exact, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Genericity(Genericity::Graphical { delta, cycle, j, threshold, trials, seed, out }) => {
            let base = match (delta, cycle) {
                (Some(p), _) => commands::load_base_graph(&p)?,
                (None, Some(n)) if n >= 1 => rscancel::genericity::BaseGraph::cycle(n),
                _ => return Err(CliError::usage("give --delta FILE or --cycle N")),
            };
            if j == 0 || trials == 0 {
                return Err(CliError::usage("--j and --trials must be positive"));
            }
            commands::graphical(base, j, &threshold, trials, seed, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Coefficients(Coefficients::Check { file }) => {
            let r = commands::coefficients_check(&file)?;
            commands::print_json(&r);
            if r.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Err(CliError::structural(r.reason().unwrap_or_else(|| "distinctness condition fails".into())))
            }
        }
        Command::Coefficients(Coefficients::Generate { rows, count, out }) => {
            let rows = match (rows, count) {
                (Some(r), _) => r,
                (None, Some(c)) => (1..=c).collect(),
                (None, None) => return Err(CliError::usage("give --rows or --count")),
            };
            commands::coefficients_generate(&rows, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Underlying(Underlying::Generate { n, girth, seed, attempts, out }) => {
            commands::underlying_generate(n, girth, seed, attempts, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Underlying(Underlying::Load { file }) => {
            commands::print_json(&commands::underlying_load(&file)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
