//! `hpfn`: build, relax and inspect hopfion fields.
//!
//! Every command prints a JSON report on stdout. Exit codes: 0 success,
//! 1 bad input or configuration, 2 numerical failure, 3 I/O failure.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use commands::{ExportFormat, GlSource, RelaxInput};
use config::{parse_value, Boundary, ProfileName, RunConfig, StencilName};
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "hpfn", version, about = "Lattice solver for Faddeev-model hopfions")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "HPFN_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "HPFN_WORKERS")]
    workers: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a rational-map ansatz field.
    Init(InitArgs),
    /// Minimize the energy by gradient flow.
    Relax(RelaxArgs),
    /// Hopf charge by both evaluators.
    Charge {
        field: PathBuf,
    },
    /// Trace preimage lines of the given target values.
    Trace {
        field: PathBuf,
        /// Target value `x,y,z`; repeat for several lines.
        #[arg(long = "value", value_parser = parse_value, required = true, allow_hyphen_values = true)]
        values: Vec<[f64; 3]>,
        #[arg(long, default_value = "preimage")]
        name: String,
    },
    /// Convert a field container.
    Export {
        field: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long, default_value = "export")]
        name: String,
    },
    /// Check the Ginzburg-Landau reparameterization identity and gauge
    /// invariance.
    Glcheck {
        /// Seven-component GL containers.
        files: Vec<PathBuf>,
        /// Check this many seeded random fields instead.
        #[arg(long, conflicts_with = "files")]
        random: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct InitArgs {
    #[arg(long, default_value = "init")]
    name: String,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i32>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long, value_enum)]
    boundary: Option<Boundary>,
    #[arg(long, value_enum)]
    profile: Option<ProfileName>,
    #[arg(long)]
    perturbation: Option<f64>,
}

#[derive(Args, Debug)]
struct RelaxArgs {
    /// Initial field.
    #[arg(required_unless_present = "resume")]
    field: Option<PathBuf>,
    /// Continue from a checkpoint stem (`<stem>.hpfn` plus `<stem>.json`).
    #[arg(long, conflicts_with = "field")]
    resume: Option<PathBuf>,
    #[arg(long, default_value = "relax")]
    name: String,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    checkpoint_every: Option<usize>,
    #[arg(long, value_enum)]
    stencil: Option<StencilName>,
}

fn print_json(value: &impl Serialize) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.out.is_some() {
        cfg.output.dir = cli.out.clone();
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(w) = cli.workers.or(cfg.workers) {
        if w == 0 {
            return Err(CliError::Validation("workers must be at least 1".into()));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }

    match cli.command {
        Command::Init(args) => {
            let InitArgs { name, m, k, nodes, half_width, boundary, profile, perturbation } = args;
            let a = &mut cfg.ansatz;
            a.m = m.or(a.m);
            a.k = k.or(a.k);
            a.profile = profile.or(a.profile);
            a.perturbation = perturbation.or(a.perturbation);
            let g = &mut cfg.grid;
            g.nodes = nodes.or(g.nodes);
            g.half_width = half_width.or(g.half_width);
            g.boundary = boundary.or(g.boundary);
            print_json(&commands::init(&cfg, &name)?)?;
        }
        Command::Relax(args) => {
            let r = &mut cfg.relax;
            r.max_steps = args.max_steps.or(r.max_steps);
            r.checkpoint_every = args.checkpoint_every.or(r.checkpoint_every);
            r.stencil = args.stencil.or(r.stencil);
            let input = match (&args.field, &args.resume) {
                (_, Some(stem)) => RelaxInput::Resume(stem),
                (Some(f), None) => RelaxInput::Field(f),
                (None, None) => return Err(CliError::Validation("need a field or --resume".into())),
            };
            let report = commands::relax(&cfg, input, &args.name)?;
            print_json(&report)?;
            if report.failed() {
                eprintln!("relaxation ended with status {:?}", report.status);
                return Ok(ExitCode::from(2));
            }
        }
        Command::Charge { field } => print_json(&commands::charge(&cfg, &field)?)?,
        Command::Trace { field, values, name } => print_json(&commands::trace(&cfg, &field, &values, &name)?)?,
        Command::Export { field, format, name } => {
            let out = commands::export(&cfg, &field, format, &name)?;
            print_json(&serde_json::json!({ "output": out }))?;
        }
        Command::Glcheck { files, random } => {
            let source = match random {
                Some(count) => GlSource::Random { count },
                None => GlSource::Files(&files),
            };
            print_json(&commands::glcheck(&cfg, source)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
