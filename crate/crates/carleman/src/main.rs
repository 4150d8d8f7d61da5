use std::path::PathBuf;
use std::process::ExitCode;

use carleman::pipeline::{self, exit};
use carleman::RunConfig;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "carleman", version, about = "Certified finite-stage boundary approximation runs")]
struct Cli {
    /// Worker threads for probe-parallel work.
    #[arg(long, global = true, env = "CARLEMAN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the chaplet and run the approximation stages.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute density and approach certificates for a built run.
    Verify {
        #[arg(long)]
        run: PathBuf,
        /// Probe angles in radians, overriding the configured ones.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        probes: Option<Vec<f64>>,
    },
    /// Print a summary of a run directory.
    Report {
        #[arg(long)]
        run: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(exit::HARD as u8);
        }
    }
    let code = match execute(cli.cmd) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit::HARD
        }
    };
    ExitCode::from(code as u8)
}

fn execute(cmd: Cmd) -> anyhow::Result<i32> {
    match cmd {
        Cmd::Build { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let out = match (out, &cfg.out_dir) {
                (Some(o), _) => o,
                (None, Some(o)) => PathBuf::from(o),
                (None, None) => anyhow::bail!("no output directory: pass --out or set outDir"),
            };
            let res = pipeline::build(&cfg, &out)?;
            if !res.infeasible.is_empty() {
                eprintln!("budget infeasible at stages {:?}", res.infeasible);
            }
            Ok(res.code)
        }
        Cmd::Verify { run, probes } => pipeline::verify(&run, probes),
        Cmd::Report { run } => {
            print!("{}", pipeline::report(&run)?);
            Ok(exit::OK)
        }
    }
}
