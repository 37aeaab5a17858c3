use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use posmap_cli::pipeline::{
    self, ClassifyOptions, ConeCommand, ConeOptions, ModularOptions, WeakDecOptions,
};
use posmap_cli::report::Report;
use posmap_cli::{exit, exit_code};
use posmap_core::par::Exec;
use posmap_core::{Error, Result};

/// Positivity, decomposability and modular-theory checks for linear maps
/// between matrix algebras.
#[derive(Parser)]
#[command(name = "posmap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every positivity and decomposability test on a map document.
    Classify {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        projections: usize,
        #[arg(long, default_value_t = 2)]
        witness_restarts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Check the modular identities on random or supplied faithful states.
    ModularVerify {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cone_samples: usize,
        #[arg(long)]
        rho_file: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Self-dual cone operations on a bipartite vector document.
    Cone {
        #[command(subcommand)]
        command: ConeSub,
    },
    /// Re-evaluate every witness in a report without searching.
    Verify { report: PathBuf },
}

#[derive(Subcommand)]
enum ConeSub {
    /// Membership in P, P^τ and their intersection.
    Member {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Split into the P and Q components.
    Pq {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sampled inequalities characterizing P ∩ P^τ.
    Prop64 {
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        eta_samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Agreement of the three descriptions of Qξ = 0.
    Prop65 {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Polar form of Qξ for a two-level second factor.
    Polar {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Dual-cone test of weak k-decomposability of a map document.
    Weakdec {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// State on the first factor; tracial when omitted.
        #[arg(long)]
        rho_file: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run sampling loops on the current thread only.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(report: &Report, common: &Common) -> Result<i32> {
    let text = report.to_json();
    match &common.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(if report.passed {
        exit::SUCCESS
    } else {
        exit::VERIFICATION_FAILED
    })
}

fn run_cone(command: ConeCommand, input: &Path, seed: Option<u64>, eta_samples: usize, common: &Common) -> Result<i32> {
    let opts = ConeOptions { seed, eta_samples };
    emit(&pipeline::cone(command, &read(input)?, &opts)?, common)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Classify {
            input,
            k_max,
            seed,
            restarts,
            samples,
            projections,
            witness_restarts,
            common,
        } => {
            let opts = ClassifyOptions {
                k_max,
                seed,
                restarts,
                samples,
                projections,
                witness_restarts,
                exec: common.exec(),
            };
            emit(&pipeline::classify(&read(&input)?, &opts)?, &common)
        }
        Command::ModularVerify {
            dim,
            trials,
            seed,
            cone_samples,
            rho_file,
            common,
        } => {
            let rho = rho_file.as_deref().map(read).transpose()?;
            let opts = ModularOptions {
                dim,
                trials,
                seed,
                cone_samples,
            };
            emit(&pipeline::modular_verify(&opts, rho.as_deref())?, &common)
        }
        Command::Cone { command } => match command {
            ConeSub::Member { input, common } => run_cone(ConeCommand::Member, &input, None, 0, &common),
            ConeSub::Pq { input, common } => run_cone(ConeCommand::Pq, &input, None, 0, &common),
            ConeSub::Prop64 {
                input,
                seed,
                eta_samples,
                common,
            } => run_cone(ConeCommand::Prop64, &input, Some(seed), eta_samples, &common),
            ConeSub::Prop65 { input, common } => run_cone(ConeCommand::Prop65, &input, None, 0, &common),
            ConeSub::Polar { input, common } => run_cone(ConeCommand::Polar, &input, None, 0, &common),
            ConeSub::Weakdec {
                input,
                k,
                seed,
                samples,
                rho_file,
                common,
            } => {
                let rho = rho_file.as_deref().map(read).transpose()?;
                let opts = WeakDecOptions {
                    k,
                    samples,
                    seed,
                    exec: common.exec(),
                };
                emit(&pipeline::weak_dec(&read(&input)?, rho.as_deref(), &opts)?, &common)
            }
        },
        Command::Verify { report } => {
            let (_, s) = pipeline::verify_bytes(&read(&report)?)?;
            eprintln!("verified {} witnesses in {} records", s.witnesses, s.records);
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INPUT_ERROR as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("posmap: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
