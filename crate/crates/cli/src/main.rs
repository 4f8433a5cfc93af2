use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use couples_cli::commands::{self, Options, Outcome, SideArg};

/// Check, derive and compare exact couples of vector spaces and filtered vector spaces.
#[derive(Parser)]
#[command(name = "couples", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Couple or filtered-complex document
    path: PathBuf,
    /// Print witness morphisms (or embed every node's couple in the tree document)
    #[arg(long)]
    certificate: bool,
    /// Seed for semistability probes
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random semistability probes per verdict
    #[arg(long, default_value_t = 4)]
    probes: usize,
    /// Derive sibling subtrees concurrently
    #[arg(long)]
    parallel: bool,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            certificate: self.certificate,
            seed: self.seed,
            probes: self.probes,
            parallel: self.parallel,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideOpt {
    Left,
    Right,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Validate exactness and report strictness and semistability
    Check(Common),
    /// Derive repeatedly and report the tree of couples
    Derive {
        #[command(flatten)]
        common: Common,
        /// Which derived couples each node produces
        #[arg(long, value_enum, default_value = "both")]
        side: SideOpt,
        /// Number of derivation steps
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Write the tree document here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimensions of both cohomologies of the differential and the comparison map
    Cohomology(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Outcome = match &cli.command {
        Command::Check(c) => commands::check(&c.path, &c.options()),
        Command::Derive {
            common,
            side,
            depth,
            out,
        } => {
            let side = match side {
                SideOpt::Left => SideArg::Left,
                SideOpt::Right => SideArg::Right,
                SideOpt::Both => SideArg::Both,
            };
            commands::derive(&common.path, side, *depth, out.as_ref(), &common.options())
        }
        Command::Cohomology(c) => commands::cohomology(&c.path, &c.options()),
    };
    let _ = std::io::stdout().write_all(outcome.report.as_bytes());
    let _ = std::io::stderr().write_all(outcome.errors.as_bytes());
    ExitCode::from(outcome.code)
}
