use clap::Parser;
use std::path::PathBuf;
use umm_edge::cli::{self, Command, Overrides};

/// Edge-universality experiments for unitary matrix models.
#[derive(Parser, Debug)]
#[command(name = "umm-edge", version)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Working precision in bits (overrides the config).
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Random seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    let args = Args::parse();
    let ov = Overrides {
        out: args.out,
        precision_bits: args.precision_bits,
        seed: args.seed,
    };
    std::process::exit(cli::run(args.command, &args.config, &ov));
}
