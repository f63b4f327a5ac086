use std::collections::HashSet;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;
use smiles_synth::{Family, Generator};

/// Writes a seeded synthetic SMILES corpus to stdout, one molecule per line.
#[derive(Debug, Parser)]
#[command(name = "smiles-synth", version)]
struct Args {
    /// drug, small or mixed
    #[arg(long, default_value = "mixed")]
    family: Family,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short = 'n', long, default_value_t = 10_000)]
    lines: usize,
    /// Skip molecules that appear in this file.
    #[arg(long)]
    exclude: Option<PathBuf>,
}

fn main() -> io::Result<()> {
    let args = Args::parse();
    let excluded = match &args.exclude {
        Some(path) => fs::read_to_string(path)?
            .lines()
            .map(str::to_owned)
            .collect(),
        None => HashSet::new(),
    };
    let mut out = BufWriter::new(io::stdout().lock());
    let molecules = Generator::new(args.family, args.seed).filter(|m| !excluded.contains(m));
    for molecule in molecules.take(args.lines) {
        writeln!(out, "{molecule}")?;
    }
    out.flush()
}
