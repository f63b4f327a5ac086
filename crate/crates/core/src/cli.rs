//! Command-line surface: `train`, `compress`, `decompress` and `bench`.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codec::Codec;
use crate::dictionary::{self, Dictionary, DictionaryError, GenerationParams, Prepopulate};
use crate::pipeline::{self, CorpusStats, JobOptions};

/// The bundled dictionary, used when no `--dict` is given.
pub const EMBEDDED_DICT: &[u8] = include_bytes!("../data/default.zsd");

#[derive(Debug, Parser)]
#[command(
    name = "smiz",
    version,
    about = "Line-separable dictionary compression for SMILES files"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a dictionary on a SMILES corpus.
    Train(TrainArgs),
    /// Compress a SMILES file, one record per line.
    Compress(CodecArgs),
    /// Expand a compressed file.
    Decompress(CodecArgs),
    /// Measure compression ratios across dictionary options.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Ring-renumber lines before training / compressing.
    #[arg(long)]
    pub preprocess: bool,
    #[arg(long, default_value = "smiles", value_parser = parse_prepopulate)]
    pub prepopulate: Prepopulate,
    #[arg(long, default_value_t = 2)]
    pub lmin: usize,
    #[arg(long, default_value_t = 8)]
    pub lmax: usize,
    /// Number of learned patterns (at most 128).
    #[arg(long = "dict-size", default_value_t = dictionary::MAX_LEARNED)]
    pub dict_size: usize,
    /// Train on this many randomly drawn lines instead of the whole corpus.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ParamArgs {
    pub fn generation_params(&self) -> GenerationParams {
        GenerationParams {
            l_min: self.lmin,
            l_max: self.lmax,
            t: self.dict_size,
            prepopulate: self.prepopulate,
            preprocess: self.preprocess,
        }
    }
}

fn parse_prepopulate(s: &str) -> Result<Prepopulate, String> {
    s.parse()
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Training corpus.
    #[arg(short = 'i', long = "input")]
    pub input: PathBuf,
    /// Dictionary file to write.
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CodecArgs {
    /// Input file; stdin when omitted or `-`.
    #[arg(short = 'i', long = "input")]
    pub input: Option<PathBuf>,
    /// Output file; stdout when omitted or `-`.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    /// Dictionary file, or `embedded` for the built-in one.
    #[arg(short = 'd', long = "dict", default_value = "embedded")]
    pub dict: String,
    #[arg(long)]
    pub preprocess: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
    /// Pass malformed lines through instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// Print a key=value stats line to stderr.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Test corpora.
    #[arg(short = 'i', long = "input", required = true)]
    pub input: Vec<PathBuf>,
    /// Training corpora; defaults to the test corpora.
    #[arg(long)]
    pub train: Vec<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub lmin: usize,
    #[arg(long, default_value_t = 8)]
    pub lmax: usize,
    #[arg(long = "dict-size", default_value_t = dictionary::MAX_LEARNED)]
    pub dict_size: usize,
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => cmd_train(&args),
        Command::Compress(args) => cmd_codec(&args, JobOptions::compress()).map(|_| ()),
        Command::Decompress(args) => cmd_codec(&args, JobOptions::decompress()).map(|_| ()),
        Command::Bench(args) => {
            let report = cmd_bench(&args)?;
            print!("{report}");
            Ok(())
        }
    }
}

/// Non-empty lines of a corpus file.
pub fn read_corpus(path: &Path) -> Result<Vec<Vec<u8>>> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(split_lines(&data))
}

fn split_lines(data: &[u8]) -> Vec<Vec<u8>> {
    data.split(|&b| b == b'\n')
        .map(|l| l.strip_suffix(b"\r").unwrap_or(l))
        .filter(|l| !l.is_empty())
        .map(<[u8]>::to_vec)
        .collect()
}

/// Draws `sample` distinct lines uniformly with a seeded generator, keeping
/// corpus order. `None` keeps every line.
pub fn sample_lines(
    lines: &[Vec<u8>],
    sample: Option<usize>,
    seed: u64,
) -> Result<Vec<&[u8]>, DictionaryError> {
    let chosen: Vec<&[u8]> = match sample {
        Some(0) => return Err(DictionaryError::EmptyCorpus),
        Some(n) if n < lines.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = index::sample(&mut rng, lines.len(), n).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| lines[i].as_slice()).collect()
        }
        _ => lines.iter().map(Vec::as_slice).collect(),
    };
    if chosen.is_empty() {
        return Err(DictionaryError::EmptyCorpus);
    }
    Ok(chosen)
}

/// Trains a dictionary on (a sample of) `lines`.
pub fn train(
    lines: &[Vec<u8>],
    params: &GenerationParams,
    sample: Option<usize>,
    seed: u64,
) -> Result<Dictionary, DictionaryError> {
    let chosen = sample_lines(lines, sample, seed)?;
    dictionary::generate(&chosen, params)
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let lines = read_corpus(&args.input)?;
    let params = args.params.generation_params();
    let dict = train(&lines, &params, args.params.sample, args.params.seed)
        .with_context(|| format!("training on {}", args.input.display()))?;
    fs::write(&args.output, dictionary::serialize(&dict))
        .with_context(|| format!("writing {}", args.output.display()))?;
    Ok(())
}

/// Resolves `-d`: a path, or `embedded`.
pub fn load_dictionary(name: &str) -> Result<Dictionary> {
    if name == "embedded" {
        return Ok(dictionary::deserialize(EMBEDDED_DICT)?);
    }
    let data = fs::read(name).with_context(|| format!("reading dictionary {name}"))?;
    dictionary::deserialize(&data).with_context(|| format!("loading dictionary {name}"))
}

fn is_stdio(path: &Option<PathBuf>) -> bool {
    path.as_ref().is_none_or(|p| p.as_os_str() == "-")
}

pub fn cmd_codec(args: &CodecArgs, base: JobOptions) -> Result<CorpusStats> {
    let codec = Codec::new(load_dictionary(&args.dict)?);
    let opts = base
        .with_preprocess(args.preprocess)
        .with_lenient(args.lenient)
        .with_workers(args.workers as usize);

    let input: Box<dyn io::BufRead + Send> = if is_stdio(&args.input) {
        Box::new(BufReader::new(io::stdin()))
    } else {
        let path = args.input.as_ref().unwrap();
        Box::new(BufReader::new(
            File::open(path).with_context(|| format!("opening {}", path.display()))?,
        ))
    };
    let output: Box<dyn Write> = if is_stdio(&args.output) {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        let path = args.output.as_ref().unwrap();
        Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        ))
    };

    let stats = pipeline::run_stream(input, output, &codec, opts)?;
    if args.stats {
        eprintln!("{stats}");
    }
    if stats.skipped > 0 {
        eprintln!(
            "warning: {} malformed line(s) passed through",
            stats.skipped
        );
    }
    Ok(stats)
}

/// One measured (dictionary, test corpus) combination.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub train: String,
    pub test: String,
    pub preprocess: bool,
    pub prepopulate: Prepopulate,
    pub stats: CorpusStats,
}

impl BenchRow {
    pub fn ratio(&self) -> f64 {
        self.stats.ratio()
    }

    pub fn throughput_mb_s(&self) -> f64 {
        let secs = self.stats.elapsed.as_secs_f64();
        if secs == 0.0 {
            0.0
        } else {
            self.stats.input_bytes as f64 / secs / 1e6
        }
    }
}

/// Rows of a bench run: the pre-processing by pre-population ablation on the
/// first train/test pair, then the train-by-test matrix.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub ablation: Vec<BenchRow>,
    pub cross: Vec<BenchRow>,
}

impl BenchReport {
    pub fn cross_ratio(&self, train: &str, test: &str) -> Option<f64> {
        self.cross
            .iter()
            .find(|r| r.train == train && r.test == test)
            .map(BenchRow::ratio)
    }

    pub fn ablation_ratio(&self, preprocess: bool, prepopulate: Prepopulate) -> Option<f64> {
        self.ablation
            .iter()
            .find(|r| r.preprocess == preprocess && r.prepopulate == prepopulate)
            .map(BenchRow::ratio)
    }
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let header = |f: &mut std::fmt::Formatter<'_>| {
            writeln!(
                f,
                "{:<20} {:<20} {:<10} {:<10} {:>8} {:>10}",
                "train", "test", "preprocess", "prepop", "ratio", "MB/s"
            )
        };
        let row = |f: &mut std::fmt::Formatter<'_>, r: &BenchRow| {
            writeln!(
                f,
                "{:<20} {:<20} {:<10} {:<10} {:>8.4} {:>10.1}",
                r.train,
                r.test,
                if r.preprocess { "yes" } else { "no" },
                r.prepopulate,
                r.ratio(),
                r.throughput_mb_s()
            )
        };
        writeln!(f, "# ablation")?;
        header(f)?;
        for r in &self.ablation {
            row(f, r)?;
        }
        if !self.cross.is_empty() {
            writeln!(f, "# cross-dictionary")?;
            header(f)?;
            for r in &self.cross {
                row(f, r)?;
            }
        }
        Ok(())
    }
}

/// A named in-memory corpus.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub name: String,
    pub lines: Vec<Vec<u8>>,
}

impl Corpus {
    pub fn from_path(path: &Path) -> Result<Self> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Ok(Self {
            name,
            lines: read_corpus(path)?,
        })
    }

    fn file_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.lines.iter().map(|l| l.len() + 1).sum());
        for line in &self.lines {
            out.extend_from_slice(line);
            out.push(b'\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub l_min: usize,
    pub l_max: usize,
    pub dict_size: usize,
    pub sample: Option<usize>,
    pub seed: u64,
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            l_min: 2,
            l_max: 8,
            dict_size: dictionary::MAX_LEARNED,
            sample: None,
            seed: 0,
            workers: 1,
        }
    }
}

fn measure(codec: &Codec, test: &Corpus, preprocess: bool, workers: usize) -> Result<CorpusStats> {
    let data = test.file_bytes();
    let opts = JobOptions::compress()
        .with_preprocess(preprocess)
        .with_lenient(true)
        .with_workers(workers);
    let start = Instant::now();
    let mut stats = pipeline::run_stream(data.as_slice(), io::sink(), codec, opts)?;
    stats.elapsed = start.elapsed();
    Ok(stats)
}

/// Trains one dictionary per (training corpus, preprocess) and measures every
/// combination the report needs.
pub fn bench(train: &[Corpus], test: &[Corpus], cfg: &BenchConfig) -> Result<BenchReport> {
    if train.is_empty() || test.is_empty() {
        bail!("bench needs at least one training and one test corpus");
    }
    let learn = |corpus: &Corpus, preprocess: bool| -> Result<Dictionary> {
        let params = GenerationParams {
            l_min: cfg.l_min,
            l_max: cfg.l_max,
            t: cfg.dict_size,
            prepopulate: Prepopulate::SmilesAlphabet,
            preprocess,
        };
        train_corpus(corpus, &params, cfg)
    };

    let mut report = BenchReport::default();
    for preprocess in [true, false] {
        let base = learn(&train[0], preprocess)?;
        for prepopulate in Prepopulate::ALL {
            let dict = Dictionary::new(
                prepopulate,
                base.l_min(),
                base.l_max(),
                base.learned().to_vec(),
            )?;
            let stats = measure(&Codec::new(dict), &test[0], preprocess, cfg.workers)?;
            report.ablation.push(BenchRow {
                train: train[0].name.clone(),
                test: test[0].name.clone(),
                preprocess,
                prepopulate,
                stats,
            });
        }
    }

    if train.len() > 1 || test.len() > 1 {
        for tr in train {
            let codec = Codec::new(learn(tr, true)?);
            for te in test {
                let stats = measure(&codec, te, true, cfg.workers)?;
                report.cross.push(BenchRow {
                    train: tr.name.clone(),
                    test: te.name.clone(),
                    preprocess: true,
                    prepopulate: Prepopulate::SmilesAlphabet,
                    stats,
                });
            }
        }
    }
    Ok(report)
}

fn train_corpus(
    corpus: &Corpus,
    params: &GenerationParams,
    cfg: &BenchConfig,
) -> Result<Dictionary> {
    train(&corpus.lines, params, cfg.sample, cfg.seed)
        .with_context(|| format!("training on {}", corpus.name))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<BenchReport> {
    let test = args
        .input
        .iter()
        .map(|p| Corpus::from_path(p))
        .collect::<Result<Vec<_>>>()?;
    let train = if args.train.is_empty() {
        test.clone()
    } else {
        args.train
            .iter()
            .map(|p| Corpus::from_path(p))
            .collect::<Result<Vec<_>>>()?
    };
    let cfg = BenchConfig {
        l_min: args.lmin,
        l_max: args.lmax,
        dict_size: args.dict_size,
        sample: args.sample,
        seed: args.seed,
        workers: args.workers as usize,
    };
    bench(&train, &test, &cfg)
}
