//! Whole-file compression and decompression.
//!
//! Lines are grouped into batches that a pool of workers processes
//! independently. A single writer puts completed batches back in sequence, so
//! the output never depends on the worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::thread;
use std::time::{Duration, Instant};

use crossbeam_channel::bounded;
use thiserror::Error;

use crate::codec::{Codec, CodecError, ParseGraph};
use crate::smiles::{self, ErrorMode, SmilesError};

pub const DEFAULT_BATCH_LINES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Compress,
    Decompress,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JobOptions {
    pub direction: Direction,
    /// Renumber ring closures before compressing.
    pub preprocess: bool,
    /// Keep going on malformed lines instead of failing.
    pub lenient: bool,
    /// 1 runs everything on the calling thread.
    pub workers: usize,
    pub batch_lines: usize,
}

impl JobOptions {
    pub fn compress() -> Self {
        Self {
            direction: Direction::Compress,
            preprocess: false,
            lenient: false,
            workers: 1,
            batch_lines: DEFAULT_BATCH_LINES,
        }
    }

    pub fn decompress() -> Self {
        Self {
            direction: Direction::Decompress,
            ..Self::compress()
        }
    }

    pub fn with_preprocess(mut self, preprocess: bool) -> Self {
        self.preprocess = preprocess;
        self
    }

    pub fn with_lenient(mut self, lenient: bool) -> Self {
        self.lenient = lenient;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_batch_lines(mut self, batch_lines: usize) -> Self {
        self.batch_lines = batch_lines.max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error(transparent)]
    Smiles(#[from] SmilesError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("carriage return in line")]
    CarriageReturn,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("line {line}: {source}")]
    Line { line: u64, source: LineError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Byte and line totals of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub input_bytes: u64,
    pub output_bytes: u64,
    pub lines: u64,
    pub escapes: u64,
    /// Lines that lenient mode passed through or blanked.
    pub skipped: u64,
    pub elapsed: Duration,
}

impl CorpusStats {
    pub fn ratio(&self) -> f64 {
        compute_ratio(self)
    }
}

/// Output bytes over input bytes, record separators included. An empty input
/// has ratio 1.0.
pub fn compute_ratio(stats: &CorpusStats) -> f64 {
    if stats.input_bytes == 0 {
        1.0
    } else {
        stats.output_bytes as f64 / stats.input_bytes as f64
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lines={} in_bytes={} out_bytes={} ratio={:.6} escapes={} elapsed_ms={}",
            self.lines,
            self.input_bytes,
            self.output_bytes,
            self.ratio(),
            self.escapes,
            self.elapsed.as_millis()
        )
    }
}

/// A run of consecutive input lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchJob {
    pub seq: u64,
    /// 1-based number of the first line.
    pub first_line: u64,
    pub lines: Vec<Vec<u8>>,
    /// False only for a final line that had no trailing newline.
    pub last_terminated: bool,
}

#[derive(Debug, Default)]
struct BatchOutput {
    seq: u64,
    data: Vec<u8>,
    input_bytes: u64,
    lines: u64,
    escapes: u64,
    skipped: u64,
    error: Option<(u64, LineError)>,
}

struct Worker<'a> {
    codec: &'a Codec,
    opts: JobOptions,
    graph: ParseGraph,
    scratch: Vec<u8>,
}

impl<'a> Worker<'a> {
    fn new(codec: &'a Codec, opts: JobOptions) -> Self {
        Self {
            codec,
            opts,
            graph: ParseGraph::new(),
            scratch: Vec::new(),
        }
    }

    fn run(&mut self, job: BatchJob) -> BatchOutput {
        let mut out = BatchOutput {
            seq: job.seq,
            lines: job.lines.len() as u64,
            ..BatchOutput::default()
        };
        let count = job.lines.len();
        for (i, line) in job.lines.iter().enumerate() {
            let terminated = i + 1 < count || job.last_terminated;
            out.input_bytes += line.len() as u64 + terminated as u64;
            let mark = out.data.len();
            match self.line(line, &mut out) {
                Ok(()) => {}
                Err(_) if self.opts.lenient => {
                    out.data.truncate(mark);
                    out.skipped += 1;
                }
                Err(e) => {
                    out.error = Some((job.first_line + i as u64, e));
                    return out;
                }
            }
            if terminated {
                out.data.push(b'\n');
            }
        }
        out
    }

    fn line(&mut self, line: &[u8], out: &mut BatchOutput) -> Result<(), LineError> {
        match self.opts.direction {
            Direction::Compress => {
                if line.contains(&b'\r') {
                    return Err(LineError::CarriageReturn);
                }
                let mut source = line;
                if self.opts.preprocess {
                    let mode = if self.opts.lenient {
                        ErrorMode::Lenient
                    } else {
                        ErrorMode::Strict
                    };
                    let pre = smiles::preprocess_line(line, mode)?;
                    if pre.flagged.is_some() {
                        out.skipped += 1;
                    }
                    self.scratch.clear();
                    self.scratch.extend_from_slice(&pre.line);
                    source = &self.scratch;
                }
                out.escapes += self
                    .codec
                    .compress_into(&mut self.graph, source, &mut out.data)
                    as u64;
            }
            Direction::Decompress => {
                out.escapes += self.codec.decompress_into(line, &mut out.data)? as u64;
            }
        }
        Ok(())
    }
}

/// Reads up to `max` lines. Returns `None` at end of input.
fn read_batch<R: BufRead>(
    input: &mut R,
    seq: u64,
    first_line: u64,
    max: usize,
) -> io::Result<Option<BatchJob>> {
    let mut lines = Vec::with_capacity(max.min(DEFAULT_BATCH_LINES));
    let mut last_terminated = true;
    while lines.len() < max {
        let mut line = Vec::new();
        if input.read_until(b'\n', &mut line)? == 0 {
            break;
        }
        if line.last() == Some(&b'\n') {
            line.pop();
        } else {
            last_terminated = false;
        }
        lines.push(line);
        if !last_terminated {
            break;
        }
    }
    Ok((!lines.is_empty()).then_some(BatchJob {
        seq,
        first_line,
        lines,
        last_terminated,
    }))
}

/// Applies the line transform of `opts` to every line of `input`, in order.
pub fn run_stream<R, W>(
    mut input: R,
    mut output: W,
    codec: &Codec,
    opts: JobOptions,
) -> Result<CorpusStats, PipelineError>
where
    R: BufRead + Send,
    W: Write,
{
    let start = Instant::now();
    let mut stats = CorpusStats::default();
    let batch_lines = opts.batch_lines.max(1);

    let mut absorb = |batch: BatchOutput, stats: &mut CorpusStats| -> Result<(), PipelineError> {
        output.write_all(&batch.data)?;
        stats.output_bytes += batch.data.len() as u64;
        stats.input_bytes += batch.input_bytes;
        stats.escapes += batch.escapes;
        stats.skipped += batch.skipped;
        if let Some((line, source)) = batch.error {
            return Err(PipelineError::Line { line, source });
        }
        stats.lines += batch.lines;
        Ok(())
    };

    if opts.workers <= 1 {
        let mut worker = Worker::new(codec, opts);
        let (mut seq, mut next_line) = (0, 1);
        while let Some(job) = read_batch(&mut input, seq, next_line, batch_lines)? {
            seq += 1;
            next_line += job.lines.len() as u64;
            absorb(worker.run(job), &mut stats)?;
        }
    } else {
        let workers = opts.workers;
        thread::scope(|s| -> Result<(), PipelineError> {
            let (job_tx, job_rx) = bounded::<BatchJob>(workers * 2);
            let (out_tx, out_rx) = bounded::<io::Result<BatchOutput>>(workers * 2);

            let reader_tx = out_tx.clone();
            let input = &mut input;
            s.spawn(move || {
                let (mut seq, mut next_line) = (0, 1);
                loop {
                    match read_batch(input, seq, next_line, batch_lines) {
                        Ok(Some(job)) => {
                            seq += 1;
                            next_line += job.lines.len() as u64;
                            if job_tx.send(job).is_err() {
                                break;
                            }
                        }
                        Ok(None) => break,
                        Err(e) => {
                            let _ = reader_tx.send(Err(e));
                            break;
                        }
                    }
                }
            });

            for _ in 0..workers {
                let job_rx = job_rx.clone();
                let out_tx = out_tx.clone();
                s.spawn(move || {
                    let mut worker = Worker::new(codec, opts);
                    for job in job_rx {
                        if out_tx.send(Ok(worker.run(job))).is_err() {
                            break;
                        }
                    }
                });
            }
            drop(job_rx);
            drop(out_tx);

            let mut pending = BTreeMap::new();
            let mut next_seq = 0;
            let result = (|| {
                for msg in &out_rx {
                    let batch = msg?;
                    pending.insert(batch.seq, batch);
                    while let Some(batch) = pending.remove(&next_seq) {
                        next_seq += 1;
                        absorb(batch, &mut stats)?;
                    }
                }
                debug_assert!(pending.is_empty());
                Ok(())
            })();
            // unblocks workers and the reader if we bailed out early
            drop(out_rx);
            result
        })?;
    }

    output.flush()?;
    stats.elapsed = start.elapsed();
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{Dictionary, Prepopulate};

    fn codec(learned: &[&str]) -> Codec {
        Codec::new(
            Dictionary::new(
                Prepopulate::SmilesAlphabet,
                2,
                8,
                learned.iter().map(|p| p.as_bytes().to_vec()).collect(),
            )
            .unwrap(),
        )
    }

    fn run(
        input: &[u8],
        codec: &Codec,
        opts: JobOptions,
    ) -> Result<(Vec<u8>, CorpusStats), PipelineError> {
        let mut out = Vec::new();
        let stats = run_stream(input, &mut out, codec, opts)?;
        Ok((out, stats))
    }

    #[test]
    fn cco_corpus_ratio() {
        let c = codec(&["CC"]);
        let n = 1000;
        let input = "CCO\n".repeat(n);
        for workers in [1, 3] {
            let opts = JobOptions::compress()
                .with_workers(workers)
                .with_batch_lines(64);
            let (out, stats) = run(input.as_bytes(), &c, opts).unwrap();
            assert_eq!(out, [0x80, b'O', b'\n'].repeat(n));
            assert_eq!(stats.input_bytes, 4 * n as u64);
            assert_eq!(stats.output_bytes, 3 * n as u64);
            assert_eq!(stats.lines, n as u64);
            assert_eq!(stats.ratio(), 0.75);
        }
    }

    #[test]
    fn empty_input() {
        let c = codec(&[]);
        let (out, stats) = run(b"", &c, JobOptions::compress().with_workers(4)).unwrap();
        assert!(out.is_empty());
        assert_eq!(stats.lines, 0);
        assert_eq!(stats.ratio(), 1.0);
    }

    #[test]
    fn ratio_arithmetic() {
        let stats = CorpusStats {
            input_bytes: 100,
            output_bytes: 29,
            ..CorpusStats::default()
        };
        assert!((compute_ratio(&stats) - 0.29).abs() < 1e-12);
        let same = CorpusStats {
            input_bytes: 57,
            output_bytes: 57,
            ..CorpusStats::default()
        };
        assert_eq!(compute_ratio(&same), 1.0);
    }

    #[test]
    fn trailing_newline_symmetry() {
        let c = codec(&["CC"]);
        let (out, _) = run(b"CCO\nCC", &c, JobOptions::compress()).unwrap();
        assert_eq!(out, vec![0x80, b'O', b'\n', 0x80]);
        let (out, _) = run(b"\n\nCC\n", &c, JobOptions::compress()).unwrap();
        assert_eq!(out, vec![b'\n', b'\n', 0x80, b'\n']);
    }

    #[test]
    fn worker_counts_agree() {
        let c = codec(&["CC", "c1ccccc1", "C(=O)"]);
        let input = b"CCO\nc1ccccc1C(=O)O\n\nC!\nN#N";
        let (serial, _) = run(input, &c, JobOptions::compress()).unwrap();
        for workers in [2, 8] {
            let opts = JobOptions::compress()
                .with_workers(workers)
                .with_batch_lines(1);
            assert_eq!(run(input, &c, opts).unwrap().0, serial);
        }
    }

    #[test]
    fn strict_error_carries_line_number() {
        let c = codec(&[]);
        let input = b"CCO\nC1CC\nCCN\n";
        for workers in [1, 4] {
            let opts = JobOptions::compress()
                .with_preprocess(true)
                .with_workers(workers)
                .with_batch_lines(1);
            match run(input, &c, opts) {
                Err(PipelineError::Line { line, source }) => {
                    assert_eq!(line, 2);
                    assert_eq!(
                        source,
                        LineError::Smiles(SmilesError::UnpairedRingClosure { ring_id: 1 })
                    );
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn lenient_passes_malformed_lines_through() {
        let c = codec(&[]);
        let input = b"C1CC1\nC1CC\nCCN\n";
        let opts = JobOptions::compress()
            .with_preprocess(true)
            .with_lenient(true);
        let (out, stats) = run(input, &c, opts).unwrap();
        assert_eq!(out, b"C0CC0\nC1CC\nCCN\n");
        assert_eq!(stats.skipped, 1);
        assert_eq!(stats.lines, 3);
    }

    #[test]
    fn carriage_returns_are_rejected() {
        let c = codec(&[]);
        let err = run(b"CC\r\n", &c, JobOptions::compress()).unwrap_err();
        assert!(matches!(
            err,
            PipelineError::Line {
                line: 1,
                source: LineError::CarriageReturn
            }
        ));
        let (out, stats) =
            run(b"CC\r\nO\n", &c, JobOptions::compress().with_lenient(true)).unwrap();
        assert_eq!(out, b"\nO\n");
        assert_eq!(stats.skipped, 1);
    }

    #[test]
    fn decompress_roundtrip_and_errors() {
        let c = codec(&["CC"]);
        let (packed, _) = run(b"CCO\nC!\n", &c, JobOptions::compress()).unwrap();
        let (plain, stats) = run(&packed, &c, JobOptions::decompress().with_workers(2)).unwrap();
        assert_eq!(plain, b"CCO\nC!\n");
        assert_eq!(stats.escapes, 1);

        let other = codec(&[]);
        match run(&packed, &other, JobOptions::decompress()) {
            Err(PipelineError::Line { line: 1, source }) => {
                assert_eq!(
                    source,
                    LineError::Codec(CodecError::UnknownCode {
                        offset: 0,
                        code: 0x80
                    })
                )
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stats_line_format() {
        let stats = CorpusStats {
            input_bytes: 4,
            output_bytes: 3,
            lines: 1,
            escapes: 0,
            skipped: 0,
            elapsed: Duration::from_millis(12),
        };
        assert_eq!(
            stats.to_string(),
            "lines=1 in_bytes=4 out_bytes=3 ratio=0.750000 escapes=0 elapsed_ms=12"
        );
    }
}
