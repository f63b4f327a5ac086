//! Dictionary compression for SMILES corpora with one compressed record per
//! input line.
//!
//! * [`smiles`]: tokenizer, alphabet and ring-closure renumbering.
//! * [`dictionary`]: dictionary training, file format and pattern trie.
//! * [`codec`]: minimum-cost per-line compression and decompression.
//! * [`pipeline`]: ordered, multi-threaded whole-file processing.
//! * [`cli`]: the `smiz` command line.

pub mod cli;
pub mod codec;
pub mod dictionary;
pub mod pipeline;
pub mod smiles;

pub use codec::{compress_line, decompress_line, Codec, CompressedRecord};
pub use dictionary::{Dictionary, GenerationParams, PatternTrie, Prepopulate};
pub use pipeline::{run_stream, CorpusStats, JobOptions};
