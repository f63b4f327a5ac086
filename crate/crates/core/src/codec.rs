//! Per-line compression and decompression.
//!
//! A compressed line is a sequence of one-byte codes. Identity codes stand for
//! themselves, codes `0x80..` stand for learned patterns, and a space escapes
//! the byte that follows it. Compression picks the segmentation with the
//! fewest output bytes: every input position is a node, every dictionary match
//! is an edge of cost 1, and the escape edge to the next position costs 2.

use thiserror::Error;

use crate::dictionary::{Dictionary, PatternTrie};

/// Escape marker. The following payload byte is copied verbatim.
pub const ESCAPE: u8 = b' ';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("unknown code {code:#04x} at payload byte {offset}")]
    UnknownCode { offset: usize, code: u8 },
    #[error("payload ends with a dangling escape")]
    TruncatedEscape,
}

/// One compressed line, without its record separator.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompressedRecord {
    pub payload: Vec<u8>,
}

impl CompressedRecord {
    pub fn len(&self) -> usize {
        self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payload.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Match { code: u8, len: usize },
    Escape,
}

impl Edge {
    fn len(self) -> usize {
        match self {
            Edge::Match { len, .. } => len,
            Edge::Escape => 1,
        }
    }
}

/// Shortest-path state for one line. Reusable across lines, not across threads.
#[derive(Debug, Clone, Default)]
pub struct ParseGraph {
    /// `best_cost[i]`: output bytes needed for `line[i..]`.
    best_cost: Vec<u32>,
    best_edge: Vec<Edge>,
}

impl ParseGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Solves the parse of `line`. All edges point forward, so one sweep from
    /// the end of the line settles every node.
    pub fn solve(&mut self, trie: &PatternTrie, line: &[u8]) {
        let n = line.len();
        self.best_cost.clear();
        self.best_cost.resize(n + 1, 0);
        self.best_edge.clear();
        self.best_edge.resize(n + 1, Edge::Escape);
        for i in (0..n).rev() {
            let mut cost = 2 + self.best_cost[i + 1];
            let mut edge = Edge::Escape;
            // matches come shortest first; `<=` keeps the longest on ties
            for m in trie.matches_at(line, i) {
                let c = 1 + self.best_cost[i + m.len];
                if c <= cost {
                    cost = c;
                    edge = Edge::Match {
                        code: m.code,
                        len: m.len,
                    };
                }
            }
            self.best_cost[i] = cost;
            self.best_edge[i] = edge;
        }
    }

    /// Minimum payload size of the last solved line.
    pub fn cost(&self) -> usize {
        self.best_cost.first().copied().unwrap_or(0) as usize
    }

    pub fn best_cost(&self) -> &[u32] {
        &self.best_cost
    }

    pub fn best_edge(&self) -> &[Edge] {
        &self.best_edge
    }

    /// Appends the payload of the solved `line` to `out`; returns the number of escapes.
    pub fn emit(&self, line: &[u8], out: &mut Vec<u8>) -> usize {
        let mut escapes = 0;
        let mut i = 0;
        while i < line.len() {
            let edge = self.best_edge[i];
            match edge {
                Edge::Match { code, .. } => out.push(code),
                Edge::Escape => {
                    out.extend_from_slice(&[ESCAPE, line[i]]);
                    escapes += 1;
                }
            }
            i += edge.len();
        }
        escapes
    }
}

/// Compresses one line with the minimum number of output bytes.
pub fn compress_line(trie: &PatternTrie, line: &[u8]) -> CompressedRecord {
    let mut graph = ParseGraph::new();
    graph.solve(trie, line);
    let mut payload = Vec::with_capacity(graph.cost());
    graph.emit(line, &mut payload);
    CompressedRecord { payload }
}

/// Expands a compressed line.
pub fn decompress_line(dict: &Dictionary, rec: &CompressedRecord) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::with_capacity(rec.len() * 3);
    DecodeTable::new(dict).decode_into(&rec.payload, &mut out)?;
    Ok(out)
}

/// Code to expansion lookup.
#[derive(Debug, Clone)]
pub struct DecodeTable {
    bytes: Vec<u8>,
    /// `(start, len)` into `bytes`; `len == 0` marks an unassigned code.
    entries: [(u32, u32); 256],
}

impl DecodeTable {
    pub fn new(dict: &Dictionary) -> Self {
        let mut bytes = Vec::new();
        let mut entries = [(0u32, 0u32); 256];
        for code in 0..=255u8 {
            if code == ESCAPE {
                continue;
            }
            if let Some(exp) = dict.expansion(code) {
                entries[code as usize] = (bytes.len() as u32, exp.len() as u32);
                bytes.extend_from_slice(exp);
            }
        }
        Self { bytes, entries }
    }

    /// Appends the expansion of `payload` to `out`; returns the number of escapes.
    pub fn decode_into(&self, payload: &[u8], out: &mut Vec<u8>) -> Result<usize, CodecError> {
        let mut escapes = 0;
        let mut iter = payload.iter().enumerate();
        while let Some((offset, &code)) = iter.next() {
            if code == ESCAPE {
                let (_, &literal) = iter.next().ok_or(CodecError::TruncatedEscape)?;
                out.push(literal);
                escapes += 1;
                continue;
            }
            let (start, len) = self.entries[code as usize];
            if len == 0 {
                return Err(CodecError::UnknownCode { offset, code });
            }
            out.extend_from_slice(&self.bytes[start as usize..(start + len) as usize]);
        }
        Ok(escapes)
    }
}

/// Dictionary with its derived trie and decode table.
#[derive(Debug, Clone)]
pub struct Codec {
    dict: Dictionary,
    trie: PatternTrie,
    table: DecodeTable,
}

impl Codec {
    pub fn new(dict: Dictionary) -> Self {
        let trie = dict.build_trie();
        let table = DecodeTable::new(&dict);
        Self { dict, trie, table }
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn trie(&self) -> &PatternTrie {
        &self.trie
    }

    /// Appends the compressed `line` to `out`; returns the number of escapes.
    pub fn compress_into(&self, graph: &mut ParseGraph, line: &[u8], out: &mut Vec<u8>) -> usize {
        graph.solve(&self.trie, line);
        graph.emit(line, out)
    }

    pub fn decompress_into(&self, payload: &[u8], out: &mut Vec<u8>) -> Result<usize, CodecError> {
        self.table.decode_into(payload, out)
    }
}

/// Minimum payload size of `line` found by trying every segmentation.
///
/// Meant for verifying [`compress_line`] on short lines. It consults the
/// dictionary entries directly and shares no code with the trie or the parse
/// graph. Results are memoized per suffix, which only prunes repeated work.
pub fn oracle_parse_cost(dict: &Dictionary, line: &[u8]) -> usize {
    let mut entries: Vec<&[u8]> = dict.learned().iter().map(Vec::as_slice).collect();
    entries.extend(dict.identity().chunks(1));
    fn search(entries: &[&[u8]], rest: &[u8], memo: &mut [Option<usize>]) -> usize {
        if rest.is_empty() {
            return 0;
        }
        if let Some(known) = memo[rest.len()] {
            return known;
        }
        let mut best = 2 + search(entries, &rest[1..], memo);
        for entry in entries {
            if rest.starts_with(entry) {
                best = best.min(1 + search(entries, &rest[entry.len()..], memo));
            }
        }
        memo[rest.len()] = Some(best);
        best
    }
    search(&entries, line, &mut vec![None; line.len() + 1])
}
