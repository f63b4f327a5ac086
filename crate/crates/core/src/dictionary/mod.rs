//! The compression dictionary: training, representation, file format and
//! pattern index.
//!
//! A dictionary holds two kinds of entries. Identity entries are single bytes
//! that encode as themselves (the pre-population set). Learned entries are
//! multi-byte substrings picked by [`generate`] and encoded as `0x80 + i` in
//! selection order.

mod format;
mod generate;
mod rank;
mod trie;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::smiles;

pub use format::{deserialize, serialize, MAGIC};
pub use generate::generate;
pub use rank::{compute_overlap, count_substrings, greedy_cover, RankEntry, RankTable};
pub use trie::{Match, PatternTrie, PrefixMatches};

/// First code assigned to learned patterns.
pub const LEARNED_CODE_BASE: u8 = 0x80;
/// Learned patterns are limited to the extended-ASCII code space.
pub const MAX_LEARNED: usize = 128;
/// Hard cap on `l_max`.
pub const MAX_PATTERN_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DictionaryError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),
    #[error("not a dictionary file (bad magic)")]
    BadMagic,
    #[error("unsupported dictionary version {0:?}")]
    UnsupportedVersion(String),
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: pattern longer than lmax")]
    PatternTooLong { line: usize },
    #[error("line {line}: pattern shorter than lmin")]
    PatternTooShort { line: usize },
    #[error("more than {MAX_LEARNED} learned patterns")]
    TooManyPatterns,
    #[error("line {line}: byte {byte:#04x} is outside the SMILES alphabet")]
    NonAlphabetByteInPattern { line: usize, byte: u8 },
    #[error("line {line}: duplicate pattern")]
    DuplicatePattern { line: usize },
}

/// Which single bytes are seeded into the dictionary as identity entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Prepopulate {
    None,
    #[default]
    SmilesAlphabet,
    PrintableAscii,
}

impl Prepopulate {
    pub const ALL: [Prepopulate; 3] = [
        Prepopulate::PrintableAscii,
        Prepopulate::SmilesAlphabet,
        Prepopulate::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Prepopulate::None => "none",
            Prepopulate::SmilesAlphabet => "smiles",
            Prepopulate::PrintableAscii => "printable",
        }
    }

    /// The identity bytes for this mode, ascending.
    pub fn identity_bytes(self) -> Vec<u8> {
        match self {
            Prepopulate::None => Vec::new(),
            Prepopulate::SmilesAlphabet => smiles::alphabet().collect(),
            Prepopulate::PrintableAscii => (0x21..=0x7e).collect(),
        }
    }
}

impl fmt::Display for Prepopulate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Prepopulate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Prepopulate::None),
            "smiles" => Ok(Prepopulate::SmilesAlphabet),
            "printable" => Ok(Prepopulate::PrintableAscii),
            other => Err(format!(
                "unknown prepopulation mode {other:?} (expected none, smiles or printable)"
            )),
        }
    }
}

/// Training parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationParams {
    pub l_min: usize,
    pub l_max: usize,
    /// Number of learned patterns to select.
    pub t: usize,
    pub prepopulate: Prepopulate,
    /// Whether the training corpus is ring-renumbered before counting.
    pub preprocess: bool,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            l_min: 2,
            l_max: 8,
            t: MAX_LEARNED,
            prepopulate: Prepopulate::SmilesAlphabet,
            preprocess: false,
        }
    }
}

impl GenerationParams {
    pub fn validate(&self) -> Result<(), DictionaryError> {
        check_lengths(self.l_min, self.l_max).map_err(DictionaryError::InvalidParams)?;
        if self.t > MAX_LEARNED {
            return Err(DictionaryError::InvalidParams(format!(
                "dictionary size {} exceeds {MAX_LEARNED}",
                self.t
            )));
        }
        Ok(())
    }
}

fn check_lengths(l_min: usize, l_max: usize) -> Result<(), String> {
    if l_min < 2 {
        return Err(format!("lmin must be at least 2, got {l_min}"));
    }
    if l_max < l_min {
        return Err(format!("lmax {l_max} is below lmin {l_min}"));
    }
    if l_max > MAX_PATTERN_LEN {
        return Err(format!("lmax {l_max} exceeds {MAX_PATTERN_LEN}"));
    }
    Ok(())
}

/// An immutable compression dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    learned: Vec<Vec<u8>>,
    identity: Vec<u8>,
    prepopulate: Prepopulate,
    l_min: usize,
    l_max: usize,
}

impl Dictionary {
    /// Builds a dictionary from learned patterns given in code order.
    pub fn new(
        prepopulate: Prepopulate,
        l_min: usize,
        l_max: usize,
        learned: Vec<Vec<u8>>,
    ) -> Result<Self, DictionaryError> {
        check_lengths(l_min, l_max).map_err(DictionaryError::InvalidParams)?;
        if learned.len() > MAX_LEARNED {
            return Err(DictionaryError::TooManyPatterns);
        }
        let mut seen = std::collections::HashSet::new();
        for (i, pattern) in learned.iter().enumerate() {
            // report positions as 1-based pattern numbers
            let line = i + 1;
            if pattern.len() > l_max {
                return Err(DictionaryError::PatternTooLong { line });
            }
            if pattern.len() < l_min {
                return Err(DictionaryError::PatternTooShort { line });
            }
            if let Some(&byte) = pattern.iter().find(|&&b| !smiles::is_alphabet_member(b)) {
                return Err(DictionaryError::NonAlphabetByteInPattern { line, byte });
            }
            if !seen.insert(pattern.as_slice()) {
                return Err(DictionaryError::DuplicatePattern { line });
            }
        }
        Ok(Self {
            learned,
            identity: prepopulate.identity_bytes(),
            prepopulate,
            l_min,
            l_max,
        })
    }

    /// Learned patterns in code order.
    pub fn learned(&self) -> &[Vec<u8>] {
        &self.learned
    }

    /// Identity bytes, ascending.
    pub fn identity(&self) -> &[u8] {
        &self.identity
    }

    pub fn prepopulate(&self) -> Prepopulate {
        self.prepopulate
    }

    pub fn l_min(&self) -> usize {
        self.l_min
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn learned_with_codes(&self) -> impl Iterator<Item = (&[u8], u8)> {
        self.learned
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), LEARNED_CODE_BASE + i as u8))
    }

    pub fn is_identity(&self, b: u8) -> bool {
        self.identity.binary_search(&b).is_ok()
    }

    /// Output code of `pattern`, if it is a dictionary entry.
    pub fn code_of(&self, pattern: &[u8]) -> Option<u8> {
        if let [b] = pattern {
            if self.is_identity(*b) {
                return Some(*b);
            }
        }
        self.learned
            .iter()
            .position(|p| p == pattern)
            .map(|i| LEARNED_CODE_BASE + i as u8)
    }

    /// Expansion of an output code; `None` for codes this dictionary never emits.
    pub fn expansion(&self, code: u8) -> Option<&[u8]> {
        if code >= LEARNED_CODE_BASE {
            self.learned
                .get((code - LEARNED_CODE_BASE) as usize)
                .map(Vec::as_slice)
        } else if self.is_identity(code) {
            Some(std::slice::from_ref(
                &self.identity[self.identity.binary_search(&code).unwrap()],
            ))
        } else {
            None
        }
    }

    pub fn build_trie(&self) -> PatternTrie {
        PatternTrie::build(self)
    }
}
