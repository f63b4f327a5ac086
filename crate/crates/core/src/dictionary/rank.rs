use std::collections::HashMap;

use rayon::prelude::*;

use super::{DictionaryError, GenerationParams, PatternTrie};
use crate::smiles;

/// Occurrence count and current rank of one candidate substring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankEntry {
    pub occurrences: u64,
    pub rank: i64,
}

/// Candidate substrings of a training corpus with their ranks.
///
/// `rank = occurrences * (len - overlap)`, where overlap is the number of bytes
/// already covered by selected patterns (see [`compute_overlap`]).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankTable {
    entries: HashMap<Vec<u8>, RankEntry>,
}

impl RankTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, pattern: &[u8]) -> Option<RankEntry> {
        self.entries.get(pattern).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], RankEntry)> {
        self.entries.iter().map(|(p, e)| (p.as_slice(), *e))
    }

    pub fn remove(&mut self, pattern: &[u8]) -> Option<RankEntry> {
        self.entries.remove(pattern)
    }

    /// Recomputes every rank against `selected` and drops entries whose rank
    /// fell to zero or below.
    pub fn update(&mut self, selected: &[Vec<u8>]) {
        let mut trie = PatternTrie::new();
        for (i, p) in selected.iter().enumerate() {
            trie.insert(p, i as u8);
        }
        self.entries.retain(|pattern, entry| {
            let overlap = greedy_cover(&trie, pattern);
            entry.rank = entry.occurrences as i64 * (pattern.len() - overlap) as i64;
            entry.rank > 0
        });
    }

    pub(crate) fn into_entries(self) -> HashMap<Vec<u8>, RankEntry> {
        self.entries
    }
}

/// Counts every substring with length in `[l_min, l_max]` across the corpus,
/// overlapping occurrences included. Substrings containing bytes outside the
/// SMILES alphabet are skipped.
pub fn count_substrings<L>(
    corpus: &[L],
    params: &GenerationParams,
) -> Result<RankTable, DictionaryError>
where
    L: AsRef<[u8]> + Sync,
{
    if corpus.is_empty() {
        return Err(DictionaryError::EmptyCorpus);
    }
    params.validate()?;
    let (l_min, l_max) = (params.l_min, params.l_max);

    let counts = corpus
        .par_chunks(1024)
        .map(|chunk| {
            let mut counts: HashMap<&[u8], u64> = HashMap::new();
            for line in chunk {
                count_line(line.as_ref(), l_min, l_max, &mut counts);
            }
            counts
        })
        .reduce(HashMap::new, |mut a, b| {
            if a.len() < b.len() {
                return merge(b, a);
            }
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    let entries = counts
        .into_iter()
        .map(|(pattern, occurrences)| {
            let rank = occurrences as i64 * pattern.len() as i64;
            (pattern.to_vec(), RankEntry { occurrences, rank })
        })
        .collect();
    Ok(RankTable { entries })
}

fn merge<'a>(mut a: HashMap<&'a [u8], u64>, b: HashMap<&'a [u8], u64>) -> HashMap<&'a [u8], u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

fn count_line<'a>(line: &'a [u8], l_min: usize, l_max: usize, counts: &mut HashMap<&'a [u8], u64>) {
    // split on non-alphabet bytes: no candidate may straddle one
    for run in line.split(|&b| !smiles::is_alphabet_member(b)) {
        for start in 0..run.len() {
            let longest = l_max.min(run.len() - start);
            for len in l_min..=longest {
                *counts.entry(&run[start..start + len]).or_insert(0) += 1;
            }
        }
    }
}

/// Bytes of `pattern` covered by a left-to-right greedy longest-match parse
/// against the patterns held in `selected`.
pub fn greedy_cover(selected: &PatternTrie, pattern: &[u8]) -> usize {
    let mut covered = 0;
    let mut pos = 0;
    while pos < pattern.len() {
        match selected.longest_match(pattern, pos) {
            Some(m) => {
                covered += m.len;
                pos += m.len;
            }
            None => pos += 1,
        }
    }
    covered
}

/// Overlap of `pattern` with the already selected patterns, as used in the
/// rank update.
pub fn compute_overlap<P: AsRef<[u8]>>(pattern: &[u8], selected: &[P]) -> usize {
    let mut trie = PatternTrie::new();
    for (i, p) in selected.iter().enumerate() {
        trie.insert(p.as_ref(), i as u8);
    }
    greedy_cover(&trie, pattern)
}
