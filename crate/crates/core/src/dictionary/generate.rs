use std::cmp::Reverse;

use super::rank::{count_substrings, greedy_cover};
use super::{Dictionary, DictionaryError, GenerationParams, PatternTrie};
use crate::smiles::{self, ErrorMode};

#[derive(Debug)]
struct Candidate {
    pattern: Vec<u8>,
    occurrences: u64,
    rank: i64,
}

impl Candidate {
    /// Selection order: higher rank, then longer pattern, then lexicographically smaller.
    fn key(&self) -> (i64, usize, Reverse<&[u8]>) {
        (self.rank, self.pattern.len(), Reverse(&self.pattern))
    }
}

/// Trains a dictionary on `corpus`.
///
/// Patterns are selected one at a time by highest rank, and the remaining
/// ranks are re-evaluated against the grown selection after each pick.
/// A candidate's greedy cover can only change when the newly selected pattern
/// occurs inside it, so only those candidates are recomputed. The result is
/// identical to a full recomputation. Candidates whose rank drops to zero or
/// below are discarded for good.
pub fn generate<L>(corpus: &[L], params: &GenerationParams) -> Result<Dictionary, DictionaryError>
where
    L: AsRef<[u8]> + Sync,
{
    params.validate()?;
    if corpus.is_empty() {
        return Err(DictionaryError::EmptyCorpus);
    }
    let table = if params.preprocess {
        let lines: Vec<Vec<u8>> = corpus
            .iter()
            .map(|line| {
                smiles::preprocess_line(line.as_ref(), ErrorMode::Lenient)
                    .map(|p| p.line.into_owned())
                    .unwrap_or_else(|_| line.as_ref().to_vec())
            })
            .collect();
        count_substrings(&lines, params)?
    } else {
        count_substrings(corpus, params)?
    };

    let mut pool: Vec<Candidate> = table
        .into_entries()
        .into_iter()
        .filter(|(_, e)| e.rank > 0)
        .map(|(pattern, e)| Candidate {
            pattern,
            occurrences: e.occurrences,
            rank: e.rank,
        })
        .collect();

    let mut selected: Vec<Vec<u8>> = Vec::with_capacity(params.t);
    let mut selected_trie = PatternTrie::new();
    while selected.len() < params.t {
        if let Some(last) = selected.last() {
            pool.retain_mut(|c| {
                if c.pattern.len() > last.len() && contains(&c.pattern, last) {
                    let overlap = greedy_cover(&selected_trie, &c.pattern);
                    c.rank = c.occurrences as i64 * (c.pattern.len() - overlap) as i64;
                }
                c.rank > 0
            });
        }
        let Some(best) = (0..pool.len()).max_by(|&a, &b| pool[a].key().cmp(&pool[b].key())) else {
            break;
        };
        let pick = pool.swap_remove(best);
        selected_trie.insert(&pick.pattern, selected.len() as u8);
        selected.push(pick.pattern);
    }

    Dictionary::new(params.prepopulate, params.l_min, params.l_max, selected)
}

fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}
