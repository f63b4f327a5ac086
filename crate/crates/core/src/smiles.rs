//! Lexical handling of SMILES lines.
//!
//! The tokenizer only understands as much of the format as ring renumbering
//! needs: bracket atoms are opaque, two-letter organic atoms (`Cl`, `Br`) are
//! kept together, and ring closures (`1`, `%12`) are recognised outside of
//! brackets. Anything else becomes an [`TokenKind::Other`] byte token.

use std::borrow::Cow;
use std::ops::Range;

use thiserror::Error;

/// Largest ring-closure id expressible in SMILES (`%99`).
pub const MAX_RING_ID: u8 = 99;

const ALPHABET_PUNCT: &[u8] = b"[]()=#-+@/\\%.:*$~";

/// Byte-indexed membership table for the SMILES alphabet.
static ALPHABET: [bool; 256] = build_alphabet();

const fn build_alphabet() -> [bool; 256] {
    let mut table = [false; 256];
    let mut b = 0usize;
    while b < 256 {
        let c = b as u8;
        table[b] = c.is_ascii_alphanumeric();
        b += 1;
    }
    let mut i = 0;
    while i < ALPHABET_PUNCT.len() {
        table[ALPHABET_PUNCT[i] as usize] = true;
        i += 1;
    }
    table
}

/// Returns true if `b` belongs to the fixed SMILES alphabet.
///
/// The alphabet is `A-Z`, `a-z`, `0-9` and `[ ] ( ) = # - + @ / \ % . : * $ ~`.
/// Space is never a member since it is the escape marker of the codec.
#[inline]
pub fn is_alphabet_member(b: u8) -> bool {
    ALPHABET[b as usize]
}

/// All members of the SMILES alphabet in ascending byte order.
pub fn alphabet() -> impl Iterator<Item = u8> {
    (0u8..=255).filter(|&b| is_alphabet_member(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Atom,
    BracketAtom,
    Bond,
    BranchOpen,
    BranchClose,
    RingClosure,
    Dot,
    Other,
}

/// One lexical unit of a SMILES line, addressed by its byte span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Range<usize>,
    /// Only set for [`TokenKind::RingClosure`].
    pub ring_id: Option<u8>,
}

impl Token {
    fn new(kind: TokenKind, span: Range<usize>) -> Self {
        Self {
            kind,
            span,
            ring_id: None,
        }
    }

    pub fn text<'a>(&self, line: &'a [u8]) -> &'a [u8] {
        &line[self.span.clone()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("unclosed '[' at byte {offset}")]
    UnbalancedBracket { offset: usize },
    #[error("'%' at byte {offset} is not followed by two digits")]
    MalformedPercent { offset: usize },
    #[error("ring closure {ring_id} is never closed")]
    UnpairedRingClosure { ring_id: u8 },
    #[error("more than {} rings open at once", MAX_RING_ID as usize + 1)]
    RingIdsExhausted,
}

fn is_bond(b: u8) -> bool {
    matches!(b, b'-' | b'=' | b'#' | b'$' | b':' | b'/' | b'\\' | b'~')
}

fn is_organic_start(b: u8) -> bool {
    matches!(
        b,
        b'B' | b'C'
            | b'N'
            | b'O'
            | b'P'
            | b'S'
            | b'F'
            | b'I'
            | b'b'
            | b'c'
            | b'n'
            | b'o'
            | b'p'
            | b's'
            | b'*'
    )
}

/// Splits a SMILES line into tokens whose spans partition the line.
pub fn tokenize(line: &[u8]) -> Result<Vec<Token>, SmilesError> {
    let mut tokens = Vec::with_capacity(line.len());
    let mut i = 0;
    while i < line.len() {
        let b = line[i];
        let token = match b {
            b'[' => {
                let close = line[i + 1..]
                    .iter()
                    .position(|&c| c == b']')
                    .ok_or(SmilesError::UnbalancedBracket { offset: i })?;
                Token::new(TokenKind::BracketAtom, i..i + close + 2)
            }
            b'%' => {
                let digits = line.get(i + 1..i + 3);
                match digits {
                    Some([d1, d2]) if d1.is_ascii_digit() && d2.is_ascii_digit() => Token {
                        kind: TokenKind::RingClosure,
                        span: i..i + 3,
                        ring_id: Some((d1 - b'0') * 10 + (d2 - b'0')),
                    },
                    _ => return Err(SmilesError::MalformedPercent { offset: i }),
                }
            }
            b'0'..=b'9' => Token {
                kind: TokenKind::RingClosure,
                span: i..i + 1,
                ring_id: Some(b - b'0'),
            },
            b'C' if line.get(i + 1) == Some(&b'l') => Token::new(TokenKind::Atom, i..i + 2),
            b'B' if line.get(i + 1) == Some(&b'r') => Token::new(TokenKind::Atom, i..i + 2),
            b'(' => Token::new(TokenKind::BranchOpen, i..i + 1),
            b')' => Token::new(TokenKind::BranchClose, i..i + 1),
            b'.' => Token::new(TokenKind::Dot, i..i + 1),
            _ if is_bond(b) => Token::new(TokenKind::Bond, i..i + 1),
            _ if is_organic_start(b) => Token::new(TokenKind::Atom, i..i + 1),
            _ => Token::new(TokenKind::Other, i..i + 1),
        };
        i = token.span.end;
        tokens.push(token);
    }
    Ok(tokens)
}

/// A ring bond as an interval of token indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ring {
    pub open: usize,
    pub close: usize,
}

impl Ring {
    fn overlaps(&self, other: &Ring) -> bool {
        self.open < other.close && other.open < self.close
    }
}

/// Pairs ring-closure tokens into rings, in order of appearance of the opening token.
pub fn pair_rings(tokens: &[Token]) -> Result<Vec<Ring>, SmilesError> {
    let mut open: [Option<usize>; MAX_RING_ID as usize + 1] = [None; MAX_RING_ID as usize + 1];
    let mut rings = Vec::new();
    for (idx, token) in tokens.iter().enumerate() {
        let Some(id) = token.ring_id else { continue };
        match open[id as usize].take() {
            Some(start) => rings.push(Ring {
                open: start,
                close: idx,
            }),
            None => open[id as usize] = Some(idx),
        }
    }
    if let Some(id) = open.iter().position(Option::is_some) {
        return Err(SmilesError::UnpairedRingClosure { ring_id: id as u8 });
    }
    rings.sort_by_key(|r| r.open);
    Ok(rings)
}

/// Assigns new ids to `rings`: rings are visited by closing position and each
/// takes the smallest id not held by an overlapping ring visited before it.
pub fn assign_ring_ids(rings: &[Ring]) -> Result<Vec<u8>, SmilesError> {
    let mut order: Vec<usize> = (0..rings.len()).collect();
    order.sort_by_key(|&i| rings[i].close);
    let mut ids: Vec<Option<u8>> = vec![None; rings.len()];
    for &i in &order {
        let mut used = [false; MAX_RING_ID as usize + 1];
        for (j, id) in ids.iter().enumerate() {
            if let Some(id) = id {
                if rings[i].overlaps(&rings[j]) {
                    used[*id as usize] = true;
                }
            }
        }
        let free = used
            .iter()
            .position(|u| !u)
            .ok_or(SmilesError::RingIdsExhausted)?;
        ids[i] = Some(free as u8);
    }
    Ok(ids.into_iter().map(|id| id.unwrap_or_default()).collect())
}

fn push_ring_id(out: &mut Vec<u8>, id: u8) {
    if id < 10 {
        out.push(b'0' + id);
    } else {
        out.extend_from_slice(&[b'%', b'0' + id / 10, b'0' + id % 10]);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMode {
    #[default]
    Strict,
    Lenient,
}

/// Result of [`preprocess_line`]. `flagged` is set when lenient mode passed a
/// malformed line through untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preprocessed<'a> {
    pub line: Cow<'a, [u8]>,
    pub flagged: Option<SmilesError>,
}

/// Renumbers ring closures so that ids are reused as soon as possible and
/// inner rings get the lowest ids. All other bytes are copied unchanged.
pub fn preprocess_line(line: &[u8], mode: ErrorMode) -> Result<Preprocessed<'_>, SmilesError> {
    match renumber_rings(line) {
        Ok(out) => Ok(Preprocessed {
            line: out,
            flagged: None,
        }),
        Err(e) if mode == ErrorMode::Lenient => Ok(Preprocessed {
            line: Cow::Borrowed(line),
            flagged: Some(e),
        }),
        Err(e) => Err(e),
    }
}

fn renumber_rings(line: &[u8]) -> Result<Cow<'_, [u8]>, SmilesError> {
    let tokens = tokenize(line)?;
    let rings = pair_rings(&tokens)?;
    if rings.is_empty() {
        return Ok(Cow::Borrowed(line));
    }
    let ids = assign_ring_ids(&rings)?;
    let mut new_id: Vec<Option<u8>> = vec![None; tokens.len()];
    for (ring, id) in rings.iter().zip(ids) {
        new_id[ring.open] = Some(id);
        new_id[ring.close] = Some(id);
    }
    let mut out = Vec::with_capacity(line.len());
    for (token, id) in tokens.iter().zip(new_id) {
        match id {
            Some(id) => push_ring_id(&mut out, id),
            None => out.extend_from_slice(token.text(line)),
        }
    }
    Ok(Cow::Owned(out))
}

/// Checks that every ring id of `line` alternates open/close and that no id is
/// left open at the end of the line.
pub fn rings_are_paired(line: &[u8]) -> bool {
    tokenize(line)
        .ok()
        .is_some_and(|tokens| pair_rings(&tokens).is_ok())
}
