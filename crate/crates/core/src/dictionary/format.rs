//! Text dictionary file:
//!
//! ```text
//! ZSD1
//! prepopulate=<none|smiles|printable>
//! lmin=<int> lmax=<int>
//! <pattern for code 0x80>
//! <pattern for code 0x81>
//! ...
//! ```
//!
//! Every line ends with LF. Patterns only use SMILES alphabet bytes.

use super::{Dictionary, DictionaryError, Prepopulate, MAX_LEARNED};

pub const MAGIC: &str = "ZSD1";

pub fn serialize(dict: &Dictionary) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC.as_bytes());
    out.push(b'\n');
    out.extend_from_slice(format!("prepopulate={}\n", dict.prepopulate()).as_bytes());
    out.extend_from_slice(format!("lmin={} lmax={}\n", dict.l_min(), dict.l_max()).as_bytes());
    for pattern in dict.learned() {
        out.extend_from_slice(pattern);
        out.push(b'\n');
    }
    out
}

fn header(line: usize, reason: impl Into<String>) -> DictionaryError {
    DictionaryError::MalformedHeader {
        line,
        reason: reason.into(),
    }
}

fn header_str(line: usize, bytes: Option<&[u8]>) -> Result<&str, DictionaryError> {
    let bytes = bytes.ok_or_else(|| header(line, "missing"))?;
    std::str::from_utf8(bytes).map_err(|_| header(line, "not ASCII"))
}

fn parse_field(line: usize, field: Option<&str>, key: &str) -> Result<usize, DictionaryError> {
    field
        .and_then(|f| f.strip_prefix(key))
        .and_then(|f| f.strip_prefix('='))
        .ok_or_else(|| header(line, format!("expected {key}=<int>")))?
        .parse()
        .map_err(|_| header(line, format!("{key} is not an integer")))
}

pub fn deserialize(data: &[u8]) -> Result<Dictionary, DictionaryError> {
    let body = data.strip_suffix(b"\n").unwrap_or(data);
    let mut lines = body.split(|&b| b == b'\n');

    let magic = lines.next().unwrap_or_default();
    if magic != MAGIC.as_bytes() {
        return Err(match magic.strip_prefix(b"ZSD") {
            Some(v) if !v.is_empty() => {
                DictionaryError::UnsupportedVersion(String::from_utf8_lossy(v).into_owned())
            }
            _ => DictionaryError::BadMagic,
        });
    }

    let prepopulate = header_str(2, lines.next())?
        .strip_prefix("prepopulate=")
        .ok_or_else(|| header(2, "expected prepopulate=<mode>"))?
        .parse::<Prepopulate>()
        .map_err(|e| header(2, e))?;

    let lengths = header_str(3, lines.next())?;
    let mut fields = lengths.split(' ');
    let l_min = parse_field(3, fields.next(), "lmin")?;
    let l_max = parse_field(3, fields.next(), "lmax")?;
    if fields.next().is_some() {
        return Err(header(3, "trailing fields"));
    }

    let mut learned = Vec::new();
    for pattern in lines {
        if learned.len() == MAX_LEARNED {
            return Err(DictionaryError::TooManyPatterns);
        }
        learned.push(pattern.to_vec());
    }

    // Dictionary::new numbers patterns from 1; file lines start at 4
    Dictionary::new(prepopulate, l_min, l_max, learned).map_err(|e| match e {
        DictionaryError::PatternTooLong { line } => {
            DictionaryError::PatternTooLong { line: line + 3 }
        }
        DictionaryError::PatternTooShort { line } => {
            DictionaryError::PatternTooShort { line: line + 3 }
        }
        DictionaryError::NonAlphabetByteInPattern { line, byte } => {
            DictionaryError::NonAlphabetByteInPattern {
                line: line + 3,
                byte,
            }
        }
        DictionaryError::DuplicatePattern { line } => {
            DictionaryError::DuplicatePattern { line: line + 3 }
        }
        DictionaryError::InvalidParams(reason) => header(3, reason),
        other => other,
    })
}
