use proptest::prelude::*;
use smiz::codec::{self, oracle_parse_cost, Codec, CodecError, ParseGraph, ESCAPE};
use smiz::dictionary::{Dictionary, Prepopulate};
use smiz::{compress_line, decompress_line};

/// Every segmentation of `line` into dictionary entries and escapes, as payloads.
fn all_payloads(dict: &Dictionary, line: &[u8]) -> Vec<Vec<u8>> {
    if line.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in all_payloads(dict, &line[1..]) {
        let mut p = vec![ESCAPE, line[0]];
        p.extend(rest);
        out.push(p);
    }
    if dict.is_identity(line[0]) {
        for rest in all_payloads(dict, &line[1..]) {
            let mut p = vec![line[0]];
            p.extend(rest);
            out.push(p);
        }
    }
    for (pattern, code) in dict.learned_with_codes() {
        if line.starts_with(pattern) {
            for rest in all_payloads(dict, &line[pattern.len()..]) {
                let mut p = vec![code];
                p.extend(rest);
                out.push(p);
            }
        }
    }
    out
}

fn escape_edges(payload: &[u8]) -> usize {
    let (mut i, mut n) = (0, 0);
    while i < payload.len() {
        if payload[i] == ESCAPE {
            n += 1;
            i += 2;
        } else {
            i += 1;
        }
    }
    n
}

#[test]
fn cco_enumeration() {
    let d = Dictionary::new(Prepopulate::SmilesAlphabet, 2, 8, vec![b"CC".to_vec()]).unwrap();
    let payloads = all_payloads(&d, b"CCO");
    let min = payloads.iter().map(Vec::len).min().unwrap();
    assert_eq!(min, 2);
    let optimal: Vec<_> = payloads.iter().filter(|p| p.len() == min).collect();
    assert_eq!(optimal, [&vec![0x80, b'O']]);
    for p in &payloads {
        assert_eq!(
            decompress_line(&d, &codec::CompressedRecord { payload: p.clone() }).unwrap(),
            b"CCO"
        );
    }
    let rec = compress_line(&d.build_trie(), b"CCO");
    assert_eq!(rec.payload, [0x80, b'O']);
    assert_eq!(oracle_parse_cost(&d, b"CCO"), 2);
}

#[test]
fn escape_of_non_alphabet_byte() {
    let d = Dictionary::new(Prepopulate::SmilesAlphabet, 2, 8, vec![]).unwrap();
    let rec = compress_line(&d.build_trie(), b"C!C");
    assert_eq!(rec.payload, b"C !C");
    assert_eq!(decompress_line(&d, &rec).unwrap(), b"C!C");
}

#[test]
fn decode_errors() {
    let d = Dictionary::new(Prepopulate::SmilesAlphabet, 2, 8, vec![b"CC".to_vec()]).unwrap();
    let bad = |payload: &[u8]| {
        decompress_line(
            &d,
            &codec::CompressedRecord {
                payload: payload.to_vec(),
            },
        )
    };
    assert_eq!(
        bad(&[b'C', 0x81]),
        Err(CodecError::UnknownCode {
            offset: 1,
            code: 0x81
        })
    );
    assert_eq!(bad(b"C "), Err(CodecError::TruncatedEscape));
    assert_eq!(
        bad(b"!"),
        Err(CodecError::UnknownCode {
            offset: 0,
            code: b'!'
        })
    );
}

const PATTERN_BYTES: &[u8] = b"CCCcNO()=1#";
const LINE_BYTES: &[u8] = b"CCCcNO()=1#!y \t{\x80\xff";

fn dictionary(max_learned: usize) -> impl Strategy<Value = Dictionary> {
    dictionary_with(Prepopulate::ALL.to_vec(), max_learned)
}

fn dictionary_with(
    modes: Vec<Prepopulate>,
    max_learned: usize,
) -> impl Strategy<Value = Dictionary> {
    (
        prop::sample::select(modes),
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(PATTERN_BYTES.to_vec()), 2..6),
            0..=max_learned,
        ),
    )
        .prop_map(|(prepop, raw)| {
            let mut learned: Vec<Vec<u8>> = Vec::new();
            for p in raw {
                if !learned.contains(&p) {
                    learned.push(p);
                }
            }
            Dictionary::new(prepop, 2, 8, learned).unwrap()
        })
}

fn line(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(prop::sample::select(LINE_BYTES.to_vec()), 0..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn payload_length_is_optimal(d in dictionary(10), l in line(20)) {
        let rec = compress_line(&d.build_trie(), &l);
        prop_assert_eq!(rec.len(), oracle_parse_cost(&d, &l));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn roundtrip(d in dictionary(40), l in line(80)) {
        let rec = compress_line(&d.build_trie(), &l);
        prop_assert_eq!(decompress_line(&d, &rec).unwrap(), l);
    }

    #[test]
    fn framing_bytes_never_appear(d in dictionary(40), l in line(80)) {
        let rec = compress_line(&d.build_trie(), &l);
        prop_assert!(!rec.payload.contains(&b'\n'));
        prop_assert!(!rec.payload.contains(&b'\r'));
        prop_assert!(rec.len() <= 2 * l.len());
    }

    #[test]
    fn alphabet_lines_never_expand(
        d in dictionary_with(vec![Prepopulate::SmilesAlphabet, Prepopulate::PrintableAscii], 40),
        l in prop::collection::vec(prop::sample::select(PATTERN_BYTES.to_vec()), 0..80),
    ) {
        let rec = compress_line(&d.build_trie(), &l);
        prop_assert!(rec.len() <= l.len());
    }

    #[test]
    fn extra_pattern_never_hurts(
        d in dictionary(10),
        extra in prop::collection::vec(prop::sample::select(PATTERN_BYTES.to_vec()), 2..6),
        l in line(30),
    ) {
        prop_assume!(!d.learned().contains(&extra));
        let mut learned = d.learned().to_vec();
        learned.push(extra);
        let bigger = Dictionary::new(d.prepopulate(), 2, 8, learned).unwrap();
        let before = compress_line(&d.build_trie(), &l).len();
        let after = compress_line(&bigger.build_trie(), &l).len();
        prop_assert!(after <= before);
    }

    #[test]
    fn codec_matches_free_functions(d in dictionary(20), lines in prop::collection::vec(line(40), 1..10)) {
        let codec = Codec::new(d.clone());
        let trie = d.build_trie();
        let mut graph = ParseGraph::new();
        for l in &lines {
            let mut out = Vec::new();
            let escapes = codec.compress_into(&mut graph, l, &mut out);
            let rec = compress_line(&trie, l);
            prop_assert_eq!(&out, &rec.payload);
            prop_assert_eq!(escapes, escape_edges(&out));
            let mut back = Vec::new();
            codec.decompress_into(&out, &mut back).unwrap();
            prop_assert_eq!(&back, l);
        }
    }
}
