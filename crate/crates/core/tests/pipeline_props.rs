use proptest::prelude::*;
use smiz::dictionary::{Dictionary, Prepopulate};
use smiz::pipeline::{run_stream, JobOptions, PipelineError};
use smiz::smiles::{self, ErrorMode};
use smiz::Codec;

fn codec() -> Codec {
    let learned = ["CC", "c1ccccc1", "C(=O)", "CCO", "(C)"];
    let d = Dictionary::new(
        Prepopulate::SmilesAlphabet,
        2,
        8,
        learned.iter().map(|p| p.as_bytes().to_vec()).collect(),
    )
    .unwrap();
    Codec::new(d)
}

fn run(input: &[u8], opts: JobOptions) -> Vec<u8> {
    let mut out = Vec::new();
    run_stream(input, &mut out, &codec(), opts).unwrap();
    out
}

/// Lines over SMILES and noise bytes, never containing a newline or CR.
fn corpus() -> impl Strategy<Value = Vec<u8>> {
    let bytes = b"CCCcc1()=O!y \t\x80\xff%".to_vec();
    (
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(bytes), 0..30),
            0..60,
        ),
        any::<bool>(),
    )
        .prop_map(|(lines, trailing)| {
            let mut out = lines.join(&b'\n');
            if trailing && !lines.is_empty() {
                out.push(b'\n');
            }
            out
        })
}

/// Ring-bearing lines that preprocess without errors.
fn ring_corpus() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(
        prop::sample::select(vec![
            "C1CC1",
            "C2CCC2",
            "c1ccccc1C3CC3",
            "C1CC2CCC2C1",
            "CCO",
            "C%12CC%12",
        ]),
        0..60,
    )
    .prop_map(|lines| {
        let mut out = lines.join("\n").into_bytes();
        out.push(b'\n');
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn workers_and_batches_do_not_change_output(input in corpus(), batch in 1usize..9, workers in 2usize..6) {
        let serial = run(&input, JobOptions::compress().with_workers(1));
        let parallel = run(&input, JobOptions::compress().with_workers(workers).with_batch_lines(batch));
        prop_assert_eq!(&parallel, &serial);

        let back_serial = run(&serial, JobOptions::decompress().with_workers(1));
        let back_parallel = run(&serial, JobOptions::decompress().with_workers(workers).with_batch_lines(batch));
        prop_assert_eq!(&back_parallel, &back_serial);
        prop_assert_eq!(&back_serial, &input);
    }

    #[test]
    fn one_record_per_line_in_order(input in corpus(), batch in 1usize..5) {
        let out = run(&input, JobOptions::compress().with_workers(3).with_batch_lines(batch));
        let c = codec();
        let src: Vec<&[u8]> = input.split(|&b| b == b'\n').collect();
        let dst: Vec<&[u8]> = out.split(|&b| b == b'\n').collect();
        prop_assert_eq!(src.len(), dst.len());
        for (s, d) in src.iter().zip(&dst) {
            let mut back = Vec::new();
            c.decompress_into(d, &mut back).unwrap();
            prop_assert_eq!(&back[..], *s);
        }
    }

    #[test]
    fn preprocessed_roundtrip(input in ring_corpus(), workers in 1usize..4) {
        let opts = JobOptions::compress().with_preprocess(true).with_workers(workers).with_batch_lines(3);
        let packed = run(&input, opts);
        let back = run(&packed, JobOptions::decompress().with_workers(workers));
        let expected: Vec<u8> = input
            .split_inclusive(|&b| b == b'\n')
            .flat_map(|l| {
                let body = l.strip_suffix(b"\n").unwrap_or(l);
                let mut v = smiles::preprocess_line(body, ErrorMode::Strict).unwrap().line.into_owned();
                v.push(b'\n');
                v
            })
            .collect();
        prop_assert_eq!(back, expected);
    }
}

#[test]
fn stats_agree_across_workers() {
    let input: Vec<u8> = synth_lines(2000);
    let c = codec();
    let mut stats = Vec::new();
    for workers in [1, 2, 8] {
        let opts = JobOptions::compress()
            .with_workers(workers)
            .with_batch_lines(64);
        let s = run_stream(input.as_slice(), std::io::sink(), &c, opts).unwrap();
        stats.push((s.lines, s.input_bytes, s.output_bytes, s.escapes));
    }
    assert!(stats.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn first_error_reported_in_line_order() {
    let mut input = synth_lines(500);
    input.extend_from_slice(b"C1CC\nCCO\nC2CC\n");
    let opts = JobOptions::compress()
        .with_preprocess(true)
        .with_workers(4)
        .with_batch_lines(7);
    let err = run_stream(input.as_slice(), std::io::sink(), &codec(), opts).unwrap_err();
    match err {
        PipelineError::Line { line, .. } => assert_eq!(line, 501),
        other => panic!("unexpected error: {other}"),
    }
}

fn synth_lines(n: usize) -> Vec<u8> {
    let mut out = Vec::new();
    for m in smiles_synth::corpus(smiles_synth::Family::Mixed, 7, n) {
        out.extend_from_slice(m.as_bytes());
        out.push(b'\n');
    }
    out
}
