//! Randomized invariants for the low-level building blocks.

use contour_codec::arith::{ac_decode, ac_encode, FrequencyTriple};
use contour_codec::bitio::{BitReader, BitWriter};
use contour_codec::corpus::TrainingCorpus;
use contour_codec::geom::{
    dcc_to_edges, edges_to_dcc, AbsoluteDirection, DccContour, DccSymbol, GridPoint,
};
use contour_codec::rice::{rice_decode, rice_encode};
use contour_codec::synth::MarkovSource;
use contour_codec::tree::{ContextTree, TreeParams};
use contour_codec::tst::TotalSuffixTree;
use contour_codec::train;
use proptest::prelude::*;
use std::sync::OnceLock;

fn symbol() -> impl Strategy<Value = DccSymbol> {
    (0usize..3).prop_map(|i| DccSymbol::from_index(i).unwrap())
}

fn contour() -> impl Strategy<Value = DccContour> {
    (
        -50i32..50,
        -50i32..50,
        0u8..4,
        prop::collection::vec(symbol(), 0..200),
    )
        .prop_map(|(x, y, dir, symbols)| {
            DccContour::new(
                GridPoint::new(x, y),
                AbsoluteDirection::from_code(dir).unwrap(),
                symbols,
            )
        })
}

fn shared_model() -> &'static (ContextTree, TotalSuffixTree) {
    static MODEL: OnceLock<(ContextTree, TotalSuffixTree)> = OnceLock::new();
    MODEL.get_or_init(|| {
        let sample = MarkovSource::example().sample(20_000, 77);
        let corpus = TrainingCorpus::new(sample.chunks(500).map(|c| c.to_vec()).collect());
        let tree = train(&corpus, TreeParams::default_for(corpus.total_len())).0;
        let tst = TotalSuffixTree::build(&tree);
        (tree, tst)
    })
}

proptest! {
    #[test]
    fn dcc_edge_roundtrip(c in contour()) {
        let edges = dcc_to_edges(&c);
        prop_assert_eq!(edges.len(), c.edge_count());
        prop_assert_eq!(edges_to_dcc(&edges).unwrap(), c);
    }

    #[test]
    fn bitio_roundtrip(fields in prop::collection::vec((any::<u64>(), 1usize..=64), 0..50)) {
        let mut w = BitWriter::new();
        for &(value, width) in &fields {
            let masked = if width == 64 { value } else { value & ((1 << width) - 1) };
            w.write_bits(masked, width);
        }
        let bytes = w.into_bytes();
        let mut r = BitReader::new(&bytes);
        for &(value, width) in &fields {
            let masked = if width == 64 { value } else { value & ((1 << width) - 1) };
            prop_assert_eq!(r.read_bits(width).unwrap(), masked);
        }
    }

    #[test]
    fn rice_roundtrip(values in prop::collection::vec(0u64..100_000, 0..50), k in 0u32..16) {
        let mut w = BitWriter::new();
        for &v in &values {
            rice_encode(&mut w, v, k);
        }
        let bytes = w.into_bytes();
        let mut r = BitReader::new(&bytes);
        for &v in &values {
            prop_assert_eq!(rice_decode(&mut r, k).unwrap(), v);
        }
    }

    #[test]
    fn arithmetic_roundtrip(symbols in prop::collection::vec(symbol(), 0..300)) {
        let provider = |past: &[DccSymbol]| {
            let p = match past.last() {
                Some(DccSymbol::Left) => [0.7, 0.2, 0.1],
                Some(DccSymbol::Right) => [0.1, 0.2, 0.7],
                _ => [1.0 / 3.0; 3],
            };
            FrequencyTriple::from_probabilities(&p)
        };
        let bytes = ac_encode(&symbols, provider);
        prop_assert_eq!(ac_decode(&bytes, symbols.len(), provider).unwrap(), symbols);
    }

    #[test]
    fn lookup_agrees_with_tst_truncation(history in prop::collection::vec(symbol(), 0..30)) {
        let (tree, tst) = shared_model();
        let truncated = tst.truncate_history(&history);
        prop_assert_eq!(tree.lookup(truncated), tree.lookup(&history));
    }
}
