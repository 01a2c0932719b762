//! Contour compression toolkit: differential chain codes, context-tree
//! modeling with a geometric straightness prior, arithmetic coding, and
//! rate-constrained lossy approximation.

pub mod arith;
pub mod bitio;
pub mod container;
pub mod corpus;
pub mod error;
pub mod format;
pub mod geom;
pub mod mask;
pub mod rd;
pub mod rice;
pub mod synth;
pub mod tree;
pub mod trie;
pub mod tst;

pub use arith::{ac_decode, ac_encode, ArithmeticDecoder, ArithmeticEncoder, FrequencyTriple};
pub use container::{decode_image, encode_image, encode_image_with_stats, EncodeStats};
pub use corpus::TrainingCorpus;
pub use error::{Error, Result};
pub use format::{format_contour, format_contours, parse_contours};
pub use geom::{AbsoluteDirection, DccContour, DccSymbol, GridPoint};
pub use mask::{parse_pbm, trace_mask, BitMask};
pub use rd::{approximate, ApproxResult, HistoryMode, RdMode, RdParams};
pub use synth::MarkovSource;
pub use tree::{ContextTree, TreeParams};
pub use trie::build_initial_tree;
pub use tst::TotalSuffixTree;

/// Full training pipeline: grow the initial counting trie, keep the best
/// `K` nodes, fill to a full tree, then prune to the MAP tree.
///
/// Returns the pruned tree together with its objective value.
pub fn train(corpus: &TrainingCorpus, params: TreeParams) -> (ContextTree, f64) {
    let trie = build_initial_tree(corpus, &params);
    let kept = trie.keep_top_k(params.budget);
    let root = kept.fill_to_full();
    let full = ContextTree {
        root,
        params,
        training_len: corpus.total_len(),
    };
    full.prune()
}
