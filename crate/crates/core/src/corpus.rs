//! Training corpora of DCC symbol strings and sub-string statistics.

use crate::geom::DccContour;
use crate::geom::DccSymbol;

/// A set of DCC symbol strings used to train the context model.
#[derive(Clone, Debug, Default)]
pub struct TrainingCorpus {
    pub strings: Vec<Vec<DccSymbol>>,
}

impl TrainingCorpus {
    pub fn new(strings: Vec<Vec<DccSymbol>>) -> TrainingCorpus {
        TrainingCorpus { strings }
    }

    pub fn from_contours<'a, I: IntoIterator<Item = &'a DccContour>>(contours: I) -> Self {
        TrainingCorpus {
            strings: contours
                .into_iter()
                .map(|c| c.symbols.clone())
                .collect(),
        }
    }

    /// Number of strings, `M`.
    pub fn string_count(&self) -> usize {
        self.strings.len()
    }

    /// Total number of symbols, `L`.
    pub fn total_len(&self) -> u64 {
        self.strings.iter().map(|s| s.len() as u64).sum()
    }
}

/// Number of occurrences of sub-string `u` in the corpus.
///
/// `u` is given most-recent-symbol-first; a forward window of the string
/// matches when its reversal equals `u`.
pub fn count_occurrences(corpus: &TrainingCorpus, u: &[DccSymbol]) -> u64 {
    assert!(!u.is_empty());
    let n = u.len();
    let mut count = 0;
    for s in &corpus.strings {
        if s.len() < n {
            continue;
        }
        for window in s.windows(n) {
            if window.iter().rev().eq(u.iter()) {
                count += 1;
            }
        }
    }
    count
}
