//! Synthetic order-2 Markov symbol sources with known entropy rate, for
//! model and coder calibration.

use crate::geom::DccSymbol;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Order-2 Markov source over {l,s,r}. `table[c]` is the next-symbol
/// distribution for context index `c = 3·index(s_{i-1}) + index(s_{i-2})`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovSource {
    pub table: [[f64; 3]; 9],
}

fn context_index(last: DccSymbol, second_last: DccSymbol) -> usize {
    3 * last.index() + second_last.index()
}

impl MarkovSource {
    /// A fixed, fairly skewed source used throughout the tests: straight
    /// runs persist, turns tend to alternate.
    pub fn example() -> MarkovSource {
        let mut table = [[1.0 / 3.0; 3]; 9];
        for last in DccSymbol::ALL {
            for second in DccSymbol::ALL {
                let c = context_index(last, second);
                table[c] = match (last, second) {
                    (DccSymbol::Straight, DccSymbol::Straight) => [0.05, 0.90, 0.05],
                    (DccSymbol::Straight, _) => [0.15, 0.70, 0.15],
                    (DccSymbol::Left, DccSymbol::Left) => [0.10, 0.30, 0.60],
                    (DccSymbol::Left, _) => [0.25, 0.50, 0.25],
                    (DccSymbol::Right, DccSymbol::Right) => [0.60, 0.30, 0.10],
                    (DccSymbol::Right, _) => [0.25, 0.50, 0.25],
                };
            }
        }
        MarkovSource { table }
    }

    /// Draw `len` symbols; the first two are uniform, the rest follow the
    /// chain.
    pub fn sample(&self, len: usize, seed: u64) -> Vec<DccSymbol> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<DccSymbol> = Vec::with_capacity(len);
        for i in 0..len {
            let p = if i < 2 {
                [1.0 / 3.0; 3]
            } else {
                self.table[context_index(out[i - 1], out[i - 2])]
            };
            let u: f64 = rng.gen();
            let sym = if u < p[0] {
                DccSymbol::Left
            } else if u < p[0] + p[1] {
                DccSymbol::Straight
            } else {
                DccSymbol::Right
            };
            out.push(sym);
        }
        out
    }

    /// Stationary distribution of the 9-state chain on (s_{i-1}, s_{i-2})
    /// pairs, by power iteration.
    fn stationary(&self) -> [f64; 9] {
        let mut pi = [1.0 / 9.0; 9];
        for _ in 0..500 {
            let mut next = [0.0; 9];
            for last in DccSymbol::ALL {
                for second in DccSymbol::ALL {
                    let c = context_index(last, second);
                    for sym in DccSymbol::ALL {
                        // (last, second) -> (sym, last)
                        next[context_index(sym, last)] += pi[c] * self.table[c][sym.index()];
                    }
                }
            }
            pi = next;
        }
        pi
    }

    /// Entropy rate in bits per symbol.
    pub fn entropy_rate(&self) -> f64 {
        let pi = self.stationary();
        let mut h = 0.0;
        for c in 0..9 {
            for &p in &self.table[c] {
                if p > 0.0 {
                    h -= pi[c] * p * p.log2();
                }
            }
        }
        h
    }
}
