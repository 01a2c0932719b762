//! Occurrence-count trie over reversed sub-strings and the construction of
//! the bounded initial context tree.

use crate::corpus::TrainingCorpus;
use crate::geom::DccSymbol;
use crate::tree::{TreeNode, TreeParams};
use std::cmp::Reverse;

#[derive(Clone, Debug)]
struct CountNode {
    parent: usize,
    /// Link symbol from the parent; unused for the root.
    label: DccSymbol,
    depth: usize,
    children: [Option<usize>; 3],
    /// Occurrence counters N(l·u), N(s·u), N(r·u).
    counts: [u64; 3],
}

/// Trie of counted sub-strings, most recent symbol nearest the root.
#[derive(Clone, Debug)]
pub struct CountTrie {
    nodes: Vec<CountNode>,
}

const ROOT: usize = 0;

impl CountTrie {
    fn new() -> CountTrie {
        CountTrie {
            nodes: vec![CountNode {
                parent: ROOT,
                label: DccSymbol::Left,
                depth: 0,
                children: [None; 3],
                counts: [0; 3],
            }],
        }
    }

    /// Number of counted (non-root) nodes.
    pub fn counted_nodes(&self) -> usize {
        self.nodes.len() - 1
    }

    fn add_child(&mut self, parent: usize, sym: DccSymbol) -> usize {
        let idx = self.nodes.len();
        let depth = self.nodes[parent].depth + 1;
        self.nodes.push(CountNode {
            parent,
            label: sym,
            depth,
            children: [None; 3],
            counts: [0; 3],
        });
        self.nodes[parent].children[sym.index()] = Some(idx);
        idx
    }

    /// Context of a node, most recent symbol first.
    fn context(&self, mut idx: usize) -> Vec<DccSymbol> {
        let mut ctx = Vec::with_capacity(self.nodes[idx].depth);
        while idx != ROOT {
            ctx.push(self.nodes[idx].label);
            idx = self.nodes[idx].parent;
        }
        ctx.reverse();
        ctx
    }

    fn occurrences(&self, idx: usize) -> u64 {
        self.nodes[idx].counts.iter().sum()
    }

    /// Occurrence counters of the sub-string `u` (recent-first), if counted.
    pub fn counts(&self, u: &[DccSymbol]) -> Option<[u64; 3]> {
        let mut idx = ROOT;
        for &sym in u {
            idx = self.nodes[idx].children[sym.index()]?;
        }
        Some(self.nodes[idx].counts)
    }

    /// Keep the `k` sub-strings with the largest occurrence counts (ties:
    /// shorter context first, then lexicographic l<s<r) together with their
    /// ancestors, dropping everything else.
    pub fn keep_top_k(&self, k: usize) -> CountTrie {
        let mut order: Vec<usize> = (1..self.nodes.len()).collect();
        order.sort_by_cached_key(|&idx| {
            (
                Reverse(self.occurrences(idx)),
                self.nodes[idx].depth,
                self.context(idx),
            )
        });
        let mut keep = vec![false; self.nodes.len()];
        keep[ROOT] = true;
        for &idx in order.iter().take(k) {
            let mut cur = idx;
            while !keep[cur] {
                keep[cur] = true;
                cur = self.nodes[cur].parent;
            }
        }
        // rebuild in original index order so parents precede children
        let mut pruned = CountTrie::new();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        remap[ROOT] = ROOT;
        for idx in 1..self.nodes.len() {
            if keep[idx] {
                let parent = remap[self.nodes[idx].parent];
                let new_idx = pruned.add_child(parent, self.nodes[idx].label);
                pruned.nodes[new_idx].counts = self.nodes[idx].counts;
                remap[idx] = new_idx;
            }
        }
        pruned
    }

    /// Make the trie a full ternary tree with real-valued counts.
    ///
    /// Every node with at least one child receives all three; an added
    /// child inherits its parent's conditional distribution and its
    /// occurrence count is set so sibling counts sum to the parent's,
    /// clamped at zero when boundary effects leave a negative remainder.
    pub fn fill_to_full(&self) -> TreeNode {
        self.fill_node(ROOT)
    }

    fn fill_node(&self, idx: usize) -> TreeNode {
        let node = &self.nodes[idx];
        let own_counts: [f64; 3] = if idx == ROOT {
            // the root is never counted directly; its counters are the
            // occurrence totals of its children
            let mut c = [0.0; 3];
            for (i, child) in node.children.iter().enumerate() {
                if let Some(child) = child {
                    c[i] = self.occurrences(*child) as f64;
                }
            }
            c
        } else {
            [
                node.counts[0] as f64,
                node.counts[1] as f64,
                node.counts[2] as f64,
            ]
        };
        if node.children.iter().all(Option::is_none) {
            return TreeNode {
                counts: own_counts,
                children: None,
            };
        }
        let n_u: f64 = own_counts.iter().sum();
        let existing_total: f64 = node
            .children
            .iter()
            .flatten()
            .map(|&c| self.occurrences(c) as f64)
            .sum();
        let missing = node.children.iter().filter(|c| c.is_none()).count();
        let added_occ = if missing == 0 {
            0.0
        } else {
            ((n_u - existing_total) / missing as f64).max(0.0)
        };
        let parent_dist: [f64; 3] = if n_u > 0.0 {
            [
                own_counts[0] / n_u,
                own_counts[1] / n_u,
                own_counts[2] / n_u,
            ]
        } else {
            [0.0; 3]
        };
        let children = std::array::from_fn(|i| match node.children[i] {
            Some(child) => self.fill_node(child),
            None => TreeNode {
                counts: [
                    added_occ * parent_dist[0],
                    added_occ * parent_dist[1],
                    added_occ * parent_dist[2],
                ],
                children: None,
            },
        });
        TreeNode {
            counts: own_counts,
            children: Some(Box::new(children)),
        }
    }
}

/// Single-pass statistics collection over the corpus (Algorithm "choose K
/// potential contexts"): for each symbol at position `i >= D+2` the reversed
/// prefixes of length `1..=D` are matched against the trie; matched nodes
/// count the following symbol, new nodes are admitted first-come while the
/// trie holds fewer than `2K` counted nodes.
pub fn build_initial_tree(corpus: &TrainingCorpus, params: &TreeParams) -> CountTrie {
    let depth = params.depth;
    let cap = 2 * params.budget;
    let mut trie = CountTrie::new();
    for s in &corpus.strings {
        // position i is 1-based; the first counted position is D+2
        for i in (depth + 2)..=s.len() {
            let next = s[i - 1];
            let mut node = ROOT;
            for k in 1..=depth {
                let sym = s[i - 1 - k];
                node = match trie.nodes[node].children[sym.index()] {
                    Some(child) => child,
                    None => {
                        if trie.counted_nodes() >= cap {
                            break;
                        }
                        trie.add_child(node, sym)
                    }
                };
                trie.nodes[node].counts[next.index()] += 1;
            }
        }
    }
    trie
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::count_occurrences;
    use crate::geom::parse_symbols;
    use crate::tree::TreeParams;

    fn corpus(strings: &[&str]) -> TrainingCorpus {
        TrainingCorpus::new(strings.iter().map(|s| parse_symbols(s).unwrap()).collect())
    }

    #[test]
    fn all_straight_corpus_only_grows_s_chain() {
        let c = corpus(&["ssssssss"]);
        let params = TreeParams {
            depth: 3,
            budget: 30,
            ..TreeParams::default_for(c.total_len())
        };
        let trie = build_initial_tree(&c, &params);
        for depth in 1..=3usize {
            let ctx = vec![crate::geom::DccSymbol::Straight; depth];
            assert!(trie.counts(&ctx).is_some());
        }
        // no other depth-1 node exists
        assert!(trie.counts(&parse_symbols("l").unwrap()).is_none());
        assert!(trie.counts(&parse_symbols("r").unwrap()).is_none());
    }

    #[test]
    fn admission_respects_2k_bound() {
        let c = corpus(&["lsrlsrllrrssllsrsrlrslsrrrsllsr"]);
        let params = TreeParams {
            depth: 4,
            budget: 3,
            ..TreeParams::default_for(c.total_len())
        };
        let trie = build_initial_tree(&c, &params);
        assert!(trie.counted_nodes() <= 2 * params.budget);
    }

    #[test]
    fn k_equals_one_keeps_most_frequent_chain() {
        let c = corpus(&["ssslssslsssl"]);
        let params = TreeParams {
            depth: 2,
            budget: 100,
            ..TreeParams::default_for(c.total_len())
        };
        let trie = build_initial_tree(&c, &params).keep_top_k(1);
        // "s" is the most frequent length-1 sub-string by exhaustive count
        let best = count_occurrences(&c, &parse_symbols("s").unwrap());
        for other in ["l", "r"] {
            assert!(count_occurrences(&c, &parse_symbols(other).unwrap()) < best);
        }
        assert_eq!(trie.counted_nodes(), 1);
        assert!(trie.counts(&parse_symbols("s").unwrap()).is_some());
    }

    #[test]
    fn short_corpus_yields_root_only() {
        let c = corpus(&["ls"]);
        let params = TreeParams {
            depth: 3,
            budget: 10,
            ..TreeParams::default_for(c.total_len())
        };
        let trie = build_initial_tree(&c, &params);
        assert_eq!(trie.counted_nodes(), 0);
    }

    #[test]
    fn fill_single_added_child_gets_remainder() {
        // hand-build: root -> s with counts summing 6, children sl=3, ss=2
        let mut trie = CountTrie::new();
        let s = trie.add_child(ROOT, crate::geom::DccSymbol::Straight);
        trie.nodes[s].counts = [2, 2, 2];
        let sl = trie.add_child(s, crate::geom::DccSymbol::Left);
        trie.nodes[sl].counts = [3, 0, 0];
        let ss = trie.add_child(s, crate::geom::DccSymbol::Straight);
        trie.nodes[ss].counts = [0, 2, 0];
        let full = trie.fill_to_full();
        let root_children = full.children.as_ref().unwrap();
        let s_node = &root_children[1];
        let s_children = s_node.children.as_ref().unwrap();
        let added = &s_children[2]; // "sr" was missing
        let added_n: f64 = added.counts.iter().sum();
        assert!((added_n - 1.0).abs() < 1e-12);
        // inherits parent's distribution
        assert!((added.counts[0] - 1.0 * (2.0 / 6.0)).abs() < 1e-12);
        // sibling occurrences sum to the parent's
        let total: f64 = s_children
            .iter()
            .map(|c| c.counts.iter().sum::<f64>())
            .sum();
        assert!((total - 6.0).abs() < 1e-12);
    }

    #[test]
    fn fill_two_added_children_split_remainder() {
        let mut trie = CountTrie::new();
        let s = trie.add_child(ROOT, crate::geom::DccSymbol::Straight);
        trie.nodes[s].counts = [2, 2, 2];
        let sl = trie.add_child(s, crate::geom::DccSymbol::Left);
        trie.nodes[sl].counts = [2, 0, 0];
        let full = trie.fill_to_full();
        let s_node = &full.children.as_ref().unwrap()[1];
        let s_children = s_node.children.as_ref().unwrap();
        for added in [&s_children[1], &s_children[2]] {
            let n: f64 = added.counts.iter().sum();
            assert!((n - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fill_keeps_leaves_untouched() {
        let mut trie = CountTrie::new();
        let l = trie.add_child(ROOT, crate::geom::DccSymbol::Left);
        trie.nodes[l].counts = [1, 2, 3];
        let full = trie.fill_to_full();
        let l_node = &full.children.as_ref().unwrap()[0];
        assert!(l_node.children.is_none());
        assert_eq!(l_node.counts, [1.0, 2.0, 3.0]);
    }

    #[test]
    fn fill_clamps_negative_remainder() {
        let mut trie = CountTrie::new();
        let s = trie.add_child(ROOT, crate::geom::DccSymbol::Straight);
        trie.nodes[s].counts = [1, 1, 1]; // N(u) = 3
        let sl = trie.add_child(s, crate::geom::DccSymbol::Left);
        trie.nodes[sl].counts = [5, 0, 0]; // boundary windows overshoot
        let full = trie.fill_to_full();
        let s_node = &full.children.as_ref().unwrap()[1];
        for added in [&s_node.children.as_ref().unwrap()[1], &s_node.children.as_ref().unwrap()[2]] {
            assert_eq!(added.counts.iter().sum::<f64>(), 0.0);
        }
    }
}
