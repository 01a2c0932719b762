//! Total suffix tree: the suffix-closure of a context tree's contexts,
//! used to truncate DP histories without losing context distinctions.

use crate::geom::DccSymbol;
use crate::tree::ContextTree;

#[derive(Clone, Debug, Default, PartialEq)]
struct TstNode {
    children: Option<Box<[TstNode; 3]>>,
}

/// Full ternary tree containing every suffix of every context of the
/// source tree.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalSuffixTree {
    root: TstNode,
}

impl TotalSuffixTree {
    /// Build the TST from the contexts of a (pruned) context tree.
    ///
    /// Every suffix of every context (dropping most-recent symbols) is
    /// inserted; sibling trios are allocated together, so the result is a
    /// full tree by construction.
    pub fn build(tree: &ContextTree) -> TotalSuffixTree {
        let mut root = TstNode::default();
        for context in tree.contexts() {
            for k in 0..context.len() {
                insert(&mut root, &context[k..]);
            }
        }
        TotalSuffixTree { root }
    }

    /// Longest recent-first prefix of `history` that is a root-down path
    /// of the TST. Because the TST is full, the result either ends at an
    /// end node or exhausts the history.
    pub fn truncate_history<'a>(&self, history: &'a [DccSymbol]) -> &'a [DccSymbol] {
        let mut node = &self.root;
        for (i, sym) in history.iter().enumerate() {
            match &node.children {
                Some(children) => node = &children[sym.index()],
                None => return &history[..i],
            }
        }
        history
    }

    /// End-node sub-strings, recent-first, in preorder.
    pub fn end_contexts(&self) -> Vec<Vec<DccSymbol>> {
        let mut out = Vec::new();
        fn walk(node: &TstNode, path: &mut Vec<DccSymbol>, out: &mut Vec<Vec<DccSymbol>>) {
            match &node.children {
                None => out.push(path.clone()),
                Some(children) => {
                    for (i, child) in children.iter().enumerate() {
                        path.push(DccSymbol::from_index(i).unwrap());
                        walk(child, path, out);
                        path.pop();
                    }
                }
            }
        }
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }

    /// True when the recent-first string is a node of the TST.
    pub fn contains(&self, s: &[DccSymbol]) -> bool {
        let mut node = &self.root;
        for sym in s {
            match &node.children {
                Some(children) => node = &children[sym.index()],
                None => return false,
            }
        }
        true
    }
}

fn insert(root: &mut TstNode, path: &[DccSymbol]) {
    let mut node = root;
    for sym in path {
        let children = node
            .children
            .get_or_insert_with(|| Box::new([TstNode::default(), TstNode::default(), TstNode::default()]));
        node = &mut children[sym.index()];
    }
}
