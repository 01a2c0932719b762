//! The variable-length context tree: geometric straightness prior,
//! MAP end-node cost, pruning, probability lookup and the model file.

use crate::error::{Error, Result};
use crate::geom::{AbsoluteDirection, DccSymbol, GridPoint};
use sha2::{Digest, Sha256};

/// Model-building parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeParams {
    /// Maximum context depth D.
    pub depth: usize,
    /// Node budget K for the initial tree.
    pub budget: usize,
    /// Prior weight coefficient; the effective weight is a·ln(L)/L.
    pub a: f64,
    /// Laplace smoothing applied at probability lookup only.
    pub beta: f64,
}

impl TreeParams {
    /// D = ⌈ln L / ln 3⌉, K = 3·D³, a = 0.25, β = 1.
    pub fn default_for(total_len: u64) -> TreeParams {
        let depth = if total_len <= 1 {
            0
        } else {
            ((total_len as f64).ln() / 3f64.ln()).ceil() as usize
        };
        TreeParams {
            depth,
            budget: 3 * depth * depth * depth,
            a: 0.25,
            beta: 1.0,
        }
    }
}

/// A node of a (full) context tree; `children` is `None` for end nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    /// Occurrence counters N(l·u), N(s·u), N(r·u); real-valued because
    /// added children carry fractional inherited counts.
    pub counts: [f64; 3],
    pub children: Option<Box<[TreeNode; 3]>>,
}

impl TreeNode {
    pub fn occurrences(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn is_end(&self) -> bool {
        self.children.is_none()
    }
}

/// A full ternary context tree together with its training parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextTree {
    pub root: TreeNode,
    pub params: TreeParams,
    /// Total training symbols L.
    pub training_len: u64,
}

/// Straightness s(w) of a context (recent-first): map the context to a
/// shape segment starting with an East initial edge, then the maximum
/// distance from any point to the chord through the first and last points.
pub fn straightness(w: &[DccSymbol]) -> f64 {
    let mut points = Vec::with_capacity(w.len() + 2);
    let mut p = GridPoint::new(0, 0);
    points.push(p);
    let mut dir = AbsoluteDirection::East;
    p = p.step(dir);
    points.push(p);
    for &sym in w {
        dir = dir.rotate(sym);
        p = p.step(dir);
        points.push(p);
    }
    let first = points[0];
    let last = *points.last().unwrap();
    let dx = (last.x - first.x) as f64;
    let dy = (last.y - first.y) as f64;
    let chord = (dx * dx + dy * dy).sqrt();
    points
        .iter()
        .map(|&q| {
            let qx = (q.x - first.x) as f64;
            let qy = (q.y - first.y) as f64;
            if chord == 0.0 {
                // degenerate chord (closed context path)
                (qx * qx + qy * qy).sqrt()
            } else {
                (qx * dy - qy * dx).abs() / chord
            }
        })
        .fold(0.0, f64::max)
}

/// End-node cost f(w): average negative log-likelihood of the counts at
/// `w` plus the straightness prior a·(ln L / L)·s(w). Natural log.
pub fn node_cost(counts: &[f64; 3], s_w: f64, total_len: u64, a: f64) -> f64 {
    let l = total_len.max(1) as f64;
    let n: f64 = counts.iter().sum();
    let mut likelihood = 0.0;
    if n > 0.0 {
        for &c in counts {
            if c > 0.0 {
                likelihood -= c / l * (c / n).ln();
            }
        }
    }
    likelihood + a * l.ln() / l * s_w
}

/// Likelihood change from pruning three end-node children of a parent,
/// written as −(1/L)·Σ_v N(u·v)·KLD(P(·|u·v) ‖ P(·|u)). Always ≤ 0.
pub fn kld_prune_delta(parent: &[f64; 3], children: &[[f64; 3]; 3], total_len: u64) -> f64 {
    let l = total_len.max(1) as f64;
    let n_u: f64 = parent.iter().sum();
    let mut delta = 0.0;
    for child in children {
        let n_uv: f64 = child.iter().sum();
        if n_uv == 0.0 {
            continue;
        }
        let mut kld = 0.0;
        for x in 0..3 {
            let p_child = child[x] / n_uv;
            if p_child > 0.0 {
                let p_parent = parent[x] / n_u;
                kld += p_child * (p_child / p_parent).ln();
            }
        }
        delta -= n_uv / l * kld;
    }
    delta
}

/// The same likelihood change evaluated directly from the two likelihood
/// terms, used to cross-check [`kld_prune_delta`].
pub fn direct_prune_delta(parent: &[f64; 3], children: &[[f64; 3]; 3], total_len: u64) -> f64 {
    let children_cost: f64 = children
        .iter()
        .map(|c| node_cost(c, 0.0, total_len, 0.0))
        .sum();
    let parent_cost = node_cost(parent, 0.0, total_len, 0.0);
    children_cost - parent_cost
}

impl ContextTree {
    /// Number of end nodes (contexts).
    pub fn end_node_count(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match &node.children {
                None => 1,
                Some(c) => c.iter().map(walk).sum(),
            }
        }
        walk(&self.root)
    }

    pub fn max_depth(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match &node.children {
                None => 0,
                Some(c) => 1 + c.iter().map(walk).max().unwrap(),
            }
        }
        walk(&self.root)
    }

    /// All contexts (end-node sub-strings), recent-first.
    pub fn contexts(&self) -> Vec<Vec<DccSymbol>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn walk(node: &TreeNode, path: &mut Vec<DccSymbol>, out: &mut Vec<Vec<DccSymbol>>) {
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
        walk(&self.root, &mut path, &mut out);
        out
    }

    /// Objective F(T) = Σ_w f(w) over the end nodes.
    pub fn objective(&self) -> f64 {
        let mut path = Vec::new();
        self.objective_node(&self.root, &mut path)
    }

    fn objective_node(&self, node: &TreeNode, path: &mut Vec<DccSymbol>) -> f64 {
        match &node.children {
            None => node_cost(
                &node.counts,
                straightness(path),
                self.training_len,
                self.params.a,
            ),
            Some(children) => {
                let mut sum = 0.0;
                for (i, child) in children.iter().enumerate() {
                    path.push(DccSymbol::from_index(i).unwrap());
                    sum += self.objective_node(child, path);
                    path.pop();
                }
                sum
            }
        }
    }

    /// Prune to the full subtree minimizing F(T); ties prefer pruning.
    /// Returns the optimal tree and its objective value.
    pub fn prune(&self) -> (ContextTree, f64) {
        let mut path = Vec::new();
        let (cost, root) = self.prune_node(&self.root, &mut path);
        (
            ContextTree {
                root,
                params: self.params,
                training_len: self.training_len,
            },
            cost,
        )
    }

    fn prune_node(&self, node: &TreeNode, path: &mut Vec<DccSymbol>) -> (f64, TreeNode) {
        let f_here = node_cost(
            &node.counts,
            straightness(path),
            self.training_len,
            self.params.a,
        );
        let end = TreeNode {
            counts: node.counts,
            children: None,
        };
        match &node.children {
            None => (f_here, end),
            Some(children) => {
                let mut sum = 0.0;
                let pruned: [TreeNode; 3] = std::array::from_fn(|i| {
                    path.push(DccSymbol::from_index(i).unwrap());
                    let (cost, child) = self.prune_node(&children[i], path);
                    path.pop();
                    sum += cost;
                    child
                });
                if sum < f_here {
                    (
                        sum,
                        TreeNode {
                            counts: node.counts,
                            children: Some(Box::new(pruned)),
                        },
                    )
                } else {
                    (f_here, end)
                }
            }
        }
    }

    /// Conditional distribution for the next symbol given a recent-first
    /// history: walk from the root until an end node or the history is
    /// exhausted, then β-smooth the counts of the deepest matched node.
    pub fn lookup(&self, history: &[DccSymbol]) -> [f64; 3] {
        let mut node = &self.root;
        for &sym in history {
            match &node.children {
                Some(children) => node = &children[sym.index()],
                None => break,
            }
        }
        let beta = self.params.beta;
        let n = node.occurrences();
        std::array::from_fn(|i| (node.counts[i] + beta) / (n + 3.0 * beta))
    }

    // --- model file ---

    const MAGIC: &'static [u8; 4] = b"CTM1";

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(Self::MAGIC);
        out.extend_from_slice(&(self.params.depth as u16).to_le_bytes());
        out.extend_from_slice(&(self.params.budget as u32).to_le_bytes());
        out.extend_from_slice(&((self.params.a * 1000.0).round() as u32).to_le_bytes());
        out.extend_from_slice(&((self.params.beta * 1000.0).round() as u32).to_le_bytes());
        out.extend_from_slice(&self.training_len.to_le_bytes());
        fn walk(node: &TreeNode, depth: u8, label: u8, out: &mut Vec<u8>) {
            out.push(depth);
            out.push(label);
            out.push(node.children.is_some() as u8);
            for c in &node.counts {
                out.extend_from_slice(&c.to_le_bytes());
            }
            if let Some(children) = &node.children {
                for (i, child) in children.iter().enumerate() {
                    walk(child, depth + 1, i as u8, out);
                }
            }
        }
        walk(&self.root, 0, 0xFF, &mut out);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ContextTree> {
        let invalid = |reason: &str| Error::InvalidModel(reason.to_string());
        if bytes.len() < 26 || &bytes[0..4] != Self::MAGIC {
            return Err(invalid("bad magic or short header"));
        }
        let depth = u16::from_le_bytes(bytes[4..6].try_into().unwrap()) as usize;
        let budget = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
        let a = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as f64 / 1000.0;
        let beta = u32::from_le_bytes(bytes[14..18].try_into().unwrap()) as f64 / 1000.0;
        let training_len = u64::from_le_bytes(bytes[18..26].try_into().unwrap());
        let mut pos = 26;
        fn read_node(bytes: &[u8], pos: &mut usize, depth: u8) -> Result<TreeNode> {
            let invalid = |reason: &str| Error::InvalidModel(reason.to_string());
            if bytes.len() < *pos + 27 {
                return Err(invalid("truncated node record"));
            }
            if bytes[*pos] != depth {
                return Err(invalid("node depth out of order"));
            }
            let has_children = match bytes[*pos + 2] {
                0 => false,
                1 => true,
                _ => return Err(invalid("bad child flag")),
            };
            let mut counts = [0.0; 3];
            for (i, c) in counts.iter_mut().enumerate() {
                let off = *pos + 3 + 8 * i;
                *c = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
                if !c.is_finite() || *c < 0.0 {
                    return Err(invalid("bad count"));
                }
            }
            *pos += 27;
            let children = if has_children {
                let c: [TreeNode; 3] = [
                    read_node(bytes, pos, depth + 1)?,
                    read_node(bytes, pos, depth + 1)?,
                    read_node(bytes, pos, depth + 1)?,
                ];
                Some(Box::new(c))
            } else {
                None
            };
            Ok(TreeNode { counts, children })
        }
        let root = read_node(bytes, &mut pos, 0)?;
        if pos != bytes.len() {
            return Err(invalid("trailing bytes"));
        }
        Ok(ContextTree {
            root,
            params: TreeParams {
                depth,
                budget,
                a,
                beta,
            },
            training_len,
        })
    }

    /// Model identity carried in bitstream headers: the first eight bytes
    /// of the SHA-256 of the canonical serialization, big-endian.
    pub fn hash(&self) -> u64 {
        let digest = Sha256::digest(self.to_bytes());
        u64::from_be_bytes(digest[0..8].try_into().unwrap())
    }

    /// Human-readable dump for diffing: one node per line in preorder.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        fn walk(node: &TreeNode, path: &mut Vec<DccSymbol>, out: &mut String) {
            let ctx: String = if path.is_empty() {
                "-".to_string()
            } else {
                path.iter().map(|s| s.letter()).collect()
            };
            let kind = if node.is_end() { "end" } else { "int" };
            out.push_str(&format!(
                "{} {} {} {:.6} {:.6} {:.6}\n",
                path.len(),
                ctx,
                kind,
                node.counts[0],
                node.counts[1],
                node.counts[2]
            ));
            if let Some(children) = &node.children {
                for (i, child) in children.iter().enumerate() {
                    path.push(DccSymbol::from_index(i).unwrap());
                    walk(child, path, out);
                    path.pop();
                }
            }
        }
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }
}


#[cfg(test)]
pub(crate) use tests::reference_tree;
