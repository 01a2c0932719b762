//! Rate-constrained lossy contour approximation via dynamic programming
//! over (history, position, direction, budget) states.

use crate::error::{Error, Result};
use crate::geom::{min_distance_to_points, DccContour, DccSymbol, GridPoint};
use crate::tree::ContextTree;
use crate::tst::TotalSuffixTree;
use std::collections::BTreeMap;
use std::collections::HashMap;

/// Objective for the approximation search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdMode {
    /// Minimize sum of squared distance distortion plus `lambda` times rate.
    Ssdd,
    /// Minimize rate subject to the max-distance feasibility bound alone.
    Madd,
}

/// How DP histories are compacted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HistoryMode {
    /// Truncate along the total suffix tree of the model contexts.
    Tst,
    /// Keep the last `D` symbols verbatim.
    FullDepth,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RdParams {
    pub lambda: f64,
    pub d_max: f64,
    pub mode: RdMode,
    pub history: HistoryMode,
}

/// Outcome of one approximation; distortions are measured against the
/// original contour's vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxResult {
    pub contour: DccContour,
    /// DP objective value of the returned contour.
    pub cost: f64,
    /// Ideal code length of the symbols under the model, in bits.
    pub bits: f64,
    pub ssdd: f64,
    pub madd: f64,
    pub states_expanded: u64,
}

/// Sum over approximation vertices of the squared distance to the nearest
/// reference vertex.
pub fn ssdd(approx: &DccContour, reference: &DccContour) -> f64 {
    let ref_points = vertex_set(reference);
    approx
        .endpoints()
        .iter()
        .map(|&p| {
            let d = min_distance_to_points(p, &ref_points);
            d * d
        })
        .sum()
}

/// Maximum over approximation vertices of the distance to the nearest
/// reference vertex.
pub fn madd(approx: &DccContour, reference: &DccContour) -> f64 {
    let ref_points = vertex_set(reference);
    approx
        .endpoints()
        .iter()
        .map(|&p| min_distance_to_points(p, &ref_points))
        .fold(0.0, f64::max)
}

fn vertex_set(contour: &DccContour) -> Vec<GridPoint> {
    let mut points = contour.endpoints();
    points.push(contour.start);
    points
}

/// Ideal code length of the contour's symbols under the model, in bits.
pub fn ideal_bits(contour: &DccContour, tree: &ContextTree) -> f64 {
    let depth = tree.params.depth;
    let mut bits = 0.0;
    for (i, &sym) in contour.symbols.iter().enumerate() {
        let d = i.min(depth);
        let history: Vec<DccSymbol> = (0..d).map(|k| contour.symbols[i - 1 - k]).collect();
        bits -= tree.lookup(&history)[sym.index()].log2();
    }
    bits
}

type StateKey = (GridPoint, u8, Vec<DccSymbol>);

#[derive(Clone, Debug)]
struct StateNode {
    cost: f64,
    prev: Option<(StateKey, DccSymbol)>,
}

struct FeasibleSet<'a> {
    reference: &'a [GridPoint],
    d_max: f64,
    cache: HashMap<GridPoint, f64>,
}

impl<'a> FeasibleSet<'a> {
    fn distance(&mut self, p: GridPoint) -> f64 {
        *self
            .cache
            .entry(p)
            .or_insert_with(|| min_distance_to_points(p, self.reference))
    }

    fn admits(&mut self, p: GridPoint) -> bool {
        self.distance(p) <= self.d_max + 1e-9
    }
}

/// Find the best approximation of `x` under `params`. The approximation
/// shares the starting point and initial edge, stays within `d_max` of the
/// original vertices, uses at most as many symbols as the original, and
/// terminates on first arrival at the original's final vertex.
pub fn approximate(
    x: &DccContour,
    tree: &ContextTree,
    tst: &TotalSuffixTree,
    params: &RdParams,
) -> Result<ApproxResult> {
    let reference = vertex_set(x);
    let target = *x.endpoints().last().expect("at least one edge endpoint");
    let p1 = x.start.step(x.initial);
    let mut feasible = FeasibleSet {
        reference: &reference,
        d_max: params.d_max,
        cache: HashMap::new(),
    };
    let mut states_expanded = 0u64;

    let mut result_symbols = None;
    if p1 == target {
        result_symbols = Some((Vec::new(), 0.0));
    } else {
        let n = x.symbols.len();
        let mut layers: Vec<BTreeMap<StateKey, StateNode>> = Vec::with_capacity(n + 1);
        let mut first = BTreeMap::new();
        first.insert(
            (p1, x.initial.code(), Vec::new()),
            StateNode {
                cost: 0.0,
                prev: None,
            },
        );
        layers.push(first);
        // best terminating transition: (cost, source layer, source key, symbol)
        let mut best: Option<(f64, usize, StateKey, DccSymbol)> = None;
        for j in 0..n {
            let mut next: BTreeMap<StateKey, StateNode> = BTreeMap::new();
            let keys: Vec<StateKey> = layers[j].keys().cloned().collect();
            for key in keys {
                let node_cost = layers[j][&key].cost;
                states_expanded += 1;
                let (coord, dir_code, ref history) = key;
                let dir = crate::geom::AbsoluteDirection::from_code(dir_code).unwrap();
                let p = tree.lookup(history);
                // tie-break order: straight, then left, then right
                for sym in [DccSymbol::Straight, DccSymbol::Left, DccSymbol::Right] {
                    let new_dir = dir.rotate(sym);
                    let new_coord = coord.step(new_dir);
                    if !feasible.admits(new_coord) {
                        continue;
                    }
                    let rate = -p[sym.index()].log2();
                    let dist = feasible.distance(new_coord);
                    let local = match params.mode {
                        RdMode::Ssdd => dist * dist + params.lambda * rate,
                        RdMode::Madd => rate,
                    };
                    let cost = node_cost + local;
                    if new_coord == target {
                        if best.as_ref().map_or(true, |b| cost < b.0) {
                            best = Some((cost, j, key.clone(), sym));
                        }
                    } else if j + 1 < n {
                        let mut new_history = Vec::with_capacity(history.len() + 1);
                        new_history.push(sym);
                        new_history.extend_from_slice(history);
                        let truncated: Vec<DccSymbol> = match params.history {
                            HistoryMode::Tst => tst.truncate_history(&new_history).to_vec(),
                            HistoryMode::FullDepth => {
                                new_history.truncate(tree.params.depth);
                                new_history
                            }
                        };
                        let new_key = (new_coord, new_dir.code(), truncated);
                        let better = next
                            .get(&new_key)
                            .map_or(true, |existing| cost < existing.cost);
                        if better {
                            next.insert(
                                new_key,
                                StateNode {
                                    cost,
                                    prev: Some((key.clone(), sym)),
                                },
                            );
                        }
                    }
                }
            }
            layers.push(next);
        }
        if let Some((cost, j, key, last_sym)) = best {
            let mut symbols = vec![last_sym];
            let mut layer = j;
            let mut cursor = key;
            while let Some((prev_key, sym)) = layers[layer][&cursor].prev.clone() {
                symbols.push(sym);
                cursor = prev_key;
                layer -= 1;
            }
            symbols.reverse();
            result_symbols = Some((symbols, cost));
        }
    }

    let (symbols, cost) = result_symbols.ok_or(Error::Infeasible)?;
    let contour = DccContour::new(x.start, x.initial, symbols);
    let bits = ideal_bits(&contour, tree);
    Ok(ApproxResult {
        ssdd: ssdd(&contour, x),
        madd: madd(&contour, x),
        contour,
        cost,
        bits,
        states_expanded,
    })
}
