//! Chain-code geometry: the two alphabets, grid points and differential
//! chain code (DCC) contours.
//!
//! Coordinates are between-pixel lattice points in the image frame, with
//! `y` growing downwards (row direction). `North` therefore points towards
//! smaller `y`.

use crate::error::{Error, Result};

/// One of the four absolute edge directions on the pixel grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AbsoluteDirection {
    North,
    East,
    South,
    West,
}

impl AbsoluteDirection {
    pub const ALL: [AbsoluteDirection; 4] = [
        AbsoluteDirection::North,
        AbsoluteDirection::East,
        AbsoluteDirection::South,
        AbsoluteDirection::West,
    ];

    /// Unit displacement in image coordinates (y down).
    pub fn delta(self) -> (i32, i32) {
        match self {
            AbsoluteDirection::North => (0, -1),
            AbsoluteDirection::East => (1, 0),
            AbsoluteDirection::South => (0, 1),
            AbsoluteDirection::West => (-1, 0),
        }
    }

    /// Direction after turning by the given relative symbol.
    ///
    /// `s` is the identity, `l` turns left (N→W→S→E→N), `r` turns right.
    pub fn rotate(self, symbol: DccSymbol) -> AbsoluteDirection {
        use AbsoluteDirection::*;
        match symbol {
            DccSymbol::Straight => self,
            DccSymbol::Left => match self {
                North => West,
                West => South,
                South => East,
                East => North,
            },
            DccSymbol::Right => match self {
                North => East,
                East => South,
                South => West,
                West => North,
            },
        }
    }

    pub fn opposite(self) -> AbsoluteDirection {
        use AbsoluteDirection::*;
        match self {
            North => South,
            South => North,
            East => West,
            West => East,
        }
    }

    /// Two-bit code used in the bitstream (N=0, E=1, S=2, W=3).
    pub fn code(self) -> u8 {
        match self {
            AbsoluteDirection::North => 0,
            AbsoluteDirection::East => 1,
            AbsoluteDirection::South => 2,
            AbsoluteDirection::West => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<AbsoluteDirection> {
        match code {
            0 => Some(AbsoluteDirection::North),
            1 => Some(AbsoluteDirection::East),
            2 => Some(AbsoluteDirection::South),
            3 => Some(AbsoluteDirection::West),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            AbsoluteDirection::North => 'N',
            AbsoluteDirection::East => 'E',
            AbsoluteDirection::South => 'S',
            AbsoluteDirection::West => 'W',
        }
    }

    pub fn from_letter(c: char) -> Option<AbsoluteDirection> {
        match c {
            'N' => Some(AbsoluteDirection::North),
            'E' => Some(AbsoluteDirection::East),
            'S' => Some(AbsoluteDirection::South),
            'W' => Some(AbsoluteDirection::West),
            _ => None,
        }
    }
}

/// A relative direction symbol from the size-three alphabet {l, s, r}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DccSymbol {
    Left,
    Straight,
    Right,
}

impl DccSymbol {
    /// Lexicographic order l < s < r, also the index used everywhere a
    /// per-symbol triple is stored.
    pub const ALL: [DccSymbol; 3] = [DccSymbol::Left, DccSymbol::Straight, DccSymbol::Right];

    pub fn index(self) -> usize {
        match self {
            DccSymbol::Left => 0,
            DccSymbol::Straight => 1,
            DccSymbol::Right => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<DccSymbol> {
        match i {
            0 => Some(DccSymbol::Left),
            1 => Some(DccSymbol::Straight),
            2 => Some(DccSymbol::Right),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            DccSymbol::Left => 'l',
            DccSymbol::Straight => 's',
            DccSymbol::Right => 'r',
        }
    }

    pub fn from_letter(c: char) -> Option<DccSymbol> {
        match c {
            'l' => Some(DccSymbol::Left),
            's' => Some(DccSymbol::Straight),
            'r' => Some(DccSymbol::Right),
            _ => None,
        }
    }
}

/// Parse a string over {l,s,r} into symbols.
pub fn parse_symbols(s: &str) -> Option<Vec<DccSymbol>> {
    s.chars().map(DccSymbol::from_letter).collect()
}

/// Format symbols as a string over {l,s,r}.
pub fn format_symbols(symbols: &[DccSymbol]) -> String {
    symbols.iter().map(|s| s.letter()).collect()
}

/// An integer between-pixel lattice coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub x: i32,
    pub y: i32,
}

impl GridPoint {
    pub fn new(x: i32, y: i32) -> GridPoint {
        GridPoint { x, y }
    }

    pub fn step(self, dir: AbsoluteDirection) -> GridPoint {
        let (dx, dy) = dir.delta();
        GridPoint {
            x: self.x + dx,
            y: self.y + dy,
        }
    }

    pub fn distance_sq(self, other: GridPoint) -> f64 {
        let dx = (self.x - other.x) as f64;
        let dy = (self.y - other.y) as f64;
        dx * dx + dy * dy
    }
}

/// A contour as a differential chain code: a starting point, the absolute
/// direction of the initial edge, and `N` relative symbols describing the
/// remaining edges. Decoding yields `N + 1` edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DccContour {
    pub start: GridPoint,
    pub initial: AbsoluteDirection,
    pub symbols: Vec<DccSymbol>,
}

impl DccContour {
    pub fn new(start: GridPoint, initial: AbsoluteDirection, symbols: Vec<DccSymbol>) -> Self {
        DccContour {
            start,
            initial,
            symbols,
        }
    }

    /// Number of edges, `N + 1`.
    pub fn edge_count(&self) -> usize {
        self.symbols.len() + 1
    }

    /// Edge endpoints `p(0) ..= p(N)` in order (`N + 1` points, excluding
    /// the starting point itself).
    pub fn endpoints(&self) -> Vec<GridPoint> {
        let mut points = Vec::with_capacity(self.edge_count());
        let mut p = self.start.step(self.initial);
        let mut dir = self.initial;
        points.push(p);
        for &sym in &self.symbols {
            dir = dir.rotate(sym);
            p = p.step(dir);
            points.push(p);
        }
        points
    }

    /// True when the last endpoint returns to the starting point.
    pub fn is_closed(&self) -> bool {
        self.endpoints().last() == Some(&self.start)
    }
}

/// Expand a contour into its `N + 1` edges, each given by the edge endpoint
/// and the edge's absolute direction.
pub fn dcc_to_edges(contour: &DccContour) -> Vec<(GridPoint, AbsoluteDirection)> {
    let mut edges = Vec::with_capacity(contour.edge_count());
    let mut dir = contour.initial;
    let mut p = contour.start.step(dir);
    edges.push((p, dir));
    for &sym in &contour.symbols {
        dir = dir.rotate(sym);
        p = p.step(dir);
        edges.push((p, dir));
    }
    edges
}

/// Inverse of [`dcc_to_edges`]. Rejects edge pairs that reverse direction
/// (a 180° turn has no symbol) or that are not contiguous.
pub fn edges_to_dcc(edges: &[(GridPoint, AbsoluteDirection)]) -> Result<DccContour> {
    let (first_p, first_dir) = *edges.first().ok_or(Error::EmptyEdges)?;
    let start = first_p.step(first_dir.opposite());
    let mut symbols = Vec::with_capacity(edges.len() - 1);
    for (index, window) in edges.windows(2).enumerate() {
        let (prev_p, prev_dir) = window[0];
        let (p, dir) = window[1];
        if dir == prev_dir.opposite() {
            return Err(Error::EdgeReversal { index: index + 1 });
        }
        if p != prev_p.step(dir) {
            return Err(Error::NonAdjacentEdge { index: index + 1 });
        }
        let sym = DccSymbol::ALL
            .into_iter()
            .find(|&s| prev_dir.rotate(s) == dir)
            .expect("non-reversing turn always has a symbol");
        symbols.push(sym);
    }
    Ok(DccContour::new(start, first_dir, symbols))
}

/// Minimum Euclidean distance from `p` to the set of edge endpoints of
/// `contour`.
pub fn min_distance(p: GridPoint, contour: &DccContour) -> f64 {
    min_distance_to_points(p, &contour.endpoints())
}

pub fn min_distance_to_points(p: GridPoint, points: &[GridPoint]) -> f64 {
    points
        .iter()
        .map(|&q| p.distance_sq(q))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}


#[cfg(test)]
pub(crate) use tests::EXAMPLE_STRING;
