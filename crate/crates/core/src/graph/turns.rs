//! Turns, the induced map `Tf` on them, and legality of paths.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{DirEdge, GraphSelfMap};

/// Unordered pair of directions at a common vertex, stored with `a ≤ b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Turn {
    pub a: DirEdge,
    pub b: DirEdge,
}

impl Turn {
    pub fn new(x: DirEdge, y: DirEdge) -> Turn {
        if x <= y {
            Turn { a: x, b: y }
        } else {
            Turn { a: y, b: x }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }
}

/// `Df`: each direction goes to the first edge of its image.
pub fn direction_map(f: &GraphSelfMap) -> Vec<DirEdge> {
    f.graph()
        .all_directions()
        .map(|d| f.dir_image(d)[0])
        .collect()
}

/// Turn table for a representative, with cached illegal turns.
#[derive(Clone, Debug)]
pub struct TurnTable {
    df: Vec<DirEdge>,
    illegal: HashSet<Turn>,
}

impl TurnTable {
    pub fn new(f: &GraphSelfMap) -> TurnTable {
        let df = direction_map(f);
        let g = f.graph();
        let mut illegal = HashSet::new();
        for v in 0..g.vertex_count() {
            let dirs = g.directions_at(v);
            for (i, &x) in dirs.iter().enumerate() {
                for &y in &dirs[i..] {
                    let t = Turn::new(x, y);
                    if orbit_degenerates(&df, t) {
                        illegal.insert(t);
                    }
                }
            }
        }
        TurnTable { df, illegal }
    }

    pub fn df(&self, d: DirEdge) -> DirEdge {
        self.df[d.code()]
    }

    pub fn tf(&self, t: Turn) -> Turn {
        Turn::new(self.df(t.a), self.df(t.b))
    }

    pub fn is_illegal(&self, t: Turn) -> bool {
        self.illegal.contains(&t)
    }

    pub fn illegal_turns(&self) -> BTreeSet<Turn> {
        self.illegal.iter().copied().collect()
    }
}

/// Iterates `Tf` until the orbit repeats; true if it meets a degenerate turn.
fn orbit_degenerates(df: &[DirEdge], start: Turn) -> bool {
    let mut seen = HashSet::new();
    let mut t = start;
    loop {
        if t.is_degenerate() {
            return true;
        }
        if !seen.insert(t) {
            return false;
        }
        t = Turn::new(df[t.a.code()], df[t.b.code()]);
    }
}

pub fn illegal_turns(f: &GraphSelfMap) -> BTreeSet<Turn> {
    TurnTable::new(f).illegal_turns()
}

/// Turns taken at the interior vertices of a path.
pub fn turns_of_path(edges: &[DirEdge]) -> impl Iterator<Item = Turn> + '_ {
    edges.windows(2).map(|w| Turn::new(w[0].reverse(), w[1]))
}

/// Turns taken by a circuit, including the one at the wraparound.
pub fn turns_of_circuit(edges: &[DirEdge]) -> Vec<Turn> {
    let n = edges.len();
    if n == 0 {
        return Vec::new();
    }
    (0..n)
        .map(|i| Turn::new(edges[i].reverse(), edges[(i + 1) % n]))
        .collect()
}

impl TurnTable {
    /// Illegal turns whose directions are not both in `G_{r-1}`.
    pub fn is_r_breaking(&self, f: &GraphSelfMap, r: usize, t: Turn) -> bool {
        self.is_illegal(t)
            && (f.height_of_edge(t.a.edge()) >= r || f.height_of_edge(t.b.edge()) >= r)
    }

    /// Height exactly `r` and every illegal turn taken lies in `G_{r-1}`.
    pub fn is_r_legal(&self, f: &GraphSelfMap, r: usize, edges: &[DirEdge]) -> bool {
        f.height_of(edges) == r && turns_of_path(edges).all(|t| !self.is_r_breaking(f, r, t))
    }
}

pub fn is_r_legal(edges: &[DirEdge], f: &GraphSelfMap, r: usize) -> bool {
    TurnTable::new(f).is_r_legal(f, r, edges)
}
