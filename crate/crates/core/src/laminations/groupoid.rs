use serde::{Deserialize, Serialize};

use super::{NonattractingData, Subject};
use crate::graph::DirEdge;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    /// a maximal run of `Z` edges
    Z,
    Sigma,
    SigmaInverse,
    /// an edge not carried by the groupoid
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    /// position in the subject; for circuits, an index into `edges()` (may wrap)
    pub start: usize,
    pub len: usize,
    pub kind: PieceKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    pub relative_length: usize,
}

impl Decomposition {
    /// Per-position flag: carried by `⟨Z, σ̂⟩` in this decomposition.
    pub fn carried_mask(&self, n: usize) -> Vec<bool> {
        let mut out = vec![false; n];
        for p in &self.pieces {
            if p.kind != PieceKind::Free {
                for i in 0..p.len {
                    out[(p.start + i) % n] = true;
                }
            }
        }
        out
    }
}

/// Splits the subject into `Z` runs, literal copies of `σ̂^{±1}` and free edges,
/// minimizing the number of free edges. Circuits are also minimized over the
/// rotations that begin a copy of `σ̂^{±1}`.
pub fn groupoid_decompose(s: &Subject, d: &NonattractingData) -> Decomposition {
    let edges = s.edges();
    let n = edges.len();
    let sigma = d.sigma_edges().to_vec();
    let sigma_inv = super::reversed(&sigma);
    if !s.is_cyclic() || n == 0 {
        return decompose_linear(edges, 0, n, d, &sigma, &sigma_inv);
    }
    let mut starts = vec![0usize];
    if !sigma.is_empty() {
        let text = s.readable(sigma.len());
        for i in 1..n {
            let w = &text[i..];
            if w.starts_with(&sigma) || w.starts_with(&sigma_inv) {
                starts.push(i);
            }
        }
    }
    let mut best: Option<Decomposition> = None;
    let doubled: Vec<DirEdge> = edges.iter().chain(edges).copied().collect();
    for t in starts {
        let cand = decompose_linear(&doubled[t..t + n], t, n, d, &sigma, &sigma_inv);
        if best
            .as_ref()
            .is_none_or(|b| cand.relative_length < b.relative_length)
        {
            best = Some(cand);
        }
    }
    best.expect("at least one rotation")
}

pub fn relative_length(s: &Subject, d: &NonattractingData) -> usize {
    groupoid_decompose(s, d).relative_length
}

/// Exact DP over `p`; piece starts are reported as `(offset + i) mod modulus`.
fn decompose_linear(
    p: &[DirEdge],
    offset: usize,
    modulus: usize,
    d: &NonattractingData,
    sigma: &[DirEdge],
    sigma_inv: &[DirEdge],
) -> Decomposition {
    let n = p.len();
    let m = sigma.len();
    // cost[i]: fewest free edges in p[i..]; choice[i]: the piece taken at i
    let mut cost = vec![0usize; n + 1];
    let mut choice = vec![PieceKind::Free; n];
    for i in (0..n).rev() {
        let mut best = (cost[i + 1] + 1, PieceKind::Free);
        if d.in_z(p[i].edge()) && cost[i + 1] <= best.0 {
            best = (cost[i + 1], PieceKind::Z);
        }
        if m > 0 && i + m <= n {
            // prefer the longer σ̂ piece on ties
            if p[i..i + m] == *sigma && cost[i + m] <= best.0 {
                best = (cost[i + m], PieceKind::Sigma);
            } else if p[i..i + m] == *sigma_inv && cost[i + m] <= best.0 {
                best = (cost[i + m], PieceKind::SigmaInverse);
            }
        }
        cost[i] = best.0;
        choice[i] = best.1;
    }
    let mut pieces: Vec<Piece> = Vec::new();
    let mut i = 0;
    while i < n {
        let kind = choice[i];
        let len = match kind {
            PieceKind::Sigma | PieceKind::SigmaInverse => m,
            _ => 1,
        };
        match pieces.last_mut() {
            Some(last) if last.kind == kind && matches!(kind, PieceKind::Z | PieceKind::Free) => {
                last.len += 1
            }
            _ => pieces.push(Piece {
                start: (offset + i) % modulus.max(1),
                len,
                kind,
            }),
        }
        i += len;
    }
    Decomposition {
        pieces,
        relative_length: cost[0],
    }
}
