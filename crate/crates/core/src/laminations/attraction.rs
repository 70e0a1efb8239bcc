use serde::{Deserialize, Serialize};

use super::{AttractingNeighborhood, LaminationError, Subject};
use crate::graph::{DirEdge, GraphSelfMap, StratumKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attraction {
    AttractedAt(usize),
    NotWithin(usize),
}

impl Attraction {
    pub fn is_attracted(self) -> bool {
        matches!(self, Attraction::AttractedAt(_))
    }
}

/// Iterates past this length are not computed; the verdict is then `NotWithin`
/// at the depth reached.
const ITERATE_LENGTH_CAP: usize = 4_000_000;

/// Smallest `k ≤ n` with `f^k_#(s)` containing the defining segment.
pub fn is_weakly_attracted(
    s: &Subject,
    v: &AttractingNeighborhood,
    f: &GraphSelfMap,
    n: usize,
) -> Attraction {
    let mut cur = s.clone();
    for k in 0..=n {
        if v.contains(&cur) {
            return Attraction::AttractedAt(k);
        }
        if k == n {
            break;
        }
        cur = cur.image(f);
        if cur.len() > ITERATE_LENGTH_CAP {
            return Attraction::NotWithin(k + 1);
        }
    }
    Attraction::NotWithin(n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumAttraction {
    pub height: usize,
    pub kind: StratumKind,
    pub attracted: bool,
    /// an edge and iterate that crossed `H_r`, when attracted by the test itself
    pub witness: Option<(usize, usize)>,
}

/// The edges of `G` not weakly attracted to the lamination of `H_r`, under the
/// bounded crossing proxy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonattractingSubgraph {
    pub height: usize,
    pub edges: Vec<usize>,
    pub search_depth: usize,
    pub strata: Vec<StratumAttraction>,
}

impl NonattractingSubgraph {
    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }
}

/// Counts of `H_r` crossings of `f^k_#(E)`, `k = 1..=n` (fewer if the length cap hits).
fn crossing_counts(f: &GraphSelfMap, r: usize, e: usize, n: usize) -> Vec<usize> {
    let mut cur = vec![DirEdge::new(e, false)];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        cur = f.map_edges(&cur);
        out.push(
            cur.iter()
                .filter(|d| f.height_of_edge(d.edge()) == r)
                .count(),
        );
        if cur.len() > ITERATE_LENGTH_CAP {
            break;
        }
    }
    out
}

/// First iterate crossing `H_r`, provided the crossing count does not drop over
/// the last half of the iterates checked.
fn edge_attracted(f: &GraphSelfMap, r: usize, e: usize, n: usize) -> Option<usize> {
    let counts = crossing_counts(f, r, e, n);
    let first = counts.iter().position(|&c| c > 0)? + 1;
    let tail = counts.len().div_ceil(2);
    let last = &counts[counts.len() - tail..];
    last.windows(2).all(|w| w[0] <= w[1]).then_some(first)
}

pub fn nonattracting_subgraph(
    f: &GraphSelfMap,
    r: usize,
    n: usize,
) -> Result<NonattractingSubgraph, LaminationError> {
    super::require_eg(f, r)?;
    let strata = f.classify_strata();
    let mut verdict: Vec<Option<(bool, Option<(usize, usize)>)>> = vec![None; strata.len()];
    for s in &strata {
        let i = s.height - 1;
        if s.height == r {
            verdict[i] = Some((true, None));
            continue;
        }
        match s.kind {
            StratumKind::Zero => {}
            StratumKind::Eg | StratumKind::Neg => {
                // edges of an irreducible stratum are attracted together
                let w = s
                    .edges
                    .iter()
                    .find_map(|&e| edge_attracted(f, r, e, n).map(|k| (e, k)));
                verdict[i] = Some((w.is_some(), w));
            }
            StratumKind::Reducible => {
                let w = s
                    .edges
                    .iter()
                    .find_map(|&e| edge_attracted(f, r, e, n).map(|k| (e, k)));
                verdict[i] = Some((w.is_some(), w));
            }
        }
    }
    // zero strata follow the nearest EG stratum above them, else are tested directly
    for s in &strata {
        if s.kind != StratumKind::Zero || s.height == r {
            continue;
        }
        let above = strata[s.height..]
            .iter()
            .find(|t| t.kind == StratumKind::Eg);
        verdict[s.height - 1] = Some(match above {
            Some(t) => (verdict[t.height - 1].expect("assigned").0, None),
            None => {
                let w = s
                    .edges
                    .iter()
                    .find_map(|&e| edge_attracted(f, r, e, n).map(|k| (e, k)));
                (w.is_some(), w)
            }
        });
    }
    let mut edges = Vec::new();
    let mut report = Vec::new();
    for s in &strata {
        let (attracted, witness) = verdict[s.height - 1].expect("assigned");
        if !attracted {
            edges.extend_from_slice(&s.edges);
        }
        report.push(StratumAttraction {
            height: s.height,
            kind: s.kind,
            attracted,
            witness,
        });
    }
    edges.sort_unstable();
    Ok(NonattractingSubgraph {
        height: r,
        edges,
        search_depth: n,
        strata: report,
    })
}
