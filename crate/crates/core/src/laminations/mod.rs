//! Attracting laminations at desk scale: leaf segments, bounded weak
//! attraction, the nonattracting subgraph and subgroup system, and the
//! groupoid decomposition used for relative length.

mod attraction;
mod groupoid;
pub mod index;
mod nas;
mod trichotomy;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Circuit, DirEdge, Graph, GraphError, GraphSelfMap, StratumKind};

pub use attraction::{
    is_weakly_attracted, nonattracting_subgraph, Attraction, NonattractingSubgraph,
    StratumAttraction,
};
pub use groupoid::{groupoid_decompose, relative_length, Decomposition, Piece, PieceKind};
pub use index::SegmentIndex;
pub use nas::{build_nas, select_sigma, KComponent, KEdge, KGraph, NasSummary, NonattractingData};
pub use trichotomy::{weak_attraction_trichotomy, Trichotomy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaminationError {
    #[error("stratum {0} is not exponentially growing")]
    NotExponential(usize),
    #[error("edge `{0}` is not in the stratum")]
    SeedOutsideStratum(String),
    #[error("inconsistent Nielsen data: {0}")]
    InconsistentNielsenData(String),
    #[error("found {0} closed indivisible Nielsen paths of the top height; expected at most one")]
    AmbiguousNielsenPath(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A path or a circuit in the graph of a representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subject {
    Path(Vec<DirEdge>),
    Circuit(Circuit),
}

impl Subject {
    pub fn edges(&self) -> &[DirEdge] {
        match self {
            Subject::Path(p) => p,
            Subject::Circuit(c) => c.edges(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges().len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges().is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, Subject::Circuit(_))
    }

    pub fn image(&self, f: &GraphSelfMap) -> Subject {
        match self {
            Subject::Path(p) => Subject::Path(f.map_edges(p)),
            Subject::Circuit(c) => Subject::Circuit(f.map_circuit(c)),
        }
    }

    /// Edges read along the subject long enough to see every subpath of length
    /// `≤ window`. Circuits are read as periodic lines.
    pub fn readable(&self, window: usize) -> Vec<DirEdge> {
        match self {
            Subject::Path(p) => p.clone(),
            Subject::Circuit(c) if c.is_empty() => Vec::new(),
            Subject::Circuit(c) => c.unrolled(window.div_ceil(c.len()) + 1),
        }
    }

    /// Whether `seg` or its reverse is a subpath.
    pub fn contains(&self, seg: &[DirEdge]) -> bool {
        if seg.is_empty() {
            return true;
        }
        let text = self.readable(seg.len());
        let rev = reversed(seg);
        text.windows(seg.len())
            .any(|w| w == seg || w == rev.as_slice())
    }
}

pub(crate) fn reversed(p: &[DirEdge]) -> Vec<DirEdge> {
    p.iter().rev().map(|d| d.reverse()).collect()
}

pub(crate) fn codes(p: &[DirEdge]) -> Vec<u32> {
    p.iter().map(|d| d.code() as u32).collect()
}

/// `f^k_#(seed)` for an edge of an EG stratum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafSegment {
    pub path: Vec<DirEdge>,
    pub seed: usize,
    pub iterate: usize,
}

pub fn generic_leaf_segment(
    f: &GraphSelfMap,
    r: usize,
    seed: usize,
    k: usize,
) -> Result<LeafSegment, LaminationError> {
    require_eg(f, r)?;
    if f.height_of_edge(seed) != r {
        return Err(LaminationError::SeedOutsideStratum(
            f.graph().edge(seed).name.clone(),
        ));
    }
    let mut path = vec![DirEdge::new(seed, false)];
    for _ in 0..k {
        path = f.map_edges(&path);
    }
    Ok(LeafSegment {
        path,
        seed,
        iterate: k,
    })
}

pub(crate) fn require_eg(f: &GraphSelfMap, r: usize) -> Result<(), LaminationError> {
    match f.stratum(r)?.kind {
        StratumKind::Eg => Ok(()),
        _ => Err(LaminationError::NotExponential(r)),
    }
}

/// Weak neighborhood of the lamination defined by one leaf segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttractingNeighborhood {
    pub defining_segment: LeafSegment,
}

impl AttractingNeighborhood {
    pub fn new(defining_segment: LeafSegment) -> AttractingNeighborhood {
        AttractingNeighborhood { defining_segment }
    }

    pub fn contains(&self, s: &Subject) -> bool {
        s.contains(&self.defining_segment.path)
    }

    pub fn describe(&self, g: &Graph) -> String {
        g.format_edges(&self.defining_segment.path)
    }
}

/// Iterates `f^k_#(E)` for `E ∈ H_r`, `k ≤ depth`, indexed in both orientations.
/// Iterates longer than `length_cap` are not generated.
#[derive(Clone, Debug)]
pub struct LeafLibrary {
    pub height: usize,
    pub depth: usize,
    pub length_cap: usize,
    pub segments: Vec<LeafSegment>,
    index: SegmentIndex,
}

pub const DEFAULT_LEAF_LENGTH_CAP: usize = 20_000;

impl LeafLibrary {
    pub fn build(f: &GraphSelfMap, r: usize, depth: usize) -> Result<LeafLibrary, LaminationError> {
        LeafLibrary::build_capped(f, r, depth, DEFAULT_LEAF_LENGTH_CAP)
    }

    pub fn build_capped(
        f: &GraphSelfMap,
        r: usize,
        depth: usize,
        length_cap: usize,
    ) -> Result<LeafLibrary, LaminationError> {
        require_eg(f, r)?;
        let mut segments = Vec::new();
        let mut index = SegmentIndex::new();
        for seed in f.stratum_edges(r) {
            let mut path = vec![DirEdge::new(seed, false)];
            for k in 0..=depth {
                if k > 0 {
                    let next = f.map_edges(&path);
                    if next.len() > length_cap {
                        break;
                    }
                    path = next;
                }
                // only the deepest iterate matters for subpath queries, but
                // shallower ones are cheap and keep `segments` informative
                segments.push(LeafSegment {
                    path: path.clone(),
                    seed,
                    iterate: k,
                });
            }
            index.insert(&codes(&path));
            index.insert(&codes(&reversed(&path)));
        }
        Ok(LeafLibrary {
            height: r,
            depth,
            length_cap,
            segments,
            index,
        })
    }

    /// Subpath of some library segment, in either orientation.
    pub fn contains(&self, p: &[DirEdge]) -> bool {
        self.index.contains(&codes(p))
    }

    /// `out[j]`: longest library subpath ending at `text[j]`.
    pub fn matching_statistics(&self, text: &[DirEdge]) -> Vec<usize> {
        self.index.matching_statistics(&codes(text))
    }

    pub fn longest(&self) -> usize {
        self.segments
            .iter()
            .map(|s| s.path.len())
            .max()
            .unwrap_or(0)
    }
}
