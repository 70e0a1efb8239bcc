use serde::{Deserialize, Serialize};

use super::{AttractingNeighborhood, NonattractingData, Subject};
use crate::graph::GraphSelfMap;
use crate::words::CyclicWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trichotomy {
    InVMinus,
    CarriedByNas,
    PushedToVPlus(usize),
    Inconclusive,
}

/// Checks, in order: `c ∈ V⁻` (realized in the graph of `bwd`), `c` carried by
/// the nonattracting system, and `φ^l_#(c) ∈ V⁺` for `l ≤ l_bound`.
pub fn weak_attraction_trichotomy(
    c: &CyclicWord,
    fwd: (&GraphSelfMap, &AttractingNeighborhood),
    bwd: (&GraphSelfMap, &AttractingNeighborhood),
    d: &NonattractingData,
    l_bound: usize,
) -> Trichotomy {
    let (f, v_plus) = fwd;
    let (f_inv, v_minus) = bwd;
    if v_minus.contains(&Subject::Circuit(f_inv.marked().realize_class(c))) {
        return Trichotomy::InVMinus;
    }
    if d.system.carries_conjugacy_class(c) {
        return Trichotomy::CarriedByNas;
    }
    let s = Subject::Circuit(f.marked().realize_class(c));
    match super::is_weakly_attracted(&s, v_plus, f, l_bound) {
        super::Attraction::AttractedAt(l) => Trichotomy::PushedToVPlus(l),
        super::Attraction::NotWithin(_) => Trichotomy::Inconclusive,
    }
}
