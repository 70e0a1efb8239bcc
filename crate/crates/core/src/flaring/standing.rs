//! Bounded checks of the standing assumptions for a pair of automorphisms.

use serde::{Deserialize, Serialize};

use super::FlareSide;
use crate::graph::StratumKind;
use crate::words::Letter;

/// Attracting and repelling data of one automorphism.
#[derive(Clone, Debug)]
pub struct LaminationPair {
    pub plus: FlareSide,
    pub minus: FlareSide,
}

impl LaminationPair {
    fn sides(&self) -> [(&'static str, &FlareSide); 2] {
        [("+", &self.plus), ("-", &self.minus)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionStatus {
    Pass,
    Fail,
    /// no violation found within the search bounds
    BoundedEvidence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionItem {
    pub name: String,
    pub status: AssumptionStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandingReport {
    /// the four laminations are pairwise distinct
    pub item1: AssumptionItem,
    /// every nonattracting system is trivial
    pub item2: AssumptionItem,
    /// each lamination lives in the top stratum of its representative
    pub item3: AssumptionItem,
}

impl StandingReport {
    pub fn items(&self) -> [&AssumptionItem; 3] {
        [&self.item1, &self.item2, &self.item3]
    }

    pub fn all_pass(&self) -> bool {
        self.items()
            .iter()
            .all(|i| i.status != AssumptionStatus::Fail)
    }

    pub fn failed_items(&self) -> Vec<String> {
        self.items()
            .iter()
            .filter(|i| i.status == AssumptionStatus::Fail)
            .map(|i| i.name.clone())
            .collect()
    }
}

pub const PROBE_WINDOW: usize = 32;

/// Deepest library segments of a side, as words in the ambient basis.
fn leaf_words(side: &FlareSide) -> Vec<Vec<Letter>> {
    let lib = &side.library;
    let deepest = lib.segments.iter().map(|s| s.iterate).max().unwrap_or(0);
    lib.segments
        .iter()
        .filter(|s| s.iterate == deepest)
        .map(|s| side.map().marked().word_of(&s.path).into_letters())
        .collect()
}

fn probes(words: &[Vec<Letter>]) -> Vec<&[Letter]> {
    words
        .iter()
        .filter(|w| w.len() >= PROBE_WINDOW)
        .map(|w| {
            let start = (w.len() - PROBE_WINDOW) / 2;
            &w[start..start + PROBE_WINDOW]
        })
        .collect()
}

fn occurs(probe: &[Letter], words: &[Vec<Letter>]) -> bool {
    let inv: Vec<Letter> = probe.iter().rev().map(|l| l.inverse()).collect();
    words.iter().any(|w| {
        w.windows(probe.len())
            .any(|x| x == probe || x == inv.as_slice())
    })
}

/// Distinct laminations have leaves that eventually disagree: a long middle
/// window of one leaf never appears in the other's leaves.
fn check_distinct(phi: &LaminationPair, psi: &LaminationPair) -> AssumptionItem {
    let name = "item1".to_string();
    let mut shared = Vec::new();
    let mut short = false;
    for (a, x) in phi.sides() {
        for (b, y) in psi.sides() {
            let (wx, wy) = (leaf_words(x), leaf_words(y));
            let (px, py) = (probes(&wx), probes(&wy));
            short |= px.is_empty() || py.is_empty();
            if px.iter().any(|p| occurs(p, &wy)) || py.iter().any(|p| occurs(p, &wx)) {
                shared.push(format!("φ{a}/ψ{b}"));
            }
        }
    }
    if !shared.is_empty() {
        return AssumptionItem {
            name,
            status: AssumptionStatus::Fail,
            detail: format!(
                "leaf windows of length {PROBE_WINDOW} shared by {}",
                shared.join(", ")
            ),
        };
    }
    let mut detail = format!("no shared leaf window of length {PROBE_WINDOW} in the libraries");
    if short {
        detail.push_str("; some library has no segment that long");
    }
    AssumptionItem {
        name,
        status: AssumptionStatus::BoundedEvidence,
        detail,
    }
}

fn check_trivial_nas(phi: &LaminationPair, psi: &LaminationPair) -> AssumptionItem {
    let bad: Vec<String> = [("φ", phi), ("ψ", psi)]
        .iter()
        .flat_map(|(n, p)| {
            p.sides()
                .into_iter()
                .map(move |(s, side)| (format!("{n}{s}"), side))
        })
        .filter(|(_, side)| !side.nas.system.is_trivial())
        .map(|(n, _)| n)
        .collect();
    let name = "item2".to_string();
    if bad.is_empty() {
        AssumptionItem {
            name,
            status: AssumptionStatus::Pass,
            detail: "all four nonattracting systems are trivial".into(),
        }
    } else {
        AssumptionItem {
            name,
            status: AssumptionStatus::Fail,
            detail: format!("nontrivial system for {}", bad.join(", ")),
        }
    }
}

fn top_stratum_problem(side: &FlareSide) -> Option<String> {
    let f = side.map();
    let r = side.height;
    match f.stratum(r) {
        Ok(s) if s.kind == StratumKind::Eg => {}
        _ => return Some(format!("stratum {r} is not exponentially growing")),
    }
    if f.topmost_eg() != Some(r) {
        return Some(format!(
            "stratum {r} is not the topmost exponentially growing stratum"
        ));
    }
    f.stratum_edges(r)
        .into_iter()
        .find(|&e| f.height_of(f.edge_image(e)) != r)
        .map(|e| format!("image of {} leaves height {r}", f.graph().edge(e).name))
}

fn check_top_strata(phi: &LaminationPair, psi: &LaminationPair) -> AssumptionItem {
    let name = "item3".to_string();
    for (n, p) in [("φ", phi), ("ψ", psi)] {
        for (s, side) in p.sides() {
            if let Some(why) = top_stratum_problem(side) {
                return AssumptionItem {
                    name,
                    status: AssumptionStatus::Fail,
                    detail: format!("{n}{s}: {why}"),
                };
            }
        }
    }
    AssumptionItem {
        name,
        status: AssumptionStatus::BoundedEvidence,
        detail: "each lamination is carried by the topmost exponentially growing stratum".into(),
    }
}

pub fn standing_assumptions_check(phi: &LaminationPair, psi: &LaminationPair) -> StandingReport {
    StandingReport {
        item1: check_distinct(phi, psi),
        item2: check_trivial_nas(phi, psi),
        item3: check_top_strata(phi, psi),
    }
}
