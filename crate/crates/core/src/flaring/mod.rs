//! Legality ratios and the flaring verifiers built on them.

mod dichotomy;
mod search;
mod standing;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::electric::ElectricError;
use crate::graph::turns::TurnTable;
use crate::graph::{Circuit, GraphSelfMap};
use crate::laminations::{
    groupoid_decompose, LaminationError, LeafLibrary, NonattractingData, Subject,
};

pub use dichotomy::{
    growth_flare_test, legality_dichotomy_test, DichotomyItem, DichotomyReport, EPSILON_GRID_DEPTH,
};
pub use search::{
    conjugacy_flaring_search, strict_flaring_search, three_of_four_test, FlareBounds, FlareItem,
    FlaringVerdict, FourItem, ThreeOfFourVerdict,
};
pub use standing::{
    standing_assumptions_check, AssumptionItem, AssumptionStatus, LaminationPair, StandingReport,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlaringError {
    #[error("C = {c} does not exceed the critical constant {critical}")]
    ConstantTooSmall { c: String, critical: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("standing assumptions not met: {0}")]
    AssumptionsNotMet(String),
    #[error(transparent)]
    Lamination(#[from] LaminationError),
    #[error(transparent)]
    Electric(#[from] ElectricError),
}

/// Everything needed to measure legality for one representative and stratum.
#[derive(Clone, Debug)]
pub struct FlareSide {
    pub height: usize,
    pub nas: NonattractingData,
    pub library: LeafLibrary,
    pub c: Ratio<i128>,
    pub critical: Ratio<i128>,
    turns: TurnTable,
}

impl FlareSide {
    /// `c = None` picks the least integer above the critical constant.
    pub fn new(
        nas: NonattractingData,
        library_depth: usize,
        c: Option<Ratio<i128>>,
    ) -> Result<FlareSide, FlaringError> {
        let f = nas.map();
        let r = nas.height;
        let critical = f.critical_constant(r).map_err(LaminationError::from)?;
        let c = c.unwrap_or_else(|| critical.floor() + 1);
        if c <= critical {
            return Err(FlaringError::ConstantTooSmall {
                c: c.to_string(),
                critical: critical.to_string(),
            });
        }
        let library = LeafLibrary::build(f, r, library_depth)?;
        let turns = TurnTable::new(f);
        Ok(FlareSide {
            height: r,
            nas,
            library,
            c,
            critical,
            turns,
        })
    }

    pub fn map(&self) -> &GraphSelfMap {
        self.nas.map()
    }

    pub fn circuit_of(&self, c: &crate::words::CyclicWord) -> Circuit {
        self.map().marked().realize_class(c)
    }

    pub fn legality(&self, s: &Subject) -> LegalityReport {
        legality_with(
            s,
            self.map(),
            self.height,
            &self.c,
            &self.nas,
            &self.library,
            &self.turns,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalSegment {
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalityReport {
    pub value: Ratio<i64>,
    pub legal_segments: Vec<LegalSegment>,
    pub c_used: Ratio<i128>,
    pub relative_length: usize,
}

/// `LEG` of a path or circuit: the uncarried edges lying in `r`-legal library
/// subpaths of length `≥ C` that cross an uncarried `H_r` edge, divided by the
/// relative length. Zero when the relative length is zero.
pub fn legality(
    s: &Subject,
    f: &GraphSelfMap,
    r: usize,
    c: &Ratio<i128>,
    d: &NonattractingData,
    library: &LeafLibrary,
) -> Result<LegalityReport, FlaringError> {
    let critical = f.critical_constant(r).map_err(LaminationError::from)?;
    if *c <= critical {
        return Err(FlaringError::ConstantTooSmall {
            c: c.to_string(),
            critical: critical.to_string(),
        });
    }
    Ok(legality_with(s, f, r, c, d, library, &TurnTable::new(f)))
}

fn legality_with(
    s: &Subject,
    f: &GraphSelfMap,
    r: usize,
    c: &Ratio<i128>,
    d: &NonattractingData,
    library: &LeafLibrary,
    turns: &TurnTable,
) -> LegalityReport {
    let edges = s.edges();
    let n = edges.len();
    let dec = groupoid_decompose(s, d);
    let rel = dec.relative_length;
    let zero = |segs| LegalityReport {
        value: Ratio::from_integer(0),
        legal_segments: segs,
        c_used: *c,
        relative_length: rel,
    };
    if n == 0 || rel == 0 {
        return zero(Vec::new());
    }
    let carried = dec.carried_mask(n);
    let (text, lo, hi) = if s.is_cyclic() {
        (repeated(edges, 3), n, 2 * n)
    } else {
        (edges.to_vec(), 0, n)
    };
    let ms = library.matching_statistics(&text);
    // legal run ending at j, and prefix counts of uncarried H_r edges
    let mut run = vec![0usize; text.len()];
    let mut key = vec![0usize; text.len() + 1];
    for j in 0..text.len() {
        let breaking = j > 0 && {
            let t = crate::graph::Turn::new(text[j - 1].reverse(), text[j]);
            turns.is_r_breaking(f, r, t)
        };
        run[j] = if j == 0 || breaking {
            1
        } else {
            run[j - 1] + 1
        };
        let is_key = f.height_of_edge(text[j].edge()) == r && !carried[j % n];
        key[j + 1] = key[j] + is_key as usize;
    }
    let min_len = c.ceil().to_integer().max(1) as usize;
    let mut diff = vec![0i64; n + 1];
    let mut lens = vec![0usize; text.len()];
    for j in lo..hi {
        let l = ms[j].min(run[j]).min(n);
        let start = j + 1 - l;
        if l >= min_len && key[j + 1] > key[start] {
            lens[j] = l;
            let a = start % n;
            if a + l <= n {
                diff[a] += 1;
                diff[a + l] -= 1;
            } else {
                diff[a] += 1;
                diff[n] -= 1;
                diff[0] += 1;
                diff[a + l - n] -= 1;
            }
        }
    }
    let mut covered = 0usize;
    let mut acc = 0i64;
    for (p, &dv) in diff.iter().enumerate().take(n) {
        acc += dv;
        if acc > 0 && !carried[p] {
            covered += 1;
        }
    }
    let mut segments = Vec::new();
    for j in lo..hi {
        let extended = j + 1 < hi && lens[j + 1] == lens[j] + 1;
        if lens[j] > 0 && !extended {
            segments.push(LegalSegment {
                start: (j + 1 - lens[j]) % n,
                len: lens[j],
            });
        }
    }
    LegalityReport {
        value: Ratio::new(covered as i64, rel as i64),
        legal_segments: segments,
        c_used: *c,
        relative_length: rel,
    }
}

/// Fraction of edge positions of `c` whose `(2L+1)`-window is a library subpath.
pub fn approximation_fraction(c: &Circuit, library: &LeafLibrary, l: usize) -> Ratio<i64> {
    let n = c.len();
    if n == 0 {
        return Ratio::from_integer(0);
    }
    let window = 2 * l + 1;
    let before = l.div_ceil(n) + 1;
    let copies = before + 1 + l.div_ceil(n) + 1;
    let text = c.unrolled(copies);
    let ms = library.matching_statistics(&text);
    let good = (0..n).filter(|&i| ms[before * n + i + l] >= window).count();
    Ratio::new(good as i64, n as i64)
}

fn repeated(edges: &[crate::graph::DirEdge], copies: usize) -> Vec<crate::graph::DirEdge> {
    let mut v = Vec::with_capacity(edges.len() * copies);
    for _ in 0..copies {
        v.extend_from_slice(edges);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laminations::{build_nas, nonattracting_subgraph};
    use crate::words::FreeAutomorphism;

    fn side(images: &[&[i32]], filtration: &[Vec<usize>], r: usize) -> FlareSide {
        let f = GraphSelfMap::rose_map_filtered(
            "t",
            &FreeAutomorphism::from_signed(images).unwrap(),
            filtration,
        )
        .unwrap();
        let z = nonattracting_subgraph(&f, r, 20).unwrap();
        let d = build_nas(&f, r, &z, None).unwrap();
        FlareSide::new(d, 10, None).unwrap()
    }

    fn e1() -> FlareSide {
        side(&[&[1, 2], &[1], &[3]], &[vec![2], vec![0, 1, 2]], 2)
    }

    fn circuit(s: &FlareSide, text: &str) -> Subject {
        Subject::Circuit(Circuit::from_tight_loop(
            s.map().graph().parse_edges(text).unwrap(),
        ))
    }

    #[test]
    fn e1_constant_is_thirteen() {
        let s = e1();
        assert_eq!(s.c, Ratio::from_integer(13));
        assert!(s.critical > Ratio::new(1294, 100) && s.critical < Ratio::new(1295, 100));
    }

    #[test]
    fn small_constant_is_rejected() {
        let s = e1();
        let r = legality(
            &circuit(&s, "a"),
            s.map(),
            2,
            &Ratio::from_integer(12),
            &s.nas,
            &s.library,
        );
        assert!(matches!(r, Err(FlaringError::ConstantTooSmall { .. })));
    }

    #[test]
    fn carried_and_short_classes_have_zero_legality() {
        let s = e1();
        let rep = s.legality(&circuit(&s, "c c"));
        assert_eq!(
            (rep.value, rep.relative_length),
            (Ratio::from_integer(0), 0)
        );
        assert_eq!(
            s.legality(&circuit(&s, "a c c c c c c c c c b")).value,
            Ratio::from_integer(0)
        );
    }

    #[test]
    fn leaf_segment_has_legality_one() {
        let s = e1();
        let seg = crate::laminations::generic_leaf_segment(s.map(), 2, 0, 8).unwrap();
        let rep = s.legality(&Subject::Path(seg.path.clone()));
        assert_eq!(rep.value, Ratio::from_integer(1));
        assert_eq!(
            rep.legal_segments,
            vec![LegalSegment {
                start: 0,
                len: seg.path.len()
            }]
        );
    }

    #[test]
    fn mixed_circuit_by_segment_inventory() {
        // f^7(a) (length 34) followed by c^9: the leaf part is legal and long,
        // the c part is carried, so LEG is 1
        let s = e1();
        let g = s.map().graph();
        let mut p = crate::laminations::generic_leaf_segment(s.map(), 2, 0, 7)
            .unwrap()
            .path;
        assert_eq!(p.len(), 34);
        p.extend(g.parse_edges("c c c c c c c c c").unwrap());
        let rep = s.legality(&Subject::Circuit(Circuit::from_tight_loop(p.clone())));
        assert_eq!(rep.relative_length, 34);
        assert_eq!(rep.value, Ratio::from_integer(1));
        // a shorter leaf piece, still longer than C
        let mut q = p[..20].to_vec();
        q.extend(g.parse_edges("c c c").unwrap());
        let rep = s.legality(&Subject::Circuit(Circuit::from_tight_loop(q)));
        assert_eq!(rep.relative_length, 20);
        assert_eq!(rep.value, Ratio::from_integer(1));
    }

    #[test]
    fn approximation_fraction_examples() {
        let s = e1();
        let g = s.map().graph();
        let cc = Circuit::from_tight_loop(g.parse_edges("c").unwrap());
        assert_eq!(
            approximation_fraction(&cc, &s.library, 1),
            Ratio::from_integer(0)
        );
        let leaf = Circuit::from_tight_loop(g.parse_edges("a b a a b a b a").unwrap());
        // every 3-window of this periodic word is a Fibonacci subword except those across the seam
        let f1 = approximation_fraction(&leaf, &s.library, 1);
        let f2 = approximation_fraction(&leaf, &s.library, 2);
        assert!(f2 <= f1);
        // oracle: count windows directly
        let text = leaf.unrolled(4);
        let n = leaf.len();
        let direct = (0..n)
            .filter(|&i| s.library.contains(&text[n + i - 1..n + i + 2]))
            .count();
        assert_eq!(f1, Ratio::new(direct as i64, n as i64));
    }
}
