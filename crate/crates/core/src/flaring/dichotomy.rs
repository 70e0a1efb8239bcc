use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{FlareSide, FlaringError};
use crate::laminations::{relative_length, Subject};
use crate::par::{self, Execution};
use crate::words::CyclicWord;

/// The ε grid is `1, 1/2, …, 2^-EPSILON_GRID_DEPTH`.
pub const EPSILON_GRID_DEPTH: u32 = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyItem {
    pub class: String,
    pub forward: Ratio<i64>,
    pub backward: Ratio<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub m: usize,
    /// min over the corpus of `max(LEG(φ^m α), LEG'(φ^-m α))`
    pub epsilon_found: Ratio<i64>,
    /// largest grid value not above `epsilon_found`
    pub epsilon_grid: Option<Ratio<i64>>,
    pub failures: Vec<String>,
    pub items: Vec<DichotomyItem>,
}

pub fn legality_dichotomy_test(
    corpus: &[CyclicWord],
    fwd: &FlareSide,
    bwd: &FlareSide,
    m: usize,
    exec: Execution,
) -> Result<DichotomyReport, FlaringError> {
    if let Some(c) = corpus
        .iter()
        .find(|c| fwd.nas.system.carries_conjugacy_class(c))
    {
        return Err(FlaringError::Precondition(format!(
            "class {c:?} is carried by the nonattracting system"
        )));
    }
    let items: Vec<DichotomyItem> = par::map(exec, corpus, |c| {
        let leg = |side: &FlareSide| {
            let circ = side.map().iterate_circuit(&side.circuit_of(c), m);
            side.legality(&Subject::Circuit(circ)).value
        };
        DichotomyItem {
            class: format!("{c:?}"),
            forward: leg(fwd),
            backward: leg(bwd),
        }
    });
    let epsilon_found = items
        .iter()
        .map(|i| i.forward.max(i.backward))
        .min()
        .unwrap_or(Ratio::from_integer(0));
    let failures = items
        .iter()
        .filter(|i| i.forward.max(i.backward) == Ratio::from_integer(0))
        .map(|i| i.class.clone())
        .collect();
    let epsilon_grid = (0..=EPSILON_GRID_DEPTH)
        .map(|k| Ratio::new(1, 1i64 << k))
        .find(|&e| e <= epsilon_found);
    Ok(DichotomyReport {
        m,
        epsilon_found,
        epsilon_grid,
        failures,
        items,
    })
}

/// Least `m ≤ m_bound` with `|f^m_#(α)|_rel ≥ A·|α|_rel`.
pub fn growth_flare_test(
    alpha: &CyclicWord,
    side: &FlareSide,
    epsilon: Ratio<i64>,
    a: Ratio<i64>,
    m_bound: usize,
) -> Result<Option<usize>, FlaringError> {
    let f = side.map();
    let mut circ = side.circuit_of(alpha);
    let leg = side.legality(&Subject::Circuit(circ.clone())).value;
    if leg < epsilon {
        return Err(FlaringError::Precondition(format!(
            "LEG = {leg} is below ε = {epsilon}"
        )));
    }
    let base = relative_length(&Subject::Circuit(circ.clone()), &side.nas) as i64;
    for m in 0..=m_bound {
        if m > 0 {
            circ = f.map_circuit(&circ);
        }
        let rel = relative_length(&Subject::Circuit(circ.clone()), &side.nas) as i64;
        if Ratio::from_integer(rel) >= a * base {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSelfMap;
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
        FlareSide::new(build_nas(&f, r, &z, None).unwrap(), 10, None).unwrap()
    }

    fn class(s: &[i32]) -> CyclicWord {
        CyclicWord::from_signed(s, 3).unwrap()
    }

    #[test]
    fn e1_dichotomy_is_positive() {
        let fwd = side(&[&[1, 2], &[1], &[3]], &[vec![2], vec![0, 1, 2]], 2);
        let bwd = side(&[&[2], &[-2, 1], &[3]], &[vec![2], vec![0, 1, 2]], 2);
        let corpus = [class(&[1]), class(&[2]), class(&[1, 2])];
        let rep = legality_dichotomy_test(&corpus, &fwd, &bwd, 5, Execution::Sequential).unwrap();
        assert!(rep.epsilon_found > Ratio::from_integer(0), "{rep:?}");
        assert!(rep.failures.is_empty());
        assert!(rep.epsilon_grid.is_some());
        let carried = legality_dichotomy_test(&[class(&[3])], &fwd, &bwd, 5, Execution::Sequential);
        assert!(matches!(carried, Err(FlaringError::Precondition(_))));
    }

    #[test]
    fn fibonacci_growth_by_iteration() {
        let s = side(&[&[1, 2], &[1]], &[vec![0, 1]], 1);
        let a = CyclicWord::from_signed(&[1], 2).unwrap();
        // LEG([a]) is 0 since [a] is shorter than C, so only ε = 0 admits it
        assert!(growth_flare_test(&a, &s, Ratio::new(1, 2), Ratio::from_integer(10), 20).is_err());
        let m =
            growth_flare_test(&a, &s, Ratio::from_integer(0), Ratio::from_integer(10), 20).unwrap();
        // |φ^m(a)| runs 1, 2, 3, 5, 8, 13
        assert_eq!(m, Some(5));
        assert_eq!(
            growth_flare_test(&a, &s, Ratio::from_integer(0), Ratio::from_integer(1), 20).unwrap(),
            Some(0)
        );
    }
}
