//! Bounded search for periodic conjugacy classes.

use serde::{Deserialize, Serialize};

use crate::par::{self, Execution};
use crate::words::{enumerate_cyclic_words, CyclicWord, FreeAutomorphism};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicWitness {
    pub class: CyclicWord,
    pub period: usize,
}

/// Least period `≤ period_bound` of `c` under `φ`.
pub fn class_period(phi: &FreeAutomorphism, c: &CyclicWord, period_bound: usize) -> Option<usize> {
    let mut cur = c.clone();
    for k in 1..=period_bound {
        cur = phi.iterate_class(&cur, 1).expect("forward iteration");
        if &cur == c {
            return Some(k);
        }
    }
    None
}

/// Searches every nontrivial class of cyclic length `≤ length_bound` and returns
/// the witness least by (period, length, lexicographic), or `None` within bounds.
pub fn periodic_conjugacy_search(
    phi: &FreeAutomorphism,
    period_bound: usize,
    length_bound: usize,
) -> Option<PeriodicWitness> {
    periodic_conjugacy_search_with(phi, period_bound, length_bound, Execution::default())
}

pub fn periodic_conjugacy_search_with(
    phi: &FreeAutomorphism,
    period_bound: usize,
    length_bound: usize,
    exec: Execution,
) -> Option<PeriodicWitness> {
    let classes: Vec<CyclicWord> = (1..=length_bound)
        .flat_map(|n| enumerate_cyclic_words(phi.rank(), n))
        .collect();
    let periods = par::map(exec, &classes, |c| class_period(phi, c, period_bound));
    classes
        .into_iter()
        .zip(periods)
        .filter_map(|(class, p)| p.map(|period| PeriodicWitness { class, period }))
        .min_by(|x, y| {
            (x.period, x.class.len(), &x.class).cmp(&(y.period, y.class.len(), &y.class))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::ReducedWord;

    #[test]
    fn fixed_generator() {
        let phi = FreeAutomorphism::from_signed(&[&[1, 2], &[1], &[3]]).unwrap();
        let w = periodic_conjugacy_search(&phi, 3, 3).unwrap();
        assert_eq!(w.period, 1);
        assert_eq!(w.class, CyclicWord::from_signed(&[3], 3).unwrap());
    }

    #[test]
    fn swap_fixes_ab() {
        let phi = FreeAutomorphism::from_signed(&[&[2], &[1]]).unwrap();
        let w = periodic_conjugacy_search(&phi, 2, 4).unwrap();
        assert_eq!(w.period, 1);
        assert_eq!(w.class, CyclicWord::from_signed(&[1, 2], 2).unwrap());
    }

    #[test]
    fn fibonacci_matches_brute_force() {
        let phi = FreeAutomorphism::from_signed(&[&[1, 2], &[1]]).unwrap();
        let found = periodic_conjugacy_search(&phi, 8, 6);
        // oracle: all words of length ≤ 6 by index, compared as classes after repeated substitution
        let mut best: Option<(usize, usize, CyclicWord)> = None;
        for len in 1..=6u32 {
            for mut idx in 0..4usize.pow(len) {
                let mut codes = Vec::new();
                for _ in 0..len {
                    let c = (idx % 4) as i32;
                    codes.push(if c % 2 == 0 { c / 2 + 1 } else { -(c / 2 + 1) });
                    idx /= 4;
                }
                let w = ReducedWord::from_signed(&codes, 2).unwrap();
                let c = CyclicWord::from_word(&w);
                if c.len() != len as usize {
                    continue;
                }
                let mut cur = w.clone();
                for k in 1..=8 {
                    cur = phi.apply(&cur);
                    if CyclicWord::from_word(&cur) == c {
                        let cand = (k, c.len(), c.clone());
                        if best.as_ref().is_none_or(|b| cand < *b) {
                            best = Some(cand);
                        }
                        break;
                    }
                }
            }
        }
        let expected = best.map(|(period, _, class)| PeriodicWitness { class, period });
        assert_eq!(found, expected);
    }

    #[test]
    fn cyclic_enumeration_matches_dedup() {
        use crate::words::enumerate_reduced_words;
        use std::collections::BTreeSet;
        for rank in 1..=3 {
            for n in 1..=5 {
                let dedup: BTreeSet<CyclicWord> = enumerate_reduced_words(rank, n)
                    .iter()
                    .map(CyclicWord::from_word)
                    .filter(|c| c.len() == n)
                    .collect();
                assert_eq!(
                    enumerate_cyclic_words(rank, n),
                    dedup.into_iter().collect::<Vec<_>>()
                );
            }
        }
    }
}
