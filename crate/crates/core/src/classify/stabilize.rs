//! Heuristic choice of a rotationless power.

use serde::{Deserialize, Serialize};

use crate::graph::turns::direction_map;
use crate::graph::GraphSelfMap;
use crate::words::{enumerate_cyclic_words, FreeAutomorphism};

/// Classes longer than this are dropped from the periodicity search.
pub const STABILIZE_LENGTH_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizeReport {
    pub power: usize,
    /// "pinned" or "stabilized"
    pub source: String,
    pub stabilized: bool,
    pub depth: usize,
    pub class_length_bound: usize,
    pub warning: Option<String>,
}

impl StabilizeReport {
    pub fn pinned(power: usize) -> StabilizeReport {
        StabilizeReport {
            power,
            source: "pinned".into(),
            stabilized: true,
            depth: 0,
            class_length_bound: 0,
            warning: None,
        }
    }
}

/// Least period `≤ bound` of each item under a step function.
fn periods<T: Clone + PartialEq>(
    items: &[T],
    bound: usize,
    step: impl Fn(&T) -> Option<T>,
) -> Vec<Option<usize>> {
    items
        .iter()
        .map(|x| {
            let mut cur = x.clone();
            for k in 1..=bound {
                cur = step(&cur)?;
                if cur == *x {
                    return Some(k);
                }
            }
            None
        })
        .collect()
}

/// Whether `{x : p_x | k}` equals `{x : p_x | 2k}`.
fn stable_at(periods: &[Option<usize>], k: usize) -> bool {
    periods
        .iter()
        .flatten()
        .all(|&p| !(2 * k).is_multiple_of(p) || k.is_multiple_of(p))
}

/// Smallest `k ≤ depth` such that the fixed classes of length `≤ length_bound`
/// and the fixed directions of the representative agree for `φ^k` and `φ^{2k}`.
/// Falls back to the rose representative when none is given.
pub fn stabilize_power(
    phi: &FreeAutomorphism,
    rep: Option<&GraphSelfMap>,
    depth: usize,
    length_bound: usize,
) -> StabilizeReport {
    assert!(depth >= 1, "depth must be positive");
    let rose;
    let f = match rep {
        Some(f) => f,
        None => {
            rose = GraphSelfMap::rose_map("rose", phi).expect("rose representative");
            &rose
        }
    };
    let df = direction_map(f);
    let dirs: Vec<usize> = (0..df.len()).collect();
    let mut all = periods(&dirs, 2 * depth, |&d| Some(df[d].code()));
    let classes: Vec<_> = (1..=length_bound)
        .flat_map(|n| enumerate_cyclic_words(phi.rank(), n))
        .collect();
    all.extend(periods(&classes, 2 * depth, |c| {
        let next = phi.iterate_class(c, 1).expect("forward");
        (next.len() <= STABILIZE_LENGTH_CAP).then_some(next)
    }));
    let found = (1..=depth).find(|&k| stable_at(&all, k));
    let (power, stabilized, warning) = match found {
        Some(k) => (k, true, None),
        None => (
            depth,
            false,
            Some(format!("fixed sets did not stabilize within depth {depth}")),
        ),
    };
    StabilizeReport {
        power,
        source: "stabilized".into(),
        stabilized,
        depth,
        class_length_bound: length_bound,
        warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::CyclicWord;

    fn aut(images: &[&[i32]]) -> FreeAutomorphism {
        FreeAutomorphism::from_signed(images)
            .unwrap()
            .invert(1000)
            .unwrap()
    }

    /// Recomputes fixed sets of `φ^k` and `φ^{2k}` by composing powers directly.
    fn oracle(phi: &FreeAutomorphism, depth: usize, length_bound: usize) -> usize {
        let classes: Vec<CyclicWord> = (1..=length_bound)
            .flat_map(|n| enumerate_cyclic_words(phi.rank(), n))
            .collect();
        let fixed = |k: usize| -> (Vec<bool>, Vec<bool>) {
            let p = phi.power(k as i64).unwrap();
            let f = GraphSelfMap::rose_map("p", &p).unwrap();
            let dirs = f
                .graph()
                .all_directions()
                .map(|d| f.dir_image(d)[0] == d)
                .collect();
            let cls = classes
                .iter()
                .map(|c| CyclicWord::from_word(&p.apply(&c.to_word())) == *c)
                .collect();
            (dirs, cls)
        };
        (1..=depth)
            .find(|&k| fixed(k) == fixed(2 * k))
            .unwrap_or(depth)
    }

    #[test]
    fn rotationless_input() {
        // a -> a b, b -> b a b: every periodic direction and class is fixed
        let phi = aut(&[&[1, 2], &[2, 1, 2]]);
        assert_eq!(stabilize_power(&phi, None, 6, 4).power, 1);
    }

    #[test]
    fn swap_needs_two() {
        let phi = aut(&[&[2], &[1]]);
        let r = stabilize_power(&phi, None, 6, 4);
        assert_eq!((r.power, r.stabilized), (2, true));
    }

    #[test]
    fn e1_needs_two() {
        let phi = aut(&[&[1, 2], &[1], &[3]]);
        assert_eq!(stabilize_power(&phi, None, 8, 4).power, 2);
    }

    #[test]
    fn swap_after_fibonacci_square_matches_oracle() {
        let fib2 = aut(&[&[1, 2], &[1]]).power(2).unwrap();
        let swap = aut(&[&[2], &[1]]);
        let phi = swap.compose(&fib2).invert(1000).unwrap();
        let r = stabilize_power(&phi, None, 8, 3);
        assert_eq!(r.power, oracle(&phi, 8, 3));
    }

    #[test]
    fn agrees_with_oracle_on_small_examples() {
        for images in [
            &[&[1, 2][..], &[1][..]][..],
            &[&[2], &[1, 2]],
            &[&[1], &[2, 1]],
            &[&[2], &[3], &[1, 2]],
        ] {
            let phi = aut(images);
            assert_eq!(
                stabilize_power(&phi, None, 6, 3).power,
                oracle(&phi, 6, 3),
                "{phi:?}"
            );
        }
    }
}
