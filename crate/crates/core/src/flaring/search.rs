use serde::{Deserialize, Serialize};

use super::{FlaringError, StandingReport};
use crate::electric::{ElectricLength, ElectricSpace};
use crate::par::{self, Execution};
use crate::words::{CyclicWord, FreeAutomorphism, ReducedWord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlareBounds {
    pub m_bound: usize,
    pub conjugator_bound: usize,
    pub ball_radius: usize,
    pub enumeration_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlareItem {
    pub item: String,
    pub base: usize,
    /// lengths of the forward and backward iterates, `m = 0..=m_bound`
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
    /// least `M` with the inequality at every `m ∈ [M, m_bound]`
    pub first_pass: Option<usize>,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlaringVerdict {
    pub constant_target: usize,
    pub m_found: Option<usize>,
    pub per_item: Vec<FlareItem>,
    pub excluded: Vec<String>,
    pub bounds: FlareBounds,
}

impl FlaringVerdict {
    /// Items not passing at `m`, which must pass backward if they fail forward.
    pub fn failing_at(&self, m: usize) -> Vec<&FlareItem> {
        let k = self.constant_target;
        self.per_item
            .iter()
            .filter(|i| k * i.base > i.forward[m].max(i.backward[m]))
            .collect()
    }
}

fn bounds(s: &ElectricSpace, m_bound: usize, conjugator_bound: usize) -> FlareBounds {
    FlareBounds {
        m_bound,
        conjugator_bound,
        ball_radius: s.ball_radius,
        enumeration_bound: s.enumeration_bound,
    }
}

fn require_inverse(phi: &FreeAutomorphism) -> Result<FreeAutomorphism, FlaringError> {
    phi.inverse().ok_or_else(|| {
        FlaringError::Precondition("the automorphism has no verified inverse".into())
    })
}

fn first_pass(pass: &[bool]) -> Option<usize> {
    if !*pass.last()? {
        return None;
    }
    let mut m = pass.len() - 1;
    while m > 0 && pass[m - 1] {
        m -= 1;
    }
    Some(m)
}

/// Iterates `x ↦ step(x)` up to `m_bound` times, measuring each; `None` when a
/// value leaves the ball.
fn lengths<T, S, L>(x: &T, m_bound: usize, step: S, measure: L) -> Option<(Vec<usize>, bool)>
where
    T: Clone,
    S: Fn(&T) -> T,
    L: Fn(&T) -> Option<ElectricLength>,
{
    let mut cur = x.clone();
    let mut out = Vec::with_capacity(m_bound + 1);
    let mut exact = true;
    for m in 0..=m_bound {
        if m > 0 {
            cur = step(&cur);
        }
        let l = measure(&cur)?;
        exact &= l.exact;
        out.push(l.value);
    }
    Some((out, exact))
}

fn assemble(
    target: usize,
    results: Vec<Result<FlareItem, String>>,
    b: FlareBounds,
) -> FlaringVerdict {
    let mut per_item = Vec::new();
    let mut excluded = Vec::new();
    for r in results {
        match r {
            Ok(i) => per_item.push(i),
            Err(e) => excluded.push(e),
        }
    }
    let m_found = per_item
        .iter()
        .map(|i| i.first_pass)
        .try_fold(0usize, |acc, x| x.map(|v| acc.max(v)));
    FlaringVerdict {
        constant_target: target,
        m_found,
        per_item,
        excluded,
        bounds: b,
    }
}

/// Least `M ≤ m_bound` with `3||α|| ≤ max(||φ^m α||, ||φ^-m α||)` for every
/// corpus class and every `m ∈ [M, m_bound]`.
pub fn conjugacy_flaring_search(
    corpus: &[CyclicWord],
    phi: &FreeAutomorphism,
    s: &ElectricSpace,
    m_bound: usize,
    conjugator_bound: usize,
    exec: Execution,
) -> Result<FlaringVerdict, FlaringError> {
    let inv = require_inverse(phi)?;
    if let Some(c) = corpus
        .iter()
        .find(|c| c.is_trivial() || s.peripherals().carries_conjugacy_class(c))
    {
        return Err(FlaringError::Precondition(format!(
            "class {c:?} is carried by the peripheral system"
        )));
    }
    let measure = |c: &CyclicWord| s.electric_conjugacy_length(c, conjugator_bound).ok();
    let results = par::map(exec, corpus, |c| {
        let label = format!("{c:?}");
        let excluded = || format!("{label}: left the ball of radius {}", s.ball_radius);
        let step_f = |x: &CyclicWord| phi.iterate_class(x, 1).expect("forward");
        let step_b = |x: &CyclicWord| inv.iterate_class(x, 1).expect("verified inverse");
        let (forward, ef) = lengths(c, m_bound, step_f, measure).ok_or_else(excluded)?;
        let (backward, eb) = lengths(c, m_bound, step_b, measure).ok_or_else(excluded)?;
        let base = forward[0];
        let pass: Vec<bool> = (0..=m_bound)
            .map(|m| 3 * base <= forward[m].max(backward[m]))
            .collect();
        Ok(FlareItem {
            item: label,
            base,
            first_pass: first_pass(&pass),
            forward,
            backward,
            exact: ef && eb,
        })
    });
    Ok(assemble(3, results, bounds(s, m_bound, conjugator_bound)))
}

/// Least `N ≤ n_bound` with `2|w| ≤ max(|Φ^n w|, |Φ^-n w|)` (electric) for every
/// corpus word and every `n ∈ [N, n_bound]`.
pub fn strict_flaring_search(
    words: &[ReducedWord],
    phi: &FreeAutomorphism,
    s: &ElectricSpace,
    n_bound: usize,
    exec: Execution,
) -> Result<FlaringVerdict, FlaringError> {
    let inv = require_inverse(phi)?;
    if let Some(w) = words.iter().find(|w| w.is_identity() || s.is_peripheral(w)) {
        return Err(FlaringError::Precondition(format!(
            "word {w:?} lies in a peripheral subgroup"
        )));
    }
    let measure = |w: &ReducedWord| s.electric_length(w).ok();
    let results = par::map(exec, words, |w| {
        let label = format!("{w:?}");
        let excluded = || format!("{label}: left the ball of radius {}", s.ball_radius);
        let (forward, ef) = lengths(w, n_bound, |x| phi.apply(x), measure).ok_or_else(excluded)?;
        let (backward, eb) = lengths(w, n_bound, |x| inv.apply(x), measure).ok_or_else(excluded)?;
        let base = forward[0];
        let pass: Vec<bool> = (0..=n_bound)
            .map(|n| 2 * base <= forward[n].max(backward[n]))
            .collect();
        Ok(FlareItem {
            item: label,
            base,
            first_pass: first_pass(&pass),
            forward,
            backward,
            exact: ef && eb,
        })
    });
    Ok(assemble(2, results, bounds(s, n_bound, 0)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourItem {
    pub item: String,
    pub base: usize,
    /// `[φ^m, φ^-m, ψ^m, ψ^-m]` lengths for `m = 0..=m_bound`
    pub numbers: Vec<[usize; 4]>,
    pub first_pass: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeOfFourVerdict {
    pub m_found: Option<usize>,
    pub per_item: Vec<FourItem>,
    pub excluded: Vec<String>,
    pub overridden: bool,
    pub warnings: Vec<String>,
    pub bounds: FlareBounds,
    pub note: String,
}

pub const FREE_BY_FREE_NOTE: &str =
    "for large m, n the group ⟨φ^m, ψ^n⟩ is free of rank 2 and its extension is hyperbolic: theorem-level, not certified";

/// Least `M` such that, for each corpus class and each `m ∈ [M, m_bound]`, at
/// least three of the four iterates have electric length `≥ 3||α||`.
/// Refuses unless the standing assumptions passed or `allow_override` is set.
#[allow(clippy::too_many_arguments)]
pub fn three_of_four_test(
    phi: &FreeAutomorphism,
    psi: &FreeAutomorphism,
    standing: &StandingReport,
    allow_override: bool,
    corpus: &[CyclicWord],
    s: &ElectricSpace,
    m_bound: usize,
    exec: Execution,
) -> Result<ThreeOfFourVerdict, FlaringError> {
    let mut warnings = Vec::new();
    if !standing.all_pass() {
        if !allow_override {
            return Err(FlaringError::AssumptionsNotMet(
                standing.failed_items().join(", "),
            ));
        }
        warnings.push(format!(
            "standing assumptions overridden: {}",
            standing.failed_items().join(", ")
        ));
    }
    let maps = [
        phi.clone(),
        require_inverse(phi)?,
        psi.clone(),
        require_inverse(psi)?,
    ];
    let measure = |c: &CyclicWord| s.electric_conjugacy_length(c, 0).ok();
    let results = par::map(exec, corpus, |c| {
        let label = format!("{c:?}");
        let mut cols = Vec::new();
        for g in &maps {
            let (l, _) = lengths(
                c,
                m_bound,
                |x| g.iterate_class(x, 1).expect("automorphism"),
                measure,
            )
            .ok_or_else(|| format!("{label}: left the ball of radius {}", s.ball_radius))?;
            cols.push(l);
        }
        let base = cols[0][0];
        let numbers: Vec<[usize; 4]> = (0..=m_bound)
            .map(|m| [cols[0][m], cols[1][m], cols[2][m], cols[3][m]])
            .collect();
        let pass: Vec<bool> = numbers
            .iter()
            .map(|row| row.iter().filter(|&&x| x >= 3 * base).count() >= 3)
            .collect();
        Ok(FourItem {
            item: label,
            base,
            first_pass: first_pass(&pass),
            numbers,
        })
    });
    let mut per_item = Vec::new();
    let mut excluded = Vec::new();
    for r in results {
        match r {
            Ok(i) => per_item.push(i),
            Err(e) => excluded.push(e),
        }
    }
    let m_found = per_item
        .iter()
        .map(|i| i.first_pass)
        .try_fold(0usize, |acc, x| x.map(|v| acc.max(v)));
    Ok(ThreeOfFourVerdict {
        m_found,
        per_item,
        excluded,
        overridden: !standing.all_pass(),
        warnings,
        bounds: bounds(s, m_bound, 0),
        note: FREE_BY_FREE_NOTE.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroups::{FoldedImmersion, SubgroupSystem};

    fn fib() -> FreeAutomorphism {
        FreeAutomorphism::from_signed(&[&[1, 2], &[1]])
            .unwrap()
            .invert(100)
            .unwrap()
    }

    #[test]
    fn first_pass_is_the_start_of_the_final_run() {
        assert_eq!(first_pass(&[false, true, false, true, true]), Some(3));
        assert_eq!(first_pass(&[true, true]), Some(0));
        assert_eq!(first_pass(&[true, false]), None);
    }

    #[test]
    fn fibonacci_single_class() {
        let s = ElectricSpace::with_defaults(2, SubgroupSystem::empty());
        let a = CyclicWord::from_signed(&[1], 2).unwrap();
        let v = conjugacy_flaring_search(&[a], &fib(), &s, 8, 0, Execution::Sequential).unwrap();
        // forward lengths 1, 2, 3, 5, …; backward [a] ↦ [b], [b' a], … grow as well
        assert_eq!(v.per_item[0].forward[..5], [1, 2, 3, 5, 8]);
        let oracle = (0..=8).position(|m| {
            (m..=8).all(|k| 3 <= v.per_item[0].forward[k].max(v.per_item[0].backward[k]))
        });
        assert_eq!(v.m_found, oracle);
    }

    #[test]
    fn strict_flaring_for_a() {
        let s = ElectricSpace::with_defaults(2, SubgroupSystem::empty());
        let a = ReducedWord::from_signed(&[1], 2).unwrap();
        let v = strict_flaring_search(&[a], &fib(), &s, 10, Execution::Sequential).unwrap();
        let item = &v.per_item[0];
        assert_eq!(item.forward[2], 3);
        assert!((2..=10).all(|n| 2 <= item.forward[n].max(item.backward[n])));
        assert_eq!(v.m_found, Some(1));
    }

    #[test]
    fn peripheral_inputs_are_rejected() {
        let c = SubgroupSystem::new(vec![FoldedImmersion::from_generators(&[&[3]], 3).unwrap()]);
        let s = ElectricSpace::with_defaults(3, c);
        let phi = FreeAutomorphism::from_signed(&[&[1, 2], &[1], &[3]])
            .unwrap()
            .invert(100)
            .unwrap();
        let cc = CyclicWord::from_signed(&[3, 3], 3).unwrap();
        assert!(conjugacy_flaring_search(&[cc], &phi, &s, 3, 0, Execution::Sequential).is_err());
        let w = ReducedWord::from_signed(&[3], 3).unwrap();
        assert!(strict_flaring_search(&[w], &phi, &s, 3, Execution::Sequential).is_err());
    }
}
