//! Growth type of an outer automorphism.

use serde::{Deserialize, Serialize};

use crate::graph::GraphSelfMap;
use crate::words::{CyclicWord, FreeAutomorphism, Letter, ReducedWord};

/// Iteration stops once a tracked length passes this.
pub const GROWTH_LENGTH_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthType {
    Exponential {
        /// true when a PF enclosure above one was certified on an EG stratum
        certified: bool,
        stratum: Option<usize>,
        lambda_lower: f64,
        lambda_upper: f64,
    },
    Polynomial {
        degree: usize,
    },
    FiniteOrder {
        order: usize,
    },
}

impl GrowthType {
    pub fn is_exponential(&self) -> bool {
        matches!(self, GrowthType::Exponential { .. })
    }

    pub fn label(&self) -> String {
        match self {
            GrowthType::Exponential { .. } => "exponential".into(),
            GrowthType::Polynomial { degree } => format!("polynomial({degree})"),
            GrowthType::FiniteOrder { order } => format!("finite_order({order})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub growth: GrowthType,
    pub iteration_bound: usize,
    /// largest cyclic length over the test classes, per iterate
    pub lengths: Vec<usize>,
    pub method: String,
}

/// Generators and their pairwise products `x y`, `x y⁻¹`.
fn test_classes(rank: usize) -> Vec<CyclicWord> {
    let mut out = Vec::new();
    for i in 1..=rank {
        let x = Letter::new(i, false);
        out.push(CyclicWord::from_word(&ReducedWord::letter(x)));
        for j in i + 1..=rank {
            for inv in [false, true] {
                out.push(CyclicWord::from_word(&ReducedWord::from_letters([
                    x,
                    Letter::new(j, inv),
                ])));
            }
        }
    }
    out
}

/// Least `k ≤ bound` with `φ^k` inner.
pub fn finite_order(phi: &FreeAutomorphism, bound: usize) -> Option<usize> {
    let mut cur = phi.clone();
    for k in 1..=bound {
        if cur.inner_conjugator().is_some() {
            return Some(k);
        }
        if cur.images().iter().map(ReducedWord::len).sum::<usize>() > GROWTH_LENGTH_CAP {
            return None;
        }
        cur = phi.compose(&cur);
    }
    None
}

/// `L_k` for `k = 0..=bound`, possibly cut short at the length cap.
pub fn class_lengths(phi: &FreeAutomorphism, bound: usize) -> Vec<usize> {
    let mut classes = test_classes(phi.rank());
    let mut out = vec![classes.iter().map(CyclicWord::len).max().unwrap_or(0)];
    for _ in 0..bound {
        classes = classes
            .iter()
            .map(|c| phi.iterate_class(c, 1).expect("forward"))
            .collect();
        let l = classes.iter().map(CyclicWord::len).max().unwrap_or(0);
        out.push(l);
        if l > GROWTH_LENGTH_CAP {
            break;
        }
    }
    out
}

/// Smallest `d ≤ max_degree` whose `(d+1)`-st differences vanish on the
/// second half of `lengths`, with at least two vanishing values.
pub fn exact_polynomial_degree(lengths: &[usize], max_degree: usize) -> Option<usize> {
    let tail: Vec<i128> = lengths[lengths.len() / 2..]
        .iter()
        .map(|&x| x as i128)
        .collect();
    let mut diff = tail;
    for d in 0..=max_degree {
        let next: Vec<i128> = diff.windows(2).map(|w| w[1] - w[0]).collect();
        if next.len() < 2 {
            return None;
        }
        if next.iter().all(|&x| x == 0) {
            return Some(d);
        }
        diff = next;
    }
    None
}

/// Growth type. A representative with an EG stratum certifies exponential
/// growth; otherwise the growth of cyclic lengths over `bound` iterates is
/// fitted. Finite order is exact: `φ^k` inner for some `k ≤ bound`.
pub fn classify_growth(
    phi: &FreeAutomorphism,
    rep: Option<&GraphSelfMap>,
    bound: usize,
) -> GrowthReport {
    if let Some(order) = finite_order(phi, bound) {
        return GrowthReport {
            growth: GrowthType::FiniteOrder { order },
            iteration_bound: bound,
            lengths: Vec::new(),
            method: format!("φ^{order} is inner"),
        };
    }
    if let Some(f) = rep {
        if let Some(r) = f.topmost_eg() {
            let c = f.eg_certificate(r).expect("EG stratum has a certificate");
            return GrowthReport {
                growth: GrowthType::Exponential {
                    certified: true,
                    stratum: Some(r),
                    lambda_lower: c.lower_f64(),
                    lambda_upper: c.upper_f64(),
                },
                iteration_bound: bound,
                lengths: Vec::new(),
                method: format!("PF certificate on stratum {r}"),
            };
        }
    }
    let lengths = class_lengths(phi, bound);
    let max_degree = phi.rank().saturating_sub(1);
    if lengths.len() == bound + 1 {
        if let Some(degree) = exact_polynomial_degree(&lengths, max_degree) {
            return GrowthReport {
                growth: GrowthType::Polynomial { degree },
                iteration_bound: bound,
                lengths,
                method: "finite differences of cyclic lengths".into(),
            };
        }
    }
    // geometric mean ratio over the second half
    let k = lengths.len() - 1;
    let h = k / 2;
    let rate = if k > h && lengths[h] > 0 {
        (lengths[k] as f64 / lengths[h] as f64).powf(1.0 / (k - h) as f64)
    } else {
        1.0
    };
    GrowthReport {
        growth: GrowthType::Exponential {
            certified: false,
            stratum: None,
            lambda_lower: rate,
            lambda_upper: rate,
        },
        iteration_bound: bound,
        lengths,
        method: "no polynomial fit of degree below the rank; empirical rate".into(),
    }
}
