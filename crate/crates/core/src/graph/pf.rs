//! Perron–Frobenius eigenvalues of nonnegative integer matrices with exact
//! rational Collatz–Wielandt bounds.
//!
//! For an irreducible `M` and any positive vector `v`,
//! `min_i (Mv)_i / v_i ≤ λ ≤ max_i (Mv)_i / v_i`. The vector comes from power
//! iteration on `M + I` (primitive whenever `M` is irreducible), is rounded to
//! integers and the two ratios are then evaluated exactly.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub type Matrix = Vec<Vec<u64>>;

/// Certified enclosure `lower ≤ λ ≤ upper` together with the integer vector used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfCertificate {
    pub lower: Ratio<i128>,
    pub upper: Ratio<i128>,
    pub vector: Vec<i128>,
    pub iterations: usize,
}

impl PfCertificate {
    pub fn lower_f64(&self) -> f64 {
        ratio_f64(&self.lower)
    }

    pub fn upper_f64(&self) -> f64 {
        ratio_f64(&self.upper)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower_f64() + self.upper_f64())
    }

    pub fn width(&self) -> f64 {
        ratio_f64(&(self.upper - self.lower))
    }

    /// Exactly one: the enclosure collapsed to the rational number 1.
    pub fn is_one(&self) -> bool {
        self.lower == Ratio::from_integer(1) && self.upper == Ratio::from_integer(1)
    }
}

pub fn ratio_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Strong connectivity of the digraph with an arc `j → i` whenever `m[i][j] > 0`.
/// The 1×1 zero matrix counts as reducible.
pub fn is_irreducible(m: &Matrix) -> bool {
    let n = m.len();
    if n == 0 {
        return false;
    }
    if n == 1 {
        return m[0][0] > 0;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(j) = stack.pop() {
            for i in 0..n {
                let arc = if forward { m[i][j] } else { m[j][i] };
                if arc > 0 && !seen[i] {
                    seen[i] = true;
                    stack.push(i);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

pub fn is_zero(m: &Matrix) -> bool {
    m.iter().all(|r| r.iter().all(|&x| x == 0))
}

pub fn is_permutation(m: &Matrix) -> bool {
    let n = m.len();
    let rows_ok = m
        .iter()
        .all(|r| r.iter().sum::<u64>() == 1 && r.iter().all(|&x| x <= 1));
    let cols_ok = (0..n).all(|j| m.iter().map(|r| r[j]).sum::<u64>() == 1);
    rows_ok && cols_ok
}

/// Primitivity by Wielandt's bound: `M^((n-1)^2+1)` is positive iff `M` is primitive.
pub fn is_primitive(m: &Matrix) -> bool {
    let n = m.len();
    if !is_irreducible(m) {
        return false;
    }
    let bool_m: Vec<Vec<bool>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x > 0).collect())
        .collect();
    let mul = |a: &Vec<Vec<bool>>, b: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
            .collect()
    };
    let mut e = (n - 1) * (n - 1) + 1;
    let mut result: Option<Vec<Vec<bool>>> = None;
    let mut base = bool_m;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => mul(&r, &base),
            });
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    result.unwrap().iter().all(|r| r.iter().all(|&x| x))
}

const SCALE_BITS: i32 = 50;
const MAX_ITERATIONS: usize = 200_000;
const TARGET_WIDTH: f64 = 1e-12;

/// Certified PF bounds for an irreducible matrix.
///
/// Panics if `m` is not irreducible; use [`spectral_radius`] for general input.
pub fn certify(m: &Matrix) -> PfCertificate {
    assert!(is_irreducible(m), "certify needs an irreducible matrix");
    let n = m.len();
    if is_permutation(m) {
        return PfCertificate {
            lower: Ratio::from_integer(1),
            upper: Ratio::from_integer(1),
            vector: vec![1; n],
            iterations: 0,
        };
    }
    let mut v = vec![1.0f64; n];
    let mut best: Option<PfCertificate> = None;
    let mut it = 0usize;
    while it < MAX_ITERATIONS {
        for _ in 0..32 {
            let mut w = v.clone();
            for (i, wi) in w.iter_mut().enumerate() {
                *wi += m[i]
                    .iter()
                    .zip(&v)
                    .map(|(&a, &x)| a as f64 * x)
                    .sum::<f64>();
            }
            let mx = w.iter().cloned().fold(0.0f64, f64::max);
            v = w.into_iter().map(|x| x / mx).collect();
        }
        it += 32;
        let cert = collatz_wielandt(m, &v, it);
        let width = cert.width();
        let better = best.as_ref().is_none_or(|b| width < b.width());
        if better {
            best = Some(cert);
        }
        if width <= TARGET_WIDTH {
            break;
        }
    }
    best.expect("at least one round")
}

fn collatz_wielandt(m: &Matrix, v: &[f64], iterations: usize) -> PfCertificate {
    let scale = (2.0f64).powi(SCALE_BITS);
    let vi: Vec<i128> = v
        .iter()
        .map(|&x| ((x * scale).round() as i128).max(1))
        .collect();
    let mut lower: Option<Ratio<i128>> = None;
    let mut upper: Option<Ratio<i128>> = None;
    for (i, row) in m.iter().enumerate() {
        let s: i128 = row.iter().zip(&vi).map(|(&a, &x)| a as i128 * x).sum();
        let r = Ratio::new(s, vi[i]);
        lower = Some(lower.map_or(r, |l| l.min(r)));
        upper = Some(upper.map_or(r, |u| u.max(r)));
    }
    PfCertificate {
        lower: lower.unwrap(),
        upper: upper.unwrap(),
        vector: vi,
        iterations,
    }
}

/// Strongly connected components (as index lists) of the crossing digraph.
pub fn components(m: &Matrix) -> Vec<Vec<usize>> {
    let n = m.len();
    // Kosaraju on the arc relation j → i when m[i][j] > 0
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        seen[s] = true;
        while let Some((j, next)) = stack.pop() {
            if next < n {
                stack.push((j, next + 1));
                if m[next][j] > 0 && !seen[next] {
                    seen[next] = true;
                    stack.push((next, 0));
                }
            } else {
                order.push(j);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut k = 0;
        while k < members.len() {
            let i = members[k];
            for j in 0..n {
                if m[i][j] > 0 && comp[j] == usize::MAX {
                    comp[j] = id;
                    members.push(j);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        out.push(members);
    }
    out.sort();
    out
}

/// Spectral radius bounds for any nonnegative matrix: the maximum over its
/// irreducible diagonal blocks. `None` when every block is zero.
pub fn spectral_radius(m: &Matrix) -> Option<PfCertificate> {
    let mut best: Option<PfCertificate> = None;
    for comp in components(m) {
        let sub: Matrix = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| m[i][j]).collect())
            .collect();
        if !is_irreducible(&sub) {
            continue;
        }
        let c = certify(&sub);
        if best.as_ref().is_none_or(|b| c.lower > b.lower) {
            best = Some(c);
        }
    }
    best
}
