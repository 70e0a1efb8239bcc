//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use relhyp::classify::{parse_automorphism, GraphMapSpec};
use relhyp::graph::GraphSelfMap;
use relhyp::laminations::{build_nas, nonattracting_subgraph, select_sigma, NonattractingData};
use relhyp::words::{FreeAutomorphism, Letter, ReducedWord};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn map(name: &str) -> GraphSelfMap {
    GraphMapSpec::from_json(&fixture(name))
        .unwrap()
        .build()
        .unwrap()
}

pub fn automorphism(name: &str) -> FreeAutomorphism {
    parse_automorphism(&fixture(name)).unwrap().phi
}

pub fn nas(f: &GraphSelfMap, r: usize) -> NonattractingData {
    let z = nonattracting_subgraph(f, r, 20).unwrap();
    let sigma = select_sigma(f, r, 6).unwrap();
    build_nas(f, r, &z, sigma.as_ref()).unwrap()
}

/// Plain signed-letter arithmetic, independent of the library's reduction.
pub fn free_reduce(codes: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(codes.len());
    for &c in codes {
        if out.last() == Some(&-c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

pub fn signed(w: &ReducedWord) -> Vec<i32> {
    w.letters().iter().map(|l| l.signed()).collect()
}

/// Substitution on signed letters: `images[g-1]` is the image of generator `g`.
pub fn substitute(images: &[Vec<i32>], w: &[i32]) -> Vec<i32> {
    let mut out = Vec::new();
    for &c in w {
        let img = &images[c.unsigned_abs() as usize - 1];
        if c > 0 {
            out.extend(img.iter().copied());
        } else {
            out.extend(img.iter().rev().map(|x| -x));
        }
    }
    free_reduce(&out)
}

pub fn random_word(rng: &mut ChaCha8Rng, rank: usize, len: usize) -> Vec<i32> {
    let mut w: Vec<i32> = Vec::with_capacity(len);
    while w.len() < len {
        let g = rng.gen_range(1..=rank as i32);
        let c = if rng.gen_bool(0.5) { g } else { -g };
        if w.last() != Some(&-c) {
            w.push(c);
        }
    }
    w
}

/// A product of `moves` elementary Nielsen automorphisms `x_t ↦ x_t x_o^±`
/// (or `x_o^± x_t`) and its inverse, both as signed image lists.
pub fn random_nielsen(
    rng: &mut ChaCha8Rng,
    rank: usize,
    moves: usize,
) -> (Vec<Vec<i32>>, Vec<Vec<i32>>) {
    let id: Vec<Vec<i32>> = (1..=rank as i32).map(|g| vec![g]).collect();
    let (mut phi, mut inv) = (id.clone(), id.clone());
    for _ in 0..moves {
        let t = rng.gen_range(0..rank);
        let mut o = rng.gen_range(0..rank - 1);
        if o >= t {
            o += 1;
        }
        let s: i32 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let left = rng.gen_bool(0.5);
        let (xt, xo) = (t as i32 + 1, (o as i32 + 1) * s);
        let mut nu = id.clone();
        let mut nu_inv = id.clone();
        if left {
            nu[t] = vec![xo, xt];
            nu_inv[t] = vec![-xo, xt];
        } else {
            nu[t] = vec![xt, xo];
            nu_inv[t] = vec![xt, -xo];
        }
        // phi <- phi ∘ nu, inv <- nu⁻¹ ∘ inv
        phi = nu.iter().map(|w| substitute(&phi, w)).collect();
        inv = inv.iter().map(|w| substitute(&nu_inv, w)).collect();
    }
    (phi, inv)
}

pub fn to_automorphism(images: &[Vec<i32>]) -> FreeAutomorphism {
    let refs: Vec<&[i32]> = images.iter().map(|v| v.as_slice()).collect();
    FreeAutomorphism::from_signed(&refs).unwrap()
}

/// Breadth-first distances from the identity in the Cayley graph of `F(rank)`
/// with every coset `g⟨p⟩` coned off, restricted to the ball of `radius`.
/// A cone point is modelled as a unit move `g ↦ g·p^k`.
pub fn coned_bfs(rank: usize, p: i32, radius: usize) -> HashMap<Vec<i32>, usize> {
    let mut dist: HashMap<Vec<i32>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(Vec::new(), 0);
    queue.push_back(Vec::new());
    while let Some(g) = queue.pop_front() {
        let d = dist[&g];
        let mut next: Vec<Vec<i32>> = Vec::new();
        for x in 1..=rank as i32 {
            for c in [x, -x] {
                let mut h = g.clone();
                h.push(c);
                next.push(free_reduce(&h));
            }
        }
        for s in [p, -p] {
            let mut h = g.clone();
            loop {
                h.push(s);
                h = free_reduce(&h);
                if h.len() > radius {
                    break;
                }
                next.push(h.clone());
            }
        }
        for h in next {
            if h.len() <= radius && !dist.contains_key(&h) {
                dist.insert(h.clone(), d + 1);
                queue.push_back(h);
            }
        }
    }
    dist
}

/// Largest real root of a monic polynomial by bisection on `[lo, hi]`, where
/// the polynomial changes sign exactly once.
pub fn bisect_root(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let eval = |x: f64| coeffs.iter().fold(0.0, |acc, &c| acc * x + c);
    let sign_lo = eval(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (eval(mid) < 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn letter(code: i32) -> Letter {
    Letter::from_signed(code).unwrap()
}
