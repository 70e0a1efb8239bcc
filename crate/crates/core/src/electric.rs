//! Coned-off word and conjugacy lengths relative to a peripheral system.
//!
//! A step is a basis letter or right multiplication by a nontrivial element of
//! a peripheral subgroup, each of cost 1. Peripheral subgroups act through
//! their core graphs: `π₁(core, base)` read as labels, which is the chosen
//! representative of each conjugacy class.
//!
//! Every query returns a certified lower bound (an interval cover of the
//! geodesic, which any path's projection must realize) and an upper bound (a
//! shortest path among those staying within `enumeration_bound` of the
//! geodesic). The answer is exact when they agree.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphSelfMap;
use crate::laminations::{relative_length, NonattractingData, Subject};
use crate::par::{self, Execution};
use crate::subgroups::{FoldedImmersion, MalnormalityWitness, SubgroupSystem};
use crate::words::{CyclicWord, Letter, ReducedWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElectricError {
    #[error("word of length {len} is outside the ball of radius {radius}")]
    OutOfBall { len: usize, radius: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("class {0} has electric length zero (carried by the peripherals)")]
    ZeroLength(String),
    #[error("class {0} is carried by the nonattracting system")]
    Carried(String),
}

#[derive(Clone, Debug)]
pub struct ElectricSpace {
    rank: usize,
    peripherals: SubgroupSystem,
    pub ball_radius: usize,
    /// how far a peripheral move may wander from the geodesic being measured
    pub enumeration_bound: usize,
    pub malnormality_warning: Option<MalnormalityWitness>,
}

pub const DEFAULT_BALL_RADIUS: usize = 100_000;
pub const DEFAULT_ENUMERATION_BOUND: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElectricLength {
    pub value: usize,
    pub lower_bound: usize,
    pub exact: bool,
}

impl ElectricLength {
    fn new(value: usize, lower_bound: usize) -> ElectricLength {
        debug_assert!(lower_bound <= value);
        ElectricLength {
            value,
            lower_bound,
            exact: value == lower_bound,
        }
    }
}

impl ElectricSpace {
    pub fn new(
        rank: usize,
        mut peripherals: SubgroupSystem,
        ball_radius: usize,
        enumeration_bound: usize,
    ) -> ElectricSpace {
        let (_, witness) = peripherals.check_malnormal();
        ElectricSpace {
            rank,
            peripherals,
            ball_radius,
            enumeration_bound,
            malnormality_warning: witness,
        }
    }

    pub fn with_defaults(rank: usize, peripherals: SubgroupSystem) -> ElectricSpace {
        ElectricSpace::new(
            rank,
            peripherals,
            DEFAULT_BALL_RADIUS,
            DEFAULT_ENUMERATION_BOUND,
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn peripherals(&self) -> &SubgroupSystem {
        &self.peripherals
    }

    /// Whether `w` lies in one of the core-based peripheral subgroups.
    pub fn is_peripheral(&self, w: &ReducedWord) -> bool {
        self.cores()
            .iter()
            .any(|h| h.read_from(h.base(), w.letters()) == Some(h.base()))
    }

    fn cores(&self) -> &[FoldedImmersion] {
        self.peripherals.components()
    }

    fn check_ball(&self, len: usize) -> Result<(), ElectricError> {
        if len > self.ball_radius {
            return Err(ElectricError::OutOfBall {
                len,
                radius: self.ball_radius,
            });
        }
        Ok(())
    }

    /// `reach[s]`: end of the longest segment from `s` readable in some core graph
    /// (at least `s + 1`), computed over `text`.
    fn reach(&self, text: &[Letter]) -> Vec<usize> {
        let n = text.len();
        let mut reach: Vec<usize> = (1..=n).collect();
        for h in self.cores() {
            let nv = h.vertex_count();
            // end[v] for position t+1, rolled backwards
            let mut next: Vec<usize> = vec![n; nv];
            let mut cur = vec![0usize; nv];
            for t in (0..n).rev() {
                for (v, slot) in cur.iter_mut().enumerate() {
                    *slot = match h.step(v, text[t]) {
                        Some(u) => next[u],
                        None => t,
                    };
                }
                reach[t] = reach[t].max(cur.iter().copied().max().unwrap_or(t));
                std::mem::swap(&mut next, &mut cur);
            }
        }
        reach
    }

    fn lower_bound_linear(&self, w: &[Letter]) -> usize {
        let reach = self.reach(w);
        let (mut cur, mut count) = (0, 0);
        while cur < w.len() {
            cur = reach[cur];
            count += 1;
        }
        count
    }

    /// Shortest path along the geodesic using letters and peripheral elements
    /// that are subwords of `w`.
    fn upper_bound_on_geodesic(&self, w: &[Letter]) -> usize {
        let n = w.len();
        let mut dp: Vec<usize> = (0..=n).collect();
        for i in 0..n {
            if i > 0 {
                dp[i] = dp[i].min(dp[i - 1] + 1);
            }
            let di = dp[i];
            for h in self.cores() {
                let mut v = h.base();
                for (j, &x) in w.iter().enumerate().skip(i) {
                    match h.step(v, x) {
                        Some(u) => v = u,
                        None => break,
                    }
                    if v == h.base() && dp[j + 1] > di + 1 {
                        dp[j + 1] = di + 1;
                    }
                }
            }
        }
        for i in 1..=n {
            dp[i] = dp[i].min(dp[i - 1] + 1);
        }
        dp[n]
    }

    pub fn electric_length(&self, w: &ReducedWord) -> Result<ElectricLength, ElectricError> {
        self.check_ball(w.len())?;
        Ok(self.length_of_letters(w.letters()))
    }

    fn length_of_letters(&self, w: &[Letter]) -> ElectricLength {
        let lb = self.lower_bound_linear(w);
        let ub = self.upper_bound_on_geodesic(w);
        if ub == lb || self.enumeration_bound == 0 {
            return ElectricLength::new(ub, lb);
        }
        let ub = ub.min(self.offset_search(w, ub));
        ElectricLength::new(ub, lb)
    }

    /// 0-1 BFS over positions `w[..i]·d`, `|d| ≤ enumeration_bound`, each either
    /// outside the cones or inside a core graph at some vertex.
    fn offset_search(&self, w: &[Letter], cap: usize) -> usize {
        let bound = self.enumeration_bound.min(12);
        if let Some(table) = OffsetTable::new(self.rank, bound, DENSE_OFFSET_LIMIT) {
            return self.offset_search_dense(w, cap, &table);
        }
        self.offset_search_sparse(w, cap, bound)
    }

    /// Same search with states in a flat array; used when the offset set is small.
    fn offset_search_dense(&self, w: &[Letter], cap: usize, table: &OffsetTable) -> usize {
        let n = w.len();
        let cores = self.cores();
        let mut first_vertex = Vec::with_capacity(cores.len());
        let mut modes = 1usize;
        for h in cores {
            first_vertex.push(modes);
            modes += h.vertex_count();
        }
        let offsets = table.len();
        let index = |i: usize, d: usize, m: usize| (i * offsets + d) * modes + m;
        let mut dist = vec![u32::MAX; (n + 1) * offsets * modes];
        let mut dq: VecDeque<(usize, usize, usize, u32)> = VecDeque::new();
        dist[index(0, 0, 0)] = 0;
        dq.push_back((0, 0, 0, 0));
        let step = |i: usize, d: usize, code: usize| -> Option<(usize, usize)> {
            if d == 0 {
                let x = Letter::from_code(code);
                if i < n && w[i] == x {
                    return Some((i + 1, 0));
                }
                if i > 0 && w[i - 1].inverse() == x {
                    return Some((i - 1, 0));
                }
            }
            table.step(d, code).map(|d2| (i, d2))
        };
        let cap32 = cap.min(u32::MAX as usize - 1) as u32;
        while let Some((i, d, m, c)) = dq.pop_front() {
            if dist[index(i, d, m)] < c {
                continue;
            }
            if m == 0 && i == n && d == 0 {
                return c as usize;
            }
            if c >= cap32 {
                continue;
            }
            let mut relax = |i: usize, d: usize, m: usize, cost: u32, front: bool| {
                let slot = &mut dist[index(i, d, m)];
                if cost < *slot {
                    *slot = cost;
                    if front {
                        dq.push_front((i, d, m, cost));
                    } else {
                        dq.push_back((i, d, m, cost));
                    }
                }
            };
            if m == 0 {
                for code in 0..2 * self.rank {
                    if let Some((i2, d2)) = step(i, d, code) {
                        relax(i2, d2, 0, c + 1, false);
                    }
                }
                for (k, h) in cores.iter().enumerate() {
                    relax(i, d, first_vertex[k] + h.base(), c + 1, false);
                }
            } else {
                let k = first_vertex.partition_point(|&f| f <= m) - 1;
                let h = &cores[k];
                let v = m - first_vertex[k];
                if v == h.base() {
                    relax(i, d, 0, c, true);
                }
                for code in 0..2 * self.rank {
                    let Some(u) = h.step(v, Letter::from_code(code)) else {
                        continue;
                    };
                    if let Some((i2, d2)) = step(i, d, code) {
                        relax(i2, d2, first_vertex[k] + u, c, true);
                    }
                }
            }
        }
        cap
    }

    fn offset_search_sparse(&self, w: &[Letter], cap: usize, bound: usize) -> usize {
        let n = w.len();
        let cores = self.cores();
        // mode 0: outside; mode k+1 with vertex v: reading core k
        type State = (u32, u64, u32, u32);
        let mut dist: HashMap<State, usize> = HashMap::new();
        let mut dq: VecDeque<(State, usize)> = VecDeque::new();
        let start: State = (0, 0, 0, 0);
        dist.insert(start, 0);
        dq.push_back((start, 0));
        let step = |i: usize, d: u64, x: Letter| -> Option<(usize, u64)> {
            let len = offset_len(d);
            if len == 0 {
                if i < n && w[i] == x {
                    return Some((i + 1, 0));
                }
                if i > 0 && w[i - 1].inverse() == x {
                    return Some((i - 1, 0));
                }
                return (bound >= 1).then(|| (i, offset_push(0, x)));
            }
            if offset_last(d) == x.inverse() {
                return Some((i, offset_pop(d)));
            }
            (len < bound).then(|| (i, offset_push(d, x)))
        };
        while let Some((s, c)) = dq.pop_front() {
            if dist.get(&s).is_some_and(|&best| best < c) {
                continue;
            }
            let (i, d, mode, v) = s;
            if mode == 0 && i as usize == n && d == 0 {
                return c;
            }
            if c >= cap {
                continue;
            }
            let mut relax =
                |t: State, cost: usize, front: bool, dq: &mut VecDeque<(State, usize)>| {
                    if dist.get(&t).is_none_or(|&best| cost < best) {
                        dist.insert(t, cost);
                        if front {
                            dq.push_front((t, cost));
                        } else {
                            dq.push_back((t, cost));
                        }
                    }
                };
            if mode == 0 {
                for code in 0..2 * self.rank {
                    let x = Letter::from_code(code);
                    if let Some((i2, d2)) = step(i as usize, d, x) {
                        relax((i2 as u32, d2, 0, 0), c + 1, false, &mut dq);
                    }
                }
                for (k, h) in cores.iter().enumerate() {
                    relax((i, d, k as u32 + 1, h.base() as u32), c + 1, false, &mut dq);
                }
            } else {
                let h = &cores[mode as usize - 1];
                if v as usize == h.base() {
                    relax((i, d, 0, 0), c, true, &mut dq);
                }
                for code in 0..2 * self.rank {
                    let x = Letter::from_code(code);
                    let Some(u) = h.step(v as usize, x) else {
                        continue;
                    };
                    if let Some((i2, d2)) = step(i as usize, d, x) {
                        relax((i2 as u32, d2, mode, u as u32), c, true, &mut dq);
                    }
                }
            }
        }
        cap
    }

    /// Circular interval cover: a lower bound for every element of the class,
    /// and the starting rotations that attain it.
    fn cyclic_lower_bound(&self, c: &[Letter]) -> (usize, Vec<usize>) {
        let n = c.len();
        let doubled: Vec<Letter> = c.iter().chain(c).copied().collect();
        let reach = self.reach(&doubled);
        // pick the point covered by the fewest interval starts
        let mut diff = vec![0i64; n + 1];
        for s in 0..n {
            let end = reach[s].min(s + n);
            let len = end - s;
            // covers positions s..end (mod n)
            if end <= n {
                diff[s] += 1;
                diff[end] -= 1;
            } else {
                diff[s] += 1;
                diff[n] -= 1;
                diff[0] += 1;
                diff[end - n] -= 1;
            }
            debug_assert!(len >= 1);
        }
        let mut best_p = 0;
        let mut run = 0i64;
        let mut best_count = i64::MAX;
        for (p, &dv) in diff.iter().enumerate().take(n) {
            run += dv;
            if run < best_count {
                best_count = run;
                best_p = p;
            }
        }
        let covering: Vec<usize> = (0..n)
            .filter(|&s| {
                let end = reach[s].min(s + n);
                let p = if best_p >= s { best_p } else { best_p + n };
                p < end
            })
            .collect();
        let mut best = usize::MAX;
        let mut starts = Vec::new();
        for s in covering {
            let (mut cur, mut count) = (s, 0);
            while cur < s + n {
                cur = reach[cur].min(s + n);
                count += 1;
            }
            match count.cmp(&best) {
                std::cmp::Ordering::Less => {
                    best = count;
                    starts = vec![s];
                }
                std::cmp::Ordering::Equal => starts.push(s),
                std::cmp::Ordering::Greater => {}
            }
        }
        (best, starts)
    }

    /// Minimum over rotations attaining the cyclic lower bound and their
    /// conjugates by words of length `≤ conjugator_bound`.
    pub fn electric_conjugacy_length(
        &self,
        c: &CyclicWord,
        conjugator_bound: usize,
    ) -> Result<ElectricLength, ElectricError> {
        self.check_ball(c.len() + 2 * conjugator_bound)?;
        let letters = c.letters();
        let n = letters.len();
        if n == 0 {
            return Ok(ElectricLength::new(0, 0));
        }
        let (lb, mut starts) = self.cyclic_lower_bound(letters);
        starts.truncate(MAX_CANDIDATE_ROTATIONS);
        if !starts.contains(&0) {
            starts.push(0);
        }
        let rotation = |s: usize| -> Vec<Letter> {
            letters[s..].iter().chain(&letters[..s]).copied().collect()
        };
        let mut best = usize::MAX;
        for &s in &starts {
            best = best.min(self.upper_bound_on_geodesic(&rotation(s)));
            if best == lb {
                return Ok(ElectricLength::new(best, lb));
            }
        }
        for &s in &starts {
            best = best.min(self.length_of_letters(&rotation(s)).value);
            if best == lb {
                return Ok(ElectricLength::new(best, lb));
            }
        }
        for len in 1..=conjugator_bound {
            for u in crate::words::enumerate_reduced_words(self.rank, len) {
                for &s in &starts {
                    let r = ReducedWord::from_letters(rotation(s));
                    let conj = r.conjugate_by(&u);
                    best = best.min(self.length_of_letters(conj.letters()).value);
                    if best == lb {
                        return Ok(ElectricLength::new(best, lb));
                    }
                }
            }
        }
        Ok(ElectricLength::new(best, lb))
    }

    pub fn electric_conjugacy_lengths(
        &self,
        classes: &[CyclicWord],
        conjugator_bound: usize,
        exec: Execution,
    ) -> Vec<Result<ElectricLength, ElectricError>> {
        par::map(exec, classes, |c| {
            self.electric_conjugacy_length(c, conjugator_bound)
        })
    }
}

const MAX_CANDIDATE_ROTATIONS: usize = 64;
const DENSE_OFFSET_LIMIT: usize = 4096;

/// Reduced words of length `≤ bound` numbered densely, with push/pop transitions.
struct OffsetTable {
    codes: usize,
    // next[id * codes + code]: id after appending `code`, or popping when it cancels
    next: Vec<Option<usize>>,
}

impl OffsetTable {
    fn new(rank: usize, bound: usize, limit: usize) -> Option<OffsetTable> {
        let codes = 2 * rank;
        let mut last: Vec<Option<usize>> = vec![None];
        let mut parent: Vec<usize> = vec![0];
        let mut layer = vec![0usize];
        let mut next = vec![None; codes];
        for _ in 0..bound {
            let mut fresh = Vec::new();
            for &id in &layer {
                for code in 0..codes {
                    if last[id].is_some_and(|l| Letter::from_code(l).inverse().code() == code) {
                        continue;
                    }
                    let child = last.len();
                    if child >= limit {
                        return None;
                    }
                    last.push(Some(code));
                    parent.push(id);
                    next.extend(std::iter::repeat_n(None, codes));
                    next[id * codes + code] = Some(child);
                    fresh.push(child);
                }
            }
            layer = fresh;
        }
        for id in 1..last.len() {
            let inv = Letter::from_code(last[id].unwrap()).inverse().code();
            next[id * codes + inv] = Some(parent[id]);
        }
        Some(OffsetTable { codes, next })
    }

    fn len(&self) -> usize {
        self.next.len() / self.codes.max(1)
    }

    fn step(&self, id: usize, code: usize) -> Option<usize> {
        self.next[id * self.codes + code]
    }
}

// offsets: up to 12 letters, 5 bits each (code + 1), length in the top 4 bits
fn offset_len(d: u64) -> usize {
    (d >> 60) as usize
}

fn offset_push(d: u64, x: Letter) -> u64 {
    let len = offset_len(d);
    let body = d & ((1u64 << 60) - 1);
    body | ((x.code() as u64 + 1) << (5 * len)) | (((len + 1) as u64) << 60)
}

fn offset_last(d: u64) -> Letter {
    let len = offset_len(d);
    Letter::from_code((((d >> (5 * (len - 1))) & 31) - 1) as usize)
}

fn offset_pop(d: u64) -> u64 {
    let len = offset_len(d);
    let body = d & ((1u64 << (5 * (len - 1))) - 1);
    body | (((len - 1) as u64) << 60)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityItem {
    pub class: String,
    pub relative_length: usize,
    pub electric: ElectricLength,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityReport {
    pub k: f64,
    pub items: Vec<ComparabilityItem>,
    pub conjugator_bound: usize,
    pub enumeration_bound: usize,
}

/// Largest `max(ratio, 1/ratio)` over the corpus, `ratio = |α|_rel / ||α||_el`.
pub fn comparability_constant(
    s: &ElectricSpace,
    d: &NonattractingData,
    corpus: &[CyclicWord],
    conjugator_bound: usize,
) -> Result<ComparabilityReport, ElectricError> {
    if corpus.is_empty() {
        return Err(ElectricError::EmptyCorpus);
    }
    let f: &GraphSelfMap = d.map();
    let mut items = Vec::new();
    let mut k: f64 = 1.0;
    for c in corpus {
        if d.system.carries_conjugacy_class(c) {
            return Err(ElectricError::Carried(format!("{c:?}")));
        }
        let el = s.electric_conjugacy_length(c, conjugator_bound)?;
        if el.value == 0 {
            return Err(ElectricError::ZeroLength(format!("{c:?}")));
        }
        let rel = relative_length(&Subject::Circuit(f.marked().realize_class(c)), d);
        let ratio = rel as f64 / el.value as f64;
        let spread = if ratio == 0.0 {
            f64::INFINITY
        } else {
            ratio.max(1.0 / ratio)
        };
        k = k.max(spread);
        items.push(ComparabilityItem {
            class: format!("{c:?}"),
            relative_length: rel,
            electric: el,
            ratio,
        });
    }
    Ok(ComparabilityReport {
        k,
        items,
        conjugator_bound,
        enumeration_bound: s.enumeration_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(gens: &[&[&[i32]]], rank: usize, bound: usize) -> ElectricSpace {
        let comps = gens
            .iter()
            .map(|g| FoldedImmersion::from_generators(g, rank).unwrap())
            .collect();
        ElectricSpace::new(rank, SubgroupSystem::new(comps), 1000, bound)
    }

    fn w(s: &[i32]) -> ReducedWord {
        ReducedWord::from_signed(s, 3).unwrap()
    }

    #[test]
    fn examples() {
        let s = space(&[&[&[3]]], 3, 2);
        assert_eq!(s.electric_length(&w(&[])).unwrap().value, 0);
        assert_eq!(
            s.electric_length(&w(&[3; 5])).unwrap(),
            ElectricLength::new(1, 1)
        );
        let mut x = vec![1];
        x.extend([3; 9]);
        x.push(2);
        assert_eq!(
            s.electric_length(&w(&x)).unwrap(),
            ElectricLength::new(3, 3)
        );
        let c = CyclicWord::from_word(&w(&x));
        assert_eq!(s.electric_conjugacy_length(&c, 1).unwrap().value, 3);
        assert_eq!(
            s.electric_conjugacy_length(&CyclicWord::from_word(&w(&[3; 5])), 0)
                .unwrap()
                .value,
            1
        );
        assert_eq!(
            s.electric_conjugacy_length(&CyclicWord::from_word(&w(&[2, 1, -2])), 0)
                .unwrap()
                .value,
            1
        );
    }

    #[test]
    fn dense_and_sparse_searches_agree() {
        use rand::{Rng, SeedableRng};
        let s = space(&[&[&[3], &[-2, -1, 2, 1]]], 3, 2);
        let table = OffsetTable::new(3, 2, DENSE_OFFSET_LIMIT).unwrap();
        assert_eq!(table.len(), 1 + 6 + 30);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let len = rng.gen_range(0..14);
            let raw: Vec<i32> = (0..len)
                .map(|_| [1, -1, 2, -2, 3, -3][rng.gen_range(0..6)])
                .collect();
            let r = ReducedWord::from_signed(&raw, 3).unwrap();
            let cap = s.upper_bound_on_geodesic(r.letters());
            assert_eq!(
                s.offset_search_dense(r.letters(), cap, &table),
                s.offset_search_sparse(r.letters(), cap, 2),
                "{raw:?}"
            );
        }
    }

    #[test]
    fn out_of_ball() {
        let s = ElectricSpace::new(3, SubgroupSystem::empty(), 4, 1);
        assert!(matches!(
            s.electric_length(&w(&[1; 5])),
            Err(ElectricError::OutOfBall { .. })
        ));
    }

    #[test]
    fn offsets_roundtrip() {
        let mut d = 0u64;
        let xs = [
            Letter::from_code(3),
            Letter::from_code(0),
            Letter::from_code(5),
        ];
        for &x in &xs {
            d = offset_push(d, x);
            assert_eq!(offset_last(d), x);
        }
        assert_eq!(offset_len(d), 3);
        d = offset_pop(d);
        assert_eq!((offset_len(d), offset_last(d)), (2, xs[1]));
        assert_eq!(offset_pop(offset_pop(d)), 0);
    }

    #[test]
    fn off_geodesic_move_is_found() {
        // b a' b' = a' · (a b a' b'): one letter off the geodesic, then one cone move
        let s = space(&[&[&[1, 2, -1, -2]]], 3, 2);
        let r = s.electric_length(&w(&[2, -1, -2])).unwrap();
        assert_eq!(r.value, 2);
        // the cover bound only sees that b a' b' is readable in the core
        assert_eq!(r.lower_bound, 1);
        assert!(!r.exact);
    }
}
