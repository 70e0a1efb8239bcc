//! Finitely generated subgroups as folded core graphs (Stallings graphs):
//! folding, membership, carried classes, fiber products and malnormality.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::{self, Execution};
use crate::words::{push_reduced, Basis, CyclicWord, Letter, ReducedWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubgroupError {
    #[error("the generators span the trivial subgroup; use an empty system instead")]
    Trivial,
    #[error("generator exceeds ambient rank {0}")]
    RankExceeded(usize),
    #[error(transparent)]
    Word(#[from] WordError),
}

const NONE: u32 = u32::MAX;

/// A folded core graph with labels in the ambient basis.
///
/// `adj[v][code]` is the endpoint of the edge leaving `v` with label
/// `Letter::from_code(code)`, both orientations stored. The subgroup is
/// `base_word · π₁(graph, base) · base_word⁻¹`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FoldedImmersion {
    ambient_rank: usize,
    adj: Vec<Vec<u32>>,
    base: usize,
    base_word: ReducedWord,
}

impl std::fmt::Debug for FoldedImmersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let gens: Vec<String> = self.generators().iter().map(|w| format!("{w:?}")).collect();
        write!(f, "⟨{}⟩", gens.join(", "))
    }
}

/// Union-find folding of a labeled graph given edge by edge.
struct Folder {
    parent: Vec<usize>,
    out: Vec<BTreeMap<Letter, usize>>,
    pending: VecDeque<(usize, Letter, usize)>,
}

impl Folder {
    fn new() -> Folder {
        Folder {
            parent: Vec::new(),
            out: Vec::new(),
            pending: VecDeque::new(),
        }
    }

    fn vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.out.push(BTreeMap::new());
        self.parent.len() - 1
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn edge(&mut self, u: usize, x: Letter, w: usize) {
        self.pending.push_back((u, x, w));
        self.run();
    }

    fn half(&mut self, u: usize, x: Letter, w: usize) {
        match self.out[u].get(&x).copied() {
            Some(t) => {
                let t = self.find(t);
                if t != w {
                    self.merge(t, w);
                }
            }
            None => {
                self.out[u].insert(x, w);
            }
        }
    }

    fn run(&mut self) {
        while let Some((u, x, w)) = self.pending.pop_front() {
            let u = self.find(u);
            let w = self.find(w);
            self.half(u, x, w);
            let (u, w) = (self.find(u), self.find(w));
            self.half(w, x.inverse(), u);
        }
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        self.parent[gone] = keep;
        let moved = std::mem::take(&mut self.out[gone]);
        for (x, t) in moved {
            self.pending.push_back((keep, x, t));
        }
    }
}

impl FoldedImmersion {
    /// Stallings folding of the wedge of loops spelling `generators`, then core reduction.
    pub fn fold(
        generators: &[ReducedWord],
        ambient_rank: usize,
    ) -> Result<FoldedImmersion, SubgroupError> {
        let mut fd = Folder::new();
        let base = fd.vertex();
        for w in generators {
            if w.max_generator() > ambient_rank {
                return Err(SubgroupError::RankExceeded(ambient_rank));
            }
            let l = w.letters();
            if l.is_empty() {
                continue;
            }
            let mut cur = base;
            for (i, &x) in l.iter().enumerate() {
                let next = if i + 1 == l.len() { base } else { fd.vertex() };
                fd.edge(cur, x, next);
                cur = next;
            }
        }
        let n = fd.parent.len();
        let mut out: Vec<BTreeMap<Letter, usize>> = vec![BTreeMap::new(); n];
        for v in 0..n {
            if fd.find(v) != v {
                continue;
            }
            let entries: Vec<(Letter, usize)> = fd.out[v].iter().map(|(&x, &t)| (x, t)).collect();
            for (x, t) in entries {
                let t = fd.find(t);
                out[v].insert(x, t);
            }
        }
        let root = fd.find(base);
        from_adjacency(ambient_rank, &out, root, ReducedWord::identity())
    }

    pub fn from_generators(
        gens: &[&[i32]],
        ambient_rank: usize,
    ) -> Result<FoldedImmersion, SubgroupError> {
        let words = gens
            .iter()
            .map(|g| ReducedWord::from_signed(g, ambient_rank))
            .collect::<Result<Vec<_>, _>>()?;
        FoldedImmersion::fold(&words, ambient_rank)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|r| r.iter().filter(|&&t| t != NONE).count())
            .sum::<usize>()
            / 2
    }

    /// Rank of the subgroup: `E − V + 1`.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn base_word(&self) -> &ReducedWord {
        &self.base_word
    }

    pub fn step(&self, v: usize, x: Letter) -> Option<usize> {
        let t = self.adj[v][x.code()];
        (t != NONE).then_some(t as usize)
    }

    /// Endpoint of the label path from `v` reading `letters`, if it exists.
    pub fn read_from(&self, v: usize, letters: &[Letter]) -> Option<usize> {
        letters.iter().try_fold(v, |u, &x| self.step(u, x))
    }

    /// Positively labeled edges `(from, letter, to)`, each once.
    pub fn edges(&self) -> Vec<(usize, Letter, usize)> {
        let mut out = Vec::new();
        for (v, row) in self.adj.iter().enumerate() {
            for (code, &t) in row.iter().enumerate() {
                let x = Letter::from_code(code);
                if t != NONE && !x.is_inverse() {
                    out.push((v, x, t as usize));
                }
            }
        }
        out
    }

    /// Membership of `w` in the subgroup itself (not its conjugates).
    pub fn contains(&self, w: &ReducedWord) -> bool {
        let u = self.base_word.inverse().mul(w).mul(&self.base_word);
        self.read_from(self.base, u.letters()) == Some(self.base)
    }

    /// Whether some conjugate of the subgroup contains the class.
    pub fn carries(&self, c: &CyclicWord) -> bool {
        if c.is_trivial() {
            return true;
        }
        (0..self.vertex_count()).any(|v| self.read_from(v, c.letters()) == Some(v))
    }

    /// Free basis read off a BFS spanning tree from the base, conjugated by `base_word`.
    pub fn generators(&self) -> Vec<ReducedWord> {
        let n = self.vertex_count();
        let mut tree: Vec<Option<Vec<Letter>>> = vec![None; n];
        let mut tree_edge: BTreeSet<(usize, usize)> = BTreeSet::new();
        tree[self.base] = Some(Vec::new());
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for code in 0..2 * self.ambient_rank {
                let t = self.adj[v][code];
                if t != NONE && tree[t as usize].is_none() {
                    let mut p = tree[v].clone().unwrap();
                    push_reduced(&mut p, Letter::from_code(code));
                    tree[t as usize] = Some(p);
                    tree_edge.insert((v, code));
                    tree_edge.insert((t as usize, Letter::from_code(code).inverse().code()));
                    queue.push_back(t as usize);
                }
            }
        }
        let mut gens = Vec::new();
        for (u, x, v) in self.edges() {
            if tree_edge.contains(&(u, x.code())) {
                continue;
            }
            let word = ReducedWord::from_letters(tree[u].clone().unwrap())
                .mul(&ReducedWord::letter(x))
                .mul(&ReducedWord::from_letters(tree[v].clone().unwrap()).inverse());
            gens.push(word.conjugate_by(&self.base_word));
        }
        gens
    }

    /// Basepoint-free canonical form: the least BFS relabeling over all start
    /// vertices. Equal forms mean equal conjugacy classes of subgroups.
    pub fn canonical_form(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count();
        (0..n)
            .map(|s| relabel_from(&self.adj, s))
            .min()
            .unwrap_or_default()
    }

    pub fn same_class(&self, other: &FoldedImmersion) -> bool {
        self.ambient_rank == other.ambient_rank && self.canonical_form() == other.canonical_form()
    }

    pub fn to_json(&self, basis: &Basis) -> LabeledGraph {
        LabeledGraph {
            vertices: self.vertex_count(),
            base: self.base,
            base_word: basis.format(&self.base_word),
            rank: self.rank(),
            edges: self
                .edges()
                .into_iter()
                .map(|(from, x, to)| LabeledEdge {
                    from,
                    label: basis.letter_name(x),
                    to,
                })
                .collect(),
            generators: self.generators().iter().map(|w| basis.format(w)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledEdge {
    pub from: usize,
    pub label: String,
    pub to: usize,
}

/// Report form of a folded graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub vertices: usize,
    pub base: usize,
    pub base_word: String,
    pub rank: usize,
    pub edges: Vec<LabeledEdge>,
    pub generators: Vec<String>,
}

fn relabel_from(adj: &[Vec<u32>], s: usize) -> Vec<Vec<u32>> {
    let n = adj.len();
    let mut id = vec![NONE; n];
    let mut order = vec![s];
    id[s] = 0;
    let mut k = 0;
    while k < order.len() {
        let v = order[k];
        for &t in &adj[v] {
            if t != NONE && id[t as usize] == NONE {
                id[t as usize] = order.len() as u32;
                order.push(t as usize);
            }
        }
        k += 1;
    }
    order
        .iter()
        .map(|&v| {
            adj[v]
                .iter()
                .map(|&t| if t == NONE { NONE } else { id[t as usize] })
                .collect()
        })
        .collect()
}

/// Prunes valence-one vertices (moving the base and extending `base_word` when
/// the base is pruned) and renumbers by BFS from the base.
fn from_adjacency(
    ambient_rank: usize,
    out: &[BTreeMap<Letter, usize>],
    base: usize,
    base_word: ReducedWord,
) -> Result<FoldedImmersion, SubgroupError> {
    let n = out.len();
    let mut alive: Vec<bool> = (0..n).map(|v| !out[v].is_empty() || v == base).collect();
    let mut adj: Vec<BTreeMap<Letter, usize>> = out.to_vec();
    let mut base = base;
    let mut bw: Vec<Letter> = base_word.letters().to_vec();
    let degree = |adj: &Vec<BTreeMap<Letter, usize>>, v: usize| adj[v].len();
    let mut stack: Vec<usize> = (0..n)
        .filter(|&v| alive[v] && degree(&adj, v) <= 1)
        .collect();
    while let Some(v) = stack.pop() {
        if !alive[v] || degree(&adj, v) > 1 {
            continue;
        }
        if degree(&adj, v) == 0 {
            if v == base {
                return Err(SubgroupError::Trivial);
            }
            alive[v] = false;
            continue;
        }
        let (&x, &t) = adj[v].iter().next().unwrap();
        if t == v {
            // a single loop half-edge cannot happen: loops contribute two entries
            continue;
        }
        adj[v].clear();
        adj[t].remove(&x.inverse());
        alive[v] = false;
        if v == base {
            base = t;
            push_reduced(&mut bw, x);
        }
        if degree(&adj, t) <= 1 {
            stack.push(t);
        }
    }
    // BFS renumbering from the base
    let mut id = vec![usize::MAX; n];
    let mut order = vec![base];
    id[base] = 0;
    let mut k = 0;
    while k < order.len() {
        let v = order[k];
        for &t in adj[v].values() {
            if id[t] == usize::MAX {
                id[t] = order.len();
                order.push(t);
            }
        }
        k += 1;
    }
    let mut table = vec![vec![NONE; 2 * ambient_rank]; order.len()];
    for (i, &v) in order.iter().enumerate() {
        for (&x, &t) in &adj[v] {
            table[i][x.code()] = id[t] as u32;
        }
    }
    let fi = FoldedImmersion {
        ambient_rank,
        adj: table,
        base: 0,
        base_word: ReducedWord::from_letters(bw),
    };
    if fi.edge_count() == 0 {
        return Err(SubgroupError::Trivial);
    }
    Ok(fi)
}

/// Core components of the labeled fiber product `A ×_R B`, each flagged by
/// whether its core passes through a product vertex `(v, v)`.
fn fiber_product(a: &FoldedImmersion, b: &FoldedImmersion) -> Vec<(FoldedImmersion, bool)> {
    assert_eq!(
        a.ambient_rank, b.ambient_rank,
        "fiber product over different ranks"
    );
    let r = a.ambient_rank;
    let (na, nb) = (a.vertex_count(), b.vertex_count());
    let idx = |u: usize, v: usize| u * nb + v;
    let mut out: Vec<BTreeMap<Letter, usize>> = vec![BTreeMap::new(); na * nb];
    for u in 0..na {
        for v in 0..nb {
            for code in 0..2 * r {
                let (s, t) = (a.adj[u][code], b.adj[v][code]);
                if s != NONE && t != NONE {
                    out[idx(u, v)].insert(Letter::from_code(code), idx(s as usize, t as usize));
                }
            }
        }
    }
    // prune every valence-one vertex; what is left is the union of the cores
    let mut stack: Vec<usize> = (0..na * nb).filter(|&v| out[v].len() == 1).collect();
    while let Some(v) = stack.pop() {
        if out[v].len() != 1 {
            continue;
        }
        let (&x, &t) = out[v].iter().next().unwrap();
        out[v].clear();
        out[t].remove(&x.inverse());
        if out[t].len() == 1 {
            stack.push(t);
        }
    }
    let mut seen = vec![false; na * nb];
    let mut results = Vec::new();
    for s in 0..na * nb {
        if seen[s] || out[s].is_empty() {
            continue;
        }
        let mut members = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < members.len() {
            for &t in out[members[k]].values() {
                if !seen[t] {
                    seen[t] = true;
                    members.push(t);
                }
            }
            k += 1;
        }
        let diagonal = members.iter().any(|&m| nb == na && m / nb == m % nb);
        if let Ok(fi) = from_adjacency(r, &out, s, ReducedWord::identity()) {
            results.push((fi, diagonal));
        }
    }
    results
}

/// Intersections of conjugates of `A` and `B`, one folded graph per conjugacy class.
pub fn intersection_core(a: &FoldedImmersion, b: &FoldedImmersion) -> Vec<FoldedImmersion> {
    fiber_product(a, b).into_iter().map(|(f, _)| f).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MalnormalityWitness {
    pub i: usize,
    pub j: usize,
    /// generators of a nontrivial intersection of conjugates
    pub generators: Vec<ReducedWord>,
}

/// Pairwise malnormality of a list of components (duplicates allowed).
pub fn is_malnormal(components: &[FoldedImmersion]) -> (bool, Option<MalnormalityWitness>) {
    is_malnormal_with(components, Execution::default())
}

pub fn is_malnormal_with(
    components: &[FoldedImmersion],
    exec: Execution,
) -> (bool, Option<MalnormalityWitness>) {
    let n = components.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let found = par::map(exec, &pairs, |&(i, j)| {
        let a = &components[i];
        let b = &components[j];
        if i != j {
            return intersection_core(a, b)
                .into_iter()
                .next()
                .map(|f| (i, j, f));
        }
        fiber_product(a, a)
            .into_iter()
            .find(|(_, diagonal)| !diagonal)
            .map(|(f, _)| (i, j, f))
    });
    match found.into_iter().flatten().next() {
        Some((i, j, f)) => (
            false,
            Some(MalnormalityWitness {
                i,
                j,
                generators: f.generators(),
            }),
        ),
        None => (true, None),
    }
}

/// A finite collection of subgroup conjugacy classes, without repeats.
#[derive(Clone, Debug, Default)]
pub struct SubgroupSystem {
    components: Vec<FoldedImmersion>,
    pub malnormal_checked: Option<bool>,
}

impl SubgroupSystem {
    pub fn empty() -> SubgroupSystem {
        SubgroupSystem::default()
    }

    /// Drops components equal up to conjugacy to an earlier one.
    pub fn new(components: Vec<FoldedImmersion>) -> SubgroupSystem {
        let mut kept: Vec<FoldedImmersion> = Vec::new();
        for c in components {
            if !kept.iter().any(|k| k.same_class(&c)) {
                kept.push(c);
            }
        }
        SubgroupSystem {
            components: kept,
            malnormal_checked: None,
        }
    }

    pub fn components(&self) -> &[FoldedImmersion] {
        &self.components
    }

    pub fn is_trivial(&self) -> bool {
        self.components.is_empty()
    }

    pub fn carries_conjugacy_class(&self, c: &CyclicWord) -> bool {
        self.components.iter().any(|h| h.carries(c))
    }

    /// Membership of a word in one of the chosen representatives.
    pub fn contains_word(&self, w: &ReducedWord) -> bool {
        self.components.iter().any(|h| h.contains(w))
    }

    pub fn check_malnormal(&mut self) -> (bool, Option<MalnormalityWitness>) {
        let r = is_malnormal(&self.components);
        self.malnormal_checked = Some(r.0);
        r
    }
}
