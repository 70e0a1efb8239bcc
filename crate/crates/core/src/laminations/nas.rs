use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{LaminationError, NonattractingSubgraph};
use crate::graph::nielsen::{closed_indivisible, find_nielsen_paths, NielsenPath};
use crate::graph::{DirEdge, GraphSelfMap};
use crate::subgroups::{FoldedImmersion, LabeledGraph, MalnormalityWitness, SubgroupSystem};
use crate::words::{Basis, ReducedWord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KEdge {
    pub from: usize,
    pub to: usize,
    /// `h` on this edge: a single `Z` edge, or the Nielsen path for `E_ρ`
    pub image: Vec<DirEdge>,
    pub label: String,
}

/// `K = Z ⊔ E_ρ` after endpoint identifications, with `h: K → G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KGraph {
    pub vertex_images: Vec<usize>,
    pub edges: Vec<KEdge>,
}

impl KGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_images.len()
    }

    /// Directions of `G` at each vertex of `K` under `h`.
    fn directions(&self) -> Vec<Vec<DirEdge>> {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for e in &self.edges {
            out[e.from].push(e.image[0]);
            out[e.to].push(e.image.last().unwrap().reverse());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KComponent {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub rank: usize,
    pub generators: Vec<ReducedWord>,
}

/// `Z`, `σ̂`, the graph `K` and the subgroup system it defines.
#[derive(Clone, Debug)]
pub struct NonattractingData {
    pub height: usize,
    pub z: Vec<usize>,
    pub sigma_hat: Option<NielsenPath>,
    pub k_graph: KGraph,
    pub components: Vec<KComponent>,
    pub system: SubgroupSystem,
    pub search_depth: usize,
    pub malnormality_witness: Option<MalnormalityWitness>,
    map: GraphSelfMap,
}

impl NonattractingData {
    pub fn map(&self) -> &GraphSelfMap {
        &self.map
    }

    pub fn in_z(&self, e: usize) -> bool {
        self.z.binary_search(&e).is_ok()
    }

    pub fn sigma_edges(&self) -> &[DirEdge] {
        self.sigma_hat
            .as_ref()
            .map(|s| s.edges.as_slice())
            .unwrap_or(&[])
    }

    pub fn summary(&self, basis: &Basis) -> NasSummary {
        let g = self.map.graph();
        NasSummary {
            height: self.height,
            z: self.z.iter().map(|&e| g.edge(e).name.clone()).collect(),
            sigma_hat: self.sigma_hat.as_ref().map(|s| g.format_edges(&s.edges)),
            components: self
                .system
                .components()
                .iter()
                .map(|c| c.to_json(basis))
                .collect(),
            malnormal: self.system.malnormal_checked,
            search_depth: self.search_depth,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NasSummary {
    pub height: usize,
    pub z: Vec<String>,
    pub sigma_hat: Option<String>,
    pub components: Vec<LabeledGraph>,
    pub malnormal: Option<bool>,
    pub search_depth: usize,
}

/// The closed indivisible Nielsen path of height `r` among paths of length
/// `≤ length_bound`, if there is one. More than one is an error.
pub fn select_sigma(
    f: &GraphSelfMap,
    r: usize,
    length_bound: usize,
) -> Result<Option<NielsenPath>, LaminationError> {
    let found = find_nielsen_paths(f, length_bound, 1);
    let mut closed = closed_indivisible(f, r, &found);
    match closed.len() {
        0 => Ok(None),
        1 => Ok(closed.pop()),
        n => Err(LaminationError::AmbiguousNielsenPath(n)),
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

pub fn build_nas(
    f: &GraphSelfMap,
    r: usize,
    z: &NonattractingSubgraph,
    nielsen: Option<&NielsenPath>,
) -> Result<NonattractingData, LaminationError> {
    let g = f.graph();
    let inconsistent = |msg: String| Err(LaminationError::InconsistentNielsenData(msg));
    if let Some(&e) = z.edges.iter().find(|&&e| f.height_of_edge(e) == r) {
        return inconsistent(format!("Z contains the stratum edge `{}`", g.edge(e).name));
    }
    if let Some(p) = nielsen {
        let closed = !p.edges.is_empty() && g.end(*p.edges.last().unwrap()) == p.start;
        if !closed || f.height_of(&p.edges) != r || p.period != 1 {
            return inconsistent(format!(
                "`{}` is not a closed period-one path of height {r}",
                g.format_edges(&p.edges)
            ));
        }
    }

    // vertex ids: G vertices, then the two ends x, y of E_ρ
    let nv = g.vertex_count();
    let (x, y) = (nv, nv + 1);
    let mut in_z = vec![false; nv];
    for &e in &z.edges {
        in_z[g.edge(e).from] = true;
        in_z[g.edge(e).to] = true;
    }
    let mut uf = UnionFind((0..nv + 2).collect());
    let mut h_end = vec![usize::MAX; 2];
    if let Some(p) = nielsen {
        let (hx, hy) = (p.start, g.end(*p.edges.last().unwrap()));
        h_end = vec![hx, hy];
        if in_z[hx] {
            uf.union(x, hx);
        }
        if in_z[hy] {
            uf.union(y, hy);
        }
        if hx == hy && !in_z[hx] {
            uf.union(x, y);
        }
    }
    let mut raw_edges: Vec<(usize, usize, Vec<DirEdge>, String)> = z
        .edges
        .iter()
        .map(|&e| {
            (
                g.edge(e).from,
                g.edge(e).to,
                vec![DirEdge::new(e, false)],
                g.edge(e).name.clone(),
            )
        })
        .collect();
    if let Some(p) = nielsen {
        raw_edges.push((x, y, p.edges.clone(), "E_ρ".into()));
    }

    // renumber the used vertex classes
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertex_images = Vec::new();
    let mut edges = Vec::new();
    for (a, b, image, label) in raw_edges {
        let mut id = |v: usize, uf: &mut UnionFind| {
            let root = uf.find(v);
            *ids.entry(root).or_insert_with(|| {
                vertex_images.push(if root < nv { root } else { h_end[root - nv] });
                vertex_images.len() - 1
            })
        };
        let from = id(a, &mut uf);
        let to = id(b, &mut uf);
        edges.push(KEdge {
            from,
            to,
            image,
            label,
        });
    }
    let k_graph = KGraph {
        vertex_images,
        edges,
    };

    for (v, dirs) in k_graph.directions().into_iter().enumerate() {
        let mut sorted = dirs.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return inconsistent(format!(
                "h is not an immersion at K-vertex {v}: direction {} is used twice",
                g.dir_name(w[0])
            ));
        }
    }

    let components = components_of(f, &k_graph)?;
    let mut folded = Vec::new();
    for c in &components {
        let h = FoldedImmersion::fold(&c.generators, f.marked().rank())
            .map_err(|e| LaminationError::InconsistentNielsenData(e.to_string()))?;
        if h.rank() != c.rank {
            return inconsistent(format!(
                "component of rank {} folds to rank {}",
                c.rank,
                h.rank()
            ));
        }
        folded.push(h);
    }
    let mut system = SubgroupSystem::new(folded);
    let (_, malnormality_witness) = system.check_malnormal();
    Ok(NonattractingData {
        height: r,
        z: z.edges.clone(),
        sigma_hat: nielsen.cloned(),
        k_graph,
        components,
        system,
        search_depth: z.search_depth,
        malnormality_witness,
        map: f.clone(),
    })
}

/// Noncontractible components of `K` with `π₁` generators read in `G`.
fn components_of(f: &GraphSelfMap, k: &KGraph) -> Result<Vec<KComponent>, LaminationError> {
    let m = f.marked();
    let n = k.vertex_count();
    let mut incident: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for (i, e) in k.edges.iter().enumerate() {
        incident[e.from].push((i, false));
        incident[e.to].push((i, true));
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        // BFS tree: path[v] is the G-path from h(root) to h(v) along tree edges
        let mut path: Vec<Option<Vec<DirEdge>>> = vec![None; n];
        path[root] = Some(Vec::new());
        seen[root] = true;
        let mut tree_edge = vec![false; k.edges.len()];
        let mut verts = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(i, backwards) in &incident[v] {
                let e = &k.edges[i];
                let w = if backwards { e.from } else { e.to };
                if seen[w] {
                    continue;
                }
                seen[w] = true;
                tree_edge[i] = true;
                let mut p = path[v].clone().unwrap();
                p.extend(oriented(&e.image, backwards));
                path[w] = Some(p);
                verts.push(w);
                queue.push_back(w);
            }
        }
        verts.sort_unstable();
        let mut edge_ids: Vec<usize> = (0..k.edges.len())
            .filter(|&i| path[k.edges[i].from].is_some())
            .collect();
        edge_ids.sort_unstable();
        let rank = (edge_ids.len() + 1).saturating_sub(verts.len());
        if rank == 0 {
            continue;
        }
        let to_root = m.tree_path(k.vertex_images[root]).to_vec();
        let generators = edge_ids
            .iter()
            .filter(|&&i| !tree_edge[i])
            .map(|&i| {
                let e = &k.edges[i];
                let mut p = to_root.clone();
                p.extend_from_slice(path[e.from].as_ref().unwrap());
                p.extend_from_slice(&e.image);
                p.extend(oriented(path[e.to].as_ref().unwrap(), true));
                p.extend(oriented(&to_root, true));
                m.word_of(&p)
            })
            .collect();
        out.push(KComponent {
            vertices: verts,
            edges: edge_ids,
            rank,
            generators,
        });
    }
    Ok(out)
}

fn oriented(p: &[DirEdge], backwards: bool) -> Vec<DirEdge> {
    if backwards {
        super::reversed(p)
    } else {
        p.to_vec()
    }
}
