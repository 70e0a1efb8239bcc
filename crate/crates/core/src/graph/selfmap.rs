//! Topological representatives: a marked graph, a filtration and edge images.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::marked::MarkedGraph;
use super::pf::{self, Matrix, PfCertificate};
use super::{push_tight, tighten_edges, Circuit, DirEdge, EdgePath, Graph, GraphError};
use crate::words::FreeAutomorphism;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StratumKind {
    Eg,
    Neg,
    Zero,
    /// Nonzero but not irreducible; the filtration is too coarse here.
    Reducible,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stratum {
    pub height: usize,
    pub edges: Vec<usize>,
    pub kind: StratumKind,
    pub matrix: Matrix,
    pub pf: Option<PfCertificate>,
}

/// `f: G → G` with filtration `∅ = G_0 ⊂ G_1 ⊂ … ⊂ G_k = G`.
#[derive(Clone, Debug)]
pub struct GraphSelfMap {
    name: String,
    marked: MarkedGraph,
    vertex_images: Vec<usize>,
    images: Vec<Vec<DirEdge>>,
    raw_tight: Vec<bool>,
    heights: Vec<usize>,
    levels: usize,
    induced: FreeAutomorphism,
}

impl GraphSelfMap {
    /// `filtration[k]` lists the edges of `G_{k+1}`; the lists must increase and end with all edges.
    /// Vertex images are inferred from edge images when not given.
    pub fn new(
        name: impl Into<String>,
        marked: MarkedGraph,
        vertex_images: Option<Vec<usize>>,
        edge_images: Vec<Vec<DirEdge>>,
        filtration: &[Vec<usize>],
    ) -> Result<GraphSelfMap, GraphError> {
        let g = marked.graph().clone();
        let ne = g.edge_count();
        if edge_images.len() != ne {
            return Err(GraphError::BadImage {
                edge: "*".into(),
                reason: format!("{} images for {} edges", edge_images.len(), ne),
            });
        }
        let mut vimg: Vec<Option<usize>> = match &vertex_images {
            Some(v) if v.len() == g.vertex_count() => v.iter().map(|&x| Some(x)).collect(),
            Some(v) => {
                return Err(GraphError::BadImage {
                    edge: "*".into(),
                    reason: format!(
                        "{} vertex images for {} vertices",
                        v.len(),
                        g.vertex_count()
                    ),
                })
            }
            None => vec![None; g.vertex_count()],
        };
        for (e, img) in edge_images.iter().enumerate() {
            let name = g.edge(e).name.clone();
            if img.is_empty() {
                return Err(GraphError::BadImage {
                    edge: name,
                    reason: "empty image".into(),
                });
            }
            g.check_composable(img)
                .map_err(|err| GraphError::BadImage {
                    edge: name.clone(),
                    reason: err.to_string(),
                })?;
            let ed = g.edge(e);
            for (v, w) in [
                (ed.from, g.start(img[0])),
                (ed.to, g.end(*img.last().unwrap())),
            ] {
                match vimg[v] {
                    Some(x) if x != w => {
                        return Err(GraphError::BadImage {
                            edge: name,
                            reason: format!(
                                "endpoint image disagrees at vertex `{}`",
                                g.vertex_name(v)
                            ),
                        })
                    }
                    _ => vimg[v] = Some(w),
                }
            }
        }
        let vertex_images: Vec<usize> = vimg
            .into_iter()
            .enumerate()
            .map(|(v, x)| x.ok_or_else(|| GraphError::UnknownVertex(g.vertex_name(v).to_string())))
            .collect::<Result<_, _>>()?;

        let raw_tight: Vec<bool> = edge_images
            .iter()
            .map(|p| tighten_edges(p).len() == p.len())
            .collect();
        let images: Vec<Vec<DirEdge>> = edge_images.iter().map(|p| tighten_edges(p)).collect();
        for (e, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(GraphError::BadImage {
                    edge: g.edge(e).name.clone(),
                    reason: "image tightens to a trivial path".into(),
                });
            }
        }

        let heights = heights_from(&g, filtration)?;
        let levels = filtration.len();
        for (e, img) in images.iter().enumerate() {
            if let Some(d) = img.iter().find(|d| heights[d.edge()] > heights[e]) {
                let _ = d;
                return Err(GraphError::FiltrationNotRespected {
                    edge: g.edge(e).name.clone(),
                    level: heights[e],
                });
            }
        }

        let induced_images = (1..=marked.rank())
            .map(|i| {
                let w = crate::words::ReducedWord::letter(crate::words::Letter::new(i, false));
                let loop_path = marked.realize_word(&w);
                let mut out = Vec::new();
                for &d in loop_path.edges() {
                    for &x in &image_of(&images, d) {
                        push_tight(&mut out, x);
                    }
                }
                marked.word_of(&out)
            })
            .collect();
        let induced = FreeAutomorphism::new(induced_images)?
            .invert(100_000)
            .map_err(|e| GraphError::NotAnAutomorphism(e.to_string()))?;

        Ok(GraphSelfMap {
            name: name.into(),
            marked,
            vertex_images,
            images,
            raw_tight,
            heights,
            levels,
            induced,
        })
    }

    /// The rose map realizing `phi` under the standard marking, with a single stratum.
    pub fn rose_map(
        name: impl Into<String>,
        phi: &FreeAutomorphism,
    ) -> Result<GraphSelfMap, GraphError> {
        let marked = MarkedGraph::identity_rose(phi.rank());
        let images = phi
            .images()
            .iter()
            .map(|w| {
                w.letters()
                    .iter()
                    .map(|l| DirEdge::new(l.generator() - 1, l.is_inverse()))
                    .collect()
            })
            .collect();
        let all: Vec<usize> = (0..phi.rank()).collect();
        GraphSelfMap::new(name, marked, None, images, &[all])
    }

    /// Rose map with an explicit filtration given as cumulative generator lists (0-based).
    pub fn rose_map_filtered(
        name: impl Into<String>,
        phi: &FreeAutomorphism,
        filtration: &[Vec<usize>],
    ) -> Result<GraphSelfMap, GraphError> {
        let marked = MarkedGraph::identity_rose(phi.rank());
        let images = phi
            .images()
            .iter()
            .map(|w| {
                w.letters()
                    .iter()
                    .map(|l| DirEdge::new(l.generator() - 1, l.is_inverse()))
                    .collect()
            })
            .collect();
        GraphSelfMap::new(name, marked, None, images, filtration)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn marked(&self) -> &MarkedGraph {
        &self.marked
    }

    pub fn graph(&self) -> &Graph {
        self.marked.graph()
    }

    pub fn induced(&self) -> &FreeAutomorphism {
        &self.induced
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vertex_images[v]
    }

    pub fn edge_image(&self, e: usize) -> &[DirEdge] {
        &self.images[e]
    }

    pub fn edge_image_was_tight(&self, e: usize) -> bool {
        self.raw_tight[e]
    }

    pub fn dir_image(&self, d: DirEdge) -> Vec<DirEdge> {
        image_of(&self.images, d)
    }

    /// Number of filtration levels `k` (so strata are `H_1..H_k`).
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn height_of_edge(&self, e: usize) -> usize {
        self.heights[e]
    }

    /// Height of a path: the largest stratum index it crosses (0 for trivial paths).
    pub fn height_of(&self, edges: &[DirEdge]) -> usize {
        edges
            .iter()
            .map(|d| self.heights[d.edge()])
            .max()
            .unwrap_or(0)
    }

    pub fn stratum_edges(&self, k: usize) -> Vec<usize> {
        (0..self.heights.len())
            .filter(|&e| self.heights[e] == k)
            .collect()
    }

    /// Edges of `G_k`.
    pub fn level_edges(&self, k: usize) -> Vec<usize> {
        (0..self.heights.len())
            .filter(|&e| self.heights[e] <= k)
            .collect()
    }

    /// Image of a tight edge sequence, tightened. Does not validate.
    pub fn map_edges(&self, edges: &[DirEdge]) -> Vec<DirEdge> {
        let mut out = Vec::new();
        for &d in edges {
            let img = &self.images[d.edge()];
            if d.is_reversed() {
                for &x in img.iter().rev() {
                    push_tight(&mut out, x.reverse());
                }
            } else {
                for &x in img {
                    push_tight(&mut out, x);
                }
            }
        }
        out
    }

    pub fn map_path(&self, p: &EdgePath) -> Result<EdgePath, GraphError> {
        let t = super::tighten(self.graph(), p)?;
        let start = self.vertex_images[t.start()];
        Ok(EdgePath::from_parts_unchecked(
            start,
            self.map_edges(t.edges()),
        ))
    }

    pub fn iterate_path(&self, p: &EdgePath, k: usize) -> Result<EdgePath, GraphError> {
        let mut cur = super::tighten(self.graph(), p)?;
        for _ in 0..k {
            cur = self.map_path(&cur)?;
        }
        Ok(cur)
    }

    pub fn map_circuit(&self, c: &Circuit) -> Circuit {
        Circuit::from_tight_loop(self.map_edges(c.edges()))
    }

    pub fn iterate_circuit(&self, c: &Circuit, k: usize) -> Circuit {
        let mut cur = c.clone();
        for _ in 0..k {
            cur = self.map_circuit(&cur);
        }
        cur
    }

    /// `self ∘ other` on the same marked graph; keeps the filtration of `self`.
    pub fn compose(&self, other: &GraphSelfMap) -> Result<GraphSelfMap, GraphError> {
        let images: Vec<Vec<DirEdge>> = other.images.iter().map(|p| self.map_edges(p)).collect();
        let vimg = other
            .vertex_images
            .iter()
            .map(|&v| self.vertex_images[v])
            .collect();
        GraphSelfMap::new(
            format!("{}∘{}", self.name, other.name),
            self.marked.clone(),
            Some(vimg),
            images,
            &self.filtration(),
        )
    }

    pub fn power(&self, k: usize) -> Result<GraphSelfMap, GraphError> {
        assert!(k >= 1, "power needs k ≥ 1");
        let mut out = self.clone();
        for _ in 1..k {
            out = self.compose(&out)?;
        }
        out.name = format!("{}^{}", self.name, k);
        Ok(out)
    }

    /// Cumulative edge lists `G_1, …, G_k`.
    pub fn filtration(&self) -> Vec<Vec<usize>> {
        (1..=self.levels).map(|k| self.level_edges(k)).collect()
    }

    /// Entry `(i, j)` counts crossings of `E_i` (either orientation) by `f(E_j)`, for `E_i, E_j ∈ H_k`.
    pub fn transition_matrix(&self, k: usize) -> Result<Matrix, GraphError> {
        if k == 0 || k > self.levels {
            return Err(GraphError::HeightOutOfRange(k));
        }
        let hk = self.stratum_edges(k);
        let pos = |e: usize| hk.iter().position(|&x| x == e);
        let mut m = vec![vec![0u64; hk.len()]; hk.len()];
        for (j, &ej) in hk.iter().enumerate() {
            for d in &self.images[ej] {
                if let Some(i) = pos(d.edge()) {
                    m[i][j] += 1;
                }
            }
        }
        Ok(m)
    }

    pub fn classify_strata(&self) -> Vec<Stratum> {
        (1..=self.levels)
            .map(|k| {
                let matrix = self.transition_matrix(k).expect("height in range");
                let edges = self.stratum_edges(k);
                let (kind, pf) = if pf::is_zero(&matrix) {
                    (StratumKind::Zero, None)
                } else if pf::is_irreducible(&matrix) {
                    let c = pf::certify(&matrix);
                    if c.is_one() {
                        (StratumKind::Neg, Some(c))
                    } else {
                        (StratumKind::Eg, Some(c))
                    }
                } else {
                    (StratumKind::Reducible, pf::spectral_radius(&matrix))
                };
                Stratum {
                    height: k,
                    edges,
                    kind,
                    matrix,
                    pf,
                }
            })
            .collect()
    }

    pub fn stratum(&self, k: usize) -> Result<Stratum, GraphError> {
        if k == 0 || k > self.levels {
            return Err(GraphError::HeightOutOfRange(k));
        }
        Ok(self.classify_strata().swap_remove(k - 1))
    }

    /// Certified PF data for an EG stratum, or a domain error.
    pub fn eg_certificate(&self, k: usize) -> Result<PfCertificate, GraphError> {
        let s = self.stratum(k)?;
        match (s.kind, s.pf) {
            (StratumKind::Eg, Some(c)) => Ok(c),
            _ => Err(GraphError::NotExponential { height: k }),
        }
    }

    /// Highest EG stratum, if any.
    pub fn topmost_eg(&self) -> Option<usize> {
        self.classify_strata()
            .iter()
            .rev()
            .find(|s| s.kind == StratumKind::Eg)
            .map(|s| s.height)
    }

    /// Upper bound for the bounded cancellation constant: `Σ_E |f(E)|`.
    pub fn bcc_bound(&self) -> u64 {
        self.images.iter().map(|p| p.len() as u64).sum()
    }

    /// `2·BCC / (λ_lower − 1)`, using the certified lower bound for `λ`.
    pub fn critical_constant(&self, k: usize) -> Result<Ratio<i128>, GraphError> {
        let c = self.eg_certificate(k)?;
        critical_constant_from(self.bcc_bound(), &c.lower)
            .ok_or(GraphError::NotExponential { height: k })
    }
}

pub fn critical_constant_from(bcc: u64, lambda_lower: &Ratio<i128>) -> Option<Ratio<i128>> {
    let one = Ratio::from_integer(1);
    if *lambda_lower <= one {
        return None;
    }
    Some(Ratio::from_integer(2 * bcc as i128) / (lambda_lower - one))
}

fn image_of(images: &[Vec<DirEdge>], d: DirEdge) -> Vec<DirEdge> {
    let img = &images[d.edge()];
    if d.is_reversed() {
        img.iter().rev().map(|x| x.reverse()).collect()
    } else {
        img.clone()
    }
}

fn heights_from(g: &Graph, filtration: &[Vec<usize>]) -> Result<Vec<usize>, GraphError> {
    if filtration.is_empty() {
        return Err(GraphError::BadFiltration("no levels".into()));
    }
    let mut heights = vec![0usize; g.edge_count()];
    let mut prev: Vec<usize> = Vec::new();
    for (k, level) in filtration.iter().enumerate() {
        let mut sorted = level.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.iter().any(|&e| e >= g.edge_count()) {
            return Err(GraphError::BadFiltration(format!(
                "level {} names an unknown edge",
                k + 1
            )));
        }
        if !prev.iter().all(|e| sorted.binary_search(e).is_ok()) {
            return Err(GraphError::BadFiltration(format!(
                "level {} does not contain level {}",
                k + 1,
                k
            )));
        }
        if sorted.len() == prev.len() {
            return Err(GraphError::BadFiltration(format!(
                "level {} adds no edges",
                k + 1
            )));
        }
        for &e in &sorted {
            if heights[e] == 0 {
                heights[e] = k + 1;
            }
        }
        prev = sorted;
    }
    if prev.len() != g.edge_count() {
        return Err(GraphError::BadFiltration(
            "top level is not the whole graph".into(),
        ));
    }
    Ok(heights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{FreeAutomorphism, ReducedWord};

    fn fib() -> GraphSelfMap {
        GraphSelfMap::rose_map(
            "fib",
            &FreeAutomorphism::from_signed(&[&[1, 2], &[1]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn map_path_examples() {
        let f = fib();
        let g = f.graph();
        let p = EdgePath::from_edges(g, g.parse_edges("b a").unwrap()).unwrap();
        assert_eq!(
            f.map_path(&p).unwrap().edges(),
            g.parse_edges("a a b").unwrap().as_slice()
        );
        let e = EdgePath::edge(g, DirEdge::new(0, false));
        assert_eq!(f.map_path(&e).unwrap().edges(), f.edge_image(0));
    }

    #[test]
    fn transition_matrices() {
        assert_eq!(
            fib().transition_matrix(1).unwrap(),
            vec![vec![1, 1], vec![1, 0]]
        );
        let plastic = FreeAutomorphism::from_signed(&[&[2], &[3], &[1, 2]]).unwrap();
        let f = GraphSelfMap::rose_map("plastic", &plastic).unwrap();
        assert_eq!(
            f.transition_matrix(1).unwrap(),
            vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 0]]
        );
        assert_eq!(f.transition_matrix(2), Err(GraphError::HeightOutOfRange(2)));
    }

    #[test]
    fn strata_of_e1() {
        let phi = FreeAutomorphism::from_signed(&[&[1, 2], &[1], &[3]]).unwrap();
        let f = GraphSelfMap::rose_map_filtered("e1", &phi, &[vec![2], vec![0, 1, 2]]).unwrap();
        let s = f.classify_strata();
        assert_eq!(s[0].kind, StratumKind::Neg);
        assert_eq!(s[1].kind, StratumKind::Eg);
        assert_eq!(f.bcc_bound(), 4);
        assert_eq!(f.topmost_eg(), Some(2));
        assert!(matches!(
            f.critical_constant(1),
            Err(GraphError::NotExponential { .. })
        ));
        let cc = f.critical_constant(2).unwrap();
        let v = pf::ratio_f64(&cc);
        assert!((v - 8.0 / 0.6180339887).abs() < 1e-6, "{v}");
    }

    #[test]
    fn filtration_must_be_respected() {
        let phi = FreeAutomorphism::from_signed(&[&[1, 2], &[1], &[3]]).unwrap();
        let bad = GraphSelfMap::rose_map_filtered("bad", &phi, &[vec![0], vec![0, 1, 2]]);
        assert!(matches!(
            bad,
            Err(GraphError::FiltrationNotRespected { .. })
        ));
    }

    #[test]
    fn induced_automorphism_of_rose_map() {
        let f = fib();
        assert_eq!(
            f.induced().images()[0],
            ReducedWord::from_signed(&[1, 2], 2).unwrap()
        );
        assert!(f.induced().has_verified_inverse());
    }

    #[test]
    fn power_matches_iteration() {
        let f = fib();
        let f3 = f.power(3).unwrap();
        let g = f.graph();
        let p = EdgePath::from_edges(g, g.parse_edges("a b'").unwrap()).unwrap();
        assert_eq!(f3.map_path(&p).unwrap(), f.iterate_path(&p, 3).unwrap());
    }

    #[test]
    fn critical_constant_formula() {
        let c = critical_constant_from(3, &Ratio::from_integer(2)).unwrap();
        assert_eq!(c, Ratio::from_integer(6));
        assert!(critical_constant_from(3, &Ratio::from_integer(1)).is_none());
    }
}
