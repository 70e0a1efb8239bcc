//! Per-level analysis and the recursion through nonattracting components.

use serde::{Deserialize, Serialize};

use super::graph_json::GraphMapSpec;
use super::growth::{classify_growth, GrowthReport};
use super::parse::{parse_automorphism_in, parse_word, INVERSION_EFFORT};
use super::stabilize::{stabilize_power, StabilizeReport};
use super::{AnalysisConfig, ClassifyError};
use crate::graph::periodic::{periodic_conjugacy_search, PeriodicWitness};
use crate::graph::rtt::verify_rtt;
use crate::graph::{GraphSelfMap, StratumKind};
use crate::laminations::{build_nas, nonattracting_subgraph, select_sigma, NonattractingData};
use crate::subgroups::FoldedImmersion;
use crate::words::{Basis, FreeAutomorphism, ReducedWord};

/// RTT depth used before trusting the rose as a representative.
pub const ROSE_RTT_DEPTH: usize = 6;

/// What a level needs: the automorphism and optionally a representative,
/// the stratum and a pinned rotationless power.
#[derive(Clone, Debug)]
pub struct LevelInput {
    pub phi: FreeAutomorphism,
    pub map: Option<GraphSelfMap>,
    pub stratum: Option<usize>,
    pub power: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct LevelAnalysis {
    pub growth: GrowthReport,
    pub power: Option<StabilizeReport>,
    pub stratum: Option<usize>,
    /// `f^K` for the chosen power `K`
    pub representative: Option<GraphSelfMap>,
    pub nas: Option<NonattractingData>,
    pub notes: Vec<String>,
}

/// `w` with generator `i` replaced by `images[i-1]`.
pub fn substitute(w: &ReducedWord, images: &[ReducedWord]) -> ReducedWord {
    w.letters().iter().fold(ReducedWord::identity(), |acc, l| {
        let x = &images[l.generator() - 1];
        acc.mul(&if l.is_inverse() {
            x.inverse()
        } else {
            x.clone()
        })
    })
}

/// Whether `f` realizes `phi` up to an inner automorphism.
fn realizes(f: &GraphSelfMap, phi: &FreeAutomorphism) -> bool {
    match f.induced().invert(INVERSION_EFFORT) {
        Ok(ind) => phi
            .compose(&ind.inverse().expect("attached"))
            .inner_conjugator()
            .is_some(),
        Err(_) => false,
    }
}

pub fn analyze_level(
    input: &LevelInput,
    cfg: &AnalysisConfig,
) -> Result<LevelAnalysis, ClassifyError> {
    let phi = &input.phi;
    if let Some(f) = &input.map {
        if f.marked().rank() != phi.rank() || !realizes(f, phi) {
            return Err(ClassifyError::Precondition(
                "the graph map does not realize the automorphism".into(),
            ));
        }
    }
    let growth = classify_growth(phi, input.map.as_ref(), cfg.growth_bound);
    let mut out = LevelAnalysis {
        growth,
        power: None,
        stratum: None,
        representative: None,
        nas: None,
        notes: Vec::new(),
    };
    if !out.growth.growth.is_exponential() {
        return Ok(out);
    }
    let f = match &input.map {
        Some(f) => f.clone(),
        None => {
            let rose = GraphSelfMap::rose_map("rose", phi)
                .map_err(|e| ClassifyError::Computation(e.to_string()))?;
            let top = rose.topmost_eg();
            if top.is_none() || !verify_rtt(&rose, ROSE_RTT_DEPTH).passed() {
                out.notes.push(
                    "the rose is not a train track; nonattracting data needs a representative"
                        .into(),
                );
                return Ok(out);
            }
            out.notes
                .push("using the rose as a train track representative".into());
            rose
        }
    };
    let power = match input.power.or(cfg.rotationless_power) {
        Some(k) => StabilizeReport::pinned(k),
        None => stabilize_power(phi, Some(&f), cfg.stabilize_depth, cfg.stabilize_length),
    };
    if let Some(w) = &power.warning {
        out.notes.push(w.clone());
    }
    let fk = f
        .power(power.power)
        .map_err(|e| ClassifyError::Computation(e.to_string()))?;
    let strata = fk.classify_strata();
    let r = match input.stratum.or(fk.topmost_eg()) {
        Some(r) => r,
        None => {
            return Err(ClassifyError::Precondition(
                "no exponentially growing stratum".into(),
            ))
        }
    };
    if r == 0 || r > strata.len() || strata[r - 1].kind != StratumKind::Eg {
        return Err(ClassifyError::Precondition(format!(
            "stratum {r} is not exponentially growing"
        )));
    }
    let z = nonattracting_subgraph(&fk, r, cfg.n_attraction)?;
    if let Some(s) = strata[r..]
        .iter()
        .find(|s| s.kind == StratumKind::Eg && !s.edges.iter().all(|e| z.contains(*e)))
    {
        return Err(ClassifyError::Precondition(format!(
            "exponentially growing stratum {} above {r} is not carried by Z",
            s.height
        )));
    }
    let sigma = select_sigma(&fk, r, cfg.nielsen_length_bound)?;
    let nas = build_nas(&fk, r, &z, sigma.as_ref())?;
    out.power = Some(power);
    out.stratum = Some(r);
    out.representative = Some(fk);
    out.nas = Some(nas);
    Ok(out)
}

/// User-supplied data for one component: ambient generators and the
/// restriction of the current power in the basis they form.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub generators: Vec<ReducedWord>,
    pub input: LevelInput,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionSpec {
    /// words in the ambient basis
    pub generators: Vec<String>,
    /// the restricted automorphism, written in the standard names `a, b, …`
    /// for the listed generators in order
    pub automorphism: String,
    #[serde(default)]
    pub graph_map: Option<GraphMapSpec>,
    #[serde(default)]
    pub stratum: Option<usize>,
    #[serde(default)]
    pub rotationless_power: Option<usize>,
}

impl RestrictionSpec {
    pub fn resolve(&self, ambient_rank: usize) -> Result<Restriction, ClassifyError> {
        let generators = self
            .generators
            .iter()
            .map(|g| parse_word(g, ambient_rank))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ClassifyError::Parse(e.to_string()))?;
        let phi = parse_automorphism_in(&self.automorphism, Some(generators.len()))
            .map_err(|e| ClassifyError::Parse(e.to_string()))?
            .phi;
        let map = match &self.graph_map {
            Some(s) => Some(s.build().map_err(|e| ClassifyError::Parse(e.to_string()))?),
            None => None,
        };
        Ok(Restriction {
            generators,
            input: LevelInput {
                phi,
                map,
                stratum: self.stratum,
                power: self.rotationless_power,
            },
        })
    }
}

pub fn parse_restrictions(
    text: &str,
    ambient_rank: usize,
) -> Result<Vec<Restriction>, ClassifyError> {
    let specs: Vec<RestrictionSpec> =
        serde_json::from_str(text).map_err(|e| ClassifyError::Parse(e.to_string()))?;
    specs.iter().map(|s| s.resolve(ambient_rank)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Internal,
    AtoroidalEvidence,
    Polynomial,
    RankAtMostTwo,
    NeedsData,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralNode {
    /// generators in the ambient basis
    pub generators: Vec<String>,
    pub rank: usize,
    pub kind: NodeKind,
    pub power: Option<usize>,
    pub note: Option<String>,
    pub children: Vec<PeripheralNode>,
}

impl PeripheralNode {
    pub fn depth(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(PeripheralNode::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn leaves(&self) -> Vec<&PeripheralNode> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children
            .iter()
            .flat_map(PeripheralNode::leaves)
            .collect()
    }

    /// Whether ranks strictly decrease along every edge.
    pub fn ranks_decrease(&self) -> bool {
        self.children
            .iter()
            .all(|c| c.rank < self.rank && c.ranks_decrease())
    }
}

struct Walker<'a> {
    root_phi: &'a FreeAutomorphism,
    basis: Basis,
    restrictions: &'a [Restriction],
    cfg: &'a AnalysisConfig,
}

impl Walker<'_> {
    fn leaf(
        &self,
        gens: &[ReducedWord],
        rank: usize,
        kind: NodeKind,
        note: Option<String>,
    ) -> PeripheralNode {
        PeripheralNode {
            generators: gens.iter().map(|g| self.basis.format(g)).collect(),
            rank,
            kind,
            power: None,
            note,
            children: Vec::new(),
        }
    }

    /// `embed` maps the level's basis into the ambient group; `k_total` is the
    /// power of the root automorphism the level's automorphism restricts.
    fn node(
        &self,
        a: &LevelAnalysis,
        phi: &FreeAutomorphism,
        embed: &[ReducedWord],
        k_total: usize,
        depth: usize,
    ) -> Result<PeripheralNode, ClassifyError> {
        let rank = embed.len();
        if !a.growth.growth.is_exponential() {
            return Ok(self.leaf(
                embed,
                rank,
                NodeKind::Polynomial,
                Some(a.growth.growth.label()),
            ));
        }
        let Some(nas) = &a.nas else {
            return Ok(self.leaf(embed, rank, NodeKind::NeedsData, a.notes.first().cloned()));
        };
        let power = a.power.as_ref().map(|p| p.power).unwrap_or(1);
        if nas.system.is_trivial() {
            let cfg = self.cfg;
            let mut n = match periodic_conjugacy_search(
                phi,
                cfg.periodic_period_bound,
                cfg.periodic_length_bound,
            ) {
                None => self.leaf(embed, rank, NodeKind::AtoroidalEvidence, None),
                Some(PeriodicWitness { class, period }) => self.leaf(
                    embed,
                    rank,
                    NodeKind::NeedsData,
                    Some(format!(
                        "trivial nonattracting system but [{}] has period {period}",
                        Basis::standard(rank).format(&class.to_word())
                    )),
                ),
            };
            n.power = Some(power);
            return Ok(n);
        }
        let k_total = k_total * power;
        let mut children = Vec::new();
        for c in nas.system.components() {
            let local = c.generators();
            let gens: Vec<ReducedWord> = local.iter().map(|g| substitute(g, embed)).collect();
            if c.rank() >= rank {
                return Err(ClassifyError::Recursion(format!(
                    "component of rank {} under a level of rank {rank}",
                    c.rank()
                )));
            }
            children.push(self.child(&gens, c.rank(), k_total, depth + 1)?);
        }
        Ok(PeripheralNode {
            generators: embed.iter().map(|g| self.basis.format(g)).collect(),
            rank,
            kind: NodeKind::Internal,
            power: Some(power),
            note: None,
            children,
        })
    }

    fn child(
        &self,
        gens: &[ReducedWord],
        rank: usize,
        k_total: usize,
        depth: usize,
    ) -> Result<PeripheralNode, ClassifyError> {
        if rank <= 2 {
            return Ok(self.leaf(gens, rank, NodeKind::RankAtMostTwo, None));
        }
        if depth > self.cfg.recursion_depth {
            return Ok(self.leaf(
                gens,
                rank,
                NodeKind::NeedsData,
                Some("recursion depth bound reached".into()),
            ));
        }
        let n = self.root_phi.rank();
        let target = FoldedImmersion::fold(gens, n)
            .map_err(|e| ClassifyError::Computation(e.to_string()))?;
        let found = self.restrictions.iter().find(|r| {
            FoldedImmersion::fold(&r.generators, n)
                .map(|h| h.same_class(&target))
                .unwrap_or(false)
        });
        let Some(r) = found else {
            return Ok(self.leaf(
                gens,
                rank,
                NodeKind::NeedsData,
                Some("no restriction supplied".into()),
            ));
        };
        if r.generators.len() != rank || r.input.phi.rank() != rank {
            return Err(ClassifyError::Recursion(format!(
                "restriction for a rank {rank} component has the wrong rank"
            )));
        }
        // the restriction must be exactly the current power on the supplied generators
        for (i, g) in r.generators.iter().enumerate() {
            let lhs = self
                .root_phi
                .iterate_word(g, k_total as i64)
                .expect("forward");
            let rhs = substitute(r.input.phi.image(i + 1), &r.generators);
            if lhs != rhs {
                return Err(ClassifyError::Recursion(format!(
                    "restriction does not match φ^{k_total} on generator {}",
                    self.basis.format(g)
                )));
            }
        }
        let a = analyze_level(&r.input, self.cfg)?;
        self.node(&a, &r.input.phi, &r.generators, k_total, depth)
    }
}

/// The peripheral tree below an analyzed root.
pub fn peripheral_recursion(
    phi: &FreeAutomorphism,
    root: &LevelAnalysis,
    restrictions: &[Restriction],
    cfg: &AnalysisConfig,
) -> Result<PeripheralNode, ClassifyError> {
    let n = phi.rank();
    let w = Walker {
        root_phi: phi,
        basis: Basis::standard(n),
        restrictions,
        cfg,
    };
    let embed: Vec<ReducedWord> = (1..=n)
        .map(|g| ReducedWord::letter(crate::words::Letter::new(g, false)))
        .collect();
    let tree = w.node(root, phi, &embed, 1, 1)?;
    if !tree.ranks_decrease() {
        return Err(ClassifyError::Recursion(
            "ranks do not strictly decrease".into(),
        ));
    }
    Ok(tree)
}
