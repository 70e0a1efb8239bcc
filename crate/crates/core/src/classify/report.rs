//! Verdicts and the classification report.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::corpus::GenerationLog;
use super::growth::{GrowthReport, GrowthType};
use super::recursion::{NodeKind, PeripheralNode};
use super::stabilize::StabilizeReport;
use super::AnalysisConfig;
use crate::flaring::FlaringVerdict;
use crate::laminations::NasSummary;

pub const FINITE_ORDER_VERDICT: &str = "finite order ⇒ not virtually acylindrically hyperbolic";
pub const POLYNOMIAL_VERDICT: &str =
    "not relatively hyperbolic; acylindrically hyperbolic (virtually); quadratic isoperimetric inequality noted";
pub const HYPERBOLIC_VERDICT: &str =
    "hyperbolic (atoroidal evidence at every leaf of the peripheral recursion)";
pub const MISSING_PERIPHERALS_VERDICT: &str =
    "relatively hyperbolic; peripheral subgroups need a representative";
pub const ANNOTATION: &str = "theorem-level; bounded evidence for hypotheses";

/// `⟨g₁, g₂⟩ ⋊ Z` for each component.
pub fn format_peripherals(components: &[Vec<String>]) -> String {
    let parts: Vec<String> = components
        .iter()
        .map(|g| format!("⟨{}⟩ ⋊ Z", g.join(", ")))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// The verdict table. `peripherals` lists the generators of the top-level
/// components, `None` when they could not be computed.
pub fn verdict(
    growth: &GrowthType,
    peripherals: Option<&[Vec<String>]>,
    tree: Option<&PeripheralNode>,
) -> String {
    match growth {
        GrowthType::FiniteOrder { .. } => FINITE_ORDER_VERDICT.into(),
        GrowthType::Polynomial { .. } => POLYNOMIAL_VERDICT.into(),
        GrowthType::Exponential { .. } => {
            if tree.is_some_and(|t| {
                t.leaves()
                    .iter()
                    .all(|l| l.kind == NodeKind::AtoroidalEvidence)
            }) {
                return HYPERBOLIC_VERDICT.into();
            }
            match peripherals {
                Some(p) if !p.is_empty() => {
                    format!("relatively hyperbolic w.r.t. {}", format_peripherals(p))
                }
                _ => MISSING_PERIPHERALS_VERDICT.into(),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtoroidalEvidence {
    pub periodic_class: Option<String>,
    pub period: Option<usize>,
    pub period_bound: usize,
    pub length_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlaringSummary {
    pub corpus_log: GenerationLog,
    pub conjugacy: Option<FlaringVerdict>,
    pub strict: Option<FlaringVerdict>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub name: Option<String>,
    pub automorphism: String,
    pub rank: usize,
    pub growth: GrowthReport,
    pub rotationless: Option<StabilizeReport>,
    pub atoroidal_evidence: AtoroidalEvidence,
    pub nas: Option<NasSummary>,
    pub peripherals: Option<Vec<Vec<String>>>,
    pub peripheral_tree: PeripheralNode,
    pub flaring: Option<FlaringSummary>,
    pub verdict: String,
    pub annotation: String,
    pub notes: Vec<String>,
    pub config: AnalysisConfig,
}

fn tree_text(n: &PeripheralNode, indent: usize, out: &mut String) {
    let kind = match n.kind {
        NodeKind::Internal => "internal",
        NodeKind::AtoroidalEvidence => "atoroidal evidence",
        NodeKind::Polynomial => "polynomial",
        NodeKind::RankAtMostTwo => "rank ≤ 2",
        NodeKind::NeedsData => "needs data",
    };
    let _ = write!(
        out,
        "{:indent$}⟨{}⟩ rank {}: {kind}",
        "",
        n.generators.join(", "),
        n.rank,
        indent = indent
    );
    if let Some(p) = n.power {
        let _ = write!(out, " (power {p})");
    }
    if let Some(note) = &n.note {
        let _ = write!(out, " [{note}]");
    }
    out.push('\n');
    for c in &n.children {
        tree_text(c, indent + 2, out);
    }
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "automorphism: {}", self.automorphism);
        if let Some(n) = &self.name {
            let _ = writeln!(s, "name: {n}");
        }
        let _ = writeln!(
            s,
            "growth: {} ({})",
            self.growth.growth.label(),
            self.growth.method
        );
        if let Some(r) = &self.rotationless {
            let _ = writeln!(s, "rotationless power: {} ({})", r.power, r.source);
        }
        let a = &self.atoroidal_evidence;
        match (&a.periodic_class, a.period) {
            (Some(c), Some(p)) => {
                let _ = writeln!(s, "periodic class: {c} with period {p}");
            }
            _ => {
                let _ = writeln!(
                    s,
                    "no periodic class of length ≤ {} and period ≤ {}",
                    a.length_bound, a.period_bound
                );
            }
        }
        if let Some(nas) = &self.nas {
            let _ = writeln!(
                s,
                "nonattracting subgraph at height {}: {{{}}}, σ̂ = {}",
                nas.height,
                nas.z.join(", "),
                nas.sigma_hat.as_deref().unwrap_or("none")
            );
        }
        s.push_str("peripheral tree:\n");
        tree_text(&self.peripheral_tree, 2, &mut s);
        if let Some(f) = &self.flaring {
            for (name, v) in [
                ("conjugacy flaring", &f.conjugacy),
                ("strict flaring", &f.strict),
            ] {
                if let Some(v) = v {
                    let found = v.m_found.map_or("none".to_string(), |m| m.to_string());
                    let _ = writeln!(
                        s,
                        "{name}: factor {}, found from {found} (bound {}, {} items, {} excluded)",
                        v.constant_target,
                        v.bounds.m_bound,
                        v.per_item.len(),
                        v.excluded.len()
                    );
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "verdict: {}", self.verdict);
        let _ = writeln!(s, "({})", self.annotation);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(kind: NodeKind, rank: usize) -> PeripheralNode {
        PeripheralNode {
            generators: vec!["c".into()],
            rank,
            kind,
            power: None,
            note: None,
            children: Vec::new(),
        }
    }

    fn exp() -> GrowthType {
        GrowthType::Exponential {
            certified: true,
            stratum: Some(2),
            lambda_lower: 1.6,
            lambda_upper: 1.7,
        }
    }

    #[test]
    fn table_by_injected_sub_results() {
        assert_eq!(
            verdict(&GrowthType::FiniteOrder { order: 2 }, None, None),
            FINITE_ORDER_VERDICT
        );
        assert_eq!(
            verdict(&GrowthType::Polynomial { degree: 1 }, None, None),
            POLYNOMIAL_VERDICT
        );
        let p = vec![vec!["c".to_string()]];
        let mut root = leaf(NodeKind::Internal, 3);
        root.children.push(leaf(NodeKind::RankAtMostTwo, 1));
        assert_eq!(
            verdict(&exp(), Some(&p), Some(&root)),
            "relatively hyperbolic w.r.t. {⟨c⟩ ⋊ Z}"
        );
        assert_eq!(
            verdict(&exp(), None, Some(&root)),
            MISSING_PERIPHERALS_VERDICT
        );
        assert_eq!(
            verdict(
                &exp(),
                Some(&[]),
                Some(&leaf(NodeKind::AtoroidalEvidence, 3))
            ),
            HYPERBOLIC_VERDICT
        );
        root.children[0].kind = NodeKind::AtoroidalEvidence;
        assert_eq!(verdict(&exp(), Some(&p), Some(&root)), HYPERBOLIC_VERDICT);
    }

    #[test]
    fn peripherals_are_listed_in_order() {
        let p = vec![
            vec!["c".to_string(), "a' b' a b".to_string()],
            vec!["d".to_string()],
        ];
        assert_eq!(format_peripherals(&p), "{⟨c, a' b' a b⟩ ⋊ Z, ⟨d⟩ ⋊ Z}");
    }
}
