//! End-to-end classification.

use super::corpus::{class_corpus, corpus_generate, Constraints, CorpusSpec};
use super::parse::{format_automorphism, parse_automorphism};
use super::recursion::{analyze_level, peripheral_recursion, LevelInput, Restriction};
use super::report::{verdict, AtoroidalEvidence, ClassificationReport, FlaringSummary, ANNOTATION};
use super::{AnalysisConfig, ClassifyError};
use crate::electric::ElectricSpace;
use crate::flaring::{conjugacy_flaring_search, strict_flaring_search};
use crate::graph::periodic::periodic_conjugacy_search_with;
use crate::graph::GraphSelfMap;
use crate::laminations::NonattractingData;
use crate::par::Execution;
use crate::words::{Basis, FreeAutomorphism};

/// Parses `text` and runs [`classify_automorphism`].
pub fn classify(
    text: &str,
    map: Option<GraphSelfMap>,
    stratum: Option<usize>,
    restrictions: &[Restriction],
    cfg: &AnalysisConfig,
    exec: Execution,
) -> Result<ClassificationReport, ClassifyError> {
    let parsed = parse_automorphism(text).map_err(|e| match e {
        super::parse::AutomorphismTextError::Syntax(p) => ClassifyError::Parse(p.to_string()),
        other => ClassifyError::Precondition(other.to_string()),
    })?;
    let mut report = classify_automorphism(&parsed.phi, map, stratum, restrictions, cfg, exec)?;
    report.name = parsed.name;
    Ok(report)
}

fn flaring(
    phi: &FreeAutomorphism,
    nas: &NonattractingData,
    cfg: &AnalysisConfig,
    exec: Execution,
) -> FlaringSummary {
    let rank = phi.rank();
    let s = ElectricSpace::new(
        rank,
        nas.system.clone(),
        cfg.ball_radius,
        cfg.peripheral_enumeration_bound,
    );
    let mut notes = Vec::new();
    let (classes, log) = match class_corpus(rank, &cfg.corpus, Some(&nas.system)) {
        Ok(x) => x,
        Err(e) => {
            notes.push(format!("corpus: {e}"));
            return FlaringSummary {
                corpus_log: Default::default(),
                conjugacy: None,
                strict: None,
                notes,
            };
        }
    };
    let conjugacy = match conjugacy_flaring_search(
        &classes,
        phi,
        &s,
        cfg.m_flare,
        cfg.conjugator_bound,
        exec,
    ) {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("conjugacy flaring: {e}"));
            None
        }
    };
    let word_spec = CorpusSpec {
        seed: cfg.corpus.seed.wrapping_add(1),
        ..cfg.corpus.clone()
    };
    let strict = corpus_generate(
        rank,
        &word_spec,
        &Constraints {
            cyclically_reduced: false,
            not_carried_by: Some(&nas.system),
        },
    )
    .map_err(|e| e.to_string())
    .and_then(|(words, _)| {
        strict_flaring_search(&words, phi, &s, cfg.n_strict, exec).map_err(|e| e.to_string())
    });
    let strict = match strict {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("strict flaring: {e}"));
            None
        }
    };
    if s.malnormality_warning.is_some() {
        notes.push("peripheral system is not malnormal".into());
    }
    FlaringSummary {
        corpus_log: log,
        conjugacy,
        strict,
        notes,
    }
}

/// Growth, rotationless power, nonattracting system, peripheral recursion,
/// flaring checks and the verdict. Deterministic for a fixed config.
pub fn classify_automorphism(
    phi: &FreeAutomorphism,
    map: Option<GraphSelfMap>,
    stratum: Option<usize>,
    restrictions: &[Restriction],
    cfg: &AnalysisConfig,
    exec: Execution,
) -> Result<ClassificationReport, ClassifyError> {
    cfg.validate().map_err(ClassifyError::Precondition)?;
    let basis = Basis::standard(phi.rank());
    let input = LevelInput {
        phi: phi.clone(),
        map,
        stratum,
        power: None,
    };
    let root = analyze_level(&input, cfg)?;
    let tree = peripheral_recursion(phi, &root, restrictions, cfg)?;
    let periodic = periodic_conjugacy_search_with(
        phi,
        cfg.periodic_period_bound,
        cfg.periodic_length_bound,
        exec,
    );
    let peripherals: Option<Vec<Vec<String>>> = root.nas.as_ref().map(|d| {
        d.system
            .components()
            .iter()
            .map(|c| c.generators().iter().map(|g| basis.format(g)).collect())
            .collect()
    });
    let flaring = match &root.nas {
        Some(d) if root.growth.growth.is_exponential() => Some(flaring(phi, d, cfg, exec)),
        _ => None,
    };
    let verdict = verdict(&root.growth.growth, peripherals.as_deref(), Some(&tree));
    Ok(ClassificationReport {
        name: None,
        automorphism: format_automorphism(phi),
        rank: phi.rank(),
        growth: root.growth.clone(),
        rotationless: root.power.clone(),
        atoroidal_evidence: AtoroidalEvidence {
            periodic_class: periodic.as_ref().map(|w| basis.format(&w.class.to_word())),
            period: periodic.as_ref().map(|w| w.period),
            period_bound: cfg.periodic_period_bound,
            length_bound: cfg.periodic_length_bound,
        },
        nas: root.nas.as_ref().map(|d| d.summary(&basis)),
        peripherals,
        peripheral_tree: tree,
        flaring,
        verdict,
        annotation: ANNOTATION.into(),
        notes: root.notes.clone(),
        config: cfg.clone(),
    })
}
