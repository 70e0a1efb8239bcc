mod common;

use common::*;
use proptest::prelude::*;
use relhyp::classify::*;
use relhyp::par::Execution;

fn run(aut: &str, graph: Option<&str>, restrictions: &[Restriction]) -> ClassificationReport {
    classify(
        &fixture(aut),
        graph.map(map),
        None,
        restrictions,
        &AnalysisConfig::default(),
        Execution::Parallel,
    )
    .unwrap()
}

#[test]
fn growth_types() {
    let g = |name: &str| classify_growth(&automorphism(name), None, 12).growth;
    assert_eq!(g("swap.aut"), GrowthType::FiniteOrder { order: 2 });
    assert_eq!(g("linear.aut"), GrowthType::Polynomial { degree: 1 });
    assert!(g("fibonacci.aut").is_exponential());
    let quadratic = parse_automorphism("a -> a ; b -> b a ; c -> c b")
        .unwrap()
        .phi;
    assert_eq!(
        classify_growth(&quadratic, None, 12).growth,
        GrowthType::Polynomial { degree: 2 }
    );
}

#[test]
fn rotationless_powers() {
    let k = |text: &str| stabilize_power(&parse_automorphism(text).unwrap().phi, None, 8, 4).power;
    assert_eq!(k("a -> a b ; b -> a"), 2);
    assert_eq!(k("a -> b ; b -> a"), 2);
    assert_eq!(k("a -> a b ; b -> b a b"), 1);
}

#[test]
fn verdicts_for_the_small_examples() {
    assert_eq!(
        run("swap.aut", None, &[]).verdict,
        "finite order ⇒ not virtually acylindrically hyperbolic"
    );
    assert!(run("linear.aut", None, &[])
        .verdict
        .starts_with("not relatively hyperbolic"));
    assert_eq!(
        run("plastic.aut", None, &[]).verdict,
        "hyperbolic (atoroidal evidence at every leaf of the peripheral recursion)"
    );
    assert_eq!(
        run("fibonacci.aut", None, &[]).verdict,
        "relatively hyperbolic w.r.t. {⟨a' b' a b⟩ ⋊ Z}"
    );
}

#[test]
fn rank_four_recursion_uses_the_restriction() {
    let r = parse_restrictions(&fixture("rank4.restrictions.json"), 4).unwrap();
    let report = run("rank4.aut", Some("rank4.graph.json"), &r);
    let tree = &report.peripheral_tree;
    assert_eq!(tree.depth(), 3);
    assert!(tree.ranks_decrease());
    assert_eq!(tree.children[0].kind, NodeKind::Internal);
    assert_eq!(tree.children[0].children[0].kind, NodeKind::RankAtMostTwo);
    assert_eq!(
        report.verdict,
        "relatively hyperbolic w.r.t. {⟨a, b, c' d' c d⟩ ⋊ Z}"
    );
}

#[test]
fn missing_restrictions_leave_a_gap() {
    let report = run("rank4.aut", Some("rank4.graph.json"), &[]);
    assert!(report
        .peripheral_tree
        .leaves()
        .iter()
        .any(|l| l.kind == NodeKind::NeedsData));
}

#[test]
fn reports_round_trip_through_json() {
    let report = run("e1.aut", Some("e1.graph.json"), &[]);
    let back: ClassificationReport = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(back.to_json(), report.to_json());
    assert!(report.to_text().contains("verdict: "));
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_word("a b %", 3).unwrap_err();
    assert_eq!((e.line, e.column), (1, 5));
    let e = classify(
        "a -> a b ;\n b -> Q",
        None,
        None,
        &[],
        &AnalysisConfig::default(),
        Execution::Sequential,
    )
    .unwrap_err();
    assert_eq!(e.exit_code(), 3);
    let e = classify(
        "a -> a a",
        None,
        None,
        &[],
        &AnalysisConfig::default(),
        Execution::Sequential,
    )
    .unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn config_rejects_unknown_fields() {
    assert!(
        AnalysisConfig::from_json(r#"{"m_flare": 4}"#)
            .unwrap()
            .m_flare
            == 4
    );
    assert!(AnalysisConfig::from_json(r#"{"m_flair": 4}"#).is_err());
}

#[test]
fn corpus_snapshot() {
    let (words, log) = corpus_generate(
        2,
        &CorpusSpec {
            seed: 1,
            count: 3,
            min_len: 2,
            max_len: 4,
        },
        &Constraints {
            cyclically_reduced: false,
            not_carried_by: None,
        },
    )
    .unwrap();
    let basis = relhyp::words::Basis::standard(2);
    let text: Vec<String> = words.iter().map(|w| basis.format(w)).collect();
    assert_eq!(text, ["a b a'", "b' a a a", "b a'"]);
    assert_eq!(log.attempts, 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn corpus_respects_constraints(seed in any::<u64>(), count in 1usize..30) {
        let f = map("e1.graph.json");
        let d = nas(&f, 2);
        let spec = CorpusSpec { seed, count, min_len: 1, max_len: 12 };
        let (classes, _) = class_corpus(3, &spec, Some(&d.system)).unwrap();
        prop_assert_eq!(classes.len(), count);
        for c in &classes {
            prop_assert!(!c.is_trivial() && c.len() <= 12);
            prop_assert!(!d.system.carries_conjugacy_class(c));
        }
        let (again, _) = class_corpus(3, &spec, Some(&d.system)).unwrap();
        prop_assert_eq!(again, classes);
    }
}
