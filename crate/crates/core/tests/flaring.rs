mod common;

use common::*;
use num_rational::Ratio;
use relhyp::classify::{class_corpus, CorpusSpec};
use relhyp::electric::ElectricSpace;
use relhyp::flaring::{
    conjugacy_flaring_search, growth_flare_test, legality_dichotomy_test,
    standing_assumptions_check, three_of_four_test, AssumptionStatus, FlareSide, LaminationPair,
};
use relhyp::graph::GraphSelfMap;
use relhyp::par::Execution;
use relhyp::subgroups::SubgroupSystem;
use relhyp::words::CyclicWord;

fn side(name: &str) -> FlareSide {
    let f = map(name);
    let r = f.topmost_eg().unwrap();
    FlareSide::new(nas(&f, r), 10, None).unwrap()
}

fn plastic() -> LaminationPair {
    LaminationPair {
        plus: side("plastic.graph.json"),
        minus: side("plastic_inverse.graph.json"),
    }
}

fn psi() -> LaminationPair {
    LaminationPair {
        plus: side("psi.graph.json"),
        minus: side("psi_inverse.graph.json"),
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let f = map("e1.graph.json");
    let d = nas(&f, 2);
    let phi = automorphism("e1.aut");
    let (classes, _) = class_corpus(
        3,
        &CorpusSpec {
            seed: 11,
            count: 60,
            min_len: 2,
            max_len: 16,
        },
        Some(&d.system),
    )
    .unwrap();
    let s = ElectricSpace::new(3, d.system.clone(), 100_000, 1);
    let a = conjugacy_flaring_search(&classes, &phi, &s, 8, 0, Execution::Sequential).unwrap();
    let b = conjugacy_flaring_search(&classes, &phi, &s, 8, 0, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn first_pass_is_consistent_with_the_numbers() {
    let f = map("e1.graph.json");
    let d = nas(&f, 2);
    let phi = automorphism("e1.aut");
    let (classes, _) = class_corpus(
        3,
        &CorpusSpec {
            seed: 12,
            count: 30,
            min_len: 2,
            max_len: 12,
        },
        Some(&d.system),
    )
    .unwrap();
    let s = ElectricSpace::new(3, d.system.clone(), 100_000, 1);
    let v = conjugacy_flaring_search(&classes, &phi, &s, 10, 0, Execution::Sequential).unwrap();
    for item in &v.per_item {
        let holds = |m: usize| item.forward[m].max(item.backward[m]) >= 3 * item.base;
        if let Some(m) = item.first_pass {
            assert!((m..=10).all(holds), "{}", item.item);
            assert!(m == 0 || !holds(m - 1), "{}", item.item);
        }
    }
    assert_eq!(
        v.m_found,
        v.per_item.iter().map(|i| i.first_pass).max().flatten()
    );
}

#[test]
fn distinct_fully_irreducible_pair_passes_the_standing_check() {
    let r = standing_assumptions_check(&plastic(), &psi());
    assert_eq!(r.item2.status, AssumptionStatus::Pass);
    assert_ne!(r.item1.status, AssumptionStatus::Fail, "{}", r.item1.detail);
    assert!(r.all_pass());
}

#[test]
fn three_of_four_on_a_distinct_pair() {
    let (p, q) = (plastic(), psi());
    let r = standing_assumptions_check(&p, &q);
    let phi = p.plus.map().induced().clone();
    let psi = q.plus.map().induced().clone();
    let s = ElectricSpace::with_defaults(3, SubgroupSystem::empty());
    let (classes, _) = class_corpus(
        3,
        &CorpusSpec {
            seed: 13,
            count: 30,
            min_len: 2,
            max_len: 10,
        },
        None,
    )
    .unwrap();
    let v =
        three_of_four_test(&phi, &psi, &r, false, &classes, &s, 12, Execution::Parallel).unwrap();
    assert!(v.warnings.is_empty());
    assert!(
        v.m_found.is_some(),
        "{:?}",
        v.per_item
            .iter()
            .filter(|i| i.first_pass.is_none())
            .map(|i| &i.item)
            .collect::<Vec<_>>()
    );
}

#[test]
fn override_is_recorded() {
    let p = plastic();
    let r = standing_assumptions_check(&p, &p);
    let phi = p.plus.map().induced().clone();
    let s = ElectricSpace::with_defaults(3, SubgroupSystem::empty());
    let corpus = vec![CyclicWord::from_signed(&[1, 2], 3).unwrap()];
    let v =
        three_of_four_test(&phi, &phi, &r, true, &corpus, &s, 6, Execution::Sequential).unwrap();
    assert!(v.overridden);
    assert!(!v.warnings.is_empty());
}

#[test]
fn legal_classes_grow() {
    let f = GraphSelfMap::rose_map("fib", &automorphism("fibonacci.aut")).unwrap();
    let side = FlareSide::new(nas(&f, 1), 10, None).unwrap();
    // a high iterate of a is a long leaf segment, so its legality is 1
    let alpha = f
        .induced()
        .iterate_class(&CyclicWord::from_signed(&[1], 2).unwrap(), 12)
        .unwrap();
    let m = growth_flare_test(&alpha, &side, Ratio::new(1, 2), Ratio::from_integer(2), 10).unwrap();
    assert!(m.is_some());
}

#[test]
fn dichotomy_report_covers_the_corpus() {
    let (p, m) = (
        side("plastic.graph.json"),
        side("plastic_inverse.graph.json"),
    );
    let (classes, _) = class_corpus(
        3,
        &CorpusSpec {
            seed: 14,
            count: 20,
            min_len: 2,
            max_len: 10,
        },
        None,
    )
    .unwrap();
    let r = legality_dichotomy_test(&classes, &p, &m, 6, Execution::Sequential).unwrap();
    assert_eq!(r.items.len(), classes.len());
}

#[test]
fn e1_dichotomy_at_five_iterates() {
    let (p, m) = (side("e1.graph.json"), side("e1_inverse.graph.json"));
    assert_eq!(p.c, Ratio::from_integer(13));
    let corpus: Vec<CyclicWord> = [&[1][..], &[2], &[1, 2]]
        .iter()
        .map(|w| CyclicWord::from_signed(w, 3).unwrap())
        .collect();
    let at = |k| {
        legality_dichotomy_test(&corpus, &p, &m, k, Execution::Sequential)
            .unwrap()
            .epsilon_found
    };
    assert!(at(5) > Ratio::from_integer(0));
}
