mod common;

use common::*;
use proptest::prelude::*;
use relhyp::subgroups::{intersection_core, is_malnormal, FoldedImmersion, SubgroupSystem};
use relhyp::words::{CyclicWord, ReducedWord};

fn word(s: &[i32]) -> ReducedWord {
    ReducedWord::from_signed(s, 3).unwrap()
}

fn fold(gens: &[&[i32]]) -> FoldedImmersion {
    FoldedImmersion::from_generators(gens, 3).unwrap()
}

fn letters() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 0..10)
}

proptest! {
    #[test]
    fn products_of_generators_are_members(choice in prop::collection::vec((0usize..2, any::<bool>()), 0..8)) {
        let gens = [word(&[1, 2]), word(&[3, 3, -1])];
        let h = FoldedImmersion::fold(&gens, 3).unwrap();
        let mut w = ReducedWord::identity();
        for (i, inv) in choice {
            let g = if inv { gens[i].inverse() } else { gens[i].clone() };
            w = w.mul(&g);
        }
        prop_assert!(h.contains(&w));
    }

    #[test]
    fn carrying_is_conjugacy_invariant(k in 1i64..4, u in letters()) {
        let h = fold(&[&[3], &[1, 2, -1]]);
        let w = word(&[1, 2, -1]).pow(k).conjugate_by(&word(&u));
        prop_assert!(h.carries(&CyclicWord::from_word(&w)));
        let v = word(&[2, 3]).conjugate_by(&word(&u));
        prop_assert!(!h.carries(&CyclicWord::from_word(&v)));
    }
}

#[test]
fn membership_examples() {
    let h = fold(&[&[1], &[2, 2]]);
    assert!(h.contains(&word(&[2, 2, 1, 2, 2])));
    assert!(!h.contains(&word(&[2])));
    assert_eq!(h.rank(), 2);
}

#[test]
fn nested_cyclic_groups_are_not_malnormal() {
    let (ok, witness) = is_malnormal(&[fold(&[&[1]]), fold(&[&[1, 1]])]);
    assert!(!ok);
    assert!(witness.is_some());
}

#[test]
fn conjugate_free_factors_are_malnormal() {
    let (ok, _) = is_malnormal(&[fold(&[&[1], &[2]]), fold(&[&[3]])]);
    assert!(ok);
}

#[test]
fn intersections_of_cyclic_subgroups() {
    // ⟨a²⟩ ∩ ⟨a³⟩ = ⟨a⁶⟩
    let core = intersection_core(&fold(&[&[1, 1]]), &fold(&[&[1, 1, 1]]));
    assert!(core
        .iter()
        .any(|c| c.contains(&word(&[1; 6])) && !c.contains(&word(&[1; 3]))));
    assert!(intersection_core(&fold(&[&[1]]), &fold(&[&[2]]))
        .iter()
        .all(|c| c.rank() == 0));
}

#[test]
fn systems_carry_classes() {
    let s = SubgroupSystem::new(vec![fold(&[&[3]])]);
    assert!(s.carries_conjugacy_class(&CyclicWord::from_signed(&[1, 3, 3, -1], 3).unwrap()));
    assert!(!s.carries_conjugacy_class(&CyclicWord::from_signed(&[1, 3], 3).unwrap()));
    assert_eq!(letter(-3).inverse(), letter(3));
}
