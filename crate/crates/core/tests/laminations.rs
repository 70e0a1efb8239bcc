mod common;

use common::*;
use proptest::prelude::*;
use relhyp::laminations::{
    generic_leaf_segment, groupoid_decompose, relative_length, weak_attraction_trichotomy,
    AttractingNeighborhood, Subject, Trichotomy,
};
use relhyp::words::{CyclicWord, ReducedWord};

fn class(w: &[i32]) -> CyclicWord {
    CyclicWord::from_word(&ReducedWord::from_signed(w, 3).unwrap())
}

proptest! {
    #[test]
    fn relative_length_zero_iff_carried(w in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 1..14)) {
        let f = map("e1.graph.json");
        let d = nas(&f, 2);
        let c = class(&w);
        let s = Subject::Circuit(f.marked().realize_class(&c));
        prop_assert_eq!(relative_length(&s, &d) == 0, d.system.carries_conjugacy_class(&c));
        let dec = groupoid_decompose(&s, &d);
        prop_assert_eq!(dec.relative_length, relative_length(&s, &d));
    }

    #[test]
    fn trichotomy_never_contradicts_carrying(w in prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 1..10)) {
        let f = map("e1.graph.json");
        let g = map("e1_inverse.graph.json");
        let d = nas(&f, 2);
        let vp = AttractingNeighborhood::new(generic_leaf_segment(&f, 2, 0, 4).unwrap());
        let vm = AttractingNeighborhood::new(generic_leaf_segment(&g, g.topmost_eg().unwrap(), 0, 4).unwrap());
        let c = class(&w);
        let t = weak_attraction_trichotomy(&c, (&f, &vp), (&g, &vm), &d, 20);
        if d.system.carries_conjugacy_class(&c) {
            prop_assert!(matches!(t, Trichotomy::CarriedByNas | Trichotomy::InVMinus));
        } else {
            prop_assert!(!matches!(t, Trichotomy::CarriedByNas));
        }
    }
}

#[test]
fn fibonacci_square_has_the_commutator_as_sigma() {
    let f = relhyp::graph::GraphSelfMap::rose_map("fib", &automorphism("fibonacci.aut"))
        .unwrap()
        .power(2)
        .unwrap();
    let d = nas(&f, 1);
    assert!(d.z.is_empty());
    assert!(d.sigma_hat.is_some());
    let comm = CyclicWord::from_signed(&[-1, -2, 1, 2], 2).unwrap();
    assert!(d.system.carries_conjugacy_class(&comm));
    assert!(!d
        .system
        .carries_conjugacy_class(&CyclicWord::from_signed(&[1], 2).unwrap()));
}

#[test]
fn e1_as_given_has_only_c() {
    let f = map("e1.graph.json");
    let d = nas(&f, 2);
    assert!(d.sigma_hat.is_none());
    assert_eq!(d.system.components().len(), 1);
    assert!(d.system.carries_conjugacy_class(&class(&[3, 3])));
    assert!(!d.system.carries_conjugacy_class(&class(&[-1, -2, 1, 2])));
}
