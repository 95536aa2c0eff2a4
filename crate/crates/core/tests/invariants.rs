use std::collections::BTreeSet;

use proptest::prelude::*;
use prockit::compose::{alt, atomic, encap, hide, label_set, parallel, seq, CommFn};
use prockit::equiv::{
    branching_bisim, lang_eq, minimize, rooted_branching_bisim, strong_bisim, trace_eq, Relation,
};
use prockit::lts::isomorphic;
use prockit::random::{random_deterministic_lts, random_lts};
use prockit::{Action, Lts};
use rand::rngs::StdRng;
use rand::SeedableRng;

const LABELS: [&str; 3] = ["a", "b", "c"];

fn pair(seed: u64, tau: f64) -> (Lts, Lts) {
    let mut rng = StdRng::seed_from_u64(seed);
    (random_lts(&mut rng, 4, &LABELS, 7, tau), random_lts(&mut rng, 4, &LABELS, 7, tau))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_systems_are_well_formed(seed in any::<u64>()) {
        let (a, b) = pair(seed, 0.3);
        prop_assert!(a.validate().is_ok());
        prop_assert!(b.validate().is_ok());
        let mut rng = StdRng::seed_from_u64(seed);
        prop_assert!(random_deterministic_lts(&mut rng, 3, &["a", "b"]).validate().is_ok());
    }

    #[test]
    fn finer_relations_imply_coarser(seed in any::<u64>()) {
        let (a, b) = pair(seed, 0.25);
        let iso = isomorphic(&a, &b);
        let strong = strong_bisim(&a, &b).equivalent;
        let rb = rooted_branching_bisim(&a, &b).equivalent;
        let br = branching_bisim(&a, &b).equivalent;
        let tr = trace_eq(&a, &b).equivalent;
        let lang = lang_eq(&a, &b).equivalent;
        prop_assert!(!iso || strong);
        prop_assert!(!strong || rb);
        prop_assert!(!rb || br);
        prop_assert!(!br || tr);
        prop_assert!(!tr || lang);
    }

    #[test]
    fn relations_are_reflexive_and_symmetric(seed in any::<u64>()) {
        let (a, b) = pair(seed, 0.25);
        prop_assert!(strong_bisim(&a, &a).equivalent);
        prop_assert!(branching_bisim(&a, &a).equivalent);
        prop_assert_eq!(strong_bisim(&a, &b).equivalent, strong_bisim(&b, &a).equivalent);
        prop_assert_eq!(branching_bisim(&a, &b).equivalent, branching_bisim(&b, &a).equivalent);
        prop_assert_eq!(trace_eq(&a, &b).equivalent, trace_eq(&b, &a).equivalent);
    }

    #[test]
    fn deterministic_systems_strong_iff_trace(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_deterministic_lts(&mut rng, 3, &["a", "b"]);
        let b = random_deterministic_lts(&mut rng, 3, &["a", "b"]);
        prop_assert_eq!(strong_bisim(&a, &b).equivalent, trace_eq(&a, &b).equivalent);
    }

    #[test]
    fn quotients_stay_equivalent(seed in any::<u64>()) {
        let (a, _) = pair(seed, 0.3);
        let s = minimize(&a, Relation::Strong);
        let b = minimize(&a, Relation::Branching);
        prop_assert!(strong_bisim(&a, &s).equivalent);
        prop_assert!(branching_bisim(&a, &b).equivalent);
        prop_assert!(b.num_states() <= s.num_states() + 1);
        prop_assert!(s.num_states() <= a.reduct().num_states());
    }

    #[test]
    fn strong_bisimilarity_is_a_congruence(seed in any::<u64>()) {
        let (a, c) = pair(seed, 0.2);
        let b = minimize(&a, Relation::Strong);
        let g = CommFn::parse_text("comm a b -> c\n").unwrap();
        prop_assert!(strong_bisim(&alt(&a, &c), &alt(&b, &c)).equivalent);
        prop_assert!(strong_bisim(&seq(&a, &c), &seq(&b, &c)).equivalent);
        prop_assert!(strong_bisim(&seq(&c, &a), &seq(&c, &b)).equivalent);
        let pa = parallel(&a, &c, &g).unwrap();
        let pb = parallel(&b, &c, &g).unwrap();
        prop_assert!(strong_bisim(&pa, &pb).equivalent);
        let h = label_set(["a"]);
        prop_assert!(strong_bisim(&encap(&h, &pa).unwrap(), &encap(&h, &pb).unwrap()).equivalent);
        prop_assert!(strong_bisim(&hide(&h, &pa).unwrap(), &hide(&h, &pb).unwrap()).equivalent);
    }

    #[test]
    fn rooted_branching_is_a_congruence(seed in any::<u64>()) {
        let (a, c) = pair(seed, 0.3);
        let g = CommFn::parse_text("comm a b -> c\n").unwrap();
        for b in [seq(&a, &atomic(Action::Tau)), a.reduct()] {
            prop_assert!(rooted_branching_bisim(&a, &b).equivalent);
            prop_assert!(rooted_branching_bisim(&alt(&a, &c), &alt(&b, &c)).equivalent);
            prop_assert!(rooted_branching_bisim(&seq(&a, &c), &seq(&b, &c)).equivalent);
            prop_assert!(rooted_branching_bisim(&seq(&c, &a), &seq(&c, &b)).equivalent);
            let pa = parallel(&a, &c, &g).unwrap();
            let pb = parallel(&b, &c, &g).unwrap();
            prop_assert!(rooted_branching_bisim(&pa, &pb).equivalent);
            let h = label_set(["b"]);
            prop_assert!(rooted_branching_bisim(&hide(&h, &pa).unwrap(), &hide(&h, &pb).unwrap()).equivalent);
        }
    }

    #[test]
    fn reduct_is_idempotent(seed in any::<u64>()) {
        let (a, _) = pair(seed, 0.3);
        let r = a.reduct();
        prop_assert_eq!(r.reduct().to_text(), r.to_text());
        prop_assert!(r.is_connected());
        prop_assert!(isomorphic(&r, &r.reduct()));
    }

    #[test]
    fn generalized_steps_concatenate(
        seed in any::<u64>(),
        first in prop::collection::vec(0usize..3, 0..4),
        second in prop::collection::vec(0usize..3, 0..4),
    ) {
        let (a, _) = pair(seed, 0.4);
        let word = |v: &[usize]| v.iter().map(|&i| LABELS[i].to_string()).collect::<Vec<_>>();
        let (u, v) = (word(&first), word(&second));
        let whole: Vec<String> = u.iter().chain(&v).cloned().collect();
        let direct = a.gstep(a.initial(), &whole).unwrap();
        let mut staged = BTreeSet::new();
        for s in a.gstep(a.initial(), &u).unwrap() {
            staged.extend(a.gstep(s, &v).unwrap());
        }
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn text_format_round_trips(seed in any::<u64>()) {
        let (a, _) = pair(seed, 0.3);
        let back = Lts::parse_text(&a.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), a.to_text());
        prop_assert!(isomorphic(&a, &back));
    }
}
