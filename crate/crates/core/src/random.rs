//! Seeded generators for randomized testing: transition systems, closed
//! terms, communication functions and linear specifications.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::compose::CommFn;
use crate::expr::ProcExpr;
use crate::lts::{Action, Lts, LtsBuilder};
use crate::recspec::RecSpec;

/// Knobs for [`random_term`].
#[derive(Clone, Debug)]
pub struct TermShape {
    pub max_size: usize,
    pub actions: Vec<String>,
    pub allow_tau: bool,
    pub allow_iteration: bool,
    pub allow_parallel: bool,
    /// Admits `lmerge` and `cmerge`, which have no transition-system counterpart.
    pub allow_merges: bool,
}

impl TermShape {
    pub fn new(actions: &[&str], max_size: usize) -> Self {
        TermShape {
            max_size,
            actions: actions.iter().map(|a| a.to_string()).collect(),
            allow_tau: true,
            allow_iteration: true,
            allow_parallel: true,
            allow_merges: false,
        }
    }
}

/// A closed term with at most `shape.max_size` nodes.
pub fn random_term<R: Rng>(rng: &mut R, shape: &TermShape) -> ProcExpr {
    let budget = rng.gen_range(1..=shape.max_size.max(1));
    term(rng, shape, budget)
}

fn leaf<R: Rng>(rng: &mut R, shape: &TermShape) -> ProcExpr {
    match rng.gen_range(0..10) {
        0 => ProcExpr::Delta,
        1 if shape.allow_tau => ProcExpr::Tau,
        _ => ProcExpr::Atom(shape.actions.choose(rng).expect("non-empty alphabet").clone()),
    }
}

fn some_labels<R: Rng>(rng: &mut R, shape: &TermShape) -> BTreeSet<String> {
    shape.actions.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect()
}

fn term<R: Rng>(rng: &mut R, shape: &TermShape, budget: usize) -> ProcExpr {
    if budget < 2 {
        return leaf(rng, shape);
    }
    if budget == 2 {
        let x = leaf(rng, shape);
        return match rng.gen_range(0..4) {
            0 if shape.allow_iteration => ProcExpr::omega(x),
            1 => ProcExpr::encap(some_labels(rng, shape), x),
            2 => ProcExpr::hide(some_labels(rng, shape), x),
            _ => x,
        };
    }
    let mut kinds = vec![0, 0, 1, 1, 1, 6, 7];
    if shape.allow_parallel {
        kinds.extend([2, 2]);
    }
    if shape.allow_iteration {
        kinds.extend([3, 4]);
    }
    if shape.allow_merges {
        kinds.extend([8, 9]);
    }
    let kind = *kinds.choose(rng).expect("some operator");
    let rest = budget - 1;
    match kind {
        4 => ProcExpr::omega(term(rng, shape, rest)),
        6 => ProcExpr::encap(some_labels(rng, shape), term(rng, shape, rest)),
        7 => ProcExpr::hide(some_labels(rng, shape), term(rng, shape, rest)),
        _ => {
            let left = rng.gen_range(1..rest);
            let l = term(rng, shape, left);
            let r = term(rng, shape, rest - left);
            match kind {
                0 => ProcExpr::alt(l, r),
                1 => ProcExpr::seq(l, r),
                2 => ProcExpr::par(l, r),
                3 => ProcExpr::star(l, r),
                8 => ProcExpr::left_merge(l, r),
                _ => ProcExpr::comm_merge(l, r),
            }
        }
    }
}

/// A communication function over `actions` whose results are drawn from
/// `actions` and a few fresh labels, kept only when it passes validation.
pub fn random_comm<R: Rng>(rng: &mut R, actions: &[String]) -> CommFn {
    let mut results: Vec<String> = actions.to_vec();
    results.extend(["k1", "k2"].map(String::from));
    loop {
        let mut g = CommFn::new();
        let pairs = rng.gen_range(0..=actions.len());
        for _ in 0..pairs {
            let a = actions.choose(rng).expect("non-empty");
            let b = actions.choose(rng).expect("non-empty");
            let c = results.choose(rng).expect("non-empty");
            if g.get(a, b).is_none() {
                g.insert(a, b, c).expect("labels are valid");
            }
        }
        if g.validate().is_ok() {
            return g;
        }
    }
}

/// A random transition system with `states` states; `tau_ratio` of the edges are silent.
pub fn random_lts<R: Rng>(rng: &mut R, states: usize, labels: &[&str], edges: usize, tau_ratio: f64) -> Lts {
    let mut b = LtsBuilder::new("random");
    let names: Vec<String> = (0..states.max(1)).map(|i| format!("s{i}")).collect();
    for n in &names {
        b.state(n);
    }
    b.initial(&names[0]);
    for l in labels {
        b.action(l);
    }
    let mut sources = std::collections::BTreeSet::new();
    for _ in 0..edges {
        let src = names.choose(rng).expect("states");
        let dst = names.choose(rng).expect("states");
        let action = if labels.is_empty() || rng.gen_bool(tau_ratio) {
            Action::Tau
        } else {
            Action::visible(*labels.choose(rng).expect("labels"))
        };
        sources.insert(src.clone());
        b.transition(src, action, dst);
    }
    for n in &names[1..] {
        if !sources.contains(n) && rng.gen_bool(0.5) {
            b.terminating(n);
        }
    }
    b.build().expect("generated system is well formed")
}

/// A deterministic, tau-free system; every state has at most one edge per label.
pub fn random_deterministic_lts<R: Rng>(rng: &mut R, states: usize, labels: &[&str]) -> Lts {
    let mut b = LtsBuilder::new("random");
    let names: Vec<String> = (0..states.max(1)).map(|i| format!("s{i}")).collect();
    for n in &names {
        b.state(n);
    }
    b.initial(&names[0]);
    for (i, src) in names.iter().enumerate() {
        let mut moved = false;
        for l in labels {
            if rng.gen_bool(0.5) {
                let dst = names.choose(rng).expect("states");
                b.transition(src, Action::visible(*l), dst);
                moved = true;
            }
        }
        if i > 0 && !moved && rng.gen_bool(0.5) {
            b.terminating(src);
        }
    }
    b.build().expect("generated system is well formed")
}

/// A linear specification with `vars` variables over `labels`; every variable
/// is reachable from the root.
pub fn random_linear_spec<R: Rng>(rng: &mut R, vars: usize, labels: &[&str]) -> RecSpec {
    let vars = vars.max(1);
    let names: Vec<String> = (0..vars).map(|i| format!("X{i}")).collect();
    let mut eqs = Vec::new();
    for i in 0..vars {
        let mut summands = Vec::new();
        // Chain edge so that every variable is reachable.
        if i + 1 < vars {
            let a = labels.choose(rng).expect("labels");
            summands.push(ProcExpr::seq(ProcExpr::Atom(a.to_string()), ProcExpr::Var(names[i + 1].clone())));
        }
        for _ in 0..rng.gen_range(0..3) {
            let a = ProcExpr::Atom(labels.choose(rng).expect("labels").to_string());
            if rng.gen_bool(0.2) {
                summands.push(a);
            } else {
                summands.push(ProcExpr::seq(a, ProcExpr::Var(names.choose(rng).expect("vars").clone())));
            }
        }
        summands.sort();
        summands.dedup();
        eqs.push((names[i].clone(), ProcExpr::sum(summands)));
    }
    RecSpec::new("random", eqs).expect("generated specification is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn terms_respect_size_bound() {
        let mut rng = StdRng::seed_from_u64(7);
        let shape = TermShape::new(&["a", "b", "c", "d"], 12);
        for _ in 0..500 {
            let t = random_term(&mut rng, &shape);
            assert!(t.size() <= 12);
            assert!(t.is_closed());
        }
    }

    #[test]
    fn comm_functions_are_valid() {
        let mut rng = StdRng::seed_from_u64(3);
        let acts: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
        for _ in 0..100 {
            assert!(random_comm(&mut rng, &acts).validate().is_ok());
        }
    }

    #[test]
    fn deterministic_systems_are_deterministic() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let l = random_deterministic_lts(&mut rng, 5, &["a", "b"]);
            assert!(l.classify().deterministic);
        }
    }
}
