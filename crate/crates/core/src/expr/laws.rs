//! The equational laws as templates, and a checker comparing instantiated
//! sides by rooted branching bisimilarity of their operational meaning.
//!
//! Templates use the variables `X`, `Y`, `Z` for processes and `A`, `B`, `C`
//! for atoms (visible actions, `tau` or `delta`). Label sets written `{H}` in a
//! template are the placeholder set [`SET`].

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::{sos_lts, ProcExpr};
use crate::compose::CommFn;
use crate::equiv::rooted_branching_bisim;
use crate::error::ExprError;
use crate::random::{random_comm, random_term, TermShape};

/// Label standing for the encapsulated or hidden set in a template.
pub const SET: &str = "%H";

const BUDGET: usize = 200_000;

/// Instantiates both sides and compares them. Every variable must be bound.
pub fn check_law(
    lhs: &ProcExpr,
    rhs: &ProcExpr,
    bindings: &BTreeMap<String, ProcExpr>,
    g: &CommFn,
) -> Result<bool, ExprError> {
    let l = instantiate(lhs, bindings, &BTreeSet::new())?;
    let r = instantiate(rhs, bindings, &BTreeSet::new())?;
    compare(&l, &r, g)
}

fn compare(l: &ProcExpr, r: &ProcExpr, g: &CommFn) -> Result<bool, ExprError> {
    let a = sos_lts(l, g, BUDGET)?;
    let b = sos_lts(r, g, BUDGET)?;
    if !a.complete || !b.complete {
        return Err(ExprError::Open(format!("state space of `{l}` or `{r}` exceeds the budget")));
    }
    Ok(rooted_branching_bisim(&a.lts, &b.lts).equivalent)
}

/// Substitutes bindings and replaces the placeholder set by `set`.
pub fn instantiate(
    t: &ProcExpr,
    bindings: &BTreeMap<String, ProcExpr>,
    set: &BTreeSet<String>,
) -> Result<ProcExpr, ExprError> {
    if let Some(x) = t.vars().into_iter().find(|x| !bindings.contains_key(x)) {
        return Err(ExprError::Unbound(x));
    }
    Ok(replace_sets(&t.substitute(&|x| bindings.get(x).cloned()), set))
}

fn replace_sets(t: &ProcExpr, set: &BTreeSet<String>) -> ProcExpr {
    use ProcExpr::*;
    let fix = |s: &BTreeSet<String>| if s.contains(SET) { set.clone() } else { s.clone() };
    let go = |e: &ProcExpr| replace_sets(e, set);
    match t {
        Var(_) | Atom(_) | Tau | Delta => t.clone(),
        Alt(l, r) => ProcExpr::alt(go(l), go(r)),
        Seq(l, r) => ProcExpr::seq(go(l), go(r)),
        Par(l, r) => ProcExpr::par(go(l), go(r)),
        LeftMerge(l, r) => ProcExpr::left_merge(go(l), go(r)),
        CommMerge(l, r) => ProcExpr::comm_merge(go(l), go(r)),
        Star(l, r) => ProcExpr::star(go(l), go(r)),
        Omega(x) => ProcExpr::omega(go(x)),
        Encap(h, x) => ProcExpr::encap(fix(h), go(x)),
        Hide(i, x) => ProcExpr::hide(fix(i), go(x)),
    }
}

/// Restriction on the atom placeholders of a law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideCondition {
    None,
    /// `A | B` is defined and equals `C`.
    CommDefined,
    /// `A | B` is undefined.
    CommUndefined,
    /// `A` is an action in the set.
    InSet,
    /// `A` is not in the set.
    NotInSet,
}

#[derive(Clone, Debug)]
pub struct Law {
    pub name: &'static str,
    pub lhs: ProcExpr,
    pub rhs: ProcExpr,
    pub side: SideCondition,
}

/// One concrete instance of a law.
#[derive(Clone, Debug)]
pub struct Instance {
    pub bindings: BTreeMap<String, ProcExpr>,
    pub set: BTreeSet<String>,
    pub comm: CommFn,
}

impl Law {
    pub fn check(&self, inst: &Instance) -> Result<bool, ExprError> {
        let l = instantiate(&self.lhs, &inst.bindings, &inst.set)?;
        let r = instantiate(&self.rhs, &inst.bindings, &inst.set)?;
        compare(&l, &r, &inst.comm)
    }

    /// A random instance satisfying the side condition.
    pub fn instance<R: Rng>(&self, rng: &mut R) -> Instance {
        let actions: Vec<String> = ["a", "b", "c", "d"].map(String::from).to_vec();
        let mut shape = TermShape::new(&["a", "b", "c", "d"], 5);
        shape.allow_merges = true;
        loop {
            let comm = random_comm(rng, &actions);
            let set: BTreeSet<String> = actions.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            let mut bindings = BTreeMap::new();
            for x in ["X", "Y", "Z"] {
                bindings.insert(x.to_string(), random_term(rng, &shape));
            }
            let pick = |rng: &mut R| match rng.gen_range(0..8) {
                0 => ProcExpr::Tau,
                1 => ProcExpr::Delta,
                _ => ProcExpr::Atom(actions.choose(rng).expect("actions").clone()),
            };
            let (a, b) = (pick(rng), pick(rng));
            let name = |p: &ProcExpr| match p {
                ProcExpr::Atom(n) => Some(n.clone()),
                _ => None,
            };
            let product = match (name(&a), name(&b)) {
                (Some(x), Some(y)) => comm.get(&x, &y).map(str::to_string),
                _ => None,
            };
            let c = match self.side {
                SideCondition::CommDefined => match &product {
                    Some(c) => ProcExpr::Atom(c.clone()),
                    None => continue,
                },
                SideCondition::CommUndefined if product.is_some() => continue,
                SideCondition::InSet if !name(&a).is_some_and(|n| set.contains(&n)) => continue,
                SideCondition::NotInSet if name(&a).is_some_and(|n| set.contains(&n)) => continue,
                _ => pick(rng),
            };
            bindings.insert("A".into(), a);
            bindings.insert("B".into(), b);
            bindings.insert("C".into(), c);
            return Instance { bindings, set, comm };
        }
    }
}

fn x() -> ProcExpr {
    ProcExpr::Var("X".into())
}
fn y() -> ProcExpr {
    ProcExpr::Var("Y".into())
}
fn z() -> ProcExpr {
    ProcExpr::Var("Z".into())
}
fn a() -> ProcExpr {
    ProcExpr::Var("A".into())
}
fn b() -> ProcExpr {
    ProcExpr::Var("B".into())
}
fn c() -> ProcExpr {
    ProcExpr::Var("C".into())
}

fn law(name: &'static str, lhs: ProcExpr, rhs: ProcExpr) -> Law {
    Law { name, lhs, rhs, side: SideCondition::None }
}

fn law_if(name: &'static str, lhs: ProcExpr, rhs: ProcExpr, side: SideCondition) -> Law {
    Law { name, lhs, rhs, side }
}

/// The full table of laws.
pub fn all_laws() -> Vec<Law> {
    use ProcExpr as P;
    let alt = P::alt;
    let seq = P::seq;
    let par = P::par;
    let lm = P::left_merge;
    let cm = P::comm_merge;
    let star = P::star;
    let h = || BTreeSet::from([SET.to_string()]);
    let enc = |e: P| P::encap(h(), e);
    let hid = |e: P| P::hide(h(), e);
    vec![
        law("A1", alt(x(), y()), alt(y(), x())),
        law("A2", alt(alt(x(), y()), z()), alt(x(), alt(y(), z()))),
        law("A3", alt(x(), x()), x()),
        law("A4", seq(alt(x(), y()), z()), alt(seq(x(), z()), seq(y(), z()))),
        law("A5", seq(seq(x(), y()), z()), seq(x(), seq(y(), z()))),
        law("A6", alt(x(), P::Delta), x()),
        law("A7", seq(P::Delta, x()), P::Delta),
        law_if("CF1", cm(a(), b()), c(), SideCondition::CommDefined),
        law_if("CF2", cm(a(), b()), P::Delta, SideCondition::CommUndefined),
        law("CM1", par(x(), y()), alt(alt(lm(x(), y()), lm(y(), x())), cm(x(), y()))),
        law("CM2", lm(a(), x()), seq(a(), x())),
        law("CM3", lm(seq(a(), x()), y()), seq(a(), par(x(), y()))),
        law("CM4", lm(alt(x(), y()), z()), alt(lm(x(), z()), lm(y(), z()))),
        law("CM5", cm(seq(a(), x()), b()), seq(cm(a(), b()), x())),
        law("CM6", cm(a(), seq(b(), x())), seq(cm(a(), b()), x())),
        law("CM7", cm(seq(a(), x()), seq(b(), y())), seq(cm(a(), b()), par(x(), y()))),
        law("CM8", cm(alt(x(), y()), z()), alt(cm(x(), z()), cm(y(), z()))),
        law("CM9", cm(x(), alt(y(), z())), alt(cm(x(), y()), cm(x(), z()))),
        law("B1", seq(x(), P::Tau), x()),
        law("B2", seq(x(), alt(seq(P::Tau, alt(y(), z())), y())), seq(x(), alt(y(), z()))),
        law("BKS1", star(x(), y()), alt(seq(x(), star(x(), y())), y())),
        law("BKS2", star(x(), seq(y(), z())), seq(star(x(), y()), z())),
        law("BKS3", star(alt(x(), y()), z()), star(x(), alt(seq(y(), star(alt(x(), y()), z())), z()))),
        law("NEI", P::omega(x()), star(x(), P::Delta)),
        law_if("D1", enc(a()), a(), SideCondition::NotInSet),
        law_if("D2", enc(a()), P::Delta, SideCondition::InSet),
        law("D3", enc(alt(x(), y())), alt(enc(x()), enc(y()))),
        law("D4", enc(seq(x(), y())), seq(enc(x()), enc(y()))),
        law_if("TI1", hid(a()), a(), SideCondition::NotInSet),
        law_if("TI2", hid(a()), P::Tau, SideCondition::InSet),
        law("TI3", hid(alt(x(), y())), alt(hid(x()), hid(y()))),
        law("TI4", hid(seq(x(), y())), seq(hid(x()), hid(y()))),
    ]
}
