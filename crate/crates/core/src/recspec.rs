//! Recursive specifications: equations `X = t`, guardedness, linear form,
//! conversion to and from transition systems, and bounded unfolding.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::compose::CommFn;
use crate::error::{SpecError, SyntaxError};
use crate::expr::{sos, ProcExpr, Parser, Tok};
use crate::lts::{Action, Lts, LtsBuilder, StateId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecSpec {
    name: String,
    /// In definition order; the first equation defines the root.
    equations: Vec<(String, ProcExpr)>,
    index: BTreeMap<String, usize>,
}

impl RecSpec {
    pub fn new(name: impl Into<String>, equations: Vec<(String, ProcExpr)>) -> Result<RecSpec, SpecError> {
        if equations.is_empty() {
            return Err(SpecError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, (x, _)) in equations.iter().enumerate() {
            if index.insert(x.clone(), i).is_some() {
                return Err(SpecError::Duplicate(x.clone()));
            }
        }
        for (_, t) in &equations {
            if let Some(x) = t.vars().into_iter().find(|x| !index.contains_key(x)) {
                return Err(SpecError::Undefined(x));
            }
        }
        Ok(RecSpec { name: name.into(), equations, index })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> &str {
        &self.equations[0].0
    }

    pub fn equations(&self) -> &[(String, ProcExpr)] {
        &self.equations
    }

    pub fn rhs(&self, x: &str) -> Option<&ProcExpr> {
        self.index.get(x).map(|&i| &self.equations[i].1)
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// `spec <name>` header (optional), then `X = expr ;` equations.
    pub fn parse(text: &str) -> Result<RecSpec, SpecError> {
        let mut p = Parser::new(text)?;
        let mut name = "spec".to_string();
        if *p.peek() == Tok::Action("spec".into()) {
            p.bump();
            name = match p.bump() {
                Tok::Action(n) | Tok::Var(n) => n,
                _ => return Err(p.error("expected a specification name").into()),
            };
        }
        let mut equations = Vec::new();
        let mut seen = BTreeSet::new();
        while *p.peek() != Tok::Eof {
            let pos = p.position();
            let Tok::Var(x) = p.bump() else {
                return Err(SyntaxError::new(pos.0, pos.1, "expected an upper-case variable").into());
            };
            if !seen.insert(x.clone()) {
                return Err(SpecError::Duplicate(x));
            }
            p.expect(Tok::Equals, "`=`")?;
            let t = p.expr()?;
            p.expect(Tok::Semi, "`;`")?;
            equations.push((x, t));
        }
        RecSpec::new(name, equations)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Variables occurring unguarded in each right-hand side.
    fn unguarded_deps(&self) -> BTreeMap<&str, BTreeSet<String>> {
        self.equations
            .iter()
            .map(|(x, t)| {
                let mut out = BTreeSet::new();
                unguarded(t, false, &BTreeSet::new(), &mut out);
                (x.as_str(), out)
            })
            .collect()
    }

    /// Guarded when no variable reaches itself through unguarded occurrences.
    /// An occurrence is guarded when it can only be reached after a visible,
    /// non-hidden action; acyclic unguarded references (aliases such as
    /// `M = M0`) are resolved by substituting their equations.
    pub fn is_guarded(&self) -> bool {
        self.unguarded_cycle().is_none()
    }

    fn unguarded_cycle(&self) -> Option<String> {
        let deps = self.unguarded_deps();
        let ids: Vec<&str> = self.equations.iter().map(|(x, _)| x.as_str()).collect();
        let succ: Vec<Vec<usize>> = ids.iter().map(|x| deps[x].iter().map(|y| self.index[y]).collect()).collect();
        let comp = crate::lts::scc(ids.len(), |i| succ[i].clone());
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &c) in comp.iter().enumerate() {
            groups.entry(c).or_default().push(i);
        }
        groups.into_values().find(|g| g.len() > 1 || succ[g[0]].contains(&g[0])).map(|g| {
            let mut names: Vec<&str> = g.iter().map(|&i| ids[i]).collect();
            names.sort();
            names.join(", ")
        })
    }

    pub fn check_guarded(&self) -> Result<(), SpecError> {
        match self.unguarded_cycle() {
            None => Ok(()),
            Some(c) => Err(SpecError::Unguarded(format!("unguarded recursion through {c}"))),
        }
    }

    /// Every right-hand side is a sum of `a` and `a . X` with `a` visible, or
    /// `delta`, or a variable, provided such aliases do not form a cycle.
    pub fn is_linear(&self) -> bool {
        self.check_linear().is_ok()
    }

    fn check_linear(&self) -> Result<(), SpecError> {
        for (x, t) in &self.equations {
            if !matches!(t, ProcExpr::Var(_)) {
                for s in summands(t) {
                    if !is_linear_summand(s, false) {
                        return Err(SpecError::NotLinear(format!("summand `{s}` of `{x}`")));
                    }
                }
            }
        }
        self.check_guarded().map_err(|_| SpecError::NotLinear("cyclic aliases".into()))
    }

    fn resolve_alias<'a>(&'a self, mut x: &'a str) -> &'a str {
        for _ in 0..=self.len() {
            match self.rhs(x) {
                Some(ProcExpr::Var(y)) => x = y,
                _ => break,
            }
        }
        x
    }
}

impl fmt::Display for RecSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "spec {}", self.name)?;
        for (x, t) in &self.equations {
            writeln!(f, "{x} = {t} ;")?;
        }
        Ok(())
    }
}

pub fn parse_spec(text: &str) -> Result<RecSpec, SpecError> {
    RecSpec::parse(text)
}

pub fn print_spec(s: &RecSpec) -> String {
    s.to_string()
}

/// True when `t` may finish, or hand control to what follows it, without a
/// visible action outside `hidden`.
fn can_skip(t: &ProcExpr, hidden: &BTreeSet<String>) -> bool {
    use ProcExpr::*;
    match t {
        Var(_) | Tau => true,
        Atom(a) => hidden.contains(a),
        Delta | Omega(_) => false,
        CommMerge(..) => !hidden.is_empty(),
        Alt(l, r) => can_skip(l, hidden) || can_skip(r, hidden),
        Seq(l, r) | Par(l, r) | LeftMerge(l, r) => can_skip(l, hidden) && can_skip(r, hidden),
        Star(_, r) => can_skip(r, hidden),
        Encap(_, x) => can_skip(x, hidden),
        Hide(i, x) => can_skip(x, &hidden.union(i).cloned().collect()),
    }
}

fn unguarded(t: &ProcExpr, guarded: bool, hidden: &BTreeSet<String>, out: &mut BTreeSet<String>) {
    use ProcExpr::*;
    match t {
        Var(x) => {
            if !guarded {
                out.insert(x.clone());
            }
        }
        Atom(_) | Tau | Delta => {}
        Seq(l, r) | LeftMerge(l, r) => {
            unguarded(l, guarded, hidden, out);
            unguarded(r, guarded || !can_skip(l, hidden), hidden, out);
        }
        CommMerge(l, r) => {
            unguarded(l, guarded || hidden.is_empty(), hidden, out);
            unguarded(r, guarded || hidden.is_empty(), hidden, out);
        }
        Alt(l, r) | Par(l, r) | Star(l, r) => {
            unguarded(l, guarded, hidden, out);
            unguarded(r, guarded, hidden, out);
        }
        Omega(x) | Encap(_, x) => unguarded(x, guarded, hidden, out),
        Hide(i, x) => unguarded(x, guarded, &hidden.union(i).cloned().collect(), out),
    }
}

fn summands(t: &ProcExpr) -> Vec<&ProcExpr> {
    match t {
        ProcExpr::Alt(l, r) => {
            let mut v = summands(l);
            v.extend(summands(r));
            v
        }
        other => vec![other],
    }
}

fn is_linear_summand(s: &ProcExpr, allow_tau: bool) -> bool {
    let prefix = |a: &ProcExpr| matches!(a, ProcExpr::Atom(_)) || (allow_tau && *a == ProcExpr::Tau);
    match s {
        ProcExpr::Delta => true,
        ProcExpr::Seq(a, x) => prefix(a) && matches!(**x, ProcExpr::Var(_)),
        a => prefix(a),
    }
}

/// Name of the shared terminating state.
pub const DONE: &str = "√";

/// One state per variable reachable from the root, named after the variable;
/// an alias `X = Y` shares the state of `Y`. `tau` prefixes are accepted as
/// well as visible ones.
pub fn linear_to_lts(s: &RecSpec) -> Result<Lts, SpecError> {
    for (x, t) in &s.equations {
        if !matches!(t, ProcExpr::Var(_)) {
            if let Some(bad) = summands(t).into_iter().find(|u| !is_linear_summand(u, true)) {
                return Err(SpecError::NotLinear(format!("summand `{bad}` of `{x}`")));
            }
        }
    }
    s.check_guarded().map_err(|_| SpecError::NotLinear("cyclic aliases".into()))?;
    let mut b = LtsBuilder::new(s.name());
    let root = s.resolve_alias(s.root()).to_string();
    b.state(&root);
    b.initial(&root);
    let mut seen = BTreeSet::from([root.clone()]);
    let mut queue = VecDeque::from([root]);
    let mut done_used = false;
    let mut alphabet = BTreeSet::new();
    while let Some(x) = queue.pop_front() {
        let body = s.rhs(&x).expect("checked");
        for u in summands(body) {
            let (a, dst) = match u {
                ProcExpr::Delta => continue,
                ProcExpr::Seq(a, y) => {
                    let ProcExpr::Var(y) = &**y else { unreachable!() };
                    (a.as_ref(), s.resolve_alias(y).to_string())
                }
                a => {
                    done_used = true;
                    (a, DONE.to_string())
                }
            };
            let action = match a {
                ProcExpr::Atom(n) => {
                    alphabet.insert(n.clone());
                    Action::visible(n.clone())
                }
                _ => Action::Tau,
            };
            if dst != DONE && seen.insert(dst.clone()) {
                queue.push_back(dst.clone());
            }
            b.state(&dst);
            b.transition(&x, action, &dst);
        }
    }
    if done_used {
        b.terminating(DONE);
    }
    b.build().map_err(|e| SpecError::NotLinear(e.to_string()))
}

fn var_name(state: &str) -> String {
    let clean: String = state.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '\'' { c } else { '_' }).collect();
    format!("X_{clean}")
}

/// One variable per reachable non-terminating state and one summand per
/// transition; transitions into terminating states become `a` summands.
pub fn lts_to_linear(l: &Lts) -> RecSpec {
    let reach: Vec<StateId> = bfs_order(l);
    let mut names: BTreeMap<StateId, String> = BTreeMap::new();
    let mut used = BTreeSet::new();
    for &s in &reach {
        if l.is_terminating(s) {
            continue;
        }
        let mut n = var_name(l.state_name(s));
        if !used.insert(n.clone()) {
            n = format!("{n}_{s}");
            used.insert(n.clone());
        }
        names.insert(s, n);
    }
    let mut equations = Vec::new();
    for &s in &reach {
        let Some(x) = names.get(&s) else { continue };
        let terms = l.outgoing(s).map(|t| {
            let a = match &t.action {
                Action::Tau => ProcExpr::Tau,
                Action::Visible(n) => ProcExpr::Atom(n.clone()),
            };
            match names.get(&t.dst) {
                Some(y) => ProcExpr::seq(a, ProcExpr::Var(y.clone())),
                None => a,
            }
        });
        equations.push((x.clone(), ProcExpr::sum(terms)));
    }
    RecSpec::new(l.name(), equations).expect("variables are defined for every reachable state")
}

fn bfs_order(l: &Lts) -> Vec<StateId> {
    let mut seen = BTreeSet::from([l.initial()]);
    let mut order = vec![l.initial()];
    let mut i = 0;
    while i < order.len() {
        for t in l.outgoing(order[i]) {
            if seen.insert(t.dst) {
                order.push(t.dst);
            }
        }
        i += 1;
    }
    order
}

#[derive(Clone, Debug)]
pub struct Unfolding {
    pub lts: Lts,
    pub complete: bool,
    pub frontier: Vec<String>,
}

/// Breadth-first unfolding of a guarded specification from its root, with at
/// most `budget` states expanded.
pub fn unfold(s: &RecSpec, g: &CommFn, budget: usize) -> Result<Unfolding, SpecError> {
    s.check_guarded()?;
    let env = |x: &str| s.rhs(x).cloned();
    let r = sos::explore(&ProcExpr::Var(s.root().to_string()), g, budget, &env)?;
    Ok(Unfolding { lts: r.lts.with_name(s.name()), complete: r.complete, frontier: r.frontier })
}
