use std::collections::{BTreeSet, HashMap, VecDeque};

use super::ProcExpr::{self, *};
use crate::compose::{self, CommFn};
use crate::error::ExprError;
use crate::lts::{Action, Lts, Transition};

/// A state of the operational semantics: a term, or successful termination.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SosState {
    Term(ProcExpr),
    Done,
}

impl SosState {
    pub fn name(&self) -> String {
        match self {
            SosState::Term(p) => p.compact(),
            SosState::Done => "√".to_string(),
        }
    }
}

type Step = (Action, SosState);

/// Outgoing transitions of a term. Variables are unfolded through `env`; an
/// unresolved variable is an error.
pub fn sos_step(
    p: &ProcExpr,
    g: &CommFn,
    env: &dyn Fn(&str) -> Option<ProcExpr>,
) -> Result<Vec<Step>, ExprError> {
    let mut out = steps(p, g, env, 0)?;
    out.sort();
    out.dedup();
    Ok(out)
}

const MAX_UNFOLD: usize = 10_000;

fn steps(p: &ProcExpr, g: &CommFn, env: &dyn Fn(&str) -> Option<ProcExpr>, depth: usize) -> Result<Vec<Step>, ExprError> {
    use SosState::{Done, Term};
    let sub = |q: &ProcExpr| steps(q, g, env, depth);
    Ok(match p {
        Var(x) => {
            if depth > MAX_UNFOLD {
                return Err(ExprError::Open(format!("{x} (unguarded unfolding)")));
            }
            let body = env(x).ok_or_else(|| ExprError::Open(x.clone()))?;
            steps(&body, g, env, depth + 1)?
        }
        Atom(a) => vec![(Action::visible(a.clone()), Done)],
        Tau => vec![(Action::Tau, Done)],
        Delta => vec![],
        Alt(x, y) => {
            let mut v = sub(x)?;
            v.extend(sub(y)?);
            v
        }
        Seq(x, y) => sub(x)?
            .into_iter()
            .map(|(a, s)| match s {
                Term(x2) => (a, Term(ProcExpr::seq(x2, (**y).clone()))),
                Done => (a, Term((**y).clone())),
            })
            .collect(),
        Star(x, y) => {
            let mut v: Vec<Step> = sub(x)?
                .into_iter()
                .map(|(a, s)| match s {
                    Term(x2) => (a, Term(ProcExpr::seq(x2, p.clone()))),
                    Done => (a, Term(p.clone())),
                })
                .collect();
            v.extend(sub(y)?);
            v
        }
        Omega(x) => sub(x)?
            .into_iter()
            .map(|(a, s)| match s {
                Term(x2) => (a, Term(ProcExpr::seq(x2, p.clone()))),
                Done => (a, Term(p.clone())),
            })
            .collect(),
        Par(x, y) => {
            let (sx, sy) = (sub(x)?, sub(y)?);
            let mut v = Vec::new();
            for (a, s) in &sx {
                v.push((a.clone(), match s {
                    Term(x2) => Term(ProcExpr::par(x2.clone(), (**y).clone())),
                    Done => Term((**y).clone()),
                }));
            }
            for (b, s) in &sy {
                v.push((b.clone(), match s {
                    Term(y2) => Term(ProcExpr::par((**x).clone(), y2.clone())),
                    Done => Term((**x).clone()),
                }));
            }
            v.extend(communications(&sx, &sy, g));
            v
        }
        LeftMerge(x, y) => sub(x)?
            .into_iter()
            .map(|(a, s)| match s {
                Term(x2) => (a, Term(ProcExpr::par(x2, (**y).clone()))),
                Done => (a, Term((**y).clone())),
            })
            .collect(),
        CommMerge(x, y) => communications(&sub(x)?, &sub(y)?, g),
        Encap(h, x) => sub(x)?
            .into_iter()
            .filter(|(a, _)| a.name().is_none_or(|n| !h.contains(n)))
            .map(|(a, s)| match s {
                Term(x2) => (a, Term(ProcExpr::encap(h.clone(), x2))),
                Done => (a, Done),
            })
            .collect(),
        Hide(i, x) => sub(x)?
            .into_iter()
            .map(|(a, s)| {
                let a = match a.name() {
                    Some(n) if i.contains(n) => Action::Tau,
                    _ => a,
                };
                match s {
                    Term(x2) => (a, Term(ProcExpr::hide(i.clone(), x2))),
                    Done => (a, Done),
                }
            })
            .collect(),
    })
}

/// The four synchronisation forms for `gamma(a, b) = c`.
fn communications(sx: &[Step], sy: &[Step], g: &CommFn) -> Vec<Step> {
    use SosState::{Done, Term};
    let mut v = Vec::new();
    for (a, s) in sx {
        let Some(a) = a.name() else { continue };
        for (b, t) in sy {
            let Some(b) = b.name() else { continue };
            let Some(c) = g.get(a, b) else { continue };
            let target = match (s, t) {
                (Term(x2), Term(y2)) => Term(ProcExpr::par(x2.clone(), y2.clone())),
                (Done, Term(y2)) => Term(y2.clone()),
                (Term(x2), Done) => Term(x2.clone()),
                (Done, Done) => Done,
            };
            v.push((Action::visible(c), target));
        }
    }
    v
}

#[derive(Clone, Debug)]
pub struct SosResult {
    pub lts: Lts,
    /// False when the budget cut exploration short.
    pub complete: bool,
    /// Discovered but unexplored states.
    pub frontier: Vec<String>,
}

/// Breadth-first exploration of the transition graph of `p`, states normalised
/// modulo associativity of `+`/`.` and commutativity and idempotence of `+`.
pub fn sos_lts(p: &ProcExpr, g: &CommFn, budget: usize) -> Result<SosResult, ExprError> {
    explore(p, g, budget, &|_| None)
}

pub(crate) fn explore(
    p: &ProcExpr,
    g: &CommFn,
    budget: usize,
    env: &dyn Fn(&str) -> Option<ProcExpr>,
) -> Result<SosResult, ExprError> {
    g.validate()?;
    let start = SosState::Term(p.normalize());
    let mut index: HashMap<SosState, usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0;
    while let Some(i) = queue.pop_front() {
        if expanded >= budget {
            queue.push_front(i);
            break;
        }
        expanded += 1;
        let SosState::Term(term) = states[i].clone() else { continue };
        for (a, s) in sos_step(&term, g, env)? {
            let s = match s {
                SosState::Term(q) => SosState::Term(q.normalize()),
                SosState::Done => SosState::Done,
            };
            let j = match index.get(&s) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    index.insert(s.clone(), j);
                    states.push(s);
                    queue.push_back(j);
                    j
                }
            };
            transitions.push(Transition { src: i, action: a, dst: j });
        }
    }
    let frontier: Vec<String> = queue.iter().filter(|&&i| states[i] != SosState::Done).map(|&i| states[i].name()).collect();
    let complete = frontier.is_empty();
    let terminating: BTreeSet<usize> = states.iter().position(|s| *s == SosState::Done).into_iter().collect();
    let alphabet = transitions.iter().filter_map(|t: &Transition| t.action.name().map(str::to_string)).collect();
    let names = states.iter().map(SosState::name).collect();
    let lts = Lts::new("sos", names, alphabet, transitions, terminating, 0).expect("sos graph");
    Ok(SosResult { lts, complete, frontier })
}

/// Structural evaluation through the transition-system operators.
pub fn eval_denotational(p: &ProcExpr, g: &CommFn) -> Result<Lts, ExprError> {
    Ok(match p {
        Var(x) => return Err(ExprError::Open(x.clone())),
        Atom(a) => compose::atomic(Action::visible(a.clone())),
        Tau => compose::atomic(Action::Tau),
        Delta => compose::delta(),
        Alt(x, y) => compose::alt(&eval_denotational(x, g)?, &eval_denotational(y, g)?),
        Seq(x, y) => compose::seq(&eval_denotational(x, g)?, &eval_denotational(y, g)?),
        Par(x, y) => compose::parallel(&eval_denotational(x, g)?, &eval_denotational(y, g)?, g)?,
        Star(x, y) => compose::star(&eval_denotational(x, g)?, &eval_denotational(y, g)?),
        Omega(x) => compose::omega(&eval_denotational(x, g)?),
        Encap(h, x) => compose::encap(h, &eval_denotational(x, g)?)?,
        Hide(i, x) => compose::hide(i, &eval_denotational(x, g)?)?,
        LeftMerge(..) => return Err(ExprError::NoCounterpart("left merge")),
        CommMerge(..) => return Err(ExprError::NoCounterpart("communication merge")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::{rooted_branching_bisim, strong_bisim};
    use crate::expr::{atom, parse_expr};
    use crate::lts::isomorphic;

    fn none(_: &str) -> Option<ProcExpr> {
        None
    }

    #[test]
    fn atom_and_sequence_rules() {
        let g = CommFn::new();
        assert_eq!(sos_step(&atom("a"), &g, &none).unwrap(), vec![(Action::visible("a"), SosState::Done)]);
        let ab = parse_expr("a . b").unwrap();
        assert_eq!(sos_step(&ab, &g, &none).unwrap(), vec![(Action::visible("a"), SosState::Term(atom("b")))]);
        assert!(sos_step(&ProcExpr::Var("X".into()), &g, &none).is_err());
    }

    #[test]
    fn parallel_rules_with_handshake() {
        let g = CommFn::handshaking([0], [1]);
        let p = parse_expr("s1(0) || r1(0)").unwrap();
        let got = sos_step(&p, &g, &none).unwrap();
        assert_eq!(got.len(), 3);
        assert!(got.contains(&(Action::visible("c1(0)"), SosState::Done)));
        assert!(got.contains(&(Action::visible("s1(0)"), SosState::Term(atom("r1(0)")))));
        assert!(got.contains(&(Action::visible("r1(0)"), SosState::Term(atom("s1(0)")))));
    }

    #[test]
    fn closed_examples() {
        let g = CommFn::new();
        let a = sos_lts(&atom("a"), &g, 100).unwrap();
        assert!(a.complete);
        assert!(isomorphic(&a.lts, &compose::atomic(Action::visible("a"))));
        let buf = sos_lts(&parse_expr("(add(0) . rem(0) + add(1) . rem(1))^omega").unwrap(), &g, 100).unwrap();
        assert_eq!(buf.lts.num_states(), 3);
        let ctr = sos_lts(&parse_expr("(inc . dec)^omega").unwrap(), &g, 100).unwrap();
        assert_eq!(ctr.lts.num_states(), 2);
    }

    #[test]
    fn denotational_examples() {
        let g = CommFn::new();
        let l = eval_denotational(&parse_expr("(rk(0) + rl(0)) . sm(0)").unwrap(), &g).unwrap();
        let r = eval_denotational(&parse_expr("rk(0) . sm(0) + rl(0) . sm(0)").unwrap(), &g).unwrap();
        assert!(rooted_branching_bisim(&l, &r).equivalent);
        assert!(isomorphic(&eval_denotational(&ProcExpr::Delta, &g).unwrap(), &compose::delta()));
        let sched = eval_denotational(&parse_expr("(grant(1) . grant(2) . grant(3))^omega").unwrap(), &g).unwrap();
        assert_eq!(sched.num_states(), 3);
        assert!(eval_denotational(&ProcExpr::left_merge(atom("a"), atom("b")), &g).is_err());
    }

    #[test]
    fn sos_agrees_with_denotation_on_samples() {
        let g = CommFn::handshaking([0, 1], [1]);
        for src in ["a * b", "(a . b)^omega + c", "encap({s1(0), r1(0)}, s1(0) . a || r1(0))",
            "hide({a}, a . b + tau) . c", "(a + tau) * (b || c)", "delta . a + b"] {
            let p = parse_expr(src).unwrap();
            let s = sos_lts(&p, &g, 1000).unwrap().lts;
            let d = eval_denotational(&p, &g).unwrap();
            assert!(rooted_branching_bisim(&s, &d).equivalent, "{src}");
            assert!(strong_bisim(&s, &d).equivalent, "{src}");
        }
    }
}
