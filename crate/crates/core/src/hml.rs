//! Modal formulas that tell strongly inequivalent systems apart.
//!
//! Bisimilar systems satisfy the same formulas, so a formula true in one
//! initial state and false in the other is a checkable reason for a negative
//! strong-bisimulation verdict.

use std::collections::HashMap;
use std::fmt;

use crate::lts::{Action, Lts, StateId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    /// The state is terminating.
    Terminates,
    Not(Box<Formula>),
    And(Vec<Formula>),
    /// Some `action`-successor satisfies the body.
    Diamond(Action, Box<Formula>),
}

impl Formula {
    pub fn holds(&self, l: &Lts, s: StateId) -> bool {
        match self {
            Formula::True => true,
            Formula::Terminates => l.is_terminating(s),
            Formula::Not(f) => !f.holds(l, s),
            Formula::And(fs) => fs.iter().all(|f| f.holds(l, s)),
            Formula::Diamond(a, f) => l.outgoing(s).any(|t| t.action == *a && f.holds(l, t.dst)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::Terminates => 0,
            Formula::Not(f) => f.depth(),
            Formula::And(fs) => fs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Diamond(_, f) => 1 + f.depth(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("tt"),
            Formula::Terminates => f.write_str("term"),
            Formula::Not(x) => write!(f, "!{x}"),
            Formula::And(xs) if xs.is_empty() => f.write_str("tt"),
            Formula::And(xs) if xs.len() == 1 => write!(f, "{}", xs[0]),
            Formula::And(xs) => {
                let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join(" & "))
            }
            Formula::Diamond(a, x) => write!(f, "<{a}>{x}"),
        }
    }
}

/// Both systems side by side; states of `b` are offset by the size of `a`.
struct Union {
    succ: Vec<Vec<(Action, usize)>>,
    term: Vec<bool>,
}

impl Union {
    fn new(a: &Lts, b: &Lts) -> Union {
        let off = a.num_states();
        let mut succ = vec![Vec::new(); off + b.num_states()];
        let mut term = vec![false; off + b.num_states()];
        for (l, base) in [(a, 0), (b, off)] {
            for t in l.transitions() {
                succ[base + t.src].push((t.action.clone(), base + t.dst));
            }
            for s in 0..l.num_states() {
                term[base + s] = l.is_terminating(s);
            }
        }
        Union { succ, term }
    }

    /// Block numbers of the k-step approximations, level 0 first, until stable.
    fn levels(&self) -> Vec<Vec<usize>> {
        let n = self.term.len();
        let mut levels = vec![self.term.iter().map(|&t| usize::from(t)).collect::<Vec<_>>()];
        loop {
            let prev = levels.last().expect("level 0");
            let mut ids: HashMap<(usize, Vec<(Action, usize)>), usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|s| {
                    let mut sig: Vec<(Action, usize)> = self.succ[s].iter().map(|(a, d)| (a.clone(), prev[*d])).collect();
                    sig.sort();
                    sig.dedup();
                    let len = ids.len();
                    *ids.entry((prev[s], sig)).or_insert(len)
                })
                .collect();
            let stable = ids.len() == count(prev);
            levels.push(next);
            if stable {
                return levels;
            }
        }
    }
}

fn count(block: &[usize]) -> usize {
    block.iter().collect::<std::collections::BTreeSet<_>>().len()
}

struct Search<'a> {
    u: &'a Union,
    levels: Vec<Vec<usize>>,
    memo: HashMap<(usize, usize), Formula>,
}

impl Search<'_> {
    fn split_level(&self, s: usize, t: usize) -> Option<usize> {
        self.levels.iter().position(|l| l[s] != l[t])
    }

    /// A formula true at `s` and false at `t`; they must be split at some level.
    fn dist(&mut self, s: usize, t: usize) -> Formula {
        if let Some(f) = self.memo.get(&(s, t)) {
            return f.clone();
        }
        let k = self.split_level(s, t).expect("states are split");
        let f = if k == 0 {
            if self.u.term[s] {
                Formula::Terminates
            } else {
                Formula::Not(Box::new(Formula::Terminates))
            }
        } else {
            let prev = k - 1;
            let witness = self.u.succ[s].iter().find(|(a, s2)| {
                self.u.succ[t].iter().filter(|(b, _)| b == a).all(|(_, t2)| self.levels[prev][*s2] != self.levels[prev][*t2])
            });
            match witness.cloned() {
                Some((a, s2)) => {
                    let targets: Vec<usize> =
                        self.u.succ[t].iter().filter(|(b, _)| *b == a).map(|(_, t2)| *t2).collect();
                    let mut parts: Vec<Formula> = Vec::new();
                    for t2 in targets {
                        let g = self.dist(s2, t2);
                        if !parts.contains(&g) {
                            parts.push(g);
                        }
                    }
                    let body = if parts.len() == 1 { parts.pop().expect("one part") } else { Formula::And(parts) };
                    Formula::Diamond(a, Box::new(if body == Formula::And(vec![]) { Formula::True } else { body }))
                }
                None => Formula::Not(Box::new(self.dist(t, s))),
            }
        };
        self.memo.insert((s, t), f.clone());
        f
    }
}

/// A formula satisfied by the initial state of `a` and not by that of `b`,
/// or `None` when the systems are strongly bisimilar.
pub fn strong_distinguishing_formula(a: &Lts, b: &Lts) -> Option<Formula> {
    let u = Union::new(a, b);
    let levels = u.levels();
    let (s, t) = (a.initial(), a.num_states() + b.initial());
    let mut search = Search { u: &u, levels, memo: HashMap::new() };
    search.split_level(s, t)?;
    Some(search.dist(s, t))
}
