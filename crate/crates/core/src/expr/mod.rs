//! Process expressions: syntax, operational and denotational meaning, and
//! axiom-driven expansion.

mod basic;
pub mod laws;
mod parse;
pub(crate) mod sos;

use std::collections::BTreeSet;
use std::fmt;

pub use basic::expand_to_basic;
pub use laws::check_law;
pub use parse::{parse_expr, parse_label_set, Parser, Tok};
pub use sos::{eval_denotational, sos_lts, sos_step, SosResult, SosState};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcExpr {
    Var(String),
    Atom(String),
    Tau,
    Delta,
    Alt(Box<ProcExpr>, Box<ProcExpr>),
    Seq(Box<ProcExpr>, Box<ProcExpr>),
    Par(Box<ProcExpr>, Box<ProcExpr>),
    LeftMerge(Box<ProcExpr>, Box<ProcExpr>),
    CommMerge(Box<ProcExpr>, Box<ProcExpr>),
    Star(Box<ProcExpr>, Box<ProcExpr>),
    Omega(Box<ProcExpr>),
    Encap(BTreeSet<String>, Box<ProcExpr>),
    Hide(BTreeSet<String>, Box<ProcExpr>),
}

use ProcExpr::*;

pub fn atom(a: &str) -> ProcExpr {
    Atom(a.to_string())
}

pub fn var(x: &str) -> ProcExpr {
    Var(x.to_string())
}

impl ProcExpr {
    pub fn alt(l: ProcExpr, r: ProcExpr) -> ProcExpr {
        Alt(Box::new(l), Box::new(r))
    }
    pub fn seq(l: ProcExpr, r: ProcExpr) -> ProcExpr {
        Seq(Box::new(l), Box::new(r))
    }
    pub fn par(l: ProcExpr, r: ProcExpr) -> ProcExpr {
        Par(Box::new(l), Box::new(r))
    }
    pub fn left_merge(l: ProcExpr, r: ProcExpr) -> ProcExpr {
        LeftMerge(Box::new(l), Box::new(r))
    }
    pub fn comm_merge(l: ProcExpr, r: ProcExpr) -> ProcExpr {
        CommMerge(Box::new(l), Box::new(r))
    }
    pub fn star(l: ProcExpr, r: ProcExpr) -> ProcExpr {
        Star(Box::new(l), Box::new(r))
    }
    pub fn omega(x: ProcExpr) -> ProcExpr {
        Omega(Box::new(x))
    }
    pub fn encap(h: BTreeSet<String>, x: ProcExpr) -> ProcExpr {
        Encap(h, Box::new(x))
    }
    pub fn hide(i: BTreeSet<String>, x: ProcExpr) -> ProcExpr {
        Hide(i, Box::new(x))
    }

    /// Sum of the given terms, `delta` when empty.
    pub fn sum(terms: impl IntoIterator<Item = ProcExpr>) -> ProcExpr {
        terms.into_iter().reduce(ProcExpr::alt).unwrap_or(Delta)
    }

    /// Left-nested sequential composition; panics on an empty list.
    pub fn chain(terms: impl IntoIterator<Item = ProcExpr>) -> ProcExpr {
        terms.into_iter().reduce(ProcExpr::seq).expect("non-empty chain")
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Var(x) => {
                out.insert(x.clone());
            }
            Atom(_) | Tau | Delta => {}
            Alt(l, r) | Seq(l, r) | Par(l, r) | LeftMerge(l, r) | CommMerge(l, r) | Star(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Omega(x) | Encap(_, x) | Hide(_, x) => x.collect_vars(out),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn size(&self) -> usize {
        match self {
            Var(_) | Atom(_) | Tau | Delta => 1,
            Alt(l, r) | Seq(l, r) | Par(l, r) | LeftMerge(l, r) | CommMerge(l, r) | Star(l, r) => {
                1 + l.size() + r.size()
            }
            Omega(x) | Encap(_, x) | Hide(_, x) => 1 + x.size(),
        }
    }

    /// Replaces variables by the bound terms; unbound variables stay.
    pub fn substitute(&self, bind: &dyn Fn(&str) -> Option<ProcExpr>) -> ProcExpr {
        let go = |e: &ProcExpr| Box::new(e.substitute(bind));
        match self {
            Var(x) => bind(x).unwrap_or_else(|| self.clone()),
            Atom(_) | Tau | Delta => self.clone(),
            Alt(l, r) => Alt(go(l), go(r)),
            Seq(l, r) => Seq(go(l), go(r)),
            Par(l, r) => Par(go(l), go(r)),
            LeftMerge(l, r) => LeftMerge(go(l), go(r)),
            CommMerge(l, r) => CommMerge(go(l), go(r)),
            Star(l, r) => Star(go(l), go(r)),
            Omega(x) => Omega(go(x)),
            Encap(h, x) => Encap(h.clone(), go(x)),
            Hide(i, x) => Hide(i.clone(), go(x)),
        }
    }

    /// Canonical form modulo associativity of `+` and `.`, commutativity and
    /// idempotence of `+`: sums are flattened, sorted and deduplicated, products
    /// nested to the right.
    pub fn normalize(&self) -> ProcExpr {
        match self {
            Alt(..) => {
                let mut parts = Vec::new();
                self.flatten_alt(&mut parts);
                let set: BTreeSet<ProcExpr> = parts.into_iter().collect();
                set.into_iter().reduce(ProcExpr::alt).expect("non-empty sum")
            }
            Seq(..) => {
                let mut parts = Vec::new();
                self.flatten_seq(&mut parts);
                parts.into_iter().rev().reduce(|acc, t| ProcExpr::seq(t, acc)).expect("non-empty product")
            }
            Var(_) | Atom(_) | Tau | Delta => self.clone(),
            Par(l, r) => ProcExpr::par(l.normalize(), r.normalize()),
            LeftMerge(l, r) => ProcExpr::left_merge(l.normalize(), r.normalize()),
            CommMerge(l, r) => ProcExpr::comm_merge(l.normalize(), r.normalize()),
            Star(l, r) => ProcExpr::star(l.normalize(), r.normalize()),
            Omega(x) => ProcExpr::omega(x.normalize()),
            Encap(h, x) => ProcExpr::encap(h.clone(), x.normalize()),
            Hide(i, x) => ProcExpr::hide(i.clone(), x.normalize()),
        }
    }

    fn flatten_alt(&self, out: &mut Vec<ProcExpr>) {
        match self {
            Alt(l, r) => {
                l.flatten_alt(out);
                r.flatten_alt(out);
            }
            other => out.push(other.normalize()),
        }
    }

    fn flatten_seq(&self, out: &mut Vec<ProcExpr>) {
        match self {
            Seq(l, r) => {
                l.flatten_seq(out);
                r.flatten_seq(out);
            }
            other => out.push(other.normalize()),
        }
    }

    /// Text without any whitespace, used for state names.
    pub fn compact(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0, false);
        s
    }

    fn level(&self) -> u8 {
        match self {
            Alt(..) => 1,
            Par(..) | Star(..) | LeftMerge(..) | CommMerge(..) => 2,
            Seq(..) => 3,
            Omega(..) => 4,
            _ => 5,
        }
    }

    fn write(&self, out: &mut String, min: u8, spaced: bool) {
        let paren = self.level() < min;
        if paren {
            out.push('(');
        }
        let op = |out: &mut String, sym: &str| {
            if spaced {
                out.push(' ');
                out.push_str(sym);
                out.push(' ');
            } else {
                out.push_str(sym);
            }
        };
        let set = |out: &mut String, s: &BTreeSet<String>| {
            out.push('{');
            let sep = if spaced { ", " } else { "," };
            out.push_str(&s.iter().cloned().collect::<Vec<_>>().join(sep));
            out.push('}');
        };
        match self {
            Var(x) | Atom(x) => out.push_str(x),
            Tau => out.push_str("tau"),
            Delta => out.push_str("delta"),
            Alt(l, r) => {
                l.write(out, 1, spaced);
                op(out, "+");
                r.write(out, 2, spaced);
            }
            Seq(l, r) => {
                l.write(out, 3, spaced);
                op(out, ".");
                r.write(out, 4, spaced);
            }
            Par(l, r) => {
                // `||` chains associate to the left; any other level-2 operand is bracketed.
                if matches!(**l, Par(..)) {
                    l.write(out, 2, spaced);
                } else {
                    l.write(out, 3, spaced);
                }
                op(out, "||");
                r.write(out, 3, spaced);
            }
            Star(l, r) => {
                if matches!(**l, Star(..)) {
                    l.write(out, 2, spaced);
                } else {
                    l.write(out, 3, spaced);
                }
                op(out, "*");
                r.write(out, 3, spaced);
            }
            LeftMerge(l, r) | CommMerge(l, r) => {
                out.push_str(if matches!(self, LeftMerge(..)) { "lmerge(" } else { "cmerge(" });
                l.write(out, 0, spaced);
                out.push_str(if spaced { ", " } else { "," });
                r.write(out, 0, spaced);
                out.push(')');
            }
            Omega(x) => {
                x.write(out, 5, spaced);
                out.push_str("^omega");
            }
            Encap(h, x) | Hide(h, x) => {
                out.push_str(if matches!(self, Encap(..)) { "encap(" } else { "hide(" });
                set(out, h);
                out.push_str(if spaced { ", " } else { "," });
                x.write(out, 0, spaced);
                out.push(')');
            }
        }
        if paren {
            out.push(')');
        }
    }
}

impl fmt::Display for ProcExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, 0, true);
        f.write_str(&s)
    }
}

pub fn print_expr(p: &ProcExpr) -> String {
    p.to_string()
}
