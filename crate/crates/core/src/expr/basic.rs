//! Expansion of star-free closed terms into basic terms (atoms, `tau`,
//! `delta`, `+` and `.`) by left-to-right use of the merge, communication,
//! encapsulation and abstraction axioms.
//!
//! Terms are kept as sums of summands `a` or `a . t`, with the empty sum for
//! `delta`; this representation builds in A1-A3 and A5-A7. Every recursive call
//! is on a strictly smaller operand or, for `x' || y`, on a pair whose combined
//! size is below that of the pair being merged, so the expansion terminates.

use std::collections::BTreeSet;

use super::ProcExpr::{self, *};
use crate::compose::CommFn;
use crate::error::ExprError;
use crate::lts::Action;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Summand {
    Prefix(Action, Sum),
    Act(Action),
}

type Sum = BTreeSet<Summand>;

fn size(s: &Sum) -> usize {
    s.iter()
        .map(|m| match m {
            Summand::Act(_) => 1,
            Summand::Prefix(_, t) => 1 + size(t),
        })
        .sum()
}

fn expand(p: &ProcExpr, g: &CommFn) -> Result<Sum, ExprError> {
    Ok(match p {
        Var(x) => return Err(ExprError::Open(x.clone())),
        Star(..) | Omega(..) => return Err(ExprError::StarUnsupported),
        Atom(a) => BTreeSet::from([Summand::Act(Action::visible(a.clone()))]),
        Tau => BTreeSet::from([Summand::Act(Action::Tau)]),
        Delta => BTreeSet::new(),
        Alt(x, y) => {
            let mut s = expand(x, g)?;
            s.extend(expand(y, g)?);
            s
        }
        Seq(x, y) => seq(&expand(x, g)?, &expand(y, g)?),
        Par(x, y) => merge(&expand(x, g)?, &expand(y, g)?, g),
        LeftMerge(x, y) => left_merge(&expand(x, g)?, &expand(y, g)?, g),
        CommMerge(x, y) => comm_merge(&expand(x, g)?, &expand(y, g)?, g),
        Encap(h, x) => encap(h, &expand(x, g)?),
        Hide(i, x) => hide(i, &expand(x, g)?),
    })
}

/// A4, A5, A7.
fn seq(x: &Sum, y: &Sum) -> Sum {
    x.iter()
        .map(|m| match m {
            Summand::Act(a) => Summand::Prefix(a.clone(), y.clone()),
            Summand::Prefix(a, t) => Summand::Prefix(a.clone(), seq(t, y)),
        })
        .collect()
}

/// CM1.
fn merge(x: &Sum, y: &Sum, g: &CommFn) -> Sum {
    let mut s = left_merge(x, y, g);
    s.extend(left_merge(y, x, g));
    s.extend(comm_merge(x, y, g));
    s
}

/// CM2-CM4.
fn left_merge(x: &Sum, y: &Sum, g: &CommFn) -> Sum {
    x.iter()
        .map(|m| match m {
            Summand::Act(a) => Summand::Prefix(a.clone(), y.clone()),
            Summand::Prefix(a, t) => {
                debug_assert!(size(t) + size(y) < size(x) + size(y));
                Summand::Prefix(a.clone(), merge(t, y, g))
            }
        })
        .collect()
}

/// CF1-CF2, CM5-CM9.
fn comm_merge(x: &Sum, y: &Sum, g: &CommFn) -> Sum {
    let mut s = Sum::new();
    for m in x {
        for n in y {
            let (a, rest_a) = split(m);
            let (b, rest_b) = split(n);
            let (Some(an), Some(bn)) = (a.name(), b.name()) else { continue };
            let Some(c) = g.get(an, bn) else { continue };
            let c = Action::visible(c);
            s.insert(match (rest_a, rest_b) {
                (None, None) => Summand::Act(c),
                (Some(t), None) | (None, Some(t)) => Summand::Prefix(c, t.clone()),
                (Some(t), Some(u)) => Summand::Prefix(c, merge(t, u, g)),
            });
        }
    }
    s
}

fn split(m: &Summand) -> (&Action, Option<&Sum>) {
    match m {
        Summand::Act(a) => (a, None),
        Summand::Prefix(a, t) => (a, Some(t)),
    }
}

/// D1-D4.
fn encap(h: &BTreeSet<String>, x: &Sum) -> Sum {
    x.iter()
        .filter(|m| split(m).0.name().is_none_or(|n| !h.contains(n)))
        .map(|m| match m {
            Summand::Act(a) => Summand::Act(a.clone()),
            Summand::Prefix(a, t) => Summand::Prefix(a.clone(), encap(h, t)),
        })
        .collect()
}

/// TI1-TI4.
fn hide(i: &BTreeSet<String>, x: &Sum) -> Sum {
    let rename = |a: &Action| match a.name() {
        Some(n) if i.contains(n) => Action::Tau,
        _ => a.clone(),
    };
    x.iter()
        .map(|m| match m {
            Summand::Act(a) => Summand::Act(rename(a)),
            Summand::Prefix(a, t) => Summand::Prefix(rename(a), hide(i, t)),
        })
        .collect()
}

fn to_expr(s: &Sum) -> ProcExpr {
    let atom = |a: &Action| match a {
        Action::Tau => Tau,
        Action::Visible(n) => Atom(n.clone()),
    };
    ProcExpr::sum(s.iter().map(|m| match m {
        Summand::Act(a) => atom(a),
        Summand::Prefix(a, t) => ProcExpr::seq(atom(a), to_expr(t)),
    }))
}

pub fn expand_to_basic(p: &ProcExpr, g: &CommFn) -> Result<ProcExpr, ExprError> {
    Ok(to_expr(&expand(p, g)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::rooted_branching_bisim;
    use crate::expr::{parse_expr, sos_lts};

    fn basic(src: &str, g: &CommFn) -> ProcExpr {
        expand_to_basic(&parse_expr(src).unwrap(), g).unwrap()
    }

    #[test]
    fn handshake_expansion() {
        let g = CommFn::handshaking([0], [1]);
        let got = basic("s1(0) || r1(0)", &g).normalize();
        let want = parse_expr("s1(0) . r1(0) + r1(0) . s1(0) + c1(0)").unwrap().normalize();
        assert_eq!(got, want);
    }

    #[test]
    fn encapsulation_and_abstraction() {
        let g = CommFn::new();
        assert_eq!(basic("encap({a}, a . b)", &g), Delta);
        assert_eq!(basic("hide({a}, a . b)", &g), parse_expr("tau . b").unwrap());
    }

    #[test]
    fn star_is_refused() {
        assert_eq!(expand_to_basic(&parse_expr("a * b").unwrap(), &CommFn::new()), Err(ExprError::StarUnsupported));
    }

    #[test]
    fn expansion_preserves_meaning() {
        let g = CommFn::handshaking([0, 1], [1, 2]);
        for src in ["(s1(0) + a) . b || r1(0) . c", "encap({s1(0), r1(0)}, s1(0) || r1(0) . tau)",
            "hide({c1(0)}, s1(0) . s2(1) || r1(0) . r2(1))", "a || b || c"] {
            let p = parse_expr(src).unwrap();
            let b = expand_to_basic(&p, &g).unwrap();
            let structural = |e: &ProcExpr| format!("{e:?}");
            assert!(!structural(&b).contains("Par") && !structural(&b).contains("Encap"));
            let l = sos_lts(&p, &g, 10_000).unwrap().lts;
            let r = sos_lts(&b, &g, 10_000).unwrap().lts;
            assert!(rooted_branching_bisim(&l, &r).equivalent, "{src}");
        }
    }
}
