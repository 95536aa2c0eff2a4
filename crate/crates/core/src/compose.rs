//! Communication functions and the operators that build transition systems
//! out of smaller ones.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{ComposeError, SyntaxError};
use crate::lts::{check_label, tokens, Action, Lts, StateId, Transition};

/// Partial symmetric map from pairs of visible labels to the label of their
/// synchronisation. Keys are stored as ordered pairs with the smaller label first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommFn {
    table: BTreeMap<(String, String), String>,
}

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl CommFn {
    pub fn new() -> Self {
        CommFn::default()
    }

    pub fn insert(&mut self, a: &str, b: &str, c: &str) -> Result<(), ComposeError> {
        for l in [a, b, c] {
            check_label(l)?;
        }
        let k = key(a, b);
        match self.table.get(&k) {
            Some(old) if old != c => Err(ComposeError::ConflictingComm(a.to_string(), b.to_string())),
            _ => {
                self.table.insert(k, c.to_string());
                Ok(())
            }
        }
    }

    pub fn get(&self, a: &str, b: &str) -> Option<&str> {
        self.table.get(&key(a, b)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.table.iter().map(|((a, b), c)| (a.as_str(), b.as_str(), c.as_str()))
    }

    /// `s_i(d) | r_i(d) = c_i(d)` for every port and datum.
    pub fn handshaking<D, P>(data: D, ports: P) -> CommFn
    where
        D: IntoIterator,
        D::Item: fmt::Display,
        P: IntoIterator,
        P::Item: fmt::Display,
        P::IntoIter: Clone,
    {
        let ports = ports.into_iter();
        let mut g = CommFn::new();
        for d in data {
            for i in ports.clone() {
                g.insert(&format!("s{i}({d})"), &format!("r{i}({d})"), &format!("c{i}({d})"))
                    .expect("handshaking labels are well formed");
            }
        }
        g
    }

    /// Every triple breaking the associativity closure, as readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut partners: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
        for ((a, b), c) in &self.table {
            partners.entry(a).or_default().push((b, c));
            if a != b {
                partners.entry(b).or_default().push((a, c));
            }
        }
        let mut report = Vec::new();
        for (&a, list) in &partners {
            for &(b, ab) in list {
                let Some(next) = partners.get(ab) else { continue };
                for &(c, abc) in next {
                    match self.get(b, c) {
                        None => report.push(format!(
                            "({a}|{b})|{c} = {abc} but {b}|{c} is undefined"
                        )),
                        Some(bc) => match self.get(a, bc) {
                            Some(abc2) if abc2 == abc => {}
                            Some(abc2) => report.push(format!(
                                "({a}|{b})|{c} = {abc} but {a}|({b}|{c}) = {abc2}"
                            )),
                            None => report.push(format!(
                                "({a}|{b})|{c} = {abc} but {a}|{bc} is undefined"
                            )),
                        },
                    }
                }
            }
        }
        report.sort();
        report.dedup();
        report
    }

    pub fn validate(&self) -> Result<(), ComposeError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ComposeError::InvalidComm(v.join("; ")))
        }
    }

    pub fn to_text(&self) -> String {
        self.entries().map(|(a, b, c)| format!("comm {a} {b} -> {c}\n")).collect()
    }

    pub fn parse_text(text: &str) -> Result<CommFn, ComposeError> {
        let mut g = CommFn::new();
        for (no, raw) in text.lines().enumerate() {
            let toks = tokens(raw);
            if toks.is_empty() {
                continue;
            }
            let words: Vec<&str> = toks.iter().map(|&(_, t)| t).collect();
            if words.len() != 5 || words[0] != "comm" || words[3] != "->" {
                return Err(SyntaxError::new(no + 1, toks[0].0, "expected `comm <a> <b> -> <c>`").into());
            }
            g.insert(words[1], words[2], words[4]).map_err(|e| match e {
                ComposeError::Lts(_) => SyntaxError::new(no + 1, toks[1].0, "invalid label").into(),
                other => other,
            })?;
        }
        Ok(g)
    }
}

pub fn atomic(a: Action) -> Lts {
    let alphabet = a.name().map(|n| BTreeSet::from([n.to_string()])).unwrap_or_default();
    Lts::new(
        "atomic",
        vec!["0".into(), "1".into()],
        alphabet,
        [Transition { src: 0, action: a, dst: 1 }],
        BTreeSet::from([1]),
        0,
    )
    .expect("atomic system")
}

pub fn delta() -> Lts {
    Lts::new("delta", vec!["0".into()], BTreeSet::new(), [], BTreeSet::new(), 0).expect("inactive system")
}

/// State names for the two operands: kept as they are when disjoint, prefixed otherwise.
fn disjoint_names(a: &Lts, b: &Lts) -> (Vec<String>, Vec<String>) {
    let left: BTreeSet<&String> = a.states().iter().collect();
    if b.states().iter().any(|s| left.contains(s)) {
        (
            a.states().iter().map(|s| format!("l.{s}")).collect(),
            b.states().iter().map(|s| format!("r.{s}")).collect(),
        )
    } else {
        (a.states().to_vec(), b.states().to_vec())
    }
}

fn fresh_root(a: &Lts, b: &Lts, taken: &[String]) -> String {
    let mut h = DefaultHasher::new();
    a.to_text().hash(&mut h);
    b.to_text().hash(&mut h);
    let mut name = format!("root#{:016x}", h.finish());
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Collects states by name and produces a system restricted to what the initial
/// state reaches; the alphabet is passed through unchanged.
struct Assembly {
    names: Vec<String>,
    index: HashMap<String, StateId>,
    transitions: Vec<Transition>,
    terminating: BTreeSet<StateId>,
}

impl Assembly {
    fn new() -> Self {
        Assembly { names: Vec::new(), index: HashMap::new(), transitions: Vec::new(), terminating: BTreeSet::new() }
    }

    fn id(&mut self, name: &str) -> StateId {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    fn edge(&mut self, src: &str, action: &Action, dst: &str) {
        let s = self.id(src);
        let d = self.id(dst);
        self.transitions.push(Transition { src: s, action: action.clone(), dst: d });
    }

    fn finish(self, name: &str, alphabet: BTreeSet<String>, initial: &str) -> Lts {
        let init = self.index[initial];
        Lts::new(name, self.names, alphabet, self.transitions, self.terminating, init)
            .expect("assembled system")
            .reachable_part()
    }
}

pub fn parallel(a: &Lts, b: &Lts, g: &CommFn) -> Result<Lts, ComposeError> {
    g.validate()?;
    let mut alphabet: BTreeSet<String> = a.alphabet().union(b.alphabet()).cloned().collect();
    for x in a.alphabet() {
        for y in b.alphabet() {
            if let Some(c) = g.get(x, y) {
                alphabet.insert(c.to_string());
            }
        }
    }
    // Explore the product from the initial pair only.
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(a.initial(), b.initial())];
    index.insert(pairs[0], 0);
    let mut transitions = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (s, t) = pairs[i];
        let mut moves: Vec<(Action, (StateId, StateId))> = Vec::new();
        for x in a.outgoing(s) {
            moves.push((x.action.clone(), (x.dst, t)));
        }
        for y in b.outgoing(t) {
            moves.push((y.action.clone(), (s, y.dst)));
        }
        for x in a.outgoing(s) {
            let Action::Visible(la) = &x.action else { continue };
            for y in b.outgoing(t) {
                let Action::Visible(lb) = &y.action else { continue };
                if let Some(c) = g.get(la, lb) {
                    moves.push((Action::visible(c), (x.dst, y.dst)));
                }
            }
        }
        for (act, pair) in moves {
            let next = *index.entry(pair).or_insert_with(|| {
                pairs.push(pair);
                pairs.len() - 1
            });
            transitions.push(Transition { src: i, action: act, dst: next });
        }
        i += 1;
    }
    let names = pairs.iter().map(|&(s, t)| format!("({},{})", a.state_name(s), b.state_name(t))).collect();
    let terminating = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(s, t))| a.is_terminating(s) && b.is_terminating(t))
        .map(|(k, _)| k)
        .collect();
    Ok(Lts::new("par", names, alphabet, transitions, terminating, 0)?)
}

/// Left-nested parallel composition of several systems.
pub fn parallel_all(parts: &[Lts], g: &CommFn) -> Result<Lts, ComposeError> {
    let mut it = parts.iter();
    let first = it.next().cloned().unwrap_or_else(delta);
    it.try_fold(first, |acc, l| parallel(&acc, l, g))
}

fn reject_tau(set: &BTreeSet<String>) -> Result<(), ComposeError> {
    if set.contains("tau") {
        Err(ComposeError::TauInSet)
    } else {
        Ok(())
    }
}

pub fn encap(h: &BTreeSet<String>, l: &Lts) -> Result<Lts, ComposeError> {
    reject_tau(h)?;
    let kept = l.transitions().iter().filter(|t| t.action.name().is_none_or(|n| !h.contains(n))).cloned();
    let alphabet = l.alphabet().difference(h).cloned().collect();
    let pruned = Lts::new(l.name(), l.states().to_vec(), alphabet, kept, l.terminating().clone(), l.initial())?;
    Ok(pruned.reduct())
}

pub fn hide(i: &BTreeSet<String>, l: &Lts) -> Result<Lts, ComposeError> {
    reject_tau(i)?;
    let relabelled = l.transitions().iter().map(|t| match &t.action {
        Action::Visible(n) if i.contains(n) => Transition { src: t.src, action: Action::Tau, dst: t.dst },
        _ => t.clone(),
    });
    let alphabet = l.alphabet().difference(i).cloned().collect();
    Ok(Lts::new(l.name(), l.states().to_vec(), alphabet, relabelled, l.terminating().clone(), l.initial())?)
}

pub fn alt(a: &Lts, b: &Lts) -> Lts {
    let (na, nb) = disjoint_names(a, b);
    let all: Vec<String> = na.iter().chain(nb.iter()).cloned().collect();
    let root = fresh_root(a, b, &all);
    let mut asm = Assembly::new();
    asm.id(&root);
    for (l, names) in [(a, &na), (b, &nb)] {
        for t in l.transitions() {
            if t.src == l.initial() {
                asm.edge(&root, &t.action, &names[t.dst]);
            }
            asm.edge(&names[t.src], &t.action, &names[t.dst]);
        }
        for &s in l.terminating() {
            let id = asm.id(&names[s]);
            asm.terminating.insert(id);
        }
    }
    let alphabet = a.alphabet().union(b.alphabet()).cloned().collect();
    asm.finish("alt", alphabet, &root)
}

pub fn seq(a: &Lts, b: &Lts) -> Lts {
    let (na, nb) = disjoint_names(a, b);
    let mut asm = Assembly::new();
    asm.id(&na[a.initial()]);
    let entry = &nb[b.initial()];
    for t in a.transitions() {
        let dst = if a.is_terminating(t.dst) { entry } else { &na[t.dst] };
        asm.edge(&na[t.src], &t.action, dst);
    }
    for t in b.transitions() {
        asm.edge(&nb[t.src], &t.action, &nb[t.dst]);
    }
    for &s in b.terminating() {
        let id = asm.id(&nb[s]);
        asm.terminating.insert(id);
    }
    asm.id(entry);
    let alphabet = a.alphabet().union(b.alphabet()).cloned().collect();
    asm.finish("seq", alphabet, &na[a.initial()])
}

/// Iteration of `a` with exit `b`.
pub fn star(a: &Lts, b: &Lts) -> Lts {
    let (na, nb) = disjoint_names(a, b);
    let all: Vec<String> = na.iter().chain(nb.iter()).cloned().collect();
    let root = fresh_root(a, b, &all);
    let mut asm = Assembly::new();
    asm.id(&root);
    for t in a.transitions() {
        let dst = if a.is_terminating(t.dst) { &root } else { &na[t.dst] };
        if t.src == a.initial() {
            asm.edge(&root, &t.action, dst);
        }
        asm.edge(&na[t.src], &t.action, dst);
    }
    for t in b.transitions() {
        if t.src == b.initial() {
            asm.edge(&root, &t.action, &nb[t.dst]);
        }
        asm.edge(&nb[t.src], &t.action, &nb[t.dst]);
    }
    for &s in b.terminating() {
        let id = asm.id(&nb[s]);
        asm.terminating.insert(id);
    }
    let alphabet = a.alphabet().union(b.alphabet()).cloned().collect();
    asm.finish("star", alphabet, &root)
}

pub fn omega(a: &Lts) -> Lts {
    star(a, &delta()).with_name("omega")
}

pub fn label_set<I, S>(labels: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    labels.into_iter().map(Into::into).collect()
}
