//! Place/transition nets with arc weight 1, their token game, associated
//! transition systems, and net-level composition.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::compose::CommFn;
use crate::equiv::{branching_bisim, EquivResult};
use crate::error::{ComposeError, NetError, SyntaxError};
use crate::lts::{check_label, tokens, Action, Lts, Transition};

/// Default marking budget for operations that must see the whole state space.
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetTransition {
    pub pre: BTreeSet<String>,
    pub label: Action,
    pub post: BTreeSet<String>,
}

/// Multiset of places; zero counts are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(BTreeMap<String, u32>);

impl Marking {
    pub fn from_set<I: IntoIterator<Item = S>, S: Into<String>>(places: I) -> Marking {
        Marking(places.into_iter().map(|p| (p.into(), 1)).collect())
    }

    pub fn count(&self, p: &str) -> u32 {
        self.0.get(p).copied().unwrap_or(0)
    }

    pub fn add(&mut self, p: &str, n: u32) {
        if n > 0 {
            *self.0.entry(p.to_string()).or_insert(0) += n;
        }
    }

    pub fn places(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(p, &n)| (p.as_str(), n))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    /// True when every place holds at most one token.
    pub fn is_set(&self) -> bool {
        self.0.values().all(|&n| n <= 1)
    }

    /// `{p,q}`, with `p^n` for a place holding n > 1 tokens.
    pub fn name(&self) -> String {
        let parts: Vec<String> =
            self.0.iter().map(|(p, &n)| if n == 1 { p.clone() } else { format!("{p}^{n}") }).collect();
        format!("{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    name: String,
    places: BTreeSet<String>,
    alphabet: BTreeSet<String>,
    transitions: Vec<NetTransition>,
    initial: Marking,
}

impl Net {
    pub fn new(
        name: impl Into<String>,
        places: impl IntoIterator<Item = String>,
        alphabet: impl IntoIterator<Item = String>,
        transitions: impl IntoIterator<Item = NetTransition>,
        initial: Marking,
    ) -> Result<Net, NetError> {
        let places: BTreeSet<String> = places.into_iter().collect();
        let mut transitions: Vec<NetTransition> = transitions.into_iter().collect();
        transitions.sort();
        transitions.dedup();
        for (i, t) in transitions.iter().enumerate() {
            if t.pre.is_empty() || t.post.is_empty() {
                return Err(NetError::EmptyArcSet(i));
            }
            if let Some(p) = t.pre.iter().chain(&t.post).find(|p| !places.contains(*p)) {
                return Err(NetError::UnknownPlace(p.clone()));
            }
        }
        if initial.is_empty() {
            return Err(NetError::EmptyMarking);
        }
        if let Some((p, _)) = initial.places().find(|(p, _)| !places.contains(*p)) {
            return Err(NetError::UnknownPlace(p.to_string()));
        }
        let mut alphabet: BTreeSet<String> = alphabet.into_iter().collect();
        alphabet.extend(transitions.iter().filter_map(|t| t.label.name().map(str::to_string)));
        Ok(Net { name: name.into(), places, alphabet, transitions, initial })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Net {
        self.name = name.into();
        self
    }

    pub fn places(&self) -> &BTreeSet<String> {
        &self.places
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[NetTransition] {
        &self.transitions
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    /// Indices of the transitions enabled in `m`.
    pub fn enabled(&self, m: &Marking) -> Vec<usize> {
        (0..self.transitions.len()).filter(|&i| self.transitions[i].pre.iter().all(|p| m.count(p) > 0)).collect()
    }

    pub fn fire(&self, m: &Marking, t: usize) -> Result<Marking, NetError> {
        let tr = self.transitions.get(t).ok_or(NetError::NotEnabled(t))?;
        if !tr.pre.iter().all(|p| m.count(p) > 0) {
            return Err(NetError::NotEnabled(t));
        }
        let mut next = m.clone();
        for p in &tr.pre {
            let c = next.0.get_mut(p).expect("enabled");
            *c -= 1;
            if *c == 0 {
                next.0.remove(p);
            }
        }
        for p in &tr.post {
            next.add(p, 1);
        }
        Ok(next)
    }

    /// Breadth-first token game restricted to transitions accepted by `keep`.
    fn explore(&self, budget: usize, keep: &dyn Fn(&NetTransition) -> bool) -> Exploration {
        let mut index: HashMap<Marking, usize> = HashMap::from([(self.initial.clone(), 0)]);
        let mut markings = vec![self.initial.clone()];
        let mut edges = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        let mut complete = true;
        while let Some(i) = queue.pop_front() {
            let m = markings[i].clone();
            let mut succ: Vec<(Action, Marking)> = self
                .enabled(&m)
                .into_iter()
                .filter(|&t| keep(&self.transitions[t]))
                .map(|t| (self.transitions[t].label.clone(), self.fire(&m, t).expect("enabled")))
                .collect();
            succ.sort();
            succ.dedup();
            for (a, m2) in succ {
                let j = match index.get(&m2) {
                    Some(&j) => j,
                    None => {
                        if markings.len() >= budget {
                            complete = false;
                            continue;
                        }
                        let j = markings.len();
                        index.insert(m2.clone(), j);
                        markings.push(m2);
                        queue.push_back(j);
                        j
                    }
                };
                edges.push(Transition { src: i, action: a, dst: j });
            }
        }
        Exploration { markings, edges, complete }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("net {}\n", self.name);
        for p in &self.places {
            let _ = writeln!(out, "place {p}");
        }
        for (p, n) in self.initial.places() {
            if n == 1 {
                let _ = writeln!(out, "init {p}");
            } else {
                let _ = writeln!(out, "init {p} {n}");
            }
        }
        for a in &self.alphabet {
            let _ = writeln!(out, "act {a}");
        }
        let set = |s: &BTreeSet<String>| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","));
        for t in &self.transitions {
            let _ = writeln!(out, "tr {} {} {}", set(&t.pre), t.label, set(&t.post));
        }
        out
    }

    /// Format: `net <name>`, `place <p>`, `init <p> [count]`, `act <label>`,
    /// `tr {p,q} <label|tau> {r}`; `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Net, NetError> {
        let mut name = None;
        let mut places = BTreeSet::new();
        let mut initial = Marking::default();
        let mut alphabet = BTreeSet::new();
        let mut transitions = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let toks = tokens(raw);
            let Some(&(col, head)) = toks.first() else { continue };
            let err = |c: usize, m: &str| NetError::Syntax(SyntaxError::new(line, c, m));
            let args: Vec<&str> = toks[1..].iter().map(|&(_, t)| t).collect();
            match head {
                "net" if args.len() == 1 && name.is_none() => name = Some(args[0].to_string()),
                "place" if args.len() == 1 => {
                    places.insert(args[0].to_string());
                }
                "init" if args.len() == 1 || args.len() == 2 => {
                    let n = match args.get(1) {
                        None => 1,
                        Some(c) => c.parse::<u32>().map_err(|_| err(toks[2].0, "expected a token count"))?,
                    };
                    initial.add(args[0], n);
                }
                "act" if args.len() == 1 => {
                    check_label(args[0]).map_err(|_| err(toks[1].0, "invalid label"))?;
                    alphabet.insert(args[0].to_string());
                }
                "tr" => {
                    let rest = toks[1..].iter().map(|&(_, t)| t).collect::<Vec<_>>().join(" ");
                    let start = toks.get(1).map_or(col, |t| t.0);
                    let (pre, after) = place_set(&rest).ok_or_else(|| err(start, "expected `{places}`"))?;
                    let mut parts = after.trim_start().splitn(2, char::is_whitespace);
                    let label = parts.next().unwrap_or("");
                    let label = Action::parse(label).map_err(|_| err(start, "invalid transition label"))?;
                    let (post, tail) = place_set(parts.next().unwrap_or("").trim_start())
                        .ok_or_else(|| err(start, "expected `{places}` after the label"))?;
                    if !tail.trim().is_empty() {
                        return Err(err(start, "unexpected text after transition"));
                    }
                    transitions.push(NetTransition { pre, label, post });
                }
                _ => return Err(err(col, &format!("unexpected line starting with `{head}`"))),
            }
        }
        let name = name.ok_or_else(|| NetError::Syntax(SyntaxError::new(1, 1, "missing `net <name>` header")))?;
        Net::new(name, places, alphabet, transitions, initial)
    }

    /// Places as circles holding one dot per token, transitions as boxes.
    pub fn to_dot(&self) -> String {
        let q = |s: &str| format!("\"{}\"", s.replace('"', "\\\""));
        let mut out = format!("digraph {} {{\n", q(&self.name));
        for p in &self.places {
            let dots = "•".repeat(self.initial.count(p) as usize);
            let _ = writeln!(out, "  {} [shape=circle, label={}, xlabel={}];", q(&format!("p:{p}")), q(&dots), q(p));
        }
        for (i, t) in self.transitions.iter().enumerate() {
            let _ = writeln!(out, "  t{i} [shape=box, label={}];", q(&t.label.to_string()));
            for p in &t.pre {
                let _ = writeln!(out, "  {} -> t{i};", q(&format!("p:{p}")));
            }
            for p in &t.post {
                let _ = writeln!(out, "  t{i} -> {};", q(&format!("p:{p}")));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Parses `{a,b(1,2),c}` at the start of `s`; commas inside brackets belong to
/// the place name. Returns the set and the remaining text.
fn place_set(s: &str) -> Option<(BTreeSet<String>, &str)> {
    let s = s.strip_prefix('{')?;
    let mut depth = 0i32;
    let mut set = BTreeSet::new();
    let mut cur = String::new();
    for (i, c) in s.char_indices() {
        match c {
            '(' | '<' | '[' => depth += 1,
            ')' | '>' | ']' => depth -= 1,
            _ => {}
        }
        if depth == 0 && (c == ',' || c == '}') {
            let p = cur.trim().to_string();
            if !p.is_empty() {
                set.insert(p);
            }
            cur.clear();
            if c == '}' {
                return Some((set, &s[i + 1..]));
            }
        } else {
            cur.push(c);
        }
    }
    None
}

struct Exploration {
    markings: Vec<Marking>,
    edges: Vec<Transition>,
    complete: bool,
}

#[derive(Clone, Debug)]
pub struct NetSystem {
    pub lts: Lts,
    pub complete: bool,
}

/// The associated transition system: reachable markings as states, one edge
/// per enabled transition; at most `budget` markings.
pub fn trsy(n: &Net, budget: usize) -> NetSystem {
    let ex = n.explore(budget.max(1), &|_| true);
    let names = ex.markings.iter().map(Marking::name).collect();
    let lts = Lts::new(n.name(), names, n.alphabet.clone(), ex.edges, BTreeSet::new(), 0).expect("marking graph");
    NetSystem { lts, complete: ex.complete }
}

fn tag_places(n: &Net, prefix: &str) -> Net {
    let tag = |s: &BTreeSet<String>| s.iter().map(|p| format!("{prefix}{p}")).collect();
    Net {
        name: n.name.clone(),
        places: tag(&n.places),
        alphabet: n.alphabet.clone(),
        transitions: n
            .transitions
            .iter()
            .map(|t| NetTransition { pre: tag(&t.pre), label: t.label.clone(), post: tag(&t.post) })
            .collect(),
        initial: Marking(n.initial.0.iter().map(|(p, &c)| (format!("{prefix}{p}"), c)).collect()),
    }
}

/// Parallel composition under `g`: both transition sets plus a fused
/// transition for every communicating pair. Overlapping place names are
/// prefixed with `l.` and `r.`.
pub fn par_nets(a: &Net, b: &Net, g: &CommFn) -> Result<Net, NetError> {
    g.validate()?;
    let (a, b) = if a.places.is_disjoint(&b.places) {
        (a.clone(), b.clone())
    } else {
        (tag_places(a, "l."), tag_places(b, "r."))
    };
    let mut alphabet: BTreeSet<String> = a.alphabet.union(&b.alphabet).cloned().collect();
    for x in &a.alphabet {
        for y in &b.alphabet {
            if let Some(c) = g.get(x, y) {
                alphabet.insert(c.to_string());
            }
        }
    }
    let mut transitions: Vec<NetTransition> = a.transitions.iter().chain(&b.transitions).cloned().collect();
    for s in &a.transitions {
        let Some(x) = s.label.name() else { continue };
        for t in &b.transitions {
            let Some(y) = t.label.name() else { continue };
            if let Some(c) = g.get(x, y) {
                transitions.push(NetTransition {
                    pre: s.pre.union(&t.pre).cloned().collect(),
                    label: Action::visible(c),
                    post: s.post.union(&t.post).cloned().collect(),
                });
            }
        }
    }
    let mut initial = a.initial.clone();
    for (p, n) in b.initial.places() {
        initial.add(p, n);
    }
    Net::new("par", a.places.union(&b.places).cloned(), alphabet, transitions, initial)
}

pub fn par_nets_all(parts: &[Net], g: &CommFn) -> Result<Net, NetError> {
    let (first, rest) = parts.split_first().ok_or(NetError::EmptyMarking)?;
    rest.iter().try_fold(first.clone(), |acc, n| par_nets(&acc, n, g))
}

/// Keeps the places marked and the actions performed along runs that avoid
/// `h`, and the non-`h` transitions among them.
pub fn encap_net(h: &BTreeSet<String>, n: &Net) -> Result<Net, NetError> {
    encap_net_within(h, n, DEFAULT_BUDGET)
}

pub fn encap_net_within(h: &BTreeSet<String>, n: &Net, budget: usize) -> Result<Net, NetError> {
    if h.contains("tau") {
        return Err(ComposeError::TauInSet.into());
    }
    let free = |t: &NetTransition| t.label.name().is_none_or(|a| !h.contains(a));
    let ex = n.explore(budget, &free);
    if !ex.complete {
        return Err(NetError::Incomplete(budget));
    }
    let places: BTreeSet<String> =
        ex.markings.iter().flat_map(|m| m.places().map(|(p, _)| p.to_string())).collect();
    let alphabet: BTreeSet<String> = ex.edges.iter().filter_map(|e| e.action.name().map(str::to_string)).collect();
    let transitions: Vec<NetTransition> = n
        .transitions
        .iter()
        .filter(|t| {
            free(t)
                && t.pre.is_subset(&places)
                && t.post.is_subset(&places)
                && t.label.name().is_none_or(|a| alphabet.contains(a))
        })
        .cloned()
        .collect();
    Net::new(n.name(), places, alphabet, transitions, n.initial.clone())
}

/// Relabels the actions in `i` to `tau`.
pub fn hide_net(i: &BTreeSet<String>, n: &Net) -> Result<Net, NetError> {
    if i.contains("tau") {
        return Err(ComposeError::TauInSet.into());
    }
    let transitions = n.transitions.iter().map(|t| NetTransition {
        pre: t.pre.clone(),
        label: match t.label.name() {
            Some(a) if i.contains(a) => Action::Tau,
            _ => t.label.clone(),
        },
        post: t.post.clone(),
    });
    let alphabet = n.alphabet.difference(i).cloned();
    Net::new(n.name(), n.places.clone(), alphabet, transitions, n.initial.clone())
}

/// Branching bisimilarity of the associated transition systems; refused when
/// either state space exceeds `budget` markings.
pub fn net_branching_eq(a: &Net, b: &Net, budget: usize) -> Result<EquivResult, NetError> {
    let sa = trsy(a, budget);
    let sb = trsy(b, budget);
    if !sa.complete || !sb.complete {
        return Err(NetError::Incomplete(budget));
    }
    Ok(branching_bisim(&sa.lts, &sb.lts))
}

/// A transition system as a net: one place per state, singleton presets and
/// postsets. Termination has no counterpart and is dropped.
pub fn lts_to_net(l: &Lts) -> Net {
    let places = l.states().iter().cloned();
    let transitions = l.transitions().iter().map(|t| NetTransition {
        pre: BTreeSet::from([l.state_name(t.src).to_string()]),
        label: t.action.clone(),
        post: BTreeSet::from([l.state_name(t.dst).to_string()]),
    });
    Net::new(
        l.name(),
        places,
        l.alphabet().clone(),
        transitions,
        Marking::from_set([l.state_name(l.initial())]),
    )
    .expect("every state is a place")
}
