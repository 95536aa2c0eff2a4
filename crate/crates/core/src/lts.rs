//! Labelled transition systems with silent steps and successful termination.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{LtsError, SyntaxError};

pub type StateId = usize;

/// A finite sequence of visible labels.
pub type Trace = Vec<String>;

/// Transition label: a visible action name or the silent step.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Tau,
    Visible(String),
}

impl Action {
    pub fn visible(name: impl Into<String>) -> Action {
        Action::Visible(name.into())
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Action::Tau => None,
            Action::Visible(n) => Some(n),
        }
    }

    /// Reads `tau` as the silent step and anything else as a visible label.
    pub fn parse(token: &str) -> Result<Action, LtsError> {
        if token == "tau" {
            return Ok(Action::Tau);
        }
        check_label(token)?;
        Ok(Action::Visible(token.to_string()))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => f.write_str("tau"),
            Action::Visible(n) => f.write_str(n),
        }
    }
}

pub fn check_label(name: &str) -> Result<(), LtsError> {
    if name.is_empty() || name == "tau" || name == "delta" || name.chars().any(char::is_whitespace) {
        return Err(LtsError::BadLabel(name.to_string()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: StateId,
    pub action: Action,
    pub dst: StateId,
}

/// One broken invariant found by [`Lts::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    InitialTerminating(String),
    TerminatingHasOutgoing { state: String, action: String, dst: String },
    LabelNotInAlphabet { label: String, src: String },
    BadAlphabetLabel(String),
    BadStateName(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InitialTerminating(s) => write!(f, "initial state marked terminating: {s}"),
            Violation::TerminatingHasOutgoing { state, action, dst } => {
                write!(f, "terminating state {state} has outgoing transition {action} to {dst}")
            }
            Violation::LabelNotInAlphabet { label, src } => {
                write!(f, "label {label} used from state {src} is not in the alphabet")
            }
            Violation::BadAlphabetLabel(l) => write!(f, "alphabet contains invalid label `{l}`"),
            Violation::BadStateName(s) => write!(f, "invalid state name `{s}`"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub connected: bool,
    pub finite: bool,
    pub regular: bool,
    pub finitely_branching: bool,
    pub deterministic: bool,
    /// The set of (trace, state) pairs is finite: no reachable cycle carries a visible label.
    pub finite_traces: bool,
}

#[derive(Clone, Debug)]
pub struct Lts {
    name: String,
    states: Vec<String>,
    alphabet: BTreeSet<String>,
    transitions: Vec<Transition>,
    terminating: BTreeSet<StateId>,
    initial: StateId,
    out: Vec<Vec<usize>>,
}

impl Lts {
    /// Assembles a system from raw parts. Only structural consistency is checked here;
    /// the semantic invariants are reported by [`Lts::validate`].
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        alphabet: BTreeSet<String>,
        transitions: impl IntoIterator<Item = Transition>,
        terminating: BTreeSet<StateId>,
        initial: StateId,
    ) -> Result<Lts, LtsError> {
        let n = states.len();
        let mut seen = std::collections::HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(LtsError::DuplicateState(s.clone()));
            }
        }
        if initial >= n {
            return Err(LtsError::StateOutOfRange(initial));
        }
        if let Some(&t) = terminating.iter().find(|&&t| t >= n) {
            return Err(LtsError::StateOutOfRange(t));
        }
        let mut transitions: Vec<Transition> = transitions.into_iter().collect();
        for t in &transitions {
            if t.src >= n {
                return Err(LtsError::StateOutOfRange(t.src));
            }
            if t.dst >= n {
                return Err(LtsError::StateOutOfRange(t.dst));
            }
        }
        transitions.sort();
        transitions.dedup();
        let mut out = vec![Vec::new(); n];
        for (i, t) in transitions.iter().enumerate() {
            out[t.src].push(i);
        }
        Ok(Lts { name: name.into(), states, alphabet, transitions, terminating, initial, out })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Lts {
        self.name = name.into();
        self
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn terminating(&self) -> &BTreeSet<StateId> {
        &self.terminating
    }

    pub fn is_terminating(&self, s: StateId) -> bool {
        self.terminating.contains(&s)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn outgoing(&self, s: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.out[s].iter().map(move |&i| &self.transitions[i])
    }

    /// Labels that occur on some transition, excluding tau.
    pub fn used_labels(&self) -> BTreeSet<String> {
        self.transitions.iter().filter_map(|t| t.action.name().map(str::to_string)).collect()
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut report = Vec::new();
        for s in &self.states {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                report.push(Violation::BadStateName(s.clone()));
            }
        }
        for l in &self.alphabet {
            if check_label(l).is_err() {
                report.push(Violation::BadAlphabetLabel(l.clone()));
            }
        }
        if self.is_terminating(self.initial) {
            report.push(Violation::InitialTerminating(self.states[self.initial].clone()));
        }
        for t in &self.transitions {
            if self.is_terminating(t.src) {
                report.push(Violation::TerminatingHasOutgoing {
                    state: self.states[t.src].clone(),
                    action: t.action.to_string(),
                    dst: self.states[t.dst].clone(),
                });
            }
            if let Action::Visible(l) = &t.action {
                if !self.alphabet.contains(l) {
                    report.push(Violation::LabelNotInAlphabet {
                        label: l.clone(),
                        src: self.states[t.src].clone(),
                    });
                }
            }
        }
        if report.is_empty() {
            Ok(())
        } else {
            Err(report)
        }
    }

    /// States reachable from `seeds` by silent steps only, seeds included.
    pub fn tau_closure(&self, seeds: impl IntoIterator<Item = StateId>) -> BTreeSet<StateId> {
        let mut set: BTreeSet<StateId> = BTreeSet::new();
        let mut stack: Vec<StateId> = Vec::new();
        for s in seeds {
            if set.insert(s) {
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for t in self.outgoing(s) {
                if t.action.is_tau() && set.insert(t.dst) {
                    stack.push(t.dst);
                }
            }
        }
        set
    }

    /// One visible step from a set followed by silent closure.
    pub fn visible_step(&self, from: &BTreeSet<StateId>, label: &str) -> BTreeSet<StateId> {
        let direct: Vec<StateId> = from
            .iter()
            .flat_map(|&s| self.outgoing(s))
            .filter(|t| t.action.name() == Some(label))
            .map(|t| t.dst)
            .collect();
        self.tau_closure(direct)
    }

    /// Generalized transition relation: all `s'` with `from =sigma=> s'`.
    pub fn gstep(&self, from: StateId, sigma: &[String]) -> Result<BTreeSet<StateId>, LtsError> {
        if from >= self.states.len() {
            return Err(LtsError::StateOutOfRange(from));
        }
        let mut cur = self.tau_closure([from]);
        for a in sigma {
            if cur.is_empty() {
                break;
            }
            cur = self.visible_step(&cur, a);
        }
        Ok(cur)
    }

    pub fn gstep_named(&self, from: &str, sigma: &[String]) -> Result<BTreeSet<StateId>, LtsError> {
        let id = self.state_id(from).ok_or_else(|| LtsError::UnknownState(from.to_string()))?;
        self.gstep(id, sigma)
    }

    pub fn traces(&self, max_len: usize) -> BTreeSet<Trace> {
        self.collect_traces(max_len, false)
    }

    pub fn terminating_traces(&self, max_len: usize) -> BTreeSet<Trace> {
        self.collect_traces(max_len, true)
    }

    fn collect_traces(&self, max_len: usize, terminating_only: bool) -> BTreeSet<Trace> {
        let dfa = Subsets::build(self);
        let mut result = BTreeSet::new();
        let mut stack: Vec<(usize, Trace)> = vec![(0, Vec::new())];
        while let Some((q, trace)) = stack.pop() {
            if !terminating_only || dfa.accepting[q] {
                result.insert(trace.clone());
            }
            if trace.len() == max_len {
                continue;
            }
            for (label, &next) in &dfa.delta[q] {
                let mut t = trace.clone();
                t.push(label.clone());
                stack.push((next, t));
            }
        }
        result
    }

    pub fn reach(&self) -> BTreeSet<StateId> {
        self.closure_from([self.initial])
    }

    /// States reachable from some reachable state other than the initial one.
    pub fn reach_prime(&self) -> BTreeSet<StateId> {
        let mut seeds = self.reach();
        seeds.remove(&self.initial);
        self.closure_from(seeds)
    }

    fn closure_from(&self, seeds: impl IntoIterator<Item = StateId>) -> BTreeSet<StateId> {
        let mut set = BTreeSet::new();
        let mut stack = Vec::new();
        for s in seeds {
            if set.insert(s) {
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for t in self.outgoing(s) {
                if set.insert(t.dst) {
                    stack.push(t.dst);
                }
            }
        }
        set
    }

    /// Keeps the given states (renumbered in their original order) and the
    /// transitions between them; the alphabet is left untouched.
    pub(crate) fn restrict(&self, keep: &BTreeSet<StateId>) -> Lts {
        let mut map = vec![usize::MAX; self.states.len()];
        let mut states = Vec::with_capacity(keep.len());
        for &s in keep {
            map[s] = states.len();
            states.push(self.states[s].clone());
        }
        let transitions: Vec<Transition> = self
            .transitions
            .iter()
            .filter(|t| keep.contains(&t.src) && keep.contains(&t.dst))
            .map(|t| Transition { src: map[t.src], action: t.action.clone(), dst: map[t.dst] })
            .collect();
        let terminating = self.terminating.iter().filter(|s| keep.contains(s)).map(|&s| map[s]).collect();
        Lts::new(self.name.clone(), states, self.alphabet.clone(), transitions, terminating, map[self.initial])
            .expect("restriction of a well-formed system")
    }

    /// Restriction to the reachable part, alphabet unchanged.
    pub(crate) fn reachable_part(&self) -> Lts {
        self.restrict(&self.reach())
    }

    /// Reachable part with the alphabet pruned to labels that still occur.
    pub fn reduct(&self) -> Lts {
        let mut r = self.reachable_part();
        r.alphabet = r.alphabet.intersection(&r.used_labels()).cloned().collect();
        r
    }

    pub fn is_connected(&self) -> bool {
        self.reach().len() == self.states.len()
    }

    pub fn classify(&self) -> Classification {
        let reach = self.reach();
        let dfa = Subsets::build(self);
        Classification {
            connected: reach.len() == self.states.len(),
            finite: true,
            regular: true,
            finitely_branching: true,
            deterministic: dfa.sets.iter().all(|s| s.len() <= 1),
            finite_traces: !self.has_visible_cycle(&reach),
        }
    }

    fn has_visible_cycle(&self, reach: &BTreeSet<StateId>) -> bool {
        // A visible transition lies on a cycle iff its endpoints share a strongly connected component.
        let comp = scc(self.states.len(), |s| self.outgoing(s).map(|t| t.dst).collect());
        self.transitions
            .iter()
            .any(|t| !t.action.is_tau() && reach.contains(&t.src) && comp[t.src] == comp[t.dst])
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("lts {}\n", self.name));
        out.push_str(&format!("init {}\n", self.states[self.initial]));
        let mut mentioned = vec![false; self.states.len()];
        mentioned[self.initial] = true;
        for &s in &self.terminating {
            mentioned[s] = true;
        }
        for t in &self.transitions {
            mentioned[t.src] = true;
            mentioned[t.dst] = true;
        }
        let mut lone: Vec<&str> =
            (0..self.states.len()).filter(|&s| !mentioned[s]).map(|s| self.states[s].as_str()).collect();
        lone.sort();
        for s in lone {
            out.push_str(&format!("state {s}\n"));
        }
        let mut terms: Vec<&str> = self.terminating.iter().map(|&s| self.states[s].as_str()).collect();
        terms.sort();
        for s in terms {
            out.push_str(&format!("term {s}\n"));
        }
        for a in &self.alphabet {
            out.push_str(&format!("act {a}\n"));
        }
        let mut lines: Vec<(&str, String, &str)> = self
            .transitions
            .iter()
            .map(|t| (self.states[t.src].as_str(), t.action.to_string(), self.states[t.dst].as_str()))
            .collect();
        lines.sort();
        for (s, a, d) in lines {
            out.push_str(&format!("tr {s} {a} {d}\n"));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Lts, LtsError> {
        let mut b = LtsBuilder::new("lts");
        let mut has_init = false;
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let toks = tokens(raw);
            let Some(&(col, head)) = toks.first() else { continue };
            let args: Vec<&str> = toks[1..].iter().map(|&(_, t)| t).collect();
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(SyntaxError::new(line, col, format!("`{head}` expects {n} argument(s)")))
                }
            };
            match head {
                "lts" => {
                    arity(1)?;
                    b.name = args[0].to_string();
                }
                "state" => {
                    arity(1)?;
                    b.state(args[0]);
                }
                "init" => {
                    arity(1)?;
                    if has_init {
                        return Err(SyntaxError::new(line, col, "second `init` line").into());
                    }
                    has_init = true;
                    b.initial(args[0]);
                }
                "term" => {
                    arity(1)?;
                    b.terminating(args[0]);
                }
                "act" => {
                    arity(1)?;
                    check_label(args[0]).map_err(|_| SyntaxError::new(line, toks[1].0, "invalid label"))?;
                    b.alphabet.insert(args[0].to_string());
                }
                "tr" => {
                    arity(3)?;
                    let act = Action::parse(args[1])
                        .map_err(|_| SyntaxError::new(line, toks[2].0, "invalid label"))?;
                    let s = b.state(args[0]);
                    let d = b.state(args[2]);
                    b.transitions.push(Transition { src: s, action: act, dst: d });
                }
                other => {
                    return Err(SyntaxError::new(line, col, format!("unknown directive `{other}`")).into());
                }
            }
        }
        if !has_init {
            return Err(LtsError::NoInitial);
        }
        b.build()
    }

    /// Graphviz rendering; the initial state gets an in-arrow from a point node and
    /// terminating states an out-arrow into one.
    pub fn to_dot(&self) -> String {
        let q = |s: &str| format!("\"{}\"", s.replace('"', "\\\""));
        let mut out = format!("digraph {} {{\n", q(&self.name));
        out.push_str("  rankdir=TB;\n");
        out.push_str("  __init [shape=point];\n");
        for s in &self.states {
            out.push_str(&format!("  {} [shape=ellipse];\n", q(s)));
        }
        out.push_str(&format!("  __init -> {};\n", q(&self.states[self.initial])));
        for t in &self.transitions {
            out.push_str(&format!(
                "  {} -> {} [label={}];\n",
                q(&self.states[t.src]),
                q(&self.states[t.dst]),
                q(&t.action.to_string())
            ));
        }
        for (k, &s) in self.terminating.iter().enumerate() {
            out.push_str(&format!("  __term{k} [shape=point, style=invis];\n"));
            out.push_str(&format!("  {} -> __term{k};\n", q(&self.states[s])));
        }
        out.push_str("}\n");
        out
    }
}

/// Tokens with 1-based columns; a `#` that starts a token comments out the rest of the line.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut toks = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(st)) => {
                toks.push((st + 1, &line[st..i]));
                start = None;
            }
            (false, None) => {
                if c == '#' {
                    return toks;
                }
                start = Some(i);
            }
            _ => {}
        }
    }
    if let Some(st) = start {
        toks.push((st + 1, &line[st..]));
    }
    toks
}

/// Incremental construction by state name.
#[derive(Clone, Debug)]
pub struct LtsBuilder {
    name: String,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    alphabet: BTreeSet<String>,
    transitions: Vec<Transition>,
    terminating: BTreeSet<StateId>,
    initial: Option<StateId>,
}

impl LtsBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        LtsBuilder {
            name: name.into(),
            states: Vec::new(),
            index: HashMap::new(),
            alphabet: BTreeSet::new(),
            transitions: Vec::new(),
            terminating: BTreeSet::new(),
            initial: None,
        }
    }

    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.states.len();
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn initial(&mut self, name: &str) -> &mut Self {
        let id = self.state(name);
        self.initial = Some(id);
        self
    }

    pub fn terminating(&mut self, name: &str) -> &mut Self {
        let id = self.state(name);
        self.terminating.insert(id);
        self
    }

    pub fn action(&mut self, label: &str) -> &mut Self {
        self.alphabet.insert(label.to_string());
        self
    }

    /// Adds a transition; visible labels join the alphabet.
    pub fn transition(&mut self, src: &str, action: Action, dst: &str) -> &mut Self {
        let s = self.state(src);
        let d = self.state(dst);
        if let Action::Visible(l) = &action {
            self.alphabet.insert(l.clone());
        }
        self.transitions.push(Transition { src: s, action, dst: d });
        self
    }

    /// Shorthand for a transition whose label is given as text (`tau` is silent).
    pub fn tr(&mut self, src: &str, label: &str, dst: &str) -> &mut Self {
        let action = if label == "tau" { Action::Tau } else { Action::visible(label) };
        self.transition(src, action, dst)
    }

    pub fn build(self) -> Result<Lts, LtsError> {
        let initial = self.initial.ok_or(LtsError::NoInitial)?;
        Lts::new(self.name, self.states, self.alphabet, self.transitions, self.terminating, initial)
    }
}

/// Subset construction over silent-closed visible steps. Subset 0 is the
/// closure of the initial state; empty subsets are never created.
pub(crate) struct Subsets {
    pub sets: Vec<BTreeSet<StateId>>,
    pub delta: Vec<BTreeMap<String, usize>>,
    pub accepting: Vec<bool>,
}

impl Subsets {
    pub fn build(l: &Lts) -> Subsets {
        let start = l.tau_closure([l.initial()]);
        let mut index: HashMap<BTreeSet<StateId>, usize> = HashMap::new();
        let mut sets = vec![start.clone()];
        index.insert(start, 0);
        let mut delta = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            let mut by_label: BTreeMap<String, Vec<StateId>> = BTreeMap::new();
            for &s in &sets[q] {
                for t in l.outgoing(s) {
                    if let Action::Visible(a) = &t.action {
                        by_label.entry(a.clone()).or_default().push(t.dst);
                    }
                }
            }
            let mut row = BTreeMap::new();
            for (a, dsts) in by_label {
                let target = l.tau_closure(dsts);
                let id = match index.get(&target) {
                    Some(&id) => id,
                    None => {
                        let id = sets.len();
                        sets.push(target.clone());
                        index.insert(target, id);
                        queue.push_back(id);
                        id
                    }
                };
                row.insert(a, id);
            }
            if delta.len() <= q {
                delta.resize(q + 1, BTreeMap::new());
            }
            delta[q] = row;
        }
        delta.resize(sets.len(), BTreeMap::new());
        let accepting = sets.iter().map(|s| s.iter().any(|&x| l.is_terminating(x))).collect();
        Subsets { sets, delta, accepting }
    }
}

/// Tarjan's algorithm, iterative; returns a component index per node.
pub(crate) fn scc(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some((v, ws, i)) = call.last_mut() {
            let v = *v;
            if *i < ws.len() {
                let w = ws[*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some((u, _, _)) = call.last() {
                    low[*u] = low[*u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Searches for a bijection between the reachable parts that preserves the
/// initial state, transitions in both directions and termination.
pub fn isomorphism(a: &Lts, b: &Lts) -> Option<Vec<(StateId, StateId)>> {
    let ra = a.reachable_part();
    let rb = b.reachable_part();
    if ra.num_states() != rb.num_states() || ra.transitions().len() != rb.transitions().len() {
        return None;
    }
    let n = ra.num_states();
    let sig = |l: &Lts, s: StateId| {
        let mut outs: Vec<String> = l.outgoing(s).map(|t| t.action.to_string()).collect();
        outs.sort();
        let mut ins: Vec<String> =
            l.transitions().iter().filter(|t| t.dst == s).map(|t| t.action.to_string()).collect();
        ins.sort();
        (l.is_terminating(s), outs, ins)
    };
    let sig_a: Vec<_> = (0..n).map(|s| sig(&ra, s)).collect();
    let sig_b: Vec<_> = (0..n).map(|s| sig(&rb, s)).collect();
    let mut bag_a = sig_a.clone();
    let mut bag_b = sig_b.clone();
    bag_a.sort();
    bag_b.sort();
    if bag_a != bag_b || sig_a[ra.initial()] != sig_b[rb.initial()] {
        return None;
    }
    // Breadth-first order over ra with a discovering transition for each non-initial state.
    let mut order = vec![ra.initial()];
    let mut parent: Vec<Option<(StateId, Action)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[ra.initial()] = true;
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        for t in ra.outgoing(s) {
            if !seen[t.dst] {
                seen[t.dst] = true;
                parent[t.dst] = Some((s, t.action.clone()));
                order.push(t.dst);
            }
        }
        i += 1;
    }
    let edges_b: std::collections::HashSet<(StateId, &Action, StateId)> =
        rb.transitions().iter().map(|t| (t.src, &t.action, t.dst)).collect();
    let mut fwd = vec![usize::MAX; n];
    let mut used = vec![false; n];

    struct Ctx<'a> {
        ra: &'a Lts,
        rb: &'a Lts,
        order: &'a [StateId],
        parent: &'a [Option<(StateId, Action)>],
        sig_a: &'a [(bool, Vec<String>, Vec<String>)],
        sig_b: &'a [(bool, Vec<String>, Vec<String>)],
        edges_b: &'a std::collections::HashSet<(StateId, &'a Action, StateId)>,
    }

    fn consistent(cx: &Ctx, fwd: &[usize], s: StateId, t: StateId) -> bool {
        for tr in cx.ra.outgoing(s) {
            let d = if tr.dst == s { t } else { fwd[tr.dst] };
            if d != usize::MAX && !cx.edges_b.contains(&(t, &tr.action, d)) {
                return false;
            }
        }
        for tr in cx.ra.transitions().iter().filter(|tr| tr.dst == s && tr.src != s) {
            let src = fwd[tr.src];
            if src != usize::MAX && !cx.edges_b.contains(&(src, &tr.action, t)) {
                return false;
            }
        }
        true
    }

    fn search(cx: &Ctx, k: usize, fwd: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if k == cx.order.len() {
            return true;
        }
        let s = cx.order[k];
        let candidates: Vec<StateId> = match &cx.parent[s] {
            None => vec![cx.rb.initial()],
            Some((p, act)) => {
                let fp = fwd[*p];
                cx.rb.outgoing(fp).filter(|t| &t.action == act).map(|t| t.dst).collect()
            }
        };
        for t in candidates {
            if used[t] || cx.sig_a[s] != cx.sig_b[t] || !consistent(cx, fwd, s, t) {
                continue;
            }
            fwd[s] = t;
            used[t] = true;
            if search(cx, k + 1, fwd, used) {
                return true;
            }
            fwd[s] = usize::MAX;
            used[t] = false;
        }
        false
    }

    let cx = Ctx {
        ra: &ra,
        rb: &rb,
        order: &order,
        parent: &parent,
        sig_a: &sig_a,
        sig_b: &sig_b,
        edges_b: &edges_b,
    };
    if !search(&cx, 0, &mut fwd, &mut used) {
        return None;
    }
    // Map back to the original state indices.
    let back_a: Vec<StateId> = a.reach().into_iter().collect();
    let back_b: Vec<StateId> = b.reach().into_iter().collect();
    Some((0..n).map(|s| (back_a[s], back_b[fwd[s]])).collect())
}

pub fn isomorphic(a: &Lts, b: &Lts) -> bool {
    isomorphism(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counter(k: usize) -> Lts {
        let mut b = LtsBuilder::new("counter");
        b.initial("0");
        for i in 0..k {
            b.tr(&i.to_string(), "inc", &(i + 1).to_string());
            b.tr(&(i + 1).to_string(), "dec", &i.to_string());
        }
        b.build().unwrap()
    }

    fn inert() -> Lts {
        let mut b = LtsBuilder::new("inert");
        b.initial("(*,0)");
        for d in ["0", "1"] {
            b.tr("(*,0)", &format!("r1({d})"), &format!("({d},1)"));
            b.tr(&format!("({d},1)"), "tau", &format!("({d},2)"));
            b.tr(&format!("({d},2)"), &format!("s2({d})"), "(*,0)");
        }
        b.build().unwrap()
    }

    fn t(v: &[&str]) -> Trace {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counter_is_valid() {
        let c = counter(3);
        assert!(c.validate().is_ok());
        assert_eq!(c.num_states(), 4);
        assert_eq!(c.transitions().len(), 6);
    }

    #[test]
    fn initial_terminating_is_reported() {
        let mut b = LtsBuilder::new("x");
        b.initial("s").terminating("s");
        let err = b.build().unwrap().validate().unwrap_err();
        assert!(err[0].to_string().contains("initial state marked terminating"));
    }

    #[test]
    fn terminating_with_outgoing_is_reported() {
        let mut b = LtsBuilder::new("x");
        b.initial("s").tr("s", "a", "t").tr("t", "b", "u").terminating("t");
        let err = b.build().unwrap().validate().unwrap_err();
        assert!(matches!(err[0], Violation::TerminatingHasOutgoing { .. }));
    }

    #[test]
    fn gstep_examples() {
        let c = counter(3);
        assert_eq!(c.gstep_named("0", &t(&["inc", "inc"])).unwrap(), BTreeSet::from([2]));
        let l = inert();
        let got: BTreeSet<&str> =
            l.gstep_named("(*,0)", &t(&["r1(0)"])).unwrap().into_iter().map(|s| l.state_name(s)).collect();
        assert_eq!(got, BTreeSet::from(["(0,1)", "(0,2)"]));
        assert!(c.gstep_named("nope", &[]).is_err());
    }

    #[test]
    fn epsilon_step_is_tau_closure() {
        let l = inert();
        let s = l.state_id("(1,1)").unwrap();
        let closure = l.gstep(s, &[]).unwrap();
        assert_eq!(closure, BTreeSet::from([s, l.state_id("(1,2)").unwrap()]));
    }

    #[test]
    fn counter_traces() {
        let got = counter(2).traces(2);
        let want = BTreeSet::from([t(&[]), t(&["inc"]), t(&["inc", "inc"]), t(&["inc", "dec"])]);
        assert_eq!(got, want);
    }

    #[test]
    fn reach_drops_isolated() {
        let mut b = LtsBuilder::new("x");
        b.initial("a").tr("a", "x", "b");
        b.state("iso");
        let l = b.build().unwrap();
        assert_eq!(l.reach().len(), 2);
        assert_eq!(l.reduct().num_states(), 2);
        assert!(!l.classify().connected);
    }

    #[test]
    fn reach_prime_excludes_unrevisited_initial() {
        let mut b = LtsBuilder::new("x");
        b.initial("a").tr("a", "x", "a").tr("a", "y", "b");
        let l = b.build().unwrap();
        assert_eq!(l.reach_prime(), BTreeSet::from([l.state_id("b").unwrap()]));
        assert_eq!(counter(2).reach_prime().len(), 3);
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let l = inert();
        let text = l.to_text();
        let back = Lts::parse_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert!(isomorphic(&l, &back));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(Lts::parse_text("lts x\nfoo bar\n"), Err(LtsError::Syntax(_))));
        assert!(matches!(Lts::parse_text("lts x\n"), Err(LtsError::NoInitial)));
        let l = Lts::parse_text("# comment\nlts x\ninit root#12 # trailing\n").unwrap();
        assert_eq!(l.state_name(l.initial()), "root#12");
    }

    #[test]
    fn isomorphism_ignores_names() {
        let c = counter(3);
        let mut b = LtsBuilder::new("renamed");
        b.initial("z0");
        for i in 0..3 {
            b.tr(&format!("z{i}"), "inc", &format!("z{}", i + 1));
            b.tr(&format!("z{}", i + 1), "dec", &format!("z{i}"));
        }
        assert!(isomorphic(&c, &b.build().unwrap()));
        assert!(!isomorphic(&c, &counter(2)));
    }

    #[test]
    fn deterministic_classification() {
        assert!(counter(3).classify().deterministic);
        assert!(!inert().classify().deterministic);
        assert!(!counter(3).classify().finite_traces);
    }

    #[test]
    fn dot_marks_initial_and_terminating() {
        let mut b = LtsBuilder::new("a");
        b.initial("s").tr("s", "a", "t").terminating("t");
        let dot = b.build().unwrap().to_dot();
        assert!(dot.contains("__init -> \"s\""));
        assert!(dot.contains("\"t\" -> __term0"));
    }
}
