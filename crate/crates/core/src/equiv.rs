//! Behavioural equivalences: strong, branching and rooted branching
//! bisimulation by signature refinement, trace and language equivalence by
//! subset construction, quotienting and determinacy.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::lts::{scc, Action, Lts, StateId, Subsets, Trace, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Strong,
    Branching,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivResult {
    pub equivalent: bool,
    /// Related pairs (state of the left system, state of the right system).
    pub witness: Option<Vec<(StateId, StateId)>>,
    /// Shortest, lexicographically least trace telling the systems apart.
    pub distinguisher: Option<Trace>,
}

impl EquivResult {
    fn no() -> Self {
        EquivResult { equivalent: false, witness: None, distinguisher: None }
    }
}

/// Blocks of states, one id per state; ids are dense and assigned in state order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub block: Vec<usize>,
}

impl Partition {
    pub fn num_blocks(&self) -> usize {
        self.block.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<StateId>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (s, &b) in self.block.iter().enumerate() {
            out[b].push(s);
        }
        out
    }
}

const TICK: u32 = u32::MAX;

/// Reachable parts of one or two systems laid side by side, labels interned (tau = 0).
struct Graph {
    succ: Vec<Vec<(u32, usize)>>,
    term: Vec<bool>,
    /// Original state id for each node.
    origin: Vec<StateId>,
    /// Node index of each original state of the left system, then of the right.
    left: HashMap<StateId, usize>,
    right: HashMap<StateId, usize>,
    init_left: usize,
    init_right: usize,
}

impl Graph {
    fn new(a: &Lts, b: Option<&Lts>) -> Graph {
        let mut labels: HashMap<Action, u32> = HashMap::from([(Action::Tau, 0)]);
        let mut g = Graph {
            succ: Vec::new(),
            term: Vec::new(),
            origin: Vec::new(),
            left: HashMap::new(),
            right: HashMap::new(),
            init_left: 0,
            init_right: 0,
        };
        for (side, l) in [Some(a), b].into_iter().flatten().enumerate() {
            let reach = l.reach();
            let base = g.succ.len();
            let map: HashMap<StateId, usize> = reach.iter().enumerate().map(|(i, &s)| (s, base + i)).collect();
            for &s in &reach {
                let mut row: Vec<(u32, usize)> = l
                    .outgoing(s)
                    .map(|t| {
                        let next = labels.len() as u32;
                        (*labels.entry(t.action.clone()).or_insert(next), map[&t.dst])
                    })
                    .collect();
                row.sort_unstable();
                g.succ.push(row);
                g.term.push(l.is_terminating(s));
                g.origin.push(s);
            }
            if side == 0 {
                g.init_left = map[&l.initial()];
                g.left = map;
            } else {
                g.init_right = map[&l.initial()];
                g.right = map;
            }
        }
        if b.is_none() {
            g.init_right = g.init_left;
            g.right = g.left.clone();
        }
        g
    }

    fn len(&self) -> usize {
        self.succ.len()
    }
}

/// Signature refinement to the coarsest stable partition. In branching mode a
/// state's signature collects the moves of every state reachable by silent steps
/// inside its own block, ignoring those silent steps; termination counts as a move.
/// Current block and signature of a state.
type SigKey<'a> = (usize, &'a [(u32, usize)]);

fn refine(g: &Graph, relation: Relation) -> Partition {
    let n = g.len();
    let mut block = vec![0usize; n];
    let mut count = if n == 0 { 0 } else { 1 };
    loop {
        let sigs: Vec<Vec<(u32, usize)>> = match relation {
            Relation::Strong => (0..n)
                .map(|s| {
                    let mut sig: Vec<(u32, usize)> = g.succ[s].iter().map(|&(a, t)| (a, block[t])).collect();
                    if g.term[s] {
                        sig.push((TICK, 0));
                    }
                    sig.sort_unstable();
                    sig.dedup();
                    sig
                })
                .collect(),
            Relation::Branching => branching_signatures(g, &block),
        };
        let mut ids: HashMap<SigKey<'_>, usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let k = ids.len();
            next[s] = *ids.entry((block[s], &sigs[s])).or_insert(k);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    Partition { block }
}

fn branching_signatures(g: &Graph, block: &[usize]) -> Vec<Vec<(u32, usize)>> {
    let n = g.len();
    let inert = |s: usize| -> Vec<usize> {
        g.succ[s].iter().filter(|&&(a, t)| a == 0 && block[t] == block[s]).map(|&(_, t)| t).collect()
    };
    // Tarjan numbers components so that successors come first.
    let comp = scc(n, inert);
    let ncomp = comp.iter().max().map_or(0, |m| m + 1);
    let mut members = vec![Vec::new(); ncomp];
    for s in 0..n {
        members[comp[s]].push(s);
    }
    let mut comp_sig: Vec<BTreeSet<(u32, usize)>> = vec![BTreeSet::new(); ncomp];
    for c in 0..ncomp {
        let mut sig = BTreeSet::new();
        for &s in &members[c] {
            if g.term[s] {
                sig.insert((TICK, 0));
            }
            for &(a, t) in &g.succ[s] {
                if a == 0 && block[t] == block[s] {
                    if comp[t] != c {
                        sig.extend(comp_sig[comp[t]].iter().copied());
                    }
                } else {
                    sig.insert((a, block[t]));
                }
            }
        }
        comp_sig[c] = sig;
    }
    (0..n).map(|s| comp_sig[comp[s]].iter().copied().collect()).collect()
}

fn bisim(a: &Lts, b: &Lts, relation: Relation, rooted: bool) -> EquivResult {
    let g = Graph::new(a, Some(b));
    let p = refine(&g, relation);
    let (ia, ib) = (g.init_left, g.init_right);
    let mut equivalent = p.block[ia] == p.block[ib];
    if equivalent && rooted {
        equivalent = root_condition(&g, &p, ia, ib);
    }
    if !equivalent {
        return EquivResult::no();
    }
    let mut witness = Vec::new();
    for (&sa, &na) in &g.left {
        for (&sb, &nb) in &g.right {
            if p.block[na] == p.block[nb] {
                witness.push((sa, sb));
            }
        }
    }
    witness.sort_unstable();
    EquivResult { equivalent: true, witness: Some(witness), distinguisher: None }
}

/// Initial moves must be matched by single steps into equivalent states, and
/// termination of the roots must agree.
fn root_condition(g: &Graph, p: &Partition, ia: usize, ib: usize) -> bool {
    if g.term[ia] != g.term[ib] {
        return false;
    }
    let covers = |x: usize, y: usize| {
        g.succ[x].iter().all(|&(a, t)| g.succ[y].iter().any(|&(b, u)| a == b && p.block[t] == p.block[u]))
    };
    covers(ia, ib) && covers(ib, ia)
}

pub fn strong_bisim(a: &Lts, b: &Lts) -> EquivResult {
    bisim(a, b, Relation::Strong, false)
}

pub fn branching_bisim(a: &Lts, b: &Lts) -> EquivResult {
    bisim(a, b, Relation::Branching, false)
}

pub fn rooted_branching_bisim(a: &Lts, b: &Lts) -> EquivResult {
    bisim(a, b, Relation::Branching, true)
}

/// Coarsest auto-bisimulation partition of the reachable states, indexed by original state id.
pub fn partition(l: &Lts, relation: Relation) -> BTreeMap<StateId, usize> {
    let g = Graph::new(l, None);
    let p = refine(&g, relation);
    (0..g.len()).map(|i| (g.origin[i], p.block[i])).collect()
}

/// Quotient by the largest auto-bisimulation. In branching mode silent steps
/// inside a class disappear; if the initial class is terminating, a fresh root
/// with a silent step into it is kept so that the result stays well formed.
pub fn minimize(l: &Lts, relation: Relation) -> Lts {
    let g = Graph::new(l, None);
    let p = refine(&g, relation);
    let blocks = p.blocks();
    let names: Vec<String> = blocks
        .iter()
        .map(|members| members.iter().map(|&i| l.state_name(g.origin[i])).min().expect("non-empty").to_string())
        .collect();
    let mut transitions = quotient_transitions(l, &g, &p, relation);
    let terminating: BTreeSet<usize> =
        (0..g.len()).filter(|&s| g.term[s]).map(|s| p.block[s]).collect();
    let mut states = names;
    let mut init = p.block[g.init_left];
    if terminating.contains(&init) {
        let root = states.len();
        let mut name = format!("{}'", states[init]);
        while states.contains(&name) {
            name.push('\'');
        }
        states.push(name);
        transitions.push(Transition { src: root, action: Action::Tau, dst: init });
        init = root;
    }
    Lts::new(l.name(), states, l.alphabet().clone(), transitions, terminating, init)
        .expect("quotient")
        .reduct()
}

fn quotient_transitions(l: &Lts, g: &Graph, p: &Partition, relation: Relation) -> Vec<Transition> {
    let mut out: BTreeSet<Transition> = BTreeSet::new();
    for t in l.transitions() {
        let (Some(&s), Some(&d)) = (g.left.get(&t.src), g.left.get(&t.dst)) else { continue };
        if relation == Relation::Branching && t.action.is_tau() && p.block[s] == p.block[d] {
            continue;
        }
        out.insert(Transition { src: p.block[s], action: t.action.clone(), dst: p.block[d] });
    }
    out.into_iter().collect()
}

/// Same-trace-reachable states all lie in one class of the largest branching autobisimulation.
pub fn is_determinate(l: &Lts) -> bool {
    let classes = partition(l, Relation::Branching);
    let subsets = Subsets::build(l);
    subsets.sets.iter().all(|set| {
        let mut it = set.iter().map(|s| classes[s]);
        let first = it.next();
        it.all(|c| Some(c) == first)
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Traces,
    Language,
}

pub fn trace_eq(a: &Lts, b: &Lts) -> EquivResult {
    compare_languages(a, b, Mode::Traces)
}

pub fn lang_eq(a: &Lts, b: &Lts) -> EquivResult {
    compare_languages(a, b, Mode::Language)
}

/// Breadth-first walk over the product of the two subset automata, labels in
/// sorted order, so the first mismatch found is the shortest and lexicographically least.
fn compare_languages(a: &Lts, b: &Lts, mode: Mode) -> EquivResult {
    let da = Subsets::build(a);
    let db = Subsets::build(b);
    type Node = (Option<usize>, Option<usize>);
    let start: Node = (Some(0), Some(0));
    let mut seen: HashMap<Node, ()> = HashMap::from([(start, ())]);
    let mut queue: VecDeque<(Node, Trace)> = VecDeque::from([(start, Vec::new())]);
    let acc = |d: &Subsets, q: Option<usize>| q.is_some_and(|q| d.accepting[q]);
    while let Some(((qa, qb), path)) = queue.pop_front() {
        let mismatch = acc(&da, qa) != acc(&db, qb) || (mode == Mode::Traces && qa.is_some() != qb.is_some());
        if mismatch {
            return EquivResult { equivalent: false, witness: None, distinguisher: Some(path) };
        }
        let mut labels: BTreeSet<&String> = BTreeSet::new();
        if let Some(q) = qa {
            labels.extend(da.delta[q].keys());
        }
        if let Some(q) = qb {
            labels.extend(db.delta[q].keys());
        }
        for l in labels {
            let na = qa.and_then(|q| da.delta[q].get(l).copied());
            let nb = qb.and_then(|q| db.delta[q].get(l).copied());
            let node = (na, nb);
            if seen.insert(node, ()).is_none() {
                let mut p = path.clone();
                p.push(l.clone());
                queue.push_back((node, p));
            }
        }
    }
    EquivResult { equivalent: true, witness: None, distinguisher: None }
}

/// (is a trace, is a terminating trace) of `l`.
pub fn trace_membership(l: &Lts, trace: &[String]) -> (bool, bool) {
    let reached = l.gstep(l.initial(), trace).expect("initial state exists");
    (!reached.is_empty(), reached.iter().any(|&s| l.is_terminating(s)))
}

/// Checks that a distinguisher really separates the systems under the given mode.
pub fn confirm_distinguisher(a: &Lts, b: &Lts, trace: &[String], language_only: bool) -> bool {
    let (ta, la) = trace_membership(a, trace);
    let (tb, lb) = trace_membership(b, trace);
    la != lb || (!language_only && ta != tb)
}

/// Transfer-condition check of a candidate relation, independent of the refinement engine.
/// `strict` additionally demands that every intermediate state of a stuttering path is related.
pub fn verify_witness(
    a: &Lts,
    b: &Lts,
    pairs: &[(StateId, StateId)],
    relation: Relation,
    rooted: bool,
    strict: bool,
) -> bool {
    let rel: BTreeSet<(StateId, StateId)> = pairs.iter().copied().collect();
    if !rel.contains(&(a.initial(), b.initial())) {
        return false;
    }
    let flipped: BTreeSet<(StateId, StateId)> = rel.iter().map(|&(x, y)| (y, x)).collect();
    let one_way = |x: &Lts, y: &Lts, r: &BTreeSet<(StateId, StateId)>| -> bool {
        r.iter().all(|&(s, t)| match relation {
            Relation::Strong => {
                x.is_terminating(s) == y.is_terminating(t)
                    && x.outgoing(s).all(|m| y.outgoing(t).any(|n| n.action == m.action && r.contains(&(m.dst, n.dst))))
            }
            Relation::Branching => {
                let stutter = stutter_targets(y, t, |u| r.contains(&(s, u)), strict);
                let moves_ok = x.outgoing(s).all(|m| {
                    (m.action.is_tau() && r.contains(&(m.dst, t)))
                        || stutter.iter().any(|&u| {
                            y.outgoing(u).any(|n| n.action == m.action && r.contains(&(m.dst, n.dst)))
                        })
                });
                let term_ok = !x.is_terminating(s) || stutter.iter().any(|&u| y.is_terminating(u));
                moves_ok && term_ok
            }
        })
    };
    if !one_way(a, b, &rel) || !one_way(b, a, &flipped) {
        return false;
    }
    if rooted {
        let (ia, ib) = (a.initial(), b.initial());
        if a.is_terminating(ia) != b.is_terminating(ib) {
            return false;
        }
        let root = |x: &Lts, sx: StateId, y: &Lts, sy: StateId, r: &BTreeSet<(StateId, StateId)>| {
            x.outgoing(sx).all(|m| y.outgoing(sy).any(|n| n.action == m.action && r.contains(&(m.dst, n.dst))))
        };
        if !root(a, ia, b, ib, &rel) || !root(b, ib, a, ia, &flipped) {
            return false;
        }
    }
    true
}

/// States reachable from `t` by silent steps that satisfy `related`. In the
/// lenient reading only the endpoint must be related; in the strict one every state on the path.
fn stutter_targets(y: &Lts, t: StateId, related: impl Fn(StateId) -> bool, strict: bool) -> Vec<StateId> {
    if strict {
        if !related(t) {
            return Vec::new();
        }
        let mut seen = BTreeSet::from([t]);
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            for m in y.outgoing(u) {
                if m.action.is_tau() && related(m.dst) && seen.insert(m.dst) {
                    stack.push(m.dst);
                }
            }
        }
        seen.into_iter().collect()
    } else {
        y.tau_closure([t]).into_iter().filter(|&u| related(u)).collect()
    }
}
