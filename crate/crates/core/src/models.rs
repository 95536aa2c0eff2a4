//! Builders for the worked example systems: counters, buffers, connections,
//! the alternating bit protocol, nets, program flows and recursive
//! specifications. Parameters are capped at desk scale.

use std::collections::{BTreeMap, BTreeSet};

use crate::compose::{encap, hide, parallel, parallel_all, CommFn};
use crate::error::ModelError;
use crate::expr::{parse_expr, ProcExpr};
use crate::lts::{Action, Lts, LtsBuilder};
use crate::petri::{Marking, Net, NetTransition};
use crate::recspec::RecSpec;

pub const MAX_COUNTER: usize = 1000;
pub const MAX_BUFFER: usize = 6;
pub const MAX_DATA: usize = 4;
pub const MAX_PROCESSES: usize = 8;
pub const MAX_WIRE: usize = 8;
pub const MAX_WORKCELL: usize = 2;

/// Name of the empty sequence in buffer and wire states.
pub const EMPTY: &str = "ε";

fn built(b: LtsBuilder) -> Lts {
    b.build().expect("model is well formed")
}

fn set<I: IntoIterator<Item = String>>(labels: I) -> BTreeSet<String> {
    labels.into_iter().collect()
}

// ---- counters -------------------------------------------------------------

fn counter_base(name: &str, k: usize) -> LtsBuilder {
    let mut b = LtsBuilder::new(name);
    b.initial("0");
    for i in 0..=k {
        b.state(&i.to_string());
    }
    for i in 0..k {
        b.tr(&i.to_string(), "inc", &(i + 1).to_string());
        b.tr(&(i + 1).to_string(), "dec", &i.to_string());
    }
    b.action("inc").action("dec");
    b
}

/// Values `0..=k`, `inc` and `dec` within bounds.
pub fn counter(k: usize) -> Lts {
    built(counter_base("counter", k))
}

/// The counter that wraps around at both ends.
pub fn counter_mod(k: usize) -> Lts {
    let mut b = counter_base("counter_mod", k);
    b.tr(&k.to_string(), "inc", "0");
    b.tr("0", "dec", &k.to_string());
    built(b)
}

/// Incrementing at the bound leads to the stuck state `err`.
pub fn unreliable_counter(k: usize) -> Lts {
    let mut b = counter_base("unreliable_counter", k);
    b.tr(&k.to_string(), "inc", "err");
    built(b)
}

/// The unbounded counter cut off after `expanded` values: states `0..=expanded`,
/// the last one without outgoing transitions.
pub fn staircase(expanded: usize) -> Lts {
    let mut b = LtsBuilder::new("staircase");
    b.initial("0");
    for i in 0..expanded {
        b.tr(&i.to_string(), "inc", &(i + 1).to_string());
        if i > 0 {
            b.tr(&i.to_string(), "dec", &(i - 1).to_string());
        }
    }
    b.action("inc").action("dec");
    built(b)
}

pub fn unbounded_counter_spec() -> RecSpec {
    RecSpec::parse("spec counter_unbounded\nC = inc . Cp . C ;\nCp = dec + inc . Cp . Cp ;\n")
        .expect("fixed specification")
}

pub fn unbounded_counter_alt_spec() -> RecSpec {
    RecSpec::parse("spec counter_unbounded_alt\nC = inc . (dec || C) ;\n").expect("fixed specification")
}

// ---- buffers --------------------------------------------------------------

fn seq_name(items: &[&str]) -> String {
    if items.is_empty() {
        EMPTY.to_string()
    } else if items.iter().all(|d| d.chars().count() == 1) {
        items.concat()
    } else {
        items.join(".")
    }
}

/// All sequences over `data` of length at most `l`, shortest first.
fn sequences<'a>(data: &[&'a str], l: usize) -> Vec<Vec<&'a str>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..l {
        let mut next = Vec::new();
        for s in &layer {
            for d in data {
                let mut t = vec![*d];
                t.extend(s.iter().copied());
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Bounded FIFO store: `σ --add(d)--> dσ` below capacity, `σd --rem(d)--> σ`.
pub fn buffer_with(l: usize, data: &[&str], add: &str, rem: &str) -> Lts {
    let mut b = LtsBuilder::new("buffer");
    b.initial(EMPTY);
    for s in sequences(data, l) {
        let name = seq_name(&s);
        b.state(&name);
        if s.len() < l {
            for d in data {
                let mut t = vec![*d];
                t.extend(s.iter().copied());
                b.tr(&name, &format!("{add}({d})"), &seq_name(&t));
            }
        }
        if let Some((last, rest)) = s.split_last() {
            b.tr(&name, &format!("{rem}({last})"), &seq_name(rest));
        }
    }
    for d in data {
        b.action(&format!("{add}({d})")).action(&format!("{rem}({d})"));
    }
    built(b)
}

pub fn buffer(l: usize, data: &[&str]) -> Lts {
    buffer_with(l, data, "add", "rem")
}

/// Adding to a full buffer leads to the stuck state `err`.
pub fn unreliable_buffer(l: usize, data: &[&str]) -> Lts {
    let base = buffer(l, data);
    let mut b = LtsBuilder::new("unreliable_buffer");
    b.initial(EMPTY);
    for t in base.transitions() {
        b.transition(base.state_name(t.src), t.action.clone(), base.state_name(t.dst));
    }
    for s in sequences(data, l).into_iter().filter(|s| s.len() == l) {
        for d in data {
            b.tr(&seq_name(&s), &format!("add({d})"), "err");
        }
    }
    built(b)
}

/// Two buffers chained by `trf(d)`, the same after hiding the transfers, and
/// the single buffer of the summed capacity they should behave like.
#[derive(Clone, Debug)]
pub struct BuffersPipeline {
    pub composed: Lts,
    pub hidden: Lts,
    pub target: Lts,
}

pub fn buffers_pipeline(l1: usize, l2: usize, data: &[&str]) -> BuffersPipeline {
    let b1 = buffer_with(l1, data, "add1", "rem1");
    let b2 = buffer_with(l2, data, "add2", "rem2");
    let mut g = CommFn::new();
    for d in data {
        g.insert(&format!("rem1({d})"), &format!("add2({d})"), &format!("trf({d})")).expect("labels are valid");
    }
    let h = set(data.iter().flat_map(|d| [format!("rem1({d})"), format!("add2({d})")]));
    let i = set(data.iter().map(|d| format!("trf({d})")));
    let composed = encap(&h, &parallel(&b1, &b2, &g).expect("valid comm")).expect("valid set");
    let hidden = hide(&i, &composed).expect("valid set");
    let target = buffer_with(l1 + l2, data, "add1", "rem2");
    BuffersPipeline { composed, hidden, target }
}

// ---- connections ----------------------------------------------------------

/// Ports of a three-port connection: inputs or outputs `k`, `l` and `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ports {
    pub k: u32,
    pub l: u32,
    pub m: u32,
}

impl Default for Ports {
    fn default() -> Self {
        Ports { k: 1, l: 2, m: 3 }
    }
}

/// Receives at `k` and delivers at `l` or `m`; the output port is chosen after receipt.
pub fn split_at(data: &[&str], p: Ports) -> Lts {
    let mut b = LtsBuilder::new("split");
    b.initial("*");
    for d in data {
        b.tr("*", &format!("r{}({d})", p.k), d);
        b.tr(d, &format!("s{}({d})", p.l), "*");
        b.tr(d, &format!("s{}({d})", p.m), "*");
    }
    built(b)
}

/// Like the split connection, but the output port is fixed on receipt.
pub fn split_like_at(data: &[&str], p: Ports) -> Lts {
    let mut b = LtsBuilder::new("split_like");
    let home = format!("({},*)", p.k);
    b.initial(&home);
    for d in data {
        for out in [p.l, p.m] {
            let mid = format!("({out},{d})");
            b.tr(&home, &format!("r{}({d})", p.k), &mid);
            b.tr(&mid, &format!("s{out}({d})"), &home);
        }
    }
    built(b)
}

/// Receives at `k` or `l`, remembering the port, and delivers at `m`.
pub fn merge_at(data: &[&str], p: Ports) -> Lts {
    let mut b = LtsBuilder::new("merge");
    let home = format!("({},*)", p.m);
    b.initial(&home);
    for d in data {
        for inp in [p.k, p.l] {
            let mid = format!("({inp},{d})");
            b.tr(&home, &format!("r{inp}({d})"), &mid);
            b.tr(&mid, &format!("s{}({d})", p.m), &home);
        }
    }
    built(b)
}

/// Receives at `k` or `l` and delivers at `m`, forgetting the input port.
pub fn merge_alt_at(data: &[&str], p: Ports) -> Lts {
    let mut b = LtsBuilder::new("merge_alt");
    b.initial("*");
    for d in data {
        b.tr("*", &format!("r{}({d})", p.k), d);
        b.tr("*", &format!("r{}({d})", p.l), d);
        b.tr(d, &format!("s{}({d})", p.m), "*");
    }
    built(b)
}

pub fn split(data: &[&str]) -> Lts {
    split_at(data, Ports::default())
}

pub fn split_like(data: &[&str]) -> Lts {
    split_like_at(data, Ports::default())
}

pub fn merge(data: &[&str]) -> Lts {
    merge_at(data, Ports::default())
}

pub fn merge_alt(data: &[&str]) -> Lts {
    merge_alt_at(data, Ports::default())
}

/// Consumes at `port` and never delivers.
pub fn sink(data: &[&str], port: u32) -> Lts {
    let mut b = LtsBuilder::new("sink");
    b.initial("*");
    for d in data {
        b.tr("*", &format!("r{port}({d})"), "*");
    }
    built(b)
}

/// An order-preserving wire from port `input` to port `output`, holding at
/// most `capacity` data.
pub fn wire(data: &[&str], input: u32, output: u32, capacity: usize) -> Lts {
    let mut b = buffer_with(capacity, data, &format!("r{input}"), &format!("s{output}"));
    b = b.with_name("wire");
    b
}

/// The merge connection whose output is fed back into its second input
/// through a wire of the given capacity, with the internal ports blocked
/// and hidden.
#[derive(Clone, Debug)]
pub struct FeedbackSystem {
    pub composed: Lts,
    pub hidden: Lts,
    pub sink: Lts,
}

pub fn merge_with_feedback(data: &[&str], capacity: usize) -> FeedbackSystem {
    let p = Ports::default();
    let g = CommFn::handshaking(data.iter().copied(), [p.m, p.l]);
    let h = set(data.iter().flat_map(|d| {
        [p.m, p.l].into_iter().flat_map(move |i| [format!("s{i}({d})"), format!("r{i}({d})")])
    }));
    let i = set(data.iter().flat_map(|d| [p.m, p.l].into_iter().map(move |i| format!("c{i}({d})"))));
    let both = parallel(&merge_alt_at(data, p), &wire(data, p.m, p.l, capacity), &g).expect("valid comm");
    let composed = encap(&h, &both).expect("valid set");
    let hidden = hide(&i, &composed).expect("valid set");
    FeedbackSystem { composed, hidden, sink: sink(data, p.k) }
}

// ---- silent-step examples -------------------------------------------------

/// A pair whose silent step changes what can happen next; not branching bisimilar.
pub fn non_inert_pair() -> (Lts, Lts) {
    let mut a = LtsBuilder::new("non_inert_a");
    a.initial("(*,0)");
    a.tr("(*,0)", "r1(d)", "(d,1)");
    a.tr("(d,1)", "s2(d)", "(*,0)");
    a.tr("(d,1)", "tau", "(d,2)");
    a.tr("(d,2)", "s3(d)", "(*,0)");
    let mut b = LtsBuilder::new("non_inert_b");
    b.initial("(*,0)");
    b.tr("(*,0)", "r1(d)", "(d,1)");
    b.tr("(d,1)", "s2(d)", "(*,0)");
    b.tr("(d,1)", "s3(d)", "(*,0)");
    (built(a), built(b))
}

/// A pair differing only by an inert silent step; branching bisimilar.
pub fn inert_pair() -> (Lts, Lts) {
    let mut a = LtsBuilder::new("inert_a");
    a.initial("(*,0)");
    a.tr("(*,0)", "r1(d)", "(d,1)");
    a.tr("(d,1)", "tau", "(d,2)");
    a.tr("(d,2)", "s2(d)", "(*,0)");
    let mut b = LtsBuilder::new("inert_b");
    b.initial("(*,0)");
    b.tr("(*,0)", "r1(d)", "(d,1)");
    b.tr("(d,1)", "s2(d)", "(*,0)");
    (built(a), built(b))
}

// ---- alternating bit protocol --------------------------------------------

const BITS: [&str; 2] = ["0", "1"];

fn flip(b: &str) -> &'static str {
    if b == "0" {
        "1"
    } else {
        "0"
    }
}

fn frames<'a>(data: &[&'a str]) -> Vec<(&'a str, &'static str)> {
    data.iter().flat_map(|d| BITS.iter().map(move |b| (*d, *b))).collect()
}

/// States `(d,b,i)`: waiting for data, sending a frame, awaiting the acknowledgement.
pub fn abp_sender(data: &[&str]) -> Lts {
    let mut s = LtsBuilder::new("abp_sender");
    s.initial("(*,0,0)");
    for d in data {
        for b in BITS {
            let nb = flip(b);
            s.tr(&format!("(*,{b},0)"), &format!("r1({d})"), &format!("({d},{b},1)"));
            s.tr(&format!("({d},{b},1)"), &format!("s3({d},{b})"), &format!("({d},{b},2)"));
            s.tr(&format!("({d},{b},2)"), &format!("r5({b})"), &format!("(*,{nb},0)"));
            s.tr(&format!("({d},{b},2)"), &format!("r5({nb})"), &format!("({d},{b},1)"));
            s.tr(&format!("({d},{b},2)"), "r5(*)", &format!("({d},{b},1)"));
        }
    }
    built(s)
}

/// States `(d,b,i)`: waiting for a frame, delivering data, acknowledging.
pub fn abp_receiver(data: &[&str]) -> Lts {
    let mut r = LtsBuilder::new("abp_receiver");
    r.initial("(*,0,0)");
    for b in BITS {
        let nb = flip(b);
        for d in data {
            r.tr(&format!("(*,{b},0)"), &format!("r4({d},{b})"), &format!("({d},{b},1)"));
            r.tr(&format!("(*,{b},0)"), &format!("r4({d},{nb})"), &format!("(*,{nb},2)"));
            r.tr(&format!("({d},{b},1)"), &format!("s2({d})"), &format!("(*,{b},2)"));
        }
        r.tr(&format!("(*,{b},0)"), "r4(*)", &format!("(*,{nb},2)"));
        r.tr(&format!("(*,{b},2)"), &format!("s6({b})"), &format!("(*,{nb},0)"));
    }
    built(r)
}

/// Frame channel that may corrupt: `i` chooses between delivery and `*`.
pub fn abp_channel_k(data: &[&str]) -> Lts {
    let mut k = LtsBuilder::new("abp_channel_k");
    k.initial("(*,0)");
    for (d, b) in frames(data) {
        let f = format!("({d},{b})");
        k.tr("(*,0)", &format!("r3({d},{b})"), &format!("({f},1)"));
        k.tr(&format!("({f},1)"), "i", &format!("({f},2)"));
        k.tr(&format!("({f},1)"), "i", &format!("({f},3)"));
        k.tr(&format!("({f},2)"), &format!("s4({d},{b})"), "(*,0)");
        k.tr(&format!("({f},3)"), "s4(*)", "(*,0)");
    }
    built(k)
}

/// Acknowledgement channel that may corrupt.
pub fn abp_channel_l() -> Lts {
    let mut l = LtsBuilder::new("abp_channel_l");
    l.initial("(*,0)");
    for b in BITS {
        l.tr("(*,0)", &format!("r6({b})"), &format!("({b},1)"));
        l.tr(&format!("({b},1)"), "i", &format!("({b},2)"));
        l.tr(&format!("({b},1)"), "i", &format!("({b},3)"));
        l.tr(&format!("({b},2)"), &format!("s5({b})"), "(*,0)");
        l.tr(&format!("({b},3)"), "s5(*)", "(*,0)");
    }
    built(l)
}

/// Values carried on each internal port.
fn abp_port_values(data: &[&str]) -> Vec<(u32, Vec<String>)> {
    let f: Vec<String> = frames(data).into_iter().map(|(d, b)| format!("{d},{b}")).collect();
    let mut f_err = f.clone();
    f_err.push("*".into());
    let bits: Vec<String> = BITS.iter().map(|b| b.to_string()).collect();
    let mut b_err = bits.clone();
    b_err.push("*".into());
    vec![(3, f), (4, f_err), (5, b_err), (6, bits)]
}

/// Handshaking on ports 3 to 6.
pub fn abp_comm(data: &[&str]) -> CommFn {
    let mut g = CommFn::new();
    for (i, vals) in abp_port_values(data) {
        for v in vals {
            g.insert(&format!("s{i}({v})"), &format!("r{i}({v})"), &format!("c{i}({v})")).expect("labels are valid");
        }
    }
    g
}

/// Sends and receives on the internal ports.
pub fn abp_blocked(data: &[&str]) -> BTreeSet<String> {
    set(abp_port_values(data)
        .into_iter()
        .flat_map(|(i, vals)| vals.into_iter().flat_map(move |v| [format!("s{i}({v})"), format!("r{i}({v})")])))
}

/// Communications on the internal ports and the channels' `i`.
pub fn abp_internal(data: &[&str]) -> BTreeSet<String> {
    let mut s = set(abp_port_values(data).into_iter().flat_map(|(i, vals)| vals.into_iter().map(move |v| format!("c{i}({v})"))));
    s.insert("i".into());
    s
}

pub fn abp_composed(data: &[&str]) -> Lts {
    let parts = [abp_sender(data), abp_channel_k(data), abp_channel_l(), abp_receiver(data)];
    let all = parallel_all(&parts, &abp_comm(data)).expect("valid comm");
    encap(&abp_blocked(data), &all).expect("valid set").with_name("abp")
}

pub fn abp_hidden(data: &[&str]) -> Lts {
    hide(&abp_internal(data), &abp_composed(data)).expect("valid set").with_name("abp_hidden")
}

/// The one-place buffer from port 1 to port 2.
pub fn one_place_buffer(data: &[&str]) -> Lts {
    let mut b = LtsBuilder::new("buffer1");
    b.initial("*");
    for d in data {
        b.tr("*", &format!("r1({d})"), d);
        b.tr(d, &format!("s2({d})"), "*");
    }
    built(b)
}

#[derive(Clone, Debug)]
pub struct AbpPipeline {
    pub composed: Lts,
    pub hidden: Lts,
    pub target_buffer: Lts,
}

pub fn abp_pipeline(data: &[&str]) -> AbpPipeline {
    let composed = abp_composed(data);
    let hidden = hide(&abp_internal(data), &composed).expect("valid set").with_name("abp_hidden");
    AbpPipeline { composed, hidden, target_buffer: one_place_buffer(data) }
}

fn sum_over<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> String) -> String {
    let parts: Vec<String> = items.into_iter().map(f).collect();
    if parts.is_empty() {
        "delta".into()
    } else {
        parts.join(" + ")
    }
}

fn spec(text: &str) -> RecSpec {
    RecSpec::parse(text).expect("generated specification parses")
}

pub fn abp_sender_spec(data: &[&str]) -> RecSpec {
    let mut t = String::from("spec abp_sender\nS = S'(0) ;\n");
    for b in BITS {
        let nb = flip(b);
        t += &format!("S'({b}) = {} ;\n", sum_over(data, |d| format!("r1({d}) . s3({d},{b}) . S''({d},{b})")));
        for d in data {
            t += &format!(
                "S''({d},{b}) = (r5({nb}) + r5(*)) . s3({d},{b}) . S''({d},{b}) + r5({b}) . S'({nb}) ;\n"
            );
        }
    }
    spec(&t)
}

pub fn abp_receiver_spec(data: &[&str]) -> RecSpec {
    let mut t = String::from("spec abp_receiver\nR = R'(0) ;\n");
    for b in BITS {
        let nb = flip(b);
        let wrong = sum_over(data, |d| format!("r4({d},{nb})"));
        let right = sum_over(data, |d| format!("r4({d},{b}) . s2({d}) . s6({b}) . R'({nb})"));
        t += &format!("R'({b}) = ({wrong} + r4(*)) . s6({nb}) . R'({b}) + {right} ;\n");
    }
    spec(&t)
}

pub fn abp_channel_k_spec(data: &[&str]) -> RecSpec {
    let body = sum_over(frames(data), |(d, b)| format!("r3({d},{b}) . (i . s4({d},{b}) + i . s4(*)) . K"));
    spec(&format!("spec abp_channel_k\nK = {body} ;\n"))
}

pub fn abp_channel_l_spec() -> RecSpec {
    let body = sum_over(BITS, |b| format!("r6({b}) . (i . s5({b}) + i . s5(*)) . L"));
    spec(&format!("spec abp_channel_l\nL = {body} ;\n"))
}

/// The binary memory cell as a linear specification.
pub fn memory_cell_spec() -> RecSpec {
    spec("spec memory_cell\nM = M'(0) ;\nM'(0) = rtr(0) . M'(0) + sto(0) . M'(0) + sto(1) . M'(1) ;\n\
          M'(1) = rtr(1) . M'(1) + sto(1) . M'(1) + sto(0) . M'(0) ;\n")
}

/// The bounded buffer of capacity 2 over `{0,1}`, one variable per content.
pub fn buffer2_spec() -> RecSpec {
    let mut t = String::from("spec buffer2\nB = add(0) . B'(0) + add(1) . B'(1) ;\n");
    for d in BITS {
        t += &format!("B'({d}) = rem({d}) . B + add(0) . rem({d}) . B'(0) + add(1) . rem({d}) . B'(1) ;\n");
    }
    spec(&t)
}

// ---- nets -----------------------------------------------------------------

fn tr(pre: &[&str], label: &str, post: &[&str]) -> NetTransition {
    NetTransition {
        pre: pre.iter().map(|p| p.to_string()).collect(),
        label: if label == "tau" { Action::Tau } else { Action::visible(label) },
        post: post.iter().map(|p| p.to_string()).collect(),
    }
}

fn net(name: &str, places: &[String], transitions: Vec<NetTransition>, initial: &[String]) -> Net {
    Net::new(name, places.iter().cloned(), [], transitions, Marking::from_set(initial.iter().cloned()))
        .expect("model net is well formed")
}

/// Two places per bit value; storing the other value moves both tokens.
pub fn memory_cell() -> Net {
    let places: Vec<String> = BITS.iter().flat_map(|b| [format!("({b},rtr)"), format!("({b},sto)")]).collect();
    let mut ts = Vec::new();
    for b in BITS {
        let nb = flip(b);
        let (rtr, sto) = (format!("({b},rtr)"), format!("({b},sto)"));
        let (nrtr, nsto) = (format!("({nb},rtr)"), format!("({nb},sto)"));
        ts.push(tr(&[&rtr], &format!("rtr({b})"), &[&rtr]));
        ts.push(tr(&[&sto], &format!("sto({b})"), &[&sto]));
        ts.push(tr(&[&rtr, &sto], &format!("sto({nb})"), &[&nrtr, &nsto]));
    }
    net("memory_cell", &places, ts, &["(0,rtr)".into(), "(0,sto)".into()])
}

fn nxt(i: usize, n: usize) -> usize {
    if i < n {
        i + 1
    } else {
        1
    }
}

/// Processes `1..=n` started in cyclic order.
pub fn scheduler_net(n: usize) -> Net {
    let mut places = Vec::new();
    let mut ts = Vec::new();
    let mut init = Vec::new();
    for i in 1..=n {
        let (idle, busy, sch) = (format!("({i},idle)"), format!("({i},busy)"), format!("({i},sch)"));
        let next = format!("({},sch)", nxt(i, n));
        ts.push(tr(&[&idle, &sch], &format!("start({i})"), &[&busy, &next]));
        ts.push(tr(&[&busy], &format!("finish({i})"), &[&idle]));
        init.push(idle.clone());
        places.extend([idle, busy, sch]);
    }
    init.push("(1,sch)".into());
    net("scheduler", &places, ts, &init)
}

/// One scheduled process on its own: `request(i)` then `finish(i)`.
pub fn scheduler_process_net(i: usize) -> Net {
    let (idle, busy) = (format!("({i},idle)"), format!("({i},busy)"));
    let ts = vec![
        tr(&[&idle], &format!("request({i})"), &[&busy]),
        tr(&[&busy], &format!("finish({i})"), &[&idle]),
    ];
    net(&format!("process{i}"), &[idle.clone(), busy], ts, &[idle])
}

/// The scheduler on its own, granting in cyclic order.
pub fn scheduler_control_net(n: usize) -> Net {
    let places: Vec<String> = (1..=n).map(|i| format!("({i},sch)")).collect();
    let ts = (1..=n)
        .map(|i| tr(&[&format!("({i},sch)")], &format!("grant({i})"), &[&format!("({},sch)", nxt(i, n))]))
        .collect();
    net("control", &places, ts, &["(1,sch)".into()])
}

/// `request(i) | grant(i) = start(i)`.
pub fn scheduler_comm(n: usize) -> CommFn {
    let mut g = CommFn::new();
    for i in 1..=n {
        g.insert(&format!("request({i})"), &format!("grant({i})"), &format!("start({i})")).expect("labels are valid");
    }
    g
}

pub fn scheduler_blocked(n: usize) -> BTreeSet<String> {
    set((1..=n).flat_map(|i| [format!("request({i})"), format!("grant({i})")]))
}

/// The scheduled processes and the scheduler as a recursive specification;
/// the root composes them.
pub fn scheduler_specs(n: usize) -> RecSpec {
    let h: Vec<String> = scheduler_blocked(n).into_iter().collect();
    let procs: Vec<String> = (1..=n).map(|i| format!("P({i})")).collect();
    let mut t = format!("spec scheduler\nSys = encap({{{}}}, {} || Sch) ;\n", h.join(", "), procs.join(" || "));
    for i in 1..=n {
        t += &format!("P({i}) = request({i}) . finish({i}) . P({i}) ;\n");
    }
    let grants: Vec<String> = (1..=n).map(|i| format!("grant({i})")).collect();
    t += &format!("Sch = {} . Sch ;\n", grants.join(" . "));
    spec(&t)
}

/// The bounded counter with bound 2 as a net whose markings are singletons.
pub fn counter_net() -> Net {
    let places: Vec<String> = (0..=2).map(|i| i.to_string()).collect();
    let mut ts = Vec::new();
    for i in 0..2 {
        let (a, b) = (i.to_string(), (i + 1).to_string());
        ts.push(tr(&[&a], "inc", &[&b]));
        ts.push(tr(&[&b], "dec", &[&a]));
    }
    net("counter_net", &places, ts, &["0".into()])
}

/// A bound-2 counter whose increments and decrements are independent, linked by a silent step.
pub fn counter_net_concurrent() -> Net {
    let places: Vec<String> = (0..=3).map(|i| i.to_string()).collect();
    let ts = vec![tr(&["0"], "inc", &["1"]), tr(&["1", "2"], "tau", &["0", "3"]), tr(&["3"], "dec", &["2"])];
    net("counter_net_concurrent", &places, ts, &["0".into(), "2".into()])
}

// ---- programs -------------------------------------------------------------

fn flow(name: &str, edges: &[(u32, &str, u32)], terminal: Option<u32>) -> Lts {
    let mut b = LtsBuilder::new(name);
    b.initial("0");
    for (s, l, d) in edges {
        b.tr(&s.to_string(), l, &d.to_string());
    }
    if let Some(t) = terminal {
        b.terminating(&t.to_string());
    }
    built(b)
}

/// Program-counter flow of the factorial program.
pub fn factorial_flow() -> Lts {
    flow(
        "factorial",
        &[
            (0, "read(n)", 1),
            (1, "i:=0", 2),
            (2, "f:=1", 3),
            (3, "i<n", 4),
            (4, "i:=i+1", 5),
            (5, "f:=f*i", 3),
            (3, "NOT(i<n)", 6),
            (6, "write(f)", 7),
        ],
        Some(7),
    )
}

/// Program-counter flow of the greatest common divisor program.
pub fn gcd_flow() -> Lts {
    flow(
        "gcd",
        &[
            (0, "read(m)", 1),
            (1, "read(n)", 2),
            (2, "m>n", 3),
            (3, "m:=m-n", 2),
            (2, "NOT(m>n)", 4),
            (4, "n>m", 5),
            (5, "n:=n-m", 4),
            (4, "NOT(n>m)", 6),
            (6, "NOT(m=n)", 2),
            (6, "m=n", 7),
            (7, "write(m)", 8),
        ],
        Some(8),
    )
}

/// Flow of one component of the two-process mutual exclusion protocol.
pub fn peterson_flow(me: u32) -> Lts {
    let other = 1 - me;
    let wait = format!("c{other}=false_OR_t={other}");
    let labels = [
        "true".to_string(),
        format!("c{me}:=true"),
        format!("t:={me}"),
        format!("NOT({wait})"),
        wait,
        format!("enter{me}"),
        format!("leave{me}"),
        format!("c{me}:=false"),
        "NOT(true)".to_string(),
    ];
    let edges = [(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 3), (3, 4, 4), (4, 5, 5), (5, 6, 6), (6, 7, 0), (0, 8, 7)];
    let mut b = LtsBuilder::new(format!("p{me}"));
    b.initial("0");
    for (s, l, d) in edges {
        b.tr(&s.to_string(), &labels[l], &d.to_string());
    }
    built(b)
}

const OPERATORS: [&str; 6] = ["add", "sub", "mul", "div", "eq", "clr"];

/// The calculator on integers in `min..=max`.
pub fn calculator(min: i64, max: i64) -> Lts {
    let mut b = LtsBuilder::new("calculator");
    b.initial("(*,*)");
    let in_range = |v: i64| (min..=max).contains(&v);
    for i in min..=max {
        b.tr("(*,*)", &format!("rd({i})"), &format!("({i},*)"));
        b.tr(&format!("({i},clr)"), "wr(0)", "(*,*)");
        b.tr(&format!("({i},eq)"), &format!("wr({i})"), &format!("({i},*)"));
        for o in OPERATORS {
            b.tr(&format!("({i},*)"), &format!("rd({o})"), &format!("({i},{o})"));
        }
        for j in min..=max {
            let results = [
                ("add", Some(i + j)),
                ("sub", Some(i - j)),
                ("mul", Some(i * j)),
                ("div", if j != 0 { Some(i.div_euclid(j)) } else { None }),
            ];
            for (o, r) in results {
                if let Some(r) = r.filter(|&r| in_range(r)) {
                    b.tr(&format!("({i},{o})"), &format!("rd({j})"), &format!("({r},*)"));
                }
            }
        }
    }
    built(b)
}

// ---- workcell -------------------------------------------------------------

/// Controller, workstation, transport service and quality checker of a
/// workcell producing at most `bound` products per order from `products`.
/// The root equation composes them with the internal ports blocked and hidden.
pub fn workcell_spec(bound: usize, products: &[&str]) -> RecSpec {
    let outs: Vec<(String, bool)> = products
        .iter()
        .flat_map(|p| [(format!("proc({p},ok)"), true), (format!("proc({p},nok)"), false)])
        .collect();
    let code = |q: &str| q.replace("proc(", "").replace([')', ','], "");
    let seq_var = |n: usize, s: &[String]| {
        let body: Vec<String> = s.iter().map(|q| code(q)).collect();
        format!("T'({n},{})", if body.is_empty() { "e".into() } else { body.join(".") })
    };
    let orders = 0..=bound;
    let (h, i) = workcell_sets(bound, &outs.iter().map(|(q, _)| q.clone()).collect::<Vec<_>>());
    let mut t = format!(
        "spec workcell\nSys = hide({{{}}}, encap({{{}}}, C || W || T || Q)) ;\n",
        i.into_iter().collect::<Vec<_>>().join(", "),
        h.into_iter().collect::<Vec<_>>().join(", ")
    );
    // Controller.
    t += &format!("C = {} ;\n", sum_over(orders.clone(), |n| format!("r1(produce({n})) . C'({n})")));
    t += "C'(0) = s2(ready) . C ;\n";
    for n in 1..=bound {
        t += &format!("C'({n}) = s7(produce({n})) . s5(produce({n})) . s3(produce({n})) . C''(0) ;\n");
    }
    for n in 0..=bound {
        let done = format!("r8(ready) . r6(ready) . r4(ready) . C'({n})");
        if n < bound {
            t += &format!("C''({n}) = {done} + r8(reject) . C''({}) ;\n", n + 1);
        } else {
            t += &format!("C''({n}) = {done} ;\n");
        }
    }
    // Workstation.
    t += &format!("W = {} ;\n", sum_over(orders.clone(), |n| format!("r3(produce({n})) . W'({n})")));
    t += "W'(0) = s4(ready) . W ;\n";
    for n in 1..=bound {
        let body = sum_over(products, |p| {
            format!("r9({p}) . (i . s10(proc({p},ok)) + i . s10(proc({p},nok))) . W'({})", n - 1)
        });
        t += &format!("W'({n}) = {body} ;\n");
    }
    // Transport service: T'(n, σ) with n products still to accept and σ in transit.
    t += &format!("T = {} ;\n", sum_over(orders.clone(), |n| format!("r5(produce({n})) . {}", seq_var(n, &[]))));
    let mut stack: Vec<(usize, Vec<String>)> = (0..=bound).map(|n| (n, Vec::new())).collect();
    let mut seen = BTreeSet::new();
    while let Some((n, s)) = stack.pop() {
        if !seen.insert((n, s.clone())) {
            continue;
        }
        let lhs = seq_var(n, &s);
        let mut summands = Vec::new();
        if n == 0 && s.is_empty() {
            summands.push("s6(ready) . T".to_string());
        }
        if n > 0 {
            for (q, _) in &outs {
                let mut next = vec![q.clone()];
                next.extend(s.iter().cloned());
                summands.push(format!("r10({q}) . {}", seq_var(n - 1, &next)));
                stack.push((n - 1, next));
            }
        }
        if let Some((last, rest)) = s.split_last() {
            summands.push(format!("s11({last}) . {}", seq_var(n, rest)));
            stack.push((n, rest.to_vec()));
        }
        t += &format!("{lhs} = {} ;\n", summands.join(" + "));
    }
    // Quality checker.
    t += &format!("Q = {} ;\n", sum_over(orders, |n| format!("r7(produce({n})) . Q'({n})")));
    t += "Q'(0) = s8(ready) . Q ;\n";
    for n in 1..=bound {
        let body = sum_over(&outs, |(q, ok)| {
            if *ok {
                format!("r11({q}) . s12({q}) . Q'({})", n - 1)
            } else {
                format!("r11({q}) . s8(reject) . Q'({})", n - 1)
            }
        });
        t += &format!("Q'({n}) = {body} ;\n");
    }
    spec(&t)
}

fn workcell_messages(bound: usize, outs: &[String]) -> Vec<(u32, String)> {
    let mut m = Vec::new();
    for i in [3, 5, 7] {
        m.extend((0..=bound).map(|n| (i, format!("produce({n})"))));
    }
    for i in [4, 6, 8] {
        m.extend(["ready", "reject"].map(|x| (i, x.to_string())));
    }
    for i in [10, 11] {
        m.extend(outs.iter().map(|q| (i, q.clone())));
    }
    m
}

fn workcell_sets(bound: usize, outs: &[String]) -> (BTreeSet<String>, BTreeSet<String>) {
    let msgs = workcell_messages(bound, outs);
    let h = set(msgs.iter().flat_map(|(i, x)| [format!("s{i}({x})"), format!("r{i}({x})")]));
    let mut i = set(msgs.iter().map(|(i, x)| format!("c{i}({x})")));
    i.insert("i".into());
    (h, i)
}

/// Handshaking on the workcell's internal ports.
pub fn workcell_comm(bound: usize, products: &[&str]) -> CommFn {
    let outs: Vec<String> =
        products.iter().flat_map(|p| [format!("proc({p},ok)"), format!("proc({p},nok)")]).collect();
    let mut g = CommFn::new();
    for (i, x) in workcell_messages(bound, &outs) {
        g.insert(&format!("s{i}({x})"), &format!("r{i}({x})"), &format!("c{i}({x})")).expect("labels are valid");
    }
    g
}

// ---- catalog --------------------------------------------------------------

/// Anything [`build`] can produce.
#[derive(Clone, Debug)]
pub enum Model {
    Lts(Lts),
    Net(Net),
    Spec(RecSpec),
}

/// Every name [`build`] accepts, with its parameters.
pub const CATALOG: &[(&str, &str)] = &[
    ("counter", "k"),
    ("counter_mod", "k"),
    ("unreliable_counter", "k"),
    ("staircase", "k"),
    ("counter_unbounded", ""),
    ("buffer", "l D"),
    ("unreliable_buffer", "l D"),
    ("split", "D"),
    ("split_like", "D"),
    ("merge", "D"),
    ("merge_alt", "D"),
    ("sink", "D"),
    ("wire", "D W"),
    ("merge_feedback", "D W"),
    ("non_inert_a", ""),
    ("non_inert_b", ""),
    ("inert_a", ""),
    ("inert_b", ""),
    ("abp_sender", "D"),
    ("abp_receiver", "D"),
    ("abp_channel_k", "D"),
    ("abp_channel_l", ""),
    ("abp_composed", "D"),
    ("abp_hidden", "D"),
    ("buffer1", "D"),
    ("abp_sender_spec", "D"),
    ("abp_receiver_spec", "D"),
    ("abp_channel_k_spec", "D"),
    ("abp_channel_l_spec", ""),
    ("memory_cell", ""),
    ("memory_cell_spec", ""),
    ("buffer2_spec", ""),
    ("scheduler", "n"),
    ("scheduler_specs", "n"),
    ("counter_net", ""),
    ("counter_net_concurrent", ""),
    ("factorial", ""),
    ("gcd", ""),
    ("peterson_p0", ""),
    ("peterson_p1", ""),
    ("calculator", "min max"),
    ("workcell", "N P"),
];

fn param<'a>(params: &'a BTreeMap<String, String>, key: &str, default: &'a str) -> &'a str {
    params.get(key).map(String::as_str).unwrap_or(default)
}

fn number(params: &BTreeMap<String, String>, key: &str, default: &str, lo: i64, hi: i64) -> Result<i64, ModelError> {
    let raw = param(params, key, default);
    let v: i64 = raw.parse().map_err(|_| ModelError::OutOfRange(format!("{key}={raw} is not a number")))?;
    if !(lo..=hi).contains(&v) {
        return Err(ModelError::OutOfRange(format!("{key}={v} outside {lo}..={hi}")));
    }
    Ok(v)
}

fn data_param<'a>(params: &'a BTreeMap<String, String>, key: &str, default: &'a str) -> Result<Vec<&'a str>, ModelError> {
    let raw = param(params, key, default);
    let items: Vec<&str> = raw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let distinct: BTreeSet<&str> = items.iter().copied().collect();
    if items.is_empty() || items.len() > MAX_DATA || distinct.len() != items.len() {
        return Err(ModelError::OutOfRange(format!("{key}={raw}: give 1 to {MAX_DATA} distinct values")));
    }
    if items.iter().any(|d| !d.chars().all(|c| c.is_ascii_alphanumeric())) {
        return Err(ModelError::OutOfRange(format!("{key}={raw}: values must be alphanumeric")));
    }
    Ok(items)
}

/// Builds a catalogued example. `params` holds `k`, `l`, `n`, `W`, `N`,
/// `min`, `max` as numbers and `D`, `P` as comma-separated values.
pub fn build(name: &str, params: &BTreeMap<String, String>) -> Result<Model, ModelError> {
    let k = || number(params, "k", "3", 0, MAX_COUNTER as i64).map(|v| v as usize);
    let l = || number(params, "l", "2", 0, MAX_BUFFER as i64).map(|v| v as usize);
    let n = || number(params, "n", "3", 2, MAX_PROCESSES as i64).map(|v| v as usize);
    let w = || number(params, "W", "2", 1, MAX_WIRE as i64).map(|v| v as usize);
    let d = || data_param(params, "D", "0,1");
    Ok(match name {
        "counter" => Model::Lts(counter(k()?)),
        "counter_mod" => Model::Lts(counter_mod(k()?)),
        "unreliable_counter" => Model::Lts(unreliable_counter(k()?)),
        "staircase" => Model::Lts(staircase(k()?)),
        "counter_unbounded" => Model::Spec(unbounded_counter_spec()),
        "buffer" => Model::Lts(buffer(l()?, &d()?)),
        "unreliable_buffer" => Model::Lts(unreliable_buffer(l()?, &d()?)),
        "split" => Model::Lts(split(&d()?)),
        "split_like" => Model::Lts(split_like(&d()?)),
        "merge" => Model::Lts(merge(&d()?)),
        "merge_alt" => Model::Lts(merge_alt(&d()?)),
        "sink" => Model::Lts(sink(&d()?, 1)),
        "wire" => Model::Lts(wire(&d()?, 3, 2, w()?)),
        "merge_feedback" => Model::Lts(merge_with_feedback(&d()?, w()?).hidden),
        "non_inert_a" => Model::Lts(non_inert_pair().0),
        "non_inert_b" => Model::Lts(non_inert_pair().1),
        "inert_a" => Model::Lts(inert_pair().0),
        "inert_b" => Model::Lts(inert_pair().1),
        "abp_sender" => Model::Lts(abp_sender(&d()?)),
        "abp_receiver" => Model::Lts(abp_receiver(&d()?)),
        "abp_channel_k" => Model::Lts(abp_channel_k(&d()?)),
        "abp_channel_l" => Model::Lts(abp_channel_l()),
        "abp_composed" => Model::Lts(abp_composed(&d()?)),
        "abp_hidden" => Model::Lts(abp_hidden(&d()?)),
        "buffer1" => Model::Lts(one_place_buffer(&d()?)),
        "abp_sender_spec" => Model::Spec(abp_sender_spec(&d()?)),
        "abp_receiver_spec" => Model::Spec(abp_receiver_spec(&d()?)),
        "abp_channel_k_spec" => Model::Spec(abp_channel_k_spec(&d()?)),
        "abp_channel_l_spec" => Model::Spec(abp_channel_l_spec()),
        "memory_cell" => Model::Net(memory_cell()),
        "memory_cell_spec" => Model::Spec(memory_cell_spec()),
        "buffer2_spec" => Model::Spec(buffer2_spec()),
        "scheduler" => Model::Net(scheduler_net(n()?)),
        "scheduler_specs" => Model::Spec(scheduler_specs(n()?)),
        "counter_net" => Model::Net(counter_net()),
        "counter_net_concurrent" => Model::Net(counter_net_concurrent()),
        "factorial" => Model::Lts(factorial_flow()),
        "gcd" => Model::Lts(gcd_flow()),
        "peterson_p0" => Model::Lts(peterson_flow(0)),
        "peterson_p1" => Model::Lts(peterson_flow(1)),
        "calculator" => {
            let min = number(params, "min", "0", -10, 10)?;
            let max = number(params, "max", "2", min, 10)?;
            Model::Lts(calculator(min, max))
        }
        "workcell" => {
            let bound = number(params, "N", "1", 1, MAX_WORKCELL as i64)? as usize;
            let products = data_param(params, "P", "p")?;
            if products.len() > 1 {
                return Err(ModelError::OutOfRange("P: at most one product kind".into()));
            }
            Model::Spec(workcell_spec(bound, &products))
        }
        other => return Err(ModelError::Unknown(other.to_string())),
    })
}

/// `tau . a` as a closed term; used with `a` to show that a leading silent
/// step is invisible to branching but not to rooted branching bisimilarity.
pub fn leading_silent_step() -> (ProcExpr, ProcExpr) {
    (parse_expr("tau . a").expect("fixed term"), parse_expr("a").expect("fixed term"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::{branching_bisim, is_determinate, rooted_branching_bisim, strong_bisim, trace_eq};
    use crate::petri::trsy;
    use crate::recspec::unfold;

    #[test]
    fn counter_shapes() {
        let c = counter(3);
        assert_eq!(c.num_states(), 4);
        assert_eq!(c.transitions().len(), 6);
        assert_eq!(counter_mod(3).transitions().len(), 8);
        assert_eq!(unreliable_counter(3).num_states(), 5);
    }

    #[test]
    fn buffer_has_seven_states() {
        let b = buffer(2, &["0", "1"]);
        assert_eq!(b.num_states(), 7);
        let names: BTreeSet<&str> = b.states().iter().map(String::as_str).collect();
        assert_eq!(names, BTreeSet::from(["ε", "0", "1", "00", "10", "01", "11"]));
        let u = unreliable_buffer(2, &["0", "1"]);
        assert!(u.state_id("err").is_some());
        assert_eq!(u.transitions().len(), b.transitions().len() + 8);
    }

    #[test]
    fn two_buffers_behave_like_one() {
        for (l1, l2) in [(1, 1), (1, 2)] {
            let p = buffers_pipeline(l1, l2, &["0", "1"]);
            assert!(branching_bisim(&p.hidden, &p.target).equivalent);
        }
    }

    #[test]
    fn split_and_merge() {
        let d = ["0", "1"];
        assert!(trace_eq(&split(&d), &split_like(&d)).equivalent);
        assert!(!strong_bisim(&split(&d), &split_like(&d)).equivalent);
        assert!(strong_bisim(&merge(&d), &merge_alt(&d)).equivalent);
    }

    #[test]
    fn abp_component_sizes() {
        assert_eq!(abp_sender(&["d"]).num_states(), 6);
        assert_eq!(abp_receiver(&["d"]).num_states(), 6);
        assert_eq!(abp_channel_k(&["d"]).num_states(), 7);
        assert_eq!(abp_channel_l().num_states(), 7);
        assert!(!is_determinate(&abp_channel_k(&["d"])));
    }

    #[test]
    fn abp_behaves_as_one_place_buffer() {
        let p = abp_pipeline(&["d"]);
        assert_eq!(p.hidden.reach().len(), 36);
        assert!(branching_bisim(&p.hidden, &p.target_buffer).equivalent);
        assert!(rooted_branching_bisim(&p.hidden, &p.target_buffer).equivalent);
        assert!(is_determinate(&p.hidden));
    }

    #[test]
    fn abp_specs_match_components() {
        let d = ["0", "1"];
        let g = CommFn::new();
        let pairs = [
            (abp_sender_spec(&d), abp_sender(&d)),
            (abp_receiver_spec(&d), abp_receiver(&d)),
            (abp_channel_k_spec(&d), abp_channel_k(&d)),
            (abp_channel_l_spec(), abp_channel_l()),
        ];
        for (s, l) in pairs {
            let u = unfold(&s, &g, 10_000).unwrap();
            assert!(u.complete);
            assert!(rooted_branching_bisim(&u.lts, &l).equivalent, "{}", s.name());
            assert!(strong_bisim(&u.lts, &l).equivalent, "{}", s.name());
        }
    }

    #[test]
    fn tau_examples() {
        let (a, b) = non_inert_pair();
        assert!(!branching_bisim(&a, &b).equivalent);
        let (a, b) = inert_pair();
        assert!(branching_bisim(&a, &b).equivalent);
    }

    #[test]
    fn nets() {
        assert_eq!(trsy(&memory_cell(), 100).lts.num_states(), 2);
        assert_eq!(trsy(&counter_net_concurrent(), 100).lts.num_states(), 4);
        assert!(branching_bisim(&trsy(&counter_net(), 100).lts, &trsy(&counter_net_concurrent(), 100).lts).equivalent);
        let s = trsy(&scheduler_net(3), 1000);
        assert!(s.complete);
    }

    #[test]
    fn scheduler_from_components() {
        use crate::petri::{encap_net, par_nets_all};
        let n = 3;
        let mut parts: Vec<Net> = (1..=n).map(scheduler_process_net).collect();
        parts.push(scheduler_control_net(n));
        let all = par_nets_all(&parts, &scheduler_comm(n)).unwrap();
        let e = encap_net(&scheduler_blocked(n), &all).unwrap();
        let direct = scheduler_net(n);
        assert_eq!(e.places(), direct.places());
        assert_eq!(e.transitions(), direct.transitions());
        assert_eq!(e.initial(), direct.initial());
        let u = unfold(&scheduler_specs(n), &scheduler_comm(n), 10_000).unwrap();
        assert!(strong_bisim(&u.lts, &trsy(&direct, 1000).lts).equivalent);
    }

    #[test]
    fn feedback_traces_near_sink() {
        let f = merge_with_feedback(&["0", "1"], 2);
        assert!(f.hidden.traces(2).is_subset(&f.sink.traces(2)));
    }

    #[test]
    fn calculator_and_flows() {
        let c = calculator(0, 1);
        assert_eq!(c.state_id("(*,*)"), Some(c.initial()));
        assert!(c.reach().len() > 1);
        assert_eq!(factorial_flow().num_states(), 8);
        assert_eq!(gcd_flow().num_states(), 9);
        assert_eq!(peterson_flow(0).transitions().len(), 9);
    }

    #[test]
    fn workcell_unfolds() {
        let s = workcell_spec(1, &["p"]);
        assert!(s.is_guarded());
        let u = unfold(&s, &workcell_comm(1, &["p"]), 200_000).unwrap();
        assert!(u.complete);
        assert!(u.lts.num_states() > 1);
    }

    #[test]
    fn catalog_builds() {
        let none = BTreeMap::new();
        for (name, _) in CATALOG {
            build(name, &none).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(matches!(build("nope", &none), Err(ModelError::Unknown(_))));
        let big = BTreeMap::from([("k".to_string(), "100000".to_string())]);
        assert!(matches!(build("counter", &big), Err(ModelError::OutOfRange(_))));
    }
}
