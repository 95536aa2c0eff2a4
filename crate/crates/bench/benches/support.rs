//! Shared inputs for the benchmarks.

use prockit::compose::CommFn;
use prockit::expr::ProcExpr;
use prockit::models;
use prockit::random::{random_term, TermShape};
use prockit::Lts;
use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn data(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn refs(d: &[String]) -> Vec<&str> {
    d.iter().map(String::as_str).collect()
}

/// Hidden protocol and the one-place buffer it should behave like.
pub fn abp(n: usize) -> (Lts, Lts) {
    let d = data(n);
    let p = models::abp_pipeline(&refs(&d));
    (p.hidden, p.target_buffer)
}

/// Two chained buffers with the link hidden, and the longer buffer.
pub fn buffers(l1: usize, l2: usize, n: usize) -> (Lts, Lts) {
    let d = data(n);
    let p = models::buffers_pipeline(l1, l2, &refs(&d));
    (p.hidden, p.target)
}

/// Fixed-seed random closed terms over `a`, `b`, `c`.
pub fn terms(count: usize, size: usize) -> Vec<ProcExpr> {
    let mut rng = StdRng::seed_from_u64(7);
    let shape = TermShape::new(&["a", "b", "c"], size);
    (0..count).map(|_| random_term(&mut rng, &shape)).collect()
}

pub fn no_comm() -> CommFn {
    CommFn::default()
}
