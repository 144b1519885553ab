//! Closed-form one-hop observability metrics under a uniformly random
//! compromised set.
//!
//! Edge metrics depend only on (n, n_c). Node metrics additionally depend on
//! the graph, but only through its degree multiset. Every combinatorial
//! ratio is evaluated as a telescoping product of factors in [0, 1], so
//! million-node graphs stay overflow- and underflow-safe.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A closed-form metric value together with the instance it describes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactMetricResult {
    pub value: f64,
    pub n: usize,
    pub n_c: usize,
}

/// Probability that none of a node's `d` neighbors lands in a uniform
/// compromised subset of size `n_c`, i.e. C(n-1-d, n_c) / C(n-1, n_c).
///
/// The ratio telescopes to a product over min(d, n_c) factors; the two
/// orderings are algebraically identical, so the shorter one is used.
pub fn survival_ratio(n: usize, n_c: usize, d: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::input("survival ratio needs at least one node"));
    }
    if n_c > n - 1 {
        return Err(Error::input(format!(
            "n_c = {n_c} exceeds the n - 1 = {} other nodes",
            n - 1
        )));
    }
    if d > n - 1 {
        return Err(Error::input(format!(
            "degree {d} exceeds n - 1 = {} in an {n}-node simple graph",
            n - 1
        )));
    }
    Ok(survival_unchecked(n, n_c, d))
}

fn survival_unchecked(n: usize, n_c: usize, d: usize) -> f64 {
    if d + n_c > n - 1 {
        return 0.0;
    }
    let (short, long) = if d <= n_c { (d, n_c) } else { (n_c, d) };
    let mut ratio = 1.0;
    for i in 0..short {
        ratio *= (n - 1 - long - i) as f64 / (n - 1 - i) as f64;
    }
    ratio
}

/// Probability that node `u` itself or at least one neighbor is compromised.
pub fn node_observation_probability(g: &Graph, u: u32, n_c: usize) -> Result<f64> {
    let n = g.node_count();
    let d = g
        .degree(u)
        .ok_or_else(|| Error::input(format!("node {u} out of range for a {n}-node graph")))?;
    if n_c > n - 1 {
        return Err(Error::input(format!(
            "n_c = {n_c} exceeds the n - 1 = {} other nodes",
            n - 1
        )));
    }
    Ok(1.0 - survival_unchecked(n, n_c, d))
}

/// Expected fraction of all edges observed: an edge is missed only when both
/// endpoints escape the compromised set.
pub fn global_edge_observability(n: usize, n_c: usize) -> Result<ExactMetricResult> {
    if n < 2 {
        return Err(Error::input("edge observability needs at least two nodes"));
    }
    if n_c > n {
        return Err(Error::input(format!("n_c = {n_c} exceeds n = {n}")));
    }
    let nf = n as f64;
    let ncf = n_c as f64;
    let value = 1.0 - ((nf - ncf) / nf) * ((nf - 1.0 - ncf) / (nf - 1.0));
    Ok(ExactMetricResult { value, n, n_c })
}

/// Expected observed fraction of a non-compromised node's incident edges,
/// which reduces to n_c / (n - 1) regardless of structure. Undefined when
/// every node is compromised.
pub fn local_edge_observability(n: usize, n_c: usize) -> Result<ExactMetricResult> {
    if n < 2 {
        return Err(Error::input("edge observability needs at least two nodes"));
    }
    if n_c > n {
        return Err(Error::input(format!("n_c = {n_c} exceeds n = {n}")));
    }
    if n_c == n {
        return Err(Error::undefined(
            "local metrics condition on a non-compromised node",
        ));
    }
    let value = n_c as f64 / (n as f64 - 1.0);
    Ok(ExactMetricResult { value, n, n_c })
}

/// Sum over all nodes of the observation probability, accumulated over the
/// degree histogram with an incremental survival recurrence. Runs in
/// O(n + max degree); iteration order is fixed (increasing degree) so the
/// result is bit-reproducible.
fn observation_probability_sum(g: &Graph, n_c: usize) -> f64 {
    let n = g.node_count();
    let max_deg = (0..n).map(|u| g.degree(u as u32).unwrap()).max().unwrap_or(0);
    let mut hist = vec![0u64; max_deg + 1];
    for u in 0..n {
        hist[g.degree(u as u32).unwrap()] += 1;
    }
    let mut sum = 0.0;
    let mut survival = 1.0;
    for (d, &count) in hist.iter().enumerate() {
        if count > 0 {
            sum += count as f64 * (1.0 - survival);
        }
        // advance from degree d to d + 1; zero once d + 1 neighbors cannot
        // all be non-compromised
        survival = if d + n_c + 1 > n - 1 {
            0.0
        } else {
            survival * ((n - 1 - n_c - d) as f64 / (n - 1 - d) as f64)
        };
    }
    sum
}

/// Expected fraction of nodes observed among non-compromised ones (the
/// compromised nodes themselves do not count). Undefined when every node is
/// compromised.
pub fn local_node_observability(g: &Graph, n_c: usize) -> Result<ExactMetricResult> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::input("node observability needs at least one node"));
    }
    if n_c > n {
        return Err(Error::input(format!("n_c = {n_c} exceeds n = {n}")));
    }
    if n_c == n {
        return Err(Error::undefined(
            "local metrics condition on a non-compromised node",
        ));
    }
    let value = observation_probability_sum(g, n_c) / n as f64;
    Ok(ExactMetricResult { value, n, n_c })
}

/// Expected fraction of all nodes that are compromised or observed.
pub fn global_node_observability(g: &Graph, n_c: usize) -> Result<ExactMetricResult> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::input("node observability needs at least one node"));
    }
    if n_c > n {
        return Err(Error::input(format!("n_c = {n_c} exceeds n = {n}")));
    }
    if n_c == n {
        return Ok(ExactMetricResult { value: 1.0, n, n_c });
    }
    let nf = n as f64;
    let value = n_c as f64 / nf
        + (nf - n_c as f64) * observation_probability_sum(g, n_c) / (nf * nf);
    Ok(ExactMetricResult { value, n, n_c })
}
