//! Seeded Monte-Carlo estimators for every metric scope at any hop count,
//! plus an exhaustive subset-enumeration oracle for small instances.
//!
//! Reproducibility contract: each trial derives a private ChaCha stream from
//! the splitmix64 finalizer of (seed, trial index), trial results land in a
//! buffer indexed by trial number, and the reduction runs in index order.
//! Results are bit-identical for a given seed regardless of worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet, UNREACHED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricTarget {
    Edge,
    Node,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricLevel {
    Global,
    Local,
}

/// Which metric to realize: edge or node coverage, averaged globally or per
/// non-compromised node, with visibility extending `hops` steps out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ObservationScope {
    pub target: MetricTarget,
    pub level: MetricLevel,
    pub hops: usize,
}

impl ObservationScope {
    pub fn new(target: MetricTarget, level: MetricLevel, hops: usize) -> Result<Self> {
        if hops == 0 {
            return Err(Error::input("observation needs at least one hop"));
        }
        Ok(ObservationScope {
            target,
            level,
            hops,
        })
    }

    pub fn is_local(&self) -> bool {
        self.level == MetricLevel::Local
    }

    /// True when a closed form covers this scope (one hop, edge target).
    pub fn has_closed_form(&self) -> bool {
        self.hops == 1 && self.target == MetricTarget::Edge
    }
}

impl std::fmt::Display for ObservationScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let level = match self.level {
            MetricLevel::Global => "global",
            MetricLevel::Local => "local",
        };
        let target = match self.target {
            MetricTarget::Edge => "edge",
            MetricTarget::Node => "node",
        };
        write!(f, "{level}-{target} k={}", self.hops)
    }
}

/// Mean over trials with the standard error of that mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// splitmix64 finalizer over (seed, index): the trial's private sub-seed.
pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform random n_c-subset of `0..n` via a partial Fisher-Yates shuffle.
///
/// The first n_c slots of the shuffle are the sample, so for a fixed seed
/// the set at n_c is contained in the set at n_c + 1. Curves built with a
/// shared seed inherit pointwise monotonicity from this nesting.
pub fn sample_compromised(n: usize, n_c: usize, seed: u64) -> Result<NodeSet> {
    if n > u32::MAX as usize {
        return Err(Error::input(format!("node count {n} exceeds the u32 id space")));
    }
    if n_c > n {
        return Err(Error::input(format!("n_c = {n_c} exceeds n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<u32> = (0..n as u32).collect();
    for i in 0..n_c {
        let j = rng.random_range(i..n);
        ids.swap(i, j);
    }
    ids.truncate(n_c);
    Ok(NodeSet::new(ids))
}

/// The metric value realized by one concrete compromised set.
///
/// Node scopes count nodes within `hops` of the set; edge scopes count edges
/// with an endpoint within `hops - 1`. Local scopes average over
/// non-compromised nodes (for edges: non-compromised nodes with at least one
/// incident edge) and are undefined when that population is empty.
pub fn realized_metric(g: &Graph, compromised: &NodeSet, scope: ObservationScope) -> Result<f64> {
    g.check_nodes(compromised)?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::input("metrics need at least one node"));
    }
    let n_c = compromised.len();
    match scope.target {
        MetricTarget::Edge => {
            if g.edge_count() == 0 {
                return Err(Error::undefined("edge metrics on a graph with no edges"));
            }
            let dist = g.distances_capped(compromised.as_slice(), scope.hops - 1);
            match scope.level {
                MetricLevel::Global => {
                    let observed = g
                        .edges()
                        .iter()
                        .filter(|&&(u, v)| {
                            dist[u as usize] != UNREACHED || dist[v as usize] != UNREACHED
                        })
                        .count();
                    Ok(observed as f64 / g.edge_count() as f64)
                }
                MetricLevel::Local => {
                    if n_c == n {
                        return Err(Error::undefined(
                            "local metrics condition on a non-compromised node",
                        ));
                    }
                    let mut total = 0.0;
                    let mut eligible = 0usize;
                    for u in 0..n {
                        if dist[u] == 0 {
                            continue;
                        }
                        let neighbors = g.neighbors(u as u32).unwrap();
                        if neighbors.is_empty() {
                            continue;
                        }
                        eligible += 1;
                        if dist[u] != UNREACHED {
                            // u itself is within hops - 1, so every incident
                            // edge is observed
                            total += 1.0;
                        } else {
                            let seen = neighbors
                                .iter()
                                .filter(|&&v| dist[v as usize] != UNREACHED)
                                .count();
                            total += seen as f64 / neighbors.len() as f64;
                        }
                    }
                    if eligible == 0 {
                        return Err(Error::undefined(
                            "no non-compromised node has an incident edge",
                        ));
                    }
                    Ok(total / eligible as f64)
                }
            }
        }
        MetricTarget::Node => {
            let dist = g.distances_capped(compromised.as_slice(), scope.hops);
            let observed = dist.iter().filter(|&&d| d != UNREACHED && d > 0).count();
            match scope.level {
                MetricLevel::Global => Ok((n_c + observed) as f64 / n as f64),
                MetricLevel::Local => {
                    if n_c == n {
                        return Err(Error::undefined(
                            "local metrics condition on a non-compromised node",
                        ));
                    }
                    Ok(observed as f64 / (n - n_c) as f64)
                }
            }
        }
    }
}

/// Monte-Carlo estimate of the expected metric over uniform n_c-subsets.
///
/// Trials run in parallel but reduce in trial order; one trial leaves the
/// standard error at zero rather than undefined.
pub fn estimate(
    g: &Graph,
    scope: ObservationScope,
    n_c: usize,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    let n = g.node_count();
    if n_c > n {
        return Err(Error::input(format!("n_c = {n_c} exceeds n = {n}")));
    }
    if trials == 0 {
        return Err(Error::input("estimation needs at least one trial"));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let set = sample_compromised(n, n_c, mix_seed(seed, t as u64))?;
            realized_metric(g, &set, scope)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = values.iter().sum::<f64>() / trials as f64;
    let stderr = if trials == 1 {
        0.0
    } else {
        let var = values
            .iter()
            .map(|v| {
                let d = v - mean;
                d * d
            })
            .sum::<f64>()
            / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    };
    Ok(McEstimate {
        mean,
        stderr,
        trials,
    })
}

const ENUMERATION_BUDGET: u64 = 1_000_000;

/// Exact expectation by enumerating every n_c-subset in lexicographic order.
/// Only viable while C(n, n_c) stays within a million subsets; larger
/// instances get a budget error rather than an open-ended run.
pub fn brute_force_metric(g: &Graph, scope: ObservationScope, n_c: usize) -> Result<f64> {
    let n = g.node_count();
    if n_c > n {
        return Err(Error::input(format!("n_c = {n_c} exceeds n = {n}")));
    }
    let total = subsets_capped(n as u64, n_c as u64, ENUMERATION_BUDGET).ok_or_else(|| {
        Error::budget(format!(
            "C({n}, {n_c}) exceeds the enumeration budget of {ENUMERATION_BUDGET} subsets"
        ))
    })?;
    let mut current: Vec<u32> = (0..n_c as u32).collect();
    let mut sum = 0.0;
    let mut count = 0u64;
    loop {
        let set = NodeSet::new(current.clone());
        sum += realized_metric(g, &set, scope)?;
        count += 1;
        if !next_combination(&mut current, n) {
            break;
        }
    }
    debug_assert_eq!(count, total);
    Ok(sum / count as f64)
}

/// Advances a sorted combination to its lexicographic successor in place.
fn next_combination(c: &mut [u32], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if (c[i] as usize) < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// C(n, k), or None once it exceeds `cap`.
fn subsets_capped(n: u64, k: u64, cap: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
        if acc > cap as u128 {
            return None;
        }
    }
    Some(acc as u64)
}
