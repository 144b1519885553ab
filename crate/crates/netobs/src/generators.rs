//! Synthetic graph families (complete, Erdos-Renyi, Barabasi-Albert,
//! Watts-Strogatz) with deterministic seeding, plus density-matched
//! parameter selection so different families can be compared at equal
//! edge budgets.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Rewiring probability used when only a target density is given; density
/// does not depend on it because rewiring preserves the edge count.
pub const DEFAULT_REWIRE_P: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Complete,
    Er,
    Ba,
    Ws,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(Family::Complete),
            "er" => Ok(Family::Er),
            "ba" => Ok(Family::Ba),
            "ws" => Ok(Family::Ws),
            other => Err(Error::input(format!(
                "unknown family {other:?} (expected complete, er, ba, or ws)"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Complete => "complete",
            Family::Er => "er",
            Family::Ba => "ba",
            Family::Ws => "ws",
        };
        f.write_str(name)
    }
}

/// Parameter set for one synthetic family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family")]
pub enum GeneratorSpec {
    #[serde(rename = "complete")]
    Complete { n: usize },
    #[serde(rename = "er")]
    ErdosRenyi { n: usize, p: f64 },
    #[serde(rename = "ba")]
    BarabasiAlbert { n: usize, m: usize },
    #[serde(rename = "ws")]
    WattsStrogatz { n: usize, k: usize, p: f64 },
}

impl GeneratorSpec {
    pub fn n(&self) -> usize {
        match *self {
            GeneratorSpec::Complete { n }
            | GeneratorSpec::ErdosRenyi { n, .. }
            | GeneratorSpec::BarabasiAlbert { n, .. }
            | GeneratorSpec::WattsStrogatz { n, .. } => n,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            GeneratorSpec::Complete { .. } => Family::Complete,
            GeneratorSpec::ErdosRenyi { .. } => Family::Er,
            GeneratorSpec::BarabasiAlbert { .. } => Family::Ba,
            GeneratorSpec::WattsStrogatz { .. } => Family::Ws,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GeneratorSpec::Complete { n } => {
                if n == 0 {
                    return Err(Error::input("complete graph needs at least one node"));
                }
            }
            GeneratorSpec::ErdosRenyi { n, p } => {
                if n == 0 {
                    return Err(Error::input("er graph needs at least one node"));
                }
                if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                    return Err(Error::input(format!("er probability {p} outside [0, 1]")));
                }
            }
            GeneratorSpec::BarabasiAlbert { n, m } => {
                if m == 0 || m >= n {
                    return Err(Error::input(format!(
                        "ba needs 1 <= m < n, got m = {m}, n = {n}"
                    )));
                }
            }
            GeneratorSpec::WattsStrogatz { n, k, p } => {
                if k < 2 || k >= n {
                    return Err(Error::input(format!(
                        "ws needs 2 <= k < n, got k = {k}, n = {n}"
                    )));
                }
                if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                    return Err(Error::input(format!("ws rewiring {p} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }

    pub fn generate(&self, seed: u64) -> Result<Graph> {
        self.validate()?;
        match *self {
            GeneratorSpec::Complete { n } => gen_complete(n),
            GeneratorSpec::ErdosRenyi { n, p } => gen_er(n, p, seed),
            GeneratorSpec::BarabasiAlbert { n, m } => gen_ba(n, m, seed),
            GeneratorSpec::WattsStrogatz { n, k, p } => gen_ws(n, k, p, seed),
        }
    }
}

pub fn gen_complete(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::input("complete graph needs at least one node"));
    }
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            pairs.push((a, b));
        }
    }
    Graph::from_edge_list(n, &pairs)
}

/// Each of the C(n, 2) pairs becomes an edge independently with probability
/// `p`. Pairs are visited in a fixed order, so a seed pins the graph.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    GeneratorSpec::ErdosRenyi { n, p }.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if rng.random_bool(p) {
                pairs.push((a, b));
            }
        }
    }
    Graph::from_edge_list(n, &pairs)
}

/// Preferential attachment: `m` isolated seed nodes, then each arrival
/// connects to `m` distinct existing nodes chosen proportionally to degree
/// (uniformly while no edges exist yet). Edge count is exactly m (n - m).
pub fn gen_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    GeneratorSpec::BarabasiAlbert { n, m }.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(m * (n - m));
    // one entry per edge endpoint, so sampling an entry is degree-biased
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * m * (n - m));
    let mut chosen: Vec<u32> = Vec::with_capacity(m);
    for v in m..n {
        chosen.clear();
        while chosen.len() < m {
            let candidate = if endpoints.is_empty() {
                rng.random_range(0..v as u32)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !chosen.contains(&candidate) {
                chosen.push(candidate);
            }
        }
        for &t in &chosen {
            pairs.push((t, v as u32));
            endpoints.push(t);
            endpoints.push(v as u32);
        }
    }
    Graph::from_edge_list(n, &pairs)
}

/// Ring lattice on `k` nearest neighbors (odd `k` rounds down to keep the
/// lattice symmetric) with each lattice edge rewired to a uniform
/// non-adjacent endpoint with probability `p`. Rewiring swaps edges one for
/// one, so the edge count stays n k / 2.
pub fn gen_ws(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph> {
    GeneratorSpec::WattsStrogatz { n, k, p }.validate()?;
    let half = (k & !1) / 2;
    let mut adj: Vec<HashSet<u32>> = vec![HashSet::new(); n];
    for j in 1..=half {
        for i in 0..n {
            let v = (i + j) % n;
            adj[i].insert(v as u32);
            adj[v].insert(i as u32);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 1..=half {
        for i in 0..n {
            if !rng.random_bool(p) {
                continue;
            }
            if adj[i].len() >= n - 1 {
                // already adjacent to everyone, nowhere to rewire
                continue;
            }
            let old = ((i + j) % n) as u32;
            let new = loop {
                let c = rng.random_range(0..n as u32);
                if c as usize != i && !adj[i].contains(&c) {
                    break c;
                }
            };
            adj[i].remove(&old);
            adj[old as usize].remove(&(i as u32));
            adj[i].insert(new);
            adj[new as usize].insert(i as u32);
        }
    }
    let mut pairs = Vec::with_capacity(n * half);
    for (i, neighbors) in adj.iter().enumerate() {
        for &v in neighbors {
            if (i as u32) < v {
                pairs.push((i as u32, v));
            }
        }
    }
    Graph::from_edge_list(n, &pairs)
}

/// Chooses family parameters hitting a target density `d` as closely as the
/// family's parameter grid allows. Watts-Strogatz carries the default
/// rewiring probability since density does not depend on it.
pub fn params_for_density(family: Family, n: usize, d: f64) -> Result<GeneratorSpec> {
    if n < 2 {
        return Err(Error::input("density matching needs at least two nodes"));
    }
    if !d.is_finite() || d <= 0.0 || d > 1.0 {
        return Err(Error::input(format!("target density {d} outside (0, 1]")));
    }
    let spec = match family {
        Family::Complete => {
            if (d - 1.0).abs() > 1e-12 {
                return Err(Error::input(
                    "complete graphs have density 1; pick another family for sparser targets",
                ));
            }
            GeneratorSpec::Complete { n }
        }
        Family::Er => GeneratorSpec::ErdosRenyi { n, p: d },
        Family::Ba => {
            // density 2m(n - m) / (n (n - 1)) is approximately 2m / n when
            // m << n; solve the approximation and clamp into range
            let m = (d * n as f64 / 2.0).round() as usize;
            GeneratorSpec::BarabasiAlbert {
                n,
                m: m.clamp(1, n - 1),
            }
        }
        Family::Ws => {
            if d < 2.0 / n as f64 {
                return Err(Error::input(format!(
                    "density {d} below the ws floor 2/n = {}",
                    2.0 / n as f64
                )));
            }
            // lattice density is k / (n - 1) for even k
            let k = 2 * ((d * (n as f64 - 1.0) / 2.0).round() as usize).max(1);
            let k = k.min((n - 1) & !1).max(2);
            GeneratorSpec::WattsStrogatz {
                n,
                k,
                p: DEFAULT_REWIRE_P,
            }
        }
    };
    spec.validate()?;
    Ok(spec)
}
