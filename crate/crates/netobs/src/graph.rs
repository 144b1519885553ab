//! Immutable undirected simple graphs stored in compressed sparse rows,
//! plus the neighborhood machinery the observability metrics build on:
//! multi-source capped BFS, observed-edge collection around a compromised
//! set, and density/clustering statistics.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Distance sentinel for nodes beyond a BFS cap.
pub(crate) const UNREACHED: u32 = u32::MAX;

/// A sorted, deduplicated set of node ids.
///
/// Construction accepts ids in any order. Membership is a binary search;
/// whether the ids fit a particular graph is checked by the operations that
/// take both.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeSet {
    members: Vec<u32>,
}

impl NodeSet {
    pub fn new(mut members: Vec<u32>) -> Self {
        members.sort_unstable();
        members.dedup();
        NodeSet { members }
    }

    pub fn empty() -> Self {
        NodeSet::default()
    }

    /// Every id in `0..n`.
    pub fn full(n: usize) -> Self {
        NodeSet {
            members: (0..n as u32).collect(),
        }
    }

    pub(crate) fn from_sorted_unique(members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        NodeSet { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: u32) -> bool {
        self.members.binary_search(&u).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.members
    }
}

impl FromIterator<u32> for NodeSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        NodeSet::new(iter.into_iter().collect())
    }
}

/// A sorted, deduplicated set of undirected edges with endpoints normalized
/// so that the smaller id comes first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeSet {
    members: Vec<(u32, u32)>,
}

impl EdgeSet {
    pub fn new(pairs: Vec<(u32, u32)>) -> Self {
        let mut members: Vec<(u32, u32)> = pairs
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        members.sort_unstable();
        members.dedup();
        EdgeSet { members }
    }

    pub(crate) fn from_sorted_unique(members: Vec<(u32, u32)>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        EdgeSet { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.members
            .binary_search(&(a.min(b), a.max(b)))
            .is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[(u32, u32)] {
        &self.members
    }
}

/// An undirected simple graph over nodes `0..n`.
///
/// Neighbor lists are sorted; the edge list is sorted with normalized
/// endpoints. Self-loops are rejected at construction, duplicate input
/// edges collapse to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    pub fn from_edge_list(n: usize, pairs: &[(u32, u32)]) -> Result<Graph> {
        if n > u32::MAX as usize {
            return Err(Error::input(format!("node count {n} exceeds the u32 id space")));
        }
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if a == b {
                return Err(Error::input(format!("self-loop at node {a}")));
            }
            if a as usize >= n || b as usize >= n {
                return Err(Error::input(format!(
                    "edge ({a}, {b}) out of range for a {n}-node graph"
                )));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(a, b) in &edges {
            offsets[a as usize + 1] += 1;
            offsets[b as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut adjacency = vec![0u32; 2 * edges.len()];
        let mut cursor = offsets.clone();
        for &(a, b) in &edges {
            adjacency[cursor[a as usize]] = b;
            cursor[a as usize] += 1;
            adjacency[cursor[b as usize]] = a;
            cursor[b as usize] += 1;
        }
        Ok(Graph {
            n,
            offsets,
            adjacency,
            edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted ascending, each with the smaller endpoint first.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Sorted neighbor list, or None when `u` is out of range.
    pub fn neighbors(&self, u: u32) -> Option<&[u32]> {
        let u = u as usize;
        (u < self.n).then(|| &self.adjacency[self.offsets[u]..self.offsets[u + 1]])
    }

    pub fn degree(&self, u: u32) -> Option<usize> {
        self.neighbors(u).map(<[u32]>::len)
    }

    fn adj(&self, u: usize) -> &[u32] {
        &self.adjacency[self.offsets[u]..self.offsets[u + 1]]
    }

    /// 2|E| / (n (n-1)). Undefined below two nodes.
    pub fn density(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::undefined("density needs at least two nodes"));
        }
        let nf = self.n as f64;
        Ok(2.0 * self.edges.len() as f64 / (nf * (nf - 1.0)))
    }

    /// Mean local clustering coefficient; nodes of degree < 2 contribute 0.
    pub fn avg_clustering(&self) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::input("clustering of an empty graph"));
        }
        let mut marked = vec![false; self.n];
        let mut total = 0.0;
        for u in 0..self.n {
            let nu = self.adj(u);
            let d = nu.len();
            if d < 2 {
                continue;
            }
            for &v in nu {
                marked[v as usize] = true;
            }
            // ordered neighbor pairs joined by an edge; each undirected link
            // inside the neighborhood is counted twice, matching d(d-1)
            let mut links = 0usize;
            for &v in nu {
                for &w in self.adj(v as usize) {
                    if marked[w as usize] {
                        links += 1;
                    }
                }
            }
            for &v in nu {
                marked[v as usize] = false;
            }
            total += links as f64 / (d * (d - 1)) as f64;
        }
        Ok(total / self.n as f64)
    }

    pub(crate) fn check_nodes(&self, set: &NodeSet) -> Result<()> {
        match set.as_slice().last() {
            Some(&m) if m as usize >= self.n => Err(Error::input(format!(
                "node id {m} out of range for a {}-node graph",
                self.n
            ))),
            _ => Ok(()),
        }
    }

    /// BFS distances from `sources`, capped at `cap` hops. Sources sit at
    /// distance 0; entries beyond the cap hold [`UNREACHED`].
    pub(crate) fn distances_capped(&self, sources: &[u32], cap: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.n];
        let mut frontier = Vec::with_capacity(sources.len());
        for &s in sources {
            if dist[s as usize] == UNREACHED {
                dist[s as usize] = 0;
                frontier.push(s);
            }
        }
        let cap = cap.min(self.n) as u32;
        let mut next = Vec::new();
        let mut level = 0u32;
        while level < cap && !frontier.is_empty() {
            level += 1;
            for &u in &frontier {
                for &v in self.adj(u as usize) {
                    if dist[v as usize] == UNREACHED {
                        dist[v as usize] = level;
                        next.push(v);
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
            next.clear();
        }
        dist
    }

    /// Nodes within `k` hops of `sources`, excluding the sources themselves.
    /// `k = 0` yields the empty set.
    pub fn khop_nodes(&self, sources: &NodeSet, k: usize) -> Result<NodeSet> {
        self.check_nodes(sources)?;
        if k == 0 {
            return Ok(NodeSet::empty());
        }
        let dist = self.distances_capped(sources.as_slice(), k);
        let members = (0..self.n as u32)
            .filter(|&u| {
                let d = dist[u as usize];
                d != UNREACHED && d > 0
            })
            .collect();
        Ok(NodeSet::from_sorted_unique(members))
    }

    /// Edges with at least one endpoint within `k - 1` hops of `compromised`.
    /// Needs `k >= 1`: a compromised node exposes its incident edges at k = 1.
    pub fn observed_edges(&self, compromised: &NodeSet, k: usize) -> Result<EdgeSet> {
        if k < 1 {
            return Err(Error::input("edge observation needs at least one hop"));
        }
        self.check_nodes(compromised)?;
        let dist = self.distances_capped(compromised.as_slice(), k - 1);
        let members = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| dist[u as usize] != UNREACHED || dist[v as usize] != UNREACHED)
            .collect();
        Ok(EdgeSet::from_sorted_unique(members))
    }

    /// Reads the text edge-list format: one `u v` pair per line, blank lines
    /// skipped, `#` lines skipped. A leading `# n=<count>` comment fixes the
    /// node count (the writer emits it so trailing isolated nodes survive a
    /// round-trip); otherwise n is inferred as max id + 1.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
        let mut pairs = Vec::new();
        let mut declared: Option<usize> = None;
        let mut max_id: Option<u32> = None;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(count) = rest.trim().strip_prefix("n=") {
                    let count = count.trim().parse::<usize>().map_err(|_| {
                        Error::input(format!("line {lineno}: bad node-count directive {line:?}"))
                    })?;
                    if declared.is_none() {
                        declared = Some(count);
                    }
                }
                continue;
            }
            let mut fields = line.split_whitespace();
            let (a, b) = match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::input(format!(
                        "line {lineno}: expected two whitespace-separated node ids"
                    )))
                }
            };
            let a = a.parse::<u32>().map_err(|_| {
                Error::input(format!("line {lineno}: bad node id {a:?}"))
            })?;
            let b = b.parse::<u32>().map_err(|_| {
                Error::input(format!("line {lineno}: bad node id {b:?}"))
            })?;
            max_id = Some(max_id.map_or(a.max(b), |m| m.max(a).max(b)));
            pairs.push((a, b));
        }
        let inferred = max_id.map_or(0, |m| m as usize + 1);
        let n = declared.unwrap_or(inferred);
        if n < inferred {
            return Err(Error::input(format!(
                "node-count directive n={n} is smaller than max id + 1 = {inferred}"
            )));
        }
        Graph::from_edge_list(n, &pairs)
    }

    pub fn read_edge_list_path(path: &std::path::Path) -> Result<Graph> {
        let file = std::fs::File::open(path)?;
        Graph::read_edge_list(std::io::BufReader::new(file))
    }

    /// Writes the edge-list format, starting with the `# n=` directive.
    pub fn write_edge_list<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "# n={}", self.n)?;
        for &(u, v) in &self.edges {
            writeln!(writer, "{u} {v}")?;
        }
        Ok(())
    }
}
