//! Ingestion of timestamped interaction logs into graphs: contact events
//! between named endpoints, co-location sightings bucketed by hour and
//! cell, time-window graph construction, and window-length sweeps.
//!
//! Parsers reject malformed records individually (with line diagnostics)
//! rather than failing the file; only I/O errors abort.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use serde::Serialize;

use crate::curves;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mc::{self, McEstimate, ObservationScope};

/// One directed contact `src -> dst` at an integer timestamp (seconds).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub src: String,
    pub dst: String,
    pub timestamp: u64,
}

/// Two devices seen together in a cell at an integer timestamp (seconds).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SightingRecord {
    pub a: String,
    pub b: String,
    pub timestamp: u64,
    pub cell: String,
}

/// A rejected input line and why it was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineDiagnostic {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct ParsedEvents {
    pub records: Vec<EventRecord>,
    pub rejected: Vec<LineDiagnostic>,
}

#[derive(Debug, Default)]
pub struct ParsedSightings {
    pub records: Vec<SightingRecord>,
    pub rejected: Vec<LineDiagnostic>,
}

fn split_csv(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

/// Reads `src,dst,timestamp` lines. An optional first line naming exactly
/// those fields is treated as a header. Malformed records (wrong field
/// count, empty endpoint, self-contact, non-numeric timestamp) are rejected
/// with their line number; the rest of the file still parses.
pub fn parse_events<R: BufRead>(reader: R) -> Result<ParsedEvents> {
    let mut out = ParsedEvents::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields = split_csv(trimmed);
        if lineno == 1
            && fields.len() == 3
            && fields[0].eq_ignore_ascii_case("src")
            && fields[1].eq_ignore_ascii_case("dst")
            && fields[2].eq_ignore_ascii_case("timestamp")
        {
            continue;
        }
        match parse_event_fields(&fields) {
            Ok(record) => out.records.push(record),
            Err(reason) => out.rejected.push(LineDiagnostic {
                line: lineno,
                reason,
            }),
        }
    }
    Ok(out)
}

fn parse_event_fields(fields: &[&str]) -> std::result::Result<EventRecord, String> {
    if fields.len() != 3 {
        return Err(format!("expected 3 fields, got {}", fields.len()));
    }
    let (src, dst, ts) = (fields[0], fields[1], fields[2]);
    if src.is_empty() || dst.is_empty() {
        return Err("empty endpoint id".to_string());
    }
    if src == dst {
        return Err(format!("self-contact {src:?}"));
    }
    let timestamp = ts
        .parse::<u64>()
        .map_err(|_| format!("non-numeric timestamp {ts:?}"))?;
    Ok(EventRecord {
        src: src.to_string(),
        dst: dst.to_string(),
        timestamp,
    })
}

/// Reads `a,b,timestamp,cell` lines with the same tolerance rules as
/// [`parse_events`].
pub fn parse_sightings<R: BufRead>(reader: R) -> Result<ParsedSightings> {
    let mut out = ParsedSightings::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields = split_csv(trimmed);
        if lineno == 1
            && fields.len() == 4
            && fields[0].eq_ignore_ascii_case("a")
            && fields[1].eq_ignore_ascii_case("b")
            && fields[2].eq_ignore_ascii_case("timestamp")
            && fields[3].eq_ignore_ascii_case("cell")
        {
            continue;
        }
        match parse_sighting_fields(&fields) {
            Ok(record) => out.records.push(record),
            Err(reason) => out.rejected.push(LineDiagnostic {
                line: lineno,
                reason,
            }),
        }
    }
    Ok(out)
}

fn parse_sighting_fields(fields: &[&str]) -> std::result::Result<SightingRecord, String> {
    if fields.len() != 4 {
        return Err(format!("expected 4 fields, got {}", fields.len()));
    }
    let (a, b, ts, cell) = (fields[0], fields[1], fields[2], fields[3]);
    if a.is_empty() || b.is_empty() {
        return Err("empty device id".to_string());
    }
    if a == b {
        return Err(format!("self-sighting {a:?}"));
    }
    if cell.is_empty() {
        return Err("empty cell id".to_string());
    }
    let timestamp = ts
        .parse::<u64>()
        .map_err(|_| format!("non-numeric timestamp {ts:?}"))?;
    Ok(SightingRecord {
        a: a.to_string(),
        b: b.to_string(),
        timestamp,
        cell: cell.to_string(),
    })
}

/// Stable mapping from string ids to dense node indices, in first-appearance
/// order.
#[derive(Debug, Clone, Default)]
pub struct IdMap {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl IdMap {
    pub fn new() -> Self {
        IdMap::default()
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = u32::try_from(self.names.len()).expect("id space exhausted");
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Id universe of a whole event dataset, so every time window shares node
/// indices (and node counts) no matter which records fall inside it.
pub fn id_map_from_events(records: &[EventRecord]) -> IdMap {
    let mut ids = IdMap::new();
    for r in records {
        ids.intern(&r.src);
        ids.intern(&r.dst);
    }
    ids
}

/// Undirected simple graph over the full id universe, keeping only events
/// with `t0 <= timestamp < t0 + duration`. Direction and repetition
/// collapse.
pub fn window_graph(
    records: &[EventRecord],
    t0: u64,
    duration: u64,
    ids: &IdMap,
) -> Result<Graph> {
    if duration == 0 {
        return Err(Error::input("window duration must be positive"));
    }
    let end = t0.saturating_add(duration);
    let mut pairs = Vec::new();
    for r in records {
        if r.timestamp < t0 || r.timestamp >= end {
            continue;
        }
        let a = ids
            .id(&r.src)
            .ok_or_else(|| Error::input(format!("id {:?} missing from the id map", r.src)))?;
        let b = ids
            .id(&r.dst)
            .ok_or_else(|| Error::input(format!("id {:?} missing from the id map", r.dst)))?;
        pairs.push((a, b));
    }
    Graph::from_edge_list(ids.len(), &pairs)
}

/// Sightings bucketed by (hour, cell).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ColocationKey {
    pub hour: u64,
    pub cell: String,
}

/// One co-location bucket: the contact graph among devices seen together in
/// that hour and cell, with its own id space.
#[derive(Debug)]
pub struct ColocationBucket {
    pub graph: Graph,
    pub ids: IdMap,
}

pub const COLOCATION_BUCKET_SECONDS: u64 = 3600;

/// Groups sightings into hour-by-cell buckets and builds each bucket's
/// graph. Device ids are local to a bucket, in first-appearance order.
pub fn colocation_graphs(sightings: &[SightingRecord]) -> BTreeMap<ColocationKey, ColocationBucket> {
    let mut grouped: BTreeMap<ColocationKey, (IdMap, Vec<(u32, u32)>)> = BTreeMap::new();
    for s in sightings {
        let key = ColocationKey {
            hour: s.timestamp / COLOCATION_BUCKET_SECONDS,
            cell: s.cell.clone(),
        };
        let (ids, pairs) = grouped.entry(key).or_default();
        let a = ids.intern(&s.a);
        let b = ids.intern(&s.b);
        pairs.push((a, b));
    }
    grouped
        .into_iter()
        .map(|(key, (ids, pairs))| {
            let graph = Graph::from_edge_list(ids.len(), &pairs)
                .expect("bucket edges are valid by construction");
            (key, ColocationBucket { graph, ids })
        })
        .collect()
}

/// One window of a temporal sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub duration: u64,
    pub estimate: McEstimate,
    pub auoc: f64,
}

/// Evaluates the metric over nested windows anchored at the earliest
/// timestamp: for each duration, the windowed graph's estimate at
/// n_c = round(fraction * n) plus the default-grid curve AUOC. All windows
/// share the id universe, the node count, and the seed, so longer windows
/// see supersets of shorter windows' edges.
pub fn temporal_sweep(
    records: &[EventRecord],
    windows: &[u64],
    scope: ObservationScope,
    fraction: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    if records.is_empty() {
        return Err(Error::undefined("no event records to sweep"));
    }
    if windows.is_empty() {
        return Err(Error::input("sweep needs at least one window"));
    }
    if windows[0] == 0 {
        return Err(Error::input("window durations must be positive"));
    }
    if windows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("window durations must be strictly ascending"));
    }
    if !fraction.is_finite() || !(0.0..=1.0).contains(&fraction) {
        return Err(Error::input(format!("fraction {fraction} outside [0, 1]")));
    }
    let ids = id_map_from_events(records);
    let t0 = records.iter().map(|r| r.timestamp).min().unwrap();
    let n = ids.len();
    let n_c = (fraction * n as f64).round() as usize;
    let grid = curves::default_grid(n, 21, scope.is_local())?;
    let mut out = Vec::with_capacity(windows.len());
    for &duration in windows {
        let g = window_graph(records, t0, duration, &ids)?;
        let estimate = mc::estimate(&g, scope, n_c, trials, seed)?;
        let curve = curves::build_curve(&g, scope, &grid, trials, seed, "window")?;
        let auoc = curves::auoc(&curve)?;
        out.push(SweepPoint {
            duration,
            estimate,
            auoc,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{MetricLevel, MetricTarget};

    fn scope(target: MetricTarget, level: MetricLevel, hops: usize) -> ObservationScope {
        ObservationScope::new(target, level, hops).unwrap()
    }

    #[test]
    fn event_parsing_accepts_good_lines_and_header() {
        let text = "src,dst,timestamp\nalice,bob,100\nbob, carol ,250\n";
        let parsed = parse_events(text.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 2);
        assert!(parsed.rejected.is_empty());
        assert_eq!(parsed.records[1].dst, "carol");
        assert_eq!(parsed.records[1].timestamp, 250);
    }

    #[test]
    fn event_parsing_rejects_bad_lines_with_line_numbers() {
        let text = "alice,bob,100\nalice,alice,200\nbob,carol,soon\nbob,carol\n,carol,5\n";
        let parsed = parse_events(text.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        let lines: Vec<usize> = parsed.rejected.iter().map(|d| d.line).collect();
        assert_eq!(lines, vec![2, 3, 4, 5]);
        assert!(parsed.rejected[0].reason.contains("self-contact"));
        assert!(parsed.rejected[1].reason.contains("non-numeric"));
    }

    #[test]
    fn header_only_counts_on_the_first_line() {
        let text = "alice,bob,100\nsrc,dst,timestamp\n";
        let parsed = parse_events(text.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.rejected.len(), 1);
        assert_eq!(parsed.rejected[0].line, 2);
    }

    #[test]
    fn sighting_parsing_mirrors_event_rules() {
        let text = "a,b,timestamp,cell\nd1,d2,100,c7\nd1,d1,200,c7\nd1,d3,x,c7\nd1,d4,300,\n";
        let parsed = parse_sightings(text.as_bytes()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.rejected.len(), 3);
        assert_eq!(parsed.records[0].cell, "c7");
    }

    #[test]
    fn id_map_interning_is_stable() {
        let mut ids = IdMap::new();
        assert_eq!(ids.intern("x"), 0);
        assert_eq!(ids.intern("y"), 1);
        assert_eq!(ids.intern("x"), 0);
        assert_eq!(ids.len(), 2);
        assert_eq!(ids.name(1), Some("y"));
        assert_eq!(ids.id("z"), None);
    }

    fn sample_events() -> Vec<EventRecord> {
        let text = "\
a,b,0
b,c,50
c,d,149
a,d,150
a,c,500
";
        parse_events(text.as_bytes()).unwrap().records
    }

    #[test]
    fn window_graph_filters_by_half_open_interval() {
        let records = sample_events();
        let ids = id_map_from_events(&records);
        assert_eq!(ids.len(), 4);
        let g = window_graph(&records, 0, 150, &ids).unwrap();
        // events at 0, 50, 149 fall inside; 150 and 500 do not
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 3);
        let g_all = window_graph(&records, 0, 1000, &ids).unwrap();
        assert_eq!(g_all.edge_count(), 5);
        assert!(window_graph(&records, 0, 0, &ids).is_err());
    }

    #[test]
    fn window_graph_keeps_the_full_node_universe() {
        let records = sample_events();
        let ids = id_map_from_events(&records);
        // a 1-second window holds only the first event but all four nodes
        let g = window_graph(&records, 0, 1, &ids).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn window_graph_collapses_direction_and_repeats() {
        let text = "a,b,1\nb,a,2\na,b,3\n";
        let records = parse_events(text.as_bytes()).unwrap().records;
        let ids = id_map_from_events(&records);
        let g = window_graph(&records, 0, 10, &ids).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn colocation_buckets_by_hour_and_cell() {
        let text = "d1,d2,100,c1\nd1,d2,4000,c1\nd3,d4,200,c2\nd1,d3,300,c1\n";
        let records = parse_sightings(text.as_bytes()).unwrap().records;
        let buckets = colocation_graphs(&records);
        assert_eq!(buckets.len(), 3);
        let keys: Vec<(u64, &str)> = buckets
            .keys()
            .map(|k| (k.hour, k.cell.as_str()))
            .collect();
        assert_eq!(keys, vec![(0, "c1"), (0, "c2"), (1, "c1")]);
        let first = &buckets[&ColocationKey {
            hour: 0,
            cell: "c1".to_string(),
        }];
        assert_eq!(first.graph.node_count(), 3);
        assert_eq!(first.graph.edge_count(), 2);
        let later = &buckets[&ColocationKey {
            hour: 1,
            cell: "c1".to_string(),
        }];
        assert_eq!(later.graph.node_count(), 2);
        assert_eq!(later.graph.edge_count(), 1);
    }

    #[test]
    fn colocation_of_nothing_is_empty() {
        assert!(colocation_graphs(&[]).is_empty());
    }

    fn dense_events(n: u32, step: u64) -> Vec<EventRecord> {
        // a growing cycle: edge i appears at time i * step
        (0..n)
            .map(|i| EventRecord {
                src: format!("v{i}"),
                dst: format!("v{}", (i + 1) % n),
                timestamp: i as u64 * step,
            })
            .collect()
    }

    #[test]
    fn sweep_is_monotone_over_nested_windows() {
        let records = dense_events(40, 10);
        let s = scope(MetricTarget::Node, MetricLevel::Global, 2);
        let points = temporal_sweep(&records, &[50, 150, 250, 400], s, 0.1, 60, 9).unwrap();
        assert_eq!(points.len(), 4);
        for w in points.windows(2) {
            assert!(
                w[1].estimate.mean >= w[0].estimate.mean - 1e-12,
                "means {} then {}",
                w[0].estimate.mean,
                w[1].estimate.mean
            );
            assert!(w[1].auoc >= w[0].auoc - 1e-9);
        }
    }

    #[test]
    fn sweep_validates_arguments() {
        let records = dense_events(10, 10);
        let s = scope(MetricTarget::Edge, MetricLevel::Global, 1);
        assert!(temporal_sweep(&[], &[10], s, 0.1, 10, 0).is_err());
        assert!(temporal_sweep(&records, &[], s, 0.1, 10, 0).is_err());
        assert!(temporal_sweep(&records, &[0, 10], s, 0.1, 10, 0).is_err());
        assert!(temporal_sweep(&records, &[10, 10], s, 0.1, 10, 0).is_err());
        assert!(temporal_sweep(&records, &[10, 5], s, 0.1, 10, 0).is_err());
        assert!(temporal_sweep(&records, &[10], s, 1.5, 10, 0).is_err());
    }

    #[test]
    fn sweep_anchors_at_the_earliest_timestamp() {
        let mut records = dense_events(10, 10);
        for r in &mut records {
            r.timestamp += 5000;
        }
        let s = scope(MetricTarget::Edge, MetricLevel::Global, 1);
        let points = temporal_sweep(&records, &[15, 95], s, 0.2, 20, 1).unwrap();
        assert_eq!(points.len(), 2);
        // the first window catches the two earliest edges even though
        // absolute timestamps start at 5000
        assert!(points[0].estimate.mean > 0.0);
    }
}
