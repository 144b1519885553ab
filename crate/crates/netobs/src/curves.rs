//! Observability curves (metric value as a function of the compromised
//! fraction) and their area-under-curve summary.
//!
//! Every grid point of a curve shares one master seed. The subset sampler
//! nests its draws across sizes for a fixed seed, so curve values inherit
//! the monotonicity of the underlying metric instead of wobbling with
//! independent sampling noise.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::graph::Graph;
use crate::mc::{self, MetricLevel, ObservationScope};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Compromised fraction n_c / n.
    pub x: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservabilityCurve {
    pub scope: ObservationScope,
    pub label: String,
    pub points: Vec<CurvePoint>,
}

impl ObservabilityCurve {
    pub fn new(
        scope: ObservationScope,
        label: impl Into<String>,
        points: Vec<CurvePoint>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::input("a curve needs at least one point"));
        }
        for p in &points {
            if !p.x.is_finite() || !(0.0..=1.0).contains(&p.x) {
                return Err(Error::input(format!("curve x = {} outside [0, 1]", p.x)));
            }
            if !p.value.is_finite() || !(0.0..=1.0).contains(&p.value) {
                return Err(Error::input(format!(
                    "curve value {} outside [0, 1]",
                    p.value
                )));
            }
            if !p.stderr.is_finite() || p.stderr < 0.0 {
                return Err(Error::input(format!("curve stderr {} negative", p.stderr)));
            }
        }
        if points.windows(2).any(|w| w[0].x >= w[1].x) {
            return Err(Error::input("curve x values must be strictly increasing"));
        }
        Ok(ObservabilityCurve {
            scope,
            label: label.into(),
            points,
        })
    }
}

/// Evenly spaced compromised-count grid over [0, n]: `points` fractions
/// rounded to integer counts, deduplicated. Local scopes cap at n - 1
/// because they are undefined under full compromise.
pub fn default_grid(n: usize, points: usize, local: bool) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::input("grid needs at least one node"));
    }
    if points < 2 {
        return Err(Error::input("grid needs at least two points"));
    }
    let cap = if local { n - 1 } else { n };
    let mut grid: Vec<usize> = (0..points)
        .map(|i| ((i as f64 / (points - 1) as f64) * n as f64).round() as usize)
        .map(|v| v.min(cap))
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Evaluates the metric at each compromised count in `grid`, closed forms
/// where they exist (one hop, edge target) and Monte-Carlo elsewhere. All
/// grid points share `seed`.
pub fn build_curve(
    g: &Graph,
    scope: ObservationScope,
    grid: &[usize],
    trials: usize,
    seed: u64,
    label: &str,
) -> Result<ObservabilityCurve> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::input("curves need at least one node"));
    }
    if grid.is_empty() {
        return Err(Error::input("a curve needs at least one grid point"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("grid counts must be strictly increasing"));
    }
    let cap = if scope.is_local() { n - 1 } else { n };
    let last = *grid.last().unwrap();
    if last > cap {
        return Err(Error::input(format!(
            "grid count {last} exceeds the limit {cap} for this scope"
        )));
    }
    let points = grid
        .iter()
        .map(|&n_c| -> Result<CurvePoint> {
            let x = n_c as f64 / n as f64;
            if scope.has_closed_form() {
                let value = match scope.level {
                    MetricLevel::Global => exact::global_edge_observability(n, n_c)?.value,
                    MetricLevel::Local => exact::local_edge_observability(n, n_c)?.value,
                };
                Ok(CurvePoint {
                    x,
                    value,
                    stderr: 0.0,
                })
            } else {
                let est = mc::estimate(g, scope, n_c, trials, seed)?;
                Ok(CurvePoint {
                    x,
                    value: est.mean,
                    stderr: est.stderr,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ObservabilityCurve::new(scope, label, points)
}

/// Trapezoidal area under the curve, normalized by the x-span so the result
/// is a mean height in [0, 1].
///
/// Local-scope curves stop one grid step short of x = 1 because the metric
/// is undefined under full compromise; the final segment is extended
/// linearly to x = 1 to close the span, keeping results comparable with
/// full-span global curves. Partial global grids normalize over the span
/// they cover.
pub fn auoc(curve: &ObservabilityCurve) -> Result<f64> {
    let pts = &curve.points;
    if pts.len() < 2 {
        return Err(Error::input("auoc needs at least two curve points"));
    }
    let mut area = 0.0;
    for w in pts.windows(2) {
        area += (w[1].x - w[0].x) * (w[1].value + w[0].value) / 2.0;
    }
    let first = pts[0].x;
    let last = pts[pts.len() - 1];
    let span_end = if curve.scope.level == MetricLevel::Local && last.x < 1.0 {
        let prev = pts[pts.len() - 2];
        let slope = (last.value - prev.value) / (last.x - prev.x);
        let tail = 1.0 - last.x;
        area += tail * (last.value + slope * tail / 2.0);
        1.0
    } else {
        last.x
    };
    Ok(area / (span_end - first))
}

/// `digits`-significant-digit decimal formatting for CSV cells, falling back
/// to scientific notation outside a readable magnitude range.
pub fn format_significant(value: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let exp = (value.abs().log10() + 1e-9).floor() as i32;
    if !(-5..9).contains(&exp) {
        format!("{value:.prec$e}", prec = digits - 1)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{value:.decimals$}")
    }
}

/// CSV rows `x,value,stderr` at six significant digits. Callers prepend
/// their own `#` metadata line if they want provenance in the file.
pub fn write_curve_csv<W: Write>(curve: &ObservabilityCurve, mut writer: W) -> Result<()> {
    writeln!(writer, "x,value,stderr")?;
    for p in &curve.points {
        writeln!(
            writer,
            "{},{},{}",
            format_significant(p.x, 6),
            format_significant(p.value, 6),
            format_significant(p.stderr, 6)
        )?;
    }
    Ok(())
}
