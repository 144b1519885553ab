//! City-scale local node observability from population densities.
//!
//! The building block is a logarithmic fit mapping compromised devices per
//! km² to the expected fraction of a block's residents observed. City-wide
//! estimates are population-weighted means of that fit over census blocks,
//! either given directly or drawn from an exponential density model when
//! only total population and area are known.

use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{CurvePoint, ObservabilityCurve};
use crate::error::{Error, Result};
use crate::mc::{self, MetricLevel, MetricTarget, ObservationScope};

/// Logarithmic fit `clamp(slope * ln(m) + intercept, 0, 1)` from compromised
/// devices per km² to observed population fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LnoFit {
    pub slope: f64,
    pub intercept: f64,
}

impl Default for LnoFit {
    fn default() -> Self {
        LnoFit {
            slope: 0.13,
            intercept: -0.05,
        }
    }
}

impl LnoFit {
    pub fn new(slope: f64, intercept: f64) -> Result<Self> {
        if !slope.is_finite() || !intercept.is_finite() {
            return Err(Error::input("fit coefficients must be finite"));
        }
        Ok(LnoFit { slope, intercept })
    }

    /// Observed fraction at `m` compromised devices per km². Zero devices
    /// observe nothing; the logarithm's blowup below one device is absorbed
    /// by the clamp.
    pub fn eval(&self, m: f64) -> Result<f64> {
        if !m.is_finite() || m < 0.0 {
            return Err(Error::input(format!(
                "device density {m} must be non-negative and finite"
            )));
        }
        if m == 0.0 {
            return Ok(0.0);
        }
        Ok((self.slope * m.ln() + self.intercept).clamp(0.0, 1.0))
    }
}

/// Default-fit evaluation.
pub fn lno_approx(m: f64) -> Result<f64> {
    LnoFit::default().eval(m)
}

/// Census blocks: population density per 1 km² block.
#[derive(Debug, Clone, PartialEq)]
pub struct CityBlocks {
    populations: Vec<f64>,
}

impl CityBlocks {
    pub fn new(populations: Vec<f64>) -> Result<Self> {
        if populations.is_empty() {
            return Err(Error::input("a city needs at least one block"));
        }
        for &b in &populations {
            if !b.is_finite() || b < 0.0 {
                return Err(Error::input(format!(
                    "block population {b} must be non-negative and finite"
                )));
            }
        }
        Ok(CityBlocks { populations })
    }

    /// One non-negative real per line; blank lines and `#` lines skipped.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut populations = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let value = trimmed.parse::<f64>().map_err(|_| {
                Error::input(format!("line {}: bad block population {trimmed:?}", idx + 1))
            })?;
            populations.push(value);
        }
        CityBlocks::new(populations)
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn total_population(&self) -> f64 {
        self.populations.iter().sum()
    }
}

/// Expected observed fraction of the city's population when a fraction `x`
/// of residents is compromised: the population-weighted mean of the fit at
/// each block's compromised density.
pub fn local_node_obs_city(blocks: &CityBlocks, x: f64, fit: &LnoFit) -> Result<f64> {
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(Error::input(format!("fraction {x} outside [0, 1]")));
    }
    let total = blocks.total_population();
    if total <= 0.0 {
        return Err(Error::undefined("total population is zero"));
    }
    let mut observed = 0.0;
    for &b in &blocks.populations {
        observed += fit.eval(x * b)? * b;
    }
    Ok(observed / total)
}

/// Whole-city profile when per-block data is unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CityProfile {
    pub population: f64,
    pub area_km2: f64,
}

impl CityProfile {
    pub fn new(population: f64, area_km2: f64) -> Result<Self> {
        if !population.is_finite() || population <= 0.0 {
            return Err(Error::input(format!(
                "population {population} must be positive"
            )));
        }
        if !area_km2.is_finite() || area_km2 <= 0.0 {
            return Err(Error::input(format!("area {area_km2} must be positive")));
        }
        Ok(CityProfile {
            population,
            area_km2,
        })
    }

    pub fn mean_density(&self) -> f64 {
        self.population / self.area_km2
    }
}

const SAMPLE_PARTITION: usize = 1 << 14;

/// Models block densities as exponential with the profile's mean, draws
/// `samples` blocks by inverse CDF, and evaluates the same weighted mean as
/// [`local_node_obs_city`]. Deterministic per seed; sample partitions carry
/// private sub-streams and reduce in partition order, so worker count does
/// not change the result.
pub fn estimate_city_exponential(
    profile: &CityProfile,
    x: f64,
    samples: usize,
    seed: u64,
    fit: &LnoFit,
) -> Result<f64> {
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(Error::input(format!("fraction {x} outside [0, 1]")));
    }
    if samples == 0 {
        return Err(Error::input("estimation needs at least one sample"));
    }
    let mean = profile.mean_density();
    let parts = samples.div_ceil(SAMPLE_PARTITION);
    let partials: Vec<(f64, f64)> = (0..parts)
        .into_par_iter()
        .map(|part| -> Result<(f64, f64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(mc::mix_seed(seed, part as u64));
            let count = SAMPLE_PARTITION.min(samples - part * SAMPLE_PARTITION);
            let mut observed = 0.0;
            let mut weight = 0.0;
            for _ in 0..count {
                let u: f64 = rng.random();
                let b = -mean * (1.0 - u).ln();
                observed += fit.eval(x * b)? * b;
                weight += b;
            }
            Ok((observed, weight))
        })
        .collect::<Result<Vec<_>>>()?;
    let (observed, weight) = partials
        .iter()
        .fold((0.0, 0.0), |(o, w), &(po, pw)| (o + po, w + pw));
    if weight <= 0.0 {
        return Err(Error::undefined("sampled population is zero"));
    }
    Ok(observed / weight)
}

/// Where a city estimate draws its block data from.
#[derive(Debug, Clone, PartialEq)]
pub enum CitySource {
    Census(CityBlocks),
    Exponential {
        profile: CityProfile,
        samples: usize,
        seed: u64,
    },
}

impl CitySource {
    pub fn method_name(&self) -> &'static str {
        match self {
            CitySource::Census(_) => "census",
            CitySource::Exponential { .. } => "exponential",
        }
    }

    pub fn estimate(&self, x: f64, fit: &LnoFit) -> Result<f64> {
        match self {
            CitySource::Census(blocks) => local_node_obs_city(blocks, x, fit),
            CitySource::Exponential {
                profile,
                samples,
                seed,
            } => estimate_city_exponential(profile, x, *samples, *seed, fit),
        }
    }
}

/// City observability curve over an ascending fraction grid in [0, 1].
pub fn city_sweep(source: &CitySource, xs: &[f64], fit: &LnoFit) -> Result<ObservabilityCurve> {
    if xs.is_empty() {
        return Err(Error::input("a sweep needs at least one fraction"));
    }
    let scope = ObservationScope::new(MetricTarget::Node, MetricLevel::Local, 1)?;
    let points = xs
        .iter()
        .map(|&x| -> Result<CurvePoint> {
            let value = source.estimate(x, fit)?;
            Ok(CurvePoint {
                x,
                value,
                stderr: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ObservabilityCurve::new(scope, source.method_name(), points)
}
