//! Synthetic piecewise systems and exact-SNR white noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridSpec;
use crate::sample::SampleSet;

pub const DEFAULT_STEP: f64 = 0.01;

/// Two pieces on `[0, 20]`, switching at `x = 10`.
pub fn two_domain(x: f64) -> f64 {
    if x < 10.0 {
        50.0 * x * x - 100.0 * x + 250.0
    } else {
        -50.0 * x - 500.0
    }
}

/// Three pieces on `[0, 30]`, switching at `x = 10` and `x = 20`.
pub fn three_domain(x: f64) -> f64 {
    if x < 10.0 {
        50.0 * x * x - 100.0 * x + 250.0
    } else if x < 20.0 {
        -30.0 * x * x + 150.0 * x - 100.0
    } else {
        -50.0 * x - 500.0
    }
}

/// `-15x^2 + 3x + 4y^2` where `x + y <= 1.05`, else `-10x + 12y^3`.
pub fn quad_2d(x: f64, y: f64) -> f64 {
    if x + y <= 1.05 {
        -15.0 * x * x + 3.0 * x + 4.0 * y * y
    } else {
        -10.0 * x + 12.0 * y.powi(3)
    }
}

/// Offset and slope of the line separating the two regimes of [`vector_2d`],
/// in coordinates normalized to the unit square: `t = 0.3 + 0.3 s`.
pub const VECTOR_LINE: (f64, f64) = (0.3, 0.3);

/// Synthetic two-regime flow field on the unit square (normalized coordinates).
///
/// Above the line `t = 0.3 + 0.3 s` the flow is uniform, `(u, v) = (1, 0)`.
/// On or below it, a cubic wall-layer profile:
/// `u = (3t - 3t^2 + t^3)(1 - 0.2 s)`, `v = 0.1 s t^2 - 0.05 t`.
/// The line meets the left edge at `t = 0.3` and the right edge at `t = 0.6`.
/// Both regimes lie inside the bicubic power-series family.
pub fn vector_2d(s: f64, t: f64) -> (f64, f64) {
    let (offset, slope) = VECTOR_LINE;
    if t <= offset + slope * s + 1e-9 {
        let profile = 3.0 * t - 3.0 * t * t + t * t * t;
        (profile * (1.0 - 0.2 * s), 0.1 * s * t * t - 0.05 * t)
    } else {
        (1.0, 0.0)
    }
}

/// `0, step, 2 step, ...` up to and including `end` (within rounding).
fn axis(end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Config(format!(
            "step must lie in (0, 1], got {step}"
        )));
    }
    let n = (end / step + 1e-9).floor() as usize + 1;
    let per_unit = 1.0 / step;
    let exact = (per_unit - per_unit.round()).abs() < 1e-9;
    Ok((0..n)
        .map(|i| {
            if exact {
                i as f64 / per_unit.round()
            } else {
                i as f64 * step
            }
        })
        .collect())
}

fn tabulate_1d(end: f64, step: f64, f: fn(f64) -> f64) -> Result<SampleSet> {
    let xs = axis(end, step)?;
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    SampleSet::from_xy(&xs, &ys)
}

pub fn gen_two_domain(step: f64) -> Result<SampleSet> {
    tabulate_1d(20.0, step, two_domain)
}

pub fn gen_three_domain(step: f64) -> Result<SampleSet> {
    tabulate_1d(30.0, step, three_domain)
}

pub fn gen_quad_2d(grid: &GridSpec) -> Result<SampleSet> {
    let pts: Vec<(f64, f64)> = grid.points().iter().map(|p| (p.x, p.y)).collect();
    let zs = pts.iter().map(|&(x, y)| quad_2d(x, y)).collect();
    SampleSet::from_points_2d(&pts, 1, zs)
}

pub fn gen_vector_2d(grid: &GridSpec) -> Result<SampleSet> {
    let pts: Vec<(f64, f64)> = grid.points().iter().map(|p| (p.x, p.y)).collect();
    let (sx, sy) = (grid.x_max - grid.x_min, grid.y_max - grid.y_min);
    let values = pts
        .iter()
        .flat_map(|&(x, y)| {
            let (u, v) = vector_2d((x - grid.x_min) / sx, (y - grid.y_min) / sy);
            [u, v]
        })
        .collect();
    SampleSet::from_points_2d(&pts, 2, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(snr_db: f64, seed: u64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::Config(format!("SNR must be finite, got {snr_db}")));
        }
        Ok(Self { snr_db, seed })
    }
}

/// Adds seeded Gaussian noise rescaled so that the realized SNR equals `spec.snr_db`.
pub fn add_noise(clean: &SampleSet, spec: NoiseSpec) -> Result<SampleSet> {
    let spec = NoiseSpec::new(spec.snr_db, spec.seed)?;
    let signal = clean.energy();
    if signal == 0.0 {
        return Err(Error::Snr("clean signal is all zero"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let raw: Vec<f64> = (0..clean.values_flat().len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let raw_energy: f64 = raw.iter().map(|e| e * e).sum();
    let target = signal / 10f64.powf(spec.snr_db / 10.0);
    let scale = (target / raw_energy).sqrt();
    let noisy = clean
        .values_flat()
        .iter()
        .zip(&raw)
        .map(|(v, e)| v + scale * e)
        .collect();
    clean.with_values(noisy)
}

/// Realized signal-to-noise ratio in dB: `10 log10(|clean|^2 / |noisy - clean|^2)`.
pub fn achieved_snr(clean: &SampleSet, noisy: &SampleSet) -> Result<f64> {
    if clean.len() != noisy.len() || clean.outputs() != noisy.outputs() {
        return Err(Error::Snr("clean and noisy data differ in shape"));
    }
    let signal = clean.energy();
    if signal == 0.0 {
        return Err(Error::Snr("clean signal is all zero"));
    }
    let noise: f64 = clean
        .values_flat()
        .iter()
        .zip(noisy.values_flat())
        .map(|(c, n)| (n - c) * (n - c))
        .sum();
    if noise == 0.0 {
        return Err(Error::Snr("noisy data equals clean data"));
    }
    Ok(10.0 * (signal / noise).log10())
}
