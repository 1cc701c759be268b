//! Simulated homodyne detection: quadrature sampling, histogram tomograms,
//! and photon statistics with bootstrap errors.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`). Samples are drawn in
//! chunks of [`SAMPLES_PER_STREAM`]; chunk `c` uses stream `c` of the
//! generator seeded with `seed`, and chunks are concatenated in order.
//! Bootstrap resample `b` uses stream `BOOTSTRAP_STREAM_BASE + b`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian_state::GaussianState;
use crate::photon_statistics::{photon_distribution, DisplacementAmplitude, PhotonDistribution};
use crate::pnt_transform::pnt_from_optical_detailed;
use crate::quadrature::QuadratureSpec;
use crate::tomograms::TomogramTable;

pub const RNG_ALGORITHM: &str = "ChaCha8";

pub const SAMPLES_PER_STREAM: usize = 1 << 16;

pub const BOOTSTRAP_STREAM_BASE: u64 = 1 << 32;

pub const BOOTSTRAP_RESAMPLES: usize = 20;

/// Default half-width of the binned range in units of the largest
/// quadrature standard deviation.
pub const RANGE_SIGMAS: f64 = 6.0;

/// One homodyne event: the local-oscillator phase and the measured quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneSample {
    pub theta: f64,
    pub x: f64,
}

fn angle(j: usize, n_angles: usize) -> f64 {
    2.0 * PI * j as f64 / n_angles as f64
}

/// Draws `n_samples` events with phases uniform over `n_angles` equispaced
/// values and quadratures from the state's optical tomogram.
pub fn sample_homodyne(state: &GaussianState, n_samples: usize, n_angles: usize, seed: u64) -> Result<Vec<HomodyneSample>> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be positive".into()));
    }
    if n_angles < 4 {
        return Err(Error::InvalidParameter(format!("n_angles must be at least 4, got {n_angles}")));
    }
    let sections: Vec<(f64, f64, f64)> = (0..n_angles)
        .map(|j| {
            let t = angle(j, n_angles);
            let (c, s) = (t.cos(), t.sin());
            (t, state.quadrature_mean(c, s), state.quadrature_variance(c, s).sqrt())
        })
        .collect();
    let n_chunks = n_samples.div_ceil(SAMPLES_PER_STREAM);
    let chunks: Vec<Vec<HomodyneSample>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = SAMPLES_PER_STREAM.min(n_samples - c * SAMPLES_PER_STREAM);
            (0..len)
                .map(|_| {
                    let (theta, mean, sd) = sections[rng.random_range(0..n_angles)];
                    let z: f64 = rng.sample(StandardNormal);
                    HomodyneSample { theta, x: mean + sd * z }
                })
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

/// A histogram tomogram with the number of samples outside the binned range.
#[derive(Debug, Clone, PartialEq)]
pub struct Binned {
    pub table: TomogramTable,
    pub clipped: usize,
}

/// Per-angle histograms on the angle grid `2πj/n_angles`, normalized to
/// unit integral over `x_range` and evaluated at bin centers.
///
/// Every sample must sit on a grid angle. Samples outside `x_range` are
/// counted in [`Binned::clipped`].
pub fn bin_samples(samples: &[HomodyneSample], n_angles: usize, x_bins: usize, x_range: (f64, f64)) -> Result<Binned> {
    let counts = count_bins(samples.iter(), n_angles, x_bins, x_range)?;
    table_from_counts(&counts.0, counts.1, n_angles, x_bins, x_range)
}

/// [`bin_samples`] without the clipping count.
pub fn bin_tomogram(samples: &[HomodyneSample], n_angles: usize, x_bins: usize, x_range: (f64, f64)) -> Result<TomogramTable> {
    Ok(bin_samples(samples, n_angles, x_bins, x_range)?.table)
}

type Counts = (Vec<Vec<u64>>, usize);

fn count_bins<'a, I>(samples: I, n_angles: usize, x_bins: usize, x_range: (f64, f64)) -> Result<Counts>
where
    I: Iterator<Item = &'a HomodyneSample>,
{
    if x_bins < 10 {
        return Err(Error::InvalidParameter(format!("x_bins must be at least 10, got {x_bins}")));
    }
    if n_angles == 0 {
        return Err(Error::InvalidParameter("n_angles must be positive".into()));
    }
    let (lo, hi) = x_range;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidParameter(format!("invalid x range [{lo}, {hi}]")));
    }
    let width = (hi - lo) / x_bins as f64;
    let mut counts = vec![vec![0u64; x_bins]; n_angles];
    let mut clipped = 0;
    for s in samples {
        let pos = s.theta.rem_euclid(2.0 * PI) / (2.0 * PI) * n_angles as f64;
        let j = pos.round();
        if (pos - j).abs() > 1e-6 || !s.x.is_finite() {
            return Err(Error::InvalidParameter(format!("sample at theta = {} is not on the angle grid", s.theta)));
        }
        let j = j as usize % n_angles;
        let b = ((s.x - lo) / width).floor();
        if b < 0.0 || b >= x_bins as f64 {
            clipped += 1;
            continue;
        }
        counts[j][b as usize] += 1;
    }
    Ok((counts, clipped))
}

fn table_from_counts(counts: &[Vec<u64>], clipped: usize, n_angles: usize, x_bins: usize, x_range: (f64, f64)) -> Result<Binned> {
    let width = (x_range.1 - x_range.0) / x_bins as f64;
    let xs: Vec<f64> = (0..x_bins).map(|b| x_range.0 + width * (b as f64 + 0.5)).collect();
    let mut values = Vec::with_capacity(n_angles);
    for (j, row) in counts.iter().enumerate() {
        let total: u64 = row.iter().sum();
        if total == 0 {
            return Err(Error::EmptyAngle {
                index: j,
                theta: angle(j, n_angles),
            });
        }
        values.push(row.iter().map(|&c| c as f64 / (total as f64 * width)).collect());
    }
    let thetas = (0..n_angles).map(|j| angle(j, n_angles)).collect();
    Ok(Binned {
        table: TomogramTable::new(thetas, xs, values)?,
        clipped,
    })
}

/// Settings of a simulated homodyne estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneConfig {
    pub n_samples: usize,
    pub n_angles: usize,
    pub x_bins: usize,
    pub seed: u64,
    pub n_max: usize,
    /// Binned range; `None` selects `±(6σ_max + |⟨(q, p)⟩|)`.
    pub x_range: Option<(f64, f64)>,
    pub bootstrap_resamples: usize,
}

impl Default for HomodyneConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            n_angles: 64,
            x_bins: 200,
            seed: 0,
            n_max: 5,
            x_range: None,
            bootstrap_resamples: BOOTSTRAP_RESAMPLES,
        }
    }
}

/// Default binned range for a state: symmetric about zero, wide enough for
/// every optical section.
pub fn default_x_range(state: &GaussianState) -> (f64, f64) {
    let sigma_max = state.cov().max_eigenvalue().sqrt();
    let half = RANGE_SIGMAS * sigma_max + state.mean_q().hypot(state.mean_p());
    (-half, half)
}

/// Estimated and exact photon statistics of a simulated measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    /// Raw transform of the measured tomogram, not clamped.
    pub estimated: PhotonDistribution,
    pub exact: PhotonDistribution,
    /// Bootstrap standard deviation of each estimated entry.
    pub per_n_stderr: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub clipped: usize,
    pub x_range: (f64, f64),
    pub rng: String,
    pub config: HomodyneConfig,
    pub state: GaussianState,
    pub quad: QuadratureSpec,
}

fn transform_table(table: &TomogramTable, n_max: usize, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    let sym = table.symmetrized()?;
    Ok(pnt_from_optical_detailed(&sym, DisplacementAmplitude::ZERO, n_max, spec)?.values)
}

/// Samples, bins and transforms, then repeats the binning and transform on
/// bootstrap resamples for standard errors.
///
/// Rows are symmetrized with their `θ + π` partners before the transform,
/// which needs an even `n_angles`.
pub fn estimate_photon_stats(state: &GaussianState, config: &HomodyneConfig, spec: &QuadratureSpec) -> Result<EstimationReport> {
    if !config.n_angles.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n_angles must be even, got {}", config.n_angles)));
    }
    if config.bootstrap_resamples < 2 {
        return Err(Error::InvalidParameter("at least two bootstrap resamples are needed".into()));
    }
    let x_range = config.x_range.unwrap_or_else(|| default_x_range(state));
    let samples = sample_homodyne(state, config.n_samples, config.n_angles, config.seed)?;
    let binned = bin_samples(&samples, config.n_angles, config.x_bins, x_range)?;
    let estimate = transform_table(&binned.table, config.n_max, spec)?;

    let replicas: Vec<Vec<f64>> = (0..config.bootstrap_resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(BOOTSTRAP_STREAM_BASE + b as u64);
            let n = samples.len();
            let drawn = (0..n).map(|_| &samples[rng.random_range(0..n)]);
            let (counts, clipped) = count_bins(drawn, config.n_angles, config.x_bins, x_range)?;
            let table = table_from_counts(&counts, clipped, config.n_angles, config.x_bins, x_range)?.table;
            transform_table(&table, config.n_max, spec)
        })
        .collect::<Result<_>>()?;
    let r = replicas.len() as f64;
    let per_n_stderr = (0..=config.n_max)
        .map(|n| {
            let mean = replicas.iter().map(|v| v[n]).sum::<f64>() / r;
            (replicas.iter().map(|v| (v[n] - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt()
        })
        .collect();

    Ok(EstimationReport {
        estimated: PhotonDistribution::from_estimate(estimate),
        exact: photon_distribution(state, config.n_max)?,
        per_n_stderr,
        n_samples: config.n_samples,
        seed: config.seed,
        clipped: binned.clipped,
        x_range,
        rng: RNG_ALGORITHM.into(),
        config: *config,
        state: *state,
        quad: *spec,
    })
}
