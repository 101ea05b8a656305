//! Statistical verification utilities: kernel density estimation,
//! two-sample Kolmogorov–Smirnov comparison, and the timing harness used to
//! compare per-unit-time cost of the samplers across horizons.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::sim::{euler_maruyama, rrs, srrs, Method, SimConfig};
use crate::special;

/// Bandwidth used by the reproduction plots.
pub const DEFAULT_BANDWIDTH: f64 = 0.1;

/// A labelled batch of terminal samples.
#[derive(Debug, Clone, Serialize)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub method: String,
    /// Mean wall-clock seconds per sample, when timed.
    pub seconds_per_sample: Option<f64>,
}

impl SampleBatch {
    pub fn new(values: Vec<f64>, method: impl Into<String>) -> Result<SampleBatch> {
        if values.is_empty() {
            return Err(Error::InvalidBatch("sample batch is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidBatch(format!(
                "sample batch contains non-finite value {bad}"
            )));
        }
        Ok(SampleBatch {
            values,
            method: method.into(),
            seconds_per_sample: None,
        })
    }

    pub fn with_timing(mut self, seconds_per_sample: f64) -> SampleBatch {
        self.seconds_per_sample = Some(seconds_per_sample);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Gaussian kernel density estimate of the batch on the supplied grid.
pub fn kde(batch: &SampleBatch, bandwidth: f64, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    let norm = 1.0 / (batch.values.len() as f64 * bandwidth);
    Ok(grid
        .iter()
        .map(|&x| {
            let mass: f64 = batch
                .values
                .iter()
                .map(|&v| special::normal_density((x - v) / bandwidth))
                .sum();
            (x, norm * mass)
        })
        .collect())
}

/// Uniform grid spanning the batch range widened by six bandwidths on each
/// side — wide enough that the estimate integrates to one on it.
pub fn kde_default_grid(batch: &SampleBatch, bandwidth: f64, points: usize) -> Vec<f64> {
    let lo = batch.values.iter().cloned().fold(f64::INFINITY, f64::min) - 6.0 * bandwidth;
    let hi = batch.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 6.0 * bandwidth;
    let n = points.max(2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Exact empirical-CDF sup-distance between two sorted-on-the-fly samples.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("finite sample values"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("finite sample values"));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut dist = 0.0f64;
    while i < sa.len() && j < sb.len() {
        let x = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] == x {
            i += 1;
        }
        while j < sb.len() && sb[j] == x {
            j += 1;
        }
        dist = dist.max((i as f64 / na - j as f64 / nb).abs());
    }
    dist
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{j≥1} (−1)^{j−1} exp(−2 j² λ²)`.
///
/// The alternating form converges slowly for small `λ`, so below 1.18 the
/// dual theta-function expansion of the CDF is used instead; both branches
/// are accurate to well below any tolerance used here.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-8 {
        return 1.0;
    }
    if lambda < 1.18 {
        let x = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda
            * (x + x.powi(9) + x.powi(25) + x.powi(49));
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100u32 {
        let term = sign * (-2.0 * (j as f64 * lambda) * (j as f64 * lambda)).exp();
        sum += term;
        if term.abs() < 1e-16 * sum.abs().max(1e-300) {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test: exact statistic, asymptotic p-value
/// with the small-sample effective-size correction
/// `λ = (√n_e + 0.12 + 0.11/√n_e) D`.
pub fn ks_two_sample(a: &SampleBatch, b: &SampleBatch) -> (f64, f64) {
    let d = ks_statistic(&a.values, &b.values);
    let ne = a.len() as f64 * b.len() as f64 / (a.len() + b.len()) as f64;
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    (d, kolmogorov_survival(lambda))
}

/// One benchmark table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: String,
    pub t: f64,
    pub mean_seconds: f64,
    pub sd_seconds: f64,
    /// Per-unit-time cost `mean_seconds / T`.
    pub seconds_per_unit: f64,
}

fn one_sample(
    spec: &DriftSpec,
    x0: f64,
    method: Method,
    t_total: f64,
    cfg: &SimConfig,
    stream: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    match method {
        Method::Rrs => rrs(spec, x0, 0.0, t_total, cfg, &mut rng).map(|s| s.terminal_value()),
        Method::Srrs => srrs(spec, x0, 0.0, t_total, cfg, &mut rng).map(|s| s.terminal_value()),
        Method::Euler { step } => euler_maruyama(spec, x0, t_total, step, &mut rng),
    }
}

/// Times `n` terminal draws per horizon on the monotonic clock, after ten
/// discarded warm-up draws, and reports mean ± sd seconds per sample plus
/// the per-unit-time ratio.
pub fn benchmark(
    spec: &DriftSpec,
    method: Method,
    x0: f64,
    horizons: &[f64],
    n: usize,
    cfg: &SimConfig,
) -> Result<Vec<BenchRow>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "benchmark needs at least one sample per horizon".into(),
        ));
    }
    let mut rows = Vec::with_capacity(horizons.len());
    for &t_total in horizons {
        for warm in 0..10u64 {
            one_sample(spec, x0, method, t_total, cfg, warm)?;
        }
        let mut seconds = Vec::with_capacity(n);
        for i in 0..n as u64 {
            let tick = Instant::now();
            one_sample(spec, x0, method, t_total, cfg, 10 + i)?;
            seconds.push(tick.elapsed().as_secs_f64());
        }
        let mean = seconds.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (seconds.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        rows.push(BenchRow {
            method: method.to_string(),
            t: t_total,
            mean_seconds: mean,
            sd_seconds: sd,
            seconds_per_unit: mean / t_total,
        });
    }
    Ok(rows)
}
