//! Exact path simulation by whole-path rejection against a Poisson field.
//!
//! The diffusion with discontinuous drift is never discretised. A change of
//! measure moves the drift into two factors: a terminal Girsanov weight,
//! handled by the retrospective h-target draw, and a path functional
//! `exp(-∫ φ⁺(X_s) ds)`, realised as the probability that an independent
//! Poisson field on `[0,T] × [0, ‖φ⁺‖_∞]` has no point on or below the graph
//! of `s ↦ φ⁺(X_s)`. Only the field times ever need path values, so a draw
//! touches the path at finitely many points: the accepted skeleton is exact
//! in law at every one of its times, and can be refined afterwards to any
//! grid through the skew-bridge dynamics ([`fill_path`]) without further
//! reference to the drift.
//!
//! [`rrs`] runs the rejection over the whole horizon; its acceptance
//! probability decays exponentially in `T`, so [`srrs`] splits the horizon
//! into congruent pieces of length at most `T_el` and chains the sampler,
//! trading exponential cost for linear. Batch drivers fan samples out over
//! independent random streams — one stream per sample index — so results
//! are reproducible bit-for-bit regardless of worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::density::ThetaParams;
use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::grs::{grs, BridgeTarget, GrsStats, HTarget};

/// Hard cap on whole-path restarts per accepted skeleton.
pub const RESTART_CAP: u64 = 1_000_000;

/// A realisation of the homogeneous unit-rate Poisson field on
/// `[0,T] × [0,m]`, stored as ordinate pairs with strictly increasing times.
#[derive(Debug, Clone)]
pub struct PoissonField {
    pub t_total: f64,
    pub height: f64,
    /// `(τ, x)` pairs, `τ` ascending.
    pub points: Vec<(f64, f64)>,
}

/// Draws a Poisson field: `Poisson(T·m)` points, times uniform on `(0,T)`
/// (sorted, ties kept), heights uniform on `(0,m)`. `m = 0` gives the empty
/// field.
pub fn sample_poisson_field<R: Rng + ?Sized>(t_total: f64, height: f64, rng: &mut R) -> PoissonField {
    let mut points = Vec::new();
    if height > 0.0 && t_total > 0.0 {
        let lambda = t_total * height;
        let count = Poisson::new(lambda)
            .expect("positive finite Poisson intensity")
            .sample(rng) as usize;
        points.reserve(count);
        for _ in 0..count {
            let tau = t_total * rng.random::<f64>();
            let x = height * rng.random::<f64>();
            points.push((tau, x));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite field times"));
    }
    PoissonField {
        t_total,
        height,
        points,
    }
}

/// An exact path skeleton: the diffusion evaluated at finitely many times,
/// every value exact in law (up to the flagged residual of undecided
/// retrospective draws).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    /// Strictly increasing, from `t0` to `t0 + T`.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// False where a retrospective decision hit the refinement floor.
    pub exact_flags: Vec<bool>,
    /// Base seed of the stream that produced the skeleton.
    pub seed: u64,
}

impl Skeleton {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time span `(first, last)`.
    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().expect("nonempty skeleton"))
    }

    pub fn terminal_value(&self) -> f64 {
        *self.values.last().expect("nonempty skeleton")
    }

    /// True when every retrospective decision along the path was certified.
    pub fn fully_exact(&self) -> bool {
        self.exact_flags.iter().all(|&e| e)
    }
}

/// Tuning parameters shared by the samplers and the density evaluations
/// they echo into metadata.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimConfig {
    /// Default horizon for batch drivers.
    pub t: f64,
    /// Elementary split length for [`srrs`]; clamped to `1/‖φ⁺‖_∞` at use.
    pub t_el: f64,
    /// Instrumental widening parameter in `(0,1)`.
    pub delta: f64,
    /// Base seed; sample `i` of a batch uses stream `i` of this seed.
    pub seed: u64,
    /// Series term cap for density evaluations driven by this config.
    pub n_cap: usize,
    /// Series tolerance for density evaluations driven by this config.
    pub tol: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            t: 1.0,
            t_el: 0.55,
            delta: 0.75,
            seed: 0,
            n_cap: 64,
            tol: 1e-10,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.t.is_finite() || !(self.t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be positive and finite, got T = {}",
                self.t
            )));
        }
        if !self.t_el.is_finite() || !(self.t_el > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "split length must be positive and finite, got T_el = {}",
                self.t_el
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "widening parameter must lie in (0, 1), got delta = {}",
                self.delta
            )));
        }
        if self.n_cap == 0 {
            return Err(Error::InvalidParameter(
                "series term cap must be at least 1".into(),
            ));
        }
        if !self.tol.is_finite() || !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "series tolerance must be positive, got tol = {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Per-path sampling diagnostics, aggregated across batches.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct PathStats {
    /// Whole-path restarts (attempts minus one).
    pub restarts: u64,
    /// Retrospective statistics of the terminal h-target draws.
    pub terminal: GrsStats,
    /// Retrospective statistics of the bridge draws at field times.
    pub bridge: GrsStats,
    /// Poisson field points generated over all attempts.
    pub field_points: u64,
}

impl PathStats {
    pub fn merge(&mut self, other: &PathStats) {
        self.restarts += other.restarts;
        self.terminal.merge(&other.terminal);
        self.bridge.merge(&other.bridge);
        self.field_points += other.field_points;
    }
}

/// Whole-path retrospective rejection sampling over `[t0, t0 + T]`.
///
/// Each attempt draws a Poisson field, a terminal value from the h-target,
/// and bridge values at the field times (left to right, each conditioned on
/// the previously accepted point and the terminal value). The attempt is
/// rejected — field, terminal and bridges all redrawn — as soon as any
/// field ordinate lies on or below `φ⁺` of the path value at its time. The
/// accepted skeleton carries `(t0, t0+τ₁, …, t0+τ_M, t0+T)` with values
/// `(x0, y₁, …, y_M, X_T)`.
pub fn rrs<R: Rng + ?Sized>(
    spec: &DriftSpec,
    x0: f64,
    t0: f64,
    t_total: f64,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<Skeleton> {
    rrs_with_stats(spec, x0, t0, t_total, cfg, rng).map(|(skel, _)| skel)
}

/// [`rrs`] with its sampling diagnostics.
pub fn rrs_with_stats<R: Rng + ?Sized>(
    spec: &DriftSpec,
    x0: f64,
    t0: f64,
    t_total: f64,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<(Skeleton, PathStats)> {
    cfg.validate()?;
    if !t_total.is_finite() || !(t_total > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive and finite, got T = {t_total}"
        )));
    }
    if !t0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "start time must be finite, got t0 = {t0}"
        )));
    }
    let theta = ThetaParams::from_drift(spec)?;
    let shift = spec.z1();
    let h_target = HTarget::new(spec, x0, t_total, cfg.delta)?;
    let height = spec.phi_sup();
    let mut stats = PathStats::default();
    let mut attempts = 0u64;

    'attempt: loop {
        attempts += 1;
        if attempts > RESTART_CAP {
            return Err(Error::RestartCapExceeded { cap: RESTART_CAP });
        }
        let field = sample_poisson_field(t_total, height, rng);
        stats.field_points += field.points.len() as u64;

        let terminal = grs(&h_target, rng)?;
        stats.terminal.record(&terminal);
        let x_t = terminal.value;

        let mut times = Vec::with_capacity(field.points.len() + 2);
        let mut values = Vec::with_capacity(field.points.len() + 2);
        let mut flags = Vec::with_capacity(field.points.len() + 2);
        times.push(t0);
        values.push(x0);
        flags.push(true);

        let mut t_prev = 0.0;
        let mut x_prev = x0;
        for &(tau, ordinate) in &field.points {
            // Tied or zero field times duplicate the previous path value;
            // the bridge at zero elapsed time is degenerate.
            let (y, exact) = if tau <= t_prev {
                (x_prev, *flags.last().expect("nonempty flags"))
            } else {
                let target = BridgeTarget::new(
                    &theta,
                    tau - t_prev,
                    t_total - t_prev,
                    x_prev - shift,
                    x_t - shift,
                )?;
                let out = grs(&target, rng)?;
                stats.bridge.record(&out);
                (out.value + shift, out.exact)
            };
            if ordinate <= spec.eval_phi_plus(y) {
                continue 'attempt;
            }
            times.push(t0 + tau);
            values.push(y);
            flags.push(exact);
            t_prev = tau;
            x_prev = y;
        }

        times.push(t0 + t_total);
        values.push(x_t);
        flags.push(terminal.exact);
        stats.restarts = attempts - 1;
        return Ok((
            Skeleton {
                times,
                values,
                exact_flags: flags,
                seed: cfg.seed,
            },
            stats,
        ));
    }
}

/// Split retrospective rejection sampling: the horizon is divided into
/// `m' = ⌈T / min(T_el, 1/‖φ⁺‖_∞)⌉` congruent intervals and [`rrs`] is
/// chained across them on the same stream, each interval seeded by the
/// previous terminal value. A single interval reduces to a plain [`rrs`]
/// call.
pub fn srrs<R: Rng + ?Sized>(
    spec: &DriftSpec,
    x0: f64,
    t0: f64,
    t_total: f64,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<Skeleton> {
    srrs_with_stats(spec, x0, t0, t_total, cfg, rng).map(|(skel, _)| skel)
}

/// [`srrs`] with merged per-interval diagnostics.
pub fn srrs_with_stats<R: Rng + ?Sized>(
    spec: &DriftSpec,
    x0: f64,
    t0: f64,
    t_total: f64,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<(Skeleton, PathStats)> {
    cfg.validate()?;
    if !t_total.is_finite() || !(t_total > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive and finite, got T = {t_total}"
        )));
    }
    let phi_sup = spec.phi_sup();
    let t_el = if phi_sup > 0.0 {
        cfg.t_el.min(1.0 / phi_sup)
    } else {
        cfg.t_el
    };
    let m_prime = ((t_total / t_el).ceil() as usize).max(1);
    if m_prime == 1 {
        return rrs_with_stats(spec, x0, t0, t_total, cfg, rng);
    }

    let mut skeleton = Skeleton {
        times: vec![t0],
        values: vec![x0],
        exact_flags: vec![true],
        seed: cfg.seed,
    };
    let mut stats = PathStats::default();
    let mut x_cur = x0;
    for k in 0..m_prime {
        let start = t0 + t_total * (k as f64 / m_prime as f64);
        let end = if k + 1 == m_prime {
            t0 + t_total
        } else {
            t0 + t_total * ((k + 1) as f64 / m_prime as f64)
        };
        let (mut part, part_stats) =
            rrs_with_stats(spec, x_cur, start, end - start, cfg, rng)?;
        // Pin the junction time exactly; `start + (end - start)` may differ
        // from `end` by an ulp.
        *part.times.last_mut().expect("nonempty interval skeleton") = end;
        x_cur = part.terminal_value();
        stats.merge(&part_stats);
        skeleton.times.extend_from_slice(&part.times[1..]);
        skeleton.values.extend_from_slice(&part.values[1..]);
        skeleton.exact_flags.extend_from_slice(&part.exact_flags[1..]);
    }
    Ok((skeleton, stats))
}

/// Refines a barrier-normalised skeleton by inserting bridge-sampled values
/// at the requested times.
///
/// Conditionally on an accepted skeleton, the path between adjacent
/// skeleton points follows the pure skew-bridge dynamics — the Girsanov
/// weight telescopes away and the Poisson field imposes no constraint
/// strictly between skeleton times — so no drift information is needed.
/// Values are interpreted in barrier coordinates (barriers at `0` and
/// `theta.z`); see [`fill_path_shifted`] for skeletons in user coordinates.
/// Times already present are left untouched, so the operation is
/// idempotent. Requested times are processed in ascending order, each
/// conditioned on the working skeleton including earlier insertions.
pub fn fill_path<R: Rng + ?Sized>(
    skeleton: &Skeleton,
    times: &[f64],
    theta: &ThetaParams,
    rng: &mut R,
) -> Result<Skeleton> {
    fill_path_shifted(skeleton, times, theta, 0.0, rng)
}

/// [`fill_path`] for skeletons in user coordinates with the lower barrier
/// at `z1`: values are shifted into barrier coordinates for the bridge
/// draws and shifted back on output.
pub fn fill_path_shifted<R: Rng + ?Sized>(
    skeleton: &Skeleton,
    times: &[f64],
    theta: &ThetaParams,
    z1: f64,
    rng: &mut R,
) -> Result<Skeleton> {
    if skeleton.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot refine an empty skeleton".into(),
        ));
    }
    let (lo, hi) = skeleton.span();
    let mut requested: Vec<f64> = times.to_vec();
    requested.sort_by(|a, b| a.partial_cmp(b).expect("finite requested times"));

    let mut out_times = skeleton.times.clone();
    let mut out_values = skeleton.values.clone();
    let mut out_flags = skeleton.exact_flags.clone();

    for &t in &requested {
        if !t.is_finite() || t < lo || t > hi {
            return Err(Error::TimeOutsideSpan { t, lo, hi });
        }
        let idx = out_times.partition_point(|&s| s < t);
        if out_times.get(idx) == Some(&t) {
            continue;
        }
        // `lo` and `hi` are skeleton entries, so interior brackets exist.
        let (t_l, x_l) = (out_times[idx - 1], out_values[idx - 1]);
        let (t_r, x_r) = (out_times[idx], out_values[idx]);
        let target = BridgeTarget::new(theta, t - t_l, t_r - t_l, x_l - z1, x_r - z1)?;
        let draw = grs(&target, rng)?;
        out_times.insert(idx, t);
        out_values.insert(idx, draw.value + z1);
        out_flags.insert(idx, draw.exact);
    }
    Ok(Skeleton {
        times: out_times,
        values: out_values,
        exact_flags: out_flags,
        seed: skeleton.seed,
    })
}

/// Explicit Euler–Maruyama baseline: `X_{k+1} = X_k + b(X_k) h + √h Z_k`,
/// with a final partial step when the horizon is not a multiple of `h`.
/// Returns the terminal value.
pub fn euler_maruyama<R: Rng + ?Sized>(
    spec: &DriftSpec,
    x0: f64,
    t_total: f64,
    step: f64,
    rng: &mut R,
) -> Result<f64> {
    if !t_total.is_finite() || !(t_total > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be positive and finite, got T = {t_total}"
        )));
    }
    if !step.is_finite() || !(step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive and finite, got step = {step}"
        )));
    }
    let step = step.min(t_total);
    let n_full = (t_total / step).floor() as u64;
    let mut x = x0;
    for _ in 0..n_full {
        let z: f64 = rng.sample(StandardNormal);
        x += spec.eval_b(x) * step + step.sqrt() * z;
    }
    let rest = t_total - n_full as f64 * step;
    if rest > step * 1e-9 {
        let z: f64 = rng.sample(StandardNormal);
        x += spec.eval_b(x) * rest + rest.sqrt() * z;
    }
    Ok(x)
}

/// Terminal-sampling method selector for the batch drivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    /// Whole-horizon retrospective rejection.
    Rrs,
    /// Split retrospective rejection.
    Srrs,
    /// Euler–Maruyama with the given step.
    Euler { step: f64 },
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Rrs => write!(f, "rrs"),
            Method::Srrs => write!(f, "srrs"),
            Method::Euler { step } => write!(f, "euler({step:e})"),
        }
    }
}

/// Terminal values of a batch together with aggregated diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct BatchOutput {
    pub values: Vec<f64>,
    /// Per-sample certification: true when every retrospective decision on
    /// the sample's path was exact. Always false for Euler samples, which
    /// are approximate by construction.
    pub exact: Vec<bool>,
    pub stats: PathStats,
}

/// The generator used throughout: ChaCha8 keyed by `seed`, positioned on
/// `stream`. Batch sample `i` draws from stream `i`, so any single sample
/// can be reproduced in isolation.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_sample(
    spec: &DriftSpec,
    x0: f64,
    method: Method,
    cfg: &SimConfig,
    index: u64,
) -> Result<(f64, bool, PathStats)> {
    let mut rng = stream_rng(cfg.seed, index);
    match method {
        Method::Rrs => {
            let (skel, stats) = rrs_with_stats(spec, x0, 0.0, cfg.t, cfg, &mut rng)?;
            Ok((skel.terminal_value(), skel.fully_exact(), stats))
        }
        Method::Srrs => {
            let (skel, stats) = srrs_with_stats(spec, x0, 0.0, cfg.t, cfg, &mut rng)?;
            Ok((skel.terminal_value(), skel.fully_exact(), stats))
        }
        Method::Euler { step } => Ok((
            euler_maruyama(spec, x0, cfg.t, step, &mut rng)?,
            false,
            PathStats::default(),
        )),
    }
}

fn assemble(rows: Vec<(f64, bool, PathStats)>) -> BatchOutput {
    let mut stats = PathStats::default();
    let mut values = Vec::with_capacity(rows.len());
    let mut exact = Vec::with_capacity(rows.len());
    for (value, flag, row_stats) in rows {
        values.push(value);
        exact.push(flag);
        stats.merge(&row_stats);
    }
    BatchOutput {
        values,
        exact,
        stats,
    }
}

/// Draws `n` terminal samples on independent streams, sequentially.
/// Identical output to [`batch_terminal`] for the same configuration.
pub fn batch_terminal_sequential(
    spec: &DriftSpec,
    x0: f64,
    method: Method,
    n: usize,
    cfg: &SimConfig,
) -> Result<BatchOutput> {
    cfg.validate()?;
    let rows = (0..n as u64)
        .map(|i| run_sample(spec, x0, method, cfg, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(rows))
}

/// Draws `n` terminal samples on independent streams, fanned out across
/// the rayon worker pool. Sample `i` depends only on `(cfg.seed, i)`, so
/// the output is byte-identical to the sequential driver.
#[cfg(feature = "parallel")]
pub fn batch_terminal(
    spec: &DriftSpec,
    x0: f64,
    method: Method,
    n: usize,
    cfg: &SimConfig,
) -> Result<BatchOutput> {
    use rayon::prelude::*;
    cfg.validate()?;
    let rows = (0..n as u64)
        .into_par_iter()
        .map(|i| run_sample(spec, x0, method, cfg, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(rows))
}

/// Sequential fallback when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn batch_terminal(
    spec: &DriftSpec,
    x0: f64,
    method: Method,
    n: usize,
    cfg: &SimConfig,
) -> Result<BatchOutput> {
    batch_terminal_sequential(spec, x0, method, n, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_cfg() -> SimConfig {
        SimConfig {
            seed: 42,
            ..SimConfig::default()
        }
    }

    #[test]
    fn poisson_field_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut total = 0usize;
        let mut empties = 0usize;
        let n = 10_000;
        for _ in 0..n {
            let field = sample_poisson_field(0.55, 0.5, &mut rng);
            total += field.points.len();
            empties += usize::from(field.points.is_empty());
            for window in field.points.windows(2) {
                assert!(window[0].0 <= window[1].0);
            }
            for &(tau, x) in &field.points {
                assert!((0.0..0.55).contains(&tau));
                assert!((0.0..0.5).contains(&x));
            }
        }
        let mean = total as f64 / n as f64;
        assert!((mean - 0.275).abs() < 0.02, "mean count {mean}");
        let empty_frac = empties as f64 / n as f64;
        assert!(
            (empty_frac - (-0.275f64).exp()).abs() < 0.01,
            "empty fraction {empty_frac}"
        );
    }

    #[test]
    fn zero_height_field_is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(sample_poisson_field(2.0, 0.0, &mut rng).points.is_empty());
        }
    }

    #[test]
    fn constant_drift_rrs_degenerates_to_drifted_gaussian() {
        let spec = DriftSpec::constant(0.7);
        let cfg = test_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 4_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let (skel, stats) = rrs_with_stats(&spec, 0.2, 0.0, 1.0, &cfg, &mut rng).unwrap();
            assert_eq!(skel.len(), 2, "no field points for vanishing φ⁺");
            assert_eq!(stats.field_points, 0);
            assert_eq!(stats.restarts, 0);
            assert!(skel.fully_exact());
            let x = skel.terminal_value();
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!((mean - 0.9).abs() < 0.06, "terminal mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "terminal variance {var}");
    }

    #[test]
    fn skeleton_shape_for_indicator_drift() {
        let spec = DriftSpec::builtin_b1();
        let cfg = test_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let skel = rrs(&spec, 0.5, 0.25, 0.55, &cfg, &mut rng).unwrap();
            assert_eq!(skel.times[0], 0.25);
            assert_eq!(*skel.times.last().unwrap(), 0.8);
            assert_eq!(skel.values[0], 0.5);
            for window in skel.times.windows(2) {
                assert!(window[0] < window[1], "times must increase");
            }
            for &v in &skel.values {
                assert!(v.is_finite());
            }
        }
    }

    #[test]
    fn srrs_single_interval_matches_rrs_stream_for_stream() {
        let spec = DriftSpec::builtin_b1();
        let cfg = SimConfig {
            t: 0.4,
            ..test_cfg()
        };
        let mut rng_a = ChaCha8Rng::seed_from_u64(123);
        let mut rng_b = ChaCha8Rng::seed_from_u64(123);
        let a = rrs(&spec, 0.5, 0.3, 0.4, &cfg, &mut rng_a).unwrap();
        let b = srrs(&spec, 0.5, 0.3, 0.4, &cfg, &mut rng_b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn srrs_congruent_junctions() {
        let spec = DriftSpec::builtin_b1();
        let cfg = SimConfig {
            t: 2.0,
            ..test_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        // 1/‖φ⁺‖ = 2 for the indicator drift, so T_el stays 0.55 and
        // ⌈2/0.55⌉ = 4 congruent intervals of length 1/2 are used.
        let skel = srrs(&spec, 0.5, 0.0, 2.0, &cfg, &mut rng).unwrap();
        for junction in [0.5, 1.0, 1.5, 2.0] {
            assert!(
                skel.times.contains(&junction),
                "missing junction {junction}"
            );
        }
        let (lo, hi) = skel.span();
        assert_eq!(lo, 0.0);
        assert_eq!(hi, 2.0);
        for window in skel.times.windows(2) {
            assert!(window[0] < window[1]);
        }
    }

    #[test]
    fn srrs_clamps_split_length_to_inverse_phi_sup() {
        let spec = DriftSpec::builtin_b1();
        let cfg = SimConfig {
            t: 3.0,
            t_el: 10.0,
            ..test_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        // Clamped T_el = 2, so ⌈3/2⌉ = 2 intervals with junction at 1.5.
        let skel = srrs(&spec, 0.5, 0.0, 3.0, &cfg, &mut rng).unwrap();
        assert!(skel.times.contains(&1.5));
    }

    #[test]
    fn batch_reproducible_and_stream_indexed() {
        let spec = DriftSpec::builtin_b1();
        let cfg = SimConfig {
            t: 0.55,
            ..test_cfg()
        };
        let a = batch_terminal(&spec, 0.5, Method::Rrs, 64, &cfg).unwrap();
        let b = batch_terminal(&spec, 0.5, Method::Rrs, 64, &cfg).unwrap();
        assert_eq!(a.values, b.values);
        let c = batch_terminal_sequential(&spec, 0.5, Method::Rrs, 64, &cfg).unwrap();
        assert_eq!(a.values, c.values);
        // Stream indexing: a shorter batch is a prefix of a longer one.
        let d = batch_terminal(&spec, 0.5, Method::Rrs, 16, &cfg).unwrap();
        assert_eq!(&a.values[..16], &d.values[..]);
    }

    #[test]
    fn fill_path_idempotent_on_existing_times() {
        let spec = DriftSpec::builtin_b1();
        let cfg = test_cfg();
        let theta = ThetaParams::from_drift(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let skel = rrs(&spec, 0.5, 0.0, 0.55, &cfg, &mut rng).unwrap();
        let same = fill_path_shifted(&skel, &skel.times.clone(), &theta, spec.z1(), &mut rng)
            .unwrap();
        assert_eq!(skel, same);
    }

    #[test]
    fn fill_path_inserts_sorted_and_respects_span() {
        let spec = DriftSpec::builtin_b1();
        let cfg = test_cfg();
        let theta = ThetaParams::from_drift(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let skel = rrs(&spec, 0.5, 0.0, 0.55, &cfg, &mut rng).unwrap();
        let refined =
            fill_path_shifted(&skel, &[0.1, 0.25, 0.4, 0.51], &theta, spec.z1(), &mut rng)
                .unwrap();
        assert_eq!(refined.len(), skel.len() + 4);
        for window in refined.times.windows(2) {
            assert!(window[0] < window[1]);
        }
        for t in [0.1, 0.25, 0.4, 0.51] {
            assert!(refined.times.contains(&t));
        }
        // Span violations error out.
        let err = fill_path_shifted(&skel, &[0.7], &theta, spec.z1(), &mut rng);
        assert!(matches!(err, Err(Error::TimeOutsideSpan { .. })));
    }

    #[test]
    fn fill_path_zero_skew_is_brownian_bridge() {
        // With both jump heights zero the bridge target terminates at the
        // Gaussian term, so inserted values follow the Brownian bridge law.
        let theta = ThetaParams::with_default_shift(0.0, 0.0, 1.0).unwrap();
        let skel = Skeleton {
            times: vec![0.0, 1.0],
            values: vec![0.0, 0.0],
            exact_flags: vec![true, true],
            seed: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 4_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let refined = fill_path(&skel, &[0.3], &theta, &mut rng).unwrap();
            let y = refined.values[1];
            assert!(refined.exact_flags[1], "terminating target is exact");
            sum += y;
            sum_sq += y * y;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "bridge mean {mean}");
        assert!((var - 0.21).abs() < 0.025, "bridge variance {var}");
    }

    #[test]
    fn euler_constant_drift_moments() {
        let spec = DriftSpec::constant(0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let n = 4_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = euler_maruyama(&spec, 0.0, 1.0, 0.3, &mut rng).unwrap();
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!((mean - 0.7).abs() < 0.06, "euler mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "euler variance {var}");
    }

    #[test]
    fn euler_rejects_bad_arguments() {
        let spec = DriftSpec::constant(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(euler_maruyama(&spec, 0.0, -1.0, 0.1, &mut rng).is_err());
        assert!(euler_maruyama(&spec, 0.0, 1.0, 0.0, &mut rng).is_err());
        // Oversized steps are clamped to the horizon, not an error.
        assert!(euler_maruyama(&spec, 0.0, 0.5, 2.0, &mut rng).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        let bad = SimConfig {
            delta: 1.0,
            ..SimConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SimConfig {
            t_el: 0.0,
            ..SimConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SimConfig {
            t: f64::INFINITY,
            ..SimConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn indicator_drift_proposal_counts() {
        // Terminal-draw acceptance for the indicator drift at T = 0.55,
        // delta = 0.75 sits near 0.196, i.e. slightly more than five
        // proposals per accepted draw.
        let spec = DriftSpec::builtin_b1();
        let cfg = SimConfig {
            t: 0.55,
            ..test_cfg()
        };
        let out = batch_terminal(&spec, 0.5, Method::Rrs, 2_000, &cfg).unwrap();
        let mean_props = out.stats.terminal.mean_proposals();
        assert!(
            (4.0..6.5).contains(&mean_props),
            "terminal proposals per draw {mean_props}"
        );
        // Whole-path restarts are rare: most fields are empty.
        let mean_restarts = out.stats.restarts as f64 / 2_000.0;
        assert!(mean_restarts < 1.0, "mean restarts {mean_restarts}");
    }
}
