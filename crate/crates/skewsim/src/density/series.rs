//! Series evaluation of the correction factors `v` with certified bounds.
//!
//! # Shape of the series
//!
//! Both parameterisations expand `v(t, x, y)` over reflection orders
//! `k = 0, 1, 2, ...` and image families `j = 1..4`:
//!
//! ```text
//! v = sum_k base^k * sum_j F_{j,k},
//! ```
//!
//! where `base = -theta1 theta2 t` (theta form) or `-beta1 beta2` after
//! folding the drift powers (beta form; the raw expansion carries
//! `(-beta1 beta2 mu^2 t)^k` against an `m^{-2k}` inside `F`, and
//! `m^2 = mu^2 t` cancels them exactly). Each `F_{j,k}` is a divided
//! difference of the incomplete-moment sums `G` between the two scaled skew
//! parameters; when those collide the evaluator switches to the confluent
//! branch, which replaces the divided difference by the limiting
//! `(-1)^{k+1} / (2k+1)!` derivative term. The series is symmetric under
//! swapping the two scaled parameters, so substituting their mean in the
//! near-confluent band costs only `O(separation^2)` — still, a warning is
//! emitted because that substitution error is not covered by the certified
//! truncation bound.
//!
//! # Conditioning
//!
//! Every term is accumulated in the *scaled* form: the `G` sums are
//! evaluated without their `exp(-omega^2/2)` factor and re-weighted by the
//! lump `exp((omega_{1,0}^2 - omega_{j,k}^2)/2) <= 1`, so no intermediate
//! underflows before the small terms are formed. A lump that underflows to
//! exact zero certifies the whole term is far below resolution and the
//! `G` evaluation is skipped. Terms are added with compensated summation,
//! within each order the `j = 1` family (the largest, lump `1` at `k = 0`)
//! last.
//!
//! # Certified truncation
//!
//! With `q = exp(-2 z^2 / t)`, the tail after truncation index `N` is
//! bounded by `C q^{N+1} / (1 - q)`; `C` is [`bound_c`] in the theta form
//! and the fixed constant `3` in the beta form. The evaluators stop when
//! that bound drops below `tol` or the term cap is reached — in the latter
//! case the (large) bound is returned honestly rather than erroring out.

use crate::error::{Error, Result};
use crate::special::{factorial, g_scaled, mills_ratio};

use super::coeffs;
use super::{
    geometric_terms, BetaParams, ThetaParams, TruncatedValue, BETA_SERIES_C,
    EQUAL_BRANCH_THRESHOLD,
};

/// Highest truncation index the evaluators use. Keeps every combinatorial
/// index inside the factorial-table range (`4k + 3 <= 255` for the scaled
/// `S` sums at order `k`); the geometric tail bound at this depth is far
/// below any practical tolerance whenever the bound is useful at all.
const MAX_SERIES_INDEX: usize = 63;

/// Compensated (Kahan) accumulator.
#[derive(Debug, Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Geometric decay rate `q = exp(-2 z^2 / t)` of the reflection series.
pub(crate) fn decay_q(z: f64, t: f64) -> f64 {
    (-2.0 * z * z / t).exp()
}

/// Lump factor `exp((omega10^2 - omega^2)/2) <= 1`, in the factored form
/// that stays accurate when the two arguments are close.
fn lump(omega10: f64, omega: f64) -> f64 {
    (0.5 * (omega10 - omega) * (omega10 + omega)).exp()
}

pub(super) fn check_point(t: f64, x: f64, y: f64) -> Result<()> {
    if !t.is_finite() || !(t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be positive and finite, got t = {t}"
        )));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "evaluation points must be finite, got x = {x}, y = {y}"
        )));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !tol.is_finite() || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "series tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Collapses theta parameters in the near-confluent band onto their mean,
/// with a warning; exact equality passes through silently.
fn effective_theta(params: &ThetaParams, t: f64) -> ThetaParams {
    let (v1, v2) = params.vartheta(t);
    let d = (v1 - v2).abs();
    if d > 0.0 && d < EQUAL_BRANCH_THRESHOLD {
        tracing::warn!(
            theta1 = params.theta1,
            theta2 = params.theta2,
            t,
            "nearly confluent skew parameters; evaluating the confluent branch at their mean"
        );
        let mean = 0.5 * (params.theta1 + params.theta2);
        return ThetaParams {
            theta1: mean,
            theta2: mean,
            ..*params
        };
    }
    *params
}

/// Beta analogue of [`effective_theta`], collapsing on the scaled
/// parameters `tau_i = beta_i mu sqrt t`.
fn effective_beta(params: &BetaParams, t: f64) -> BetaParams {
    let (t1, t2) = params.tau(t);
    let d = (t1 - t2).abs();
    if d > 0.0 && d < EQUAL_BRANCH_THRESHOLD {
        tracing::warn!(
            beta1 = params.beta1,
            beta2 = params.beta2,
            t,
            "nearly confluent skew parameters; evaluating the confluent branch at their mean"
        );
        let mean = 0.5 * (params.beta1 + params.beta2);
        return BetaParams {
            beta1: mean,
            beta2: mean,
            ..*params
        };
    }
    *params
}

/// Common driver interface of the two series evaluators.
trait SkewSeries {
    /// Adds the next reflection order to the accumulator.
    fn advance(&mut self) -> Result<()>;
    fn value(&self) -> f64;
    /// Number of orders accumulated so far (`N + 1` at truncation index `N`).
    fn terms(&self) -> usize;
    /// True when the skew product vanishes, so every order past the first
    /// is exactly zero.
    fn terminating(&self) -> bool;
}

/// Runs a series until `rem_scale * q^(N+1) <= tol` or the term cap.
fn drive<S: SkewSeries>(
    series: &mut S,
    q: f64,
    rem_scale: f64,
    tol: f64,
    n_cap: usize,
) -> Result<TruncatedValue> {
    let max_terms = n_cap.min(MAX_SERIES_INDEX) + 1;
    loop {
        series.advance()?;
        let rem = if series.terminating() {
            0.0
        } else {
            rem_scale * q.powi(series.terms() as i32)
        };
        if rem <= tol || series.terms() >= max_terms {
            return Ok(TruncatedValue {
                value: series.value(),
                n_terms: series.terms(),
                remainder_bound: rem,
            });
        }
    }
}

/// Runs a series for exactly `n_terms` orders (clamped to the cap) and
/// reports the certified bound at that depth.
fn drive_fixed<S: SkewSeries>(
    series: &mut S,
    q: f64,
    rem_scale: f64,
    n_terms: usize,
) -> Result<TruncatedValue> {
    let goal = n_terms.max(1).min(MAX_SERIES_INDEX + 1);
    for _ in 0..goal {
        series.advance()?;
    }
    let rem = if series.terminating() {
        0.0
    } else {
        rem_scale * q.powi(goal as i32)
    };
    Ok(TruncatedValue {
        value: series.value(),
        n_terms: goal,
        remainder_bound: rem,
    })
}

/// Incremental evaluator of the theta-form series. Parameters are assumed
/// to be already collapsed by [`effective_theta`].
struct ThetaSeries {
    base: f64,
    vt1: f64,
    vt2: f64,
    equal: bool,
    a_tilde: f64,
    omega_base: [f64; 4],
    omega_step: f64,
    omega10: f64,
    co: [[f64; 3]; 4],
    k: usize,
    pow: f64,
    acc: KahanSum,
}

impl ThetaSeries {
    fn new(t: f64, x: f64, y: f64, eff: &ThetaParams) -> ThetaSeries {
        let (vt1, vt2) = eff.vartheta(t);
        let a = geometric_terms(x, y, eff.z);
        let sep = (y - x).abs();
        let st = t.sqrt();
        let omega_base = [
            (a[0] + sep) / st,
            (a[1] + sep) / st,
            (a[2] + sep) / st,
            (a[3] + sep) / st,
        ];
        let mut co = [[0.0; 3]; 4];
        for (j, row) in co.iter_mut().enumerate() {
            *row = coeffs::coeffs_theta(j + 1, y, t, eff);
        }
        ThetaSeries {
            base: -eff.theta1 * eff.theta2 * t,
            vt1,
            vt2,
            equal: vt1 == vt2,
            a_tilde: eff.a_tilde(t),
            omega_base,
            omega_step: 2.0 * eff.z / st,
            omega10: omega_base[0],
            co,
            k: 0,
            pow: 1.0,
            acc: KahanSum::default(),
        }
    }

    /// Divided-difference family sum at separated parameters.
    fn family_general(&self, j: usize, k: usize, omega: f64) -> Result<f64> {
        let d = self.vt1 - self.vt2;
        let fk = factorial(k)?;
        let mut total = 0.0;
        for n in 0..=k {
            let a_kn = factorial(2 * k - n)? / (factorial(k - n)? * factorial(n)? * fk);
            let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
            let mut inner = 0.0;
            for h in 0..3usize {
                let c = self.co[j - 1][2 - h];
                if c == 0.0 {
                    continue;
                }
                let g2 = g_scaled(h, 0, n, omega, self.a_tilde, self.vt2)?;
                let g1 = g_scaled(h, 0, n, omega, self.a_tilde, self.vt1)?;
                inner += c * (g2 - sign_n * g1);
            }
            total += a_kn / d.powi((2 * k + 1 - n) as i32) * inner;
        }
        Ok(total)
    }

    /// Confluent-limit family sum: the divided difference collapses to the
    /// order-`2k+1` term.
    fn family_equal(&self, j: usize, k: usize, omega: f64) -> Result<f64> {
        let n = 2 * k + 1;
        let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
        let mut inner = 0.0;
        for h in 0..3usize {
            let c = self.co[j - 1][2 - h];
            if c == 0.0 {
                continue;
            }
            inner += c * g_scaled(h, 0, n, omega, self.a_tilde, self.vt1)?;
        }
        Ok(sign / factorial(n)? * inner)
    }
}

impl SkewSeries for ThetaSeries {
    fn advance(&mut self) -> Result<()> {
        let k = self.k;
        if self.pow != 0.0 {
            // Family 1 (lump factor 1 at k = 0) is the largest; add it last.
            for j in [2usize, 3, 4, 1] {
                let omega = self.omega_base[j - 1] + self.omega_step * k as f64;
                let lmp = lump(self.omega10, omega);
                if lmp == 0.0 {
                    continue;
                }
                let fam = if self.equal {
                    self.family_equal(j, k, omega)?
                } else {
                    self.family_general(j, k, omega)?
                };
                self.acc.add(self.pow * lmp * fam);
            }
        }
        self.pow *= self.base;
        self.k += 1;
        Ok(())
    }

    fn value(&self) -> f64 {
        self.acc.value()
    }

    fn terms(&self) -> usize {
        self.k
    }

    fn terminating(&self) -> bool {
        self.base == 0.0
    }
}

/// Incremental evaluator of the beta-form series. Parameters are assumed
/// to be already collapsed by [`effective_beta`].
struct BetaSeries {
    base: f64,
    tau1: f64,
    tau2: f64,
    equal: bool,
    a_tilde: f64,
    /// `m^2 - a_tilde^2`, the binomial weight of the drift expansion.
    msq_asq: f64,
    omega_base: [f64; 4],
    omega_step: f64,
    omega10: f64,
    co: [[f64; 3]; 4],
    k: usize,
    pow: f64,
    acc: KahanSum,
}

impl BetaSeries {
    fn new(t: f64, x: f64, y: f64, eff: &BetaParams) -> BetaSeries {
        let m = eff.m(t);
        let (tau1, tau2) = eff.tau(t);
        let a_tilde = eff.a_tilde(t);
        let a = geometric_terms(x, y, eff.z);
        let sep = (y - x).abs();
        let st = t.sqrt();
        let omega_base = [
            (a[0] + sep) / st,
            (a[1] + sep) / st,
            (a[2] + sep) / st,
            (a[3] + sep) / st,
        ];
        let mut co = [[0.0; 3]; 4];
        for (j, row) in co.iter_mut().enumerate() {
            *row = coeffs::beta_compose(coeffs::coeffs_beta(j + 1, y, eff), m, a_tilde);
        }
        BetaSeries {
            // The raw order coefficient (-beta1 beta2 mu^2 t)^k cancels the
            // m^{-2k} inside the family sums; both are folded away here.
            base: -eff.beta1 * eff.beta2,
            tau1,
            tau2,
            equal: tau1 == tau2,
            a_tilde,
            msq_asq: m * m - a_tilde * a_tilde,
            omega_base,
            omega_step: 2.0 * eff.z / st,
            omega10: omega_base[0],
            co,
            k: 0,
            pow: 1.0,
            acc: KahanSum::default(),
        }
    }

    /// The `(m', s, h)` triple sum shared by both branches; `g(order, m')`
    /// supplies the (divided-difference or confluent) incomplete-moment
    /// factor.
    fn image_sum<F>(&self, j: usize, k: usize, g: F) -> Result<f64>
    where
        F: Fn(usize, usize) -> Result<f64>,
    {
        let fk = factorial(k)?;
        let mut acc = 0.0;
        for mp in 0..=k {
            let bkm = fk / (factorial(mp)? * factorial(k - mp)?);
            for s in 0..=(k - mp) {
                let bs = factorial(k - mp)? / (factorial(s)? * factorial(k - mp - s)?);
                let coef = bkm
                    * bs
                    * (-2.0 * self.a_tilde).powi((k - mp - s) as i32)
                    * self.msq_asq.powi(s as i32);
                if coef == 0.0 {
                    continue;
                }
                let mut hsum = 0.0;
                for h in 0..3usize {
                    let c = self.co[j - 1][2 - h];
                    if c == 0.0 {
                        continue;
                    }
                    hsum += c * g(k + h - s, mp)?;
                }
                acc += coef * hsum;
            }
        }
        Ok(acc)
    }

    fn family_general(&self, j: usize, k: usize, omega: f64) -> Result<f64> {
        let d = self.tau1 - self.tau2;
        let fk = factorial(k)?;
        let mut total = 0.0;
        for n in 0..=k {
            let a_kn = factorial(2 * k - n)? / (factorial(k - n)? * factorial(n)? * fk);
            let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
            let inner = self.image_sum(j, k, |order, mp| {
                Ok(g_scaled(order, mp, n, omega, self.a_tilde, self.tau2)?
                    - sign_n * g_scaled(order, mp, n, omega, self.a_tilde, self.tau1)?)
            })?;
            total += a_kn / d.powi((2 * k + 1 - n) as i32) * inner;
        }
        Ok(total)
    }

    fn family_equal(&self, j: usize, k: usize, omega: f64) -> Result<f64> {
        let n = 2 * k + 1;
        let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
        let inner = self.image_sum(j, k, |order, mp| {
            g_scaled(order, mp, n, omega, self.a_tilde, self.tau1)
        })?;
        Ok(sign / factorial(n)? * inner)
    }
}

impl SkewSeries for BetaSeries {
    fn advance(&mut self) -> Result<()> {
        let k = self.k;
        if self.pow != 0.0 {
            for j in [2usize, 3, 4, 1] {
                let omega = self.omega_base[j - 1] + self.omega_step * k as f64;
                let lmp = lump(self.omega10, omega);
                if lmp == 0.0 {
                    continue;
                }
                let fam = if self.equal {
                    self.family_equal(j, k, omega)?
                } else {
                    self.family_general(j, k, omega)?
                };
                self.acc.add(self.pow * lmp * fam);
            }
        }
        self.pow *= self.base;
        self.k += 1;
        Ok(())
    }

    fn value(&self) -> f64 {
        self.acc.value()
    }

    fn terms(&self) -> usize {
        self.k
    }

    fn terminating(&self) -> bool {
        self.base == 0.0
    }
}

/// Truncation constant `C` of the theta-form tail bound
/// `C q^{N+1} / (1 - q)`.
///
/// Built from the Mills ratio of the scaled parameters; the confluent
/// expression applies on exact equality, the separated one elsewhere (its
/// divided factors are capped, so it degrades gracefully near confluence).
pub fn bound_c(params: &ThetaParams, t: f64) -> f64 {
    let st = t.sqrt();
    let (th1, th2) = (params.theta1, params.theta2);
    if th1 == th2 {
        return 1.0 + 2.0 * st * th1.abs() * mills_ratio(th1 * st) + 3.0 * th1 * th1 * t;
    }
    let phi1 = mills_ratio(th1 * st);
    let phi2 = mills_ratio(th2 * st);
    let psi = |ta: f64, pa: f64, tb: f64, pb: f64| -> f64 {
        ta.abs() * st * pa
            + tb.abs() * st * pb
            + 2.0f64.min(
                (((ta + tb) / (ta - tb)).abs() - 1.0) * ta.abs() * st * pa
                    + 2.0 * (ta * tb * st / (ta - tb)).abs() * pb,
            )
    };
    let cross = 1.0f64.min((th1 * th2 * st / (th1 - th2)).abs() * (phi1 - phi2).abs());
    1.0 + psi(th1, phi1, th2, phi2).max(psi(th2, phi2, th1, phi1)) + cross
}

fn theta_trivial(params: &ThetaParams) -> Option<TruncatedValue> {
    if params.theta1 == 0.0 && params.theta2 == 0.0 {
        Some(TruncatedValue {
            value: 1.0,
            n_terms: 1,
            remainder_bound: 0.0,
        })
    } else {
        None
    }
}

fn beta_trivial(params: &BetaParams) -> Option<TruncatedValue> {
    if params.beta1 == 0.0 && params.beta2 == 0.0 {
        Some(TruncatedValue {
            value: 1.0,
            n_terms: 1,
            remainder_bound: 0.0,
        })
    } else {
        None
    }
}

/// The theta-form correction factor `v(t, x, y)` with certified truncation.
pub fn v_theta(
    t: f64,
    x: f64,
    y: f64,
    params: &ThetaParams,
    tol: f64,
    n_cap: usize,
) -> Result<TruncatedValue> {
    check_point(t, x, y)?;
    check_tol(tol)?;
    if let Some(v) = theta_trivial(params) {
        return Ok(v);
    }
    let eff = effective_theta(params, t);
    let q = decay_q(eff.z, t);
    let scale = bound_c(&eff, t) / (1.0 - q);
    let mut series = ThetaSeries::new(t, x, y, &eff);
    drive(&mut series, q, scale, tol, n_cap)
}

/// Partial sum of the theta-form series at a fixed number of terms, with
/// the certified bound at that depth.
pub fn v_theta_partial(
    t: f64,
    x: f64,
    y: f64,
    params: &ThetaParams,
    n_terms: usize,
) -> Result<TruncatedValue> {
    check_point(t, x, y)?;
    if let Some(v) = theta_trivial(params) {
        return Ok(v);
    }
    let eff = effective_theta(params, t);
    let q = decay_q(eff.z, t);
    let scale = bound_c(&eff, t) / (1.0 - q);
    let mut series = ThetaSeries::new(t, x, y, &eff);
    drive_fixed(&mut series, q, scale, n_terms)
}

/// The beta-form correction factor `v(t, x, y)` with certified truncation.
pub fn v_beta(
    t: f64,
    x: f64,
    y: f64,
    params: &BetaParams,
    tol: f64,
    n_cap: usize,
) -> Result<TruncatedValue> {
    check_point(t, x, y)?;
    check_tol(tol)?;
    if let Some(v) = beta_trivial(params) {
        return Ok(v);
    }
    let eff = effective_beta(params, t);
    let q = decay_q(eff.z, t);
    let scale = BETA_SERIES_C / (1.0 - q);
    let mut series = BetaSeries::new(t, x, y, &eff);
    drive(&mut series, q, scale, tol, n_cap)
}

/// Partial sum of the beta-form series at a fixed number of terms.
pub fn v_beta_partial(
    t: f64,
    x: f64,
    y: f64,
    params: &BetaParams,
    n_terms: usize,
) -> Result<TruncatedValue> {
    check_point(t, x, y)?;
    if let Some(v) = beta_trivial(params) {
        return Ok(v);
    }
    let eff = effective_beta(params, t);
    let q = decay_q(eff.z, t);
    let scale = BETA_SERIES_C / (1.0 - q);
    let mut series = BetaSeries::new(t, x, y, &eff);
    drive_fixed(&mut series, q, scale, n_terms)
}

/// The rescaled correction `v_bar = (1 - q) / C * v`, whose partial sums
/// stay in `[-1, 1]` with the clean geometric remainder `q^{N+1}` — the
/// form consumed by the retrospective samplers.
///
/// When the series terminates (a vanishing skew product), the geometric
/// prefactor is dropped: the single term is exact and only the `1/C`
/// normalisation is kept, so the driftless case gives exactly `1`.
pub fn v_bar(
    t: f64,
    x: f64,
    y: f64,
    params: &ThetaParams,
    tol: f64,
    n_cap: usize,
) -> Result<TruncatedValue> {
    check_point(t, x, y)?;
    check_tol(tol)?;
    if let Some(v) = theta_trivial(params) {
        return Ok(v);
    }
    let eff = effective_theta(params, t);
    let q = decay_q(eff.z, t);
    let c = bound_c(&eff, t);
    let mut series = ThetaSeries::new(t, x, y, &eff);
    let out = drive(&mut series, q, 1.0, tol, n_cap)?;
    let scale = if series.terminating() {
        1.0 / c
    } else {
        (1.0 - q) / c
    };
    Ok(TruncatedValue {
        value: scale * out.value,
        ..out
    })
}

/// Partial sum of [`v_bar`] at a fixed number of terms; the remainder bound
/// is exactly `q^{N+1}`.
pub fn v_bar_partial(
    t: f64,
    x: f64,
    y: f64,
    params: &ThetaParams,
    n_terms: usize,
) -> Result<TruncatedValue> {
    check_point(t, x, y)?;
    if let Some(v) = theta_trivial(params) {
        return Ok(v);
    }
    let eff = effective_theta(params, t);
    let q = decay_q(eff.z, t);
    let c = bound_c(&eff, t);
    let mut series = ThetaSeries::new(t, x, y, &eff);
    let out = drive_fixed(&mut series, q, 1.0, n_terms)?;
    let scale = if series.terminating() {
        1.0 / c
    } else {
        (1.0 - q) / c
    };
    Ok(TruncatedValue {
        value: scale * out.value,
        ..out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DEFAULT_N_CAP;

    const TOL: f64 = 1e-10;

    fn theta(t1: f64, t2: f64) -> ThetaParams {
        ThetaParams::with_default_shift(t1, t2, 1.0).unwrap()
    }

    #[test]
    fn driftless_is_exactly_one() {
        let p = theta(0.0, 0.0);
        for f in [
            v_theta(0.55, 0.3, -0.2, &p, TOL, DEFAULT_N_CAP).unwrap(),
            v_bar(0.55, 0.3, -0.2, &p, TOL, DEFAULT_N_CAP).unwrap(),
            v_theta_partial(0.55, 0.3, -0.2, &p, 3).unwrap(),
        ] {
            assert_eq!(f.value, 1.0);
            assert_eq!(f.remainder_bound, 0.0);
        }
    }

    #[test]
    fn single_barrier_series_terminates() {
        let p = theta(0.7, 0.0);
        let v = v_theta(0.55, 0.3, -0.2, &p, TOL, DEFAULT_N_CAP).unwrap();
        assert_eq!(v.n_terms, 1);
        assert_eq!(v.remainder_bound, 0.0);
        assert!(v.value.is_finite() && v.value > 0.0);
        assert!((v.value - 1.0).abs() > 1e-3, "barrier must leave a mark");
    }

    #[test]
    fn bound_c_pinned_values() {
        let equal = theta(1.0, 1.0);
        let expect = 4.0 + 2.0 * mills_ratio(1.0);
        assert!((bound_c(&equal, 1.0) - expect).abs() < 1e-12);

        let split = theta(0.5, -0.5);
        assert!((bound_c(&split, 0.55) - 2.4278).abs() < 1e-2);
        assert!((bound_c(&theta(0.0, 0.0), 0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bound_c_at_least_one() {
        for &(t1, t2) in &[(0.3, 0.9), (-1.2, 0.4), (2.0, 2.0), (-0.1, -0.1)] {
            for &t in &[0.1, 0.55, 1.0, 3.0] {
                assert!(bound_c(&theta(t1, t2), t) >= 1.0);
            }
        }
    }

    #[test]
    fn small_jumps_stay_near_one() {
        let p = theta(0.01, -0.01);
        let v = v_theta(0.5, 0.2, 0.6, &p, TOL, DEFAULT_N_CAP).unwrap();
        assert!((v.value - 1.0).abs() < 0.05, "v = {}", v.value);
        assert!(v.remainder_bound <= TOL);
    }

    #[test]
    fn confluent_branch_is_continuous() {
        // Just above the collapse band the separated branch must agree with
        // the exactly confluent evaluation to the expected O(d^2).
        let t = 0.5f64;
        let exact = theta(0.8, 0.8);
        let nearby = theta(0.8, 0.8 - 2e-4 / t.sqrt());
        let ve = v_theta(t, 0.4, -0.3, &exact, TOL, DEFAULT_N_CAP).unwrap();
        let vn = v_theta(t, 0.4, -0.3, &nearby, TOL, DEFAULT_N_CAP).unwrap();
        assert!(
            (ve.value - vn.value).abs() < 1e-4,
            "branch seam jump: {} vs {}",
            ve.value,
            vn.value
        );
    }

    #[test]
    fn vbar_bounded_by_one() {
        let p = theta(0.5, -0.5);
        for &x in &[-1.0, 0.2, 0.5, 1.5] {
            for &y in &[-1.0, 0.2, 0.5, 1.5] {
                let v = v_bar(0.55, x, y, &p, TOL, DEFAULT_N_CAP).unwrap();
                assert!(v.value.abs() <= 1.0 + 1e-12, "v_bar({x},{y}) = {}", v.value);
            }
        }
    }

    #[test]
    fn vbar_partial_consistency() {
        let p = theta(0.5, -0.5);
        let full = v_bar(0.55, 0.5, 0.8, &p, 1e-14, DEFAULT_N_CAP).unwrap();
        let part = v_bar_partial(0.55, 0.5, 0.8, &p, full.n_terms).unwrap();
        assert!((full.value - part.value).abs() < 1e-15);
        let q = decay_q(1.0, 0.55);
        assert!((part.remainder_bound - q.powi(part.n_terms as i32)).abs() < 1e-18);
    }

    #[test]
    fn short_horizon_needs_few_terms() {
        let p = theta(1.0, 0.5);
        let v = v_theta(0.2, 0.5, 0.9, &p, TOL, DEFAULT_N_CAP).unwrap();
        assert!(v.n_terms <= 4, "n_terms = {}", v.n_terms);
        assert!(v.remainder_bound <= TOL);
    }

    #[test]
    fn capped_series_reports_honest_bound() {
        let p = theta(1.0, 0.5);
        let v = v_theta(0.55, 0.5, 0.9, &p, 1e-300, 0).unwrap();
        assert_eq!(v.n_terms, 1);
        assert!(v.remainder_bound > 1e-300, "bound must stay honest");
        let direct = v_theta_partial(0.55, 0.5, 0.9, &p, 1).unwrap();
        assert_eq!(v.value, direct.value);
        assert_eq!(v.remainder_bound, direct.remainder_bound);
    }

    #[test]
    fn beta_zero_skew_is_one() {
        let p = BetaParams::with_default_shift(0.0, 0.0, 1.5, 1.0).unwrap();
        let v = v_beta(0.55, 0.2, 0.7, &p, TOL, DEFAULT_N_CAP).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.remainder_bound, 0.0);
    }

    #[test]
    fn beta_single_barrier_terminates() {
        let p = BetaParams::with_default_shift(0.4, 0.0, 1.5, 1.0).unwrap();
        let v = v_beta(0.55, 0.2, 0.7, &p, TOL, DEFAULT_N_CAP).unwrap();
        assert_eq!(v.n_terms, 1);
        assert_eq!(v.remainder_bound, 0.0);
        assert!(v.value.is_finite() && v.value > 0.0);
    }

    #[test]
    fn beta_moderate_parameters_sane() {
        let p = BetaParams::with_default_shift(0.5, -0.5, 1.5, 1.0).unwrap();
        let v = v_beta(0.55, 0.5, 0.8, &p, TOL, DEFAULT_N_CAP).unwrap();
        assert!(v.value.is_finite() && v.value > 0.0 && v.value < 5.0);
        assert!(v.remainder_bound <= TOL);
    }

    #[test]
    fn beta_strong_drift_finite() {
        // Interpolation-regime parameters: tiny skews against a large drift.
        let p = BetaParams::with_default_shift(0.1, -0.1, 5.5, 1.0).unwrap();
        let v = v_beta(0.55, 0.5, 0.8, &p, TOL, DEFAULT_N_CAP).unwrap();
        assert!(v.value.is_finite() && v.value > 0.0, "v = {}", v.value);
        assert!(v.remainder_bound <= TOL);
    }
}
