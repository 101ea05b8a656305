//! Retrospective rejection sampling against series-valued targets.
//!
//! Classical rejection sampling needs the acceptance function `f(y)` in
//! closed form. Here `f` is only available as a series with certified
//! truncation bounds, so acceptance is decided *retrospectively*: draw
//! `y` from the instrumental density and `u` uniformly, then refine the
//! partial sum `f_N(y)` just far enough that the certified band
//! `[f_N - r_N, f_N + r_N]` excludes `u`. The comparison is then exact —
//! the draw is distributed as if `f` had been evaluated to infinite
//! precision.
//!
//! Refinement cannot continue forever: the band shrinks geometrically, and
//! below [`EXACTNESS_THRESHOLD`] further terms are numerically
//! indistinguishable from rounding noise in the partial sums themselves.
//! If `u` falls inside that final band (probability of order the threshold)
//! the proposal is accepted anyway and flagged `exact = false`, so callers
//! can count how many draws carry this residual bias — the acceptance
//! checks require the fraction to stay below a few in ten thousand.
//!
//! Two targets are provided: [`HTarget`], the Girsanov-weighted terminal
//! law of the conditioned diffusion, and [`BridgeTarget`], the skew
//! Brownian bridge used to fill in intermediate points.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::density::series::{decay_q, v_bar_partial};
use crate::density::ThetaParams;
use crate::drift::DriftSpec;
use crate::error::{Error, Result};

/// Hard cap on proposals per accepted draw; hitting it means the target is
/// badly configured (acceptance rate effectively zero).
pub const PROPOSAL_CAP: u64 = 1_000_000;

/// Remainder level below which refinement stops and an undecided draw is
/// accepted with `exact = false`.
pub const EXACTNESS_THRESHOLD: f64 = 5e-5;

/// An acceptance function known only through certified partial sums.
pub trait SeriesTarget {
    /// Draws from the instrumental density.
    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;

    /// Partial sum `f_N(y)` at truncation index `n`.
    fn partial(&self, n: usize, y: f64) -> Result<f64>;

    /// Certified remainder bound `r_N`, independent of `y`.
    fn remainder(&self, n: usize) -> f64;

    /// Deepest refinement level: the smallest index whose remainder falls
    /// below [`EXACTNESS_THRESHOLD`] (zero for terminating series).
    fn n_max(&self) -> usize;

    /// Smallest index whose remainder fits inside `gap`, capped at
    /// [`SeriesTarget::n_max`]; used to jump straight to a decisive depth
    /// instead of refining one term at a time.
    fn depth_for(&self, gap: f64) -> usize {
        let n_max = self.n_max();
        for n in 0..=n_max {
            if self.remainder(n) <= gap {
                return n;
            }
        }
        n_max
    }
}

/// A single retrospective draw.
#[derive(Debug, Clone, Copy)]
pub struct GrsOutcome {
    pub value: f64,
    /// False when the decision hit the refinement floor undecided.
    pub exact: bool,
    /// Proposals consumed, including the accepted one.
    pub proposals: u64,
    /// Largest number of series terms any proposal needed.
    pub max_terms: usize,
}

/// Running aggregates over many retrospective draws, serialised into the
/// diagnostics sidecar of the sampling commands.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct GrsStats {
    pub draws: u64,
    pub proposals: u64,
    pub inexact: u64,
    pub total_terms: u64,
    pub max_terms: usize,
}

impl GrsStats {
    pub fn record(&mut self, outcome: &GrsOutcome) {
        self.draws += 1;
        self.proposals += outcome.proposals;
        self.inexact += u64::from(!outcome.exact);
        self.total_terms += outcome.max_terms as u64;
        self.max_terms = self.max_terms.max(outcome.max_terms);
    }

    pub fn merge(&mut self, other: &GrsStats) {
        self.draws += other.draws;
        self.proposals += other.proposals;
        self.inexact += other.inexact;
        self.total_terms += other.total_terms;
        self.max_terms = self.max_terms.max(other.max_terms);
    }

    /// Accepted draws per proposal.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            return f64::NAN;
        }
        self.draws as f64 / self.proposals as f64
    }

    /// Proposals consumed per accepted draw.
    pub fn mean_proposals(&self) -> f64 {
        if self.draws == 0 {
            return f64::NAN;
        }
        self.proposals as f64 / self.draws as f64
    }

    /// Mean of the per-draw deepest series depth.
    pub fn mean_terms(&self) -> f64 {
        if self.draws == 0 {
            return f64::NAN;
        }
        self.total_terms as f64 / self.draws as f64
    }
}

/// One retrospective rejection draw from `target`.
///
/// Accepts when the certified band around the partial sum excludes the
/// uniform from below, rejects when it excludes it from above; a band
/// boundary hit (`|f_N - u| = r_N` exactly) is decided by the sign, which
/// is measure-correct. Errors only on the proposal cap or a series
/// evaluation failure.
pub fn grs<T, R>(target: &T, rng: &mut R) -> Result<GrsOutcome>
where
    T: SeriesTarget,
    R: Rng + ?Sized,
{
    let n_max = target.n_max();
    let mut proposals = 0u64;
    let mut max_terms = 0usize;
    loop {
        proposals += 1;
        if proposals > PROPOSAL_CAP {
            return Err(Error::ProposalCapExceeded { cap: PROPOSAL_CAP });
        }
        let y = target.propose(rng);
        let u: f64 = rng.random();
        let mut n = 0usize;
        loop {
            max_terms = max_terms.max(n + 1);
            let diff = target.partial(n, y)? - u;
            if diff.abs() >= target.remainder(n) {
                if diff > 0.0 {
                    return Ok(GrsOutcome {
                        value: y,
                        exact: true,
                        proposals,
                        max_terms,
                    });
                }
                break;
            }
            if n == n_max {
                return Ok(GrsOutcome {
                    value: y,
                    exact: false,
                    proposals,
                    max_terms,
                });
            }
            n = (n + 1).max(target.depth_for(diff.abs()));
        }
    }
}

/// Like [`grs`], but an undecided draw at the refinement floor is an error
/// instead of a flagged acceptance, for callers that cannot tolerate the
/// residual bias.
pub fn grs_strict<T, R>(target: &T, rng: &mut R) -> Result<GrsOutcome>
where
    T: SeriesTarget,
    R: Rng + ?Sized,
{
    let outcome = grs(target, rng)?;
    if !outcome.exact {
        let n_max = target.n_max();
        return Err(Error::SeriesNotConverged {
            remainder: target.remainder(n_max),
            tol: EXACTNESS_THRESHOLD,
            n_terms: n_max + 1,
        });
    }
    Ok(outcome)
}

/// Builds the terminal-draw target; the explicit-record counterpart of
/// [`HTarget::new`].
pub fn make_h_target<'a>(
    drift: &'a DriftSpec,
    theta: &ThetaParams,
    x0: f64,
    t_total: f64,
    delta: f64,
) -> Result<HTarget<'a>> {
    HTarget::with_theta(drift, theta, x0, t_total, delta)
}

/// Builds the bridge target between fixed endpoints in barrier
/// coordinates.
pub fn make_bridge_target(
    theta: &ThetaParams,
    t: f64,
    t_total: f64,
    x1: f64,
    x2: f64,
) -> Result<BridgeTarget> {
    BridgeTarget::new(theta, t, t_total, x1, x2)
}

/// Smallest truncation index at which `q^(N+1)`-type remainders reach the
/// exactness threshold.
fn depth_to_threshold(remainder: impl Fn(usize) -> f64) -> usize {
    for n in 0..=63usize {
        if remainder(n) <= EXACTNESS_THRESHOLD {
            return n;
        }
    }
    63
}

/// Terminal-draw target: the density of `X_T` under the conditioned
/// diffusion, against a widened Gaussian instrumental.
///
/// The acceptance function combines the rescaled barrier correction with
/// the Girsanov weight of the drift,
///
/// ```text
/// f_N(y) = vbar_N(T, x0, y) * exp(B(y) - B(x0) - delta (y-x0)^2 / (2T) - M_B),
/// ```
///
/// where `B` is the drift primitive and the envelope constant `M_B` keeps
/// the exponent nonpositive. The instrumental is `N(x0, T / (1 - delta))`;
/// the `delta`-widening is exactly what the quadratic term in the exponent
/// compensates. Coordinates are the user's: the barrier shift is applied
/// internally when the correction factor is evaluated.
pub struct HTarget<'a> {
    drift: &'a DriftSpec,
    theta: ThetaParams,
    shift: f64,
    x0: f64,
    t_total: f64,
    delta: f64,
    m_b: f64,
    b_x0: f64,
    instrumental: Normal<f64>,
    q: f64,
    terminating: bool,
    n_max: usize,
}

impl<'a> HTarget<'a> {
    pub fn new(drift: &'a DriftSpec, x0: f64, t_total: f64, delta: f64) -> Result<HTarget<'a>> {
        let theta = ThetaParams::from_drift(drift)?;
        HTarget::with_theta(drift, &theta, x0, t_total, delta)
    }

    /// Builds the target against an explicitly supplied parameter record
    /// instead of the one derived from the drift's jumps.
    pub fn with_theta(
        drift: &'a DriftSpec,
        theta: &ThetaParams,
        x0: f64,
        t_total: f64,
        delta: f64,
    ) -> Result<HTarget<'a>> {
        if !t_total.is_finite() || !(t_total > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be positive and finite, got T = {t_total}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "widening parameter must lie in (0, 1), got delta = {delta}"
            )));
        }
        if !x0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "start point must be finite, got x0 = {x0}"
            )));
        }
        let theta = *theta;
        let sup = drift.b_sup();
        // Envelope: B(y) - B(x0) <= |b|_inf |y - x0|, so the supremum of the
        // exponent is |b|_inf^2 T / (2 delta).
        let m_b = sup * sup * t_total / (2.0 * delta);
        let q = decay_q(theta.z, t_total);
        let terminating = theta.theta1 * theta.theta2 == 0.0;
        let n_max = if terminating {
            0
        } else {
            depth_to_threshold(|n| q.powi(n as i32 + 1))
        };
        let sd = (t_total / (1.0 - delta)).sqrt();
        Ok(HTarget {
            drift,
            theta,
            shift: drift.z1(),
            x0,
            t_total,
            delta,
            m_b,
            b_x0: drift.eval_big_b(x0)?,
            instrumental: Normal::new(x0, sd).expect("positive instrumental deviation"),
            q,
            terminating,
            n_max,
        })
    }

    /// Replaces the generic envelope constant by the numerically located
    /// supremum of the exponent (plus a safety margin), raising the
    /// acceptance rate for drifts far from their uniform bound.
    pub fn tightened(mut self) -> Result<HTarget<'a>> {
        let g = |y: f64| -> Result<f64> {
            Ok(self.drift.eval_big_b(y)? - self.b_x0
                - self.delta * (y - self.x0) * (y - self.x0) / (2.0 * self.t_total))
        };
        // The exponent is concave-quadratic at infinity; its maximiser lies
        // within |y - x0| <= |b|_inf T / delta plus a few deviations.
        let half_width =
            self.drift.b_sup() * self.t_total / self.delta + 4.0 * self.t_total.sqrt() + 1.0;
        let lo = self.x0 - half_width;
        let hi = self.x0 + half_width;
        let n = 4000usize;
        let mut best_y = self.x0;
        let mut best = g(self.x0)?;
        let step = (hi - lo) / n as f64;
        for i in 0..=n {
            let y = lo + step * i as f64;
            let val = g(y)?;
            if val > best {
                best = val;
                best_y = y;
            }
        }
        // Golden-section refinement around the grid winner.
        let (mut a, mut b) = (best_y - step, best_y + step);
        let inv_phi = 0.618_033_988_749_895;
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut gc, mut gd) = (g(c)?, g(d)?);
        for _ in 0..80 {
            if gc > gd {
                b = d;
                d = c;
                gd = gc;
                c = b - inv_phi * (b - a);
                gc = g(c)?;
            } else {
                a = c;
                c = d;
                gc = gd;
                d = a + inv_phi * (b - a);
                gd = g(d)?;
            }
        }
        let peak = best.max(gc).max(gd);
        // Safety margin keeps f <= 1 even if the search undershot slightly.
        self.m_b = peak + 1e-9;
        Ok(self)
    }

    pub fn envelope_constant(&self) -> f64 {
        self.m_b
    }

    pub fn n_max_depth(&self) -> usize {
        self.n_max
    }

    fn exponent(&self, y: f64) -> Result<f64> {
        let u = y - self.x0;
        Ok(self.drift.eval_big_b(y)? - self.b_x0 - self.delta * u * u / (2.0 * self.t_total)
            - self.m_b)
    }
}

impl SeriesTarget for HTarget<'_> {
    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.instrumental.sample(rng)
    }

    fn partial(&self, n: usize, y: f64) -> Result<f64> {
        let vbar = v_bar_partial(
            self.t_total,
            self.x0 - self.shift,
            y - self.shift,
            &self.theta,
            n + 1,
        )?;
        Ok(vbar.value * self.exponent(y)?.exp())
    }

    fn remainder(&self, n: usize) -> f64 {
        if self.terminating {
            0.0
        } else {
            // The exponent is nonpositive, so the series remainder bound
            // carries over unscaled.
            self.q.powi(n as i32 + 1)
        }
    }

    fn n_max(&self) -> usize {
        self.n_max
    }
}

/// Bridge target: the law of the skew Brownian motion at an intermediate
/// time conditioned on both endpoints, against the Brownian-bridge
/// instrumental.
///
/// All coordinates are barrier-normalised (barriers at `0` and `z`); the
/// acceptance function is the product of the two rescaled corrections
/// flanking the bridge point, `f_N(y) = vbar_N(t, x1, y) vbar_N(T-t, y, x2)`.
pub struct BridgeTarget {
    theta: ThetaParams,
    t1: f64,
    t2: f64,
    x1: f64,
    x2: f64,
    instrumental: Normal<f64>,
    q1: f64,
    q2: f64,
    terminating: bool,
    n_max: usize,
}

impl BridgeTarget {
    pub fn new(theta: &ThetaParams, t: f64, t_total: f64, x1: f64, x2: f64) -> Result<BridgeTarget> {
        if !(t > 0.0 && t < t_total) {
            return Err(Error::InvalidParameter(format!(
                "bridge time must satisfy 0 < t < T, got t = {t}, T = {t_total}"
            )));
        }
        if !x1.is_finite() || !x2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bridge endpoints must be finite, got x1 = {x1}, x2 = {x2}"
            )));
        }
        let t1 = t;
        let t2 = t_total - t;
        let q1 = decay_q(theta.z, t1);
        let q2 = decay_q(theta.z, t2);
        let terminating = theta.theta1 * theta.theta2 == 0.0;
        let rem = move |n: usize| {
            let r1 = q1.powi(n as i32 + 1);
            let r2 = q2.powi(n as i32 + 1);
            r1 + r2 - r1 * r2
        };
        let n_max = if terminating {
            0
        } else {
            depth_to_threshold(rem)
        };
        let mean = x1 + t1 / t_total * (x2 - x1);
        let sd = (t1 * t2 / t_total).sqrt();
        Ok(BridgeTarget {
            theta: *theta,
            t1,
            t2,
            x1,
            x2,
            instrumental: Normal::new(mean, sd).expect("positive bridge deviation"),
            q1,
            q2,
            terminating,
            n_max,
        })
    }

    pub fn n_max_depth(&self) -> usize {
        self.n_max
    }
}

impl SeriesTarget for BridgeTarget {
    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.instrumental.sample(rng)
    }

    fn partial(&self, n: usize, y: f64) -> Result<f64> {
        let left = v_bar_partial(self.t1, self.x1, y, &self.theta, n + 1)?;
        let right = v_bar_partial(self.t2, y, self.x2, &self.theta, n + 1)?;
        Ok(left.value * right.value)
    }

    fn remainder(&self, n: usize) -> f64 {
        if self.terminating {
            return 0.0;
        }
        // Product of two certified factors, each with |partial| <= 1 - r:
        // the cross term tightens rather than inflates.
        let r1 = self.q1.powi(n as i32 + 1);
        let r2 = self.q2.powi(n as i32 + 1);
        r1 + r2 - r1 * r2
    }

    fn n_max(&self) -> usize {
        self.n_max
    }
}
