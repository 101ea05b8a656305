//! Transition densities of two-barrier skew Brownian motion.
//!
//! # The two parameterisations
//!
//! The auxiliary process behind the exact sampler is a Brownian motion that
//! is partially reflected at two barriers, placed (after the normalising
//! shift) at `0` and `z > 0`. Two equivalent parameterisations appear:
//!
//! * [`ThetaParams`] — the *small-skew limit* used by the samplers. The
//!   transition density factorises as `p(t, x, y) = p_0(t, x, y) *
//!   v(t, x, y)` where `p_0` is the driftless Gaussian kernel and `v` is a
//!   series correction determined by the half-jumps `(theta1, theta2)` of
//!   the drift.
//! * [`BetaParams`] — a genuine `(beta1, beta2)`-skew Brownian motion with
//!   drift `mu`, with `p = p_mu * v` relative to the drifted Gaussian
//!   kernel. The theta-form is recovered along `kappa -> infinity` of
//!   [`params_from_kappa`], and the small-skew acceptance criterion checks
//!   that convergence numerically.
//!
//! Both carry an *integration abscissa* `a_shift`: the series and the
//! contour-integral oracle are analytic in this shift, and evaluating at
//! different admissible shifts is one of the consistency checks.
//!
//! # Series evaluation with certified truncation
//!
//! All series values are returned as a [`TruncatedValue`]: the partial sum,
//! the number of terms, and a *certified* bound on the discarded tail,
//! `C / (1 - exp(-2 z^2 / t)) * exp(-2 z^2 (N+1) / t)` with the explicit
//! constant `C` from [`series::bound_c`] (theta form) or `C = 3` (beta
//! form). The bound is what turns the series into a decidable acceptance
//! test inside the retrospective samplers.
//!
//! The geometry of reflections enters through [`geometric_terms`]: each of
//! the four image families `j = 1..4` contributes excursion distances
//! `a_j`, and the series arguments are the scaled distances
//! [`omega_jk`]` = (a_j + 2 z k + |y - x|) / sqrt(t)`.

pub mod coeffs;
pub mod contour;
pub mod series;

use crate::drift::DriftSpec;
use crate::error::{Error, Result};
use crate::special::normal_density;

/// Smallest drift magnitude accepted by the beta parameterisation; below
/// this the `1/mu` factors in the series lose all significance.
pub const MU_MIN: f64 = 1e-6;

/// Default cap on the number of series terms.
pub const DEFAULT_N_CAP: usize = 64;

/// Default series tolerance used by the samplers and the CLI.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Below this separation of the scaled skew parameters the evaluators
/// switch to the confluent (equal-parameter) branch of the series.
pub const EQUAL_BRANCH_THRESHOLD: f64 = 1e-4;

/// Truncation constant of the beta-form series.
pub const BETA_SERIES_C: f64 = 3.0;

/// Bridge denominators below this are treated as degenerate.
const BRIDGE_DENOM_MIN: f64 = 1e-12;

/// Parameters of the small-skew-limit density: half-jumps `theta1` at
/// barrier `0` and `theta2` at barrier `z`, plus the integration abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    pub theta1: f64,
    pub theta2: f64,
    /// Barrier separation, `z > 0`.
    pub z: f64,
    /// Integration abscissa; must satisfy `a_shift >= 0` and
    /// `a_shift > max(-2 theta1, -2 theta2)` so the contour stays strictly
    /// right of every pole.
    pub a_shift: f64,
}

impl ThetaParams {
    pub fn new(theta1: f64, theta2: f64, z: f64, a_shift: f64) -> Result<ThetaParams> {
        if !(z > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "barrier separation must be positive, got z = {z}"
            )));
        }
        for v in [theta1, theta2, a_shift] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(
                    "theta parameters must be finite".into(),
                ));
            }
        }
        if !(a_shift >= 0.0) || a_shift <= (-2.0 * theta1).max(-2.0 * theta2) {
            return Err(Error::InvalidParameter(format!(
                "abscissa a_shift = {a_shift} is not admissible: need a_shift >= 0 and \
                 a_shift > max(-2 theta1, -2 theta2) = {}",
                (-2.0 * theta1).max(-2.0 * theta2)
            )));
        }
        Ok(ThetaParams {
            theta1,
            theta2,
            z,
            a_shift,
        })
    }

    /// Uses the default abscissa `max(0, -2 theta1, -2 theta2) + 1`.
    pub fn with_default_shift(theta1: f64, theta2: f64, z: f64) -> Result<ThetaParams> {
        let a = (-2.0 * theta1).max(-2.0 * theta2).max(0.0) + 1.0;
        ThetaParams::new(theta1, theta2, z, a)
    }

    /// Reads the half-jumps and barrier separation off an analysed drift.
    pub fn from_drift(spec: &DriftSpec) -> Result<ThetaParams> {
        ThetaParams::with_default_shift(spec.theta1(), spec.theta2(), spec.z_width())
    }

    /// Scaled skew parameters `(theta1 sqrt t, theta2 sqrt t)`.
    pub(crate) fn vartheta(&self, t: f64) -> (f64, f64) {
        let s = t.sqrt();
        (self.theta1 * s, self.theta2 * s)
    }

    /// Scaled abscissa `a_shift * sqrt t`.
    pub(crate) fn a_tilde(&self, t: f64) -> f64 {
        self.a_shift * t.sqrt()
    }
}

/// Parameters of a drifted two-barrier skew Brownian motion: skewness
/// `beta1` at barrier `0`, `beta2` at barrier `z`, drift `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    pub beta1: f64,
    pub beta2: f64,
    pub mu: f64,
    /// Barrier separation, `z > 0`.
    pub z: f64,
    /// Integration abscissa; must satisfy
    /// `a_shift >= max(0, -2 beta1 mu, -2 beta2 mu)`.
    pub a_shift: f64,
}

impl BetaParams {
    pub fn new(beta1: f64, beta2: f64, mu: f64, z: f64, a_shift: f64) -> Result<BetaParams> {
        if !(z > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "barrier separation must be positive, got z = {z}"
            )));
        }
        if !(beta1.abs() < 1.0) || !(beta2.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "skewness must lie in (-1, 1), got beta1 = {beta1}, beta2 = {beta2}"
            )));
        }
        if !mu.is_finite() || mu.abs() < MU_MIN {
            return Err(Error::InvalidParameter(format!(
                "drift must satisfy |mu| >= {MU_MIN}, got mu = {mu}; use the theta \
                 parameterisation for vanishing drift"
            )));
        }
        let floor = (-2.0 * beta1 * mu).max(-2.0 * beta2 * mu).max(0.0);
        if !(a_shift >= floor) {
            return Err(Error::InvalidParameter(format!(
                "abscissa a_shift = {a_shift} is not admissible: need a_shift >= {floor}"
            )));
        }
        Ok(BetaParams {
            beta1,
            beta2,
            mu,
            z,
            a_shift,
        })
    }

    /// Uses the default abscissa `max(0, -2 beta1 mu, -2 beta2 mu) + 1`.
    pub fn with_default_shift(beta1: f64, beta2: f64, mu: f64, z: f64) -> Result<BetaParams> {
        let a = (-2.0 * beta1 * mu).max(-2.0 * beta2 * mu).max(0.0) + 1.0;
        BetaParams::new(beta1, beta2, mu, z, a)
    }

    /// Scaled drift `mu sqrt t`.
    pub(crate) fn m(&self, t: f64) -> f64 {
        self.mu * t.sqrt()
    }

    /// Scaled skew parameters `(beta1 mu sqrt t, beta2 mu sqrt t)`.
    pub(crate) fn tau(&self, t: f64) -> (f64, f64) {
        let m = self.m(t);
        (self.beta1 * m, self.beta2 * m)
    }

    /// Scaled abscissa `a_shift * sqrt t`.
    pub(crate) fn a_tilde(&self, t: f64) -> f64 {
        self.a_shift * t.sqrt()
    }
}

/// Either parameterisation, for entry points that accept both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SkewParams {
    Theta(ThetaParams),
    Beta(BetaParams),
}

/// A series value with its certified truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedValue {
    /// The partial sum over `n_terms` series terms.
    pub value: f64,
    /// Number of terms summed (`N + 1` for truncation index `N`).
    pub n_terms: usize,
    /// Certified bound on `|value - limit|`. Exactly zero when the series
    /// terminates (a vanishing skew product makes all later terms zero).
    pub remainder_bound: f64,
}

/// Excursion distances `(a_1, a_2, a_3, a_4)` of the four image families.
///
/// `a_1 = 0` always; `a_2` and `a_3` measure the detour a path from `x` to
/// `y` must make to touch the barrier at `0` resp. `z` (zero when the
/// barrier lies between the endpoints); `a_4` is the base distance of the
/// doubly-reflected image family, which involves both barriers. All are in
/// the barrier-normalised coordinates where the barriers sit at `0` and
/// `z`.
pub fn geometric_terms(x: f64, y: f64, z: f64) -> [f64; 4] {
    let sep = (y - x).abs();
    // Clamp away the cancellation dust the straddling cases leave behind:
    // the detours are zero there exactly.
    let a2 = (x.abs() + y.abs() - sep).max(0.0);
    let a3 = ((x - z).abs() + (y - z).abs() - sep).max(0.0);
    let a4 = 2.0 * (z - x.max(y).max(0.0)).max(0.0) + 2.0 * x.min(y).min(z).max(0.0);
    [0.0, a2, a3, a4]
}

/// The scaled series argument
/// `omega_{j,k} = (a_j + 2 z k + |y - x|) / sqrt t` for image family
/// `j` in `1..=4` and reflection order `k >= 0`.
pub fn omega_jk(j: usize, k: usize, x: f64, y: f64, z: f64, t: f64) -> f64 {
    assert!((1..=4).contains(&j), "image family j must be in 1..=4");
    let a = geometric_terms(x, y, z)[j - 1];
    (a + 2.0 * z * k as f64 + (y - x).abs()) / t.sqrt()
}

/// The transition form `p(t, x, y)`: Gaussian kernel times series
/// correction, with the truncation bound scaled to density units.
///
/// In the beta form the kernel is the Gaussian drifted by `mu t` and the
/// product is the bona fide transition density of the skew Brownian motion
/// with drift — it integrates to one. In the theta form the kernel is the
/// driftless Gaussian and the product is the unnormalised target the
/// samplers weigh: it satisfies the exact semigroup composition law, but
/// its kernel mass genuinely differs from one whenever a skew parameter is
/// nonzero (for a single barrier the mass has a closed form; see the
/// one-barrier reduction check in [`crate::verify`]). Rejection sampling
/// never needs the missing constant, and rescaling would destroy the
/// composition law, so the limit form is exposed exactly as it arises.
pub fn transition_density_p(
    t: f64,
    x: f64,
    y: f64,
    params: &SkewParams,
    tol: f64,
    n_cap: usize,
) -> Result<TruncatedValue> {
    let (v, kernel) = match params {
        SkewParams::Theta(p) => (
            series::v_theta(t, x, y, p, tol, n_cap)?,
            normal_density((y - x) / t.sqrt()) / t.sqrt(),
        ),
        SkewParams::Beta(p) => (
            series::v_beta(t, x, y, p, tol, n_cap)?,
            normal_density((y - x - p.mu * t) / t.sqrt()) / t.sqrt(),
        ),
    };
    Ok(TruncatedValue {
        value: kernel * v.value,
        n_terms: v.n_terms,
        remainder_bound: kernel * v.remainder_bound,
    })
}

/// The bridge density `q(t; T, x1, x2, y)`: the law of the skew Brownian
/// motion at time `t` conditioned on travelling from `x1` at time `0` to
/// `x2` at time `T`. Factorises as Brownian-bridge kernel times
/// `v(t, x1, y) v(T-t, y, x2) / v(T, x1, x2)`.
pub fn bridge_density_q(
    t: f64,
    t_total: f64,
    x1: f64,
    x2: f64,
    y: f64,
    theta: &ThetaParams,
    tol: f64,
    n_cap: usize,
) -> Result<TruncatedValue> {
    if !(t > 0.0 && t < t_total) {
        return Err(Error::InvalidParameter(format!(
            "bridge time must satisfy 0 < t < T, got t = {t}, T = {t_total}"
        )));
    }
    let v1 = series::v_theta(t, x1, y, theta, tol, n_cap)?;
    let v2 = series::v_theta(t_total - t, y, x2, theta, tol, n_cap)?;
    let v3 = series::v_theta(t_total, x1, x2, theta, tol, n_cap)?;
    if v3.value.abs() < BRIDGE_DENOM_MIN {
        return Err(Error::DegenerateBridge {
            t_total,
            x1,
            x2,
            value: v3.value,
        });
    }
    // Brownian bridge marginal kernel.
    let mean = x1 + t / t_total * (x2 - x1);
    let var = t * (t_total - t) / t_total;
    let sd = var.sqrt();
    let q0 = normal_density((y - mean) / sd) / sd;

    let value = q0 * v1.value * v2.value / v3.value;
    // First-order propagation of the three certified bounds, inflating the
    // denominator bound to remain a true bound when v3 is small.
    let denom = (v3.value.abs() - v3.remainder_bound).max(BRIDGE_DENOM_MIN);
    let num_bound = v1.remainder_bound * (v2.value.abs() + v2.remainder_bound)
        + v2.remainder_bound * v1.value.abs();
    let ratio_bound = (v1.value * v2.value).abs() * v3.remainder_bound / (denom * v3.value.abs());
    let remainder = q0 * (num_bound / denom + ratio_bound);
    Ok(TruncatedValue {
        value,
        n_terms: v1.n_terms.max(v2.n_terms).max(v3.n_terms),
        remainder_bound: remainder,
    })
}

/// Builds the beta parameterisation that matches a drift's jump structure
/// at interpolation level `kappa > 1`, converging to the theta form as
/// `kappa -> infinity`.
///
/// `beta1 = 1/kappa`, `mu = b(z1) + kappa theta1`,
/// `beta2 = theta2 / (kappa theta1 + b(z1) - b(z2))`.
pub fn params_from_kappa(spec: &DriftSpec, kappa: f64) -> Result<BetaParams> {
    if !(kappa > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "interpolation level must satisfy kappa > 1, got {kappa}"
        )));
    }
    if spec.theta1() == 0.0 {
        return Err(Error::InvalidParameter(
            "params_from_kappa requires a genuine jump at z1 (theta1 != 0)".into(),
        ));
    }
    let beta1 = 1.0 / kappa;
    let mu = spec.b_at_z1() + kappa * spec.theta1();
    let denom = kappa * spec.theta1() + spec.b_at_z1() - spec.b_at_z2();
    if denom == 0.0 {
        return Err(Error::InvalidParameter(
            "params_from_kappa: beta2 denominator vanishes at this kappa".into(),
        ));
    }
    let beta2 = spec.theta2() / denom;
    if beta2.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "params_from_kappa: beta2 = {beta2} escapes (-1, 1); increase kappa"
        )));
    }
    BetaParams::with_default_shift(beta1, beta2, mu, spec.z_width())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_example_cases() {
        // Endpoints straddling both barriers, straddling only the lower
        // one, and both below: the canonical reference triples.
        assert_eq!(geometric_terms(-1.0, 2.0, 1.0), [0.0, 0.0, 0.0, 0.0]);
        assert_eq!(geometric_terms(-1.0, 0.5, 1.0), [0.0, 0.0, 1.0, 1.0]);
        assert_eq!(geometric_terms(-2.0, -1.0, 1.0), [0.0, 2.0, 4.0, 2.0]);
    }

    #[test]
    fn geometry_is_symmetric_in_endpoints() {
        for &(x, y) in &[(-0.7, 0.3), (0.2, 0.9), (1.4, -0.1), (2.0, 0.5)] {
            assert_eq!(geometric_terms(x, y, 1.3), geometric_terms(y, x, 1.3));
        }
    }

    #[test]
    fn omega_examples() {
        assert!((omega_jk(1, 1, 0.0, 1.0, 1.0, 4.0) - 1.5).abs() < 1e-15);
        assert!((omega_jk(3, 0, -1.0, 0.5, 1.0, 1.0) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn theta_params_admissibility() {
        assert!(ThetaParams::new(0.5, -0.5, 1.0, 1.5).is_ok());
        // For positive thetas the strict bound is negative, so 0 is fine.
        assert!(ThetaParams::new(0.5, 0.5, 1.0, 0.0).is_ok());
        // a_shift must strictly exceed -2 theta2 = 1.
        assert!(ThetaParams::new(0.5, -0.5, 1.0, 1.0).is_err());
        assert!(ThetaParams::new(0.5, -0.5, -1.0, 2.0).is_err());
        let p = ThetaParams::with_default_shift(0.5, -0.5, 1.0).unwrap();
        assert!((p.a_shift - 2.0).abs() < 1e-15);
    }

    #[test]
    fn beta_params_admissibility() {
        assert!(BetaParams::new(0.5, -0.5, 1.5, 1.0, 1.5).is_ok());
        assert!(BetaParams::new(1.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(BetaParams::new(0.5, -0.5, 0.0, 1.0, 1.0).is_err());
        assert!(BetaParams::new(0.5, -0.5, 1.5, 1.0, 1.4).is_err());
        let p = BetaParams::with_default_shift(0.5, -0.5, 1.5, 1.0).unwrap();
        assert!((p.a_shift - 2.5).abs() < 1e-15);
    }

    #[test]
    fn kappa_interpolation_of_builtin_drift() {
        let spec = crate::drift::DriftSpec::builtin_b1();
        let p = params_from_kappa(&spec, 2.0).unwrap();
        assert!((p.beta1 - 0.5).abs() < 1e-15);
        assert!((p.beta2 + 0.5).abs() < 1e-15);
        assert!((p.mu - 1.5).abs() < 1e-15);
        let p10 = params_from_kappa(&spec, 10.0).unwrap();
        assert!((p10.beta1 - 0.1).abs() < 1e-15);
        assert!((p10.beta2 + 0.1).abs() < 1e-12);
        assert!((p10.mu - 5.5).abs() < 1e-15);
        assert!(params_from_kappa(&spec, 0.5).is_err());
        let flat = crate::drift::DriftSpec::constant(1.0);
        assert!(params_from_kappa(&flat, 2.0).is_err());
    }
}
