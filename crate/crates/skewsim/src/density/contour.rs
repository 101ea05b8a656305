//! Contour-integral oracle for the correction factors.
//!
//! The factor `v(t, x, y)` has a Fourier--Laplace representation
//!
//! ```text
//! v = 1/sqrt(2 pi) * Int_R  N(a + iu) / D(a + iu)  du,
//! ```
//!
//! evaluated on a vertical contour `Re w = a` strictly right of every pole
//! of `1/D`. The numerator collects the four image-family polynomials with
//! their Gaussian weights,
//! `N(w) = sum_j c_j(y; w) exp(w^2/2 + omega10^2/2 - w omega_{j,0})`, and
//! the denominator is the transcendental characteristic function of the
//! two-barrier reflection problem. This is computed here by direct adaptive
//! quadrature — none of the series machinery is involved — which makes it
//! the independent reference the series evaluators are tested against.
//!
//! The representation is invariant in the abscissa, so the routine is free
//! to *lift* the contour towards the dominant scaled distance `omega10`;
//! that keeps the exponential factors of size `exp((omega10 - a)^2 / 2)`
//! instead of `exp(omega10^2 / 2)` and preserves full relative accuracy
//! even for well-separated endpoints. Lifting right is always legal: the
//! poles all lie left of the admissible floor, and the only denominator
//! zero to the right — `w = 0` — is removable (the numerator vanishes
//! there in every endpoint zone).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;
use crate::special::SQRT_2PI;

use super::series::check_point;
use super::{coeffs, geometric_terms, SkewParams};

/// Absolute tolerance handed to the adaptive quadrature.
const ORACLE_QUAD_TOL: f64 = 1e-11;

/// Successive doublings of the integration window must agree to this.
const TAIL_AGREEMENT: f64 = 1e-10;

/// Give up if the tail has not settled by this abscissa.
const MAX_ABSCISSA: f64 = 1e6;

/// The contour is lifted to `omega10 - LIFT_MARGIN` when the admissible
/// abscissa sits further left, bounding the exponential prefactors by
/// `exp(LIFT_MARGIN^2 / 2)`.
const LIFT_MARGIN: f64 = 4.0;

/// Keep the contour clear of the removable zero at the origin.
const MIN_LIFT: f64 = 0.5;

#[derive(Clone, Copy)]
enum Mode {
    Theta { vt1: f64, vt2: f64 },
    Beta { m: f64, tau1: f64, tau2: f64, b1: f64, b2: f64 },
}

/// Evaluates `v(t, x, y)` by direct contour quadrature, for either
/// parameterisation. Slow but independent: the reference implementation
/// for the series evaluators.
pub fn contour_oracle(t: f64, x: f64, y: f64, params: &SkewParams) -> Result<f64> {
    check_point(t, x, y)?;
    let z = match params {
        SkewParams::Theta(p) => p.z,
        SkewParams::Beta(p) => p.z,
    };
    let st = t.sqrt();
    let zeta = z / st;
    let a = geometric_terms(x, y, z);
    let sep = (y - x).abs();
    let omega0 = [
        (a[0] + sep) / st,
        (a[1] + sep) / st,
        (a[2] + sep) / st,
        (a[3] + sep) / st,
    ];
    let omega10 = omega0[0];

    let mut co = [[0.0f64; 3]; 4];
    let (a_params, scale, mode) = match params {
        SkewParams::Theta(p) => {
            let (vt1, vt2) = p.vartheta(t);
            for (j, row) in co.iter_mut().enumerate() {
                *row = coeffs::theta_poly(j + 1, y, t, p);
            }
            (p.a_tilde(t), vt1.abs().max(vt2.abs()), Mode::Theta { vt1, vt2 })
        }
        SkewParams::Beta(p) => {
            let m = p.m(t);
            let (tau1, tau2) = p.tau(t);
            for (j, row) in co.iter_mut().enumerate() {
                *row = coeffs::coeffs_beta(j + 1, y, p);
            }
            (
                p.a_tilde(t),
                m.abs(),
                Mode::Beta {
                    m,
                    tau1,
                    tau2,
                    b1: p.beta1,
                    b2: p.beta2,
                },
            )
        }
    };
    let lift = a_params.max(omega10 - LIFT_MARGIN).max(MIN_LIFT);
    let half_o10 = 0.5 * omega10 * omega10;

    let integrand = move |u: f64| -> f64 {
        let w = Complex64::new(lift, u);
        let denom = match mode {
            Mode::Theta { vt1, vt2 } => {
                (w + vt1) * (w + vt2) - vt1 * vt2 * (-2.0 * zeta * w).exp()
            }
            Mode::Beta {
                m,
                tau1,
                tau2,
                b1,
                b2,
            } => {
                b1 * b2 * (-2.0 * zeta * w).exp() * (w * w - m * m) + (w + tau1) * (w + tau2)
            }
        };
        let mut num = Complex64::new(0.0, 0.0);
        for j in 0..4 {
            let c = co[j];
            let poly = match mode {
                Mode::Theta { .. } => (w * c[0] + c[1]) * w + c[2],
                Mode::Beta { m, .. } => (w * c[0] + c[1] * m) * w + c[2] * m * m,
            };
            let expo = 0.5 * (w * w) + half_o10 - w * omega0[j];
            num += poly * expo.exp();
        }
        (num / denom).re
    };

    // Conjugate symmetry: integrate the real part over u >= 0 and double.
    let mut u_hi = 12.0 + 2.0 * omega10.max(lift).max(scale);
    let mut total = quad::integrate(integrand, 0.0, u_hi, ORACLE_QUAD_TOL)?;
    loop {
        let tail = quad::integrate(integrand, u_hi, 2.0 * u_hi, ORACLE_QUAD_TOL)?;
        total += tail;
        u_hi *= 2.0;
        if tail.abs() <= TAIL_AGREEMENT {
            break;
        }
        if u_hi > MAX_ABSCISSA {
            return Err(Error::QuadratureNonConvergence(format!(
                "contour tail had not settled by |u| = {MAX_ABSCISSA}"
            )));
        }
    }
    Ok(total * 2.0 / SQRT_2PI)
}

#[cfg(test)]
mod tests {
    use super::super::{series, BetaParams, ThetaParams};
    use super::*;

    fn theta(t1: f64, t2: f64) -> SkewParams {
        SkewParams::Theta(ThetaParams::with_default_shift(t1, t2, 1.0).unwrap())
    }

    #[test]
    fn driftless_oracle_is_one() {
        let v = contour_oracle(0.55, 0.3, -0.2, &theta(0.0, 0.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "v = {v}");
    }

    #[test]
    fn zero_skew_beta_oracle_is_one() {
        let p = SkewParams::Beta(BetaParams::with_default_shift(0.0, 0.0, 1.5, 1.0).unwrap());
        let v = contour_oracle(0.55, 0.3, 0.7, &p).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "v = {v}");
    }

    #[test]
    fn oracle_matches_series_theta() {
        let p = ThetaParams::with_default_shift(0.5, -0.5, 1.0).unwrap();
        let s = series::v_theta(0.55, 0.5, 0.8, &p, 1e-12, 64).unwrap();
        let o = contour_oracle(0.55, 0.5, 0.8, &SkewParams::Theta(p)).unwrap();
        assert!(
            (s.value - o).abs() <= s.remainder_bound + 1e-7,
            "series {} vs oracle {o}",
            s.value
        );
    }

    #[test]
    fn oracle_matches_series_confluent_theta() {
        let p = ThetaParams::with_default_shift(1.0, 1.0, 1.0).unwrap();
        let s = series::v_theta(1.0, -0.4, 0.7, &p, 1e-12, 64).unwrap();
        let o = contour_oracle(1.0, -0.4, 0.7, &SkewParams::Theta(p)).unwrap();
        assert!(
            (s.value - o).abs() <= s.remainder_bound + 1e-7,
            "series {} vs oracle {o}",
            s.value
        );
    }

    #[test]
    fn oracle_matches_series_beta() {
        let p = BetaParams::with_default_shift(0.5, -0.5, 1.5, 1.0).unwrap();
        let s = series::v_beta(0.55, 0.5, 0.8, &p, 1e-12, 64).unwrap();
        let o = contour_oracle(0.55, 0.5, 0.8, &SkewParams::Beta(p)).unwrap();
        assert!(
            (s.value - o).abs() <= s.remainder_bound + 1e-7,
            "series {} vs oracle {o}",
            s.value
        );
    }

    #[test]
    fn oracle_is_abscissa_invariant() {
        let lo = ThetaParams::new(0.5, -0.5, 1.0, 1.5).unwrap();
        let hi = ThetaParams::new(0.5, -0.5, 1.0, 3.0).unwrap();
        let a = contour_oracle(0.55, 0.5, 0.8, &SkewParams::Theta(lo)).unwrap();
        let b = contour_oracle(0.55, 0.5, 0.8, &SkewParams::Theta(hi)).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn far_from_barriers_correction_fades() {
        let v = contour_oracle(0.55, 25.0, 25.0, &theta(0.5, -0.5)).unwrap();
        assert!((v - 1.0).abs() < 1e-3, "v = {v}");
    }
}
