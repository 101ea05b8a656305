//! Polynomial coefficient tables of the image-family expansion.
//!
//! Each image family `j = 1..4` of the series carries a quadratic
//! polynomial in the Fourier variable `w`, with coefficients depending on
//! the side of the barriers the endpoint `y` falls on. Three indicator
//! signs encode that dependence:
//!
//! * `s0 = sign(y - 0)` — endpoint above or below the lower barrier,
//! * `sz = sign(y - z)` — above or below the upper barrier,
//! * `i4 = 1 - 2 * 1_{[0, z]}(y)` — the double-reflection sign flip.
//!
//! Boundary convention: a barrier point counts as *inside* `[0, z]` for
//! all three signs at once (`s0` uses `y >= 0`, `sz` uses `y > z`, `i4`
//! the closed interval). The three signs must agree on which region a
//! boundary point belongs to: exactly at a barrier the family-3 and
//! family-4 excursion distances coincide and their constant coefficients
//! cancel pairwise, which is what makes the partial sums continuous
//! there. A mixed convention breaks that cancellation and produces a
//! spurious jump far above the certified remainder. The same closure
//! feeds both the series evaluators and the contour-integral oracle.
//!
//! The tables come in two scalings. The theta form absorbs `sqrt t` into
//! the skew parameters (`vartheta_i = theta_i sqrt t`); the beta form keeps
//! the raw `(beta1, beta2)` and multiplies by powers of the scaled drift
//! `m = mu sqrt t` at composition time. In both cases, shifting the
//! integration abscissa by `a_tilde` is plain polynomial re-centering:
//! the composed triple is the expansion of `c(w + a_tilde)` in powers
//! of `w`.

use super::{BetaParams, ThetaParams};

/// Coefficient triple `[w^2, w^1, w^0]` of a quadratic polynomial.
pub type PolyCoeffs = [f64; 3];

#[inline]
fn indicator_signs(y: f64, z: f64) -> (f64, f64, f64) {
    let s0 = if y >= 0.0 { 1.0 } else { -1.0 };
    let sz = if y > z { 1.0 } else { -1.0 };
    let i4 = if (0.0..=z).contains(&y) { -1.0 } else { 1.0 };
    (s0, sz, i4)
}

/// Unshifted theta-form polynomial `c~_j(y; w)` in the scaled variables
/// `vartheta_i = theta_i sqrt t`; coefficients ordered `[w^2, w, 1]`.
///
/// `j = 1` is `(w + vartheta_1)(w + vartheta_2)`; the other families pick
/// up one indicator sign each.
pub(crate) fn theta_poly(j: usize, y: f64, t: f64, params: &ThetaParams) -> PolyCoeffs {
    let (v1, v2) = params.vartheta(t);
    let (s0, sz, i4) = indicator_signs(y, params.z);
    match j {
        1 => [1.0, v1 + v2, v1 * v2],
        2 => [0.0, -v1, v1 * v2 * sz],
        3 => [0.0, -v2, -v1 * v2 * s0],
        4 => [0.0, 0.0, -i4 * v1 * v2],
        _ => panic!("image family j must be in 1..=4"),
    }
}

/// Re-centres a quadratic at the shifted abscissa: returns the coefficient
/// triple of `w -> c(w + a_tilde)`.
#[inline]
pub(crate) fn shift_poly(c: PolyCoeffs, a_tilde: f64) -> PolyCoeffs {
    [
        c[0],
        c[1] + 2.0 * c[0] * a_tilde,
        c[2] + c[1] * a_tilde + c[0] * a_tilde * a_tilde,
    ]
}

/// The theta-form coefficient triple `(C~_{j,0}, C~_{j,1}, C~_{j,2})`:
/// the table of [`theta_poly`] composed with the abscissa shift
/// `a_tilde = a_shift sqrt t`.
pub fn coeffs_theta(j: usize, y: f64, t: f64, params: &ThetaParams) -> PolyCoeffs {
    shift_poly(theta_poly(j, y, t, params), params.a_tilde(t))
}

/// Raw beta-form table `c_{j,h}(y)`: the polynomial is
/// `c_j(y, mu; w) = c_{j,0} w^2 + c_{j,1} mu w + c_{j,2} mu^2`, so the
/// triple itself is time-free.
pub fn coeffs_beta(j: usize, y: f64, params: &BetaParams) -> PolyCoeffs {
    let (b1, b2) = (params.beta1, params.beta2);
    let (s0, sz, i4) = indicator_signs(y, params.z);
    let c40 = i4 * b1 * b2;
    match j {
        1 => [1.0, b1 + b2, b1 * b2],
        2 => [s0 * b1, -b1 - c40, b1 * sz * b2],
        3 => [sz * b2, -b2 + c40, -b2 * s0 * b1],
        4 => [c40, 0.0, -c40],
        _ => panic!("image family j must be in 1..=4"),
    }
}

/// Scales a raw beta triple by powers of `m = mu sqrt t` and applies the
/// abscissa shift: the expansion of
/// `w -> c0 (w+a)^2 + c1 m (w+a) + c2 m^2` in powers of `w`.
#[inline]
pub(crate) fn beta_compose(c: PolyCoeffs, m: f64, a_tilde: f64) -> PolyCoeffs {
    shift_poly([c[0], c[1] * m, c[2] * m * m], a_tilde)
}
