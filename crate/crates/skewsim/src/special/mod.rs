//! Special functions underlying the series representation of the two-barrier
//! skew Brownian motion transition density.
//!
//! # Mathematical background
//!
//! The density series is assembled from three nested families of incomplete
//! Gaussian integrals. The innermost is
//!
//! ```text
//! J_q(omega, tau) = exp(-omega^2/2) * exp((omega+tau)^2/2)
//!                   * Integral_{-inf}^{-(omega+tau)} u^q exp(-u^2/2) du ,
//! ```
//!
//! a scaled incomplete Gaussian moment. The scaling is chosen so that the
//! `exp((omega+tau)^2/2)` growth of the Mills-ratio part cancels against the
//! incomplete integral; `J_q` stays bounded by a low-order polynomial in
//! `omega + tau` for arguments of either sign, which is what makes the series
//! evaluable at large `omega` without overflow. Internally the module works
//! with the fully scaled kernels `K_q(c) = exp(omega^2/2) * J_q` (a function
//! of `c = omega + tau` alone), satisfying
//!
//! ```text
//! K_0(c) = phi(c)   (the Mills ratio),    K_1(c) = -1,
//! K_q(c) = (q-1) K_{q-2}(c) + (-1)^q c^{q-1},
//! ```
//!
//! with closed forms in terms of factorial and double-factorial ratios for
//! every `q`. Binomial expansion of polynomial prefactors produces the
//! mid-level family
//!
//! ```text
//! S_{L,n}(omega, a, tau) = exp(-omega^2/2) exp((omega+tau)^2/2)
//!     * Integral_{-inf}^{-(omega+tau)} (s+omega+tau)^n (s+a+tau)^L exp(-s^2/2) ds
//!   = sum_{n'<=n} sum_{L'<=L} C(n,n') C(L,L') (omega+tau)^{n-n'} (a+tau)^{L-L'}
//!     * J_{n'+L'}(omega, tau),
//! ```
//!
//! and Hermite expansion of Gaussian derivatives the outer family
//!
//! ```text
//! G_{K,m,n}(omega, a, tau) = (-1)^K (K+m)! sum_{l=0}^{floor((K+m)/2)}
//!     (-1)^l / (2^l l! (K+m-2l)!) * S_{K+m-2l, n}(omega, a, tau),
//! ```
//!
//! which is, equivalently, a convolution of the `(K+m)`-th derivative of the
//! Gaussian kernel with `w^n exp((a+tau) w) 1_{w<0}` evaluated at `omega - a`
//! and normalised by `exp(a^2/2 - a omega)`. The test suite checks both
//! representations against adaptive quadrature of the defining integrals.
//!
//! Finally, the one-barrier Fourier kernels
//!
//! ```text
//! f_k(omega, a1, a2),   k >= 1,
//! ```
//!
//! are the inverse Fourier transforms of `(a1 + i s)^{-k} (a2 + i s)^{-k}`;
//! they vanish on `omega >= 0` and satisfy the exact L1 identity
//! `Integral |f_k| = sqrt(2 pi) / (a1 a2)^k` used as an acceptance check.
//!
//! # Numerical policy
//!
//! All combinatorial tables (factorial, double factorial, binomial) are
//! precomputed up to index 256; requests beyond that return
//! [`Error::CombinatorialOverflow`] rather than silently losing accuracy.
//! Entries above `170!` saturate to `f64::INFINITY` exactly as the naive
//! product does; series code never indexes that far. The public `s_sum` /
//! `g_sum` wrappers multiply the scaled core by `exp(-omega^2/2)` and
//! short-circuit to zero once that factor underflows past any possible
//! polynomial growth of the core, so they remain finite for arbitrarily
//! large `omega`.

mod cody;

pub use cody::{erf, erfc, erfcx};

use crate::error::{Error, Result};
use std::sync::LazyLock;

/// sqrt(2 pi).
pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// sqrt(pi / 2).
pub(crate) const SQRT_PI_OVER_2: f64 = 1.253_314_137_315_500_3;

/// Largest index served by the combinatorial tables.
pub const MAX_TABLE_INDEX: usize = 256;

/// `exp(-omega^2/2)` underflows past any polynomial the scaled cores can
/// produce once `omega^2/2` exceeds this; the products are then exactly zero.
const EXP_UNDERFLOW_CUTOFF: f64 = 1500.0;

static FACTORIAL: LazyLock<[f64; MAX_TABLE_INDEX + 1]> = LazyLock::new(|| {
    let mut t = [1.0f64; MAX_TABLE_INDEX + 1];
    for n in 1..=MAX_TABLE_INDEX {
        t[n] = t[n - 1] * n as f64;
    }
    t
});

static DOUBLE_FACTORIAL: LazyLock<[f64; MAX_TABLE_INDEX + 1]> = LazyLock::new(|| {
    let mut t = [1.0f64; MAX_TABLE_INDEX + 1];
    for n in 2..=MAX_TABLE_INDEX {
        t[n] = t[n - 2] * n as f64;
    }
    t
});

/// `n!` from the precomputed table.
pub fn factorial(n: usize) -> Result<f64> {
    table_get(&FACTORIAL, n)
}

/// `n!!` from the precomputed table (`0!! = 1`, and `(-1)!!` is not needed:
/// all call sites use `n >= 0`).
pub fn double_factorial(n: usize) -> Result<f64> {
    table_get(&DOUBLE_FACTORIAL, n)
}

/// Binomial coefficient `C(n, k)` as `f64`; zero for `k > n`.
pub fn binomial(n: usize, k: usize) -> Result<f64> {
    if n > MAX_TABLE_INDEX {
        return Err(Error::CombinatorialOverflow {
            index: n,
            max: MAX_TABLE_INDEX,
        });
    }
    if k > n {
        return Ok(0.0);
    }
    // Multiplicative form keeps intermediate values no larger than the
    // result times n, so C(256, 128) stays finite even though 256! does not.
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    Ok(c)
}

fn table_get(table: &[f64; MAX_TABLE_INDEX + 1], n: usize) -> Result<f64> {
    table.get(n).copied().ok_or(Error::CombinatorialOverflow {
        index: n,
        max: MAX_TABLE_INDEX,
    })
}

fn check_index(n: usize) -> Result<()> {
    if n > MAX_TABLE_INDEX {
        Err(Error::CombinatorialOverflow {
            index: n,
            max: MAX_TABLE_INDEX,
        })
    } else {
        Ok(())
    }
}

/// Standard normal density.
pub fn normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal upper tail probability `P(Z > x)`.
///
/// Evaluated through Cody's `erfc`, giving relative accuracy near machine
/// precision across the whole range (down to `~1e-300` in the far tail).
pub fn normal_ccdf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// The Mills ratio `phi(w) = sqrt(2 pi) exp(w^2/2) P(Z > w)`.
///
/// Evaluated in scaled form as `sqrt(pi/2) * erfcx(w / sqrt 2)`, so no
/// intermediate `exp(w^2/2)` is ever formed: the value is finite and accurate
/// for arbitrarily large positive `w` (where `phi(w) ~ 1/w`) and saturates to
/// `f64::INFINITY` only where the true value exceeds `f64::MAX`
/// (`w < -37.6`).
pub fn mills_ratio(w: f64) -> f64 {
    SQRT_PI_OVER_2 * erfcx(w / std::f64::consts::SQRT_2)
}

/// Scaled kernel `K_q(c) = exp(omega^2/2) J_q(omega, tau)` with
/// `c = omega + tau`, by closed form.
///
/// Requires `q <= MAX_TABLE_INDEX` (checked by callers).
fn kq_closed(q: usize, c: f64) -> f64 {
    match q {
        0 => mills_ratio(c),
        1 => -1.0,
        q if q % 2 == 0 => {
            // K_q = (q-1)!! K_0 + sum_{k=0}^{q/2-1} c^{q-2k-1} (q-1)!!/(q-2k-1)!!
            let df = &*DOUBLE_FACTORIAL;
            let mut acc = df[q - 1] * mills_ratio(c);
            for k in 0..q / 2 {
                acc += c.powi((q - 2 * k - 1) as i32) * df[q - 1] / df[q - 2 * k - 1];
            }
            acc
        }
        q => {
            // K_q = - sum_{k=0}^{p} c^{q-1-2k} 2^k p!/(p-k)!   with p = (q-1)/2
            let p = (q - 1) / 2;
            let f = &*FACTORIAL;
            let mut acc = 0.0;
            for k in 0..=p {
                acc += c.powi((q - 1 - 2 * k) as i32) * 2f64.powi(k as i32) * f[p] / f[p - k];
            }
            -acc
        }
    }
}

/// `K_0 .. K_{q_max}` by the three-term recursion
/// `K_q = (q-1) K_{q-2} + (-1)^q c^{q-1}`.
fn kq_values(q_max: usize, c: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(q_max + 1);
    v.push(mills_ratio(c));
    if q_max >= 1 {
        v.push(-1.0);
    }
    for q in 2..=q_max {
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        let val = (q as f64 - 1.0) * v[q - 2] + sign * c.powi((q - 1) as i32);
        v.push(val);
    }
    v
}

/// The scaled incomplete Gaussian moment `J_q(omega, tau)`, by closed form.
pub fn jq(q: usize, omega: f64, tau: f64) -> Result<f64> {
    check_index(q)?;
    if 0.5 * omega * omega > EXP_UNDERFLOW_CUTOFF {
        return Ok(0.0);
    }
    Ok((-0.5 * omega * omega).exp() * kq_closed(q, omega + tau))
}

/// A cache of `J_0 .. J_{q_max}` at fixed `(omega, tau)`, filled by the
/// three-term recursion. Serves both as the bulk evaluator for series code
/// and as the independent cross-check of the closed forms in [`jq`].
#[derive(Debug, Clone)]
pub struct JqCache {
    omega: f64,
    tau: f64,
    values: Vec<f64>,
}

impl JqCache {
    /// Builds the cache for `q = 0 ..= q_max`.
    pub fn new(omega: f64, tau: f64, q_max: usize) -> Self {
        let scale = (-0.5 * omega * omega).exp();
        let values = kq_values(q_max, omega + tau)
            .into_iter()
            .map(|k| scale * k)
            .collect();
        JqCache { omega, tau, values }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `J_q` for `q <= q_max`; panics on out-of-range `q`.
    pub fn get(&self, q: usize) -> f64 {
        self.values[q]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Scaled core of `S_{L,n}`: the binomial double sum over `K` kernels,
/// without the outer `exp(-omega^2/2)`.
///
/// This is the form consumed by the density series, which re-weights each
/// term with a lump factor instead of the raw Gaussian scale.
pub(crate) fn s_scaled(l: usize, n: usize, omega: f64, a: f64, tau: f64) -> Result<f64> {
    // Only the binomial factors need the tables; the kernel recursion in
    // `kq_values` is table-free, so the combined order `l + n` is not
    // restricted.
    check_index(l)?;
    check_index(n)?;
    let c = omega + tau;
    let at = a + tau;
    let kq = kq_values(l + n, c);
    let mut acc = 0.0f64;
    for np in 0..=n {
        let bn = binomial(n, np)?;
        let cpow = c.powi((n - np) as i32);
        for lp in 0..=l {
            let bl = binomial(l, lp)?;
            acc += bn * bl * cpow * at.powi((l - lp) as i32) * kq[np + lp];
        }
    }
    Ok(acc)
}

/// The sum `S_{L,n}(omega, a, tau)`, including the `exp(-omega^2/2)` scale.
pub fn s_sum(l: usize, n: usize, omega: f64, a: f64, tau: f64) -> Result<f64> {
    if 0.5 * omega * omega > EXP_UNDERFLOW_CUTOFF {
        // The scaled core grows at most polynomially with table-range
        // indices, so the product has underflowed to an exact zero.
        check_index(l)?;
        check_index(n)?;
        return Ok(0.0);
    }
    Ok((-0.5 * omega * omega).exp() * s_scaled(l, n, omega, a, tau)?)
}

/// Scaled core of `G_{K,m,n}`: the Hermite-weighted combination of scaled
/// `S` sums, without the outer `exp(-omega^2/2)`.
pub(crate) fn g_scaled(k: usize, m: usize, n: usize, omega: f64, a: f64, tau: f64) -> Result<f64> {
    let p = k + m;
    check_index(p)?;
    check_index(n)?;
    let f = &*FACTORIAL;
    let sign_k = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut acc = 0.0f64;
    for l in 0..=p / 2 {
        let sign_l = if l % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign_l / (2f64.powi(l as i32) * f[l] * f[p - 2 * l]);
        acc += coeff * s_scaled(p - 2 * l, n, omega, a, tau)?;
    }
    Ok(sign_k * f[p] * acc)
}

/// The sum `G_{K,m,n}(omega, a, tau)`, including the `exp(-omega^2/2)` scale.
pub fn g_sum(k: usize, m: usize, n: usize, omega: f64, a: f64, tau: f64) -> Result<f64> {
    if 0.5 * omega * omega > EXP_UNDERFLOW_CUTOFF {
        check_index(k + m)?;
        check_index(n)?;
        return Ok(0.0);
    }
    Ok((-0.5 * omega * omega).exp() * g_scaled(k, m, n, omega, a, tau)?)
}

/// The one-barrier Fourier kernel `f_k(omega, a1, a2)` for `k >= 1`.
///
/// Vanishes identically on `omega >= 0`. Requires `a1, a2 > 0` and
/// `a1 != a2` (the confluent case is excluded by the callers' parameter
/// validation upstream).
pub fn fourier_kernel_f(k: usize, omega: f64, a1: f64, a2: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "fourier_kernel_f requires k >= 1".into(),
        ));
    }
    if !(a1 > 0.0) || !(a2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "fourier_kernel_f requires positive rates, got a1 = {a1}, a2 = {a2}"
        )));
    }
    if a1 == a2 {
        return Err(Error::InvalidParameter(
            "fourier_kernel_f requires a1 != a2 (confluent rates)".into(),
        ));
    }
    check_index(2 * (k - 1))?;
    if omega >= 0.0 {
        return Ok(0.0);
    }
    let kk = k - 1;
    let f = &*FACTORIAL;
    let d = a1 - a2;
    let mut acc = 0.0f64;
    let e1 = (a1 * omega).exp();
    let e2 = (a2 * omega).exp();
    for n in 0..=kk {
        let coeff = f[2 * kk - n] / (f[n] * f[kk - n]);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc += coeff * (d * omega).powi(n as i32) * (e2 - sign * e1);
    }
    Ok(SQRT_2PI / (d.powi(2 * kk as i32 + 1) * f[kk]) * acc)
}
