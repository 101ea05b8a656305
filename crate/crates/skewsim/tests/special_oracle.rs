//! Quadrature oracles for the incomplete Gaussian moment sums.
//!
//! Every identity here checks a fast closed-form/recursive evaluator
//! against direct adaptive quadrature of its defining integral:
//!
//! * `J_q(omega, tau) = e^{-omega^2/2} K_q(omega + tau)` with
//!   `K_q(c) = e^{c^2/2} Int_{-inf}^{-c} s^q e^{-s^2/2} ds`;
//! * `S_{L,n}(omega, a, tau) = e^{-omega^2/2} e^{(omega+tau)^2/2}
//!   Int_{-inf}^{-(omega+tau)} (s+omega+tau)^n (s+a+tau)^L e^{-s^2/2} ds`;
//! * `G_{K,m,n}` as the Hermite-weighted moment
//!   `(-1)^K e^{-omega^2/2} Int_{-inf}^{0} He_{K+m}(w - omega + a) w^n
//!   e^{-w^2/2 + w (omega + tau)} dw`;
//! * the one-barrier kernels `f_k`, whose absolute integral has the closed
//!   form `sqrt(2 pi) / (a1 a2)^k`.

use proptest::prelude::*;
use skewsim::quad::integrate;
use skewsim::special::{fourier_kernel_f, g_sum, jq, mills_ratio, s_sum, JqCache};

const ORACLE_TOL: f64 = 1e-12;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Probabilists' Hermite polynomial `He_p(x)` by the three-term recurrence.
fn hermite(p: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, x);
    if p == 0 {
        return h0;
    }
    for k in 1..p {
        let h2 = x * h1 - k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Quadrature oracle for `J_q`. The exponential scale factors are folded
/// into the integrand so the quadrature tolerance applies in final units.
fn jq_oracle(q: usize, omega: f64, tau: f64) -> f64 {
    let c = omega + tau;
    let lo = -(c.abs() + 12.0);
    integrate(
        |s| s.powi(q as i32) * (0.5 * (c * c - omega * omega - s * s)).exp(),
        lo,
        -c,
        ORACLE_TOL,
    )
    .unwrap()
}

/// Quadrature oracle for `S_{L,n}`.
fn s_oracle(l: usize, n: usize, omega: f64, a: f64, tau: f64) -> f64 {
    let c = omega + tau;
    let lo = -(c.abs() + a.abs() + 14.0);
    integrate(
        |s| {
            (s + c).powi(n as i32)
                * (s + a + tau).powi(l as i32)
                * (0.5 * (c * c - omega * omega - s * s)).exp()
        },
        lo,
        -c,
        ORACLE_TOL,
    )
    .unwrap()
}

/// Quadrature oracle for `G_{K,m,n}`, via the Hermite-kernel form.
fn g_oracle(k: usize, m: usize, n: usize, omega: f64, a: f64, tau: f64) -> f64 {
    let p = k + m;
    let lo = -(omega.abs() + tau.abs() + a.abs() + 16.0);
    let raw = integrate(
        |w| {
            hermite(p, w - omega + a)
                * w.powi(n as i32)
                * (-0.5 * omega * omega - 0.5 * w * w + w * (omega + tau)).exp()
        },
        lo,
        0.0,
        ORACLE_TOL,
    )
    .unwrap();
    if k.is_multiple_of(2) {
        raw
    } else {
        -raw
    }
}

/// Values frozen from the quadrature oracles above, pinning both the
/// evaluators and the oracles themselves against regressions.
#[test]
fn frozen_reference_values() {
    let s = s_sum(1, 1, 1.0, 0.5, 0.3).unwrap();
    assert!((s - 2.136983062931261e-1).abs() < 1e-12, "S = {s:.15e}");
    let g = g_sum(2, 1, 2, 0.7, 0.2, -0.4).unwrap();
    assert!((g + 2.642730342362781e0).abs() < 1e-12, "G = {g:.15e}");
    let j = jq(3, 0.8, -0.3).unwrap();
    assert!((j + 1.633835333415895e0).abs() < 1e-12, "J = {j:.15e}");

    assert!((s_oracle(1, 1, 1.0, 0.5, 0.3) - s).abs() < 1e-9);
    assert!((g_oracle(2, 1, 2, 0.7, 0.2, -0.4) - g).abs() < 1e-9);
    assert!((jq_oracle(3, 0.8, -0.3) - j).abs() < 1e-9);
}

#[test]
fn s_sum_matches_defining_integral() {
    let cases = [
        (0usize, 0usize, 0.5f64, 0.3f64, 0.2f64),
        (1, 1, 1.0, 0.5, 0.3),
        (2, 0, 0.8, -0.4, 0.6),
        (0, 3, -0.5, 0.7, 0.4),
        (3, 2, 1.5, 1.0, -0.6),
        (2, 2, 0.0, 0.0, 0.9),
        (4, 1, 2.0, -1.0, 1.2),
    ];
    for &(l, n, omega, a, tau) in &cases {
        let fast = s_sum(l, n, omega, a, tau).unwrap();
        let slow = s_oracle(l, n, omega, a, tau);
        assert!(
            (fast - slow).abs() <= 1e-9 * (1.0 + slow.abs()),
            "S({l},{n};{omega},{a},{tau}): fast {fast} vs oracle {slow}"
        );
    }
}

#[test]
fn g_sum_matches_hermite_oracle() {
    let cases = [
        (0usize, 0usize, 0usize, 0.5f64, 0.3f64, 0.2f64),
        (1, 0, 1, 0.8, 0.4, 0.5),
        (2, 1, 2, 0.7, 0.2, -0.4),
        (0, 2, 1, 1.2, -0.3, 0.8),
        (3, 0, 2, 1.0, 0.6, 0.3),
        (1, 2, 3, 0.4, 0.9, -0.2),
        (2, 2, 0, 1.5, -0.5, 1.0),
    ];
    for &(k, m, n, omega, a, tau) in &cases {
        let fast = g_sum(k, m, n, omega, a, tau).unwrap();
        let slow = g_oracle(k, m, n, omega, a, tau);
        assert!(
            (fast - slow).abs() <= 1e-9 * (1.0 + slow.abs()),
            "G({k},{m},{n};{omega},{a},{tau}): fast {fast} vs oracle {slow}"
        );
    }
}

#[test]
fn fourier_kernel_l1_identities() {
    // Int |f_k| = sqrt(2 pi) / (a1 a2)^k for every order; the kernel
    // vanishes on omega >= 0 and decays like e^{a2 omega} on the left.
    for &(a1, a2) in &[(1.0f64, 2.0f64), (0.5, 3.0)] {
        for k in 1usize..=5 {
            // Split near the origin: the kernel's mass is concentrated on
            // the last few units, which a single wide Simpson pass of the
            // exponentially-flat left piece would miss entirely.
            let lo = -(120.0 / a1.min(a2));
            let f = |w: f64| fourier_kernel_f(k, w, a1, a2).unwrap().abs();
            let mass = integrate(f, lo, -2.0, 5e-13).unwrap()
                + integrate(f, -2.0, 0.0, 5e-13).unwrap();
            let expect = SQRT_2PI / (a1 * a2).powi(k as i32);
            assert!(
                (mass - expect).abs() <= 1e-8,
                "k={k}, (a1,a2)=({a1},{a2}): mass {mass} vs {expect}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The cache recursion and the closed forms agree everywhere.
    #[test]
    fn jq_recursion_agrees_with_closed_form(
        omega in -5.0f64..5.0,
        tau in -5.0f64..5.0,
    ) {
        let cache = JqCache::new(omega, tau, 20);
        for q in 0..=20usize {
            let direct = jq(q, omega, tau).unwrap();
            let rec = cache.get(q);
            prop_assert!(
                (direct - rec).abs() <= 1e-10 * (1.0 + direct.abs()),
                "q={}: closed {} vs recursion {}", q, direct, rec
            );
        }
    }

    /// Spot-checks the `J_q` closed forms against quadrature.
    #[test]
    fn jq_matches_quadrature(
        q in 0usize..10,
        omega in -3.0f64..3.0,
        tau in -3.0f64..3.0,
    ) {
        let fast = jq(q, omega, tau).unwrap();
        let slow = jq_oracle(q, omega, tau);
        prop_assert!(
            (fast - slow).abs() <= 1e-9 * (1.0 + slow.abs()),
            "J_{}({}, {}): {} vs {}", q, omega, tau, fast, slow
        );
    }

    /// The Mills ratio is strictly decreasing and satisfies the classical
    /// two-sided bound `0 <= w phi(w) <= 1` on the right half-line.
    #[test]
    fn mills_ratio_shape(w in -10.0f64..10.0) {
        let phi = mills_ratio(w);
        prop_assert!(phi > 0.0);
        prop_assert!(mills_ratio(w + 1e-3) < phi);
        if w >= 0.0 {
            let prod = w * phi;
            prop_assert!((0.0..=1.0).contains(&prod), "w phi(w) = {}", prod);
        }
    }
}
