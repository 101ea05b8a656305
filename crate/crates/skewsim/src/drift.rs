//! Drift coefficients with two jump discontinuities.
//!
//! The diffusion `dX_t = b(X_t) dt + dW_t` is described by a [`DriftSpec`]:
//! three smooth pieces glued at thresholds `z1 < z2`, where `b` may jump.
//! Everything the samplers need is derived here once, at construction time:
//!
//! * the half-jumps `theta_i = (b(z_i+) - b(z_i-)) / 2`, which become the
//!   skewness parameters of the auxiliary two-barrier skew Brownian motion;
//! * the primitive `B(x) = Integral_0^x b(u) du`, which enters the Girsanov
//!   weight `exp(B(y) - B(x))`;
//! * the shifted potential
//!   `phi_plus(x) = (b(x)^2 + b'(x) - inf(b^2 + b')) / 2 >= 0`,
//!   whose supremum `phi_sup` bounds the Poisson thinning intensity and
//!   caps the usable splitting horizon at `1 / phi_sup`;
//! * the bound `b_sup = sup |b|` used for envelope constants.
//!
//! Suprema and the infimum are located by a dense grid scan over
//! `[z1 - 10, z2 + 10]` augmented with one-sided limits at the thresholds
//! and far-field samples of the unbounded pieces, then sharpened by local
//! ternary refinement around the best grid point. Pieces on the two
//! unbounded zones must stay bounded (constants plus trigonometric terms),
//! so the scan window plus far-field samples see every value the piece can
//! attain up to the refinement tolerance.
//!
//! At a threshold itself `b` is evaluated by the midpoint convention
//! `b(z_i) = (b(z_i-) + b(z_i+)) / 2`, and `b'` as the mean of the one-sided
//! derivatives; this is the convention the rejection identities require at
//! the (measure-zero) jump set.

use crate::error::{Error, Result};
use crate::quad::integrate;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Number of intervals in the construction-time grid scan.
const SCAN_POINTS: usize = 10_000;

/// Absolute tolerance of the local ternary refinement of extrema.
const REFINE_TOL: f64 = 1e-12;

/// Quadrature tolerance for primitives without closed form.
const PRIMITIVE_TOL: f64 = 1e-10;

type DynFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One smooth piece of the drift: its value, derivative, and optionally a
/// closed-form primitive (any antiderivative; the gluing constant is chosen
/// by [`DriftSpec::eval_big_b`]).
#[derive(Clone)]
pub struct Piece {
    value: DynFn,
    derivative: DynFn,
    primitive: Option<DynFn>,
}

impl std::fmt::Debug for Piece {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Piece")
            .field("primitive", &self.primitive.is_some())
            .finish_non_exhaustive()
    }
}

impl Piece {
    /// A piece from value and derivative closures; `B` falls back to
    /// adaptive quadrature on this piece.
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Piece {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            primitive: None,
        }
    }

    /// A piece that also carries a closed-form antiderivative.
    pub fn with_primitive(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        primitive: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Piece {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            primitive: Some(Arc::new(primitive)),
        }
    }

    /// The constant piece `b = c`.
    pub fn constant(c: f64) -> Self {
        Piece::with_primitive(move |_| c, |_| 0.0, move |x| c * x)
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }

    pub fn has_primitive(&self) -> bool {
        self.primitive.is_some()
    }

    /// `Integral_u^v` of this piece, by primitive difference or quadrature.
    fn integral(&self, u: f64, v: f64) -> Result<f64> {
        match &self.primitive {
            Some(p) => Ok(p(v) - p(u)),
            None => {
                let f = self.value.clone();
                integrate(move |x| f(x), u, v, PRIMITIVE_TOL)
            }
        }
    }
}

/// A fully analysed drift coefficient ready for simulation.
#[derive(Debug, Clone)]
pub struct DriftSpec {
    pieces: [Piece; 3],
    z1: f64,
    z2: f64,
    theta1: f64,
    theta2: f64,
    b_at_z1: f64,
    b_at_z2: f64,
    b_sup: f64,
    phi_sup: f64,
    /// `inf_{R \ {z1,z2}} (b^2 + b')`, the constant subtracted in `phi_plus`.
    quad_inf: f64,
}

/// Zone of a point relative to the thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Zone {
    Left,
    Middle,
    Right,
}

impl DriftSpec {
    pub fn z1(&self) -> f64 {
        self.z1
    }

    pub fn z2(&self) -> f64 {
        self.z2
    }

    /// Barrier separation `z = z2 - z1` after the normalising shift that
    /// places the lower threshold at the origin.
    pub fn z_width(&self) -> f64 {
        self.z2 - self.z1
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn b_at_z1(&self) -> f64 {
        self.b_at_z1
    }

    pub fn b_at_z2(&self) -> f64 {
        self.b_at_z2
    }

    pub fn b_sup(&self) -> f64 {
        self.b_sup
    }

    pub fn phi_sup(&self) -> f64 {
        self.phi_sup
    }

    fn zone(&self, x: f64) -> Zone {
        if x < self.z1 {
            Zone::Left
        } else if x <= self.z2 {
            Zone::Middle
        } else {
            Zone::Right
        }
    }

    fn piece(&self, zone: Zone) -> &Piece {
        match zone {
            Zone::Left => &self.pieces[0],
            Zone::Middle => &self.pieces[1],
            Zone::Right => &self.pieces[2],
        }
    }

    /// The drift value `b(x)`, with the midpoint convention at the jumps.
    pub fn eval_b(&self, x: f64) -> f64 {
        if x == self.z1 {
            self.b_at_z1
        } else if x == self.z2 {
            self.b_at_z2
        } else {
            self.piece(self.zone(x)).value(x)
        }
    }

    /// The derivative `b'(x)`, averaging the one-sided derivatives at jumps.
    pub fn eval_b_derivative(&self, x: f64) -> f64 {
        if x == self.z1 {
            0.5 * (self.pieces[0].derivative(x) + self.pieces[1].derivative(x))
        } else if x == self.z2 {
            0.5 * (self.pieces[1].derivative(x) + self.pieces[2].derivative(x))
        } else {
            self.piece(self.zone(x)).derivative(x)
        }
    }

    /// The primitive `B(x) = Integral_0^x b(u) du`, continuous across the
    /// thresholds, normalised by `B(0) = 0`.
    ///
    /// Pieces without a closed-form antiderivative are integrated by
    /// adaptive quadrature to absolute tolerance `1e-10`; a quadrature
    /// failure propagates as [`Error::QuadratureNonConvergence`].
    pub fn eval_big_b(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(0.0);
        }
        // Split [0, x] (or [x, 0]) at any threshold it crosses so each
        // segment lies in a single zone; continuity at the thresholds is
        // then automatic.
        let (lo, hi, sign) = if x > 0.0 {
            (0.0, x, 1.0)
        } else {
            (x, 0.0, -1.0)
        };
        let mut cuts = vec![lo];
        for z in [self.z1, self.z2] {
            if lo < z && z < hi {
                cuts.push(z);
            }
        }
        cuts.push(hi);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (u, v) = (w[0], w[1]);
            let piece = self.piece(self.zone(0.5 * (u + v)));
            total += piece.integral(u, v)?;
        }
        Ok(sign * total)
    }

    /// The thinning intensity
    /// `phi_plus(x) = (b(x)^2 + b'(x) - inf(b^2 + b')) / 2`.
    ///
    /// Non-negative by construction; values are clamped at zero to absorb
    /// the (sub-`1e-10`) slack of the numerically located infimum.
    pub fn eval_phi_plus(&self, x: f64) -> f64 {
        let b = self.eval_b(x);
        let q = b * b + self.eval_b_derivative(x);
        (0.5 * (q - self.quad_inf)).max(0.0)
    }

    /// The built-in two-jump indicator drift: `b = 1` on `[0, 1]`, zero
    /// outside, thresholds at 0 and 1.
    pub fn builtin_b1() -> DriftSpec {
        make_drift(
            [Piece::constant(0.0), Piece::constant(1.0), Piece::constant(0.0)],
            0.0,
            1.0,
        )
        .expect("builtin drift is valid")
    }

    /// The built-in mixed drift: `b = -2` below 0, `sin x` on `[0, 1]`,
    /// `1 + sin 1` above 1.
    pub fn builtin_b2() -> DriftSpec {
        let right = 1.0 + 1.0f64.sin();
        make_drift(
            [
                Piece::constant(-2.0),
                Piece::with_primitive(|x: f64| x.sin(), |x: f64| x.cos(), |x: f64| -x.cos()),
                Piece::constant(right),
            ],
            0.0,
            1.0,
        )
        .expect("builtin drift is valid")
    }

    /// A constant drift `b = mu` (no jumps; both thetas vanish). Thresholds
    /// sit at the conventional `0` and `1`.
    pub fn constant(mu: f64) -> DriftSpec {
        make_drift(
            [Piece::constant(mu), Piece::constant(mu), Piece::constant(mu)],
            0.0,
            1.0,
        )
        .expect("constant drift is valid")
    }
}

/// Builds a [`DriftSpec`] from three pieces and the thresholds, deriving the
/// jump parameters and the global bounds.
pub fn make_drift(pieces: [Piece; 3], z1: f64, z2: f64) -> Result<DriftSpec> {
    if !z1.is_finite() || !z2.is_finite() {
        return Err(Error::InvalidParameter(
            "thresholds must be finite".into(),
        ));
    }
    if !(z1 < z2) {
        return Err(Error::InvalidParameter(format!(
            "thresholds must satisfy z1 < z2, got z1 = {z1}, z2 = {z2}"
        )));
    }

    let left_z1 = pieces[0].value(z1);
    let mid_z1 = pieces[1].value(z1);
    let mid_z2 = pieces[1].value(z2);
    let right_z2 = pieces[2].value(z2);

    let theta1 = 0.5 * (mid_z1 - left_z1);
    let theta2 = 0.5 * (right_z2 - mid_z2);
    let b_at_z1 = 0.5 * (mid_z1 + left_z1);
    let b_at_z2 = 0.5 * (right_z2 + mid_z2);

    let scan = Scan::run(&pieces, z1, z2);
    if !(scan.b_sup.is_finite() && scan.quad_inf.is_finite() && scan.quad_sup.is_finite()) {
        return Err(Error::InvalidParameter(
            "drift scan produced non-finite bounds; pieces must be bounded".into(),
        ));
    }

    Ok(DriftSpec {
        pieces,
        z1,
        z2,
        theta1,
        theta2,
        b_at_z1,
        b_at_z2,
        b_sup: scan.b_sup,
        phi_sup: 0.5 * (scan.quad_sup - scan.quad_inf),
        quad_inf: scan.quad_inf,
    })
}

/// Result of the construction-time extremum scan.
struct Scan {
    b_sup: f64,
    quad_inf: f64,
    quad_sup: f64,
}

impl Scan {
    fn run(pieces: &[Piece; 3], z1: f64, z2: f64) -> Scan {
        let piece_at = |x: f64| -> &Piece {
            if x < z1 {
                &pieces[0]
            } else if x <= z2 {
                &pieces[1]
            } else {
                &pieces[2]
            }
        };
        let abs_b = |x: f64| piece_at(x).value(x).abs();
        let quad = |x: f64| {
            let p = piece_at(x);
            let b = p.value(x);
            b * b + p.derivative(x)
        };

        let lo = z1 - 10.0;
        let hi = z2 + 10.0;
        let step = (hi - lo) / SCAN_POINTS as f64;

        // Grid candidates, skipping the exact thresholds where the zone is
        // ambiguous; the one-sided limits are added explicitly below.
        let mut candidates: Vec<f64> = (0..=SCAN_POINTS)
            .map(|i| lo + step * i as f64)
            .filter(|&x| x != z1 && x != z2)
            .collect();
        // One-sided threshold limits, nudged into the open zones.
        let eps1 = (z2 - z1) * 1e-9;
        candidates.extend([z1 - eps1, z1 + eps1, z2 - eps1, z2 + eps1]);
        // Far-field samples for the unbounded zones: constants are captured
        // by any point, trigonometric terms by a two-period sweep.
        for side in [-1.0, 1.0] {
            let base = if side < 0.0 { z1 - 1e6 } else { z2 + 1e6 };
            for j in 0..64 {
                candidates.push(base + side * 4.0 * std::f64::consts::PI * j as f64 / 64.0);
            }
        }

        // Supremum of `f` over the candidate set, sharpened by ternary
        // refinement in the grid cell around the best point (clamped away
        // from the thresholds so the objective stays in one smooth zone).
        let maximise = |f: &dyn Fn(f64) -> f64| -> f64 {
            let mut arg = candidates[0];
            let mut val = f(arg);
            for &x in &candidates[1..] {
                let v = f(x);
                if v > val {
                    val = v;
                    arg = x;
                }
            }
            let mut a = arg - step;
            let mut b = arg + step;
            for z in [z1, z2] {
                if a < z && z < arg {
                    a = z + eps1;
                }
                if arg < z && z < b {
                    b = z - eps1;
                }
            }
            while b - a > REFINE_TOL {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if f(m1) < f(m2) {
                    a = m1;
                } else {
                    b = m2;
                }
            }
            val.max(f(0.5 * (a + b)))
        };

        let b_sup = maximise(&abs_b);
        let quad_sup = maximise(&quad);
        let quad_inf = -maximise(&|x| -quad(x));

        Scan {
            b_sup,
            quad_inf,
            quad_sup,
        }
    }
}

/// Serializable description of one drift piece: a polynomial plus
/// trigonometric terms,
/// `value(x) = sum_i poly[i] x^i + sum (a, f, p) in cos: a cos(f x + p)
///  + sum (a, f, p) in sin: a sin(f x + p)`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    /// Polynomial coefficients, constant term first. Restricted to a single
    /// constant on the two unbounded zones.
    #[serde(default)]
    pub poly: Vec<f64>,
    /// Cosine terms as `[amplitude, frequency, phase]` triples.
    #[serde(default)]
    pub cos: Vec<[f64; 3]>,
    /// Sine terms as `[amplitude, frequency, phase]` triples.
    #[serde(default)]
    pub sin: Vec<[f64; 3]>,
}

impl PieceConfig {
    fn build(&self, unbounded_zone: bool) -> Result<Piece> {
        if unbounded_zone && self.poly.len() > 1 {
            return Err(Error::DriftConfig(
                "non-constant polynomial on an unbounded zone makes the drift unbounded".into(),
            ));
        }
        for term in self.cos.iter().chain(self.sin.iter()) {
            if term[1] == 0.0 {
                return Err(Error::DriftConfig(
                    "trigonometric term with zero frequency; fold it into the constant".into(),
                ));
            }
        }
        let poly = self.poly.clone();
        let cos = self.cos.clone();
        let sin = self.sin.clone();
        let value = {
            let (poly, cos, sin) = (poly.clone(), cos.clone(), sin.clone());
            move |x: f64| {
                let mut v = poly.iter().rev().fold(0.0, |acc, c| acc * x + c);
                for [a, f, p] in &cos {
                    v += a * (f * x + p).cos();
                }
                for [a, f, p] in &sin {
                    v += a * (f * x + p).sin();
                }
                v
            }
        };
        let derivative = {
            let (poly, cos, sin) = (poly.clone(), cos.clone(), sin.clone());
            move |x: f64| {
                let mut v = 0.0;
                for (i, c) in poly.iter().enumerate().skip(1) {
                    v += i as f64 * c * x.powi(i as i32 - 1);
                }
                for [a, f, p] in &cos {
                    v -= a * f * (f * x + p).sin();
                }
                for [a, f, p] in &sin {
                    v += a * f * (f * x + p).cos();
                }
                v
            }
        };
        let primitive = {
            let (poly, cos, sin) = (poly.clone(), cos.clone(), sin.clone());
            move |x: f64| {
                let mut v = 0.0;
                for (i, c) in poly.iter().enumerate() {
                    v += c * x.powi(i as i32 + 1) / (i as f64 + 1.0);
                }
                for [a, f, p] in &cos {
                    v += a / f * (f * x + p).sin();
                }
                for [a, f, p] in &sin {
                    v -= a / f * (f * x + p).cos();
                }
                v
            }
        };
        Ok(Piece::with_primitive(value, derivative, primitive))
    }
}

/// Serializable drift description: either a named builtin or three explicit
/// pieces with thresholds.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftConfig {
    /// One of `"b1"`, `"b2"`, `"constant"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    /// Drift level for `builtin = "constant"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<PieceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub middle: Option<PieceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<PieceConfig>,
}

impl DriftConfig {
    /// Parses a TOML drift description.
    pub fn from_toml_str(s: &str) -> Result<DriftConfig> {
        toml::from_str(s).map_err(|e| Error::DriftConfig(e.to_string()))
    }

    /// Reads and parses a TOML drift description from a file.
    pub fn from_path(path: &std::path::Path) -> Result<DriftConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Materialises the configuration into an analysed [`DriftSpec`].
    pub fn build(&self) -> Result<DriftSpec> {
        if let Some(name) = &self.builtin {
            if self.left.is_some() || self.middle.is_some() || self.right.is_some() {
                return Err(Error::DriftConfig(
                    "a config may name a builtin or spell out pieces, not both".into(),
                ));
            }
            return match name.as_str() {
                "b1" => Ok(DriftSpec::builtin_b1()),
                "b2" => Ok(DriftSpec::builtin_b2()),
                "constant" => {
                    let mu = self.mu.ok_or_else(|| {
                        Error::DriftConfig("builtin \"constant\" requires `mu`".into())
                    })?;
                    Ok(DriftSpec::constant(mu))
                }
                other => Err(Error::DriftConfig(format!(
                    "unknown builtin drift {other:?}; expected \"b1\", \"b2\", or \"constant\""
                ))),
            };
        }
        let z1 = self
            .z1
            .ok_or_else(|| Error::DriftConfig("missing threshold z1".into()))?;
        let z2 = self
            .z2
            .ok_or_else(|| Error::DriftConfig("missing threshold z2".into()))?;
        let left = self
            .left
            .as_ref()
            .ok_or_else(|| Error::DriftConfig("missing [left] piece".into()))?
            .build(true)?;
        let middle = self
            .middle
            .as_ref()
            .ok_or_else(|| Error::DriftConfig("missing [middle] piece".into()))?
            .build(false)?;
        let right = self
            .right
            .as_ref()
            .ok_or_else(|| Error::DriftConfig("missing [right] piece".into()))?
            .build(true)?;
        make_drift([left, middle, right], z1, z2)
    }
}

/// Resolves a CLI drift selector: a builtin name (`b1`, `b2`, `constant`
/// with `mu`) or a path to a TOML config.
pub fn load_drift(selector: &str, mu: Option<f64>) -> Result<DriftSpec> {
    match selector {
        "b1" => Ok(DriftSpec::builtin_b1()),
        "b2" => Ok(DriftSpec::builtin_b2()),
        "constant" => {
            let mu = mu.ok_or_else(|| {
                Error::DriftConfig("drift \"constant\" requires --mu".into())
            })?;
            Ok(DriftSpec::constant(mu))
        }
        path => DriftConfig::from_path(std::path::Path::new(path))?.build(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b1_jump_parameters() {
        let s = DriftSpec::builtin_b1();
        assert_eq!(s.theta1(), 0.5);
        assert_eq!(s.theta2(), -0.5);
        assert_eq!(s.b_at_z1(), 0.5);
        assert_eq!(s.b_at_z2(), 0.5);
        assert!((s.b_sup() - 1.0).abs() < 1e-9);
        assert!((s.phi_sup() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn b1_primitive_values() {
        let s = DriftSpec::builtin_b1();
        assert!((s.eval_big_b(0.5).unwrap() - 0.5).abs() < 1e-12);
        let diff = s.eval_big_b(2.0).unwrap() - s.eval_big_b(1.0).unwrap();
        assert!(diff.abs() < 1e-12);
        assert_eq!(s.eval_big_b(0.0).unwrap(), 0.0);
    }

    #[test]
    fn b1_phi_plus() {
        let s = DriftSpec::builtin_b1();
        assert!((s.eval_phi_plus(0.5) - 0.5).abs() < 1e-9);
        assert!(s.eval_phi_plus(-3.0).abs() < 1e-9);
    }

    #[test]
    fn constant_drift_has_no_jumps() {
        let s = DriftSpec::constant(0.7);
        assert_eq!(s.theta1(), 0.0);
        assert_eq!(s.theta2(), 0.0);
        assert!(s.phi_sup().abs() < 1e-9);
        for x in [-2.0, 0.3, 5.0] {
            assert!(s.eval_phi_plus(x).abs() < 1e-9);
        }
    }

    #[test]
    fn midpoint_convention_at_jumps() {
        let s = DriftSpec::builtin_b1();
        assert_eq!(s.eval_b(0.0), 0.5);
        assert_eq!(s.eval_b(1.0), 0.5);
        assert_eq!(s.eval_b(0.5), 1.0);
        assert_eq!(s.eval_b(-0.1), 0.0);
    }

    #[test]
    fn rejects_bad_thresholds() {
        let mk = || [Piece::constant(0.0), Piece::constant(1.0), Piece::constant(0.0)];
        assert!(make_drift(mk(), 1.0, 0.0).is_err());
        assert!(make_drift(mk(), 1.0, 1.0).is_err());
        assert!(make_drift(mk(), f64::NAN, 1.0).is_err());
    }

    #[test]
    fn config_roundtrip_builtin() {
        let cfg = DriftConfig::from_toml_str("builtin = \"b1\"").unwrap();
        let s = cfg.build().unwrap();
        assert_eq!(s.theta1(), 0.5);
        let bad = DriftConfig::from_toml_str("builtin = \"nope\"").unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn config_explicit_pieces() {
        let text = r#"
            z1 = 0.0
            z2 = 1.0
            [left]
            poly = [-2.0]
            [middle]
            sin = [[1.0, 1.0, 0.0]]
            [right]
            poly = [1.8414709848078965]
        "#;
        let s = DriftConfig::from_toml_str(text).unwrap().build().unwrap();
        let b2 = DriftSpec::builtin_b2();
        assert!((s.theta1() - b2.theta1()).abs() < 1e-12);
        assert!((s.theta2() - b2.theta2()).abs() < 1e-12);
        for x in [-1.0, 0.3, 0.9, 2.0] {
            assert!((s.eval_b(x) - b2.eval_b(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn config_rejects_unbounded_pieces() {
        let text = r#"
            z1 = 0.0
            z2 = 1.0
            [left]
            poly = [0.0, 1.0]
            [middle]
            poly = [1.0]
            [right]
            poly = [0.0]
        "#;
        assert!(DriftConfig::from_toml_str(text).unwrap().build().is_err());
    }
}
