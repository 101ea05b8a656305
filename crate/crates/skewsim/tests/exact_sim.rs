//! Path-sampler integration tests: the named verification checks for the
//! whole-path samplers, plus property tests for skeleton well-formedness,
//! bridge refinement, and the serialisation round-trip contract.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skewsim::density::ThetaParams;
use skewsim::drift::DriftSpec;
use skewsim::error::Error;
use skewsim::output::{terminal_rows, write_csv, PathRow};
use skewsim::sim::{batch_terminal, fill_path, rrs, srrs, Method, SimConfig};
use skewsim::verify;

fn assert_check(report: skewsim::verify::CheckReport) {
    assert!(report.passed, "{}", report.line());
}

#[test]
fn markov_consistency() {
    assert_check(verify::check_markov_consistency());
}

#[test]
fn skeleton_shape() {
    assert_check(verify::check_skeleton_shape());
}

#[test]
fn reproducibility() {
    assert_check(verify::check_reproducibility());
}

#[test]
fn constant_drift_law() {
    assert_check(verify::check_constant_drift_law());
}

#[test]
fn terminal_law_vs_euler() {
    assert_check(verify::check_terminal_law_vs_euler());
}

#[test]
fn cpu_shape() {
    assert_check(verify::check_cpu_shape());
}

// ---------------------------------------------------------------------------
// Property tests
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 32,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    /// Skeletons are strictly increasing in time, span exactly [0, T], and
    /// start at x0, for both samplers and arbitrary seeds.
    #[test]
    fn skeletons_well_formed(
        seed in any::<u64>(),
        x0 in -0.5f64..1.5,
        t_total in 0.3f64..2.0,
        use_srrs in any::<bool>(),
    ) {
        let spec = DriftSpec::builtin_b1();
        let cfg = SimConfig { t: t_total, seed, ..SimConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let skel = if use_srrs {
            srrs(&spec, x0, 0.0, t_total, &cfg, &mut rng).unwrap()
        } else {
            rrs(&spec, x0, 0.0, t_total, &cfg, &mut rng).unwrap()
        };
        prop_assert!(skel.times.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(skel.times[0], 0.0);
        prop_assert_eq!(*skel.times.last().unwrap(), t_total);
        prop_assert_eq!(skel.values[0], x0);
        prop_assert!(skel.values.iter().all(|v| v.is_finite()));
        prop_assert_eq!(skel.times.len(), skel.values.len());
        prop_assert_eq!(skel.times.len(), skel.exact_flags.len());
    }

    /// Requesting times already present leaves the skeleton unchanged;
    /// fresh interior times are inserted in order without disturbing the
    /// existing nodes; out-of-span requests fail with the span error.
    #[test]
    fn fill_path_contract(
        seed in any::<u64>(),
        frac in 0.05f64..0.95,
    ) {
        let spec = DriftSpec::builtin_b1();
        let theta = ThetaParams::from_drift(&spec).unwrap();
        let cfg = SimConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let skel = srrs(&spec, 0.5, 0.0, 1.0, &cfg, &mut rng).unwrap();

        // Idempotence on existing times.
        let unchanged = fill_path(&skel, &skel.times, &theta, &mut rng).unwrap();
        prop_assert_eq!(&unchanged.times, &skel.times);
        prop_assert_eq!(&unchanged.values, &skel.values);

        // A fresh interior time lands sorted, and old nodes survive.
        let t_new = frac * (skel.times[0] + 1e-9) + (1.0 - frac) * 0.5;
        let refined = fill_path(&skel, &[t_new], &theta, &mut rng).unwrap();
        prop_assert!(refined.times.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(refined.times.len() >= skel.times.len());
        for (t, v) in skel.times.iter().zip(&skel.values) {
            let idx = refined.times.iter().position(|s| s == t).unwrap();
            prop_assert_eq!(refined.values[idx], *v);
        }

        // Outside the span: a named span error.
        let err = fill_path(&skel, &[1.5], &theta, &mut rng).unwrap_err();
        prop_assert!(matches!(err, Error::TimeOutsideSpan { .. }), "got {err}");
    }

    /// Batch terminal values re-parse bit-identically from CSV.
    #[test]
    fn csv_round_trip(seed in any::<u64>()) {
        let spec = DriftSpec::builtin_b1();
        let cfg = SimConfig { t: 0.5, seed, ..SimConfig::default() };
        let batch = batch_terminal(&spec, 0.5, Method::Srrs, 16, &cfg).unwrap();
        let rows = terminal_rows(0.5, &batch);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("terminal.csv");
        write_csv(&path, &rows).unwrap();

        let mut reader = csv::Reader::from_path(&path).unwrap();
        let reread: Vec<PathRow> = reader.deserialize().map(|r| r.unwrap()).collect();
        prop_assert_eq!(reread.len(), rows.len());
        for (a, b) in rows.iter().zip(&reread) {
            prop_assert_eq!(a.sample_id, b.sample_id);
            prop_assert_eq!(a.time.to_bits(), b.time.to_bits());
            prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
            prop_assert_eq!(a.exact_flag, b.exact_flag);
        }
    }
}
