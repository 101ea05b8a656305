//! CSV and JSON serialisation of densities, skeletons, terminal batches,
//! KDE curves, and benchmark tables.
//!
//! All writers emit comma-separated files with a header row, '.'-decimal
//! floats in shortest round-trip form, and a terminating newline, so the
//! files re-parse to bit-identical values. Relative output paths are
//! resolved against the directory named by [`OUT_DIR_ENV`] when it is set.

use std::fs::{self, File};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sim::{BatchOutput, PathStats, SimConfig, Skeleton};

/// Environment variable naming the default output directory for relative
/// paths.
pub const OUT_DIR_ENV: &str = "SKEWSIM_OUT_DIR";

/// Resolves a user-supplied output path: absolute paths pass through;
/// relative paths are joined onto [`OUT_DIR_ENV`] when the variable is set
/// and non-empty.
pub fn resolve_out_path<P: AsRef<Path>>(path: P) -> PathBuf {
    let path = path.as_ref();
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Sidecar metadata path for a data file: `out.csv` → `out.meta.json`.
pub fn sidecar_path(data_path: &Path) -> PathBuf {
    data_path.with_extension("meta.json")
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    Ok(())
}

/// Writes serialisable rows as headered CSV, returning the resolved path.
pub fn write_csv<T: Serialize, P: AsRef<Path>>(path: P, rows: &[T]) -> Result<PathBuf> {
    let path = resolve_out_path(path);
    ensure_parent(&path)?;
    let mut writer = csv::Writer::from_path(&path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(path)
}

/// Writes a value as pretty JSON with a trailing newline, returning the
/// resolved path.
pub fn write_json<T: Serialize, P: AsRef<Path>>(path: P, value: &T) -> Result<PathBuf> {
    let path = resolve_out_path(path);
    ensure_parent(&path)?;
    let mut file = File::create(&path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file)?;
    Ok(path)
}

/// One transition-density evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Series correction factor.
    pub v: f64,
    /// Full transition density.
    pub p: f64,
    pub n_terms: usize,
    pub remainder_bound: f64,
}

/// One bridge-density evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeRow {
    pub t: f64,
    pub t_total: f64,
    pub x1: f64,
    pub x2: f64,
    pub y: f64,
    pub q: f64,
    pub n_terms: usize,
    pub remainder_bound: f64,
}

/// One skeleton point or terminal sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub sample_id: u64,
    pub time: f64,
    pub value: f64,
    pub exact_flag: bool,
}

/// One KDE grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeRow {
    pub x: f64,
    pub density: f64,
}

/// Flattens a skeleton into CSV rows under the given sample id.
pub fn skeleton_rows(sample_id: u64, skeleton: &Skeleton) -> Vec<PathRow> {
    skeleton
        .times
        .iter()
        .zip(&skeleton.values)
        .zip(&skeleton.exact_flags)
        .map(|((&time, &value), &exact_flag)| PathRow {
            sample_id,
            time,
            value,
            exact_flag,
        })
        .collect()
}

/// Flattens a terminal batch into one row per sample, all at the horizon.
pub fn terminal_rows(t_total: f64, batch: &BatchOutput) -> Vec<PathRow> {
    batch
        .values
        .iter()
        .zip(&batch.exact)
        .enumerate()
        .map(|(i, (&value, &exact_flag))| PathRow {
            sample_id: i as u64,
            time: t_total,
            value,
            exact_flag,
        })
        .collect()
}

/// Wraps KDE output pairs into headered rows.
pub fn kde_rows(estimate: &[(f64, f64)]) -> Vec<KdeRow> {
    estimate
        .iter()
        .map(|&(x, density)| KdeRow { x, density })
        .collect()
}

/// Batch metadata sidecar: configuration echo plus sampler diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct BatchMetadata {
    pub command: String,
    pub drift: String,
    pub method: String,
    pub x0: f64,
    pub n: usize,
    pub config: SimConfig,
    pub acceptance_rate: f64,
    pub mean_proposals: f64,
    pub mean_terms: f64,
    pub inexact_terminal_draws: u64,
    pub restarts: u64,
    pub field_points: u64,
}

impl BatchMetadata {
    pub fn new(
        command: impl Into<String>,
        drift: impl Into<String>,
        method: impl Into<String>,
        x0: f64,
        n: usize,
        config: &SimConfig,
        stats: &PathStats,
    ) -> BatchMetadata {
        BatchMetadata {
            command: command.into(),
            drift: drift.into(),
            method: method.into(),
            x0,
            n,
            config: *config,
            acceptance_rate: stats.terminal.acceptance_rate(),
            mean_proposals: stats.terminal.mean_proposals(),
            mean_terms: stats.terminal.mean_terms(),
            inexact_terminal_draws: stats.terminal.inexact,
            restarts: stats.restarts,
            field_points: stats.field_points,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn awkward_rows() -> Vec<PathRow> {
        vec![
            PathRow {
                sample_id: 0,
                time: 0.0,
                value: -0.1,
                exact_flag: true,
            },
            PathRow {
                sample_id: 1,
                time: 1e-17,
                value: 0.1 + 0.2,
                exact_flag: false,
            },
            PathRow {
                sample_id: 2,
                time: 0.55,
                value: -3.0e300,
                exact_flag: true,
            },
        ]
    }

    #[test]
    fn csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let rows = awkward_rows();
        let written = write_csv(&path, &rows).unwrap();
        assert_eq!(written, path);
        let mut reader = csv::Reader::from_path(&path).unwrap();
        let back: Vec<PathRow> = reader.deserialize().map(|row| row.unwrap()).collect();
        assert_eq!(rows, back);
    }

    #[test]
    fn csv_has_header_and_trailing_newline() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kde.csv");
        write_csv(&path, &kde_rows(&[(0.0, 0.5), (0.1, 0.4)])).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,density\n"));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn out_dir_env_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        std::env::set_var(OUT_DIR_ENV, dir.path());
        let resolved = resolve_out_path("nested/out.csv");
        std::env::remove_var(OUT_DIR_ENV);
        assert_eq!(resolved, dir.path().join("nested/out.csv"));
        // Absolute paths are untouched with or without the variable.
        let abs = dir.path().join("abs.csv");
        assert_eq!(resolve_out_path(&abs), abs);
    }

    #[test]
    fn writers_create_parent_directories() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/c.csv");
        write_csv(&path, &awkward_rows()).unwrap();
        assert!(path.exists());
    }

    #[test]
    fn sidecar_naming() {
        assert_eq!(
            sidecar_path(Path::new("runs/out.csv")),
            Path::new("runs/out.meta.json")
        );
        assert_eq!(sidecar_path(Path::new("out")), Path::new("out.meta.json"));
    }

    #[test]
    fn json_sidecar_writes_and_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("meta.json");
        let stats = PathStats::default();
        let meta = BatchMetadata::new(
            "sample",
            "b1",
            "srrs",
            0.5,
            100,
            &SimConfig::default(),
            &stats,
        );
        write_json(&path, &meta).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["drift"], "b1");
        assert_eq!(back["config"]["t_el"], 0.55);
        // No draws yet: the rate serialises as null, not as a parse error.
        assert!(back["acceptance_rate"].is_null());
    }

    #[test]
    fn skeleton_and_terminal_flattening() {
        let skel = Skeleton {
            times: vec![0.0, 0.3, 1.0],
            values: vec![0.5, 0.7, 0.2],
            exact_flags: vec![true, false, true],
            seed: 9,
        };
        let rows = skeleton_rows(3, &skel);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].sample_id, 3);
        assert_eq!(rows[1].time, 0.3);
        assert!(!rows[1].exact_flag);

        let batch = BatchOutput {
            values: vec![1.0, 2.0],
            exact: vec![true, false],
            stats: PathStats::default(),
        };
        let rows = terminal_rows(0.55, &batch);
        assert_eq!(rows[0].time, 0.55);
        assert_eq!(rows[1].sample_id, 1);
        assert!(!rows[1].exact_flag);
    }
}
