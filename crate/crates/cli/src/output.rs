//! Artifact files and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::{Artifacts, Curve};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub seed: u64,
    /// SHA-256 of the resolved `config.json`.
    pub config_sha256: String,
    pub engine_version: String,
    pub wall_time_s: f64,
    pub workers: usize,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Wide CSV: the x column followed by one column per series.
pub fn curve_csv(c: &Curve) -> Vec<u8> {
    let mut out = c.x_name.clone();
    for (name, _) in &c.series {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (k, x) in c.x.iter().enumerate() {
        out.push_str(&fmt_f64(*x));
        for (_, ys) in &c.series {
            out.push(',');
            if let Some(y) = ys.get(k) {
                out.push_str(&fmt_f64(*y));
            }
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// One two-column CSV per series, named `curve_<series>.csv`.
pub fn curve_csv_two_column(c: &Curve) -> Vec<(String, Vec<u8>)> {
    c.series
        .iter()
        .map(|(name, ys)| {
            let mut out = format!("{},{name}\n", c.x_name);
            for (x, y) in c.x.iter().zip(ys) {
                out.push_str(&format!("{},{}\n", fmt_f64(*x), fmt_f64(*y)));
            }
            (format!("curve_{name}.csv"), out.into_bytes())
        })
        .collect()
}

/// Writes through a temporary sibling and renames it into place.
fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let unwritable = |source| CliError::Unwritable { path: path.clone(), source };
    let mut f = fs::File::create(&tmp).map_err(unwritable)?;
    f.write_all(bytes).map_err(unwritable)?;
    f.sync_all().map_err(unwritable)?;
    fs::rename(&tmp, &path).map_err(unwritable)
}

pub struct WriteOptions {
    pub gnuplot_friendly: bool,
    pub wall_time_s: f64,
    pub workers: usize,
}

/// Writes every artifact, then the manifest. Returns the manifest path.
pub fn write_run(
    dir: &Path,
    cfg: &ExperimentConfig,
    artifacts: &Artifacts,
    opts: &WriteOptions,
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Unwritable { path: dir.to_path_buf(), source })?;
    let mut config = serde_json::to_vec_pretty(&cfg.to_json()).expect("config serialises");
    config.push(b'\n');
    let mut metrics = serde_json::to_vec_pretty(&artifacts.metrics).expect("metrics serialise");
    metrics.push(b'\n');

    let mut files: Vec<(String, Vec<u8>)> = vec![
        ("config.json".into(), config),
        ("metrics.json".into(), metrics),
        ("raster.csv".into(), artifacts.raster.clone()),
    ];
    if opts.gnuplot_friendly {
        files.extend(curve_csv_two_column(&artifacts.curve));
    } else {
        files.push(("curve.csv".into(), curve_csv(&artifacts.curve)));
    }

    let mut entries = Vec::with_capacity(files.len());
    for (name, bytes) in &files {
        write_atomic(dir, name, bytes)?;
        entries.push(FileEntry { path: name.clone(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
    }
    let manifest = RunManifest {
        experiment: cfg.experiment.to_string(),
        seed: cfg.seed,
        config_sha256: entries[0].sha256.clone(),
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: opts.wall_time_s,
        workers: opts.workers,
        files: entries,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serialises");
    bytes.push(b'\n');
    write_atomic(dir, MANIFEST, &bytes)?;
    Ok(dir.join(MANIFEST))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> Curve {
        Curve {
            x_name: "t".into(),
            x: vec![0.0, 0.5],
            series: vec![("a".into(), vec![1.0, 2.0]), ("b".into(), vec![-1.0, 0.25])],
        }
    }

    #[test]
    fn wide_curve_has_a_header_and_lf_rows() {
        let text = String::from_utf8(curve_csv(&curve())).unwrap();
        assert_eq!(text, "t,a,b\n0,1,-1\n0.5,2,0.25\n");
    }

    #[test]
    fn two_column_split_keeps_every_series() {
        let files = curve_csv_two_column(&curve());
        assert_eq!(files[0].0, "curve_a.csv");
        assert_eq!(String::from_utf8(files[1].1.clone()).unwrap(), "t,b\n0,-1\n0.5,0.25\n");
    }
}
