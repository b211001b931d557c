//! Number formatting, CSV emission and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

/// Formats `x` with 6 significant digits, trailing zeros dropped.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (5..15).contains(&exp) {
        // Digits beyond the sixth are zeros; build them from the rounded mantissa.
        let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
        format!("{digits}{}", "0".repeat((exp - 5) as usize))
    } else if (-5..5).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn opt_sig6(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

pub fn opt_int(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Renders a header and rows as CSV text.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().context("flushing CSV buffer")
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize, D: Serialize> {
    pub command: &'a str,
    pub config: &'a C,
    pub seed: u64,
    pub version: &'static str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<D>,
}

/// Output files for one command: the CSV table and its manifest.
pub struct RunOutput {
    pub dir: PathBuf,
    pub command: &'static str,
}

impl RunOutput {
    pub fn csv_path(&self) -> PathBuf {
        self.dir.join(format!("{}.csv", self.command))
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.dir.join(format!("{}.manifest.json", self.command))
    }

    /// Writes the table, then the manifest. Nothing is written until every
    /// row has been computed by the caller.
    pub fn write<C: Serialize, D: Serialize>(&self, csv: &[u8], config: &C, seed: u64, diagnostics: Option<D>) -> Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let csv_path = self.csv_path();
        write_atomic(&csv_path, csv)?;
        let manifest = Manifest {
            command: self.command,
            config,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            outputs: vec![csv_path.file_name().unwrap().to_string_lossy().into_owned()],
            diagnostics,
        };
        let mut json = serde_json::to_vec_pretty(&manifest)?;
        json.push(b'\n');
        write_atomic(&self.manifest_path(), &json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(400.0), "400");
        assert_eq!(sig6(383.761_736_187), "383.762");
        assert_eq!(sig6(0.780_451_1), "0.780451");
        assert_eq!(sig6(105.88), "105.88");
        assert_eq!(sig6(1_823_886.4), "1823890");
        assert_eq!(sig6(2.5e-9), "2.5e-9");
        assert_eq!(sig6(-1.25), "-1.25");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(999_999.7), "1000000");
        assert_eq!(sig6(1e20), "1e20");
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_atomic(&p, b"a,b\n").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"a,b\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
