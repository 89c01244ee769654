//! Report files. CSV tables start with one `#` line carrying the generation
//! time; everything after it depends only on the configuration and seed.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const TIMESTAMP_PREFIX: &str = "# generated_unix=";

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Write `rows` under `header` to `dir/name`, preceded by the timestamp line.
pub fn write_csv<R: AsRef<[String]>>(dir: &Path, name: &str, command: &str, header: &[&str], rows: &[R]) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let mut out = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    writeln!(out, "{TIMESTAMP_PREFIX}{now} command={command}")?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.as_ref())?;
        }
        w.flush()?;
    }
    out.flush()?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Shortest round-trip form (exponent notation at the extremes);
/// `inf`/`NaN` spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

/// Drop the timestamp line, for comparing reruns.
pub fn strip_timestamp(csv_text: &str) -> String {
    csv_text.lines().filter(|l| !l.starts_with(TIMESTAMP_PREFIX)).collect::<Vec<_>>().join("\n")
}
