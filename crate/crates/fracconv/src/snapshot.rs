//! Text snapshots of a [`Field`]:
//!
//! ```text
//! # fracconv-snapshot v1
//! half_width = 200
//! points = 8192
//! time = 1
//! 0e0
//! 1.2345e-7
//! ...
//! ```
//!
//! Samples are written in the shortest decimal form that parses back to
//! the same `f64`, so `read(write(f)) == f` bit for bit.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use fracconv_core::{Field, GridSpec};

pub const MAGIC: &str = "# fracconv-snapshot";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("unsupported snapshot version {found} (this build reads v{VERSION})")]
    Version { found: String },
    #[error("header declares {declared} samples but the body has {found}")]
    Count { declared: usize, found: usize },
}

fn bad(line: usize, message: impl Into<String>) -> SnapshotError {
    SnapshotError::Format {
        line,
        message: message.into(),
    }
}

pub fn format_snapshot(f: &Field) -> String {
    let g = f.grid();
    let mut out = String::with_capacity(24 * g.len() + 96);
    let _ = writeln!(out, "{MAGIC} v{VERSION}");
    let _ = writeln!(out, "half_width = {:e}", g.half_width());
    let _ = writeln!(out, "points = {}", g.len());
    let _ = writeln!(out, "time = {:e}", f.time());
    for v in f.samples() {
        let _ = writeln!(out, "{v:e}");
    }
    out
}

pub fn parse_snapshot(text: &str) -> Result<Field, SnapshotError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (n, first) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let version = first
        .strip_prefix(MAGIC)
        .map(str::trim)
        .ok_or_else(|| bad(n, format!("expected {MAGIC:?} header, found {first:?}")))?;
    if version != format!("v{VERSION}") {
        return Err(SnapshotError::Version { found: version.into() });
    }
    let mut header = |key: &str| -> Result<(usize, String), SnapshotError> {
        let (n, line) = lines.next().ok_or_else(|| bad(0, format!("truncated header: missing {key}")))?;
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(n, format!("expected `{key} = ...`, found {line:?}")))?;
        if k.trim() != key {
            return Err(bad(n, format!("expected key {key:?}, found {:?}", k.trim())));
        }
        Ok((n, v.trim().to_owned()))
    };
    let (ln, l) = header("half_width")?;
    let half_width: f64 = l.parse().map_err(|_| bad(ln, format!("half_width is not a number: {l:?}")))?;
    let (ln, p) = header("points")?;
    let points: usize = p.parse().map_err(|_| bad(ln, format!("points is not an integer: {p:?}")))?;
    let (ln, t) = header("time")?;
    let time: f64 = t.parse().map_err(|_| bad(ln, format!("time is not a number: {t:?}")))?;
    let grid = GridSpec::new(half_width, points).map_err(|e| bad(ln, e.to_string()))?;

    let mut samples = Vec::with_capacity(points);
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let v: f64 = line.trim().parse().map_err(|_| bad(n, format!("sample is not a number: {line:?}")))?;
        samples.push(v);
    }
    if samples.len() != points {
        return Err(SnapshotError::Count {
            declared: points,
            found: samples.len(),
        });
    }
    Field::new(grid, time, samples).map_err(|e| bad(0, e.to_string()))
}

pub fn write_snapshot(f: &Field, path: &Path) -> Result<(), SnapshotError> {
    std::fs::write(path, format_snapshot(f)).map_err(|source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_snapshot(path: &Path) -> Result<Field, SnapshotError> {
    let text = std::fs::read_to_string(path).map_err(|source| SnapshotError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_snapshot(&text)
}
