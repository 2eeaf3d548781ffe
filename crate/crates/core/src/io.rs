//! File encodings: point-cloud CSV, trajectory emission, atomic writes.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use crate::geometry::{DistortionMap, GeometryError, Point};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("point file: {0}")]
    Format(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Point cloud as CSV with header `x0,…,x{d-1}`.
pub fn points_to_csv(points: &[Point]) -> Result<Vec<u8>, IoError> {
    let d = points.first().map_or(0, Point::dim);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record((0..d).map(|i| format!("x{i}")))?;
    for p in points {
        if p.dim() != d {
            return Err(IoError::Format(format!("mixed dimensions {d} and {}", p.dim())));
        }
        w.write_record(p.coords().iter().map(|v| fmt_f64(*v)))?;
    }
    w.into_inner().map_err(|e| IoError::Io(e.into_error()))
}

/// Parses a point-cloud CSV. The header row is required.
pub fn points_from_csv<R: Read>(input: R) -> Result<Vec<Point>, IoError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    let d = headers.len();
    for (i, h) in headers.iter().enumerate() {
        if h != format!("x{i}") {
            return Err(IoError::Format(format!("header column {i} is {h:?}, expected \"x{i}\"")));
        }
    }
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != d {
            return Err(IoError::Format(format!("row {} has {} columns, expected {d}", row + 1, rec.len())));
        }
        let coords = rec
            .iter()
            .map(|v| v.parse::<f64>().map_err(|_| IoError::Format(format!("row {}: bad number {v:?}", row + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(Point::new(coords)?);
    }
    Ok(out)
}

pub fn read_points(path: &Path) -> Result<Vec<Point>, IoError> {
    points_from_csv(fs::File::open(path)?)
}

/// Applies `map` repeatedly and writes `<prefix>_step<k>.csv` for
/// `k = 0..=steps` (step 0 is the input).
pub fn emit_trajectory(
    map: &DistortionMap,
    initial: &[Point],
    steps: usize,
    dir: &Path,
    prefix: &str,
) -> Result<Vec<PathBuf>, IoError> {
    let mut files = Vec::with_capacity(steps + 1);
    let mut current = initial.to_vec();
    for k in 0..=steps {
        if k > 0 {
            current = map.apply_all(&current)?;
        }
        let path = dir.join(format!("{prefix}_step{k}.csv"));
        write_atomic(&path, &points_to_csv(&current)?)?;
        files.push(path);
    }
    Ok(files)
}
