use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliResult;

/// Shortest round-trip text of a float (`inf`, `NaN` for non-finite values).
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// CSV text with a header row.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn json_text<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("output");
    let tmp: PathBuf = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Writes `stem.csv` and its JSON twin `stem.json` into `dir`.
pub fn write_pair<T: Serialize>(
    dir: &Path,
    stem: &str,
    header: &[&str],
    rows: &[Vec<String>],
    json: &T,
) -> CliResult<()> {
    write_atomic(&dir.join(format!("{stem}.csv")), &csv_text(header, rows)?)?;
    write_atomic(&dir.join(format!("{stem}.json")), &json_text(json)?)
}
