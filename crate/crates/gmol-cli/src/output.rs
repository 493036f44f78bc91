//! Dataset serialization helpers shared by the subcommands.
//!
//! CSV cells use 17-significant-digit scientific notation so every `f64`
//! round-trips exactly and two runs of the same configuration produce
//! byte-identical files. JSON goes through typed structs, so key order is
//! the declaration order and equally stable.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Stamped into every JSON summary so downstream tooling can detect
/// layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float for CSV: `nan`, `inf`, `-inf`, or `{:.16e}`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else if v == f64::INFINITY {
        "inf".to_owned()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        format!("{v:.16e}")
    }
}

pub fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Opens `path` for buffered writing.
pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_error(path, e))
}

/// Writes `value` as pretty-printed JSON with a trailing newline.
///
/// Non-finite floats have no JSON representation and serialize as `null`;
/// the CSV datasets keep the distinction via the `nan`/`inf` literals.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_error(path, e))?;
    w.write_all(b"\n").map_err(|e| io_error(path, e))?;
    w.flush().map_err(|e| io_error(path, e))
}
