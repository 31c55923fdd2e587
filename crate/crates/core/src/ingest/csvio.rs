//! Shared CSV plumbing: header lookup, line-numbered errors, finite numbers.

use std::io::Read;

use csv::{Reader, ReaderBuilder, StringRecord, Trim};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) fn reader<R: Read>(r: R) -> Reader<R> {
    ReaderBuilder::new().trim(Trim::All).has_headers(true).from_reader(r)
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::parse(line, e.to_string())
}

/// True when the input has no header row at all (zero-length file).
pub(crate) fn is_empty<R: Read>(rdr: &mut Reader<R>) -> Result<bool> {
    let h = rdr.headers().map_err(csv_err)?;
    Ok(h.is_empty() || (h.len() == 1 && h[0].is_empty()))
}

/// Resolves each required column name to its index in the header row.
pub(crate) fn columns<R: Read>(rdr: &mut Reader<R>, names: &[&str]) -> Result<Vec<usize>> {
    let header = rdr.headers().map_err(csv_err)?.clone();
    names
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h.trim_start_matches('\u{feff}') == *name)
                .ok_or_else(|| {
                    Error::parse(
                        1,
                        format!(
                            "missing column '{name}' (header is '{}')",
                            header.iter().collect::<Vec<_>>().join(",")
                        ),
                    )
                })
        })
        .collect()
}

pub(crate) fn record(rec: csv::Result<StringRecord>) -> Result<(StringRecord, u64)> {
    let rec = rec.map_err(csv_err)?;
    let line = rec.position().map_or(0, |p| p.line());
    Ok((rec, line))
}

pub(crate) fn number<T: Real>(rec: &StringRecord, idx: usize, name: &str, line: u64) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    let x: T = raw
        .parse()
        .map_err(|_| Error::parse(line, format!("column '{name}': cannot parse '{raw}' as a number")))?;
    if !x.is_finite() {
        return Err(Error::parse(line, format!("column '{name}': non-finite value '{raw}'")));
    }
    Ok(x)
}

/// Checks that `t` is strictly greater than the previous timestamp.
pub(crate) fn check_monotonic<T: Real>(prev: &mut Option<T>, t: T, line: u64) -> Result<()> {
    if let Some(p) = *prev {
        if t == p {
            return Err(Error::parse(line, format!("duplicate timestamp {t}")));
        }
        if t < p {
            return Err(Error::parse(line, format!("timestamp {t} goes backwards (previous {p})")));
        }
    }
    *prev = Some(t);
    Ok(())
}

pub(crate) fn write_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv output>", io),
        other => Error::Validation(format!("csv write failed: {other:?}")),
    }
}
