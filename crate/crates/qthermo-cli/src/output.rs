//! Record writers. Every command emits a list of flat records; CSV and JSON
//! carry the same fields in the same order, so the two serializations of a
//! run are field-for-field identical.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn write_records<T: Serialize>(
    records: &[T],
    format: Format,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let bytes = render(records, format)?;
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| {
            Failure::Input(format!("cannot write {}: {e}", path.display()))
        }),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::Compute(format!("cannot write to stdout: {e}"))),
    }
}

fn render<T: Serialize>(records: &[T], format: Format) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for record in records {
                writer
                    .serialize(record)
                    .map_err(|e| Failure::Compute(format!("cannot serialize record: {e}")))?;
            }
            writer
                .into_inner()
                .map_err(|e| Failure::Compute(format!("cannot flush records: {e}")))
        }
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(records)
                .map_err(|e| Failure::Compute(format!("cannot serialize records: {e}")))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}
