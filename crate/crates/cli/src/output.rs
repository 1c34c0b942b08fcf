use std::io::Write;
use std::path::Path;

use crate::Exit;

/// Refuses to clobber `out` without `--force`. Runs before any simulation.
pub fn check_target(out: Option<&Path>, force: bool) -> Result<(), Exit> {
    match out {
        Some(path) if path.exists() && !force => Err(Exit::Usage(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        ))),
        _ => Ok(()),
    }
}

/// Writes `text` to `out`, or to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Exit> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Exit::Failed(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Exit::Failed(format!("cannot write stdout: {e}")))
        }
    }
}

pub fn json<T: serde::Serialize>(value: &T) -> Result<String, Exit> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Exit::Failed(format!("json: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// CSV text from a header and rows of already formatted fields.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, Exit> {
    let err = |e: csv::Error| Exit::Failed(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Exit::Failed(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Exit::Failed(format!("csv: {e}")))
}
