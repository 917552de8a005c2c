//! CSV and JSON serialization, and atomic file output.

use std::io::Write;
use std::path::Path;

use crate::args::Format;
use crate::eval::Record;

pub const CSV_HEADER: &str =
    "channel,fixed_name,fixed_value,swept_name,swept_value,ns,method,value,opt_M,opt_c,opt_k,opt_N,opt_K,flags";

/// Twelve significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn csv_row(r: &Record) -> String {
    [
        r.channel.to_string(),
        r.fixed_name.unwrap_or("").to_string(),
        opt(r.fixed_value, num),
        r.swept_name.to_string(),
        num(r.swept_value),
        opt(r.ns, num),
        r.method.to_string(),
        num(r.value),
        opt(r.opt_m, |m| m.to_string()),
        opt(r.opt_c, num),
        opt(r.opt_k, |k| k.to_string()),
        opt(r.opt_n, |n| n.to_string()),
        opt(r.opt_rails, |k| k.to_string()),
        r.flags.join(";"),
    ]
    .join(",")
}

pub fn render(rows: &[Record], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in rows {
                s.push_str(&csv_row(r));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).expect("records serialize");
            s.push('\n');
            s
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
