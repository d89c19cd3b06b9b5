//! Writers for JSON, CSV and SVG output. Every output carries the full
//! configuration so that a run can be repeated from its own output.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

fn write_bytes(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn json_doc(config: &Value, body: Value) -> Value {
    let mut doc = json!({ "schema": SCHEMA, "config": config });
    if let (Some(doc), Value::Object(body)) = (doc.as_object_mut(), body) {
        doc.extend(body);
    }
    doc
}

pub fn write_json(out: Option<&Path>, config: &Value, body: Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&json_doc(config, body))?;
    text.push('\n');
    write_bytes(out, text.as_bytes())
}

/// CSV with a `# config: {...}` first line. Rows must start with a
/// `schema` column.
pub fn write_csv<R: Serialize>(out: Option<&Path>, config: &Value, rows: &[R]) -> Result<()> {
    let mut buf = format!("# config: {}\n", serde_json::to_string(config)?).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    write_bytes(out, &buf)
}

pub fn write_svg(out: Option<&Path>, config: &Value, svg: &str) -> Result<()> {
    let comment = serde_json::to_string(config)?.replace("--", "-\\-");
    let text = svg.replacen('\n', &format!("\n<!-- config: {comment} -->\n"), 1);
    write_bytes(out, text.as_bytes())
}
