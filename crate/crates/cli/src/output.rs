//! Rendering of results. Every format starts with the same header fields:
//! tool, version, command and seed. JSON is compact and key-ordered, so
//! identical inputs give byte-identical output.

use serde_json::{json, Value};

use crate::commands::Output;
use crate::Format;

fn header(command: &str, seed: u64) -> Value {
    json!({ "tool": "gmdisp", "version": env!("CARGO_PKG_VERSION"), "command": command, "seed": seed })
}

/// path,value rows for a JSON value, depth first, arrays by index.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<[String; 2]>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(prefix, k), x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&join(prefix, &i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push([prefix.to_string(), s.clone()]),
        other => out.push([prefix.to_string(), other.to_string()]),
    }
}

fn join(prefix: &str, k: &str) -> String {
    if prefix.is_empty() {
        k.to_string()
    } else {
        format!("{prefix}.{k}")
    }
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

pub fn render(command: &str, seed: u64, format: Format, out: &Output) -> String {
    match format {
        Format::Json => {
            let doc = json!({ "header": header(command, seed), "result": out.result });
            serde_json::to_string(&doc).expect("values serialise") + "\n"
        }
        Format::Pretty => {
            let doc = json!({ "header": header(command, seed), "result": out.result });
            serde_json::to_string_pretty(&doc).expect("values serialise") + "\n"
        }
        Format::Csv => {
            let head = format!("# gmdisp {} command={command} seed={seed}\n", env!("CARGO_PKG_VERSION"));
            let body = match &out.table {
                Some(t) => csv_text(&t.header, &t.rows),
                None => {
                    let mut rows = Vec::new();
                    flatten("", &out.result, &mut rows);
                    let rows: Vec<Vec<String>> = rows.into_iter().map(|r| r.to_vec()).collect();
                    csv_text(&["path".into(), "value".into()], &rows)
                }
            };
            head + &body
        }
    }
}
