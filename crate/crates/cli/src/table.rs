//! Flat `path  value` rendering of a JSON document.

use serde_json::Value;

pub fn render(value: &Value) -> String {
    let mut rows = Vec::new();
    walk(value, String::new(), &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let pad = width - k.chars().count();
        out.push_str(&k);
        out.push_str(&" ".repeat(pad + 2));
        out.push_str(&v);
        out.push('\n');
    }
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn walk(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(x, p, rows);
            }
        }
        Value::Array(items) if items.iter().all(|x| scalar(x).is_some()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            rows.push((path, format!("[{}]", parts.join(", "))));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                walk(x, format!("{path}[{i}]"), rows);
            }
        }
        _ => rows.push((path, scalar(v).unwrap_or_default())),
    }
}
