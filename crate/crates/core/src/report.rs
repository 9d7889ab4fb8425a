//! Deterministic report assembly for the command-line front end.
//!
//! Every command renders its result through the builders here so that
//! identical invocations produce byte-identical output. JSON objects are
//! assembled by hand with a fixed field order and [`crate::io::fmt_float`]
//! for every float (17 significant digits, non-finite values become
//! `null`); CSV tables quote fields only when they contain a delimiter,
//! quote, or newline, and always end each row with `\n`.
//!
//! JSON carries the full structured report, nested matrices included. CSV
//! is the plotting format: a single flat table per command, either
//! `key,value` rows for scalar reports or a natural table (measurement
//! records, walk steps, suite checks) where one exists. Matrices are never
//! rendered to CSV.

use crate::io::fmt_float;

/// Incremental JSON object writer with caller-controlled field order.
///
/// Values are appended as already-serialized fragments by the typed
/// methods; `finish` closes the object. The builder never reorders or
/// deduplicates keys, so the byte layout is exactly the call sequence.
#[derive(Debug)]
pub struct JsonObject {
    buf: String,
    empty: bool,
}

impl JsonObject {
    pub fn new() -> Self {
        Self {
            buf: String::from("{"),
            empty: true,
        }
    }

    fn key(&mut self, key: &str) {
        if !self.empty {
            self.buf.push(',');
        }
        self.empty = false;
        self.buf.push('"');
        self.buf.push_str(key);
        self.buf.push_str("\":");
    }

    /// Append a pre-serialized JSON fragment (a nested object or array).
    pub fn raw(mut self, key: &str, fragment: &str) -> Self {
        self.key(key);
        self.buf.push_str(fragment);
        self
    }

    pub fn float(self, key: &str, value: f64) -> Self {
        let text = fmt_float(value);
        self.raw(key, &text)
    }

    /// A float that may legitimately be absent; `None` renders as `null`.
    pub fn opt_float(self, key: &str, value: Option<f64>) -> Self {
        match value {
            Some(v) => self.float(key, v),
            None => self.raw(key, "null"),
        }
    }

    pub fn uint(self, key: &str, value: u64) -> Self {
        let text = value.to_string();
        self.raw(key, &text)
    }

    pub fn opt_uint(self, key: &str, value: Option<u64>) -> Self {
        match value {
            Some(v) => self.uint(key, v),
            None => self.raw(key, "null"),
        }
    }

    pub fn boolean(self, key: &str, value: bool) -> Self {
        self.raw(key, if value { "true" } else { "false" })
    }

    pub fn string(self, key: &str, value: &str) -> Self {
        let text = json_string(value);
        self.raw(key, &text)
    }

    pub fn opt_string(self, key: &str, value: Option<&str>) -> Self {
        match value {
            Some(v) => self.string(key, v),
            None => self.raw(key, "null"),
        }
    }

    pub fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}

impl Default for JsonObject {
    fn default() -> Self {
        Self::new()
    }
}

/// Serialize a string as a JSON literal, escaping quotes, backslashes, and
/// control characters.
pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Join pre-serialized fragments into a JSON array.
pub fn json_array<I>(items: I) -> String
where
    I: IntoIterator,
    I::Item: AsRef<str>,
{
    let mut out = String::from("[");
    for (k, item) in items.into_iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(item.as_ref());
    }
    out.push(']');
    out
}

/// JSON array of unsigned integers.
pub fn json_uints(xs: &[usize]) -> String {
    json_array(xs.iter().map(|x| x.to_string()))
}

/// JSON array of floats through [`fmt_float`]; non-finite entries become
/// `null`, which keeps infinite z-scores representable.
pub fn json_floats(xs: &[f64]) -> String {
    json_array(xs.iter().map(|&x| fmt_float(x)))
}

/// Quote a CSV field if it contains a comma, quote, or line break;
/// embedded quotes are doubled.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Assemble a CSV table: a header row followed by data rows, every field
/// quoted on demand, rows terminated with `\n`.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(
        &header
            .iter()
            .map(|h| csv_field(h))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in rows {
        out.push_str(
            &row.iter()
                .map(|f| csv_field(f))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
    }
    out
}

/// `key,value` table for scalar reports. Values arrive pre-rendered
/// (floats through [`fmt_float`], booleans as `true`/`false`).
pub fn csv_pairs(pairs: &[(&str, String)]) -> String {
    let rows: Vec<Vec<String>> = pairs
        .iter()
        .map(|(k, v)| vec![(*k).to_string(), v.clone()])
        .collect();
    csv_table(&["key", "value"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn object_layout_is_the_call_sequence() {
        let obj = JsonObject::new()
            .string("kind", "demo")
            .float("x", 0.5)
            .opt_float("y", None)
            .uint("n", 3)
            .boolean("ok", true)
            .raw("inner", "[1,2]")
            .finish();
        assert_eq!(
            obj,
            "{\"kind\":\"demo\",\"x\":5.0000000000000000e-1,\"y\":null,\
             \"n\":3,\"ok\":true,\"inner\":[1,2]}"
        );
    }

    #[test]
    fn strings_are_escaped_and_non_finite_floats_become_null() {
        assert_eq!(json_string("a\"b\\c\nd"), "\"a\\\"b\\\\c\\nd\"");
        assert_eq!(json_string("\u{1}"), "\"\\u0001\"");
        let obj = JsonObject::new().float("z", f64::INFINITY).finish();
        assert_eq!(obj, "{\"z\":null}");
        assert_eq!(json_floats(&[1.0, f64::NEG_INFINITY]), "[1.0000000000000000e0,null]");
    }

    #[test]
    fn csv_quotes_only_when_needed() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        let table = csv_table(
            &["key", "value"],
            &[vec!["n".into(), "3".into()], vec!["d,etail".into(), "x".into()]],
        );
        assert_eq!(table, "key,value\nn,3\n\"d,etail\",x\n");
    }

    #[test]
    fn empty_object_and_array_render_bare() {
        assert_eq!(JsonObject::new().finish(), "{}");
        assert_eq!(json_array(Vec::<String>::new()), "[]");
        assert_eq!(json_uints(&[2, 0, 1]), "[2,0,1]");
    }
}
