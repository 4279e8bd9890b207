//! CSV and JSON serialisation of command results.
//!
//! Floats are written in their shortest round-trip decimal form, switching
//! to exponent notation for very small or very large magnitudes, so parsing
//! an output file recovers the exact doubles.

use serde::Serialize;

/// Shortest decimal that parses back to `v`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Quotes a CSV field when it holds a delimiter, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header plus rows, LF line endings.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Envelope<'a, P: Serialize, R: Serialize, S: Serialize> {
    schema_version: u32,
    params: &'a P,
    rows: &'a [R],
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<&'a S>,
}

/// `{"schema_version": 1, "params": .., "rows": [..], "summary": ..}` with
/// keys in declaration order.
pub fn json<P: Serialize, R: Serialize, S: Serialize>(params: &P, rows: &[R], summary: Option<&S>) -> String {
    let env = Envelope { schema_version: 1, params, rows, summary };
    let mut out = serde_json::to_string_pretty(&env).expect("in-memory JSON serialisation cannot fail");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1e-30), "1e-30");
        assert_eq!(fmt_f64(0.000625), "0.000625");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        for v in [0.1 + 0.2, 1.0 / 3.0, 2.2250738585072014e-308, 123456789.123, 7.5e-6, 3e20] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["k", "probability"], [vec!["0".into(), "0.5".into()], vec!["1".into(), "0.5".into()]]);
        assert_eq!(s, "k,probability\n0,0.5\n1,0.5\n");
        assert_eq!(csv_field("a, b"), "\"a, b\"");
        assert_eq!(csv_field("x"), "x");
    }
}
