//! Small deterministic serialization helpers shared by the report types.
//!
//! Reports are hand-assembled rather than derived so that the byte layout is
//! fully pinned down: fixed key order, fixed numeric formatting (17
//! significant digits for binary64, the full digit count in extended mode).

use crate::real::Real;

/// JSON string escaping for the few free-text fields (function descriptions,
/// error messages).
pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn f64_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn f64_array(vals: &[f64]) -> String {
    let parts: Vec<String> = vals.iter().map(|&v| f64_num(v)).collect();
    format!("[{}]", parts.join(","))
}

/// `[[a,b],…]` for atom lists and similar pair data.
pub(crate) fn pair_array<R: Real>(pairs: &[(R, R)]) -> String {
    let parts: Vec<String> = pairs
        .iter()
        .map(|(a, b)| format!("[{},{}]", a.fmt_sci(), b.fmt_sci()))
        .collect();
    format!("[{}]", parts.join(","))
}
