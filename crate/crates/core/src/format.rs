//! Six-decimal formatting used by every text report.

use crate::model::JointTable;

/// Formats with six decimals. Rust rounds the exact binary value, so true
/// decimal ties (e.g. `0.0078125`) resolve half-to-even.
pub fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    // avoid "-0.000000" for tiny negative round-off
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// `[p0, p1, ...]` with six decimals per entry.
pub fn fixed6_list(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| fixed6(v)).collect();
    format!("[{}]", items.join(", "))
}

pub fn table_list(t: &JointTable) -> String {
    fixed6_list(t.probs())
}
