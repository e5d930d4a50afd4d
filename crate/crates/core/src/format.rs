//! Shared text formatting for the CSV and model/dataset files.

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn join17(values: &[f64], sep: &str) -> String {
    values.iter().map(|v| fmt17(*v)).collect::<Vec<_>>().join(sep)
}
