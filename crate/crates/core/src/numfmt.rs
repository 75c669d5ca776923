//! Fixed-significance number formatting for JSON and CSV output.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Digits used for every real written to JSON.
pub const JSON_DIGITS: usize = 17;
/// Digits used for every real written to CSV.
pub const CSV_DIGITS: usize = 9;

/// Formats `x` in scientific notation with `digits` significant digits.
pub fn sci(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), x)
}

fn raw<S: Serializer>(x: f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(sci(x, JSON_DIGITS)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    raw(*x, s)
}

struct Real(f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        raw(self.0, s)
    }
}

pub fn reals<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&x| Real(x)))
}

pub fn real_rows<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(
        rows.iter()
            .map(|r| r.iter().map(|&x| Real(x)).collect::<Vec<_>>()),
    )
}
