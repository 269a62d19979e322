//! Number formatting shared by every command.

use serde::Serialize;
use serde_json::Value;

/// Text rendering: the leading digit and 15 more, fixed-point for moderate
/// magnitudes and scientific otherwise.
pub fn num(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return format!("{:.15}", 0.0);
    }
    let e = v.abs().log10().floor() as i32;
    if (-4..15).contains(&e) {
        format!("{:.*}", (15 - e) as usize, v)
    } else {
        format!("{v:.15e}")
    }
}

/// `v` rounded to 15 significant digits.
pub fn round15(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round15(n.as_f64().expect("f64 number"));
            if let Some(m) = serde_json::Number::from_f64(r) {
                *n = m;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 15 significant digits.
pub fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// CSV with a header row; floats go through [`num`].
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = ::csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_digits() {
        assert_eq!(num(2.0), "2.000000000000000");
        assert_eq!(num(64.14415), "64.14415000000000");
        assert_eq!(num(0.25), "0.2500000000000000");
        assert_eq!(num(1e-7), "1.000000000000000e-7");
        assert_eq!(num(f64::INFINITY), "inf");
    }

    #[test]
    fn json_rounding() {
        assert_eq!(round15(2.0000000000000004), 2.0);
        assert_eq!(round15(0.1 + 0.2), 0.3);
    }
}
