//! Deterministic number formatting for every written artifact.

/// Significant digits kept in output files.
pub const SIGNIFICANT_DIGITS: usize = 10;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("scientific notation parses")
}

/// Shortest decimal text of the rounded value; `-0` prints as `0`.
pub fn num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

/// JSON number for the rounded value; non-finite values become `null`.
pub fn json_num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(round_sig(x)).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

pub fn json_nums(xs: &[f64]) -> serde_json::Value {
    serde_json::Value::Array(xs.iter().map(|x| json_num(*x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(num(0.1 + 0.2), "0.3");
        assert_eq!(num(1.0 / 3.0), "0.3333333333");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(100.0), "100");
        assert_eq!(num(123456789012.0), "123456789000");
        assert_eq!(num(f64::NAN), "NaN");
        assert_eq!(json_num(f64::INFINITY), serde_json::Value::Null);
    }

    #[test]
    fn idempotent() {
        for x in [0.0695, 1e-17, 2.0f64.sqrt(), -7.5e12] {
            assert_eq!(round_sig(round_sig(x)), round_sig(x));
        }
    }
}
