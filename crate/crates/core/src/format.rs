//! Number formatting shared by curve files and the command line.

use std::fmt::Write;

/// Significant digits for `.dat` output.
pub const DAT_DIGITS: usize = 6;
/// Significant digits for CSV and JSON output; enough to round-trip an f64.
pub const FULL_DIGITS: usize = 17;

/// Format like C's `%.{digits}g`: shortest of fixed or exponent notation,
/// trailing zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round half-up to two decimals. The small epsilon keeps values such as
/// 3.125 that are stored just below the midpoint from rounding down.
pub fn round2(x: f64) -> f64 {
    ((x * 100.0) + 0.5 + 1e-9).floor() / 100.0
}

pub fn fmt2(x: f64) -> String {
    if x.is_infinite() {
        return sig(x, 1);
    }
    format!("{:.2}", round2(x))
}

pub fn write_dat_rows<R: AsRef<[f64]>>(rows: impl IntoIterator<Item = R>) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|&v| sig(v, DAT_DIGITS)).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    out
}

pub fn write_csv_rows<R: AsRef<[f64]>>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut out = String::new();
    writeln!(out, "{}", header.join(",")).unwrap();
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|&v| sig(v, FULL_DIGITS)).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig(0.3125, 6), "0.3125");
        assert_eq!(sig(0.8, 17), "0.80000000000000004");
        assert_eq!(sig(1.0 / 3.0, 6), "0.333333");
        assert_eq!(sig(123456789.0, 6), "1.23457e+08");
        assert_eq!(sig(0.00001234, 6), "1.234e-05");
        assert_eq!(sig(0.0001234, 6), "0.0001234");
        assert_eq!(sig(999999.5, 6), "1e+06");
        assert_eq!(sig(-2.5, 6), "-2.5");
        assert_eq!(sig(100.0, 6), "100");
    }

    #[test]
    fn half_up_rounding() {
        assert_eq!(fmt2(3.125), "3.13");
        assert_eq!(fmt2(5.625), "5.63");
        assert_eq!(fmt2(4.7222), "4.72");
        assert_eq!(fmt2(0.0), "0.00");
    }
}
