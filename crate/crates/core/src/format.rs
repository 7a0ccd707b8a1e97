//! Fixed float formatting shared by the text and CSV outputs.

/// C-style `%.12e`: twelve mantissa digits, signed exponent of at least two digits.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

#[cfg(test)]
mod tests {
    use super::sci;

    #[test]
    fn matches_printf() {
        assert_eq!(sci(0.0), "0.000000000000e+00");
        assert_eq!(sci(1.5e-3), "1.500000000000e-03");
        assert_eq!(sci(-123456.0), "-1.234560000000e+05");
        assert_eq!(sci(2.5e200), "2.500000000000e+200");
    }
}
