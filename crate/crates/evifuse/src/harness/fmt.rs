//! Deterministic float formatting for report files: 9 significant digits,
//! trailing zeros trimmed, scientific notation outside the `%g` fixed range.

/// Formats with 9 significant digits, like `printf %.9g`.
pub fn g9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    // exponent of the value after rounding to 9 significant digits
    let sci = format!("{x:.8e}");
    let epos = sci.find('e').expect("scientific format");
    let exp: i32 = sci[epos + 1..].parse().expect("exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let mut out = format!("{x:.decimals$}");
        if out.contains('.') {
            while out.ends_with('0') {
                out.pop();
            }
            if out.ends_with('.') {
                out.pop();
            }
        }
        out
    } else {
        let mut mantissa = sci[..epos].to_string();
        if mantissa.contains('.') {
            while mantissa.ends_with('0') {
                mantissa.pop();
            }
            if mantissa.ends_with('.') {
                mantissa.pop();
            }
        }
        format!("{mantissa}e{exp}")
    }
}

#[cfg(test)]
mod tests {
    use super::g9;

    #[test]
    fn formats_nine_significant_digits() {
        assert_eq!(g9(0.0), "0");
        assert_eq!(g9(-0.0), "0");
        assert_eq!(g9(0.24), "0.24");
        assert_eq!(g9(0.5), "0.5");
        assert_eq!(g9(25.0 / 12.0), "2.08333333");
        assert_eq!(g9(0.48 / 1.1), "0.436363636");
        assert_eq!(g9(-1.5), "-1.5");
        assert_eq!(g9(123456789.123), "123456789");
        assert_eq!(g9(1e-12), "1e-12");
        assert_eq!(g9(2.5e14), "2.5e14");
        assert_eq!(g9(0.0001), "0.0001");
        assert_eq!(g9(0.00001), "1e-5");
        assert_eq!(g9(1.0), "1");
        assert_eq!(g9(999999999.5), "1e9");
    }

    #[test]
    fn output_is_stable() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, 533.0 / 840.0] {
            assert_eq!(g9(x), g9(x));
        }
    }
}
