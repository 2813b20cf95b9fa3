//! Numeric output formatting pinned to nine significant digits so emitted
//! CSV/JSON files are byte-identical across platforms.

const SIG_DIGITS: usize = 9;

/// Formats with nine significant digits: fixed notation for exponents in
/// [-4, 8], scientific otherwise, trailing zeros trimmed (printf %g style).
pub fn fmt_sig9(x: f64) -> String {
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
    // decide notation from the exponent after rounding to 9 digits
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        let epos = sci.find('e').unwrap();
        let mantissa = trim_zeros(&sci[..epos]);
        format!("{}e{}", mantissa, &sci[epos + 1..])
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}
