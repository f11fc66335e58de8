//! Number formatting for CSV/JSON outputs: 9 significant digits.

/// `x` printed with 9 significant digits; scientific notation outside
/// `[1e-4, 1e9)`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs();
    if !(1e-4..1e9).contains(&mag) {
        return format!("{x:.8e}");
    }
    let exp10 = mag.log10().floor() as i32;
    let decimals = (8 - exp10).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // a carry can push e.g. 9.99999999995 up a decade; reformat from the rounded value
    let rounded: f64 = s.parse().expect("own output");
    let exp_after = rounded.abs().log10().floor() as i32;
    if exp_after != exp10 {
        let decimals = (8 - exp_after).max(0) as usize;
        return format!("{rounded:.decimals$}");
    }
    s
}

/// `x` rounded to 9 significant digits, for JSON emission.
pub fn round9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("own output")
}
