//! Plain-decimal number formatting for CSV output and state dumps.

/// Format with the given number of significant digits, plain decimal
/// notation, `.` separator. Zero prints as `0`; non-finite values print via
/// the std formatter.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}
