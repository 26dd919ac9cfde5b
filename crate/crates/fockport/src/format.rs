//! Locale-free number formatting for CSV cells.

/// `x` with 12 significant digits in the shortest of fixed or exponent
/// notation, trailing zeros removed (C's `%.12g`). Non-finite values give an
/// empty string, which the CSV layer writes as an empty cell.
pub fn g12(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        let mant = trim(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
