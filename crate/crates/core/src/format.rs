//! Text output shared by reports and scans: C-style `%.17g` numbers and CSV bodies.

use crate::lemmafn::ScanCell;

/// Formats `v` like C's `printf("%.17g", v)`, which round-trips every `f64`.
pub fn fmt_g17(v: f64) -> String {
    const P: i32 = 17;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // The exponent after rounding to P significant digits decides the style.
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header of scan CSV files.
pub const SCAN_CSV_HEADER: &str = "q,s,x,y,value,in_domain";

/// Scan cells as CSV, one row per cell in the given order.
pub fn scan_csv(cells: &[ScanCell]) -> String {
    let mut out = String::from(SCAN_CSV_HEADER);
    out.push('\n');
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_g17(c.q),
            fmt_g17(c.s),
            fmt_g17(c.x),
            fmt_g17(c.y),
            fmt_g17(c.value),
            c.in_domain
        ));
    }
    out
}
