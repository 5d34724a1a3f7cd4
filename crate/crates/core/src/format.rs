//! Text encoding shared by every exported file.

/// Formats a float in positional decimal notation with 17 significant digits,
/// enough to round-trip any `f64`. Magnitudes outside `[1e-5, 1e17)` fall back
/// to scientific notation with the same precision.
pub fn decimal17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Let the scientific formatter do the rounding, then read off the exponent,
    // which avoids off-by-one errors from log10 near powers of ten.
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let decimals = (16 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

pub fn label(y: i8) -> &'static str {
    if y > 0 {
        "1"
    } else {
        "-1"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(decimal17(0.0), "0");
        assert_eq!(decimal17(0.4), "0.40000000000000002");
        assert_eq!(decimal17(1.0), "1.0000000000000000");
        assert_eq!(decimal17(-2.5), "-2.5000000000000000");
        assert_eq!(decimal17(9.999999999999999), "9.9999999999999982");
        assert_eq!(decimal17(1e-7), "9.9999999999999995e-8");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = decimal17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
