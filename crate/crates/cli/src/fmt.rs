//! Compact `value(uncertainty)` notation for report fields.

/// Formats a value with its one-sigma uncertainty in parenthesis notation:
/// the uncertainty is rounded to one significant digit and the value to the
/// matching decimal place, e.g. `4.34 +/- 0.19` becomes `"4.3(2)"`.  A zero
/// or non-finite uncertainty yields the bare value.
pub fn compact_uncertain(value: f64, sigma: f64) -> String {
    if !value.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
        return format!("{value}");
    }
    let mut exp = sigma.log10().floor() as i32;
    let mut digit = (sigma / 10f64.powi(exp)).round() as i64;
    if digit == 10 {
        digit = 1;
        exp += 1;
    }
    if exp < 0 {
        let decimals = (-exp) as usize;
        format!("{value:.decimals$}({digit})")
    } else {
        let scale = 10f64.powi(exp);
        let rounded = (value / scale).round() * scale;
        format!("{rounded:.0}({})", digit * 10f64.powi(exp) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_one_significant_digit_of_sigma() {
        assert_eq!(compact_uncertain(4.34, 0.19), "4.3(2)");
        assert_eq!(compact_uncertain(0.0304, 0.0029), "0.030(3)");
        assert_eq!(compact_uncertain(219.0, 13.0), "220(10)");
        assert_eq!(compact_uncertain(1.5265, 0.0004), "1.5265(4)");
    }

    #[test]
    fn sigma_rounding_up_to_ten_promotes_the_place() {
        assert_eq!(compact_uncertain(1.234, 0.096), "1.2(1)");
    }

    #[test]
    fn degenerate_uncertainty_gives_the_bare_value() {
        assert_eq!(compact_uncertain(2.5, 0.0), "2.5");
        assert_eq!(compact_uncertain(2.5, f64::NAN), "2.5");
    }
}
