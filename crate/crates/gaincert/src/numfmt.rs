//! Stable text formatting for numeric output.

/// Format with 17 significant digits, enough to reconstruct the exact f64
/// bits after parsing in any language.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen reference values keep all 17 digits
mod tests {
    use super::sig17;

    #[test]
    fn round_trips_exactly() {
        for &x in &[
            9.7119144780585056_f64,
            -5.640624556737594,
            0.0,
            -0.0,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            1e300,
        ] {
            let parsed: f64 = sig17(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "{x} -> {}", sig17(x));
        }
    }
}
