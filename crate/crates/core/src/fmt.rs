//! Float formatting shared by the file formats: fixed 17 significant digits,
//! enough to round-trip any `f64` exactly and stable across runs.

/// Format with 17 significant digits (scientific notation).
pub fn float17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::float17;

    #[test]
    fn round_trips_exactly() {
        for v in [
            0.1,
            -3.303777420429496e-3,
            2.877172153683009,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            1e300,
        ] {
            let text = float17(v);
            assert_eq!(text.parse::<f64>().unwrap(), v, "{text}");
        }
    }

    #[test]
    fn fixed_width_significand() {
        assert_eq!(float17(1.0), "1.0000000000000000e0");
        assert_eq!(float17(0.5), "5.0000000000000000e-1");
    }
}
