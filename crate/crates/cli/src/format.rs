//! Locale-independent fixed-precision number formatting shared by every
//! exporter.

/// dB values: 4 decimal places.
pub fn db(x: f64) -> String {
    format!("{x:.4}")
}

/// Distances and heights: 3 decimal places.
pub fn meters(x: f64) -> String {
    format!("{x:.3}")
}

/// Frequencies in GHz: 4 decimal places.
pub fn ghz(x: f64) -> String {
    format!("{x:.4}")
}

/// Dimensionless model coefficients.
pub fn coefficient(x: f64) -> String {
    format!("{x:.6}")
}

pub fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width() {
        assert_eq!(db(135.10596), "135.1060");
        assert_eq!(meters(10.0), "10.000");
        assert_eq!(ghz(28.0), "28.0000");
        assert_eq!(db(-0.00001), "-0.0000");
        assert_eq!(round_to(1.23456, 3), 1.235);
    }
}
