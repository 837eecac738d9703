use crate::field::ScalarField;

/// Piecewise-smooth synthetic test image with values in `[0.1, 0.9]`:
/// a dark background with a vertical ramp, a bright disc, and a mid-grey
/// rectangle partially overlapping it.
pub fn phantom(rows: usize, cols: usize) -> ScalarField {
    ScalarField::from_fn(rows, cols, |(i, j)| {
        let y = (i as f64 + 0.5) / rows as f64;
        let x = (j as f64 + 0.5) / cols as f64;
        let mut v = 0.1 + 0.15 * y;
        if (x - 0.4).powi(2) + (y - 0.45).powi(2) < 0.22f64.powi(2) {
            v = 0.9;
        }
        if (0.55..0.85).contains(&x) && (0.2..0.75).contains(&y) {
            v = if v > 0.8 { 0.7 } else { 0.5 };
        }
        v
    })
}
