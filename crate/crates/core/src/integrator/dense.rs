use num_complex::Complex64;

/// Cubic Hermite interpolant through (t0, y0, f0) and (t1, y1, f1), evaluated at t.
pub fn hermite(
    t0: f64,
    y0: &[Complex64],
    f0: &[Complex64],
    t1: f64,
    y1: &[Complex64],
    f1: &[Complex64],
    t: f64,
) -> Vec<Complex64> {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    (0..y0.len())
        .map(|i| y0[i] * h00 + f0[i] * (h10 * h) + y1[i] * h01 + f1[i] * (h11 * h))
        .collect()
}
