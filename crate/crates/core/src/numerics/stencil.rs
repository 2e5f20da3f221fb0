//! Seven-point central difference stencils on uniformly spaced samples.

/// `f'(x_i)`; requires three samples on each side.
pub fn d1(f: &[f64], i: usize, h: f64) -> f64 {
    (-f[i - 3] + 9.0 * f[i - 2] - 45.0 * f[i - 1] + 45.0 * f[i + 1] - 9.0 * f[i + 2] + f[i + 3]) / (60.0 * h)
}

/// `f''(x_i)`
pub fn d2(f: &[f64], i: usize, h: f64) -> f64 {
    (2.0 * f[i - 3] - 27.0 * f[i - 2] + 270.0 * f[i - 1] - 490.0 * f[i] + 270.0 * f[i + 1] - 27.0 * f[i + 2]
        + 2.0 * f[i + 3])
        / (180.0 * h * h)
}

/// `f'''(x_i)`
pub fn d3(f: &[f64], i: usize, h: f64) -> f64 {
    (f[i - 3] - 8.0 * f[i - 2] + 13.0 * f[i - 1] - 13.0 * f[i + 1] + 8.0 * f[i + 2] - f[i + 3]) / (8.0 * h * h * h)
}

/// Derivative of order `k ≤ 3` at sample `i`.
pub fn derivative(f: &[f64], i: usize, h: f64, k: usize) -> f64 {
    match k {
        0 => f[i],
        1 => d1(f, i, h),
        2 => d2(f, i, h),
        3 => d3(f, i, h),
        _ => panic!("stencil of order {k} not available"),
    }
}
