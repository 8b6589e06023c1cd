use num_complex::Complex64;

/// `∏_{i<j} (x_i − x_j)`; the empty product is 1.
pub fn vandermonde(xs: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            acc *= xs[i] - xs[j];
        }
    }
    acc
}

pub fn vandermonde_real(xs: &[f64]) -> f64 {
    let mut acc = 1.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            acc *= xs[i] - xs[j];
        }
    }
    acc
}

/// Binomial coefficient as a float; exact while it fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Physicists' Hermite polynomial by the three-term recurrence. Intended for `n <= 200`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for m in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * m as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}
