//! In-place radix-2 FFT for the pointer grid.

use num_complex::Complex64;

/// Forward transform `X_k = Σ_n x_n e^{-2πi kn/N}` (`inverse = false`) or the
/// unnormalized inverse (`inverse = true`). `data.len()` must be a power of two.
pub(crate) fn fft(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let angle = sign * 2.0 * core::f64::consts::PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let a = angle * k as f64;
                let w = Complex64::new(libm::cos(a), libm::sin(a));
                let u = data[start + k];
                let t = data[start + k + len / 2] * w;
                data[start + k] = u + t;
                data[start + k + len / 2] = u - t;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn matches_direct_dft() {
        let n = 16;
        let x: Vec<Complex64> =
            (0..n).map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos())).collect();
        let mut y = x.clone();
        fft(&mut y, false);
        for (k, yk) in y.iter().enumerate() {
            let direct: Complex64 = (0..n)
                .map(|j| {
                    let a = -2.0 * core::f64::consts::PI * (k * j) as f64 / n as f64;
                    x[j] * Complex64::new(a.cos(), a.sin())
                })
                .sum();
            assert!((direct - yk).norm() < 1e-12);
        }
        fft(&mut y, true);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b / n as f64).norm() < 1e-14);
        }
    }
}
