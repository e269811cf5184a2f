//! Roots of unity and small complex-vector helpers.
//!
//! Inner products conjugate the LEFT argument throughout the crate.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// exp(2 pi i e / n). The exponent is reduced mod n first so large
/// exponents lose no precision.
pub fn omega(n: i64, e: i64) -> Result<Complex64> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!(
            "root-of-unity order must be positive, got {n}"
        )));
    }
    let e = e.rem_euclid(n);
    let theta = 2.0 * std::f64::consts::PI * e as f64 / n as f64;
    Ok(Complex64::new(theta.cos(), theta.sin()))
}

/// Lookup table of the n-th roots of unity: `table[e] = omega(n, e)`.
pub fn omega_table(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|e| omega(n as i64, e as i64).expect("n >= 1"))
        .collect()
}

/// <a|b> with the left argument conjugated.
pub fn inner_product_slices(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
}

pub fn norm_sq(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_roots() {
        let m1 = omega(2, 1).unwrap();
        assert_abs_diff_eq!(m1.re, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m1.im, 0.0, epsilon = 1e-14);
        let i = omega(4, 1).unwrap();
        assert_abs_diff_eq!(i.re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(i.im, 1.0, epsilon = 1e-14);
        for n in 1..=8 {
            let one = omega(n, 0).unwrap();
            assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(one.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_nonpositive_order() {
        assert!(omega(0, 1).is_err());
        assert!(omega(-3, 1).is_err());
    }

    #[test]
    fn unit_modulus_and_periodicity() {
        for n in 1..=64i64 {
            for e in -2 * n..2 * n {
                let w = omega(n, e).unwrap();
                assert_abs_diff_eq!(w.norm(), 1.0, epsilon = 1e-14);
                let w2 = omega(n, e + n).unwrap();
                assert!((w - w2).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn inner_product_conjugates_left() {
        let a = vec![Complex64::new(0.0, 1.0)];
        let b = vec![Complex64::new(0.0, 1.0)];
        let ip = inner_product_slices(&a, &b).unwrap();
        assert_abs_diff_eq!(ip.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ip.im, 0.0, epsilon = 1e-15);
    }
}
