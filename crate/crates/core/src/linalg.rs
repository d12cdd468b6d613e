//! Dense matrix helpers: exponential, principal logarithm, square root and a
//! few norms. Matrices here are at most a handful of rows, so everything is
//! plain `DMatrix<f64>`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Truncation threshold for the Taylor and inverse-hyperbolic-tangent series.
pub const SERIES_TOL: f64 = 1e-14;

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn norm1(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("matrix is singular".into()))
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let nrm = norm1(a);
    let mut squarings = 0u32;
    if nrm > 0.5 {
        squarings = (nrm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / 2f64.powi(squarings as i32);
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..64 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if max_abs(&term) <= SERIES_TOL * max_abs(&sum) * 1e-2 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrtm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let y_inv = inverse(&y)?;
        let z_inv = inverse(&z)?;
        let y_next = (&y + &z_inv) * 0.5;
        let z_next = (&z + &y_inv) * 0.5;
        let delta = max_abs_diff(&y_next, &y);
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * max_abs(&y).max(1.0) {
            return Ok(y);
        }
    }
    Err(Error::Domain(
        "square-root iteration did not converge".into(),
    ))
}

/// Rejects matrices with an eigenvalue on the closed negative real axis.
fn check_log_domain(a: &DMatrix<f64>) -> Result<()> {
    let eig = a.clone().complex_eigenvalues();
    let scale = max_abs(a).max(1.0);
    for lam in eig.iter() {
        if lam.im.abs() <= 1e-9 * scale && lam.re <= 1e-12 * scale {
            return Err(Error::Domain(format!(
                "eigenvalue {:.6e}{:+.6e}i lies on the closed negative real axis; \
                 no principal logarithm",
                lam.re, lam.im
            )));
        }
    }
    Ok(())
}

/// Principal matrix logarithm by inverse scaling and squaring.
pub fn logm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_log_domain(a)?;
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut x = a.clone();
    let mut roots = 0u32;
    while norm1(&(&x - &id)) > 0.25 {
        if roots > 60 {
            return Err(Error::Domain("logarithm scaling did not converge".into()));
        }
        x = sqrtm(&x)?;
        roots += 1;
    }
    // log X = 2 atanh(Z), Z = (X - I)(X + I)^{-1}
    let z = (&x - &id) * inverse(&(&x + &id))?;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = z.clone();
    for k in 1..200 {
        term = &term * &z2;
        let contrib = &term / (2 * k + 1) as f64;
        sum += &contrib;
        if max_abs(&contrib) <= SERIES_TOL * 1e-2 * max_abs(&sum).max(1e-300) {
            break;
        }
    }
    Ok(sum * (2.0 * 2f64.powi(roots as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert_eq!(expm(&z), DMatrix::identity(3, 3));
    }

    #[test]
    fn exp_of_rotation_generator() {
        let t = 2.5_f64;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a);
        let expected = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!(max_abs_diff(&e, &expected) < 1e-14);
    }

    #[test]
    fn log_inverts_exp_near_pi() {
        let t = 3.0_f64;
        let a = DMatrix::from_row_slice(3, 3, &[0.0, -t, 0.0, t, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let l = logm(&expm(&a)).unwrap();
        assert!(max_abs_diff(&l, &a) < 1e-12);
    }

    #[test]
    fn log_of_unipotent_is_exact_series() {
        let g = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 5.0, 0.0, 1.0, 3.0, 0.0, 0.0, 1.0]);
        let l = logm(&g).unwrap();
        // log(I + N) = N - N^2/2 for N^3 = 0
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 2.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]);
        assert!(max_abs_diff(&l, &expected) < 1e-13);
    }

    #[test]
    fn log_rejects_negative_eigenvalue() {
        let g = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(logm(&g), Err(Error::Domain(_))));
    }
}
