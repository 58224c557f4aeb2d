//! Small dense spectral helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen, SVD};

use crate::error::{Error, Result};

const MAX_ITERS: usize = 10_000;

/// Singular values in non-increasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, MAX_ITERS)
        .ok_or(Error::EigenNonConvergence)?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// `sigma_min / sigma_max`, with 0 for the zero matrix.
pub fn singular_ratio(sv: &[f64]) -> f64 {
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => min / max,
        _ => 0.0,
    }
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_ITERS)
        .ok_or(Error::EigenNonConvergence)?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Eigenvalues of a general real matrix, sorted by real then imaginary part.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    // The QR iteration can stall at machine-epsilon deflation on clustered
    // spectra; a looser deflation threshold still gives eigenvalues far
    // below the classification tolerances.
    let schur = [f64::EPSILON, 1e-14, 1e-12]
        .iter()
        .find_map(|&eps| Schur::try_new(m.clone(), eps, MAX_ITERS))
        .ok_or(Error::EigenNonConvergence)?;
    let mut v: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(v)
}

/// Solve `a x = b` by LU with partial pivoting.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.clone().lu().solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectra_of_small_matrices() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let ev = eigenvalues(&a).unwrap();
        assert!((ev[0].re - 1.0).abs() < 1e-14 && (ev[1].re - 3.0).abs() < 1e-14);
        assert_eq!(symmetric_eigenvalues(&a).unwrap().len(), 2);
        let sv = singular_values(&a).unwrap();
        assert!(sv[0] >= sv[1]);
        assert!((singular_ratio(&sv) - 1.0 / 3.0).abs() < 1e-14);

        // rotation generator: purely imaginary pair
        let r = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let ev = eigenvalues(&r).unwrap();
        assert!(ev.iter().all(|z| z.re.abs() < 1e-14 && (z.im.abs() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn singular_matrix_ratio_is_zero() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(singular_ratio(&singular_values(&a).unwrap()) <= 1e-15);
        assert_eq!(singular_ratio(&singular_values(&DMatrix::zeros(2, 2)).unwrap()), 0.0);
    }
}
