//! Dense Hermitian helpers on top of faer.

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Eigenvalues below this magnitude on the negative side are treated as
/// round-off and clipped to zero.
pub const PSD_CLIP: f64 = 1e-10;

/// Eigenvalues of a density matrix with magnitude at most this are round-off
/// in a numerically null direction and are set to exactly zero.
pub const NULL_FLOOR: f64 = 1e-14;

/// Full spectral decomposition with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Column `n` is the eigenvector of `values[n]`.
    pub vectors: Mat<c64>,
}

pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut out = 0.0f64;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            out = out.max(m[(r, c)].norm());
        }
    }
    out
}

/// Largest `|m_rc − conj(m_cr)|`.
pub fn hermiticity_defect(m: MatRef<'_, c64>) -> f64 {
    let mut out = 0.0f64;
    for c in 0..m.ncols() {
        for r in 0..=c.min(m.nrows().saturating_sub(1)) {
            out = out.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    out
}

pub fn check_hermitian(m: MatRef<'_, c64>, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    let defect = hermiticity_defect(m);
    if defect > tol {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

fn is_real(m: MatRef<'_, c64>) -> bool {
    (0..m.ncols()).all(|c| (0..m.nrows()).all(|r| m[(r, c)].im == 0.0))
}

/// Spectral decomposition of a real symmetric matrix, lifted to complex
/// storage.
pub fn real_symmetric_eigen(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..m.nrows()).map(|i| s[i]).collect();
    Ok((values, evd.U().to_owned()))
}

/// Hermitian eigensolver. Real input takes the real symmetric path.
pub fn hermitian_eigen(m: MatRef<'_, c64>) -> Result<Eigen> {
    let tol = 1e-12 * max_abs(m).max(1.0);
    check_hermitian(m, tol)?;
    let n = m.nrows();
    if is_real(m) {
        let re = Mat::<f64>::from_fn(n, n, |r, c| m[(r, c)].re);
        let (values, u) = real_symmetric_eigen(&re)?;
        let vectors = Mat::<c64>::from_fn(n, n, |r, c| c64::new(u[(r, c)], 0.0));
        return Ok(Eigen { values, vectors });
    }
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..n).map(|i| s[i].re).collect();
    Ok(Eigen { values, vectors: evd.U().to_owned() })
}

/// Rotates each column so its largest-magnitude entry (first one on ties) is
/// real and positive.
pub fn fix_phases(vectors: &mut Mat<c64>) {
    for c in 0..vectors.ncols() {
        let mut best = 0;
        let mut best_norm = -1.0;
        for r in 0..vectors.nrows() {
            let v = vectors[(r, c)].norm();
            if v > best_norm * (1.0 + 1e-12) {
                best = r;
                best_norm = v;
            }
        }
        if best_norm <= 0.0 {
            continue;
        }
        let z = vectors[(best, c)];
        let phase = (z / z.norm()).conj();
        for r in 0..vectors.nrows() {
            vectors[(r, c)] *= phase;
        }
    }
}

/// Spectrum of a density matrix with the clipping rule applied: eigenvalues in
/// `[−PSD_CLIP, NULL_FLOOR]` become zero and the spectrum is renormalized to
/// unit sum.
pub fn clipped_density_spectrum(rho: MatRef<'_, c64>) -> Result<Eigen> {
    let mut eig = hermitian_eigen(rho)?;
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_CLIP {
        return Err(Error::NotPsd(min));
    }
    for v in &mut eig.values {
        if *v <= NULL_FLOOR {
            *v = 0.0;
        }
    }
    let sum: f64 = eig.values.iter().sum();
    if sum <= 0.0 {
        return Err(Error::NumericalConsistency("density matrix with zero trace".into()));
    }
    for v in &mut eig.values {
        *v /= sum;
    }
    Ok(eig)
}

/// `U f(Λ) U†`.
pub fn spectral_function(eig: &Eigen, f: impl Fn(f64) -> f64) -> Mat<c64> {
    let n = eig.values.len();
    let fv: Vec<f64> = eig.values.iter().map(|&x| f(x)).collect();
    let u = &eig.vectors;
    Mat::<c64>::from_fn(n, n, |r, c| {
        let mut acc = c64::new(0.0, 0.0);
        for k in 0..n {
            if fv[k] != 0.0 {
                acc += u[(r, k)] * u[(c, k)].conj() * fv[k];
            }
        }
        acc
    })
}

/// Principal square root of a density matrix via the clipped spectrum.
pub fn density_sqrt(rho: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let eig = clipped_density_spectrum(rho)?;
    Ok(spectral_function(&eig, f64::sqrt))
}

pub fn trace(m: MatRef<'_, c64>) -> c64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Symmetrizes `(m + m†) / 2`.
pub fn hermitian_part(m: MatRef<'_, c64>) -> Mat<c64> {
    let n = m.nrows();
    Mat::<c64>::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Mat<c64> {
        Mat::<c64>::from_fn(rows.len(), rows[0].len(), |r, c| c64::new(rows[r][c], 0.0))
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let e = hermitian_eigen(m(&[&[0.0, 1.0], &[1.0, 0.0]]).as_ref()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_eigenvalues() {
        let id = Mat::<c64>::identity(12, 12);
        let e = hermitian_eigen(id.as_ref()).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = m(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eigen(a.as_ref()), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn complex_residuals_are_small() {
        let n = 9;
        let a = Mat::<c64>::from_fn(n, n, |r, c| {
            let x = ((r * 31 + c * 17) % 11) as f64 - 5.0;
            let y = ((r * 7 + c * 3) % 5) as f64 - 2.0;
            if r == c {
                c64::new(x, 0.0)
            } else if r < c {
                c64::new(x, y)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        let h = Mat::<c64>::from_fn(n, n, |r, c| if r <= c { a[(r, c)] } else { a[(c, r)].conj() });
        let e = hermitian_eigen(h.as_ref()).unwrap();
        let norm = max_abs(h.as_ref()) * n as f64;
        for k in 0..n {
            let v = e.vectors.col(k);
            let hv = &h * v;
            for r in 0..n {
                assert!((hv[r] - v[r] * e.values[k]).norm() <= 1e-10 * norm);
            }
        }
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn clipping_rule() {
        let rho = m(&[&[1.0 + 5e-11, 0.0], &[0.0, -5e-11]]);
        let e = clipped_density_spectrum(rho.as_ref()).unwrap();
        assert_eq!(e.values[0], 0.0);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        let bad = m(&[&[1.1, 0.0], &[0.0, -0.1]]);
        assert!(matches!(clipped_density_spectrum(bad.as_ref()), Err(Error::NotPsd(_))));
    }

    #[test]
    fn sqrt_squares_back() {
        let rho = m(&[&[0.7, 0.2], &[0.2, 0.3]]);
        let s = density_sqrt(rho.as_ref()).unwrap();
        let back = &s * &s;
        for r in 0..2 {
            for c in 0..2 {
                assert!((back[(r, c)] - rho[(r, c)]).norm() < 1e-14);
            }
        }
    }
}
