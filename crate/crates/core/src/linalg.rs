//! Dense complex Hermitian matrices with PSD certification and low-rank
//! factorization. Everything goes through a full Hermitian eigendecomposition;
//! the orders used in this crate stay in the low hundreds.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance shared by every PSD-dependent operation unless the
/// caller passes an override.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Maximum admitted `|a_ij - conj(a_ji)|`, relative to `max(1, max |a|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Symmetrizes `(M + M*)/2` after checking that `M` is Hermitian to
    /// [`HERMITIAN_TOL`] and entirely finite.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { context: "matrix entries".into() });
        }
        let n = m.nrows();
        let scale = m.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
        let mut asymmetry = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if asymmetry > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { asymmetry });
        }
        let data = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        Ok(HermitianMatrix { data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Dimension(format!("row {bad} has {} entries, expected {n}", rows[bad].len())));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    /// Builds a Hermitian matrix by evaluating `f` on the upper triangle only
    /// and mirroring. Diagonal imaginary parts are discarded.
    pub fn from_upper_fn<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite { context: format!("entry ({i}, {j})") });
                }
                if i == j {
                    data[(i, i)] = Complex64::new(v.re, 0.0);
                } else {
                    data[(i, j)] = v;
                    data[(j, i)] = v.conj();
                }
            }
        }
        Ok(HermitianMatrix { data })
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix { data: DMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix { data: DMatrix::zeros(n, n) }
    }

    pub fn order(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.data
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.data.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        if self.order() != other.order() {
            return Err(Error::Dimension(format!("cannot add orders {} and {}", self.order(), other.order())));
        }
        Ok(HermitianMatrix { data: &self.data + &other.data })
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<HermitianMatrix> {
        if self.order() != other.order() {
            return Err(Error::Dimension(format!("cannot subtract orders {} and {}", self.order(), other.order())));
        }
        Ok(HermitianMatrix { data: &self.data - &other.data })
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix { data: &self.data * Complex64::new(s, 0.0) }
    }

    /// `P H P^T` for the permutation sending index `perm[i]` to position `i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<HermitianMatrix> {
        let n = self.order();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Dimension("not a permutation of the matrix indices".into()));
        }
        Ok(HermitianMatrix { data: DMatrix::from_fn(n, n, |i, j| self.data[(perm[i], perm[j])]) })
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> HermitianMatrix {
        let k = idx.len();
        HermitianMatrix { data: DMatrix::from_fn(k, k, |i, j| self.data[(idx[i], idx[j])]) }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.order() == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut vals: Vec<f64> = self.data.clone().symmetric_eigenvalues().iter().copied().collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::EigenFailed);
        }
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }

    /// Eigenpairs sorted by descending eigenvalue.
    fn eigen_descending(&self) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        if self.order() == 0 {
            return Err(Error::EmptyMatrix);
        }
        let eig = SymmetricEigen::try_new(self.data.clone(), f64::EPSILON, 0).ok_or(Error::EigenFailed)?;
        let n = self.order();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vecs = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
        Ok((vals, vecs))
    }
}

/// Threshold below which an eigenvalue counts as negative: `tol * (1 + ||H||_inf)`.
pub fn psd_threshold(h: &HermitianMatrix, tol: f64) -> f64 {
    tol * (1.0 + h.inf_norm())
}

pub fn min_eigenvalue(h: &HermitianMatrix) -> Result<f64> {
    Ok(h.eigenvalues()?[0])
}

/// True iff `min_eigenvalue(h) >= -tol * (1 + ||h||_inf)`. The empty matrix
/// is vacuously PSD.
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> Result<bool> {
    if tol < 0.0 || tol.is_nan() {
        return Err(Error::NegativeTolerance(tol));
    }
    if h.order() == 0 {
        return Ok(true);
    }
    Ok(min_eigenvalue(h)? >= -psd_threshold(h, tol))
}

/// `H ≈ B B*` with `B` of size `n x rank`.
#[derive(Clone, Debug)]
pub struct LowRankFactor {
    pub rank: usize,
    pub factor: DMatrix<Complex64>,
    /// Full spectrum, descending. Lets callers diagnose borderline ranks.
    pub spectrum: Vec<f64>,
}

/// Factor a PSD matrix by truncated eigendecomposition.
///
/// Columns are ordered by descending eigenvalue and each column's first
/// entry of non-negligible modulus is rotated to be real-positive, so the
/// factor is reproducible despite the unitary freedom `B -> B U`.
pub fn low_rank_factor(h: &HermitianMatrix, tol: f64) -> Result<LowRankFactor> {
    if tol < 0.0 || tol.is_nan() {
        return Err(Error::NegativeTolerance(tol));
    }
    let (vals, vecs) = h.eigen_descending()?;
    let thresh = psd_threshold(h, tol);
    let lmin = *vals.last().expect("non-empty spectrum");
    if lmin < -thresh {
        return Err(Error::NotPsd { min_eigenvalue: lmin });
    }
    let rank = vals.iter().filter(|&&v| v > thresh).count();
    let n = h.order();
    let mut factor = DMatrix::zeros(n, rank);
    for c in 0..rank {
        let col = vecs.column(c);
        let peak = col.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        let phase = col
            .iter()
            .find(|z| z.norm() > 1e-8 * peak)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(Complex64::new(1.0, 0.0));
        let s = vals[c].sqrt();
        for i in 0..n {
            factor[(i, c)] = col[i] * phase * s;
        }
    }
    Ok(LowRankFactor { rank, factor, spectrum: vals })
}

/// Largest singular value of a square complex block, via `W W*`.
pub fn spectral_norm(w: &DMatrix<Complex64>) -> Result<f64> {
    if w.nrows() == 0 {
        return Ok(0.0);
    }
    let ww = HermitianMatrix::new(w * w.adjoint())?;
    let top = *ww.eigenvalues()?.last().expect("non-empty");
    Ok(top.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert!((min_eigenvalue(&HermitianMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-14);
        assert!(min_eigenvalue(&real(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap().abs() < 1e-14);

        // 2x2 Pick matrix of {0, 0.5} -> {0, 0.6}; oracle from the quadratic formula.
        let d: f64 = 0.64 * 4.0 / 3.0;
        let (tr, det) = (1.0 + d, d - 1.0);
        let expected = (tr - (tr * tr - 4.0 * det).sqrt()) / 2.0;
        let got = min_eigenvalue(&real(&[&[1.0, 1.0], &[1.0, d]])).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got + 0.0760).abs() < 5e-5);
    }

    #[test]
    fn empty_matrix_rejected() {
        assert_eq!(min_eigenvalue(&HermitianMatrix::zeros(0)), Err(Error::EmptyMatrix));
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&HermitianMatrix::identity(3), 0.0).unwrap());
        assert!(is_psd(&HermitianMatrix::zeros(4), 0.0).unwrap());
        assert!(!is_psd(&real(&[&[1.0, 1.0], &[1.0, 0.9]]), 1e-9).unwrap());
        assert!(matches!(is_psd(&HermitianMatrix::identity(2), -1.0), Err(Error::NegativeTolerance(_))));
    }

    #[test]
    fn construction_checks_hermitian() {
        let bad = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.1), c(0.5, 0.1), c(1.0, 0.0)]);
        assert!(matches!(HermitianMatrix::new(bad), Err(Error::NotHermitian { .. })));
        let ok = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.1), c(0.5, -0.1), c(1.0, 0.0)]);
        assert!(HermitianMatrix::new(ok).is_ok());
        let nan = DMatrix::from_element(1, 1, c(f64::NAN, 0.0));
        assert!(matches!(HermitianMatrix::new(nan), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn factor_rank_one_ones() {
        let f = low_rank_factor(&real(&[&[1.0, 1.0], &[1.0, 1.0]]), DEFAULT_PSD_TOL).unwrap();
        assert_eq!(f.rank, 1);
        assert!((f.factor[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((f.factor[(1, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn factor_identity_full_rank() {
        assert_eq!(low_rank_factor(&HermitianMatrix::identity(3), DEFAULT_PSD_TOL).unwrap().rank, 3);
    }

    #[test]
    fn factor_outer_product() {
        let x = [c(0.2, 0.0), c(0.5, 0.0), c(0.0, 0.7)];
        let h = HermitianMatrix::from_upper_fn(3, |i, j| x[i] * x[j].conj()).unwrap();
        let f = low_rank_factor(&h, DEFAULT_PSD_TOL).unwrap();
        assert_eq!(f.rank, 1);
        // gauge makes the first entry real-positive, and x[0] already is
        for (i, xi) in x.iter().enumerate() {
            assert!((f.factor[(i, 0)] - xi).norm() < 1e-12);
        }
    }

    #[test]
    fn factor_rejects_indefinite() {
        let err = low_rank_factor(&real(&[&[1.0, 1.0], &[1.0, 0.9]]), 1e-9).unwrap_err();
        match err {
            Error::NotPsd { min_eigenvalue } => assert!(min_eigenvalue < 0.0),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn spectral_norm_diag() {
        let w = DMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.8)]);
        assert!((spectral_norm(&w).unwrap() - 0.8).abs() < 1e-14);
    }
}
