//! Small dense real symmetric matrices and the eigen routines built on them.
//!
//! Storage is row-major `Vec<f64>`; decompositions are delegated to `faer`.

use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Square real matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

/// Eigenvalues sorted descending with matching column eigenvectors.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidMatrix(format!(
                    "row of length {} in a {dim}x{dim} matrix",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Rank-one projector `v v^T`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        Self::from_fn(n, |i, j| (0..n).map(|l| self.get(i, l) * other.get(l, j)).sum())
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Symmetric check used by every public entry point taking a matrix.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let asym = self.asymmetry();
        if asym > tol {
            return Err(Error::InvalidMatrix(format!(
                "not symmetric: max |a_ij - a_ji| = {asym:e} exceeds {tol:e}"
            )));
        }
        Ok(())
    }

    /// Leading principal minor of order `order` (1-based), by cofactor expansion.
    /// Only meant for order <= 3.
    pub fn leading_minor(&self, order: usize) -> f64 {
        let a = |i: usize, j: usize| self.get(i, j);
        match order {
            0 => 1.0,
            1 => a(0, 0),
            2 => a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0),
            3 => {
                a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                    - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                    + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
            }
            _ => panic!("leading_minor supports order <= 3"),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, c| self.get(r / m, c / m) * other.get(r % m, c % m))
    }

    fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Full eigendecomposition, eigenvalues descending.
    pub fn eigen(&self) -> Result<SymEigen> {
        self.check_symmetric(1e-10)?;
        let evd = self
            .to_faer()
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
        let (u, s) = (evd.U(), evd.S());
        let n = self.dim;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
        let values = order.iter().map(|&i| s[i]).collect();
        let vectors = order
            .iter()
            .map(|&c| (0..n).map(|r| u[(r, c)]).collect())
            .collect();
        Ok(SymEigen { values, vectors })
    }

    /// Eigenvalues only, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.check_symmetric(1e-10)?;
        let mut values = self
            .to_faer()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(values)
    }
}

/// Sum of absolute eigenvalues of a real symmetric matrix.
pub fn trace_norm_symmetric(m: &SymMatrix) -> Result<f64> {
    Ok(m.eigenvalues()?.iter().map(|x| x.abs()).sum())
}

/// Spectral function `f(X) = sum_i f(lambda_i) v_i v_i^T`.
///
/// Eigenvalues below `kernel_tol` are treated as exact zeros and passed to
/// `f` as `0.0`, which lets callers implement support-projector conventions.
pub fn spectral_map(m: &SymMatrix, kernel_tol: f64, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let eig = m.eigen()?;
    let n = m.dim();
    let mut out = SymMatrix::zeros(n);
    for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
        let lambda = if *lambda < kernel_tol { 0.0 } else { *lambda };
        let fl = f(lambda);
        if fl == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let cur = out.get(i, j);
                out.set(i, j, cur + fl * v[i] * v[j]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_norm_of_identity_and_signed_diagonal() {
        assert!((trace_norm_symmetric(&SymMatrix::diag(&[1.0, 1.0])).unwrap() - 2.0).abs() < 1e-15);
        assert!((trace_norm_symmetric(&SymMatrix::diag(&[0.5, -0.5])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_norm_rejects_asymmetric_and_nan() {
        let m = SymMatrix::from_rows(&[&[1.0, 0.2], &[0.0, 1.0]]).unwrap();
        assert!(matches!(trace_norm_symmetric(&m), Err(Error::InvalidMatrix(_))));
        let m = SymMatrix::diag(&[f64::NAN, 1.0]);
        assert!(matches!(trace_norm_symmetric(&m), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let m = SymMatrix::from_rows(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, -1.0], &[0.0, -1.0, 1.0]]).unwrap();
        let eig = m.eigen().unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let rebuilt = spectral_map(&m, f64::NEG_INFINITY, |x| x).unwrap();
        for (a, b) in rebuilt.as_slice().iter().zip(m.as_slice()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn kron_dimensions_and_entries() {
        let a = SymMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 3.0]]).unwrap();
        let b = SymMatrix::diag(&[1.0, -1.0]);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 4);
        assert_eq!(k.get(0, 2), 2.0);
        assert_eq!(k.get(1, 3), -2.0);
        assert_eq!(k.get(3, 3), -3.0);
    }

    #[test]
    fn minors_of_known_matrix() {
        let m = SymMatrix::from_rows(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 1.0], &[0.0, 1.0, 2.0]]).unwrap();
        assert_eq!(m.leading_minor(1), 2.0);
        assert_eq!(m.leading_minor(2), 3.0);
        assert!((m.leading_minor(3) - 4.0).abs() < 1e-14);
    }
}
