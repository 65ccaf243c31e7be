//! Small dense matrices, a cyclic Jacobi eigensolver and spectral matrix functions.
//!
//! Everything here is sized for desk-scale problems (order below a few dozen).
//! Symmetric matrix functions are computed as `V f(diag) V^T` from the Jacobi
//! decomposition and then re-symmetrized so that downstream symmetry checks are exact.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::validation(format!(
                "matrix data has {} entries, expected {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::validation("ragged matrix rows"));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let (a, b) = (self[(i, j)], self[(j, i)]);
                if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                    return false;
                }
            }
        }
        true
    }

    /// Averages the matrix with its transpose.
    pub fn symmetrize(&self) -> Matrix {
        let mut s = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition `A = V diag(values) V^T`; eigenvectors are the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymEigen {
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Rebuilds `V diag(f(values)) V^T`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        let mapped: Vec<f64> = self.values.iter().map(|v| f(*v)).collect();
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.vectors[(i, k)] * mapped[k] * self.vectors[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 30;
const JACOBI_TOL: f64 = 1e-12;

fn off_norm(a: &Matrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
pub fn sym_eigen(a: &Matrix) -> Result<SymEigen> {
    if !a.is_square() {
        return Err(Error::validation("eigensolver needs a square matrix"));
    }
    if !a.is_finite() {
        return Err(Error::numeric("non-finite matrix entry"));
    }
    if !a.is_symmetric() {
        return Err(Error::validation("matrix is not symmetric"));
    }
    let n = a.rows;
    let mut m = a.symmetrize();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius();
    let mut converged = off_norm(&m) <= JACOBI_TOL * scale;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        converged = off_norm(&m) <= JACOBI_TOL * scale;
    }
    if !converged {
        return Err(Error::numeric(format!(
            "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }
    Ok(SymEigen { values: (0..n).map(|i| m[(i, i)]).collect(), vectors: v })
}

/// Spectral function applied by [`sym_matrix_function`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFn {
    Sqrt,
    Log,
    Exp,
    InvSqrt,
}

pub fn sym_matrix_function(f: MatrixFn, a: &Matrix) -> Result<Matrix> {
    let eig = sym_eigen(a)?;
    if f != MatrixFn::Exp {
        let lo = eig.min_value();
        if !(lo > 0.0) {
            return Err(Error::domain(format!(
                "matrix is not positive definite: smallest eigenvalue {lo:e}"
            )));
        }
    }
    Ok(match f {
        MatrixFn::Sqrt => eig.apply(f64::sqrt),
        MatrixFn::Log => eig.apply(f64::ln),
        MatrixFn::Exp => eig.apply(f64::exp),
        MatrixFn::InvSqrt => eig.apply(|v| 1.0 / v.sqrt()),
    })
}

/// Checks positive definiteness and returns the smallest eigenvalue.
pub fn check_spd(a: &Matrix) -> Result<f64> {
    let eig = sym_eigen(a)?;
    let lo = eig.min_value();
    if lo > 0.0 {
        Ok(lo)
    } else {
        Err(Error::domain(format!("matrix is not positive definite: smallest eigenvalue {lo:e}")))
    }
}

/// Order `n` with `n(n+1)/2 == len`, if any.
pub fn sym_order(len: usize) -> Option<usize> {
    let mut n = 0;
    while n * (n + 1) / 2 < len {
        n += 1;
    }
    (n * (n + 1) / 2 == len && n > 0).then_some(n)
}

/// Upper-triangular row-major coordinates to a symmetric matrix.
pub fn sym_encode(v: &[f64]) -> Result<Matrix> {
    let n = sym_order(v.len()).ok_or_else(|| {
        Error::validation(format!("length {} is not a triangular number", v.len()))
    })?;
    let mut m = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = v[k];
            m[(j, i)] = v[k];
            k += 1;
        }
    }
    Ok(m)
}

/// Inverse of [`sym_encode`].
pub fn sym_decode(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_symmetric() {
        return Err(Error::validation("matrix is not symmetric"));
    }
    let n = m.rows();
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            v.push(m[(i, j)]);
        }
    }
    Ok(v)
}

/// Direction flag for the two-way charts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Encode,
    Decode,
}

/// Argument or result of [`sym_chart`].
#[derive(Debug, Clone, PartialEq)]
pub enum SymArg {
    Vector(Vec<f64>),
    Matrix(Matrix),
}

pub fn sym_chart(direction: Direction, arg: SymArg) -> Result<SymArg> {
    match (direction, arg) {
        (Direction::Encode, SymArg::Vector(v)) => sym_encode(&v).map(SymArg::Matrix),
        (Direction::Decode, SymArg::Matrix(m)) => sym_decode(&m).map(SymArg::Vector),
        _ => Err(Error::validation("encode takes a vector, decode takes a matrix")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.sub(b).frobenius() <= tol
    }

    #[test]
    fn sqrt_of_diagonal() {
        let a = Matrix::diag(&[4.0, 9.0]);
        let s = sym_matrix_function(MatrixFn::Sqrt, &a).unwrap();
        assert!(close(&s, &Matrix::diag(&[2.0, 3.0]), 1e-14));
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = sym_matrix_function(MatrixFn::Log, &Matrix::identity(3)).unwrap();
        assert!(l.frobenius() == 0.0);
    }

    #[test]
    fn exp_of_swap_matrix() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = sym_matrix_function(MatrixFn::Exp, &a).unwrap();
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        let want = Matrix::from_rows(&[vec![c, s], vec![s, c]]).unwrap();
        assert!(close(&e, &want, 1e-14));
    }

    #[test]
    fn non_spd_reports_smallest_eigenvalue() {
        let a = Matrix::diag(&[1.0, -2.0]);
        let err = sym_matrix_function(MatrixFn::Log, &a).unwrap_err();
        assert!(err.to_string().contains("-2"), "{err}");
    }

    #[test]
    fn sym_chart_layout() {
        let m = sym_encode(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert_eq!(sym_decode(&m).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(sym_encode(&[0.0; 6]).unwrap(), Matrix::zeros(3, 3));
        assert!(sym_encode(&[1.0, 2.0]).is_err());
        let asym = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(sym_decode(&asym).is_err());
    }

    #[test]
    fn eigen_reconstructs_dense_matrix() {
        let a = Matrix::from_rows(&[
            vec![4.0, 1.0, -2.0, 0.5],
            vec![1.0, 3.0, 0.0, 1.0],
            vec![-2.0, 0.0, 5.0, 0.3],
            vec![0.5, 1.0, 0.3, 2.0],
        ])
        .unwrap();
        let eig = sym_eigen(&a).unwrap();
        assert!(close(&eig.apply(|v| v), &a, 1e-12));
        let vtv = eig.vectors.transpose().matmul(&eig.vectors);
        assert!(close(&vtv, &Matrix::identity(4), 1e-12));
    }
}
