//! Dense complex matrices and the S± functional.
//!
//! `S⁺` is the permanent and `S⁻` the determinant. Both are multilinear in the
//! rows of their argument, which is what the counting module relies on when it
//! expands the generating function row by row.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FcsError, Result};

/// Largest matrix handed to the Ryser permanent.
pub const PERMANENT_MAX_DIM: usize = 24;
/// Largest matrix handed to the determinant.
pub const DETERMINANT_MAX_DIM: usize = 64;
/// Eigenvalue slack used by [`is_psd`] when callers have no better figure.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// Particle statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsKind {
    Boson,
    Fermion,
    #[serde(alias = "dp")]
    Distinguishable,
}

impl StatisticsKind {
    pub const ALL: [StatisticsKind; 3] = [
        StatisticsKind::Boson,
        StatisticsKind::Fermion,
        StatisticsKind::Distinguishable,
    ];

    /// Short lowercase label used in file headers.
    pub fn label(self) -> &'static str {
        match self {
            StatisticsKind::Boson => "boson",
            StatisticsKind::Fermion => "fermion",
            StatisticsKind::Distinguishable => "dp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boson" | "bosons" | "b" | "+" => Some(StatisticsKind::Boson),
            "fermion" | "fermions" | "f" | "-" => Some(StatisticsKind::Fermion),
            "dp" | "distinguishable" | "d" => Some(StatisticsKind::Distinguishable),
            _ => None,
        }
    }
}

impl fmt::Display for StatisticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(FcsError::Dimension("ragged rows".into()));
        }
        Ok(ComplexMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Real-valued convenience constructor, mostly for tests.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set_row(&mut self, i: usize, values: &[Complex64]) {
        self.row_mut(i).copy_from_slice(values);
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(FcsError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        }))
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    fn zip_with(&self, other: &ComplexMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FcsError::Dimension(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |M - M†|, infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// (M + M†)/2.
    pub fn hermitized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()))
    }

    /// Largest off-diagonal modulus of `self - 1`, including the diagonal.
    pub fn distance_from_identity(&self) -> f64 {
        self.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn diagonal_product(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).product()
    }

    /// Whether every off-diagonal entry vanishes to `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn require_square(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(FcsError::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.rows())
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(m)?;
    if n > DETERMINANT_MAX_DIM {
        return Err(FcsError::Size {
            what: "determinant",
            size: n,
            limit: DETERMINANT_MAX_DIM,
        });
    }
    match n {
        0 => return Ok(Complex64::new(1.0, 0.0)),
        1 => return Ok(m[(0, 0)]),
        2 => return Ok(m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]),
        _ => {}
    }
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
            .expect("non-empty pivot range");
        if a[(pivot, col)].norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for r in col + 1..n {
            let factor = a[(r, col)] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col + 1..n {
                let v = a[(col, j)];
                a[(r, j)] -= factor * v;
            }
        }
    }
    Ok(det)
}

/// Permanent by Ryser's inclusion–exclusion formula, visiting column subsets
/// in Gray-code order so each step updates the row sums by one column.
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(m)?;
    if n > PERMANENT_MAX_DIM {
        return Err(FcsError::Size {
            what: "permanent",
            size: n,
            limit: PERMANENT_MAX_DIM,
        });
    }
    match n {
        0 => return Ok(Complex64::new(1.0, 0.0)),
        1 => return Ok(m[(0, 0)]),
        2 => return Ok(m[(0, 0)] * m[(1, 1)] + m[(0, 1)] * m[(1, 0)]),
        _ => {}
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut row_sums = vec![zero; n];
    let mut total = zero;
    let mut gray: u32 = 0;
    for k in 1u32..(1u32 << n) {
        // Gray code k ^ (k >> 1) differs from its predecessor in bit trailing_zeros(k).
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray & (1 << j) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[(i, j)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(i, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(if n % 2 == 0 { total } else { -total })
}

/// `S⁺` (permanent) for bosons, `S⁻` (determinant) for fermions.
pub fn s_pm(m: &ComplexMatrix, kind: StatisticsKind) -> Result<Complex64> {
    match kind {
        StatisticsKind::Boson => permanent(m),
        StatisticsKind::Fermion => determinant(m),
        StatisticsKind::Distinguishable => Err(FcsError::UnsupportedKind(kind)),
    }
}

/// Eigenvalues of the Hermitian part (M + M†)/2, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    require_square(m)?;
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let eig = m.hermitized().to_nalgebra().symmetric_eigenvalues();
    let mut values: Vec<f64> = eig.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Positive-semidefiniteness test with eigenvalue slack `tol`.
///
/// The input must be Hermitian to within `tol`; the test itself runs on the
/// Hermitized matrix so that quadrature noise in the anti-Hermitian part does
/// not matter.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(min_psd_eigenvalue(m, tol)? >= -tol)
}

/// Smallest eigenvalue of a (nearly) Hermitian matrix, after the same
/// Hermiticity check as [`is_psd`]. Empty matrices report `0`.
pub fn min_psd_eigenvalue(m: &ComplexMatrix, tol: f64) -> Result<f64> {
    require_square(m)?;
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(FcsError::NotHermitian { deviation, tol });
    }
    Ok(hermitian_eigenvalues(m)?.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn determinant_small_cases() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(determinant(&id).unwrap(), c(1.0, 0.0));
        let m = ComplexMatrix::from_real(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        assert_eq!(determinant(&m).unwrap(), c(3.0, 0.0));
        let sing = ComplexMatrix::from_real(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], &[0.0, 1.0, 1.0]]).unwrap();
        assert!(determinant(&sing).unwrap().norm() < 1e-14);
    }

    #[test]
    fn determinant_needs_pivoting() {
        // zero in the leading position
        let m = ComplexMatrix::from_real(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 5.0]]).unwrap();
        assert!((determinant(&m).unwrap() - c(-5.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn permanent_small_cases() {
        assert_eq!(permanent(&ComplexMatrix::identity(4)).unwrap(), c(1.0, 0.0));
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| c(1.0, 0.0));
        assert!((permanent(&ones).unwrap() - c(6.0, 0.0)).norm() < 1e-14);
        let ones5 = ComplexMatrix::from_fn(5, 5, |_, _| c(1.0, 0.0));
        assert!((permanent(&ones5).unwrap() - c(120.0, 0.0)).norm() < 1e-12);
        assert_eq!(permanent(&ComplexMatrix::zeros(0, 0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn s_pm_dispatch() {
        let ones = ComplexMatrix::from_fn(2, 2, |_, _| c(1.0, 0.0));
        assert_eq!(s_pm(&ones, StatisticsKind::Boson).unwrap(), c(2.0, 0.0));
        assert_eq!(s_pm(&ones, StatisticsKind::Fermion).unwrap(), c(0.0, 0.0));
        assert_eq!(
            s_pm(&ComplexMatrix::identity(3), StatisticsKind::Boson).unwrap(),
            c(1.0, 0.0)
        );
        assert_eq!(
            s_pm(&ones, StatisticsKind::Distinguishable),
            Err(FcsError::UnsupportedKind(StatisticsKind::Distinguishable))
        );
    }

    #[test]
    fn non_square_and_oversized_inputs_are_rejected() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(determinant(&m), Err(FcsError::Dimension(_))));
        assert!(matches!(permanent(&m), Err(FcsError::Dimension(_))));
        let big = ComplexMatrix::identity(PERMANENT_MAX_DIM + 1);
        assert!(matches!(permanent(&big), Err(FcsError::Size { .. })));
        let huge = ComplexMatrix::identity(DETERMINANT_MAX_DIM + 1);
        assert!(matches!(determinant(&huge), Err(FcsError::Size { .. })));
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&ComplexMatrix::identity(3), 1e-12).unwrap());
        let m = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert!(!is_psd(&m, 1e-12).unwrap());
        let skew = ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(is_psd(&skew, 1e-10), Err(FcsError::NotHermitian { .. })));
        // rank-one Gram matrix sits on the boundary
        let v = [c(1.0, 0.5), c(0.0, -2.0)];
        let g = ComplexMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj());
        assert!(is_psd(&g, 1e-12).unwrap());
    }

    #[test]
    fn kind_labels_round_trip() {
        for k in StatisticsKind::ALL {
            assert_eq!(StatisticsKind::parse(k.label()), Some(k));
        }
        assert_eq!(StatisticsKind::parse("nope"), None);
    }
}
