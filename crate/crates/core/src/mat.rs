//! Dense complex matrices in row-major order.
//!
//! [`ComplexMatrix`] is the single carrier type for states, Kraus operators,
//! isometries and unitaries. Besides plain arithmetic it provides the
//! structural operations the recovery construction is built from: conjugate
//! transpose, Kronecker product, direct sum with a zero block, and partial
//! trace over the leading tensor factor.
//!
//! Tensor index convention: in `a.kron(&b)` the first factor is the slow
//! index, i.e. entry `((i1, i2), (j1, j2))` of the product lives at row
//! `i1 * b.rows() + i2`, column `j1 * b.cols() + j2`. `partial_trace_first`
//! uses the same convention and traces over the slow factor.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix with row-major storage.
///
/// Entries are finite `Complex64` values; the checked constructors reject
/// NaN and infinities. All operations are pure and return new values.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, checking length and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::new",
                expected: format!("{} entries for a {rows}x{cols} matrix", rows * cols),
                found: format!("{}", entries.len()),
            });
        }
        let m = Self { rows, cols, entries };
        m.ensure_finite()?;
        Ok(m)
    }

    /// Builds a matrix by evaluating `f(row, col)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Builds a matrix from a slice of equal-length rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    context: "ComplexMatrix::from_rows",
                    expected: format!("{c} entries in row {i}"),
                    found: format!("{}", row.len()),
                });
            }
        }
        Self::new(r, c, rows.concat())
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Square diagonal matrix with the given diagonal.
    pub fn diag(d: &[Complex64]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                d[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Square diagonal matrix with a real diagonal.
    pub fn diag_real(d: &[f64]) -> Self {
        let v: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols);
        i * self.cols + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.idx(i, j);
        self.entries[k] = v;
    }

    fn ensure_finite(&self) -> Result<()> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Matrix product, checking that the inner dimensions agree.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                expected: format!("rhs with {} rows", self.cols),
                found: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let k = out.idx(i, j);
                    out.entries[k] += a * rhs.get(l, j);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose A†.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Kronecker product with the receiver as the slow (first) factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..rhs.rows {
                    for j2 in 0..rhs.cols {
                        out.set(i1 * rhs.rows + i2, j1 * rhs.cols + j2, a * rhs.get(i2, j2));
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal matrix `[[self, 0], [0, 0_zero_dim]]`.
    pub fn direct_sum_zero(&self, zero_dim: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                context: "direct_sum_zero",
                expected: "square matrix".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let n = self.rows + zero_dim;
        let mut out = Self::zeros(n, n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        Ok(out)
    }

    /// Partial trace over the leading tensor factor.
    ///
    /// For a square matrix on a `dim_first * dim_second` space, returns the
    /// `dim_second x dim_second` matrix with entries
    /// `out[i][j] = Σ_a self[(a,i)][(a,j)]`.
    pub fn partial_trace_first(&self, dim_first: usize, dim_second: usize) -> Result<Self> {
        let n = dim_first * dim_second;
        if !self.is_square() || self.rows != n {
            return Err(Error::DimensionMismatch {
                context: "partial_trace_first",
                expected: format!("{n}x{n} matrix"),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let mut out = Self::zeros(dim_second, dim_second);
        for a in 0..dim_first {
            let base = a * dim_second;
            for i in 0..dim_second {
                for j in 0..dim_second {
                    let k = out.idx(i, j);
                    out.entries[k] += self.get(base + i, base + j);
                }
            }
        }
        Ok(out)
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn dist(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "dist of differently shaped matrices"
        );
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Entrywise scaling.
    pub fn scaled(&self, s: impl Into<Complex64>) -> Self {
        let s = s.into();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Horizontal concatenation of blocks with equal row counts.
    pub fn hconcat(blocks: &[&Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        for b in blocks {
            if b.rows != rows {
                return Err(Error::DimensionMismatch {
                    context: "hconcat",
                    expected: format!("{rows} rows"),
                    found: format!("{}", b.rows),
                });
            }
        }
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out.set(i, offset + j, b.get(i, j));
                }
            }
            offset += b.cols;
        }
        Ok(out)
    }

    /// Copy of the sub-block starting at `(row0, col0)`.
    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, j| self.get(row0 + i, col0 + j))
    }

    /// `‖A − A†‖_F` for a square matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square(), "hermiticity defect of a non-square matrix");
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖A†A − I‖_F`, measuring how far the columns are from orthonormal.
    pub fn isometry_defect(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.cols {
            for j in 0..self.cols {
                let mut g = Complex64::new(0.0, 0.0);
                for l in 0..self.rows {
                    g += self.get(l, i).conj() * self.get(l, j);
                }
                if i == j {
                    g -= Complex64::new(1.0, 0.0);
                }
                acc += g.norm_sqr();
            }
        }
        acc.sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("mul shape mismatch")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                if j > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{:>8.4}{:+8.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}:", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}
