use std::fmt;
use std::ops::{Deref, DerefMut, Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Unbounded-precision integer; every entry in this crate is one of these.
pub type IntScalar = BigInt;

/// Fixed-length vector of big integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn zeros(n: usize) -> Self {
        IntVector(vec![BigInt::zero(); n])
    }

    pub fn from_i64(values: &[i64]) -> Self {
        IntVector(values.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Elementary vector `e_k` (0-based `k`).
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = BigInt::from(1);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Number of leading zero entries.
    pub fn leading_zeros(&self) -> usize {
        leading_zeros(&self.0)
    }

    pub fn scaled(&self, s: &BigInt) -> Self {
        IntVector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn into_inner(self) -> Vec<BigInt> {
        self.0
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.0
    }
}

pub(crate) fn leading_zeros(v: &[BigInt]) -> usize {
    v.iter().take_while(|x| x.is_zero()).count()
}

impl From<Vec<BigInt>> for IntVector {
    fn from(v: Vec<BigInt>) -> Self {
        IntVector(v)
    }
}

impl Deref for IntVector {
    type Target = [BigInt];
    fn deref(&self) -> &[BigInt] {
        &self.0
    }
}

impl DerefMut for IntVector {
    fn deref_mut(&mut self) -> &mut [BigInt] {
        &mut self.0
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Dense row-major matrix of big integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    /// Convenience constructor for small literal matrices.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r: Vec<Vec<BigInt>> = rows.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(r).expect("ragged literal matrix")
    }

    pub fn from_diag(diag: &[i64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = BigInt::from(d);
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigInt] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> IntVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect::<Vec<_>>().into()
    }

    pub(crate) fn data_mut(&mut self) -> &mut [BigInt] {
        &mut self.data
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_entries(&mut self, a: (usize, usize), b: (usize, usize)) {
        self.data.swap(a.0 * self.cols + a.1, b.0 * self.cols + b.1);
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Largest absolute entry (the `sigma` of the bit-length bound).
    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }

    /// Largest bit-length of any entry.
    pub fn max_bits(&self) -> u64 {
        self.data.iter().map(|x| x.bits()).max().unwrap_or(0)
    }

    /// Leading `k x k` block.
    pub fn leading_block(&self, k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Submatrix induced by ordered row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = &BigInt> {
        self.data.iter()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Exact product `A x`.
pub fn mat_vec(a: &IntMatrix, x: &[BigInt]) -> Result<IntVector> {
    if a.n_cols() != x.len() {
        return Err(Error::DimensionMismatch { expected: a.n_cols(), found: x.len() });
    }
    Ok((0..a.n_rows()).map(|i| a.row(i).iter().zip(x).map(|(p, q)| p * q).sum::<BigInt>()).collect::<Vec<_>>().into())
}

/// Exact product `A B`.
pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.n_cols() != b.n_rows() {
        return Err(Error::DimensionMismatch { expected: a.n_cols(), found: b.n_rows() });
    }
    let mut c = IntMatrix::zeros(a.n_rows(), b.n_cols());
    for i in 0..a.n_rows() {
        for k in 0..a.n_cols() {
            let aik = &a[(i, k)];
            if aik.is_zero() {
                continue;
            }
            for j in 0..b.n_cols() {
                c[(i, j)] += aik * &b[(k, j)];
            }
        }
    }
    Ok(c)
}
