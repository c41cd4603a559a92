use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

fn zero_ref() -> &'static BigInt {
    static ZERO: OnceLock<BigInt> = OnceLock::new();
    ZERO.get_or_init(BigInt::zero)
}

/// Integer matrix with arbitrary-precision entries, indexed row-major.
///
/// Entries are stored sparsely (zeros are omitted), which keeps the large
/// boundary matrices of the bar complexes at a few megabytes instead of
/// gigabytes. The interface is positional: `get`/`set` address the full
/// `rows x cols` grid. Zero-size matrices are legal everywhere; they show up
/// naturally as boundary maps at the ends of a chain complex.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: HashMap<u64, BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: HashMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                if !v.is_zero() {
                    m.entries.insert(m.key(r, c), v);
                }
            }
        }
        m
    }

    /// Convenience constructor for tests and small fixed matrices.
    pub fn from_rows(data: &[Vec<i64>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        for r in data {
            assert_eq!(r.len(), cols, "ragged rows");
        }
        Self::from_fn(rows, cols, |i, j| BigInt::from(data[i][j]))
    }

    fn key(&self, r: usize, c: usize) -> u64 {
        debug_assert!(r < self.rows && c < self.cols);
        (r as u64) * (self.cols as u64) + c as u64
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.entries.get(&self.key(r, c)).unwrap_or_else(|| zero_ref())
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        let k = self.key(r, c);
        if v.is_zero() {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, v);
        }
    }

    pub fn add_assign_entry(&mut self, r: usize, c: usize, delta: &BigInt) {
        if delta.is_zero() {
            return;
        }
        let k = self.key(r, c);
        let entry = self.entries.entry(k).or_insert_with(BigInt::zero);
        *entry += delta;
        if entry.is_zero() {
            self.entries.remove(&k);
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }

    /// Nonzero entries as (row, col, value), sorted row-major.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, &BigInt)> {
        let mut out: Vec<_> = self
            .entries
            .iter()
            .map(|(&k, v)| {
                (
                    (k / self.cols.max(1) as u64) as usize,
                    (k % self.cols.max(1) as u64) as usize,
                    v,
                )
            })
            .collect();
        out.sort_by_key(|&(r, c, _)| (r, c));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.nonzero_entries() {
            out.set(c, r, v.clone());
        }
        out
    }

    /// Product; cost is proportional to the nonzeros involved.
    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        // rows of `other`, as (col, value) lists
        let mut other_rows: Vec<Vec<(usize, &BigInt)>> = vec![Vec::new(); other.rows];
        for (r, c, v) in other.nonzero_entries() {
            other_rows[r].push((c, v));
        }
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for (i, k, a) in self.nonzero_entries() {
            for &(j, b) in &other_rows[k] {
                out.add_assign_entry(i, j, &(a * b));
            }
        }
        out
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        let mut out = IntegerMatrix::zeros(self.rows, self.cols + other.cols);
        for (r, c, v) in self.nonzero_entries() {
            out.set(r, c, v.clone());
        }
        for (r, c, v) in other.nonzero_entries() {
            out.set(r, c + self.cols, v.clone());
        }
        out
    }

    pub fn submatrix_rows(&self, start: usize, end: usize) -> IntegerMatrix {
        assert!(start <= end && end <= self.rows);
        let mut out = IntegerMatrix::zeros(end - start, self.cols);
        for (r, c, v) in self.nonzero_entries() {
            if r >= start && r < end {
                out.set(r - start, c, v.clone());
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::invalid("determinant of non-square matrix"));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    let (q, r) = num_integer::Integer::div_rem(&num, &prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    a[i][j] = q;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(sign * a[n - 1][n - 1].clone())
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols
            && self
                .determinant()
                .map(|d| d.abs().is_one())
                .unwrap_or(false)
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows * self.cols > 400 {
            return write!(
                f,
                "IntegerMatrix {}x{} ({} nonzeros)",
                self.rows,
                self.cols,
                self.entries.len()
            );
        }
        writeln!(f, "IntegerMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_identity() {
        let m = IntegerMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        let id = IntegerMatrix::identity(2);
        assert_eq!(m.mul(&id), m);
        assert_eq!(id.mul(&m), m);
    }

    #[test]
    fn determinant_small() {
        let m = IntegerMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(m.determinant().unwrap(), BigInt::from(-8));
        let singular = IntegerMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(singular.determinant().unwrap(), BigInt::zero());
        assert_eq!(IntegerMatrix::zeros(0, 0).determinant().unwrap(), BigInt::one());
    }

    #[test]
    fn set_to_zero_removes_storage() {
        let mut m = IntegerMatrix::zeros(2, 2);
        m.set(0, 1, BigInt::from(5));
        assert_eq!(m.nonzero_count(), 1);
        m.set(0, 1, BigInt::zero());
        assert_eq!(m.nonzero_count(), 0);
        assert!(m.is_zero());
    }

    #[test]
    fn hstack_shapes() {
        let a = IntegerMatrix::from_rows(&[vec![1], vec![2]]);
        let b = IntegerMatrix::from_rows(&[vec![3], vec![4]]);
        let c = a.hstack(&b);
        assert_eq!(c.rows(), 2);
        assert_eq!(c.cols(), 2);
        assert_eq!(*c.get(1, 1), BigInt::from(4));
    }
}
