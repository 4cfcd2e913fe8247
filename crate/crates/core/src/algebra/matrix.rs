use std::fmt;
use std::ops::{Index, IndexMut};

use super::{AlgebraError, FieldElement, PrimeField};

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: PrimeField, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_fn(
        field: PrimeField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let x = f(i, j);
                assert_eq!(x.field(), field, "entry from a different field");
                entries.push(x);
            }
        }
        Self {
            field,
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from integer rows, reducing each entry modulo `q`.
    pub fn from_u64_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self, AlgebraError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(AlgebraError::Dimension(
                "rows of unequal length".to_string(),
            ));
        }
        Ok(Self::from_fn(field, rows.len(), cols, |i, j| {
            field.elem(rows[i][j])
        }))
    }

    pub fn column_vector(field: PrimeField, values: &[FieldElement]) -> Self {
        Self::from_fn(field, values.len(), 1, |i, _| values[i])
    }

    pub fn row_vector(field: PrimeField, values: &[FieldElement]) -> Self {
        Self::from_fn(field, 1, values.len(), |_, j| values[j])
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[FieldElement]) {
        assert_eq!(values.len(), self.rows);
        for (i, v) in values.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.field, self.rows, cols.len(), |i, k| self[(i, cols[k])])
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), self.cols, |k, j| self[(rows[k], j)])
    }

    /// Horizontal concatenation `(self | other)`.
    pub fn hconcat(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.rows != other.rows {
            return Err(AlgebraError::Dimension(format!(
                "cannot concatenate {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(
            self.field,
            self.rows,
            self.cols + other.cols,
            |i, j| {
                if j < self.cols {
                    self[(i, j)]
                } else {
                    other[(i, j - self.cols)]
                }
            },
        ))
    }

    /// Vertical concatenation.
    pub fn vconcat(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.cols != other.cols {
            return Err(AlgebraError::Dimension(format!(
                "cannot stack {}x{} on {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if self.cols != rhs.rows {
            return Err(AlgebraError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a * rhs[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>, AlgebraError> {
        if self.cols != v.len() {
            return Err(AlgebraError::Dimension(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(self.field.zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElement::is_zero)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    /// Pivoting takes the first nonzero entry, which is all exact arithmetic needs.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| !self[(i, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self[(row, col)].inv().expect("pivot is nonzero");
            for j in col..self.cols {
                let x = self[(row, j)];
                self[(row, j)] = x * inv;
            }
            for i in 0..self.rows {
                if i == row {
                    continue;
                }
                let factor = self[(i, col)];
                if factor.is_zero() {
                    continue;
                }
                for j in col..self.cols {
                    let sub = factor * self[(row, j)];
                    self[(i, j)] -= sub;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::Dimension(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = self.hconcat(&Self::identity(self.field, n))?;
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(AlgebraError::SingularMatrix);
        }
        Ok(Self::from_fn(self.field, n, n, |i, j| aug[(i, n + j)]))
    }

    /// Determinant by Gaussian elimination.
    pub fn determinant(&self) -> Result<FieldElement, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::Dimension(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.field.one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !m[(i, col)].is_zero()) else {
                return Ok(self.field.zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m[(col, col)];
            det *= pivot;
            let inv = pivot.inv().expect("pivot is nonzero");
            for i in col + 1..n {
                let factor = m[(i, col)] * inv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = factor * m[(col, j)];
                    m[(i, j)] -= sub;
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = FieldElement;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &FieldElement {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElement {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}
