use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{:?}", self.to_strings())
    }
}

impl Matrix {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Build from rows of element strings.
    pub fn from_strings(field: &Field, rows: &[Vec<String>]) -> Result<Matrix> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for s in row {
                data.push(field.parse_element(s)?);
            }
        }
        Matrix::new(field, n, cols, data)
    }

    pub fn from_codes(field: &Field, n: usize, codes: &[u32]) -> Matrix {
        Matrix {
            field: field.clone(),
            rows: n,
            cols: codes.len() / n.max(1),
            data: codes.iter().map(|&c| FieldElement::Finite(c)).collect(),
        }
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.field.format(self.get(i, j))).collect())
            .collect()
    }

    pub fn field(&self) -> &Field {
        &self.field
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

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = f.zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if f.is_zero(a) {
                        continue;
                    }
                    acc = f.add(&acc, &f.mul(a, other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(self.get(i, j), &v[j])))
            })
            .collect())
    }

    pub fn scale(&self, c: &FieldElement) -> Matrix {
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| self.field.mul(x, c)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Row echelon form by Gaussian elimination with first-nonzero pivoting.
    /// Returns the pivot columns and the determinant factor (product of pivots
    /// and swap signs, meaningful only for square full-rank input).
    fn eliminate(&mut self) -> (Vec<usize>, FieldElement) {
        let f = self.field.clone();
        let mut det = f.one();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !f.is_zero(self.get(r, col))) else {
                continue;
            };
            if pr != row {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, row * self.cols + j);
                }
                det = f.neg(&det);
            }
            let pivot = self.get(row, col).clone();
            det = f.mul(&det, &pivot);
            let pinv = f.inv(&pivot).expect("nonzero pivot");
            for r in row + 1..self.rows {
                let factor = f.mul(self.get(r, col), &pinv);
                if f.is_zero(&factor) {
                    continue;
                }
                for j in col..self.cols {
                    let v = f.sub(self.get(r, j), &f.mul(&factor, self.get(row, j)));
                    self.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (pivots, det)
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate().0.len()
    }

    pub fn determinant(&self) -> Result<FieldElement> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let (pivots, det) = self.clone().eliminate();
        Ok(if pivots.len() < self.rows {
            self.field.zero()
        } else {
            det
        })
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let f = self.field.clone();
        let mut aug = Matrix::zeros(&f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, f.one());
        }
        for col in 0..n {
            let pr = (col..n)
                .find(|&r| !f.is_zero(aug.get(r, col)))
                .ok_or(Error::SingularMatrix)?;
            if pr != col {
                for j in 0..2 * n {
                    aug.data.swap(pr * 2 * n + j, col * 2 * n + j);
                }
            }
            let pinv = f.inv(aug.get(col, col)).expect("nonzero pivot");
            for j in 0..2 * n {
                let v = f.mul(aug.get(col, j), &pinv);
                aug.set(col, j, v);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = aug.get(r, col).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for j in 0..2 * n {
                    let v = f.sub(aug.get(r, j), &f.mul(&factor, aug.get(col, j)));
                    aug.set(r, j, v);
                }
            }
        }
        let mut inv = Matrix::zeros(&f, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Same matrix over an extension field.
    pub fn lift(&self, target: &Field) -> Result<Matrix> {
        let data = self
            .data
            .iter()
            .map(|x| self.field.embed(target, x))
            .collect::<Result<Vec<_>>>()?;
        Matrix::new(target, self.rows, self.cols, data)
    }
}

/// Determinant of a square matrix of finite-field codes, `n * n` row-major.
pub(crate) fn codes_nonsingular(ff: &crate::field::FiniteField, n: usize, codes: &mut [u32]) -> bool {
    for col in 0..n {
        let Some(pr) = (col..n).find(|&r| codes[r * n + col] != 0) else {
            return false;
        };
        if pr != col {
            for j in 0..n {
                codes.swap(pr * n + j, col * n + j);
            }
        }
        let pinv = ff.inv(codes[col * n + col]).expect("nonzero pivot");
        for r in col + 1..n {
            let factor = ff.mul(codes[r * n + col], pinv);
            if factor == 0 {
                continue;
            }
            for j in col..n {
                codes[r * n + j] = ff.sub(codes[r * n + j], ff.mul(factor, codes[col * n + j]));
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant() {
        let f: Field = "p:7".parse().unwrap();
        let m = Matrix::from_strings(
            &f,
            &[
                vec!["1".into(), "2".into(), "0".into()],
                vec!["0".into(), "1".into(), "3".into()],
                vec!["4".into(), "0".into(), "1".into()],
            ],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(&f, 3));
        // det = 1*(1) - 2*(0 - 12) + 0 = 25 = 4 mod 7
        assert_eq!(m.determinant().unwrap(), f.element(4));
        let singular = Matrix::from_strings(
            &f,
            &[vec!["1".into(), "2".into()], vec!["2".into(), "4".into()]],
        )
        .unwrap();
        assert_eq!(singular.inverse(), Err(Error::SingularMatrix));
        assert_eq!(singular.rank(), 1);
    }
}
