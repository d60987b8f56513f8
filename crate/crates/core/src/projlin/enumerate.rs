//! Exhaustive enumeration of `GL_m(F_q)` in row-major lexicographic order.
//!
//! Lexicographic order on whole matrices is lexicographic order on the row
//! sequence, and the number of ways to finish a matrix whose first `k` rows
//! are independent does not depend on those rows. That gives an exact
//! ranking, so any index range can be enumerated on its own and ranges
//! concatenate to the full sequence.

use std::ops::Range;

use super::Matrix;
use crate::error::{Error, Result};
use crate::field::{Field, FiniteField};

/// `|GL_m(F_q)| = prod_{i<m} (q^m - q^i)`, saturating at `u128::MAX`.
pub fn gl_order(q: u64, m: usize) -> u128 {
    let q = q as u128;
    let Some(qm) = q.checked_pow(m as u32) else {
        return u128::MAX;
    };
    let mut acc: u128 = 1;
    for i in 0..m {
        let f = qm - q.pow(i as u32);
        acc = match acc.checked_mul(f) {
            Some(v) => v,
            None => return u128::MAX,
        };
    }
    acc
}

/// Every invertible `m x m` matrix over `field`, in row-major lexicographic
/// order of entry codes.
pub fn enumerate_invertible(field: &Field, m: usize, cap: u128) -> Result<InvertibleMatrices> {
    let q = field.require_finite()?.order() as u64;
    let order = gl_order(q, m);
    if order > cap {
        return Err(Error::CapExceeded { order, cap });
    }
    enumerate_invertible_range(field, m, 0..order)
}

/// The matrices with enumeration indices in `range`.
pub fn enumerate_invertible_range(field: &Field, m: usize, range: Range<u128>) -> Result<InvertibleMatrices> {
    let ff = field.require_finite()?;
    let q = ff.order() as u64;
    let order = gl_order(q, m);
    let end = range.end.min(order);
    let start = range.start.min(end);
    let mut it = InvertibleMatrices {
        field: field.clone(),
        m,
        q,
        qm: (q as usize).pow(m as u32),
        rows: vec![0; m],
        spans: vec![Vec::new(); m],
        codes: vec![0; m * m],
        next_index: start,
        end,
        fresh: true,
    };
    if start < end && m > 0 {
        it.unrank(start);
    }
    Ok(it)
}

pub struct InvertibleMatrices {
    field: Field,
    m: usize,
    q: u64,
    qm: usize,
    /// Vector index of each row (first coordinate most significant).
    rows: Vec<usize>,
    /// `spans[k][v]` is true when vector `v` lies in the span of rows `0..k`.
    spans: Vec<Vec<bool>>,
    codes: Vec<u32>,
    next_index: u128,
    end: u128,
    fresh: bool,
}

impl InvertibleMatrices {
    /// Matrices left in this range.
    pub fn remaining(&self) -> u128 {
        self.end - self.next_index
    }

    /// Index of the matrix most recently returned.
    pub fn current_index(&self) -> u128 {
        self.next_index - 1
    }

    fn ff(&self) -> &FiniteField {
        self.field.finite().expect("finite")
    }

    fn completions(&self, k: usize) -> u128 {
        let q = self.q as u128;
        let qm = self.qm as u128;
        (k..self.m).map(|i| qm - q.pow(i as u32)).product()
    }

    fn write_row(&mut self, k: usize) {
        let m = self.m;
        let mut v = self.rows[k];
        for j in (0..m).rev() {
            self.codes[k * m + j] = (v % self.q as usize) as u32;
            v /= self.q as usize;
        }
    }

    /// Recompute `spans[k + 1]` after row `k` changed.
    fn extend_span(&mut self, k: usize) {
        if k + 1 >= self.m {
            return;
        }
        let m = self.m;
        let q = self.q as usize;
        let row: Vec<u32> = self.codes[k * m..(k + 1) * m].to_vec();
        let members: Vec<usize> = (0..self.qm).filter(|&v| self.spans[k][v]).collect();
        let mut next = vec![false; self.qm];
        let mut digits = vec![0u32; m];
        for &s in &members {
            let mut t = s;
            for j in (0..m).rev() {
                digits[j] = (t % q) as u32;
                t /= q;
            }
            for c in 0..q as u32 {
                let mut idx = 0usize;
                for j in 0..m {
                    let x = self.ff().add(digits[j], self.ff().mul(c, row[j]));
                    idx = idx * q + x as usize;
                }
                next[idx] = true;
            }
        }
        self.spans[k + 1] = next;
    }

    fn base_span(&mut self) {
        let mut s = vec![false; self.qm];
        s[0] = true;
        self.spans[0] = s;
    }

    fn unrank(&mut self, mut index: u128) {
        self.base_span();
        for k in 0..self.m {
            let c = self.completions(k + 1);
            let mut j = index / c;
            index %= c;
            let mut v = 0;
            loop {
                if !self.spans[k][v] {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                }
                v += 1;
            }
            self.rows[k] = v;
            self.write_row(k);
            self.extend_span(k);
        }
    }

    /// First admissible vector for row `k` at or after `from`.
    fn seek(&self, k: usize, from: usize) -> Option<usize> {
        (from..self.qm).find(|&v| !self.spans[k][v])
    }

    fn advance(&mut self) {
        let mut k = self.m - 1;
        loop {
            if let Some(v) = self.seek(k, self.rows[k] + 1) {
                self.rows[k] = v;
                self.write_row(k);
                self.extend_span(k);
                break;
            }
            assert!(k > 0, "advanced past the last matrix");
            k -= 1;
        }
        for r in k + 1..self.m {
            self.rows[r] = self.seek(r, 0).expect("a complement vector exists");
            self.write_row(r);
            self.extend_span(r);
        }
    }

    /// Entry codes (row-major) of the next matrix.
    pub fn next_codes(&mut self) -> Option<&[u32]> {
        if self.next_index >= self.end {
            return None;
        }
        if self.m == 0 {
            self.next_index += 1;
            return Some(&self.codes);
        }
        if !self.fresh {
            self.advance();
        }
        self.fresh = false;
        self.next_index += 1;
        Some(&self.codes)
    }
}

impl Iterator for InvertibleMatrices {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        let m = self.m;
        let field = self.field.clone();
        self.next_codes().map(|c| Matrix::from_codes(&field, m, c))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining()).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}
