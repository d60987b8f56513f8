//! Projective points and transformations, plus enumeration and sampling of
//! invertible matrices.

mod enumerate;
mod matrix;

use std::fmt;

pub use enumerate::{enumerate_invertible, enumerate_invertible_range, gl_order, InvertibleMatrices};
pub use matrix::Matrix;
pub(crate) use matrix::codes_nonsingular;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::rng;

/// A point of projective space, stored with its first nonzero coordinate
/// equal to 1. Points compare lexicographically by coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectivePoint {
    coords: Vec<FieldElement>,
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            match c {
                FieldElement::Finite(x) => write!(f, "{x}")?,
                FieldElement::Rational(r) => write!(f, "{r}")?,
            }
        }
        write!(f, "]")
    }
}

impl ProjectivePoint {
    pub fn new(field: &Field, coords: Vec<FieldElement>) -> Result<ProjectivePoint> {
        let lead = coords
            .iter()
            .find(|c| !field.is_zero(c))
            .ok_or(Error::ZeroPoint)?;
        let inv = field.inv(lead).expect("nonzero");
        Ok(ProjectivePoint {
            coords: coords.iter().map(|c| field.mul(c, &inv)).collect(),
        })
    }

    pub fn from_codes(field: &Field, codes: &[u32]) -> Result<ProjectivePoint> {
        ProjectivePoint::new(field, codes.iter().map(|&c| field.element(c)).collect())
    }

    /// Standard point `e_i` in a space with `len` coordinates.
    pub fn standard(field: &Field, len: usize, i: usize) -> ProjectivePoint {
        let mut coords = vec![field.zero(); len];
        coords[i] = field.one();
        ProjectivePoint { coords }
    }

    /// Parse comma-separated field elements, e.g. `0,0,1`.
    pub fn parse(field: &Field, text: &str) -> Result<ProjectivePoint> {
        let coords = text
            .split(',')
            .map(|s| field.parse_element(s.trim()))
            .collect::<Result<Vec<_>>>()?;
        ProjectivePoint::new(field, coords)
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn codes(&self) -> Vec<u32> {
        self.coords.iter().map(FieldElement::code).collect()
    }

    pub fn to_strings(&self, field: &Field) -> Vec<String> {
        self.coords.iter().map(|c| field.format(c)).collect()
    }

    /// Same point over an extension field.
    pub fn lift(&self, from: &Field, to: &Field) -> Result<ProjectivePoint> {
        Ok(ProjectivePoint {
            coords: self
                .coords
                .iter()
                .map(|c| from.embed(to, c))
                .collect::<Result<_>>()?,
        })
    }

    /// Smallest `j` such that the point is rational over the subfield
    /// `F_{p^j}` of the given finite field.
    pub fn definition_degree(&self, field: &Field) -> u32 {
        let ff = field.finite().expect("finite field");
        let k = ff.degree();
        let p = ff.characteristic() as u64;
        (1..=k)
            .filter(|j| k.is_multiple_of(*j))
            .find(|&j| {
                let e = p.pow(j);
                self.coords.iter().all(|c| ff.pow(c.code(), e) == c.code())
            })
            .unwrap_or(k)
    }

    /// Number of points of `P^{len-1}(F_q)`.
    pub fn count(q: u64, len: usize) -> u128 {
        let q = q as u128;
        (0..len).map(|i| q.pow(i as u32)).sum()
    }

    /// Codes of the point with the given index in canonical order. Points
    /// whose first nonzero coordinate sits further right come first; within a
    /// block the trailing coordinates run lexicographically.
    pub fn unrank_codes(q: u64, len: usize, mut index: u128, out: &mut [u32]) {
        let q128 = q as u128;
        for lead in (0..len).rev() {
            let block = q128.pow((len - 1 - lead) as u32);
            if index < block {
                out[..lead].iter_mut().for_each(|c| *c = 0);
                out[lead] = 1;
                for pos in (lead + 1..len).rev() {
                    out[pos] = (index % q128) as u32;
                    index /= q128;
                }
                return;
            }
            index -= block;
        }
        panic!("point index out of range");
    }

    /// All points of `P^{len-1}` over a finite field, in canonical order.
    pub fn enumerate(field: &Field, len: usize) -> Result<impl Iterator<Item = ProjectivePoint> + '_> {
        let q = field.require_finite()?.order() as u64;
        let total = ProjectivePoint::count(q, len);
        Ok((0..total).map(move |i| {
            let mut codes = vec![0u32; len];
            ProjectivePoint::unrank_codes(q, len, i, &mut codes);
            ProjectivePoint {
                coords: codes.into_iter().map(FieldElement::Finite).collect(),
            }
        }))
    }
}

/// An invertible matrix up to scalars, stored with its first nonzero entry
/// (row-major) equal to 1.
#[derive(Clone, PartialEq, Eq)]
pub struct ProjectiveTransform {
    matrix: Matrix,
}

impl fmt::Debug for ProjectiveTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PT{:?}", self.matrix.to_strings())
    }
}

impl ProjectiveTransform {
    pub fn new(matrix: Matrix) -> Result<ProjectiveTransform> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                got: matrix.cols(),
            });
        }
        if !matrix.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        let f = matrix.field().clone();
        let lead = matrix
            .entries()
            .iter()
            .find(|c| !f.is_zero(c))
            .expect("invertible matrix has a nonzero entry");
        let inv = f.inv(lead).expect("nonzero");
        Ok(ProjectiveTransform {
            matrix: matrix.scale(&inv),
        })
    }

    pub fn from_strings(field: &Field, rows: &[Vec<String>]) -> Result<ProjectiveTransform> {
        ProjectiveTransform::new(Matrix::from_strings(field, rows)?)
    }

    pub fn identity(field: &Field, m: usize) -> ProjectiveTransform {
        ProjectiveTransform {
            matrix: Matrix::identity(field, m),
        }
    }

    pub fn diag(field: &Field, entries: &[FieldElement]) -> Result<ProjectiveTransform> {
        let mut m = Matrix::zeros(field, entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        ProjectiveTransform::new(m)
    }

    /// Permutation matrix exchanging coordinates `i` and `j`.
    pub fn transposition(field: &Field, m: usize, i: usize, j: usize) -> Result<ProjectiveTransform> {
        for idx in [i, j] {
            if idx >= m {
                return Err(Error::IndexOutOfRange { index: idx, size: m });
            }
        }
        let mut mat = Matrix::identity(field, m);
        if i != j {
            mat.set(i, i, field.zero());
            mat.set(j, j, field.zero());
            mat.set(i, j, field.one());
            mat.set(j, i, field.one());
        }
        ProjectiveTransform::new(mat)
    }

    /// Matrix `P` with `P e_k = e_{perm[k]}`.
    pub fn permutation(field: &Field, perm: &[usize]) -> Result<ProjectiveTransform> {
        let m = perm.len();
        let mut mat = Matrix::zeros(field, m, m);
        for (k, &t) in perm.iter().enumerate() {
            if t >= m {
                return Err(Error::IndexOutOfRange { index: t, size: m });
            }
            mat.set(t, k, field.one());
        }
        ProjectiveTransform::new(mat)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn field(&self) -> &Field {
        self.matrix.field()
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &ProjectiveTransform) -> Result<ProjectiveTransform> {
        ProjectiveTransform::new(self.matrix.mul(&other.matrix)?)
    }

    pub fn invert(&self) -> ProjectiveTransform {
        ProjectiveTransform::new(self.matrix.inverse().expect("stored matrices are invertible"))
            .expect("inverse is invertible")
    }

    pub fn pow(&self, e: u32) -> ProjectiveTransform {
        let mut acc = ProjectiveTransform::identity(self.field(), self.size());
        for _ in 0..e {
            acc = acc.compose(self).expect("same size");
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Matrix::identity(self.field(), self.size())
    }

    pub fn apply(&self, p: &ProjectivePoint) -> Result<ProjectivePoint> {
        ProjectivePoint::new(self.field(), self.matrix.apply(p.coords())?)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.matrix.to_strings()
    }

    pub fn lift(&self, target: &Field) -> Result<ProjectiveTransform> {
        Ok(ProjectiveTransform {
            matrix: self.matrix.lift(target)?,
        })
    }
}

/// A transform `T` with `T(points[i]) = e_{m-1-i}`. The matrix `T^{-1}`
/// carries `points[i]` in column `m-1-i`; its other columns are the first
/// standard vectors (by index) that keep the columns independent, placed in
/// increasing column order.
pub fn basis_completion(field: &Field, points: &[ProjectivePoint], m: usize) -> Result<ProjectiveTransform> {
    if points.len() > m {
        return Err(Error::DependentPoints);
    }
    for p in points {
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.len(),
            });
        }
    }
    let mut chosen: Vec<Vec<FieldElement>> = points.iter().map(|p| p.coords().to_vec()).collect();
    if rank_of(field, &chosen) < chosen.len() {
        return Err(Error::DependentPoints);
    }
    let mut fillers = Vec::new();
    for i in 0..m {
        if chosen.len() == m {
            break;
        }
        let e = ProjectivePoint::standard(field, m, i).coords;
        chosen.push(e.clone());
        if rank_of(field, &chosen) == chosen.len() {
            fillers.push(e);
        } else {
            chosen.pop();
        }
    }
    let mut a = Matrix::zeros(field, m, m);
    for (i, p) in points.iter().enumerate() {
        for (r, c) in p.coords().iter().enumerate() {
            a.set(r, m - 1 - i, c.clone());
        }
    }
    for (col, v) in fillers.iter().enumerate() {
        for (r, c) in v.iter().enumerate() {
            a.set(r, col, c.clone());
        }
    }
    ProjectiveTransform::new(a.inverse()?)
}

fn rank_of(field: &Field, rows: &[Vec<FieldElement>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let data = rows.iter().flatten().cloned().collect();
    Matrix::new(field, rows.len(), cols, data).expect("rectangular").rank()
}

/// Uniform random invertible matrix (rejection sampling), deterministic in
/// `seed`. Entries are drawn row-major with [`rng::uniform`].
pub fn random_invertible_matrix(field: &Field, m: usize, seed: u64) -> Result<Matrix> {
    let ff = field.require_finite()?;
    let q = ff.order() as u64;
    let mut r = rng::rng(seed);
    loop {
        let codes: Vec<u32> = (0..m * m).map(|_| rng::uniform(&mut r, q) as u32).collect();
        let mut scratch = codes.clone();
        if codes_nonsingular(ff, m, &mut scratch) {
            return Ok(Matrix::from_codes(field, m, &codes));
        }
    }
}

pub fn random_invertible(field: &Field, m: usize, seed: u64) -> Result<ProjectiveTransform> {
    ProjectiveTransform::new(random_invertible_matrix(field, m, seed)?)
}
