//! Sparse homogeneous multivariate polynomials.
//!
//! Terms are keyed by exponent vectors and kept in graded-lexicographic
//! order with `x0 > x1 > ...`. Zero coefficients are never stored.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::projlin::Matrix;

pub use parse::{infer_nvars, parse};

pub type Exponents = SmallVec<[u16; 8]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Exponents);

impl Monomial {
    pub fn new(exponents: &[u16]) -> Monomial {
        Monomial(exponents.iter().copied().collect())
    }

    pub fn one(nvars: usize) -> Monomial {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize, e: u16) -> Monomial {
        let mut m = Monomial::one(nvars);
        m.0[i] = e;
        m
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    fn text(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
            .collect();
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.text();
        write!(f, "{}", if t.is_empty() { "1" } else { &t })
    }
}

/// All monomials of the given degree in `nvars` variables, ascending.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, i: usize, left: u32, cur: &mut Exponents, out: &mut Vec<Monomial>) {
        if i == nvars - 1 {
            cur[i] = left as u16;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e as u16;
            rec(nvars, i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    let mut cur = SmallVec::from_elem(0, nvars);
    rec(nvars, 0, degree, &mut cur, &mut out);
    out.sort();
    out
}

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({} over {}, {} vars)", self.to_text(), self.field, self.nvars)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn add_term(field: &Field, terms: &mut BTreeMap<Monomial, FieldElement>, m: Monomial, c: FieldElement) {
    use std::collections::btree_map::Entry;
    if field.is_zero(&c) {
        return;
    }
    match terms.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = field.add(o.get(), &c);
            if field.is_zero(&s) {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

impl Polynomial {
    pub fn zero(field: &Field, nvars: usize, degree: u32) -> Polynomial {
        Polynomial {
            field: field.clone(),
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, nvars: usize, c: FieldElement) -> Polynomial {
        let mut p = Polynomial::zero(field, nvars, 0);
        add_term(field, &mut p.terms, Monomial::one(nvars), c);
        p
    }

    /// `c * x_i^e`.
    pub fn var_power(field: &Field, nvars: usize, i: usize, e: u16, c: FieldElement) -> Polynomial {
        let mut p = Polynomial::zero(field, nvars, e as u32);
        add_term(field, &mut p.terms, Monomial::var(nvars, i, e), c);
        p
    }

    pub fn var(field: &Field, nvars: usize, i: usize) -> Polynomial {
        Polynomial::var_power(field, nvars, i, 1, field.one())
    }

    /// Linear form `sum_j coeffs[j] * x_j`.
    pub fn linear(field: &Field, coeffs: &[FieldElement]) -> Polynomial {
        let n = coeffs.len();
        let mut p = Polynomial::zero(field, n, 1);
        for (j, c) in coeffs.iter().enumerate() {
            add_term(field, &mut p.terms, Monomial::var(n, j, 1), c.clone());
        }
        p
    }

    /// Build from terms, summing duplicates. All monomials must share one
    /// total degree; `degree` is used when there are no nonzero terms.
    pub fn from_terms<I>(field: &Field, nvars: usize, degree: u32, terms: I) -> Result<Polynomial>
    where
        I: IntoIterator<Item = (Monomial, FieldElement)>,
    {
        let mut p = Polynomial::zero(field, nvars, degree);
        let mut first: Option<Monomial> = None;
        for (m, c) in terms {
            if m.0.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: m.0.len(),
                });
            }
            match &first {
                None => {
                    p.degree = m.degree();
                    first = Some(m.clone());
                }
                Some(f) if f.degree() != m.degree() => {
                    return Err(Error::NotHomogeneous {
                        first: f.text(),
                        first_degree: f.degree(),
                        second: m.text(),
                        second_degree: m.degree(),
                    });
                }
                Some(_) => {}
            }
            add_term(field, &mut p.terms, m, c);
        }
        Ok(p)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Largest monomial and its coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, &FieldElement)> {
        self.terms.iter().next_back()
    }

    /// Variables that occur with positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            let (a, b) = (self.leading_term().unwrap().0, other.leading_term().unwrap().0);
            return Err(Error::NotHomogeneous {
                first: a.text(),
                first_degree: self.degree,
                second: b.text(),
                second_degree: other.degree,
            });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_term(&self.field, &mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&self.field.from_i64(-1))
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Polynomial {
        let f = &self.field;
        if f.is_zero(c) {
            return Polynomial::zero(f, self.nvars, self.degree);
        }
        Polynomial {
            field: f.clone(),
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), f.mul(x, c))).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let f = &self.field;
        let mut out = Polynomial::zero(f, self.nvars, self.degree + other.degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                add_term(f, &mut out.terms, ma.mul(mb), f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(&self.field, self.nvars, self.field.one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.0.iter()) {
                if e > 0 {
                    t = f.mul(&t, &f.pow(x, e as u64));
                }
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let f = &self.field;
        let mut out = Polynomial::zero(f, self.nvars, self.degree.saturating_sub(1));
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] -= 1;
            add_term(f, &mut out.terms, dm, f.mul(c, &f.from_i64(e as i64)));
        }
        Ok(out)
    }

    /// `F(M x)`: substitute `x_i <- sum_j M[i][j] x_j`.
    pub fn apply_linear(&self, m: &Matrix) -> Result<Polynomial> {
        if m.field() != &self.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", m.field(), self.field)));
        }
        if m.rows() != self.nvars || m.cols() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: m.rows(),
            });
        }
        if !m.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        Ok(self.substitute_forms(m))
    }

    /// Substitution without the invertibility check.
    pub(crate) fn substitute_forms(&self, m: &Matrix) -> Polynomial {
        let f = &self.field;
        let n = self.nvars;
        let forms: Vec<Polynomial> = (0..n)
            .map(|i| {
                let row: Vec<FieldElement> = (0..n).map(|j| m.get(i, j).clone()).collect();
                Polynomial::linear(f, &row)
            })
            .collect();
        let mut powers: Vec<Vec<Polynomial>> = forms
            .iter()
            .map(|l| vec![Polynomial::constant(f, n, f.one()), l.clone()])
            .collect();
        let mut out = Polynomial::zero(f, n, self.degree);
        for (mono, c) in &self.terms {
            let mut acc = Polynomial::constant(f, n, c.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&forms[i]).expect("same ring");
                    powers[i].push(next);
                }
                acc = acc.mul(&powers[i][e as usize]).expect("same ring");
            }
            for (tm, tc) in acc.terms {
                add_term(f, &mut out.terms, tm, tc);
            }
        }
        out
    }

    /// `F` with `x_i <- x_i + L`, expanded binomially (independent of
    /// [`Polynomial::apply_linear`]).
    pub fn shear_substitute(&self, i: usize, l: &Polynomial) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::VariableOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        self.check_compatible(l)?;
        if !l.is_zero() && l.degree != 1 {
            return Err(Error::NotLinear);
        }
        if l.terms.keys().any(|m| m.0[i] > 0) {
            return Err(Error::SelfReference(i));
        }
        let f = &self.field;
        let n = self.nvars;
        let mut l_powers = vec![Polynomial::constant(f, n, f.one())];
        let mut out = Polynomial::zero(f, n, self.degree);
        for (mono, c) in &self.terms {
            let e = mono.0[i] as u32;
            let mut rest = mono.clone();
            rest.0[i] = 0;
            while l_powers.len() <= e as usize {
                let next = l_powers.last().unwrap().mul(l).expect("same ring");
                l_powers.push(next);
            }
            let mut binom = 1u64;
            for k in 0..=e {
                // C(e, k) x_i^(e-k) L^k
                let coef = f.mul(c, &f.from_i64(binom as i64));
                let mut base = rest.clone();
                base.0[i] = (e - k) as u16;
                for (lm, lc) in &l_powers[k as usize].terms {
                    add_term(f, &mut out.terms, base.mul(lm), f.mul(&coef, lc));
                }
                binom = binom * (e - k) as u64 / (k + 1) as u64;
            }
        }
        Ok(out)
    }

    /// Scale so the coefficient of the largest monomial is 1.
    pub fn canonical_scalar(&self) -> Result<Polynomial> {
        let (_, c) = self.leading_term().ok_or(Error::ZeroPolynomial)?;
        let inv = self.field.inv(c).expect("stored coefficients are nonzero");
        Ok(self.scale(&inv))
    }

    /// Coefficients of `x_var^j` for `j = 0..=degree`, each a polynomial in
    /// the remaining `nvars - 1` variables (order preserved).
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let f = &self.field;
        let mut out: Vec<Polynomial> = (0..=self.degree)
            .map(|j| Polynomial::zero(f, self.nvars - 1, self.degree - j))
            .collect();
        for (m, c) in &self.terms {
            let j = m.0[var] as usize;
            let mut rest = m.0.clone();
            rest.remove(var);
            add_term(f, &mut out[j].terms, Monomial(rest), c.clone());
        }
        out
    }

    /// Insert a new variable (exponent 0 everywhere) at position `pos`.
    pub fn insert_variable(&self, pos: usize) -> Polynomial {
        Polynomial {
            field: self.field.clone(),
            nvars: self.nvars + 1,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.insert(pos, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Drop a variable that does not occur.
    pub fn remove_variable(&self, pos: usize) -> Result<Polynomial> {
        if self.terms.keys().any(|m| m.0[pos] > 0) {
            return Err(Error::SelfReference(pos));
        }
        Ok(Polynomial {
            field: self.field.clone(),
            nvars: self.nvars - 1,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.remove(pos);
                    (Monomial(e), c.clone())
                })
                .collect(),
        })
    }

    /// Same polynomial over an extension field.
    pub fn lift(&self, target: &Field) -> Result<Polynomial> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.clone(), self.field.embed(target, c)?);
        }
        Ok(Polynomial {
            field: target.clone(),
            nvars: self.nvars,
            degree: self.degree,
            terms,
        })
    }

    /// Canonical text, largest monomial first.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let f = &self.field;
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let negative = matches!(c, FieldElement::Rational(r) if r.numer() < &0.into());
            let abs = if negative { f.neg(c) } else { c.clone() };
            if negative {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            let mono = m.text();
            let coef = if f.is_plain(&abs) {
                f.format(&abs)
            } else {
                format!("({})", f.format(&abs))
            };
            match (f.is_one(&abs), mono.is_empty()) {
                (_, true) => out.push_str(&coef),
                (true, false) => out.push_str(&mono),
                (false, false) => {
                    out.push_str(&coef);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }

    /// Compiled form for fast evaluation over finite fields.
    pub fn compile(&self) -> Option<CompiledPoly> {
        self.field.finite()?;
        Some(CompiledPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (c.code(), m.0.clone()))
                .collect(),
        })
    }
}

/// Finite-field polynomial in a flat layout for hot evaluation loops.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    field: Field,
    nvars: usize,
    degree: u32,
    terms: Vec<(u32, Exponents)>,
}

impl CompiledPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Evaluate at a point given as element codes. `scratch` is reused
    /// between calls to hold power tables.
    pub fn eval(&self, point: &[u32], scratch: &mut Vec<u32>) -> u32 {
        let ff = self.field.finite().expect("compiled polynomials are finite");
        let width = self.degree as usize + 1;
        scratch.clear();
        scratch.resize(self.nvars * width, 1);
        for (i, &x) in point.iter().enumerate() {
            let row = &mut scratch[i * width..(i + 1) * width];
            for e in 1..width {
                row[e] = ff.mul(row[e - 1], x);
            }
        }
        let mut acc = 0u32;
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t = ff.mul(t, scratch[i * width + e as usize]);
                    if t == 0 {
                        break;
                    }
                }
            }
            acc = ff.add(acc, t);
        }
        acc
    }

    /// Coefficients (constant first) of `t -> F(t * p + y)`, a univariate
    /// polynomial of degree at most `degree`.
    pub fn along_line(&self, p: &[u32], y: &[u32], out: &mut Vec<u32>) {
        let ff = self.field.finite().expect("compiled polynomials are finite");
        let d = self.degree as usize;
        out.clear();
        out.resize(d + 1, 0);
        let mut prod = vec![0u32; d + 1];
        let mut tmp = vec![0u32; d + 1];
        for (c, exps) in &self.terms {
            prod.iter_mut().for_each(|x| *x = 0);
            prod[0] = *c;
            let mut len = 1;
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    // multiply by (y_i + p_i t)
                    tmp[..=len].iter_mut().for_each(|x| *x = 0);
                    for k in 0..len {
                        tmp[k] = ff.add(tmp[k], ff.mul(prod[k], y[i]));
                        tmp[k + 1] = ff.add(tmp[k + 1], ff.mul(prod[k], p[i]));
                    }
                    len += 1;
                    prod[..len].copy_from_slice(&tmp[..len]);
                }
            }
            for k in 0..len {
                out[k] = ff.add(out[k], prod[k]);
            }
        }
    }
}
