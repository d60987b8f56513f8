//! Outer Galois points.
//!
//! A point `P` off `X = V(F)` is tested through the normal form: move `P` to
//! `[0:...:0:1]`, write `F = c_0 x^d + c_1 x^{d-1} + ... + c_d` in the last
//! variable, scale `c_0` to 1 and shear `x <- x - c_1/d`. `P` is an outer
//! Galois point exactly when every middle coefficient then vanishes, leaving
//! `x^d + G`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::hypersurface::{scan_points, Hypersurface};
use crate::poly::{CompiledPoly, Monomial, Polynomial};
use crate::projlin::{basis_completion, Matrix, ProjectivePoint, ProjectiveTransform};

#[derive(Clone, Debug)]
pub struct TschirnhausResult {
    /// `M` with `F(M x) ∝ normalized`; it sends `[0:...:0:1]` to `P`.
    pub transform: ProjectiveTransform,
    /// `x_last^d + sum_i c_i x_last^{d-i} + G`.
    pub normalized: Polynomial,
    /// `c_1, ..., c_{d-1}` in the first `nvars - 1` variables.
    pub coefficients: Vec<Polynomial>,
    /// `G` in the first `nvars - 1` variables.
    pub tail: Polynomial,
}

impl TschirnhausResult {
    pub fn is_pure(&self) -> bool {
        self.coefficients.iter().all(Polynomial::is_zero)
    }
}

/// Matrix of `x_j <- x_j + L`.
pub(crate) fn shear_matrix(field: &Field, n: usize, j: usize, l: &Polynomial) -> Matrix {
    let mut s = Matrix::identity(field, n);
    for (m, c) in l.terms() {
        let k = m.exponents().iter().position(|&e| e == 1).expect("linear");
        s.set(j, k, c.clone());
    }
    s
}

/// Constant value of a degree-0 polynomial.
fn constant_of(p: &Polynomial) -> FieldElement {
    p.terms()
        .next()
        .map(|(_, c)| c.clone())
        .unwrap_or_else(|| p.field().zero())
}

/// Shear `x_j <- x_j - c_1 / (d c_0)` on `f`, where `f = c_0 x_j^d + c_1 x_j^{d-1} + ...`.
/// Returns the sheared polynomial and the shear matrix.
fn shear_out(f: &Polynomial, j: usize) -> Result<(Polynomial, Matrix)> {
    let field = f.field();
    let d = f.degree() as usize;
    let cs = f.coefficients_in(j);
    let c0 = constant_of(&cs[d]);
    let denom = field.mul(&c0, &field.from_i64(d as i64));
    let factor = field
        .inv(&denom)
        .ok_or_else(|| Error::ShapeVerificationFailed(format!("x{j}^{d} has coefficient zero")))?;
    let l = cs[d - 1].insert_variable(j).scale(&field.neg(&factor));
    let sheared = f.shear_substitute(j, &l)?;
    Ok((sheared, shear_matrix(field, f.nvars(), j, &l)))
}

pub fn tschirnhaus(x: &Hypersurface, p: &ProjectivePoint) -> Result<TschirnhausResult> {
    let field = x.field();
    let n = x.nvars();
    let d = x.degree();
    if p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.len() });
    }
    field.check_degree_coprime(d as u64)?;
    if d < 2 {
        return Err(Error::InvalidDegree(d));
    }
    let value = x.equation().evaluate(p.coords())?;
    if field.is_zero(&value) {
        return Err(Error::PointOnHypersurface);
    }
    let a = basis_completion(field, std::slice::from_ref(p), n)?.invert();
    let f1 = x.equation().apply_linear(a.matrix())?;
    let last = n - 1;
    let c0 = constant_of(&f1.coefficients_in(last)[d as usize]);
    let f1 = f1.scale(&field.inv(&c0).expect("F(P) != 0"));
    let (f2, s) = shear_out(&f1, last)?;
    let cs = f2.coefficients_in(last);
    let coefficients = (1..d as usize).map(|i| cs[d as usize - i].clone()).collect();
    Ok(TschirnhausResult {
        transform: ProjectiveTransform::new(a.matrix().mul(&s)?)?,
        normalized: f2,
        coefficients,
        tail: cs[0].clone(),
    })
}

pub fn is_outer_galois(x: &Hypersurface, p: &ProjectivePoint) -> Result<bool> {
    Ok(tschirnhaus(x, p)?.is_pure())
}

/// Necessary condition checked on a few lines through `P`: along the line
/// `t -> tP + y` an outer Galois point forces `F = a (t + l)^d + b`.
struct LineFilter {
    poly: CompiledPoly,
    d: usize,
    /// `d` and the binomials `C(d, j)` as element codes.
    d_code: u32,
    binom: Vec<u32>,
    directions: Vec<Vec<u32>>,
}

impl LineFilter {
    fn new(f: &Polynomial) -> LineFilter {
        let field = f.field();
        let n = f.nvars();
        let d = f.degree() as usize;
        let mut binom = vec![1u64; d + 1];
        for j in 1..=d {
            binom[j] = binom[j - 1] * (d - j + 1) as u64 / j as u64;
        }
        let mut directions: Vec<Vec<u32>> = (0..n)
            .map(|i| (0..n).map(|k| (k == i) as u32).collect())
            .collect();
        directions.push(vec![1; n]);
        directions.push((0..n).map(|k| (k % 2) as u32).collect());
        LineFilter {
            poly: f.compile().expect("finite"),
            d,
            d_code: field.from_i64(d as i64).code(),
            binom: binom.iter().map(|&b| field.from_i64(b as i64).code()).collect(),
            directions,
        }
    }

    fn passes(&self, field: &Field, p: &[u32], line: &mut Vec<u32>) -> bool {
        let ff = field.finite().expect("finite");
        let d = self.d;
        for y in &self.directions {
            self.poly.along_line(p, y, line);
            let a = line[d];
            if a == 0 {
                return false;
            }
            let l = ff.mul(line[d - 1], ff.inv(ff.mul(a, self.d_code)).expect("gcd(p, d) = 1"));
            let mut lp = ff.mul(l, l);
            for j in (1..d - 1).rev() {
                // coefficient of t^j is a C(d, j) l^{d-j}
                if line[j] != ff.mul(a, ff.mul(self.binom[j], lp)) {
                    return false;
                }
                lp = ff.mul(lp, l);
            }
        }
        true
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisPoint {
    /// Smallest extension degree over which the point is rational.
    pub k: u32,
    pub point: Vec<String>,
    #[serde(skip)]
    pub value: ProjectivePoint,
    #[serde(skip)]
    pub field: Field,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisReport {
    pub degree: u32,
    pub points: Vec<GaloisPoint>,
    pub search_extension_max: u32,
    pub search_complete_over_searched_fields: bool,
    /// Outer Galois points rational over the searched fields: a lower bound
    /// for the count over the algebraic closure.
    pub delta_lower_bound: usize,
    /// `n + 2` for a hypersurface in `P^{n+1}`.
    pub bound: usize,
    pub group_structure_note: String,
    /// Set for `d < 3`, where the count bound and normal form do not apply.
    pub structure_theorem_inapplicable: bool,
}

impl GaloisReport {
    /// Points rational over the hypersurface's own field.
    pub fn rational_points(&self) -> Vec<ProjectivePoint> {
        self.points.iter().filter(|p| p.k == 1).map(|p| p.value.clone()).collect()
    }

    pub fn rational_count(&self) -> usize {
        self.points.iter().filter(|p| p.k == 1).count()
    }

    pub fn bound_violated(&self) -> bool {
        !self.structure_theorem_inapplicable && self.delta_lower_bound > self.bound
    }
}

/// Outer Galois points of `X` rational over `F_{p^k}` for `k <= ext_max`,
/// each listed once under its smallest such `k`.
pub fn galois_points(x: &Hypersurface, k: u32, cap: u128) -> Result<Vec<ProjectivePoint>> {
    let field = x.field_of_degree(k)?;
    let xk = x.lift(&field)?;
    let filter = LineFilter::new(xk.equation());
    let candidates = scan_points(&field, x.nvars(), cap, |pt, line| filter.passes(&field, pt, line))?;
    let mut out = Vec::new();
    for p in candidates {
        if is_outer_galois(&xk, &p)? {
            out.push(p);
        }
    }
    Ok(out)
}

pub fn enumerate_galois(x: &Hypersurface, ext_max: u32, cap: u128) -> Result<GaloisReport> {
    let d = x.degree();
    x.field().check_degree_coprime(d as u64)?;
    let mut points = Vec::new();
    for k in 1..=ext_max {
        let field = x.field_of_degree(k)?;
        for p in galois_points(x, k, cap)? {
            if p.definition_degree(&field) < k {
                continue;
            }
            points.push(GaloisPoint {
                k,
                point: p.to_strings(&field),
                value: p,
                field: field.clone(),
            });
        }
    }
    Ok(GaloisReport {
        degree: d,
        delta_lower_bound: points.len(),
        points,
        search_extension_max: ext_max,
        search_complete_over_searched_fields: true,
        bound: x.nvars(),
        group_structure_note: format!("cyclic of order {d}"),
        structure_theorem_inapplicable: d < 3,
    })
}

/// Shape `x_{N-1}^d + a_1 x_{N-2}^d + ... + a_r x_{N-1-r}^d + G(x_0, ..., x_{N-2-r})`.
#[derive(Clone, Debug)]
pub struct StructureForm {
    /// `T` with `F(T x) ∝ normalized`.
    pub transform: ProjectiveTransform,
    pub r: usize,
    /// `G` in the first `N - 1 - r` variables.
    pub tail: Polynomial,
    /// `1, a_1, ..., a_r`: coefficients of `x_{N-1}^d, ..., x_{N-1-r}^d`.
    /// Each `a_i` is the smallest element of its class modulo `d`-th powers.
    pub fermat_coefficients: Vec<FieldElement>,
    pub normalized: Polynomial,
}

/// Smallest element of `a * (K^*)^d` (finite fields); over `Q`, 1 when `a`
/// is a `d`-th power and `a` otherwise.
pub(crate) fn power_class_rep(field: &Field, a: &FieldElement, d: u64) -> FieldElement {
    match field.finite() {
        Some(ff) => {
            let ainv = field.inv(a).expect("nonzero");
            (1..ff.order())
                .map(|c| field.element(c))
                .find(|c| field.nth_root(&field.mul(c, &ainv), d).is_some())
                .expect("a itself qualifies")
        }
        None => {
            if field.nth_root(a, d).is_some() {
                field.one()
            } else {
                a.clone()
            }
        }
    }
}

pub fn structure_normalize(x: &Hypersurface, points: &[ProjectivePoint]) -> Result<StructureForm> {
    let field = x.field();
    let n = x.nvars();
    let d = x.degree();
    if points.is_empty() {
        return Err(Error::ShapeVerificationFailed("no Galois points supplied".into()));
    }
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let r = pts.len() - 1;
    let a = basis_completion(field, &pts, n)?.invert();
    let mut m = a.matrix().clone();
    let mut f = x.equation().apply_linear(&m)?;
    for i in 0..=r {
        let (g, s) = shear_out(&f, n - 1 - i)?;
        f = g;
        m = m.mul(&s)?;
    }
    let lead = f.coefficient(&Monomial::var(n, n - 1, d as u16));
    f = f.scale(&field.inv(&lead).expect("nonzero after shear"));
    let mut scaling = vec![field.one(); n];
    for i in 1..=r {
        let j = n - 1 - i;
        let c = f.coefficient(&Monomial::var(n, j, d as u16));
        if field.is_zero(&c) {
            return Err(Error::ShapeVerificationFailed(format!("x{j}^{d} vanished")));
        }
        let rep = power_class_rep(field, &c, d as u64);
        scaling[j] = field
            .nth_root(&field.div(&rep, &c).expect("nonzero"), d as u64)
            .expect("same power class");
    }
    let diag = ProjectiveTransform::diag(field, &scaling)?;
    f = f.apply_linear(diag.matrix())?;
    m = m.mul(diag.matrix())?;

    let tail_vars = n - 1 - r;
    let mut fermat_coefficients = Vec::with_capacity(r + 1);
    for i in 0..=r {
        fermat_coefficients.push(f.coefficient(&Monomial::var(n, n - 1 - i, d as u16)));
    }
    for (mono, _) in f.terms() {
        let e = mono.exponents();
        let pure_block = (tail_vars..n).any(|j| e[j] as u32 == d);
        let tail_only = e[tail_vars..].iter().all(|&x| x == 0);
        if !pure_block && !tail_only {
            return Err(Error::ShapeVerificationFailed(format!(
                "unexpected term {mono:?} after normalization"
            )));
        }
    }
    let mut tail = f.clone();
    for (i, c) in fermat_coefficients.iter().enumerate() {
        tail = tail.sub(&Polynomial::var_power(field, n, n - 1 - i, d as u16, c.clone()))?;
    }
    for j in (tail_vars..n).rev() {
        tail = tail.remove_variable(j)?;
    }
    let transform = ProjectiveTransform::new(m)?;
    // Independent re-check of the whole transform by direct substitution.
    let direct = x.equation().apply_linear(transform.matrix())?.canonical_scalar()?;
    if direct != f.canonical_scalar()? {
        return Err(Error::ShapeVerificationFailed("transform does not reproduce the form".into()));
    }
    Ok(StructureForm {
        transform,
        r,
        tail,
        fermat_coefficients,
        normalized: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::DEFAULT_POINT_CAP;
    use crate::poly::parse;
    use crate::projlin::random_invertible;

    fn f(s: &str) -> Field {
        s.parse().unwrap()
    }

    fn hs(field: &Field, text: &str, n: usize) -> Hypersurface {
        Hypersurface::parse(field, text, n).unwrap()
    }

    fn pt(field: &Field, codes: &[u32]) -> ProjectivePoint {
        ProjectivePoint::from_codes(field, codes).unwrap()
    }

    #[test]
    fn tschirnhaus_examples() {
        let f7 = f("p:7");
        let x = hs(&f7, "x2^3+3*x0*x2^2+3*x0^2*x2+2*x0^3+x1^3", 3);
        let t = tschirnhaus(&x, &pt(&f7, &[0, 0, 1])).unwrap();
        assert!(t.is_pure());
        assert_eq!(t.tail, parse("x0^3+x1^3", 2, &f7).unwrap());

        let fermat = hs(&f7, "x0^3+x1^3+x2^3", 3);
        let t = tschirnhaus(&fermat, &pt(&f7, &[0, 0, 1])).unwrap();
        assert!(t.is_pure());
        assert_eq!(t.tail, parse("x0^3+x1^3", 2, &f7).unwrap());

        let hesse = hs(&f7, "x0^3+x1^3+x2^3+3*x0*x1*x2", 3);
        let t = tschirnhaus(&hesse, &pt(&f7, &[0, 0, 1])).unwrap();
        assert!(t.coefficients[0].is_zero());
        assert_eq!(t.coefficients[1], parse("3*x0*x1", 2, &f7).unwrap());
        assert_eq!(t.tail, parse("x0^3+x1^3", 2, &f7).unwrap());
        assert!(!is_outer_galois(&hesse, &pt(&f7, &[0, 0, 1])).unwrap());

        // 3 is a cube root of -1 mod 7, so [1:3:0] lies on the Fermat cubic.
        assert!(matches!(
            tschirnhaus(&fermat, &pt(&f7, &[1, 3, 0])),
            Err(Error::PointOnHypersurface)
        ));
    }

    #[test]
    fn reconstruction_identity() {
        let f13 = f("p:13");
        let x = hs(&f13, "x0^3+2*x1^3+x2^3+5*x0*x1*x2+x1^2*x2", 3);
        for p in ProjectivePoint::enumerate(&f13, 3).unwrap().take(60) {
            if x.contains(&p).unwrap() {
                continue;
            }
            let t = tschirnhaus(&x, &p).unwrap();
            let direct = x.equation().apply_linear(t.transform.matrix()).unwrap();
            assert_eq!(direct.canonical_scalar().unwrap(), t.normalized.canonical_scalar().unwrap());
            assert!(t.coefficients[0].is_zero());
            assert_eq!(t.transform.apply(&ProjectivePoint::standard(&f13, 3, 2)).unwrap(), p);
        }
    }

    #[test]
    fn fermat_surface_galois_points() {
        let f13 = f("p:13");
        let x = hs(&f13, "x0^3+x1^3+x2^3+x3^3", 4);
        assert!(is_outer_galois(&x, &pt(&f13, &[0, 0, 0, 1])).unwrap());
        assert!(is_outer_galois(&x, &pt(&f13, &[0, 0, 1, 0])).unwrap());
        let report = enumerate_galois(&x, 1, DEFAULT_POINT_CAP).unwrap();
        let expected: Vec<_> = (0..4).rev().map(|i| ProjectivePoint::standard(&f13, 4, i)).collect();
        assert_eq!(report.rational_points(), expected);
        assert_eq!(report.delta_lower_bound, 4);
        assert_eq!(report.bound, 4);
        assert!(!report.bound_violated());

        let form = structure_normalize(&x, &report.rational_points()).unwrap();
        assert_eq!(form.r, 3);
        assert!(form.tail.is_zero());
        assert!(form.fermat_coefficients.iter().all(|c| f13.is_one(c)));
    }

    #[test]
    fn structure_normalize_single_point() {
        let f7 = f("p:7");
        let x = hs(&f7, "x2^3+x0^3+x1^3", 3);
        let p = pt(&f7, &[0, 0, 1]);
        let form = structure_normalize(&x, std::slice::from_ref(&p)).unwrap();
        assert_eq!(form.r, 0);
        assert_eq!(form.tail, parse("x0^3+x1^3", 2, &f7).unwrap());
        assert!(form.transform.is_identity());

        let g = random_invertible(&f7, 3, 11).unwrap();
        let y = x.pullback(&g).unwrap();
        let q = g.invert().apply(&p).unwrap();
        assert!(is_outer_galois(&y, &q).unwrap());
        let form = structure_normalize(&y, &[q]).unwrap();
        assert_eq!(form.r, 0);
        let direct = y.equation().apply_linear(form.transform.matrix()).unwrap();
        assert_eq!(direct.canonical_scalar().unwrap(), form.normalized.canonical_scalar().unwrap());
    }

    /// Independent oracle over a prime field: `P` is an outer Galois point
    /// iff on every line `t P + y` the restriction has the form
    /// `a (t + l)^d + b`, checked for all `y` in plain `u64` arithmetic.
    /// Exact when `d <= p`.
    fn oracle_galois(coeffs: &[(Vec<u16>, u64)], n: usize, d: usize, p: u64, pt: &[u64]) -> bool {
        let eval_line = |y: &[u64]| -> Vec<u64> {
            let mut out = vec![0u64; d + 1];
            for (exps, c) in coeffs {
                let mut prod = vec![*c % p];
                for (i, &e) in exps.iter().enumerate() {
                    for _ in 0..e {
                        let mut next = vec![0u64; prod.len() + 1];
                        for (k, &v) in prod.iter().enumerate() {
                            next[k] = (next[k] + v * y[i]) % p;
                            next[k + 1] = (next[k + 1] + v * pt[i]) % p;
                        }
                        prod = next;
                    }
                }
                for (k, v) in prod.into_iter().enumerate() {
                    out[k] = (out[k] + v) % p;
                }
            }
            out
        };
        let pw = |mut b: u64, mut e: u64| {
            let mut r = 1u64;
            b %= p;
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % p;
                }
                b = b * b % p;
                e >>= 1;
            }
            r
        };
        let inv = |a: u64| pw(a, p - 2);
        let total = p.pow(n as u32);
        for mut idx in 0..total {
            let mut y = vec![0u64; n];
            for c in y.iter_mut() {
                *c = idx % p;
                idx /= p;
            }
            let line = eval_line(&y);
            let a = line[d];
            let l = line[d - 1] * inv(a * d as u64 % p) % p;
            for (j, &coef) in line.iter().enumerate().take(d - 1).skip(1) {
                let mut c = 1u64;
                for t in 0..j {
                    c = c * (d - t) as u64 / (t + 1) as u64;
                }
                if coef != a * (c % p) % p * pw(l, (d - j) as u64) % p {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn galois_enumeration_matches_line_oracle() {
        let f7 = f("p:7");
        let cases = [
            "x2^3+x0^3+x0^2*x1",
            "x0^3+x1^3+x2^3+3*x0*x1*x2",
            "x0^3+x1^3+x2^3",
            "x0^3+2*x1^3+x2^3+x0*x1^2",
            "x0^2*x1+x1^2*x2+x2^2*x0+x2^3",
        ];
        for text in cases {
            let x = hs(&f7, text, 3);
            let coeffs: Vec<_> = x
                .equation()
                .terms()
                .map(|(m, c)| (m.exponents().to_vec(), c.code() as u64))
                .collect();
            let expected: Vec<_> = ProjectivePoint::enumerate(&f7, 3)
                .unwrap()
                .filter(|p| !x.contains(p).unwrap())
                .filter(|p| {
                    let c: Vec<u64> = p.codes().iter().map(|&v| v as u64).collect();
                    oracle_galois(&coeffs, 3, 3, 7, &c)
                })
                .collect();
            let report = enumerate_galois(&x, 1, DEFAULT_POINT_CAP).unwrap();
            assert_eq!(report.rational_points(), expected, "{text}");
        }
    }

    #[test]
    fn seeded_instance_contains_standard_point() {
        let f7 = f("p:7");
        let x = hs(&f7, "x2^3+x0^3+x0^2*x1", 3);
        let pts = enumerate_galois(&x, 1, DEFAULT_POINT_CAP).unwrap().rational_points();
        assert!(pts.contains(&pt(&f7, &[0, 0, 1])));
    }
}
