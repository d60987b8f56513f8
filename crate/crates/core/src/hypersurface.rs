//! Hypersurfaces `V(F)` and bounded smoothness checks.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{is_prime, Field, FieldElement};
use crate::poly::{parse, Polynomial};
use crate::projlin::{ProjectivePoint, ProjectiveTransform};

/// Default cap on the number of points enumerated per extension degree.
pub const DEFAULT_POINT_CAP: u128 = 1 << 24;
/// Default extension bound for smoothness certificates.
pub const DEFAULT_K_MAX: u32 = 2;

const CHUNK: u128 = 2048;

/// The zero locus of a nonzero homogeneous form, stored with its equation
/// scaled so the largest monomial has coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypersurface {
    equation: Polynomial,
}

impl Hypersurface {
    pub fn new(equation: &Polynomial) -> Result<Hypersurface> {
        if equation.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if equation.degree() == 0 {
            return Err(Error::InvalidDegree(0));
        }
        equation.field().check_degree_coprime(equation.degree() as u64)?;
        Ok(Hypersurface {
            equation: equation.canonical_scalar()?,
        })
    }

    pub fn parse(field: &Field, text: &str, nvars: usize) -> Result<Hypersurface> {
        Hypersurface::new(&parse(text, nvars, field)?)
    }

    pub fn equation(&self) -> &Polynomial {
        &self.equation
    }

    pub fn field(&self) -> &Field {
        self.equation.field()
    }

    pub fn degree(&self) -> u32 {
        self.equation.degree()
    }

    pub fn nvars(&self) -> usize {
        self.equation.nvars()
    }

    /// `m` for a hypersurface in `P^m`.
    pub fn ambient_dim(&self) -> usize {
        self.nvars() - 1
    }

    /// `V(F ∘ T)`, the preimage of this hypersurface under `T`.
    pub fn pullback(&self, t: &ProjectiveTransform) -> Result<Hypersurface> {
        Hypersurface::new(&self.equation.apply_linear(t.matrix())?)
    }

    pub fn lift(&self, target: &Field) -> Result<Hypersurface> {
        Hypersurface::new(&self.equation.lift(target)?)
    }

    pub fn contains(&self, p: &ProjectivePoint) -> Result<bool> {
        Ok(self.field().is_zero(&self.equation.evaluate(p.coords())?))
    }

    /// `F_{p^k}` containing this hypersurface's field (`k = 1` is the field
    /// itself).
    pub fn field_of_degree(&self, k: u32) -> Result<Field> {
        if k == 1 {
            return Ok(self.field().clone());
        }
        self.field().extension_of_degree(k)
    }

    /// Singular points rational over `F_{p^k}`, in canonical order. Since
    /// `gcd(p, d) = 1`, the Euler relation makes the partials sufficient.
    pub fn singular_points(&self, k: u32, cap: u128) -> Result<Vec<ProjectivePoint>> {
        let field = self.field_of_degree(k)?;
        let eq = self.equation.lift(&field)?;
        let partials = (0..self.nvars())
            .map(|i| Ok(eq.partial_derivative(i)?.compile().expect("finite")))
            .collect::<Result<Vec<_>>>()?;
        scan_points(&field, self.nvars(), cap, |pt, scratch| {
            partials.iter().all(|d| d.eval(pt, scratch) == 0)
        })
    }

    pub fn smoothness_certificate(&self, k_max: u32, cap: u128) -> Result<SmoothnessCertificate> {
        let mut singular = Vec::new();
        for k in 1..=k_max {
            let field = self.field_of_degree(k)?;
            for p in self.singular_points(k, cap)? {
                if p.definition_degree(&field) < k {
                    continue;
                }
                singular.push(SingularPoint {
                    k,
                    point: p.to_strings(&field),
                });
            }
        }
        Ok(SmoothnessCertificate { k_max, singular })
    }

    /// `|X(F_{p^k})|`.
    pub fn point_count(&self, k: u32, cap: u128) -> Result<u128> {
        let field = self.field_of_degree(k)?;
        let eq = self.equation.lift(&field)?.compile().expect("finite");
        count_points(&field, self.nvars(), cap, |pt, scratch| eq.eval(pt, scratch) == 0)
    }

    pub fn to_text(&self) -> String {
        self.equation.to_text()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularPoint {
    pub k: u32,
    pub point: Vec<String>,
}

/// Result of a bounded search: an empty list means no singular point is
/// rational over `F_{p^k}` for any `k <= k_max`, which does not prove
/// smoothness over the algebraic closure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothnessCertificate {
    pub k_max: u32,
    pub singular: Vec<SingularPoint>,
}

impl SmoothnessCertificate {
    pub fn is_clean(&self) -> bool {
        self.singular.is_empty()
    }
}

fn check_cap(field: &Field, len: usize, cap: u128) -> Result<(u64, u128)> {
    let q = field.require_finite()?.order() as u64;
    let total = ProjectivePoint::count(q, len);
    if total > cap {
        return Err(Error::EnumerationCapExceeded { count: total, cap });
    }
    Ok((q, total))
}

/// All points of `P^{len-1}(field)` satisfying `pred`, in canonical order.
/// The index range is split into chunks scanned in parallel and merged in
/// index order, so the output does not depend on scheduling.
pub(crate) fn scan_points<P>(field: &Field, len: usize, cap: u128, pred: P) -> Result<Vec<ProjectivePoint>>
where
    P: Fn(&[u32], &mut Vec<u32>) -> bool + Sync,
{
    let (q, total) = check_cap(field, len, cap)?;
    let chunks = total.div_ceil(CHUNK);
    let found: Vec<Vec<Vec<u32>>> = (0..chunks as u64)
        .into_par_iter()
        .map(|c| {
            let mut pt = vec![0u32; len];
            let mut scratch = Vec::new();
            let mut hits = Vec::new();
            let start = c as u128 * CHUNK;
            for idx in start..(start + CHUNK).min(total) {
                ProjectivePoint::unrank_codes(q, len, idx, &mut pt);
                if pred(&pt, &mut scratch) {
                    hits.push(pt.clone());
                }
            }
            hits
        })
        .collect();
    found
        .into_iter()
        .flatten()
        .map(|codes| ProjectivePoint::from_codes(field, &codes))
        .collect()
}

pub(crate) fn count_points<P>(field: &Field, len: usize, cap: u128, pred: P) -> Result<u128>
where
    P: Fn(&[u32], &mut Vec<u32>) -> bool + Sync,
{
    let (q, total) = check_cap(field, len, cap)?;
    let chunks = total.div_ceil(CHUNK);
    Ok((0..chunks as u64)
        .into_par_iter()
        .map(|c| {
            let mut pt = vec![0u32; len];
            let mut scratch = Vec::new();
            let start = c as u128 * CHUNK;
            let mut n = 0u128;
            for idx in start..(start + CHUNK).min(total) {
                ProjectivePoint::unrank_codes(q, len, idx, &mut pt);
                if pred(&pt, &mut scratch) {
                    n += 1;
                }
            }
            n
        })
        .sum())
}

/// Reduction of a rational form modulo `p`, or `None` when `p` divides a
/// denominator or kills the leading coefficient.
pub fn reduce_mod_p(f: &Polynomial, p: u64) -> Result<Option<Polynomial>> {
    if f.field().is_finite() {
        return Err(Error::Unsupported("reduction of a finite-field form".into()));
    }
    let fp = Field::prime(p)?;
    let pb = BigInt::from(p);
    let mut terms = Vec::new();
    for (i, (m, c)) in f.terms().rev().enumerate() {
        let FieldElement::Rational(r) = c else { unreachable!() };
        if (r.denom() % &pb).to_u64() == Some(0) {
            return Ok(None);
        }
        let v = fp.from_ratio(r.numer(), r.denom())?;
        if i == 0 && fp.is_zero(&v) {
            return Ok(None);
        }
        terms.push((m.clone(), v));
    }
    Ok(Some(Polynomial::from_terms(&fp, f.nvars(), f.degree(), terms)?))
}

/// Over the rationals: the first `count` good primes (not dividing the
/// degree, denominators or leading coefficient) together with whether the
/// reduction mod each has no singular point over `F_{p^k}`, `k <= k_max`.
/// Smoothness over `Q` is only ever reported as "smooth modulo p".
pub fn smooth_modulo_primes(f: &Polynomial, count: usize, k_max: u32, cap: u128) -> Result<Vec<(u64, bool)>> {
    let d = f.degree() as u64;
    let mut out = Vec::new();
    for p in 2..1u64 << 16 {
        if out.len() == count {
            break;
        }
        if !is_prime(p) || d.is_multiple_of(p) {
            continue;
        }
        let Some(red) = reduce_mod_p(f, p)? else { continue };
        let x = Hypersurface::new(&red)?;
        out.push((p, x.smoothness_certificate(k_max, cap)?.is_clean()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projlin::{random_invertible, Matrix};

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
    fn singular_point_examples() {
        let f7 = f("p:7");
        assert!(hs(&f7, "x0^3+x1^3+x2^3", 3).singular_points(1, DEFAULT_POINT_CAP).unwrap().is_empty());
        assert_eq!(
            hs(&f7, "x0^3+x1^3", 3).singular_points(1, DEFAULT_POINT_CAP).unwrap(),
            vec![pt(&f7, &[0, 0, 1])]
        );
        let f5 = f("p:5");
        assert!(hs(&f5, "x0^2+x1^2+x2^2", 3).singular_points(1, DEFAULT_POINT_CAP).unwrap().is_empty());
    }

    #[test]
    fn certificate_examples() {
        let f13 = f("p:13");
        let cert = hs(&f13, "x0^3+x1^3+x2^3+x3^3", 4).smoothness_certificate(1, DEFAULT_POINT_CAP).unwrap();
        assert!(cert.is_clean());
        let f7 = f("p:7");
        let cert = hs(&f7, "x0^3+x1^3", 3).smoothness_certificate(2, DEFAULT_POINT_CAP).unwrap();
        assert_eq!(
            cert.singular,
            vec![SingularPoint { k: 1, point: vec!["0".into(), "0".into(), "1".into()] }]
        );
        assert_eq!(
            serde_json::to_string(&cert).unwrap(),
            r#"{"k_max":2,"singular":[{"k":1,"point":["0","0","1"]}]}"#
        );
        let f3 = f("p:3");
        assert_eq!(
            Hypersurface::parse(&f3, "x0^3+x1^3+x2^3", 3),
            Err(Error::CharDividesDegree { p: 3, d: 3 })
        );
    }

    #[test]
    fn scaling_invariance() {
        let f7 = f("p:7");
        let a = parse("x0^3+x1^3+2*x0*x1*x2", 3, &f7).unwrap();
        let b = a.scale(&f7.element(5));
        assert_eq!(Hypersurface::new(&a).unwrap(), Hypersurface::new(&b).unwrap());
    }

    #[test]
    fn fermat_has_no_singular_points_over_extensions() {
        let f2 = f("p:2");
        let x = hs(&f2, "x0^3+x1^3+x2^3", 3);
        let cert = x.smoothness_certificate(3, DEFAULT_POINT_CAP).unwrap();
        assert!(cert.is_clean());
    }

    #[test]
    fn transform_equivariance_exhaustive_small() {
        for spec in ["p:2", "p:3"] {
            let field = f(spec);
            let d = if spec == "p:2" { 3 } else { 2 };
            let texts = if d == 3 {
                vec!["x0^3+x1^2*x2", "x0^2*x1+x1^2*x2+x0*x2^2", "x0^3+x0*x1*x2"]
            } else {
                vec!["x0^2+x1*x2", "x0*x1", "x0^2"]
            };
            for text in texts {
                let x = hs(&field, text, 3);
                let sing = x.singular_points(1, DEFAULT_POINT_CAP).unwrap();
                for seed in 0..10 {
                    let m = random_invertible(&field, 3, seed).unwrap();
                    let y = x.pullback(&m).unwrap();
                    let ys = y.singular_points(1, DEFAULT_POINT_CAP).unwrap();
                    let mut mapped: Vec<_> = ys.iter().map(|s| m.apply(s).unwrap()).collect();
                    mapped.sort();
                    assert_eq!(mapped, sing, "{spec} {text}");
                }
            }
        }
        let _ = Matrix::identity(&f("p:2"), 1);
    }

    #[test]
    fn point_counts() {
        let f7 = f("p:7");
        // A smooth conic has q + 1 points.
        assert_eq!(hs(&f7, "x0^2+x1^2+x2^2", 3).point_count(1, 1000).unwrap(), 8);
        // Two lines x0*x1 = 0 meet in one point: 2(q + 1) - 1.
        assert_eq!(hs(&f7, "x0*x1", 3).point_count(1, 1000).unwrap(), 15);
        assert!(matches!(
            hs(&f7, "x0*x1", 3).point_count(1, 10),
            Err(Error::EnumerationCapExceeded { count: 57, cap: 10 })
        ));
    }

    #[test]
    fn rational_reduction() {
        let q = Field::rationals();
        let g = parse("x0^3+x1^3+x2^3", 3, &q).unwrap();
        let res = smooth_modulo_primes(&g, 3, 1, DEFAULT_POINT_CAP).unwrap();
        assert_eq!(res, vec![(2, true), (5, true), (7, true)]);
        let h = parse("1/5*x0^3+x1^3+x2^3", 3, &q).unwrap();
        assert_eq!(reduce_mod_p(&h, 5).unwrap(), None);
        let s = parse("x0^3+x1^3", 3, &q).unwrap();
        assert!(smooth_modulo_primes(&s, 2, 1, DEFAULT_POINT_CAP).unwrap().iter().all(|(_, ok)| !ok));
    }
}
