//! Projective equivalence: witness checks, exhaustive search and a
//! structure-aware comparison.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::galois::{enumerate_galois, power_class_rep, structure_normalize, StructureForm};
use crate::hypersurface::Hypersurface;
use crate::poly::{CompiledPoly, Polynomial};
use crate::projlin::{
    enumerate_invertible_range, gl_order, Matrix, ProjectivePoint, ProjectiveTransform,
};

/// Default cap on matrices scanned by brute force.
pub const DEFAULT_MATRIX_CAP: u128 = 1 << 25;

/// `F1(T x) ∝ F2(x)`, exactly. Both sides are lifted to the field of `T`.
pub fn verify_equivalence(f1: &Hypersurface, f2: &Hypersurface, t: &ProjectiveTransform) -> Result<bool> {
    if f1.nvars() != f2.nvars() || t.size() != f1.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f1.nvars(),
            got: if t.size() != f1.nvars() { t.size() } else { f2.nvars() },
        });
    }
    let k = t.field();
    let a = f1.equation().lift(k)?.apply_linear(t.matrix())?.canonical_scalar()?;
    let b = f2.equation().lift(k)?.canonical_scalar()?;
    Ok(a == b)
}

#[derive(Clone, Debug)]
pub struct BruteForceResult {
    pub witness: Option<ProjectiveTransform>,
    /// Matrices examined, counting up to and including the witness.
    pub scanned: u128,
}

/// Sample vectors for the evaluation prefilter: standard vectors, pairwise
/// sums and the all-ones vector.
fn sample_vectors(n: usize) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = (0..n).map(|i| (0..n).map(|k| (k == i) as u32).collect()).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.push((0..n).map(|k| (k == i || k == j) as u32).collect());
        }
    }
    out.push(vec![1; n]);
    out
}

/// First matrix `M` in the range (by enumeration index) with
/// `f1(M x) ∝ f2(x)`. Returns `(index, M)`.
fn scan_for_witness(
    f1: &Polynomial,
    f2: &Polynomial,
    field: &Field,
    n: usize,
    total: u128,
) -> Result<Option<(u128, Matrix)>> {
    let ff = field.require_finite()?;
    let c1: CompiledPoly = f1.compile().expect("finite");
    let c2 = f2.compile().expect("finite");
    let samples = sample_vectors(n);
    let mut scratch = Vec::new();
    let targets: Vec<u32> = samples.iter().map(|v| c2.eval(v, &mut scratch)).collect();
    let target_canon = f2.canonical_scalar()?;
    let parts: u128 = 256.min(total.max(1));
    let width = total.div_ceil(parts);
    let hit = (0..parts as u64).into_par_iter().find_map_first(|part| {
        let start = part as u128 * width;
        let end = (start + width).min(total);
        if start >= end {
            return None;
        }
        let mut it = enumerate_invertible_range(field, n, start..end).ok()?;
        let mut scratch = Vec::new();
        let mut mv = vec![0u32; n];
        while let Some(codes) = it.next_codes() {
            let mut mu: Option<u32> = None;
            let mut ok = true;
            for (v, &t) in samples.iter().zip(&targets) {
                for (r, out) in mv.iter_mut().enumerate() {
                    let mut acc = 0;
                    for (c, &x) in v.iter().enumerate() {
                        if x != 0 {
                            acc = ff.add(acc, codes[r * n + c]);
                        }
                    }
                    *out = acc;
                }
                let val = c1.eval(&mv, &mut scratch);
                match (t, mu) {
                    (0, _) => {
                        if val != 0 {
                            ok = false;
                        }
                    }
                    (_, None) => {
                        if val == 0 {
                            ok = false;
                        } else {
                            mu = Some(ff.mul(val, ff.inv(t).expect("nonzero")));
                        }
                    }
                    (_, Some(m)) => {
                        if val != ff.mul(m, t) {
                            ok = false;
                        }
                    }
                }
                if !ok {
                    break;
                }
            }
            if !ok {
                continue;
            }
            let m = Matrix::from_codes(field, n, codes);
            let candidate = f1.substitute_forms(&m).canonical_scalar().ok()?;
            if candidate == target_canon {
                return Some((it.current_index(), m));
            }
        }
        None
    });
    Ok(hit)
}

/// Exhaustive scan of `GL_m` in enumeration order. `None` means the two
/// hypersurfaces are not projectively equivalent over this field.
pub fn equivalent_bruteforce(f1: &Hypersurface, f2: &Hypersurface, cap: u128) -> Result<BruteForceResult> {
    let field = f1.field();
    if field != f2.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", field, f2.field())));
    }
    let n = f1.nvars();
    if f2.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f2.nvars() });
    }
    let q = field.require_finite()?.order() as u64;
    let order = gl_order(q, n);
    if order > cap {
        return Err(Error::CapExceeded { order, cap });
    }
    if f1.degree() != f2.degree() {
        return Ok(BruteForceResult { witness: None, scanned: 0 });
    }
    Ok(match scan_for_witness(f1.equation(), f2.equation(), field, n, order)? {
        Some((idx, m)) => BruteForceResult {
            witness: Some(ProjectiveTransform::new(m)?),
            scanned: idx + 1,
        },
        None => BruteForceResult { witness: None, scanned: order },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    /// `(k, |X(F_{p^k})|)`.
    pub point_counts: Vec<(u32, u128)>,
    /// `(k, number of singular points rational over F_{p^k})`.
    pub singular_counts: Vec<(u32, usize)>,
    pub galois_count: usize,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Equivalent(ProjectiveTransform),
    Inequivalent(String),
    Inconclusive(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equivalent(_) => "equivalent",
            Verdict::Inequivalent(_) => "inequivalent",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct StructuredOutcome {
    pub verdict: Verdict,
    pub invariants: Option<(Invariants, Invariants)>,
    pub scanned: u128,
}

#[derive(Clone, Debug)]
pub struct EquivConfig {
    /// Largest extension degree for point-count invariants.
    pub invariant_k_max: u32,
    pub point_cap: u128,
    pub matrix_cap: u128,
}

impl Default for EquivConfig {
    fn default() -> Self {
        EquivConfig {
            invariant_k_max: 2,
            point_cap: crate::hypersurface::DEFAULT_POINT_CAP,
            matrix_cap: DEFAULT_MATRIX_CAP,
        }
    }
}

/// Invariants over every `k <= k_max` that fits under the point cap. The
/// Galois count is over the base field only.
pub fn invariants(x: &Hypersurface, cfg: &EquivConfig) -> Result<(Invariants, Vec<ProjectivePoint>)> {
    let q = x.field().require_finite()?.order() as u64;
    let max_k = if x.field().extension_degree() == 1 { cfg.invariant_k_max } else { 1 };
    let mut point_counts = Vec::new();
    let mut singular_counts = Vec::new();
    for k in 1..=max_k {
        if ProjectivePoint::count(q.pow(k), x.nvars()) > cfg.point_cap {
            break;
        }
        point_counts.push((k, x.point_count(k, cfg.point_cap)?));
        singular_counts.push((k, x.singular_points(k, cfg.point_cap)?.len()));
    }
    let galois = if x.degree() >= 2 {
        enumerate_galois(x, 1, cfg.point_cap)?.rational_points()
    } else {
        Vec::new()
    };
    Ok((
        Invariants {
            point_counts,
            singular_counts,
            galois_count: galois.len(),
        },
        galois,
    ))
}

/// Decide equivalence using invariants, the structure normal form and a
/// residual search.
///
/// After both sides are normalized, any equivalence must permute the
/// rational Galois points, so it maps the Fermat block to itself by a
/// scaled permutation; the binomial expansion of the mixed terms then
/// forces it to be block diagonal. The residual search over scaled
/// permutations times `GL` on the tail block is therefore complete, and an
/// exhausted search is a proof of inequivalence.
pub fn equivalent_structured(f1: &Hypersurface, f2: &Hypersurface, cfg: &EquivConfig) -> Result<StructuredOutcome> {
    let field = f1.field();
    if field != f2.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", field, f2.field())));
    }
    field.require_finite()?;
    if f1.nvars() != f2.nvars() || f1.degree() != f2.degree() {
        return Ok(StructuredOutcome {
            verdict: Verdict::Inequivalent("ambient dimension or degree differ".into()),
            invariants: None,
            scanned: 0,
        });
    }
    let (inv1, g1) = invariants(f1, cfg)?;
    let (inv2, g2) = invariants(f2, cfg)?;
    let invs = Some((inv1.clone(), inv2.clone()));
    let mismatch = if inv1.point_counts != inv2.point_counts {
        Some("rational point counts differ")
    } else if inv1.singular_counts != inv2.singular_counts {
        Some("singular point counts differ")
    } else if inv1.galois_count != inv2.galois_count {
        Some("rational outer Galois point counts differ")
    } else {
        None
    };
    if let Some(reason) = mismatch {
        return Ok(StructuredOutcome {
            verdict: Verdict::Inequivalent(reason.into()),
            invariants: invs,
            scanned: 0,
        });
    }
    let structured = if g1.is_empty() {
        None
    } else {
        match (structure_normalize(f1, &g1), structure_normalize(f2, &g2)) {
            (Ok(a), Ok(b)) => Some((a, b)),
            _ => None,
        }
    };
    let (verdict, scanned) = match structured {
        Some((a, b)) => residual_search(f1, f2, &a, &b, cfg)?,
        None => {
            let q = field.require_finite()?.order() as u64;
            if gl_order(q, f1.nvars()) > cfg.matrix_cap {
                (
                    Verdict::Inconclusive(
                        "no usable Galois structure and the full scan exceeds the cap".into(),
                    ),
                    0,
                )
            } else {
                let r = equivalent_bruteforce(f1, f2, cfg.matrix_cap)?;
                let v = match r.witness {
                    Some(t) => Verdict::Equivalent(t),
                    None => Verdict::Inequivalent("exhaustive scan found no witness".into()),
                };
                (v, r.scanned)
            }
        }
    };
    if let Verdict::Equivalent(t) = &verdict {
        assert!(verify_equivalence(f1, f2, t)?, "structured witness failed verification");
    }
    Ok(StructuredOutcome {
        verdict,
        invariants: invs,
        scanned,
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Candidate tail transforms keyed by the class representative of `mu`,
/// with the number of matrices scanned. `Err` carries an inconclusive reason.
type TailCandidates = std::result::Result<(BTreeMap<FieldElement, (Matrix, FieldElement)>, u128), String>;

/// Tail transforms `B` with `G1(B x) = mu G2(x)`, one per class of `mu`
/// modulo `d`-th powers. `None` in the map key position stands for "any
/// `mu`" (both tails zero).
fn tail_candidates(
    g1: &Polynomial,
    g2: &Polynomial,
    cfg: &EquivConfig,
) -> Result<TailCandidates> {
    let field = g1.field();
    let s = g1.nvars();
    let d = g1.degree() as u64;
    let mut found = BTreeMap::new();
    if g1.is_zero() || g2.is_zero() {
        if g1.is_zero() && g2.is_zero() {
            found.insert(field.zero(), (Matrix::identity(field, s), field.zero()));
        }
        return Ok(Ok((found, 0)));
    }
    let ff = field.require_finite()?;
    let q = ff.order() as u64;
    let order = gl_order(q, s);
    if order > cfg.matrix_cap {
        return Ok(Err(format!("tail block scan of {order} matrices exceeds cap")));
    }
    let classes = num_integer::gcd(d, q - 1) as usize;
    let (_, lc2) = g2.leading_term().expect("nonzero");
    let mut it = enumerate_invertible_range(field, s, 0..order)?;
    let mut scanned = 0;
    while let Some(codes) = it.next_codes() {
        scanned += 1;
        let m = Matrix::from_codes(field, s, codes);
        let img = g1.substitute_forms(&m);
        let Some((_, lc1)) = img.leading_term() else { continue };
        let mu = field.div(lc1, lc2).expect("nonzero");
        if img != g2.scale(&mu) {
            continue;
        }
        let class = power_class_rep(field, &mu, d);
        found.entry(class).or_insert((m, mu));
        if found.len() == classes {
            break;
        }
    }
    Ok(Ok((found, scanned)))
}

fn residual_search(
    f1: &Hypersurface,
    f2: &Hypersurface,
    a: &StructureForm,
    b: &StructureForm,
    cfg: &EquivConfig,
) -> Result<(Verdict, u128)> {
    let field = f1.field();
    let n = f1.nvars();
    let d = f1.degree() as u64;
    let r = a.r;
    let s = n - 1 - r;
    let (cands, scanned) = match tail_candidates(&a.tail, &b.tail, cfg)? {
        Ok(x) => x,
        Err(msg) => return Ok((Verdict::Inconclusive(msg), 0)),
    };
    let both_zero = a.tail.is_zero() && b.tail.is_zero();
    let mus: Vec<(Matrix, FieldElement)> = if both_zero {
        let units: Vec<FieldElement> = field.elements()?.filter(|c| !field.is_zero(c)).collect();
        units.into_iter().map(|mu| (Matrix::identity(field, s), mu)).collect()
    } else {
        cands.into_values().collect()
    };
    for perm in permutations(r + 1) {
        for (bm, mu) in &mus {
            // Block index i is coordinate n-1-i; x_{n-1-i} <- lambda_i x_{n-1-perm[i]}.
            let mut lambdas = Vec::with_capacity(r + 1);
            for (i, &pi) in perm.iter().enumerate() {
                let target = field.mul(mu, &b.fermat_coefficients[pi]);
                let ratio = field.div(&target, &a.fermat_coefficients[i]).expect("nonzero");
                match field.nth_root(&ratio, d) {
                    Some(l) => lambdas.push(l),
                    None => break,
                }
            }
            if lambdas.len() != r + 1 {
                continue;
            }
            let mut rm = Matrix::zeros(field, n, n);
            for i in 0..s {
                for j in 0..s {
                    rm.set(i, j, bm.get(i, j).clone());
                }
            }
            for (i, &pi) in perm.iter().enumerate() {
                rm.set(n - 1 - i, n - 1 - pi, lambdas[i].clone());
            }
            let w = a
                .transform
                .matrix()
                .mul(&rm)?
                .mul(&b.transform.invert().matrix().clone())?;
            let w = ProjectiveTransform::new(w)?;
            if verify_equivalence(f1, f2, &w)? {
                return Ok((Verdict::Equivalent(w), scanned));
            }
        }
    }
    Ok((
        Verdict::Inequivalent("residual stabilizer search exhausted".into()),
        scanned,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projlin::random_invertible;

    fn f(s: &str) -> Field {
        s.parse().unwrap()
    }

    fn hs(field: &Field, text: &str, n: usize) -> Hypersurface {
        Hypersurface::parse(field, text, n).unwrap()
    }

    #[test]
    fn verify_examples() {
        let f7 = f("p:7");
        let x = hs(&f7, "x0^3+x1^3+x2^3", 3);
        let id = ProjectiveTransform::identity(&f7, 3);
        assert!(verify_equivalence(&x, &x, &id).unwrap());
        let x2 = Hypersurface::new(&x.equation().scale(&f7.element(2))).unwrap();
        assert!(verify_equivalence(&x, &x2, &id).unwrap());
        let swap = ProjectiveTransform::transposition(&f7, 3, 0, 1).unwrap();
        assert!(verify_equivalence(&x, &x, &swap).unwrap());
        let other = hs(&f7, "x0^3+x1^3+2*x2^3", 3);
        assert!(!verify_equivalence(&x, &other, &id).unwrap());
    }

    #[test]
    fn bruteforce_examples() {
        let f3 = f("p:3");
        let a = hs(&f3, "x0*x1-x2^2", 3);
        let b = hs(&f3, "x0^2+x1*x2", 3);
        let r = equivalent_bruteforce(&a, &b, DEFAULT_MATRIX_CAP).unwrap();
        let w = r.witness.unwrap();
        assert!(verify_equivalence(&a, &b, &w).unwrap());
        // Independent oracle: first hit of a plain sequential scan.
        let first = crate::projlin::enumerate_invertible(&f3, 3, DEFAULT_MATRIX_CAP)
            .unwrap()
            .position(|m| {
                a.equation().apply_linear(&m).unwrap().canonical_scalar().unwrap() == *b.equation()
            })
            .unwrap();
        assert_eq!(r.scanned, first as u128 + 1);

        let f2 = f("p:2");

        let smooth = hs(&f2, "x0^3+x1^3+x2^3", 3);
        let singular = hs(&f2, "x0^3+x1^2*x2", 3);
        let r = equivalent_bruteforce(&smooth, &singular, DEFAULT_MATRIX_CAP).unwrap();
        assert!(r.witness.is_none());
        assert_eq!(r.scanned, 168);

        let g = random_invertible(&f3, 3, 4).unwrap();
        let c = a.pullback(&g).unwrap();
        let r = equivalent_bruteforce(&a, &c, DEFAULT_MATRIX_CAP).unwrap();
        assert!(verify_equivalence(&a, &c, &r.witness.unwrap()).unwrap());
    }

    #[test]
    fn structured_examples() {
        let f7 = f("p:7");
        let x = hs(&f7, "x2^3+x0^3+x1^3", 3);
        let g = random_invertible(&f7, 3, 5).unwrap();
        let y = x.pullback(&g).unwrap();
        let out = equivalent_structured(&x, &y, &EquivConfig::default()).unwrap();
        match out.verdict {
            Verdict::Equivalent(t) => assert!(verify_equivalence(&x, &y, &t).unwrap()),
            v => panic!("{v:?}"),
        }

        let f13 = f("p:13");
        let fermat = hs(&f13, "x0^3+x1^3+x2^3+x3^3", 4);
        let out = equivalent_structured(&fermat, &fermat, &EquivConfig::default()).unwrap();
        assert!(matches!(out.verdict, Verdict::Equivalent(_)));
    }

    #[test]
    fn permutation_listing() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
