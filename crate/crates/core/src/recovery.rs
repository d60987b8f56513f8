//! Recovering the branch hypersurface from a cyclic cover, and turning an
//! equivalence of covers into an equivalence of branch hypersurfaces.

use crate::cover::cover_polynomial;
use crate::error::{Error, Result};
use crate::field::{Field, MAX_EXTENSION_DEGREE};
use crate::galois::{galois_points, structure_normalize, tschirnhaus};
use crate::hypersurface::Hypersurface;
use crate::poly::Polynomial;
use crate::projlin::{Matrix, ProjectivePoint, ProjectiveTransform};

#[derive(Clone, Debug)]
pub struct Recovery {
    /// `Y' = V(F')`.
    pub base: Hypersurface,
    /// `F'` exactly as read off, so that `H(W x) ∝ x_last^d - F'`.
    pub base_poly: Polynomial,
    pub witness: ProjectiveTransform,
    pub galois_point: ProjectivePoint,
}

impl Recovery {
    pub fn field(&self) -> &Field {
        self.witness.field()
    }
}

/// Find an outer Galois point of `H` (or use `hint`), move it to
/// `[0:...:0:1]` and read off the branch polynomial. Points over
/// `F_{p^k}`, `k <= ext_max`, are searched in order; the result lives over
/// the field of the point used.
pub fn recover_branch(
    h: &Hypersurface,
    hint: Option<&ProjectivePoint>,
    ext_max: u32,
    cap: u128,
) -> Result<Recovery> {
    let (hk, q) = match hint {
        Some(p) => (h.clone(), p.clone()),
        None => {
            let mut found = None;
            for k in 1..=ext_max {
                if let Some(p) = galois_points(h, k, cap)?.into_iter().next() {
                    found = Some((h.lift(&h.field_of_degree(k)?)?, p));
                    break;
                }
            }
            found.ok_or(Error::NoGaloisPointFound { ext_max })?
        }
    };
    let t = tschirnhaus(&hk, &q)?;
    if !t.is_pure() {
        return Err(Error::NotACoverShape(
            "middle coefficients do not vanish at the chosen point".into(),
        ));
    }
    let base_poly = t.tail.neg();
    let direct = hk.equation().apply_linear(t.transform.matrix())?.canonical_scalar()?;
    if direct != cover_polynomial(&base_poly).canonical_scalar()? {
        return Err(Error::ShapeVerificationFailed("recovery witness does not reproduce the cover".into()));
    }
    Ok(Recovery {
        base: Hypersurface::new(&base_poly)?,
        base_poly,
        witness: t.transform,
        galois_point: q,
    })
}

#[derive(Clone, Debug)]
pub struct BaseEquivalence {
    /// `T` with `F1(T x) ∝ F2(x)`; may live over an extension field.
    pub transform: ProjectiveTransform,
    /// Whether the scaled transposition step was needed.
    pub used_transposition: bool,
}

/// Given `g` with `C1(g x) ∝ C2(x)` for the covers `C_i = x^d - F_i`,
/// produce `T` with `F1(T x) ∝ F2(x)`.
///
/// When `g` moves `P0 = [0:...:0:1]` to another Galois point `Q` of `C1`,
/// an automorphism of `C1` swapping the two is built from the structure
/// normal form. It needs a `d`-th root of the second Fermat coefficient;
/// when that root is missing the computation moves to the smallest
/// extension containing it.
pub fn base_equivalence_raw(f1: &Polynomial, f2: &Polynomial, g: &ProjectiveTransform) -> Result<BaseEquivalence> {
    let field = g.field().clone();
    let f1 = f1.lift(&field)?;
    let f2 = f2.lift(&field)?;
    let n = f1.nvars() + 1;
    if f2.nvars() + 1 != n || g.size() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.size() });
    }
    let c1 = cover_polynomial(&f1);
    let c2 = cover_polynomial(&f2);
    if c1.apply_linear(g.matrix())?.canonical_scalar()? != c2.canonical_scalar()? {
        return Err(Error::NotAnEquivalence);
    }
    let d = f1.degree() as u64;
    let p0 = ProjectivePoint::standard(&field, n, n - 1);
    let q = g.apply(&p0)?;
    let (h, used_transposition) = if q == p0 {
        (g.clone(), false)
    } else {
        let cover1 = Hypersurface::new(&c1)?;
        let form = structure_normalize(&cover1, &[p0.clone(), q.clone()])?;
        let a = form.fermat_coefficients[1].clone();
        let roots = field
            .nth_root(&a, d)
            .and_then(|beta| field.inv(&beta).map(|gamma| (beta, gamma)));
        let Some((beta, gamma)) = roots else {
            let lifted = lift_for_root(&field, &a, d)?;
            return base_equivalence_raw(&f1, &f2, &g.lift(&lifted)?)
                .map(|mut r| {
                    r.used_transposition = true;
                    r
                });
        };
        // x_{n-1} <- beta x_{n-2}, x_{n-2} <- gamma x_{n-1}: fixes the form.
        let mut sigma = Matrix::identity(&field, n);
        sigma.set(n - 1, n - 1, field.zero());
        sigma.set(n - 2, n - 2, field.zero());
        sigma.set(n - 1, n - 2, beta);
        sigma.set(n - 2, n - 1, gamma);
        let a_hat = form.transform.matrix();
        let sigma_hat = ProjectiveTransform::new(a_hat.mul(&sigma)?.mul(&a_hat.inverse()?)?)?;
        if sigma_hat.apply(&p0)? != q {
            return Err(Error::BlockStructureViolation(
                "transposition does not carry the standard point to its image".into(),
            ));
        }
        if c1.apply_linear(sigma_hat.matrix())?.canonical_scalar()? != c1.canonical_scalar()? {
            return Err(Error::BlockStructureViolation("transposition is not an automorphism".into()));
        }
        (sigma_hat.invert().compose(g)?, true)
    };
    let m = h.matrix();
    if h.apply(&p0)? != p0 {
        return Err(Error::BlockStructureViolation("composite does not fix [0:...:0:1]".into()));
    }
    if (0..n - 1).any(|j| !field.is_zero(m.get(n - 1, j))) {
        return Err(Error::BlockStructureViolation("last coordinate picks up a linear form".into()));
    }
    let mut block = Matrix::zeros(&field, n - 1, n - 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            block.set(i, j, m.get(i, j).clone());
        }
    }
    let t = ProjectiveTransform::new(block)?;
    if f1.apply_linear(t.matrix())?.canonical_scalar()? != f2.canonical_scalar()? {
        return Err(Error::BlockStructureViolation("extracted block is not a base equivalence".into()));
    }
    Ok(BaseEquivalence {
        transform: t,
        used_transposition,
    })
}

/// Base equivalence for hypersurfaces, with covers built by
/// [`crate::cover::cyclic_cover`].
pub fn base_equivalence(y1: &Hypersurface, y2: &Hypersurface, g: &ProjectiveTransform) -> Result<BaseEquivalence> {
    base_equivalence_raw(y1.equation(), y2.equation(), g)
}

/// Smallest extension of a prime field containing a `d`-th root of `a`.
fn lift_for_root(field: &Field, a: &crate::field::FieldElement, d: u64) -> Result<Field> {
    let ff = field.require_finite()?;
    if ff.degree() != 1 {
        return Err(Error::RootUnavailable { d });
    }
    for e in 2..=MAX_EXTENSION_DEGREE {
        let Ok(ext) = field.extension_of_degree(e) else { break };
        if ext.nth_root(&field.embed(&ext, a)?, d).is_some() {
            return Ok(ext);
        }
    }
    Err(Error::RootUnavailable { d })
}
