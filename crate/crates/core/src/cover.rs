//! Cyclic covers `V(x_{m+1}^d - F)` branched along `V(F)`.

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::hypersurface::Hypersurface;
use crate::poly::Polynomial;
use crate::projlin::ProjectiveTransform;

/// `x_new^d - F` in one more variable (placed last), without rescaling.
pub fn cover_polynomial(f: &Polynomial) -> Polynomial {
    let field = f.field();
    let n = f.nvars() + 1;
    let top = Polynomial::var_power(field, n, n - 1, f.degree() as u16, field.one());
    top.sub(&f.insert_variable(n - 1)).expect("same ring")
}

/// The cyclic `d`-fold cover of `Y = V(F)`, `d = deg F`.
pub fn cyclic_cover(y: &Hypersurface) -> Result<Hypersurface> {
    y.field().check_degree_coprime(y.degree() as u64)?;
    Hypersurface::new(&cover_polynomial(y.equation()))
}

/// `diag(1, ..., 1, rho)` with `rho` the canonical primitive `d`-th root of
/// unity, acting on the cover's coordinates.
pub fn deck_transform(cover: &Hypersurface, d: u32) -> Result<ProjectiveTransform> {
    let field = cover.field();
    let rho = match field.root_of_unity(d as u64)? {
        Some(r) => r,
        None => {
            return Err(Error::NoRootOfUnity {
                d: d as u64,
                min_extension_degree: field.root_of_unity_extension_degree(d as u64)?,
            })
        }
    };
    let mut diag = vec![field.one(); cover.nvars()];
    *diag.last_mut().expect("nvars >= 1") = rho;
    ProjectiveTransform::diag(field, &diag)
}

/// Recognise `c * x_last^d + (terms free of x_last)`. Returns the base `Y`
/// and the scalar `s` with `H ∝ x_last^d - s * Y.equation`.
pub fn as_cover(h: &Hypersurface) -> Option<(Hypersurface, FieldElement)> {
    let field = h.field();
    let n = h.nvars();
    if n < 2 {
        return None;
    }
    let d = h.degree() as usize;
    let coeffs = h.equation().coefficients_in(n - 1);
    if coeffs[1..d].iter().any(|c| !c.is_zero()) {
        return None;
    }
    let lead = coeffs[d].terms().next().map(|(_, c)| c.clone())?;
    // H = lead * (x^d - F) with F = -G / lead.
    let f = coeffs[0].scale(&field.neg(&field.inv(&lead).expect("nonzero")));
    let y = Hypersurface::new(&f).ok()?;
    let s = f.leading_term().map(|(_, c)| c.clone())?;
    Some((y, s))
}
