//! Seeded census: random smooth hypersurfaces, their Galois counts, normal
//! forms, and the cover round trip (cover, random change of coordinates,
//! recovery, base equivalence).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cover::cyclic_cover;
use crate::equiv::{verify_equivalence, DEFAULT_MATRIX_CAP};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::galois::{enumerate_galois, structure_normalize};
use crate::hypersurface::{Hypersurface, DEFAULT_POINT_CAP};
use crate::poly::{monomials_of_degree, Polynomial};
use crate::projlin::random_invertible;
use crate::recovery::{base_equivalence_raw, recover_branch};
use crate::rng::{self, derive_seed};

#[derive(Clone, Debug, Serialize)]
pub struct CensusParams {
    pub field: String,
    pub d: u32,
    /// Hypersurfaces live in `P^{n+1}`.
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Extension bound for the Galois point search.
    pub ext_max: u32,
    /// Extension bound for the smoothness certificate.
    pub smooth_k_max: u32,
    pub point_cap: u128,
    pub matrix_cap: u128,
}

impl CensusParams {
    pub fn new(field: &str, d: u32, n: usize, trials: u64, seed: u64) -> CensusParams {
        CensusParams {
            field: field.to_string(),
            d,
            n,
            trials,
            seed,
            ext_max: 1,
            smooth_k_max: 1,
            point_cap: DEFAULT_POINT_CAP,
            matrix_cap: DEFAULT_MATRIX_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub polynomial: String,
    pub retained: bool,
    pub delta_lower_bound: Option<usize>,
    pub structure_r: Option<usize>,
    pub galois_point_used: Option<Vec<String>>,
    /// Extension degree of the field holding the base equivalence witness.
    pub witness_extension_degree: Option<u32>,
    pub round_trip: Option<bool>,
}

/// Everything needed to replay a failed trial.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub index: u64,
    pub seed: u64,
    pub stage: String,
    pub message: String,
    pub polynomial: String,
    pub transform: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub params: CensusParams,
    pub note: String,
    pub outside_theorem_scope: bool,
    pub trials_run: u64,
    pub retained: u64,
    pub bound: usize,
    pub delta_histogram: BTreeMap<usize, u64>,
    pub bound_violations: u64,
    pub structure_checked: u64,
    pub structure_failures: u64,
    pub round_trip_pass: u64,
    pub failures: Vec<Failure>,
    pub trials: Vec<TrialRecord>,
}

impl CensusReport {
    /// True when any checked property failed.
    pub fn falsified(&self) -> bool {
        !self.failures.is_empty() || self.round_trip_pass != self.retained
    }
}

/// Uniform random form of degree `d` in `nvars` variables.
pub fn random_form(field: &Field, nvars: usize, d: u32, seed: u64) -> Result<Polynomial> {
    let q = field.require_finite()?.order() as u64;
    let mut r = rng::rng(seed);
    let terms: Vec<_> = monomials_of_degree(nvars, d)
        .into_iter()
        .map(|m| (m, field.element(rng::uniform(&mut r, q) as u32)))
        .collect();
    Polynomial::from_terms(field, nvars, d, terms)
}

struct TrialOutcome {
    record: TrialRecord,
    failures: Vec<Failure>,
    bound_violation: bool,
    structure_checked: bool,
    structure_failed: bool,
}

fn run_trial(field: &Field, p: &CensusParams, index: u64) -> Result<TrialOutcome> {
    let seed = derive_seed(p.seed, index);
    let nvars = p.n + 2;
    let form = random_form(field, nvars, p.d, seed)?;
    let mut out = TrialOutcome {
        record: TrialRecord {
            index,
            seed,
            polynomial: form.to_text(),
            retained: false,
            delta_lower_bound: None,
            structure_r: None,
            galois_point_used: None,
            witness_extension_degree: None,
            round_trip: None,
        },
        failures: Vec::new(),
        bound_violation: false,
        structure_checked: false,
        structure_failed: false,
    };
    if form.is_zero() {
        return Ok(out);
    }
    let x = Hypersurface::new(&form)?;
    if !x.smoothness_certificate(p.smooth_k_max, p.point_cap)?.is_clean() {
        return Ok(out);
    }
    out.record.retained = true;
    out.record.polynomial = x.to_text();
    let fail = |stage: &str, message: String, transform: Vec<Vec<String>>| Failure {
        index,
        seed,
        stage: stage.to_string(),
        message,
        polynomial: x.to_text(),
        transform,
    };

    let report = enumerate_galois(&x, p.ext_max, p.point_cap)?;
    out.record.delta_lower_bound = Some(report.delta_lower_bound);
    if report.bound_violated() {
        out.bound_violation = true;
        out.failures.push(fail(
            "galois_bound",
            format!("{} outer Galois points exceed the bound {}", report.delta_lower_bound, report.bound),
            Vec::new(),
        ));
    }
    let rational = report.rational_points();
    if !rational.is_empty() && p.d >= 3 {
        out.structure_checked = true;
        match structure_normalize(&x, &rational) {
            Ok(form) => out.record.structure_r = Some(form.r),
            Err(e @ (Error::ShapeVerificationFailed(_) | Error::DependentPoints)) => {
                out.structure_failed = true;
                out.failures.push(fail("structure", e.to_string(), Vec::new()));
            }
            Err(e) => return Err(e),
        }
    }

    let cover = cyclic_cover(&x)?;
    let g = random_invertible(field, nvars + 1, derive_seed(seed, 1))?;
    let h = Hypersurface::new(&cover.equation().apply_linear(g.matrix())?)?;
    let g_text = g.to_strings();
    let rec = match recover_branch(&h, None, p.ext_max, p.point_cap) {
        Ok(r) => r,
        Err(e) => {
            out.record.round_trip = Some(false);
            out.failures.push(fail("recover", e.to_string(), g_text));
            return Ok(out);
        }
    };
    out.record.galois_point_used = Some(rec.galois_point.to_strings(rec.field()));
    let gw = g.lift(rec.field())?.compose(&rec.witness)?;
    let be = match base_equivalence_raw(x.equation(), &rec.base_poly, &gw) {
        Ok(b) => b,
        Err(e) => {
            out.record.round_trip = Some(false);
            out.failures.push(fail("base_equivalence", e.to_string(), g_text));
            return Ok(out);
        }
    };
    out.record.witness_extension_degree = Some(be.transform.field().extension_degree());
    let ok = verify_equivalence(&x, &rec.base, &be.transform)?;
    out.record.round_trip = Some(ok);
    if !ok {
        out.failures.push(fail("round_trip", "witness failed verification".into(), g_text));
    }
    Ok(out)
}

pub fn census(p: &CensusParams) -> Result<CensusReport> {
    let field: Field = p.field.parse()?;
    field.require_finite()?;
    field.check_degree_coprime(p.d as u64)?;
    if p.d == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let outcomes = (0..p.trials)
        .into_par_iter()
        .map(|i| run_trial(&field, p, i))
        .collect::<Result<Vec<_>>>()?;
    let mut report = CensusReport {
        params: p.clone(),
        note: "finite-field testbed: counts are over the searched fields only and are lower bounds"
            .into(),
        outside_theorem_scope: p.n < 2,
        trials_run: p.trials,
        retained: 0,
        bound: p.n + 2,
        delta_histogram: BTreeMap::new(),
        bound_violations: 0,
        structure_checked: 0,
        structure_failures: 0,
        round_trip_pass: 0,
        failures: Vec::new(),
        trials: Vec::new(),
    };
    for o in outcomes {
        if o.record.retained {
            report.retained += 1;
        }
        if let Some(delta) = o.record.delta_lower_bound {
            *report.delta_histogram.entry(delta).or_default() += 1;
        }
        report.bound_violations += o.bound_violation as u64;
        report.structure_checked += o.structure_checked as u64;
        report.structure_failures += o.structure_failed as u64;
        if o.record.round_trip == Some(true) {
            report.round_trip_pass += 1;
        }
        report.failures.extend(o.failures);
        report.trials.push(o.record);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_census() {
        let r = census(&CensusParams::new("p:13", 3, 1, 0, 42)).unwrap();
        assert_eq!(r.retained, 0);
        assert_eq!(r.round_trip_pass, 0);
        assert!(r.delta_histogram.is_empty());
        assert!(!r.falsified());
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert!(matches!(
            census(&CensusParams::new("p:7", 7, 1, 5, 1)),
            Err(Error::CharDividesDegree { p: 7, d: 7 })
        ));
    }

    #[test]
    fn small_census_round_trips() {
        let r = census(&CensusParams::new("p:7", 3, 1, 8, 3)).unwrap();
        assert!(r.retained > 0);
        assert_eq!(r.round_trip_pass, r.retained, "{:?}", r.failures);
        let again = census(&CensusParams::new("p:7", 3, 1, 8, 3)).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }
}
