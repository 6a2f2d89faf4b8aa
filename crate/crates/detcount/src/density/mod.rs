//! Real-density machinery: the dilogarithm, the sliced volumes `J(lambda)`
//! and `K(lambda)` by stated closed form and by two independent numeric
//! oracles, the mollified volumes `J_eta`/`K_eta`, and
//! `sigma_inf(lambda) = 4 J(lambda) + 8 K(lambda)`.
//!
//! Ground-truth hierarchy when evaluations disagree: exact counts beat
//! quadrature of the defining integrals, which beats mollified volumes,
//! which beat the stated closed forms. A closed-form branch is only marked
//! validated where it matches quadrature on the adjudication grid.

pub mod closed;
pub mod dilog;
pub mod oracles;

pub use closed::{j_closed, k_closed, sigma_closed_branch, Branch, ClosedForm};
pub use dilog::dilog;
pub use oracles::{
    j_quadrature, j_reduction, k_quadrature, k_reduction, mollified_density, mollified_tolerance,
    DensityKind, MOLLIFIED_RATE_CONSTANT,
};

use crate::quad::QuadError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("argument {0} outside the supported domain")]
    DomainViolation(f64),
    #[error("tolerance {0:e} below the 1e-8 floor")]
    ToleranceTooTight(f64),
    #[error("mollification width {0} outside (0, 1]")]
    InvalidEta(f64),
    #[error("grid refinement at lambda = {lambda} still moves the value by {drift:e} (tol {tol:e})")]
    SelfConvergenceFailure { lambda: f64, drift: f64, tol: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// How a [`DensityPoint`] was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMethod {
    ClosedForm,
    Quadrature { tol: f64 },
    Mollified { eta: f64, tol: f64 },
}

impl EvalMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            EvalMethod::ClosedForm => "closed_form",
            EvalMethod::Quadrature { .. } => "quadrature",
            EvalMethod::Mollified { .. } => "mollified",
        }
    }
}

/// One evaluated density point; `sigma_inf = 4 j + 8 k` by construction.
#[derive(Debug, Clone, Serialize)]
pub struct DensityPoint {
    pub lambda: f64,
    pub j: f64,
    pub k: f64,
    pub sigma_inf: f64,
    pub method: &'static str,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

/// Evaluates `sigma_inf(lambda) = 4 J + 8 K` with the chosen method.
pub fn sigma_infinity(lambda: f64, method: EvalMethod) -> Result<DensityPoint, DensityError> {
    let (j, k, tolerance, eta) = match method {
        EvalMethod::ClosedForm => (j_closed(lambda).value, k_closed(lambda).value, 0.0, None),
        EvalMethod::Quadrature { tol } => {
            let j = j_quadrature(lambda, tol)?;
            let k = k_quadrature(lambda, tol)?;
            (j.value, k.value, 12.0 * tol, None)
        }
        EvalMethod::Mollified { eta, tol } => {
            let j = mollified_density(lambda, eta, DensityKind::J, tol)?;
            let k = mollified_density(lambda, eta, DensityKind::K, tol)?;
            (j, k, 12.0 * mollified_tolerance(eta, tol), Some(eta))
        }
    };
    Ok(DensityPoint {
        lambda,
        j,
        k,
        sigma_inf: 4.0 * j + 8.0 * k,
        method: method.tag(),
        tolerance,
        eta,
    })
}

/// Gap between the stated combined branch formula for `sigma_inf` and the
/// recombination `4 J_closed + 8 K_closed` of the stated component formulas.
/// A nonzero gap means the stated pieces are mutually inconsistent.
pub fn combined_branch_gap(lambda: f64) -> f64 {
    sigma_closed_branch(lambda).value - (4.0 * j_closed(lambda).value + 8.0 * k_closed(lambda).value)
}

/// One row of the closed-form adjudication table.
#[derive(Debug, Clone, Serialize)]
pub struct AdjudicationRow {
    pub lambda: f64,
    pub j_closed: f64,
    pub j_quadrature: f64,
    pub j_validated: bool,
    pub k_closed: f64,
    pub k_quadrature: f64,
    pub k_validated: bool,
    pub sigma_closed: f64,
    pub sigma_quadrature: f64,
    pub sigma_validated: bool,
}

/// Classifies each stated closed form (J, K, and the combined Prop-style
/// `sigma_inf` branch formula) as validated or refuted against quadrature
/// at the given threshold.
pub fn adjudicate_closed_forms(
    lambdas: &[f64],
    quad_tol: f64,
    threshold: f64,
) -> Result<Vec<AdjudicationRow>, DensityError> {
    lambdas
        .iter()
        .map(|&lambda| {
            let jq = j_quadrature(lambda, quad_tol)?.value;
            let kq = k_quadrature(lambda, quad_tol)?.value;
            let jc = j_closed(lambda).value;
            let kc = k_closed(lambda).value;
            let sc = sigma_closed_branch(lambda).value;
            let sq = 4.0 * jq + 8.0 * kq;
            Ok(AdjudicationRow {
                lambda,
                j_closed: jc,
                j_quadrature: jq,
                j_validated: (jc - jq).abs() <= threshold,
                k_closed: kc,
                k_quadrature: kq,
                k_validated: (kc - kq).abs() <= threshold,
                sigma_closed: sc,
                sigma_quadrature: sq,
                sigma_validated: (sc - sq).abs() <= threshold,
            })
        })
        .collect()
}

/// Continuity-modulus data for `sigma_inf` at `lambda` under a shift
/// `delta`: the observed difference against the `|delta| log^2(2/|delta|)`
/// modulus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContinuityReport {
    pub lambda: f64,
    pub delta: f64,
    pub difference: f64,
    pub modulus: f64,
    /// `difference / modulus`; the fitted constant must dominate this.
    pub ratio: f64,
}

pub fn continuity_modulus_check(
    lambda: f64,
    delta: f64,
    quad_tol: f64,
) -> Result<ContinuityReport, DensityError> {
    if delta.abs() > 1.0 {
        return Err(DensityError::DomainViolation(delta));
    }
    if delta == 0.0 {
        return Ok(ContinuityReport {
            lambda,
            delta,
            difference: 0.0,
            modulus: 0.0,
            ratio: 0.0,
        });
    }
    let base = sigma_infinity(lambda, EvalMethod::Quadrature { tol: quad_tol })?;
    let shifted = sigma_infinity(lambda + delta, EvalMethod::Quadrature { tol: quad_tol })?;
    let difference = (shifted.sigma_inf - base.sigma_inf).abs();
    let modulus = delta.abs() * (2.0 / delta.abs()).ln().powi(2);
    Ok(ContinuityReport {
        lambda,
        delta,
        difference,
        modulus,
        ratio: difference / modulus,
    })
}
