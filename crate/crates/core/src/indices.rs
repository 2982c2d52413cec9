//! Population inequality indices of a gamma mixture: Theil T, Theil L,
//! Atkinson A(ε) with its ε→1 and ε→∞ limits, and the variance-to-mean
//! ratio. All but the VMR are free of the rate λ.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::MixtureParams;
use crate::specfun::digamma;

/// Population index values for one parameter set.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IndexReport {
    pub theil_t: f64,
    pub theil_l: f64,
    pub atkinson_1: f64,
    pub atkinson_inf: f64,
    pub vmr: f64,
}

/// `T_T = [Σ π_j α_j ψ(α_j) + 1] / Σ π_j α_j − log(Σ π_j α_j)`.
pub fn theil_t(params: &MixtureParams) -> Result<f64> {
    let s = params.weighted_shape();
    let mut weighted_psi = 0.0;
    for (&p, &a) in params.pi().iter().zip(params.alpha()) {
        weighted_psi += p * a * digamma(a)?;
    }
    Ok((weighted_psi + 1.0) / s - s.ln())
}

/// `T_L = log(Σ π_j α_j) − Σ π_j ψ(α_j)`.
pub fn theil_l(params: &MixtureParams) -> Result<f64> {
    let s = params.weighted_shape();
    let mut mean_psi = 0.0;
    for (&p, &a) in params.pi().iter().zip(params.alpha()) {
        mean_psi += p * digamma(a)?;
    }
    Ok(s.ln() - mean_psi)
}

/// Atkinson index `A(ε) = 1 − E^{1/(1−ε)}[X^{1−ε}] / μ` for `0 ≤ ε ≠ 1`.
///
/// ε = 1 is an explicit error; use [`atkinson_1`] for the limit.
pub fn atkinson_eps(params: &MixtureParams, eps: f64) -> Result<f64> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::Domain {
            op: "atkinson_eps",
            msg: format!("eps must be nonnegative, got {eps}"),
        });
    }
    if eps == 1.0 {
        return Err(Error::Domain {
            op: "atkinson_eps",
            msg: "eps = 1 is the limit case; use atkinson_1".into(),
        });
    }
    let p = 1.0 - eps;
    if p <= -params.alpha()[0] {
        return Err(Error::Domain {
            op: "atkinson_eps",
            msg: format!(
                "moment of order {p} does not exist (needs p > -min(alpha) = {})",
                -params.alpha()[0]
            ),
        });
    }
    // λ-free form: the rate cancels between the power mean and μ, so it is
    // dropped before any floating arithmetic rather than after.
    let mut moment = 0.0;
    for (&pi_j, &a) in params.pi().iter().zip(params.alpha()) {
        moment += pi_j * (crate::specfun::ln_gamma(p + a)? - crate::specfun::ln_gamma(a)?).exp();
    }
    Ok(1.0 - moment.powf(1.0 / p) / params.weighted_shape())
}

/// The ε→1 limit: `A(1) = 1 − exp{Σ π_j ψ(α_j)} / Σ π_j α_j`.
pub fn atkinson_1(params: &MixtureParams) -> Result<f64> {
    let mut mean_psi = 0.0;
    for (&p, &a) in params.pi().iter().zip(params.alpha()) {
        mean_psi += p * digamma(a)?;
    }
    Ok(1.0 - mean_psi.exp() / params.weighted_shape())
}

/// The ε→∞ limit is identically 1 for every gamma mixture.
pub fn atkinson_inf(_params: &MixtureParams) -> f64 {
    1.0
}

/// Variance-to-mean ratio `σ² / μ`.
pub fn vmr(params: &MixtureParams) -> f64 {
    params.variance() / params.mean()
}

/// All population indices for one parameter set.
pub fn index_report(params: &MixtureParams) -> Result<IndexReport> {
    Ok(IndexReport {
        theil_t: theil_t(params)?,
        theil_l: theil_l(params)?,
        atkinson_1: atkinson_1(params)?,
        atkinson_inf: atkinson_inf(params),
        vmr: vmr(params),
    })
}
