//! Sample estimators of the inequality indices, numerically stabilized:
//! Theil T via income shares, geometric means in log space.

use crate::error::{Error, Result};
use crate::mixture::Sample;

/// Floating noise below this magnitude is clamped to exact zero for the
/// inequality estimators, which are nonnegative by construction.
const ZERO_CLAMP: f64 = 1e-12;

fn clamp_zero(v: f64) -> f64 {
    if v < 0.0 && v > -ZERO_CLAMP {
        0.0
    } else {
        v
    }
}

/// `T̂_T = Σ D_i log(D_i) + log n` with shares `D_i = X_i / Σ X_j`.
pub fn theil_t_hat(sample: &Sample) -> f64 {
    let n = sample.len() as f64;
    let total: f64 = sample.values().iter().sum();
    let sum: f64 = sample
        .values()
        .iter()
        .map(|&x| {
            let d = x / total;
            d * d.ln()
        })
        .sum();
    clamp_zero(sum + n.ln())
}

/// `T̂_L = log(X̄) − (1/n) Σ log(X_i)`.
pub fn theil_l_hat(sample: &Sample) -> f64 {
    let n = sample.len() as f64;
    let mean_log: f64 = sample.values().iter().map(|&x| x.ln()).sum::<f64>() / n;
    clamp_zero(sample.mean().ln() - mean_log)
}

/// `Â(ε) = 1 − [(1/n) Σ X_i^{1−ε}]^{1/(1−ε)} / X̄` for `0 ≤ ε ≠ 1`.
pub fn atkinson_eps_hat(sample: &Sample, eps: f64) -> Result<f64> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::Domain {
            op: "atkinson_eps_hat",
            msg: format!("eps must be nonnegative, got {eps}"),
        });
    }
    if eps == 1.0 {
        return Err(Error::Domain {
            op: "atkinson_eps_hat",
            msg: "eps = 1 is the limit case; use atkinson_1_hat".into(),
        });
    }
    let p = 1.0 - eps;
    let n = sample.len() as f64;
    let power_mean = (sample.values().iter().map(|&x| x.powf(p)).sum::<f64>() / n).powf(1.0 / p);
    Ok(clamp_zero(1.0 - power_mean / sample.mean()))
}

/// `Â(1) = 1 − geometric mean / X̄`, geometric mean as exp of the log mean.
pub fn atkinson_1_hat(sample: &Sample) -> f64 {
    let n = sample.len() as f64;
    let mean_log: f64 = sample.values().iter().map(|&x| x.ln()).sum::<f64>() / n;
    clamp_zero(1.0 - mean_log.exp() / sample.mean())
}

/// `Â(∞) = 1 − min X_i / X̄`.
pub fn atkinson_inf_hat(sample: &Sample) -> f64 {
    let min = sample.values().iter().copied().fold(f64::INFINITY, f64::min);
    clamp_zero(1.0 - min / sample.mean())
}

/// `VM̂R = S² / X̄` with the unbiased (n−1) variance; requires n ≥ 2.
pub fn vmr_hat(sample: &Sample) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::InvalidSample(
            "the dispersion estimator requires n >= 2".into(),
        ));
    }
    let mean = sample.mean();
    let ss: f64 = sample.values().iter().map(|&x| (x - mean).powi(2)).sum();
    Ok(ss / (n as f64 - 1.0) / mean)
}
