//! Dirichlet moment identities and a sampler for cross-checking them.
//!
//! The sampler realizes `D_j = Z_j / Σ Z_i` from independent gamma draws,
//! which is exactly the construction behind the proportion-sum independence
//! theorem the identities rely on.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mixture::gamma_draw;
use crate::specfun::{digamma, ln_gamma};

/// Concentration parameters of a Dirichlet distribution, length ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::InvalidShape(
                "Dirichlet needs at least two concentration parameters".into(),
            ));
        }
        if let Some(&bad) = alpha.iter().find(|a| !a.is_finite() || **a <= 0.0) {
            return Err(Error::InvalidShape(format!(
                "concentration parameters must be positive, got {bad}"
            )));
        }
        Ok(DirichletParams { alpha })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    fn check_len(&self, other: usize, op: &'static str) -> Result<()> {
        if other != self.dim() {
            return Err(Error::Domain {
                op,
                msg: format!("exponent vector length {other} != dimension {}", self.dim()),
            });
        }
        Ok(())
    }

    /// Mixed moment `E[Π D_j^{d_j}]`, computed in log space.
    pub fn mixed_moment(&self, d: &[f64]) -> Result<f64> {
        self.check_len(d.len(), "mixed_moment")?;
        if let Some(&bad) = d.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain {
                op: "mixed_moment",
                msg: format!("exponents must be nonnegative, got {bad}"),
            });
        }
        let a_sum: f64 = self.alpha.iter().sum();
        let d_sum: f64 = d.iter().sum();
        let mut log = ln_gamma(a_sum)? - ln_gamma(a_sum + d_sum)?;
        for (&a, &dj) in self.alpha.iter().zip(d) {
            log += ln_gamma(a + dj)? - ln_gamma(a)?;
        }
        Ok(log.exp())
    }

    /// Log-weighted moment `E[(Π D_j^{c_j})^r log(Π D_j^{c_j})]`.
    ///
    /// Equals the mixed moment at exponents `r·c` times
    /// `Σ c_j ψ(α_j + r c_j) − (Σ c_l) ψ(Σ (α_l + r c_l))`.
    /// All-zero `c` returns 0 by convention (the product is the constant 1),
    /// so callers can sum over degenerate terms uniformly.
    pub fn log_weighted_moment(&self, c: &[f64], r: f64) -> Result<f64> {
        self.check_len(c.len(), "log_weighted_moment")?;
        if !r.is_finite() || r < 0.0 {
            return Err(Error::Domain {
                op: "log_weighted_moment",
                msg: format!("r must be nonnegative, got {r}"),
            });
        }
        if let Some(&bad) = c.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain {
                op: "log_weighted_moment",
                msg: format!("weights must be nonnegative, got {bad}"),
            });
        }
        if c.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        let rc: Vec<f64> = c.iter().map(|&v| r * v).collect();
        let prefactor = self.mixed_moment(&rc)?;
        let a_sum: f64 = self.alpha.iter().sum();
        let c_sum: f64 = c.iter().sum();
        let rc_sum: f64 = rc.iter().sum();
        let mut bracket = -c_sum * digamma(a_sum + rc_sum)?;
        for (&a, (&cj, &rcj)) in self.alpha.iter().zip(c.iter().zip(&rc)) {
            if cj > 0.0 {
                bracket += cj * digamma(a + rcj)?;
            }
        }
        Ok(prefactor * bracket)
    }

    /// One Dirichlet draw via normalized independent gamma variates.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut draws: Vec<f64> = self
            .alpha
            .iter()
            .map(|&a| gamma_draw(a, 1.0, rng))
            .collect();
        let total: f64 = draws.iter().sum();
        for d in &mut draws {
            *d /= total;
        }
        draws
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::substream;

    #[test]
    fn mixed_moment_golden() {
        let d = DirichletParams::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(d.mixed_moment(&[0.0, 0.0]).unwrap(), 1.0);
        // E[D₁] with D₁ ~ Uniform(0,1)
        assert!((d.mixed_moment(&[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-14);
        // Γ(5)/Γ(7)·2·3 = 0.2
        let d2 = DirichletParams::new(vec![2.0, 3.0]).unwrap();
        assert!((d2.mixed_moment(&[1.0, 1.0]).unwrap() - 0.2).abs() < 1e-13);
    }

    #[test]
    fn mixed_moment_rejects() {
        let d = DirichletParams::new(vec![1.0, 1.0]).unwrap();
        assert!(d.mixed_moment(&[1.0]).is_err());
        assert!(d.mixed_moment(&[-1.0, 0.0]).is_err());
        assert!(DirichletParams::new(vec![1.0]).is_err());
        assert!(DirichletParams::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn log_weighted_moment_golden() {
        let d = DirichletParams::new(vec![1.0, 1.0]).unwrap();
        // ∫₀¹ x log x dx = −1/4
        assert!((d.log_weighted_moment(&[1.0, 0.0], 1.0).unwrap() + 0.25).abs() < 1e-13);
        // E[log D₁] = ψ(1) − ψ(2) = −1
        assert!((d.log_weighted_moment(&[1.0, 0.0], 0.0).unwrap() + 1.0).abs() < 1e-13);
        // all-zero c convention
        assert_eq!(d.log_weighted_moment(&[0.0, 0.0], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn log_weighted_moment_unit_vector_collapse() {
        // c = e_i, r = 1 reduces to (α_i/Σα)[ψ(α_i+1) − ψ(Σα+1)]
        let mut rng = substream(314, 0);
        for _ in 0..100 {
            let dim = 2 + (rng.gen::<u64>() % 4) as usize;
            let alpha: Vec<f64> = (0..dim).map(|_| 0.2 + 5.0 * rng.gen::<f64>()).collect();
            let a_sum: f64 = alpha.iter().sum();
            let d = DirichletParams::new(alpha.clone()).unwrap();
            for i in 0..dim {
                let mut c = vec![0.0; dim];
                c[i] = 1.0;
                let got = d.log_weighted_moment(&c, 1.0).unwrap();
                let want = alpha[i] / a_sum
                    * (digamma(alpha[i] + 1.0).unwrap() - digamma(a_sum + 1.0).unwrap());
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn log_weighted_moment_is_r_derivative() {
        // d/dr E[(ΠD^c)^r] evaluated by central differences of the mixed moment
        let d = DirichletParams::new(vec![2.0, 3.0, 1.5]).unwrap();
        let c = [1.0, 0.5, 2.0];
        for &r in &[0.5, 1.0, 2.0] {
            let h = 1e-6;
            let hi: Vec<f64> = c.iter().map(|v| v * (r + h)).collect();
            let lo: Vec<f64> = c.iter().map(|v| v * (r - h)).collect();
            let fd = (d.mixed_moment(&hi).unwrap() - d.mixed_moment(&lo).unwrap()) / (2.0 * h);
            let got = d.log_weighted_moment(&c, r).unwrap();
            assert!((got - fd).abs() <= 1e-4 * fd.abs(), "r={r} got={got} fd={fd}");
        }
    }

    #[test]
    fn sampler_simplex_and_beta_mean() {
        let d = DirichletParams::new(vec![1.0, 1.0]).unwrap();
        let mut rng = substream(5, 0);
        let n = 100_000;
        let mut sum_d1 = 0.0;
        for _ in 0..n {
            let v = d.sample(&mut rng);
            assert!(v.iter().all(|&x| x > 0.0));
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            sum_d1 += v[0];
        }
        let mean = sum_d1 / n as f64;
        let bound = 4.0 * (1.0 / (12.0 * n as f64)).sqrt();
        assert!((mean - 0.5).abs() < bound, "mean={mean}");
    }

    #[test]
    fn sampler_matches_mixed_moment() {
        let d = DirichletParams::new(vec![5.0, 5.0, 5.0]).unwrap();
        let exact = d.mixed_moment(&[1.0, 1.0, 0.0]).unwrap();
        assert!((exact - 25.0 / (15.0 * 16.0)).abs() < 1e-14);
        let mut rng = substream(6, 0);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let v = d.sample(&mut rng);
            let prod = v[0] * v[1];
            sum += prod;
            sumsq += prod * prod;
        }
        let mean = sum / n as f64;
        let var = (sumsq / n as f64 - mean * mean).max(0.0);
        let se = (var / n as f64).sqrt();
        assert!((mean - exact).abs() < 4.0 * se, "mean={mean} exact={exact}");
    }

    #[test]
    fn proportions_independent_of_sum() {
        // Mosimann: corr(Σ Z, D₁) ≈ 0 for shared-rate gammas
        let mut rng = substream(8, 0);
        let n = 100_000;
        let mut sums = Vec::with_capacity(n);
        let mut props = Vec::with_capacity(n);
        for _ in 0..n {
            let z1 = gamma_draw(2.0, 1.0, &mut rng);
            let z2 = gamma_draw(3.5, 1.0, &mut rng);
            sums.push(z1 + z2);
            props.push(z1 / (z1 + z2));
        }
        let ms = sums.iter().sum::<f64>() / n as f64;
        let mp = props.iter().sum::<f64>() / n as f64;
        let mut cov = 0.0;
        let mut vs = 0.0;
        let mut vp = 0.0;
        for i in 0..n {
            cov += (sums[i] - ms) * (props[i] - mp);
            vs += (sums[i] - ms).powi(2);
            vp += (props[i] - mp).powi(2);
        }
        let corr = cov / (vs.sqrt() * vp.sqrt());
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr={corr}");
    }
}
