//! Growth exponents and ellipticity constants of an integrand.

use crate::{Error, Result};

/// The exponents and ellipticity constants `(p, q, mu, nu, Lambda, nu_tilde)`
/// governing an integrand.
///
/// `nu_tilde = 0` declares the plain (p,q)-growth bounds; `nu_tilde > 0`
/// declares the regularized bounds with a q-growth ellipticity floor, under
/// which the energy has standard q-growth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthParams {
    pub p: f64,
    pub q: f64,
    /// Degeneracy parameter; H_mu(z) = mu^2 + |z|^2.
    pub mu: f64,
    /// Lower ellipticity constant.
    pub nu: f64,
    /// Upper growth constant.
    pub lambda_up: f64,
    /// Lower q-ellipticity constant (0 in plain mode).
    pub nu_tilde: f64,
}

impl GrowthParams {
    pub fn new(p: f64, q: f64, mu: f64, nu: f64, lambda_up: f64, nu_tilde: f64) -> Result<Self> {
        let gp = GrowthParams { p, q, mu, nu, lambda_up, nu_tilde };
        gp.validate()?;
        Ok(gp)
    }

    /// True when the q-growth ellipticity floor is declared.
    pub fn regularized_mode(&self) -> bool {
        self.nu_tilde > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidGrowthParams(m));
        if !(self.p > 1.0 && self.p.is_finite()) {
            return fail(format!("p = {} must satisfy 1 < p < inf", self.p));
        }
        if !(self.q >= self.p && self.q.is_finite()) {
            return fail(format!("q = {} must satisfy p <= q < inf", self.q));
        }
        if !(self.nu > 0.0) {
            return fail(format!("nu = {} must be positive", self.nu));
        }
        if self.lambda_up < self.nu {
            return fail(format!("lambda_up = {} must be >= nu = {}", self.lambda_up, self.nu));
        }
        if self.nu_tilde < 0.0 {
            return fail(format!("nu_tilde = {} must be >= 0", self.nu_tilde));
        }
        if self.regularized_mode() {
            if !(self.mu > 0.0 && self.mu <= 2.0) {
                return fail(format!("mu = {} must lie in (0, 2] in regularized mode", self.mu));
            }
        } else if !(self.mu >= 0.0 && self.mu <= 1.0) {
            return fail(format!("mu = {} must lie in [0, 1]", self.mu));
        }
        Ok(())
    }

    /// The exponent relation `q < 3p` needed by the Lipschitz estimate.
    pub fn lipschitz_exponent_ok(&self) -> bool {
        self.q < 3.0 * self.p
    }

    /// Requires `q < 3p` and returns `2/(3p - q)`, the second exponent of the
    /// Lipschitz estimate.
    pub fn lipschitz_second_exponent(&self) -> Result<f64> {
        if !self.lipschitz_exponent_ok() {
            return Err(Error::ExponentOutOfRange { q: self.q, three_p: 3.0 * self.p });
        }
        Ok(2.0 / (3.0 * self.p - self.q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_plain_and_regularized() {
        GrowthParams::new(2.0, 4.0, 0.0, 1.0, 12.0, 0.0).unwrap();
        GrowthParams::new(2.0, 4.0, 1.0, 1.0, 12.0, 0.5).unwrap();
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(GrowthParams::new(1.0, 2.0, 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(GrowthParams::new(2.0, 1.5, 0.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_mu_out_of_mode_range() {
        // plain mode: mu in [0, 1]
        assert!(GrowthParams::new(2.0, 3.0, 1.5, 1.0, 2.0, 0.0).is_err());
        // regularized mode: mu in (0, 2]
        assert!(GrowthParams::new(2.0, 3.0, 0.0, 1.0, 2.0, 1.0).is_err());
        assert!(GrowthParams::new(2.0, 3.0, 2.0, 1.0, 2.0, 1.0).is_ok());
    }

    #[test]
    fn lipschitz_exponent() {
        let gp = GrowthParams::new(2.0, 4.0, 1.0, 1.0, 12.0, 1.0).unwrap();
        assert_eq!(gp.lipschitz_second_exponent().unwrap(), 1.0);
        let bad = GrowthParams::new(2.0, 6.0, 1.0, 1.0, 24.0, 1.0).unwrap();
        assert!(matches!(bad.lipschitz_second_exponent(), Err(Error::ExponentOutOfRange { .. })));
    }
}
