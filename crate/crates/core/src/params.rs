use crate::error::{Error, Result};

/// Material and model parameters of the relaxation system.
///
/// The pressure law is the gamma-law `p = eos_a * rho^eos_gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    /// Shear viscosity.
    pub nu: f64,
    /// Bulk viscosity.
    pub kappa: f64,
    /// Relaxation scale of the deviatoric stress.
    pub eps1: f64,
    /// Relaxation scale of the bulk stress.
    pub eps2: f64,
    pub eos_a: f64,
    pub eos_gamma: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self {
            nu: 1.0,
            kappa: 1.0,
            eps1: 0.1,
            eps2: 0.1,
            eos_a: 1.0,
            eos_gamma: 2.0,
        }
    }
}

impl PhysParams {
    /// Same material with both relaxation scales set to `eps`.
    pub fn with_eps(self, eps: f64) -> Self {
        Self {
            eps1: eps,
            eps2: eps,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nu", self.nu),
            ("kappa", self.kappa),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("eos_a", self.eos_a),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Param {
                    name,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        if !(self.eos_gamma.is_finite() && self.eos_gamma > 1.0) {
            return Err(Error::Param {
                name: "eos_gamma",
                reason: format!("must be finite and > 1, got {}", self.eos_gamma),
            });
        }
        Ok(())
    }

    /// Squared coupling strength `(4/3)/eps1^2 + 1/eps2^2` of the longitudinal
    /// stress waves; divided by `rho` it adds to the squared sound speed.
    pub(crate) fn coupling_strength(&self) -> f64 {
        4.0 / (3.0 * self.eps1 * self.eps1) + 1.0 / (self.eps2 * self.eps2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert!(PhysParams::default().validate().is_ok());
    }

    #[test]
    fn rejects_each_bad_field() {
        let base = PhysParams::default();
        let cases = [
            (PhysParams { nu: 0.0, ..base }, "nu"),
            (PhysParams { kappa: -1.0, ..base }, "kappa"),
            (PhysParams { eps1: 0.0, ..base }, "eps1"),
            (PhysParams { eps2: f64::NAN, ..base }, "eps2"),
            (PhysParams { eos_a: 0.0, ..base }, "eos_a"),
            (PhysParams { eos_gamma: 1.0, ..base }, "eos_gamma"),
        ];
        for (params, field) in cases {
            match params.validate() {
                Err(Error::Param { name, .. }) => assert_eq!(name, field),
                other => panic!("expected error for {field}, got {other:?}"),
            }
        }
    }
}
