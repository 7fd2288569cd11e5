//! Numeric substrate shared by the special-function and spectral modules.

mod diff;
mod gamma;
mod quadrature;
mod roots;
mod scaled;

pub use diff::{backward_diff, central_diff, DerivOrder};
pub use gamma::{gamma, ln_gamma, GAMMA_MAX_ARG};
pub use quadrature::{integrate, integrate_semi_infinite, integrate_tanh_sinh, QuadratureResult};
pub use roots::{brent_root, golden_section_min};
pub use scaled::{frexp, ldexp, ScaledReal};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convergence controls shared by quadrature and root finding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
    pub quad_panels_max: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel_tol: 1e-13,
            abs_tol: 1e-300,
            max_iter: 200,
            quad_panels_max: 4096,
        }
    }
}

impl Tolerances {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Tolerances { rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidTolerances(format!(
                "rel_tol = {} and abs_tol = {} must be positive",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_iter < 10 {
            return Err(Error::InvalidTolerances(format!("max_iter = {} must be >= 10", self.max_iter)));
        }
        if self.quad_panels_max == 0 {
            return Err(Error::InvalidTolerances("quad_panels_max must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerances_are_valid() {
        assert!(Tolerances::default().validate().is_ok());
    }

    #[test]
    fn rejects_degenerate_tolerances() {
        let t = Tolerances::default();
        assert!(Tolerances { rel_tol: 0.0, ..t }.validate().is_err());
        assert!(Tolerances { abs_tol: -1.0, ..t }.validate().is_err());
        assert!(Tolerances { max_iter: 9, ..t }.validate().is_err());
        assert!(Tolerances { quad_panels_max: 0, ..t }.validate().is_err());
    }
}
