use serde::{Deserialize, Serialize};

use crate::error::{HetError, Result};

/// Numerical tolerances. One copy travels with every scan result so a run
/// can be reproduced from its output alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Level-curve residual bound, relative to max(1, |c|).
    pub newton_rel: f64,
    /// Crossing functional residual, relative to the functional's sample scale.
    pub root_rel: f64,
    /// Minimum sine of the angle between a curve and the level set it crosses.
    pub transversal_rel: f64,
    /// Quadratic-tangency threshold factor; the bound is quad_factor / r(c).
    pub quad_factor: f64,
    /// Maximum tangent or phase turn between adjacent curve samples (radians).
    pub max_turn: f64,
    /// Required agreement between independent tangency detectors (relative).
    pub agreement_rel: f64,
    /// Trace margin below 2 that separates elliptic from undecided points.
    pub parabolic: f64,
    /// Allowed |det - 1| for composed Jacobians.
    pub det: f64,
    /// Relative step for finite-difference cross-checks.
    pub fd_step: f64,
    /// Required agreement between analytic and finite-difference derivatives.
    pub fd_agree: f64,
    /// Hard cap on samples per curve.
    pub max_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            newton_rel: 1e-14,
            root_rel: 1e-12,
            transversal_rel: 1e-6,
            quad_factor: 1e-3,
            max_turn: 0.2,
            agreement_rel: 1e-6,
            parabolic: 1e-6,
            det: 1e-6,
            fd_step: 1e-6,
            fd_agree: 1e-4,
            max_samples: 2_000_000,
        }
    }
}

impl Tolerances {
    /// Override a single entry by name, as used by `--tol key=value`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || HetError::InvalidInput(format!("bad tolerance value {key}={value}"));
        if key == "max_samples" {
            self.max_samples = value.parse().map_err(|_| bad())?;
            return Ok(());
        }
        let x: f64 = value.parse().map_err(|_| bad())?;
        if !(x.is_finite() && x > 0.0) {
            return Err(bad());
        }
        let slot = match key {
            "newton_rel" => &mut self.newton_rel,
            "root_rel" => &mut self.root_rel,
            "transversal_rel" => &mut self.transversal_rel,
            "quad_factor" => &mut self.quad_factor,
            "max_turn" => &mut self.max_turn,
            "agreement_rel" => &mut self.agreement_rel,
            "parabolic" => &mut self.parabolic,
            "det" => &mut self.det,
            "fd_step" => &mut self.fd_step,
            "fd_agree" => &mut self.fd_agree,
            _ => return Err(HetError::InvalidInput(format!("unknown tolerance `{key}`"))),
        };
        *slot = x;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_known_key() {
        let mut t = Tolerances::default();
        t.set("max_turn", "0.1").unwrap();
        assert_eq!(t.max_turn, 0.1);
        t.set("max_samples", "10").unwrap();
        assert_eq!(t.max_samples, 10);
    }

    #[test]
    fn reject_unknown_or_nonpositive() {
        let mut t = Tolerances::default();
        assert!(t.set("nope", "1").is_err());
        assert!(t.set("det", "-1").is_err());
        assert!(t.set("det", "abc").is_err());
    }
}
