use crate::error::{DmodError, Result};

/// Numerical policy plus seed for every randomized step.
#[derive(Clone, Debug, PartialEq)]
pub struct ToleranceConfig {
    /// Relative equality tolerance for approximate scalars.
    pub eps: f64,
    /// Eigenvalue clustering radius.
    pub cluster_eps: f64,
    pub rng_seed: u64,
    /// Repetitions of the randomized invertibility test.
    pub pit_trials: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps: 1e-9,
            cluster_eps: 1e-7,
            rng_seed: 0,
            pit_trials: 20,
        }
    }
}

impl ToleranceConfig {
    pub fn with_seed(seed: u64) -> Self {
        ToleranceConfig {
            rng_seed: seed,
            ..Default::default()
        }
    }

    /// Checks `0 < eps <= cluster_eps < 1`.
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= self.cluster_eps && self.cluster_eps < 1.0) {
            return Err(DmodError::Config(format!(
                "need 0 < eps <= cluster_eps < 1, got eps={} cluster_eps={}",
                self.eps, self.cluster_eps
            )));
        }
        if self.pit_trials == 0 {
            return Err(DmodError::Config("pit_trials must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_inverted_bounds() {
        let cfg = ToleranceConfig {
            eps: 1e-3,
            cluster_eps: 1e-6,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
