use prob_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerances, grid sizes and seeds shared by every optimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Bracket width at which 1-D golden-section searches stop.
    pub tol_1d: f64,
    /// Smallest step of the simplex direct searches.
    pub tol_simplex: f64,
    /// Lattice points per simplex coordinate in the coarse grid stage.
    pub grid_points_per_dim: usize,
    /// Number of best grid cells refined by local search.
    pub refinement_rounds: usize,
    /// Seeded restarts of the auxiliary-kernel ascent.
    pub restarts: usize,
    /// Upper end of every search over the tilt parameter `s ≥ 0`.
    pub s_max_cap: f64,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            tol_1d: 1e-9,
            tol_simplex: 1e-6,
            grid_points_per_dim: 64,
            refinement_rounds: 3,
            restarts: 16,
            s_max_cap: 1e4,
            rng_seed: 0x5eed_2024,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("tol_1d", self.tol_1d)?;
        positive("tol_simplex", self.tol_simplex)?;
        positive("s_max_cap", self.s_max_cap)?;
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.grid_points_per_dim < 2 {
            return Err(Error::Config("grid_points_per_dim must be at least 2".into()));
        }
        if self.refinement_rounds == 0 {
            return Err(Error::Config("refinement_rounds must be at least 1".into()));
        }
        Ok(())
    }

    /// Seed for an independent sub-task, derived deterministically from the
    /// base seed so that parallel schedules do not change results.
    pub fn derived_seed(&self, stream: u64) -> u64 {
        // SplitMix64 finalizer over (seed, stream).
        let mut z = self
            .rng_seed
            .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = OptimizerConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.tol_1d, 1e-9);
        assert_eq!(cfg.grid_points_per_dim, 64);
        assert_eq!(cfg.restarts, 16);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            OptimizerConfig { tol_1d: 0.0, ..Default::default() },
            OptimizerConfig { tol_simplex: -1.0, ..Default::default() },
            OptimizerConfig { restarts: 0, ..Default::default() },
            OptimizerConfig { s_max_cap: f64::INFINITY, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
    }

    #[test]
    fn derived_seeds_differ_per_stream() {
        let cfg = OptimizerConfig::default();
        assert_ne!(cfg.derived_seed(0), cfg.derived_seed(1));
        assert_eq!(cfg.derived_seed(7), cfg.derived_seed(7));
    }
}
