//! Solvers: a seeded simulated-annealing sampler plus two exact oracles
//! (min-cost flow for the relaxed assignment problem, brute force for small
//! QUBOs). Every solver is a pure function of its inputs and seed.

mod brute;
mod exact;
mod sa;

pub use brute::{brute_force, brute_force_with_cap, BRUTE_FORCE_CAP};
pub use exact::{exact_assignment, exact_assignment_restricted};
pub use sa::{default_beta_range, geometric_beta_ladder, simulated_anneal};

use crate::qubo::{Assignment, QuboError};
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("qubo has {vars} variables, over the brute-force cap of {cap}")]
    TooLarge { vars: usize, cap: usize },
    #[error("capacities sum to {total} but there are {phones} phones")]
    InfeasibleCapacities { total: usize, phones: usize },
    #[error("dimension mismatch: {detail}")]
    Dimension { detail: String },
    #[error("no feasible assignment within the restricted station choices")]
    Infeasible,
    #[error("invalid annealer config: {detail}")]
    BadConfig { detail: String },
    #[error("bad hex bitstring: {detail}")]
    BadHex { detail: String },
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Inverse-temperature schedule for the annealer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaSchedule {
    /// Derive the range from the QUBO coefficients; see [`default_beta_range`].
    Auto,
    Geometric { beta_min: f64, beta_max: f64 },
}

/// Annealer parameters. The defaults (1000 reads of 1000 sweeps) are the
/// benchmark settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    pub num_reads: usize,
    pub sweeps_per_read: usize,
    pub beta_schedule: BetaSchedule,
    pub seed: u64,
    /// Visit variables in a fresh random order each sweep instead of
    /// 0..n-1. Off by default; either way runs are reproducible.
    pub randomize_order: bool,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            num_reads: 1000,
            sweeps_per_read: 1000,
            beta_schedule: BetaSchedule::Auto,
            seed: 0,
            randomize_order: false,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.num_reads == 0 {
            return Err(SolverError::BadConfig {
                detail: "num_reads must be at least 1".into(),
            });
        }
        if self.sweeps_per_read == 0 {
            return Err(SolverError::BadConfig {
                detail: "sweeps_per_read must be at least 1".into(),
            });
        }
        if let BetaSchedule::Geometric { beta_min, beta_max } = self.beta_schedule {
            if !(beta_min.is_finite() && beta_max.is_finite() && 0.0 < beta_min && beta_min < beta_max)
            {
                return Err(SolverError::BadConfig {
                    detail: format!("need 0 < beta_min < beta_max, got {beta_min}..{beta_max}"),
                });
            }
        }
        Ok(())
    }
}

/// One annealer read: the final state of an independent restart.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub read_index: usize,
    pub bits: Vec<bool>,
    pub energy: f64,
}

/// All reads of an annealing run, sorted ascending by
/// `(energy, bits, read_index)` so the ordering is total and reproducible.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    /// The configuration that produced this set.
    pub config: SaConfig,
    /// The beta range actually used (resolved from `Auto` if needed).
    pub beta_range: (f64, f64),
    pub wall_time: std::time::Duration,
}

impl SampleSet {
    /// Lowest-energy sample.
    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    /// CSV export with header `read_index,energy,feasible,bits`; bits are
    /// hex-packed (see [`bits_to_hex`]) and feasibility comes from the
    /// caller's decoder. Rows follow the sorted sample order.
    pub fn write_csv(
        &self,
        path: impl AsRef<Path>,
        mut feasible: impl FnMut(&[bool]) -> bool,
    ) -> Result<(), SolverError> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        writeln!(w, "read_index,energy,feasible,bits")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{}",
                s.read_index,
                s.energy,
                feasible(&s.bits),
                bits_to_hex(&s.bits)
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Lowest-energy sample whose decoded assignment is feasible, with that
/// assignment; `None` when no sample decodes to a feasible solution.
pub fn best_feasible<'a>(
    set: &'a SampleSet,
    mut decode: impl FnMut(&[bool]) -> Assignment,
) -> Option<(Assignment, &'a Sample)> {
    set.samples.iter().find_map(|s| {
        let a = decode(&s.bits);
        a.is_feasible().then_some((a, s))
    })
}

/// Hex packing of a bitstring: nibble `k` holds bits `4k..4k+4`, bit
/// `4k + j` at weight `8 >> j`. `[true, false, false, false]` is "8".
pub fn bits_to_hex(bits: &[bool]) -> String {
    let mut out = String::with_capacity(bits.len().div_ceil(4));
    for chunk in bits.chunks(4) {
        let mut nibble = 0u8;
        for (j, &b) in chunk.iter().enumerate() {
            if b {
                nibble |= 8 >> j;
            }
        }
        out.push(char::from_digit(nibble as u32, 16).unwrap());
    }
    out
}

/// Inverse of [`bits_to_hex`] for a known bit count.
pub fn hex_to_bits(hex: &str, num_bits: usize) -> Result<Vec<bool>, SolverError> {
    if hex.len() != num_bits.div_ceil(4) {
        return Err(SolverError::BadHex {
            detail: format!("{} hex digits for {num_bits} bits", hex.len()),
        });
    }
    let mut bits = Vec::with_capacity(num_bits);
    for (k, ch) in hex.chars().enumerate() {
        let nibble = ch.to_digit(16).ok_or_else(|| SolverError::BadHex {
            detail: format!("non-hex digit {ch:?}"),
        })? as u8;
        for j in 0..4 {
            let idx = 4 * k + j;
            if idx < num_bits {
                bits.push(nibble & (8 >> j) != 0);
            } else if nibble & (8 >> j) != 0 {
                return Err(SolverError::BadHex {
                    detail: "padding bits must be zero".into(),
                });
            }
        }
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let bits = vec![true, false, false, false, true, true];
        let hex = bits_to_hex(&bits);
        assert_eq!(hex, "8c");
        assert_eq!(hex_to_bits(&hex, 6).unwrap(), bits);
        assert_eq!(bits_to_hex(&[]), "");
        assert_eq!(hex_to_bits("", 0).unwrap(), Vec::<bool>::new());
        for n in 1..40usize {
            let bits: Vec<bool> = (0..n).map(|i| (i * 7 + n) % 3 == 0).collect();
            assert_eq!(hex_to_bits(&bits_to_hex(&bits), n).unwrap(), bits, "n={n}");
        }
    }

    #[test]
    fn hex_rejects_garbage() {
        assert!(matches!(hex_to_bits("zz", 8), Err(SolverError::BadHex { .. })));
        assert!(matches!(hex_to_bits("ff", 12), Err(SolverError::BadHex { .. })));
        // 6-bit string whose padding bits are set.
        assert!(matches!(hex_to_bits("8f", 6), Err(SolverError::BadHex { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(SaConfig::default().validate().is_ok());
        assert!(SaConfig {
            num_reads: 0,
            ..SaConfig::default()
        }
        .validate()
        .is_err());
        assert!(SaConfig {
            sweeps_per_read: 0,
            ..SaConfig::default()
        }
        .validate()
        .is_err());
        assert!(SaConfig {
            beta_schedule: BetaSchedule::Geometric {
                beta_min: 2.0,
                beta_max: 1.0
            },
            ..SaConfig::default()
        }
        .validate()
        .is_err());
        assert!(SaConfig {
            beta_schedule: BetaSchedule::Geometric {
                beta_min: 0.5,
                beta_max: 5.0
            },
            ..SaConfig::default()
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn sa_config_serde_shape() {
        let cfg: SaConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, SaConfig::default());
        let cfg: SaConfig = serde_json::from_str(
            r#"{"num_reads": 5, "beta_schedule": {"geometric": {"beta_min": 0.1, "beta_max": 10.0}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.num_reads, 5);
        assert_eq!(
            cfg.beta_schedule,
            BetaSchedule::Geometric {
                beta_min: 0.1,
                beta_max: 10.0
            }
        );
        let text = serde_json::to_string(&SaConfig::default()).unwrap();
        assert!(text.contains("\"beta_schedule\":\"auto\""), "{text}");
    }
}
