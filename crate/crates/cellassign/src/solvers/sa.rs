//! Simulated annealing over a [`Qubo`].
//!
//! Each read is an independent restart: random initial state, then
//! `sweeps_per_read` sweeps of single-bit Metropolis updates, one inverse
//! temperature per sweep along a geometric ladder. Reads draw from
//! per-read RNG substreams of one seeded generator, so the output is a
//! pure function of `(qubo, config)` no matter how many worker threads
//! run the reads.

use super::{BetaSchedule, SaConfig, Sample, SampleSet};
use crate::qubo::Qubo;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

/// Beyond this, exp(-beta * dE) underflows below every representable
/// uniform draw, so the move can be rejected without consuming randomness.
const EXP_ARG_LIMIT: f64 = 745.0;

/// Coefficient-derived beta range `(beta_min, beta_max)`.
///
/// `beta_min = ln(2) / dE_max` accepts a move of the largest relevant
/// scale with probability about 1/2 on the first sweep; `beta_max =
/// ln(100) / dE_min` pushes the smallest resolvable step to about 1%
/// acceptance on the last.
///
/// When the QUBO has couplings, both bounds are set from the strongest
/// coupling magnitude `J`: `dE_max = 2J`, `dE_min = J/16`. In
/// penalty-encoded problems every coupling carries the penalty weight, and
/// progress comes from paired flips that tunnel through a barrier of a
/// few `J`; a ladder concentrated on that window (beta between ~0.3/J and
/// ~75/J) spends its sweeps where moves still happen instead of on a long
/// frozen tail. Linear terms are deliberately ignored there: in these
/// encodings the large fields are shared constraint offsets that downhill
/// moves repair at any temperature, and heating until they melt wastes
/// most of the ladder.
///
/// Without couplings the variables are independent, and the range falls
/// back to the field structure: `dE_max` is the largest flip magnitude
/// `|h_i|`, `dE_min` the smaller of the smallest nonzero `|h_i|` and the
/// smallest nonzero gap between two fields. Floors of 1e-9 keep the range
/// finite in degenerate cases.
pub fn default_beta_range(q: &Qubo) -> (f64, f64) {
    let ln2 = (2.0f64).ln();
    let ln100 = (100.0f64).ln();
    let max_j = q
        .quadratic()
        .values()
        .fold(0.0f64, |m, &c| m.max(c.abs()));
    if max_j > 0.0 {
        return (ln2 / (2.0 * max_j), ln100 / (max_j / 16.0).max(1e-9));
    }
    let mut de_max = 0.0f64;
    let mut de_min = f64::INFINITY;
    for &c in q.linear().values() {
        de_max = de_max.max(c.abs());
        if c != 0.0 {
            de_min = de_min.min(c.abs());
        }
    }
    let mut fields: Vec<f64> = q.linear().values().copied().collect();
    fields.sort_by(f64::total_cmp);
    for w in fields.windows(2) {
        let gap = w[1] - w[0];
        if gap > 0.0 {
            de_min = de_min.min(gap);
        }
    }
    de_max = de_max.max(1e-9);
    if !de_min.is_finite() {
        de_min = de_max;
    }
    (ln2 / de_max, ln100 / de_min.max(1e-9))
}

/// Geometric interpolation from `beta_min` to `beta_max` inclusive, one
/// value per sweep. A single sweep uses `beta_max` alone.
pub fn geometric_beta_ladder(beta_min: f64, beta_max: f64, sweeps: usize) -> Vec<f64> {
    assert!(sweeps >= 1);
    assert!(0.0 < beta_min && beta_min <= beta_max);
    if sweeps == 1 {
        return vec![beta_max];
    }
    let ratio = beta_max / beta_min;
    (0..sweeps)
        .map(|s| beta_min * ratio.powf(s as f64 / (sweeps - 1) as f64))
        .collect()
}

/// Symmetric adjacency view of a QUBO for O(degree) flip updates.
struct Couplings {
    linear: Vec<f64>,
    neighbors: Vec<Vec<(u32, f64)>>,
}

impl Couplings {
    fn new(q: &Qubo) -> Self {
        let n = q.num_vars();
        let mut linear = vec![0.0; n];
        for (&i, &c) in q.linear() {
            linear[i] = c;
        }
        let mut neighbors: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (&(i, j), &c) in q.quadratic() {
            neighbors[i].push((j as u32, c));
            neighbors[j].push((i as u32, c));
        }
        Couplings { linear, neighbors }
    }
}

/// Samples `cfg.num_reads` annealed states of `q`.
///
/// Panics if the config is invalid (see [`SaConfig::validate`]); run that
/// first when the config comes from user input.
pub fn simulated_anneal(q: &Qubo, cfg: &SaConfig) -> SampleSet {
    cfg.validate().expect("invalid SaConfig");
    let (beta_min, beta_max) = match cfg.beta_schedule {
        BetaSchedule::Auto => default_beta_range(q),
        BetaSchedule::Geometric { beta_min, beta_max } => (beta_min, beta_max),
    };
    let betas = geometric_beta_ladder(beta_min, beta_max, cfg.sweeps_per_read);
    let couplings = Couplings::new(q);
    let n = q.num_vars();

    let t0 = Instant::now();
    let mut samples: Vec<Sample> = (0..cfg.num_reads)
        .into_par_iter()
        .map(|read_index| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(read_index as u64);
            let mut bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            // field[v] = energy change of setting v, given the other bits.
            let mut field = couplings.linear.clone();
            for v in 0..n {
                if bits[v] {
                    for &(u, w) in &couplings.neighbors[v] {
                        field[u as usize] += w;
                    }
                }
            }
            let mut order: Vec<u32> = (0..n as u32).collect();
            for &beta in &betas {
                if cfg.randomize_order {
                    // Fisher-Yates off the same stream keeps runs reproducible.
                    for k in (1..order.len()).rev() {
                        order.swap(k, rng.random_range(0..=k));
                    }
                }
                for &v in &order {
                    let v = v as usize;
                    let de = if bits[v] { -field[v] } else { field[v] };
                    let accept = if de <= 0.0 {
                        true
                    } else {
                        let arg = beta * de;
                        arg <= EXP_ARG_LIMIT && rng.random::<f64>() < (-arg).exp()
                    };
                    if accept {
                        let delta = if bits[v] { -1.0 } else { 1.0 };
                        bits[v] = !bits[v];
                        for &(u, w) in &couplings.neighbors[v] {
                            field[u as usize] += w * delta;
                        }
                    }
                }
            }
            // Recorded energy is the exact evaluation, not the incremental
            // tracker, so the SampleSet invariant holds bit-for-bit.
            let energy = q.energy(&bits).expect("bits sized to qubo");
            Sample {
                read_index,
                bits,
                energy,
            }
        })
        .collect();

    samples.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then_with(|| a.bits.cmp(&b.bits))
            .then_with(|| a.read_index.cmp(&b.read_index))
    });
    SampleSet {
        samples,
        config: *cfg,
        beta_range: (beta_min, beta_max),
        wall_time: t0.elapsed(),
    }
}
