//! Benchmark harness: seeded instance generation, both formulations solved
//! side by side, relative errors against the exact oracle, and
//! deterministic CSV/JSON emission.
//!
//! Everything is keyed off one master seed. Instances run as independent
//! parallel jobs and are merged by `(pattern, n, instance_seed)`, so the
//! output bytes do not depend on the worker count. Wall times are kept in
//! memory for display but never written to CSV or JSON.

use crate::qubo::{
    build_naive, build_proposed, decode_naive, decode_proposed, default_penalty_weight, objective,
    top2, QuboError,
};
use crate::radio::{sinr_matrix, BeamKind, RadioConfig, RadioError};
use crate::scenario::{
    capacities_for, generate_biased, generate_uniform, random_stations, Area, RemainderPolicy,
    Scenario, ScenarioError,
};
use crate::seeding::mix_seed;
use crate::solvers::{
    best_feasible, exact_assignment, simulated_anneal, SaConfig, SolverError,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentsError {
    #[error("optimal objective is zero; relative error is undefined")]
    ZeroOptimum,
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// How phones are laid out in a benchmark instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhoneDistribution {
    Uniform,
    Biased,
}

/// One of the four benchmark test patterns: the cross product of phone
/// distribution and antenna family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestPattern {
    pub id: u8,
    pub distribution: PhoneDistribution,
    pub beam: BeamKind,
}

impl TestPattern {
    /// Pattern 1: uniform/isotropic, 2: biased/isotropic,
    /// 3: uniform/Gaussian, 4: biased/Gaussian.
    pub fn all() -> [TestPattern; 4] {
        [
            TestPattern {
                id: 1,
                distribution: PhoneDistribution::Uniform,
                beam: BeamKind::Isotropic,
            },
            TestPattern {
                id: 2,
                distribution: PhoneDistribution::Biased,
                beam: BeamKind::Isotropic,
            },
            TestPattern {
                id: 3,
                distribution: PhoneDistribution::Uniform,
                beam: BeamKind::Gaussian,
            },
            TestPattern {
                id: 4,
                distribution: PhoneDistribution::Biased,
                beam: BeamKind::Gaussian,
            },
        ]
    }

    pub fn from_id(id: u8) -> Option<TestPattern> {
        Self::all().into_iter().find(|p| p.id == id)
    }
}

/// Which QUBO encoding a record refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Naive,
    Proposed,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Naive => "naive",
            Formulation::Proposed => "proposed",
        })
    }
}

/// Which solver produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Sa,
    Exact,
    Brute,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Sa => "sa",
            SolverKind::Exact => "exact",
            SolverKind::Brute => "brute",
        })
    }
}

/// One solved (instance, formulation, solver) outcome.
///
/// `e` and the error columns are absent when no feasible solution was
/// found. `wall_time` is informational only and never serialized, keeping
/// result files byte-reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub pattern: u8,
    pub n: usize,
    pub m: usize,
    pub instance_seed: u64,
    pub formulation: Formulation,
    pub solver: SolverKind,
    pub e: Option<f64>,
    pub e_star: f64,
    pub relative_error: Option<f64>,
    pub signed_relative_error: Option<f64>,
    pub feasible: bool,
    pub wall_time: Duration,
}

/// Positive-is-worse relative error `(E* - E) / |E*|`. Non-negative
/// whenever `E <= E*`, which the exact oracle guarantees for feasible
/// solutions of this maximization problem.
pub fn relative_error(e: f64, e_star: f64) -> Result<f64, ExperimentsError> {
    if e_star == 0.0 {
        return Err(ExperimentsError::ZeroOptimum);
    }
    Ok((e_star - e) / e_star.abs())
}

/// The literal signed form `(E - E*) / E*`; non-positive here when
/// `E <= E*` and `E* > 0`. Emitted alongside the positive convention.
pub fn signed_relative_error(e: f64, e_star: f64) -> Result<f64, ExperimentsError> {
    if e_star == 0.0 {
        return Err(ExperimentsError::ZeroOptimum);
    }
    Ok((e - e_star) / e_star)
}

/// Shared knobs for instance generation and QUBO construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentContext {
    pub area: Area,
    pub radio: RadioConfig,
    /// Station that attracts the cluster in biased patterns.
    pub hot_station: usize,
    pub hot_fraction: f64,
    /// Penalty-weight overrides; `None` uses twice the largest |SINR|.
    pub lambda_one_hot: Option<f64>,
    pub lambda_capacity: Option<f64>,
    pub lambda_reduced: Option<f64>,
}

impl Default for ExperimentContext {
    fn default() -> Self {
        ExperimentContext {
            area: Area {
                width: 700.0,
                height: 700.0,
            },
            radio: RadioConfig::default(),
            hot_station: 0,
            hot_fraction: 0.6,
            lambda_one_hot: None,
            lambda_capacity: None,
            lambda_reduced: None,
        }
    }
}

const TAG_STATIONS: u64 = 0x57A7_1045;
const TAG_PHONES: u64 = 0x9405_E5;
const TAG_SA: u64 = 0xA44E_A1;
const TAG_COMPARISON: u64 = 0xC04_9A2E;
const TAG_SWEEP: u64 = 0x54EE_9;

/// Instance seed of the `k`-th instance of `pattern` in
/// [`run_pattern_comparison`] under `master_seed`.
pub fn comparison_instance_seed(master_seed: u64, pattern_id: u8, k: usize) -> u64 {
    mix_seed(&[master_seed, TAG_COMPARISON, pattern_id as u64, k as u64])
}

/// Instance seed of the `k`-th instance at phone count `n` in
/// [`run_n_sweep`] under `master_seed`.
pub fn sweep_instance_seed(master_seed: u64, n: usize, k: usize) -> u64 {
    mix_seed(&[master_seed, TAG_SWEEP, n as u64, k as u64])
}

/// Sampler seed used for `formulation` on the instance with
/// `instance_seed`, so a single experiment run can be reproduced in
/// isolation.
pub fn instance_sa_seed(instance_seed: u64, formulation: Formulation) -> u64 {
    mix_seed(&[instance_seed, TAG_SA, formulation as u64])
}

/// Builds the scenario a given `(pattern, n, m, instance_seed)` job solves,
/// so any experiment instance can be reconstructed and inspected.
pub fn instance_scenario(
    ctx: &ExperimentContext,
    pattern: TestPattern,
    n: usize,
    m: usize,
    instance_seed: u64,
) -> Result<Scenario, ExperimentsError> {
    let stations = random_stations(
        m,
        &ctx.area,
        pattern.beam,
        mix_seed(&[instance_seed, TAG_STATIONS]),
    );
    let phone_seed = mix_seed(&[instance_seed, TAG_PHONES]);
    let scenario = match pattern.distribution {
        PhoneDistribution::Uniform => generate_uniform(n, stations, ctx.area, phone_seed)?,
        PhoneDistribution::Biased => generate_biased(
            n,
            stations,
            ctx.area,
            ctx.hot_station,
            ctx.hot_fraction,
            phone_seed,
        )?,
    };
    Ok(scenario)
}

/// Generates one instance and solves both formulations with SA, reporting
/// each against the shared exact optimum. Returns two records.
pub fn run_single_instance(
    ctx: &ExperimentContext,
    pattern: TestPattern,
    n: usize,
    m: usize,
    instance_seed: u64,
    sa: &SaConfig,
) -> Result<Vec<ResultRecord>, ExperimentsError> {
    let scenario = instance_scenario(ctx, pattern, n, m, instance_seed)?;
    let sinr = sinr_matrix(&scenario, &ctx.radio)?;
    let caps = &scenario.capacities;
    let exact = exact_assignment(&sinr, caps)?;
    let e_star = objective(&exact, &sinr)?;
    if e_star == 0.0 {
        return Err(ExperimentsError::ZeroOptimum);
    }
    let lambda_default = default_penalty_weight(&sinr);
    let table = top2(&sinr);

    let mut records = Vec::with_capacity(2);
    for formulation in [Formulation::Naive, Formulation::Proposed] {
        let qubo = match formulation {
            Formulation::Naive => build_naive(
                &sinr,
                caps,
                ctx.lambda_one_hot.unwrap_or(lambda_default),
                ctx.lambda_capacity.unwrap_or(lambda_default),
            )?,
            Formulation::Proposed => build_proposed(
                &table,
                caps,
                ctx.lambda_reduced.unwrap_or(lambda_default),
            )?,
        };
        let sa_cfg = SaConfig {
            seed: instance_sa_seed(instance_seed, formulation),
            ..*sa
        };
        let t0 = Instant::now();
        let set = simulated_anneal(&qubo, &sa_cfg);
        let found = best_feasible(&set, |bits| match formulation {
            Formulation::Naive => decode_naive(bits, n, m, caps).expect("sized bits"),
            Formulation::Proposed => decode_proposed(bits, &table, caps).expect("sized bits"),
        });
        let wall_time = t0.elapsed();
        let (e, rel, signed, feasible) = match found {
            Some((assignment, _)) => {
                let e = objective(&assignment, &sinr)?;
                assert!(
                    e <= e_star + 1e-9 * e_star.abs().max(1.0),
                    "feasible SA solution beat the exact oracle: {e} > {e_star}"
                );
                (
                    Some(e),
                    Some(relative_error(e, e_star)?),
                    Some(signed_relative_error(e, e_star)?),
                    true,
                )
            }
            None => (None, None, None, false),
        };
        records.push(ResultRecord {
            pattern: pattern.id,
            n,
            m,
            instance_seed,
            formulation,
            solver: SolverKind::Sa,
            e,
            e_star,
            relative_error: rel,
            signed_relative_error: signed,
            feasible,
            wall_time,
        });
    }
    Ok(records)
}

/// An instance that failed mid-run; the suite records it and continues.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFailure {
    pub pattern: u8,
    pub n: usize,
    pub instance_seed: u64,
    pub message: String,
}

/// Outcome of a multi-instance run: merged records plus any per-instance
/// failures (which do not abort the rest of the suite).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<InstanceFailure>,
}

fn run_jobs(
    ctx: &ExperimentContext,
    jobs: Vec<(TestPattern, usize, usize, u64)>,
    sa: &SaConfig,
) -> RunOutput {
    let outcomes: Vec<_> = jobs
        .into_par_iter()
        .map(|(pattern, n, m, instance_seed)| {
            run_single_instance(ctx, pattern, n, m, instance_seed, sa).map_err(|e| {
                InstanceFailure {
                    pattern: pattern.id,
                    n,
                    instance_seed,
                    message: e.to_string(),
                }
            })
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(rs) => records.extend(rs),
            Err(f) => failures.push(f),
        }
    }
    records.sort_by(|a, b| {
        (a.pattern, a.n, a.instance_seed, a.formulation).cmp(&(
            b.pattern,
            b.n,
            b.instance_seed,
            b.formulation,
        ))
    });
    failures.sort_by(|a, b| {
        (a.pattern, a.n, a.instance_seed).cmp(&(b.pattern, b.n, b.instance_seed))
    });
    RunOutput { records, failures }
}

/// The four test patterns at fixed `(n, m)`, `instances` instances each.
pub fn run_pattern_comparison(
    ctx: &ExperimentContext,
    n: usize,
    m: usize,
    instances: usize,
    sa: &SaConfig,
    master_seed: u64,
) -> Result<RunOutput, ExperimentsError> {
    capacities_for(n, m, RemainderPolicy::Reject)?;
    let mut jobs = Vec::with_capacity(4 * instances);
    for pattern in TestPattern::all() {
        for k in 0..instances {
            jobs.push((pattern, n, m, comparison_instance_seed(master_seed, pattern.id, k)));
        }
    }
    Ok(run_jobs(ctx, jobs, sa))
}

/// Pattern 1 (uniform/isotropic) across a grid of phone counts.
pub fn run_n_sweep(
    ctx: &ExperimentContext,
    n_values: &[usize],
    m: usize,
    instances: usize,
    sa: &SaConfig,
    master_seed: u64,
) -> Result<RunOutput, ExperimentsError> {
    for &n in n_values {
        capacities_for(n, m, RemainderPolicy::Reject)?;
    }
    let pattern = TestPattern::all()[0];
    let mut jobs = Vec::with_capacity(n_values.len() * instances);
    for &n in n_values {
        for k in 0..instances {
            jobs.push((pattern, n, m, sweep_instance_seed(master_seed, n, k)));
        }
    }
    Ok(run_jobs(ctx, jobs, sa))
}

/// Logical variable counts of the two encodings: `(n, n*m, n)` per row.
pub fn variable_count_curve(n_values: &[usize], m: usize) -> Vec<(usize, usize, usize)> {
    n_values.iter().map(|&n| (n, n * m, n)).collect()
}

/// Linear-interpolation quantile of an ascending-sorted slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Per-group statistics over a record set. Error quantiles are computed
/// over feasible records only; infeasible ones count toward the rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub pattern: u8,
    pub n: usize,
    pub m: usize,
    pub formulation: Formulation,
    pub solver: SolverKind,
    pub records: usize,
    pub feasible: usize,
    pub feasibility_rate: f64,
    pub median_relative_error: Option<f64>,
    pub q1_relative_error: Option<f64>,
    pub q3_relative_error: Option<f64>,
}

/// Groups records by `(pattern, n, m, formulation, solver)` and reduces
/// each group to feasibility and relative-error quartiles.
pub fn summarize(records: &[ResultRecord]) -> Vec<SummaryRow> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(u8, usize, usize, Formulation, SolverKind), Vec<&ResultRecord>> =
        BTreeMap::new();
    for r in records {
        groups
            .entry((r.pattern, r.n, r.m, r.formulation, r.solver))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((pattern, n, m, formulation, solver), rs)| {
            let mut errors: Vec<f64> = rs.iter().filter_map(|r| r.relative_error).collect();
            errors.sort_by(f64::total_cmp);
            let feasible = rs.iter().filter(|r| r.feasible).count();
            SummaryRow {
                pattern,
                n,
                m,
                formulation,
                solver,
                records: rs.len(),
                feasible,
                feasibility_rate: feasible as f64 / rs.len() as f64,
                median_relative_error: quantile_sorted(&errors, 0.5),
                q1_relative_error: quantile_sorted(&errors, 0.25),
                q3_relative_error: quantile_sorted(&errors, 0.75),
            }
        })
        .collect()
}

pub const RESULTS_CSV_HEADER: &str =
    "pattern,n,m,instance_seed,formulation,solver,e,e_star,relative_error,signed_relative_error,feasible";

fn opt_to_csv(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Fixed-header CSV of records, one per row, in the given order. Wall
/// times are deliberately not included.
pub fn records_to_csv(records: &[ResultRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.pattern,
            r.n,
            r.m,
            r.instance_seed,
            r.formulation,
            r.solver,
            opt_to_csv(r.e),
            r.e_star,
            opt_to_csv(r.relative_error),
            opt_to_csv(r.signed_relative_error),
            r.feasible
        ));
    }
    out
}

pub fn write_records_csv(
    records: &[ResultRecord],
    path: impl AsRef<Path>,
) -> std::io::Result<()> {
    std::fs::write(path, records_to_csv(records))
}

pub fn summary_to_json(rows: &[SummaryRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("summary serializes");
    s.push('\n');
    s
}

pub fn write_summary_json(rows: &[SummaryRow], path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, summary_to_json(rows))
}
