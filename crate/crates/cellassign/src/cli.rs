//! Implementations behind the `cellassign` binary: one JSON config file,
//! flag overrides that win over file values, and the four commands
//! (`gen`, `solve`, `sweep`, `heatmap`).
//!
//! Every command is a deterministic function of the config and the master
//! seed; nothing reads the clock or OS entropy. All outputs land in the
//! configured directory under fixed names (`scenario.json`, `results.csv`,
//! `summary.json`, `samples_*.csv`, `assignment_*.json`, `heatmap_*`).

use crate::experiments::{
    records_to_csv, relative_error, run_n_sweep, run_pattern_comparison, signed_relative_error,
    summarize, summary_to_json, ExperimentContext, ExperimentsError, Formulation,
    PhoneDistribution, ResultRecord, SolverKind,
};
use crate::qubo::{
    build_naive, build_proposed, decode_naive, decode_proposed, default_penalty_weight, objective,
    top2, Assignment, Qubo, QuboError,
};
use crate::radio::{
    sinr_heatmap, sinr_matrix, AntennaPattern, BeamKind, GridSpec, RadioConfig, RadioError,
    DEFAULT_MAX_CELLS,
};
use crate::scenario::{
    generate_biased_with, generate_uniform_with, random_stations, Area, RemainderPolicy, Scenario,
    ScenarioError, Station,
};
use crate::seeding::mix_seed;
use crate::solvers::{
    best_feasible, brute_force, exact_assignment, exact_assignment_restricted, simulated_anneal,
    SaConfig, SolverError,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Command failure with its process exit code: validation and I/O problems
/// exit 2, an infeasible result exits 3, and internal limits (grid size,
/// brute-force cap) exit 4.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Infeasible(String),
    Limit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Limit(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Infeasible(m) | CliError::Limit(m) => {
                f.write_str(m)
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<RadioError> for CliError {
    fn from(e: RadioError) -> Self {
        match e {
            RadioError::GridTooLarge { .. } => CliError::Limit(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::TooLarge { .. } => CliError::Limit(e.to_string()),
            SolverError::Infeasible => CliError::Infeasible(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<QuboError> for CliError {
    fn from(e: QuboError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ExperimentsError> for CliError {
    fn from(e: ExperimentsError) -> Self {
        match e {
            ExperimentsError::Solver(s) => s.into(),
            ExperimentsError::Radio(r) => r.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// Which formulations `solve` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulationChoice {
    Naive,
    Proposed,
    Both,
}

impl FormulationChoice {
    pub fn formulations(self) -> Vec<Formulation> {
        match self {
            FormulationChoice::Naive => vec![Formulation::Naive],
            FormulationChoice::Proposed => vec![Formulation::Proposed],
            FormulationChoice::Both => vec![Formulation::Naive, Formulation::Proposed],
        }
    }
}

/// Which experiment `sweep` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Four test patterns at one problem size.
    Patterns,
    /// Pattern 1 across a grid of phone counts.
    NSweep,
}

/// Station geometry for `heatmap`.
///
/// `caption`: two stations at (0,0) and (350,350) aiming at each other
/// across the default area. `km`: two stations 1 km apart on the x axis,
/// beams facing each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeatmapPreset {
    Caption,
    Km,
}

/// Scenario-shape settings (`gen`, `solve`, and the sweep context).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub n: usize,
    pub m: usize,
    pub dist: PhoneDistribution,
    pub beam: BeamKind,
    pub hot_station: usize,
    pub hot_fraction: f64,
    pub area: Area,
    pub remainder_policy: RemainderPolicy,
    /// When set, `solve` loads this scenario file instead of generating.
    pub path: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n: 30,
            m: 3,
            dist: PhoneDistribution::Uniform,
            beam: BeamKind::Isotropic,
            hot_station: 0,
            hot_fraction: 0.6,
            area: Area {
                width: 700.0,
                height: 700.0,
            },
            remainder_policy: RemainderPolicy::Reject,
            path: None,
        }
    }
}

/// Penalty-weight overrides; `None` means twice the largest |SINR|.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct QuboConfig {
    pub lambda_one_hot: Option<f64>,
    pub lambda_capacity: Option<f64>,
    pub lambda_reduced: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub instances: usize,
    /// Phone counts for the `n_sweep` kind.
    pub n_values: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Patterns,
            instances: 20,
            n_values: vec![9, 15, 30, 45, 60],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeatmapConfig {
    pub preset: HeatmapPreset,
    pub step_m: f64,
    pub max_cells: u64,
    /// Padding around the stations' bounding box, metres.
    pub margin_m: f64,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        HeatmapConfig {
            preset: HeatmapPreset::Caption,
            step_m: 1.0,
            max_cells: DEFAULT_MAX_CELLS,
            margin_m: 350.0,
        }
    }
}

/// The one config file. Every field has a default, so `{}` is a valid
/// config and flags alone can drive a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Master seed; all per-instance and per-read seeds derive from it.
    pub seed: u64,
    pub out: PathBuf,
    pub formulation: FormulationChoice,
    pub solver: SolverKind,
    /// Exit 0 even when a solve finds no feasible solution.
    pub allow_infeasible: bool,
    pub scenario: ScenarioConfig,
    pub radio: RadioConfig,
    pub qubo: QuboConfig,
    pub sa: SaConfig,
    pub experiment: ExperimentConfig,
    pub heatmap: HeatmapConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            out: PathBuf::from("out"),
            formulation: FormulationChoice::Both,
            solver: SolverKind::Sa,
            allow_infeasible: false,
            scenario: ScenarioConfig::default(),
            radio: RadioConfig::default(),
            qubo: QuboConfig::default(),
            sa: SaConfig::default(),
            experiment: ExperimentConfig::default(),
            heatmap: HeatmapConfig::default(),
        }
    }
}

impl RunConfig {
    /// Default config, or the parsed file when a path is given.
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Validation(format!("cannot read config {}: {e}", p.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Validation(format!("bad config {}: {e}", p.display()))
                })
            }
        }
    }

    /// Applies command-line flags on top; flags win over file values.
    pub fn apply_overrides(&mut self, ov: &Overrides) -> Result<(), CliError> {
        if let Some(seed) = ov.seed {
            self.seed = seed;
        }
        if let Some(out) = &ov.out {
            self.out = out.clone();
        }
        if let Some(n) = ov.n {
            self.scenario.n = n;
        }
        if let Some(m) = ov.m {
            self.scenario.m = m;
        }
        if let Some(dist) = &ov.dist {
            self.scenario.dist = parse_choice(dist, &[("uniform", PhoneDistribution::Uniform), ("biased", PhoneDistribution::Biased)], "--dist")?;
        }
        if let Some(beam) = &ov.beam {
            self.scenario.beam = parse_choice(beam, &[("isotropic", BeamKind::Isotropic), ("gaussian", BeamKind::Gaussian)], "--beam")?;
        }
        if let Some(f) = &ov.formulation {
            self.formulation = parse_choice(
                f,
                &[
                    ("naive", FormulationChoice::Naive),
                    ("proposed", FormulationChoice::Proposed),
                    ("both", FormulationChoice::Both),
                ],
                "--formulation",
            )?;
        }
        if let Some(s) = &ov.solver {
            self.solver = parse_choice(
                s,
                &[
                    ("sa", SolverKind::Sa),
                    ("exact", SolverKind::Exact),
                    ("brute", SolverKind::Brute),
                ],
                "--solver",
            )?;
        }
        if let Some(reads) = ov.reads {
            self.sa.num_reads = reads;
        }
        if let Some(sweeps) = ov.sweeps {
            self.sa.sweeps_per_read = sweeps;
        }
        if let Some(frac) = ov.hot_fraction {
            self.scenario.hot_fraction = frac;
        }
        if let Some(path) = &ov.scenario_path {
            self.scenario.path = Some(path.clone());
        }
        if ov.allow_infeasible {
            self.allow_infeasible = true;
        }
        if let Some(p) = &ov.preset {
            self.heatmap.preset = parse_choice(
                p,
                &[("caption", HeatmapPreset::Caption), ("km", HeatmapPreset::Km)],
                "--preset",
            )?;
        }
        Ok(())
    }
}

/// Raw flag values; `None` leaves the config untouched.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub dist: Option<String>,
    pub beam: Option<String>,
    pub formulation: Option<String>,
    pub solver: Option<String>,
    pub reads: Option<usize>,
    pub sweeps: Option<usize>,
    pub hot_fraction: Option<f64>,
    pub scenario_path: Option<PathBuf>,
    pub allow_infeasible: bool,
    pub preset: Option<String>,
}

fn parse_choice<T: Copy>(raw: &str, table: &[(&str, T)], flag: &str) -> Result<T, CliError> {
    table
        .iter()
        .find(|(name, _)| *name == raw)
        .map(|&(_, v)| v)
        .ok_or_else(|| {
            let names: Vec<&str> = table.iter().map(|&(n, _)| n).collect();
            CliError::Validation(format!(
                "{flag}: unknown value {raw:?}, expected one of {}",
                names.join("|")
            ))
        })
}

fn generated_scenario(cfg: &RunConfig) -> Result<Scenario, CliError> {
    let sc = &cfg.scenario;
    let stations = random_stations(sc.m, &sc.area, sc.beam, cfg.seed);
    let scenario = match sc.dist {
        PhoneDistribution::Uniform => {
            generate_uniform_with(sc.n, stations, sc.area, cfg.seed, sc.remainder_policy)?
        }
        PhoneDistribution::Biased => generate_biased_with(
            sc.n,
            stations,
            sc.area,
            sc.hot_station,
            sc.hot_fraction,
            cfg.seed,
            sc.remainder_policy,
        )?,
    };
    Ok(scenario)
}

fn validated(scenario: Scenario) -> Result<Scenario, CliError> {
    let violations = scenario.validate();
    if violations.is_empty() {
        Ok(scenario)
    } else {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        Err(CliError::Validation(format!(
            "invalid scenario: {}",
            msgs.join("; ")
        )))
    }
}

/// Generates a scenario from the config and writes `scenario.json`.
pub fn cmd_gen(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out)?;
    let scenario = validated(generated_scenario(cfg)?)?;
    let path = cfg.out.join("scenario.json");
    scenario.save_json(&path)?;
    println!(
        "wrote {}: {} phones, {} stations, capacities {:?}, seed {}, valid",
        path.display(),
        scenario.num_phones(),
        scenario.num_stations(),
        scenario.capacities,
        scenario.rng_seed,
    );
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into())
}

/// Solves one scenario with the configured formulation(s) and solver.
///
/// Always computes the exact optimum as the reference. Writes
/// `results.csv`, per-formulation `assignment_*.json` for feasible
/// solutions, and `samples_*.csv` when the solver is SA. Exits 3 if any
/// formulation found no feasible solution and `allow_infeasible` is off.
pub fn cmd_solve(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out)?;
    let scenario = match &cfg.scenario.path {
        Some(p) => Scenario::load_json(p)?,
        None => {
            let s = generated_scenario(cfg)?;
            s.save_json(cfg.out.join("scenario.json"))?;
            s
        }
    };
    let scenario = validated(scenario)?;
    let (n, m) = (scenario.num_phones(), scenario.num_stations());
    let caps = &scenario.capacities;
    let sinr = sinr_matrix(&scenario, &cfg.radio)?;
    let exact = exact_assignment(&sinr, caps)?;
    let e_star = objective(&exact, &sinr)?;
    if e_star == 0.0 {
        return Err(CliError::Validation(
            "optimal objective is zero; relative error is undefined".into(),
        ));
    }
    let table = top2(&sinr);
    let lambda = default_penalty_weight(&sinr);
    println!("N={n} M={m} E*={e_star:.6} solver={}", cfg.solver);

    let mut records = Vec::new();
    let mut infeasible = Vec::new();
    for formulation in cfg.formulation.formulations() {
        let qubo: Qubo = match formulation {
            Formulation::Naive => build_naive(
                &sinr,
                caps,
                cfg.qubo.lambda_one_hot.unwrap_or(lambda),
                cfg.qubo.lambda_capacity.unwrap_or(lambda),
            )?,
            Formulation::Proposed => build_proposed(
                &table,
                caps,
                cfg.qubo.lambda_reduced.unwrap_or(lambda),
            )?,
        };
        let decode = |bits: &[bool]| -> Assignment {
            match formulation {
                Formulation::Naive => decode_naive(bits, n, m, caps).expect("solver-sized bits"),
                Formulation::Proposed => {
                    decode_proposed(bits, &table, caps).expect("solver-sized bits")
                }
            }
        };
        let t0 = Instant::now();
        let solution: Option<Assignment> = match cfg.solver {
            SolverKind::Sa => {
                let sa_cfg = SaConfig {
                    seed: mix_seed(&[cfg.seed, 0xC11, formulation as u64]),
                    ..cfg.sa
                };
                let set = simulated_anneal(&qubo, &sa_cfg);
                set.write_csv(
                    cfg.out.join(format!("samples_{formulation}.csv")),
                    |bits| decode(bits).is_feasible(),
                )?;
                best_feasible(&set, |bits| decode(bits)).map(|(a, _)| a)
            }
            SolverKind::Exact => match formulation {
                Formulation::Naive => Some(exact.clone()),
                Formulation::Proposed => match exact_assignment_restricted(&sinr, caps, &table) {
                    Ok(a) => Some(a),
                    Err(SolverError::Infeasible) => None,
                    Err(e) => return Err(e.into()),
                },
            },
            SolverKind::Brute => {
                let (bits, _) = brute_force(&qubo)?;
                let a = decode(&bits);
                a.is_feasible().then_some(a)
            }
        };
        let wall_time = t0.elapsed();
        let (e, rel, signed, feasible) = match &solution {
            Some(a) => {
                let e = objective(a, &sinr)?;
                (
                    Some(e),
                    Some(relative_error(e, e_star)?),
                    Some(signed_relative_error(e, e_star)?),
                    true,
                )
            }
            None => (None, None, None, false),
        };
        if let Some(a) = &solution {
            let mut text =
                serde_json::to_string_pretty(a).expect("assignment serializes");
            text.push('\n');
            std::fs::write(cfg.out.join(format!("assignment_{formulation}.json")), text)?;
        } else {
            infeasible.push(formulation);
        }
        println!(
            "{formulation:<8} E={} rel_err={} feasible={feasible}",
            fmt_opt(e),
            fmt_opt(rel),
        );
        records.push(ResultRecord {
            pattern: 0,
            n,
            m,
            instance_seed: scenario.rng_seed,
            formulation,
            solver: cfg.solver,
            e,
            e_star,
            relative_error: rel,
            signed_relative_error: signed,
            feasible,
            wall_time,
        });
    }
    std::fs::write(cfg.out.join("results.csv"), records_to_csv(&records))?;
    if !infeasible.is_empty() && !cfg.allow_infeasible {
        let names: Vec<String> = infeasible.iter().map(|f| f.to_string()).collect();
        return Err(CliError::Infeasible(format!(
            "no feasible solution for: {}",
            names.join(", ")
        )));
    }
    Ok(())
}

/// Runs the configured experiment suite and writes `results.csv` plus
/// `summary.json`. Failed instances are logged to stderr and skipped; the
/// rest of the suite still completes.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out)?;
    let ctx = ExperimentContext {
        area: cfg.scenario.area,
        radio: cfg.radio,
        hot_station: cfg.scenario.hot_station,
        hot_fraction: cfg.scenario.hot_fraction,
        lambda_one_hot: cfg.qubo.lambda_one_hot,
        lambda_capacity: cfg.qubo.lambda_capacity,
        lambda_reduced: cfg.qubo.lambda_reduced,
    };
    let out = match cfg.experiment.kind {
        ExperimentKind::Patterns => run_pattern_comparison(
            &ctx,
            cfg.scenario.n,
            cfg.scenario.m,
            cfg.experiment.instances,
            &cfg.sa,
            cfg.seed,
        )?,
        ExperimentKind::NSweep => run_n_sweep(
            &ctx,
            &cfg.experiment.n_values,
            cfg.scenario.m,
            cfg.experiment.instances,
            &cfg.sa,
            cfg.seed,
        )?,
    };
    for f in &out.failures {
        eprintln!(
            "instance failed: pattern {} n {} seed {}: {}",
            f.pattern, f.n, f.instance_seed, f.message
        );
    }
    std::fs::write(cfg.out.join("results.csv"), records_to_csv(&out.records))?;
    let summary = summarize(&out.records);
    std::fs::write(cfg.out.join("summary.json"), summary_to_json(&summary))?;
    for row in &summary {
        println!(
            "pattern {} n {:>3} {:<8} {}: feasible {}/{} median_rel_err {}",
            row.pattern,
            row.n,
            row.formulation.to_string(),
            row.solver,
            row.feasible,
            row.records,
            fmt_opt(row.median_relative_error),
        );
    }
    println!(
        "{} records, {} failures -> {}",
        out.records.len(),
        out.failures.len(),
        cfg.out.display()
    );
    Ok(())
}

fn preset_stations(preset: HeatmapPreset, beam: BeamKind) -> Vec<Station> {
    let spots: [(f64, f64, f64); 2] = match preset {
        // Aimed at each other along the area diagonal.
        HeatmapPreset::Caption => [(0.0, 0.0, 45.0), (350.0, 350.0, 225.0)],
        // 1 km apart on the x axis, beams facing.
        HeatmapPreset::Km => [(0.0, 0.0, 0.0), (1000.0, 0.0, 180.0)],
    };
    spots
        .iter()
        .enumerate()
        .map(|(id, &(x, y, az))| Station {
            id,
            x,
            y,
            pattern: match beam {
                BeamKind::Isotropic => AntennaPattern::Isotropic,
                BeamKind::Gaussian => AntennaPattern::default_gaussian(vec![az]),
            },
        })
        .collect()
}

/// Renders SINR and best-station rasters for a two-station preset layout.
/// Writes `heatmap_sinr.ppm`, `heatmap_best.ppm`, and `heatmap.csv`.
pub fn cmd_heatmap(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out)?;
    let stations = preset_stations(cfg.heatmap.preset, cfg.scenario.beam);
    if stations.len() < 2 {
        return Err(CliError::Validation(
            "heatmap needs at least two stations".into(),
        ));
    }
    let margin = cfg.heatmap.margin_m;
    let xs: Vec<f64> = stations.iter().map(|s| s.x).collect();
    let ys: Vec<f64> = stations.iter().map(|s| s.y).collect();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut grid = GridSpec::with_bounds(
        min(&xs) - margin,
        max(&xs) + margin,
        min(&ys) - margin,
        max(&ys) + margin,
        cfg.heatmap.step_m,
    );
    grid.max_cells = cfg.heatmap.max_cells;
    let map = sinr_heatmap(&stations, &cfg.radio, &grid)?;
    map.write_sinr_ppm(cfg.out.join("heatmap_sinr.ppm"))?;
    map.write_best_ppm(cfg.out.join("heatmap_best.ppm"))?;
    map.write_csv(cfg.out.join("heatmap.csv"))?;
    println!(
        "{}x{} pixels over [{}, {}]x[{}, {}] -> heatmap_sinr.ppm, heatmap_best.ppm, heatmap.csv",
        map.cols, map.rows, grid.x_min, grid.x_max, grid.y_min, grid.y_max
    );
    Ok(())
}
