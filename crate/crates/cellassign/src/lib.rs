//! Assign mobile phones to base stations by turning the association problem
//! into a QUBO and sampling it.
//!
//! The pipeline has four stages, each with its own module:
//!
//! 1. [`scenario`]: lay out stations and phones in a rectangular service
//!    area, either uniformly or clustered around one station.
//! 2. [`radio`]: compute received power and downlink SINR for every
//!    phone/station pair (free-space path loss, optional Gaussian beam
//!    patterns), plus SINR heatmaps over a grid.
//! 3. [`qubo`]: build two binary encodings of the assignment problem. The
//!    direct encoding uses one variable per phone/station pair; the reduced
//!    encoding keeps one variable per phone by restricting each phone to its
//!    two strongest stations.
//! 4. [`solvers`]: a seeded simulated annealer for the QUBOs, an exact
//!    min-cost-flow solver for the relaxed assignment problem (the
//!    benchmark optimum), and a brute-force enumerator for small instances.
//!
//! [`experiments`] wires the stages into reproducible benchmark runs and
//! [`cli`] exposes them as the `cellassign` binary. The `examples/`
//! directory has a runnable walkthrough of each stage.
//!
//! ```
//! use cellassign::{
//!     build_proposed, default_penalty_weight, generate_uniform, random_stations,
//!     simulated_anneal, sinr_matrix, top2, Area, BeamKind, RadioConfig, SaConfig,
//! };
//!
//! let area = Area { width: 700.0, height: 700.0 };
//! let stations = random_stations(3, &area, BeamKind::Isotropic, 7);
//! let scenario = generate_uniform(30, stations, area, 11).unwrap();
//! let sinr = sinr_matrix(&scenario, &RadioConfig::default()).unwrap();
//! let table = top2(&sinr);
//! let q = build_proposed(&table, &scenario.capacities, default_penalty_weight(&sinr)).unwrap();
//! let cfg = SaConfig { num_reads: 32, sweeps_per_read: 100, ..SaConfig::default() };
//! let samples = simulated_anneal(&q, &cfg);
//! assert_eq!(samples.samples.len(), 32);
//! ```

pub mod cli;
pub mod experiments;
pub mod qubo;
pub mod radio;
pub mod scenario;
mod seeding;
pub mod solvers;

pub use qubo::{
    build_naive, build_proposed, decode_naive, decode_proposed, default_penalty_weight,
    encode_proposed, objective, top2, Assignment, Qubo, QuboBuilder, QuboError, Top2Table,
};
pub use radio::{
    fspl, gaussian_gain, received_power, sinr_heatmap, sinr_matrix, AntennaPattern, BeamKind,
    BeamwidthConvention, GridSpec, Heatmap, RadioConfig, RadioError, SinrMatrix, SinrScale,
};
pub use scenario::{
    generate_biased, generate_uniform, nearest_station, random_stations, Area, Phone,
    RemainderPolicy, Scenario, ScenarioError, Station,
};
pub use solvers::{
    best_feasible, bits_to_hex, brute_force, default_beta_range, exact_assignment,
    exact_assignment_restricted, hex_to_bits, simulated_anneal, BetaSchedule, SaConfig, Sample,
    SampleSet, SolverError,
};
