//! Solve one instance three ways per formulation: simulated annealing,
//! the exact flow oracle, and brute force, then line the energies up.

use cellassign::qubo::{
    build_naive, build_proposed, decode_naive, decode_proposed, default_penalty_weight, objective,
    top2,
};
use cellassign::radio::sinr_matrix;
use cellassign::scenario::{generate_uniform, random_stations};
use cellassign::solvers::{
    best_feasible, brute_force, exact_assignment, exact_assignment_restricted, simulated_anneal,
    SaConfig, SolverError,
};
use cellassign::{Area, BeamKind, RadioConfig};

fn main() {
    let area = Area {
        width: 700.0,
        height: 700.0,
    };
    let n = 12;
    let m = 3;
    let scenario = generate_uniform(
        n,
        random_stations(m, &area, BeamKind::Isotropic, 5),
        area,
        5,
    )
    .unwrap();
    let sinr = sinr_matrix(&scenario, &RadioConfig::default()).unwrap();
    let caps = &scenario.capacities;
    let lambda = default_penalty_weight(&sinr);
    let table = top2(&sinr);

    let exact = exact_assignment(&sinr, caps).unwrap();
    let e_star = objective(&exact, &sinr).unwrap();
    println!("exact optimum (unrestricted): {e_star:.6}\n");

    // Restricting each phone to its two best stations may cost optimum; the
    // flow oracle on the restricted matrix gives that formulation's floor.
    let restricted_floor = match exact_assignment_restricted(&sinr, caps, &table) {
        Ok(a) => Some(objective(&a, &sinr).unwrap()),
        Err(SolverError::Infeasible) => None,
        Err(e) => panic!("{e}"),
    };

    let sa_cfg = SaConfig {
        num_reads: 300,
        sweeps_per_read: 300,
        seed: 42,
        ..SaConfig::default()
    };
    println!(
        "{:>9} {:>8} {:>12} {:>12} {:>10}",
        "encoding", "solver", "energy", "objective", "rel error"
    );
    for (name, qubo) in [
        ("naive", build_naive(&sinr, caps, lambda, lambda).unwrap()),
        ("proposed", build_proposed(&table, caps, lambda).unwrap()),
    ] {
        // Brute force enumerates the proposed encoding (12 vars) but the
        // naive one has 36, past the enumeration cap.
        let brute = brute_force(&qubo);
        let set = simulated_anneal(&qubo, &sa_cfg);
        let sa_best = best_feasible(&set, |bits| {
            if name == "naive" {
                decode_naive(bits, n, m, caps).unwrap()
            } else {
                decode_proposed(bits, &table, caps).unwrap()
            }
        });
        let floor = if name == "naive" {
            Some(e_star)
        } else {
            restricted_floor
        };
        if let Some((assignment, sample)) = sa_best {
            let obj = objective(&assignment, &sinr).unwrap();
            println!(
                "{name:>9} {:>8} {:>12.6} {:>12.6} {:>10.6}",
                "sa",
                sample.energy,
                obj,
                (e_star - obj) / e_star.abs()
            );
        }
        if let Some(f) = floor {
            println!(
                "{name:>9} {:>8} {:>12} {:>12.6} {:>10.6}",
                "exact",
                "-",
                f,
                (e_star - f) / e_star.abs()
            );
        }
        match brute {
            Ok((_, energy)) => println!("{name:>9} {:>8} {energy:>12.6}", "brute"),
            Err(SolverError::TooLarge { vars, cap }) => {
                println!("{name:>9} {:>8} skipped ({vars} vars > cap {cap})", "brute")
            }
            Err(e) => panic!("{e}"),
        }
    }
}
