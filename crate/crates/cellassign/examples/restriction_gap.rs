//! How much optimum do you give up by restricting each phone to its two
//! best stations? Solves both the full and the restricted problem exactly
//! (no annealing involved) on the same instance stream the n-sweep uses,
//! and prints the per-N distribution of the gap.

use cellassign::experiments::{
    instance_scenario, relative_error, sweep_instance_seed, ExperimentContext, TestPattern,
};
use cellassign::qubo::{objective, top2};
use cellassign::radio::sinr_matrix;
use cellassign::solvers::{exact_assignment, exact_assignment_restricted, SolverError};

fn main() {
    let ctx = ExperimentContext::default();
    let pattern = TestPattern::all()[0];
    let m = 3;
    let instances = 20;
    let master_seed = 1;

    println!("top-2 restriction gap, exact vs exact, {instances} instances per N");
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "n", "infeasible", "median", "q3", "max");
    for n in [9, 15, 30, 45, 60] {
        let mut gaps = Vec::new();
        let mut infeasible = 0usize;
        for k in 0..instances {
            let seed = sweep_instance_seed(master_seed, n, k);
            let scenario = instance_scenario(&ctx, pattern, n, m, seed).unwrap();
            let sinr = sinr_matrix(&scenario, &ctx.radio).unwrap();
            let caps = &scenario.capacities;
            let exact = exact_assignment(&sinr, caps).unwrap();
            let e_star = objective(&exact, &sinr).unwrap();
            let table = top2(&sinr);
            match exact_assignment_restricted(&sinr, caps, &table) {
                Ok(best) => {
                    let e = objective(&best, &sinr).unwrap();
                    gaps.push(relative_error(e, e_star).unwrap());
                }
                Err(SolverError::Infeasible) => infeasible += 1,
                Err(e) => panic!("unexpected: {e}"),
            }
        }
        gaps.sort_by(f64::total_cmp);
        let at = |q: f64| gaps[((gaps.len() - 1) as f64 * q).round() as usize];
        println!(
            "{n:>4} {infeasible:>10} {:>10.6} {:>10.6} {:>10.6}",
            at(0.5),
            at(0.75),
            at(1.0)
        );
    }
}
