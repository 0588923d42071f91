//! Build both QUBO encodings of one instance and compare their sizes, then
//! verify on a feasible assignment that the penalties cancel and the energy
//! is exactly the negated objective.

use cellassign::qubo::{
    build_naive, build_proposed, decode_naive, default_penalty_weight, objective, top2,
};
use cellassign::radio::sinr_matrix;
use cellassign::scenario::{generate_uniform, random_stations};
use cellassign::solvers::exact_assignment;
use cellassign::{Area, BeamKind, RadioConfig};
use std::path::PathBuf;

fn main() {
    let out = PathBuf::from("target/example_out/build_qubos");
    std::fs::create_dir_all(&out).unwrap();
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

    let naive = build_naive(&sinr, caps, lambda, lambda).unwrap();
    let table = top2(&sinr);
    let proposed = build_proposed(&table, caps, lambda).unwrap();

    println!("penalty weight lambda = {lambda:.3} (2 * max |SINR dB|)\n");
    for (name, q) in [("naive", &naive), ("proposed", &proposed)] {
        println!(
            "{name:>8}: {:>3} vars, {:>4} terms, max |coeff| {:>8.3}",
            q.num_vars(),
            q.num_terms(),
            q.max_abs_coeff()
        );
        q.write_text(out.join(format!("{name}.qubo"))).unwrap();
    }

    // The one-hot bits of the exact optimum make every penalty term vanish,
    // so the naive energy collapses to the negated objective.
    let best = exact_assignment(&sinr, caps).unwrap();
    let mut bits = vec![false; n * m];
    for (i, st) in best.station_of.iter().enumerate() {
        bits[i * m + st.unwrap()] = true;
    }
    let decoded = decode_naive(&bits, n, m, caps).unwrap();
    assert!(decoded.is_feasible());
    let obj = objective(&decoded, &sinr).unwrap();
    let energy = naive.energy(&bits).unwrap();
    println!("\noptimal assignment: objective {obj:.6}, naive energy {energy:.6}");
    println!("energy + objective = {:+.3e} (penalties cancel)", energy + obj);
    println!("\ntext dumps -> {}", out.display());
}
