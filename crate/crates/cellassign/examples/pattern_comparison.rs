//! Run the four test patterns (uniform/biased phones x isotropic/beamed
//! stations) at a reduced size and summarize both encodings' errors
//! against the exact optimum.

use cellassign::experiments::{
    run_pattern_comparison, summarize, write_records_csv, write_summary_json, ExperimentContext,
};
use cellassign::solvers::SaConfig;
use std::path::PathBuf;

fn main() {
    let out = PathBuf::from("target/example_out/pattern_comparison");
    std::fs::create_dir_all(&out).unwrap();
    let ctx = ExperimentContext::default();
    let sa = SaConfig {
        num_reads: 200,
        sweeps_per_read: 200,
        ..SaConfig::default()
    };
    // 4 patterns x 5 instances, N=12, M=3. The real benchmark uses
    // N=30 and the default 1000x1000 budget; this runs in seconds.
    let run = run_pattern_comparison(&ctx, 12, 3, 5, &sa, 1).unwrap();
    for f in &run.failures {
        eprintln!(
            "instance failed: pattern {} n {} seed {}: {}",
            f.pattern, f.n, f.instance_seed, f.message
        );
    }
    let rows = summarize(&run.records);
    println!(
        "{:>7} {:>9} {:>9} {:>12} {:>12}",
        "pattern", "encoding", "feasible", "median err", "q3 err"
    );
    for r in &rows {
        println!(
            "{:>7} {:>9} {:>6}/{:<2} {:>12} {:>12}",
            r.pattern,
            r.formulation.to_string(),
            r.feasible,
            r.records,
            r.median_relative_error
                .map_or("-".into(), |v| format!("{v:.6}")),
            r.q3_relative_error
                .map_or("-".into(), |v| format!("{v:.6}")),
        );
    }
    write_records_csv(&run.records, out.join("results.csv")).unwrap();
    write_summary_json(&rows, out.join("summary.json")).unwrap();
    println!("\nper-instance rows -> {}", out.join("results.csv").display());
}
