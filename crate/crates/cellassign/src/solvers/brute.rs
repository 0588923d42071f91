//! Exhaustive QUBO minimization for small instances.
//!
//! Walks all 2^n states in Gray-code order so each step flips one bit and
//! costs O(degree). The running energy is a float accumulator, so any
//! state within a small margin of the incumbent is re-evaluated exactly
//! before it can become the new best; ties go to the lexicographically
//! smallest bitstring.

use super::SolverError;
use crate::qubo::Qubo;

/// Default variable cap; 2^24 single-flip steps stay under a second.
pub const BRUTE_FORCE_CAP: usize = 24;

pub fn brute_force(q: &Qubo) -> Result<(Vec<bool>, f64), SolverError> {
    brute_force_with_cap(q, BRUTE_FORCE_CAP)
}

pub fn brute_force_with_cap(q: &Qubo, cap: usize) -> Result<(Vec<bool>, f64), SolverError> {
    assert!(cap < 64, "cap must fit a u64 state counter");
    let n = q.num_vars();
    if n > cap {
        return Err(SolverError::TooLarge { vars: n, cap });
    }
    if n == 0 {
        return Ok((Vec::new(), q.offset()));
    }

    let mut linear = vec![0.0; n];
    let mut coeff_scale = q.offset().abs();
    for (&i, &c) in q.linear() {
        linear[i] = c;
        coeff_scale += c.abs();
    }
    let mut neighbors: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for (&(i, j), &c) in q.quadratic() {
        neighbors[i].push((j as u32, c));
        neighbors[j].push((i as u32, c));
        coeff_scale += c.abs();
    }
    // Any drift in the incremental accumulator is far below this margin,
    // so no candidate within it of the incumbent is ever pruned unseen.
    let margin = 1e-7 * coeff_scale.max(1.0);

    let mut bits = vec![false; n];
    let mut field = linear;
    let mut running = q.offset();
    let mut best_bits = bits.clone();
    let mut best_energy = running;

    for k in 1..1u64 << n {
        let v = k.trailing_zeros() as usize;
        let de = if bits[v] { -field[v] } else { field[v] };
        let delta = if bits[v] { -1.0 } else { 1.0 };
        bits[v] = !bits[v];
        running += de;
        for &(u, w) in &neighbors[v] {
            field[u as usize] += w * delta;
        }
        if running <= best_energy + margin {
            let exact = q.energy(&bits).expect("bits sized to qubo");
            if exact < best_energy || (exact == best_energy && bits < best_bits) {
                best_energy = exact;
                best_bits = bits.clone();
            }
        }
    }
    Ok((best_bits, best_energy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::QuboBuilder;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_variable_contract() {
        let mut b = QuboBuilder::new(2);
        b.add_linear(0, -1.0);
        b.add_linear(1, 1.0);
        b.add_offset(0.25);
        let q = b.build();
        let (bits, e) = brute_force(&q).unwrap();
        assert_eq!(bits, vec![true, false]);
        assert_eq!(e, -0.75);
    }

    #[test]
    fn empty_qubo_returns_offset() {
        let mut b = QuboBuilder::new(0);
        b.add_offset(1.5);
        let (bits, e) = brute_force(&b.build()).unwrap();
        assert!(bits.is_empty());
        assert_eq!(e, 1.5);
    }

    #[test]
    fn cap_is_enforced() {
        let q = QuboBuilder::new(25).build();
        assert!(matches!(
            brute_force(&q),
            Err(SolverError::TooLarge { vars: 25, cap: 24 })
        ));
        let q = QuboBuilder::new(5).build();
        assert!(matches!(
            brute_force_with_cap(&q, 4),
            Err(SolverError::TooLarge { vars: 5, cap: 4 })
        ));
    }

    #[test]
    fn ties_break_lexicographically() {
        // No coefficients at all: every state has energy 0; smallest is all-false.
        let (bits, e) = brute_force(&QuboBuilder::new(3).build()).unwrap();
        assert_eq!(bits, vec![false, false, false]);
        assert_eq!(e, 0.0);
        // x0 + x1 with coupling -2: states 00 (0), 01 (1), 10 (1), 11 (0).
        let mut b = QuboBuilder::new(2);
        b.add_linear(0, 1.0);
        b.add_linear(1, 1.0);
        b.add_quadratic(0, 1, -2.0);
        let (bits, e) = brute_force(&b.build()).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(bits, vec![false, false]);
    }

    #[test]
    fn matches_naive_enumeration_on_random_qubos() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..20 {
            let n = 2 + (trial % 9);
            let mut b = QuboBuilder::new(n);
            for i in 0..n {
                if rng.random_bool(0.8) {
                    b.add_linear(i, rng.random_range(-2.0..2.0));
                }
                for j in i + 1..n {
                    if rng.random_bool(0.5) {
                        b.add_quadratic(i, j, rng.random_range(-2.0..2.0));
                    }
                }
            }
            b.add_offset(rng.random_range(-1.0..1.0));
            let q = b.build();
            let (bits, e) = brute_force(&q).unwrap();
            assert_eq!(q.energy(&bits).unwrap(), e, "trial {trial}");
            // Plain enumeration, no incremental tricks.
            let mut best = f64::INFINITY;
            let mut best_bits = Vec::new();
            for k in 0..1u64 << n {
                let cand: Vec<bool> = (0..n).map(|i| k >> i & 1 == 1).collect();
                let ce = q.energy(&cand).unwrap();
                if ce < best || (ce == best && cand < best_bits) {
                    best = ce;
                    best_bits = cand;
                }
            }
            assert_eq!(e, best, "trial {trial}");
            assert_eq!(bits, best_bits, "trial {trial}");
        }
    }
}
