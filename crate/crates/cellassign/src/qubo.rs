//! QUBO encodings of the assignment problem, and decoding back.
//!
//! The objective is to maximize the total SINR `sum_i S[i, a(i)]` subject to
//! every phone getting exactly one station (one-hot) and station `a` serving
//! exactly `capacities[a]` phones. Both constraints become quadratic
//! penalties, giving an unconstrained binary minimization.
//!
//! Two encodings are built:
//!
//! * [`build_naive`]: one variable per phone/station pair (`N*M` total),
//!   with one-hot and capacity penalties.
//! * [`build_proposed`]: one variable per phone (`N` total). Each phone may
//!   only pick its strongest or second-strongest station (precomputed in a
//!   [`Top2Table`]); bit 1 means "best", bit 0 means "second best". One-hot
//!   holds by construction, so only the capacity penalty remains.
//!
//! The reduced encoding shrinks the search space but also the feasible set:
//! its optimum can be strictly worse than the unrestricted optimum.

use crate::radio::SinrMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuboError {
    #[error("bitstring has {found} bits, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("penalty weight must be positive, got {value}")]
    NonPositiveWeight { value: f64 },
    #[error("phone {phone} is unassigned")]
    UnassignedPhone { phone: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Upper-triangular sparse QUBO: `energy(x) = offset + sum_i linear[i] x_i
/// + sum_{i<j} quadratic[(i,j)] x_i x_j` over `x in {0,1}^num_vars`.
///
/// Constant terms from expanded penalties live in `offset`, so the energy
/// equals the original penalized objective, not just up to a constant.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    num_vars: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    labels: Vec<String>,
}

/// Accumulating constructor for [`Qubo`]. Coefficients added to the same
/// entry sum; `i == j` quadratic terms fold into linear (binary variables
/// square to themselves); pairs are canonicalized to `i < j`.
#[derive(Debug, Clone)]
pub struct QuboBuilder {
    num_vars: usize,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    labels: Vec<String>,
}

impl QuboBuilder {
    pub fn new(num_vars: usize) -> Self {
        QuboBuilder {
            num_vars,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: 0.0,
            labels: (0..num_vars).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn set_label(&mut self, var: usize, label: impl Into<String>) {
        self.labels[var] = label.into();
    }

    pub fn add_linear(&mut self, var: usize, coeff: f64) {
        assert!(var < self.num_vars, "variable {var} out of range");
        assert!(coeff.is_finite());
        *self.linear.entry(var).or_insert(0.0) += coeff;
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, coeff: f64) {
        assert!(i < self.num_vars && j < self.num_vars, "pair ({i},{j}) out of range");
        assert!(coeff.is_finite());
        if i == j {
            self.add_linear(i, coeff);
            return;
        }
        let key = (i.min(j), i.max(j));
        *self.quadratic.entry(key).or_insert(0.0) += coeff;
    }

    pub fn add_offset(&mut self, c: f64) {
        assert!(c.is_finite());
        self.offset += c;
    }

    pub fn build(self) -> Qubo {
        Qubo {
            num_vars: self.num_vars,
            linear: self.linear.into_iter().filter(|&(_, c)| c != 0.0).collect(),
            quadratic: self.quadratic.into_iter().filter(|&(_, c)| c != 0.0).collect(),
            offset: self.offset,
            labels: self.labels,
        }
    }
}

impl Qubo {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self) -> &BTreeMap<usize, f64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn label(&self, var: usize) -> &str {
        &self.labels[var]
    }

    /// Count of stored (nonzero) linear plus quadratic coefficients.
    pub fn num_terms(&self) -> usize {
        self.linear.len() + self.quadratic.len()
    }

    /// Largest absolute stored coefficient (offset excluded).
    pub fn max_abs_coeff(&self) -> f64 {
        let l = self.linear.values().fold(0.0f64, |m, c| m.max(c.abs()));
        self.quadratic.values().fold(l, |m, c| m.max(c.abs()))
    }

    /// Energy of a bitstring; exact evaluation of the stored form.
    pub fn energy(&self, bits: &[bool]) -> Result<f64, QuboError> {
        if bits.len() != self.num_vars {
            return Err(QuboError::LengthMismatch {
                expected: self.num_vars,
                found: bits.len(),
            });
        }
        let mut e = self.offset;
        for (&i, &c) in &self.linear {
            if bits[i] {
                e += c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if bits[i] && bits[j] {
                e += c;
            }
        }
        Ok(e)
    }

    /// Line-based text form: header `num_vars offset`, then one `i j coeff`
    /// triple per stored term (`i == j` marks a linear term), indices base
    /// 0, linear terms first, ascending. Floats use the shortest decimal
    /// representation that round-trips, so write/read is lossless.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.num_vars, self.offset);
        for (&i, &c) in &self.linear {
            let _ = writeln!(out, "{i} {i} {c}");
        }
        for (&(i, j), &c) in &self.quadratic {
            let _ = writeln!(out, "{i} {j} {c}");
        }
        out
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<(), QuboError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Parses the [`to_text`](Qubo::to_text) format. Accepts terms in any
    /// order, folds `i > j` pairs and accumulates duplicate entries; labels
    /// are not part of the format and reset to defaults.
    pub fn from_text(text: &str) -> Result<Qubo, QuboError> {
        let parse_err = |line: usize, msg: &str| QuboError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty input"))?;
        let mut parts = header.split_whitespace();
        let num_vars: usize = parts
            .next()
            .ok_or_else(|| parse_err(line_no, "missing variable count"))?
            .parse()
            .map_err(|_| parse_err(line_no, "bad variable count"))?;
        let offset: f64 = parts
            .next()
            .ok_or_else(|| parse_err(line_no, "missing offset"))?
            .parse()
            .map_err(|_| parse_err(line_no, "bad offset"))?;
        if parts.next().is_some() {
            return Err(parse_err(line_no, "header has extra tokens"));
        }
        let mut b = QuboBuilder::new(num_vars);
        b.add_offset(offset);
        for (line_no, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(parse_err(line_no, "expected `i j coeff`"));
            }
            let i: usize = toks[0].parse().map_err(|_| parse_err(line_no, "bad index"))?;
            let j: usize = toks[1].parse().map_err(|_| parse_err(line_no, "bad index"))?;
            let c: f64 = toks[2].parse().map_err(|_| parse_err(line_no, "bad coefficient"))?;
            if i >= num_vars || j >= num_vars {
                return Err(parse_err(line_no, "index out of range"));
            }
            if i == j {
                b.add_linear(i, c);
            } else {
                b.add_quadratic(i, j, c);
            }
        }
        Ok(b.build())
    }

    pub fn read_text(path: impl AsRef<Path>) -> Result<Qubo, QuboError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }
}

/// Per-phone strongest and second-strongest stations, plus the inverse maps.
///
/// `phones_with_best[a]` lists phones whose strongest station is `a` (in
/// ascending phone order), `phones_with_second[a]` likewise for the
/// second-strongest. Every phone appears exactly once in each family, and
/// `best[i] != second[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Top2Table {
    pub best: Vec<usize>,
    pub second: Vec<usize>,
    pub s_best: Vec<f64>,
    pub s_second: Vec<f64>,
    pub phones_with_best: Vec<Vec<usize>>,
    pub phones_with_second: Vec<Vec<usize>>,
}

impl Top2Table {
    pub fn num_phones(&self) -> usize {
        self.best.len()
    }

    pub fn num_stations(&self) -> usize {
        self.phones_with_best.len()
    }

    /// Station phone `i` picks when its variable is `bit`.
    pub fn station_for(&self, phone: usize, bit: bool) -> usize {
        if bit {
            self.best[phone]
        } else {
            self.second[phone]
        }
    }
}

/// Ranks every phone's stations by SINR and keeps the top two. Ties take
/// the lower station index, so the table is deterministic.
pub fn top2(s: &SinrMatrix) -> Top2Table {
    let n = s.num_phones();
    let m = s.num_stations();
    assert!(m >= 2, "top-2 needs at least two stations");
    let mut best = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    let mut s_best = Vec::with_capacity(n);
    let mut s_second = Vec::with_capacity(n);
    let mut phones_with_best = vec![Vec::new(); m];
    let mut phones_with_second = vec![Vec::new(); m];
    for i in 0..n {
        let row = s.row(i);
        let mut b = 0;
        for a in 1..m {
            if row[a] > row[b] {
                b = a;
            }
        }
        let mut r = if b == 0 { 1 } else { 0 };
        for a in 0..m {
            if a != b && row[a] > row[r] {
                r = a;
            }
        }
        best.push(b);
        second.push(r);
        s_best.push(row[b]);
        s_second.push(row[r]);
        phones_with_best[b].push(i);
        phones_with_second[r].push(i);
    }
    Top2Table {
        best,
        second,
        s_best,
        s_second,
        phones_with_best,
        phones_with_second,
    }
}

/// Default penalty weight: twice the largest |SINR| entry, so no single
/// objective term can pay for a constraint violation. Falls back to 1 for
/// an all-zero matrix.
pub fn default_penalty_weight(s: &SinrMatrix) -> f64 {
    let m = s.max_abs();
    if m > 0.0 {
        2.0 * m
    } else {
        1.0
    }
}

/// Direct encoding over `N*M` variables, `x[i,a] = 1` iff phone `i` is
/// served by station `a` (variable index `i*M + a`).
///
/// Minimizes `-sum S[i,a] x[i,a]
/// + lambda_one_hot * sum_i (sum_a x[i,a] - 1)^2
/// + lambda_capacity * sum_a (sum_i x[i,a] - C_a)^2`,
/// with the squares expanded and their constants folded into the offset.
pub fn build_naive(
    s: &SinrMatrix,
    capacities: &[usize],
    lambda_one_hot: f64,
    lambda_capacity: f64,
) -> Result<Qubo, QuboError> {
    let n = s.num_phones();
    let m = s.num_stations();
    if capacities.len() != m {
        return Err(QuboError::DimensionMismatch {
            detail: format!("{} capacities for {m} stations", capacities.len()),
        });
    }
    for &lambda in &[lambda_one_hot, lambda_capacity] {
        if !(lambda > 0.0) {
            return Err(QuboError::NonPositiveWeight { value: lambda });
        }
    }
    let idx = |i: usize, a: usize| i * m + a;
    let mut b = QuboBuilder::new(n * m);
    for i in 0..n {
        for a in 0..m {
            b.set_label(idx(i, a), format!("x[{i},{a}]"));
            b.add_linear(idx(i, a), -s.get(i, a));
        }
    }
    // (sum_a x - 1)^2 = sum_a x - 2 sum_a x + 2 sum_{a<b} x x + 1
    for i in 0..n {
        for a in 0..m {
            b.add_linear(idx(i, a), -lambda_one_hot);
            for a2 in a + 1..m {
                b.add_quadratic(idx(i, a), idx(i, a2), 2.0 * lambda_one_hot);
            }
        }
        b.add_offset(lambda_one_hot);
    }
    // (sum_i x - C)^2 = (1 - 2C) sum_i x + 2 sum_{i<j} x x + C^2
    for a in 0..m {
        let c = capacities[a] as f64;
        for i in 0..n {
            b.add_linear(idx(i, a), lambda_capacity * (1.0 - 2.0 * c));
            for i2 in i + 1..n {
                b.add_quadratic(idx(i, a), idx(i2, a), 2.0 * lambda_capacity);
            }
        }
        b.add_offset(lambda_capacity * c * c);
    }
    Ok(b.build())
}

/// Reduced encoding over `N` variables: bit `i` set means phone `i` takes
/// its best station, clear means its second best.
///
/// Minimizes `-sum_i (s_best[i] x_i + s_second[i] (1 - x_i))
/// + lambda * sum_a (|{i in best(a): x_i}| + |{i in second(a): !x_i}| - C_a)^2`.
/// Station `a`'s load is `sum_{i: best=a} x_i + sum_{i: second=a} (1-x_i)`,
/// which expands to signed memberships plus the constant `|second(a)| - C_a`.
pub fn build_proposed(
    table: &Top2Table,
    capacities: &[usize],
    lambda: f64,
) -> Result<Qubo, QuboError> {
    let n = table.num_phones();
    let m = table.num_stations();
    if capacities.len() != m {
        return Err(QuboError::DimensionMismatch {
            detail: format!("{} capacities for {m} stations", capacities.len()),
        });
    }
    if !(lambda > 0.0) {
        return Err(QuboError::NonPositiveWeight { value: lambda });
    }
    let mut b = QuboBuilder::new(n);
    for i in 0..n {
        b.set_label(i, format!("x[{i}]"));
        b.add_offset(-table.s_second[i]);
        b.add_linear(i, -(table.s_best[i] - table.s_second[i]));
    }
    for a in 0..m {
        // Load of a minus C_a, as signed 0/1 memberships plus a constant:
        // sum_{i in best(a)} x_i - sum_{i in second(a)} x_i + d,
        // d = |second(a)| - C_a. Squared and expanded with x^2 = x.
        let members: Vec<(usize, f64)> = table.phones_with_best[a]
            .iter()
            .map(|&i| (i, 1.0))
            .chain(table.phones_with_second[a].iter().map(|&i| (i, -1.0)))
            .collect();
        let d = table.phones_with_second[a].len() as f64 - capacities[a] as f64;
        for &(i, ci) in &members {
            b.add_linear(i, lambda * (1.0 + 2.0 * d * ci));
        }
        for (k, &(i, ci)) in members.iter().enumerate() {
            for &(j, cj) in &members[k + 1..] {
                b.add_quadratic(i, j, 2.0 * lambda * ci * cj);
            }
        }
        b.add_offset(lambda * d * d);
    }
    Ok(b.build())
}

/// A decoded assignment with feasibility diagnostics.
///
/// `station_of[i]` is `None` when the bitstring gave phone `i` zero or
/// multiple stations (those phones are also listed in
/// `one_hot_violations`). `capacity_deltas[a]` is the number of assigned
/// phones on station `a` minus its capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub station_of: Vec<Option<usize>>,
    pub one_hot_violations: Vec<usize>,
    pub capacity_deltas: Vec<i64>,
}

impl Assignment {
    /// True iff every phone has exactly one station and every station is
    /// exactly at capacity.
    pub fn is_feasible(&self) -> bool {
        self.one_hot_violations.is_empty()
            && self.station_of.iter().all(Option::is_some)
            && self.capacity_deltas.iter().all(|&d| d == 0)
    }
}

/// Assembles an [`Assignment`], deriving the capacity deltas from the
/// assigned stations.
pub(crate) fn assignment_from_stations(
    station_of: Vec<Option<usize>>,
    one_hot_violations: Vec<usize>,
    capacities: &[usize],
) -> Assignment {
    let mut counts = vec![0i64; capacities.len()];
    for st in station_of.iter().flatten() {
        counts[*st] += 1;
    }
    let capacity_deltas = counts
        .iter()
        .zip(capacities)
        .map(|(&got, &cap)| got - cap as i64)
        .collect();
    Assignment {
        station_of,
        one_hot_violations,
        capacity_deltas,
    }
}

/// Decodes a direct-encoding bitstring.
pub fn decode_naive(
    bits: &[bool],
    num_phones: usize,
    num_stations: usize,
    capacities: &[usize],
) -> Result<Assignment, QuboError> {
    if bits.len() != num_phones * num_stations {
        return Err(QuboError::LengthMismatch {
            expected: num_phones * num_stations,
            found: bits.len(),
        });
    }
    if capacities.len() != num_stations {
        return Err(QuboError::DimensionMismatch {
            detail: format!("{} capacities for {num_stations} stations", capacities.len()),
        });
    }
    let mut station_of = Vec::with_capacity(num_phones);
    let mut violations = Vec::new();
    for i in 0..num_phones {
        let row = &bits[i * num_stations..(i + 1) * num_stations];
        let mut chosen = None;
        let mut count = 0;
        for (a, &bit) in row.iter().enumerate() {
            if bit {
                count += 1;
                chosen = Some(a);
            }
        }
        if count == 1 {
            station_of.push(chosen);
        } else {
            station_of.push(None);
            violations.push(i);
        }
    }
    Ok(assignment_from_stations(station_of, violations, capacities))
}

/// Decodes a reduced-encoding bitstring; one-hot holds by construction.
pub fn decode_proposed(
    bits: &[bool],
    table: &Top2Table,
    capacities: &[usize],
) -> Result<Assignment, QuboError> {
    if bits.len() != table.num_phones() {
        return Err(QuboError::LengthMismatch {
            expected: table.num_phones(),
            found: bits.len(),
        });
    }
    if capacities.len() != table.num_stations() {
        return Err(QuboError::DimensionMismatch {
            detail: format!(
                "{} capacities for {} stations",
                capacities.len(),
                table.num_stations()
            ),
        });
    }
    let station_of = bits
        .iter()
        .enumerate()
        .map(|(i, &bit)| Some(table.station_for(i, bit)))
        .collect();
    Ok(assignment_from_stations(station_of, Vec::new(), capacities))
}

/// Inverse of [`decode_proposed`]: `None` when some phone is unassigned or
/// assigned outside its top-2 pair.
pub fn encode_proposed(assignment: &Assignment, table: &Top2Table) -> Option<Vec<bool>> {
    if assignment.station_of.len() != table.num_phones() {
        return None;
    }
    assignment
        .station_of
        .iter()
        .enumerate()
        .map(|(i, st)| match st {
            Some(a) if *a == table.best[i] => Some(true),
            Some(a) if *a == table.second[i] => Some(false),
            _ => None,
        })
        .collect()
}

/// Total SINR of a fully assigned solution: `sum_i S[i, station_of[i]]`.
/// This is the quantity being maximized (higher is better); QUBO energies
/// carry its negation plus penalties.
pub fn objective(assignment: &Assignment, s: &SinrMatrix) -> Result<f64, QuboError> {
    let mut total = 0.0;
    for (i, st) in assignment.station_of.iter().enumerate() {
        match st {
            Some(a) => total += s.get(i, *a),
            None => return Err(QuboError::UnassignedPhone { phone: i }),
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::SinrScale;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn matrix(rows: Vec<Vec<f64>>) -> SinrMatrix {
        SinrMatrix::from_rows(rows, SinrScale::Db)
    }

    /// Random matrix whose entries are exact multiples of 1/16, so both
    /// evaluation orders of any derived QUBO stay exact in f64.
    fn dyadic_matrix(n: usize, m: usize, seed: u64) -> SinrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        matrix(
            (0..n)
                .map(|_| (0..m).map(|_| rng.random_range(-256..=256) as f64 / 16.0).collect())
                .collect(),
        )
    }

    fn bits_of(k: u64, n: usize) -> Vec<bool> {
        (0..n).map(|i| k >> i & 1 == 1).collect()
    }

    /// Direct (unexpanded) evaluation of the naive penalized objective.
    fn eval_naive_direct(s: &SinrMatrix, caps: &[usize], l1: f64, l2: f64, bits: &[bool]) -> f64 {
        let (n, m) = (s.num_phones(), s.num_stations());
        let x = |i: usize, a: usize| f64::from(bits[i * m + a] as u8);
        let mut e = 0.0;
        for i in 0..n {
            for a in 0..m {
                e -= s.get(i, a) * x(i, a);
            }
        }
        for i in 0..n {
            let row: f64 = (0..m).map(|a| x(i, a)).sum();
            e += l1 * (row - 1.0) * (row - 1.0);
        }
        for a in 0..m {
            let col: f64 = (0..n).map(|i| x(i, a)).sum();
            let gap = col - caps[a] as f64;
            e += l2 * gap * gap;
        }
        e
    }

    /// Direct evaluation of the reduced penalized objective.
    fn eval_proposed_direct(t: &Top2Table, caps: &[usize], lambda: f64, bits: &[bool]) -> f64 {
        let mut e = 0.0;
        for i in 0..t.num_phones() {
            let x = f64::from(bits[i] as u8);
            e -= t.s_best[i] * x + t.s_second[i] * (1.0 - x);
        }
        for a in 0..t.num_stations() {
            let load: f64 = t.phones_with_best[a]
                .iter()
                .map(|&i| f64::from(bits[i] as u8))
                .sum::<f64>()
                + t.phones_with_second[a]
                    .iter()
                    .map(|&i| 1.0 - f64::from(bits[i] as u8))
                    .sum::<f64>();
            let gap = load - caps[a] as f64;
            e += lambda * gap * gap;
        }
        e
    }

    #[test]
    fn builder_canonicalizes_and_prunes() {
        let mut b = QuboBuilder::new(4);
        b.add_quadratic(3, 1, 2.5);
        b.add_quadratic(1, 3, 0.5);
        b.add_quadratic(2, 2, 7.0); // diagonal folds to linear
        b.add_linear(0, 1.0);
        b.add_linear(0, -1.0); // cancels exactly, pruned
        b.add_offset(4.0);
        let q = b.build();
        assert_eq!(q.quadratic().get(&(1, 3)), Some(&3.0));
        assert_eq!(q.linear().get(&2), Some(&7.0));
        assert_eq!(q.linear().get(&0), None);
        assert_eq!(q.offset(), 4.0);
        assert_eq!(q.num_terms(), 2);
        assert_eq!(q.max_abs_coeff(), 7.0);
    }

    #[test]
    fn energy_basics() {
        let mut b = QuboBuilder::new(3);
        b.add_linear(0, 2.0);
        b.add_linear(2, -1.0);
        b.add_quadratic(0, 2, 10.0);
        b.add_offset(0.5);
        let q = b.build();
        assert_eq!(q.energy(&[false, false, false]).unwrap(), 0.5);
        assert_eq!(q.energy(&[true, false, false]).unwrap(), 2.5);
        assert_eq!(q.energy(&[true, false, true]).unwrap(), 11.5);
        assert!(matches!(
            q.energy(&[true, false]),
            Err(QuboError::LengthMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn naive_counts_and_labels() {
        let s = dyadic_matrix(5, 3, 1);
        let q = build_naive(&s, &[2, 2, 1], 10.0, 10.0).unwrap();
        assert_eq!(q.num_vars(), 15);
        assert_eq!(q.label(0), "x[0,0]");
        assert_eq!(q.label(7), "x[2,1]");
        // One-hot couples the M stations of each phone; capacity couples
        // the N phones of each station.
        let expected_pairs = 5 * 3 + 3 * (5 * 4 / 2);
        assert_eq!(q.quadratic().len(), expected_pairs);
    }

    #[test]
    fn naive_all_zero_energy_is_pure_penalty() {
        let s = dyadic_matrix(6, 3, 2);
        let caps = [2usize, 2, 2];
        let (l1, l2) = (7.0, 3.0);
        let q = build_naive(&s, &caps, l1, l2).unwrap();
        let zero = vec![false; 18];
        let expect = l1 * 6.0 + l2 * caps.iter().map(|&c| (c * c) as f64).sum::<f64>();
        assert_eq!(q.energy(&zero).unwrap(), expect);
    }

    #[test]
    fn naive_feasible_energy_is_negated_objective() {
        let s = dyadic_matrix(6, 3, 3);
        let caps = [2usize, 2, 2];
        let q = build_naive(&s, &caps, 8.0, 8.0).unwrap();
        // Phones 0,1 -> station 0; 2,3 -> 1; 4,5 -> 2.
        let mut bits = vec![false; 18];
        for i in 0..6 {
            bits[i * 3 + i / 2] = true;
        }
        let objective_sum: f64 = (0..6).map(|i| s.get(i, i / 2)).sum();
        let e = q.energy(&bits).unwrap();
        assert!(
            (e + objective_sum).abs() <= 1e-9 * objective_sum.abs().max(1.0),
            "penalties should cancel: {e} vs {}",
            -objective_sum
        );
    }

    #[test]
    fn naive_matches_direct_evaluation_exhaustively() {
        // N=3, M=2: 64 bitstrings, dyadic entries so equality is exact.
        let s = dyadic_matrix(3, 2, 4);
        let caps = [2usize, 1];
        let (l1, l2) = (4.5, 2.25);
        let q = build_naive(&s, &caps, l1, l2).unwrap();
        for k in 0..1u64 << 6 {
            let bits = bits_of(k, 6);
            assert_eq!(
                q.energy(&bits).unwrap(),
                eval_naive_direct(&s, &caps, l1, l2, &bits),
                "bitstring {k:06b}"
            );
        }
    }

    #[test]
    fn builders_reject_bad_arguments() {
        let s = dyadic_matrix(4, 2, 5);
        assert!(matches!(
            build_naive(&s, &[2, 1, 1], 1.0, 1.0),
            Err(QuboError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            build_naive(&s, &[2, 2], 0.0, 1.0),
            Err(QuboError::NonPositiveWeight { .. })
        ));
        let t = top2(&s);
        assert!(matches!(
            build_proposed(&t, &[2, 2, 1], 1.0),
            Err(QuboError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            build_proposed(&t, &[2, 2], -1.0),
            Err(QuboError::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn top2_ranks_and_inverts() {
        let s = matrix(vec![
            vec![5.0, 1.0, 3.0],
            vec![4.0, 4.0, 1.0], // tie: best 0, second 1
            vec![-2.0, -1.0, -3.0],
        ]);
        let t = top2(&s);
        assert_eq!(t.best, vec![0, 0, 1]);
        assert_eq!(t.second, vec![2, 1, 0]);
        assert_eq!(t.s_best, vec![5.0, 4.0, -1.0]);
        assert_eq!(t.s_second, vec![3.0, 4.0, -2.0]);
        assert_eq!(t.phones_with_best, vec![vec![0, 1], vec![2], vec![]]);
        assert_eq!(t.phones_with_second, vec![vec![2], vec![1], vec![0]]);
        for i in 0..3 {
            assert_ne!(t.best[i], t.second[i]);
        }
    }

    #[test]
    fn proposed_all_ones_energy() {
        let s = dyadic_matrix(6, 3, 6);
        let t = top2(&s);
        let caps = [2usize, 2, 2];
        let lambda = 5.0;
        let q = build_proposed(&t, &caps, lambda).unwrap();
        assert_eq!(q.num_vars(), 6);
        let ones = vec![true; 6];
        // Everyone takes their best station: objective is -sum s_best and
        // station a's load is |phones_with_best[a]|.
        let mut expect: f64 = -t.s_best.iter().sum::<f64>();
        for a in 0..3 {
            let gap = t.phones_with_best[a].len() as f64 - caps[a] as f64;
            expect += lambda * gap * gap;
        }
        let e = q.energy(&ones).unwrap();
        assert!((e - expect).abs() < 1e-12, "{e} vs {expect}");
    }

    #[test]
    fn proposed_matches_direct_evaluation_exhaustively() {
        // Dyadic instances: equality must be bit-exact across all 2^N states.
        for seed in 0..5 {
            let s = dyadic_matrix(4, 2, 100 + seed);
            let t = top2(&s);
            let caps = [2usize, 2];
            let lambda = 3.5;
            let q = build_proposed(&t, &caps, lambda).unwrap();
            for k in 0..1u64 << 4 {
                let bits = bits_of(k, 4);
                assert_eq!(
                    q.energy(&bits).unwrap(),
                    eval_proposed_direct(&t, &caps, lambda, &bits),
                    "seed {seed} bitstring {k:04b}"
                );
            }
        }
    }

    #[test]
    fn decode_naive_feasible_and_violations() {
        let caps = [1usize, 1];
        // Phone 0 -> station 1, phone 1 -> station 0.
        let a = decode_naive(&[false, true, true, false], 2, 2, &caps).unwrap();
        assert_eq!(a.station_of, vec![Some(1), Some(0)]);
        assert!(a.one_hot_violations.is_empty());
        assert_eq!(a.capacity_deltas, vec![0, 0]);
        assert!(a.is_feasible());

        // Phone 0 picks both stations, phone 1 picks none.
        let a = decode_naive(&[true, true, false, false], 2, 2, &caps).unwrap();
        assert_eq!(a.station_of, vec![None, None]);
        assert_eq!(a.one_hot_violations, vec![0, 1]);
        assert_eq!(a.capacity_deltas, vec![-1, -1]);
        assert!(!a.is_feasible());

        // Over capacity on station 0.
        let a = decode_naive(&[true, false, true, false], 2, 2, &caps).unwrap();
        assert_eq!(a.capacity_deltas, vec![1, -1]);
        assert!(!a.is_feasible());

        assert!(matches!(
            decode_naive(&[true; 3], 2, 2, &caps),
            Err(QuboError::LengthMismatch { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn decode_encode_proposed_round_trip() {
        let s = dyadic_matrix(6, 2, 7);
        let t = top2(&s);
        let caps = [3usize, 3];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let bits: Vec<bool> = (0..6).map(|_| rng.random_bool(0.5)).collect();
            let a = decode_proposed(&bits, &t, &caps).unwrap();
            for i in 0..6 {
                assert_eq!(a.station_of[i], Some(t.station_for(i, bits[i])));
            }
            assert_eq!(encode_proposed(&a, &t).unwrap(), bits);
        }
        // An assignment outside the table cannot be encoded.
        let outside = Assignment {
            station_of: vec![Some(0); 6],
            one_hot_violations: vec![],
            capacity_deltas: vec![0, 0],
        };
        if (0..6).any(|i| t.best[i] != 0 && t.second[i] != 0) {
            assert_eq!(encode_proposed(&outside, &t), None);
        }
    }

    #[test]
    fn objective_requires_full_assignment() {
        let s = matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let full = Assignment {
            station_of: vec![Some(1), Some(0)],
            one_hot_violations: vec![],
            capacity_deltas: vec![0, 0],
        };
        assert_eq!(objective(&full, &s).unwrap(), 5.0);
        let partial = Assignment {
            station_of: vec![Some(1), None],
            one_hot_violations: vec![1],
            capacity_deltas: vec![0, -1],
        };
        assert!(matches!(
            objective(&partial, &s),
            Err(QuboError::UnassignedPhone { phone: 1 })
        ));
    }

    #[test]
    fn default_weight_tracks_matrix_scale() {
        let s = matrix(vec![vec![1.0, -30.0], vec![12.0, 4.0]]);
        assert_eq!(default_penalty_weight(&s), 60.0);
        let zero = matrix(vec![vec![0.0, 0.0]]);
        assert_eq!(default_penalty_weight(&zero), 1.0);
    }

    #[test]
    fn text_round_trip_is_lossless() {
        let s = SinrMatrix::from_rows(
            (0..5)
                .map(|i| (0..3).map(|a| ((i * 3 + a) as f64).sin() * 20.0).collect())
                .collect(),
            SinrScale::Db,
        );
        let q = build_naive(&s, &[2, 2, 1], 40.0, 40.0).unwrap();
        let text = q.to_text();
        let back = Qubo::from_text(&text).unwrap();
        assert_eq!(back.num_vars(), q.num_vars());
        assert_eq!(back.offset(), q.offset());
        assert_eq!(back.linear(), q.linear());
        assert_eq!(back.quadratic(), q.quadratic());
    }

    #[test]
    fn text_accepts_messy_input() {
        let q = Qubo::from_text("# comment\n3 -1.5\n2 0 4\n0 0 1\n0 2 -1.0\n\n").unwrap();
        assert_eq!(q.num_vars(), 3);
        assert_eq!(q.offset(), -1.5);
        assert_eq!(q.linear().get(&0), Some(&1.0));
        // (2,0) canonicalized and accumulated with (0,2).
        assert_eq!(q.quadratic().get(&(0, 2)), Some(&3.0));
    }

    #[test]
    fn text_rejects_malformed_input() {
        for (text, what) in [
            ("", "empty"),
            ("3", "missing offset"),
            ("3 0 9", "extra header token"),
            ("3 0\n1 2", "short triple"),
            ("3 0\n1 5 1.0", "index out of range"),
            ("3 0\n1 2 abc", "bad coefficient"),
            ("x 0\n", "bad count"),
        ] {
            assert!(
                matches!(Qubo::from_text(text), Err(QuboError::Parse { .. })),
                "should reject: {what}"
            );
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("problem.qubo");
        let s = dyadic_matrix(4, 2, 11);
        let t = top2(&s);
        let q = build_proposed(&t, &[2, 2], 12.0).unwrap();
        q.write_text(&path).unwrap();
        let back = Qubo::read_text(&path).unwrap();
        for k in 0..1u64 << 4 {
            let bits = bits_of(k, 4);
            assert_eq!(q.energy(&bits).unwrap(), back.energy(&bits).unwrap());
        }
    }
}
