//! Exact assignment oracle via min-cost flow.
//!
//! Maximizing total SINR under one-hot and exact-capacity constraints is a
//! balanced transportation problem: source -> phone (capacity 1) -> station
//! (capacity 1, cost -S[i,a]) -> sink (capacity C_a). The constraint matrix
//! is totally unimodular, so the LP optimum is integral and successive
//! shortest augmenting paths find it exactly.

use super::SolverError;
use crate::qubo::{assignment_from_stations, Assignment, Top2Table};
use crate::radio::SinrMatrix;

#[derive(Clone, Copy)]
struct Edge {
    to: u32,
    rev: u32,
    cap: i32,
    cost: f64,
}

struct FlowGraph {
    adj: Vec<Vec<Edge>>,
}

impl FlowGraph {
    fn new(nodes: usize) -> Self {
        FlowGraph {
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i32, cost: f64) {
        let rev_from = self.adj[to].len() as u32;
        let rev_to = self.adj[from].len() as u32;
        self.adj[from].push(Edge {
            to: to as u32,
            rev: rev_from,
            cap,
            cost,
        });
        self.adj[to].push(Edge {
            to: from as u32,
            rev: rev_to,
            cap: 0,
            cost: -cost,
        });
    }
}

/// Optimal assignment maximizing `sum_i S[i, a(i)]` with station `a`
/// serving exactly `capacities[a]` phones.
pub fn exact_assignment(s: &SinrMatrix, capacities: &[usize]) -> Result<Assignment, SolverError> {
    transport(s, capacities, |_, _| true)
}

/// Same problem, but phone `i` may only use `table.best[i]` or
/// `table.second[i]`. Unlike the unrestricted problem this can be
/// infeasible, which is reported as [`SolverError::Infeasible`].
pub fn exact_assignment_restricted(
    s: &SinrMatrix,
    capacities: &[usize],
    table: &Top2Table,
) -> Result<Assignment, SolverError> {
    if table.num_phones() != s.num_phones() || table.num_stations() != s.num_stations() {
        return Err(SolverError::Dimension {
            detail: format!(
                "table is {}x{}, matrix is {}x{}",
                table.num_phones(),
                table.num_stations(),
                s.num_phones(),
                s.num_stations()
            ),
        });
    }
    transport(s, capacities, |i, a| {
        table.best[i] == a || table.second[i] == a
    })
}

fn transport(
    s: &SinrMatrix,
    capacities: &[usize],
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<Assignment, SolverError> {
    let n = s.num_phones();
    let m = s.num_stations();
    if capacities.len() != m {
        return Err(SolverError::Dimension {
            detail: format!("{} capacities for {m} stations", capacities.len()),
        });
    }
    let total: usize = capacities.iter().sum();
    if total != n {
        return Err(SolverError::InfeasibleCapacities { total, phones: n });
    }

    // Node layout: source, then phones, then stations, then sink.
    let src = 0;
    let phone = |i: usize| 1 + i;
    let station = |a: usize| 1 + n + a;
    let sink = 1 + n + m;
    let nodes = n + m + 2;
    let mut g = FlowGraph::new(nodes);
    for i in 0..n {
        g.add_edge(src, phone(i), 1, 0.0);
        for a in 0..m {
            if allowed(i, a) {
                g.add_edge(phone(i), station(a), 1, -s.get(i, a));
            }
        }
    }
    for a in 0..m {
        g.add_edge(station(a), sink, capacities[a] as i32, 0.0);
    }

    // Bellman-Ford gives valid potentials despite the negative arc costs;
    // the initial residual graph is acyclic so it terminates early.
    let inf = f64::INFINITY;
    let mut pot = vec![inf; nodes];
    pot[src] = 0.0;
    for _ in 0..nodes {
        let mut changed = false;
        for u in 0..nodes {
            if pot[u] == inf {
                continue;
            }
            for e in &g.adj[u] {
                if e.cap > 0 && pot[u] + e.cost < pot[e.to as usize] {
                    pot[e.to as usize] = pot[u] + e.cost;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // One augmenting unit per round; Dijkstra over reduced costs.
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    #[derive(PartialEq)]
    struct Key(f64);
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Key {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }

    let mut flow = 0usize;
    while flow < n {
        let mut dist = vec![inf; nodes];
        let mut parent: Vec<Option<(u32, u32)>> = vec![None; nodes];
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((Key(0.0), src as u32)));
        while let Some(Reverse((Key(d), u))) = heap.pop() {
            let u = u as usize;
            if d > dist[u] {
                continue;
            }
            for (k, e) in g.adj[u].iter().enumerate() {
                if e.cap <= 0 || pot[e.to as usize] == inf {
                    continue;
                }
                // Clamp guards the tiny negatives float potentials can leave.
                let rc = (e.cost + pot[u] - pot[e.to as usize]).max(0.0);
                let nd = d + rc;
                if nd < dist[e.to as usize] {
                    dist[e.to as usize] = nd;
                    parent[e.to as usize] = Some((u as u32, k as u32));
                    heap.push(Reverse((Key(nd), e.to)));
                }
            }
        }
        if dist[sink] == inf {
            return Err(SolverError::Infeasible);
        }
        // Capping the update at dist[sink] keeps reduced costs non-negative
        // for nodes Dijkstra did not settle this round.
        for v in 0..nodes {
            if pot[v] < inf {
                pot[v] += dist[v].min(dist[sink]);
            }
        }
        let mut v = sink;
        while v != src {
            let (u, k) = parent[v].expect("path to source");
            let (u, k) = (u as usize, k as usize);
            g.adj[u][k].cap -= 1;
            let rev = g.adj[u][k].rev as usize;
            g.adj[v][rev].cap += 1;
            v = u;
        }
        flow += 1;
    }

    let mut station_of = vec![None; n];
    for i in 0..n {
        for e in &g.adj[phone(i)] {
            let t = e.to as usize;
            if e.cap == 0 && t >= station(0) && t < station(m) {
                station_of[i] = Some(t - station(0));
                break;
            }
        }
    }
    Ok(assignment_from_stations(station_of, Vec::new(), capacities))
}
