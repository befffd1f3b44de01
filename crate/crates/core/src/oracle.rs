//! Brute-force reference solvers for small instances.
//!
//! Nothing here calls into the shortest path, facility selection or engine
//! code; the oracles read the instance data directly and enumerate. The two
//! property checkers at the end are the exception: they exercise the real
//! dual evaluation and only compare numbers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dual::{evaluate_dual, DualError, MultiplierVector};
use crate::engine::SolverReport;
use crate::facility_selection::ReducedCostTable;
use crate::instance::{Instance, TerminalSet};

pub const MAX_PATH_ENUM_NODES: usize = 10;
pub const MAX_AP_Y_ASSIGNMENTS: u64 = 10_000_000;
pub const MAX_OPT_EDGES: usize = 8;
pub const MAX_OPT_COMMODITIES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    TooLarge,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("instance exceeds the brute-force size guard")
    }
}

impl core::error::Error for OracleError {}

/// Adjacency as `(neighbour, edge id)` lists.
fn neighbours(inst: &Instance) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); inst.node_count];
    for e in &inst.edges {
        adj[e.u].push((e.v, e.id));
        adj[e.v].push((e.u, e.id));
    }
    adj
}

/// Every simple path from `s` to `t`, as edge-id lists.
fn simple_paths(adj: &[Vec<(usize, usize)>], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(
        adj: &[Vec<(usize, usize)>],
        at: usize,
        t: usize,
        on_path: &mut [bool],
        edges: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if at == t {
            out.push(edges.clone());
            return;
        }
        for &(y, e) in &adj[at] {
            if !on_path[y] {
                on_path[y] = true;
                edges.push(e);
                walk(adj, y, t, on_path, edges, out);
                edges.pop();
                on_path[y] = false;
            }
        }
    }
    let mut on_path = vec![false; adj.len()];
    on_path[s] = true;
    let mut out = Vec::new();
    walk(adj, s, t, &mut on_path, &mut Vec::new(), &mut out);
    out
}

/// Row-major distance matrix, minimum over all simple paths.
pub fn brute_force_shortest_paths(inst: &Instance, w: &[f64]) -> Result<Vec<f64>, OracleError> {
    let n = inst.node_count;
    if n > MAX_PATH_ENUM_NODES {
        return Err(OracleError::TooLarge);
    }
    let adj = neighbours(inst);
    let mut dist = vec![f64::INFINITY; n * n];
    for s in 0..n {
        for t in 0..n {
            dist[s * n + t] = simple_paths(&adj, s, t)
                .iter()
                .map(|p| p.iter().map(|&e| w[e]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
        }
    }
    Ok(dist)
}

/// Minimum reduced cost over all per-edge choices (nothing, or one
/// facility) that touch every terminal.
pub fn brute_force_ap_y(
    inst: &Instance,
    costs: &ReducedCostTable,
    terminals: &TerminalSet,
) -> Result<f64, OracleError> {
    let radix: Vec<usize> = (0..inst.edge_count()).map(|e| costs.edge(e).len() + 1).collect();
    let total = radix
        .iter()
        .try_fold(1u64, |acc, &r| acc.checked_mul(r as u64))
        .filter(|&t| t <= MAX_AP_Y_ASSIGNMENTS)
        .ok_or(OracleError::TooLarge)?;
    let mut digits = vec![0usize; radix.len()];
    let mut best = f64::INFINITY;
    for _ in 0..total {
        let mut covered = vec![false; inst.node_count];
        let mut cost = 0.0;
        for (e, &d) in digits.iter().enumerate() {
            if d > 0 {
                cost += costs.edge(e)[d - 1];
                covered[inst.edges[e].u] = true;
                covered[inst.edges[e].v] = true;
            }
        }
        if cost < best && terminals.nodes().iter().all(|&v| covered[v]) {
            best = cost;
        }
        for (d, &r) in digits.iter_mut().zip(&radix) {
            *d += 1;
            if *d < r {
                break;
            }
            *d = 0;
        }
    }
    Ok(best)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Optimal design cost of the full problem, `+inf` when no design carries
/// the demand.
///
/// Designs are enumerated exhaustively. A design is accepted when the
/// commodities can be split over simple paths in multiples of `g / 2`, where
/// `g` is the gcd of all demands and capacities, without exceeding any
/// installed capacity. The grid restricts the continuous split, so an
/// accepted design is always truly feasible. For up to two commodities the
/// half-integral grid is exact (two-commodity undirected flows with integral
/// data have half-integral solutions); with three it may in principle
/// reject a design that only a finer split would carry.
pub fn brute_force_opt(inst: &Instance) -> Result<f64, OracleError> {
    if inst.edge_count() > MAX_OPT_EDGES || inst.commodity_count() > MAX_OPT_COMMODITIES {
        return Err(OracleError::TooLarge);
    }
    if inst.commodities.is_empty() {
        return Ok(0.0);
    }
    let g = inst
        .commodities
        .iter()
        .map(|c| c.demand)
        .chain(inst.edges.iter().flat_map(|e| e.facilities.iter().map(|f| f.capacity)))
        .fold(0, gcd);
    let step = g as f64 / 2.0;
    let adj = neighbours(inst);
    let paths: Vec<Vec<Vec<usize>>> = inst
        .commodities
        .iter()
        .map(|c| simple_paths(&adj, c.source, c.sink))
        .collect();
    let units: Vec<u64> = inst.commodities.iter().map(|c| 2 * c.demand / g).collect();

    let radix: Vec<usize> = inst.edges.iter().map(|e| e.facilities.len() + 1).collect();
    let total: u64 = radix.iter().map(|&r| r as u64).product();
    let mut digits = vec![0usize; radix.len()];
    let mut best = f64::INFINITY;
    for _ in 0..total {
        let mut cost = 0.0;
        let mut capacity = vec![0.0; inst.edge_count()];
        for (e, &d) in digits.iter().enumerate() {
            if d > 0 {
                let f = inst.edges[e].facilities[d - 1];
                cost += f.cost as f64;
                capacity[e] = f.capacity as f64;
            }
        }
        if cost < best && splits_fit(&paths, &units, step, 0, 0, units[0], &mut capacity) {
            best = cost;
        }
        for (d, &r) in digits.iter_mut().zip(&radix) {
            *d += 1;
            if *d < r {
                break;
            }
            *d = 0;
        }
    }
    Ok(best)
}

/// Depth-first search over path splits. `left` grid units of commodity `k`
/// remain to be placed on paths `p..`.
fn splits_fit(
    paths: &[Vec<Vec<usize>>],
    units: &[u64],
    step: f64,
    k: usize,
    p: usize,
    left: u64,
    residual: &mut [f64],
) -> bool {
    if left == 0 {
        return k + 1 == paths.len()
            || splits_fit(paths, units, step, k + 1, 0, units[k + 1], residual);
    }
    if p == paths[k].len() {
        return false;
    }
    let path = &paths[k][p];
    let room = path
        .iter()
        .map(|&e| residual[e])
        .fold(f64::INFINITY, f64::min);
    let fits = if room.is_finite() {
        libm::floor((room + 1e-9) / step).max(0.0) as u64
    } else {
        left
    };
    for amount in (0..=fits.min(left)).rev() {
        let flow = amount as f64 * step;
        for &e in path {
            residual[e] -= flow;
        }
        let ok = splits_fit(paths, units, step, k, p + 1, left - amount, residual);
        for &e in path {
            residual[e] += flow;
        }
        if ok {
            return true;
        }
    }
    false
}

/// Checks `theta(w') <= theta(w) + g(w).(w' - w) + 1e-6 (1 + |theta(w)|)`.
/// `None` when either evaluation used the inexact facility-selection bound.
pub fn check_supergradient(
    inst: &Instance,
    w: &MultiplierVector,
    w_prime: &MultiplierVector,
) -> Result<Option<bool>, DualError> {
    let at = evaluate_dual(inst, w)?;
    let other = evaluate_dual(inst, w_prime)?;
    if !(at.exact_y && other.exact_y) {
        return Ok(None);
    }
    let linear: f64 = at
        .subgradient
        .iter()
        .zip(w_prime.iter().zip(w.iter()))
        .map(|(g, (b, a))| g * (b - a))
        .sum();
    Ok(Some(other.theta <= at.theta + linear + 1e-6 * (1.0 + at.theta.abs())))
}

pub fn check_weak_duality(report: &SolverReport, opt_or_ub: f64) -> bool {
    report.best_theta <= opt_or_ub + 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facility_selection::reduced_facility_costs;
    use crate::fixtures::{build, tri3};

    #[test]
    fn tri3_paths() {
        let d = brute_force_shortest_paths(&tri3(), &[1.0, 1.0, 3.0]).unwrap();
        assert_eq!(d[2], 2.0);
        let z = brute_force_shortest_paths(&tri3(), &[0.0; 3]).unwrap();
        assert!(z.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn tri3_facility_selection() {
        let inst = tri3();
        let t = inst.terminal_set();
        let c = reduced_facility_costs(&inst, &[0.0; 3]).unwrap();
        assert_eq!(brute_force_ap_y(&inst, &c, &t), Ok(10.0));
        let c = reduced_facility_costs(&inst, &[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(brute_force_ap_y(&inst, &c, &t), Ok(-2.0));
        let c = reduced_facility_costs(&inst, &[0.0; 3]).unwrap();
        assert_eq!(brute_force_ap_y(&inst, &c, &TerminalSet::empty()), Ok(0.0));
    }

    #[test]
    fn tri3_optimum() {
        assert_eq!(brute_force_opt(&tri3()), Ok(18.0));
        let mut empty = tri3();
        empty.commodities.clear();
        assert_eq!(brute_force_opt(&empty), Ok(0.0));
        let one = build("one", 2, &[(0, 1, &[(5, 10)])], &[(0, 1, 7)]);
        assert_eq!(brute_force_opt(&one), Ok(f64::INFINITY));
    }

    #[test]
    fn split_flow_is_found() {
        // 7 units must split 5 + 2 over two routes of small facilities
        let inst = build(
            "split",
            3,
            &[(0, 2, &[(5, 10), (10, 30)]), (0, 1, &[(5, 4)]), (1, 2, &[(5, 4)])],
            &[(0, 2, 7)],
        );
        assert_eq!(brute_force_opt(&inst), Ok(18.0));
    }

    #[test]
    fn size_guards() {
        let big = crate::generator::generate_random(&crate::generator::GeneratorParams::new(12, 15, 1)).unwrap();
        assert_eq!(brute_force_shortest_paths(&big, &[0.0; 15]), Err(OracleError::TooLarge));
        assert_eq!(brute_force_opt(&big), Err(OracleError::TooLarge));
        let c = reduced_facility_costs(&big, &[0.0; 15]).unwrap();
        assert_eq!(brute_force_ap_y(&big, &c, &big.terminal_set()), Err(OracleError::TooLarge));
    }

    #[test]
    fn supergradient_identity_and_tri3_probe() {
        let inst = tri3();
        let zero = MultiplierVector::zeros(3);
        assert_eq!(check_supergradient(&inst, &zero, &zero), Ok(Some(true)));
        let probe = MultiplierVector::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(check_supergradient(&inst, &zero, &probe), Ok(Some(true)));
    }
}
