//! A quick feasible design, used as the target value in the step-length
//! formula.
//!
//! First every commodity follows a fewest-hop path and each edge receives the
//! cheapest facility that carries its load. If some load exceeds the largest
//! facility, commodities are routed once more, largest demand first, on
//! shortest paths weighted by inverse residual capacity. If that fails too,
//! the bound falls back to installing the largest facility everywhere, which
//! is never cheaper than an optimum design as long as one exists.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::facility_selection::FacilitySelection;
use crate::instance::Instance;
use crate::shortest_paths::all_pairs_shortest_paths;

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    pub value: f64,
    /// True when `design` provably carries all demand.
    pub feasible: bool,
    pub design: FacilitySelection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasible {
    /// The commodity cannot be sent even with every largest facility installed.
    Commodity { commodity: usize },
    /// Demand originating or ending at the node exceeds its incident capacity.
    Node { node: usize },
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Infeasible::Commodity { commodity } => {
                write!(f, "commodity {commodity} exceeds the capacity of some cut")
            }
            Infeasible::Node { node } => {
                write!(f, "demand at node {node} exceeds its incident capacity")
            }
        }
    }
}

impl core::error::Error for Infeasible {}

pub fn compute_upper_bound(inst: &Instance) -> Result<UpperBound, Infeasible> {
    let m = inst.edge_count();
    let sp = all_pairs_shortest_paths(inst, &vec![0.0; m]);
    let routing: Vec<Vec<usize>> = inst
        .commodities
        .iter()
        .map(|c| sp.path(c.source, c.sink))
        .collect();
    if let Some(ub) = design_for(inst, &routing) {
        return Ok(ub);
    }
    if let Some(routing) = capacity_aware_routing(inst) {
        if let Some(ub) = design_for(inst, &routing) {
            return Ok(ub);
        }
    }
    prove_infeasible(inst)?;
    let mut design = FacilitySelection::none(m);
    let mut value = 0.0;
    for e in &inst.edges {
        if let Some(last) = e.facilities.len().checked_sub(1) {
            design.choice[e.id] = Some(last);
            value += e.facilities[last].cost as f64;
        }
    }
    Ok(UpperBound { value, feasible: false, design })
}

fn edge_loads(inst: &Instance, routing: &[Vec<usize>]) -> Vec<f64> {
    let mut load = vec![0.0; inst.edge_count()];
    for (c, path) in inst.commodities.iter().zip(routing) {
        for &e in path {
            load[e] += c.demand as f64;
        }
    }
    load
}

fn design_for(inst: &Instance, routing: &[Vec<usize>]) -> Option<UpperBound> {
    let load = edge_loads(inst, routing);
    let mut design = FacilitySelection::none(inst.edge_count());
    let mut value = 0.0;
    for e in &inst.edges {
        if load[e.id] > 0.0 {
            let l = e.cheapest_fitting(load[e.id])?;
            design.choice[e.id] = Some(l);
            value += e.facilities[l].cost as f64;
        }
    }
    Some(UpperBound { value, feasible: true, design })
}

#[derive(PartialEq)]
struct Label(f64, usize);
impl Eq for Label {}
impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn capacity_aware_routing(inst: &Instance) -> Option<Vec<Vec<usize>>> {
    let n = inst.node_count;
    let inc = inst.incidence();
    let mut residual: Vec<f64> = inst.edges.iter().map(|e| e.max_capacity() as f64).collect();
    let mut order: Vec<usize> = (0..inst.commodity_count()).collect();
    order.sort_by_key(|&k| core::cmp::Reverse(inst.commodities[k].demand));
    let mut routing = vec![Vec::new(); inst.commodity_count()];
    for k in order {
        let c = inst.commodities[k];
        let demand = c.demand as f64;
        let mut dist = vec![f64::INFINITY; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[c.source] = 0.0;
        heap.push(Label(0.0, c.source));
        while let Some(Label(d, x)) = heap.pop() {
            if d > dist[x] || x == c.sink {
                continue;
            }
            for &e in &inc[x] {
                if residual[e] < demand {
                    continue;
                }
                let y = inst.edges[e].other(x);
                let nd = d + 1.0 / residual[e];
                if nd < dist[y] {
                    dist[y] = nd;
                    via[y] = Some(e);
                    heap.push(Label(nd, y));
                }
            }
        }
        if !dist[c.sink].is_finite() {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = c.sink;
        while cur != c.source {
            let e = via[cur]?;
            path.push(e);
            residual[e] -= demand;
            cur = inst.edges[e].other(cur);
        }
        path.reverse();
        routing[k] = path;
    }
    Some(routing)
}

fn prove_infeasible(inst: &Instance) -> Result<(), Infeasible> {
    let inc = inst.incidence();
    let mut node_demand = vec![0u64; inst.node_count];
    for c in &inst.commodities {
        node_demand[c.source] += c.demand;
        node_demand[c.sink] += c.demand;
    }
    for (v, edges) in inc.iter().enumerate() {
        let cap: u64 = edges.iter().map(|&e| inst.edges[e].max_capacity()).sum();
        if node_demand[v] > cap {
            return Err(Infeasible::Node { node: v });
        }
    }
    for c in &inst.commodities {
        if max_flow(inst, &inc, c.source, c.sink) < c.demand {
            return Err(Infeasible::Commodity { commodity: c.id });
        }
    }
    Ok(())
}

/// Edmonds-Karp on the undirected graph with largest-facility capacities.
fn max_flow(inst: &Instance, inc: &[Vec<usize>], s: usize, t: usize) -> u64 {
    let m = inst.edge_count();
    // flow[e] > 0 means flow from edges[e].u to edges[e].v
    let mut flow = vec![0i128; m];
    let cap: Vec<i128> = inst.edges.iter().map(|e| e.max_capacity() as i128).collect();
    let residual = |flow: &[i128], e: usize, from: usize| -> i128 {
        if from == inst.edges[e].u {
            cap[e] - flow[e]
        } else {
            cap[e] + flow[e]
        }
    };
    let mut total: i128 = 0;
    loop {
        let mut via: Vec<Option<usize>> = vec![None; inst.node_count];
        let mut seen = vec![false; inst.node_count];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &e in &inc[x] {
                let y = inst.edges[e].other(x);
                if !seen[y] && residual(&flow, e, x) > 0 {
                    seen[y] = true;
                    via[y] = Some(e);
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] {
            return total as u64;
        }
        let mut push = i128::MAX;
        let mut cur = t;
        while cur != s {
            let e = via[cur].expect("bfs tree");
            let from = inst.edges[e].other(cur);
            push = push.min(residual(&flow, e, from));
            cur = from;
        }
        let mut cur = t;
        while cur != s {
            let e = via[cur].expect("bfs tree");
            let from = inst.edges[e].other(cur);
            if from == inst.edges[e].u {
                flow[e] += push;
            } else {
                flow[e] -= push;
            }
            cur = from;
        }
        total += push;
    }
}
