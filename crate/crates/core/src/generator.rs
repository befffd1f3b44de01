//! Seeded random instances: a random spanning tree plus extra random edges,
//! one commodity per unordered node pair, and `L` step-increasing facilities
//! per edge.
//!
//! Routing all node pairs easily overloads tree edges, so after drawing the
//! menus each edge's capacities are multiplied by the smallest integer that
//! lets its largest facility carry the edge's load under fewest-hop routing.
//! Every generated instance is therefore feasible.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Commodity, Edge, FacilityOption, Instance};
use crate::shortest_paths::all_pairs_shortest_paths;

/// Growth factor range between consecutive facility capacities.
const CAPACITY_GROWTH: RangeInclusive<f64> = 1.5..=2.5;
/// Price per unit of added capacity, relative, for the next facility.
const COST_PER_EXTRA_UNIT: RangeInclusive<f64> = 0.3..=0.9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorParams {
    pub node_count: usize,
    pub edge_count: usize,
    pub facility_count: usize,
    pub seed: u64,
    pub base_capacity: RangeInclusive<u64>,
    pub base_cost: RangeInclusive<u64>,
    pub demand: RangeInclusive<u64>,
}

impl GeneratorParams {
    pub fn new(node_count: usize, edge_count: usize, seed: u64) -> Self {
        Self {
            node_count,
            edge_count,
            facility_count: 3,
            seed,
            base_capacity: 10..=50,
            base_cost: 10..=100,
            demand: 1..=20,
        }
    }

    pub fn with_facilities(mut self, facility_count: usize) -> Self {
        self.facility_count = facility_count;
        self
    }

    pub fn check(&self) -> Result<(), GeneratorError> {
        let n = self.node_count;
        if n == 0 {
            return Err(GeneratorError::NoNodes);
        }
        let max_edges = n * (n - 1) / 2;
        if self.edge_count + 1 < n {
            return Err(GeneratorError::TooFewEdges { nodes: n, edges: self.edge_count });
        }
        if self.edge_count > max_edges {
            return Err(GeneratorError::TooManyEdges { nodes: n, edges: self.edge_count });
        }
        if self.facility_count == 0 {
            return Err(GeneratorError::NoFacilities);
        }
        for r in [&self.base_capacity, &self.base_cost, &self.demand] {
            if *r.start() == 0 || r.start() > r.end() {
                return Err(GeneratorError::BadRange);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    NoNodes,
    TooFewEdges { nodes: usize, edges: usize },
    TooManyEdges { nodes: usize, edges: usize },
    NoFacilities,
    BadRange,
}

impl fmt::Display for GeneratorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GeneratorError::NoNodes => write!(f, "node count must be positive"),
            GeneratorError::TooFewEdges { nodes, edges } => write!(
                f,
                "{edges} edges cannot connect {nodes} nodes (need at least {})",
                nodes - 1
            ),
            GeneratorError::TooManyEdges { nodes, edges } => write!(
                f,
                "{edges} edges exceed the {} node pairs of a simple graph on {nodes} nodes",
                nodes * (nodes - 1) / 2
            ),
            GeneratorError::NoFacilities => write!(f, "facility count must be positive"),
            GeneratorError::BadRange => write!(f, "value ranges must be nonempty and positive"),
        }
    }
}

impl core::error::Error for GeneratorError {}

pub fn generate_random(params: &GeneratorParams) -> Result<Instance, GeneratorError> {
    params.check()?;
    let n = params.node_count;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(params.edge_count);
    let mut in_tree = alloc::vec![false; n * n];
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let (a, b) = (order[i].min(parent), order[i].max(parent));
        in_tree[a * n + b] = true;
        pairs.push((a, b));
    }
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !in_tree[a * n + b])
        .collect();
    rest.shuffle(&mut rng);
    pairs.extend(rest.into_iter().take(params.edge_count - (n - 1)));
    pairs.sort_unstable();

    let mut edges: Vec<Edge> = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (u, v))| Edge { id, u, v, facilities: facility_menu(params, &mut rng) })
        .collect();

    let commodities: Vec<Commodity> = (0..n)
        .flat_map(|s| (s + 1..n).map(move |t| (s, t)))
        .enumerate()
        .map(|(id, (source, sink))| Commodity {
            id,
            source,
            sink,
            demand: rng.gen_range(params.demand.clone()),
        })
        .collect();

    let loads = fewest_hop_loads(n, &edges, &commodities);
    for (e, load) in edges.iter_mut().zip(loads) {
        let top = e.max_capacity();
        if top < load {
            let scale = load.div_ceil(top);
            for f in &mut e.facilities {
                f.capacity *= scale;
            }
        }
    }

    Ok(Instance {
        name: format!("rand-n{}-m{}-s{}", n, params.edge_count, params.seed),
        node_count: n,
        edges,
        commodities,
    })
}

/// Per-edge load when every commodity follows its fewest-hop path.
fn fewest_hop_loads(n: usize, edges: &[Edge], commodities: &[Commodity]) -> Vec<u64> {
    let inst = Instance {
        name: String::new(),
        node_count: n,
        edges: edges.to_vec(),
        commodities: commodities.to_vec(),
    };
    let sp = all_pairs_shortest_paths(&inst, &alloc::vec![0.0; edges.len()]);
    let mut load = alloc::vec![0u64; edges.len()];
    for c in commodities {
        for e in sp.path(c.source, c.sink) {
            load[e] += c.demand;
        }
    }
    load
}

fn facility_menu(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Vec<FacilityOption> {
    let mut capacity = rng.gen_range(params.base_capacity.clone());
    let mut cost = rng.gen_range(params.base_cost.clone());
    let mut menu = Vec::with_capacity(params.facility_count);
    menu.push(FacilityOption::new(capacity, cost));
    for _ in 1..params.facility_count {
        let next = libm::ceil(capacity as f64 * rng.gen_range(CAPACITY_GROWTH)) as u64;
        let extra = libm::ceil((next - capacity) as f64 * rng.gen_range(COST_PER_EXTRA_UNIT)) as u64;
        capacity = next;
        cost += extra.max(1);
        menu.push(FacilityOption::new(capacity, cost));
    }
    menu
}
