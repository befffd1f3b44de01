//! Small hand-written instances used by tests and examples.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{Commodity, Edge, FacilityOption, Instance};

/// Three nodes in a triangle, edges (0,1), (1,2), (0,2), each offering
/// (capacity 5, cost 10) and (capacity 10, cost 18); one commodity of
/// demand 7 from node 0 to node 2. Its optimum design costs 18.
pub fn tri3() -> Instance {
    let menu = vec![FacilityOption::new(5, 10), FacilityOption::new(10, 18)];
    let edges = [(0, 1), (1, 2), (0, 2)]
        .iter()
        .enumerate()
        .map(|(id, &(u, v))| Edge { id, u, v, facilities: menu.clone() })
        .collect();
    Instance {
        name: String::from("TRI3"),
        node_count: 3,
        edges,
        commodities: vec![Commodity { id: 0, source: 0, sink: 2, demand: 7 }],
    }
}

/// `(u, v, [(capacity, cost)])`.
pub type EdgeSpec<'a> = (usize, usize, &'a [(u64, u64)]);

/// Builds an instance from `(u, v, menu)` triples and `(s, t, demand)` triples.
pub fn build(
    name: &str,
    node_count: usize,
    edges: &[EdgeSpec<'_>],
    commodities: &[(usize, usize, u64)],
) -> Instance {
    Instance {
        name: String::from(name),
        node_count,
        edges: edges
            .iter()
            .enumerate()
            .map(|(id, &(u, v, menu))| Edge {
                id,
                u,
                v,
                facilities: menu.iter().map(|&(c, f)| FacilityOption::new(c, f)).collect::<Vec<_>>(),
            })
            .collect(),
        commodities: commodities
            .iter()
            .enumerate()
            .map(|(id, &(source, sink, demand))| Commodity { id, source, sink, demand })
            .collect(),
    }
}
