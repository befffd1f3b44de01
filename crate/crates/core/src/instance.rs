//! Problem data: an undirected graph whose edges carry a menu of facilities,
//! plus a list of point-to-point commodities.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A facility that can be installed on an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FacilityOption {
    pub capacity: u64,
    pub cost: u64,
}

impl FacilityOption {
    pub const fn new(capacity: u64, cost: u64) -> Self {
        Self { capacity, cost }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    /// Ordered by capacity; strictly increasing in capacity and cost.
    pub facilities: Vec<FacilityOption>,
}

impl Edge {
    pub fn other(&self, node: usize) -> usize {
        if node == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, node: usize) -> bool {
        self.u == node || self.v == node
    }

    /// Largest installable capacity, 0 for an empty menu.
    pub fn max_capacity(&self) -> u64 {
        self.facilities.last().map_or(0, |f| f.capacity)
    }

    /// Cheapest facility whose capacity is at least `flow`.
    pub fn cheapest_fitting(&self, flow: f64) -> Option<usize> {
        self.facilities
            .iter()
            .position(|f| f.capacity as f64 >= flow)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Commodity {
    pub id: usize,
    pub source: usize,
    pub sink: usize,
    pub demand: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Instance {
    pub name: String,
    pub node_count: usize,
    pub edges: Vec<Edge>,
    pub commodities: Vec<Commodity>,
}

/// Nodes that are the source or the sink of at least one commodity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TerminalSet {
    nodes: Vec<usize>,
}

impl TerminalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_nodes(nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut nodes: Vec<usize> = nodes.into_iter().collect();
        nodes.sort_unstable();
        nodes.dedup();
        Self { nodes }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A broken instance invariant, with its location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoNodes,
    EdgeIdMismatch { position: usize, id: usize },
    EdgeEndpointOutOfRange { edge: usize },
    SelfLoop { edge: usize },
    DuplicateEdge { edge: usize, first: usize },
    EmptyFacilityMenu { edge: usize },
    NonPositiveFacility { edge: usize, index: usize },
    NotStepIncreasing { edge: usize },
    CommodityIdMismatch { position: usize, id: usize },
    CommodityEndpointOutOfRange { commodity: usize },
    SourceIsSink { commodity: usize },
    NonPositiveDemand { commodity: usize },
    Disconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NoNodes => write!(f, "instance has no nodes"),
            Violation::EdgeIdMismatch { position, id } => {
                write!(f, "edge at position {position} has id {id}")
            }
            Violation::EdgeEndpointOutOfRange { edge } => {
                write!(f, "edge {edge} has an endpoint out of range")
            }
            Violation::SelfLoop { edge } => write!(f, "edge {edge} is a self loop"),
            Violation::DuplicateEdge { edge, first } => {
                write!(f, "edge {edge} duplicates edge {first}")
            }
            Violation::EmptyFacilityMenu { edge } => write!(f, "edge {edge} has no facilities"),
            Violation::NonPositiveFacility { edge, index } => {
                write!(f, "facility {index} at edge {edge} has zero capacity or cost")
            }
            Violation::NotStepIncreasing { edge } => {
                write!(f, "facilities not step-increasing at edge {edge}")
            }
            Violation::CommodityIdMismatch { position, id } => {
                write!(f, "commodity at position {position} has id {id}")
            }
            Violation::CommodityEndpointOutOfRange { commodity } => {
                write!(f, "commodity {commodity} has an endpoint out of range")
            }
            Violation::SourceIsSink { commodity } => {
                write!(f, "commodity {commodity} has identical source and sink")
            }
            Violation::NonPositiveDemand { commodity } => {
                write!(f, "commodity {commodity} has zero demand")
            }
            Violation::Disconnected => write!(f, "graph disconnected"),
        }
    }
}

impl core::error::Error for Violation {}

impl Instance {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn commodity_count(&self) -> usize {
        self.commodities.len()
    }

    pub fn terminal_set(&self) -> TerminalSet {
        TerminalSet::from_nodes(
            self.commodities
                .iter()
                .flat_map(|c| [c.source, c.sink]),
        )
    }

    /// Edge ids incident to each node, in increasing id order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            if e.u < self.node_count && e.v < self.node_count {
                inc[e.u].push(e.id);
                if e.v != e.u {
                    inc[e.v].push(e.id);
                }
            }
        }
        inc
    }

    pub fn total_demand(&self) -> u64 {
        self.commodities.iter().map(|c| c.demand).sum()
    }

    /// Breadth-first reachability from node 0.
    pub fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return true;
        }
        let inc = self.incidence();
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = queue.pop_front() {
            for &eid in &inc[x] {
                let y = self.edges[eid].other(x);
                if !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        reached == self.node_count
    }

    /// Every violated invariant; empty iff the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.node_count;
        if n == 0 {
            out.push(Violation::NoNodes);
        }
        let mut pairs: Vec<((usize, usize), usize)> = Vec::with_capacity(self.edges.len());
        let mut structurally_sound = true;
        for (pos, e) in self.edges.iter().enumerate() {
            if e.id != pos {
                out.push(Violation::EdgeIdMismatch { position: pos, id: e.id });
                structurally_sound = false;
            }
            if e.u >= n || e.v >= n {
                out.push(Violation::EdgeEndpointOutOfRange { edge: e.id });
                structurally_sound = false;
            } else if e.u == e.v {
                out.push(Violation::SelfLoop { edge: e.id });
            } else {
                pairs.push(((e.u.min(e.v), e.u.max(e.v)), e.id));
            }
            if e.facilities.is_empty() {
                out.push(Violation::EmptyFacilityMenu { edge: e.id });
            }
            for (i, f) in e.facilities.iter().enumerate() {
                if f.capacity == 0 || f.cost == 0 {
                    out.push(Violation::NonPositiveFacility { edge: e.id, index: i });
                }
            }
            let increasing = e
                .facilities
                .windows(2)
                .all(|w| w[0].capacity < w[1].capacity && w[0].cost < w[1].cost);
            if !increasing {
                out.push(Violation::NotStepIncreasing { edge: e.id });
            }
        }
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                out.push(Violation::DuplicateEdge { edge: w[1].1, first: w[0].1 });
            }
        }
        for (pos, c) in self.commodities.iter().enumerate() {
            if c.id != pos {
                out.push(Violation::CommodityIdMismatch { position: pos, id: c.id });
            }
            if c.source >= n || c.sink >= n {
                out.push(Violation::CommodityEndpointOutOfRange { commodity: c.id });
            } else if c.source == c.sink {
                out.push(Violation::SourceIsSink { commodity: c.id });
            }
            if c.demand == 0 {
                out.push(Violation::NonPositiveDemand { commodity: c.id });
            }
        }
        if structurally_sound && n > 0 && !self.is_connected() {
            out.push(Violation::Disconnected);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::tri3;
    use alloc::string::ToString;

    #[test]
    fn tri3_is_valid() {
        assert!(tri3().validate().is_empty());
    }

    #[test]
    fn removing_an_edge_of_tri3_keeps_it_connected() {
        let mut inst = tri3();
        inst.edges.remove(1);
        inst.edges[1].id = 1;
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn isolated_node_is_reported() {
        let mut inst = tri3();
        inst.node_count = 4;
        let v = inst.validate();
        assert_eq!(v, [Violation::Disconnected]);
        assert_eq!(v[0].to_string(), "graph disconnected");
    }

    #[test]
    fn decreasing_menu_is_reported_with_edge_id() {
        let mut inst = tri3();
        inst.edges[1].facilities = vec![FacilityOption::new(10, 18), FacilityOption::new(5, 10)];
        let v = inst.validate();
        assert_eq!(v, [Violation::NotStepIncreasing { edge: 1 }]);
        assert_eq!(v[0].to_string(), "facilities not step-increasing at edge 1");
    }

    #[test]
    fn capacity_up_cost_down_is_not_step_increasing() {
        let mut inst = tri3();
        inst.edges[0].facilities = vec![FacilityOption::new(5, 18), FacilityOption::new(10, 10)];
        assert_eq!(inst.validate(), [Violation::NotStepIncreasing { edge: 0 }]);
    }

    #[test]
    fn duplicate_and_self_loop_edges() {
        let mut inst = tri3();
        inst.edges.push(Edge { id: 3, u: 2, v: 1, facilities: vec![FacilityOption::new(1, 1)] });
        inst.edges.push(Edge { id: 4, u: 2, v: 2, facilities: vec![FacilityOption::new(1, 1)] });
        let v = inst.validate();
        assert!(v.contains(&Violation::DuplicateEdge { edge: 3, first: 1 }));
        assert!(v.contains(&Violation::SelfLoop { edge: 4 }));
    }

    #[test]
    fn bad_commodities() {
        let mut inst = tri3();
        inst.commodities.push(Commodity { id: 1, source: 1, sink: 1, demand: 3 });
        inst.commodities.push(Commodity { id: 2, source: 0, sink: 9, demand: 0 });
        let v = inst.validate();
        assert!(v.contains(&Violation::SourceIsSink { commodity: 1 }));
        assert!(v.contains(&Violation::CommodityEndpointOutOfRange { commodity: 2 }));
        assert!(v.contains(&Violation::NonPositiveDemand { commodity: 2 }));
    }

    #[test]
    fn terminal_sets() {
        assert_eq!(tri3().terminal_set().nodes(), &[0, 2]);

        let mut empty = tri3();
        empty.commodities.clear();
        assert!(empty.terminal_set().is_empty());

        let mut two = tri3();
        two.commodities = vec![
            Commodity { id: 0, source: 0, sink: 1, demand: 1 },
            Commodity { id: 1, source: 1, sink: 2, demand: 1 },
        ];
        assert_eq!(two.terminal_set().nodes(), &[0, 1, 2]);
    }
}
