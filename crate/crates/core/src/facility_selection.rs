//! The facility-selection subproblem: pick at most one facility per edge to
//! minimize total reduced cost, with every commodity endpoint touched by at
//! least one installed edge.
//!
//! Without the cover cuts the problem separates by edge and is solved by
//! inspection. With them it is solved in two phases:
//!
//! 1. every edge whose best reduced cost is negative is installed at its
//!    argmin facility (any optimum can be assumed to contain these);
//! 2. the terminals still uncovered are covered by a minimum-cost set of the
//!    remaining edges, all of which have nonnegative best reduced cost.
//!
//! Phase 2 is a best-first search over the set of covered terminals. The
//! search heuristic charges each uncovered terminal its cheapest share of an
//! incident edge (half the cost when the edge would also cover another
//! uncovered terminal); no edge covers more than two terminals, so the
//! charge never overestimates and the search returns a proven optimum. If
//! the expansion budget runs out, the root bound is returned instead and the
//! result is flagged inexact; that value still bounds the optimum from below.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::instance::{Instance, TerminalSet};

pub const DEFAULT_EXPANSION_BUDGET: usize = 1_000_000;

/// `costs[e][l] = cost(e, l) - w[e] * capacity(e, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCostTable {
    costs: Vec<Vec<f64>>,
}

impl ReducedCostTable {
    pub fn edge(&self, e: usize) -> &[f64] {
        &self.costs[e]
    }

    pub fn edge_count(&self) -> usize {
        self.costs.len()
    }

    /// Smallest reduced cost on edge `e` and its first argmin.
    pub fn best(&self, e: usize) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (l, &c) in self.costs[e].iter().enumerate() {
            if c < best.0 {
                best = (c, l);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthMismatch {
    pub expected: usize,
    pub found: usize,
}

impl fmt::Display for LengthMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expected {} multipliers, found {}", self.expected, self.found)
    }
}

impl core::error::Error for LengthMismatch {}

pub fn reduced_facility_costs(
    inst: &Instance,
    multipliers: &[f64],
) -> Result<ReducedCostTable, LengthMismatch> {
    if multipliers.len() != inst.edge_count() {
        return Err(LengthMismatch { expected: inst.edge_count(), found: multipliers.len() });
    }
    let costs = inst
        .edges
        .iter()
        .map(|e| {
            let w = multipliers[e.id];
            e.facilities
                .iter()
                .map(|f| f.cost as f64 - w * f.capacity as f64)
                .collect()
        })
        .collect();
    Ok(ReducedCostTable { costs })
}

/// Installed facility index per edge, `None` when the edge stays empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FacilitySelection {
    pub choice: Vec<Option<usize>>,
}

impl FacilitySelection {
    pub fn none(m: usize) -> Self {
        Self { choice: vec![None; m] }
    }

    pub fn installed_capacity(&self, inst: &Instance, e: usize) -> u64 {
        self.choice[e].map_or(0, |l| inst.edges[e].facilities[l].capacity)
    }

    pub fn total_reduced_cost(&self, costs: &ReducedCostTable) -> f64 {
        self.choice
            .iter()
            .enumerate()
            .filter_map(|(e, l)| l.map(|l| costs.edge(e)[l]))
            .sum()
    }

    pub fn covers(&self, inst: &Instance, node: usize) -> bool {
        inst.edges
            .iter()
            .any(|e| self.choice[e.id].is_some() && e.touches(node))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApYSolution {
    pub theta_y: f64,
    pub selection: FacilitySelection,
    /// True when `theta_y` is the proven optimum.
    pub exact: bool,
    pub expansions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionError {
    IsolatedTerminal { node: usize },
    Length(LengthMismatch),
}

impl fmt::Display for SelectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionError::IsolatedTerminal { node } => {
                write!(f, "terminal node {node} has no incident edge")
            }
            SelectionError::Length(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for SelectionError {}

pub fn solve_ap_y(
    inst: &Instance,
    costs: &ReducedCostTable,
    terminals: &TerminalSet,
) -> Result<ApYSolution, SelectionError> {
    solve_ap_y_with_budget(inst, costs, terminals, DEFAULT_EXPANSION_BUDGET)
}

pub fn solve_ap_y_with_budget(
    inst: &Instance,
    costs: &ReducedCostTable,
    terminals: &TerminalSet,
    budget: usize,
) -> Result<ApYSolution, SelectionError> {
    let m = inst.edge_count();
    if costs.edge_count() != m {
        return Err(SelectionError::Length(LengthMismatch {
            expected: m,
            found: costs.edge_count(),
        }));
    }
    let best: Vec<(f64, usize)> = (0..m).map(|e| costs.best(e)).collect();

    // Phase 1: inspection.
    let mut selection = FacilitySelection::none(m);
    let mut theta_y = 0.0;
    let mut covered = vec![false; inst.node_count];
    for e in &inst.edges {
        let (c, l) = best[e.id];
        if c < 0.0 {
            selection.choice[e.id] = Some(l);
            theta_y += c;
            covered[e.u] = true;
            covered[e.v] = true;
        }
    }

    let open: Vec<usize> = terminals
        .nodes()
        .iter()
        .copied()
        .filter(|&v| !covered[v])
        .collect();
    if open.is_empty() {
        return Ok(ApYSolution { theta_y, selection, exact: true, expansions: 0 });
    }

    // Phase 2: cover the open terminals.
    let cover = CoverProblem::new(inst, &best, &open)?;
    match cover.search(budget) {
        Search::Optimal { cost, edges, expansions } => {
            for e in edges {
                selection.choice[e] = Some(best[e].1);
            }
            Ok(ApYSolution { theta_y: theta_y + cost, selection, exact: true, expansions })
        }
        Search::BudgetExhausted { root_bound, expansions } => {
            for e in cover.greedy() {
                selection.choice[e] = Some(best[e].1);
            }
            Ok(ApYSolution {
                theta_y: theta_y + root_bound,
                selection,
                exact: false,
                expansions,
            })
        }
    }
}

type Bits = Vec<u64>;

fn bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

#[derive(Debug, Clone, Copy)]
struct Link {
    to: usize,
    cost: f64,
    edge: usize,
}

/// Weighted edge cover restricted to the open terminals. Terminals are
/// re-indexed `0..k`.
struct CoverProblem {
    k: usize,
    /// Cheapest edge leaving the open set, per terminal.
    outside: Vec<Option<(f64, usize)>>,
    /// Edges to other open terminals, per terminal.
    links: Vec<Vec<Link>>,
}

enum Search {
    Optimal { cost: f64, edges: Vec<usize>, expansions: usize },
    BudgetExhausted { root_bound: f64, expansions: usize },
}

#[derive(Debug, Clone, Copy)]
struct Move {
    cost: f64,
    edge: usize,
    partner: Option<usize>,
}

struct Frontier {
    priority: f64,
    g: f64,
    node: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Frontier {}
impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Frontier {
    // min-heap on priority, then deeper (larger g) first, then insertion order
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .priority
            .total_cmp(&self.priority)
            .then(self.g.total_cmp(&other.g))
            .then(other.node.cmp(&self.node))
    }
}

struct SearchNode {
    covered: Bits,
    parent: usize,
    edge: usize,
}

impl CoverProblem {
    fn new(inst: &Instance, best: &[(f64, usize)], open: &[usize]) -> Result<Self, SelectionError> {
        let k = open.len();
        let mut index = vec![usize::MAX; inst.node_count];
        for (i, &v) in open.iter().enumerate() {
            index[v] = i;
        }
        let mut outside: Vec<Option<(f64, usize)>> = vec![None; k];
        let mut links = vec![Vec::new(); k];
        for e in &inst.edges {
            let c = best[e.id].0;
            let (iu, iv) = (index[e.u], index[e.v]);
            match (iu != usize::MAX, iv != usize::MAX) {
                (true, true) => {
                    links[iu].push(Link { to: iv, cost: c, edge: e.id });
                    links[iv].push(Link { to: iu, cost: c, edge: e.id });
                }
                (true, false) | (false, true) => {
                    let i = if iu != usize::MAX { iu } else { iv };
                    if outside[i].is_none_or(|(oc, _)| c < oc) {
                        outside[i] = Some((c, e.id));
                    }
                }
                (false, false) => {}
            }
        }
        for i in 0..k {
            if outside[i].is_none() && links[i].is_empty() {
                return Err(SelectionError::IsolatedTerminal { node: open[i] });
            }
        }
        Ok(Self { k, outside, links })
    }

    fn words(&self) -> usize {
        self.k.div_ceil(64)
    }

    fn is_full(&self, covered: &[u64]) -> bool {
        (0..self.k).all(|i| bit(covered, i))
    }

    /// Cheapest per-terminal share of a covering edge.
    fn share(&self, i: usize, covered: &[u64]) -> f64 {
        let mut s = self.outside[i].map_or(f64::INFINITY, |(c, _)| c);
        for l in &self.links[i] {
            let part = if bit(covered, l.to) { l.cost } else { 0.5 * l.cost };
            if part < s {
                s = part;
            }
        }
        s
    }

    fn heuristic(&self, covered: &[u64]) -> f64 {
        (0..self.k)
            .filter(|&i| !bit(covered, i))
            .map(|i| self.share(i, covered))
            .sum()
    }

    /// Moves that cover terminal `i`: the cheapest single-cover edge, plus
    /// one move per uncovered open neighbour.
    fn moves(&self, i: usize, covered: &[u64], out: &mut Vec<Move>) {
        out.clear();
        let mut single = self.outside[i].map(|(cost, edge)| Move { cost, edge, partner: None });
        for l in &self.links[i] {
            if bit(covered, l.to) {
                let better = match single {
                    None => true,
                    Some(s) => l.cost < s.cost || (l.cost == s.cost && l.edge < s.edge),
                };
                if better {
                    single = Some(Move { cost: l.cost, edge: l.edge, partner: None });
                }
            } else {
                out.push(Move { cost: l.cost, edge: l.edge, partner: Some(l.to) });
            }
        }
        if let Some(s) = single {
            out.push(s);
        }
    }

    fn search(&self, budget: usize) -> Search {
        let root: Bits = vec![0; self.words()];
        let root_bound = self.heuristic(&root);
        let mut nodes = vec![SearchNode { covered: root.clone(), parent: usize::MAX, edge: 0 }];
        let mut best_g: BTreeMap<Bits, f64> = BTreeMap::new();
        best_g.insert(root, 0.0);
        let mut heap = BinaryHeap::new();
        heap.push(Frontier { priority: root_bound, g: 0.0, node: 0 });

        let mut expansions = 0;
        let mut moves = Vec::new();
        let mut scratch = Vec::new();
        while let Some(Frontier { g, node, .. }) = heap.pop() {
            let covered = nodes[node].covered.clone();
            if best_g.get(&covered).is_some_and(|&b| g > b) {
                continue;
            }
            if self.is_full(&covered) {
                let mut edges = Vec::new();
                let mut cur = node;
                while nodes[cur].parent != usize::MAX {
                    edges.push(nodes[cur].edge);
                    cur = nodes[cur].parent;
                }
                edges.reverse();
                return Search::Optimal { cost: g, edges, expansions };
            }
            if expansions >= budget {
                return Search::BudgetExhausted { root_bound, expansions };
            }
            expansions += 1;

            // branch on the uncovered terminal with the fewest options
            let mut branch = usize::MAX;
            for i in (0..self.k).filter(|&i| !bit(&covered, i)) {
                self.moves(i, &covered, &mut scratch);
                if branch == usize::MAX || scratch.len() < moves.len() {
                    branch = i;
                    core::mem::swap(&mut moves, &mut scratch);
                }
            }
            for mv in &moves {
                let mut child = covered.clone();
                set_bit(&mut child, branch);
                if let Some(p) = mv.partner {
                    set_bit(&mut child, p);
                }
                let child_g = g + mv.cost;
                if best_g.get(&child).is_some_and(|&b| child_g >= b) {
                    continue;
                }
                let h = self.heuristic(&child);
                best_g.insert(child.clone(), child_g);
                nodes.push(SearchNode { covered: child, parent: node, edge: mv.edge });
                heap.push(Frontier { priority: child_g + h, g: child_g, node: nodes.len() - 1 });
            }
        }
        unreachable!("every open terminal has at least one covering move")
    }

    /// A feasible cover, used when the exact search gives up.
    fn greedy(&self) -> Vec<usize> {
        let mut covered: Bits = vec![0; self.words()];
        let mut edges = Vec::new();
        let mut moves = Vec::new();
        for i in 0..self.k {
            if bit(&covered, i) {
                continue;
            }
            self.moves(i, &covered, &mut moves);
            let mv = moves
                .iter()
                .min_by(|a, b| {
                    let ra = if a.partner.is_some() { a.cost / 2.0 } else { a.cost };
                    let rb = if b.partner.is_some() { b.cost / 2.0 } else { b.cost };
                    ra.total_cmp(&rb)
                })
                .copied()
                .expect("terminal has a covering move");
            set_bit(&mut covered, i);
            if let Some(p) = mv.partner {
                set_bit(&mut covered, p);
            }
            edges.push(mv.edge);
        }
        edges
    }
}
