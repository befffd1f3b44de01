//! Evaluation of the Lagrangian dual function and its subgradient.
//!
//! Dualizing the edge capacity constraints with multipliers `w >= 0` splits
//! the problem in two: facility selection at reduced costs `f - w u`, and
//! routing where a path costs the sum of `w` over its edges. Routing has no
//! capacities left, so each commodity sends its whole demand along one
//! shortest path.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::facility_selection::{
    reduced_facility_costs, solve_ap_y_with_budget, FacilitySelection, LengthMismatch,
    SelectionError, DEFAULT_EXPANSION_BUDGET,
};
use crate::instance::Instance;
use crate::shortest_paths::{all_pairs_shortest_paths, ShortestPathTable};

/// Nonnegative Lagrangian multipliers, one per edge.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiplierVector(Vec<f64>);

impl MultiplierVector {
    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    /// Fails on negative or non-finite components.
    pub fn new(values: Vec<f64>) -> Result<Self, NegativeMultiplier> {
        match values.iter().position(|w| !(*w >= 0.0 && w.is_finite())) {
            Some(edge) => Err(NegativeMultiplier { edge }),
            None => Ok(Self(values)),
        }
    }

    /// Projected step: `max(0, w + step * d)` component-wise.
    pub fn stepped(&self, step: f64, direction: &[f64]) -> Self {
        debug_assert!(step >= 0.0);
        Self(
            self.0
                .iter()
                .zip(direction)
                .map(|(w, d)| (w + step * d).max(0.0))
                .collect(),
        )
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for MultiplierVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NegativeMultiplier {
    pub edge: usize,
}

impl fmt::Display for NegativeMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "multiplier of edge {} is negative or not finite", self.edge)
    }
}

impl core::error::Error for NegativeMultiplier {}

#[derive(Debug, Clone, PartialEq)]
pub struct DualEvaluation {
    pub theta: f64,
    pub theta_y: f64,
    pub theta_z: f64,
    pub selection: FacilitySelection,
    /// Edge ids of the path carrying each commodity.
    pub routing: Vec<Vec<usize>>,
    pub subgradient: Vec<f64>,
    /// False when facility selection fell back to its lower bound.
    pub exact_y: bool,
}

pub fn solve_ap_z(inst: &Instance, sp: &ShortestPathTable) -> (f64, Vec<Vec<usize>>) {
    let mut theta_z = 0.0;
    let routing = inst
        .commodities
        .iter()
        .map(|c| {
            theta_z += c.demand as f64 * sp.dist(c.source, c.sink);
            sp.path(c.source, c.sink)
        })
        .collect();
    (theta_z, routing)
}

/// Routed flow minus installed capacity, per edge.
pub fn compute_subgradient(
    inst: &Instance,
    routing: &[Vec<usize>],
    selection: &FacilitySelection,
) -> Vec<f64> {
    let mut g = vec![0.0; inst.edge_count()];
    for (c, path) in inst.commodities.iter().zip(routing) {
        for &e in path {
            g[e] += c.demand as f64;
        }
    }
    for (e, ge) in g.iter_mut().enumerate() {
        *ge -= selection.installed_capacity(inst, e) as f64;
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualError {
    Length(LengthMismatch),
    Selection(SelectionError),
}

impl fmt::Display for DualError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualError::Length(e) => e.fmt(f),
            DualError::Selection(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for DualError {}

impl From<LengthMismatch> for DualError {
    fn from(e: LengthMismatch) -> Self {
        DualError::Length(e)
    }
}

impl From<SelectionError> for DualError {
    fn from(e: SelectionError) -> Self {
        DualError::Selection(e)
    }
}

pub fn evaluate_dual(inst: &Instance, w: &MultiplierVector) -> Result<DualEvaluation, DualError> {
    evaluate_dual_with_budget(inst, w, DEFAULT_EXPANSION_BUDGET)
}

pub fn evaluate_dual_with_budget(
    inst: &Instance,
    w: &MultiplierVector,
    budget: usize,
) -> Result<DualEvaluation, DualError> {
    let costs = reduced_facility_costs(inst, w)?;
    let y = solve_ap_y_with_budget(inst, &costs, &inst.terminal_set(), budget)?;
    let sp = all_pairs_shortest_paths(inst, w);
    let (theta_z, routing) = solve_ap_z(inst, &sp);
    let subgradient = compute_subgradient(inst, &routing, &y.selection);
    Ok(DualEvaluation {
        theta: y.theta_y + theta_z,
        theta_y: y.theta_y,
        theta_z,
        selection: y.selection,
        routing,
        subgradient,
        exact_y: y.exact,
    })
}
