//! Deflected subgradient ascent on the Lagrangian dual.
//!
//! Starting from `w = 0`, each iteration evaluates the dual, builds a search
//! direction from the subgradient (and, depending on the variant, the
//! previous direction or subgradient), takes a step of length
//! `beta (UB - theta) / |d|^2` and projects back onto `w >= 0`. The run stops
//! when the subgradient vanishes, when the best bound meets the upper bound,
//! after `max_stall` iterations without improvement, or at a hard cap.

pub mod direction;
pub mod step;
pub mod upper_bound;

use alloc::vec::Vec;
use core::fmt;

pub use direction::{deflection_sigma, direction, DirectionRule, History, Variant};
pub use step::{step_length, Rule, StepRule};
pub use upper_bound::{compute_upper_bound, Infeasible, UpperBound};

use crate::dual::{evaluate_dual_with_budget, DualError, MultiplierVector};
use crate::facility_selection::DEFAULT_EXPANSION_BUDGET;
use crate::instance::Instance;
use crate::vecops::{norm, norm_sq};

pub fn initial_multipliers(m: usize) -> MultiplierVector {
    MultiplierVector::zeros(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub direction: DirectionRule,
    pub rule: Rule,
    /// Consecutive non-improving iterations before stopping.
    pub max_stall: usize,
    pub eps_grad: f64,
    pub eps_dir: f64,
    pub beta_floor: f64,
    pub max_iterations: usize,
    /// Overrides the heuristic upper bound.
    pub upper_bound: Option<f64>,
    /// Keep subgradients and directions in the trajectory.
    pub record_vectors: bool,
    pub ap_y_budget: usize,
    /// What the dual value must beat for R1 to keep `beta`.
    pub r1_reference: R1Reference,
    /// Relative margin a dual value must clear to count as an improvement.
    pub improvement_tol: f64,
}

/// Reference value for the R1 halving test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum R1Reference {
    /// The previous iterate's dual value.
    #[default]
    Previous,
    /// The best dual value so far.
    Best,
}

impl SolverConfig {
    pub fn new(variant: Variant, rule: Rule) -> Self {
        Self {
            direction: DirectionRule::new(variant),
            rule,
            max_stall: 100,
            eps_grad: 1e-6,
            eps_dir: 1e-6,
            beta_floor: 1e-8,
            max_iterations: 100_000,
            upper_bound: None,
            record_vectors: false,
            ap_y_budget: DEFAULT_EXPANSION_BUDGET,
            r1_reference: R1Reference::Previous,
            improvement_tol: 1e-6,
        }
    }

    fn check(&self) -> Result<(), SolverError> {
        let positive = [self.eps_grad, self.eps_dir, self.beta_floor, self.improvement_tol]
            .iter()
            .all(|t| *t > 0.0);
        if !self.direction.is_valid()
            || !positive
            || self.max_stall == 0
            || self.max_iterations == 0
            || self.upper_bound.is_some_and(|u| !u.is_finite())
        {
            return Err(SolverError::InvalidConfig);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    ZeroGradient,
    Stall,
    IterationCap,
    GapClosed,
}

impl StopReason {
    pub fn tag(self) -> &'static str {
        match self {
            StopReason::ZeroGradient => "zero_gradient",
            StopReason::Stall => "stall",
            StopReason::IterationCap => "iteration_cap",
            StopReason::GapClosed => "gap_closed",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub q: usize,
    pub theta: f64,
    pub best_theta: f64,
    pub beta: f64,
    /// Zero on the final, stopping iteration.
    pub lambda: f64,
    pub grad_norm: f64,
    pub dir_norm: f64,
    pub exact_y: bool,
    pub subgradient: Option<Vec<f64>>,
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub best_theta: f64,
    pub best_multipliers: MultiplierVector,
    pub upper_bound: f64,
    pub ub_feasible: bool,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub trajectory: Vec<IterationRecord>,
    pub wall_time_s: f64,
    pub all_y_exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    InvalidConfig,
    Infeasible(Infeasible),
    Dual(DualError),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::InvalidConfig => f.write_str("invalid solver configuration"),
            SolverError::Infeasible(e) => write!(f, "infeasible instance: {e}"),
            SolverError::Dual(e) => write!(f, "dual evaluation failed: {e}"),
        }
    }
}

impl core::error::Error for SolverError {}

impl From<DualError> for SolverError {
    fn from(e: DualError) -> Self {
        SolverError::Dual(e)
    }
}

impl From<Infeasible> for SolverError {
    fn from(e: Infeasible) -> Self {
        SolverError::Infeasible(e)
    }
}

/// Seconds from an arbitrary origin. Only read before and after the loop.
pub trait Clock {
    fn now(&self) -> f64;
}

struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

fn improves(theta: f64, reference: f64, tol: f64) -> bool {
    theta > reference + tol * (1.0 + reference.abs())
}

/// Runs the ascent without timing; `wall_time_s` is 0.
pub fn run(inst: &Instance, config: &SolverConfig) -> Result<SolverReport, SolverError> {
    run_timed(inst, config, &NoClock)
}

pub fn run_timed(
    inst: &Instance,
    config: &SolverConfig,
    clock: &dyn Clock,
) -> Result<SolverReport, SolverError> {
    config.check()?;
    let start = clock.now();
    let (upper_bound, ub_feasible) = match config.upper_bound {
        Some(ub) => (ub, false),
        None => {
            let ub = compute_upper_bound(inst)?;
            (ub.value, ub.feasible)
        }
    };

    let m = inst.edge_count();
    let mut w = initial_multipliers(m);
    let mut step = StepRule::new(config.rule, inst.node_count, m);
    let mut best_theta = f64::NEG_INFINITY;
    let mut best_multipliers = w.clone();
    let mut stall = 0usize;
    let mut all_y_exact = true;
    let mut trajectory = Vec::new();
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut previous_theta = f64::NEG_INFINITY;
    let mut q = 0usize;

    let stop_reason = loop {
        if q >= config.max_iterations {
            break StopReason::IterationCap;
        }
        let ev = evaluate_dual_with_budget(inst, &w, config.ap_y_budget)?;
        all_y_exact &= ev.exact_y;
        let improved = q == 0 || improves(ev.theta, best_theta, config.improvement_tol);
        let increased = match config.r1_reference {
            R1Reference::Previous => q == 0 || improves(ev.theta, previous_theta, config.improvement_tol),
            R1Reference::Best => improved,
        };
        previous_theta = ev.theta;
        if ev.theta > best_theta {
            best_theta = ev.theta;
            best_multipliers = w.clone();
        }
        stall = if improved { 0 } else { stall + 1 };
        let beta = step.update(increased, q, config.beta_floor);
        let g = ev.subgradient;
        let grad_norm = norm(&g);

        let mut record = IterationRecord {
            q,
            theta: ev.theta,
            best_theta,
            beta,
            lambda: 0.0,
            grad_norm,
            dir_norm: 0.0,
            exact_y: ev.exact_y,
            subgradient: config.record_vectors.then(|| g.clone()),
            direction: None,
        };

        let stop = if grad_norm < config.eps_grad {
            Some(StopReason::ZeroGradient)
        } else if upper_bound - best_theta < 1e-9 * (1.0 + upper_bound.abs()) {
            Some(StopReason::GapClosed)
        } else if stall >= config.max_stall {
            Some(StopReason::Stall)
        } else {
            None
        };
        if let Some(reason) = stop {
            trajectory.push(record);
            q += 1;
            break reason;
        }

        let history = previous
            .as_ref()
            .map(|(g_prev, d_prev)| History { g_prev, d_prev });
        let d = direction(&config.direction, &g, history, config.eps_dir);
        let d_sq = norm_sq(&d);
        // d is either g or a vector at least eps_dir long
        let lambda = step_length(beta, upper_bound, ev.theta, d_sq).unwrap_or(0.0);
        record.lambda = lambda;
        record.dir_norm = libm::sqrt(d_sq);
        if config.record_vectors {
            record.direction = Some(d.clone());
        }
        trajectory.push(record);
        w = w.stepped(lambda, &d);
        previous = Some((g, d));
        q += 1;
    };

    Ok(SolverReport {
        best_theta,
        best_multipliers,
        upper_bound,
        ub_feasible,
        iterations: q,
        stop_reason,
        trajectory,
        wall_time_s: clock.now() - start,
        all_y_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::tri3;

    #[test]
    fn zero_start() {
        assert_eq!(&*initial_multipliers(3), &[0.0; 3]);
        assert!(initial_multipliers(0).is_empty());
    }

    #[test]
    fn empty_problem_stops_immediately() {
        let mut inst = tri3();
        inst.commodities.clear();
        let r = run(&inst, &SolverConfig::new(Variant::Sg1, Rule::R1)).unwrap();
        assert_eq!(r.stop_reason, StopReason::ZeroGradient);
        assert_eq!(r.best_theta, 0.0);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.trajectory[0].q, 0);
    }

    #[test]
    fn tri3_bound_is_sandwiched_for_every_pair() {
        let inst = tri3();
        for v in Variant::ALL {
            for rule in Rule::ALL {
                let r = run(&inst, &SolverConfig::new(v, rule)).unwrap();
                assert!(r.best_theta >= 10.0 && r.best_theta <= 18.0 + 1e-6, "{v} {rule}: {}", r.best_theta);
                assert!(r.iterations < 100_000);
                assert!(r.all_y_exact);
            }
        }
    }

    #[test]
    fn tri3_sg1_r1_terminates_cleanly() {
        let r = run(&tri3(), &SolverConfig::new(Variant::Sg1, Rule::R1)).unwrap();
        assert!(matches!(
            r.stop_reason,
            StopReason::Stall | StopReason::GapClosed | StopReason::ZeroGradient
        ));
    }

    #[test]
    fn trajectory_best_is_running_max() {
        let r = run(&tri3(), &SolverConfig::new(Variant::Sg3, Rule::R5)).unwrap();
        let mut best = f64::NEG_INFINITY;
        for rec in &r.trajectory {
            best = best.max(rec.theta);
            assert_eq!(rec.best_theta, best);
        }
        assert_eq!(r.best_theta, best);
    }

    #[test]
    fn iteration_cap_is_honoured() {
        let mut cfg = SolverConfig::new(Variant::Sg1, Rule::R4);
        cfg.max_iterations = 3;
        cfg.upper_bound = Some(1e6);
        let r = run(&tri3(), &cfg).unwrap();
        assert_eq!(r.stop_reason, StopReason::IterationCap);
        assert_eq!(r.iterations, 3);
    }

    #[test]
    fn upper_bound_below_start_closes_the_gap() {
        let mut cfg = SolverConfig::new(Variant::Sg1, Rule::R1);
        cfg.upper_bound = Some(5.0);
        let r = run(&tri3(), &cfg).unwrap();
        assert_eq!(r.stop_reason, StopReason::GapClosed);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn r1_halves_only_on_a_drop_from_the_previous_value() {
        let inst = crate::generator::generate_random(&crate::generator::GeneratorParams::new(10, 15, 1)).unwrap();
        let r = run(&inst, &SolverConfig::new(Variant::Sg1, Rule::R1)).unwrap();
        for pair in r.trajectory.windows(2) {
            let halved = pair[1].beta < pair[0].beta;
            let rose = pair[1].theta > pair[0].theta + 1e-6 * (1.0 + pair[0].theta.abs());
            assert_eq!(halved, !rose && pair[0].beta > 1e-8, "q={}", pair[1].q);
        }
        let mut cfg = SolverConfig::new(Variant::Sg1, Rule::R1);
        cfg.r1_reference = R1Reference::Best;
        let r = run(&inst, &cfg).unwrap();
        for pair in r.trajectory.windows(2) {
            let halved = pair[1].beta < pair[0].beta;
            let rose = pair[1].theta > pair[0].best_theta + 1e-6 * (1.0 + pair[0].best_theta.abs());
            assert_eq!(halved, !rose && pair[0].beta > 1e-8, "q={}", pair[1].q);
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg = SolverConfig::new(Variant::Sg6, Rule::R1);
        cfg.direction.alpha = 0.0;
        assert_eq!(run(&tri3(), &cfg), Err(SolverError::InvalidConfig));
        let mut cfg = SolverConfig::new(Variant::Sg6, Rule::R1);
        cfg.eps_grad = 0.0;
        assert_eq!(run(&tri3(), &cfg), Err(SolverError::InvalidConfig));
    }
}
