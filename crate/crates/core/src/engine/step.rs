//! Step lengths `lambda = beta (UB - theta) / |d|^2` and the schedules for
//! `beta`.

use core::fmt;
use core::str::FromStr;

use super::direction::UnknownTag;

pub const INITIAL_BETA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Halve whenever the dual value fails to improve.
    R1,
    /// Halve every `2n` iterations.
    R2,
    /// Halve every `2m` iterations.
    R3,
    /// Constant 0.01.
    R4,
    /// Constant 0.1.
    R5,
    /// Constant 1.99.
    R6,
}

impl Rule {
    pub const ALL: [Rule; 6] = [Rule::R1, Rule::R2, Rule::R3, Rule::R4, Rule::R5, Rule::R6];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::R1 => "r1",
            Rule::R2 => "r2",
            Rule::R3 => "r3",
            Rule::R4 => "r4",
            Rule::R5 => "r5",
            Rule::R6 => "r6",
        }
    }

    fn constant(self) -> Option<f64> {
        match self {
            Rule::R4 => Some(0.01),
            Rule::R5 => Some(0.1),
            Rule::R6 => Some(1.99),
            _ => None,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Rule {
    type Err = UnknownTag;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.tag().eq_ignore_ascii_case(s))
            .ok_or(UnknownTag)
    }
}

/// A step rule together with its running `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRule {
    pub rule: Rule,
    pub beta: f64,
    /// Halving period for R2/R3, 0 otherwise.
    pub period: usize,
}

impl StepRule {
    pub fn new(rule: Rule, node_count: usize, edge_count: usize) -> Self {
        let period = match rule {
            Rule::R2 => 2 * node_count,
            Rule::R3 => 2 * edge_count,
            _ => 0,
        };
        Self { rule, beta: rule.constant().unwrap_or(INITIAL_BETA), period }
    }

    /// Advances `beta` to iteration `q` and returns it.
    pub fn update(&mut self, improved: bool, q: usize, floor: f64) -> f64 {
        self.beta = match self.rule {
            Rule::R1 if !improved => (self.beta / 2.0).max(floor),
            Rule::R1 => self.beta,
            Rule::R2 | Rule::R3 => {
                if q > 0 && self.period > 0 && q.is_multiple_of(self.period) {
                    (self.beta / 2.0).max(floor)
                } else {
                    self.beta
                }
            }
            r => r.constant().unwrap_or(self.beta),
        };
        self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroDirection;

impl fmt::Display for ZeroDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("step along a zero direction")
    }
}

pub fn step_length(
    beta: f64,
    upper_bound: f64,
    theta: f64,
    direction_norm_sq: f64,
) -> Result<f64, ZeroDirection> {
    if direction_norm_sq == 0.0 {
        return Err(ZeroDirection);
    }
    Ok(beta * (upper_bound - theta) / direction_norm_sq)
}
