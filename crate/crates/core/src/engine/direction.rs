//! Search directions: plain subgradient, four deflection rules of the form
//! `d = g + sigma * d_prev`, and a convex combination of the last two
//! subgradients.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::vecops::{dot, norm, norm_sq};

pub const DEFAULT_ALPHA: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    /// Pure subgradient, `sigma = 0`.
    Sg1,
    /// `sigma = -1.5 g.d / |d|^2` when `g.d < 0`.
    Sg2,
    /// `sigma = |g| / |d|` when `g.d < 0` (modified Camerini-Fratta-Maffioli).
    Sg3,
    /// Constant `sigma = 0.8`.
    Sg4,
    /// `sigma = |g| / |d|` always (average direction).
    Sg5,
    /// `d = alpha g + (1 - alpha) g_prev`.
    Sg6,
}

impl Variant {
    pub const ALL: [Variant; 6] =
        [Variant::Sg1, Variant::Sg2, Variant::Sg3, Variant::Sg4, Variant::Sg5, Variant::Sg6];

    pub fn tag(self) -> &'static str {
        match self {
            Variant::Sg1 => "sg1",
            Variant::Sg2 => "sg2",
            Variant::Sg3 => "sg3",
            Variant::Sg4 => "sg4",
            Variant::Sg5 => "sg5",
            Variant::Sg6 => "sg6",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownTag;

impl fmt::Display for UnknownTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown tag")
    }
}

impl core::error::Error for UnknownTag {}

impl FromStr for Variant {
    type Err = UnknownTag;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.tag().eq_ignore_ascii_case(s))
            .ok_or(UnknownTag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionRule {
    pub variant: Variant,
    /// Weight of the current subgradient, SG6 only.
    pub alpha: f64,
}

impl DirectionRule {
    pub fn new(variant: Variant) -> Self {
        Self { variant, alpha: DEFAULT_ALPHA }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn is_valid(&self) -> bool {
        self.alpha > 0.0 && self.alpha <= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionError {
    ZeroPreviousDirection,
    /// SG6 combines subgradients instead of deflecting.
    NotDeflected,
}

impl fmt::Display for DirectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionError::ZeroPreviousDirection => f.write_str("previous direction is zero"),
            DirectionError::NotDeflected => f.write_str("sg6 has no deflection coefficient"),
        }
    }
}

pub fn deflection_sigma(
    rule: &DirectionRule,
    g: &[f64],
    d_prev: &[f64],
) -> Result<f64, DirectionError> {
    let d_sq = norm_sq(d_prev);
    if d_sq == 0.0 {
        return Err(DirectionError::ZeroPreviousDirection);
    }
    let gd = dot(g, d_prev);
    Ok(match rule.variant {
        Variant::Sg1 => 0.0,
        Variant::Sg2 if gd < 0.0 => -1.5 * gd / d_sq,
        Variant::Sg2 => 0.0,
        Variant::Sg3 if gd < 0.0 => norm(g) / libm::sqrt(d_sq),
        Variant::Sg3 => 0.0,
        Variant::Sg4 => 0.8,
        Variant::Sg5 => norm(g) / libm::sqrt(d_sq),
        Variant::Sg6 => return Err(DirectionError::NotDeflected),
    })
}

/// Previous iterate's subgradient and direction, absent at the first step.
#[derive(Debug, Clone, Copy)]
pub struct History<'a> {
    pub g_prev: &'a [f64],
    pub d_prev: &'a [f64],
}

/// Direction for the current step. Falls back to `g` when the combined
/// direction is shorter than `eps_dir`.
pub fn direction(
    rule: &DirectionRule,
    g: &[f64],
    history: Option<History<'_>>,
    eps_dir: f64,
) -> Vec<f64> {
    let Some(History { g_prev, d_prev }) = history else {
        return g.to_vec();
    };
    let d: Vec<f64> = match rule.variant {
        Variant::Sg6 => g
            .iter()
            .zip(g_prev)
            .map(|(a, b)| rule.alpha * a + (1.0 - rule.alpha) * b)
            .collect(),
        _ => match deflection_sigma(rule, g, d_prev) {
            Ok(sigma) if sigma != 0.0 => g.iter().zip(d_prev).map(|(a, b)| a + sigma * b).collect(),
            _ => g.to_vec(),
        },
    };
    if norm(&d) < eps_dir {
        g.to_vec()
    } else {
        d
    }
}
