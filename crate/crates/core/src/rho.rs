//! Chain constants for the relaxed triangle inequality.
//!
//! A pseudometric here satisfies, for every chain `z_1, ..., z_{m+1}`,
//!
//! ```text
//! phi(z_1, z_{m+1}) <= rho(m) * [phi(z_1, z_2) + ... + phi(z_m, z_{m+1})]
//! ```
//!
//! `RhoSequence` stores the constants `rho(m)`. Always `rho(1) = 1`, the
//! sequence is nondecreasing, and `rho(m) <= rho(2)^(m-1)`.

use crate::error::{Error, Result};

const REL_SLACK: f64 = 1e-12;

/// The sequence `m -> rho(m)` over positive integers.
#[derive(Debug, Clone, PartialEq)]
pub enum RhoSequence {
    /// `rho(m) = m^exponent` with `exponent >= 0`.
    Power { exponent: f64 },
    /// Explicit values for `m = 1..=len`; beyond the table the sequence
    /// extends with the valid upper bound `rho(2)^(m-1)`.
    Table { values: Vec<f64> },
    /// Pointwise maximum of two sequences (arises from positive combinations
    /// of pseudometrics).
    Max(Box<RhoSequence>, Box<RhoSequence>),
}

impl RhoSequence {
    /// `rho(m) = m`, the sequence of a classical metric-like pseudometric
    /// such as a squared coordinate difference.
    pub fn linear() -> Self {
        RhoSequence::Power { exponent: 1.0 }
    }

    /// `rho(m) = 1`: the plain triangle inequality.
    pub fn constant_one() -> Self {
        RhoSequence::Power { exponent: 0.0 }
    }

    /// `rho(m) = m^exponent`. The exponent must be nonnegative so that
    /// `rho(1) = 1` and the sequence is nondecreasing.
    pub fn power(exponent: f64) -> Result<Self> {
        if !exponent.is_finite() || exponent < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rho power exponent must be finite and >= 0, got {exponent}"
            )));
        }
        Ok(RhoSequence::Power { exponent })
    }

    /// Sequence `rho(m) = m^(2*alpha - 1)` of the power pseudometric
    /// `((x_1 - x_2)^2)^alpha`; requires `alpha >= 1/2`.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.5 {
            return Err(Error::InvalidParameter(format!(
                "power pseudometric exponent alpha must be >= 1/2, got {alpha}"
            )));
        }
        RhoSequence::power(2.0 * alpha - 1.0)
    }

    /// Explicit table of values for `m = 1..`. Validates `rho(1) = 1`,
    /// monotonicity, and the power bound `rho(m) <= rho(2)^(m-1)` inside the
    /// table.
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("rho table is empty".into()));
        }
        if (values[0] - 1.0).abs() > REL_SLACK {
            return Err(Error::InvalidParameter(format!(
                "rho(1) must equal 1, got {}",
                values[0]
            )));
        }
        for w in values.windows(2) {
            if !(w[1].is_finite() && w[1] >= w[0] * (1.0 - REL_SLACK)) {
                return Err(Error::InvalidParameter(format!(
                    "rho table must be nondecreasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        let seq = RhoSequence::Table { values };
        let check = rho_power_bound_check(&seq, seq.table_len().unwrap_or(1));
        if let Some(v) = check.first_violation {
            return Err(Error::InvalidParameter(format!(
                "rho table violates rho(m) <= rho(2)^(m-1) at m = {}: {} > {}",
                v.m, v.rho_m, v.bound
            )));
        }
        Ok(seq)
    }

    fn table_len(&self) -> Option<usize> {
        match self {
            RhoSequence::Table { values } => Some(values.len()),
            _ => None,
        }
    }

    /// Evaluates `rho(m)` for `m >= 1`.
    ///
    /// Panics if `m == 0`; the chain constant is defined for positive chain
    /// lengths only.
    pub fn eval(&self, m: usize) -> f64 {
        assert!(m >= 1, "rho(m) is defined for m >= 1");
        match self {
            RhoSequence::Power { exponent } => {
                // Exact on the integer-exponent fast paths; bounds built from
                // integer rho values must stay exact.
                if *exponent == 0.0 {
                    1.0
                } else if *exponent == 1.0 {
                    m as f64
                } else {
                    (m as f64).powf(*exponent)
                }
            }
            RhoSequence::Table { values } => {
                if m <= values.len() {
                    values[m - 1]
                } else {
                    let rho2 = if values.len() >= 2 { values[1] } else { 1.0 };
                    rho2.powi(m as i32 - 1)
                }
            }
            RhoSequence::Max(a, b) => a.eval(m).max(b.eval(m)),
        }
    }

    /// Pointwise maximum with another sequence. Two power forms collapse to a
    /// single power form; mixed forms are kept symbolic.
    pub fn max_with(&self, other: &RhoSequence) -> RhoSequence {
        match (self, other) {
            (RhoSequence::Power { exponent: a }, RhoSequence::Power { exponent: b }) => {
                RhoSequence::Power { exponent: a.max(*b) }
            }
            _ => RhoSequence::Max(Box::new(self.clone()), Box::new(other.clone())),
        }
    }

    /// Short human-readable form used by reports.
    pub fn describe(&self) -> String {
        match self {
            RhoSequence::Power { exponent } if *exponent == 0.0 => "1".to_string(),
            RhoSequence::Power { exponent } if *exponent == 1.0 => "m".to_string(),
            RhoSequence::Power { exponent } => format!("m^{exponent}"),
            RhoSequence::Table { values } => format!("table[{}]", values.len()),
            RhoSequence::Max(a, b) => format!("max({}, {})", a.describe(), b.describe()),
        }
    }
}

/// One violation of `rho(m) <= rho(2)^(m-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoPowerViolation {
    pub m: usize,
    pub rho_m: f64,
    pub bound: f64,
}

/// Result of [`rho_power_bound_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct RhoPowerBoundReport {
    pub m_max: usize,
    pub passed: bool,
    pub first_violation: Option<RhoPowerViolation>,
}

/// Checks `rho(m) <= rho(2)^(m-1)` for `1 <= m <= m_max` and reports the
/// first violation, if any.
pub fn rho_power_bound_check(rho: &RhoSequence, m_max: usize) -> RhoPowerBoundReport {
    let m_max = m_max.max(1);
    let rho2 = rho.eval(2);
    let mut first_violation = None;
    for m in 1..=m_max {
        let value = rho.eval(m);
        let bound = rho2.powi(m as i32 - 1);
        if value > bound * (1.0 + REL_SLACK) {
            first_violation = Some(RhoPowerViolation { m, rho_m: value, bound });
            break;
        }
    }
    RhoPowerBoundReport {
        m_max,
        passed: first_violation.is_none(),
        first_violation,
    }
}
