//! Distortion functions, their duals, and distorted expectations.
//!
//! A distortion is a nondecreasing map of [0,1] onto itself with f(0) = 0 and
//! f(1) = 1, applied to a distribution function before taking expectations.
//! The Wang family Phi(PhiInv(u) + gamma) is the one used for pricing; the
//! stress level gamma sets the width of the bid-ask spread.

use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, normal_cdf, normal_quantile};

/// A distortion function: the identity (no stress) or a Wang transform at
/// stress level `gamma`.
///
/// Negative `gamma` is accepted so that duals are representable; the usual
/// market-stress range is [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistortionSpec {
    Identity,
    Wang { gamma: f64 },
}

impl DistortionSpec {
    pub fn wang(gamma: f64) -> Self {
        DistortionSpec::Wang { gamma }
    }

    /// Stress level; zero for the identity.
    pub fn gamma(&self) -> f64 {
        match self {
            DistortionSpec::Identity => 0.0,
            DistortionSpec::Wang { gamma } => *gamma,
        }
    }

    /// Evaluate the distortion at `u`.
    ///
    /// The endpoints map to themselves by continuity; PhiInv never sees them.
    pub fn apply(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!(
                "distortion argument must lie in [0,1], got {u}"
            )));
        }
        Ok(self.apply_unit(u))
    }

    /// `apply` for callers that can guarantee u in [0,1] up to roundoff.
    pub(crate) fn apply_unit(&self, u: f64) -> f64 {
        debug_assert!((-1e-9..=1.0 + 1e-9).contains(&u));
        match self {
            DistortionSpec::Identity => u,
            DistortionSpec::Wang { gamma } => {
                if u <= 0.0 {
                    0.0
                } else if u >= 1.0 {
                    1.0
                } else {
                    let z = normal_quantile(u).expect("u in (0,1)");
                    normal_cdf(z + gamma)
                }
            }
        }
    }

    /// Dual distortion x -> 1 - f(1 - x); for Wang this is the same family
    /// with the sign of the stress flipped.
    pub fn dual(&self) -> DistortionSpec {
        match self {
            DistortionSpec::Identity => DistortionSpec::Identity,
            DistortionSpec::Wang { gamma } => DistortionSpec::Wang { gamma: -gamma },
        }
    }
}

/// Distorted expectation of a discrete sample: the L-statistic
/// sum_i x_(i) * (f(i/n) - f((i-1)/n)) over the ascending order statistics.
///
/// With the identity distortion this is the arithmetic mean, and it is
/// computed as such.
pub fn distorted_expectation_sorted(values: &[f64], d: &DistortionSpec) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain(
            "distorted expectation of an empty sample".into(),
        ));
    }
    debug_assert!(
        values.windows(2).all(|w| w[0] <= w[1]),
        "values must be sorted ascending"
    );
    let n = values.len() as f64;
    if matches!(d, DistortionSpec::Identity) {
        return Ok(compensated_sum(values.iter().copied()) / n);
    }
    let mut prev = 0.0;
    let terms = values.iter().enumerate().map(|(i, &x)| {
        let u = (i + 1) as f64 / n;
        let fu = if i + 1 == values.len() {
            1.0
        } else {
            d.apply_unit(u)
        };
        let term = x * (fu - prev);
        prev = fu;
        term
    });
    Ok(compensated_sum(terms))
}
