//! Special functions and integration utilities the pricing modules build on.

mod erf;
mod quad;

pub use erf::{erf, erfc};
pub use quad::integrate_adaptive;

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_68;

/// Absolute-error target and subdivision budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::InvalidParams(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(Self {
            abs_tol,
            max_subdivisions,
        })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            max_subdivisions: 400,
        }
    }
}

/// Standard normal distribution function Phi(x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / SQRT_2)
}

/// Standard normal density phi(x).
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

// Acklam's rational approximation to the normal quantile, ~1.15e-9 relative.
fn normal_quantile_acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239e0,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838e0,
        -2.549_732_539_343_734e0,
        4.374_664_141_464_968e0,
        2.938_163_982_698_783e0,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996e0,
        3.754_408_661_907_416e0,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Inverse of [`normal_cdf`]: the x with Phi(x) = p.
///
/// Acklam's approximation polished by one Halley step against the
/// high-precision CDF, good to well below 1e-9 everywhere in (0, 1).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "normal_quantile requires p in (0,1), got {p}"
        )));
    }
    let mut x = normal_quantile_acklam(p);
    let pdf = normal_pdf(x);
    // skip the polish where the density underflows; the seed is already
    // accurate in absolute terms out there
    if pdf > 1e-280 {
        let r = (normal_cdf(x) - p) / pdf;
        x -= r / (1.0 + 0.5 * x * r);
    }
    Ok(x)
}

/// Truncated, renormalized Poisson(rate) probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    weights: Vec<f64>,
    /// Factor the raw partial sums were divided by to restore total mass 1.
    renorm: f64,
}

impl PoissonWeights {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest retained jump count.
    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn renormalization(&self) -> f64 {
        self.renorm
    }
}

/// Poisson probabilities by the stable recurrence w0 = e^-rate,
/// w_n = w_{n-1} * rate / n, truncated once the remaining tail mass drops
/// below `tail_tol` and renormalized to sum to one.
pub fn poisson_weights(rate: f64, tail_tol: f64) -> Result<PoissonWeights> {
    if !(rate >= 0.0) {
        return Err(Error::Domain(format!("rate must be >= 0, got {rate}")));
    }
    if rate > 700.0 {
        return Err(Error::Domain(format!(
            "rate {rate} exceeds 700, outside the intended parameter range"
        )));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::Domain(format!(
            "tail_tol must lie in (0,1), got {tail_tol}"
        )));
    }

    let mut weights = Vec::new();
    let mut w = (-rate).exp();
    let mut cum = 0.0;
    let mut n = 0usize;
    loop {
        weights.push(w);
        cum += w;
        if 1.0 - cum < tail_tol {
            break;
        }
        n += 1;
        w *= rate / n as f64;
    }
    for w in &mut weights {
        *w /= cum;
    }
    Ok(PoissonWeights {
        weights,
        renorm: cum,
    })
}

/// Neumaier-compensated sum; keeps long accumulations honest.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}
