//! Embedding-dimension selection and concentration bounds.

use std::f64::consts::{FRAC_2_SQRT_PI, SQRT_2};

use crate::error::{GrnfError, Result};

/// Which estimate a dimension bound is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Squared distance: `M ≥ 16 / (δ ε²)`.
    Distance,
    /// Kernel value: `M ≥ 1 / (δ ε²)`.
    Kernel,
}

impl std::str::FromStr for BoundKind {
    type Err = GrnfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(Self::Distance),
            "kernel" => Ok(Self::Kernel),
            other => Err(GrnfError::InvalidArgument(format!(
                "unknown bound kind '{other}' (expected distance|kernel)"
            ))),
        }
    }
}

/// Smallest `M` for which the estimate is within `epsilon` with probability
/// at least `1 - delta`.
pub fn embedding_dim_for(epsilon: f64, delta: f64, kind: BoundKind) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(GrnfError::InvalidArgument(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(GrnfError::InvalidArgument(format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    let c = match kind {
        BoundKind::Distance => 16.0,
        BoundKind::Kernel => 1.0,
    };
    let m = c / (delta * epsilon * epsilon);
    // Guard against 16000.000000000002 style round-up.
    let rounded = m.round();
    let m = if (m - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded
    } else {
        m.ceil()
    };
    Ok(m as usize)
}

/// Failure-probability bounds at dimension `M` and tolerance `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBounds {
    /// Two independent maps disagree by `ε`: `128 / (M ε²)`.
    pub delta_m: f64,
    /// One map is `ε` away from the limit: `16 / (M ε²)`.
    pub delta_star: f64,
    /// Gaussian approximation `2 Φ(-√M ε / σ̂)`, when `σ̂` is known.
    pub delta_clt: Option<f64>,
}

fn check_m_eps(m: usize, epsilon: f64) -> Result<()> {
    if m == 0 {
        return Err(GrnfError::InvalidArgument("M must be positive".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(GrnfError::InvalidArgument(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    Ok(())
}

pub fn delta_bounds(m: usize, epsilon: f64, sigma_hat: Option<f64>) -> Result<DeltaBounds> {
    check_m_eps(m, epsilon)?;
    let me2 = m as f64 * epsilon * epsilon;
    Ok(DeltaBounds {
        delta_m: (128.0 / me2).clamp(0.0, 1.0),
        delta_star: (16.0 / me2).clamp(0.0, 1.0),
        delta_clt: sigma_hat.map(|s| delta_clt(m, epsilon, s)).transpose()?,
    })
}

/// `2 Φ(-√M ε / σ̂)`, clamped to `[0, 1]`.
pub fn delta_clt(m: usize, epsilon: f64, sigma_hat: f64) -> Result<f64> {
    check_m_eps(m, epsilon)?;
    if !(sigma_hat > 0.0 && sigma_hat.is_finite()) {
        return Err(GrnfError::InvalidArgument(format!(
            "the Gaussian bound needs a positive standard deviation, got {sigma_hat}"
        )));
    }
    Ok((2.0 * normal_cdf(-(m as f64).sqrt() * epsilon / sigma_hat)).clamp(0.0, 1.0))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let z = x.abs() / SQRT_2;
    if z < 2.0 {
        0.5 * (1.0 + x.signum() * erf_series(z))
    } else {
        let tail = 0.5 * erfc_continued_fraction(z);
        if x < 0.0 {
            tail
        } else {
            1.0 - tail
        }
    }
}

/// Maclaurin series of `erf`, accurate to a few ulps for `|z| < 2`.
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..200 {
        term *= -z2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// `erfc(z)` for `z ≥ 2` from the continued fraction
/// `e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))`, evaluated with
/// the modified Lentz method.
fn erfc_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..500 {
        let a = n as f64 / 2.0;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (f * std::f64::consts::PI.sqrt())
}
