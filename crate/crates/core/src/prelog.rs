//! Closed-form pre-log expressions.
//!
//! Upper bound `min{M(1 − Q/N), 1 − 1/N}` holds for every root. The matching
//! lower bound needs Property (A); without it only the single-antenna value
//! `1 − Q/N` is known to be achievable, and that is what gets reported.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_dims(n: usize, q: usize, m: usize) -> Result<()> {
    if n == 0 || q == 0 || q > n || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= q <= n and m >= 1, got n={n}, q={q}, m={m}"
        )));
    }
    Ok(())
}

pub fn prelog_upper(n: usize, q: usize, m: usize) -> Result<f64> {
    check_dims(n, q, m)?;
    // Integer min keeps the cap comparison exact.
    Ok((m * (n - q)).min(n - 1) as f64 / n as f64)
}

pub fn prelog_siso(n: usize, q: usize) -> Result<f64> {
    check_dims(n, q, 1)?;
    Ok((n - q) as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// Set when Property (A) is not available and the single-antenna value
    /// stands in.
    pub conservative: bool,
}

pub fn prelog_lower(n: usize, q: usize, m: usize, property_a_holds: bool) -> Result<LowerBound> {
    if property_a_holds || m == 1 {
        Ok(LowerBound { value: prelog_upper(n, q, m)?, conservative: false })
    } else {
        check_dims(n, q, m)?;
        Ok(LowerBound { value: prelog_siso(n, q)?, conservative: true })
    }
}

/// Smallest `M` reaching the `1 − 1/N` cap: `⌈(N − 1)/(N − Q)⌉`.
pub fn optimal_antennas(n: usize, q: usize) -> Result<usize> {
    check_dims(n, q, 1)?;
    if q == n {
        return Err(Error::ZeroPrelog);
    }
    Ok((n - 1).div_ceil(n - q))
}

/// `[M(N − Q)·log(1 + Nρ) + log log ρ] / N`, nats per channel use.
///
/// This is the explicit part of the first-stage capacity bound; an unknown
/// additive constant is left out, so only differences (slopes) are meaningful.
pub fn part1_bound(rho: f64, n: usize, q: usize, m: usize) -> Result<f64> {
    check_dims(n, q, m)?;
    if !(rho > std::f64::consts::E) {
        return Err(Error::InvalidParameter(format!("part1_bound needs rho > e, got {rho}")));
    }
    let main = (m * (n - q)) as f64 * (n as f64 * rho).ln_1p();
    Ok((main + rho.ln().ln()) / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrelogReport {
    pub n: usize,
    pub q: usize,
    pub m: usize,
    pub upper: f64,
    pub lower: f64,
    pub lower_conservative: bool,
    pub siso: f64,
    pub coincide: bool,
    pub optimal_m: Option<usize>,
}

impl PrelogReport {
    pub fn new(n: usize, q: usize, m: usize, property_a_holds: bool) -> Result<Self> {
        let upper = prelog_upper(n, q, m)?;
        let lower = prelog_lower(n, q, m, property_a_holds)?;
        Ok(Self {
            n,
            q,
            m,
            upper,
            lower: lower.value,
            lower_conservative: lower.conservative,
            siso: prelog_siso(n, q)?,
            coincide: lower.value == upper,
            optimal_m: optimal_antennas(n, q).ok(),
        })
    }
}
