//! Property (A): existence of a row-index set `K` of prescribed size such that
//! every `Q` rows of the root restricted to `K` are linearly independent.
//!
//! Candidate sets are visited in lexicographic order and the first one that
//! passes is reported as the witness. Rank tests on a `Q`-subset are cached,
//! since overlapping candidate sets share most of their subsets.

use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::channel::CorrelationRoot;
use crate::error::{Error, Result};
use crate::svd::singular_values;

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyAReport {
    pub holds: bool,
    pub cardinality_k: usize,
    /// Zero-based row indices of the first passing set.
    pub witness_k: Option<Vec<usize>>,
    /// Number of subset rank tests performed.
    pub failures_examined: u64,
    /// Tests whose `σ_Q/σ_1` fell within a factor 10 of the tolerance.
    pub flagged_marginal_tests: u64,
}

/// `min(⌈(qm − 1)/(m − 1)⌉, n)`.
pub fn required_cardinality(q: usize, m: usize, n: usize) -> Result<usize> {
    if m < 2 {
        return Err(Error::SingleAntenna);
    }
    if q == 0 || q > n {
        return Err(Error::InvalidParameter(format!("need 1 <= q <= n, got q={q}, n={n}")));
    }
    Ok((q * m - 1).div_ceil(m - 1).min(n))
}

struct SubsetTester<'a> {
    root: &'a CorrelationRoot,
    rel_tol: f64,
    budget: u64,
    tests: u64,
    flagged: u64,
    cache: HashMap<Vec<usize>, bool>,
}

impl<'a> SubsetTester<'a> {
    fn new(root: &'a CorrelationRoot, rel_tol: f64, budget: u64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::InvalidParameter(format!("rel_tol {rel_tol} not in (0, 1)")));
        }
        Ok(Self { root, rel_tol, budget, tests: 0, flagged: 0, cache: HashMap::new() })
    }

    fn full_rank(&mut self, rows: &[usize]) -> Result<bool> {
        if let Some(&r) = self.cache.get(rows) {
            return Ok(r);
        }
        if self.tests >= self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        self.tests += 1;
        let s = singular_values(&self.root.matrix().select_rows(rows))?;
        let ratio = if s[0] > 0.0 { s[s.len() - 1] / s[0] } else { 0.0 };
        if ratio >= self.rel_tol / 10.0 && ratio <= self.rel_tol * 10.0 {
            self.flagged += 1;
        }
        let ok = ratio > self.rel_tol;
        self.cache.insert(rows.to_vec(), ok);
        Ok(ok)
    }
}

pub fn check_property_a(root: &CorrelationRoot, m: usize, rel_tol: f64) -> Result<PropertyAReport> {
    check_property_a_with_budget(root, m, rel_tol, DEFAULT_BUDGET)
}

pub fn check_property_a_with_budget(
    root: &CorrelationRoot,
    m: usize,
    rel_tol: f64,
    budget: u64,
) -> Result<PropertyAReport> {
    let (n, q) = (root.n(), root.q());
    let k = required_cardinality(q, m, n)?;
    let mut tester = SubsetTester::new(root, rel_tol, budget)?;
    let mut witness = None;
    'outer: for cand in (0..n).combinations(k) {
        for sub in cand.iter().copied().combinations(q) {
            if !tester.full_rank(&sub)? {
                continue 'outer;
            }
        }
        witness = Some(cand);
        break;
    }
    Ok(PropertyAReport {
        holds: witness.is_some(),
        cardinality_k: k,
        witness_k: witness,
        failures_examined: tester.tests,
        flagged_marginal_tests: tester.flagged,
    })
}

/// Every `Q × Q` row-submatrix has full rank.
pub fn check_strong_condition(root: &CorrelationRoot, rel_tol: f64) -> Result<bool> {
    check_strong_condition_with_budget(root, rel_tol, DEFAULT_BUDGET)
}

pub fn check_strong_condition_with_budget(root: &CorrelationRoot, rel_tol: f64, budget: u64) -> Result<bool> {
    let mut tester = SubsetTester::new(root, rel_tol, budget)?;
    for sub in (0..root.n()).combinations(root.q()) {
        if !tester.full_rank(&sub)? {
            return Ok(false);
        }
    }
    Ok(true)
}
