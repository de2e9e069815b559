use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sweep::SweepResult;
use crate::endogenous::Family;
use crate::error::{Error, Result};
use crate::model::{GameInstance, Mode, Model};
use crate::solve;

/// Slack allowed when checking that social cost does not increase.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Agreement required between the two driver models.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub pass: bool,
    /// Largest `J(beta_{i+1}) - J(beta_i)` seen (0 if none positive).
    pub worst_violation: f64,
    /// Where the worst increase happened.
    pub worst_at: Option<(Model, f64, f64)>,
}

/// Largest increase between adjacent values and its index.
pub fn check_non_increasing(values: &[f64]) -> (f64, Option<usize>) {
    values
        .windows(2)
        .enumerate()
        .map(|(i, w)| (w[1] - w[0], i))
        .filter(|(d, _)| *d > 0.0)
        .fold((0.0, None), |(best, at), (d, i)| {
            if d > best {
                (d, Some(i))
            } else {
                (best, at)
            }
        })
}

pub fn certify_monotonicity(sweep: &SweepResult) -> Result<MonotonicityReport> {
    if sweep.rows.iter().any(|r| r.mode != Mode::Exogenous) {
        return Err(Error::Mode {
            expected: "exogenous",
        });
    }
    let mut report = MonotonicityReport {
        pass: true,
        worst_violation: 0.0,
        worst_at: None,
    };
    for model in Model::ALL {
        let rows: Vec<_> = sweep.series(model, Mode::Exogenous).collect();
        let js: Vec<f64> = rows.iter().map(|r| r.result.social_cost).collect();
        let (worst, at) = check_non_increasing(&js);
        if let Some(i) = at {
            if worst > report.worst_violation {
                report.worst_violation = worst;
                report.worst_at = Some((model, rows[i].beta, rows[i + 1].beta));
            }
        }
    }
    report.pass = report.worst_violation <= MONOTONE_TOL;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub mode: Mode,
    pub family: Option<Family>,
    pub p_bayesian: f64,
    pub p_nonbayesian: f64,
    pub cost_bayesian: f64,
    pub cost_nonbayesian: f64,
}

impl EquivalenceRow {
    pub fn dp(&self) -> f64 {
        (self.p_bayesian - self.p_nonbayesian).abs()
    }

    pub fn dj(&self) -> f64 {
        (self.cost_bayesian - self.cost_nonbayesian).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub pass: bool,
    pub max_dp: f64,
    pub max_dj: f64,
    /// Endogenous instances per family.
    pub family_counts: [usize; 7],
    pub exogenous_count: usize,
    pub rows: Vec<EquivalenceRow>,
}

/// Solves every instance under both driver models and compares the outcomes.
pub fn certify_equivalence(instances: &[GameInstance]) -> Result<EquivalenceReport> {
    let rows: Vec<EquivalenceRow> = instances
        .par_iter()
        .map(|g| {
            let b = solve(g, Model::Bayesian)?;
            let i = solve(g, Model::NonBayesian)?;
            Ok(EquivalenceRow {
                mode: g.mode(),
                family: i.family,
                p_bayesian: b.p_accident,
                p_nonbayesian: i.p_accident,
                cost_bayesian: b.social_cost,
                cost_nonbayesian: i.social_cost,
            })
        })
        .collect::<Result<_>>()?;

    let mut family_counts = [0; 7];
    let mut exogenous_count = 0;
    let (mut max_dp, mut max_dj) = (0.0f64, 0.0f64);
    for row in &rows {
        max_dj = max_dj.max(row.dj());
        match row.family {
            Some(f) => {
                family_counts[f.index()] += 1;
                max_dp = max_dp.max(row.dp());
            }
            None => exogenous_count += 1,
        }
    }
    Ok(EquivalenceReport {
        pass: max_dp <= EQUIVALENCE_TOL && max_dj <= EQUIVALENCE_TOL,
        max_dp,
        max_dj,
        family_counts,
        exogenous_count,
        rows,
    })
}
