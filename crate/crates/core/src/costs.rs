//! Expected strategy costs for both driver decision models.
//!
//! Bayesian V2V drivers condition on the displayed signal and so split into
//! signaled and unsignaled types. Non-Bayesian V2V drivers commit before the
//! signal: they either ignore it (and use the prior like everyone else) or
//! trust it, driving carefully exactly when a warning is shown.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AgentType, Model, SignalStats, Strategy};

/// A cost that may be undefined because the type it belongs to has zero mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cost {
    Defined(f64),
    /// Conditioned on a zero-probability signal realization.
    ZeroMass,
}

impl Cost {
    pub fn value(self) -> Option<f64> {
        match self {
            Cost::Defined(v) => Some(v),
            Cost::ZeroMass => None,
        }
    }

    /// `cost * mass`, with `undefined * 0 = 0`.
    pub fn weighted(self, mass: f64) -> Result<f64> {
        match self {
            Cost::Defined(v) => Ok(v * mass),
            Cost::ZeroMass if mass == 0.0 => Ok(0.0),
            Cost::ZeroMass => Err(Error::Conditioning("positive mass on an undefined cost")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub model: Model,
    pub stats: SignalStats,
    entries: Vec<(AgentType, Strategy, Cost)>,
}

impl CostTable {
    pub fn get(&self, agent: AgentType, strategy: Strategy) -> Result<Cost> {
        self.model.check_legal(agent, strategy)?;
        Ok(self
            .entries
            .iter()
            .find(|(a, s, _)| *a == agent && *s == strategy)
            .map(|e| e.2)
            .expect("table holds every legal pair"))
    }

    /// Defined cost, or a conditioning error.
    pub fn cost(&self, agent: AgentType, strategy: Strategy) -> Result<f64> {
        self.get(agent, strategy)?
            .value()
            .ok_or(Error::Conditioning("cost of a zero-mass type"))
    }

    pub fn entries(&self) -> impl Iterator<Item = (AgentType, Strategy, Cost)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest defined cost available to `agent`.
    pub fn min_cost(&self, agent: AgentType) -> Option<f64> {
        self.entries
            .iter()
            .filter(|(a, _, _)| *a == agent)
            .filter_map(|(_, _, c)| c.value())
            .min_by(f64::total_cmp)
    }
}

fn careful_reckless(p: Option<f64>, r: f64) -> (Cost, Cost) {
    match p {
        Some(p) => (Cost::Defined(1.0 - p), Cost::Defined(r * p)),
        None => (Cost::ZeroMass, Cost::ZeroMass),
    }
}

pub fn bayesian_costs(stats: &SignalStats, r: f64) -> CostTable {
    use AgentType::*;
    use Strategy::*;
    let (n_c, n_r) = careful_reckless(Some(stats.p_accident), r);
    let (vu_c, vu_r) = careful_reckless(stats.given_no_signal, r);
    let (vs_c, vs_r) = careful_reckless(stats.given_signal, r);
    CostTable {
        model: Model::Bayesian,
        stats: *stats,
        entries: vec![
            (NonV2V, Careful, n_c),
            (NonV2V, Reckless, n_r),
            (V2VUnsignaled, Careful, vu_c),
            (V2VUnsignaled, Reckless, vu_r),
            (V2VSignaled, Careful, vs_c),
            (V2VSignaled, Reckless, vs_r),
        ],
    }
}

/// Non-Bayesian costs. `beta` and `t` are needed to split `P(A)` by signal.
pub fn nonbayesian_costs(stats: &SignalStats, r: f64, beta: f64, t: f64, f: f64) -> CostTable {
    use AgentType::*;
    use Strategy::*;
    let p = stats.p_accident;
    // P(no accident and signal) + r * P(accident and no signal)
    let trust = (1.0 - p) * beta * f + r * p * (1.0 - beta * t);
    let (c, rk) = careful_reckless(Some(p), r);
    CostTable {
        model: Model::NonBayesian,
        stats: *stats,
        entries: vec![
            (NonV2V, Careful, c),
            (NonV2V, Reckless, rk),
            (V2V, Careful, c),
            (V2V, Trust, Cost::Defined(trust)),
            (V2V, Reckless, rk),
        ],
    }
}

/// Probability that a driver of `agent` type playing `strategy` drives
/// recklessly, given the signal probability.
pub fn recklessness_weight(
    model: Model,
    agent: AgentType,
    strategy: Strategy,
    p_signal: f64,
) -> Result<f64> {
    model.check_legal(agent, strategy)?;
    Ok(match strategy {
        Strategy::Careful => 0.0,
        Strategy::Reckless => 1.0,
        Strategy::Trust => 1.0 - p_signal,
    })
}
