//! Behavior profiles, social cost and the Nash condition.

use serde::{Deserialize, Serialize};

use crate::costs::{recklessness_weight, CostTable};
use crate::endogenous::Family;
use crate::error::{Error, Result};
use crate::model::{AgentType, Mode, Model, Strategy};

/// Masses at or below this are treated as absent by the Nash check.
pub const MASS_EPS: f64 = 1e-12;

/// Slack allowed between a used strategy's cost and the type's best cost.
pub const NASH_TOL: f64 = 1e-9;

/// Population masses `x[type][strategy]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorProfile {
    pub model: Model,
    masses: Vec<(AgentType, Strategy, f64)>,
}

impl BehaviorProfile {
    /// All-zero profile over the model's legal (type, strategy) pairs.
    pub fn empty(model: Model) -> Self {
        let masses = model
            .agent_types()
            .iter()
            .flat_map(|&a| model.strategies(a).iter().map(move |&s| (a, s, 0.0)))
            .collect();
        Self { model, masses }
    }

    pub fn set(&mut self, agent: AgentType, strategy: Strategy, mass: f64) -> Result<()> {
        self.model.check_legal(agent, strategy)?;
        let slot = self
            .masses
            .iter_mut()
            .find(|(a, s, _)| *a == agent && *s == strategy)
            .expect("legal pair present");
        slot.2 = mass;
        Ok(())
    }

    pub fn mass(&self, agent: AgentType, strategy: Strategy) -> f64 {
        self.masses
            .iter()
            .find(|(a, s, _)| *a == agent && *s == strategy)
            .map_or(0.0, |e| e.2)
    }

    pub fn type_total(&self, agent: AgentType) -> f64 {
        self.masses
            .iter()
            .filter(|(a, _, _)| *a == agent)
            .map(|e| e.2)
            .sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (AgentType, Strategy, f64)> + '_ {
        self.masses.iter().copied()
    }

    /// Reckless mass `d = sum rho(type, s, P) * x[type][s]`.
    pub fn reckless_load(&self, p_signal: f64) -> f64 {
        self.masses
            .iter()
            .map(|&(a, s, m)| {
                recklessness_weight(self.model, a, s, p_signal).expect("legal pair") * m
            })
            .sum()
    }
}

/// Canonical choice among tied strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// All tied mass on the most careful strategy (Careful > Trust > Reckless).
    #[default]
    MostCareful,
    LeastCareful,
}

impl TieBreak {
    pub fn pick(self, tied: &[Strategy]) -> Strategy {
        let it = tied.iter().copied();
        match self {
            TieBreak::MostCareful => it.min(),
            TieBreak::LeastCareful => it.max(),
        }
        .expect("non-empty tie set")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub model: Model,
    pub mode: Mode,
    pub p_accident: f64,
    pub p_signal: f64,
    pub profile: BehaviorProfile,
    pub social_cost: f64,
    pub family: Option<Family>,
    /// Types whose used strategies are tied at the equilibrium.
    pub indifferent: Vec<AgentType>,
    /// `|P - p(d)|` for endogenous games, else 0.
    pub residual: f64,
}

pub fn social_cost(profile: &BehaviorProfile, table: &CostTable) -> Result<f64> {
    if profile.model != table.model {
        return Err(Error::ModelMismatch {
            profile: profile.model,
            table: table.model,
        });
    }
    profile
        .entries()
        .map(|(a, s, m)| table.get(a, s)?.weighted(m))
        .sum()
}

/// Verifies that every strategy in use is a best response.
pub fn check_nash(profile: &BehaviorProfile, table: &CostTable) -> Result<()> {
    if profile.model != table.model {
        return Err(Error::ModelMismatch {
            profile: profile.model,
            table: table.model,
        });
    }
    for &agent in profile.model.agent_types() {
        let Some(best) = table.min_cost(agent) else {
            if profile.type_total(agent) > MASS_EPS {
                return Err(Error::Assertion(format!(
                    "{agent:?} has mass but no defined costs"
                )));
            }
            continue;
        };
        for &s in profile.model.strategies(agent) {
            let m = profile.mass(agent, s);
            if m <= MASS_EPS {
                continue;
            }
            let c = table
                .get(agent, s)?
                .value()
                .ok_or_else(|| Error::Assertion(format!("{agent:?}/{s:?} has mass but no cost")))?;
            if c > best + NASH_TOL {
                return Err(Error::Assertion(format!(
                    "{agent:?} plays {s:?} with mass {m} at cost {c}, best is {best}"
                )));
            }
        }
    }
    Ok(())
}

/// Strategies of `agent` whose cost is within [`crate::model::TIE_EPS`] of the best.
pub fn best_responses(table: &CostTable, agent: AgentType) -> Vec<Strategy> {
    let Some(best) = table.min_cost(agent) else {
        return Vec::new();
    };
    table
        .entries()
        .filter(|(a, _, c)| *a == agent && c.value().is_some_and(|v| v <= best + crate::model::TIE_EPS))
        .map(|(_, s, _)| s)
        .collect()
}
