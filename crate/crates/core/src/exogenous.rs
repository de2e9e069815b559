//! Equilibria of games with a constant accident probability.
//!
//! With the accident probability fixed, every type simply best-responds to
//! its own cost table. Ties are resolved by a [`TieBreak`] rule; the social
//! cost does not depend on that choice.

use crate::costs::{bayesian_costs, nonbayesian_costs, CostTable};
use crate::equilibrium::{
    best_responses, check_nash, social_cost, BehaviorProfile, EquilibriumResult, TieBreak,
};
use crate::error::{Error, Result};
use crate::model::{AgentType, GameInstance, Mode, Model};

pub fn solve_exogenous(g: &GameInstance, model: Model) -> Result<EquilibriumResult> {
    solve_exogenous_with(g, model, TieBreak::MostCareful)
}

pub fn solve_exogenous_with(
    g: &GameInstance,
    model: Model,
    tie: TieBreak,
) -> Result<EquilibriumResult> {
    let p = g.exo_p().ok_or(Error::Mode {
        expected: "exogenous",
    })?;
    let stats = g.posteriors(p);
    let table = cost_table(g, model, p);
    let totals = type_totals(model, g.y(), stats.p_signal);

    let mut profile = BehaviorProfile::empty(model);
    let mut indifferent = Vec::new();
    for (agent, total) in totals {
        if total <= 0.0 {
            continue;
        }
        let tied = best_responses(&table, agent);
        if tied.is_empty() {
            return Err(Error::Assertion(format!("{agent:?} has mass but no defined costs")));
        }
        if tied.len() > 1 {
            indifferent.push(agent);
        }
        profile.set(agent, tie.pick(&tied), total)?;
    }

    check_nash(&profile, &table)?;
    let social_cost = social_cost(&profile, &table)?;
    Ok(EquilibriumResult {
        model,
        mode: Mode::Exogenous,
        p_accident: p,
        p_signal: stats.p_signal,
        profile,
        social_cost,
        family: None,
        indifferent,
        residual: 0.0,
    })
}

/// Cost table of `model` at accident probability `p`.
pub fn cost_table(g: &GameInstance, model: Model, p: f64) -> CostTable {
    let stats = g.posteriors(p);
    match model {
        Model::Bayesian => bayesian_costs(&stats, g.r()),
        Model::NonBayesian => nonbayesian_costs(&stats, g.r(), g.beta(), g.t_val(), g.f_val()),
    }
}

/// Population mass of each type.
pub fn type_totals(model: Model, y: f64, p_signal: f64) -> Vec<(AgentType, f64)> {
    match model {
        Model::Bayesian => vec![
            (AgentType::NonV2V, 1.0 - y),
            (AgentType::V2VUnsignaled, (1.0 - p_signal) * y),
            (AgentType::V2VSignaled, p_signal * y),
        ],
        Model::NonBayesian => vec![(AgentType::NonV2V, 1.0 - y), (AgentType::V2V, y)],
    }
}
