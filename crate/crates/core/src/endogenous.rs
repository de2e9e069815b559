//! Equilibria of games whose accident probability depends on behavior.
//!
//! The accident probability solves `P = p(d)`, where `d` is the reckless mass
//! induced by the drivers' best responses to `P`. Two independent solvers are
//! provided:
//!
//! * Non-Bayesian drivers: the game is first placed in one of seven
//!   equilibrium families by closed-form predicates. Each family pins `P` to
//!   `p(0)`, a threshold, `p(1)`, or the root of a monotone fixed-point
//!   equation, and fixes behavior (including the indifference masses).
//! * Bayesian drivers: `P` is located by bisecting on the best-response
//!   correspondence computed from posterior costs; the reckless mass of any
//!   indifferent type is then chosen to make the recursion hold exactly.
//!
//! Both return the essentially unique equilibrium: all equilibria of a game
//! share `P` and the social cost.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::costs::CostTable;
use crate::equilibrium::{
    best_responses, check_nash, social_cost, BehaviorProfile, EquilibriumResult,
};
use crate::error::{Error, Result};
use crate::exogenous::{cost_table, type_totals};
use crate::fixed_point::{fixed_point_bisect, FixedPointReport, FIXED_POINT_TOL, MAX_ITERATIONS};
use crate::model::{AgentType, GameInstance, Mode, Model, Strategy, Thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::E1,
        Family::E2,
        Family::E3,
        Family::E4,
        Family::E5,
        Family::E6,
        Family::E7,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Families whose equilibrium sits on a threshold with an indifferent type.
    pub fn is_indifference(self) -> bool {
        matches!(self, Family::E2 | Family::E4 | Family::E6)
    }

    /// Where the family's equilibrium accident probability must lie.
    pub fn band(self, g: &GameInstance) -> Band {
        let th = g.thresholds();
        match self {
            Family::E1 => Band::Point(g.crash(0.0)),
            Family::E2 => Band::Point(th.p_vu),
            Family::E3 => Band::Open(th.p_n, th.p_vu),
            Family::E4 => Band::Point(th.p_n),
            Family::E5 => Band::Open(th.p_vs, th.p_n),
            Family::E6 => Band::Point(th.p_vs),
            Family::E7 => Band::Point(g.crash(1.0)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.index() + 1)
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Band {
    Point(f64),
    Open(f64, f64),
}

impl Band {
    pub fn contains(self, p: f64, eps: f64) -> bool {
        match self {
            Band::Point(x) => (p - x).abs() <= eps,
            Band::Open(lo, hi) => lo < p && p < hi,
        }
    }
}

/// Displayed-signal probability `beta * (P (t - f) + f)`.
fn signal_share(g: &GameInstance, p: f64) -> f64 {
    g.beta() * (p * (g.t_val() - g.f_val()) + g.f_val())
}

/// Reckless mass when non-V2V drivers are careful and V2V drivers trust.
fn careful_trust_load(g: &GameInstance, p: f64) -> f64 {
    g.y() - signal_share(g, p) * g.y()
}

/// Reckless mass when non-V2V drivers are reckless and V2V drivers trust.
fn reckless_trust_load(g: &GameInstance, p: f64) -> f64 {
    1.0 - signal_share(g, p) * g.y()
}

fn require_endogenous(g: &GameInstance) -> Result<()> {
    match g.mode() {
        Mode::Endogenous => Ok(()),
        Mode::Exogenous => Err(Error::Mode {
            expected: "endogenous",
        }),
    }
}

/// Places an endogenous game in its equilibrium family.
///
/// Predicates are tested in order E1..E7 and the first match wins.
pub fn classify_family(g: &GameInstance) -> Result<Family> {
    require_endogenous(g)?;
    let th = g.thresholds();
    let p = |d: f64| g.crash(d);
    let at_vu = p(careful_trust_load(g, th.p_vu));
    let at_n_low = p(careful_trust_load(g, th.p_n));
    let at_n_high = p(reckless_trust_load(g, th.p_n));
    let at_vs = p(reckless_trust_load(g, th.p_vs));

    let family = if th.p_vu < p(0.0) {
        Family::E1
    } else if p(0.0) <= th.p_vu && th.p_vu <= at_vu {
        Family::E2
    } else if at_vu < th.p_vu && th.p_n < at_n_low {
        Family::E3
    } else if at_n_low <= th.p_n && th.p_n <= at_n_high {
        Family::E4
    } else if at_n_high < th.p_n && th.p_vs < at_vs {
        Family::E5
    } else if at_vs <= th.p_vs && th.p_vs <= p(1.0) {
        Family::E6
    } else if p(1.0) < th.p_vs {
        Family::E7
    } else {
        return Err(Error::Exhaustiveness {
            beta: g.beta(),
            y: g.y(),
            r: g.r(),
        });
    };
    Ok(family)
}

pub fn solve_endogenous(g: &GameInstance, model: Model) -> Result<EquilibriumResult> {
    match model {
        Model::NonBayesian => solve_nonbayesian(g),
        Model::Bayesian => solve_bayesian(g),
    }
}

fn solve_nonbayesian(g: &GameInstance) -> Result<EquilibriumResult> {
    use AgentType::{NonV2V, V2V};
    use Strategy::*;

    let family = classify_family(g)?;
    let th: Thresholds = g.thresholds();
    let y = g.y();
    let mut profile = BehaviorProfile::empty(Model::NonBayesian);

    let p = match family {
        Family::E1 => {
            profile.set(NonV2V, Careful, 1.0 - y)?;
            profile.set(V2V, Careful, y)?;
            g.crash(0.0)
        }
        Family::E2 => {
            // V2V drivers split between trusting and careful so that the
            // reckless mass P(not S) * x_T hits p^-1(P_vu).
            let p = th.p_vu;
            let no_signal = 1.0 - g.signal_probability(p);
            let trust = if no_signal > 0.0 {
                (g.crash_inverse(p) / no_signal).clamp(0.0, y)
            } else {
                0.0
            };
            profile.set(NonV2V, Careful, 1.0 - y)?;
            profile.set(V2V, Trust, trust)?;
            profile.set(V2V, Careful, y - trust)?;
            p
        }
        Family::E3 => {
            let rep = interior_root(g, th.p_n, th.p_vu, careful_trust_load)?;
            profile.set(NonV2V, Careful, 1.0 - y)?;
            profile.set(V2V, Trust, y)?;
            rep.value
        }
        Family::E4 => {
            let p = th.p_n;
            let no_signal = 1.0 - g.signal_probability(p);
            let reckless = (g.crash_inverse(p) - no_signal * y).clamp(0.0, 1.0 - y);
            profile.set(NonV2V, Reckless, reckless)?;
            profile.set(NonV2V, Careful, 1.0 - y - reckless)?;
            profile.set(V2V, Trust, y)?;
            p
        }
        Family::E5 => {
            let rep = interior_root(g, th.p_vs, th.p_n, reckless_trust_load)?;
            profile.set(NonV2V, Reckless, 1.0 - y)?;
            profile.set(V2V, Trust, y)?;
            rep.value
        }
        Family::E6 => {
            // Reckless V2V mass x_R solves p(1 - y P(S) + x_R P(S)) = P_vs.
            let p = th.p_vs;
            let signal = g.signal_probability(p);
            let reckless = if signal > 0.0 {
                ((g.crash_inverse(p) - (1.0 - y * signal)) / signal).clamp(0.0, y)
            } else {
                0.0
            };
            profile.set(NonV2V, Reckless, 1.0 - y)?;
            profile.set(V2V, Reckless, reckless)?;
            profile.set(V2V, Trust, y - reckless)?;
            p
        }
        Family::E7 => {
            profile.set(NonV2V, Reckless, 1.0 - y)?;
            profile.set(V2V, Reckless, y)?;
            g.crash(1.0)
        }
    };

    finish(g, Model::NonBayesian, p, profile, family)
}

fn interior_root(
    g: &GameInstance,
    lo: f64,
    hi: f64,
    load: fn(&GameInstance, f64) -> f64,
) -> Result<FixedPointReport> {
    fixed_point_bisect(|p| g.crash(load(g, p)), lo, hi, FIXED_POINT_TOL)
}

/// Reckless-mass bounds implied by exact Bayesian best responses at `p`.
fn bayesian_load_bounds(g: &GameInstance, p: f64) -> Result<(f64, f64)> {
    let table = cost_table(g, Model::Bayesian, p);
    let (mut lo, mut hi) = (0.0, 0.0);
    for (agent, total) in type_totals(Model::Bayesian, g.y(), table.stats.p_signal) {
        if total <= 0.0 {
            continue;
        }
        let careful = table.cost(agent, Strategy::Careful)?;
        let reckless = table.cost(agent, Strategy::Reckless)?;
        if reckless < careful {
            lo += total;
            hi += total;
        } else if reckless == careful {
            hi += total;
        }
    }
    Ok((lo, hi))
}

fn solve_bayesian(g: &GameInstance) -> Result<EquilibriumResult> {
    let family = classify_family(g)?;
    let (mut lo, mut hi) = (g.crash(0.0), g.crash(1.0));

    // The best-response reckless mass is non-increasing in P while p is
    // increasing, so P - p(d(P)) crosses zero exactly once.
    let mut found = None;
    for end in [lo, hi] {
        let (d_lo, d_hi) = bayesian_load_bounds(g, end)?;
        if g.crash(d_lo) <= end && end <= g.crash(d_hi) {
            found = Some(end);
            break;
        }
    }
    if found.is_none() {
        for _ in 0..MAX_ITERATIONS {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            let (d_lo, d_hi) = bayesian_load_bounds(g, mid)?;
            if g.crash(d_lo) > mid {
                lo = mid;
            } else if g.crash(d_hi) < mid {
                hi = mid;
            } else {
                found = Some(mid);
                break;
            }
        }
    }
    let p = found.unwrap_or(lo + 0.5 * (hi - lo));

    // Strict best responses fix most of the reckless mass; indifferent
    // types absorb whatever the recursion still needs.
    let table = cost_table(g, Model::Bayesian, p);
    let mut profile = BehaviorProfile::empty(Model::Bayesian);
    let mut fixed = 0.0;
    let mut tied = Vec::new();
    for (agent, total) in type_totals(Model::Bayesian, g.y(), table.stats.p_signal) {
        if total <= 0.0 {
            continue;
        }
        let br = best_responses(&table, agent);
        match br.as_slice() {
            [Strategy::Reckless] => {
                profile.set(agent, Strategy::Reckless, total)?;
                fixed += total;
            }
            [Strategy::Careful] => profile.set(agent, Strategy::Careful, total)?,
            [] => return Err(Error::Assertion(format!("{agent:?} has mass but no costs"))),
            _ => tied.push((agent, total)),
        }
    }
    tied.sort_by_key(|(agent, _)| tie_fill_order(*agent));
    let mut needed = (g.crash_inverse(p) - fixed).max(0.0);
    for (agent, total) in tied {
        let reckless = needed.min(total);
        needed -= reckless;
        profile.set(agent, Strategy::Reckless, reckless)?;
        profile.set(agent, Strategy::Careful, total - reckless)?;
    }

    finish(g, Model::Bayesian, p, profile, family)
}

fn tie_fill_order(agent: AgentType) -> u8 {
    match agent {
        AgentType::V2VUnsignaled => 0,
        AgentType::NonV2V => 1,
        _ => 2,
    }
}

fn finish(
    g: &GameInstance,
    model: Model,
    p: f64,
    profile: BehaviorProfile,
    family: Family,
) -> Result<EquilibriumResult> {
    let table: CostTable = cost_table(g, model, p);
    let p_signal = table.stats.p_signal;
    let residual = (p - g.crash(profile.reckless_load(p_signal))).abs();
    if residual > FIXED_POINT_TOL {
        return Err(Error::NonConvergence {
            residual,
            iterations: MAX_ITERATIONS,
        });
    }
    check_nash(&profile, &table)?;
    let social_cost = social_cost(&profile, &table)?;
    let indifferent = type_totals(model, g.y(), p_signal)
        .into_iter()
        .filter(|&(agent, total)| total > 0.0 && best_responses(&table, agent).len() > 1)
        .map(|(agent, _)| agent)
        .collect();
    Ok(EquilibriumResult {
        model,
        mode: Mode::Endogenous,
        p_accident: p,
        p_signal,
        profile,
        social_cost,
        family: Some(family),
        indifferent,
        residual,
    })
}
