//! Sampling check of the analytic strategy costs.
//!
//! Each sample draws an accident with probability `P`, a broadcast with
//! probability `t` (accident) or `f` (no accident), and displays the broadcast
//! with probability `beta`. Every strategy's realized cost depends only on
//! the (accident, displayed) pair, so the sampler keeps four counters and
//! derives all means and standard errors from them. Samples are split into
//! fixed-size chunks, each with its own ChaCha stream derived from the seed,
//! so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::EquilibriumResult;
use crate::error::{Error, Result};
use crate::exogenous::cost_table;
use crate::model::{AgentType, GameInstance, Model, Strategy};

pub const MIN_SAMPLES: u64 = 10_000;
const CHUNK: u64 = 1 << 16;

/// Outcome counts indexed by `[accident][displayed]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts(pub [[u64; 2]; 2]);

impl OutcomeCounts {
    fn add(mut self, other: Self) -> Self {
        for a in 0..2 {
            for s in 0..2 {
                self.0[a][s] += other.0[a][s];
            }
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }
}

pub fn sample_outcomes(p: f64, t: f64, f: f64, beta: f64, samples: u64, seed: u64) -> OutcomeCounts {
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let n = CHUNK.min(samples - k * CHUNK);
            let mut c = OutcomeCounts::default();
            for _ in 0..n {
                let accident = rng.gen_bool(p);
                let broadcast = rng.gen_bool(if accident { t } else { f });
                let shown = broadcast && rng.gen_bool(beta);
                c.0[accident as usize][shown as usize] += 1;
            }
            c
        })
        .reduce(OutcomeCounts::default, OutcomeCounts::add)
}

/// Realized cost of a strategy for one (accident, displayed) outcome.
pub fn realized_cost(strategy: Strategy, accident: bool, shown: bool, r: f64) -> f64 {
    let careful = if accident { 0.0 } else { 1.0 };
    let reckless = if accident { r } else { 0.0 };
    match strategy {
        Strategy::Careful => careful,
        Strategy::Reckless => reckless,
        Strategy::Trust if shown => careful,
        Strategy::Trust => reckless,
    }
}

/// Which samples a type's expected cost averages over.
fn conditioning(agent: AgentType) -> fn(bool) -> bool {
    match agent {
        AgentType::V2VSignaled => |shown| shown,
        AgentType::V2VUnsignaled => |shown| !shown,
        _ => |_| true,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub model: Model,
    pub agent: AgentType,
    pub strategy: Strategy,
    pub analytic: f64,
    pub empirical: f64,
    pub std_err: f64,
    pub z: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub p_accident: f64,
    pub counts: OutcomeCounts,
    pub estimates: Vec<McEstimate>,
}

impl McReport {
    pub fn max_abs_z(&self) -> f64 {
        self.estimates.iter().map(|e| e.z.abs()).fold(0.0, f64::max)
    }

    pub fn failures(&self, z_limit: f64) -> Vec<String> {
        self.estimates
            .iter()
            .filter(|e| e.z.is_nan() || e.z.abs() > z_limit)
            .map(|e| {
                format!(
                    "{}/{}/{} z={:.2}",
                    e.model.as_str(),
                    e.agent.as_str(),
                    e.strategy.as_str(),
                    e.z
                )
            })
            .collect()
    }
}

fn estimate(counts: &OutcomeCounts, strategy: Strategy, keep: fn(bool) -> bool, r: f64) -> Option<(f64, f64, u64)> {
    let (mut n, mut sum, mut sum_sq) = (0u64, 0.0, 0.0);
    for (a, row) in counts.0.iter().enumerate() {
        for (s, &k) in row.iter().enumerate() {
            if !keep(s == 1) {
                continue;
            }
            let c = realized_cost(strategy, a == 1, s == 1, r);
            n += k;
            sum += c * k as f64;
            sum_sq += c * c * k as f64;
        }
    }
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Some((mean, (var / nf).sqrt(), n))
}

/// Empirical strategy costs at the equilibrium accident probability, for
/// both driver models. Types whose conditioning event was never sampled are
/// omitted.
pub fn monte_carlo_estimate(
    g: &GameInstance,
    eq: &EquilibriumResult,
    samples: u64,
    seed: u64,
) -> Result<McReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::Range {
            name: "samples",
            value: samples as f64,
            expected: ">= 10000",
        });
    }
    let p = eq.p_accident;
    let counts = sample_outcomes(p, g.t_val(), g.f_val(), g.beta(), samples, seed);
    let mut estimates = Vec::new();
    for model in Model::ALL {
        let table = cost_table(g, model, p);
        for (agent, strategy, cost) in table.entries() {
            let Some(analytic) = cost.value() else {
                continue;
            };
            let Some((empirical, std_err, n)) = estimate(&counts, strategy, conditioning(agent), g.r()) else {
                continue;
            };
            let diff = empirical - analytic;
            let z = if std_err > 0.0 {
                diff / std_err
            } else if diff.abs() <= 1e-12 {
                0.0
            } else {
                f64::INFINITY.copysign(diff)
            };
            estimates.push(McEstimate {
                model,
                agent,
                strategy,
                analytic,
                empirical,
                std_err,
                z,
                samples: n,
            });
        }
    }
    Ok(McReport {
        p_accident: p,
        counts,
        estimates,
    })
}

/// Like [`monte_carlo_estimate`], failing if any estimate lies more than four
/// standard errors from its analytic value.
pub fn monte_carlo_validate(
    g: &GameInstance,
    eq: &EquilibriumResult,
    samples: u64,
    seed: u64,
) -> Result<McReport> {
    let report = monte_carlo_estimate(g, eq, samples, seed)?;
    let failures = report.failures(4.0);
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(Error::StatisticalFailure(failures))
    }
}
