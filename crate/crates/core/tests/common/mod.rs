#![allow(dead_code)]

use hazard_core::analysis::InstanceSampler;
use hazard_core::exogenous::{cost_table, type_totals};
use hazard_core::{
    classify_family, Curve, EquilibriumResult, Family, GameInstance, Mode, ModelCurves,
    MASS_EPS, NASH_TOL,
};
use rand::Rng;

pub fn e3_instance() -> GameInstance {
    let curves = ModelCurves::new(Curve::constant(0.5), Curve::constant(0.1), Curve::affine(0.1, 0.4));
    GameInstance::new(1.0, 0.5, 3.0, None, curves).unwrap()
}

/// Independent re-check of a returned equilibrium.
#[derive(Debug, Default, Clone, Copy)]
pub struct Audit {
    pub solved: usize,
    pub max_residual: f64,
    pub nash_violations: usize,
    pub worst_nash_gap: f64,
}

impl Audit {
    pub fn record(&mut self, g: &GameInstance, eq: &EquilibriumResult) {
        self.solved += 1;
        let table = cost_table(g, eq.model, eq.p_accident);
        let p_signal = table.stats.p_signal;

        if eq.mode == Mode::Endogenous {
            let d = eq.profile.reckless_load(p_signal);
            let residual = (eq.p_accident - g.crash(d)).abs();
            self.max_residual = self.max_residual.max(residual).max(eq.residual);
        }

        let mut bad = false;
        for (agent, total) in type_totals(eq.model, g.y(), p_signal) {
            if (eq.profile.type_total(agent) - total).abs() > 1e-12 {
                bad = true;
            }
            let Some(best) = table.min_cost(agent) else {
                bad |= total > MASS_EPS;
                continue;
            };
            for (a, s, m) in eq.profile.entries() {
                if a != agent || m <= MASS_EPS {
                    continue;
                }
                match table.cost(a, s) {
                    Ok(c) => {
                        let gap = c - best;
                        self.worst_nash_gap = self.worst_nash_gap.max(gap);
                        bad |= gap > NASH_TOL;
                    }
                    Err(_) => bad = true,
                }
            }
        }
        if bad {
            self.nash_violations += 1;
        }
    }

    pub fn merge(&mut self, other: Audit) {
        self.solved += other.solved;
        self.max_residual = self.max_residual.max(other.max_residual);
        self.nash_violations += other.nash_violations;
        self.worst_nash_gap = self.worst_nash_gap.max(other.worst_nash_gap);
    }
}

/// Threshold at which `family` pins the equilibrium, and the reckless-mass
/// interval consistent with it.
fn target(g: &GameInstance, family: Family) -> (f64, f64, f64) {
    let th = g.thresholds();
    let (beta, y) = (g.beta(), g.y());
    let share = |p: f64| beta * (p * (g.t_val() - g.f_val()) + g.f_val());
    match family {
        Family::E2 => (th.p_vu, 0.0, y * (1.0 - share(th.p_vu))),
        Family::E4 => {
            let s = share(th.p_n);
            (th.p_n, y * (1.0 - s), 1.0 - s * y)
        }
        Family::E6 => (th.p_vs, 1.0 - share(th.p_vs) * y, 1.0),
        other => panic!("{other} is not an indifference family"),
    }
}

/// Draws an endogenous game in an indifference family by placing an affine
/// crash curve through the family's threshold.
pub fn boundary_instance(sampler: &mut InstanceSampler, family: Family) -> GameInstance {
    loop {
        let curves = sampler.curves();
        let rng = sampler.rng();
        let beta = rng.gen_range(0.05..=1.0);
        let y = rng.gen_range(0.05..=0.95);
        let r = 10f64.powf(rng.gen_range(0.01..=1.0));
        let Ok(probe) = GameInstance::new(beta, y, r, None, curves.clone()) else {
            continue;
        };
        let (p_star, d_lo, d_hi) = target(&probe, family);
        if d_hi - d_lo < 1e-3 {
            continue;
        }
        let d0 = rng.gen_range(d_lo + 1e-4 * (d_hi - d_lo)..d_hi - 1e-4 * (d_hi - d_lo));
        let a = p_star * rng.gen_range(0.0..1.0);
        if d0 <= 0.0 {
            continue;
        }
        let b = (p_star - a) / d0;
        if !(b > 1e-3 && a + b <= 1.0) {
            continue;
        }
        let curves = ModelCurves::new(curves.t, curves.f, Curve::affine(a, b));
        let Ok(g) = GameInstance::new(beta, y, r, None, curves) else {
            continue;
        };
        if classify_family(&g).ok() == Some(family) {
            return g;
        }
    }
}

/// Draws an exogenous game whose accident probability sits on a threshold.
pub fn exogenous_tie_instance(sampler: &mut InstanceSampler, which: usize) -> GameInstance {
    loop {
        let curves = sampler.curves();
        let rng = sampler.rng();
        let beta = rng.gen_range(0.05..=1.0);
        let y = rng.gen_range(0.05..=0.95);
        let r = 10f64.powf(rng.gen_range(0.01..=1.0));
        let Ok(probe) = GameInstance::new(beta, y, r, None, curves) else {
            continue;
        };
        let th = probe.thresholds();
        let p = [th.p_vs, th.p_n, th.p_vu][which % 3];
        // widen the crash curve so the threshold is attainable
        let a = p * rng.gen_range(0.0..1.0);
        let b = (1.0 - a) * rng.gen_range(0.05..1.0);
        if a + b < p {
            continue;
        }
        let curves = ModelCurves::new(
            probe.curves().t.clone(),
            probe.curves().f.clone(),
            Curve::affine(a, b),
        );
        if let Ok(g) = GameInstance::new(beta, y, r, Some(p), curves) {
            return g;
        }
    }
}
