//! Equilibrium solvers for a V2V road-hazard signaling game.
//!
//! Drivers choose between careful and reckless driving while V2V-equipped
//! cars broadcast accident warnings of quality `beta`. The crate computes
//! equilibria, accident probabilities and social costs for Bayesian and
//! non-Bayesian drivers with exogenous or endogenous accident probability,
//! and provides the experiments used to study how social cost responds to
//! information quality.
//!
//! ```
//! use hazard_core::{solve, Curve, GameInstance, Model, ModelCurves};
//!
//! let curves = ModelCurves::new(Curve::constant(0.5), Curve::constant(0.1), Curve::affine(0.1, 0.4));
//! let game = GameInstance::new(1.0, 0.5, 3.0, None, curves)?;
//! let eq = solve(&game, Model::NonBayesian)?;
//! assert!((eq.p_accident - 0.28 / 1.08).abs() < 1e-12);
//! # Ok::<(), hazard_core::Error>(())
//! ```

pub mod analysis;
pub mod costs;
pub mod curves;
pub mod endogenous;
pub mod equilibrium;
pub mod error;
pub mod exogenous;
pub mod fixed_point;
pub mod model;

pub use costs::{bayesian_costs, nonbayesian_costs, recklessness_weight, Cost, CostTable};
pub use curves::Curve;
pub use endogenous::{classify_family, solve_endogenous, Band, Family};
pub use equilibrium::{
    check_nash, social_cost, BehaviorProfile, EquilibriumResult, TieBreak, MASS_EPS, NASH_TOL,
};
pub use error::{Error, Result};
pub use exogenous::{solve_exogenous, solve_exogenous_with};
pub use fixed_point::{fixed_point_bisect, FixedPointReport, FIXED_POINT_TOL};
pub use model::{
    compute_thresholds, posteriors, signal_probability, validate_instance, AgentType,
    GameInstance, InstanceSpec, Mode, Model, ModelCurves, SignalStats, Strategy, Thresholds,
    TIE_EPS,
};

/// Solves `g` under `model`, exogenously or endogenously according to the
/// instance.
pub fn solve(g: &GameInstance, model: Model) -> Result<EquilibriumResult> {
    match g.mode() {
        Mode::Exogenous => solve_exogenous(g, model),
        Mode::Endogenous => solve_endogenous(g, model),
    }
}

/// Solves `g` in the requested mode, dropping `exo_p` for endogenous solves.
pub fn solve_in_mode(g: &GameInstance, model: Model, mode: Mode) -> Result<EquilibriumResult> {
    match mode {
        Mode::Exogenous => solve_exogenous(g, model),
        Mode::Endogenous => solve_endogenous(&g.endogenous(), model),
    }
}
