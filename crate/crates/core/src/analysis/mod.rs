//! Experiments over families of games: beta sweeps, certification of the
//! monotonicity and equivalence properties, paradox search and a sampling
//! check of the analytic cost model.

pub mod certify;
pub mod generate;
pub mod montecarlo;
pub mod paradox;
pub mod sweep;

pub use certify::{
    certify_equivalence, certify_monotonicity, check_non_increasing, EquivalenceReport,
    MonotonicityReport, MONOTONE_TOL,
};
pub use generate::InstanceSampler;
pub use montecarlo::{monte_carlo_estimate, monte_carlo_validate, McEstimate, McReport};
pub use paradox::{search_paradox, ParadoxCertificate, ParadoxSearchSpace, PARADOX_MARGIN};
pub use sweep::{normalize_grid, sweep_beta, SeriesDiff, SweepResult, SweepRow};
