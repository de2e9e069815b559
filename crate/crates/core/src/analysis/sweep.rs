use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::EquilibriumResult;
use crate::error::{Error, Result};
use crate::model::{GameInstance, Mode, Model};
use crate::solve_in_mode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub model: Model,
    pub mode: Mode,
    pub result: EquilibriumResult,
}

/// Forward differences of one (model, mode) series along the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiff {
    pub model: Model,
    pub mode: Mode,
    pub d_social_cost: Vec<f64>,
    pub d_accident: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub template: GameInstance,
    pub grid: Vec<f64>,
    /// Ordered by beta, then mode, then model.
    pub rows: Vec<SweepRow>,
    pub differences: Vec<SeriesDiff>,
}

impl SweepResult {
    /// Rows of one series, in grid order.
    pub fn series(&self, model: Model, mode: Mode) -> impl Iterator<Item = &SweepRow> {
        self.rows
            .iter()
            .filter(move |r| r.model == model && r.mode == mode)
    }
}

/// Sorts and deduplicates a beta grid after checking its range.
pub fn normalize_grid(grid: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = grid.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(Error::Range {
            name: "beta",
            value: bad,
            expected: "[0, 1]",
        });
    }
    let mut out = grid.to_vec();
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// Solves the template at every grid point for each model and mode.
pub fn sweep_beta(
    template: &GameInstance,
    grid: &[f64],
    models: &[Model],
    modes: &[Mode],
) -> Result<SweepResult> {
    let grid = normalize_grid(grid)?;
    if modes.contains(&Mode::Exogenous) && template.exo_p().is_none() {
        return Err(Error::Mode {
            expected: "exogenous template (exo_p)",
        });
    }
    let per_beta: Vec<Vec<SweepRow>> = grid
        .par_iter()
        .map(|&beta| {
            let at = |e: Error| Error::AtBeta {
                beta,
                source: Box::new(e),
            };
            let g = template.with_beta(beta).map_err(at)?;
            let mut rows = Vec::with_capacity(models.len() * modes.len());
            for &mode in modes {
                for &model in models {
                    let result = solve_in_mode(&g, model, mode).map_err(at)?;
                    rows.push(SweepRow {
                        beta,
                        model,
                        mode,
                        result,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = per_beta.into_iter().flatten().collect();

    let mut differences = Vec::new();
    for &mode in modes {
        for &model in models {
            let series: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.model == model && r.mode == mode)
                .collect();
            let diff = |value: fn(&SweepRow) -> f64| -> Vec<f64> {
                series
                    .windows(2)
                    .map(|w| (value(w[1]) - value(w[0])) / (w[1].beta - w[0].beta))
                    .collect()
            };
            differences.push(SeriesDiff {
                model,
                mode,
                d_social_cost: diff(|r| r.result.social_cost),
                d_accident: diff(|r| r.result.p_accident),
            });
        }
    }

    Ok(SweepResult {
        template: template.clone(),
        grid,
        rows,
        differences,
    })
}
