//! Grid search for games whose equilibrium social cost rises with `beta`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::Curve;
use crate::endogenous::Family;
use crate::error::{Error, Result};
use crate::model::{GameInstance, Mode, Model, ModelCurves};
use crate::solve_in_mode;

/// Smallest cost increase accepted as a paradox.
pub const PARADOX_MARGIN: f64 = 1e-6;

/// Cartesian grid of templates with affine crash curves `a + b d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxSearchSpace {
    pub mode: Mode,
    pub ys: Vec<f64>,
    pub rs: Vec<f64>,
    pub intercepts: Vec<f64>,
    pub slopes: Vec<f64>,
    pub t: Curve,
    pub f: Curve,
    pub betas: Vec<f64>,
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

impl ParadoxSearchSpace {
    /// The reference grid: y in 0.1..0.9, r in 1.5..8, p(0) in 0..0.3,
    /// slope in 0.1..0.9, 51 beta points, t = 0.9 and f = 0.8.
    pub fn documented() -> Self {
        Self {
            mode: Mode::Endogenous,
            ys: linspace(0.1, 0.9, 9),
            rs: vec![1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
            intercepts: linspace(0.0, 0.3, 7),
            slopes: linspace(0.1, 0.9, 9),
            t: Curve::constant(0.9),
            f: Curve::constant(0.8),
            betas: linspace(0.0, 1.0, 51),
        }
    }

    /// Valid templates of the grid (crash curves leaving `[0, 1]` are skipped).
    pub fn templates(&self) -> Vec<GameInstance> {
        let mut out = Vec::new();
        for &y in &self.ys {
            for &r in &self.rs {
                for &a in &self.intercepts {
                    for &b in &self.slopes {
                        let curves = ModelCurves::new(self.t.clone(), self.f.clone(), Curve::affine(a, b));
                        if let Ok(g) = GameInstance::new(0.0, y, r, None, curves) {
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxCertificate {
    pub y: f64,
    pub r: f64,
    pub curves: ModelCurves,
    pub beta1: f64,
    pub beta2: f64,
    pub cost1: f64,
    pub cost2: f64,
    pub margin: f64,
    pub family1: Family,
    pub family2: Family,
}

impl ParadoxCertificate {
    pub fn template(&self) -> GameInstance {
        GameInstance::new(self.beta1, self.y, self.r, None, self.curves.clone())
            .expect("certificate built from a valid template")
    }
}

/// Pair `i < j` maximizing `values[j] - values[i]`; first maximum wins.
fn largest_rise(values: &[f64]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    let mut low = 0;
    for j in 1..values.len() {
        let rise = values[j] - values[low];
        if rise > best.map_or(0.0, |b| b.2) {
            best = Some((low, j, rise));
        }
        if values[j] < values[low] {
            low = j;
        }
    }
    best
}

fn certify(template: &GameInstance, beta1: f64, beta2: f64) -> Result<Option<ParadoxCertificate>> {
    let g1 = template.with_beta(beta1)?;
    let g2 = template.with_beta(beta2)?;
    let mut certified = None;
    for model in Model::ALL {
        let e1 = solve_in_mode(&g1, model, Mode::Endogenous)?;
        let e2 = solve_in_mode(&g2, model, Mode::Endogenous)?;
        let margin = e2.social_cost - e1.social_cost;
        if margin <= PARADOX_MARGIN {
            return Ok(None);
        }
        if model == Model::NonBayesian {
            certified = Some(ParadoxCertificate {
                y: template.y(),
                r: template.r(),
                curves: template.curves().clone(),
                beta1,
                beta2,
                cost1: e1.social_cost,
                cost2: e2.social_cost,
                margin,
                family1: e1.family.expect("endogenous"),
                family2: e2.family.expect("endogenous"),
            });
        }
    }
    Ok(certified)
}

/// Searches the grid for templates whose social cost increases along the
/// beta grid. Each template contributes at most one certificate (its largest
/// rise), re-verified by fresh solves under both driver models.
pub fn search_paradox(space: &ParadoxSearchSpace) -> Result<Vec<ParadoxCertificate>> {
    if space.mode != Mode::Endogenous {
        return Err(Error::Mode {
            expected: "endogenous",
        });
    }
    let betas = super::sweep::normalize_grid(&space.betas)?;
    let found: Vec<Option<ParadoxCertificate>> = space
        .templates()
        .par_iter()
        .map(|template| {
            let costs = betas
                .iter()
                .map(|&b| {
                    let g = template.with_beta(b)?;
                    Ok(solve_in_mode(&g, Model::NonBayesian, Mode::Endogenous)?.social_cost)
                })
                .collect::<Result<Vec<f64>>>()?;
            match largest_rise(&costs) {
                Some((i, j, rise)) if rise > PARADOX_MARGIN => certify(template, betas[i], betas[j]),
                _ => Ok(None),
            }
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}
