use std::path::PathBuf;

use anyhow::anyhow;
use hazard_core::analysis::{
    certify_equivalence, certify_monotonicity, monte_carlo_estimate, search_paradox, sweep_beta,
    InstanceSampler,
};
use hazard_core::{
    classify_family, solve, validate_instance, Error, GameInstance, InstanceSpec, Mode,
    ModelCurves,
};

use crate::config::{Command, ExperimentConfig};
use crate::output::{number, write_rows, Row};

const Z_LIMIT: f64 = 4.0;
const DEFAULT_SAMPLES: u64 = 1_000_000;
const DEFAULT_COUNT: usize = 10_000;

/// Why a run did not succeed, mapped to the process exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration or parameters. Nothing is written.
    Validation(anyhow::Error),
    /// A solver fault. Nothing is written.
    Solver(anyhow::Error),
    /// Results were written but a certification check failed.
    Certification { path: PathBuf, message: String },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Certification { .. } => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(e) => write!(f, "invalid input: {e:#}"),
            Failure::Solver(e) => write!(f, "solver error: {e:#}"),
            Failure::Certification { path, message } => {
                write!(f, "certification failed ({message}); results in {}", path.display())
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.into())
        } else {
            Failure::Solver(e.into())
        }
    }
}

fn invalid(e: anyhow::Error) -> Failure {
    Failure::Validation(e)
}

/// Output of a successful run.
#[derive(Debug)]
pub struct Written {
    pub path: PathBuf,
    pub rows: usize,
}

fn instance_at(cfg: &ExperimentConfig, beta: f64) -> Result<GameInstance, Failure> {
    let inst = &cfg.instance;
    let need = |name: &str| invalid(anyhow!("missing `instance.{name}`"));
    let curves = ModelCurves::new(
        inst.curves.t.clone().ok_or_else(|| need("curves.t"))?,
        inst.curves.f.clone().ok_or_else(|| need("curves.f"))?,
        inst.curves.p.clone().ok_or_else(|| need("curves.p"))?,
    );
    let spec = InstanceSpec {
        beta,
        y: inst.y.ok_or_else(|| need("y"))?,
        r: inst.r.ok_or_else(|| need("r"))?,
        exo_p: inst.exo_p,
        curves,
    };
    Ok(validate_instance(spec)?)
}

/// Every instance of the configured beta grid, validated up front.
fn instances(cfg: &ExperimentConfig) -> Result<Vec<GameInstance>, Failure> {
    cfg.betas()
        .map_err(invalid)?
        .into_iter()
        .map(|b| instance_at(cfg, b))
        .collect()
}

/// Runs the configured command and writes its output file.
pub fn run(cfg: &ExperimentConfig) -> Result<Written, Failure> {
    let command = cfg.command().map_err(invalid)?;
    let models = cfg.models().map_err(invalid)?;
    let (rows, failed) = match command {
        Command::Solve => solve_rows(cfg, &models)?,
        Command::Sweep => sweep_rows(cfg, &models)?,
        Command::Classify => classify_rows(cfg)?,
        Command::ParadoxSearch => paradox_rows(cfg)?,
        Command::CertifyEquivalence => equivalence_rows(cfg)?,
        Command::ValidateMc => monte_carlo_rows(cfg, &models)?,
    };
    let path = cfg.output_path(command);
    write_rows(&path, &rows, cfg.format()).map_err(Failure::Solver)?;
    match failed {
        Some(message) => Err(Failure::Certification { path, message }),
        None => Ok(Written {
            path,
            rows: rows.len(),
        }),
    }
}

type Rows = (Vec<Row>, Option<String>);

fn solve_rows(cfg: &ExperimentConfig, models: &[hazard_core::Model]) -> Result<Rows, Failure> {
    let mut rows = Vec::new();
    for g in instances(cfg)? {
        for &model in models {
            rows.push(Row::equilibrium(&g, &solve(&g, model)?));
        }
    }
    Ok((rows, None))
}

fn sweep_rows(cfg: &ExperimentConfig, models: &[hazard_core::Model]) -> Result<Rows, Failure> {
    let games = instances(cfg)?;
    let grid: Vec<f64> = games.iter().map(|g| g.beta()).collect();
    let mode = cfg.mode();
    let sweep = sweep_beta(&games[0], &grid, models, &[mode])?;
    let mut rows = Vec::with_capacity(sweep.rows.len());
    for r in &sweep.rows {
        let g = sweep.template.with_beta(r.beta)?;
        rows.push(Row::equilibrium(&g, &r.result));
    }
    let mut failed = None;
    if mode == Mode::Exogenous {
        let report = certify_monotonicity(&sweep)?;
        if !report.pass {
            failed = Some(format!(
                "social cost rises by {} between beta = {:?}",
                report.worst_violation,
                report.worst_at.map(|(_, a, b)| (a, b))
            ));
        }
    }
    Ok((rows, failed))
}

fn classify_rows(cfg: &ExperimentConfig) -> Result<Rows, Failure> {
    let mut rows = Vec::new();
    for g in instances(cfg)? {
        let g = g.endogenous();
        let th = g.thresholds();
        let mut row = Row::for_game(&g);
        row.family = Some(classify_family(&g)?);
        row.flag("p_vs", number(th.p_vs))
            .flag("p_n", number(th.p_n))
            .flag("p_vu", number(th.p_vu));
        rows.push(row);
    }
    Ok((rows, None))
}

fn paradox_rows(cfg: &ExperimentConfig) -> Result<Rows, Failure> {
    let certs = search_paradox(&cfg.paradox_space())?;
    let mut rows = Vec::with_capacity(2 * certs.len());
    for (k, c) in certs.iter().enumerate() {
        for (point, beta, cost, family) in [
            (1, c.beta1, c.cost1, c.family1),
            (2, c.beta2, c.cost2, c.family2),
        ] {
            let mut row = Row {
                beta: Some(beta),
                y: Some(c.y),
                r: Some(c.r),
                mode: Some(Mode::Endogenous),
                model: Some(hazard_core::Model::NonBayesian),
                family: Some(family),
                social_cost: Some(cost),
                ..Row::default()
            };
            row.flag("certificate", k)
                .flag("point", point)
                .flag("margin", number(c.margin))
                .flag("curve_t", &c.curves.t)
                .flag("curve_f", &c.curves.f)
                .flag("curve_p", &c.curves.p);
            rows.push(row);
        }
    }
    eprintln!("found {} paradox certificates", certs.len());
    Ok((rows, None))
}

fn equivalence_rows(cfg: &ExperimentConfig) -> Result<Rows, Failure> {
    let count = cfg.analysis.count.unwrap_or(DEFAULT_COUNT);
    let seed = cfg.analysis.seed.unwrap_or(0);
    let batch = InstanceSampler::new(seed).mixed_batch(count);
    let report = certify_equivalence(&batch)?;
    let mut rows = Vec::with_capacity(2 * batch.len());
    for (i, (g, eq)) in batch.iter().zip(&report.rows).enumerate() {
        for (model, p, j) in [
            (hazard_core::Model::Bayesian, eq.p_bayesian, eq.cost_bayesian),
            (hazard_core::Model::NonBayesian, eq.p_nonbayesian, eq.cost_nonbayesian),
        ] {
            let mut row = Row {
                model: Some(model),
                family: eq.family,
                p_accident: Some(p),
                social_cost: Some(j),
                ..Row::for_game(g)
            };
            row.flag("instance", i);
            rows.push(row);
        }
    }
    eprintln!(
        "max |dP| = {:e}, max |dJ| = {:e}, family counts {:?}",
        report.max_dp, report.max_dj, report.family_counts
    );
    let failed = (!report.pass).then(|| {
        format!("models disagree: max |dP| = {:e}, max |dJ| = {:e}", report.max_dp, report.max_dj)
    });
    Ok((rows, failed))
}

fn monte_carlo_rows(cfg: &ExperimentConfig, models: &[hazard_core::Model]) -> Result<Rows, Failure> {
    let seed = cfg
        .analysis
        .seed
        .ok_or_else(|| invalid(anyhow!("validate-mc requires `analysis.seed`")))?;
    let samples = cfg.analysis.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for g in instances(cfg)? {
        for &model in models {
            let eq = solve(&g, model)?;
            let report = monte_carlo_estimate(&g, &eq, samples, seed)?;
            failures.extend(report.failures(Z_LIMIT));
            for e in report.estimates.iter().filter(|e| e.model == model) {
                let mut row = Row::equilibrium(&g, &eq);
                row.flags.clear();
                row.flag("agent", e.agent.as_str())
                    .flag("strategy", e.strategy.as_str())
                    .flag("analytic", number(e.analytic))
                    .flag("empirical", number(e.empirical))
                    .flag("std_err", number(e.std_err))
                    .flag("z", number(e.z))
                    .flag("samples", e.samples);
                rows.push(row);
            }
        }
    }
    let failed = (!failures.is_empty()).then(|| failures.join(", "));
    Ok((rows, failed))
}
