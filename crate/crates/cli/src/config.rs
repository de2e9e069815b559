//! Experiment configuration: a TOML file merged with command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, ValueEnum};
use hazard_core::analysis::paradox::linspace;
use hazard_core::analysis::ParadoxSearchSpace;
use hazard_core::{Curve, Mode, Model};
use serde::Deserialize;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HAZARD_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Sweep,
    Classify,
    ParadoxSearch,
    CertifyEquivalence,
    ValidateMc,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Classify => "classify",
            Command::ParadoxSearch => "paradox-search",
            Command::CertifyEquivalence => "certify-equivalence",
            Command::ValidateMc => "validate-mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    #[default]
    JsonLines,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
        }
    }
}

/// Beta grid: an explicit list or `count` evenly spaced points.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range { start, stop, count } => linspace(*start, *stop, *count),
        }
    }
}

impl std::str::FromStr for GridSpec {
    type Err = anyhow::Error;

    /// `0,0.5,1` or `start:stop:count`.
    fn from_str(s: &str) -> anyhow::Result<Self> {
        let num = |t: &str| t.trim().parse::<f64>().with_context(|| format!("bad number `{t}` in beta grid"));
        if let [start, stop, count] = s.split(':').collect::<Vec<_>>()[..] {
            return Ok(GridSpec::Range {
                start: num(start)?,
                stop: num(stop)?,
                count: count.trim().parse().with_context(|| format!("bad count `{count}`"))?,
            });
        }
        Ok(GridSpec::List(s.split(',').map(num).collect::<anyhow::Result<_>>()?))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesBlock {
    pub t: Option<Curve>,
    pub f: Option<Curve>,
    pub p: Option<Curve>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceBlock {
    pub beta: Option<f64>,
    pub beta_grid: Option<GridSpec>,
    pub y: Option<f64>,
    pub r: Option<f64>,
    pub exo_p: Option<f64>,
    #[serde(default)]
    pub curves: CurvesBlock,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParadoxBlock {
    pub ys: Option<Vec<f64>>,
    pub rs: Option<Vec<f64>>,
    pub intercepts: Option<Vec<f64>>,
    pub slopes: Option<Vec<f64>>,
    pub betas: Option<GridSpec>,
    pub t: Option<Curve>,
    pub f: Option<Curve>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisBlock {
    pub models: Option<Vec<Model>>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub count: Option<usize>,
    #[serde(default)]
    pub paradox: ParadoxBlock,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    #[serde(default)]
    pub instance: InstanceBlock,
    #[serde(default)]
    pub analysis: AnalysisBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).map_err(|e| anyhow!("{e}"))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Command-line flags. Every flag overrides the matching config entry.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "hazard", version, about = "Equilibria of the V2V road-hazard signaling game")]
pub struct Args {
    /// TOML experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated list or `start:stop:count`.
    #[arg(long, value_name = "GRID")]
    pub beta_grid: Option<GridSpec>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Constant accident probability; selects the exogenous model.
    #[arg(long)]
    pub exo_p: Option<f64>,
    /// Curve spec such as `affine:0.5,0`.
    #[arg(long, value_name = "CURVE")]
    pub curve_t: Option<Curve>,
    #[arg(long, value_name = "CURVE")]
    pub curve_f: Option<Curve>,
    #[arg(long, value_name = "CURVE")]
    pub curve_p: Option<Curve>,
    /// Comma-separated: `bayesian`, `non-bayesian`.
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<Model>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Number of random instances for certify-equivalence.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Args {
    /// Reads the config file (if any) and applies flag overrides.
    pub fn into_config(self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let inst = &mut cfg.instance;
        if self.beta.is_some() {
            inst.beta = self.beta;
            inst.beta_grid = None;
        }
        if self.beta_grid.is_some() {
            inst.beta_grid = self.beta_grid;
            inst.beta = None;
        }
        override_with(&mut inst.y, self.y);
        override_with(&mut inst.r, self.r);
        override_with(&mut inst.exo_p, self.exo_p);
        override_with(&mut inst.curves.t, self.curve_t);
        override_with(&mut inst.curves.f, self.curve_f);
        override_with(&mut inst.curves.p, self.curve_p);
        let an = &mut cfg.analysis;
        override_with(&mut an.models, self.models);
        override_with(&mut an.seed, self.seed);
        override_with(&mut an.samples, self.samples);
        override_with(&mut an.count, self.count);
        override_with(&mut cfg.command, self.command);
        override_with(&mut cfg.output.format, self.format);
        override_with(&mut cfg.output.path, self.out);
        Ok(cfg)
    }
}

fn override_with<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

fn replace_with<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl ExperimentConfig {
    pub fn command(&self) -> anyhow::Result<Command> {
        self.command.ok_or_else(|| anyhow!("no command given (use --command or `command = ...`)"))
    }

    pub fn models(&self) -> anyhow::Result<Vec<Model>> {
        let models = self.analysis.models.clone().unwrap_or_else(|| vec![Model::NonBayesian]);
        if models.is_empty() {
            bail!("`models` must name at least one model");
        }
        Ok(models)
    }

    pub fn mode(&self) -> Mode {
        if self.instance.exo_p.is_some() {
            Mode::Exogenous
        } else {
            Mode::Endogenous
        }
    }

    /// Beta values to evaluate: the grid if present, else the single beta.
    pub fn betas(&self) -> anyhow::Result<Vec<f64>> {
        match (&self.instance.beta_grid, self.instance.beta) {
            (Some(grid), _) => {
                let pts = grid.points();
                if pts.is_empty() {
                    bail!("beta grid is empty");
                }
                Ok(pts)
            }
            (None, Some(b)) => Ok(vec![b]),
            (None, None) => bail!("missing `instance.beta` or `instance.beta_grid`"),
        }
    }

    pub fn paradox_space(&self) -> ParadoxSearchSpace {
        let p = &self.analysis.paradox;
        let mut space = ParadoxSearchSpace::documented();
        replace_with(&mut space.ys, p.ys.clone());
        replace_with(&mut space.rs, p.rs.clone());
        replace_with(&mut space.intercepts, p.intercepts.clone());
        replace_with(&mut space.slopes, p.slopes.clone());
        replace_with(&mut space.betas, p.betas.as_ref().map(GridSpec::points));
        replace_with(&mut space.t, p.t.clone());
        replace_with(&mut space.f, p.f.clone());
        space
    }

    /// Output path: explicit, else `<command>.<ext>` in the default directory.
    pub fn output_path(&self, command: Command) -> PathBuf {
        if let Some(path) = &self.output.path {
            return path.clone();
        }
        let dir = std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from);
        dir.join(format!("{}.{}", command.as_str(), self.format().extension()))
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }
}
