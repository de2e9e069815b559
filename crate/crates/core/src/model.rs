//! Game instances, behavior thresholds, signal statistics and posteriors.
//!
//! A game is played by a unit mass of drivers on one road. A fraction `y` of
//! them drive V2V-equipped cars. When an accident occurs the equipped cars
//! broadcast a warning with probability `t(y)`, otherwise a false warning goes
//! out with probability `f(y) < t(y)`. A broadcast warning is displayed to each
//! V2V driver with probability `beta`, the information quality chosen by the
//! system designer. Drivers then act carefully (cost 1 if there is no
//! accident) or recklessly (cost `r > 1` if there is one).
//!
//! The accident probability is either a constant (exogenous games) or the
//! image `p(d)` of the reckless mass `d` under a strictly increasing crash
//! curve (endogenous games).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::curves::{validation_grid, Curve};
use crate::error::{Error, Result};

/// Absolute tolerance for threshold and cost ties.
pub const TIE_EPS: f64 = 1e-9;

/// Three-way comparison that treats `|a - b| <= eps` as equal.
pub fn compare_tol(a: f64, b: f64, eps: f64) -> Ordering {
    if (a - b).abs() <= eps {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Bayesian,
    NonBayesian,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Bayesian, Model::NonBayesian];

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Bayesian => "bayesian",
            Model::NonBayesian => "non-bayesian",
        }
    }

    pub fn agent_types(self) -> &'static [AgentType] {
        match self {
            Model::Bayesian => &[
                AgentType::NonV2V,
                AgentType::V2VUnsignaled,
                AgentType::V2VSignaled,
            ],
            Model::NonBayesian => &[AgentType::NonV2V, AgentType::V2V],
        }
    }

    pub fn strategies(self, agent: AgentType) -> &'static [Strategy] {
        use Strategy::*;
        match (self, agent) {
            (Model::NonBayesian, AgentType::V2V) => &[Careful, Trust, Reckless],
            (Model::Bayesian, AgentType::V2V) => &[],
            (Model::NonBayesian, AgentType::V2VSignaled | AgentType::V2VUnsignaled) => &[],
            _ => &[Careful, Reckless],
        }
    }

    pub fn check_legal(self, agent: AgentType, strategy: Strategy) -> Result<()> {
        if self.strategies(agent).contains(&strategy) {
            Ok(())
        } else {
            Err(Error::IllegalStrategy {
                model: self,
                agent,
                strategy,
            })
        }
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bayesian" | "b" => Ok(Model::Bayesian),
            "non-bayesian" | "nonbayesian" | "non_bayesian" | "i" => Ok(Model::NonBayesian),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exogenous,
    Endogenous,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exogenous => "exogenous",
            Mode::Endogenous => "endogenous",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exogenous" | "exo" => Ok(Mode::Exogenous),
            "endogenous" | "endo" => Ok(Mode::Endogenous),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Driver types. The Bayesian model splits V2V drivers by signal
/// realization; the non-Bayesian model keeps a single V2V type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentType {
    NonV2V,
    V2VUnsignaled,
    V2VSignaled,
    V2V,
}

impl AgentType {
    pub fn as_str(self) -> &'static str {
        match self {
            AgentType::NonV2V => "n",
            AgentType::V2VUnsignaled => "vu",
            AgentType::V2VSignaled => "vs",
            AgentType::V2V => "v",
        }
    }
}

/// Strategies, declared from most to least careful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Careful,
    Trust,
    Reckless,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Careful => "C",
            Strategy::Trust => "T",
            Strategy::Reckless => "R",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCurves {
    pub t: Curve,
    pub f: Curve,
    pub p: Curve,
}

impl ModelCurves {
    pub fn new(t: Curve, f: Curve, p: Curve) -> Self {
        Self { t, f, p }
    }

    pub fn validate(&self) -> Result<()> {
        self.t.check_probability_curve("t")?;
        self.f.check_probability_curve("f")?;
        for y in validation_grid() {
            let (t, f) = (self.t.eval(y), self.f.eval(y));
            if f >= t {
                return Err(Error::Curve(format!(
                    "false-positive rate f({y}) = {f} is not below t({y}) = {t}"
                )));
            }
        }
        self.p.check_crash_curve()
    }
}

/// Unvalidated game parameters, as read from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub beta: f64,
    pub y: f64,
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exo_p: Option<f64>,
    pub curves: ModelCurves,
}

/// A validated game. Exogenous iff `exo_p` is present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameInstance {
    spec: InstanceSpec,
    #[serde(skip)]
    t_val: f64,
    #[serde(skip)]
    f_val: f64,
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Range {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}

pub fn validate_instance(spec: InstanceSpec) -> Result<GameInstance> {
    check_unit("beta", spec.beta)?;
    check_unit("y", spec.y)?;
    if !(spec.r > 1.0 && spec.r.is_finite()) {
        return Err(Error::Range {
            name: "r",
            value: spec.r,
            expected: "(1, inf)",
        });
    }
    spec.curves.validate()?;
    if let Some(exo_p) = spec.exo_p {
        let (lo, hi) = (spec.curves.p.eval(0.0), spec.curves.p.eval(1.0));
        if !(lo..=hi).contains(&exo_p) {
            return Err(Error::ExoRange { exo_p, lo, hi });
        }
    }
    let t_val = spec.curves.t.eval(spec.y);
    let f_val = spec.curves.f.eval(spec.y);
    Ok(GameInstance { spec, t_val, f_val })
}

impl GameInstance {
    pub fn new(beta: f64, y: f64, r: f64, exo_p: Option<f64>, curves: ModelCurves) -> Result<Self> {
        validate_instance(InstanceSpec {
            beta,
            y,
            r,
            exo_p,
            curves,
        })
    }

    /// Same game at a different information quality.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        check_unit("beta", beta)?;
        let mut g = self.clone();
        g.spec.beta = beta;
        Ok(g)
    }

    /// Same game with the accident probability made endogenous.
    pub fn endogenous(&self) -> Self {
        let mut g = self.clone();
        g.spec.exo_p = None;
        g
    }

    pub fn with_exo_p(&self, exo_p: f64) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.exo_p = Some(exo_p);
        validate_instance(spec)
    }

    pub fn spec(&self) -> &InstanceSpec {
        &self.spec
    }

    pub fn beta(&self) -> f64 {
        self.spec.beta
    }

    pub fn y(&self) -> f64 {
        self.spec.y
    }

    pub fn r(&self) -> f64 {
        self.spec.r
    }

    pub fn exo_p(&self) -> Option<f64> {
        self.spec.exo_p
    }

    pub fn mode(&self) -> Mode {
        if self.spec.exo_p.is_some() {
            Mode::Exogenous
        } else {
            Mode::Endogenous
        }
    }

    pub fn curves(&self) -> &ModelCurves {
        &self.spec.curves
    }

    /// `t(y)` at the game's penetration.
    pub fn t_val(&self) -> f64 {
        self.t_val
    }

    /// `f(y)` at the game's penetration.
    pub fn f_val(&self) -> f64 {
        self.f_val
    }

    /// Crash curve `p(d)`.
    pub fn crash(&self, d: f64) -> f64 {
        self.spec.curves.p.eval(d)
    }

    pub fn crash_inverse(&self, prob: f64) -> f64 {
        self.spec.curves.p.inverse(prob)
    }

    pub fn thresholds(&self) -> Thresholds {
        compute_thresholds(self.beta(), self.r(), self.t_val, self.f_val)
            .expect("validated instance has f < t")
    }

    pub fn signal_probability(&self, p_accident: f64) -> f64 {
        signal_probability(self.beta(), p_accident, self.t_val, self.f_val)
    }

    pub fn posteriors(&self, p_accident: f64) -> SignalStats {
        posteriors(self.beta(), p_accident, self.t_val, self.f_val)
    }
}

impl<'de> Deserialize<'de> for GameInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = InstanceSpec::deserialize(d)?;
        validate_instance(spec).map_err(serde::de::Error::custom)
    }
}

/// Accident probabilities at which drivers switch behavior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Signaled V2V drivers are reckless below this.
    pub p_vs: f64,
    /// Non-V2V drivers are reckless below this.
    pub p_n: f64,
    /// Unsignaled V2V drivers are reckless below this.
    pub p_vu: f64,
}

pub fn compute_thresholds(beta: f64, r: f64, t: f64, f: f64) -> Result<Thresholds> {
    if t == 0.0 && f == 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(Thresholds {
        p_vs: f / (r * t + f),
        p_n: 1.0 / (1.0 + r),
        p_vu: (1.0 - beta * f) / (1.0 + r * (1.0 - beta * t) - beta * f),
    })
}

/// Probability that a warning is displayed to a V2V driver.
pub fn signal_probability(beta: f64, p_accident: f64, t: f64, f: f64) -> f64 {
    beta * (p_accident * t + (1.0 - p_accident) * f)
}

/// Signal statistics at a given accident probability. Conditionals on
/// zero-probability events are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalStats {
    pub p_accident: f64,
    pub p_signal: f64,
    pub given_signal: Option<f64>,
    pub given_no_signal: Option<f64>,
}

impl SignalStats {
    pub fn accident_given_signal(&self) -> Result<f64> {
        self.given_signal.ok_or(Error::Conditioning("P(S) = 0"))
    }

    pub fn accident_given_no_signal(&self) -> Result<f64> {
        self.given_no_signal.ok_or(Error::Conditioning("P(S) = 1"))
    }
}

pub fn posteriors(beta: f64, p_accident: f64, t: f64, f: f64) -> SignalStats {
    let p = p_accident;
    let p_signal = signal_probability(beta, p, t, f);
    let given_signal = (p_signal > 0.0).then(|| p * t / (p * t + (1.0 - p) * f));
    let given_no_signal = (p_signal < 1.0).then(|| p * (1.0 - beta * t) / (1.0 - p_signal));
    SignalStats {
        p_accident: p,
        p_signal,
        given_signal,
        given_no_signal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curves(t: f64, f: f64) -> ModelCurves {
        ModelCurves::new(Curve::constant(t), Curve::constant(f), Curve::affine(0.1, 0.4))
    }

    #[test]
    fn validate_accepts_valid() {
        assert!(GameInstance::new(0.5, 0.5, 3.0, None, curves(0.5, 0.1)).is_ok());
    }

    #[test]
    fn validate_rejects_r_at_one() {
        let err = GameInstance::new(0.5, 0.5, 1.0, None, curves(0.5, 0.1)).unwrap_err();
        assert!(matches!(err, Error::Range { name: "r", .. }));
    }

    #[test]
    fn validate_rejects_false_positive_above_true_positive() {
        let err = GameInstance::new(0.5, 0.5, 3.0, None, curves(0.3, 0.4)).unwrap_err();
        assert!(matches!(err, Error::Curve(_)));
    }

    #[test]
    fn validate_rejects_out_of_range() {
        assert!(GameInstance::new(1.5, 0.5, 3.0, None, curves(0.5, 0.1)).is_err());
        assert!(GameInstance::new(0.5, -0.1, 3.0, None, curves(0.5, 0.1)).is_err());
        let err = GameInstance::new(0.5, 0.5, 3.0, Some(0.6), curves(0.5, 0.1)).unwrap_err();
        assert!(matches!(err, Error::ExoRange { .. }));
        let flat = ModelCurves::new(Curve::constant(0.5), Curve::constant(0.1), Curve::constant(0.2));
        assert!(matches!(
            GameInstance::new(0.5, 0.5, 3.0, None, flat).unwrap_err(),
            Error::Curve(_)
        ));
    }

    #[test]
    fn thresholds_worked_example() {
        let th = compute_thresholds(1.0, 3.0, 0.5, 0.1).unwrap();
        assert!((th.p_vs - 0.0625).abs() < 1e-15);
        assert!((th.p_n - 0.25).abs() < 1e-15);
        assert!((th.p_vu - 0.375).abs() < 1e-15);
    }

    #[test]
    fn thresholds_without_information() {
        let th = compute_thresholds(0.0, 3.0, 0.5, 0.1).unwrap();
        assert_eq!(th.p_vu, 0.25);
        assert_eq!(th.p_vu, th.p_n);
    }

    #[test]
    fn thresholds_perfect_signal() {
        let th = compute_thresholds(1.0, 2.0, 1.0, 0.0).unwrap();
        assert_eq!(th.p_vs, 0.0);
        assert!((th.p_n - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(th.p_vu, 1.0);
    }

    #[test]
    fn thresholds_degenerate() {
        assert_eq!(compute_thresholds(1.0, 2.0, 0.0, 0.0), Err(Error::Degenerate));
    }

    #[test]
    fn signal_probability_examples() {
        assert!((signal_probability(1.0, 0.25, 0.5, 0.1) - 0.2).abs() < 1e-15);
        assert_eq!(signal_probability(0.0, 0.7, 0.9, 0.3), 0.0);
        assert_eq!(signal_probability(1.0, 1.0, 1.0, 0.3), 1.0);
    }

    #[test]
    fn posterior_examples() {
        let s = posteriors(1.0, 0.25, 0.5, 0.1);
        assert!((s.accident_given_signal().unwrap() - 0.625).abs() < 1e-15);
        assert!((s.accident_given_no_signal().unwrap() - 0.15625).abs() < 1e-15);

        let s = posteriors(0.7, 0.3, 0.4, 0.4);
        assert!((s.accident_given_signal().unwrap() - 0.3).abs() < 1e-15);

        let s = posteriors(1.0, 0.0, 0.5, 0.2);
        assert_eq!(s.accident_given_signal().unwrap(), 0.0);
    }

    #[test]
    fn posterior_conditioning_errors() {
        let s = posteriors(0.0, 0.3, 0.5, 0.1);
        assert_eq!(s.accident_given_signal(), Err(Error::Conditioning("P(S) = 0")));
        let s = posteriors(1.0, 1.0, 1.0, 0.2);
        assert!(s.accident_given_no_signal().is_err());
    }

    #[test]
    fn strategy_legality() {
        assert!(Model::NonBayesian.check_legal(AgentType::V2V, crate::model::Strategy::Trust).is_ok());
        assert!(Model::Bayesian
            .check_legal(AgentType::V2VSignaled, crate::model::Strategy::Trust)
            .is_err());
        assert!(Model::NonBayesian
            .check_legal(AgentType::NonV2V, crate::model::Strategy::Trust)
            .is_err());
        assert!(Model::Bayesian.check_legal(AgentType::V2V, crate::model::Strategy::Careful).is_err());
    }

    fn sign_tol(x: f64, tol: f64) -> i8 {
        if x.abs() <= tol {
            0
        } else if x > 0.0 {
            1
        } else {
            -1
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn total_probability(beta in 0.0..=1.0f64, p in 0.0..=1.0f64, t in 0.01..=1.0f64, frac in 0.0..1.0f64) {
            let f = t * frac;
            let s = posteriors(beta, p, t, f);
            prop_assert!((0.0..=1.0).contains(&s.p_signal));
            if let (Some(a), Some(b)) = (s.given_signal, s.given_no_signal) {
                let total = a * s.p_signal + b * (1.0 - s.p_signal);
                prop_assert!((total - p).abs() <= 1e-12);
            }
        }

        #[test]
        fn posterior_threshold_equivalence(
            beta in 0.01..=1.0f64, p in 0.0..=1.0f64, r in 1.001..10.0f64,
            t in 0.01..=1.0f64, frac in 0.0..1.0f64,
        ) {
            let f = t * frac;
            let th = compute_thresholds(beta, r, t, f).unwrap();
            let s = posteriors(beta, p, t, f);
            if s.p_signal > 0.0 && s.p_signal < 1.0 {
                let tol = 1e-12;
                let nosig = s.given_no_signal.unwrap();
                let sig = s.given_signal.unwrap();
                let (a, b) = (sign_tol(nosig - th.p_n, tol), sign_tol(p - th.p_vu, tol));
                prop_assert!(a == b || a == 0 || b == 0, "unsignaled: {a} vs {b}");
                let (a, b) = (sign_tol(sig - th.p_n, tol), sign_tol(p - th.p_vs, tol));
                prop_assert!(a == b || a == 0 || b == 0, "signaled: {a} vs {b}");
            }
        }

        #[test]
        fn unsignaled_threshold_increases_with_beta(
            b1 in 0.0..1.0f64, db in 1e-3..1.0f64, r in 1.001..10.0f64,
            t in 0.01..=1.0f64, frac in 0.0..1.0f64,
        ) {
            let f = t * frac;
            let b2 = (b1 + db).min(1.0);
            prop_assume!(b2 > b1);
            let lo = compute_thresholds(b1, r, t, f).unwrap().p_vu;
            let hi = compute_thresholds(b2, r, t, f).unwrap().p_vu;
            prop_assert!(hi > lo);
        }
    }
}
