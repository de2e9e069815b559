//! Parametric curves for the environment functions t(y), f(y) and p(d).
//!
//! A curve is written as `family:param,param,...`:
//!
//! | family      | params                   | value                     |
//! |-------------|--------------------------|---------------------------|
//! | `affine`    | `a,b`                    | `a + b*x`                 |
//! | `power`     | `a,b,k`                  | `a + b*x^k` (`k > 0`)     |
//! | `piecewise` | `x0,v0,x1,v1,...`        | linear between knots      |
//!
//! Piecewise knots must start at `x = 0`, end at `x = 1` and have strictly
//! increasing abscissae.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residual target for numerically inverted curves.
pub const INVERSE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Curve {
    Affine { intercept: f64, slope: f64 },
    Power { a: f64, b: f64, k: f64 },
    Piecewise { knots: Vec<(f64, f64)> },
}

impl Curve {
    pub fn affine(intercept: f64, slope: f64) -> Self {
        Curve::Affine { intercept, slope }
    }

    pub fn constant(value: f64) -> Self {
        Curve::Affine {
            intercept: value,
            slope: 0.0,
        }
    }

    pub fn power(a: f64, b: f64, k: f64) -> Self {
        Curve::Power { a, b, k }
    }

    pub fn piecewise(knots: Vec<(f64, f64)>) -> Self {
        Curve::Piecewise { knots }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Curve::Affine { .. } => "affine",
            Curve::Power { .. } => "power",
            Curve::Piecewise { .. } => "piecewise",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            Curve::Affine { intercept, slope } => vec![*intercept, *slope],
            Curve::Power { a, b, k } => vec![*a, *b, *k],
            Curve::Piecewise { knots } => knots.iter().flat_map(|&(x, v)| [x, v]).collect(),
        }
    }

    pub fn from_params(family: &str, params: &[f64]) -> Result<Self> {
        let curve = match family {
            "affine" => match params {
                [a, b] => Curve::affine(*a, *b),
                _ => return Err(arity("affine", "2", params.len())),
            },
            "power" => match params {
                [a, b, k] => Curve::power(*a, *b, *k),
                _ => return Err(arity("power", "3", params.len())),
            },
            "piecewise" => {
                if params.len() < 4 || !params.len().is_multiple_of(2) {
                    return Err(arity("piecewise", "an even number >= 4", params.len()));
                }
                Curve::piecewise(params.chunks(2).map(|c| (c[0], c[1])).collect())
            }
            other => return Err(Error::Curve(format!("unknown curve family `{other}`"))),
        };
        curve.check_shape()?;
        Ok(curve)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Curve::Affine { intercept, slope } => intercept + slope * x,
            Curve::Power { a, b, k } => a + b * x.max(0.0).powf(*k),
            Curve::Piecewise { knots } => {
                let (x0, v0) = knots[0];
                if x <= x0 {
                    return v0;
                }
                for w in knots.windows(2) {
                    let ((xa, va), (xb, vb)) = (w[0], w[1]);
                    if x <= xb {
                        return va + (vb - va) * (x - xa) / (xb - xa);
                    }
                }
                knots[knots.len() - 1].1
            }
        }
    }

    /// Inverse of a strictly increasing curve on `[0, 1]`.
    ///
    /// Values outside `[c(0), c(1)]` are clamped to the domain ends.
    pub fn inverse(&self, value: f64) -> f64 {
        let (lo, hi) = (self.eval(0.0), self.eval(1.0));
        if value <= lo {
            return 0.0;
        }
        if value >= hi {
            return 1.0;
        }
        let x = match self {
            Curve::Affine { intercept, slope } => (value - intercept) / slope,
            Curve::Power { a, b, k } => ((value - a) / b).powf(1.0 / k),
            Curve::Piecewise { .. } => self.inverse_by_bisection(value),
        };
        x.clamp(0.0, 1.0)
    }

    fn inverse_by_bisection(&self, value: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut mid = 0.5;
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            let gap = self.eval(mid) - value;
            if gap.abs() <= INVERSE_TOL || hi - lo <= f64::EPSILON {
                break;
            }
            if gap < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        mid
    }

    /// Structural checks that do not depend on the curve's role.
    fn check_shape(&self) -> Result<()> {
        let finite = self.params().iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Curve(format!("non-finite parameter in {self}")));
        }
        match self {
            Curve::Affine { .. } => Ok(()),
            Curve::Power { k, .. } => {
                if *k > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Curve(format!("power exponent must be > 0, got {k}")))
                }
            }
            Curve::Piecewise { knots } => {
                if knots.len() < 2 {
                    return Err(Error::Curve("piecewise curve needs at least 2 knots".into()));
                }
                if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
                    return Err(Error::Curve("piecewise knots must span [0, 1]".into()));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Curve("piecewise abscissae must be strictly increasing".into()));
                }
                Ok(())
            }
        }
    }

    /// Checks that the curve is a continuous, strictly increasing map into `[0, 1]`.
    pub fn check_crash_curve(&self) -> Result<()> {
        self.check_shape()?;
        let increasing = match self {
            Curve::Affine { slope, .. } => *slope > 0.0,
            Curve::Power { b, .. } => *b > 0.0,
            Curve::Piecewise { knots } => knots.windows(2).all(|w| w[1].1 > w[0].1),
        };
        if !increasing {
            return Err(Error::Curve(format!("crash curve {self} is not strictly increasing")));
        }
        let (lo, hi) = (self.eval(0.0), self.eval(1.0));
        if lo < 0.0 || hi > 1.0 {
            return Err(Error::Curve(format!(
                "crash curve {self} leaves [0, 1]: p(0) = {lo}, p(1) = {hi}"
            )));
        }
        Ok(())
    }

    /// Checks that the curve maps `[0, 1]` into `[0, 1]` on the validation grid.
    pub fn check_probability_curve(&self, name: &str) -> Result<()> {
        self.check_shape()?;
        for x in validation_grid() {
            let v = self.eval(x);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Curve(format!("{name}({x}) = {v} is not a probability")));
            }
        }
        Ok(())
    }
}

/// Points at which curve invariants are checked.
pub fn validation_grid() -> impl Iterator<Item = f64> {
    (0..=100).map(|i| i as f64 / 100.0)
}

fn arity(family: &str, expected: &str, got: usize) -> Error {
    Error::Curve(format!("{family} curve takes {expected} parameters, got {got}"))
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params().iter().map(|v| format!("{v}")).collect();
        write!(f, "{}:{}", self.family(), params.join(","))
    }
}

impl FromStr for Curve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Curve(format!("expected `family:params`, got `{s}`")))?;
        let params = rest
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Curve(format!("bad curve parameter `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Curve::from_params(family.trim(), &params)
    }
}

impl From<Curve> for String {
    fn from(c: Curve) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Curve {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
