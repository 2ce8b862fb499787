use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Law of a single weight entry `Z_{1,1}`. Every family here is positive
/// almost surely and has closed-form mean `ν` and second moment `δ`.
///
/// String form (shared with the CLI): `const:c`, `uniform:a,b`, `exp:lambda`,
/// `lognormal:m,s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Constant { c: f64 },
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    LogNormal { location: f64, scale: f64 },
}

/// One sampled weight: `value` is `Z`, `unit` is `Z / ν` produced without
/// dividing, so that it does not depend on the scale parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightDraw {
    pub value: f64,
    pub unit: f64,
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("{name} must be finite, got {x}")))
    }
}

impl Distribution {
    pub fn constant(c: f64) -> Result<Self> {
        check_finite("c", c)?;
        if c <= 0.0 {
            return Err(Error::Argument(format!(
                "constant weight must be > 0, got {c}"
            )));
        }
        Ok(Distribution::Constant { c })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        check_finite("a", a)?;
        check_finite("b", b)?;
        if !(0.0 < a && a < b) {
            return Err(Error::Argument(format!(
                "uniform needs 0 < a < b, got a={a}, b={b}"
            )));
        }
        Ok(Distribution::Uniform { a, b })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        check_finite("lambda", rate)?;
        if rate <= 0.0 {
            return Err(Error::Argument(format!(
                "exponential rate must be > 0, got {rate}"
            )));
        }
        Ok(Distribution::Exponential { rate })
    }

    pub fn lognormal(location: f64, scale: f64) -> Result<Self> {
        check_finite("m", location)?;
        check_finite("s", scale)?;
        if scale <= 0.0 {
            return Err(Error::Argument(format!(
                "lognormal scale must be > 0, got {scale}"
            )));
        }
        Ok(Distribution::LogNormal { location, scale })
    }

    /// Mean `ν = E Z`.
    pub fn nu(&self) -> f64 {
        self.moments().0
    }

    /// Second moment `δ = E Z²`.
    pub fn delta(&self) -> f64 {
        self.moments().1
    }

    /// `(ν, δ)` in closed form.
    pub fn moments(&self) -> (f64, f64) {
        match *self {
            Distribution::Constant { c } => (c, c * c),
            Distribution::Uniform { a, b } => ((a + b) / 2.0, (a * a + a * b + b * b) / 3.0),
            Distribution::Exponential { rate } => (1.0 / rate, 2.0 / (rate * rate)),
            Distribution::LogNormal {
                location: m,
                scale: s,
            } => ((m + s * s / 2.0).exp(), (2.0 * m + 2.0 * s * s).exp()),
        }
    }

    /// `δ / ν²`. Exactly `1.0` for constants and exactly `2.0` for exponentials.
    pub fn moment_ratio(&self) -> f64 {
        match *self {
            Distribution::Constant { .. } => 1.0,
            Distribution::Exponential { .. } => 2.0,
            Distribution::LogNormal { scale, .. } => (scale * scale).exp(),
            Distribution::Uniform { .. } => {
                let (nu, delta) = self.moments();
                delta / (nu * nu)
            }
        }
    }

    /// Draws one weight.
    ///
    /// Methods: constant is deterministic; uniform is `a + (b − a)·U`;
    /// exponential is inverse-CDF `−ln(1 − U)/λ`; lognormal is
    /// `exp(m + s·G)` with `G` from the ziggurat standard normal. `U` is
    /// `rng.random::<f64>()` on `[0, 1)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> WeightDraw {
        match *self {
            Distribution::Constant { c } => WeightDraw {
                value: c,
                unit: 1.0,
            },
            Distribution::Uniform { a, b } => {
                let u: f64 = rng.random();
                let value = a + (b - a) * u;
                WeightDraw {
                    value,
                    unit: value / self.nu(),
                }
            }
            Distribution::Exponential { rate } => {
                let u: f64 = rng.random();
                let e = -(1.0 - u).ln();
                WeightDraw {
                    value: e / rate,
                    unit: e,
                }
            }
            Distribution::LogNormal { location, scale } => {
                let g: f64 = rng.sample(StandardNormal);
                WeightDraw {
                    value: (location + scale * g).exp(),
                    unit: (scale * g - scale * scale / 2.0).exp(),
                }
            }
        }
    }
}

fn parse_params(kind: &str, body: &str, expected: usize) -> Result<Vec<f64>> {
    let params: Vec<f64> = body
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in {kind} distribution")))
        })
        .collect::<Result<_>>()?;
    if params.len() != expected {
        return Err(Error::Parse(format!(
            "{kind} distribution takes {expected} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(params)
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.trim().split_once(':').ok_or_else(|| {
            Error::Parse(format!("distribution {s:?} is not of the form kind:params"))
        })?;
        match kind {
            "const" => Distribution::constant(parse_params(kind, body, 1)?[0]),
            "uniform" => {
                let p = parse_params(kind, body, 2)?;
                Distribution::uniform(p[0], p[1])
            }
            "exp" => Distribution::exponential(parse_params(kind, body, 1)?[0]),
            "lognormal" => {
                let p = parse_params(kind, body, 2)?;
                Distribution::lognormal(p[0], p[1])
            }
            other => Err(Error::Parse(format!(
                "unknown distribution kind {other:?} (expected const, uniform, exp or lognormal)"
            ))),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Distribution::Constant { c } => write!(f, "const:{c}"),
            Distribution::Uniform { a, b } => write!(f, "uniform:{a},{b}"),
            Distribution::Exponential { rate } => write!(f, "exp:{rate}"),
            Distribution::LogNormal { location, scale } => {
                write!(f, "lognormal:{location},{scale}")
            }
        }
    }
}
