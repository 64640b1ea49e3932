//! Reward laws used by the bandit arms.
//!
//! Every variant exposes its exact survival function `G(x) = P(X > x)`, a
//! sampler, and the approximation of `E[max of T draws]` that the proxy
//! empirical regret is built on. Pareto and exponential laws have closed
//! forms; everything else goes through [`ArmDistribution::expected_max_numeric`].

use std::f64::consts::{E, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma, LogNormal, Normal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};
use thiserror::Error;

use crate::quadrature;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("invalid {param} = {value}: {reason}")]
    InvalidParameter {
        param: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// `Γ(1 − 1/λ)` has a pole at `λ = 1`; the expected maximum is infinite for `λ ≤ 1`.
    #[error("tail index lambda = {lambda} has no finite expected maximum (need lambda > 1)")]
    UnsupportedTail { lambda: f64 },
    #[error("cannot parse distribution `{0}`")]
    Parse(String),
}

type Result<T> = std::result::Result<T, DistributionError>;

/// A reward law, serialised as `{"kind": "pareto", "c": 1.0, "lambda": 1.1}` and friends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArmDistribution {
    /// `G(x) = C x^(−λ)` above the support floor `C^(1/λ)`.
    Pareto {
        #[serde(rename = "c", default = "unit")]
        scale_c: f64,
        lambda: f64,
    },
    /// `G(x) = exp(−λ x)` for `x ≥ 0`.
    Exponential {
        #[serde(rename = "lambda")]
        rate: f64,
    },
    Gaussian {
        mean: f64,
        std: f64,
    },
    /// `ln X ~ N(mu, sigma²)`.
    #[serde(rename = "lognormal")]
    LogNormal { mu: f64, sigma: f64 },
    /// Density proportional to `exp(−|x|^β)`.
    GeneralizedGaussian { beta: f64 },
    /// Zero with probability `zero_prob`, otherwise a `Pareto(1, λ)` draw.
    #[serde(rename = "dirac-pareto")]
    DiracParetoMixture { zero_prob: f64, lambda: f64 },
}

fn unit() -> f64 {
    1.0
}

fn positive(param: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(DistributionError::InvalidParameter {
            param,
            value,
            reason: "must be a positive finite number",
        })
    }
}

fn finite(param: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(DistributionError::InvalidParameter {
            param,
            value,
            reason: "must be finite",
        })
    }
}

/// `P(X > |x|)` for the generalized Gaussian.
fn gg_upper_tail(beta: f64, x: f64) -> f64 {
    let z = x.abs().powf(beta);
    if z == 0.0 {
        0.5
    } else if z.is_infinite() {
        0.0
    } else {
        0.5 * gamma_ur(1.0 / beta, z)
    }
}

fn unit_interval(u: f64) -> f64 {
    // Maps [0, 1) onto (0, 1].
    1.0 - u
}

/// `1 − u^(1/n)`, computed without cancellation.
fn one_minus_root(u: f64, n: u64) -> f64 {
    -(u.ln() / n as f64).exp_m1()
}

// Integration limits on the log axis: x = e^s.
const LOG_AXIS_FLOOR: f64 = -40.0;
const LOG_AXIS_CAP: f64 = 700.0;
const LOG_AXIS_STEP: f64 = 0.5;
const TRUNCATION: f64 = 1e-12;

impl ArmDistribution {
    pub fn pareto(scale_c: f64, lambda: f64) -> Result<Self> {
        let d = ArmDistribution::Pareto { scale_c, lambda };
        d.validate()?;
        Ok(d)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let d = ArmDistribution::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        let d = ArmDistribution::Gaussian { mean, std };
        d.validate()?;
        Ok(d)
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        let d = ArmDistribution::LogNormal { mu, sigma };
        d.validate()?;
        Ok(d)
    }

    pub fn generalized_gaussian(beta: f64) -> Result<Self> {
        let d = ArmDistribution::GeneralizedGaussian { beta };
        d.validate()?;
        Ok(d)
    }

    pub fn dirac_pareto(zero_prob: f64, lambda: f64) -> Result<Self> {
        let d = ArmDistribution::DiracParetoMixture { zero_prob, lambda };
        d.validate()?;
        Ok(d)
    }

    /// Checks parameter ranges. Deserialised values must go through this.
    ///
    /// Pareto tails with `λ ≤ 1` are accepted here (they can be sampled); only
    /// the expected-maximum helpers reject them.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ArmDistribution::Pareto { scale_c, lambda } => {
                positive("c", scale_c)?;
                positive("lambda", lambda)
            }
            ArmDistribution::Exponential { rate } => positive("lambda", rate),
            ArmDistribution::Gaussian { mean, std } => {
                finite("mean", mean)?;
                positive("std", std)
            }
            ArmDistribution::LogNormal { mu, sigma } => {
                finite("mu", mu)?;
                positive("sigma", sigma)
            }
            ArmDistribution::GeneralizedGaussian { beta } => positive("beta", beta),
            ArmDistribution::DiracParetoMixture { zero_prob, lambda } => {
                if !(0.0..=1.0).contains(&zero_prob) {
                    return Err(DistributionError::InvalidParameter {
                        param: "zero_prob",
                        value: zero_prob,
                        reason: "must lie in [0, 1]",
                    });
                }
                positive("lambda", lambda)
            }
        }
    }

    /// Short family name, matching the serialised `kind` tag.
    pub fn kind(&self) -> &'static str {
        match self {
            ArmDistribution::Pareto { .. } => "pareto",
            ArmDistribution::Exponential { .. } => "exponential",
            ArmDistribution::Gaussian { .. } => "gaussian",
            ArmDistribution::LogNormal { .. } => "lognormal",
            ArmDistribution::GeneralizedGaussian { .. } => "generalized-gaussian",
            ArmDistribution::DiracParetoMixture { .. } => "dirac-pareto",
        }
    }

    /// Tail index of polynomial-tailed laws, if any.
    fn pareto_tail(&self) -> Option<f64> {
        match *self {
            ArmDistribution::Pareto { lambda, .. }
            | ArmDistribution::DiracParetoMixture { lambda, .. } => Some(lambda),
            _ => None,
        }
    }

    /// Left end of the support.
    fn support_floor(&self) -> f64 {
        match *self {
            ArmDistribution::Pareto { scale_c, lambda } => scale_c.powf(1.0 / lambda),
            ArmDistribution::Exponential { .. }
            | ArmDistribution::LogNormal { .. }
            | ArmDistribution::DiracParetoMixture { .. } => 0.0,
            ArmDistribution::Gaussian { .. } | ArmDistribution::GeneralizedGaussian { .. } => {
                f64::NEG_INFINITY
            }
        }
    }

    /// Exact survival function `P(X > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            ArmDistribution::Pareto { scale_c, lambda } => {
                if x <= self.support_floor() {
                    1.0
                } else {
                    scale_c * x.powf(-lambda)
                }
            }
            ArmDistribution::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            ArmDistribution::Gaussian { mean, std } => 0.5 * erfc((x - mean) / (std * SQRT_2)),
            ArmDistribution::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    1.0
                } else {
                    0.5 * erfc((x.ln() - mu) / (sigma * SQRT_2))
                }
            }
            ArmDistribution::GeneralizedGaussian { beta } => {
                let upper = gg_upper_tail(beta, x);
                if x >= 0.0 {
                    upper
                } else {
                    1.0 - upper
                }
            }
            ArmDistribution::DiracParetoMixture { zero_prob, lambda } => {
                if x < 0.0 {
                    1.0
                } else if x < 1.0 {
                    1.0 - zero_prob
                } else {
                    (1.0 - zero_prob) * x.powf(-lambda)
                }
            }
        }
    }

    /// `P(X ≤ x)`, evaluated on whichever side avoids cancellation.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ArmDistribution::Gaussian { mean, std } => 0.5 * erfc(-(x - mean) / (std * SQRT_2)),
            ArmDistribution::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    0.5 * erfc(-(x.ln() - mu) / (sigma * SQRT_2))
                }
            }
            ArmDistribution::GeneralizedGaussian { beta } => {
                let upper = gg_upper_tail(beta, x);
                if x >= 0.0 {
                    1.0 - upper
                } else {
                    upper
                }
            }
            _ => 1.0 - self.survival(x),
        }
    }

    fn ln_cdf(&self, x: f64) -> f64 {
        let g = self.survival(x);
        if g < 0.5 {
            (-g).ln_1p()
        } else {
            self.cdf(x).ln()
        }
    }

    /// Inverse of the survival function for the laws that have a closed form:
    /// the `x` with `G(x) = u`, for `u ∈ (0, 1]`.
    pub fn inverse_survival(&self, u: f64) -> Option<f64> {
        match *self {
            ArmDistribution::Pareto { scale_c, lambda } => Some((scale_c / u).powf(1.0 / lambda)),
            ArmDistribution::Exponential { rate } => Some(-u.ln() / rate),
            ArmDistribution::DiracParetoMixture { zero_prob, lambda } => {
                let tail = 1.0 - zero_prob;
                if u >= tail {
                    Some(0.0)
                } else {
                    Some((tail / u).powf(1.0 / lambda))
                }
            }
            _ => None,
        }
    }

    /// One i.i.d. draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ArmDistribution::Pareto { scale_c, lambda } => {
                let u = unit_interval(rng.random::<f64>());
                (scale_c / u).powf(1.0 / lambda)
            }
            ArmDistribution::Exponential { rate } => {
                -unit_interval(rng.random::<f64>()).ln() / rate
            }
            ArmDistribution::Gaussian { mean, std } => Normal::new(mean, std)
                .expect("validated parameters")
                .sample(rng),
            ArmDistribution::LogNormal { mu, sigma } => LogNormal::new(mu, sigma)
                .expect("validated parameters")
                .sample(rng),
            ArmDistribution::GeneralizedGaussian { beta } => {
                let g: f64 = Gamma::new(1.0 / beta, 1.0)
                    .expect("validated parameters")
                    .sample(rng);
                let magnitude = g.powf(1.0 / beta);
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            }
            ArmDistribution::DiracParetoMixture { zero_prob, lambda } => {
                if rng.random::<f64>() < zero_prob {
                    0.0
                } else {
                    unit_interval(rng.random::<f64>()).powf(-1.0 / lambda)
                }
            }
        }
    }

    /// One draw of `max(X_1, ..., X_n)`.
    ///
    /// Laws with a closed-form inverse survival invert `F^n` directly; the
    /// others fall back to drawing all `n` values.
    pub fn sample_max<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> f64 {
        assert!(n >= 1, "maximum over an empty sample");
        if self.inverse_survival(0.5).is_some() {
            let u = unit_interval(rng.random::<f64>());
            let level = one_minus_root(u, n);
            if level > 0.0 {
                return self.inverse_survival(level).expect("closed form checked above");
            }
            // u == 1 to machine precision: the sample sits on the support floor.
            return self.inverse_survival(1.0).expect("closed form checked above");
        }
        (0..n)
            .map(|_| self.sample(rng))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn require_finite_max(&self) -> Result<()> {
        match self.pareto_tail() {
            Some(lambda) if lambda <= 1.0 => Err(DistributionError::UnsupportedTail { lambda }),
            _ => Ok(()),
        }
    }

    /// Approximation of `E[max of T draws]`.
    ///
    /// Exponential: `ln(T)/λ`. Pareto: `(C T)^(1/λ) Γ(1 − 1/λ)`. Other laws
    /// integrate the exact expectation numerically.
    pub fn expected_max_approx(&self, horizon: u64) -> Result<f64> {
        assert!(horizon >= 1, "horizon must be positive");
        self.require_finite_max()?;
        let t = horizon as f64;
        match *self {
            ArmDistribution::Exponential { rate } => Ok(t.ln() / rate),
            ArmDistribution::Pareto { scale_c, lambda } => {
                Ok((t * scale_c).powf(1.0 / lambda) * gamma(1.0 - 1.0 / lambda))
            }
            _ => self.expected_max_numeric(horizon),
        }
    }

    /// `E[max of T draws]` by quadrature of
    /// `∫₀^∞ (1 − F(x)^T) dx − ∫₀^∞ F(−x)^T dx`.
    ///
    /// Both integrals run on the log axis `x = e^s`, which turns polynomial
    /// tails into exponentially decaying integrands. The upper limit is the
    /// first point past the peak where the substituted integrand falls below
    /// `1e-12`.
    pub fn expected_max_numeric(&self, horizon: u64) -> Result<f64> {
        assert!(horizon >= 1, "horizon must be positive");
        self.require_finite_max()?;
        let t = horizon as f64;
        let upper = |s: f64| {
            let x = s.exp();
            x * -(t * self.ln_cdf(x)).exp_m1()
        };
        let mut breaks = Vec::new();
        let floor = self.support_floor();
        if floor > 0.0 {
            breaks.push(floor.ln());
        }
        if matches!(self, ArmDistribution::DiracParetoMixture { .. }) {
            breaks.push(0.0);
        }
        let mut total = integrate_log_axis(upper, &breaks);
        if floor < 0.0 {
            let lower = |s: f64| {
                let x = s.exp();
                x * (t * self.ln_cdf(-x)).exp()
            };
            total -= integrate_log_axis(lower, &[]);
        }
        Ok(total)
    }

    /// The level `q̃` with `P(max of T draws ≤ E[max]) = q̃`.
    ///
    /// Pareto: `exp(−1/Γ(1 − 1/λ)^λ)`; exponential: `e^(−1)`; otherwise
    /// `exp(−T G(E[max]))` with the numeric expected maximum.
    pub fn per_quantile(&self, horizon: u64) -> Result<f64> {
        self.require_finite_max()?;
        match *self {
            ArmDistribution::Exponential { .. } => Ok(1.0 / E),
            ArmDistribution::Pareto { lambda, .. } => {
                Ok((-1.0 / gamma(1.0 - 1.0 / lambda).powf(lambda)).exp())
            }
            _ => {
                let e_max = self.expected_max_approx(horizon)?;
                Ok((-(horizon as f64) * self.survival(e_max)).exp())
            }
        }
    }

    /// Exact `E[max of T draws]` for Pareto and exponential laws.
    ///
    /// Pareto: `C^(1/λ) Γ(T+1) Γ(1−1/λ) / Γ(T+1−1/λ)`; exponential: `H_T / λ`.
    pub fn expected_max_exact(&self, horizon: u64) -> Option<f64> {
        match *self {
            ArmDistribution::Pareto { scale_c, lambda } if lambda > 1.0 => {
                let a = 1.0 / lambda;
                let t = horizon as f64;
                let ratio = (ln_gamma(t + 1.0) - ln_gamma(t + 1.0 - a)).exp();
                Some(scale_c.powf(a) * ratio * gamma(1.0 - a))
            }
            ArmDistribution::Exponential { rate } => {
                Some((1..=horizon).map(|n| 1.0 / n as f64).sum::<f64>() / rate)
            }
            _ => None,
        }
    }
}

fn integrate_log_axis<F: Fn(f64) -> f64>(h: F, breaks: &[f64]) -> f64 {
    let mut s = LOG_AXIS_FLOOR;
    let mut previous = h(s);
    let mut upper = LOG_AXIS_CAP;
    while s < LOG_AXIS_CAP {
        s += LOG_AXIS_STEP;
        let value = h(s);
        if s > 0.0 && value < TRUNCATION && value <= previous {
            upper = s;
            break;
        }
        previous = value;
    }
    let mut points: Vec<f64> = Vec::new();
    let mut p = LOG_AXIS_FLOOR;
    while p < upper {
        points.push(p);
        p += 1.0;
    }
    points.push(upper);
    points.extend(breaks.iter().copied().filter(|b| *b > LOG_AXIS_FLOOR && *b < upper));
    points.sort_by(f64::total_cmp);
    points.dedup();
    quadrature::integrate_pieces(h, &points, 1e-13, 1e-11)
}

impl fmt::Display for ArmDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ArmDistribution::Pareto { scale_c, lambda } => write!(f, "pareto:{scale_c},{lambda}"),
            ArmDistribution::Exponential { rate } => write!(f, "exponential:{rate}"),
            ArmDistribution::Gaussian { mean, std } => write!(f, "gaussian:{mean},{std}"),
            ArmDistribution::LogNormal { mu, sigma } => write!(f, "lognormal:{mu},{sigma}"),
            ArmDistribution::GeneralizedGaussian { beta } => {
                write!(f, "generalized-gaussian:{beta}")
            }
            ArmDistribution::DiracParetoMixture { zero_prob, lambda } => {
                write!(f, "dirac-pareto:{zero_prob},{lambda}")
            }
        }
    }
}

/// Parses the compact CLI form `kind:p1,p2`, e.g. `pareto:1,1.5` (C, λ) or `exponential:2`.
impl FromStr for ArmDistribution {
    type Err = DistributionError;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = || DistributionError::Parse(s.to_string());
        let (kind, params) = s.split_once(':').ok_or_else(parse_err)?;
        let values = params
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| parse_err())?;
        match (kind.trim(), values.as_slice()) {
            ("pareto", [lambda]) => ArmDistribution::pareto(1.0, *lambda),
            ("pareto", [c, lambda]) => ArmDistribution::pareto(*c, *lambda),
            ("exponential" | "exp", [rate]) => ArmDistribution::exponential(*rate),
            ("gaussian" | "normal", [mean, std]) => ArmDistribution::gaussian(*mean, *std),
            ("lognormal", [mu, sigma]) => ArmDistribution::log_normal(*mu, *sigma),
            ("generalized-gaussian" | "gengauss", [beta]) => {
                ArmDistribution::generalized_gaussian(*beta)
            }
            ("dirac-pareto", [p, lambda]) => ArmDistribution::dirac_pareto(*p, *lambda),
            _ => Err(parse_err()),
        }
    }
}
