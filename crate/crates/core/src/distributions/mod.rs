//! Sampling and evaluation of the null and alternative families.
//!
//! Null families: normal, Laplace, logistic, uniform, exponential and a
//! two-component normal mixture. Skew alternatives applied to a standard
//! symmetric base (normal, Laplace or logistic):
//!
//! - Fernandez–Steel: one tail stretched by `γ = 1+θ`, the other compressed
//!   by `1/γ`, with normalizing constant `c(θ) = 2γ/(γ²+1)` so the density
//!   integrates to one.
//! - Azzalini: density `2·f(x)·F(θx)`.
//! - Contamination with shift: cdf `(1−θ)·F(x) + θ·F(x−β)`.
//!
//! Evaluation is closed-form everywhere except the Azzalini cdf (adaptive
//! quadrature on the probability scale) and the quantiles of the skew and
//! mixture families (bracketed Newton inversion, tolerance 1e−12 in p).

mod parse;
pub mod special;
mod stream;

pub use parse::{parse_spec, ParseError};
pub use stream::{mix64, RandomStream};

use crate::quad;
use crate::{Error, Result};
use special::{std_normal_cdf, std_normal_pdf, std_normal_quantile};

/// Standard symmetric base family (location 0, unit scale) for the skew
/// constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BaseFamily {
    Normal,
    Laplace,
    Logistic,
}

impl BaseFamily {
    pub fn pdf(self, x: f64) -> f64 {
        match self {
            BaseFamily::Normal => std_normal_pdf(x),
            BaseFamily::Laplace => 0.5 * (-x.abs()).exp(),
            BaseFamily::Logistic => {
                let c = (0.5 * x).cosh();
                0.25 / (c * c)
            }
        }
    }

    pub fn cdf(self, x: f64) -> f64 {
        match self {
            BaseFamily::Normal => std_normal_cdf(x),
            BaseFamily::Laplace => {
                if x < 0.0 {
                    0.5 * x.exp()
                } else {
                    1.0 - 0.5 * (-x).exp()
                }
            }
            BaseFamily::Logistic => 1.0 / (1.0 + (-x).exp()),
        }
    }

    pub fn quantile(self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile needs p in (0,1), got {p}")));
        }
        Ok(match self {
            BaseFamily::Normal => std_normal_quantile(p)?,
            BaseFamily::Laplace => {
                if p < 0.5 {
                    (2.0 * p).ln()
                } else {
                    -(2.0 * (1.0 - p)).ln()
                }
            }
            BaseFamily::Logistic => (p / (1.0 - p)).ln(),
        })
    }

    fn name(self) -> &'static str {
        match self {
            BaseFamily::Normal => "normal",
            BaseFamily::Laplace => "laplace",
            BaseFamily::Logistic => "logistic",
        }
    }
}

/// Tagged description of a sampling/evaluation distribution.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum DistributionSpec {
    Normal {
        mu: f64,
        sigma: f64,
    },
    Laplace {
        mu: f64,
        b: f64,
    },
    Logistic {
        mu: f64,
        s: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Exponential {
        rate: f64,
    },
    NormalMixture {
        weight: f64,
        mu1: f64,
        sigma1: f64,
        mu2: f64,
        sigma2: f64,
    },
    FernandezSteel {
        base: BaseFamily,
        theta: f64,
    },
    Azzalini {
        base: BaseFamily,
        theta: f64,
    },
    Contaminated {
        base: BaseFamily,
        theta: f64,
        beta: f64,
    },
}

use DistributionSpec::*;

fn require(ok: bool, family: &'static str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            family,
            reason: reason.to_string(),
        })
    }
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Normal { mu, sigma } => {
                require(mu.is_finite(), "normal", "mu must be finite")?;
                require(
                    sigma.is_finite() && sigma > 0.0,
                    "normal",
                    "sigma must be positive",
                )
            }
            Laplace { mu, b } => {
                require(mu.is_finite(), "laplace", "mu must be finite")?;
                require(
                    b.is_finite() && b > 0.0,
                    "laplace",
                    "scale b must be positive",
                )
            }
            Logistic { mu, s } => {
                require(mu.is_finite(), "logistic", "mu must be finite")?;
                require(
                    s.is_finite() && s > 0.0,
                    "logistic",
                    "scale s must be positive",
                )
            }
            Uniform { a, b } => {
                require(
                    a.is_finite() && b.is_finite(),
                    "uniform",
                    "bounds must be finite",
                )?;
                require(a < b, "uniform", "needs a < b")
            }
            Exponential { rate } => require(
                rate.is_finite() && rate > 0.0,
                "exponential",
                "rate must be positive",
            ),
            NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                require(
                    (0.0..=1.0).contains(&weight),
                    "mixnormal",
                    "weight must be in [0,1]",
                )?;
                require(
                    mu1.is_finite() && mu2.is_finite(),
                    "mixnormal",
                    "means must be finite",
                )?;
                require(
                    sigma1.is_finite() && sigma1 > 0.0 && sigma2.is_finite() && sigma2 > 0.0,
                    "mixnormal",
                    "sigmas must be positive",
                )
            }
            FernandezSteel { theta, .. } => require(
                theta.is_finite() && theta >= 0.0,
                "fs",
                "theta must be >= 0",
            ),
            Azzalini { theta, .. } => {
                require(theta.is_finite(), "azzalini", "theta must be finite")
            }
            Contaminated { theta, beta, .. } => {
                require(
                    (0.0..=1.0).contains(&theta),
                    "contam",
                    "theta must be in [0,1]",
                )?;
                require(
                    beta.is_finite() && beta > 1.0,
                    "contam",
                    "shift beta must be > 1",
                )
            }
        }
    }

    /// Density at `x`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.pdf_unchecked(x))
    }

    fn pdf_unchecked(&self, x: f64) -> f64 {
        match *self {
            Normal { mu, sigma } => std_normal_pdf((x - mu) / sigma) / sigma,
            Laplace { mu, b } => BaseFamily::Laplace.pdf((x - mu) / b) / b,
            Logistic { mu, s } => BaseFamily::Logistic.pdf((x - mu) / s) / s,
            Uniform { a, b } => {
                if x >= a && x <= b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                weight * std_normal_pdf((x - mu1) / sigma1) / sigma1
                    + (1.0 - weight) * std_normal_pdf((x - mu2) / sigma2) / sigma2
            }
            FernandezSteel { base, theta } => {
                let g = 1.0 + theta;
                let c = 2.0 * g / (g * g + 1.0);
                if x < 0.0 {
                    c * base.pdf(x / g)
                } else {
                    c * base.pdf(g * x)
                }
            }
            Azzalini { base, theta } => 2.0 * base.pdf(x) * base.cdf(theta * x),
            Contaminated { base, theta, beta } => {
                (1.0 - theta) * base.pdf(x) + theta * base.pdf(x - beta)
            }
        }
    }

    /// Distribution function at `x`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        self.cdf_unchecked(x)
    }

    fn cdf_unchecked(&self, x: f64) -> Result<f64> {
        Ok(match *self {
            Normal { mu, sigma } => std_normal_cdf((x - mu) / sigma),
            Laplace { mu, b } => BaseFamily::Laplace.cdf((x - mu) / b),
            Logistic { mu, s } => BaseFamily::Logistic.cdf((x - mu) / s),
            Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                weight * std_normal_cdf((x - mu1) / sigma1)
                    + (1.0 - weight) * std_normal_cdf((x - mu2) / sigma2)
            }
            FernandezSteel { base, theta } => {
                let g = 1.0 + theta;
                let c = 2.0 * g / (g * g + 1.0);
                if x < 0.0 {
                    c * g * base.cdf(x / g)
                } else {
                    g * g / (g * g + 1.0) + (c / g) * (base.cdf(g * x) - 0.5)
                }
            }
            Azzalini { base, theta } => {
                // G(x) = 2 ∫₀^{F(x)} F(θ·Q(u)) du on the probability scale
                let upper = base.cdf(x);
                if upper <= 0.0 {
                    0.0
                } else {
                    let v = quad::integrate(
                        |u| base.cdf(theta * base.quantile(u).expect("u in (0,1)")),
                        0.0,
                        upper,
                        5e-14,
                    )?;
                    (2.0 * v).clamp(0.0, 1.0)
                }
            }
            Contaminated { base, theta, beta } => {
                (1.0 - theta) * base.cdf(x) + theta * base.cdf(x - beta)
            }
        })
    }

    /// Quantile function: the `x` with `cdf(x) = p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile needs p in (0,1), got {p}")));
        }
        match *self {
            Normal { mu, sigma } => Ok(mu + sigma * std_normal_quantile(p)?),
            Laplace { mu, b } => Ok(mu + b * BaseFamily::Laplace.quantile(p)?),
            Logistic { mu, s } => Ok(mu + s * BaseFamily::Logistic.quantile(p)?),
            Uniform { a, b } => Ok(a + p * (b - a)),
            Exponential { rate } => Ok(-(-p).ln_1p() / rate),
            _ => self.invert_cdf(p),
        }
    }

    // Bracketed Newton inversion for the mixture and skew families (all
    // supported on the whole real line).
    fn invert_cdf(&self, p: f64) -> Result<f64> {
        let (mut lo, mut hi) = (-1.0, 1.0);
        let mut width = 1.0;
        while self.cdf_unchecked(lo)? > p {
            width *= 2.0;
            lo -= width;
            if width > 1e9 {
                return Err(Error::Numeric(format!(
                    "quantile bracketing failed at p={p}: no lower bound above {lo}"
                )));
            }
        }
        width = 1.0;
        while self.cdf_unchecked(hi)? < p {
            width *= 2.0;
            hi += width;
            if width > 1e9 {
                return Err(Error::Numeric(format!(
                    "quantile bracketing failed at p={p}: no upper bound below {hi}"
                )));
            }
        }

        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let residual = self.cdf_unchecked(x)? - p;
            if residual.abs() <= 1e-12 {
                return Ok(x);
            }
            if residual > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            if hi - lo <= 1e-13 * (1.0 + x.abs()) {
                return Ok(x);
            }
            let density = self.pdf_unchecked(x);
            let newton = x - residual / density;
            x = if density > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(Error::Numeric(format!(
            "quantile inversion at p={p} did not converge; bracket [{lo}, {hi}]"
        )))
    }

    /// Draw `n` i.i.d. variates.
    pub fn sample(&self, stream: &mut RandomStream, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        Ok((0..n).map(|_| self.sample_one(stream)).collect())
    }

    pub(crate) fn sample_one(&self, stream: &mut RandomStream) -> f64 {
        match *self {
            Normal { mu, sigma } => {
                let u = stream.uniform_open01();
                mu + sigma * std_normal_quantile(u).expect("u in (0,1)")
            }
            Laplace { mu, b } => {
                let u = stream.uniform_open01();
                mu + b * BaseFamily::Laplace.quantile(u).expect("u in (0,1)")
            }
            Logistic { mu, s } => {
                let u = stream.uniform_open01();
                mu + s * BaseFamily::Logistic.quantile(u).expect("u in (0,1)")
            }
            Uniform { a, b } => a + (b - a) * stream.uniform_open01(),
            Exponential { rate } => {
                let u = stream.uniform_open01();
                -(-u).ln_1p() / rate
            }
            NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                let z = std_normal_quantile(stream.uniform_open01()).expect("u in (0,1)");
                if stream.uniform_open01() < weight {
                    mu1 + sigma1 * z
                } else {
                    mu2 + sigma2 * z
                }
            }
            FernandezSteel { base, theta } => {
                // |Z| from the folded base; negative branch carries mass
                // γ²/(γ²+1) and is stretched by γ, the positive branch is
                // compressed by 1/γ.
                let g = 1.0 + theta;
                let z = base
                    .quantile(stream.uniform_open01())
                    .expect("u in (0,1)")
                    .abs();
                if stream.uniform_open01() < g * g / (g * g + 1.0) {
                    -g * z
                } else {
                    z / g
                }
            }
            Azzalini { base, theta } => loop {
                // rejection: propose from the base, accept w.p. F(θx)
                let x = base.quantile(stream.uniform_open01()).expect("u in (0,1)");
                if stream.uniform_open01() < base.cdf(theta * x) {
                    return x;
                }
            },
            Contaminated { base, theta, beta } => {
                let x = base.quantile(stream.uniform_open01()).expect("u in (0,1)");
                if stream.uniform_open01() < 1.0 - theta {
                    x
                } else {
                    x + beta
                }
            }
        }
    }

    /// Whether the distribution is symmetric about some center.
    pub fn is_symmetric(&self) -> bool {
        match *self {
            Normal { .. } | Laplace { .. } | Logistic { .. } | Uniform { .. } => true,
            Exponential { .. } => false,
            NormalMixture {
                weight,
                sigma1,
                sigma2,
                ..
            } => weight == 0.0 || weight == 1.0 || (weight == 0.5 && sigma1 == sigma2),
            FernandezSteel { theta, .. } | Azzalini { theta, .. } => theta == 0.0,
            // θ=0.5 is an equal-weight mixture, symmetric about β/2;
            // θ=1 is a pure shift of the base
            Contaminated { theta, .. } => theta == 0.0 || theta == 0.5 || theta == 1.0,
        }
    }

    /// Canonical spec string, parseable by [`parse_spec`].
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl std::fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Normal { mu, sigma } => write!(f, "normal({mu},{sigma})"),
            Laplace { mu, b } => write!(f, "laplace({mu},{b})"),
            Logistic { mu, s } => write!(f, "logistic({mu},{s})"),
            Uniform { a, b } => write!(f, "uniform({a},{b})"),
            Exponential { rate } => write!(f, "exp({rate})"),
            NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2,
            } => {
                write!(f, "mixnormal({weight},{mu1},{sigma1},{mu2},{sigma2})")
            }
            FernandezSteel { base, theta } => write!(f, "fs({},{theta})", base.name()),
            Azzalini { base, theta } => write!(f, "azzalini({},{theta})", base.name()),
            Contaminated { base, theta, beta } => {
                write!(f, "contam({},{theta},{beta})", base.name())
            }
        }
    }
}
