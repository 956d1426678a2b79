use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, to_f64, Rational};

/// One of the five supported composition structures, with exact parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Model {
    /// Ordered Ewens formula, `theta > 0`.
    OrderedEsf { theta: Rational },
    /// Pitman's symmetric composition structure, `0 < alpha < 1`.
    Psf { alpha: Rational },
    /// Harmonic-number structure, `theta > 0`.
    GnedinG { theta: Rational },
    /// Stick-breaking with `Beta(alpha, theta)` factors, `alpha, theta > 0`.
    BetaStick { alpha: Rational, theta: Rational },
    /// The `alpha = 2` member of the beta family, `theta > 0`.
    G2 { theta: Rational },
}

fn positive(name: &str, v: &Rational) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be positive, got {}",
            fmt_rational(v)
        )))
    }
}

impl Model {
    pub fn ordered_esf(theta: Rational) -> Result<Self> {
        positive("theta", &theta)?;
        Ok(Self::OrderedEsf { theta })
    }

    pub fn psf(alpha: Rational) -> Result<Self> {
        if !(alpha.is_positive() && alpha < Rational::one()) {
            return Err(Error::Parameter(format!(
                "alpha must lie in (0,1), got {}",
                fmt_rational(&alpha)
            )));
        }
        Ok(Self::Psf { alpha })
    }

    pub fn gnedin_g(theta: Rational) -> Result<Self> {
        positive("theta", &theta)?;
        Ok(Self::GnedinG { theta })
    }

    pub fn beta_stick(alpha: Rational, theta: Rational) -> Result<Self> {
        positive("alpha", &alpha)?;
        positive("theta", &theta)?;
        Ok(Self::BetaStick { alpha, theta })
    }

    pub fn g2(theta: Rational) -> Result<Self> {
        positive("theta", &theta)?;
        Ok(Self::G2 { theta })
    }

    /// Re-checks the parameter ranges; variants can be built directly, so
    /// every formula calls this before computing.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::OrderedEsf { theta } | Self::GnedinG { theta } | Self::G2 { theta } => {
                positive("theta", theta)
            }
            Self::Psf { alpha } => Self::psf(alpha.clone()).map(|_| ()),
            Self::BetaStick { alpha, theta } => {
                positive("alpha", alpha)?;
                positive("theta", theta)
            }
        }
    }

    /// Short CLI name: `e`, `p`, `g`, `beta`, `g2`.
    pub fn short_name(&self) -> &'static str {
        match self {
            Self::OrderedEsf { .. } => "e",
            Self::Psf { .. } => "p",
            Self::GnedinG { .. } => "g",
            Self::BetaStick { .. } => "beta",
            Self::G2 { .. } => "g2",
        }
    }

    /// Builds a model from its short name and optional parameters.
    pub fn from_parts(
        name: &str,
        alpha: Option<Rational>,
        theta: Option<Rational>,
    ) -> Result<Self> {
        let need = |v: Option<Rational>, flag: &str| {
            v.ok_or_else(|| Error::Parameter(format!("model {name} requires --{flag}")))
        };
        let reject = |v: &Option<Rational>, flag: &str| match v {
            Some(_) => Err(Error::Parameter(format!(
                "model {name} does not take --{flag}"
            ))),
            None => Ok(()),
        };
        match name {
            "e" | "esf" | "ordered-esf" => {
                reject(&alpha, "alpha")?;
                Self::ordered_esf(need(theta, "theta")?)
            }
            "p" | "psf" => {
                reject(&theta, "theta")?;
                Self::psf(need(alpha, "alpha")?)
            }
            "g" => {
                reject(&alpha, "alpha")?;
                Self::gnedin_g(need(theta, "theta")?)
            }
            "beta" | "beta-stick" => Self::beta_stick(need(alpha, "alpha")?, need(theta, "theta")?),
            "g2" => {
                reject(&alpha, "alpha")?;
                Self::g2(need(theta, "theta")?)
            }
            other => Err(Error::Parameter(format!("unknown model {other:?}"))),
        }
    }

    /// Stick-breaking parameters `(alpha, theta)` when the model is generated
    /// by a `Beta(alpha, theta)` stick-breaking paintbox.
    pub fn stick_parameters(&self) -> Option<(Rational, Rational)> {
        match self {
            Self::OrderedEsf { theta } => Some((int(1), theta.clone())),
            Self::BetaStick { alpha, theta } => Some((alpha.clone(), theta.clone())),
            Self::G2 { theta } => Some((int(2), theta.clone())),
            Self::Psf { .. } | Self::GnedinG { .. } => None,
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self, Self::BetaStick { .. })
    }

    /// `true` only for the symmetric structure.
    pub fn is_symmetric(&self) -> bool {
        matches!(self, Self::Psf { .. })
    }

    pub fn theta_f64(&self) -> Option<f64> {
        match self {
            Self::OrderedEsf { theta }
            | Self::GnedinG { theta }
            | Self::G2 { theta }
            | Self::BetaStick { theta, .. } => Some(to_f64(theta)),
            Self::Psf { .. } => None,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OrderedEsf { theta } => write!(f, "OrderedESF(theta={})", fmt_rational(theta)),
            Self::Psf { alpha } => write!(f, "PSF(alpha={})", fmt_rational(alpha)),
            Self::GnedinG { theta } => write!(f, "GnedinG(theta={})", fmt_rational(theta)),
            Self::BetaStick { alpha, theta } => write!(
                f,
                "BetaStick(alpha={}, theta={})",
                fmt_rational(alpha),
                fmt_rational(theta)
            ),
            Self::G2 { theta } => write!(f, "G2(theta={})", fmt_rational(theta)),
        }
    }
}
