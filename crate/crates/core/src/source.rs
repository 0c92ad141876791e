//! A growth function given either in closed form or as a sample.

use std::fmt;

use serde::Serialize;

use crate::deriv::{self, Stencil};
use crate::error::{Error, Result};
use crate::family::AnalyticFamily;
use crate::grid::GridSpec;
use crate::sample::LogLogSample;

/// How log-derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivMode {
    /// Closed form when the family has one, numerical otherwise.
    #[default]
    Auto,
    /// Closed form only; anything else is a capability error.
    Exact,
    /// Numerical everywhere.
    Numeric,
}

impl std::str::FromStr for DerivMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(DerivMode::Auto),
            "exact" => Ok(DerivMode::Exact),
            "numeric" => Ok(DerivMode::Numeric),
            other => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown derivative mode `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Family(AnalyticFamily),
    Sample(LogLogSample),
}

impl Source {
    pub fn as_family(&self) -> Option<&AnalyticFamily> {
        match self {
            Source::Family(f) => Some(f),
            Source::Sample(_) => None,
        }
    }

    pub fn is_sample(&self) -> bool {
        matches!(self, Source::Sample(_))
    }

    /// `ln F(e^x)` at the given abscissae. For a sample, `xs` must be a
    /// contiguous run of its own abscissae.
    pub fn values(&self, xs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Source::Family(f) => deriv::eval_checked(f, xs),
            Source::Sample(s) => {
                let start = sample_offset(s, xs)?;
                Ok(s.ys()[start..start + xs.len()].to_vec())
            }
        }
    }

    /// `d/dx ln F(e^x)` at the given abscissae.
    pub fn dlogs(&self, xs: &[f64], mode: DerivMode) -> Result<Vec<f64>> {
        match self {
            Source::Family(f) => match mode {
                DerivMode::Numeric => Ok(xs.iter().map(|&x| deriv::dlog_ridders(f, x)).collect()),
                DerivMode::Exact => xs.iter().map(|&x| deriv::dlog_exact(f, x)).collect(),
                DerivMode::Auto => Ok(xs
                    .iter()
                    .map(|&x| f.exact_dlog(x).unwrap_or_else(|| deriv::dlog_ridders(f, x)))
                    .collect()),
            },
            Source::Sample(s) => {
                if mode == DerivMode::Exact {
                    return Err(Error::Capability(format!("sampled function `{self}`")));
                }
                let start = sample_offset(s, xs)?;
                // Differentiate on the whole sample so that only its true ends
                // use one-sided stencils.
                let d = deriv::dlog_track(s, Stencil::Central);
                Ok(d[start..start + xs.len()].to_vec())
            }
        }
    }

    pub fn uses_exact(&self, mode: DerivMode) -> bool {
        match self {
            Source::Family(f) => mode != DerivMode::Numeric && f.has_exact_dlog(),
            Source::Sample(_) => false,
        }
    }

    /// Lowest `x` at which the function may be evaluated.
    pub fn domain_start(&self) -> f64 {
        match self {
            Source::Family(f) => f.family().domain_start(),
            Source::Sample(s) => s.xs()[0],
        }
    }
}

fn sample_offset(s: &LogLogSample, xs: &[f64]) -> Result<usize> {
    let mismatch = || Error::Sample("requested abscissae are not a run of the sample grid".into());
    let first = *xs.first().ok_or_else(mismatch)?;
    let start = s.index_of(first).ok_or_else(mismatch)?;
    if start + xs.len() > s.len() || s.xs()[start..start + xs.len()] != *xs {
        return Err(mismatch());
    }
    Ok(start)
}

impl From<AnalyticFamily> for Source {
    fn from(f: AnalyticFamily) -> Self {
        Source::Family(f)
    }
}

impl From<crate::family::Family> for Source {
    fn from(f: crate::family::Family) -> Self {
        Source::Family(AnalyticFamily::new(f))
    }
}

impl From<LogLogSample> for Source {
    fn from(s: LogLogSample) -> Self {
        Source::Sample(s)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Family(fam) => fam.fmt(f),
            Source::Sample(s) => write!(f, "sample[{} points]", s.len()),
        }
    }
}

/// The working abscissae for a set of sources. Samples dictate their own grid
/// (and must agree with each other); otherwise the grid spec is used.
pub fn resolve_grid(sources: &[&Source], spec: &GridSpec) -> Result<Vec<f64>> {
    let mut grid: Option<&[f64]> = None;
    for src in sources {
        if let Source::Sample(s) = src {
            match grid {
                None => grid = Some(s.xs()),
                Some(g) if g == s.xs() => {}
                Some(_) => {
                    return Err(Error::Sample(
                        "sampled inputs must share the same abscissae".into(),
                    ))
                }
            }
        }
    }
    Ok(match grid {
        Some(g) => g.to_vec(),
        None => spec.points(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Family;

    #[test]
    fn sample_suffix_values_and_derivatives() {
        let spec = GridSpec::new(1.0, 5.0, 41).unwrap();
        let s = deriv::sample(&AnalyticFamily::new(Family::Pow { rho: 2.0 }), &spec).unwrap();
        let src = Source::from(s);
        let xs = spec.points()[10..].to_vec();
        let v = src.values(&xs).unwrap();
        assert_eq!(v[0], 2.0 * xs[0]);
        let d = src.dlogs(&xs, DerivMode::Auto).unwrap();
        assert!(d.iter().all(|v| (v - 2.0).abs() < 1e-12));
        assert!(src.dlogs(&xs, DerivMode::Exact).is_err());
        assert!(src.values(&[1.05]).is_err());
    }

    #[test]
    fn mismatched_sample_grids_are_rejected() {
        let f = AnalyticFamily::new(Family::Id);
        let a = Source::from(deriv::sample(&f, &GridSpec::new(1.0, 2.0, 8).unwrap()).unwrap());
        let b = Source::from(deriv::sample(&f, &GridSpec::new(1.0, 3.0, 8).unwrap()).unwrap());
        assert!(resolve_grid(&[&a, &b], &GridSpec::default()).is_err());
        assert_eq!(
            resolve_grid(&[&a, &a], &GridSpec::default()).unwrap().len(),
            8
        );
    }
}
