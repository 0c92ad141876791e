//! Proximateness of `V` relative to a model `M`.
//!
//! Everything is computed in `x = ln r`. The defining ratio
//! `M V' / (M' V)` is `dlog V / dlog M`, and `rho_M = ln V / ln M`. With
//! `p(x) = rho_M(e^x)` the two are tied by
//! `dlog V / dlog M = p + (ln M / dlog M) p'`, checked numerically below.

use serde::Serialize;

use crate::asymptotics::{estimate_limit, LimitEstimate, LimitOptions};
use crate::deriv::{self, derivative_fn};
use crate::error::{Error, Result};
use crate::family::{Family, RhoFamily};
use crate::grid::GridSpec;
use crate::model::{ModelGrowth, ModelOptions};
use crate::sample::{LogLogSample, Track};
use crate::source::{resolve_grid, DerivMode, Source};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProximateOptions {
    pub deriv: DerivMode,
    pub limits: LimitOptions,
    /// Smallest `ln M` kept when forming `ln V / ln M`.
    pub min_log_model: f64,
}

impl Default for ProximateOptions {
    fn default() -> Self {
        ProximateOptions {
            deriv: DerivMode::Auto,
            limits: LimitOptions::default(),
            min_log_model: 0.1,
        }
    }
}

impl ProximateOptions {
    pub fn with_deriv(deriv: DerivMode) -> Self {
        ProximateOptions {
            deriv,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProximateVerdict {
    pub is_proximate: bool,
    pub rho: LimitEstimate,
    #[serde(skip)]
    pub l1_track: Track,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhoTrack {
    pub xs: Vec<f64>,
    pub rho_m: Vec<f64>,
    /// `d rho_M / dx`.
    pub rho_m_prime: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub verdict_i: ProximateVerdict,
    pub limit_3: LimitEstimate,
    pub limit_4: LimitEstimate,
    pub identity6_max_residual: f64,
    pub rho_agreement: Option<f64>,
    pub statement_i: bool,
    pub statement_ii: bool,
    pub theorem_consistent: bool,
    /// First abscissa kept after dropping the region `ln M < min_log_model`.
    pub x_start: f64,
}

/// Everything needed on one grid: values and log-derivatives of `V` and `M`.
struct Pair<'a> {
    v: &'a Source,
    m: &'a Source,
    xs: Vec<f64>,
    yv: Vec<f64>,
    dv: Vec<f64>,
    ym: Vec<f64>,
    dm: Vec<f64>,
}

impl<'a> Pair<'a> {
    fn new(v: &'a Source, m: &'a ModelGrowth, grid: &GridSpec, mode: DerivMode) -> Result<Self> {
        let m = m.source();
        let xs = resolve_grid(&[v, m], grid)?;
        Ok(Pair {
            v,
            m,
            yv: v.values(&xs)?,
            dv: v.dlogs(&xs, mode)?,
            ym: m.values(&xs)?,
            dm: m.dlogs(&xs, mode)?,
            xs,
        })
    }

    /// Drops the initial stretch where `ln M < min`.
    fn restricted(mut self, min: f64) -> Result<Self> {
        let start = match self.ym.iter().position(|&y| y >= min) {
            Some(i) => i,
            None => {
                return Err(Error::Domain {
                    x: self.xs[self.xs.len() - 1],
                    detail: format!("ln M < {min} on the whole grid; use a larger x1"),
                })
            }
        };
        if let Some(i) = self.ym[start..].iter().position(|&y| y < min) {
            return Err(Error::Domain {
                x: self.xs[start + i],
                detail: "ln M drops back below the restriction level".into(),
            });
        }
        for v in [
            &mut self.xs,
            &mut self.yv,
            &mut self.dv,
            &mut self.ym,
            &mut self.dm,
        ] {
            v.drain(..start);
        }
        Ok(self)
    }

    fn l1(&self) -> Result<Vec<f64>> {
        self.dv
            .iter()
            .zip(&self.dm)
            .zip(&self.xs)
            .map(|((&dv, &dm), &x)| {
                if !dm.is_finite() || dm.abs() <= 1e-300 {
                    Err(Error::Singular {
                        x,
                        detail: format!("d/dx ln M = {dm} vanishes"),
                    })
                } else {
                    Ok(dv / dm)
                }
            })
            .collect()
    }

    fn rho(&self, mode: DerivMode) -> Result<RhoTrack> {
        if let Some(i) = self.ym.iter().position(|&y| y <= 0.0) {
            return Err(Error::Domain {
                x: self.xs[i],
                detail: "ln M <= 0 here; start the grid at a larger x0".into(),
            });
        }
        let rho_m: Vec<f64> = self.yv.iter().zip(&self.ym).map(|(a, b)| a / b).collect();
        let rho_m_prime = match (self.v, self.m) {
            _ if self.v.uses_exact(mode) && self.m.uses_exact(mode) => (0..self.xs.len())
                .map(|i| {
                    (self.dv[i] * self.ym[i] - self.yv[i] * self.dm[i]) / (self.ym[i] * self.ym[i])
                })
                .collect(),
            (Source::Family(fv), Source::Family(fm)) => {
                let start = fv.family().domain_start().max(fm.family().domain_start());
                let q = |x: f64| fv.eval_loglog(x) / fm.eval_loglog(x);
                self.xs
                    .iter()
                    .map(|&x| derivative_fn(q, x, start))
                    .collect()
            }
            _ => deriv::grid_derivative(&self.xs, &rho_m),
        };
        Ok(RhoTrack {
            xs: self.xs.clone(),
            rho_m,
            rho_m_prime,
        })
    }
}

/// The track `dlog V / dlog M` on the grid.
pub fn l1_track(
    v: &Source,
    m: &ModelGrowth,
    grid: &GridSpec,
    opts: &ProximateOptions,
) -> Result<Track> {
    let pair = Pair::new(v, m, grid, opts.deriv)?;
    Track::new(pair.xs.clone(), pair.l1()?)
}

fn verdict(l1: Track, limits: &LimitOptions) -> Result<ProximateVerdict> {
    let rho = estimate_limit(&l1, limits)?;
    let is_proximate = matches!(rho.value, Some(r) if rho.is_converged() && r >= 0.0);
    Ok(ProximateVerdict {
        is_proximate,
        rho,
        l1_track: l1,
    })
}

pub fn check_proximate(
    v: &Source,
    m: &ModelGrowth,
    grid: &GridSpec,
    opts: &ProximateOptions,
) -> Result<ProximateVerdict> {
    verdict(l1_track(v, m, grid, opts)?, &opts.limits)
}

/// `rho_M = ln V / ln M` and its `x`-derivative. Fails if `ln M <= 0` anywhere.
pub fn rho_track(
    v: &Source,
    m: &ModelGrowth,
    grid: &GridSpec,
    opts: &ProximateOptions,
) -> Result<RhoTrack> {
    Pair::new(v, m, grid, opts.deriv)?.rho(opts.deriv)
}

fn limit_4_values(pair: &Pair, rho: &RhoTrack) -> Vec<f64> {
    (0..pair.xs.len())
        .map(|i| pair.ym[i] * rho.rho_m_prime[i] / pair.dm[i])
        .collect()
}

/// Estimates `lim rho_M` and `lim (M/M') rho_M' ln M`, the latter being
/// `ln M * p' / dlog M` in `x`.
pub fn limits_3_and_4(
    v: &Source,
    m: &ModelGrowth,
    grid: &GridSpec,
    opts: &ProximateOptions,
) -> Result<(LimitEstimate, LimitEstimate)> {
    let pair = Pair::new(v, m, grid, opts.deriv)?.restricted(opts.min_log_model)?;
    let rho = pair.rho(opts.deriv)?;
    let l3 = estimate_limit(
        &Track::new(rho.xs.clone(), rho.rho_m.clone())?,
        &opts.limits,
    )?;
    let l4 = estimate_limit(
        &Track::new(rho.xs.clone(), limit_4_values(&pair, &rho))?,
        &opts.limits,
    )?;
    Ok((l3, l4))
}

fn identity_residual(pair: &Pair, rho: &RhoTrack, l1: &[f64]) -> f64 {
    let n = pair.xs.len();
    (1..n - 1)
        .map(|i| {
            let rhs = rho.rho_m[i] + pair.ym[i] / pair.dm[i] * rho.rho_m_prime[i];
            (l1[i] - rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest interior violation of `l1 = rho_M + (ln M / dlog M) rho_M'`.
pub fn identity6_residual(
    v: &Source,
    m: &ModelGrowth,
    grid: &GridSpec,
    opts: &ProximateOptions,
) -> Result<f64> {
    let pair = Pair::new(v, m, grid, opts.deriv)?.restricted(opts.min_log_model)?;
    let rho = pair.rho(opts.deriv)?;
    Ok(identity_residual(&pair, &rho, &pair.l1()?))
}

/// Compares the defining limit with the two-limit characterisation.
pub fn equivalence_report(
    v: &Source,
    m: &ModelGrowth,
    grid: &GridSpec,
    opts: &ProximateOptions,
) -> Result<EquivalenceReport> {
    let pair = Pair::new(v, m, grid, opts.deriv)?.restricted(opts.min_log_model)?;
    let rho = pair.rho(opts.deriv)?;
    let l1 = pair.l1()?;
    let identity = identity_residual(&pair, &rho, &l1);
    let verdict_i = verdict(Track::new(pair.xs.clone(), l1)?, &opts.limits)?;
    let limit_3 = estimate_limit(
        &Track::new(rho.xs.clone(), rho.rho_m.clone())?,
        &opts.limits,
    )?;
    let limit_4 = estimate_limit(
        &Track::new(rho.xs.clone(), limit_4_values(&pair, &rho))?,
        &opts.limits,
    )?;

    let statement_i = verdict_i.is_proximate;
    let statement_ii = matches!(limit_3.value, Some(r) if limit_3.is_converged() && r >= 0.0)
        && limit_4.is_zero(opts.limits.tol);
    let rho_agreement = match (verdict_i.rho.value, limit_3.value) {
        (Some(a), Some(b)) => Some((a - b).abs()),
        _ => None,
    };
    let agree_tol = opts
        .limits
        .tol
        .max(verdict_i.rho.tail_residual + limit_3.tail_residual);
    let theorem_consistent = statement_i == statement_ii
        && (!(statement_i && statement_ii) || rho_agreement.is_some_and(|d| d <= agree_tol));
    Ok(EquivalenceReport {
        x_start: pair.xs[0],
        verdict_i,
        limit_3,
        limit_4,
        identity6_max_residual: identity,
        rho_agreement,
        statement_i,
        statement_ii,
        theorem_consistent,
    })
}

/// A candidate proximate order, closed form or sampled over `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum RhoSource {
    Family(RhoFamily),
    Track(Track),
}

impl std::fmt::Display for RhoSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RhoSource::Family(r) => r.fmt(f),
            RhoSource::Track(t) => write!(f, "track[{} points]", t.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValironVerdict {
    pub is_valiron: bool,
    /// `lim rho(r)`.
    pub rho: LimitEstimate,
    /// `lim r rho'(r) ln r`, which is `lim x rho_x(x)`.
    pub x_rho_prime: LimitEstimate,
}

fn rho_values(
    rho: &RhoSource,
    grid: &GridSpec,
    mode: DerivMode,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (xs, vals, ders) = match rho {
        RhoSource::Family(f) => {
            let xs = grid.points();
            let vals: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect();
            let ders = match mode {
                DerivMode::Numeric => xs
                    .iter()
                    .map(|&x| derivative_fn(|t| f.value(t), x, f.domain_start()))
                    .collect(),
                _ => xs.iter().map(|&x| f.deriv(x)).collect(),
            };
            (xs, vals, ders)
        }
        RhoSource::Track(t) => {
            if mode == DerivMode::Exact {
                return Err(Error::Capability(format!("sampled order `{rho}`")));
            }
            let ders = deriv::grid_derivative(t.xs(), t.values());
            (t.xs().to_vec(), t.values().to_vec(), ders)
        }
    };
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain {
            x: xs[i],
            detail: format!("rho = {} is not finite", vals[i]),
        });
    }
    if let Some(i) = vals.iter().position(|&v| v < 0.0) {
        return Err(Error::Precondition(format!(
            "rho must be nonnegative, found {} at x = {}",
            vals[i], xs[i]
        )));
    }
    Ok((xs, vals, ders))
}

/// Classical conditions: `rho(r)` has a finite nonnegative limit and
/// `r rho'(r) ln r -> 0`.
pub fn check_valiron(
    rho: &RhoSource,
    grid: &GridSpec,
    opts: &ProximateOptions,
) -> Result<ValironVerdict> {
    let (xs, vals, ders) = rho_values(rho, grid, opts.deriv)?;
    let xr: Vec<f64> = xs.iter().zip(&ders).map(|(x, d)| x * d).collect();
    let rho_est = estimate_limit(&Track::new(xs.clone(), vals)?, &opts.limits)?;
    let xr_est = estimate_limit(&Track::new(xs, xr)?, &opts.limits)?;
    let is_valiron = matches!(rho_est.value, Some(r) if rho_est.is_converged() && r >= 0.0)
        && xr_est.is_zero(opts.limits.tol);
    Ok(ValironVerdict {
        is_valiron,
        rho: rho_est,
        x_rho_prime: xr_est,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValironBridgeReport {
    pub valiron: ValironVerdict,
    /// `V(r) = r^{rho(r)}` checked against the model `M(r) = r`.
    pub proximate: ProximateVerdict,
    pub verdicts_agree: bool,
    pub rho_difference: Option<f64>,
    pub rho_tolerance: f64,
    pub consistent: bool,
}

/// Builds `ln V(e^x) = rho(e^x) x` and compares the two notions.
pub fn valiron_bridge(
    rho: &RhoSource,
    grid: &GridSpec,
    opts: &ProximateOptions,
) -> Result<ValironBridgeReport> {
    let valiron = check_valiron(rho, grid, opts)?;
    let (v, model_grid) = match rho {
        RhoSource::Family(f) => (Source::from(Family::Valiron(*f)), *grid),
        RhoSource::Track(t) => {
            let ys = t.xs().iter().zip(t.values()).map(|(x, r)| r * x).collect();
            let s = LogLogSample::new(t.xs().to_vec(), ys)?;
            let g = GridSpec::new(t.xs()[0], t.xs()[t.len() - 1], t.len())?;
            (Source::from(s), g)
        }
    };
    let id = ModelGrowth::validate(
        Family::Id.into(),
        &model_grid,
        &ModelOptions {
            deriv: opts.deriv,
            limits: opts.limits,
            ..Default::default()
        },
    )?;
    let proximate = check_proximate(&v, &id, grid, opts)?;
    let verdicts_agree = valiron.is_valiron == proximate.is_proximate;
    let rho_difference = match (valiron.rho.value, proximate.rho.value) {
        (Some(a), Some(b)) => Some((a - b).abs()),
        _ => None,
    };
    let rho_tolerance =
        (2.0 * opts.limits.tol).max(valiron.rho.tail_residual + proximate.rho.tail_residual);
    let consistent = verdicts_agree
        && (!valiron.is_valiron || rho_difference.is_some_and(|d| d <= rho_tolerance));
    Ok(ValironBridgeReport {
        valiron,
        proximate,
        verdicts_agree,
        rho_difference,
        rho_tolerance,
        consistent,
    })
}
