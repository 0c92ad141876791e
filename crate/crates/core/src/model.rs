//! Validation of model growth functions.
//!
//! A model is positive, strictly increasing, convex relative to `ln` (that
//! is, `m(x) = M(e^x)` is convex) and tends to infinity. Each clause is
//! checked on the sampled ray only.

use serde::Serialize;

use crate::asymptotics::{estimate_limit, LimitOptions, LimitStatus};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::sample::Track;
use crate::source::{resolve_grid, DerivMode, Source};

const MAX_WITNESSES_PER_CLAUSE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelOptions {
    pub deriv: DerivMode,
    /// Relative slack for the discrete convexity test.
    pub tol_convex: f64,
    pub limits: LimitOptions,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            deriv: DerivMode::Auto,
            tol_convex: 1e-9,
            limits: LimitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub x: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Clauses {
    pub positive: bool,
    pub derivative_positive: bool,
    pub log_convex: bool,
    pub divergent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passing: bool,
    pub clauses: Clauses,
    pub witnesses: Vec<Witness>,
    /// Always true: every clause is verified on grid points only.
    pub sampled_ray_only: bool,
    pub window: [f64; 2],
}

/// Checks the four clauses of the model definition on the working grid.
pub fn validate_model(
    candidate: &Source,
    grid: &GridSpec,
    opts: &ModelOptions,
) -> Result<ValidationReport> {
    let xs = resolve_grid(&[candidate], grid)?;
    let ys = raw_values(candidate, &xs)?;
    let mut witnesses = Vec::new();
    let push = |list: &mut Vec<Witness>, count: &mut usize, x: f64, detail: String| {
        *count += 1;
        if *count <= MAX_WITNESSES_PER_CLAUSE {
            list.push(Witness { x, detail });
        }
    };

    let mut bad = 0;
    for (&x, &y) in xs.iter().zip(&ys) {
        if !y.is_finite() {
            push(
                &mut witnesses,
                &mut bad,
                x,
                format!("ln M = {y}: M is not a positive finite number"),
            );
        }
    }
    let positive = bad == 0;

    // The remaining clauses need finite log values.
    if !positive {
        return Ok(ValidationReport {
            passing: false,
            clauses: Clauses {
                positive,
                derivative_positive: false,
                log_convex: false,
                divergent: false,
            },
            witnesses,
            sampled_ray_only: true,
            window: [xs[0], xs[xs.len() - 1]],
        });
    }

    let ds = candidate.dlogs(&xs, opts.deriv)?;
    let mut bad = 0;
    for i in 1..xs.len() - 1 {
        if ds[i].is_nan() || ds[i] <= 0.0 {
            push(
                &mut witnesses,
                &mut bad,
                xs[i],
                format!("d/dx ln M = {:e} is not positive", ds[i]),
            );
        }
    }
    let derivative_positive = bad == 0;

    let mut bad = 0;
    for i in 1..xs.len() - 1 {
        if let Some(slack) = convexity_defect(&xs, &ys, i, opts.tol_convex) {
            push(
                &mut witnesses,
                &mut bad,
                xs[i],
                format!("second difference of M(e^x) is negative (relative {slack:e})"),
            );
        }
    }
    let log_convex = bad == 0;

    let tail = estimate_limit(&Track::new(xs.clone(), ys.clone())?, &opts.limits)?;
    let divergent = tail.status == LimitStatus::DivergedToInfinity;
    if !divergent {
        witnesses.push(Witness {
            x: xs[xs.len() - 1],
            detail: format!(
                "ln M tail is {}{}, not divergent",
                tail.status.as_str(),
                tail.value.map(|v| format!(" at {v}")).unwrap_or_default()
            ),
        });
    }

    Ok(ValidationReport {
        passing: positive && derivative_positive && log_convex && divergent,
        clauses: Clauses {
            positive,
            derivative_positive,
            log_convex,
            divergent,
        },
        witnesses,
        sampled_ray_only: true,
        window: [xs[0], xs[xs.len() - 1]],
    })
}

fn raw_values(candidate: &Source, xs: &[f64]) -> Result<Vec<f64>> {
    match candidate {
        Source::Family(f) => xs
            .iter()
            .map(|&x| {
                let y = f.eval_loglog(x);
                if y.is_nan() {
                    Err(Error::Domain {
                        x,
                        detail: format!("{f} is undefined"),
                    })
                } else {
                    Ok(y)
                }
            })
            .collect(),
        Source::Sample(_) => candidate.values(xs),
    }
}

/// Discrete convexity of `m = e^y` at an interior index, tested without
/// forming `e^y`: with `a = x_i - x_{i-1}`, `b = x_{i+1} - x_i`, the second
/// divided difference has the sign of `a expm1(y_{i+1}-y_i) + b expm1(y_{i-1}-y_i)`.
/// Returns the relative defect when it is below `-tol`.
fn convexity_defect(xs: &[f64], ys: &[f64], i: usize, tol: f64) -> Option<f64> {
    let a = xs[i] - xs[i - 1];
    let b = xs[i + 1] - xs[i];
    let up = a * (ys[i + 1] - ys[i]).exp_m1();
    let down = b * (ys[i - 1] - ys[i]).exp_m1();
    let sum = up + down;
    let scale = up.abs() + down.abs();
    if sum >= -tol * scale {
        return None;
    }
    Some(if scale > 0.0 { sum / scale } else { sum })
}

/// The subharmonic-radial remark reduces to the log-convexity clause.
pub fn is_model_subharmonic_radial(
    candidate: &Source,
    grid: &GridSpec,
    opts: &ModelOptions,
) -> Result<bool> {
    Ok(validate_model(candidate, grid, opts)?.clauses.log_convex)
}

/// A model growth function that passed validation on its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGrowth {
    source: Source,
    grid: GridSpec,
    report: ValidationReport,
}

impl ModelGrowth {
    pub fn validate(source: Source, grid: &GridSpec, opts: &ModelOptions) -> Result<ModelGrowth> {
        let report = validate_model(&source, grid, opts)?;
        if !report.passing {
            let failed: Vec<&str> = [
                ("positive", report.clauses.positive),
                ("derivative_positive", report.clauses.derivative_positive),
                ("log_convex", report.clauses.log_convex),
                ("divergent", report.clauses.divergent),
            ]
            .iter()
            .filter(|c| !c.1)
            .map(|c| c.0)
            .collect();
            return Err(Error::Precondition(format!(
                "{source} is not a model growth function (failed: {})",
                failed.join(", ")
            )));
        }
        Ok(ModelGrowth {
            source,
            grid: *grid,
            report,
        })
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Family;

    fn check(f: Family, grid: &GridSpec) -> ValidationReport {
        validate_model(&f.into(), grid, &ModelOptions::default()).unwrap()
    }

    #[test]
    fn identity_and_log_are_models() {
        let g = GridSpec::default();
        let r = check(Family::Id, &g);
        assert!(r.passing, "{r:?}");
        assert!(r.witnesses.is_empty());
        assert!(check(Family::Log, &g).passing);
        assert!(check(Family::PowLog { rho: 1.0, b: 1.0 }, &g).passing);
    }

    #[test]
    fn reciprocal_fails_with_witnesses() {
        let r = check(Family::Recip, &GridSpec::default());
        assert!(!r.passing);
        assert!(r.clauses.positive);
        assert!(!r.clauses.derivative_positive);
        assert!(!r.clauses.divergent);
        assert!(r.witnesses.len() >= 2);
    }

    #[test]
    fn subharmonic_remark() {
        let g = GridSpec::default();
        let opts = ModelOptions::default();
        assert!(is_model_subharmonic_radial(&Family::Id.into(), &g, &opts).unwrap());
        let lin = Family::LinOsc { c: 2.0, a: 1.0 };
        assert!(is_model_subharmonic_radial(&lin.into(), &g, &opts).unwrap());
        // exp(-x^2) is concave in x only for |x| < 1/sqrt(2).
        let near = GridSpec::new(-0.6, 0.6, 64).unwrap();
        assert!(!is_model_subharmonic_radial(&Family::GaussLog.into(), &near, &opts).unwrap());
    }

    #[test]
    fn exact_convexity_survives_huge_values() {
        // e^{e^x} on x up to 700 overflows f64 as a value, not in log storage.
        let g = GridSpec::new(1.0, 700.0, 512).unwrap();
        let r = check(Family::Expo { c: 1.0 }, &g);
        assert!(r.passing, "{r:?}");
    }

    #[test]
    fn model_growth_requires_a_passing_report() {
        let g = GridSpec::default();
        assert!(ModelGrowth::validate(Family::Id.into(), &g, &ModelOptions::default()).is_ok());
        let err = ModelGrowth::validate(Family::Recip.into(), &g, &ModelOptions::default());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }
}
