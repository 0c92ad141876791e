//! Sampling of families and the derivative engine.
//!
//! Sampled data are differentiated with grid differences only. Families
//! without a usable closed form are differentiated pointwise with Ridders'
//! extrapolated central differences, which are independent of the grid step.

use crate::error::{Error, Result};
use crate::family::AnalyticFamily;
use crate::grid::GridSpec;
use crate::sample::LogLogSample;

/// Finite-difference stencil for sampled data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// Three-point central difference.
    #[default]
    Central,
    /// Five-point central difference; needs two neighbours on each side and
    /// a uniform grid around the point.
    FivePoint,
}

/// Samples `family` on the uniform grid described by `spec`.
pub fn sample(family: &AnalyticFamily, spec: &GridSpec) -> Result<LogLogSample> {
    sample_at(family, &spec.points())
}

/// Samples `family` at arbitrary strictly increasing abscissae.
pub fn sample_at(family: &AnalyticFamily, xs: &[f64]) -> Result<LogLogSample> {
    let ys = eval_checked(family, xs)?;
    LogLogSample::new(xs.to_vec(), ys)
}

pub(crate) fn eval_checked(family: &AnalyticFamily, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let y = family.eval_loglog(x);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::Domain {
                    x,
                    detail: format!("{family} evaluates to {y}"),
                })
            }
        })
        .collect()
}

/// Central difference at an interior index.
pub fn dlog_numeric(s: &LogLogSample, i: usize) -> Result<f64> {
    dlog_numeric_with(s, i, Stencil::Central, false)
}

/// Grid derivative at index `i`. With `boundary` set, the two end points are
/// handled by second-order one-sided differences instead of being rejected.
pub fn dlog_numeric_with(
    s: &LogLogSample,
    i: usize,
    stencil: Stencil,
    boundary: bool,
) -> Result<f64> {
    let n = s.len();
    if i >= n {
        return Err(Error::Index { index: i, len: n });
    }
    let (x, y) = (s.xs(), s.ys());
    if i == 0 || i == n - 1 {
        if !boundary {
            return Err(Error::Index { index: i, len: n });
        }
        return Ok(if i == 0 {
            one_sided(x[0], x[1], x[2], y[0], y[1], y[2])
        } else {
            one_sided(x[n - 1], x[n - 2], x[n - 3], y[n - 1], y[n - 2], y[n - 3])
        });
    }
    if stencil == Stencil::FivePoint && i >= 2 && i + 2 < n {
        let h = (x[i + 2] - x[i - 2]) / 4.0;
        let uniform = (1..=2).all(|k| {
            ((x[i + k] - x[i]) - k as f64 * h).abs() <= 1e-9 * h
                && ((x[i] - x[i - k]) - k as f64 * h).abs() <= 1e-9 * h
        });
        if uniform {
            return Ok((y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h));
        }
    }
    Ok((y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]))
}

/// Derivative of the quadratic through three points, taken at the first.
fn one_sided(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> f64 {
    let h1 = x1 - x0;
    let h2 = x2 - x0;
    (y1 - y0) * h2 / (h1 * (h2 - h1)) - (y2 - y0) * h1 / (h2 * (h2 - h1))
}

/// Grid derivative at every point, end points included.
pub fn dlog_track(s: &LogLogSample, stencil: Stencil) -> Vec<f64> {
    (0..s.len())
        .map(|i| dlog_numeric_with(s, i, stencil, true).expect("index in range"))
        .collect()
}

/// Grid derivative of a plain value array, end points one-sided.
pub(crate) fn grid_derivative(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                one_sided(xs[0], xs[1], xs[2], ys[0], ys[1], ys[2])
            } else if i == n - 1 {
                one_sided(
                    xs[n - 1],
                    xs[n - 2],
                    xs[n - 3],
                    ys[n - 1],
                    ys[n - 2],
                    ys[n - 3],
                )
            } else {
                (ys[i + 1] - ys[i - 1]) / (xs[i + 1] - xs[i - 1])
            }
        })
        .collect()
}

/// Closed-form `d/dx ln F(e^x)`.
pub fn dlog_exact(family: &AnalyticFamily, x: f64) -> Result<f64> {
    family
        .exact_dlog(x)
        .ok_or_else(|| Error::Capability(family.to_string()))
}

/// Ridders' method: central differences at geometrically shrinking steps,
/// extrapolated with a Neville tableau. Returns the estimate and its error.
pub fn ridders(f: impl Fn(f64) -> f64, x: f64, h0: f64) -> (f64, f64) {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 10;
    const SAFE: f64 = 2.0;

    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut hh = h0;
    a[0][0] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
    let mut ans = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        hh /= CON;
        a[0][i] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let errt = (a[j][i] - a[j - 1][i])
                .abs()
                .max((a[j][i] - a[j - 1][i - 1]).abs());
            if errt <= err {
                err = errt;
                ans = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    (ans, err)
}

pub(crate) const RIDDERS_H0: f64 = 0.1;

/// Numerical derivative of a function of `x` defined for `x > start`.
pub(crate) fn derivative_fn(f: impl Fn(f64) -> f64, x: f64, start: f64) -> f64 {
    let room = x - start;
    if room >= 2.0 * RIDDERS_H0 || !room.is_finite() {
        return ridders(&f, x, RIDDERS_H0).0;
    }
    if room > 2e-4 {
        return ridders(&f, x, 0.5 * room).0;
    }
    // Too close to the domain edge for a symmetric stencil.
    let h = 1e-4;
    (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
}

/// Numerical `d/dx ln F(e^x)` of a family, ignoring any closed form.
pub fn dlog_ridders(family: &AnalyticFamily, x: f64) -> f64 {
    derivative_fn(|t| family.eval_loglog(t), x, family.family().domain_start())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Family;

    fn fam(f: Family) -> AnalyticFamily {
        AnalyticFamily::new(f)
    }

    #[test]
    fn pow_sample_is_exact() {
        let s = sample(
            &fam(Family::Pow { rho: 2.0 }),
            &GridSpec::new(1.0, 10.0, 10).unwrap(),
        )
        .unwrap();
        for (x, y) in s.xs().iter().zip(s.ys()) {
            assert_eq!(*y, 2.0 * x);
        }
        for i in 1..9 {
            assert!((dlog_numeric(&s, i).unwrap() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn undefined_region_is_a_domain_error() {
        let f = fam(Family::Id.restricted(2.0));
        let err = sample(&f, &GridSpec::new(1.0, 10.0, 10).unwrap()).unwrap_err();
        match err {
            Error::Domain { x, .. } => assert_eq!(x, 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn central_difference_exact_for_quadratics() {
        let xs: Vec<f64> = (0..20).map(|k| 0.25 * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let s = LogLogSample::new(xs.clone(), ys).unwrap();
        for (i, x) in xs.iter().enumerate().take(19).skip(1) {
            assert!((dlog_numeric(&s, i).unwrap() - 2.0 * x).abs() < 1e-12);
        }
        // The one-sided stencil is exact for quadratics too.
        assert!(
            dlog_numeric_with(&s, 0, Stencil::Central, true)
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!((dlog_numeric_with(&s, 19, Stencil::Central, true).unwrap() - 9.5).abs() < 1e-12);
    }

    #[test]
    fn log_data_derivative_at_100() {
        let h = 0.01;
        let xs: Vec<f64> = (-5..=5).map(|k| 100.0 + h * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let s = LogLogSample::new(xs, ys).unwrap();
        assert!((dlog_numeric(&s, 5).unwrap() - 0.01).abs() < 1e-7);
        let five = dlog_numeric_with(&s, 5, Stencil::FivePoint, false).unwrap();
        assert!((five - 0.01).abs() < 1e-10);
    }

    #[test]
    fn index_errors() {
        let xs: Vec<f64> = (0..8).map(f64::from).collect();
        let s = LogLogSample::new(xs.clone(), xs).unwrap();
        assert!(matches!(dlog_numeric(&s, 0), Err(Error::Index { .. })));
        assert!(matches!(dlog_numeric(&s, 7), Err(Error::Index { .. })));
        assert!(matches!(dlog_numeric(&s, 8), Err(Error::Index { .. })));
    }

    #[test]
    fn exact_values_from_the_catalog() {
        assert_eq!(
            dlog_exact(&fam(Family::Pow { rho: 2.0 }), 7.0).unwrap(),
            2.0
        );
        let v = dlog_exact(&fam(Family::PowLog { rho: 3.0, b: 2.0 }), 100.0).unwrap();
        assert!((v - 3.02).abs() < 1e-15);
        let x: f64 = 4.2;
        let v = dlog_exact(&fam(Family::Osc { rho: 2.0, a: 1.0 }), x).unwrap();
        assert!((v - (2.0 + x.sin() + x * x.cos())).abs() < 1e-15);
    }

    #[test]
    fn hidden_derivative_is_a_capability_error() {
        let f = fam(Family::Id).without_exact_dlog();
        assert!(matches!(dlog_exact(&f, 1.0), Err(Error::Capability(_))));
    }

    #[test]
    fn ridders_is_accurate_where_grid_differences_are_not() {
        let f = fam(Family::PowLog { rho: 3.0, b: 2.0 });
        for &x in &[1.2, 3.4, 100.0, 9999.0] {
            let exact = 3.0 + 2.0 / x;
            assert!((dlog_ridders(&f, x) - exact).abs() < 1e-10, "x = {x}");
        }
        let e = fam(Family::Expo { c: 1.0 });
        let x = 600.0;
        let rel = (dlog_ridders(&e, x) - x.exp()) / x.exp();
        assert!(rel.abs() < 1e-9);
    }

    #[test]
    fn ridders_respects_the_domain_edge() {
        let f = fam(Family::Log);
        let x = 0.05;
        assert!((dlog_ridders(&f, x) - 1.0 / x).abs() < 1e-6 / x);
    }

    #[test]
    fn sampling_is_bit_deterministic() {
        let f = fam(Family::OscSlow { rho: 2.0, a: 1.0 });
        let spec = GridSpec::default();
        let a = sample(&f, &spec).unwrap();
        let b = sample(&f, &spec).unwrap();
        assert!(a
            .ys()
            .iter()
            .zip(b.ys())
            .all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}
