//! Construction of a proximate growth function `V` with `limsup A/V = 1`.
//!
//! Work happens in the coordinates `s = ln M`, `phi = ln A`. On the tail half
//! of the grid `ln V` is the line of slope `rho*` through the highest point of
//! `phi - rho* s`, so `ln V / ln M` settles at `rho*` and `A/V` reaches 1
//! there. Before the tail `ln V` is the upper concave hull of the data,
//! joined to that line and smoothed by averaging over a window in `s`.

use std::io::Write;

use serde::Serialize;

use crate::asymptotics::{estimate_limsup, LimitEstimate, LimitOptions, LimitStatus};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::ModelGrowth;
use crate::proximate::{check_proximate, rho_track, ProximateOptions, ProximateVerdict, RhoTrack};
use crate::sample::{LogLogSample, Track};
use crate::source::{resolve_grid, DerivMode, Source};

pub const MIN_CONSTRUCT_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstructOptions {
    pub deriv: DerivMode,
    pub limits: LimitOptions,
    /// Smoothing window as a fraction of the `s` range.
    pub window_frac: f64,
    pub touch_tol: f64,
    pub construct_tol: f64,
    /// Grid points with `ln M` below this are dropped.
    pub min_log_model: f64,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            deriv: DerivMode::Auto,
            limits: LimitOptions::default(),
            window_frac: 0.02,
            touch_tol: 1e-3,
            construct_tol: 1e-2,
            min_log_model: 0.1,
        }
    }
}

impl ConstructOptions {
    fn proximate(&self) -> ProximateOptions {
        ProximateOptions {
            deriv: self.deriv,
            limits: self.limits,
            min_log_model: self.min_log_model,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub rho_star: Option<f64>,
    pub finite: bool,
    pub estimate: LimitEstimate,
    /// `ln(1 + A) / ln M` on the restricted grid.
    #[serde(skip)]
    pub track: Track,
}

/// Grid data after the `ln M` restriction.
struct Coords {
    xs: Vec<f64>,
    s: Vec<f64>,
    phi: Vec<f64>,
}

fn coords(a: &Source, m: &ModelGrowth, grid: &GridSpec, opts: &ConstructOptions) -> Result<Coords> {
    let xs = resolve_grid(&[a, m.source()], grid)?;
    let s = m.source().values(&xs)?;
    let start = s
        .iter()
        .position(|&v| v >= opts.min_log_model)
        .ok_or_else(|| {
            Error::Degenerate(format!("ln M < {} on the whole grid", opts.min_log_model))
        })?;
    // A is only evaluated where ln M is large enough, which keeps
    // compositions such as `f@log` inside their domain.
    let c = Coords {
        phi: a.values(&xs[start..])?,
        xs: xs[start..].to_vec(),
        s: s[start..].to_vec(),
    };
    if let Some(i) = c.s.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(format!(
            "ln M is not strictly increasing at x = {}",
            c.xs[i + 1]
        )));
    }
    if let Some(i) = c.phi.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::Precondition(format!(
            "A is not increasing at x = {}",
            c.xs[i + 1]
        )));
    }
    Ok(c)
}

/// `ln(1 + e^phi)` without overflow.
fn ln_one_plus_exp(phi: f64) -> f64 {
    if phi > 0.0 {
        phi + (-phi).exp().ln_1p()
    } else {
        phi.exp().ln_1p()
    }
}

fn order_from(c: &Coords, opts: &ConstructOptions) -> Result<OrderEstimate> {
    let vals = c
        .phi
        .iter()
        .zip(&c.s)
        .map(|(&p, &s)| ln_one_plus_exp(p) / s)
        .collect();
    let track = Track::new(c.xs.clone(), vals)?;
    let estimate = estimate_limsup(&track, &opts.limits)?;
    if estimate.status == LimitStatus::DivergedToInfinity {
        return Err(Error::InfiniteOrder(
            "ln(1 + A) / ln M is unbounded on the grid".into(),
        ));
    }
    Ok(OrderEstimate {
        rho_star: estimate.value,
        finite: estimate.is_converged(),
        estimate,
        track,
    })
}

/// `limsup ln(1 + A) / ln M` over the tail window.
pub fn order_estimate(
    a: &Source,
    m: &ModelGrowth,
    grid: &GridSpec,
    opts: &ConstructOptions,
) -> Result<OrderEstimate> {
    order_from(&coords(a, m, grid, opts)?, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quality {
    /// `max A/V` over the whole grid.
    pub q_upper: f64,
    /// `max A/V` over the last half.
    pub q_touch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionResult {
    #[serde(skip)]
    pub v: LogLogSample,
    #[serde(skip)]
    pub ln_a: Vec<f64>,
    #[serde(skip)]
    pub rho_m: RhoTrack,
    pub rho_star: f64,
    pub order: OrderEstimate,
    pub touch_indices: Vec<usize>,
    pub quality: Quality,
    pub proximate: ProximateVerdict,
    /// Slopes of the pre-tail hull followed by the terminal slope `rho*`.
    pub hull_slopes: Vec<f64>,
    /// True when the pre-tail hull ends flatter than `rho*`, which leaves a
    /// convex corner where the terminal ray starts.
    pub join_convex: bool,
    pub smoothing_window: f64,
    /// Largest amount by which smoothing raised the hull.
    pub smoothing_slack: f64,
    /// Upward shift applied so that `ln V >= ln A` holds exactly.
    pub lift: f64,
    /// `max |ln V - ln A|` over the last half.
    pub tail_gap: f64,
    pub rho_tolerance: f64,
    pub success: bool,
}

impl ConstructionResult {
    /// Rows `x,lnA,lnV,rho_m`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "lnA", "lnV", "rho_m"])?;
        for i in 0..self.v.len() {
            w.write_record([
                self.v.xs()[i].to_string(),
                self.ln_a[i].to_string(),
                self.v.ys()[i].to_string(),
                self.rho_m.rho_m[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Upper concave hull (monotone chain) of points sorted by strictly
/// increasing abscissa. Returns vertex indices; collinear points are dropped.
pub fn upper_hull(u: &[f64], e: &[f64]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::with_capacity(u.len());
    for i in 0..u.len() {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (u[b] - u[a]) * (e[i] - e[a]) - (e[b] - e[a]) * (u[i] - u[a]);
            if cross >= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    h
}

/// Piecewise-linear function through vertices, continued linearly to the
/// right with a given slope, with its exact antiderivative from the first
/// vertex.
struct Polyline {
    u: Vec<f64>,
    e: Vec<f64>,
    tail_slope: f64,
    cum: Vec<f64>,
}

impl Polyline {
    fn new(u: Vec<f64>, e: Vec<f64>, tail_slope: f64) -> Self {
        let mut cum = vec![0.0; u.len()];
        for k in 1..u.len() {
            cum[k] = cum[k - 1] + 0.5 * (e[k] + e[k - 1]) * (u[k] - u[k - 1]);
        }
        Polyline {
            u,
            e,
            tail_slope,
            cum,
        }
    }

    fn integral_to(&self, s: f64) -> f64 {
        let last = self.u.len() - 1;
        if s >= self.u[last] {
            let d = s - self.u[last];
            return self.cum[last] + self.e[last] * d + 0.5 * self.tail_slope * d * d;
        }
        let k = self.u.partition_point(|&v| v <= s).saturating_sub(1);
        let d = s - self.u[k];
        let slope = (self.e[k + 1] - self.e[k]) / (self.u[k + 1] - self.u[k]);
        self.cum[k] + self.e[k] * d + 0.5 * slope * d * d
    }

    fn mean(&self, s: f64, w: f64) -> f64 {
        (self.integral_to(s + w) - self.integral_to(s)) / w
    }

    fn value(&self, s: f64) -> f64 {
        let last = self.u.len() - 1;
        if s >= self.u[last] {
            return self.e[last] + self.tail_slope * (s - self.u[last]);
        }
        let k = self.u.partition_point(|&v| v <= s).saturating_sub(1);
        let t = (s - self.u[k]) / (self.u[k + 1] - self.u[k]);
        self.e[k] + t * (self.e[k + 1] - self.e[k])
    }
}

/// Builds `V` from `A` and a model `M`; see the module notes.
pub fn construct_proximate(
    a: &Source,
    m: &ModelGrowth,
    grid: &GridSpec,
    opts: &ConstructOptions,
) -> Result<ConstructionResult> {
    let c = coords(a, m, grid, opts)?;
    let n = c.xs.len();
    if n < MIN_CONSTRUCT_POINTS {
        return Err(Error::Degenerate(format!(
            "{n} points with ln M >= {}, need {MIN_CONSTRUCT_POINTS}",
            opts.min_log_model
        )));
    }
    let order = order_from(&c, opts)?;
    let rho_star = match order.rho_star {
        Some(r) if order.finite => r,
        _ => {
            return Err(Error::Precondition(format!(
                "order of A relative to M could not be estimated ({})",
                order.estimate.status.as_str()
            )))
        }
    };

    let x_last = c.xs[n - 1];
    let cut = x_last - opts.limits.tail_fraction * (x_last - c.xs[0]);
    let t0 = c.xs.partition_point(|&x| x < cut).min(n - 1);

    // Terminal ray through the best tail point.
    let i_star = (t0..n)
        .max_by(|&i, &j| (c.phi[i] - rho_star * c.s[i]).total_cmp(&(c.phi[j] - rho_star * c.s[j])))
        .expect("tail is nonempty");
    let ray = |s: f64| c.phi[i_star] + rho_star * (s - c.s[i_star]);

    let mut ln_v = vec![0.0; n];
    for (v, &s) in ln_v[t0..].iter_mut().zip(&c.s[t0..]) {
        *v = ray(s);
    }

    let s_range = c.s[n - 1] - c.s[0];
    let w = opts.window_frac.max(0.0) * s_range;
    let mut hull_slopes = Vec::new();
    let mut join_convex = false;
    let mut smoothing_slack: f64 = 0.0;
    if t0 > 0 {
        let mut u: Vec<f64> = c.s[..t0].to_vec();
        let mut e: Vec<f64> = c.phi[..t0].to_vec();
        u.push(c.s[t0]);
        e.push(ray(c.s[t0]));
        let h = upper_hull(&u, &e);
        let hu: Vec<f64> = h.iter().map(|&k| u[k]).collect();
        let he: Vec<f64> = h.iter().map(|&k| e[k]).collect();
        for k in 1..hu.len() {
            hull_slopes.push((he[k] - he[k - 1]) / (hu[k] - hu[k - 1]));
        }
        let last_slope = hull_slopes.last().copied().unwrap_or(rho_star);
        join_convex = last_slope < rho_star;
        // Continuing with the last hull slope keeps the extension concave.
        let ext = if join_convex { last_slope } else { rho_star };
        let poly = Polyline::new(hu, he, ext);
        let s_join = c.s[t0];
        let join_value = ray(s_join);
        for (v, &s) in ln_v[..t0].iter_mut().zip(&c.s[..t0]) {
            let hull = poly.value(s);
            *v = if w > 0.0 {
                join_value + poly.mean(s, w) - poly.mean(s_join, w)
            } else {
                hull
            };
            smoothing_slack = smoothing_slack.max(*v - hull);
        }
    }
    hull_slopes.push(rho_star);

    let lift = c
        .phi
        .iter()
        .zip(&ln_v)
        .map(|(p, v)| p - v)
        .fold(0.0, f64::max);
    if lift > 0.0 {
        for v in &mut ln_v {
            *v += lift;
        }
    }

    let ratio: Vec<f64> = c
        .phi
        .iter()
        .zip(&ln_v)
        .map(|(p, v)| (p - v).exp())
        .collect();
    let q_upper = ratio.iter().copied().fold(0.0, f64::max);
    let q_touch = ratio[t0..].iter().copied().fold(0.0, f64::max);
    let touch_indices = (0..n)
        .filter(|&i| ratio[i] >= 1.0 - opts.touch_tol)
        .collect();
    let tail_gap = (t0..n)
        .map(|i| (ln_v[i] - c.phi[i]).abs())
        .fold(0.0, f64::max);

    let v = LogLogSample::new(c.xs.clone(), ln_v)?;
    let v_src = Source::Sample(v.clone());
    let popts = opts.proximate();
    let proximate = check_proximate(&v_src, m, grid, &popts)?;
    let rho_m = rho_track(&v_src, m, grid, &popts)?;

    let rho_tolerance =
        2e-2_f64.max(3.0 * (proximate.rho.tail_residual + order.estimate.tail_residual));
    let rho_ok = proximate
        .rho
        .value
        .is_some_and(|r| (r - rho_star).abs() <= rho_tolerance);
    let success = proximate.is_proximate
        && rho_ok
        && q_upper <= 1.0 + opts.construct_tol
        && q_touch >= 1.0 - opts.construct_tol;

    Ok(ConstructionResult {
        v,
        ln_a: c.phi,
        rho_m,
        rho_star,
        order,
        touch_indices,
        quality: Quality { q_upper, q_touch },
        proximate,
        hull_slopes,
        join_convex,
        smoothing_window: w,
        smoothing_slack,
        lift,
        tail_gap,
        rho_tolerance,
        success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Family;

    fn id(grid: &GridSpec) -> ModelGrowth {
        ModelGrowth::validate(Family::Id.into(), grid, &Default::default()).unwrap()
    }

    #[test]
    fn hull_of_a_tent() {
        let u = [0.0, 1.0, 2.0, 3.0, 4.0];
        let e = [0.0, 2.0, 1.0, 1.5, 0.0];
        assert_eq!(upper_hull(&u, &e), vec![0, 1, 3, 4]);
        let line = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(upper_hull(&u, &line), vec![0, 4]);
    }

    #[test]
    fn polyline_mean_of_a_line_is_its_midpoint() {
        let p = Polyline::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 4.0], 2.0);
        assert!((p.mean(0.5, 3.0) - 4.0).abs() < 1e-14);
        assert!((p.value(3.0) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn square_is_reproduced() {
        let g = GridSpec::default();
        let r = construct_proximate(
            &Family::Pow { rho: 2.0 }.into(),
            &id(&g),
            &g,
            &Default::default(),
        )
        .unwrap();
        assert!(r.success, "{r:?}");
        assert_eq!(r.rho_star, 2.0);
        assert!(r.tail_gap < 1e-9);
        assert!((r.quality.q_upper - 1.0).abs() < 1e-9);
        assert!(r
            .v
            .ys()
            .iter()
            .zip(r.v.xs())
            .all(|(y, x)| (y - 2.0 * x).abs() < 1e-9));
    }

    #[test]
    fn slow_oscillation_touches_at_a_crest() {
        let g = GridSpec::new(1.0, 4000.0, 4096).unwrap();
        let a = Source::from(Family::OscSlow { rho: 2.0, a: 1.0 });
        let r = construct_proximate(&a, &id(&g), &g, &Default::default()).unwrap();
        assert!(r.success, "{r:?}");
        assert!((r.rho_star - 3.0).abs() < 2e-2);
        assert!(r.quality.q_upper <= 1.01);
        // sin(ln x) peaks at ln x = pi/2 + 2 pi inside the tail.
        let ln_crest = std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU;
        let near = r
            .touch_indices
            .iter()
            .any(|&i| (r.v.xs()[i].ln() - ln_crest).abs() < 0.05);
        assert!(near);
    }

    #[test]
    fn exponential_has_infinite_order() {
        let g = GridSpec::new(1.0, 50.0, 512).unwrap();
        let err = order_estimate(
            &Family::Expo { c: 1.0 }.into(),
            &id(&g),
            &g,
            &Default::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InfiniteOrder(_)));
    }

    #[test]
    fn decreasing_input_is_rejected() {
        let g = GridSpec::default();
        let err =
            order_estimate(&Family::Recip.into(), &id(&g), &g, &Default::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn too_few_points_is_degenerate() {
        let g = GridSpec::new(1.0, 100.0, 40).unwrap();
        let err = construct_proximate(
            &Family::Pow { rho: 2.0 }.into(),
            &id(&g),
            &g,
            &Default::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }
}
