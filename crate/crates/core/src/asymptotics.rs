//! Limits and limsups at `+inf` of sampled tracks, and the L'Hôpital check.
//!
//! The tail window (by default the last half of the abscissa range) is cut
//! into eight contiguous chunks. A limit is accepted when the per-chunk
//! oscillation amplitude decays monotonically to below `tol`.

use serde::Serialize;

use crate::deriv;
use crate::error::{Error, Result};
use crate::family::AnalyticFamily;
use crate::grid::GridSpec;
use crate::sample::Track;
use crate::source::{DerivMode, Source};

pub const MIN_TRACK_LEN: usize = 32;
const CHUNKS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitStatus {
    Converged,
    DivergedToInfinity,
    Oscillating,
    Inconclusive,
}

impl LimitStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LimitStatus::Converged => "converged",
            LimitStatus::DivergedToInfinity => "diverged-to-infinity",
            LimitStatus::Oscillating => "oscillating",
            LimitStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub status: LimitStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub tail_residual: f64,
    pub window: [f64; 2],
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl LimitEstimate {
    pub fn is_converged(&self) -> bool {
        self.status == LimitStatus::Converged
    }

    /// True when the estimate converged to a value that is zero within
    /// `max(tol, 3 * tail_residual)`.
    pub fn is_zero(&self, tol: f64) -> bool {
        match self.value {
            Some(v) if self.is_converged() => v.abs() <= tol.max(3.0 * self.tail_residual),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitOptions {
    /// Fraction of the abscissa range forming the tail window.
    pub tail_fraction: f64,
    pub tol: f64,
    pub divergence_threshold: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            tail_fraction: 0.5,
            tol: 1e-2,
            divergence_threshold: 1e6,
        }
    }
}

impl LimitOptions {
    pub fn with_tol(tol: f64) -> Self {
        LimitOptions {
            tol,
            ..Default::default()
        }
    }
}

struct Tail<'a> {
    xs: &'a [f64],
    vs: &'a [f64],
    bounds: [usize; CHUNKS + 1],
}

impl<'a> Tail<'a> {
    fn new(track: &'a Track, opts: &LimitOptions) -> Result<Self> {
        let n = track.len();
        if n < MIN_TRACK_LEN {
            return Err(Error::TrackTooShort {
                len: n,
                min: MIN_TRACK_LEN,
            });
        }
        if !(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0) {
            return Err(Error::Precondition(format!(
                "tail fraction must lie in (0, 1], got {}",
                opts.tail_fraction
            )));
        }
        let xs = track.xs();
        let span = xs[n - 1] - xs[0];
        let cut = xs[n - 1] - opts.tail_fraction * span;
        let mut start = xs.partition_point(|&x| x < cut);
        // Always leave at least two points per chunk.
        start = start.min(n - 2 * CHUNKS);
        let m = n - start;
        let mut bounds = [0usize; CHUNKS + 1];
        for (k, b) in bounds.iter_mut().enumerate() {
            *b = k * m / CHUNKS;
        }
        Ok(Tail {
            xs: &xs[start..],
            vs: &track.values()[start..],
            bounds,
        })
    }

    fn window(&self) -> [f64; 2] {
        [self.xs[0], self.xs[self.xs.len() - 1]]
    }

    fn chunk(&self, k: usize) -> (&[f64], &[f64]) {
        let r = self.bounds[k]..self.bounds[k + 1];
        (&self.xs[r.clone()], &self.vs[r])
    }

    fn amplitude(&self, k: usize) -> f64 {
        let (_, v) = self.chunk(k);
        max(v) - min(v)
    }

    fn mean(&self, k: usize) -> f64 {
        let (_, v) = self.chunk(k);
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn mean_x(&self, k: usize) -> f64 {
        let (x, _) = self.chunk(k);
        x.iter().sum::<f64>() / x.len() as f64
    }

    fn nondecreasing(&self) -> bool {
        self.vs
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-12 * (1.0 + w[0].abs()))
    }

    fn nonincreasing(&self) -> bool {
        self.vs
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()))
    }

    /// Monotone growth that is either huge, infinite, or no faster-decaying
    /// than `1/x` in its increments (so not summable, as for `ln x`).
    fn diverges(&self, opts: &LimitOptions) -> bool {
        if !self.nondecreasing() {
            return false;
        }
        let last = self.vs[self.vs.len() - 1];
        if last == f64::INFINITY || last >= opts.divergence_threshold {
            return true;
        }
        match self.growth_exponent() {
            Some(p) => p <= 1.05,
            None => false,
        }
    }

    /// Minus the slope of `ln(rise between successive chunk means)` against
    /// `ln(mean x)`.
    fn growth_exponent(&self) -> Option<f64> {
        let mut pts = Vec::with_capacity(CHUNKS);
        for k in 0..CHUNKS - 1 {
            let rise = self.mean(k + 1) - self.mean(k);
            let xbar = 0.5 * (self.mean_x(k) + self.mean_x(k + 1));
            if !(rise > 0.0 && rise.is_finite()) {
                return None;
            }
            if xbar > 0.0 {
                pts.push((xbar.ln(), rise.ln()));
            }
        }
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx <= 0.0 {
            return None;
        }
        Some(-sxy / sxx)
    }

    fn has_nonfinite(&self) -> bool {
        self.vs.iter().any(|v| !v.is_finite())
    }
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Estimates `lim_{x -> inf}` of the track.
pub fn estimate_limit(track: &Track, opts: &LimitOptions) -> Result<LimitEstimate> {
    let tail = Tail::new(track, opts)?;
    let window = tail.window();
    let estimate = |status, value, tail_residual| LimitEstimate {
        status,
        value,
        tail_residual,
        window,
        warnings: Vec::new(),
    };

    if tail.has_nonfinite() {
        let status = if tail.diverges(opts) {
            LimitStatus::DivergedToInfinity
        } else {
            LimitStatus::Inconclusive
        };
        return Ok(estimate(status, None, f64::INFINITY));
    }

    let amps: Vec<f64> = (0..CHUNKS).map(|k| tail.amplitude(k)).collect();
    let floor = 1e-3 * opts.tol;
    let decaying = amps
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9) || w[1] <= floor);
    let last = CHUNKS - 1;
    let value = tail.mean(last);

    let deviation = (CHUNKS - 2..CHUNKS)
        .flat_map(|k| tail.chunk(k).1.iter())
        .map(|v| (v - value).abs())
        .fold(0.0, f64::max);
    let (m6, m7) = (tail.mean(last - 1), tail.mean(last));
    let (x6, x7) = (tail.mean_x(last - 1), tail.mean_x(last));
    // Distance still to travel if the track keeps decaying like c/x.
    let drift = if x6 > 0.0 {
        x6 * (m7 - m6).abs() / (x7 - x6)
    } else {
        (m7 - m6).abs()
    };
    let residual = deviation.max(drift);

    if decaying && amps[last] <= opts.tol {
        return Ok(estimate(LimitStatus::Converged, Some(value), residual));
    }
    if tail.diverges(opts) {
        return Ok(estimate(LimitStatus::DivergedToInfinity, None, residual));
    }
    let monotone = tail.nondecreasing() || tail.nonincreasing();
    if !monotone && amps[last] >= 0.5 * amps[0] {
        return Ok(estimate(LimitStatus::Oscillating, None, residual));
    }
    Ok(estimate(LimitStatus::Inconclusive, None, residual))
}

/// Estimates `limsup_{x -> inf}` as the maximum over the tail window.
///
/// Converged when the running maximum has settled (to within `tol`) by the
/// middle of the window.
pub fn estimate_limsup(track: &Track, opts: &LimitOptions) -> Result<LimitEstimate> {
    let tail = Tail::new(track, opts)?;
    let window = tail.window();
    if tail.diverges(opts) {
        return Ok(LimitEstimate {
            status: LimitStatus::DivergedToInfinity,
            value: None,
            tail_residual: f64::INFINITY,
            window,
            warnings: Vec::new(),
        });
    }
    if tail.vs.iter().any(|v| v.is_infinite() && *v > 0.0) {
        return Ok(LimitEstimate {
            status: LimitStatus::DivergedToInfinity,
            value: None,
            tail_residual: f64::INFINITY,
            window,
            warnings: Vec::new(),
        });
    }
    let maxima: Vec<f64> = (0..CHUNKS).map(|k| max(tail.chunk(k).1)).collect();
    let running = |upto: usize| {
        maxima[..=upto]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (early, full) = (running(CHUNKS / 2 - 1), running(CHUNKS - 1));
    let residual = full - early;
    let mut warnings = Vec::new();
    let spread = (maxima[CHUNKS - 1] - maxima[CHUNKS - 2]).abs();
    if spread > opts.tol {
        warnings.push(format!(
            "maxima of the last two windows differ by {spread:.3e}; the window may miss a crest",
        ));
    }
    let converged = residual.is_finite() && residual <= opts.tol;
    Ok(LimitEstimate {
        status: if converged {
            LimitStatus::Converged
        } else {
            LimitStatus::Inconclusive
        },
        value: converged.then_some(full),
        tail_residual: if residual.is_finite() {
            residual
        } else {
            f64::INFINITY
        },
        window,
        warnings,
    })
}

/// A pair `(f, g)` for the L'Hôpital comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct LhopitalCase {
    pub f: AnalyticFamily,
    pub g: AnalyticFamily,
    pub expected_l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhopitalReport {
    /// Estimate of `lim f'/g'`.
    pub l_prime: LimitEstimate,
    /// Estimate of `lim f/g`.
    pub l_ratio: LimitEstimate,
    pub g_divergence: LimitEstimate,
    pub difference: Option<f64>,
    pub bound: Option<f64>,
    pub expected_l: Option<f64>,
    pub passes: bool,
}

/// Checks that `lim f'/g'` and `lim f/g` agree whenever `|g| -> inf`.
///
/// Both ratios are formed in log storage: `f/g = exp(y_f - y_g)` and
/// `f'/g' = exp(y_f - y_g) * dlog f / dlog g`.
pub fn verify_lhopital(
    case: &LhopitalCase,
    grid: &GridSpec,
    mode: DerivMode,
    opts: &LimitOptions,
) -> Result<LhopitalReport> {
    let xs = grid.points();
    let yf = deriv::eval_checked(&case.f, &xs)?;
    let yg = deriv::eval_checked(&case.g, &xs)?;

    let g_track = Track::new(xs.clone(), yg.clone())?;
    let g_divergence = estimate_limit(&g_track, opts)?;
    if g_divergence.status != LimitStatus::DivergedToInfinity {
        return Err(Error::Precondition(format!(
            "|g| does not diverge on the grid (ln|g| track is {})",
            g_divergence.status.as_str()
        )));
    }

    let df = Source::Family(case.f.clone()).dlogs(&xs, mode)?;
    let dg = Source::Family(case.g.clone()).dlogs(&xs, mode)?;

    let mut ratio = Vec::with_capacity(xs.len());
    let mut prime = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        let q = (yf[i] - yg[i]).exp();
        if dg[i] == 0.0 {
            return Err(Error::Singular {
                x: xs[i],
                detail: "g' vanishes".into(),
            });
        }
        ratio.push(q);
        let p = q * (df[i] / dg[i]);
        // 0 * inf from an underflowed ratio means the derivative ratio is 0
        // to working precision.
        prime.push(if p.is_nan() { 0.0 } else { p });
    }
    let l_ratio = estimate_limit(&Track::new(xs.clone(), ratio)?, opts)?;
    let l_prime = estimate_limit(&Track::new(xs, prime)?, opts)?;

    let (difference, bound, passes) = match (l_prime.value, l_ratio.value) {
        (Some(a), Some(b)) => {
            let d = (a - b).abs();
            let bound = 3.0 * (l_prime.tail_residual + l_ratio.tail_residual);
            (Some(d), Some(bound), d <= bound)
        }
        _ => {
            let both_infinite = l_prime.status == LimitStatus::DivergedToInfinity
                && l_ratio.status == LimitStatus::DivergedToInfinity;
            (None, None, both_infinite)
        }
    };
    Ok(LhopitalReport {
        l_prime,
        l_ratio,
        g_divergence,
        difference,
        bound,
        expected_l: case.expected_l,
        passes,
    })
}
