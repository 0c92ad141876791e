//! Circle means, disk means and circle maxima of plane functions.
//!
//! `u` is evaluated as `u(r e^{it})`. Only the built-in catalog is known to be
//! subharmonic; user input is taken at face value.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::LogLogSample;

/// A real function on the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum PlaneFunction {
    /// `ln |z - a|` with `a = re + i im`.
    LogAbs { re: f64, im: f64 },
    /// `|z|^2`
    AbsSq,
    /// `Re z`
    Re,
    /// Pointwise maximum.
    Max(Vec<PlaneFunction>),
    /// `u + c`
    Shift(Box<PlaneFunction>, f64),
    /// `u(z e^{i theta})`
    Rotate(Box<PlaneFunction>, f64),
}

impl PlaneFunction {
    pub fn log_abs(re: f64) -> Self {
        PlaneFunction::LogAbs { re, im: 0.0 }
    }

    pub fn max_of(parts: Vec<PlaneFunction>) -> Self {
        PlaneFunction::Max(parts)
    }

    pub fn shifted(self, c: f64) -> Self {
        PlaneFunction::Shift(Box::new(self), c)
    }

    pub fn rotated(self, theta: f64) -> Self {
        PlaneFunction::Rotate(Box::new(self), theta)
    }

    pub fn name(&self) -> &'static str {
        match self {
            PlaneFunction::LogAbs { .. } => "logabs",
            PlaneFunction::AbsSq => "abs2",
            PlaneFunction::Re => "re",
            PlaneFunction::Max(_) => "max",
            PlaneFunction::Shift(..) => "shift",
            PlaneFunction::Rotate(..) => "rotate",
        }
    }

    /// `u(r e^{it})`.
    pub fn eval(&self, r: f64, t: f64) -> f64 {
        match self {
            PlaneFunction::LogAbs { re, im } => {
                let (s, c) = t.sin_cos();
                (r * c - re).hypot(r * s - im).ln()
            }
            PlaneFunction::AbsSq => r * r,
            PlaneFunction::Re => r * t.cos(),
            PlaneFunction::Max(parts) => parts
                .iter()
                .map(|p| p.eval(r, t))
                .fold(f64::NEG_INFINITY, f64::max),
            PlaneFunction::Shift(u, c) => u.eval(r, t) + c,
            PlaneFunction::Rotate(u, theta) => u.eval(r, t + theta),
        }
    }

    /// Points where `u` may be `-inf`, as `(re, im)`.
    pub fn singular_points(&self) -> Vec<(f64, f64)> {
        match self {
            PlaneFunction::LogAbs { re, im } => vec![(*re, *im)],
            PlaneFunction::AbsSq | PlaneFunction::Re => Vec::new(),
            PlaneFunction::Max(parts) => parts.iter().flat_map(|p| p.singular_points()).collect(),
            PlaneFunction::Shift(u, _) => u.singular_points(),
            PlaneFunction::Rotate(u, theta) => {
                let (s, c) = (-theta).sin_cos();
                u.singular_points()
                    .into_iter()
                    .map(|(a, b)| (a * c - b * s, a * s + b * c))
                    .collect()
            }
        }
    }

    /// Flattened pieces of a top-level maximum after pushing shifts and
    /// rotations inward; `None` when `u` is not a maximum.
    fn max_pieces(&self) -> Option<Vec<PlaneFunction>> {
        match self {
            PlaneFunction::Max(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    match p.max_pieces() {
                        Some(sub) => out.extend(sub),
                        None => out.push(p.clone()),
                    }
                }
                Some(out)
            }
            PlaneFunction::Shift(u, c) => u
                .max_pieces()
                .map(|ps| ps.into_iter().map(|p| p.shifted(*c)).collect()),
            PlaneFunction::Rotate(u, th) => u
                .max_pieces()
                .map(|ps| ps.into_iter().map(|p| p.rotated(*th)).collect()),
            _ => None,
        }
    }
}

impl fmt::Display for PlaneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaneFunction::LogAbs { re, im } => {
                if *re == 0.0 && *im == 0.0 {
                    f.write_str("logabs")
                } else if *im == 0.0 {
                    write!(f, "logabs:a={re}")
                } else {
                    write!(f, "logabs:a={re},b={im}")
                }
            }
            PlaneFunction::AbsSq => f.write_str("abs2"),
            PlaneFunction::Re => f.write_str("re"),
            PlaneFunction::Max(parts) => {
                f.write_str("max(")?;
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(";")?;
                    }
                    p.fmt(f)?;
                }
                f.write_str(")")
            }
            PlaneFunction::Shift(u, c) => write!(f, "shift:c={c}@{u}"),
            PlaneFunction::Rotate(u, t) => write!(f, "rotate:theta={t}@{u}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `(2 / r^2) I(r)`, the areal average.
    #[default]
    Area,
    /// `(2 / (pi r^2)) I(r)`.
    Paper,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::Area => "area",
            Normalization::Paper => "paper",
        }
    }

    fn factor(&self, r: f64) -> f64 {
        match self {
            Normalization::Area => 2.0 / (r * r),
            Normalization::Paper => 2.0 / (PI * r * r),
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "area" => Ok(Normalization::Area),
            "paper" => Ok(Normalization::Paper),
            other => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown normalization `{other}` (expected area or paper)"),
            }),
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "radius must be positive, got {r}"
        )))
    }
}

/// Half-step node offset when a declared singularity sits on a node.
fn node_offset(u: &PlaneFunction, r: f64, n: usize) -> f64 {
    let step = TAU / n as f64;
    for (a, b) in u.singular_points() {
        let rho = a.hypot(b);
        if (rho - r).abs() <= 1e-12 * r {
            let k = b.atan2(a).rem_euclid(TAU) / step;
            if (k - k.round()).abs() < 1e-9 {
                return 0.5 * step;
            }
        }
    }
    0.0
}

/// `(1/2pi) int_0^{2pi} u(r e^{it}) dt`.
///
/// Periodic trapezoid rule on `n_quad` nodes. For a maximum of several
/// pieces the circle is first cut where the active piece changes and each
/// arc is integrated with Gauss-Legendre panels, since the kinks would
/// otherwise limit the trapezoid rule to second order.
pub fn circle_mean(u: &PlaneFunction, r: f64, n_quad: usize) -> Result<f64> {
    check_radius(r)?;
    if n_quad < 16 || !n_quad.is_power_of_two() {
        return Err(Error::Precondition(format!(
            "n_quad must be a power of two >= 16, got {n_quad}"
        )));
    }
    if let Some(pieces) = u.max_pieces() {
        if pieces.len() > 1 {
            return max_circle_mean(u, &pieces, r, n_quad);
        }
    }
    let offset = node_offset(u, r, n_quad);
    let step = TAU / n_quad as f64;
    let mut sum = 0.0;
    for k in 0..n_quad {
        let t = offset + step * k as f64;
        let v = u.eval(r, t);
        if !v.is_finite() {
            return Err(Error::Singularity { r, angle: t });
        }
        sum += v;
    }
    Ok(sum / n_quad as f64)
}

fn active(pieces: &[PlaneFunction], r: f64, t: f64) -> usize {
    let mut best = 0;
    let mut bv = f64::NEG_INFINITY;
    for (i, p) in pieces.iter().enumerate() {
        let v = p.eval(r, t);
        if v > bv {
            bv = v;
            best = i;
        }
    }
    best
}

fn max_circle_mean(
    u: &PlaneFunction,
    pieces: &[PlaneFunction],
    r: f64,
    n_quad: usize,
) -> Result<f64> {
    let step = TAU / n_quad as f64;
    let offset = node_offset(u, r, n_quad);
    let mut cuts = Vec::new();
    let mut prev = active(pieces, r, offset);
    for k in 1..=n_quad {
        let t = offset + step * k as f64;
        let cur = active(pieces, r, t);
        if cur != prev {
            // Bisect on the sign of the difference of the two pieces.
            let (p, q) = (&pieces[prev], &pieces[cur]);
            let (mut lo, mut hi) = (t - step, t);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if p.eval(r, mid) >= q.eval(r, mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
                    break;
                }
            }
            cuts.push(0.5 * (lo + hi));
            prev = cur;
        }
    }
    if cuts.is_empty() {
        cuts.push(offset);
    }
    let (nodes, weights) = gauss_legendre(8);
    let mut total = 0.0;
    for (j, &a) in cuts.iter().enumerate() {
        let b = if j + 1 < cuts.len() {
            cuts[j + 1]
        } else {
            cuts[0] + TAU
        };
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        let panels = ((n_quad as f64 * len / TAU) / 8.0).ceil().max(1.0) as usize;
        let h = len / panels as f64;
        for p in 0..panels {
            let c = a + h * (p as f64 + 0.5);
            for (x, w) in nodes.iter().zip(&weights) {
                let t = c + 0.5 * h * x;
                let v = u.eval(r, t);
                if !v.is_finite() {
                    return Err(Error::Singularity { r, angle: t });
                }
                total += 0.5 * h * w * v;
            }
        }
    }
    Ok(total / TAU)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn radial_breaks(u: &PlaneFunction, r: f64) -> Vec<f64> {
    let mut b: Vec<f64> = u
        .singular_points()
        .into_iter()
        .map(|(a, c)| a.hypot(c))
        .filter(|&s| s > 0.0 && s < r * (1.0 - 1e-12))
        .collect();
    b.push(0.0);
    b.push(r);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// `(2 / r^2) int_0^r C_u(s) s ds` (area) or the same with `2 / (pi r^2)`.
///
/// Composite Simpson with `n_radial` subintervals on each piece, the pieces
/// split at radii of declared singularities where `C_u` has a kink.
pub fn disk_mean(
    u: &PlaneFunction,
    r: f64,
    normalization: Normalization,
    n_quad: usize,
    n_radial: usize,
) -> Result<f64> {
    if n_radial < 16 {
        return Err(Error::Precondition(format!(
            "n_radial must be at least 16, got {n_radial}"
        )));
    }
    check_radius(r)?;
    let f = |s: f64| -> Result<f64> {
        if s == 0.0 {
            Ok(0.0)
        } else {
            Ok(circle_mean(u, s, n_quad)? * s)
        }
    };
    let mut integral = 0.0;
    for w in radial_breaks(u, r).windows(2) {
        integral += simpson(&f, w[0], w[1], n_radial + n_radial % 2)?;
    }
    Ok(normalization.factor(r) * integral)
}

fn simpson(f: &impl Fn(f64) -> Result<f64>, a: f64, b: f64, n: usize) -> Result<f64> {
    let h = (b - a) / n as f64;
    let mut sum = f(a)? + f(b)?;
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * k as f64)?;
    }
    Ok(sum * h / 3.0)
}

/// `sup { u(z) : |z| = r }` by an angle scan refined with golden sections.
pub fn sup_on_circle(u: &PlaneFunction, r: f64, n_scan: usize, refine_tol: f64) -> Result<f64> {
    check_radius(r)?;
    if n_scan < 3 {
        return Err(Error::Precondition(format!(
            "n_scan must be at least 3, got {n_scan}"
        )));
    }
    let step = TAU / n_scan as f64;
    let mut best: Option<(usize, f64)> = None;
    for k in 0..n_scan {
        let v = u.eval(r, step * k as f64);
        if v == f64::INFINITY {
            return Err(Error::Unbounded(r));
        }
        // Poles (-inf) and undefined nodes are skipped.
        if v.is_finite() && best.is_none_or(|(_, b)| v > b) {
            best = Some((k, v));
        }
    }
    let (k, bv) = best.ok_or(Error::Unbounded(r))?;
    let t = step * k as f64;
    let g = |s: f64| {
        let v = u.eval(r, s);
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };
    let refined = golden_max(g, t - step, t + step, refine_tol.max(1e-15));
    Ok(bv.max(refined))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.max(fd);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        best = best.max(fc).max(fd);
    }
    best.max(f(0.5 * (a + b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeansOptions {
    pub n_quad: usize,
    pub n_radial: usize,
    pub n_scan: usize,
    pub refine_tol: f64,
    pub normalization: Normalization,
    /// Added to `u` before anything is computed.
    pub shift: f64,
}

impl Default for MeansOptions {
    fn default() -> Self {
        MeansOptions {
            n_quad: 1024,
            n_radial: 64,
            n_scan: 1024,
            refine_tol: 1e-10,
            normalization: Normalization::Area,
            shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanKind {
    C,
    B,
    M,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeansSeries {
    pub rs: Vec<f64>,
    pub c: Vec<f64>,
    pub b: Vec<f64>,
    pub m: Vec<f64>,
    pub normalization: Normalization,
    pub shift: f64,
}

pub fn means_series(u: &PlaneFunction, rs: &[f64], opts: &MeansOptions) -> Result<MeansSeries> {
    if rs.is_empty() {
        return Err(Error::Precondition("no radii given".into()));
    }
    if let Some(r) = rs.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::Precondition(format!(
            "radius must be positive, got {r}"
        )));
    }
    if rs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(
            "radii must be strictly increasing".into(),
        ));
    }
    let shifted;
    let u = if opts.shift != 0.0 {
        shifted = u.clone().shifted(opts.shift);
        &shifted
    } else {
        u
    };
    let mut c = Vec::with_capacity(rs.len());
    let mut b = Vec::with_capacity(rs.len());
    let mut m = Vec::with_capacity(rs.len());
    for &r in rs {
        c.push(circle_mean(u, r, opts.n_quad)?);
        b.push(disk_mean(
            u,
            r,
            opts.normalization,
            opts.n_quad,
            opts.n_radial,
        )?);
        m.push(sup_on_circle(u, r, opts.n_scan, opts.refine_tol)?);
    }
    Ok(MeansSeries {
        rs: rs.to_vec(),
        c,
        b,
        m,
        normalization: opts.normalization,
        shift: opts.shift,
    })
}

impl MeansSeries {
    pub fn component(&self, kind: MeanKind) -> &[f64] {
        match kind {
            MeanKind::C => &self.c,
            MeanKind::B => &self.b,
            MeanKind::M => &self.m,
        }
    }

    /// One component as a growth function `x = ln r, y = ln value`, over the
    /// trailing run of radii where it is positive.
    pub fn export(&self, kind: MeanKind) -> Result<LogLogSample> {
        let vals = self.component(kind);
        let start = vals
            .iter()
            .rposition(|&v| v <= 0.0)
            .map(|i| i + 1)
            .unwrap_or(0);
        if start == vals.len() {
            return Err(Error::Precondition(
                "component is not positive at the largest radius; use a shift".into(),
            ));
        }
        let xs = self.rs[start..].iter().map(|r| r.ln()).collect();
        let ys = vals[start..].iter().map(|v| v.ln()).collect();
        LogLogSample::new(xs, ys)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["r", "c", "b", "m", "normalization"])?;
        for i in 0..self.rs.len() {
            w.write_record([
                self.rs[i].to_string(),
                self.c[i].to_string(),
                self.b[i].to_string(),
                self.m[i].to_string(),
                self.normalization.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The built-in subharmonic catalog.
pub fn subharmonic_catalog() -> Vec<PlaneFunction> {
    use PlaneFunction as P;
    vec![
        P::log_abs(0.0),
        P::log_abs(3.0),
        P::LogAbs { re: -1.0, im: 2.0 },
        P::AbsSq,
        P::Re,
        P::max_of(vec![P::log_abs(0.0), P::log_abs(3.0)]),
        P::max_of(vec![P::AbsSq, P::Re]),
        P::max_of(vec![P::Re, P::log_abs(0.0)]),
        P::max_of(vec![P::Re, P::Re.rotated(PI)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_modulus_mean_is_log_radius() {
        let u = PlaneFunction::log_abs(0.0);
        for &r in &[0.1, 1.0, 2.5, 1e3] {
            assert!((circle_mean(&u, r, 1024).unwrap() - f64::ln(r)).abs() < 1e-12);
            assert!((sup_on_circle(&u, r, 256, 1e-10).unwrap() - f64::ln(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn real_part_means() {
        let u = PlaneFunction::Re;
        assert!(circle_mean(&u, 3.0, 64).unwrap().abs() < 1e-14);
        assert!((sup_on_circle(&u, 3.0, 64, 1e-10).unwrap() - 3.0).abs() < 1e-12);
        for n in [Normalization::Area, Normalization::Paper] {
            assert!(disk_mean(&u, 2.0, n, 64, 16).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn shifted_pole_inside() {
        let u = PlaneFunction::log_abs(1.0);
        let c = circle_mean(&u, 2.0, 512).unwrap();
        assert!((c - 2f64.ln()).abs() < 1e-8);
        let oracle = circle_mean(&u, 2.0, 1 << 16).unwrap();
        assert!((c - oracle).abs() < 1e-8);
        let m = sup_on_circle(&u, 2.0, 512, 1e-12).unwrap();
        assert!((m - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn disk_means_of_abs_square() {
        let u = PlaneFunction::AbsSq;
        let r: f64 = 1.7;
        let a = disk_mean(&u, r, Normalization::Area, 64, 16).unwrap();
        assert!((a - r * r / 2.0).abs() < 1e-13);
        let p = disk_mean(&u, r, Normalization::Paper, 64, 16).unwrap();
        assert!((p - r * r / (2.0 * PI)).abs() < 1e-13);
    }

    #[test]
    fn pole_on_a_node_is_offset() {
        let u = PlaneFunction::log_abs(2.0);
        let c = circle_mean(&u, 2.0, 256).unwrap();
        // Offset trapezoid on ln|2 sin(t/2)| + ln 2 is exact up to ln 2 / n.
        assert!((c - 2f64.ln()).abs() < 2f64.ln() / 256.0 + 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let u = PlaneFunction::Re;
        assert!(circle_mean(&u, 1.0, 100).is_err());
        assert!(circle_mean(&u, 1.0, 8).is_err());
        assert!(circle_mean(&u, -1.0, 64).is_err());
        assert!(disk_mean(&u, 1.0, Normalization::Area, 64, 8).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_degree_15() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn max_of_real_parts_is_abs_real() {
        // max(Re z, -Re z) = |Re z| has mean 2r/pi.
        let u = PlaneFunction::max_of(vec![PlaneFunction::Re, PlaneFunction::Re.rotated(PI)]);
        let c = circle_mean(&u, 1.5, 64).unwrap();
        assert!((c - 3.0 / PI).abs() < 1e-13);
    }

    #[test]
    fn series_and_export() {
        let u = PlaneFunction::log_abs(0.0);
        let rs: Vec<f64> = (1..=10).map(|k| (k as f64).exp()).collect();
        let s = means_series(&u, &rs, &MeansOptions::default()).unwrap();
        for (k, (c, m)) in s.c.iter().zip(&s.m).enumerate() {
            assert!((c - (k + 1) as f64).abs() < 1e-12);
            assert!((m - (k + 1) as f64).abs() < 1e-12);
        }
        let e = s.export(MeanKind::C).unwrap();
        assert_eq!(e.len(), 10);
        assert!((e.ys()[9] - 10f64.ln()).abs() < 1e-12);
    }
}
