//! Closed-form function families with exact log-derivatives.
//!
//! Every growth family `F` is represented through `y(x) = ln F(e^x)` and its
//! derivative `d/dx y(x)`, which equals `r F'(r) / F(r)`.

use std::collections::BTreeMap;
use std::fmt;

/// Catalog of positive functions on a ray.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `r^rho`
    Pow { rho: f64 },
    /// `r^rho (ln r)^b`
    PowLog { rho: f64, b: f64 },
    /// `r^{rho(r)}` with `rho(r) = rho + b lnln r / ln r`; the same function as
    /// `PowLog`, kept separate because it is read as a proximate order.
    PowLogLog { rho: f64, b: f64 },
    /// `r^{rho + a sin(ln r)}`
    Osc { rho: f64, a: f64 },
    /// `r^{rho + a sin(lnln r)}`
    OscSlow { rho: f64, a: f64 },
    /// `e^{c r}`
    Expo { c: f64 },
    /// `e^{sqrt(ln r)}`
    SqrtLog,
    /// `r`
    Id,
    /// `ln r`
    Log,
    /// `1 / (1 + r)`
    Recip,
    /// `exp(-(ln r)^2)`
    GaussLog,
    /// `r (c + a sin(ln r))`, needs `c > |a|`
    LinOsc { c: f64, a: f64 },
    /// `1 + 1 / ln r`
    InvLog1p,
    /// `c + a sin(ln r)`, needs `c > |a|`
    BoundedOsc { c: f64, a: f64 },
    /// `r^{rho(r)}` for a proximate-order candidate `rho`.
    Valiron(RhoFamily),
    /// `outer(inner(r))`
    Compose(Box<Family>, Box<Family>),
    /// `F^a`
    Power(Box<Family>, f64),
    /// `c F`
    Scale(Box<Family>, f64),
    /// `F` restricted to `x >= x_min`, undefined below.
    Restrict(Box<Family>, f64),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Pow { .. } => "pow",
            Family::PowLog { .. } => "powlog",
            Family::PowLogLog { .. } => "powloglog",
            Family::Osc { .. } => "osc",
            Family::OscSlow { .. } => "oscslow",
            Family::Expo { .. } => "expo",
            Family::SqrtLog => "sqrtlog",
            Family::Id => "id",
            Family::Log => "log",
            Family::Recip => "recip",
            Family::GaussLog => "gausslog",
            Family::LinOsc { .. } => "linosc",
            Family::InvLog1p => "invlog1p",
            Family::BoundedOsc { .. } => "boundedosc",
            Family::Valiron(_) => "valiron",
            Family::Compose(..) => "compose",
            Family::Power(..) => "power",
            Family::Scale(..) => "scale",
            Family::Restrict(..) => "restrict",
        }
    }

    pub fn params(&self) -> BTreeMap<&'static str, f64> {
        let mut m = BTreeMap::new();
        match *self {
            Family::Pow { rho } => {
                m.insert("rho", rho);
            }
            Family::PowLog { rho, b } | Family::PowLogLog { rho, b } => {
                m.insert("rho", rho);
                m.insert("b", b);
            }
            Family::Osc { rho, a } | Family::OscSlow { rho, a } => {
                m.insert("rho", rho);
                m.insert("a", a);
            }
            Family::Expo { c } => {
                m.insert("c", c);
            }
            Family::LinOsc { c, a } | Family::BoundedOsc { c, a } => {
                m.insert("c", c);
                m.insert("a", a);
            }
            Family::Power(_, a) => {
                m.insert("a", a);
            }
            Family::Scale(_, c) => {
                m.insert("c", c);
            }
            Family::Restrict(_, x_min) => {
                m.insert("x_min", x_min);
            }
            _ => {}
        }
        m
    }

    /// Lower end of the natural domain in `x`; evaluation at or below it may
    /// be undefined.
    pub fn domain_start(&self) -> f64 {
        match self {
            Family::PowLog { b, .. } | Family::PowLogLog { b, .. } if *b != 0.0 => 0.0,
            Family::OscSlow { .. } | Family::SqrtLog | Family::Log | Family::InvLog1p => 0.0,
            Family::Valiron(rho) => rho.domain_start(),
            Family::Compose(_, inner) => inner.domain_start(),
            Family::Power(f, _) | Family::Scale(f, _) => f.domain_start(),
            Family::Restrict(f, x_min) => f.domain_start().max(*x_min),
            _ => f64::NEG_INFINITY,
        }
    }

    /// `ln F(e^x)`; NaN outside the domain.
    pub fn eval_loglog(&self, x: f64) -> f64 {
        match self {
            Family::Pow { rho } => rho * x,
            Family::PowLog { rho, b } | Family::PowLogLog { rho, b } => {
                if *b == 0.0 {
                    rho * x
                } else {
                    rho * x + b * x.ln()
                }
            }
            Family::Osc { rho, a } => (rho + a * x.sin()) * x,
            Family::OscSlow { rho, a } => (rho + a * x.ln().sin()) * x,
            Family::Expo { c } => c * x.exp(),
            Family::SqrtLog => x.sqrt(),
            Family::Id => x,
            Family::Log => x.ln(),
            Family::Recip => -softplus(x),
            Family::GaussLog => -x * x,
            Family::LinOsc { c, a } => x + (c + a * x.sin()).ln(),
            Family::InvLog1p => (1.0 / x).ln_1p(),
            Family::BoundedOsc { c, a } => (c + a * x.sin()).ln(),
            Family::Valiron(rho) => rho.value(x) * x,
            Family::Compose(outer, inner) => outer.eval_loglog(inner.eval_loglog(x)),
            Family::Power(f, a) => a * f.eval_loglog(x),
            Family::Scale(f, c) => f.eval_loglog(x) + c.ln(),
            Family::Restrict(f, x_min) => {
                if x < *x_min {
                    f64::NAN
                } else {
                    f.eval_loglog(x)
                }
            }
        }
    }

    /// `d/dx ln F(e^x)`.
    pub fn dlog(&self, x: f64) -> f64 {
        match self {
            Family::Pow { rho } => *rho,
            Family::PowLog { rho, b } | Family::PowLogLog { rho, b } => {
                if *b == 0.0 {
                    *rho
                } else {
                    rho + b / x
                }
            }
            Family::Osc { rho, a } => rho + a * x.sin() + a * x * x.cos(),
            Family::OscSlow { rho, a } => {
                let t = x.ln();
                rho + a * t.sin() + a * t.cos()
            }
            Family::Expo { c } => c * x.exp(),
            Family::SqrtLog => 0.5 / x.sqrt(),
            Family::Id => 1.0,
            Family::Log => 1.0 / x,
            Family::Recip => -logistic(x),
            Family::GaussLog => -2.0 * x,
            Family::LinOsc { c, a } => 1.0 + a * x.cos() / (c + a * x.sin()),
            Family::InvLog1p => -1.0 / (x * (x + 1.0)),
            Family::BoundedOsc { c, a } => a * x.cos() / (c + a * x.sin()),
            Family::Valiron(rho) => rho.value(x) + x * rho.deriv(x),
            Family::Compose(outer, inner) => outer.dlog(inner.eval_loglog(x)) * inner.dlog(x),
            Family::Power(f, a) => a * f.dlog(x),
            Family::Scale(f, _) => f.dlog(x),
            Family::Restrict(f, x_min) => {
                if x < *x_min {
                    f64::NAN
                } else {
                    f.dlog(x)
                }
            }
        }
    }

    pub fn compose(self, inner: Family) -> Family {
        Family::Compose(Box::new(self), Box::new(inner))
    }

    pub fn powered(self, a: f64) -> Family {
        Family::Power(Box::new(self), a)
    }

    pub fn scaled(self, c: f64) -> Family {
        Family::Scale(Box::new(self), c)
    }

    pub fn restricted(self, x_min: f64) -> Family {
        Family::Restrict(Box::new(self), x_min)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn fmt_params(f: &mut fmt::Formatter<'_>, pairs: &[(&str, f64)]) -> fmt::Result {
    for (k, (name, value)) in pairs.iter().enumerate() {
        let sep = if k == 0 { ':' } else { ',' };
        write!(f, "{sep}{name}={value}")?;
    }
    Ok(())
}

/// Renders the textual spec form accepted by [`crate::funcspec`].
impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Pow { rho } => {
                f.write_str("pow")?;
                fmt_params(f, &[("rho", *rho)])
            }
            Family::PowLog { rho, b } | Family::PowLogLog { rho, b } => {
                f.write_str(self.name())?;
                fmt_params(f, &[("rho", *rho), ("b", *b)])
            }
            Family::Osc { rho, a } | Family::OscSlow { rho, a } => {
                f.write_str(self.name())?;
                fmt_params(f, &[("rho", *rho), ("a", *a)])
            }
            Family::Expo { c } => {
                f.write_str("expo")?;
                fmt_params(f, &[("c", *c)])
            }
            Family::LinOsc { c, a } | Family::BoundedOsc { c, a } => {
                f.write_str(self.name())?;
                fmt_params(f, &[("c", *c), ("a", *a)])
            }
            Family::Valiron(rho) => write!(f, "valiron@{rho}"),
            Family::Compose(outer, inner) => write!(f, "{outer}@{inner}"),
            Family::Power(g, a) => write!(f, "power:a={a}@{g}"),
            Family::Scale(g, c) => write!(f, "scale:c={c}@{g}"),
            Family::Restrict(g, x_min) => write!(f, "restrict:x_min={x_min}@{g}"),
            _ => f.write_str(self.name()),
        }
    }
}

/// A catalog family together with its exact-derivative capability.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFamily {
    family: Family,
    exact_dlog: bool,
}

impl AnalyticFamily {
    pub fn new(family: Family) -> Self {
        AnalyticFamily {
            family,
            exact_dlog: true,
        }
    }

    /// The same family with the closed-form derivative hidden, so that every
    /// consumer falls back to numerical differentiation.
    pub fn without_exact_dlog(mut self) -> Self {
        self.exact_dlog = false;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    pub fn params(&self) -> BTreeMap<&'static str, f64> {
        self.family.params()
    }

    pub fn has_exact_dlog(&self) -> bool {
        self.exact_dlog
    }

    pub fn eval_loglog(&self, x: f64) -> f64 {
        self.family.eval_loglog(x)
    }

    pub fn exact_dlog(&self, x: f64) -> Option<f64> {
        self.exact_dlog.then(|| self.family.dlog(x))
    }
}

impl From<Family> for AnalyticFamily {
    fn from(family: Family) -> Self {
        AnalyticFamily::new(family)
    }
}

impl fmt::Display for AnalyticFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

/// Candidate proximate orders `rho(r)`, written as functions of `x = ln r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoFamily {
    /// `rho(r) = c`
    Const { c: f64 },
    /// `rho(r) = rho + b lnln r / ln r`
    LogLog { rho: f64, b: f64 },
    /// `rho(r) = rho + a sin(ln r) / ln r`
    SinLog { rho: f64, a: f64 },
}

impl RhoFamily {
    pub fn name(&self) -> &'static str {
        match self {
            RhoFamily::Const { .. } => "const",
            RhoFamily::LogLog { .. } => "loglog",
            RhoFamily::SinLog { .. } => "sinlog",
        }
    }

    pub fn domain_start(&self) -> f64 {
        match self {
            RhoFamily::Const { .. } => f64::NEG_INFINITY,
            _ => 0.0,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            RhoFamily::Const { c } => c,
            RhoFamily::LogLog { rho, b } => rho + b * x.ln() / x,
            RhoFamily::SinLog { rho, a } => rho + a * x.sin() / x,
        }
    }

    /// `d rho / dx`.
    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            RhoFamily::Const { .. } => 0.0,
            RhoFamily::LogLog { b, .. } => b * (1.0 - x.ln()) / (x * x),
            RhoFamily::SinLog { a, .. } => a * (x * x.cos() - x.sin()) / (x * x),
        }
    }
}

impl fmt::Display for RhoFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match *self {
            RhoFamily::Const { c } => fmt_params(f, &[("c", c)]),
            RhoFamily::LogLog { rho, b } => fmt_params(f, &[("rho", rho), ("b", b)]),
            RhoFamily::SinLog { rho, a } => fmt_params(f, &[("rho", rho), ("a", a)]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central(f: &Family, x: f64, h: f64) -> f64 {
        (f.eval_loglog(x + h) - f.eval_loglog(x - h)) / (2.0 * h)
    }

    fn catalog() -> Vec<Family> {
        vec![
            Family::Pow { rho: 2.0 },
            Family::PowLog { rho: 3.0, b: 2.0 },
            Family::PowLogLog { rho: 2.0, b: -1.0 },
            Family::Osc { rho: 2.0, a: 1.0 },
            Family::OscSlow { rho: 2.0, a: 1.0 },
            Family::Expo { c: 0.5 },
            Family::SqrtLog,
            Family::Id,
            Family::Log,
            Family::Recip,
            Family::GaussLog,
            Family::LinOsc { c: 2.0, a: 1.0 },
            Family::InvLog1p,
            Family::BoundedOsc { c: 2.0, a: 1.0 },
            Family::Valiron(RhoFamily::SinLog { rho: 2.0, a: 1.0 }),
            Family::Valiron(RhoFamily::LogLog { rho: 2.0, b: 1.0 }),
            Family::Log.compose(Family::PowLog { rho: 3.0, b: 2.0 }),
            Family::OscSlow { rho: 2.0, a: 1.0 }.compose(Family::Log),
            Family::Pow { rho: 2.0 }.powered(0.5).scaled(3.0),
        ]
    }

    #[test]
    fn exact_dlog_matches_central_differences_to_second_order() {
        // Halving h must cut the discrepancy by about four.
        for f in catalog() {
            for &x in &[2.5, 4.0, 7.3] {
                let exact = f.dlog(x);
                let e1 = (central(&f, x, 1e-2) - exact).abs();
                let e2 = (central(&f, x, 5e-3) - exact).abs();
                assert!(e1 < 1e-2 * (1.0 + exact.abs()), "{f} at {x}: {e1}");
                if e1 > 1e-9 {
                    let ratio = e1 / e2;
                    assert!((3.5..4.5).contains(&ratio), "{f} at {x}: ratio {ratio}");
                }
            }
        }
    }

    #[test]
    fn powlog_value_at_e() {
        let f = Family::PowLog { rho: 3.0, b: 2.0 };
        let e = std::f64::consts::E;
        assert!((f.eval_loglog(e) - (3.0 * e + 2.0)).abs() < 1e-12);
        assert!((f.eval_loglog(e) - 10.154845485377136).abs() < 1e-12);
    }

    #[test]
    fn composition_with_log_is_lnln() {
        let f = Family::Log.compose(Family::Log);
        let x: f64 = 5.0;
        assert_eq!(f.eval_loglog(x), x.ln().ln());
        assert!((f.dlog(x) - 1.0 / (x * x.ln())).abs() < 1e-15);
    }

    #[test]
    fn powloglog_is_powlog() {
        let a = Family::PowLogLog { rho: 2.0, b: 1.0 };
        let b = Family::PowLog { rho: 2.0, b: 1.0 };
        for &x in &[1.5, 10.0, 1e4] {
            assert_eq!(a.eval_loglog(x), b.eval_loglog(x));
            assert_eq!(a.dlog(x), b.dlog(x));
        }
    }

    #[test]
    fn recip_is_stable_for_large_x() {
        let x = 5000.0;
        assert!((Family::Recip.eval_loglog(x) + x).abs() < 1e-12);
        assert_eq!(Family::Recip.dlog(x), -1.0);
        assert!((Family::Recip.eval_loglog(-40.0) + (-40f64).exp()).abs() < 1e-30);
    }

    #[test]
    fn rho_derivatives_match_differences() {
        let fams = [
            RhoFamily::Const { c: 2.0 },
            RhoFamily::LogLog { rho: 2.0, b: -2.0 },
            RhoFamily::SinLog { rho: 2.0, a: 1.0 },
        ];
        for r in fams {
            for &x in &[1.5, 3.0, 20.0] {
                let h = 1e-4;
                let num = (r.value(x + h) - r.value(x - h)) / (2.0 * h);
                assert!((num - r.deriv(x)).abs() < 1e-7, "{r} at {x}");
            }
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(
            Family::PowLog { rho: 3.0, b: 2.0 }.to_string(),
            "powlog:rho=3,b=2"
        );
        assert_eq!(Family::Log.compose(Family::Id).to_string(), "log@id");
        assert_eq!(
            Family::Valiron(RhoFamily::LogLog { rho: 2.0, b: 1.0 }).to_string(),
            "valiron@loglog:rho=2,b=1"
        );
        assert_eq!(Family::Expo { c: 0.5 }.to_string(), "expo:c=0.5");
    }
}
