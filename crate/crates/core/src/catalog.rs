//! Reference cases with known answers, shared by tests and the command line.

use std::f64::consts::TAU;

use crate::asymptotics::LhopitalCase;
use crate::error::Result;
use crate::family::{Family, RhoFamily};
use crate::grid::GridSpec;
use crate::sample::LogLogSample;
use crate::source::Source;

/// A function `V` paired with a model `M` on a working grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub label: &'static str,
    pub v: Family,
    pub m: Family,
    pub grid: GridSpec,
    /// Expected proximate order, `None` when `V` is not proximate.
    pub rho: Option<f64>,
}

fn pair(label: &'static str, v: Family, m: Family, rho: Option<f64>) -> Pair {
    Pair {
        label,
        v,
        m,
        grid: GridSpec::default(),
        rho,
    }
}

/// Products such as `ln V * dlog M` overflow for `e^{c r}` once `x` passes
/// about 350.
fn expo_grid() -> GridSpec {
    GridSpec::new(1.0, 300.0, 2048).expect("valid grid")
}

pub fn proximate_pairs() -> Vec<Pair> {
    let powlog1 = Family::PowLog { rho: 1.0, b: 1.0 };
    vec![
        pair("r^2 / r", Family::Pow { rho: 2.0 }, Family::Id, Some(2.0)),
        pair(
            "powlog(3,2) / r",
            Family::PowLog { rho: 3.0, b: 2.0 },
            Family::Id,
            Some(3.0),
        ),
        pair(
            "powloglog(2,1) / r",
            Family::PowLogLog { rho: 2.0, b: 1.0 },
            Family::Id,
            Some(2.0),
        ),
        pair(
            "powloglog(2,-1) / r",
            Family::PowLogLog { rho: 2.0, b: -1.0 },
            Family::Id,
            Some(2.0),
        ),
        pair("r / r", Family::Id, Family::Id, Some(1.0)),
        pair(
            "valiron(loglog 2,1) / r",
            Family::Valiron(RhoFamily::LogLog { rho: 2.0, b: 1.0 }),
            Family::Id,
            Some(2.0),
        ),
        pair("sqrtlog / r", Family::SqrtLog, Family::Id, Some(0.0)),
        pair(
            "(ln r)^2 / ln r",
            Family::Pow { rho: 2.0 }.compose(Family::Log),
            Family::Log,
            Some(2.0),
        ),
        pair(
            "powlog(3,2) / powlog(1,1)",
            Family::PowLog { rho: 3.0, b: 2.0 },
            powlog1.clone(),
            Some(3.0),
        ),
        pair(
            "3 r^2 / powlog(1,1)",
            Family::Pow { rho: 2.0 }.scaled(3.0),
            powlog1,
            Some(2.0),
        ),
        Pair {
            grid: expo_grid(),
            ..pair(
                "expo(2) / expo(1)",
                Family::Expo { c: 2.0 },
                Family::Expo { c: 1.0 },
                Some(2.0),
            )
        },
        Pair {
            grid: expo_grid(),
            ..pair(
                "r^3 / expo(1)",
                Family::Pow { rho: 3.0 },
                Family::Expo { c: 1.0 },
                Some(0.0),
            )
        },
    ]
}

pub fn non_proximate_pairs() -> Vec<Pair> {
    vec![
        pair(
            "osc(2,1) / r",
            Family::Osc { rho: 2.0, a: 1.0 },
            Family::Id,
            None,
        ),
        pair(
            "valiron(sinlog 2,1) / r",
            Family::Valiron(RhoFamily::SinLog { rho: 2.0, a: 1.0 }),
            Family::Id,
            None,
        ),
        pair("r^2 / ln r", Family::Pow { rho: 2.0 }, Family::Log, None),
        pair(
            "powlog(1,1) / ln r",
            Family::PowLog { rho: 1.0, b: 1.0 },
            Family::Log,
            None,
        ),
        Pair {
            grid: expo_grid(),
            ..pair("expo(1) / r", Family::Expo { c: 1.0 }, Family::Id, None)
        },
    ]
}

/// Pairs for checking `l1 = rho_M + (ln M / dlog M) rho_M'` in absolute
/// terms. Pairs where `ln V` itself reaches `e^300` are left out.
pub fn identity_pairs() -> Vec<Pair> {
    let mut all = proximate_pairs();
    all.extend(
        non_proximate_pairs()
            .into_iter()
            .filter(|p| p.grid == GridSpec::default()),
    );
    all
}

pub fn lhopital_cases() -> Vec<(&'static str, LhopitalCase)> {
    let case = |f: Family, g: Family, l: Option<f64>| LhopitalCase {
        f: f.into(),
        g: g.into(),
        expected_l: l,
    };
    vec![
        (
            "(1 + 1/ln r) / ln r",
            case(Family::InvLog1p, Family::Log, Some(0.0)),
        ),
        (
            "r^2 / r^3",
            case(
                Family::Pow { rho: 2.0 },
                Family::Pow { rho: 3.0 },
                Some(0.0),
            ),
        ),
        (
            "3 r^2 / r^2",
            case(
                Family::Pow { rho: 2.0 }.scaled(3.0),
                Family::Pow { rho: 2.0 },
                Some(3.0),
            ),
        ),
        ("ln r / r", case(Family::Log, Family::Id, Some(0.0))),
        (
            "e^sqrt(ln r) / r",
            case(Family::SqrtLog, Family::Id, Some(0.0)),
        ),
        (
            "r^2 ln r / r^2",
            case(
                Family::PowLog { rho: 2.0, b: 1.0 },
                Family::Pow { rho: 2.0 },
                None,
            ),
        ),
    ]
}

pub fn valiron_rhos() -> Vec<(RhoFamily, bool)> {
    let mut v = vec![(RhoFamily::Const { c: 2.0 }, true)];
    for b in [1.0, -1.0, 2.0, -2.0] {
        v.push((RhoFamily::LogLog { rho: 2.0, b }, true));
    }
    v.push((RhoFamily::SinLog { rho: 2.0, a: 1.0 }, false));
    v
}

/// Which model a staircase sample is built against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StairModel {
    Id,
    Log,
}

/// An increasing max-type sample: `phi = 2 s + max(0, a sin(2 pi s / p))`
/// with `s = ln M`. The bump never breaks monotonicity since `a 2 pi / p < 2`.
pub fn staircase(model: StairModel, grid: &GridSpec) -> Result<LogLogSample> {
    let xs = grid.points();
    let ys = xs
        .iter()
        .map(|&x| {
            let (s, a, p) = match model {
                StairModel::Id => (x, 150.0, 1250.0),
                StairModel::Log => (x.ln(), 0.04, 0.15),
            };
            2.0 * s + (a * (TAU * s / p).sin()).max(0.0)
        })
        .collect();
    LogLogSample::new(xs, ys)
}

/// An `A`/`M` construction case.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructCase {
    pub label: &'static str,
    pub a: Source,
    pub m: Family,
    pub grid: GridSpec,
}

/// Relative to `M = ln r` the catalog functions have infinite order, so they
/// are used in the composed form `f(ln r)`.
pub fn construct_cases() -> Result<Vec<ConstructCase>> {
    let g = GridSpec::default();
    let case = |label, a: Source, m, grid| ConstructCase { label, a, m, grid };
    let oscslow = Family::OscSlow { rho: 2.0, a: 1.0 };
    Ok(vec![
        case("r^2 / r", Family::Pow { rho: 2.0 }.into(), Family::Id, g),
        // The tail half of [1, 4000] holds a crest of sin(ln x).
        case(
            "oscslow(2,1) / r",
            oscslow.clone().into(),
            Family::Id,
            GridSpec::new(1.0, 4000.0, 4096)?,
        ),
        case("sqrtlog / r", Family::SqrtLog.into(), Family::Id, g),
        case(
            "staircase / r",
            staircase(StairModel::Id, &g)?.into(),
            Family::Id,
            g,
        ),
        case(
            "r^2 @ ln / ln r",
            Family::Pow { rho: 2.0 }.compose(Family::Log).into(),
            Family::Log,
            g,
        ),
        case(
            "oscslow(2,1) @ ln / ln r",
            oscslow.compose(Family::Log).into(),
            Family::Log,
            g,
        ),
        case(
            "sqrtlog @ ln / ln r",
            Family::SqrtLog.compose(Family::Log).into(),
            Family::Log,
            g,
        ),
        case(
            "staircase / ln r",
            staircase(StairModel::Log, &g)?.into(),
            Family::Log,
            g,
        ),
    ])
}
