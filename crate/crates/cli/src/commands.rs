use std::fs::File;
use std::io::BufWriter;

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

use proxgrowth::construct::ConstructOptions;
use proxgrowth::funcspec::{parse_plane, parse_rho};
use proxgrowth::proximate::{check_valiron, valiron_bridge, RhoSource};
use proxgrowth::subharmonic::MeansOptions;
use proxgrowth::*;

use crate::args::*;

/// Payload and whether the analysis came out positive.
pub struct Outcome {
    pub payload: Value,
    pub positive: bool,
}

/// A spec that failed to parse, rendered with a caret under the position.
#[derive(Debug)]
pub struct SpecError {
    pub flag: &'static str,
    pub text: String,
    pub source: Error,
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "--{}: {}", self.flag, self.source)?;
        writeln!(f, "  {}", self.text)?;
        if let Error::Parse { pos, .. } = self.source {
            let col = self.text[..pos.min(self.text.len())].chars().count();
            write!(f, "  {}^", " ".repeat(col))?;
        }
        Ok(())
    }
}

impl std::error::Error for SpecError {}

fn spec_err<'a>(flag: &'static str, text: &'a str) -> impl FnOnce(Error) -> SpecError + 'a {
    move |source| SpecError {
        flag,
        text: text.to_string(),
        source,
    }
}

fn source(flag: &'static str, text: &str) -> anyhow::Result<Source> {
    let spec = FunctionSpec::parse(text).map_err(spec_err(flag, text))?;
    spec.to_source().with_context(|| format!("--{flag} {text}"))
}

fn grid(g: &GridArgs) -> anyhow::Result<GridSpec> {
    Ok(GridSpec::new(g.x0, g.x1, g.n)?)
}

fn limits(a: &AnalysisArgs) -> LimitOptions {
    LimitOptions::with_tol(a.tol)
}

fn model(text: &str, g: &GridSpec, a: &AnalysisArgs) -> anyhow::Result<ModelGrowth> {
    let opts = ModelOptions {
        deriv: a.deriv,
        limits: limits(a),
        ..Default::default()
    };
    Ok(ModelGrowth::validate(source("m", text)?, g, &opts)?)
}

fn proximate_opts(a: &AnalysisArgs) -> ProximateOptions {
    ProximateOptions {
        deriv: a.deriv,
        limits: limits(a),
        ..Default::default()
    }
}

fn to_value<T: Serialize>(v: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(v)?)
}

pub fn validate_model(args: &ValidateArgs) -> anyhow::Result<Outcome> {
    let g = grid(&args.grid)?;
    let opts = ModelOptions {
        deriv: args.analysis.deriv,
        limits: limits(&args.analysis),
        ..Default::default()
    };
    let report = proxgrowth::validate_model(&source("m", &args.m)?, &g, &opts)?;
    Ok(Outcome {
        positive: report.passing,
        payload: to_value(&report)?,
    })
}

pub fn check(args: &CheckArgs) -> anyhow::Result<Outcome> {
    let g = grid(&args.grid)?;
    let m = model(&args.m, &g, &args.analysis)?;
    let v = source("v", &args.v)?;
    let report = equivalence_report(&v, &m, &g, &proximate_opts(&args.analysis))?;
    Ok(Outcome {
        positive: report.theorem_consistent,
        payload: to_value(&report)?,
    })
}

pub fn valiron(args: &ValironArgs) -> anyhow::Result<Outcome> {
    let g = grid(&args.grid)?;
    let rho = match FunctionSpec::parse(&args.rho) {
        Ok(spec @ FunctionSpec::Csv { .. }) => RhoSource::Track(spec.to_track()?),
        _ => RhoSource::Family(parse_rho(&args.rho).map_err(spec_err("rho", &args.rho))?),
    };
    let opts = proximate_opts(&args.analysis);
    let verdict = check_valiron(&rho, &g, &opts)?;
    let bridge = valiron_bridge(&rho, &g, &opts)?;
    Ok(Outcome {
        positive: verdict.is_valiron && bridge.consistent,
        payload: json!({ "valiron": to_value(&verdict)?, "bridge": to_value(&bridge)? }),
    })
}

pub fn construct(args: &ConstructArgs) -> anyhow::Result<Outcome> {
    let g = grid(&args.grid)?;
    let m = model(&args.m, &g, &args.analysis)?;
    let a = source("a", &args.a)?;
    let opts = ConstructOptions {
        deriv: args.analysis.deriv,
        limits: limits(&args.analysis),
        window_frac: args.window,
        touch_tol: args.touch_tol,
        construct_tol: args.construct_tol,
        ..Default::default()
    };
    let r = construct_proximate(&a, &m, &g, &opts)?;
    if let Some(path) = &args.out {
        let file = File::create(path).with_context(|| format!("creating {path}"))?;
        r.write_csv(BufWriter::new(file))?;
    }
    let payload = json!({
        "rho_star": r.rho_star,
        "rho": r.proximate.rho.value,
        "q_upper": r.quality.q_upper,
        "q_touch": r.quality.q_touch,
        "touch_count": r.touch_indices.len(),
        "success": r.success,
        "rho_tolerance": r.rho_tolerance,
        "join_convex": r.join_convex,
        "smoothing_window": r.smoothing_window,
        "smoothing_slack": r.smoothing_slack,
        "lift": r.lift,
        "tail_gap": r.tail_gap,
        "order": to_value(&r.order)?,
        "proximate": to_value(&r.proximate)?,
    });
    Ok(Outcome {
        positive: r.success,
        payload,
    })
}

/// `n` radii spaced evenly in `ln r`.
fn radii(r0: f64, r1: f64, n: usize) -> anyhow::Result<Vec<f64>> {
    anyhow::ensure!(
        r0 > 0.0 && r1 > r0 && n >= 2,
        "need 0 < r0 < r1 and at least 2 radii"
    );
    let (a, b) = (r0.ln(), r1.ln());
    Ok((0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect())
}

pub fn means(args: &MeansArgs) -> anyhow::Result<Outcome> {
    let u = parse_plane(&args.u).map_err(spec_err("u", &args.u))?;
    let rs = radii(args.r0, args.r1, args.nr)?;
    let opts = MeansOptions {
        n_quad: args.n_quad,
        n_radial: args.n_radial,
        n_scan: args.n_scan,
        normalization: args.normalization,
        shift: args.shift,
        ..Default::default()
    };
    let s = means_series(&u, &rs, &opts)?;
    if let Some(path) = &args.out {
        let file = File::create(path).with_context(|| format!("creating {path}"))?;
        s.write_csv(BufWriter::new(file))?;
    }
    let slack = |i: usize| 1e-10 * (1.0 + s.m[i].abs());
    let ordered = (0..rs.len()).all(|i| s.b[i] <= s.c[i] + slack(i) && s.c[i] <= s.m[i] + slack(i));
    let min_second_difference = |v: &[f64]| {
        v.windows(3)
            .map(|w| w[0] - 2.0 * w[1] + w[2])
            .fold(f64::INFINITY, f64::min)
    };
    let payload = json!({
        "function": u.to_string(),
        "ordered": ordered,
        "min_second_difference": {
            "c": min_second_difference(&s.c),
            "b": min_second_difference(&s.b),
            "m": min_second_difference(&s.m),
        },
        "series": to_value(&s)?,
    });
    Ok(Outcome {
        positive: true,
        payload,
    })
}

pub fn limits_cmd(args: &LimitsArgs) -> anyhow::Result<Outcome> {
    let spec = FunctionSpec::parse(&args.track).map_err(spec_err("track", &args.track))?;
    let track = spec.to_track()?;
    let opts = LimitOptions {
        tol: args.tol,
        tail_fraction: args.tail_fraction,
        ..Default::default()
    };
    let limit = estimate_limit(&track, &opts)?;
    let limsup = estimate_limsup(&track, &opts)?;
    Ok(Outcome {
        positive: limit.is_converged(),
        payload: json!({ "limit": to_value(&limit)?, "limsup": to_value(&limsup)? }),
    })
}
