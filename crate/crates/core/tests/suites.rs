use proxgrowth::asymptotics::verify_lhopital;
use proxgrowth::catalog::{
    construct_cases, identity_pairs, lhopital_cases, non_proximate_pairs, proximate_pairs,
    valiron_rhos,
};
use proxgrowth::deriv::{dlog_numeric, sample};
use proxgrowth::proximate::{check_valiron, identity6_residual, valiron_bridge, RhoSource};
use proxgrowth::subharmonic::{subharmonic_catalog, sup_on_circle};
use proxgrowth::*;

fn model(m: &Family, grid: &GridSpec) -> ModelGrowth {
    ModelGrowth::validate(m.clone().into(), grid, &ModelOptions::default()).unwrap()
}

#[test]
fn identity_holds_to_float_noise() {
    let pairs = identity_pairs();
    assert!(pairs.len() >= 12);
    for p in pairs {
        let m = model(&p.m, &p.grid);
        let v = Source::from(p.v.clone());
        let exact = identity6_residual(&v, &m, &p.grid, &Default::default()).unwrap();
        assert!(exact <= 1e-9, "{}: {exact:e}", p.label);
        let numeric = identity6_residual(
            &v,
            &m,
            &p.grid,
            &ProximateOptions::with_deriv(DerivMode::Numeric),
        )
        .unwrap();
        assert!(numeric <= 1e-5, "{}: {numeric:e}", p.label);
    }
}

#[test]
fn both_characterisations_agree() {
    let yes = proximate_pairs();
    let no = non_proximate_pairs();
    assert!(yes.len() >= 6 && no.len() >= 3);
    for p in yes.iter().chain(&no) {
        let m = model(&p.m, &p.grid);
        let r = equivalence_report(&p.v.clone().into(), &m, &p.grid, &Default::default()).unwrap();
        assert!(r.theorem_consistent, "{}: {r:?}", p.label);
        assert_eq!(r.statement_i, p.rho.is_some(), "{}", p.label);
        if let Some(rho) = p.rho {
            assert!(r.rho_agreement.unwrap() <= 2e-2, "{}", p.label);
            assert!(
                (r.verdict_i.rho.value.unwrap() - rho).abs() <= 2e-2,
                "{}",
                p.label
            );
        }
    }
}

#[test]
fn valiron_orders_match_the_bridge() {
    let g = GridSpec::default();
    for (rho, expect) in valiron_rhos() {
        let r = valiron_bridge(&RhoSource::Family(rho), &g, &Default::default()).unwrap();
        assert!(r.consistent, "{rho}: {r:?}");
        assert_eq!(r.valiron.is_valiron, expect, "{rho}");
        if expect {
            assert!(r.rho_difference.unwrap() <= 2e-2);
        }
    }
}

#[test]
fn oscillating_order_is_rejected_on_the_derivative_track() {
    let rho = RhoSource::Family(RhoFamily::SinLog { rho: 2.0, a: 1.0 });
    let r = check_valiron(&rho, &GridSpec::default(), &Default::default()).unwrap();
    assert!(!r.is_valiron);
    assert_eq!(r.x_rho_prime.status, LimitStatus::Oscillating);
}

#[test]
fn lhopital_catalog_passes() {
    let cases = lhopital_cases();
    assert!(cases.len() >= 5);
    for (label, case) in cases {
        let r = verify_lhopital(
            &case,
            &GridSpec::default(),
            DerivMode::Auto,
            &Default::default(),
        )
        .unwrap();
        assert!(r.passes, "{label}: {r:?}");
        if let (Some(l), Some(v)) = (case.expected_l, r.l_ratio.value) {
            assert!((v - l).abs() <= 1e-2, "{label}");
        }
    }
}

#[test]
fn construction_succeeds_on_the_catalog() {
    for c in construct_cases().unwrap() {
        let m = model(&c.m, &c.grid);
        let r = construct_proximate(&c.a, &m, &c.grid, &Default::default()).unwrap();
        assert!(r.success, "{}: {r:?}", c.label);
        assert!(
            r.quality.q_upper <= 1.01 && r.quality.q_touch >= 0.99,
            "{}",
            c.label
        );
        assert!((r.hull_slopes.last().unwrap() - r.rho_star).abs() <= 1e-12);
        if !r.join_convex {
            assert!(
                r.hull_slopes.windows(2).all(|w| w[1] <= w[0]),
                "{}",
                c.label
            );
        }
        let touching = &r.touch_indices;
        assert!(!touching.is_empty(), "{}", c.label);
    }
}

#[test]
fn already_proximate_input_is_kept_on_the_tail() {
    let g = GridSpec::default();
    let m = model(&Family::Id, &g);
    let r = construct_proximate(
        &Family::Pow { rho: 2.0 }.into(),
        &m,
        &g,
        &Default::default(),
    )
    .unwrap();
    assert!(r.tail_gap <= r.smoothing_slack.max(1e-9));
}

#[test]
fn halving_the_step_quarters_the_error() {
    let fams = [
        Family::PowLog { rho: 3.0, b: 2.0 },
        Family::PowLogLog { rho: 2.0, b: 1.0 },
        Family::SqrtLog,
        Family::Log,
        Family::OscSlow { rho: 2.0, a: 1.0 },
    ];
    for f in fams {
        let fam = AnalyticFamily::from(f.clone());
        let coarse = sample(&fam, &GridSpec::new(10.0, 50.0, 41).unwrap()).unwrap();
        let fine = sample(&fam, &GridSpec::new(10.0, 50.0, 81).unwrap()).unwrap();
        let x = 30.0;
        let exact = fam.exact_dlog(x).unwrap();
        let ec = (dlog_numeric(&coarse, coarse.index_of(x).unwrap()).unwrap() - exact).abs();
        let ef = (dlog_numeric(&fine, fine.index_of(x).unwrap()).unwrap() - exact).abs();
        let ratio = ec / ef;
        assert!((3.5..=4.5).contains(&ratio), "{f}: {ratio}");
    }
}

#[test]
fn means_catalog_is_ordered_and_convex() {
    let rs: Vec<f64> = (0..64)
        .map(|k| (-2.0 + 6.0 * k as f64 / 63.0).exp())
        .collect();
    let opts = subharmonic::MeansOptions::default();
    for u in subharmonic_catalog() {
        let s = means_series(&u, &rs, &opts).unwrap();
        for (i, r) in rs.iter().enumerate() {
            let slack = 1e-10 * (1.0 + s.m[i].abs());
            assert!(
                s.b[i] <= s.c[i] + slack && s.c[i] <= s.m[i] + slack,
                "{u} at r = {r}"
            );
        }
        for series in [&s.c, &s.b, &s.m] {
            for w in series.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-8, "{u}");
            }
        }
    }
}

#[test]
fn jensen_values() {
    let u = subharmonic::PlaneFunction::log_abs(0.0);
    for r in [0.3, 1.0, 7.0] {
        assert!((circle_mean(&u, r, 1024).unwrap() - r.ln()).abs() <= 1e-12);
    }
    let shifted = subharmonic::PlaneFunction::log_abs(1.0);
    assert!((circle_mean(&shifted, 2.0, 512).unwrap() - 2f64.ln()).abs() <= 1e-8);
    // max |z - 1| on |z| = 2 is 3.
    assert!((sup_on_circle(&shifted, 2.0, 1024, 1e-12).unwrap() - 3f64.ln()).abs() <= 1e-9);
}
