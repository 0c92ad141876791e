use proptest::prelude::*;

use proxgrowth::asymptotics::{verify_lhopital, LhopitalCase};
use proxgrowth::construct::ConstructOptions;
use proxgrowth::deriv::sample;
use proxgrowth::funcspec::{parse_family, parse_plane};
use proxgrowth::subharmonic::{MeansOptions, PlaneFunction};
use proxgrowth::*;

fn id(grid: &GridSpec) -> ModelGrowth {
    ModelGrowth::validate(Family::Id.into(), grid, &ModelOptions::default()).unwrap()
}

fn rho_of(v: Family, m: &ModelGrowth, g: &GridSpec) -> f64 {
    let r = check_proximate(&v.into(), m, g, &Default::default()).unwrap();
    assert!(r.is_proximate);
    r.rho.value.unwrap()
}

fn smooth_family() -> impl Strategy<Value = Family> {
    prop_oneof![
        (0.5..5.0f64).prop_map(|rho| Family::Pow { rho }),
        (0.5..5.0f64, -3.0..3.0f64).prop_map(|(rho, b)| Family::PowLog { rho, b }),
        (0.5..5.0f64, -3.0..3.0f64).prop_map(|(rho, b)| Family::PowLogLog { rho, b }),
        (1.0..4.0f64, -2.0..2.0f64)
            .prop_map(|(rho, b)| Family::Valiron(RhoFamily::LogLog { rho, b })),
    ]
}

fn plane() -> impl Strategy<Value = PlaneFunction> {
    let leaf = prop_oneof![
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| PlaneFunction::LogAbs { re, im }),
        Just(PlaneFunction::AbsSq),
        Just(PlaneFunction::Re),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(PlaneFunction::max_of),
            (inner.clone(), -2.0..2.0f64).prop_map(|(u, c)| u.shifted(c)),
            (inner, -4.0..4.0f64).prop_map(|(u, t)| u.rotated(t)),
        ]
    })
}

/// Radius kept away from every singular point of `u`; the trapezoid error
/// decays like `(r / |a|)^n`, so the margin is relative.
fn clear_of_singularities(u: &PlaneFunction, r: f64) -> bool {
    u.singular_points().iter().all(|(a, b)| {
        let d = a.hypot(*b);
        (d - r).abs() > 0.1 * d.max(r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constant_plus_decay_converges(c in -10.0..10.0f64, a in -50.0..50.0f64) {
        let xs = GridSpec::default().points();
        let t = Track::from_fn(&xs, |x| c + a / x).unwrap();
        let e = estimate_limit(&t, &LimitOptions::default()).unwrap();
        prop_assert_eq!(e.status, LimitStatus::Converged);
        let v = e.value.unwrap();
        prop_assert!((v - c).abs() <= a.abs() / 5000.0 + e.tail_residual + 1e-12);
    }

    #[test]
    fn limsup_dominates_limit(c in -5.0..5.0f64, a in -20.0..20.0f64, b in 0.0..20.0f64, w in 0.05..2.0f64) {
        let xs = GridSpec::default().points();
        let t = Track::from_fn(&xs, |x| c + a / x + b * (w * x).sin() / x).unwrap();
        let opts = LimitOptions::default();
        let lim = estimate_limit(&t, &opts).unwrap();
        let sup = estimate_limsup(&t, &opts).unwrap();
        if let (Some(l), Some(s)) = (lim.value, sup.value) {
            prop_assert!(s >= l - lim.tail_residual - 1e-12, "limsup {} < limit {}", s, l);
        }
    }

    #[test]
    fn scaling_keeps_and_powers_multiply_the_order(f in smooth_family(), c in 0.1..10.0f64, a in 0.25..3.0f64) {
        let g = GridSpec::default();
        let m = id(&g);
        let base = rho_of(f.clone(), &m, &g);
        prop_assert!((rho_of(f.clone().scaled(c), &m, &g) - base).abs() <= 1e-9);
        prop_assert!((rho_of(f.powered(a), &m, &g) - a * base).abs() <= 1e-9 * (1.0 + a * base));
    }

    #[test]
    fn every_model_is_proximate_to_itself(f in smooth_family()) {
        let g = GridSpec::default();
        let m = ModelGrowth::validate(f.clone().into(), &g, &ModelOptions::default());
        prop_assume!(m.is_ok());
        let m = m.unwrap();
        let r = check_proximate(&f.into(), &m, &g, &Default::default()).unwrap();
        prop_assert!(r.is_proximate);
        prop_assert!((r.rho.value.unwrap() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn lhopital_on_power_ratios(p in 0.1..3.0f64, q in 0.1..3.0f64, c in 0.1..10.0f64) {
        // Closer exponents decay too slowly to classify on this window.
        prop_assume!((p - q).abs() >= 0.1);
        let case = LhopitalCase {
            f: Family::Pow { rho: p }.scaled(c).into(),
            g: Family::Pow { rho: q }.into(),
            expected_l: None,
        };
        let g = GridSpec::new(1.0, 200.0, 1024).unwrap();
        let r = verify_lhopital(&case, &g, DerivMode::Auto, &LimitOptions::default()).unwrap();
        prop_assert!(r.passes, "{:?}", r);
    }

    #[test]
    fn construction_majorizes(rho in 1.0..4.0f64, frac in 0.0..0.7f64) {
        // a < rho / sqrt 2 keeps A increasing.
        let a = frac * rho;
        let g = GridSpec::new(1.0, 4000.0, 1024).unwrap();
        let fam = Family::OscSlow { rho, a };
        let r = construct_proximate(&fam.into(), &id(&g), &g, &ConstructOptions::default()).unwrap();
        for (v, p) in r.v.ys().iter().zip(&r.ln_a) {
            prop_assert!(*v >= p - 1e-12 * p.abs().max(1.0));
        }
        prop_assert!(r.quality.q_upper <= 1.0 + 1e-12);
        prop_assert_eq!(*r.hull_slopes.last().unwrap(), r.rho_star);
    }

    #[test]
    fn circle_means_ignore_rotation(u in plane(), r in 0.1..5.0f64, t in -4.0..4.0f64) {
        prop_assume!(clear_of_singularities(&u, r));
        let a = circle_mean(&u, r, 1024).unwrap();
        let b = circle_mean(&u.clone().rotated(t), r, 1024).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn doubling_nodes_changes_little(u in plane(), r in 0.1..5.0f64) {
        prop_assume!(clear_of_singularities(&u, r));
        let a = circle_mean(&u, r, 512).unwrap();
        let b = circle_mean(&u, r, 1024).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn sampling_is_deterministic(f in smooth_family(), x0 in 1.0..10.0f64, n in 8usize..200) {
        let g = GridSpec::new(x0, x0 + 50.0, n).unwrap();
        let fam = AnalyticFamily::from(f);
        let a = sample(&fam, &g).unwrap();
        let b = sample(&fam, &g).unwrap();
        prop_assert_eq!(a.xs(), b.xs());
        prop_assert!(a.ys().iter().zip(b.ys()).all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    #[test]
    fn specs_round_trip(f in smooth_family(), c in 0.1..10.0f64, u in plane()) {
        // `scale@f@log` may come back grouped differently; it must print and
        // evaluate the same.
        let scaled = f.scaled(c).compose(Family::Log);
        let text = scaled.to_string();
        let back = parse_family(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        for x in [2.0, 30.0, 900.0] {
            prop_assert_eq!(back.eval_loglog(x), scaled.eval_loglog(x));
        }
        prop_assert_eq!(parse_plane(&u.to_string()).unwrap(), u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn means_are_deterministic(u in plane()) {
        let rs = [0.5, 1.5, 4.0];
        let opts = MeansOptions { n_quad: 256, n_scan: 256, ..Default::default() };
        let a = subharmonic::means_series(&u, &rs, &opts).unwrap();
        let b = subharmonic::means_series(&u, &rs, &opts).unwrap();
        prop_assert_eq!(a, b);
    }
}
