use proptest::prelude::*;
use qsd_core::models::*;
use qsd_core::qsd::check_measure_symmetry;

/// A symmetric base together with an admissible order.
fn base_and_alpha() -> impl Strategy<Value = (SymmetricBase, f64)> {
    let frac = 0.02f64..0.98;
    prop_oneof![
        (0.6f64..3.0, 0.2f64..2.0, frac.clone()).prop_map(|(a, d, u)| (SymmetricBase::Nig { a, d }, u)),
        (0.2f64..5.0, 0.8f64..8.0, frac.clone()).prop_map(|(c, beta, u)| (SymmetricBase::Vg { c, beta }, u)),
        (0.2f64..3.0, 1.1f64..5.0, prop_oneof![0.1f64..0.9, 1.1f64..1.8], frac.clone())
            .prop_map(|(c, beta, y, u)| (SymmetricBase::Cgmy { c, beta, y }, u)),
        (prop_oneof![-3.0f64..-0.1, 0.1f64..3.0], 0.2f64..2.0, frac.clone())
            .prop_map(|(b, d, u)| (SymmetricBase::Meixner { b, d }, u)),
        (0.05f64..1.0, frac).prop_map(|(sigma, u)| (SymmetricBase::BlackScholes { sigma }, u)),
    ]
    .prop_map(|(base, u)| {
        let (lo, hi) = base.alpha_interval();
        let (lo, hi) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo, hi),
            (true, false) => (lo, lo + 6.0),
            (false, true) => (hi - 6.0, hi),
            (false, false) => (-4.0, 4.0),
        };
        (base, lo + u * (hi - lo))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tilted_density_is_even((base, alpha) in base_and_alpha()) {
        let native = base.native(alpha, 0.0);
        let grid: Vec<f64> = (1..=60).map(|k| 0.01 * 1.12f64.powi(k)).collect();
        let err = check_measure_symmetry(&native.density(), alpha, &grid).unwrap();
        prop_assert!(err <= 1e-10, "{base} alpha={alpha}: {err}");
    }

    #[test]
    fn cumulant_convex_on_strip((base, alpha) in base_and_alpha(), m in -1.0f64..1.0) {
        let p = base.native(alpha, m);
        let (lo, hi) = p.strip();
        let (lo, hi) = (lo.max(-20.0) + 1e-3, hi.min(20.0) - 1e-3);
        let h = 1e-3 * (hi - lo);
        for k in 1..40 {
            let th = lo + (hi - lo) * k as f64 / 40.0;
            let (a, b, c) = (p.cumulant(th - h).unwrap(), p.cumulant(th).unwrap(), p.cumulant(th + h).unwrap());
            prop_assert!((a - 2.0 * b + c) / (h * h) >= -1e-8 * (1.0 + b.abs() / (h * h)), "{p:?} at {th}");
        }
    }

    #[test]
    fn cumulant_vanishes_at_zero((base, alpha) in base_and_alpha(), m in -1.0f64..1.0) {
        prop_assert_eq!(base.native(alpha, m).cumulant(0.0).unwrap(), 0.0);
    }

    #[test]
    fn triplet_reproduces_cumulant((base, alpha) in base_and_alpha(), m in -0.5f64..0.5, t in 0.1f64..0.9) {
        let p = base.native(alpha, m);
        let (lo, hi) = p.strip();
        let th = (lo.max(-3.0)) + t * (hi.min(3.0) - lo.max(-3.0));
        let trip = triplet_of(&p).unwrap();
        let quad = trip.cumulant_by_quadrature(th, &Default::default()).unwrap();
        let closed = p.cumulant(th).unwrap();
        prop_assert!((quad - closed).abs() <= 1e-7 * (1.0 + closed.abs()), "{p:?} θ={th}: {quad} vs {closed}");
    }

    #[test]
    fn text_form_round_trips((base, alpha) in base_and_alpha(), m in -1.0f64..1.0) {
        let p = base.native(alpha, m);
        let back: ModelParams = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
        let spec = QsdSpec::new(base, alpha, 0.0);
        if let Ok(spec) = spec {
            prop_assert_eq!(spec.to_string().parse::<QsdSpec>().unwrap(), spec);
        }
    }
}

#[test]
fn symmetric_meixner_density_is_even() {
    let p = ModelParams::Meixner(MeixnerParams { a: 1.3, b: 0.0, d: 0.7, m: 0.0 });
    for k in 1..200 {
        let x = 0.05 * k as f64;
        let (l, r) = (levy_density(&p, -x).unwrap(), levy_density(&p, x).unwrap());
        assert!((l - r).abs() <= 1e-15 * r, "{x}");
    }
}

#[test]
fn invalid_parameters_list_every_violation() {
    let err = ModelParams::Nig(NigParams { a: -1.0, b: 2.0, d: -1.0, m: 0.0 }).validate().unwrap_err();
    match err {
        qsd_core::Error::Validation(v) => assert!(v.len() >= 2, "{v:?}"),
        e => panic!("{e}"),
    }
    assert!(ModelParams::Cgmy(CgmyParams { C: 1.0, G: 1.0, M: 1.0, Y: 1.0, m: 0.0 }).validate().is_err());
}

#[test]
fn nig_cumulant_hand_value() {
    // a=1, b=−1/2, d=1, m=0: κ(1) = √(3/4) − √(3/4) = 0
    let p = ModelParams::Nig(NigParams { a: 1.0, b: -0.5, d: 1.0, m: 0.0 });
    assert!(p.cumulant(1.0).unwrap().abs() < 1e-15);
    assert!(p.cumulant(1.6).is_err());
}

proptest! {
    #[test]
    fn tilt_is_exponential_reweighting((base, alpha) in base_and_alpha(), theta in -1.0f64..1.0, x in prop_oneof![-6.0f64..-0.01, 0.01f64..6.0]) {
        let density = QsdSpec::calibrated(base, alpha).unwrap().native().density();
        let direct = (theta * x).exp() * density.eval(x);
        let tilted = density.tilted(theta).eval(x);
        prop_assert!((direct - tilted).abs() <= 1e-12 * direct.abs(), "{direct} vs {tilted}");
    }
}
