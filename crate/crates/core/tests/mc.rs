use std::f64::consts::PI;

use qsd_core::mc::*;
use qsd_core::models::*;
use qsd_core::numerics::RngStream;

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn draws(params: &ModelParams, dt: f64, n: usize, seed: u64) -> Vec<f64> {
    let s = IncrementSampler::new(params, dt).unwrap();
    let mut rng = RngStream::new(seed, 0);
    (0..n).map(|_| s.sample(&mut rng)).collect()
}

/// κ'(0) and κ''(0) by central differences of the closed-form cumulant.
fn cumulant_derivatives(p: &ModelParams) -> (f64, f64) {
    let h = 1e-4;
    let (up, down) = (p.cumulant(h).unwrap(), p.cumulant(-h).unwrap());
    ((up - down) / (2.0 * h), (up + down - 2.0 * p.cumulant(0.0).unwrap()) / (h * h))
}

fn catalog() -> Vec<QsdSpec> {
    [
        (SymmetricBase::Nig { a: 1.0, d: 1.0 }, 0.5),
        (SymmetricBase::Nig { a: 1.0, d: 1.0 }, 1.5),
        (SymmetricBase::Vg { c: 1.0, beta: 1.5 }, 0.5),
        (SymmetricBase::Vg { c: 10.0, beta: 15.0 }, 0.5),
        (SymmetricBase::Meixner { b: -PI / 2.0, d: 1.0 }, 1.5),
        (SymmetricBase::Meixner { b: -PI / 2.0, d: 1.0 }, 3.0),
        (SymmetricBase::BlackScholes { sigma: 0.2 }, 0.5),
    ]
    .into_iter()
    .map(|(b, a)| QsdSpec::calibrated(b, a).unwrap())
    .collect()
}

#[test]
fn symmetric_nig_increments_are_centred() {
    let p = ModelParams::Nig(NigParams { a: 1.0, b: 0.0, d: 1.0, m: 0.0 });
    let (m, se) = mean_se(&draws(&p, 1.0, 1_000_000, 42));
    assert!(m.abs() <= 4.0 * se, "{m} ± {se}");
}

#[test]
fn vg_increment_mean() {
    let (c, g, mm, m) = (1.3, 2.0, 3.5, 0.1);
    let p = ModelParams::Vg(VgParams { C: c, G: g, M: mm, m });
    let dt = 0.5;
    let (mean, se) = mean_se(&draws(&p, dt, 1_000_000, 7));
    let want = (m + c / mm - c / g) * dt;
    assert!((mean - want).abs() <= 4.0 * se, "{mean} ± {se} vs {want}");
}

#[test]
fn second_moments_match_cumulant() {
    for spec in catalog() {
        let p = spec.native();
        let (k1, k2) = cumulant_derivatives(&p);
        let xs = draws(&p, 1.0, 400_000, 11);
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let (m2, se) = mean_se(&sq);
        let want = k2 + k1 * k1;
        let band = if matches!(p, ModelParams::Meixner(_)) { 5.0 } else { 4.0 };
        assert!((m2 - want).abs() <= band * se + 1e-6 * want, "{spec}: {m2} ± {se} vs {want}");
    }
}

#[test]
fn increments_compose_exactly() {
    for spec in catalog() {
        let one = terminal_moments(&spec, &McConfig::default().with_paths(200_000).with_seed(1)).unwrap();
        let many = terminal_moments(&spec, &McConfig::default().with_paths(200_000).with_seed(2).with_steps(16)).unwrap();
        for (a, b) in one.iter().zip(&many) {
            let se = a.std_error.hypot(b.std_error);
            assert!((a.mean - b.mean).abs() <= 5.0 * se, "{spec}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn calibrated_catalog_is_doubly_martingale() {
    for spec in catalog() {
        let (ex, sa) = martingale_test(&spec, &McConfig::default().with_paths(400_000)).unwrap();
        let band = if matches!(spec.base(), SymmetricBase::Meixner { .. }) { 5.0 } else { 4.0 };
        assert!(ex.z_against(1.0).abs() <= band, "{spec}: E[e^X] = {ex:?}");
        assert!(sa.z_against(1.0).abs() <= band, "{spec}: E[R^α] = {sa:?}");
    }
}

#[test]
fn duality_z_scores_are_well_behaved() {
    let spec = QsdSpec::calibrated(SymmetricBase::Nig { a: 1.0, d: 1.0 }, 1.5).unwrap();
    let f = PayoffDescriptor::Call { strike: 1.0 };
    let large = (1..=20)
        .map(|seed| duality_test(&spec, &f, &McConfig::default().with_paths(100_000).with_seed(seed)).unwrap().z_score)
        .filter(|z| z.abs() > 3.0)
        .count();
    assert!(large <= 1, "{large} of 20 repetitions with |z| > 3");
}

#[test]
fn constant_payoff_sides() {
    let spec = QsdSpec::calibrated(SymmetricBase::Vg { c: 1.0, beta: 1.5 }, 0.5).unwrap();
    let out = duality_test(&spec, &PayoffDescriptor::Constant, &McConfig::default().with_paths(200_000)).unwrap();
    assert_eq!(out.lhs.mean, 1.0);
    assert_eq!(out.lhs.std_error, 0.0);
    assert!(out.rhs.z_against(1.0).abs() <= 4.0);
}

#[test]
fn constant_function_has_no_error() {
    let spec = QsdSpec::calibrated(SymmetricBase::Nig { a: 1.0, d: 1.0 }, 0.5).unwrap();
    let e = mc_expectation(&spec, |_| 1.0, &McConfig::default().with_paths(50_000)).unwrap();
    assert_eq!((e.mean, e.std_error, e.n), (1.0, 0.0, 50_000));
}

#[test]
fn mgf_matches_cumulant() {
    // Bases wide enough that e^{2θX} is integrable for every θ tested, so
    // the standard errors are meaningful.
    for (base, alpha) in [
        (SymmetricBase::Nig { a: 3.0, d: 1.0 }, 1.5),
        (SymmetricBase::Vg { c: 2.0, beta: 4.0 }, 1.5),
        (SymmetricBase::BlackScholes { sigma: 0.3 }, 0.5),
    ] {
        let spec = QsdSpec::calibrated(base, alpha).unwrap();
        let thetas = [-alpha / 2.0, 1.0 - alpha / 2.0, 1.0];
        let est = mgf_estimates(&spec, &thetas, &McConfig::default().with_paths(400_000)).unwrap();
        for (th, e) in thetas.iter().zip(&est) {
            let want = spec.native().cumulant(*th).unwrap();
            let se = e.std_error / e.mean;
            assert!((e.mean.ln() - want).abs() <= 5.0 * se, "{spec} θ={th}: {} vs {want} (se {se})", e.mean.ln());
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let spec = QsdSpec::calibrated(SymmetricBase::Nig { a: 1.0, d: 1.0 }, 0.5).unwrap();
    let cfg = McConfig::default().with_paths(5 * BLOCK_PATHS + 123);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| duality_test(&spec, &PayoffDescriptor::Put { strike: 1.0 }, &cfg).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn antithetic_is_unbiased() {
    let spec = QsdSpec::calibrated(SymmetricBase::Vg { c: 1.0, beta: 1.5 }, 0.5).unwrap();
    let cfg = McConfig { antithetic: true, ..McConfig::default().with_paths(200_000) };
    let (ex, sa) = martingale_test(&spec, &cfg).unwrap();
    assert!(ex.z_against(1.0).abs() <= 4.0 && sa.z_against(1.0).abs() <= 4.0, "{ex:?} {sa:?}");
}

#[test]
fn paths_start_at_spot_and_reproduce() {
    let spec = QsdSpec::calibrated(SymmetricBase::Meixner { b: -PI / 2.0, d: 1.0 }, 1.5).unwrap();
    let cfg = McConfig { s0: 100.0, ..McConfig::default().with_steps(8) };
    let a = simulate_path(&spec, &cfg, &mut RngStream::new(5, 9)).unwrap();
    let b = simulate_path(&spec, &cfg, &mut RngStream::new(5, 9)).unwrap();
    let c = simulate_path(&spec, &cfg, &mut RngStream::new(5, 10)).unwrap();
    assert_eq!(a.len(), 9);
    assert_eq!(a[0], (0.0, 100.0));
    assert_eq!(a.last().unwrap().0, 1.0);
    assert!(a.iter().all(|&(_, s)| s > 0.0));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn cgmy_has_no_sampler() {
    let spec = QsdSpec::calibrated(SymmetricBase::Cgmy { c: 1.0, beta: 1.5, y: 0.5 }, 0.5).unwrap();
    assert!(martingale_test(&spec, &McConfig::default().with_paths(10)).is_err());
}
