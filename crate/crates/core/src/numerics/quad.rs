//! Adaptive Gauss–Kronrod quadrature, specialised for integrals against Lévy
//! densities on `ℝ∖{0}`.
//!
//! The real line is cut at the split points (always including `-1, 0, 1`).
//! Panels that touch the origin are mapped with `x = s·e^{-t}` so that the
//! `1/x²` (NIG) and `1/|x|` (VG) singularities become exponentially decaying
//! integrands in `t`. The two outer tails and the `t`-ranges are covered by
//! panels of doubling length until a panel contributes less than
//! `abs_tol·1e-3`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_634_632,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and panel layout for [`integrate_levy`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Sorted cut points; always contains `-1`, `0` and `1`.
    pub split_points: Vec<f64>,
    /// Subdivision cap per panel.
    pub max_subdivisions: usize,
    /// Largest `|x|` the tail search may reach before giving up.
    pub tail_limit: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            split_points: vec![-1.0, 0.0, 1.0],
            max_subdivisions: 400,
            tail_limit: 1e5,
        }
    }
}

impl QuadSpec {
    /// Adds extra cut points (e.g. kinks of an indicator in the integrand).
    pub fn with_splits(mut self, extra: &[f64]) -> Self {
        self.split_points.extend(extra.iter().copied().filter(|x| x.is_finite()));
        self.normalise();
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    fn normalise(&mut self) {
        self.split_points.extend([-1.0, 0.0, 1.0]);
        self.split_points.sort_by(|a, b| a.total_cmp(b));
        self.split_points.dedup();
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = crate::error::Violations::new();
        v.check(self.abs_tol > 0.0, || format!("abs_tol must be > 0, got {}", self.abs_tol));
        v.check(self.rel_tol > 0.0, || format!("rel_tol must be > 0, got {}", self.rel_tol));
        v.check(
            self.split_points.windows(2).all(|w| w[0] < w[1]),
            || "split_points must be strictly increasing".into(),
        );
        v.check(self.split_points.contains(&0.0), || "split_points must contain 0".into());
        v.check(self.max_subdivisions > 0, || "max_subdivisions must be > 0".into());
        v.finish()
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let abs_half = half.abs();
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    Segment {
        a,
        b,
        value: res_k * half,
        error: rescale_error(err, res_abs, res_asc),
        abs_value: res_abs,
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over the finite interval `[a, b]`.
///
/// Nodes are strictly interior, so `f` is never evaluated at `a` or `b`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadResult> {
    Ok(integrate_inner(&f, a, b, abs_tol, rel_tol, max_subdivisions)?.0)
}

/// Returns the result together with the integral of `|f|`.
fn integrate_inner<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<(QuadResult, f64)> {
    if a == b {
        return Ok((QuadResult { value: 0.0, abs_error: 0.0 }, 0.0));
    }
    let mut segs = vec![gk21(f, a, b)];
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        let abs_value: f64 = segs.iter().map(|s| s.abs_value).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { estimate: value, error_bound: error });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok((QuadResult { value, abs_error: error }, abs_value));
        }
        if segs.len() >= max_subdivisions {
            return Err(Error::Quadrature { estimate: value, error_bound: error });
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a.min(s.b) || mid >= s.a.max(s.b) {
            // interval cannot be split further in floating point
            return Err(Error::Quadrature { estimate: value, error_bound: error });
        }
        segs.push(gk21(f, s.a, mid));
        segs.push(gk21(f, mid, s.b));
    }
}

/// `∫ integrand(x)·density(x) dx` over `ℝ∖{0}`.
///
/// Where `density` vanishes the integrand is not consulted, so an overflowing
/// integrand far in a tail with a zero density does not poison the sum.
pub fn integrate_levy<I, D>(integrand: I, density: D, spec: &QuadSpec) -> Result<f64>
where
    I: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    integrate_levy_detailed(integrand, density, spec).map(|r| r.value)
}

pub fn integrate_levy_detailed<I, D>(integrand: I, density: D, spec: &QuadSpec) -> Result<QuadResult>
where
    I: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut spec = spec.clone();
    spec.normalise();
    spec.validate()?;
    let product = |x: f64| {
        let d = density(x);
        if d == 0.0 {
            0.0
        } else {
            integrand(x) * d
        }
    };
    let splits = &spec.split_points;
    let zero = splits.iter().position(|&s| s == 0.0).unwrap();
    let panel_tol = spec.abs_tol / 8.0;
    let mut total = 0.0;
    let mut err = 0.0;

    // Panels between consecutive splits that do not touch the origin.
    for w in splits.windows(2) {
        if w[0] == 0.0 || w[1] == 0.0 {
            continue;
        }
        let r = integrate(&product, w[0], w[1], panel_tol, spec.rel_tol, spec.max_subdivisions)?;
        total += r.value;
        err += r.abs_error;
    }

    // Panels touching the origin, in the variable t with x = s e^{-t}.
    for &s in [splits[zero - 1], splits[zero + 1]].iter() {
        let scale = s.abs();
        let g = |t: f64| {
            let x = s * (-t).exp();
            // Below 1e-90 the mass of x²ν(dx) is negligible for every
            // admissible density, while |x|^{-1-Y} would overflow.
            if x.abs() < ORIGIN_CUTOFF {
                0.0
            } else {
                product(x) * scale * (-t).exp()
            }
        };
        let r = doubling(&g, 0.0, 700.0, panel_tol, &spec)?;
        total += r.value;
        err += r.abs_error;
    }

    // Outer tails.
    let hi = *splits.last().unwrap();
    let lo = splits[0];
    let right = doubling(&|u: f64| product(hi + u), 0.0, spec.tail_limit, panel_tol, &spec)?;
    let left = doubling(&|u: f64| product(lo - u), 0.0, spec.tail_limit, panel_tol, &spec)?;
    total += right.value + left.value;
    err += right.abs_error + left.abs_error;

    if !total.is_finite() {
        return Err(Error::Quadrature { estimate: total, error_bound: err });
    }
    Ok(QuadResult { value: total, abs_error: err })
}

const ORIGIN_CUTOFF: f64 = 1e-90;

/// Integrates over `[start, ∞)` by panels `[0,1], [1,2], [2,4], …` until a
/// panel's absolute mass drops below `abs_tol·1e-3`.
fn doubling<F: Fn(f64) -> f64>(
    f: &F,
    start: f64,
    limit: f64,
    panel_tol: f64,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    let stop = spec.abs_tol * 1e-3;
    let mut a = start;
    let mut width = 1.0;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut quiet = 0;
    loop {
        let b = a + width;
        let (r, mass) = integrate_inner(f, a, b, panel_tol, spec.rel_tol, spec.max_subdivisions)?;
        total += r.value;
        err += r.abs_error;
        // Two consecutive negligible panels end the search.
        if mass < stop {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        if b >= limit {
            if mass < stop {
                break;
            }
            return Err(Error::Quadrature { estimate: total, error_bound: f64::INFINITY });
        }
        a = b;
        if a >= 1.0 {
            width = a;
        }
    }
    Ok(QuadResult { value: total, abs_error: err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_polynomials() {
        // 21-point Kronrod integrates degree 31 exactly on [-1, 1].
        for deg in 0..=31 {
            let s = gk21(&|x: f64| x.powi(deg), -1.0, 1.0);
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((s.value - exact).abs() < 1e-14, "degree {deg}");
        }
        let wsum: f64 = WGK[..10].iter().sum::<f64>() * 2.0 + WGK[10];
        assert!((wsum - 2.0).abs() < 1e-15);
        let gsum: f64 = WG.iter().sum::<f64>() * 2.0;
        assert!((gsum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn finite_interval_integrals() {
        let r = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13, 1e-13, 100).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        // integrable endpoint singularity
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10, 200).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_integrand() {
        let v = integrate_levy(|_| 0.0, |x: f64| (-x.abs()).exp() / x.abs(), &QuadSpec::default()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn never_evaluates_at_origin() {
        let v = integrate_levy(
            |x: f64| {
                assert!(x != 0.0);
                x * x
            },
            |x: f64| (-x.abs()).exp() / (x * x),
            &QuadSpec::default(),
        )
        .unwrap();
        // ∫ e^{-|x|} dx = 2
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn vg_exponential_compensated_integral() {
        // VG density with C = 1, G = M = 1.5 against e^x - 1 - x 1_{|x|<=1}
        // equals log(9/5).
        let dens = |x: f64| (-1.5 * x.abs()).exp() / x.abs();
        let v = integrate_levy(
            |x: f64| x.exp_m1() - if x.abs() <= 1.0 { x } else { 0.0 },
            dens,
            &QuadSpec::default(),
        )
        .unwrap();
        assert!((v - (9.0f64 / 5.0).ln()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn odd_integrand_even_density() {
        let dens = |x: f64| (-2.0 * x.abs()).exp() / (x * x);
        let v = integrate_levy(|x: f64| x.powi(3), dens, &QuadSpec::default()).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn extra_split_points() {
        let spec = QuadSpec::default().with_splits(&[0.5, -2.0]);
        assert_eq!(spec.split_points, vec![-2.0, -1.0, 0.0, 0.5, 1.0]);
        let dens = |x: f64| (-x.abs()).exp();
        let v = integrate_levy(|x: f64| if x > 0.5 { 1.0 } else { 0.0 }, dens, &spec).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn bad_spec_rejected() {
        let spec = QuadSpec { abs_tol: -1.0, ..QuadSpec::default() };
        assert!(matches!(
            integrate_levy(|_| 1.0, |_| 1.0, &spec),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn non_integrable_tail_fails() {
        let spec = QuadSpec { tail_limit: 100.0, ..QuadSpec::default() };
        let r = integrate_levy(|_| 1.0, |x: f64| 1.0 / x.abs().max(1.0), &spec);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
