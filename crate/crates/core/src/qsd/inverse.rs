use std::fmt;

use serde::{Deserialize, Serialize};

use super::forward::{forward_domain, lambda_of_alpha, lambda_of_alpha_unchecked};
use crate::error::{Error, Result};
use crate::models::{MeixnerCase, SymmetricBase, ALPHA_MARGIN};
use crate::numerics::find_root;

/// Residual bound for closed-form identities.
pub const CLOSED_FORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Principal,
    /// Second Meixner solution `ᾱ > 2` in the non-unique band.
    Upper,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Principal => "principal",
            Branch::Upper => "upper",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub alpha: f64,
    pub branch: Branch,
    /// `λ(α) − λ`.
    pub residual: f64,
}

/// All orders `α` with `λ(α) = target_lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionResult {
    pub target_lambda: f64,
    pub solutions: Vec<Solution>,
}

impl InversionResult {
    fn build(base: &SymmetricBase, target_lambda: f64, found: &[(f64, Branch)]) -> Result<Self> {
        let solutions = found
            .iter()
            .map(|&(alpha, branch)| {
                let residual = lambda_of_alpha(base, alpha)? - target_lambda;
                Ok(Solution { alpha, branch, residual })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { target_lambda, solutions })
    }

    pub fn principal(&self) -> Option<f64> {
        self.solutions.iter().find(|s| s.branch == Branch::Principal).map(|s| s.alpha)
    }

    pub fn upper(&self) -> Option<f64> {
        self.solutions.iter().find(|s| s.branch == Branch::Upper).map(|s| s.alpha)
    }

    pub fn is_unique(&self) -> bool {
        self.solutions.len() == 1
    }

    pub fn max_residual(&self) -> f64 {
        self.solutions.iter().map(|s| s.residual.abs()).fold(0.0, f64::max)
    }

    pub const CSV_HEADER: &'static str = "lambda,alpha,branch,residual";

    /// One CSV record per solution.
    pub fn csv_records(&self, fmt_num: impl Fn(f64) -> String) -> Vec<String> {
        self.solutions
            .iter()
            .map(|s| format!("{},{},{},{}", fmt_num(self.target_lambda), fmt_num(s.alpha), s.branch, fmt_num(s.residual)))
            .collect()
    }
}

impl fmt::Display for InversionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lambda = {}", self.target_lambda)?;
        for s in &self.solutions {
            writeln!(f, "  alpha = {}  branch = {}  residual = {:e}", s.alpha, s.branch, s.residual)?;
        }
        if self.solutions.len() > 1 {
            writeln!(f, "  note: inversion is not unique for this carrying cost")?;
        }
        Ok(())
    }
}

/// Range of `λ(α)` over the admissible orders, with flags telling whether
/// each end is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaImage {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl LambdaImage {
    /// Moves `lambda` onto an attained end point when it misses it by
    /// rounding only.
    pub fn snap(&self, lambda: f64) -> f64 {
        let near = |end: f64| (lambda - end).abs() <= 1e-13 * end.abs().max(1.0);
        if self.lo_closed && near(self.lo) {
            self.lo
        } else if self.hi_closed && near(self.hi) {
            self.hi
        } else {
            lambda
        }
    }

    pub fn contains(&self, lambda: f64) -> bool {
        let above = if self.lo_closed { lambda >= self.lo } else { lambda > self.lo };
        let below = if self.hi_closed { lambda <= self.hi } else { lambda < self.hi };
        lambda.is_finite() && above && below
    }
}

impl fmt::Display for LambdaImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

fn meixner_floor(b: f64, d: f64) -> f64 {
    2.0 * d * (0.5 * b).cos().ln()
}

/// Image of the forward map.
pub fn lambda_image(base: &SymmetricBase) -> Result<LambdaImage> {
    base.validate()?;
    let open = |lo, hi| LambdaImage { lo, hi, lo_closed: false, hi_closed: false };
    Ok(match *base {
        SymmetricBase::Nig { a, d } => {
            let l = d * (2.0 * a - 1.0).sqrt();
            LambdaImage { lo: -l, hi: l, lo_closed: true, hi_closed: true }
        }
        SymmetricBase::Vg { .. } | SymmetricBase::BlackScholes { .. } => open(f64::NEG_INFINITY, f64::INFINITY),
        SymmetricBase::Cgmy { .. } => {
            // Decreasing; the ends are limits at the open interval's edges.
            let (lo, hi) = base.alpha_interval();
            let at = |alpha: f64| {
                let v = lambda_of_alpha_unchecked(base, alpha);
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            };
            let top = at(lo);
            let bottom = at(hi);
            open(if bottom.is_finite() { bottom } else { f64::NEG_INFINITY }, if top.is_finite() { top } else { f64::INFINITY })
        }
        SymmetricBase::Meixner { b, d } => match base.meixner_case() {
            Some(MeixnerCase::M1) => open(0.0, f64::INFINITY),
            _ => LambdaImage { lo: meixner_floor(b, d), hi: f64::INFINITY, lo_closed: true, hi_closed: false },
        },
        SymmetricBase::MeixnerEven { .. } => {
            let l = lambda_of_alpha_unchecked(base, 0.0);
            LambdaImage { lo: l, hi: l, lo_closed: true, hi_closed: true }
        }
    })
}

fn outside_image(base: &SymmetricBase, lambda: f64, image: &LambdaImage) -> Error {
    Error::validation(format!("{base}: λ = {lambda} outside the image {image} of the order map"))
}

/// `arccos(cos(b/2) e^{−λ/2d})` with `1 − y` formed without cancellation.
fn meixner_arccos(b: f64, d: f64, lambda: f64) -> f64 {
    let one_minus_y = -((meixner_floor(b, d) - lambda) / (2.0 * d)).exp_m1();
    2.0 * (0.5 * one_minus_y).max(0.0).sqrt().min(1.0).asin()
}

/// Closed-form inversion `α(λ)`.
///
/// For Meixner with `b < 0` and `λ` strictly between `2d log cos(b/2)` and 0
/// two orders are returned, tagged principal (`α ≤ 2`) and upper (`α > 2`).
/// CGMY has no closed form; use [`alpha_of_lambda_root`].
pub fn alpha_of_lambda_closed(base: &SymmetricBase, lambda: f64) -> Result<InversionResult> {
    let image = lambda_image(base)?;
    let target = lambda;
    let lambda = image.snap(lambda);
    if !image.contains(lambda) {
        return Err(outside_image(base, lambda, &image));
    }
    let found: Vec<(f64, Branch)> = match *base {
        SymmetricBase::Nig { a, d } => {
            let r = (4.0 * a * a * d * d - d * d - lambda * lambda).max(0.0).sqrt();
            vec![(1.0 - lambda * r / (d * (lambda * lambda + d * d).sqrt()), Branch::Principal)]
        }
        SymmetricBase::Vg { c, beta } => {
            // Rationalised form of (−2 + 2√(E + β²(E−1)²))/(E−1), E = e^{−λ/C};
            // equals 1 at λ = 0.
            let u = (-lambda / c).exp_m1();
            let alpha = 2.0 * (1.0 + beta * beta * u) / ((1.0 + u + beta * beta * u * u).sqrt() + 1.0);
            vec![(alpha, Branch::Principal)]
        }
        SymmetricBase::Cgmy { .. } => {
            return Err(Error::Unsupported("CGMY has no closed-form inverse; use root finding".into()))
        }
        SymmetricBase::Meixner { b, d } => {
            let ac = meixner_arccos(b, d, lambda);
            let principal = 2.0 * b / (b - 2.0 * ac);
            let mut v = vec![(principal, Branch::Principal)];
            if base.meixner_case() == Some(MeixnerCase::M2) && lambda < 0.0 && ac > 0.0 {
                v.push((2.0 * b / (b + 2.0 * ac), Branch::Upper));
            }
            v
        }
        SymmetricBase::MeixnerEven { .. } => vec![(0.0, Branch::Principal)],
        SymmetricBase::BlackScholes { sigma } => vec![(1.0 - 2.0 * lambda / (sigma * sigma), Branch::Principal)],
    };
    for &(alpha, _) in &found {
        if forward_domain(base, alpha).is_err() {
            return Err(outside_image(base, lambda, &image));
        }
    }
    InversionResult::build(base, target, &found)
}

/// Search interval of the forward map, finite ends only.
fn search_interval(base: &SymmetricBase) -> (f64, f64) {
    let (lo, hi) = base.alpha_interval();
    match base {
        SymmetricBase::Nig { .. } => (lo, hi),
        _ => (lo + ALPHA_MARGIN, hi - ALPHA_MARGIN),
    }
}

/// Solves `λ(α) = lambda` on `[lo, hi]`, expanding an infinite end until the
/// sign changes.
fn bracketed_root(base: &SymmetricBase, lambda: f64, lo: f64, hi: f64) -> Result<f64> {
    let g = |alpha: f64| lambda_of_alpha_unchecked(base, alpha) - lambda;
    let (mut lo, mut hi) = (lo, hi);
    if lo == f64::NEG_INFINITY {
        let mut step = 1.0f64;
        lo = hi.min(0.0) - step;
        while g(lo).signum() == g(hi).signum() && step < 1e300 {
            step *= 2.0;
            lo = hi.min(0.0) - step;
        }
    }
    if hi == f64::INFINITY {
        let mut step = 1.0f64;
        hi = lo.max(0.0) + step;
        while g(lo).signum() == g(hi).signum() && step < 1e300 {
            step *= 2.0;
            hi = lo.max(0.0) + step;
        }
    }
    find_root(g, lo, hi, 1e-15 * lo.abs().max(hi.abs()).max(1.0))
}

/// Inversion by monotone bracketing of the forward map on the admissible
/// interval; Meixner with `b < 0` is searched separately on `(edge, 2]` and
/// `(2, ∞)`.
pub fn alpha_of_lambda_root(base: &SymmetricBase, lambda: f64) -> Result<InversionResult> {
    let image = lambda_image(base)?;
    let target = lambda;
    let lambda = image.snap(lambda);
    if !image.contains(lambda) {
        return Err(outside_image(base, lambda, &image));
    }
    let found = match *base {
        SymmetricBase::MeixnerEven { .. } => vec![(0.0, Branch::Principal)],
        SymmetricBase::Meixner { b, d } if base.meixner_case() == Some(MeixnerCase::M2) => {
            let (lo, _) = search_interval(base);
            if lambda == meixner_floor(b, d) {
                vec![(2.0, Branch::Principal)]
            } else {
                let mut v = vec![(bracketed_root(base, lambda, lo, 2.0)?, Branch::Principal)];
                if lambda < 0.0 {
                    v.push((bracketed_root(base, lambda, 2.0, f64::INFINITY)?, Branch::Upper));
                }
                v
            }
        }
        _ => {
            let (lo, hi) = search_interval(base);
            vec![(bracketed_root(base, lambda, lo, hi)?, Branch::Principal)]
        }
    };
    InversionResult::build(base, target, &found)
}

/// Closed form where one exists, root finding otherwise.
pub fn alpha_of_lambda(base: &SymmetricBase, lambda: f64) -> Result<InversionResult> {
    match base {
        SymmetricBase::Cgmy { .. } => alpha_of_lambda_root(base, lambda),
        _ => alpha_of_lambda_closed(base, lambda),
    }
}
