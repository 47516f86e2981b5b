//! Family averages over odd square-free primary `c` and their predicted
//! main terms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::{a_factor, euler_p1, euler_p2, prime_log_sum, zeta_k2_logderiv};
use crate::field::{FieldId, QuadInt};
use crate::hecke::LFunction;
use crate::ideal::is_squarefree;
use crate::primary::is_primary;
use crate::special::{dedekind_zeta, gamma_fn, residue_rk, WeightSpec};

type C = Complex64;

/// Which family statistic to compute.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    /// `Σ L(½+α)`
    FirstMoment { alpha: C },
    /// `Σ L(½+α)/L(½+β)`
    Ratios { alpha: C, beta: C },
    /// `Σ L′(½+r)/L(½+r)`
    Logderiv { r: C },
}

impl Mode {
    pub fn validate(&self) -> Result<()> {
        let alpha_ok = |a: C| a.re != 0.0 && a.re.abs() < 0.5;
        match *self {
            Mode::FirstMoment { alpha } if !alpha_ok(alpha) => {
                Err(Error::Domain(format!("first moment needs 0 < |Re α| < 1/2, got α = {alpha}")))
            }
            Mode::Ratios { alpha, .. } if !alpha_ok(alpha) => {
                Err(Error::Domain(format!("ratios need 0 < |Re α| < 1/2, got α = {alpha}")))
            }
            Mode::Ratios { beta, .. } if beta.re <= 0.0 => {
                Err(Error::Domain(format!("ratios need Re β > 0, got β = {beta}")))
            }
            Mode::Logderiv { r } if !(r.re > 0.0 && r.re < 0.5) => {
                Err(Error::Domain(format!("log-derivative needs 0 < Re r < 1/2, got r = {r}")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::FirstMoment { .. } => "first",
            Mode::Ratios { .. } => "ratios",
            Mode::Logderiv { .. } => "logderiv",
        }
    }

    // how far from the critical line the L-functions are sampled; the
    // log-derivative's difference quotient steps slightly beyond ½ + r
    fn half_width(&self) -> f64 {
        match *self {
            Mode::FirstMoment { alpha } => alpha.re.abs(),
            Mode::Ratios { alpha, beta } => alpha.re.abs().max(beta.re.abs()),
            Mode::Logderiv { r } => r.re.abs() + 0.01,
        }
    }
}

/// Numerical budgets: absolute target per L-value, relative target per Euler
/// product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub l_eps: f64,
    pub euler_eps: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { l_eps: 1e-10, euler_eps: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRequest {
    pub field: FieldId,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(flatten)]
    pub mode: Mode,
    pub weight: WeightSpec,
    pub eps: Budgets,
}

impl MomentRequest {
    pub fn new(field: FieldId, x: f64, mode: Mode) -> Self {
        MomentRequest { field, x, mode, weight: WeightSpec::bump(), eps: Budgets::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x > 0.0 && self.x.is_finite()) {
            return Err(Error::Domain(format!("X must be positive, got {}", self.x)));
        }
        if !(self.eps.l_eps > 0.0 && self.eps.euler_eps > 0.0) {
            return Err(Error::Domain("eps budgets must be positive".into()));
        }
        self.mode.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub request: MomentRequest,
    pub lhs: C,
    pub main1: C,
    pub main2: C,
    pub residual: C,
    /// `|residual| / |main1|`
    pub relative_residual: f64,
    /// `lhs / (main1 + main2)`: the empirical constant against the predicted
    /// one, reported rather than corrected for.
    pub lhs_over_main: C,
    pub predicted_exponent: f64,
    pub num_c: u64,
    pub skipped_c: u64,
}

/// Odd square-free primary `c` with `lo < N(c) ≤ hi`, sorted by
/// `(N(c), a, b)`; one element per ideal.
pub fn enumerate_c(field: FieldId, lo: f64, hi: f64) -> Vec<QuadInt> {
    if !(hi >= 1.0) || lo >= hi {
        return Vec::new();
    }
    field
        .elements_up_to(hi.floor() as i64)
        .into_iter()
        .filter(|x| {
            (x.norm() as f64) > lo && x.is_odd() && is_primary(x).unwrap_or(false) && is_squarefree(x).unwrap_or(false)
        })
        .collect()
}

/// The weighted family sum and its bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilySum {
    pub value: C,
    pub num_c: u64,
    pub skipped_c: u64,
}

fn family_term(c: &QuadInt, mode: &Mode, eps: f64) -> Result<C> {
    let l = LFunction::new(c, mode.half_width(), eps)?;
    let half = C::new(0.5, 0.0);
    match *mode {
        Mode::FirstMoment { alpha } => Ok(l.value(half + alpha)?.value),
        Mode::Ratios { alpha, beta } => {
            let den = l.value(half + beta)?;
            if den.value.norm() < 10.0 * den.abs_error_estimate {
                return Err(Error::Budget(format!("L(1/2+β) vanishes numerically for c = {c}")));
            }
            Ok(l.value(half + alpha)?.value / den.value)
        }
        Mode::Logderiv { r } => l.log_derivative(half + r),
    }
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Budget(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// `Σ* T(c) w(N(c)/X)` over the weight's support window. Terms are computed
/// in parallel (`workers = 0` uses the global pool) and added in the
/// canonical `c` order, so the result does not depend on the worker count.
pub fn family_sum(req: &MomentRequest, workers: usize) -> Result<FamilySum> {
    req.validate()?;
    let (lo, hi) = req.weight.support();
    let cs = enumerate_c(req.field, req.x * lo, req.x * hi);
    let terms: Vec<Option<C>> = with_workers(workers, || {
        cs.par_iter()
            .map(|c| {
                let w = req.weight.weight(c.norm() as f64 / req.x);
                if w == 0.0 {
                    return Some(C::new(0.0, 0.0));
                }
                family_term(c, &req.mode, req.eps.l_eps).ok().map(|t| t * w)
            })
            .collect()
    })?;
    let mut value = C::new(0.0, 0.0);
    let mut skipped = 0;
    for t in &terms {
        match t {
            Some(t) => value += t,
            None => skipped += 1,
        }
    }
    Ok(FamilySum { value, num_c: cs.len() as u64, skipped_c: skipped })
}

fn zeta2(s: C, field: FieldId) -> Result<C> {
    dedekind_zeta(s, field, true)
}

// 1/ζ_K^{(2)}(s), which vanishes at the pole
fn inv_zeta2(s: C, field: FieldId) -> Result<C> {
    if s == C::new(1.0, 0.0) {
        return Ok(C::new(0.0, 0.0));
    }
    Ok(zeta2(s, field)?.inv())
}

/// `r_K |U_K|² a(2) / ζ_K(2)`, taken as printed.
pub fn family_constant(field: FieldId) -> Result<f64> {
    let a2 = a_factor(&field.elem(2, 0))?;
    let a2 = *a2.numer() as f64 / *a2.denom() as f64;
    let units = field.unit_count() as f64;
    Ok(residue_rk(field) * units * units * a2 / dedekind_zeta(C::new(2.0, 0.0), field, false)?.re)
}

// X^{1−α} ŵ(1−α) (|D_K| N(c_K))^{−α} (2π)^{2α} Γ(½−α)/Γ(½+α)
fn dual_factor(field: FieldId, x: f64, alpha: C, weight: &WeightSpec) -> Result<C> {
    let one = C::new(1.0, 0.0);
    let half = C::new(0.5, 0.0);
    let level = (field.disc().abs() * field.c_k().norm()) as f64;
    let pow = |base: f64, e: C| (e * base.ln()).exp();
    Ok(pow(x, one - alpha)
        * weight.mellin(one - alpha)?
        * pow(level, -alpha)
        * pow(2.0 * PI, 2.0 * alpha)
        * gamma_fn(half - alpha)?
        / gamma_fn(half + alpha)?)
}

/// The two predicted main terms `(M1, M2)` for the request's mode.
pub fn main_terms(field: FieldId, x: f64, mode: &Mode, weight: &WeightSpec, euler_eps: f64) -> Result<(C, C)> {
    mode.validate()?;
    let one = C::new(1.0, 0.0);
    let half = C::new(0.5, 0.0);
    let k = family_constant(field)?;
    let lead = weight.mellin(one)? * x * k;
    match *mode {
        Mode::FirstMoment { alpha } => {
            let m1 = lead * zeta2(one + 2.0 * alpha, field)? * euler_p1(half + alpha, field, euler_eps)?;
            let m2 = dual_factor(field, x, alpha, weight)?
                * k
                * zeta2(one - 2.0 * alpha, field)?
                * euler_p1(half - alpha, field, euler_eps)?;
            Ok((m1, m2))
        }
        Mode::Ratios { alpha, beta } => {
            let m1 = lead * zeta2(one + 2.0 * alpha, field)? * inv_zeta2(one + alpha + beta, field)?
                * euler_p2(half + alpha, half + beta, field, euler_eps)?;
            let m2 = dual_factor(field, x, alpha, weight)?
                * k
                * zeta2(one - 2.0 * alpha, field)?
                * inv_zeta2(one - alpha + beta, field)?
                * euler_p2(half - alpha, half + beta, field, euler_eps)?;
            Ok((m1, m2))
        }
        Mode::Logderiv { r } => {
            let m1 = lead * (zeta_k2_logderiv(one + 2.0 * r, field)? + prime_log_sum(r, field, euler_eps)?);
            // printed without r_K/ζ_K(2): |U_K|² a(2)/ζ_K^{(2)}(2−2r)
            let a2 = a_factor(&field.elem(2, 0))?;
            let a2 = *a2.numer() as f64 / *a2.denom() as f64;
            let units = field.unit_count() as f64;
            let m2 = -dual_factor(field, x, r, weight)? * (units * units * a2) * inv_zeta2(2.0 * one - 2.0 * r, field)?;
            Ok((m1, m2))
        }
    }
}

/// The log-derivative main terms obtained the way they are derived: as
/// `∂/∂α` of the ratios main terms at `α = β = r`, by a Richardson
/// difference. A consistency check on the printed formulas in
/// [`main_terms`].
pub fn main_terms_logderiv_via_ratios(field: FieldId, x: f64, r: C, weight: &WeightSpec, euler_eps: f64) -> Result<(C, C)> {
    Mode::Logderiv { r }.validate()?;
    let part = |which: usize| {
        move |alpha: C| -> Result<C> {
            let (m1, m2) = main_terms(field, x, &Mode::Ratios { alpha, beta: r }, weight, euler_eps)?;
            Ok(if which == 1 { m1 } else { m2 })
        }
    };
    let h = 1e-3f64.min(r.re / 4.0).min((0.5 - r.re) / 4.0);
    let (d1, _) = crate::hecke::richardson_derivative(&part(1), r, h)?;
    let (d2, _) = crate::hecke::richardson_derivative(&part(2), r, h)?;
    Ok((d1, d2))
}

/// The exponent of the predicted error term.
pub fn error_exponent(mode: &Mode) -> f64 {
    match *mode {
        Mode::FirstMoment { alpha } => {
            let a = alpha.re;
            0.5f64.max(0.5 - a / 2.0).max(0.5 - a)
        }
        Mode::Ratios { alpha, beta } => {
            let (a, b) = (alpha.re, beta.re);
            [0.5, 1.0 - a - b, 1.0 - a / 2.0 - b / 2.0, 0.5 - a / 2.0, 0.5 - a].into_iter().fold(f64::MIN, f64::max)
        }
        Mode::Logderiv { r } => 1.0 - 2.0 * r.re,
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("degenerate fit: all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `log |residual|` against `log X`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Domain(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(x, r)| !(x > 0.0 && r > 0.0)) {
        return Err(Error::Domain("X and residuals must be positive".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, r)| (x.ln(), r.ln())).collect();
    Ok(linear_fit(&logs)?.0)
}

/// `Q_K(log X) = q0 + q1 log X`, the `α → 0` limit of `(M1 + M2)/X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralPoly {
    pub q0: f64,
    pub q1: f64,
    /// `(X, lim_{α→0} (M1 + M2)/X)`
    pub values: Vec<(f64, f64)>,
    /// Largest relative deviation of a value from the fitted line.
    pub fit_residual: f64,
    /// Largest relative disagreement between the extrapolations built from
    /// steps `(h, 2h)` and `(h/2, h)`.
    pub stability: f64,
}

pub const CENTRAL_STEP: f64 = 1e-3;

/// Fits `Q_K` over `x_grid`. The first-moment main terms have canceling
/// poles at `α = 0`; each value is the even part at `±h, ±2h` extrapolated
/// to zero.
pub fn central_value_poly(field: FieldId, weight: &WeightSpec, x_grid: &[f64], euler_eps: f64) -> Result<CentralPoly> {
    if x_grid.len() < 2 || x_grid.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain("central value fit needs at least two positive X".into()));
    }
    let mut values = Vec::new();
    let mut stability = 0.0f64;
    for &x in x_grid {
        let f = |a: f64| -> Result<f64> {
            let (m1, m2) = main_terms(field, x, &Mode::FirstMoment { alpha: C::new(a, 0.0) }, weight, euler_eps)?;
            Ok((m1 + m2).re / x)
        };
        let even = |h: f64| -> Result<f64> { Ok((f(h)? + f(-h)?) / 2.0) };
        let h = CENTRAL_STEP;
        let (e_half, e1, e2) = (even(h / 2.0)?, even(h)?, even(2.0 * h)?);
        let coarse = (4.0 * e1 - e2) / 3.0;
        let fine = (4.0 * e_half - e1) / 3.0;
        stability = stability.max((coarse - fine).abs() / fine.abs());
        values.push((x, coarse));
    }
    if stability > 1e-6 {
        return Err(Error::Budget(format!("α → 0 extrapolation unstable: {stability:e}")));
    }
    let logs: Vec<(f64, f64)> = values.iter().map(|&(x, v)| (x.ln(), v)).collect();
    let (q1, q0) = linear_fit(&logs)?;
    let fit_residual = logs.iter().map(|&(l, v)| (v - q0 - q1 * l).abs() / v.abs()).fold(0.0, f64::max);
    Ok(CentralPoly { q0, q1, values, fit_residual, stability })
}

/// One family average against its main terms.
pub fn run(req: &MomentRequest, workers: usize) -> Result<MomentReport> {
    req.validate()?;
    let sum = family_sum(req, workers)?;
    let (main1, main2) = main_terms(req.field, req.x, &req.mode, &req.weight, req.eps.euler_eps)?;
    let residual = sum.value - main1 - main2;
    Ok(MomentReport {
        request: *req,
        lhs: sum.value,
        main1,
        main2,
        residual,
        relative_residual: residual.norm() / main1.norm(),
        lhs_over_main: sum.value / (main1 + main2),
        predicted_exponent: error_exponent(&req.mode),
        num_c: sum.num_c,
        skipped_c: sum.skipped_c,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "X")]
    pub x: f64,
    pub lhs: C,
    pub main1: C,
    pub main2: C,
    pub residual: C,
    pub relative_residual: f64,
    /// Slope of `log |residual|` over this and the preceding rows (from the
    /// third row on).
    pub fitted_exponent_so_far: Option<f64>,
    pub num_c: u64,
    pub skipped_c: u64,
}

/// `run` along an `X` grid.
pub fn sweep(template: &MomentRequest, x_grid: &[f64], workers: usize) -> Result<Vec<SweepRow>> {
    let mut rows: Vec<SweepRow> = Vec::new();
    for &x in x_grid {
        let report = run(&MomentRequest { x, ..*template }, workers)?;
        let mut points: Vec<(f64, f64)> = rows.iter().map(|r| (r.x, r.residual.norm())).collect();
        points.push((x, report.residual.norm()));
        rows.push(SweepRow {
            x,
            lhs: report.lhs,
            main1: report.main1,
            main2: report.main2,
            residual: report.residual,
            relative_residual: report.relative_residual,
            fitted_exponent_so_far: fit_exponent(&points).ok(),
            num_c: report.num_c,
            skipped_c: report.skipped_c,
        });
    }
    Ok(rows)
}
