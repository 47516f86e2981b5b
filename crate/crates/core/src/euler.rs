//! Euler products over the odd prime ideals of `O_K`.
//!
//! Every product `Π F(N(ϖ))` is evaluated as `exp Σ log F` in two pieces:
//! the primes of norm `≤ B` are summed directly, and the tail `N > B` is
//! obtained by expanding `log F(N)` into monomials `c·N^{−λ}` and summing each
//! monomial over all remaining primes with the Möbius-inverted prime zeta
//! function
//!
//! ```text
//! Σ_{N(ϖ)>B} N(ϖ)^{−λ} = Σ_k μ(k)/k · log Z_B(kλ),
//! Z_B(σ) = ζ_K^{(2)}(σ) · Π_{N(ϖ)≤B} (1 − N(ϖ)^{−σ}).
//! ```
//!
//! Monomials beyond the expansion depth are bounded, not summed; that bound
//! is what the default prime bound is chosen from.

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldId, QuadInt};
use crate::hecke::primes_upto;
use crate::ideal::{prime_ideal_factorization, splitting_of, Splitting};
use crate::rational;
use crate::special::{dedekind_zeta, dedekind_zeta_logderiv};

type C = Complex64;

/// Exponent depth of the tail expansion beyond its leading monomial.
const DEPTH: f64 = 4.0;
const MIN_BOUND: u64 = 1000;
const MAX_MONOMIALS: usize = 20_000;
/// Term operations allowed when expanding and evaluating the tail.
const MAX_TAIL_WORK: usize = 2_000_000;
pub const DEFAULT_REL_EPS: f64 = 1e-10;

/// Odd prime ideals of norm at most `bound`, grouped by norm.
#[derive(Clone, Debug)]
pub struct PrimeNormStream {
    pub field: FieldId,
    pub bound: u64,
    /// `(N(ϖ), number of prime ideals of that norm)`, sorted by norm.
    pub entries: Vec<(u64, u32)>,
}

impl PrimeNormStream {
    pub fn new(field: FieldId, bound: u64) -> Self {
        let mut entries = Vec::new();
        for &p in primes_upto(bound as usize).iter().skip(1) {
            match splitting_of(field, p) {
                Splitting::Split => entries.push((p, 2)),
                Splitting::Ramified => entries.push((p, 1)),
                Splitting::Inert => {
                    if p.checked_mul(p).is_some_and(|q| q <= bound) {
                        entries.push((p * p, 1));
                    }
                }
            }
        }
        entries.sort_unstable();
        PrimeNormStream { field, bound, entries }
    }

    /// Number of prime ideals in the stream.
    pub fn prime_count(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m as u64).sum()
    }
}

/// `a(n) = Π_{ϖ | n} (1 + 1/N(ϖ))^{−1}`, exactly.
pub fn a_factor(n: &QuadInt) -> Result<Ratio<i128>> {
    if n.is_zero() {
        return Err(Error::ZeroElement("a_factor"));
    }
    let mut acc = Ratio::from_integer(1i128);
    for (ideal, _) in prime_ideal_factorization(n)? {
        let norm = ideal.norm() as i128;
        acc *= Ratio::new(norm, norm + 1);
    }
    Ok(acc)
}

/// A product or sum over odd primes with its error budget.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EulerValue {
    pub value: C,
    /// Contribution of the primes beyond `bound` (in log space for products).
    pub tail: C,
    /// Bound on what the truncated tail expansion leaves out.
    pub truncation_bound: f64,
    pub bound: u64,
}

/// `Σ c·N^{−λ}` stored as `(λ, c)`.
#[derive(Clone, Debug, Default)]
struct Monomials(Vec<(C, C)>);

impl Monomials {
    fn single(lambda: C, coef: C) -> Self {
        Monomials(vec![(lambda, coef)])
    }

    fn add(&mut self, lambda: C, coef: C, cut: f64) {
        if lambda.re > cut || coef == C::new(0.0, 0.0) {
            return;
        }
        let tol = 1e-12 * (1.0 + lambda.norm());
        match self.0.iter_mut().find(|(l, _)| (*l - lambda).norm() <= tol) {
            Some((_, c)) => *c += coef,
            None => self.0.push((lambda, coef)),
        }
    }

    fn mul(&self, other: &Monomials, cut: f64) -> Result<Monomials> {
        if self.0.len().saturating_mul(other.0.len()) > MAX_TAIL_WORK {
            return Err(Error::Budget("tail expansion too large for these parameters".into()));
        }
        let mut out = Monomials::default();
        for &(l1, c1) in &self.0 {
            for &(l2, c2) in &other.0 {
                out.add(l1 + l2, c1 * c2, cut);
            }
            if out.0.len() > MAX_MONOMIALS {
                return Err(Error::Budget("tail expansion too large for these parameters".into()));
            }
        }
        Ok(out)
    }

    fn min_re(&self) -> f64 {
        self.0.iter().map(|(l, _)| l.re).fold(f64::INFINITY, f64::min)
    }

    /// `log(1 + self)`, for series with positive leading exponent.
    fn log1p(&self, cut: f64) -> Result<Monomials> {
        let lead = self.min_re();
        if lead <= 0.0 {
            return Err(Error::Domain("log-expansion of a non-decaying factor".into()));
        }
        let mut out = Monomials::default();
        let mut power = self.clone();
        let mut m = 1.0;
        let mut work = 0usize;
        while !power.0.is_empty() {
            work += power.0.len() * self.0.len();
            if work > MAX_TAIL_WORK {
                return Err(Error::Budget("tail expansion too large for these parameters".into()));
            }
            let sign = if m as u64 % 2 == 1 { 1.0 } else { -1.0 };
            for &(l, c) in &power.0 {
                out.add(l, c * (sign / m), cut);
            }
            power = power.mul(self, cut)?;
            m += 1.0;
        }
        Ok(out)
    }

    /// `Σ_{k ≥ 0} sign^k N^{−(shift + k·ratio)}`.
    fn geometric(shift: C, ratio_exp: C, sign: f64, cut: f64) -> Monomials {
        let mut out = Monomials::default();
        let mut k = 0.0;
        let mut coef = 1.0;
        while (shift + ratio_exp * k).re <= cut {
            out.add(shift + ratio_exp * k, C::new(coef, 0.0), cut);
            coef *= sign;
            k += 1.0;
        }
        out
    }
}

fn npow(n: f64, e: C) -> C {
    (e * n.ln()).exp()
}

/// `e^z − 1` without cancellation for small `z`.
fn cexpm1(z: C) -> C {
    let half = (z.im / 2.0).sin();
    C::new(z.re.exp_m1() * z.im.cos() - 2.0 * half * half, z.re.exp() * z.im.sin())
}

/// `log(1 + g)` without cancellation for small `g`.
fn clog1p(g: C) -> C {
    let re = 0.5 * (2.0 * g.re + g.norm_sqr()).ln_1p();
    C::new(re, g.im.atan2(1.0 + g.re))
}

fn mobius(k: u64) -> i32 {
    let f = rational::factor(k);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

// Σ_{n>B} n^{−σ} ≥ Σ_{N(ϖ)>B} N(ϖ)^{−σ}/2, for real σ > 1.
fn power_tail(bound: f64, sigma: f64) -> f64 {
    2.0 * bound.powf(1.0 - sigma) / (sigma - 1.0)
}

impl PrimeNormStream {
    /// `Σ_{N(ϖ)>B} N(ϖ)^{−λ}` (or `Σ log N(ϖ)·N(ϖ)^{−λ}` when `weighted`),
    /// `Re λ > 1`.
    fn prime_zeta_tail(&self, lambda: C, weighted: bool) -> Result<C> {
        if lambda.re <= 1.0 {
            return Err(Error::Domain(format!("prime zeta tail needs Re λ > 1, got {lambda}")));
        }
        let b = self.bound as f64;
        let mut acc = C::new(0.0, 0.0);
        for k in 1u64.. {
            let sigma = lambda * k as f64;
            let size = power_tail(b, sigma.re) * if weighted { b.ln() + 1.0 } else { 1.0 };
            if k > 1 && size < 1e-20 {
                break;
            }
            let mu = mobius(k);
            if mu == 0 {
                continue;
            }
            if weighted {
                // −(log Z_B)'(σ) = Σ_{N>B} Σ_m log N · N^{−mσ}
                let mut d = dedekind_zeta_logderiv(sigma, self.field, true)?;
                for &(n, mult) in &self.entries {
                    let n = n as f64;
                    let x = npow(n, -sigma);
                    d += x * n.ln() / (C::new(1.0, 0.0) - x) * mult as f64;
                }
                acc -= d * mu as f64;
            } else {
                let mut s = C::new(0.0, 0.0);
                for &(n, mult) in &self.entries {
                    s += clog1p(-npow(n as f64, -sigma)) * mult as f64;
                }
                let z = dedekind_zeta(sigma, self.field, true)? * s.exp();
                acc += z.ln() * (mu as f64 / k as f64);
            }
        }
        Ok(acc)
    }
}

/// Shared driver: `Σ_ϖ [log N]·f(N)` with `f` given exactly and as a
/// monomial expansion.
struct Summand<'a> {
    exact: &'a dyn Fn(f64) -> C,
    expansion: &'a dyn Fn(f64) -> Result<Monomials>,
    lead: f64,
    weighted: bool,
}

fn default_bound(lead: f64, rel_eps: f64) -> u64 {
    let cut = lead + DEPTH;
    let b = (8.0 / ((cut - 1.0) * rel_eps)).powf(1.0 / (cut - 1.0));
    (b.ceil() as u64).max(MIN_BOUND)
}

fn evaluate(field: FieldId, s: &Summand, rel_eps: f64, bound: Option<u64>) -> Result<EulerValue> {
    if !(rel_eps > 0.0) {
        return Err(Error::Domain("rel_eps must be positive".into()));
    }
    let bound = bound.unwrap_or_else(|| default_bound(s.lead, rel_eps));
    let stream = PrimeNormStream::new(field, bound);
    let mut head = C::new(0.0, 0.0);
    for &(n, mult) in &stream.entries {
        let n = n as f64;
        let w = if s.weighted { n.ln() } else { 1.0 };
        head += (s.exact)(n) * (w * mult as f64);
    }
    let cut = s.lead + DEPTH;
    let monomials = (s.expansion)(cut)?;
    if monomials.0.len().saturating_mul(stream.entries.len() + 100) > MAX_TAIL_WORK {
        return Err(Error::Budget(format!(
            "tail needs {} monomials over {} prime norms; raise rel_eps or move the arguments away from the boundary",
            monomials.0.len(),
            stream.entries.len()
        )));
    }
    let mut tail = C::new(0.0, 0.0);
    for &(lambda, coef) in &monomials.0 {
        tail += coef * stream.prime_zeta_tail(lambda, s.weighted)?;
    }
    // the next layer of monomials estimates the omitted remainder
    let beyond: f64 = (s.expansion)(cut + 1.0)?
        .0
        .iter()
        .filter(|(l, _)| l.re > cut)
        .map(|(l, c)| c.norm() * power_tail(bound as f64, l.re))
        .sum();
    let b = bound as f64;
    let truncation_bound = 2.0 * beyond * if s.weighted { b.ln() + 1.0 } else { 1.0 } + power_tail(b, cut + 1.0);
    Ok(EulerValue { value: head + tail, tail, truncation_bound, bound })
}

fn exp_value(mut v: EulerValue) -> EulerValue {
    v.value = v.value.exp();
    v
}

/// `P(w, z) = Π_{(ϖ,2)=1} (1 + (1 − N^{z−w}) / ((N+1)(N^{z+w} − 1)))`, for
/// `Re w > 0` and `Re(w+z) > 0`.
pub fn euler_p2_detailed(w: C, z: C, field: FieldId, rel_eps: f64, bound: Option<u64>) -> Result<EulerValue> {
    if w.re <= 0.0 || (w + z).re <= 0.0 {
        return Err(Error::Domain(format!("P(w, z) diverges at w = {w}, z = {z}")));
    }
    let exact = move |n: f64| {
        let ln = n.ln();
        let num = -cexpm1((z - w) * ln);
        let den = cexpm1((z + w) * ln) * (n + 1.0);
        clog1p(num / den)
    };
    let expansion = move |cut: f64| -> Result<Monomials> {
        let one = C::new(1.0, 0.0);
        // (1 − N^{−(w−z)}) · N^{−1}/(1 + 1/N) · Σ_{m≥1} N^{−m(z+w)}
        let mut numer = Monomials::single(C::new(0.0, 0.0), one);
        numer.add(w - z, -one, f64::INFINITY);
        // the numerator may grow like N^{Re(z−w)}; expand the rest that much further
        let wide = cut + (z - w).re.max(0.0);
        let inv = Monomials::geometric(one, one, -1.0, wide);
        let geo = Monomials::geometric(z + w, z + w, 1.0, wide);
        numer.mul(&inv.mul(&geo, wide)?, cut)?.log1p(cut)
    };
    let lead = (1.0 + (z + w).re).min(1.0 + 2.0 * w.re);
    let s = Summand { exact: &exact, expansion: &expansion, lead, weighted: false };
    Ok(exp_value(evaluate(field, &s, rel_eps, bound)?))
}

pub fn euler_p2(w: C, z: C, field: FieldId, rel_eps: f64) -> Result<C> {
    Ok(euler_p2_detailed(w, z, field, rel_eps, None)?.value)
}

/// `P(w) = Π_{(ϖ,2)=1} (1 − 1/((N+1) N^{2w}))`, for `Re w > 0`.
pub fn euler_p1_detailed(w: C, field: FieldId, rel_eps: f64, bound: Option<u64>) -> Result<EulerValue> {
    if w.re <= 0.0 {
        return Err(Error::Domain(format!("P(w) diverges at w = {w}")));
    }
    let exact = move |n: f64| clog1p(-npow(n, -2.0 * w) / (n + 1.0));
    let expansion = move |cut: f64| -> Result<Monomials> {
        let one = C::new(1.0, 0.0);
        let g = Monomials::geometric(one + 2.0 * w, one, -1.0, cut);
        let neg = Monomials(g.0.into_iter().map(|(l, c)| (l, -c)).collect());
        neg.log1p(cut)
    };
    let s = Summand { exact: &exact, expansion: &expansion, lead: 1.0 + 2.0 * w.re, weighted: false };
    Ok(exp_value(evaluate(field, &s, rel_eps, bound)?))
}

pub fn euler_p1(w: C, field: FieldId, rel_eps: f64) -> Result<C> {
    Ok(euler_p1_detailed(w, field, rel_eps, None)?.value)
}

/// `Σ_{(ϖ,2)=1} log N / (N (N^{1+2r} − 1))`, for `Re r > −1/4`.
pub fn prime_log_sum_detailed(r: C, field: FieldId, rel_eps: f64, bound: Option<u64>) -> Result<EulerValue> {
    if r.re <= -0.25 {
        return Err(Error::Domain(format!("prime log sum needs Re r > −1/4, got {r}")));
    }
    let one = C::new(1.0, 0.0);
    let exact = move |n: f64| one / (cexpm1((one + 2.0 * r) * n.ln()) * n);
    let expansion = move |cut: f64| -> Result<Monomials> {
        Ok(Monomials::geometric(2.0 * one + 2.0 * r, one + 2.0 * r, 1.0, cut))
    };
    let s = Summand { exact: &exact, expansion: &expansion, lead: 2.0 + 2.0 * r.re, weighted: true };
    evaluate(field, &s, rel_eps, bound)
}

pub fn prime_log_sum(r: C, field: FieldId, rel_eps: f64) -> Result<C> {
    Ok(prime_log_sum_detailed(r, field, rel_eps, None)?.value)
}

/// `(ζ_K^{(2)})′/ζ_K^{(2)}(s)` by a Richardson-extrapolated central
/// difference of `log ζ_K^{(2)}`. The step is `10⁻⁴`, shrunk near the pole.
pub fn zeta_k2_logderiv(s: C, field: FieldId) -> Result<C> {
    let dist = (s - 1.0).norm();
    if dist < 1e-10 {
        return Err(Error::Pole(format!("ζ_K^(2) log-derivative too close to s = 1: {s}")));
    }
    let h = 1e-4f64.min(dist / 16.0);
    let z0 = dedekind_zeta(s, field, true)?;
    if z0.norm() < 1e-8 {
        return Err(Error::Budget(format!("ζ_K^(2) nearly vanishes at {s}")));
    }
    let d = |h: f64| -> Result<C> {
        let up = dedekind_zeta(s + h, field, true)?;
        let down = dedekind_zeta(s - h, field, true)?;
        Ok((up / down).ln() / (2.0 * h))
    };
    let (d1, d2) = (d(h)?, d(h / 2.0)?);
    Ok((d2 * 4.0 - d1) / 3.0)
}
