//! `L(s, χ^(c_K c))` for odd square-free primary `c`, evaluated from the
//! theta series `θ(u) = Σ r(n)·e^{−nu/Q}` of its Dirichlet coefficients.
//!
//! With `Λ(s) = Q^s Γ(s) L(s) = ∫_0^∞ θ(u) u^{s−1} du` and the self-dual
//! functional equation `Λ(s) = Λ(1−s)`, equivalently `θ(1/u) = u·θ(u)`,
//! one gets `Λ(s) = ∫_1^∞ θ(u)(u^{s−1} + u^{−s}) du`, which converges
//! exponentially for every `s`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldId, QuadInt};
use crate::ideal::{is_squarefree, prime_ideals_above};
use crate::primary::is_primary;
use crate::rational::primes_below;
use crate::special::{digamma, gamma_fn, GaussLegendre};

type C = Complex64;

/// Dirichlet coefficients `r(n) = Σ_{N𝔞 = n} χ^(c_K c)(𝔞)` for `n ≤ len`.
#[derive(Clone, Debug)]
pub struct CoeffTable {
    pub c: QuadInt,
    pub conductor_norm: i64,
    pub r: Vec<i32>,
}

pub(crate) fn primes_upto(n: usize) -> std::borrow::Cow<'static, [u64]> {
    const CACHED: usize = 1 << 22;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    if n < CACHED {
        let all = PRIMES.get_or_init(|| primes_below(CACHED));
        let end = all.partition_point(|&p| p as usize <= n);
        std::borrow::Cow::Borrowed(&all[..end])
    } else {
        std::borrow::Cow::Owned(primes_below(n + 1))
    }
}

pub(crate) fn check_family_member(c: &QuadInt, what: &'static str) -> Result<()> {
    if c.is_zero() {
        return Err(Error::ZeroElement(what));
    }
    if !c.is_odd() {
        return Err(Error::EvenElement(what));
    }
    if !is_primary(c)? {
        return Err(Error::NotPrimary(what));
    }
    if !is_squarefree(c)? {
        return Err(Error::NotSquarefree(what));
    }
    Ok(())
}

impl CoeffTable {
    /// Coefficients up to `len`, from the local factors
    /// `(1 − χ(𝔭)N𝔭^{−s})^{−1}` over prime ideals.
    pub fn build(c: &QuadInt, len: usize) -> Result<Self> {
        check_family_member(c, "coeff_table")?;
        let field = c.field;
        let m = field.c_k().checked_mul(c)?;
        let mut r = vec![1i32; len + 1];
        r[0] = 0;
        for &p in primes_upto(len).iter() {
            let ideals = prime_ideals_above(field, p);
            // every prime above 2 divides c_K
            let chi: Vec<i32> = if p == 2 { vec![0; ideals.len()] } else { ideals.iter().map(|i| i.legendre(&m) as i32).collect() };
            let p = p as usize;
            let mut pk = p;
            let mut k = 1u32;
            loop {
                let local = local_coefficient(&ideals, &chi, k);
                if local != 1 {
                    let mut n = pk;
                    while n <= len {
                        if !(n / pk).is_multiple_of(p) {
                            r[n] *= local;
                        }
                        n += pk;
                    }
                }
                match pk.checked_mul(p) {
                    Some(next) if next <= len => {
                        pk = next;
                        k += 1;
                    }
                    _ => break,
                }
            }
        }
        Ok(CoeffTable { c: *c, conductor_norm: m.norm(), r })
    }

    pub fn len(&self) -> usize {
        self.r.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn field(&self) -> FieldId {
        self.c.field
    }

    /// `Q = √(|D_K|·N(c_K c))/(2π)`.
    pub fn q_param(&self) -> f64 {
        ((self.field().disc().abs() * self.conductor_norm) as f64).sqrt() / (2.0 * PI)
    }
}

// Σ of χ over the ideals of norm p^k built from the primes above p.
fn local_coefficient(ideals: &[crate::ideal::PrimeIdeal], chi: &[i32], k: u32) -> i32 {
    if ideals[0].degree == 2 {
        return if k.is_multiple_of(2) { chi[0].pow(k / 2) } else { 0 };
    }
    if ideals.len() == 1 {
        return chi[0].pow(k);
    }
    let (a, b) = (chi[0], chi[1]);
    (0..=k).map(|i| a.pow(i) * b.pow(k - i)).sum()
}

pub fn coeff_table(c: &QuadInt, len: usize) -> Result<CoeffTable> {
    CoeffTable::build(c, len)
}

/// Smallest `M` with `Σ_{n>M} n·xⁿ < eps`, `x = e^{−u/Q}`; bounds the tail of
/// `θ(u)` since `|r(n)| ≤ d(n) ≤ n`.
fn theta_cutoff(q: f64, u: f64, eps: f64) -> usize {
    let x = (-u / q).exp();
    let one_minus = -(-u / q).exp_m1();
    let tail = |m: f64| x.powf(m + 1.0) * ((m + 1.0) - m * x) / (one_minus * one_minus);
    let mut m = (q / u * (1.0f64 / eps).ln()).max(1.0);
    while tail(m) >= eps {
        m *= 1.1;
        m += 1.0;
    }
    m.ceil() as usize
}

fn theta_sum(r: &[i32], q: f64, u: f64, cutoff: usize) -> f64 {
    let x = (-u / q).exp();
    let mut pow = 1.0;
    let mut acc = 0.0;
    for &rn in &r[1..=cutoff.min(r.len() - 1)] {
        pow *= x;
        if rn != 0 {
            acc += rn as f64 * pow;
        }
    }
    acc
}

/// `θ(u)` with truncation error below `eps`.
pub fn theta_value(c: &QuadInt, u: f64, eps: f64) -> Result<f64> {
    if u <= 0.0 {
        return Err(Error::Domain(format!("theta needs u > 0, got {u}")));
    }
    let q = ((c.field.disc().abs() * c.field.c_k().checked_mul(c)?.norm()) as f64).sqrt() / (2.0 * PI);
    let m = theta_cutoff(q, u, eps);
    let table = CoeffTable::build(c, m)?;
    Ok(theta_sum(&table.r, q, u, m))
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LValue {
    pub s: C,
    pub value: C,
    pub abs_error_estimate: f64,
    pub terms_used: usize,
}

/// Split point of the functional-equation check: `Λ` is recomputed as
/// `∫_{t0}^∞ θ u^{s−1} + ∫_{1/t0}^∞ θ u^{−s}`, which equals the symmetric
/// form only if `θ(1/u) = u·θ(u)` actually holds.
const FE_SPLIT: f64 = 1.25;
const PANEL: f64 = 0.25;

/// `θ` tabulated at Gauss–Legendre nodes in `x = ln u`, reusable for every
/// `s` in a strip `|Re s − ½| ≤ half_width`.
#[derive(Clone, Debug)]
pub struct LFunction {
    pub table: CoeffTable,
    pub q: f64,
    pub eps: f64,
    half_width: f64,
    /// `(x, weight·θ(eˣ))`
    nodes: Vec<(f64, f64)>,
    rounding: f64,
}

impl LFunction {
    /// Prepares evaluation for `|Re s − ½| ≤ half_width` with absolute
    /// error target `eps` on `L(s)` for `s` with `|Im s| ≤ 30`.
    pub fn new(c: &QuadInt, half_width: f64, eps: f64) -> Result<Self> {
        Self::build(c, half_width, eps, |_| {})
    }

    fn build(c: &QuadInt, half_width: f64, eps: f64, edit: impl Fn(&mut [i32])) -> Result<Self> {
        check_family_member(c, "l_value")?;
        let field = c.field;
        let conductor_norm = field.c_k().checked_mul(c)?.norm();
        let q = ((field.disc().abs() * conductor_norm) as f64).sqrt() / (2.0 * PI);
        let sigma = 0.5 + half_width;
        // Λ → L multiplies by |Q^{−s}/Γ(s)|; budget θ against that and the
        // length of the integration range
        let lambda_eps = eps * q.powf(0.5 - half_width).min(1.0) * 0.1;
        let mut upper = q * (1.0 / lambda_eps).ln().max(1.0);
        for _ in 0..50 {
            let next = q * ((1.0 / lambda_eps).ln() + sigma.max(1.0) * upper.ln() + (q + 1.0).ln());
            if (next - upper).abs() < 1e-6 * upper {
                break;
            }
            upper = next;
        }
        let span = (upper.powf(sigma) + 1.0) * upper;
        let theta_eps = (lambda_eps / span).max(1e-300);
        let a = FE_SPLIT.ln();
        let x_max = upper.ln();
        let mut breaks = vec![-a, 0.0, a];
        let mut x = a;
        while x < x_max {
            x = (x + PANEL).min(x_max);
            breaks.push(x);
        }
        let rule = GaussLegendre::standard();
        let mut points = Vec::new();
        for w in breaks.windows(2) {
            let (mid, half) = ((w[0] + w[1]) / 2.0, (w[1] - w[0]) / 2.0);
            for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
                points.push((mid + half * t, wt * half));
            }
        }
        let longest = theta_cutoff(q, (-a).exp(), theta_eps);
        let mut table = CoeffTable::build(c, longest)?;
        edit(&mut table.r);
        let mut nodes = Vec::with_capacity(points.len());
        let mut rounding = 0.0;
        for (x, w) in points {
            let u = x.exp();
            let cutoff = theta_cutoff(q, u, theta_eps);
            let th = theta_sum(&table.r, q, u, cutoff);
            // |Σ r(n)xⁿ| rounding is at most ~ε·Σ n·xⁿ
            let xu = (-u / q).exp();
            rounding += w * f64::EPSILON * xu / ((1.0 - xu) * (1.0 - xu)) * u.powf(sigma);
            nodes.push((x, w * th * u));
        }
        Ok(LFunction { table, q, eps, half_width, nodes, rounding })
    }

    pub fn field(&self) -> FieldId {
        self.table.field()
    }

    fn check_strip(&self, s: C) -> Result<()> {
        if (s.re - 0.5).abs() > self.half_width + 1e-12 {
            return Err(Error::Domain(format!("s = {s} outside the prepared strip |Re s − 1/2| ≤ {}", self.half_width)));
        }
        Ok(())
    }

    // ∫_{lo}^∞ θ(u)u^{z−1}du over the tabulated nodes, with optional ln u weight
    fn partial(&self, lo: f64, z: C, log_weight: bool) -> C {
        let mut acc = C::new(0.0, 0.0);
        for &(x, wt) in &self.nodes {
            if x >= lo - 1e-15 {
                // the node weight already carries du = u·dx
                let v = ((z - 1.0) * x).exp() * wt;
                acc += if log_weight { v * x } else { v };
            }
        }
        acc
    }

    /// `Λ(s) = Q^s Γ(s) L(s)`.
    pub fn lambda(&self, s: C) -> Result<C> {
        self.check_strip(s)?;
        Ok(self.partial(0.0, s, false) + self.partial(0.0, C::new(1.0, 0.0) - s, false))
    }

    /// `Λ'(s)`.
    pub fn lambda_deriv(&self, s: C) -> Result<C> {
        self.check_strip(s)?;
        Ok(self.partial(0.0, s, true) - self.partial(0.0, C::new(1.0, 0.0) - s, true))
    }

    fn gamma_factor_inv(&self, s: C) -> Result<C> {
        Ok((-s * self.q.ln()).exp() / gamma_fn(s)?)
    }

    pub fn value(&self, s: C) -> Result<LValue> {
        let g = self.gamma_factor_inv(s)?;
        let lam = self.lambda(s)?;
        Ok(LValue {
            s,
            value: lam * g,
            abs_error_estimate: self.eps + self.rounding * g.norm(),
            terms_used: self.table.len(),
        })
    }

    /// `L'(s)` by a Richardson-extrapolated central difference (`h = 10⁻³`
    /// and `h/2`); returns the derivative and the two-level discrepancy.
    pub fn derivative(&self, s: C) -> Result<(C, f64)> {
        let f = |z: C| -> Result<C> { Ok(self.value(z)?.value) };
        richardson_derivative(&f, s, 1e-3)
    }

    /// `L'(s)` from differentiating the theta integral.
    pub fn derivative_analytic(&self, s: C) -> Result<C> {
        let g = self.gamma_factor_inv(s)?;
        let lam = self.lambda(s)?;
        let dlam = self.lambda_deriv(s)?;
        Ok(g * (dlam - (C::new(self.q.ln(), 0.0) + digamma(s)?) * lam))
    }

    /// `L'(s)/L(s)`; refuses numerically zero denominators.
    pub fn log_derivative(&self, s: C) -> Result<C> {
        let v = self.value(s)?;
        if v.value.norm() < 10.0 * v.abs_error_estimate {
            return Err(Error::Budget(format!("L({s}) for c = {} is numerically zero ({})", self.table.c, v.value)));
        }
        Ok(self.derivative(s)?.0 / v.value)
    }

    /// Relative mismatch `|Λ(s) − Λ(1−s)| / (|Λ(s)| + |Λ(1−s)|)` with `Λ`
    /// evaluated from the asymmetric split at `t0 = 1.25`.
    pub fn fe_residual(&self, s: C) -> Result<f64> {
        self.check_strip(s)?;
        let a = FE_SPLIT.ln();
        let one = C::new(1.0, 0.0);
        let split = |z: C| self.partial(a, z, false) + self.partial(-a, one - z, false);
        let (l, r) = (split(s), split(one - s));
        Ok((l - r).norm() / (l.norm() + r.norm() + 1e-300))
    }
}

/// `(f(s+h) − f(s−h))/2h` at `h` and `h/2`, combined by one Richardson step.
pub fn richardson_derivative<F: Fn(C) -> Result<C>>(f: &F, s: C, h: f64) -> Result<(C, f64)> {
    let d = |h: f64| -> Result<C> { Ok((f(s + h)? - f(s - h)?) / (2.0 * h)) };
    let (d1, d2) = (d(h)?, d(h / 2.0)?);
    let r = (d2 * 4.0 - d1) / 3.0;
    Ok((r, (r - d2).norm()))
}

/// `L(s, χ^(c_K c))` with absolute error target `eps`.
pub fn l_value(s: C, c: &QuadInt, eps: f64) -> Result<LValue> {
    let half = (s.re - 0.5).abs().max(0.5);
    LFunction::new(c, half, eps)?.value(s)
}

pub fn l_derivative(s: C, c: &QuadInt) -> Result<C> {
    let half = (s.re - 0.5).abs() + 0.01;
    Ok(LFunction::new(c, half, 1e-12)?.derivative(s)?.0)
}

pub fn fe_residual(s: C, c: &QuadInt) -> Result<f64> {
    let half = (s.re - 0.5).abs().max(0.5);
    LFunction::new(c, half, 1e-12)?.fe_residual(s)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ideal::tests::elements_up_to;
    use crate::symbol::symbol;

    fn f(d: i64) -> FieldId {
        FieldId::new(d).unwrap()
    }

    pub(crate) fn family(k: FieldId, bound: i64) -> Vec<QuadInt> {
        let mut v: Vec<QuadInt> = elements_up_to(k, bound)
            .into_iter()
            .filter(|c| c.is_odd() && is_primary(c).unwrap() && is_squarefree(c).unwrap())
            .collect();
        v.sort_by_key(|c| (c.norm(), c.a, c.b));
        v
    }

    // r(n) by enumerating elements of norm n, one per ideal.
    fn brute_coeffs(c: &QuadInt, n_max: i64) -> Vec<i32> {
        let k = c.field;
        let m = k.c_k() * *c;
        let mut r = vec![0i32; n_max as usize + 1];
        for x in elements_up_to(k, n_max) {
            if x.is_zero() {
                continue;
            }
            let v = if x.is_odd() { symbol(&m, &x).unwrap() as i32 } else { 0 };
            r[x.norm() as usize] += v;
        }
        r.iter().map(|v| v / k.unit_count() as i32).collect()
    }

    #[test]
    fn coefficients_match_ideal_enumeration() {
        for k in FieldId::all() {
            for c in family(k, 30).into_iter().take(4) {
                let table = CoeffTable::build(&c, 200).unwrap();
                let brute = brute_coeffs(&c, 200);
                assert_eq!(table.r[1], 1);
                for (n, (got, want)) in table.r.iter().zip(&brute).enumerate().skip(1).take(200) {
                    assert_eq!(got, want, "d={} c={c} n={n}", k.d());
                }
            }
        }
        let k = f(-1);
        let t = CoeffTable::build(&k.one(), 30).unwrap();
        assert_eq!(t.r[2], 0);
        assert_eq!(t.conductor_norm, 32);
    }

    #[test]
    fn coefficients_multiplicative() {
        let k = f(-7);
        let c = family(k, 100)[3];
        let t = CoeffTable::build(&c, 3000).unwrap();
        for m in 1..55usize {
            for n in 1..55usize {
                if crate::rational::gcd(m as i128, n as i128) == 1 {
                    assert_eq!(t.r[m * n], t.r[m] * t.r[n]);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_c() {
        let k = f(-1);
        assert!(CoeffTable::build(&k.elem(1, 2), 10).is_err());
        assert!(CoeffTable::build(&k.elem(2, 0), 10).is_err());
        let three = crate::primary::primary_normalize(&k.elem(3, 0)).unwrap().1;
        assert_eq!(CoeffTable::build(&(three * three), 10).unwrap_err(), Error::NotSquarefree("coeff_table"));
    }

    #[test]
    fn theta_bounds() {
        let k = f(-3);
        let c = k.one();
        let q = CoeffTable::build(&c, 1).unwrap().q_param();
        let big = q * 60.0;
        let th = theta_value(&c, big, 1e-12).unwrap();
        assert!((th - (-big / q).exp()).abs() < 1e-12);
        let a = theta_value(&c, 1.3, 1e-10).unwrap();
        let b = theta_value(&c, 1.3, 1e-14).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    pub(crate) fn direct_series_at_two(c: &QuadInt) -> f64 {
        let t = CoeffTable::build(c, 4_000_000).unwrap();
        let mut acc = 0.0;
        for (n, &r) in t.r.iter().enumerate().skip(1).rev() {
            if r != 0 {
                acc += r as f64 / (n as f64 * n as f64);
            }
        }
        acc
    }

    #[test]
    fn value_at_two_matches_series() {
        for k in [f(-1), f(-11), f(-163)] {
            for c in family(k, 60).into_iter().take(2) {
                let v = l_value(C::new(2.0, 0.0), &c, 1e-11).unwrap();
                let d = direct_series_at_two(&c);
                assert!((v.value.re - d).abs() / d.abs() < 1e-8, "d={} c={c}: {} vs {d}", k.d(), v.value);
                assert!(v.value.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conjugate_symmetry_and_fe() {
        let k = f(-2);
        for c in family(k, 80).into_iter().take(3) {
            let lf = LFunction::new(&c, 1.5, 1e-10).unwrap();
            let s = C::new(0.6, 0.7);
            let (a, b) = (lf.value(s).unwrap().value, lf.value(s.conj()).unwrap().value);
            assert!((a - b.conj()).norm() < 1e-12);
            assert_eq!(lf.fe_residual(C::new(0.5, 0.0)).unwrap(), 0.0);
            for s in [C::new(0.6, 0.7), C::new(2.0, 0.0), C::new(0.5, 3.0)] {
                assert!(lf.fe_residual(s).unwrap() < 1e-6, "c={c} s={s}");
            }
        }
    }

    #[test]
    fn fe_residual_detects_wrong_coefficients() {
        let c = family(f(-11), 60)[1];
        let p = (3..).find(|&p| CoeffTable::build(&c, 200).unwrap().r[p] != 0 && crate::rational::is_prime(p as u64)).unwrap();
        let bad = LFunction::build(&c, 0.5, 1e-10, |r| r[p] = -r[p]).unwrap();
        assert!(bad.fe_residual(C::new(0.6, 0.7)).unwrap() > 1e-4);
        let good = LFunction::new(&c, 0.5, 1e-10).unwrap();
        assert!(good.fe_residual(C::new(0.6, 0.7)).unwrap() < 1e-12);
    }

    #[test]
    fn stable_under_refinement() {
        let k = f(-7);
        let c = family(k, 50)[2];
        let s = C::new(0.75, 2.0);
        let a = LFunction::new(&c, 0.5, 1e-9).unwrap().value(s).unwrap().value;
        let b = LFunction::new(&c, 0.5, 1e-13).unwrap().value(s).unwrap().value;
        assert!((a - b).norm() < 2e-9, "{a} vs {b}");
    }

    #[test]
    fn derivative_matches_analytic() {
        let model = |z: C| -> Result<C> { Ok(z * z * z - z * 2.0) };
        let (d, _) = richardson_derivative(&model, C::new(0.3, 0.2), 1e-3).unwrap();
        let s = C::new(0.3, 0.2);
        assert!((d - (s * s * 3.0 - 2.0)).norm() < 1e-10);
        let cases = [(-1, 0usize, (0.5, 0.0)), (-3, 1, (0.75, 0.0)), (-7, 2, (0.6, 1.5)), (-43, 0, (0.5, 4.0)), (-11, 3, (0.25, -1.0))];
        for (d, i, (x, y)) in cases {
            let c = family(f(d), 40)[i];
            let lf = LFunction::new(&c, 0.6, 1e-12).unwrap();
            let s = C::new(x, y);
            let (num, _) = lf.derivative(s).unwrap();
            let an = lf.derivative_analytic(s).unwrap();
            assert!((num - an).norm() < 1e-7, "d={d} c={c} s={s}: {num} vs {an}");
            let (numc, _) = lf.derivative(s.conj()).unwrap();
            assert!((numc - num.conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn pole_and_strip_errors() {
        let c = f(-1).one();
        let lf = LFunction::new(&c, 0.5, 1e-9).unwrap();
        assert!(matches!(lf.value(C::new(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(lf.value(C::new(3.0, 0.0)), Err(Error::Domain(_))));
    }
}
