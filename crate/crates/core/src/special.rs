//! Complex Γ and ψ, Hurwitz ζ (with its `s`-derivative), Kronecker-symbol
//! L-functions over `Q`, Dedekind zeta, Gauss–Legendre quadrature and the
//! smooth weights with their Mellin transforms.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldId, TwoSplitting};
use crate::rational::kronecker;

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

// B_{2k} for k = 1..=12
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

const STIRLING_SHIFT: f64 = 15.0;

fn nonpositive_integer(s: C) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

// Stirling series for ln Γ(z), Re z ≥ 15.
fn ln_gamma_stirling(z: C) -> C {
    let mut acc = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut pow = zinv;
    for (k, b) in BERNOULLI.iter().enumerate().take(10) {
        let k = (k + 1) as f64;
        acc += pow * (b / (2.0 * k * (2.0 * k - 1.0)));
        pow *= zinv2;
    }
    acc
}

/// `ln Γ(s)`, continuous in `s` on `Re s > 0`.
pub fn ln_gamma(s: C) -> Result<C> {
    if nonpositive_integer(s) {
        return Err(Error::Pole(format!("Γ at {s}")));
    }
    if s.re < 0.5 {
        // ln Γ(s) = ln π − ln sin(πs) − ln Γ(1 − s), up to the branch of ln
        let g = ln_gamma(C::new(1.0, 0.0) - s)?;
        return Ok(c(PI.ln()) - (s * PI).sin().ln() - g);
    }
    let mut z = s;
    let mut shift = c(0.0);
    while z.re < STIRLING_SHIFT {
        shift += z.ln();
        z += 1.0;
    }
    Ok(ln_gamma_stirling(z) - shift)
}

/// Γ(s); relative error about 10⁻¹⁴ for moderate `|s|`.
pub fn gamma_fn(s: C) -> Result<C> {
    if nonpositive_integer(s) {
        return Err(Error::Pole(format!("Γ at {s}")));
    }
    if s.re < 0.5 {
        let g = gamma_fn(C::new(1.0, 0.0) - s)?;
        return Ok(c(PI) / ((s * PI).sin() * g));
    }
    let mut z = s;
    let mut prod = c(1.0);
    while z.re < STIRLING_SHIFT {
        prod *= z;
        z += 1.0;
    }
    Ok(ln_gamma_stirling(z).exp() / prod)
}

/// ψ(s) = Γ'(s)/Γ(s).
pub fn digamma(s: C) -> Result<C> {
    if nonpositive_integer(s) {
        return Err(Error::Pole(format!("ψ at {s}")));
    }
    if s.re < 0.5 {
        let one_minus = digamma(C::new(1.0, 0.0) - s)?;
        return Ok(one_minus - PI / (s * PI).tan());
    }
    let mut z = s;
    let mut shift = c(0.0);
    while z.re < STIRLING_SHIFT {
        shift += z.inv();
        z += 1.0;
    }
    let zinv2 = (z * z).inv();
    let mut pow = zinv2;
    let mut acc = z.ln() - 0.5 * z.inv();
    for (k, b) in BERNOULLI.iter().enumerate().take(10) {
        let k = (k + 1) as f64;
        acc -= pow * (b / (2.0 * k));
        pow *= zinv2;
    }
    Ok(acc - shift)
}

struct HurwitzParts {
    /// ζ(s,a) − 1/(s−1)
    regular: C,
    /// ∂ₛ[ζ(s,a) − 1/(s−1)]
    regular_deriv: C,
    bound: f64,
}

// (e^z − 1)/z and its derivative, accurate near z = 0.
fn phi(z: C) -> (C, C) {
    if z.norm() < 0.5 {
        // Σ zⁿ/(n+1)! and Σ n·zⁿ⁻¹/(n+1)!
        let (mut v, mut dv) = (c(0.0), c(0.0));
        let mut zn = c(1.0);
        let mut fact = 1.0;
        for n in 0..25 {
            fact *= (n + 1) as f64;
            v += zn / fact;
            if n + 1 < 25 {
                dv += zn * ((n + 1) as f64 / (fact * (n + 2) as f64));
            }
            zn *= z;
        }
        (v, dv)
    } else {
        let e = z.exp();
        let v = (e - 1.0) / z;
        (v, (e - v) / z)
    }
}

// Euler–Maclaurin for the Hurwitz zeta function with the pole removed.
fn hurwitz_parts(s: C, a: f64) -> HurwitzParts {
    const M: usize = 12;
    let n_terms = (20.0 + s.norm()).ceil() as usize;
    let mut reg = c(0.0);
    let mut reg_d = c(0.0);
    for k in 0..n_terms {
        let x = k as f64 + a;
        let t = (-s * x.ln()).exp();
        reg += t;
        reg_d -= t * x.ln();
    }
    let x = n_terms as f64 + a;
    let lx = x.ln();
    // (x^{1−s} − 1)/(s − 1) = −lx·φ((1−s)·lx)
    let (ph, dph) = phi((C::new(1.0, 0.0) - s) * lx);
    reg -= ph * lx;
    reg_d += dph * lx * lx;
    let xs = (-s * lx).exp();
    reg += xs * 0.5;
    reg_d -= xs * 0.5 * lx;
    // Σ B_{2j}/(2j)! · s(s+1)⋯(s+2j−2) · x^{−s−2j+1}
    let mut poch = s;
    let mut poch_d = c(1.0);
    let mut xp = xs / x;
    let mut fact = 2.0;
    let mut bound = 0.0;
    for j in 1..=M {
        let b = BERNOULLI[j - 1] / fact;
        reg += poch * xp * b;
        reg_d += (poch_d - poch * lx) * xp * b;
        if j == M {
            bound = (poch * xp * b).norm() * (s + (2 * M) as f64).norm() / (2.0 * PI * x);
        }
        for i in [2 * j - 1, 2 * j] {
            poch_d = poch_d * (s + i as f64) + poch;
            poch *= s + i as f64;
        }
        xp /= x * x;
        fact *= ((2 * j + 1) * (2 * j + 2)) as f64;
    }
    HurwitzParts { regular: reg, regular_deriv: reg_d, bound }
}

fn check_hurwitz_a(a: f64) -> Result<()> {
    if a > 0.0 && a <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Hurwitz parameter a = {a} must lie in (0, 1]")))
    }
}

/// ζ(s, a) for `a ∈ (0, 1]`, `s ≠ 1`.
pub fn hurwitz_zeta(s: C, a: f64) -> Result<C> {
    check_hurwitz_a(a)?;
    if s == c(1.0) {
        return Err(Error::Pole("Hurwitz zeta at s = 1".into()));
    }
    Ok(hurwitz_parts(s, a).regular + (s - 1.0).inv())
}

/// ζ(s, a) together with the magnitude of the first omitted
/// Euler–Maclaurin term.
pub fn hurwitz_zeta_with_bound(s: C, a: f64) -> Result<(C, f64)> {
    let v = hurwitz_zeta(s, a)?;
    Ok((v, hurwitz_parts(s, a).bound))
}

/// ∂ₛ ζ(s, a).
pub fn hurwitz_zeta_deriv(s: C, a: f64) -> Result<C> {
    check_hurwitz_a(a)?;
    if s == c(1.0) {
        return Err(Error::Pole("Hurwitz zeta at s = 1".into()));
    }
    let d = s - 1.0;
    Ok(hurwitz_parts(s, a).regular_deriv - (d * d).inv())
}

pub fn riemann_zeta(s: C) -> Result<C> {
    hurwitz_zeta(s, 1.0)
}

fn dirichlet_parts(s: C, disc: i64) -> (C, C) {
    let q = disc.unsigned_abs() as f64;
    let (mut v, mut dv) = (c(0.0), c(0.0));
    for a in 1..=disc.unsigned_abs() as i64 {
        let k = kronecker(disc, a);
        if k == 0 {
            continue;
        }
        let h = hurwitz_parts(s, a as f64 / q);
        v += h.regular * k as f64;
        dv += h.regular_deriv * k as f64;
    }
    // the pole parts cancel because Σ (D/a) = 0
    let scale = (-s * q.ln()).exp();
    (v * scale, (dv - v * q.ln()) * scale)
}

/// `L(s, (D/·))` for a nontrivial Kronecker character `D ≠ 1`; for `D = 1`
/// this is ζ(s).
pub fn dirichlet_l_rational(s: C, disc: i64) -> Result<C> {
    if disc == 1 {
        return riemann_zeta(s);
    }
    if disc == 0 {
        return Err(Error::Domain("discriminant 0".into()));
    }
    Ok(dirichlet_parts(s, disc).0)
}

/// `L'(s, (D/·))`, `D ≠ 1`.
pub fn dirichlet_l_rational_deriv(s: C, disc: i64) -> Result<C> {
    if disc == 1 || disc == 0 {
        return Err(Error::Domain("derivative needs a nontrivial character".into()));
    }
    Ok(dirichlet_parts(s, disc).1)
}

/// Euler factor `Π_{ϖ|2}(1 − N(ϖ)^{−s})`.
pub fn two_factor(s: C, field: FieldId) -> C {
    let two = c(2.0);
    match field.two_splitting() {
        TwoSplitting::Split => {
            let f = C::new(1.0, 0.0) - two.powc(-s);
            f * f
        }
        TwoSplitting::Inert => C::new(1.0, 0.0) - c(4.0).powc(-s),
        TwoSplitting::Ramified => C::new(1.0, 0.0) - two.powc(-s),
    }
}

/// ζ_K(s) = ζ(s)·L(s, (D_K/·)), optionally with the Euler factors above 2
/// removed.
pub fn dedekind_zeta(s: C, field: FieldId, remove_two: bool) -> Result<C> {
    if s == c(1.0) {
        return Err(Error::Pole("Dedekind zeta at s = 1".into()));
    }
    let v = riemann_zeta(s)? * dirichlet_l_rational(s, field.disc())?;
    Ok(if remove_two { v * two_factor(s, field) } else { v })
}

/// `ζ_K'(s)/ζ_K(s)`, analytically.
pub fn dedekind_zeta_logderiv(s: C, field: FieldId, remove_two: bool) -> Result<C> {
    if s == c(1.0) {
        return Err(Error::Pole("Dedekind zeta at s = 1".into()));
    }
    let z = riemann_zeta(s)?;
    let dz = hurwitz_zeta_deriv(s, 1.0)?;
    let (l, dl) = dirichlet_parts(s, field.disc());
    let mut v = dz / z + dl / l;
    if remove_two {
        let t = |norm: f64| {
            let x = c(norm).powc(-s);
            x * norm.ln() / (C::new(1.0, 0.0) - x)
        };
        v += match field.two_splitting() {
            TwoSplitting::Split => t(2.0) * 2.0,
            TwoSplitting::Inert => t(4.0),
            TwoSplitting::Ramified => t(2.0),
        };
    }
    Ok(v)
}

// (s − 1)·ζ(s) without cancellation.
fn zeta_times_pole(s: C) -> C {
    C::new(1.0, 0.0) + (s - 1.0) * hurwitz_parts(s, 1.0).regular
}

/// The residue of ζ_K at `s = 1`, as the Richardson-extrapolated limit of
/// `(s−1)ζ_K(s)` from `s = 1 + 10⁻⁶` and `s = 1 + 2·10⁻⁶`.
pub fn residue_rk(field: FieldId) -> f64 {
    let f = |h: f64| {
        let s = c(1.0 + h);
        (zeta_times_pole(s) * dirichlet_parts(s, field.disc()).0).re
    };
    2.0 * f(1e-6) - f(2e-6)
}

/// A Gauss–Legendre rule on `[−1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// The shared 20-point rule.
    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    pub fn integrate<F: Fn(f64) -> C>(&self, f: &F, a: f64, b: f64) -> C {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        let mut acc = c(0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }
}

/// Adaptive bisection with a fixed Gauss–Legendre rule until the halves
/// agree with the whole to `tol` (absolute).
pub fn integrate_adaptive<F: Fn(f64) -> C>(rule: &GaussLegendre, f: &F, a: f64, b: f64, tol: f64) -> C {
    fn go<F: Fn(f64) -> C>(rule: &GaussLegendre, f: &F, a: f64, b: f64, whole: C, tol: f64, depth: u32) -> C {
        let m = (a + b) / 2.0;
        let (l, r) = (rule.integrate(f, a, m), rule.integrate(f, m, b));
        if depth >= 40 || (l + r - whole).norm() <= tol {
            l + r
        } else {
            go(rule, f, a, m, l, tol / 2.0, depth + 1) + go(rule, f, m, b, r, tol / 2.0, depth + 1)
        }
    }
    let whole = rule.integrate(f, a, b);
    go(rule, f, a, b, whole, tol, 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `w(t) = t²e^{−t}`
    GammaWeight,
    /// `w(t) = exp(1 − 1/(1 − u²))`, `u = 2t − 3`, on `(1, 2)`
    Bump,
}

/// A non-negative smooth weight and the quadrature order used for its
/// Mellin transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub nodes: usize,
}

impl WeightSpec {
    pub fn bump() -> Self {
        WeightSpec { kind: WeightKind::Bump, nodes: 20 }
    }

    pub fn gamma() -> Self {
        WeightSpec { kind: WeightKind::GammaWeight, nodes: 20 }
    }

    pub fn weight(&self, t: f64) -> f64 {
        match self.kind {
            WeightKind::GammaWeight => {
                if t <= 0.0 {
                    0.0
                } else {
                    t * t * (-t).exp()
                }
            }
            WeightKind::Bump => {
                let u = 2.0 * t - 3.0;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            }
        }
    }

    /// Support as a closed interval (the gamma weight is truncated where it
    /// drops below 10⁻³⁰⁰ relative).
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            WeightKind::GammaWeight => (0.0, 720.0),
            WeightKind::Bump => (1.0, 2.0),
        }
    }

    /// `ŵ(s) = ∫ w(t) t^{s−1} dt`.
    pub fn mellin(&self, s: C) -> Result<C> {
        match self.kind {
            WeightKind::GammaWeight => {
                if s.re <= -2.0 {
                    return Err(Error::Domain(format!("Mellin transform of t²e^(-t) needs Re s > -2, got {s}")));
                }
                gamma_fn(s + 2.0)
            }
            WeightKind::Bump => {
                let rule = GaussLegendre::new(self.nodes);
                let f = |t: f64| (s - 1.0).scale(t.ln()).exp() * self.weight(t);
                Ok(integrate_adaptive(&rule, &f, 1.0, 2.0, 1e-13))
            }
        }
    }
}

pub fn mellin_weight(spec: &WeightSpec, s: C) -> Result<C> {
    spec.mellin(s)
}
