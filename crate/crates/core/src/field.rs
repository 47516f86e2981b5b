//! The nine imaginary quadratic fields of class number one and exact
//! arithmetic in their rings of integers.
//!
//! Elements are stored as `a + b·ω` with `ω = (1+√d)/2` when `d ≡ 1 (mod 4)`
//! and `ω = √d` otherwise. Multiplication uses `ω² = ω + (d−1)/4`, resp.
//! `ω² = d`. All products go through `i128` and are narrowed back with a
//! checked conversion, so overflow is reported instead of wrapping.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The values of `d` for which `Q(√d)` is imaginary with class number one.
pub const CLASS_NUMBER_ONE: [i64; 9] = [-1, -2, -3, -7, -11, -19, -43, -67, -163];

/// A validated choice of one of the nine fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct FieldId(i64);

impl TryFrom<i64> for FieldId {
    type Error = Error;
    fn try_from(d: i64) -> Result<Self> {
        FieldId::new(d)
    }
}

impl From<FieldId> for i64 {
    fn from(f: FieldId) -> i64 {
        f.0
    }
}

/// How `ω` is defined for the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaKind {
    /// `ω = (1 + √d)/2`
    HalfOnePlusRoot,
    /// `ω = √d`
    Root,
}

/// Decomposition of the rational prime 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoSplitting {
    Split,
    Inert,
    Ramified,
}

impl FieldId {
    pub fn new(d: i64) -> Result<Self> {
        if CLASS_NUMBER_ONE.contains(&d) {
            Ok(FieldId(d))
        } else {
            Err(Error::UnknownField(d))
        }
    }

    pub fn all() -> impl Iterator<Item = FieldId> {
        CLASS_NUMBER_ONE.iter().map(|&d| FieldId(d))
    }

    #[inline]
    pub fn d(self) -> i64 {
        self.0
    }

    #[inline]
    pub fn is_one_mod_four(self) -> bool {
        self.0.rem_euclid(4) == 1
    }

    pub fn omega_kind(self) -> OmegaKind {
        if self.is_one_mod_four() {
            OmegaKind::HalfOnePlusRoot
        } else {
            OmegaKind::Root
        }
    }

    /// Discriminant `D_K`.
    pub fn disc(self) -> i64 {
        if self.is_one_mod_four() {
            self.0
        } else {
            4 * self.0
        }
    }

    /// `ω² = x + y·ω`, returned as `(x, y)`.
    #[inline]
    pub fn omega_square(self) -> (i64, i64) {
        if self.is_one_mod_four() {
            ((self.0 - 1) / 4, 1)
        } else {
            (self.0, 0)
        }
    }

    /// Trace and norm of `ω`, i.e. the minimal polynomial is `x² − t·x + n`.
    pub fn omega_trace_norm(self) -> (i64, i64) {
        if self.is_one_mod_four() {
            (1, (1 - self.0) / 4)
        } else {
            (0, -self.0)
        }
    }

    pub fn two_splitting(self) -> TwoSplitting {
        match self.0.rem_euclid(8) {
            1 => TwoSplitting::Split,
            5 => TwoSplitting::Inert,
            _ => TwoSplitting::Ramified,
        }
    }

    /// The five fields whose ring of integers is norm-Euclidean.
    pub fn is_norm_euclidean(self) -> bool {
        matches!(self.0, -1 | -2 | -3 | -7 | -11)
    }

    pub fn unit_count(self) -> usize {
        match self.0 {
            -1 => 4,
            -3 => 6,
            _ => 2,
        }
    }

    /// Units in a fixed order; for `d = −1, −3` entry `k` is `ω^k`.
    pub fn units(self) -> Vec<QuadInt> {
        let e = |a, b| QuadInt::new(a, b, self);
        match self.0 {
            -1 => vec![e(1, 0), e(0, 1), e(-1, 0), e(0, -1)],
            -3 => vec![e(1, 0), e(0, 1), e(-1, 1), e(-1, 0), e(0, -1), e(1, -1)],
            _ => vec![e(1, 0), e(-1, 0)],
        }
    }

    /// The modulus `c_K` of the conductor `c_K·c`.
    pub fn c_k(self) -> QuadInt {
        match self.0 {
            -1 => QuadInt::new(-4, -4, self), // (1+i)^5
            -2 => QuadInt::new(0, 4, self),   // 4√−2
            _ => QuadInt::new(8, 0, self),
        }
    }

    pub fn params(self) -> FieldParams {
        let c_k = self.c_k();
        FieldParams {
            d: self.0,
            disc: self.disc(),
            omega: self.omega_kind(),
            units: self.units(),
            c_k,
            norm_c_k: c_k.norm(),
            two_splitting: self.two_splitting(),
            residue: self.residue_closed_form(),
        }
    }

    /// `2π / (|U_K| √|D_K|)`, the residue of `ζ_K` at `s = 1` for class number one.
    pub fn residue_closed_form(self) -> f64 {
        2.0 * std::f64::consts::PI / (self.unit_count() as f64 * (self.disc().abs() as f64).sqrt())
    }

    /// Nonzero elements of norm at most `bound`, sorted by `(N, a, b)`.
    pub fn elements_up_to(self, bound: i64) -> Vec<QuadInt> {
        let disc = self.disc().unsigned_abs() as f64;
        let (t, _) = self.omega_trace_norm();
        let hi = bound as f64;
        // N(a + bω) = (a + bt/2)² + |D|b²/4
        let b_max = (2.0 * (hi / disc).sqrt()).floor() as i64 + 1;
        let mut out = Vec::new();
        for b in -b_max..=b_max {
            let rest = hi - disc * (b * b) as f64 / 4.0;
            if rest < 0.0 {
                continue;
            }
            let centre = -(b * t) as f64 / 2.0;
            let r = rest.sqrt() + 1.0;
            for a in (centre - r).floor() as i64..=(centre + r).ceil() as i64 {
                let x = self.elem(a, b);
                let n = x.norm();
                if n != 0 && n <= bound {
                    out.push(x);
                }
            }
        }
        out.sort_by_key(|x| (x.norm(), x.a, x.b));
        out
    }

    #[inline]
    pub fn elem(self, a: i64, b: i64) -> QuadInt {
        QuadInt::new(a, b, self)
    }

    #[inline]
    pub fn one(self) -> QuadInt {
        QuadInt::new(1, 0, self)
    }

    #[inline]
    pub fn zero(self) -> QuadInt {
        QuadInt::new(0, 0, self)
    }

    #[inline]
    pub fn omega(self) -> QuadInt {
        QuadInt::new(0, 1, self)
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{})", self.0)
    }
}

/// The constant block of one field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldParams {
    pub d: i64,
    pub disc: i64,
    pub omega: OmegaKind,
    pub units: Vec<QuadInt>,
    pub c_k: QuadInt,
    pub norm_c_k: i64,
    pub two_splitting: TwoSplitting,
    /// Residue of the Dedekind zeta function at `s = 1`.
    pub residue: f64,
}

/// Look up the constants of a field.
pub fn field_params(id: FieldId) -> FieldParams {
    id.params()
}

/// An element `a + b·ω` of `O_K`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct QuadInt {
    pub a: i64,
    pub b: i64,
    pub field: FieldId,
}

fn narrow(x: i128, what: &'static str) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow(what))
}

impl QuadInt {
    #[inline]
    pub const fn new(a: i64, b: i64, field: FieldId) -> Self {
        QuadInt { a, b, field }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub(crate) fn same_field(&self, other: &QuadInt) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field.d(), other.field.d()))
        }
    }

    /// Norm as an `i128`; exact whenever `|a|, |b| < 2^60`.
    #[inline]
    pub fn norm_wide(&self) -> i128 {
        let (a, b) = (self.a as i128, self.b as i128);
        let d = self.field.d() as i128;
        if self.field.is_one_mod_four() {
            a * a + a * b + b * b * ((1 - d) / 4)
        } else {
            a * a - d * b * b
        }
    }

    pub fn try_norm(&self) -> Result<i64> {
        let (a, b) = (self.a as i128, self.b as i128);
        let d = self.field.d() as i128;
        let k = if self.field.is_one_mod_four() { (1 - d) / 4 } else { -d };
        let cross = if self.field.is_one_mod_four() { a * b } else { 0 };
        let n = (a * a)
            .checked_add(cross)
            .and_then(|x| b.checked_mul(b)?.checked_mul(k)?.checked_add(x))
            .ok_or(Error::Overflow("norm"))?;
        narrow(n, "norm")
    }

    /// Norm; panics if it does not fit in an `i64`.
    #[inline]
    pub fn norm(&self) -> i64 {
        self.try_norm().expect("norm overflow")
    }

    /// `Tr(a + bω)`.
    pub fn trace(&self) -> i128 {
        let (t, _) = self.field.omega_trace_norm();
        2 * self.a as i128 + t as i128 * self.b as i128
    }

    pub fn conj(&self) -> QuadInt {
        if self.field.is_one_mod_four() {
            QuadInt::new(self.a + self.b, -self.b, self.field)
        } else {
            QuadInt::new(self.a, -self.b, self.field)
        }
    }

    pub fn checked_add(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_field(other)?;
        Ok(QuadInt::new(
            self.a.checked_add(other.a).ok_or(Error::Overflow("add"))?,
            self.b.checked_add(other.b).ok_or(Error::Overflow("add"))?,
            self.field,
        ))
    }

    pub fn checked_sub(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_field(other)?;
        Ok(QuadInt::new(
            self.a.checked_sub(other.a).ok_or(Error::Overflow("sub"))?,
            self.b.checked_sub(other.b).ok_or(Error::Overflow("sub"))?,
            self.field,
        ))
    }

    pub fn checked_neg(&self) -> Result<QuadInt> {
        Ok(QuadInt::new(
            self.a.checked_neg().ok_or(Error::Overflow("neg"))?,
            self.b.checked_neg().ok_or(Error::Overflow("neg"))?,
            self.field,
        ))
    }

    /// Product with `i128` coordinates.
    #[inline]
    pub(crate) fn mul_wide(&self, other: &QuadInt) -> (i128, i128) {
        mul_coords(self.field, (self.a as i128, self.b as i128), (other.a as i128, other.b as i128))
    }

    pub fn checked_mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_field(other)?;
        let (x, y) = self.mul_wide(other);
        Ok(QuadInt::new(narrow(x, "mul")?, narrow(y, "mul")?, self.field))
    }

    pub fn scale(&self, k: i64) -> Result<QuadInt> {
        Ok(QuadInt::new(
            self.a.checked_mul(k).ok_or(Error::Overflow("scale"))?,
            self.b.checked_mul(k).ok_or(Error::Overflow("scale"))?,
            self.field,
        ))
    }

    pub fn pow(&self, mut e: u32) -> Result<QuadInt> {
        let mut base = *self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `m / n` if the quotient lies in `O_K`, `None` otherwise.
    pub fn exact_divide(&self, n: &QuadInt) -> Result<Option<QuadInt>> {
        self.same_field(n)?;
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let nn = n.norm_wide();
        let (x, y) = self.mul_wide(&n.conj());
        if x % nn != 0 || y % nn != 0 {
            return Ok(None);
        }
        Ok(Some(QuadInt::new(narrow(x / nn, "exact_divide")?, narrow(y / nn, "exact_divide")?, self.field)))
    }

    pub fn divides(&self, m: &QuadInt) -> Result<bool> {
        Ok(m.exact_divide(self)?.is_some())
    }

    /// The quotient `q` minimizing `N(m − q·n)` among the four roundings of `m/n`.
    pub fn nearest_quotient(&self, n: &QuadInt) -> Result<QuadInt> {
        self.same_field(n)?;
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let nn = n.norm_wide();
        let (x, y) = self.mul_wide(&n.conj());
        let (fx, fy) = (x.div_euclid(nn), y.div_euclid(nn));
        let mut best: Option<(i128, QuadInt)> = None;
        for (qx, qy) in [(fx, fy), (fx + 1, fy), (fx, fy + 1), (fx + 1, fy + 1)] {
            let q = QuadInt::new(narrow(qx, "nearest_quotient")?, narrow(qy, "nearest_quotient")?, self.field);
            let (px, py) = q.mul_wide(n);
            let (rx, ry) = (self.a as i128 - px, self.b as i128 - py);
            let rn = norm_coords(self.field, (rx, ry));
            if best.is_none_or(|(b, _)| rn < b) {
                best = Some((rn, q));
            }
        }
        Ok(best.expect("four candidates").1)
    }

    /// `m − nearest_quotient(m, n)·n`.
    pub fn nearest_remainder(&self, n: &QuadInt) -> Result<QuadInt> {
        let q = self.nearest_quotient(n)?;
        self.checked_sub(&q.checked_mul(n)?)
    }

    pub fn is_unit(&self) -> bool {
        self.norm_wide() == 1
    }

    /// Odd means coprime to 2, equivalently odd norm.
    pub fn is_odd(&self) -> bool {
        self.norm_wide() % 2 != 0
    }

    /// Canonical text form `a+b*w@d`.
    pub fn to_canonical(&self) -> String {
        self.to_string()
    }
}

#[inline]
pub(crate) fn mul_coords(field: FieldId, (a, b): (i128, i128), (c, e): (i128, i128)) -> (i128, i128) {
    let (wx, wy) = field.omega_square();
    let be = b * e;
    (a * c + be * wx as i128, a * e + b * c + be * wy as i128)
}

#[inline]
pub(crate) fn norm_coords(field: FieldId, (a, b): (i128, i128)) -> i128 {
    let d = field.d() as i128;
    if field.is_one_mod_four() {
        a * a + a * b + b * b * ((1 - d) / 4)
    } else {
        a * a - d * b * b
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b < 0 {
            write!(f, "{}-{}*w@{}", self.a, self.b.unsigned_abs(), self.field.d())
        } else {
            write!(f, "{}+{}*w@{}", self.a, self.b, self.field.d())
        }
    }
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QuadInt {
    type Err = Error;

    /// Accepts exactly `a+b*w@d` or `a-b*w@d`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `a+b*w@d`, got `{s}`"));
        let s = s.trim();
        let (body, d) = s.rsplit_once('@').ok_or_else(bad)?;
        let field = FieldId::new(d.parse().map_err(|_| bad())?)?;
        let body = body.strip_suffix("*w").ok_or_else(bad)?;
        // the sign joining a and b is the last '+' or '-' that is not leading
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .last()
            .map(|(i, _)| i)
            .ok_or_else(bad)?;
        let a: i64 = body[..split].parse().map_err(|_| bad())?;
        let b_digits = &body[split + 1..];
        if b_digits.is_empty() || !b_digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let b: i64 = b_digits.parse().map_err(|_| bad())?;
        let b = if &body[split..=split] == "-" { -b } else { b };
        Ok(QuadInt::new(a, b, field))
    }
}

impl From<QuadInt> for String {
    fn from(q: QuadInt) -> String {
        q.to_string()
    }
}

impl TryFrom<String> for QuadInt {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: QuadInt) -> QuadInt {
        self.checked_add(&rhs).expect("QuadInt addition")
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, rhs: QuadInt) -> QuadInt {
        self.checked_sub(&rhs).expect("QuadInt subtraction")
    }
}

impl Mul for QuadInt {
    type Output = QuadInt;
    fn mul(self, rhs: QuadInt) -> QuadInt {
        self.checked_mul(&rhs).expect("QuadInt multiplication")
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        self.checked_neg().expect("QuadInt negation")
    }
}

/// An element of `K` written as `numerator / denominator` with a positive
/// integer denominator, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadRat {
    num: QuadInt,
    den: i64,
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl QuadRat {
    pub fn new(num: QuadInt, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Self::reduce(num.field, num.a as i128, num.b as i128, den as i128)
    }

    fn reduce(field: FieldId, a: i128, b: i128, den: i128) -> Result<Self> {
        let sign = den.signum();
        let g = gcd_i128(gcd_i128(a, b), den).max(1);
        let (a, b, den) = (sign * a / g, sign * b / g, sign * den / g);
        Ok(QuadRat {
            num: QuadInt::new(narrow(a, "QuadRat")?, narrow(b, "QuadRat")?, field),
            den: narrow(den, "QuadRat")?,
        })
    }

    /// `m / n` as an exact element of `K`.
    pub fn from_quotient(m: &QuadInt, n: &QuadInt) -> Result<Self> {
        m.same_field(n)?;
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (x, y) = m.mul_wide(&n.conj());
        Self::reduce(m.field, x, y, n.norm_wide())
    }

    pub fn numerator(&self) -> QuadInt {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    /// `Tr(z/√D_K)` as a reduced fraction `(p, q)` with `q > 0`, using the
    /// branch `√D_K = i·√|D_K|`. For `z = (a + bω)/q` this is exactly `b/q`.
    pub fn trace_over_sqrt_disc(&self) -> (i64, i64) {
        let g = gcd_i128(self.num.b as i128, self.den as i128).max(1) as i64;
        (self.num.b / g, self.den / g)
    }
}
