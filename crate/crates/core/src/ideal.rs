//! Ideals of `O_K` as rank-2 lattices in Hermite normal form, prime
//! splitting, element factorization and residue systems.
//!
//! An ideal is stored by its HNF basis `{d1, c + d2·ω}` with `0 ≤ c < d1`,
//! so that `{x + y·ω : 0 ≤ x < d1, 0 ≤ y < d2}` is a complete residue system.
//! Gcds are lattice sums; no Euclidean division is involved, which keeps the
//! four non-Euclidean fields on the same code path.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::field::{mul_coords, norm_coords, FieldId, QuadInt};
use crate::primary;
use crate::rational::{self, ext_gcd, gcd, kronecker};

/// A nonzero ideal as the lattice `Z·d1 + Z·(c + d2·ω)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IdealMatrix {
    field: FieldId,
    d1: i64,
    c: i64,
    d2: i64,
}

impl IdealMatrix {
    /// HNF of the Z-span of `gens`, which must be a full-rank lattice closed
    /// under multiplication by `ω`.
    pub fn from_generators(field: FieldId, gens: &[(i128, i128)]) -> Result<Self> {
        let mut pivot: Option<(i128, i128)> = None;
        let mut d1: i128 = 0;
        for &(x, y) in gens {
            if y == 0 {
                d1 = gcd(d1, x);
                continue;
            }
            match pivot {
                None => pivot = Some((x, y)),
                Some((px, py)) => {
                    let (g, s, t) = ext_gcd(py, y);
                    let zero = (y / g) * px - (py / g) * x;
                    d1 = gcd(d1, zero);
                    let mut nx = s * px + t * x;
                    if d1 != 0 {
                        nx = nx.rem_euclid(d1);
                    }
                    pivot = Some((nx, g));
                }
            }
        }
        let (px, py) = pivot.ok_or_else(|| Error::NotAnIdeal("rank < 2".into()))?;
        if d1 == 0 {
            return Err(Error::NotAnIdeal("rank < 2".into()));
        }
        let (px, py) = if py < 0 { (-px, -py) } else { (px, py) };
        let narrow = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("HNF"));
        let ideal = IdealMatrix { field, d1: narrow(d1)?, c: narrow(px.rem_euclid(d1))?, d2: narrow(py)? };
        ideal.check_omega_closed()?;
        Ok(ideal)
    }

    fn check_omega_closed(&self) -> Result<()> {
        for (x, y) in [(self.d1 as i128, 0), (self.c as i128, self.d2 as i128)] {
            let (wx, wy) = mul_coords(self.field, (x, y), (0, 1));
            if !self.contains_coords(wx, wy) {
                return Err(Error::NotAnIdeal(format!("{self:?} not closed under ω")));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    /// `(d1, c, d2)`
    pub fn hnf(&self) -> (i64, i64, i64) {
        (self.d1, self.c, self.d2)
    }

    pub fn norm(&self) -> i64 {
        self.d1 * self.d2
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.norm() == 1
    }

    fn basis(&self) -> [(i128, i128); 2] {
        [(self.d1 as i128, 0), (self.c as i128, self.d2 as i128)]
    }

    #[inline]
    pub(crate) fn contains_coords(&self, x: i128, y: i128) -> bool {
        let d2 = self.d2 as i128;
        if y % d2 != 0 {
            return false;
        }
        (x - (y / d2) * self.c as i128) % self.d1 as i128 == 0
    }

    pub fn contains(&self, x: &QuadInt) -> bool {
        self.contains_coords(x.a as i128, x.b as i128)
    }

    /// Canonical representative of `x + yω` in the box `[0,d1) × [0,d2)`.
    #[inline]
    pub(crate) fn reduce_coords(&self, x: i128, y: i128) -> (i64, i64) {
        let d2 = self.d2 as i128;
        let yr = y.rem_euclid(d2);
        let k = (y - yr) / d2;
        let xr = (x - k * self.c as i128).rem_euclid(self.d1 as i128);
        (xr as i64, yr as i64)
    }

    pub fn reduce(&self, x: &QuadInt) -> QuadInt {
        let (a, b) = self.reduce_coords(x.a as i128, x.b as i128);
        QuadInt::new(a, b, self.field)
    }

    fn same_field(&self, other: &IdealMatrix) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field.d(), other.field.d()))
        }
    }

    /// Ideal sum, which is the gcd in a Dedekind domain.
    pub fn gcd(&self, other: &IdealMatrix) -> Result<IdealMatrix> {
        self.same_field(other)?;
        let gens = [self.basis(), other.basis()].concat();
        IdealMatrix::from_generators(self.field, &gens)
    }

    pub fn mul(&self, other: &IdealMatrix) -> Result<IdealMatrix> {
        self.same_field(other)?;
        let mut gens = Vec::with_capacity(4);
        for u in self.basis() {
            for v in other.basis() {
                gens.push(mul_coords(self.field, u, v));
            }
        }
        IdealMatrix::from_generators(self.field, &gens)
    }

    /// `self ⊆ other`, i.e. `other` divides `self`.
    pub fn is_contained_in(&self, other: &IdealMatrix) -> bool {
        self.basis().iter().all(|&(x, y)| other.contains_coords(x, y))
    }

    /// Iterates the canonical residue representatives.
    pub fn residues(&self) -> impl Iterator<Item = QuadInt> + '_ {
        let field = self.field;
        (0..self.d2).flat_map(move |y| (0..self.d1).map(move |x| QuadInt::new(x, y, field)))
    }
}

/// The principal ideal `(n)`.
pub fn ideal_of(n: &QuadInt) -> Result<IdealMatrix> {
    if n.is_zero() {
        return Err(Error::ZeroElement("ideal_of"));
    }
    let v = (n.a as i128, n.b as i128);
    let vw = mul_coords(n.field, v, (0, 1));
    IdealMatrix::from_generators(n.field, &[v, vw])
}

pub fn ideal_gcd(i: &IdealMatrix, j: &IdealMatrix) -> Result<IdealMatrix> {
    i.gcd(j)
}

/// A generator of the principal ideal `I`, normalized to the primary
/// associate when `I` is odd and to a fixed associate otherwise.
pub fn principal_generator(ideal: &IdealMatrix) -> Result<QuadInt> {
    let field = ideal.field;
    let target = ideal.norm() as i128;
    let (d1, c, d2) = (ideal.d1 as i128, ideal.c as i128, ideal.d2 as i128);
    // g = u·d1 + v·(c + d2ω). Im(ω) = √|D_K|/2, so N(g) ≥ (v·d2)²·|D_K|/4.
    let abs_disc = field.disc().unsigned_abs() as f64;
    let root_n = (target as f64).sqrt();
    let v_max = (2.0 * root_n / (d2 as f64 * abs_disc.sqrt())).floor() as i128 + 1;
    let re_omega = if field.is_one_mod_four() { 0.5 } else { 0.0 };
    for v in -v_max..=v_max {
        let y = v * d2;
        // |x + y·Re ω| ≤ √N with x = u·d1 + v·c
        let centre = -(y as f64) * re_omega - (v * c) as f64;
        let u_lo = ((centre - root_n) / d1 as f64).floor() as i128 - 1;
        let u_hi = ((centre + root_n) / d1 as f64).ceil() as i128 + 1;
        for u in u_lo..=u_hi {
            let x = u * d1 + v * c;
            if norm_coords(field, (x, y)) == target {
                let to = |t: i128| i64::try_from(t).map_err(|_| Error::Overflow("principal_generator"));
                let g = QuadInt::new(to(x)?, to(y)?, field);
                return canonical_associate(&g);
            }
        }
    }
    Err(Error::GeneratorNotFound(ideal.norm()))
}

/// Primary associate for odd elements; for even elements the associate with
/// the lexicographically largest `(a, b)`.
pub fn canonical_associate(g: &QuadInt) -> Result<QuadInt> {
    if g.is_zero() {
        return Err(Error::ZeroElement("canonical_associate"));
    }
    if g.is_odd() {
        return Ok(primary::primary_normalize(g)?.1);
    }
    let mut best = *g;
    for u in g.field.units() {
        let h = u.checked_mul(g)?;
        if (h.a, h.b) > (best.a, best.b) {
            best = h;
        }
    }
    Ok(best)
}

/// Splitting type of a rational prime in `O_K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

pub fn splitting_of(field: FieldId, p: u64) -> Splitting {
    match kronecker(field.disc(), p as i64) {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

/// Roots of the minimal polynomial of `ω` modulo `p` (p not inert).
fn omega_roots_mod(field: FieldId, p: u64) -> Vec<i64> {
    let (t, n) = field.omega_trace_norm();
    if p == 2 {
        return (0..2i64).filter(|x| (x * x - t * x + n).rem_euclid(2) == 0).collect();
    }
    let pi = p as i64;
    let root = rational::sqrt_mod(field.disc(), p).expect("discriminant is a square mod a non-inert prime") as i128;
    let inv2 = (pi as i128 + 1) / 2;
    let r1 = ((t as i128 + root) * inv2).rem_euclid(pi as i128) as i64;
    let r2 = ((t as i128 - root) * inv2).rem_euclid(pi as i128) as i64;
    if r1 == r2 {
        vec![r1]
    } else {
        let mut v = vec![r1, r2];
        v.sort_unstable();
        v
    }
}

/// A prime ideal described without a generator: enough to evaluate residue
/// symbols, which is all the coefficient tables need.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    pub degree: u8,
    pub ramified: bool,
    /// Image of `ω` in `O_K/P ≅ Z/p` for degree-one primes.
    pub root: Option<i64>,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        if self.degree == 1 {
            self.p
        } else {
            self.p * self.p
        }
    }

    /// Quadratic residue symbol `(a / P)` for `P` odd, through the residue
    /// field: `Z/p` for degree one, and for inert `p` the Legendre symbol of
    /// the norm (Frobenius is conjugation, so `a^((p²−1)/2) = N(a)^((p−1)/2)`).
    #[inline]
    pub fn legendre(&self, a: &QuadInt) -> i8 {
        debug_assert!(self.p != 2);
        let p = self.p as i128;
        let image = match self.root {
            Some(r) => (a.a as i128 + a.b as i128 * r as i128).rem_euclid(p),
            None => a.norm_wide().rem_euclid(p),
        };
        rational::jacobi(image as i64, self.p as i64)
    }

    /// Whether `P` divides `a`.
    pub fn divides(&self, a: &QuadInt) -> bool {
        let p = self.p as i128;
        match self.root {
            Some(r) => (a.a as i128 + a.b as i128 * r as i128).rem_euclid(p) == 0,
            None => a.a as i128 % p == 0 && a.b as i128 % p == 0,
        }
    }

    pub fn ideal(&self, field: FieldId) -> Result<IdealMatrix> {
        let p = self.p as i128;
        match self.root {
            Some(r) => {
                let g = (-(r as i128), 1);
                let gw = mul_coords(field, g, (0, 1));
                IdealMatrix::from_generators(field, &[(p, 0), (0, p), g, gw])
            }
            None => IdealMatrix::from_generators(field, &[(p, 0), (0, p)]),
        }
    }
}

/// The prime ideals above `p`, without generators.
pub fn prime_ideals_above(field: FieldId, p: u64) -> Vec<PrimeIdeal> {
    match splitting_of(field, p) {
        Splitting::Inert => vec![PrimeIdeal { p, degree: 2, ramified: false, root: None }],
        Splitting::Ramified => {
            let r = omega_roots_mod(field, p)[0];
            vec![PrimeIdeal { p, degree: 1, ramified: true, root: Some(r) }]
        }
        Splitting::Split => omega_roots_mod(field, p)
            .into_iter()
            .map(|r| PrimeIdeal { p, degree: 1, ramified: false, root: Some(r) })
            .collect(),
    }
}

/// The prime-ideal factorization of `(n)`, sorted by norm; no generators
/// are computed.
pub fn prime_ideal_factorization(n: &QuadInt) -> Result<Vec<(PrimeIdeal, u32)>> {
    if n.is_zero() {
        return Err(Error::ZeroElement("prime_ideal_factorization"));
    }
    let mut out = Vec::new();
    for (p, e) in rational::factor(n.try_norm()? as u64) {
        let ideals = prime_ideals_above(n.field, p);
        if ideals[0].ramified {
            out.push((ideals[0], e));
            continue;
        }
        // strip the rational part p^k, which every prime above p divides k times
        let mut m = *n;
        let mut k = 0u32;
        while m.a % p as i64 == 0 && m.b % p as i64 == 0 {
            m = QuadInt::new(m.a / p as i64, m.b / p as i64, n.field);
            k += 1;
        }
        let rest = e - 2 * k;
        for ideal in ideals {
            let v = if ideal.degree == 2 { k } else { k + if ideal.divides(&m) { rest } else { 0 } };
            if v > 0 {
                out.push((ideal, v));
            }
        }
    }
    Ok(out)
}

/// A prime element `ϖ`, primary when odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeElem {
    pub generator: QuadInt,
    pub residue_degree: u8,
    pub ramified: bool,
    pub norm: i64,
    pub ideal: PrimeIdeal,
}

impl PrimeElem {
    pub fn rational_prime(&self) -> u64 {
        self.ideal.p
    }

    pub fn is_odd(&self) -> bool {
        self.ideal.p != 2
    }
}

/// Prime elements above the rational prime `p`; for split `p` the two
/// entries are conjugate ideals.
pub fn split_prime(field: FieldId, p: u64) -> Result<Vec<PrimeElem>> {
    if p < 2 || !rational::is_prime(p) {
        return Err(Error::NotPrime(p as i64));
    }
    let mut out = Vec::new();
    for ideal in prime_ideals_above(field, p) {
        let generator = if ideal.degree == 2 {
            canonical_associate(&QuadInt::new(p as i64, 0, field))?
        } else {
            principal_generator(&ideal.ideal(field)?)?
        };
        out.push(PrimeElem {
            generator,
            residue_degree: ideal.degree,
            ramified: ideal.ramified,
            norm: ideal.norm() as i64,
            ideal,
        });
    }
    Ok(out)
}

/// `unit · Π generatorᵉ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElemFactorization {
    pub unit: QuadInt,
    pub factors: Vec<(PrimeElem, u32)>,
}

impl ElemFactorization {
    pub fn reconstruct(&self) -> Result<QuadInt> {
        let mut acc = self.unit;
        for (p, e) in &self.factors {
            acc = acc.checked_mul(&p.generator.pow(*e)?)?;
        }
        Ok(acc)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

fn factor_order(x: &(PrimeElem, u32), y: &(PrimeElem, u32)) -> Ordering {
    (x.0.norm, x.0.generator.to_string()).cmp(&(y.0.norm, y.0.generator.to_string()))
}

pub fn factor_element(n: &QuadInt) -> Result<ElemFactorization> {
    if n.is_zero() {
        return Err(Error::ZeroElement("factor_element"));
    }
    let mut rest = *n;
    let mut factors = Vec::new();
    let norm = n.try_norm()? as u64;
    for (p, _) in rational::factor(norm) {
        for prime in split_prime(n.field, p)? {
            let mut e = 0;
            while let Some(q) = rest.exact_divide(&prime.generator)? {
                rest = q;
                e += 1;
            }
            if e > 0 {
                factors.push((prime, e));
            }
        }
    }
    if !rest.is_unit() {
        return Err(Error::Budget(format!("factorization of {n} left non-unit cofactor {rest}")));
    }
    factors.sort_by(factor_order);
    Ok(ElemFactorization { unit: rest, factors })
}

pub fn is_squarefree(n: &QuadInt) -> Result<bool> {
    if n.is_zero() {
        return Err(Error::ZeroElement("is_squarefree"));
    }
    let norm = n.try_norm()? as u64;
    let rat = rational::factor(norm);
    if rat.iter().all(|&(_, e)| e == 1) {
        return Ok(true);
    }
    // only primes whose norm exponent is ≥ 2 can appear squared
    for (p, e) in rat {
        if e < 2 {
            continue;
        }
        for prime in prime_ideals_above(n.field, p) {
            let sq = prime.ideal(n.field)?;
            let sq = sq.mul(&sq)?;
            if sq.contains(n) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Residues modulo `q`, with the prime ideals of `q` kept for coprimality tests.
#[derive(Clone, Debug)]
pub struct ResidueSystem {
    pub modulus: QuadInt,
    pub ideal: IdealMatrix,
    primes: Vec<PrimeIdeal>,
}

impl ResidueSystem {
    pub fn len(&self) -> usize {
        self.ideal.norm() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = QuadInt> + '_ {
        self.ideal.residues()
    }

    pub fn is_invertible(&self, x: &QuadInt) -> bool {
        self.primes.iter().all(|p| !p.divides(x))
    }

    pub fn invertible(&self) -> impl Iterator<Item = QuadInt> + '_ {
        self.iter().filter(move |x| self.is_invertible(x))
    }
}

pub fn residue_system(q: &QuadInt) -> Result<ResidueSystem> {
    let ideal = ideal_of(q)?;
    let primes = rational::factor(q.try_norm()? as u64)
        .into_iter()
        .flat_map(|(p, _)| prime_ideals_above(q.field, p))
        .filter(|p| p.ideal(q.field).map(|i| ideal.is_contained_in(&i)).unwrap_or(false))
        .collect();
    Ok(ResidueSystem { modulus: *q, ideal, primes })
}

/// Prime ideals above every rational prime up to a bound, built once and
/// shared read-only.
#[derive(Clone, Debug)]
pub struct PrimeIdealTable {
    pub field: FieldId,
    pub bound: u64,
    /// `(p, ideals above p)` in increasing `p`.
    pub entries: Vec<(u64, Vec<PrimeIdeal>)>,
}

impl PrimeIdealTable {
    pub fn build(field: FieldId, bound: u64) -> Self {
        let entries = rational::primes_below(bound as usize + 1)
            .into_iter()
            .map(|p| (p, prime_ideals_above(field, p)))
            .collect();
        PrimeIdealTable { field, bound, entries }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn f(d: i64) -> FieldId {
        FieldId::new(d).unwrap()
    }

    /// Brute-force element enumeration of all elements with norm ≤ bound.
    pub(crate) fn elements_up_to(field: FieldId, bound: i64) -> Vec<QuadInt> {
        let disc = field.disc().unsigned_abs() as f64;
        let bmax = (2.0 * (bound as f64).sqrt() / disc.sqrt()).ceil() as i64 + 1;
        let amax = (bound as f64).sqrt().ceil() as i64 + bmax + 1;
        let mut out = Vec::new();
        for b in -bmax..=bmax {
            for a in -amax..=amax {
                let x = field.elem(a, b);
                let n = x.norm();
                if n > 0 && n <= bound {
                    out.push(x);
                }
            }
        }
        out
    }

    #[test]
    fn ideal_of_examples() {
        assert_eq!(ideal_of(&f(-1).elem(2, 0)).unwrap().hnf(), (2, 0, 2));
        for k in FieldId::all() {
            assert_eq!(ideal_of(&k.one()).unwrap().hnf(), (1, 0, 1));
        }
        let k = f(-19);
        let i = ideal_of(&k.omega()).unwrap();
        assert_eq!(i.norm(), 5);
        assert!(i.contains(&k.omega()));
        assert!(i.contains(&k.elem(-5, 1)));
        assert!(!i.contains(&k.one()));
        assert_eq!(ideal_of(&k.zero()), Err(Error::ZeroElement("ideal_of")));
    }

    #[test]
    fn gcd_examples() {
        for k in FieldId::all() {
            let g = ideal_of(&k.elem(4, 0)).unwrap().gcd(&ideal_of(&k.elem(6, 0)).unwrap()).unwrap();
            assert_eq!(g, ideal_of(&k.elem(2, 0)).unwrap());
        }
        let k = f(-19);
        let g = ideal_of(&k.elem(2, 0)).unwrap().gcd(&ideal_of(&k.omega()).unwrap()).unwrap();
        assert!(g.is_unit_ideal());
        let k = f(-1);
        let g = ideal_of(&k.elem(5, 0)).unwrap().gcd(&ideal_of(&k.elem(-1, -2)).unwrap()).unwrap();
        assert_eq!(g.norm(), 5);
        let gen = principal_generator(&g).unwrap();
        assert!(k.units().iter().any(|u| *u * k.elem(1, 2) == gen));
    }

    #[test]
    fn principal_generators_examples() {
        let k = f(-1);
        let g = principal_generator(&ideal_of(&k.elem(7, 0)).unwrap()).unwrap();
        assert!(k.units().iter().any(|u| *u * k.elem(7, 0) == g));
        let k = f(-43);
        let primes = split_prime(k, 11).unwrap();
        assert_eq!(primes.len(), 2);
        for p in &primes {
            assert_eq!(p.generator.norm(), 11);
            assert_eq!(ideal_of(&p.generator).unwrap(), p.ideal.ideal(k).unwrap());
        }
    }

    #[test]
    fn split_prime_examples() {
        let k = f(-1);
        let five = split_prime(k, 5).unwrap();
        assert_eq!(five.len(), 2);
        assert_eq!(five[0].generator.conj().norm(), 5);
        assert!(ideal_of(&five[0].generator.conj()).unwrap() == five[1].ideal.ideal(k).unwrap());
        let three = split_prime(k, 3).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].norm, 9);
        assert_eq!(three[0].residue_degree, 2);
        let k = f(-11);
        let three = split_prime(k, 3).unwrap();
        assert_eq!(three.len(), 2);
        let gens: Vec<_> = three.iter().map(|p| ideal_of(&p.generator).unwrap()).collect();
        assert!(gens.contains(&ideal_of(&k.omega()).unwrap()));
        assert!(gens.contains(&ideal_of(&k.omega().conj()).unwrap()));
        assert!(split_prime(k, 9).is_err());
    }

    #[test]
    fn factor_examples() {
        let k = f(-1);
        let fac = factor_element(&k.elem(-3, 4)).unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0].1, 2);
        assert_eq!(fac.reconstruct().unwrap(), k.elem(-3, 4));
        assert!(factor_element(&k.elem(0, 1)).unwrap().factors.is_empty());
        let k = f(-7);
        let fac = factor_element(&k.elem(2, 0)).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert!(fac.factors.iter().all(|(p, e)| p.norm == 2 && *e == 1));
        assert_eq!(fac.reconstruct().unwrap(), k.elem(2, 0));
    }

    #[test]
    fn squarefree_examples() {
        let k = f(-1);
        assert!(is_squarefree(&k.elem(3, 2)).unwrap());
        assert!(!is_squarefree(&k.elem(-3, 4)).unwrap());
        for k in FieldId::all() {
            assert!(!is_squarefree(&k.elem(9, 0)).unwrap());
        }
    }

    #[test]
    fn residue_system_examples() {
        let k = f(-1);
        let r = residue_system(&k.elem(1, 1)).unwrap();
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![k.zero(), k.one()]);
        for k in FieldId::all() {
            assert_eq!(residue_system(&k.elem(4, 0)).unwrap().iter().count(), 16);
        }
        let k = f(-2);
        let r = residue_system(&k.c_k()).unwrap();
        assert_eq!(r.len(), 32);
        // brute force: coprime iff the ideal gcd with c_K is trivial
        let ck = ideal_of(&k.c_k()).unwrap();
        let brute = r.iter().filter(|x| !x.is_zero() && ideal_of(x).unwrap().gcd(&ck).unwrap().is_unit_ideal()).count();
        assert_eq!(brute, 16);
        assert_eq!(r.invertible().count(), 16);
    }

    #[test]
    fn generator_roundtrip_and_factorization_all_fields() {
        for k in FieldId::all() {
            for x in elements_up_to(k, 2000) {
                let g = principal_generator(&ideal_of(&x).unwrap()).unwrap();
                assert!(k.units().iter().any(|u| *u * x == g), "{x} vs {g}");
                let fac = factor_element(&x).unwrap();
                assert_eq!(fac.reconstruct().unwrap(), x);
                assert!(fac.unit.is_unit());
            }
        }
    }

    #[test]
    fn ideal_norm_multiplicative() {
        for k in FieldId::all() {
            let xs = elements_up_to(k, 60);
            for x in xs.iter().step_by(3) {
                for y in xs.iter().step_by(5) {
                    let (i, j) = (ideal_of(x).unwrap(), ideal_of(y).unwrap());
                    let ij = i.mul(&j).unwrap();
                    assert_eq!(ij.norm(), i.norm() * j.norm());
                    assert_eq!(ij, ideal_of(&(*x * *y)).unwrap());
                }
            }
        }
    }

    #[test]
    fn split_prime_structure() {
        for k in FieldId::all() {
            for p in rational::primes_below(200) {
                let ps = split_prime(k, p).unwrap();
                match splitting_of(k, p) {
                    Splitting::Split => {
                        assert_eq!(ps.len(), 2);
                        assert_eq!(ps[0].norm, p as i64);
                        assert_eq!(ps[1].norm, p as i64);
                        assert_eq!(ideal_of(&ps[0].generator.conj()).unwrap(), ideal_of(&ps[1].generator).unwrap());
                        assert_ne!(ps[0].ideal, ps[1].ideal);
                    }
                    Splitting::Inert => {
                        assert_eq!(ps.len(), 1);
                        assert_eq!(ps[0].residue_degree, 2);
                    }
                    Splitting::Ramified => {
                        assert_eq!(ps.len(), 1);
                        let g = ps[0].generator;
                        assert_eq!(ideal_of(&(g * g)).unwrap(), ideal_of(&k.elem(p as i64, 0)).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn invertible_count_is_multiplicative() {
        let k = f(-7);
        let phi = |q: QuadInt| residue_system(&q).unwrap().invertible().count();
        let (a, b) = (k.elem(3, 0), k.elem(1, 2));
        assert_eq!(phi(a * b), phi(a) * phi(b));
        for k in FieldId::all() {
            let q = k.elem(5, 1);
            assert_eq!(residue_system(&q).unwrap().len(), q.norm() as usize);
        }
    }
}
