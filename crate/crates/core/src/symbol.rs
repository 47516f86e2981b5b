//! Quadratic residue symbols `(a/n)` for odd `n`.
//!
//! [`symbol`] is the reference: the multiplicative extension of the prime
//! symbol over the prime-ideal factorization of `(n)`, valid in all nine
//! fields. [`symbol_fast`] avoids factoring by running the reciprocity loop,
//! which only terminates reliably where `nearest_quotient` decreases norms.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::{mul_coords, FieldId, QuadInt};
use crate::ideal::{ideal_of, prime_ideal_factorization, split_prime, IdealMatrix, PrimeElem};
use crate::primary::primary_normalize;

/// A value in `{−1, 0, 1}`.
pub type SymbolValue = i8;

/// Euler's criterion `a^((N(ϖ)−1)/2) mod ϖ`, computed in `O_K/(ϖ)`.
pub fn symbol_mod_prime(a: &QuadInt, p: &PrimeElem) -> Result<SymbolValue> {
    if !p.is_odd() {
        return Err(Error::EvenElement("symbol_mod_prime"));
    }
    let field = p.generator.field;
    let ideal = ideal_of(&p.generator)?;
    let base = ideal.reduce(a);
    if base.is_zero() {
        return Ok(0);
    }
    let mut e = (p.norm as u64 - 1) / 2;
    let mut acc = (1i128, 0i128);
    let mut sq = (base.a as i128, base.b as i128);
    let reduce = |(x, y): (i128, i128)| {
        let (x, y) = ideal.reduce_coords(x, y);
        (x as i128, y as i128)
    };
    while e > 0 {
        if e & 1 == 1 {
            acc = reduce(mul_coords(field, acc, sq));
        }
        sq = reduce(mul_coords(field, sq, sq));
        e >>= 1;
    }
    let one = reduce((1, 0));
    let minus_one = reduce((-1, 0));
    if acc == one {
        Ok(1)
    } else if acc == minus_one {
        Ok(-1)
    } else {
        Err(Error::NotPrime(p.norm))
    }
}

/// `(a/n)` for odd nonzero `n`; equal to 1 when `n` is a unit.
pub fn symbol(a: &QuadInt, n: &QuadInt) -> Result<SymbolValue> {
    a.same_field(n)?;
    if n.is_zero() {
        return Err(Error::ZeroElement("symbol"));
    }
    if !n.is_odd() {
        return Err(Error::EvenElement("symbol"));
    }
    let mut value = 1i8;
    for (prime, e) in prime_ideal_factorization(n)? {
        let l = prime.legendre(a);
        if l == 0 {
            return Ok(0);
        }
        if e % 2 == 1 {
            value *= l;
        }
    }
    Ok(value)
}

// The supplementary characters `n ↦ (u/n)` and `n ↦ (π/n)` for units `u` and
// primes `π | 2` factor through `(O_K/4π)^×`, hence through residues mod 16.
struct Supplements {
    modulus: IdealMatrix,
    units: Vec<(QuadInt, Vec<i8>)>,
    twos: Vec<(QuadInt, Vec<i8>)>,
}

impl Supplements {
    fn build(field: FieldId) -> Result<Self> {
        let modulus = ideal_of(&field.elem(16, 0))?;
        let table = |x: &QuadInt| -> Result<Vec<i8>> {
            let mut t = vec![0i8; 256];
            for r in modulus.residues() {
                if r.is_odd() {
                    t[Self::slot(&modulus, &r)] = symbol(x, &r)?;
                }
            }
            Ok(t)
        };
        let units = field.units().iter().map(|u| Ok((*u, table(u)?))).collect::<Result<_>>()?;
        let twos = split_prime(field, 2)?
            .iter()
            .map(|p| Ok((p.generator, table(&p.generator)?)))
            .collect::<Result<_>>()?;
        Ok(Supplements { modulus, units, twos })
    }

    fn slot(modulus: &IdealMatrix, n: &QuadInt) -> usize {
        let (x, y) = modulus.reduce_coords(n.a as i128, n.b as i128);
        (x * 16 + y) as usize
    }

    fn unit(&self, u: &QuadInt, slot: usize) -> i8 {
        self.units.iter().find(|(v, _)| v == u).expect("every unit is tabulated").1[slot]
    }
}

fn supplements(field: FieldId) -> Result<&'static Supplements> {
    static TABLES: OnceLock<Vec<(i64, Supplements)>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        FieldId::all()
            .filter(|k| k.is_norm_euclidean())
            .map(|k| (k.d(), Supplements::build(k).expect("supplement tables")))
            .collect()
    });
    tables
        .iter()
        .find(|(d, _)| *d == field.d())
        .map(|(_, t)| t)
        .ok_or(Error::NotEuclidean(field.d()))
}

fn half_norm_odd(x: &QuadInt) -> bool {
    (x.norm_wide() - 1) / 2 % 2 != 0
}

/// `(a/n)` by reduction, removal of units and primes above 2, and
/// reciprocity; no factorization. Norm-Euclidean fields only.
pub fn symbol_fast(a: &QuadInt, n: &QuadInt) -> Result<SymbolValue> {
    a.same_field(n)?;
    let field = n.field;
    if !field.is_norm_euclidean() {
        return Err(Error::NotEuclidean(field.d()));
    }
    if n.is_zero() {
        return Err(Error::ZeroElement("symbol_fast"));
    }
    if !n.is_odd() {
        return Err(Error::EvenElement("symbol_fast"));
    }
    let sup = supplements(field)?;
    let (_, mut n) = primary_normalize(n)?;
    let mut a = *a;
    let mut sign = 1i8;
    loop {
        if n.is_unit() {
            return Ok(sign);
        }
        a = a.nearest_remainder(&n)?;
        if a.is_zero() {
            return Ok(0);
        }
        let slot = Supplements::slot(&sup.modulus, &n);
        for (g, t) in &sup.twos {
            while let Some(q) = a.exact_divide(g)? {
                a = q;
                sign *= t[slot];
            }
        }
        let (u, m) = primary_normalize(&a)?;
        // a = u⁻¹·m and (u⁻¹/n) = (u/n)
        sign *= sup.unit(&u, slot);
        if half_norm_odd(&m) && half_norm_odd(&n) {
            sign = -sign;
        }
        a = n;
        n = m;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiKind {
    /// `χ^(m)(x) = (m/x)`
    Upper,
    /// `χ_m(x) = (x/m)`
    Lower,
}

pub fn chi_eval(kind: ChiKind, m: &QuadInt, x: &QuadInt) -> Result<SymbolValue> {
    match kind {
        ChiKind::Upper => symbol(m, x),
        ChiKind::Lower => symbol(x, m),
    }
}

/// `χ^(c_K c)(x)`, the character attached to the family member `c`.
pub fn conductor_char(c: &QuadInt, x: &QuadInt) -> Result<SymbolValue> {
    let m = c.field.c_k().checked_mul(c)?;
    symbol(&m, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::tests::elements_up_to;
    use crate::primary::is_primary;
    use crate::rational::{kronecker, primes_below};
    use proptest::prelude::*;

    fn f(d: i64) -> FieldId {
        FieldId::new(d).unwrap()
    }

    fn odd_up_to(k: FieldId, bound: i64) -> Vec<QuadInt> {
        elements_up_to(k, bound).into_iter().filter(|x| x.is_odd()).collect()
    }

    #[test]
    fn euler_criterion_example() {
        let k = f(-1);
        let p = split_prime(k, 13).unwrap();
        let p = p.iter().find(|p| p.generator.divides(&k.elem(3, 2)).unwrap()).unwrap();
        assert_eq!(symbol_mod_prime(&k.elem(2, 0), p).unwrap(), -1);
        assert_eq!(symbol(&k.elem(2, 0), &k.elem(3, 2)).unwrap(), -1);
        assert_eq!(symbol_mod_prime(&k.elem(4, 0), p).unwrap(), 1);
        assert_eq!(symbol_mod_prime(&k.elem(3, 2), p).unwrap(), 0);
        let two = &split_prime(k, 2).unwrap()[0];
        assert_eq!(symbol_mod_prime(&k.one(), two), Err(Error::EvenElement("symbol_mod_prime")));
    }

    #[test]
    fn euler_criterion_matches_residue_field() {
        for k in FieldId::all() {
            for p in primes_below(120).into_iter().skip(1) {
                for prime in split_prime(k, p).unwrap() {
                    for a in -7..=7 {
                        for b in -7..=7 {
                            let x = k.elem(a, b);
                            assert_eq!(symbol_mod_prime(&x, &prime).unwrap(), prime.ideal.legendre(&x), "{x} mod {}", prime.generator);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn supplementary_laws() {
        for k in FieldId::all() {
            for n in odd_up_to(k, 2000) {
                let nn = n.norm();
                let minus = if (nn - 1) / 2 % 2 == 0 { 1 } else { -1 };
                assert_eq!(symbol(&k.elem(-1, 0), &n).unwrap(), minus, "(-1/{n})");
                assert_eq!(symbol(&k.elem(2, 0), &n).unwrap(), kronecker(2, nn), "(2/{n})");
            }
        }
    }

    #[test]
    fn i_over_primary() {
        let k = f(-1);
        assert_eq!(symbol(&k.elem(0, 1), &k.elem(-1, -2)).unwrap(), -1);
        for n in odd_up_to(k, 2000) {
            if is_primary(&n).unwrap() {
                let expect = if (1 - n.a).rem_euclid(4) == 0 { 1 } else { -1 };
                assert_eq!(symbol(&k.elem(0, 1), &n).unwrap(), expect, "{n}");
            }
        }
    }

    #[test]
    fn units_and_zero() {
        for k in FieldId::all() {
            for u in k.units() {
                assert_eq!(symbol(&k.elem(5, 3), &u).unwrap(), 1);
            }
            let n = k.elem(3, 0);
            assert_eq!(symbol(&k.elem(6, 3), &n).unwrap(), 0);
            assert!(symbol(&k.one(), &k.elem(2, 0)).is_err());
            assert!(symbol(&k.one(), &k.zero()).is_err());
        }
    }

    #[test]
    fn reciprocity_law() {
        for k in FieldId::all() {
            let prim: Vec<QuadInt> = odd_up_to(k, 300).into_iter().filter(|n| is_primary(n).unwrap()).collect();
            for m in &prim {
                for n in &prim {
                    let (x, y) = (symbol(m, n).unwrap(), symbol(n, m).unwrap());
                    if x == 0 {
                        assert_eq!(y, 0);
                        continue;
                    }
                    let expect = if half_norm_odd(m) && half_norm_odd(n) { -1 } else { 1 };
                    assert_eq!(x * y, expect, "d={} m={m} n={n}", k.d());
                }
            }
        }
    }

    #[test]
    fn fast_matches_reference_gaussian() {
        let k = f(-1);
        let odd = odd_up_to(k, 500);
        let all = elements_up_to(k, 500);
        for n in &odd {
            for a in &all {
                assert_eq!(symbol_fast(a, n).unwrap(), symbol(a, n).unwrap(), "({a}/{n})");
            }
        }
    }

    #[test]
    fn fast_matches_reference_euclidean() {
        for k in FieldId::all().filter(|k| k.is_norm_euclidean()) {
            let odd = odd_up_to(k, 150);
            let all = elements_up_to(k, 150);
            for n in &odd {
                for a in &all {
                    assert_eq!(symbol_fast(a, n).unwrap(), symbol(a, n).unwrap(), "d={} ({a}/{n})", k.d());
                }
            }
            assert_eq!(symbol_fast(&k.elem(7, 2), &k.one()).unwrap(), 1);
        }
        assert_eq!(symbol_fast(&f(-19).one(), &f(-19).one()), Err(Error::NotEuclidean(-19)));
    }

    #[test]
    fn conductor_character() {
        let k = f(-7);
        let mut seen = std::collections::HashMap::new();
        for x in odd_up_to(k, 3000) {
            let r = ideal_of(&k.c_k()).unwrap().reduce(&x);
            let v = conductor_char(&k.one(), &x).unwrap();
            assert_eq!(*seen.entry((r.a, r.b)).or_insert(v), v, "{x}");
        }
        for k in FieldId::all() {
            for c in [k.one(), primary_normalize(&k.elem(3, 2)).unwrap().1] {
                let modulus = ideal_of(&k.c_k().checked_mul(&c).unwrap()).unwrap();
                let mut seen = std::collections::HashMap::new();
                for x in odd_up_to(k, 1500) {
                    let v = conductor_char(&c, &x).unwrap();
                    let r = modulus.reduce(&x);
                    assert_eq!(*seen.entry((r.a, r.b)).or_insert(v), v, "d={} c={c} x={x}", k.d());
                    for u in k.units() {
                        assert_eq!(conductor_char(&c, &(u * x)).unwrap(), v);
                    }
                }
            }
        }
    }

    #[test]
    fn chi_kinds() {
        let k = f(-2);
        let (m, x) = (k.elem(3, 1), k.elem(5, 2));
        assert_eq!(chi_eval(ChiKind::Upper, &m, &x).unwrap(), symbol(&m, &x).unwrap());
        assert_eq!(chi_eval(ChiKind::Lower, &m, &x).unwrap(), symbol(&x, &m).unwrap());
    }

    fn arb_elem(d: i64, r: i64) -> impl Strategy<Value = QuadInt> {
        (-r..=r, -r..=r).prop_map(move |(a, b)| f(d).elem(a, b))
    }

    proptest! {
        #[test]
        fn multiplicative_both_arguments(
            d in prop::sample::select(crate::field::CLASS_NUMBER_ONE.to_vec()),
            s in 0u64..1000,
        ) {
            let k = f(d);
            let pick = |i: u64, j: i64| k.elem((i as i64 % 23) - 11 + j, (i as i64 / 23 % 23) - 11);
            let (a, b) = (pick(s, 0), pick(s * 7 + 3, 1));
            let (m, n) = (pick(s * 13 + 5, 0), pick(s * 31 + 11, 2));
            prop_assume!(m.is_odd() && n.is_odd());
            prop_assert_eq!(symbol(&(a * b), &n).unwrap(), symbol(&a, &n).unwrap() * symbol(&b, &n).unwrap());
            prop_assert_eq!(symbol(&a, &(m * n)).unwrap(), symbol(&a, &m).unwrap() * symbol(&a, &n).unwrap());
        }

        #[test]
        fn fast_agrees_on_large_inputs(
            d in prop::sample::select(vec![-1i64, -2, -3, -7, -11]),
            a in arb_elem(-1, 1_000_000),
            n in arb_elem(-1, 3_000),
        ) {
            let (a, n) = (f(d).elem(a.a, a.b), f(d).elem(n.a, n.b));
            prop_assume!(n.is_odd());
            prop_assert_eq!(symbol_fast(&a, &n).unwrap(), symbol(&a, &n).unwrap());
        }
    }
}
