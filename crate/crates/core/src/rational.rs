//! Rational-integer number theory used underneath the field arithmetic:
//! residue symbols over `Z`, primality, factorization and square roots mod p.

use std::sync::OnceLock;

pub fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Returns `(g, s, t)` with `s·a + t·b = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> i8 {
    assert!(n > 0 && n % 2 == 1, "jacobi needs odd positive modulus, got {n}");
    let mut a = a.rem_euclid(n) as u64;
    let mut n = n as u64;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(a/n)` for any integers.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut sign = 1i8;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    let tz = n.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
        n >>= tz;
    }
    sign * jacobi(a, n)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's cycle variant with batched gcds.
fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut q, mut g) = (2u64, 2u64, 1u64, 1u64);
        let mut r = 1u64;
        let mut ys = 0u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q as i128, n as i128) as u64;
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys) as i128, n as i128) as u64;
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Primes below `n` by the sieve of Eratosthenes.
pub fn primes_below(n: usize) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(TRIAL_LIMIT as usize + 1))
}

/// Prime factorization `[(p, e)]` sorted by `p`; trial division up to 10⁶,
/// then Pollard rho with Miller–Rabin on the cofactor.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        let mut large = Vec::new();
        split_large(n, &mut large);
        large.sort_unstable();
        for p in large {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
    }
    out
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if n <= TRIAL_LIMIT * TRIAL_LIMIT || is_prime(n) {
        // after trial division every cofactor below 10^12 is prime
        out.push(n);
        return;
    }
    let f = pollard_rho(n);
    split_large(f, out);
    split_large(n / f, out);
}

/// A square root of `a` modulo the odd prime `p` (Tonelli–Shanks).
pub fn sqrt_mod(a: i64, p: u64) -> Option<u64> {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Smallest-prime-factor table for `0..=n`.
pub fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn jacobi_matches_euler_criterion() {
        for p in primes_below(200).into_iter().skip(1) {
            for a in -50i64..50 {
                let e = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
                let expect = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(jacobi(a, p as i64), expect, "({a}/{p})");
            }
        }
    }

    #[test]
    fn kronecker_two() {
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-43, 11), 1);
    }

    #[test]
    fn miller_rabin_known() {
        assert!(is_prime(1_000_000_007));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(!is_prime(1_000_000_007 * 998_244_353));
    }

    #[test]
    fn factor_semiprime_above_trial_limit() {
        let (p, q) = (1_000_000_007u64, 998_244_353u64);
        assert_eq!(factor(p * q), vec![(q, 1), (p, 1)]);
        assert_eq!(factor(2u64.pow(10) * 3 * 3), vec![(2, 10), (3, 2)]);
        assert_eq!(factor(1), vec![]);
    }

    #[test]
    fn tonelli_shanks() {
        for p in [5u64, 13, 17, 41, 97, 1_000_000_009] {
            for a in 1..40i64 {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(mul_mod(r, r, p), a as u64 % p);
                } else {
                    assert_eq!(jacobi(a, p as i64), -1);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn factor_reconstructs(n in 1u64..1_000_000_000_000u64) {
            let f = factor(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(back, n);
            prop_assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }

        #[test]
        fn ext_gcd_bezout(a in -10_000i128..10_000, b in -10_000i128..10_000) {
            let (g, s, t) = ext_gcd(a, b);
            prop_assert_eq!(g, gcd(a, b));
            prop_assert_eq!(s * a + t * b, g);
        }
    }
}
