//! Integer and rational helpers: modular arithmetic on machine words,
//! primality, factoring, square classes and rational reconstruction.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes `<= bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

/// Factorization of a machine word by trial division, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, k) in factor_u64(n) {
        let cur = ds.clone();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

/// Legendre symbol (a/p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Reduce an integer into `[0, m)`.
pub fn reduce_big(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// Reduce a rational mod a prime; `None` when p divides the denominator.
pub fn reduce_rational(q: &BigRational, p: u64) -> Option<u64> {
    let den = reduce_big(q.denom(), p);
    let inv = inv_mod(den, p)?;
    Some(mul_mod(reduce_big(q.numer(), p), inv, p))
}

fn pow_mod_big(b: &BigInt, e: &BigInt, m: &BigInt) -> BigInt {
    b.modpow(e, m)
}

/// Miller-Rabin with fixed bases; exact below 3.3e24, probabilistic above.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_negative() || n.is_even() {
        return false;
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let a = BigInt::from(a);
        let mut x = pow_mod_big(&a, &d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent rho; returns a nontrivial factor of a composite odd `n`.
fn pollard_brent(n: &BigInt, budget: &mut u64) -> Option<BigInt> {
    let one = BigInt::one();
    for c in 1u32.. {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let m: u64 = 128;
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
                if *budget < m {
                    return None;
                }
                *budget -= m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

/// Prime factorization of `|n|` (n nonzero), primes ascending.
///
/// Fails with a budget error when the rho iterations run out.
pub fn factor_bigint(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    if n.is_zero() {
        return Err(Error::invalid("cannot factor zero"));
    }
    let mut n = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for p in primes_up_to(10_000) {
        let bp = BigInt::from(p);
        if n.is_one() {
            break;
        }
        let mut k = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            k += 1;
        }
        if k > 0 {
            out.push((bp, k));
        }
    }
    let mut stack = vec![n];
    let mut budget: u64 = 50_000_000;
    let mut big: Vec<BigInt> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            big.push(m);
            continue;
        }
        let r = m.sqrt();
        if &r * &r == m {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let f = pollard_brent(&m, &mut budget)
            .ok_or_else(|| Error::budget(format!("integer factorization budget exhausted on {m}")))?;
        stack.push(&m / &f);
        stack.push(f);
    }
    big.sort();
    for p in big {
        match out.last_mut() {
            Some((q, k)) if *q == p => *k += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort();
    Ok(out)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Square-free part of a nonzero integer, sign preserved.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt> {
    if n.is_zero() {
        return Err(Error::invalid("square class of zero is undefined"));
    }
    let mut out = BigInt::one();
    for (p, k) in factor_bigint(n)? {
        if k % 2 == 1 {
            out *= p;
        }
    }
    if n.sign() == Sign::Minus {
        out = -out;
    }
    Ok(out)
}

/// Square-free integer representing the class of a nonzero rational in Q^x/(Q^x)^2.
pub fn rational_square_class(q: &BigRational) -> Result<BigInt> {
    squarefree_part(&(q.numer() * q.denom()))
}

pub fn is_rational_square(q: &BigRational) -> bool {
    !q.is_negative() && is_perfect_square(q.numer()) && is_perfect_square(q.denom())
}

/// Exact square root of a rational square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if !is_rational_square(q) {
        return None;
    }
    Some(BigRational::new(q.numer().sqrt(), q.denom().sqrt()))
}

/// Whether two nonzero rationals have the same square class.
pub fn same_square_class(a: &BigRational, b: &BigRational) -> bool {
    !a.is_zero() && !b.is_zero() && is_rational_square(&(a * b))
}

/// Rational reconstruction: find r/s with r ≡ a s (mod m), |r| <= n_bound, 0 < s <= d_bound.
pub fn rational_reconstruct(
    a: &BigInt,
    m: &BigInt,
    n_bound: &BigInt,
    d_bound: &BigInt,
) -> Option<BigRational> {
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > n_bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > *d_bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Conductor of Q(sqrt d) for a square-free d not in {0, 1}.
pub fn quad_conductor(d: &BigInt) -> Result<BigInt> {
    if d.is_zero() || d.is_one() {
        return Err(Error::invalid(format!("d = {d} does not define a quadratic field")));
    }
    if squarefree_part(d)? != *d {
        return Err(Error::invalid(format!("d = {d} is not square-free")));
    }
    if d.mod_floor(&BigInt::from(4)) == BigInt::one() {
        Ok(d.abs())
    } else {
        Ok(d.abs() * 4)
    }
}

/// Whether Q(sqrt d) lies in the n-th cyclotomic field.
pub fn in_cyclotomic(d: &BigInt, n: &BigInt) -> Result<bool> {
    Ok((n % quad_conductor(d)?).is_zero())
}

/// Invariant factors (d1 | d2 | ...) of the abelian group with given cyclic factors.
pub fn invariant_factors(cyclic: &[u64]) -> Vec<u64> {
    let mut primary: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
    for &c in cyclic {
        for (p, k) in factor_u64(c) {
            primary.entry(p).or_default().push(p.pow(k));
        }
    }
    let len = primary.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for v in primary.values_mut() {
        v.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in v.iter().enumerate() {
            out[len - 1 - i] *= q;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn small_primes() {
        let ps = primes_up_to(30);
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
    }

    #[test]
    fn factoring_large_semiprime() {
        let p = BigInt::from(1_000_000_007u64);
        let q = BigInt::from(998_244_353u64);
        let n = &p * &q * &q * 12;
        let f = factor_bigint(&n).unwrap();
        assert_eq!(f, vec![(bi(2), 2), (bi(3), 1), (q.clone(), 2), (p.clone(), 1)]);
        assert_eq!(squarefree_part(&-n).unwrap(), -(bi(3) * p));
    }

    #[test]
    fn square_classes() {
        let q = BigRational::new(bi(52), bi(5));
        assert_eq!(rational_square_class(&q).unwrap(), bi(65));
        assert!(same_square_class(&q, &BigRational::from(bi(65))));
        assert_eq!(rational_square_class(&BigRational::from(bi(-5103))).unwrap(), bi(-7));
    }

    #[test]
    fn reconstruct() {
        let m = BigInt::from(1_000_003u64);
        let target = BigRational::new(bi(-17), bi(25));
        let inv = BigInt::from(inv_mod(25, 1_000_003).unwrap());
        let a = (bi(-17) * inv).mod_floor(&m);
        let got = rational_reconstruct(&a, &m, &bi(700), &bi(700)).unwrap();
        assert_eq!(got, target);
    }

    #[test]
    fn conductors() {
        assert_eq!(quad_conductor(&bi(13)).unwrap(), bi(13));
        assert_eq!(quad_conductor(&bi(-2)).unwrap(), bi(8));
        assert_eq!(quad_conductor(&bi(-3)).unwrap(), bi(3));
        assert!(in_cyclotomic(&bi(-3), &bi(9)).unwrap());
        assert!(quad_conductor(&bi(1)).is_err());
        assert!(quad_conductor(&bi(12)).is_err());
    }

    #[test]
    fn invariant_factor_assembly() {
        assert_eq!(invariant_factors(&[4, 4]), vec![4, 4]);
        assert_eq!(invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors(&[2, 4, 3]), vec![2, 12]);
        assert!(invariant_factors(&[]).is_empty());
    }
}
