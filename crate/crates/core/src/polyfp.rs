//! Polynomials over a prime field F_p: distinct-degree and equal-degree
//! factorization.

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{inv_mod, mul_mod, reduce_rational};
use crate::field::Q;
use crate::poly::Poly;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyFp {
    p: u64,
    c: Vec<u64>,
}

impl PolyFp {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyFp { p, c }
    }

    /// Reduce a rational polynomial mod p; `None` if a denominator vanishes.
    pub fn from_q(f: &Poly<Q>, p: u64) -> Option<Self> {
        let c = f
            .coeffs()
            .iter()
            .map(|a| reduce_rational(a, p))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::new(p, c))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        Self::new(self.p, v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        let v = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + p - o.c.get(i).copied().unwrap_or(0)) % p)
            .collect();
        Self::new(p, v)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, vec![]);
        }
        let p = self.p;
        let mut v = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                v[i + j] = (v[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        Self::new(p, v)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.p, self.c.iter().map(|&a| mul_mod(a, k, self.p)).collect())
    }

    pub fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => self.scale(inv_mod(l, self.p).expect("p prime")),
        }
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let p = self.p;
        let dl = inv_mod(*d.c.last().expect("nonzero divisor"), p).unwrap();
        let dd = d.c.len() - 1;
        if self.c.len() < d.c.len() {
            return (Self::new(p, vec![]), self.clone());
        }
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = mul_mod(r[i + dd], dl, p);
            if c != 0 {
                for (j, &dc) in d.c.iter().enumerate() {
                    r[i + j] = (r[i + j] + p - mul_mod(c, dc, p)) % p;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s a + t b = g`, g monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::new(p, vec![]));
        let (mut t0, mut t1) = (Self::new(p, vec![]), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let k = match r0.c.last() {
            Some(&l) => inv_mod(l, p).unwrap(),
            None => 1,
        };
        (r0.scale(k), s0.scale(k), t0.scale(k))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        let v = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| mul_mod(a, i as u64 % p, p))
            .collect();
        Self::new(p, v)
    }

    /// `self^e mod m` with an arbitrary-size exponent.
    pub fn powmod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }

    /// Distinct-degree factorization of a monic squarefree polynomial:
    /// pairs (d, product of all irreducible factors of degree d).
    pub fn ddf(&self) -> Vec<(usize, PolyFp)> {
        let p = self.p;
        let mut out = Vec::new();
        let mut f = self.monic();
        let pe = BigUint::from(p);
        let mut h = Self::x(p);
        let mut d = 0;
        while f.deg() >= 2 * (d + 1) {
            d += 1;
            h = h.powmod(&pe, &f);
            let g = f.gcd(&h.sub(&Self::x(p)));
            if g.deg() > 0 {
                f = f.divrem(&g).0;
                h = h.rem(&f);
                out.push((d, g));
            }
        }
        if f.deg() > 0 {
            out.push((f.deg(), f));
        }
        out
    }

    /// Degrees of the irreducible factors (sorted), for a squarefree polynomial.
    pub fn degree_multiset(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (d, g) in self.ddf() {
            out.extend(std::iter::repeat(d).take(g.deg() / d));
        }
        out.sort_unstable();
        out
    }

    /// Cantor-Zassenhaus splitting of a product of irreducibles of degree `d` (p odd).
    fn edf(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<PolyFp> {
        let p = self.p;
        let n = self.deg();
        if n == d {
            return vec![self.monic()];
        }
        let exp = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
        loop {
            let a = Self::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
            if a.deg() == 0 {
                continue;
            }
            let g = self.gcd(&a);
            let split = if g.deg() > 0 && g.deg() < n {
                g
            } else {
                let b = a.powmod(&exp, self).sub(&Self::one(p));
                self.gcd(&b)
            };
            if split.deg() > 0 && split.deg() < n {
                let other = self.divrem(&split).0;
                let mut out = split.edf(d, rng);
                out.extend(other.edf(d, rng));
                return out;
            }
        }
    }

    /// Complete factorization of a squarefree polynomial over F_p, p odd,
    /// as monic irreducibles sorted by (degree, coefficients).
    pub fn factor_squarefree(&self, seed: u64) -> Vec<PolyFp> {
        assert!(self.p % 2 == 1, "equal-degree splitting needs an odd prime");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for (d, g) in self.ddf() {
            out.extend(g.edf(d, &mut rng));
        }
        out.sort_by(|a, b| (a.deg(), &a.c).cmp(&(b.deg(), &b.c)));
        out
    }
}
