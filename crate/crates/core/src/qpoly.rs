//! Division polynomials, discriminants, low-degree rational factors and
//! splitting-pattern comparisons mod p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime_u64, primes_up_to, rational_reconstruct, rational_square_class, reduce_big};
use crate::eqcurves::Curve;
use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::poly::Poly;
use crate::polyfp::PolyFp;
use crate::ratfunc::RatFunc;

/// A polynomial over Q or over Q(t).
#[derive(Clone, Debug, PartialEq)]
pub enum ExactPolynomial {
    Q(Poly<Q>),
    Qt(Poly<RatFunc>),
}

pub const DEFAULT_MAX_DIVISION_INDEX: u32 = 12;

/// The m-division polynomial in x.
///
/// Odd m gives ψ_m (degree (m²−1)/2). Even m gives ψ_m² / f_m-style product
/// `F · (ψ_m/ψ_2)` with `F = 4x³ + b2 x² + 2 b4 x + b6 = ψ_2²`, so that in both
/// cases the roots are exactly the x-coordinates of nonzero m-torsion points.
pub fn division_polynomial<F: Field>(e: &Curve<F>, m: u32) -> Result<Poly<F>> {
    division_polynomial_with_budget(e, m, DEFAULT_MAX_DIVISION_INDEX)
}

pub fn division_polynomial_with_budget<F: Field>(e: &Curve<F>, m: u32, max_m: u32) -> Result<Poly<F>> {
    if m == 0 {
        return Err(Error::invalid("division polynomial index must be positive"));
    }
    if m > max_m {
        return Err(Error::budget(format!("division polynomial index {m} exceeds the limit {max_m}")));
    }
    let fm = reduced_division_polys(e, m as usize);
    let f = fm[m as usize].clone();
    Ok(if m % 2 == 0 { &e.two_division_cubic() * &f } else { f })
}

/// f_0..f_m with f_k = ψ_k for odd k and ψ_k/ψ_2 for even k.
fn reduced_division_polys<F: Field>(e: &Curve<F>, m: usize) -> Vec<Poly<F>> {
    let (b2, b4, b6, b8) = (e.b2(), e.b4(), e.b6(), e.b8());
    let c = |n: i64| F::from_i64(n);
    let ff = e.two_division_cubic();
    let ff2 = &ff * &ff;
    let mut f: Vec<Poly<F>> = vec![Poly::zero(), Poly::one(), Poly::one()];
    f.push(Poly::new(vec![b8.clone(), c(3).mul(&b6), c(3).mul(&b4), b2.clone(), c(3)]));
    f.push(Poly::new(vec![
        b4.mul(&b8).sub(&b6.mul(&b6)),
        b2.mul(&b8).sub(&b4.mul(&b6)),
        c(10).mul(&b8),
        c(10).mul(&b6),
        c(5).mul(&b4),
        b2.clone(),
        c(2),
    ]));
    for k in 5..=m {
        let n = k / 2;
        let next = if k % 2 == 1 {
            let a = &(&f[n + 2] * &f[n].pow(3));
            let b = &(&f[n - 1] * &f[n + 1].pow(3));
            if n % 2 == 0 {
                &(&ff2 * a) - b
            } else {
                a - &(&ff2 * b)
            }
        } else {
            let inner = &(&f[n + 2] * &f[n - 1].pow(2)) - &(&f[n - 2] * &f[n + 1].pow(2));
            &f[n] * &inner
        };
        f.push(next);
    }
    f.truncate(m + 1);
    f
}

pub fn poly_discriminant<F: Field>(f: &Poly<F>) -> Result<F> {
    if f.deg() < 2 || f.is_zero() {
        return Err(Error::invalid("discriminant needs degree at least 2"));
    }
    Ok(f.discriminant())
}

/// Discriminant over Q with its square-free square class (0 when it vanishes).
pub fn discriminant_with_class(f: &Poly<Q>) -> Result<(Q, BigInt)> {
    let d = poly_discriminant(f)?;
    let class = if Field::is_zero(&d) { BigInt::zero() } else { rational_square_class(&d)? };
    Ok((d, class))
}

/// Upper bound on working precision (bits) for Hensel lifting.
const MAX_PRECISION_BITS: u64 = 1 << 20;

fn zm_reduce(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = v.iter().map(|c| c.mod_floor(m)).collect();
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

fn zm_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let v: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect();
    zm_reduce(&v, m)
}

fn zm_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let v: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect();
    zm_reduce(&v, m)
}

fn zm_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    zm_reduce(&v, m)
}

/// Division by a monic polynomial mod m.
fn zm_divrem_monic(a: &[BigInt], h: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let dh = h.len() - 1;
    if a.len() <= dh {
        return (Vec::new(), a.to_vec());
    }
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - dh];
    for i in (0..q.len()).rev() {
        let c = r[i + dh].mod_floor(m);
        for (j, hc) in h.iter().enumerate() {
            r[i + j] -= &c * hc;
        }
        q[i] = c;
    }
    r.truncate(dh);
    (zm_reduce(&q, m), zm_reduce(&r, m))
}

fn to_big(f: &PolyFp) -> Vec<BigInt> {
    f.coeffs().iter().map(|&c| BigInt::from(c)).collect()
}

/// Quadratic Hensel lifting of `f ≡ g h (mod p)` up to modulus `target`,
/// with h monic and `s g + t h ≡ 1`. Returns (g, h) mod the final modulus.
fn hensel_lift(
    f: &[BigInt],
    g0: &PolyFp,
    h0: &PolyFp,
    s0: &PolyFp,
    t0: &PolyFp,
    steps: u32,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut m = BigInt::from(g0.prime());
    let (mut g, mut h, mut s, mut t) = (to_big(g0), to_big(h0), to_big(s0), to_big(t0));
    for _ in 0..steps {
        let m2 = &m * &m;
        let e = zm_sub(&zm_reduce(f, &m2), &zm_mul(&g, &h, &m2), &m2);
        let (q, r) = zm_divrem_monic(&zm_mul(&s, &e, &m2), &h, &m2);
        let g_new = zm_add(&zm_add(&g, &zm_mul(&t, &e, &m2), &m2), &zm_mul(&q, &g, &m2), &m2);
        let h_new = zm_add(&h, &r, &m2);
        let b = zm_sub(
            &zm_add(&zm_mul(&s, &g_new, &m2), &zm_mul(&t, &h_new, &m2), &m2),
            &[BigInt::one()],
            &m2,
        );
        let (c, d) = zm_divrem_monic(&zm_mul(&s, &b, &m2), &h_new, &m2);
        s = zm_sub(&s, &d, &m2);
        t = zm_sub(&zm_sub(&t, &zm_mul(&t, &b, &m2), &m2), &zm_mul(&c, &g_new, &m2), &m2);
        g = g_new;
        h = h_new;
        m = m2;
    }
    (g, h)
}

/// Pick a good odd prime with the fewest modular factors among the first few.
fn choose_prime(f: &[BigInt]) -> (u64, Vec<PolyFp>) {
    let lc = f.last().unwrap();
    let mut best: Option<(usize, u64, PolyFp)> = None;
    let mut seen = 0;
    let mut p = 2u64;
    while seen < 5 {
        p += 1;
        if !is_prime_u64(p) || (lc % p).is_zero() {
            continue;
        }
        let fp = PolyFp::new(p, f.iter().map(|c| reduce_big(c, p)).collect());
        if !fp.is_squarefree() {
            continue;
        }
        seen += 1;
        let count = fp.degree_multiset().len();
        if best.as_ref().map_or(true, |(c, _, _)| count < *c) {
            best = Some((count, p, fp));
        }
    }
    let (_, p, fp) = best.unwrap();
    (p, fp.factor_squarefree(0x5eed ^ p))
}

fn subsets_with_degree(degs: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(degs: &[usize], start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..degs.len() {
            if degs[i] <= left {
                cur.push(i);
                rec(degs, i + 1, left - degs[i], cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(degs, 0, k, &mut Vec::new(), &mut out);
    out
}

/// All monic irreducible factors over Q of degree at most `d_max` (1..=3),
/// sorted by degree then coefficients.
pub fn small_rational_factors(f: &Poly<Q>, d_max: usize) -> Result<Vec<Poly<Q>>> {
    if !(1..=3).contains(&d_max) {
        return Err(Error::invalid("degree bound must be 1, 2 or 3"));
    }
    if f.is_zero() {
        return Err(Error::invalid("zero polynomial"));
    }
    let sf = f.squarefree_part();
    let mut out = Vec::new();
    if sf.deg() == 0 {
        return Ok(out);
    }
    if sf.deg() <= d_max && sf.deg() == 1 {
        return Ok(vec![sf]);
    }
    let fi = Poly::from_bigints(&sf.primitive_integer()).primitive_integer();
    let lc = fi.last().unwrap().clone();
    let (p, mods) = choose_prime(&fi);

    // coefficient bounds for monic factors: numerators <= N, denominators <= D
    let norm1: BigInt = fi.iter().map(|c| c.abs()).sum();
    let n_bound = (BigInt::one() << d_max) * &norm1 + 1u32;
    let d_bound = lc.abs();
    let need = BigInt::from(2u32) * &n_bound * &d_bound;
    let mut steps = 0u32;
    let mut modulus = BigInt::from(p);
    while modulus <= need {
        modulus = &modulus * &modulus;
        steps += 1;
        if modulus.bits() > MAX_PRECISION_BITS {
            return Err(Error::budget("reconstruction height bound exceeds the precision cap"));
        }
    }

    // lift all modular factors to p^(2^steps)
    let lc_p = reduce_big(&lc, p);
    let mut lifted: Vec<Vec<BigInt>> = Vec::new();
    let mut cur = zm_reduce(&fi, &modulus);
    for i in 0..mods.len() {
        if i + 1 == mods.len() {
            // monic lift of the last factor: cur / lc mod modulus
            let lc_inv = mod_inverse(&lc, &modulus).expect("p does not divide lc");
            lifted.push(zm_reduce(&cur.iter().map(|c| c * &lc_inv).collect::<Vec<_>>(), &modulus));
            break;
        }
        let h0 = mods[i].clone();
        let g0 = mods[i + 1..]
            .iter()
            .fold(PolyFp::new(p, vec![lc_p]), |acc, x| acc.mul(x));
        let (one, s, t) = g0.xgcd(&h0);
        debug_assert_eq!(one.coeffs(), &[1]);
        let (g, h) = hensel_lift(&cur, &g0, &h0, &s, &t, steps);
        lifted.push(h);
        cur = g;
    }

    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut rest = sf.clone();
    for k in 1..=d_max {
        loop {
            let degs: Vec<usize> = remaining.iter().map(|&i| lifted[i].len() - 1).collect();
            let mut found = None;
            for sub in subsets_with_degree(&degs, k) {
                let prod = sub.iter().fold(vec![BigInt::one()], |acc, &j| {
                    zm_mul(&acc, &lifted[remaining[j]], &modulus)
                });
                let coeffs: Option<Vec<Q>> = (0..=k)
                    .map(|i| {
                        let c = prod.get(i).cloned().unwrap_or_default();
                        rational_reconstruct(&c, &modulus, &n_bound, &d_bound)
                            .or_else(|| c.is_zero().then(Q::default))
                    })
                    .collect();
                let Some(coeffs) = coeffs else { continue };
                let cand = Poly::new(coeffs);
                if let Some(quot) = rest.exact_div(&cand) {
                    found = Some((sub, cand, quot));
                    break;
                }
            }
            match found {
                Some((sub, cand, quot)) => {
                    let drop: Vec<usize> = sub.iter().map(|&j| remaining[j]).collect();
                    remaining.retain(|i| !drop.contains(i));
                    rest = quot;
                    out.push(cand);
                }
                None => break,
            }
        }
    }
    out.sort_by(|a, b| a.deg().cmp(&b.deg()).then_with(|| a.coeffs().cmp(b.coeffs())));
    Ok(out)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Splitting pattern of f mod p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitFingerprint {
    pub prime: u64,
    pub degree_multiset: Vec<usize>,
    pub ramified: bool,
}

impl SplitFingerprint {
    /// Order of Frobenius in the Galois group of the splitting field.
    pub fn frobenius_order(&self) -> usize {
        self.degree_multiset
            .iter()
            .fold(1, |acc, &d| num_integer::lcm(acc, d))
    }
}

pub fn factor_fingerprint_mod_p(f: &Poly<Q>, p: u64) -> Result<SplitFingerprint> {
    if !is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if f.deg() == 0 {
        return Err(Error::invalid("constant polynomial"));
    }
    let denom_hit = PolyFp::from_q(f, p).is_none();
    let fi = f.primitive_integer();
    let fp = PolyFp::new(p, fi.iter().map(|c| reduce_big(c, p)).collect());
    let lc_hit = fp.deg() < f.deg();
    let sq = fp.is_squarefree();
    let ramified = denom_hit || lc_hit || !sq;
    let degree_multiset = if fp.deg() == 0 {
        Vec::new()
    } else if sq {
        fp.monic().degree_multiset()
    } else {
        let d = fp.derivative();
        if d.is_zero() {
            Vec::new()
        } else {
            let g = fp.gcd(&d);
            fp.divrem(&g).0.monic().degree_multiset()
        }
    };
    Ok(SplitFingerprint {
        prime: p,
        degree_multiset,
        ramified,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldCertificate {
    pub prime: u64,
    pub f_degrees: Vec<usize>,
    pub g_degrees: Vec<usize>,
}

/// Monte-Carlo comparison of splitting fields. "consistent" is evidence only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SameFieldVerdict {
    pub verdict: String,
    pub consistent: bool,
    pub sample_size: usize,
    pub certificate: Option<FieldCertificate>,
    pub skipped: Vec<u64>,
}

/// Compares the order of Frobenius in both splitting fields at every prime up
/// to `p_bound` where both polynomials are unramified. Equal splitting fields
/// force equal orders; a mismatch is a proof that the fields differ.
pub fn same_splitting_field_mc(f: &Poly<Q>, g: &Poly<Q>, p_bound: u64) -> Result<SameFieldVerdict> {
    if f.deg() == 0 || g.deg() == 0 {
        return Err(Error::invalid("constant polynomial"));
    }
    let (f, g) = (f.squarefree_part(), g.squarefree_part());
    let primes = primes_up_to(p_bound);
    let fps: Vec<(SplitFingerprint, SplitFingerprint)> = primes
        .par_iter()
        .map(|&p| Ok((factor_fingerprint_mod_p(&f, p)?, factor_fingerprint_mod_p(&g, p)?)))
        .collect::<Result<_>>()?;
    let mut skipped = Vec::new();
    let mut sample_size = 0;
    for (a, b) in fps {
        if a.ramified || b.ramified {
            skipped.push(a.prime);
            continue;
        }
        sample_size += 1;
        if a.frobenius_order() != b.frobenius_order() {
            return Ok(SameFieldVerdict {
                verdict: "refuted".into(),
                consistent: false,
                sample_size,
                certificate: Some(FieldCertificate {
                    prime: a.prime,
                    f_degrees: a.degree_multiset,
                    g_degrees: b.degree_multiset,
                }),
                skipped,
            });
        }
    }
    Ok(SameFieldVerdict {
        verdict: "consistent".into(),
        consistent: true,
        sample_size,
        certificate: None,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqcurves::CurveQ;
    use crate::field::{q, qi};

    fn p(c: &[i64]) -> Poly<Q> {
        Poly::from_ints(c)
    }

    #[test]
    fn psi3_of_x3p1() {
        let e = CurveQ::from_ints([0, 0, 0, 0, 1], "").unwrap();
        assert_eq!(division_polynomial(&e, 3).unwrap(), p(&[0, 12, 0, 0, 3]));
        assert_eq!(division_polynomial(&e, 2).unwrap(), p(&[4, 0, 0, 4]));
        assert!(division_polynomial(&e, 13).is_err());
        assert!(division_polynomial(&e, 0).is_err());
    }

    #[test]
    fn degrees() {
        let e = CurveQ::from_ints([1, 0, 1, -126, -552], "").unwrap();
        for m in 1..=9u32 {
            let d = division_polynomial(&e, m).unwrap().deg() as u32;
            let want = if m % 2 == 1 { (m * m - 1) / 2 } else { (m * m + 2) / 2 };
            assert_eq!(d, want, "m = {m}");
        }
    }

    #[test]
    fn discriminants() {
        let (d, c) = discriminant_with_class(&p(&[-1, -2, 1, 1])).unwrap();
        assert_eq!(d, qi(49));
        assert!(c.is_one());
        let (d, c) = discriminant_with_class(&p(&[-5, 0, 1])).unwrap();
        assert_eq!(d, qi(20));
        assert_eq!(c, BigInt::from(5));
        assert!(poly_discriminant(&p(&[1, 1])).is_err());
    }

    #[test]
    fn rational_factors() {
        let f = &(&p(&[-2, 0, 1]) * &p(&[1, 0, 1])) * &p(&[1, 1, 0, 1]);
        let fs = small_rational_factors(&f, 2).unwrap();
        assert_eq!(fs, vec![p(&[-2, 0, 1]), p(&[1, 0, 1])]);
        let g = &(&p(&[3, 2]) * &p(&[1, 0, 5])) * &p(&[-7, 1, 0, 3]);
        let fs = small_rational_factors(&g, 3).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(fs[0], Poly::new(vec![q(3, 2), qi(1)]));
        assert_eq!(small_rational_factors(&p(&[1, 0, 1]), 2).unwrap(), vec![p(&[1, 0, 1])]);
        assert!(small_rational_factors(&p(&[1, 0, 1, 0, 1]), 1).unwrap().is_empty());
    }

    #[test]
    fn fingerprints() {
        let f = p(&[-1, -2, 1, 1]);
        assert_eq!(factor_fingerprint_mod_p(&f, 13).unwrap().degree_multiset, vec![1, 1, 1]);
        assert_eq!(factor_fingerprint_mod_p(&f, 2).unwrap().degree_multiset, vec![3]);
        assert!(factor_fingerprint_mod_p(&f, 7).unwrap().ramified);
        assert_eq!(factor_fingerprint_mod_p(&p(&[-1, 0, 1]), 3).unwrap().degree_multiset, vec![1, 1]);
    }

    #[test]
    fn same_field() {
        let v = same_splitting_field_mc(&p(&[-2, 0, 1]), &p(&[-3, 0, 1]), 100).unwrap();
        assert!(!v.consistent);
        let c = v.certificate.unwrap();
        assert_eq!((c.prime, c.f_degrees, c.g_degrees), (7, vec![1, 1], vec![2]));
        // x^3 - 3x + 1 and its reversal cut out the same cyclic cubic field
        let v = same_splitting_field_mc(&p(&[1, -3, 0, 1]), &p(&[1, 0, -3, 1]), 2000).unwrap();
        assert!(v.consistent);
        assert_eq!(v.skipped, vec![3]);
        // x^3 + 20x^2 - 23x + 1 has discriminant 469^2 and a different field
        let v = same_splitting_field_mc(&p(&[1, -3, 0, 1]), &p(&[1, -23, 20, 1]), 2000).unwrap();
        assert!(!v.consistent);
    }
}
