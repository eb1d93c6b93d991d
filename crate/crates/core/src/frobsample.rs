//! Point counting over F_p, Frobenius signatures mod n, and sampling checks
//! of candidate mod-n images.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, factor_bigint, gcd_u64, inv_mod, mul_mod, primes_up_to, reduce_rational};
use crate::eqcurves::CurveQ;
use crate::error::{Error, Result};
use crate::modmat::FiniteMatrixGroup;
use crate::polyfp::PolyFp;
use crate::qpoly::division_polynomial;

pub const DEFAULT_MAX_PRIME: u64 = 100_000;
pub const DEFAULT_COVERAGE: f64 = 0.99;

/// a1..a6 reduced mod p; `None` on bad reduction of this model.
fn reduce_model(e: &CurveQ, p: u64) -> Option<[u64; 5]> {
    let mut out = [0u64; 5];
    for (i, c) in e.a_invariants().iter().enumerate() {
        out[i] = reduce_rational(c, p)?;
    }
    let delta = reduce_rational(&e.discriminant(), p)?;
    (delta != 0).then_some(out)
}

fn check_prime(e: &CurveQ, p: u64, max_p: u64) -> Result<[u64; 5]> {
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if p > max_p {
        return Err(Error::budget(format!("prime {p} exceeds the counting limit {max_p}")));
    }
    reduce_model(e, p).ok_or_else(|| Error::invalid(format!("{} has bad reduction at {p}", e.label())))
}

/// Affine points of the reduction, by brute force (used only for p = 2).
fn points_brute(a: &[u64; 5], p: u64) -> Vec<(u64, u64)> {
    let [a1, a2, a3, a4, a6] = *a;
    let mut pts = Vec::new();
    for x in 0..p {
        for y in 0..p {
            let lhs = (y * y + a1 * x * y + a3 * y) % p;
            let rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p;
            if lhs == rhs {
                pts.push((x, y));
            }
        }
    }
    pts
}

/// `4x^3 + b2 x^2 + 2 b4 x + b6` mod p, ascending.
fn two_div_cubic(a: &[u64; 5], p: u64) -> [u64; 4] {
    let [a1, a2, a3, a4, a6] = *a;
    let b2 = (mul_mod(a1, a1, p) + 4 * a2) % p;
    let b4 = (2 * a4 + mul_mod(a1, a3, p)) % p;
    let b6 = (mul_mod(a3, a3, p) + 4 * a6) % p;
    [b6, 2 * b4 % p, b2, 4 % p]
}

/// #E(F_p), including the point at infinity.
pub fn count_points(e: &CurveQ, p: u64) -> Result<u64> {
    count_points_with_limit(e, p, DEFAULT_MAX_PRIME)
}

pub fn count_points_with_limit(e: &CurveQ, p: u64, max_p: u64) -> Result<u64> {
    let a = check_prime(e, p, max_p)?;
    let n = count_reduced(&a, p);
    let ap = p as i64 + 1 - n as i64;
    if (ap * ap) as u64 > 4 * p {
        return Err(Error::structural(format!("Hasse bound violated at p = {p}: a_p = {ap}")));
    }
    Ok(n)
}

fn count_reduced(a: &[u64; 5], p: u64) -> u64 {
    if p == 2 {
        return points_brute(a, p).len() as u64 + 1;
    }
    let mut is_sq = vec![false; p as usize];
    for y in 1..p {
        is_sq[mul_mod(y, y, p) as usize] = true;
    }
    let f = two_div_cubic(a, p);
    let mut count = 1u64;
    for x in 0..p {
        let v = (((f[3] * x % p + f[2]) % p * x % p + f[1]) % p * x % p + f[0]) % p;
        count += if v == 0 {
            1
        } else if is_sq[v as usize] {
            2
        } else {
            0
        };
    }
    count
}

/// Invariant factors [d1, d2] (d1 | d2) of E(F_p)[m] for each m | n.
pub type FixProfile = BTreeMap<u32, [u32; 2]>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusSignature {
    pub prime: u64,
    pub a_p: i64,
    pub trace_mod_n: u32,
    pub det_mod_n: u32,
    pub fix_profile: FixProfile,
}

/// From the sizes of the k-torsion for all k | m, recover Z/d1 x Z/d2.
fn factors_from_counts(m: u32, count: impl Fn(u32) -> u64) -> Result<[u32; 2]> {
    let c = count(m);
    let d1 = divisors(m as u64)
        .into_iter()
        .filter(|&k| count(k as u32) == k * k)
        .max()
        .unwrap_or(1) as u32;
    if c % d1 as u64 != 0 {
        return Err(Error::structural("torsion count is not compatible with rank two"));
    }
    let d2 = (c / d1 as u64) as u32;
    if d2 % d1 != 0 || m % d2 != 0 {
        return Err(Error::structural(format!("torsion of size {c} in (Z/{m})^2 is not of the form Z/d1 x Z/d2")));
    }
    Ok([d1, d2])
}

/// Per-prime data needed for the fixed-point profile: ψ_m over Q for m | n.
struct DivisionData {
    n: u32,
    psi: BTreeMap<u32, crate::poly::Poly<crate::field::Q>>,
}

impl DivisionData {
    fn new(e: &CurveQ, n: u32) -> Result<Self> {
        let mut psi = BTreeMap::new();
        for m in divisors(n as u64) {
            if m > 1 {
                psi.insert(m as u32, division_polynomial(e, m as u32)?);
            }
        }
        Ok(DivisionData { n, psi })
    }

    /// #E(F_p)[m] from the F_p-roots of ψ_m and the quadratic character of F(x).
    fn torsion_count(&self, a: &[u64; 5], p: u64, m: u32) -> Result<u64> {
        if m == 1 {
            return Ok(1);
        }
        let psi = PolyFp::from_q(&self.psi[&m], p)
            .ok_or_else(|| Error::structural("division polynomial has a denominator divisible by p"))?;
        if psi.is_zero() {
            return Err(Error::structural("division polynomial vanishes mod p"));
        }
        let x = PolyFp::new(p, vec![0, 1]);
        let xp = x.powmod(&BigUint::from(p), &psi);
        let r = psi.gcd(&xp.sub(&x));
        if r.deg() == 0 {
            return Ok(1);
        }
        let f = PolyFp::new(p, two_div_cubic(a, p).to_vec());
        let z = r.gcd(&f);
        let rest = r.divrem(&z).0;
        let sq = if rest.deg() == 0 {
            0
        } else {
            let s = f.powmod(&BigUint::from((p - 1) / 2), &rest);
            rest.gcd(&s.sub(&PolyFp::new(p, vec![1]))).deg() as u64
        };
        Ok(1 + z.deg() as u64 + 2 * sq)
    }

    fn profile(&self, a: &[u64; 5], p: u64) -> Result<FixProfile> {
        let mut counts = BTreeMap::new();
        for k in divisors(self.n as u64) {
            counts.insert(k as u32, self.torsion_count(a, p, k as u32)?);
        }
        profile_from_counts(self.n, &counts)
    }
}

fn profile_from_counts(n: u32, counts: &BTreeMap<u32, u64>) -> Result<FixProfile> {
    let mut out = FixProfile::new();
    for m in divisors(n as u64) {
        let m = m as u32;
        out.insert(m, factors_from_counts(m, |k| counts[&k])?);
    }
    Ok(out)
}

/// Brute-force profile at p = 2 via affine point arithmetic.
fn profile_brute(a: &[u64; 5], p: u64, n: u32) -> Result<FixProfile> {
    let pts = points_brute(a, p);
    let mut counts = BTreeMap::new();
    for k in divisors(n as u64) {
        let c = 1 + pts.iter().filter(|&&pt| mul_point(a, p, Some(pt), k).is_none()).count() as u64;
        counts.insert(k as u32, c);
    }
    profile_from_counts(n, &counts)
}

type Pt = Option<(u64, u64)>;

fn add_point(a: &[u64; 5], p: u64, u: Pt, v: Pt) -> Pt {
    let [a1, a2, a3, a4, _] = *a;
    let (Some((x1, y1)), Some((x2, y2))) = (u, v) else {
        return u.or(v);
    };
    let sub = |x: u64, y: u64| (x + p - y % p) % p;
    let neg_y2 = sub(sub(p - y2 % p, mul_mod(a1, x2, p)), a3);
    if x1 == x2 && y1 == neg_y2 {
        return None;
    }
    let lam = if x1 == x2 {
        let num = (3 * mul_mod(x1, x1, p) + 2 * mul_mod(a2, x1, p) + a4 + p - mul_mod(a1, y1, p)) % p;
        let den = (2 * y1 + mul_mod(a1, x1, p) + a3) % p;
        mul_mod(num, inv_mod(den, p)?, p)
    } else {
        mul_mod(sub(y2, y1), inv_mod(sub(x2, x1), p)?, p)
    };
    let x3 = sub(sub(sub((mul_mod(lam, lam, p) + mul_mod(a1, lam, p)) % p, a2), x1), x2);
    let y3 = sub(sub(sub(mul_mod(lam, sub(x1, x3), p), y1), mul_mod(a1, x3, p)), a3);
    Some((x3, y3))
}

fn mul_point(a: &[u64; 5], p: u64, pt: Pt, k: u64) -> Pt {
    let mut acc = None;
    for _ in 0..k {
        acc = add_point(a, p, acc, pt);
    }
    acc
}

/// Frobenius data at p for the level n: a_p, p, and the F_p-rational m-torsion for m | n.
pub fn frob_signature(e: &CurveQ, p: u64, n: u32) -> Result<FrobeniusSignature> {
    let data = DivisionData::new(e, n)?;
    frob_signature_with(e, &data, p)
}

fn frob_signature_with(e: &CurveQ, data: &DivisionData, p: u64) -> Result<FrobeniusSignature> {
    let n = data.n;
    if n == 0 || gcd_u64(p, n as u64) != 1 {
        return Err(Error::invalid(format!("p = {p} must be coprime to n = {n}")));
    }
    let a = check_prime(e, p, DEFAULT_MAX_PRIME)?;
    let count = count_reduced(&a, p);
    let a_p = p as i64 + 1 - count as i64;
    let fix_profile = if gcd_u64(count, n as u64) == 1 {
        divisors(n as u64).into_iter().map(|m| (m as u32, [1, 1])).collect()
    } else if p == 2 {
        profile_brute(&a, p, n)?
    } else {
        data.profile(&a, p)?
    };
    let top = fix_profile[&n];
    if count % (top[0] as u64 * top[1] as u64) != 0 {
        return Err(Error::structural("torsion subgroup order does not divide #E(F_p)"));
    }
    Ok(FrobeniusSignature {
        prime: p,
        a_p,
        trace_mod_n: a_p.rem_euclid(n as i64) as u32,
        det_mod_n: (p % n as u64) as u32,
        fix_profile,
    })
}

/// A conjugation-invariant class key: (trace, det, fixed-space profile).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SignatureKey {
    pub trace: u32,
    pub det: u32,
    pub fix_profile: Vec<(u32, [u32; 2])>,
}

impl FrobeniusSignature {
    pub fn key(&self) -> SignatureKey {
        SignatureKey {
            trace: self.trace_mod_n,
            det: self.det_mod_n,
            fix_profile: self.fix_profile.iter().map(|(&m, &f)| (m, f)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignatureClass {
    pub key: SignatureKey,
    pub count: usize,
    pub frequency: f64,
}

/// Kernel of h − I on (Z/m)^2, counted by brute force.
fn fixed_count(h: [u32; 4], m: u32) -> u64 {
    let [a, b, c, d] = h.map(|x| x % m);
    let mut n = 0;
    for x in 0..m {
        for y in 0..m {
            let u = (a * x + b * y + m - x % m) % m;
            let v = (c * x + d * y + m - y % m) % m;
            if u == 0 && v == 0 {
                n += 1;
            }
        }
    }
    n
}

pub fn matrix_key(h: [u32; 4], n: u32) -> Result<SignatureKey> {
    let mut counts = BTreeMap::new();
    for k in divisors(n as u64) {
        counts.insert(k as u32, fixed_count(h, k as u32));
    }
    let prof = profile_from_counts(n, &counts)?;
    let [a, b, c, d] = h;
    Ok(SignatureKey {
        trace: (a + d) % n,
        det: ((a as u64 * d as u64 + (n as u64 - (b as u64 * c as u64) % n as u64)) % n as u64) as u32,
        fix_profile: prof.into_iter().collect(),
    })
}

/// Signature classes of all elements of H with their frequencies.
pub fn subgroup_signature_profile(h: &FiniteMatrixGroup) -> Result<Vec<SignatureClass>> {
    let n = h.level();
    let keys: Vec<SignatureKey> = h
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|m| matrix_key(m.entries(), n))
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<SignatureKey, usize> = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    let total = h.order() as f64;
    Ok(counts
        .into_iter()
        .map(|(key, count)| SignatureClass {
            key,
            count,
            frequency: count as f64 / total,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImageVerdict {
    pub level: u32,
    pub candidate_order: usize,
    pub p_bound: u64,
    pub primes_used: usize,
    pub containment_violations: Vec<FrobeniusSignature>,
    pub observed_classes: usize,
    pub candidate_classes: usize,
    pub coverage: f64,
    pub verdict: String,
    pub warnings: Vec<String>,
}

/// Primes excluded from sampling: divisors of 6·n·num(Δ)·den(Δ).
pub fn excluded_primes(e: &CurveQ, n: u32) -> Result<BTreeSet<u64>> {
    let d = e.discriminant();
    let mut out: BTreeSet<u64> = [2u64, 3].into_iter().collect();
    out.extend(crate::arith::factor_u64(n as u64).into_iter().map(|(p, _)| p));
    for part in [d.numer().clone(), d.denom().clone()] {
        for (p, _) in factor_bigint(&part)? {
            if let Ok(p) = u64::try_from(&p) {
                out.insert(p);
            }
        }
    }
    Ok(out)
}

/// Check every sampled Frobenius class against the classes of H.
pub fn verify_image(e: &CurveQ, h: &FiniteMatrixGroup, p_bound: u64) -> Result<ImageVerdict> {
    verify_image_with_threshold(e, h, p_bound, DEFAULT_COVERAGE)
}

pub fn verify_image_with_threshold(
    e: &CurveQ,
    h: &FiniteMatrixGroup,
    p_bound: u64,
    threshold: f64,
) -> Result<ImageVerdict> {
    if p_bound < 100 {
        return Err(Error::invalid("p_bound must be at least 100"));
    }
    if p_bound > DEFAULT_MAX_PRIME {
        return Err(Error::budget(format!("p_bound {p_bound} exceeds {DEFAULT_MAX_PRIME}")));
    }
    let n = h.level();
    let mut warnings = Vec::new();
    if !h.det_image().1 {
        warnings.push("candidate does not have full determinant image".to_string());
    }
    let profile = subgroup_signature_profile(h)?;
    let classes: BTreeSet<SignatureKey> = profile.iter().map(|c| c.key.clone()).collect();
    let bad = excluded_primes(e, n)?;
    let data = DivisionData::new(e, n)?;
    let primes: Vec<u64> = primes_up_to(p_bound).into_iter().filter(|p| !bad.contains(p)).collect();
    let sigs: Vec<FrobeniusSignature> = primes
        .par_iter()
        .map(|&p| frob_signature_with(e, &data, p))
        .collect::<Result<_>>()?;
    let mut seen = BTreeSet::new();
    let mut violations = Vec::new();
    for s in sigs {
        let k = s.key();
        if classes.contains(&k) {
            seen.insert(k);
        } else {
            violations.push(s);
        }
    }
    let coverage = seen.len() as f64 / classes.len() as f64;
    let verdict = if !violations.is_empty() {
        "inconsistent"
    } else if coverage >= threshold {
        "consistent"
    } else {
        "inconclusive"
    };
    Ok(ImageVerdict {
        level: n,
        candidate_order: h.order(),
        p_bound,
        primes_used: primes.len(),
        containment_violations: violations,
        observed_classes: seen.len(),
        candidate_classes: classes.len(),
        coverage,
        verdict: verdict.into(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn counts() {
        let e = fixtures::curve("x3p1").unwrap();
        assert_eq!(count_points(&e, 5).unwrap(), 6);
        assert_eq!(count_points(&e, 7).unwrap(), 12);
        let e50 = fixtures::curve("50.a1").unwrap();
        assert!(count_points(&e50, 2).is_err());
        assert!(count_points(&e50, 5).is_err());
        for p in [3u64, 7, 11, 13, 101] {
            let a = reduce_model(&e50, p).unwrap();
            assert_eq!(count_points(&e50, p).unwrap(), points_brute(&a, p).len() as u64 + 1);
        }
    }

    #[test]
    fn brute_and_root_counts_agree() {
        let e = fixtures::curve("E1").unwrap();
        let data = DivisionData::new(&e, 8).unwrap();
        for p in [5u64, 7, 11, 13, 17, 41, 73, 89, 97] {
            let a = reduce_model(&e, p).unwrap();
            let fast = data.profile(&a, p).unwrap();
            let slow = profile_brute(&a, p, 8).unwrap();
            assert_eq!(fast, slow, "p = {p}");
        }
    }

    #[test]
    fn signatures() {
        let e = fixtures::curve("x3p1").unwrap();
        let s = frob_signature(&e, 5, 3).unwrap();
        assert_eq!((s.a_p, s.trace_mod_n, s.det_mod_n), (0, 0, 2));
        assert_eq!(s.fix_profile[&3], [1, 3]);
        assert_eq!(s.fix_profile[&1], [1, 1]);
        assert!(frob_signature(&e, 3, 3).is_err());
    }

    #[test]
    fn identity_and_gl2_profiles() {
        let id = FiniteMatrixGroup::trivial(4).unwrap();
        let p = subgroup_signature_profile(&id).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].key.trace, 2);
        assert_eq!(p[0].key.fix_profile.last().unwrap().1, [4, 4]);
        let g = FiniteMatrixGroup::gl2(2).unwrap();
        assert_eq!(subgroup_signature_profile(&g).unwrap().len(), 3);
    }
}
