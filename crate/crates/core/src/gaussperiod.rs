//! Gauss period polynomials for the degree-(ℓ−1)/2 subfield of Q(ζ_ℓ) and a
//! family of traceless companion-matrix deformations with the same splitting field.

use num_bigint::BigInt;
use num_integer::binomial;
use serde::Serialize;

use crate::arith::{is_prime_u64, is_rational_square, primes_up_to};
use crate::error::{Error, Result};
use crate::field::{qi, Field, Q};
use crate::poly::Poly;
use crate::qpoly::{factor_fingerprint_mod_p, same_splitting_field_mc, SameFieldVerdict};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodPolynomial {
    pub ell: u64,
    pub e: usize,
    /// a_0..a_e; the polynomial is Σ a_r x^(e−r).
    pub coefficients: Vec<i64>,
    #[serde(skip)]
    pub poly: Poly<Q>,
}

/// a_r = (−1)^⌊r/2⌋ · C((ℓ−1)/2 − ⌊(r+1)/2⌋, ⌊r/2⌋).
pub fn period_coefficient(ell: u64, r: usize) -> i64 {
    let h = (ell as i64 - 1) / 2;
    let top = h - ((r as i64 + 1) / 2);
    let k = r as i64 / 2;
    let c = if top < k || top < 0 { 0 } else { binomial(top, k) };
    if k % 2 == 0 {
        c
    } else {
        -c
    }
}

pub fn period_polynomial(ell: u64) -> Result<PeriodPolynomial> {
    if !is_prime_u64(ell) {
        return Err(Error::invalid(format!("{ell} is not prime")));
    }
    if ell % 4 != 3 || ell == 3 {
        return Err(Error::invalid(format!(
            "ℓ = {ell} must satisfy ℓ − 1 = 2e with e odd and e > 1"
        )));
    }
    let e = ((ell - 1) / 2) as usize;
    let coefficients: Vec<i64> = (0..=e).map(|r| period_coefficient(ell, r)).collect();
    let poly = Poly::new(coefficients.iter().rev().map(|&a| qi(a)).collect());
    let disc = poly.discriminant();
    if Field::is_zero(&disc) || !is_rational_square(&disc) {
        return Err(Error::structural(format!("discriminant of the period polynomial at {ell} is not a nonzero square")));
    }
    // complete splitting at the first few primes ≡ ±1 mod ℓ
    for p in primes_up_to(50 * ell).into_iter().filter(|p| p % ell == 1 || p % ell == ell - 1).take(4) {
        let fp = factor_fingerprint_mod_p(&poly, p)?;
        if fp.degree_multiset.iter().any(|&d| d != 1) {
            return Err(Error::structural(format!("period polynomial does not split at p = {p}")));
        }
    }
    Ok(PeriodPolynomial {
        ell,
        e,
        coefficients,
        poly,
    })
}

type Mat = Vec<Vec<Q>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Q::default(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| qi((i == j) as i64)).collect()).collect()
}

fn trace(a: &Mat) -> Q {
    (0..a.len()).fold(Q::default(), |acc, i| acc + &a[i][i])
}

/// Companion matrix of a monic polynomial.
pub fn companion(f: &Poly<Q>) -> Mat {
    let n = f.deg();
    let mut m = vec![vec![Q::default(); n]; n];
    for i in 1..n {
        m[i][i - 1] = qi(1);
    }
    for i in 0..n {
        m[i][n - 1] = -f.coeff(i);
    }
    m
}

/// det(xI − A) by Faddeev–LeVerrier.
pub fn charpoly(a: &Mat) -> Poly<Q> {
    let n = a.len();
    let mut c = vec![Q::default(); n + 1];
    c[n] = qi(1);
    let mut m = vec![vec![Q::default(); n]; n];
    for k in 1..=n {
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        m = next;
        c[n - k] = -trace(&mat_mul(a, &m)) / qi(k as i64);
    }
    Poly::new(c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompanionFamilyMember {
    pub e: usize,
    pub b: Vec<String>,
    /// k_j = tr(α_1^j)/e.
    pub shifts: Vec<String>,
    pub member_poly: Vec<String>,
    pub discriminant: String,
    pub on_discriminant_locus: bool,
    #[serde(skip)]
    pub member: Poly<Q>,
    #[serde(skip)]
    pub alphas: Vec<Vec<Vec<Q>>>,
}

/// det(xI − Σ b_j α_j) with α_j = α_1^j − (tr α_1^j / e) I and α_1 the companion of f.
pub fn companion_family(f: &Poly<Q>, b: &[Q]) -> Result<CompanionFamilyMember> {
    let e = f.deg();
    if f.is_zero() || e % 2 == 0 {
        return Err(Error::invalid("base polynomial must have odd degree"));
    }
    if !f.lead().is_some_and(|l| l.is_one()) {
        return Err(Error::invalid("base polynomial must be monic"));
    }
    if Field::is_zero(&f.discriminant()) {
        return Err(Error::invalid("base polynomial must be squarefree"));
    }
    if b.len() != e {
        return Err(Error::invalid(format!("expected {e} coefficients b_1..b_e, got {}", b.len())));
    }
    if b.iter().all(Field::is_zero) {
        return Err(Error::invalid("b must not be identically zero"));
    }
    let a1 = companion(f);
    let id = identity(e);
    let mut power = id.clone();
    let mut alphas = Vec::with_capacity(e);
    let mut shifts = Vec::with_capacity(e);
    let mut sum = vec![vec![Q::default(); e]; e];
    for bj in b {
        power = mat_mul(&power, &a1);
        let k = trace(&power) / qi(e as i64);
        let mut alpha = power.clone();
        for (i, row) in alpha.iter_mut().enumerate() {
            row[i] -= &k;
        }
        if !Field::is_zero(&trace(&alpha)) {
            return Err(Error::structural("α_j is not traceless"));
        }
        for i in 0..e {
            for j in 0..e {
                sum[i][j] += bj * &alpha[i][j];
            }
        }
        shifts.push(k);
        alphas.push(alpha);
    }
    let member = charpoly(&sum);
    if !Field::is_zero(&member.coeff(e - 1)) {
        return Err(Error::structural("member polynomial has a nonzero x^(e-1) coefficient"));
    }
    let disc = member.discriminant();
    Ok(CompanionFamilyMember {
        e,
        b: b.iter().map(|x| x.to_string()).collect(),
        shifts: shifts.iter().map(|x| x.to_string()).collect(),
        member_poly: member.coeffs().iter().map(|x| x.to_string()).collect(),
        discriminant: disc.to_string(),
        on_discriminant_locus: Field::is_zero(&disc),
        member,
        alphas,
    })
}

/// Same 2-division field of y² = f and y² = g, via splitting-field fingerprints.
pub fn two_torsion_match(f: &Poly<Q>, g: &Poly<Q>, p_bound: u64) -> Result<SameFieldVerdict> {
    for h in [f, g] {
        if h.deg() < 1 || Field::is_zero(&h.discriminant()) {
            return Err(Error::invalid("both polynomials must be squarefree of positive degree"));
        }
    }
    same_splitting_field_mc(f, g, p_bound)
}

/// Integer coefficients of the period polynomial, ascending, for display.
pub fn ascending_integers(pp: &PeriodPolynomial) -> Vec<BigInt> {
    pp.poly.coeffs().iter().map(|c| c.to_integer()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven() {
        let f = period_polynomial(7).unwrap();
        assert_eq!(f.coefficients, vec![1, 1, -2, -1]);
        assert_eq!(f.poly, Poly::from_ints(&[-1, -2, 1, 1]));
        assert_eq!(f.poly.discriminant(), qi(49));
        let f11 = period_polynomial(11).unwrap();
        assert_eq!(f11.e, 5);
        assert_eq!(f11.coefficients[1], 1);
        assert!(period_polynomial(9).is_err());
        assert!(period_polynomial(13).is_err());
    }

    #[test]
    fn shift_member() {
        let f = period_polynomial(7).unwrap().poly;
        let m = companion_family(&f, &[qi(1), qi(0), qi(0)]).unwrap();
        // k_1 = tr(α_1)/3 = -1/3
        let shifted = f.compose(&Poly::new(vec![crate::field::q(-1, 3), qi(1)]));
        assert_eq!(m.member, shifted);
        assert!(companion_family(&f, &[qi(0), qi(0), qi(0)]).is_err());
        let m = companion_family(&f, &[qi(1), qi(1), qi(0)]).unwrap();
        assert!(!m.on_discriminant_locus);
        assert!(two_torsion_match(&f, &m.member, 1000).unwrap().consistent);
    }

    #[test]
    fn charpoly_of_companion() {
        let f = Poly::from_ints(&[5, -3, 0, 2, 1]);
        assert_eq!(charpoly(&companion(&f)), f);
    }
}
