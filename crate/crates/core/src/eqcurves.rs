//! Elliptic curves in long Weierstrass form over Q or Q(t): invariants,
//! twists, the universal curve, named families and the C_d conic.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::arith::{is_rational_square, quad_conductor, rational_square_class};
use crate::error::{Error, Result};
use crate::field::{q, qi, Field, Q};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over a field `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve<F> {
    a: [F; 5],
    label: String,
}

pub type CurveQ = Curve<Q>;
pub type CurveQt = Curve<RatFunc>;

impl<F: Field> Curve<F> {
    /// Coefficients in the order a1, a2, a3, a4, a6. Fails on a singular model.
    pub fn new(a: [F; 5], label: impl Into<String>) -> Result<Self> {
        let c = Curve {
            a,
            label: label.into(),
        };
        if c.discriminant().is_zero() {
            return Err(Error::invalid(format!("singular model: {}", c.label)));
        }
        Ok(c)
    }

    pub fn a_invariants(&self) -> &[F; 5] {
        &self.a
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn b2(&self) -> F {
        let [a1, a2, ..] = &self.a;
        a1.mul(a1).add(&F::from_i64(4).mul(a2))
    }

    pub fn b4(&self) -> F {
        let [a1, _, a3, a4, _] = &self.a;
        F::from_i64(2).mul(a4).add(&a1.mul(a3))
    }

    pub fn b6(&self) -> F {
        let [_, _, a3, _, a6] = &self.a;
        a3.mul(a3).add(&F::from_i64(4).mul(a6))
    }

    pub fn b8(&self) -> F {
        let [a1, a2, a3, a4, a6] = &self.a;
        let t1 = a1.mul(a1).mul(a6);
        let t2 = F::from_i64(4).mul(a2).mul(a6);
        let t3 = a1.mul(a3).mul(a4);
        let t4 = a2.mul(a3).mul(a3);
        let t5 = a4.mul(a4);
        t1.add(&t2).sub(&t3).add(&t4).sub(&t5)
    }

    pub fn c4(&self) -> F {
        let b2 = self.b2();
        b2.mul(&b2).sub(&F::from_i64(24).mul(&self.b4()))
    }

    pub fn c6(&self) -> F {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        b2.mul(&b2)
            .mul(&b2)
            .neg()
            .add(&F::from_i64(36).mul(&b2).mul(&b4))
            .sub(&F::from_i64(216).mul(&b6))
    }

    pub fn discriminant(&self) -> F {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        let t1 = b2.mul(&b2).mul(&b8);
        let t2 = F::from_i64(8).mul(&b4.pow(3));
        let t3 = F::from_i64(27).mul(&b6.mul(&b6));
        let t4 = F::from_i64(9).mul(&b2).mul(&b4).mul(&b6);
        t1.neg().sub(&t2).sub(&t3).add(&t4)
    }

    pub fn j_invariant(&self) -> F {
        self.c4().pow(3).div(&self.discriminant()).expect("nonsingular")
    }

    /// `4x^3 + b2 x^2 + 2 b4 x + b6`, the square of the 2-division polynomial.
    pub fn two_division_cubic(&self) -> Poly<F> {
        Poly::new(vec![
            self.b6(),
            F::from_i64(2).mul(&self.b4()),
            self.b2(),
            F::from_i64(4),
        ])
    }
}

impl Curve<Q> {
    pub fn from_ints(a: [i64; 5], label: impl Into<String>) -> Result<Self> {
        Self::new(a.map(qi), label)
    }

    /// Whether the model has integer coefficients.
    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.is_integer())
    }

    /// Square class of the discriminant as a square-free integer.
    pub fn discriminant_square_class(&self) -> Result<BigInt> {
        rational_square_class(&self.discriminant())
    }
}

impl Curve<RatFunc> {
    /// Constant curve over Q(t).
    pub fn from_q(c: &CurveQ) -> Self {
        Curve {
            a: c.a.clone().map(|x| RatFunc::from_q(&x)),
            label: c.label.clone(),
        }
    }

    /// Fiber at t = t0. Fails on a pole or a singular fiber.
    pub fn specialize(&self, t0: &Q) -> Result<CurveQ> {
        let mut out: [Q; 5] = std::array::from_fn(|_| <Q as Field>::zero());
        for (i, c) in self.a.iter().enumerate() {
            out[i] = c
                .eval(t0)
                .ok_or_else(|| Error::invalid(format!("t = {t0} is a pole of coefficient a{}", [1, 2, 3, 4, 6][i])))?;
        }
        Curve::new(out, format!("{} at t={t0}", self.label))
            .map_err(|_| Error::invalid(format!("fiber of {} at t = {t0} is singular", self.label)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveInvariants {
    pub j: String,
    pub discriminant: String,
    pub discriminant_square_class: Option<String>,
}

pub fn curve_invariants(e: &CurveQ) -> Result<CurveInvariants> {
    Ok(CurveInvariants {
        j: e.j_invariant().to_string(),
        discriminant: e.discriminant().to_string(),
        discriminant_square_class: Some(e.discriminant_square_class()?.to_string()),
    })
}

/// Twist by a square-free integer d (model `y^2 = x^3 + d b2/4 x^2 + d^2 b4/2 x + d^3 b6/4`).
pub fn quadratic_twist(e: &CurveQ, d: &BigInt) -> Result<CurveQ> {
    if num_traits::Zero::is_zero(d) {
        return Err(Error::invalid("cannot twist by 0"));
    }
    if crate::arith::squarefree_part(d)? != *d {
        return Err(Error::invalid(format!("twist parameter {d} is not square-free")));
    }
    let dq = Q::from_integer(d.clone());
    let a2 = &dq * e.b2() / qi(4);
    let a4 = &dq * &dq * e.b4() / qi(2);
    let a6 = &dq * &dq * &dq * e.b6() / qi(4);
    Curve::new(
        [qi(0), a2, qi(0), a4, a6],
        format!("{} twisted by {d}", e.label),
    )
}

fn is_power(x: &Q, k: u32) -> bool {
    if x.is_negative() && k % 2 == 0 {
        return false;
    }
    let root = |n: &BigInt| {
        let r = n.abs().nth_root(k);
        (r.pow(k) == n.abs()).then_some(r)
    };
    root(x.numer()).is_some() && root(x.denom()).is_some()
}

/// Isomorphism over Q, decided from c4 and c6.
pub fn is_isomorphic(e1: &CurveQ, e2: &CurveQ) -> bool {
    let (c4, c6, d4, d6) = (e1.c4(), e1.c6(), e2.c4(), e2.c6());
    if c4.is_zero() != d4.is_zero() || c6.is_zero() != d6.is_zero() {
        return false;
    }
    match (c4.is_zero(), c6.is_zero()) {
        (true, _) => is_power(&(&d6 / &c6), 6),
        (_, true) => is_power(&(&d4 / &c4), 4),
        _ => {
            // u^2 = (d6/c6) / (d4/c4), then check u^4 = d4/c4.
            let u2 = (&d6 / &c6) / (&d4 / &c4);
            is_rational_square(&u2) && &u2 * &u2 == &d4 / &c4
        }
    }
}

/// `y^2 + xy = x^3 - 36/(j0-1728) x - 1/(j0-1728)`, a curve with j-invariant j0.
pub fn universal_curve(j0: &Q) -> Result<CurveQ> {
    if j0.is_zero() || *j0 == qi(1728) {
        return Err(Error::invalid("universal curve is undefined at j = 0 and j = 1728"));
    }
    let k = (j0 - qi(1728)).recip();
    let c = Curve::new(
        [qi(1), qi(0), qi(0), -qi(36) * &k, -k],
        format!("universal curve j={j0}"),
    )?;
    if c.j_invariant() != *j0 {
        return Err(Error::structural("universal curve has the wrong j-invariant"));
    }
    Ok(c)
}

/// Universal curve over Q(t) for a j-invariant given as a rational function.
pub fn universal_curve_qt(j: &RatFunc, label: &str) -> Result<CurveQt> {
    let k = j.sub(&RatFunc::from_q(&qi(1728))).inv().ok_or_else(|| Error::invalid("j is identically 1728"))?;
    let c = Curve::new(
        [
            RatFunc::one(),
            RatFunc::zero(),
            RatFunc::zero(),
            RatFunc::from_q(&qi(-36)).mul(&k),
            k.neg(),
        ],
        label,
    )?;
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SerreReport {
    /// Square-free representative of the discriminant class, or `None` when Δ is a square.
    pub delta_square_class: Option<String>,
    pub serre_field: Option<String>,
    pub minimal_cyclotomic_level: Option<String>,
    pub witness_level: String,
    pub vertical_flag: bool,
}

/// The quadratic subfield of Q(E[2]) and the cyclotomic levels containing it.
pub fn serre_entanglement(e: &CurveQ) -> Result<SerreReport> {
    let delta = e.discriminant();
    let d = rational_square_class(&delta)?;
    let level: BigInt = (delta.numer() * delta.denom()).abs() * 4;
    if d.is_one() {
        return Ok(SerreReport {
            delta_square_class: None,
            serre_field: None,
            minimal_cyclotomic_level: None,
            witness_level: level.to_string(),
            vertical_flag: true,
        });
    }
    let cond = quad_conductor(&d)?;
    if !num_traits::Zero::is_zero(&(&level % &cond)) {
        return Err(Error::structural("conductor does not divide 4|Δ|"));
    }
    Ok(SerreReport {
        delta_square_class: Some(d.to_string()),
        serre_field: Some(format!("Q(sqrt({d}))")),
        minimal_cyclotomic_level: Some(cond.to_string()),
        witness_level: level.to_string(),
        vertical_flag: false,
    })
}

/// A rational point on `5(x^2 + 22/25 x + 1/5) = d y^2` with d = m^2 + n^2.
///
/// Solves `x + 7/25 = -m y`, `2x + 24/25 = -n y`; when n = 2m that system is
/// degenerate and the roles of m and n are exchanged.
pub fn c_d_point(m: i64, n: i64) -> Result<(Q, Q)> {
    if m == 0 && n == 0 {
        return Err(Error::invalid("m and n are both zero"));
    }
    let (m, n) = if 2 * m - n == 0 { (n, m) } else { (m, n) };
    let den = 2 * m - n;
    let x = q(7 * n - 24 * m, 25 * den);
    let y = q(2, 5 * den);
    let d = qi(m * m + n * n);
    let lhs = qi(5) * (&x * &x + q(22, 25) * &x + q(1, 5));
    if lhs != d * &y * &y {
        return Err(Error::structural("point is not on the conic"));
    }
    Ok((x, y))
}

/// `δ(t) = 5(t^2 + 22/25 t + 1/5)`.
pub fn delta_t() -> Poly<Q> {
    Poly::new(vec![qi(1), q(22, 5), qi(5)])
}


fn rf(p: &[i64]) -> RatFunc {
    RatFunc::from_poly(Poly::from_ints(p))
}

fn rq(c: Q) -> RatFunc {
    RatFunc::from_q(&c)
}

/// Hesse family `y^2 = x^3 - 27t(t^3+8)x + 54(t^6-20t^3-8)`.
pub fn hesse3() -> CurveQt {
    let a4 = rf(&[0, -216, 0, 0, -27]);
    let a6 = rf(&[-432, 0, 0, -1080, 0, 0, 54]);
    Curve::new([RatFunc::zero(), RatFunc::zero(), RatFunc::zero(), a4, a6], "hesse3").unwrap()
}

/// Expected closed form for the j-invariant of the Hesse family, `t^3 (t+2)^3 (t^2-2t+4)^3 / ((t-1)^3 (t^2+t+1)^3)`.
pub fn hesse3_expected_j() -> RatFunc {
    let num = rf(&[0, 1])
        .mul(&rf(&[2, 1]))
        .mul(&rf(&[4, -2, 1]))
        .pow(3);
    let den = rf(&[-1, 1]).mul(&rf(&[1, 1, 1])).pow(3);
    num.div(&den).unwrap()
}

/// Family with L ⊆ Q(ζ_9) as 2-division field.
pub fn rs9() -> CurveQt {
    let a4 = rf(&[-3888, 0, -3888 * 2303]);
    let a6 = rq(qi(-46656)).mul(&rf(&[1, 3, -6909, -2303]));
    Curve::new([RatFunc::zero(), RatFunc::zero(), RatFunc::zero(), a4, a6], "rs9").unwrap()
}

/// `K(t) = (t^2+10t+5)^3 / ((t^2 + 22/25 t + 1/5)(t^2-20t-25)^2)`.
pub fn isog5_k() -> RatFunc {
    let num = rf(&[5, 10, 1]).pow(3);
    let quad = RatFunc::from_poly(Poly::new(vec![q(1, 5), q(22, 25), qi(1)]));
    let den = quad.mul(&rf(&[-25, -20, 1]).pow(2));
    num.div(&den).unwrap()
}

/// `y^2 = x^3 - 27 K(t) x + 54 K(t)`, a family with a rational 5-isogeny.
pub fn isog5() -> CurveQt {
    let k = isog5_k();
    let a4 = rq(qi(-27)).mul(&k);
    let a6 = rq(qi(54)).mul(&k);
    Curve::new([RatFunc::zero(), RatFunc::zero(), RatFunc::zero(), a4, a6], "isog5").unwrap()
}

/// Family with a rational 7-isogeny.
pub fn isog7() -> CurveQt {
    let u = rf(&[49, 13, 1]);
    let a4 = rq(qi(-27)).mul(&u.pow(3)).mul(&rf(&[2401, 245, 1]));
    let a6 = rq(qi(54))
        .mul(&u.pow(4))
        .mul(&rf(&[-823543, -235298, -21609, -490, 1]));
    Curve::new([RatFunc::zero(), RatFunc::zero(), RatFunc::zero(), a4, a6], "isog7").unwrap()
}

/// `y^2 + xy - s y = x^3 - s x^2` with `s = t^2 - 1/16`.
pub fn tors4() -> CurveQt {
    let s = RatFunc::from_poly(Poly::new(vec![q(-1, 16), qi(0), qi(1)]));
    Curve::new(
        [RatFunc::one(), s.neg(), s.neg(), RatFunc::zero(), RatFunc::zero()],
        "tors4",
    )
    .unwrap()
}

/// `y^2 + p' t xy = x^3 - 36 p'^3 t^2 x - p'^5 t^4` with `p' = (-1)^((p-1)/2) p`.
pub fn serre_family(p: u64) -> Result<CurveQt> {
    if p < 3 || !crate::arith::is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    let ph = if p % 4 == 1 { p as i64 } else { -(p as i64) };
    let phq = qi(ph);
    let a1 = RatFunc::from_poly(Poly::new(vec![qi(0), phq.clone()]));
    let a4 = RatFunc::from_poly(Poly::monomial(qi(-36) * phq.pow(3), 2));
    let a6 = RatFunc::from_poly(Poly::monomial(-phq.pow(5), 4));
    Curve::new(
        [a1, RatFunc::zero(), RatFunc::zero(), a4, a6],
        format!("serre_p{p}"),
    )
}

/// j-invariant families j_1 .. j_5 for non-Weil (2,7) and (3,5) entanglements.
pub fn jfam(i: u32) -> Result<RatFunc> {
    let p = |c: &[i64]| rf(c);
    let (num, den) = match i {
        1 => {
            let p1 = p(&[1, 4, 3, -4, 0, 6, -17, -30, 6, 34, 25, 8, 1]);
            (
                p(&[1, 1, 1]).pow(3).mul(&p(&[1, 1, 2, 9, 12, 5, 1])).mul(&p1.pow(3)),
                p(&[0, 1]).pow(14).mul(&p(&[1, 1]).pow(14)).mul(&p(&[-1, -1, 2, 1]).pow(2)),
            )
        }
        2 => {
            let p2 = p(&[1, -6, -1, 60, 132, 306, 805, 1242, 1032, 480, 131, 18, 1]);
            (
                rq(qi(2401))
                    .mul(&p(&[1, 1, 1]).pow(3))
                    .mul(&p(&[9, 15, 4, 23, 64, 39, 9]))
                    .mul(&p2.pow(3)),
                p(&[-1, -2, 1, 1]).pow(14).mul(&p(&[-1, 5, 8, 1]).pow(2)),
            )
        }
        3 => {
            let p3 = p(&[1, -4, 243, -956, 2880, -7206, 11263, -10050, 5046, -1474, 265, -8, 1]);
            (
                p(&[1, -1, 1]).pow(3).mul(&p(&[1, -1, 2, -9, 12, -5, 1])).mul(&p3.pow(3)),
                p(&[-1, 1]).pow(2).mul(&p(&[0, 1]).pow(2)).mul(&p(&[1, -1, -2, 1]).pow(14)),
            )
        }
        4 | 5 => {
            let pi = if i == 4 {
                p(&[1, 9, 39, 75, 75, 114, 26, -114, 75, -75, 39, -9, 1])
            } else {
                p(&[211, 189, -501, 135, 345, -966, 146, 966, 345, -135, -501, -189, 211])
            };
            (
                rq(qi(4096)).mul(&pi.pow(3)),
                p(&[-1, 1]).pow(15).mul(&p(&[1, 1]).pow(15)).mul(&p(&[-1, -4, 1]).pow(3)),
            )
        }
        _ => return Err(Error::invalid(format!("no j-family with index {i}"))),
    };
    Ok(num.div(&den).unwrap())
}

/// `g_t(x)` over Q(t), whose roots generate a cyclic cubic field.
pub fn g_t() -> Poly<RatFunc> {
    let u = rf(&[49, 13, 1]);
    Poly::new(vec![
        rq(qi(49)).mul(&u).mul(&rf(&[5764801, 3058874, 525819, 38122, 881])),
        rq(qi(147)).mul(&u).mul(&rf(&[2401, 637, 33])),
        rq(qi(147)).mul(&u),
        RatFunc::one(),
    ])
}

/// `f_t(x) = x^3 - t x^2 + (t - 3) x + 1` at a rational t.
pub fn f_t(t: &Q) -> Poly<Q> {
    Poly::new(vec![qi(1), t - qi(3), -t.clone(), qi(1)])
}

/// Specialize `g_t` at a rational t.
pub fn g_at(t0: &Q) -> Result<Poly<Q>> {
    let cs = g_t()
        .coeffs()
        .iter()
        .map(|c| c.eval(t0).ok_or_else(|| Error::invalid("pole")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(cs))
}

pub const FAMILY_NAMES: &[&str] = &[
    "hesse3", "rs9", "isog5", "isog7", "tors4", "serre_p", "jfam1", "jfam2", "jfam3", "jfam4", "jfam5",
];

/// A named family over Q(t) (`serre_p` takes the prime as `p`).
pub fn family(name: &str, p: Option<u64>) -> Result<CurveQt> {
    match name {
        "hesse3" => Ok(hesse3()),
        "rs9" => Ok(rs9()),
        "isog5" => Ok(isog5()),
        "isog7" => Ok(isog7()),
        "tors4" => Ok(tors4()),
        "serre_p" => serre_family(p.ok_or_else(|| Error::invalid("serre_p needs a prime p"))?),
        _ => match name.strip_prefix("jfam").and_then(|s| s.parse::<u32>().ok()) {
            Some(i) => universal_curve_qt(&jfam(i)?, name),
            None => Err(Error::invalid(format!("unknown family {name:?}"))),
        },
    }
}

/// Specialize a named family at a rational parameter.
pub fn family_specialize(name: &str, t0: &Q, p: Option<u64>) -> Result<CurveQ> {
    let fam = family(name, p)?;
    if name == "tors4" && (t0.is_zero() || *t0 == q(1, 4) || *t0 == q(-1, 4)) {
        return Err(Error::invalid("tors4 excludes d = 0 and d = ±1/4"));
    }
    if name == "serre_p" && t0.is_zero() {
        return Err(Error::invalid("serre_p excludes t = 0"));
    }
    fam.specialize(t0).map_err(|e| match name {
        "hesse3" if *t0 == qi(1) => Error::invalid("hesse3 excludes t = 1 (the factor t - 1 vanishes)"),
        _ => e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e50() -> CurveQ {
        CurveQ::from_ints([1, 0, 1, -126, -552], "50.a1").unwrap()
    }

    #[test]
    fn invariants_of_50a1() {
        let e = e50();
        assert_eq!(e.discriminant(), qi(-8 * 625));
        assert_eq!(e.j_invariant(), q(-25 * 241 * 241 * 241, 8));
        assert_eq!(e.discriminant_square_class().unwrap(), BigInt::from(-2));
        let s = serre_entanglement(&e).unwrap();
        assert_eq!(s.delta_square_class.as_deref(), Some("-2"));
        assert_eq!(s.minimal_cyclotomic_level.as_deref(), Some("8"));
        assert_eq!(s.witness_level, "20000");
    }

    #[test]
    fn vertical_case() {
        let e = CurveQ::from_ints([0, 0, 0, -1, 0], "x3-x").unwrap();
        assert_eq!(e.discriminant(), qi(64));
        assert!(serre_entanglement(&e).unwrap().vertical_flag);
    }

    #[test]
    fn universal_curves() {
        let e = universal_curve(&qi(-3375)).unwrap();
        assert_eq!(e.discriminant_square_class().unwrap(), BigInt::from(-7));
        let e = universal_curve(&qi(5 + 1728)).unwrap();
        assert_eq!(e.discriminant_square_class().unwrap(), BigInt::from(5));
        assert!(universal_curve(&qi(1728)).is_err());
        assert!(universal_curve(&qi(0)).is_err());
    }

    #[test]
    fn twists() {
        let e1 = CurveQ::from_ints([0, 1, 0, -3, 1], "E1").unwrap();
        let e4 = CurveQ::from_ints([0, -1, 0, -3, -1], "E4").unwrap();
        let tw = quadratic_twist(&e1, &BigInt::from(-1)).unwrap();
        assert_eq!(tw.a_invariants(), e4.a_invariants());
        assert!(is_isomorphic(&quadratic_twist(&e1, &BigInt::from(1)).unwrap(), &e1));
        assert!(!is_isomorphic(&e1, &e4));
        assert!(quadratic_twist(&e1, &BigInt::from(12)).is_err());
    }

    #[test]
    fn hesse_fibers() {
        let e0 = family_specialize("hesse3", &qi(0), None).unwrap();
        assert_eq!(e0.a_invariants()[4], qi(-432));
        assert!(e0.j_invariant().is_zero());
        assert!(family_specialize("hesse3", &qi(1), None).is_err());
    }

    #[test]
    fn conic_points() {
        assert_eq!(c_d_point(2, 3).unwrap(), (q(-27, 25), q(2, 5)));
        let (x, _) = c_d_point(1, 1).unwrap();
        assert_eq!(x, q(-17, 25));
        assert!(c_d_point(1, 2).is_ok());
        assert!(c_d_point(0, 0).is_err());
    }

    #[test]
    fn isog5_fiber_for_d13() {
        let e = family_specialize("isog5", &q(-27, 25), None).unwrap();
        assert!(!e.discriminant().is_zero());
    }

    #[test]
    fn serre_family_j() {
        let e = family_specialize("serre_p", &qi(2), Some(5)).unwrap();
        assert_eq!(e.j_invariant(), qi(5 * 4 + 1728));
        assert_eq!(e.discriminant_square_class().unwrap(), BigInt::from(5));
    }
}
