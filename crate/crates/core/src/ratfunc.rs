//! The rational function field Q(t).

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::rational_sqrt;
use crate::field::{Field, Q};
use crate::poly::Poly;

/// A reduced quotient `num/den` with `den` monic.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc {
    num: Poly<Q>,
    den: Poly<Q>,
}

impl RatFunc {
    pub fn new(num: Poly<Q>, den: Poly<Q>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(Self::from_poly(Poly::zero()));
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g).unwrap();
        let den = den.exact_div(&g).unwrap();
        let l = den.lead().unwrap().inv().unwrap();
        Some(RatFunc {
            num: num.scale(&l),
            den: den.scale(&l),
        })
    }

    pub fn from_poly(p: Poly<Q>) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    /// The parameter t itself.
    pub fn t() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly<Q> {
        &self.num
    }

    pub fn den(&self) -> &Poly<Q> {
        &self.den
    }

    /// Value at a rational point; `None` on a pole.
    pub fn eval(&self, t: &Q) -> Option<Q> {
        let d = self.den.eval(t);
        Field::div(&self.num.eval(t), &d)
    }

    /// Exact square root in Q(t), when one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.num.is_zero() {
            return Some(self.clone());
        }
        // num/den is a square iff num*den is a square polynomial.
        let p = &self.num * &self.den;
        let r = poly_sqrt(&p)?;
        RatFunc::new(r, self.den.clone())
    }

    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }
}

/// Exact square root of a polynomial over Q, if it is a square.
pub fn poly_sqrt(p: &Poly<Q>) -> Option<Poly<Q>> {
    if p.is_zero() {
        return Some(Poly::zero());
    }
    let n = p.deg();
    if n % 2 == 1 {
        return None;
    }
    let lead = p.lead().unwrap();
    if lead.is_negative() {
        return None;
    }
    let lr = rational_sqrt(lead)?;
    let m = n / 2;
    // Coefficients of the root from the top down.
    let mut r = vec![<Q as Zero>::zero(); m + 1];
    r[m] = lr.clone();
    let two_lr = &lr + &lr;
    for k in (0..m).rev() {
        let mut c = p.coeff(m + k);
        for i in (k + 1)..=m {
            let j = m + k - i;
            if j > k && j <= m {
                c -= &r[i] * &r[j];
            }
        }
        r[k] = c / &two_lr;
    }
    let root = Poly::new(r);
    (&root * &root == *p).then_some(root)
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.deg() == 0 && self.den.coeff(0) == <Q as One>::one() {
            write!(f, "{}", self.num.render("t"))
        } else {
            write!(f, "({})/({})", self.num.render("t"), self.den.render("t"))
        }
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        RatFunc::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
        .unwrap()
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den).unwrap()
    }
    fn neg(&self) -> Self {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
    fn inv(&self) -> Option<Self> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }
    fn from_q(c: &Q) -> Self {
        Self::from_poly(Poly::constant(c.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, qi};

    #[test]
    fn reduction_and_eval() {
        let t = RatFunc::t();
        let one = RatFunc::one();
        let f = t.mul(&t).sub(&one).div(&t.sub(&one)).unwrap();
        assert_eq!(f, t.add(&one));
        assert_eq!(f.eval(&q(1, 2)), Some(q(3, 2)));
        let g = one.div(&t).unwrap();
        assert_eq!(g.eval(&qi(0)), None);
    }

    #[test]
    fn square_roots() {
        let t = RatFunc::t();
        let s = t.add(&RatFunc::from_q(&q(7, 25)));
        let sq = s.mul(&s).mul(&RatFunc::from_q(&q(4, 9)));
        let r = sq.sqrt().unwrap();
        assert_eq!(r.mul(&r), sq);
        assert!(t.sqrt().is_none());
        let frac = RatFunc::from_q(&qi(4)).div(&t.mul(&t)).unwrap();
        assert!(frac.is_square());
    }
}
