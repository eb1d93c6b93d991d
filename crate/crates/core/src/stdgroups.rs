//! Borel, Cartan and normalizer subgroups of GL(2), and the CM groups
//! C_{δ,φ}(n), N_{δ,φ}(n).

use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, inv_mod, is_prime_u64, legendre};
use crate::error::{Error, Result};
use crate::modmat::{FiniteMatrixGroup, ResidueMatrix};

/// ε for the non-split Cartan at ℓ: −1 if ℓ ≡ 3 mod 4, else the least non-residue.
pub fn nonsplit_epsilon(ell: u64) -> i64 {
    if ell % 4 == 3 {
        return -1;
    }
    (2..ell as i64).find(|&a| legendre(a, ell) == -1).expect("odd prime has non-residues")
}

fn enumerate(n: u32, f: impl Fn(i64, i64) -> Option<[i64; 4]>) -> Result<FiniteMatrixGroup> {
    let mut elems = Vec::new();
    for a in 0..n as i64 {
        for b in 0..n as i64 {
            if let Some([w, x, y, z]) = f(a, b) {
                let m = ResidueMatrix::new(n, w, x, y, z)?;
                if m.is_invertible() {
                    elems.push(m);
                }
            }
        }
    }
    FiniteMatrixGroup::from_elements(n, elems)
}

/// One of `B`, `Cs`, `Cn`, `Ns`, `Nn` at an odd prime ℓ.
pub fn standard_subgroup(label: &str, ell: u64) -> Result<FiniteMatrixGroup> {
    if ell < 3 || !is_prime_u64(ell) {
        return Err(Error::invalid(format!("{ell} is not an odd prime")));
    }
    if ell > 255 {
        return Err(Error::budget(format!("level {ell} exceeds the supported maximum 255")));
    }
    let n = ell as u32;
    let eps = nonsplit_epsilon(ell);
    match label {
        "B" => {
            let gens = [
                ResidueMatrix::new(n, 1, 1, 0, 1)?,
                ResidueMatrix::new(n, primitive_root(ell) as i64, 0, 0, 1)?,
                ResidueMatrix::new(n, 1, 0, 0, primitive_root(ell) as i64)?,
            ];
            FiniteMatrixGroup::closure(&gens, n)
        }
        "Cs" => enumerate(n, |a, b| Some([a, 0, 0, b])),
        "Cn" => enumerate(n, |a, b| Some([a, b * eps, b, a])),
        "Ns" => {
            let mut gens = standard_subgroup("Cs", ell)?.generators().to_vec();
            gens.push(ResidueMatrix::new(n, 0, 1, 1, 0)?);
            FiniteMatrixGroup::closure(&gens, n)
        }
        "Nn" => {
            let mut gens = standard_subgroup("Cn", ell)?.generators().to_vec();
            gens.push(ResidueMatrix::new(n, 1, 0, 0, -1)?);
            FiniteMatrixGroup::closure(&gens, n)
        }
        _ => Err(Error::invalid(format!("unknown subgroup label {label:?}; expected B, Cs, Cn, Ns or Nn"))),
    }
}

fn primitive_root(p: u64) -> u64 {
    let fs = crate::arith::factor_u64(p - 1);
    (2..p)
        .find(|&g| fs.iter().all(|&(q, _)| crate::arith::pow_mod(g, (p - 1) / q, p) != 1))
        .unwrap_or(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanParams {
    pub delta: u32,
    pub phi: u32,
    pub level: u32,
    pub disc_k: i64,
    pub conductor: u64,
}

/// Whether `d` is a negative fundamental discriminant.
pub fn is_negative_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let sqfree = |m: i64| crate::arith::factor_u64(m.unsigned_abs()).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => sqfree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && sqfree(m)
        }
        _ => false,
    }
}

/// (δ, φ) attached to the order of discriminant Δ_K f² at level n.
pub fn cartan_params(disc_k: i64, f: u64, n: u32) -> Result<CartanParams> {
    if !is_negative_fundamental(disc_k) {
        return Err(Error::invalid(format!("{disc_k} is not a negative fundamental discriminant")));
    }
    if f == 0 {
        return Err(Error::invalid("conductor must be positive"));
    }
    if n == 0 {
        return Err(Error::invalid("level must be positive"));
    }
    let nn = n as i128;
    let red = |x: i128| x.rem_euclid(nn) as u32;
    let disc = disc_k as i128 * (f as i128) * (f as i128);
    let (delta, phi) = if disc.rem_euclid(4) == 0 {
        (red(disc / 4), 0)
    } else if n % 2 == 1 {
        let inv4 = inv_mod(4 % n as u64, n as u64)
            .ok_or_else(|| Error::structural("4 is not invertible modulo an odd level"))?;
        (red(disc.rem_euclid(nn) * inv4 as i128), 0)
    } else {
        let k = (disc_k as i128 - 1) / 4;
        (red(k * (f as i128) * (f as i128)), red(f as i128))
    };
    Ok(CartanParams {
        delta,
        phi,
        level: n,
        disc_k,
        conductor: f,
    })
}

/// C_{δ,φ}(n) = { [[a+bφ, b], [δb, a]] : a² + abφ − δb² a unit }.
pub fn cartan_group(params: &CartanParams) -> Result<FiniteMatrixGroup> {
    let (d, p, n) = (params.delta as i64, params.phi as i64, params.level);
    enumerate(n, |a, b| {
        let norm = (a * a + a * b * p - d * b * b).rem_euclid(n as i64);
        (gcd_u64(norm as u64, n as u64) == 1).then_some([a + b * p, b, d * b, a])
    })
}

/// N_{δ,φ}(n) = ⟨C_{δ,φ}(n), [[−1, 0], [φ, 1]]⟩.
pub fn cartan_normalizer(params: &CartanParams) -> Result<FiniteMatrixGroup> {
    let c = cartan_group(params)?;
    let n = params.level;
    let extra = ResidueMatrix::new(n, -1, 0, params.phi as i64, 1)?;
    let mut gens = c.generators().to_vec();
    gens.push(extra);
    let nz = FiniteMatrixGroup::closure(&gens, n)?;
    if !c.contains(&extra) && nz.order() != 2 * c.order() {
        return Err(Error::structural(format!(
            "normalizer has order {} but the Cartan group has order {}",
            nz.order(),
            c.order()
        )));
    }
    Ok(nz)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_orders() {
        assert_eq!(standard_subgroup("Cn", 3).unwrap().order(), 8);
        assert_eq!(nonsplit_epsilon(3), -1);
        assert_eq!(nonsplit_epsilon(5), 2);
        assert_eq!(nonsplit_epsilon(17), 3);
        assert_eq!(standard_subgroup("Ns", 5).unwrap().order(), 32);
        assert_eq!(standard_subgroup("Cs", 5).unwrap().order(), 16);
        assert_eq!(standard_subgroup("B", 7).unwrap().order(), 252);
        assert_eq!(standard_subgroup("Nn", 7).unwrap().order(), 96);
        assert!(standard_subgroup("B", 9).is_err());
        assert!(standard_subgroup("X", 5).is_err());
    }

    #[test]
    fn params() {
        let p = cartan_params(-8, 1, 8).unwrap();
        assert_eq!((p.delta, p.phi), (6, 0));
        let p = cartan_params(-7, 1, 14).unwrap();
        assert_eq!((p.delta, p.phi), (12, 1));
        let p = cartan_params(-7, 1, 7).unwrap();
        assert_eq!((p.delta, p.phi), (0, 0));
        assert!(cartan_params(-12, 1, 8).is_err());
        assert!(cartan_params(5, 1, 8).is_err());
    }

    #[test]
    fn cm_groups() {
        let p = cartan_params(-8, 1, 8).unwrap();
        assert_eq!(cartan_group(&p).unwrap().order(), 32);
        assert_eq!(cartan_normalizer(&p).unwrap().order(), 64);
        let p3 = CartanParams { delta: 2, phi: 0, level: 3, disc_k: -4, conductor: 1 };
        assert_eq!(cartan_group(&p3).unwrap().order(), 8);
        assert_eq!(cartan_normalizer(&p3).unwrap().order(), 16);
        let p5 = CartanParams { delta: 1, phi: 0, level: 5, disc_k: -4, conductor: 1 };
        assert_eq!(cartan_group(&p5).unwrap().order(), 16);
    }
}
