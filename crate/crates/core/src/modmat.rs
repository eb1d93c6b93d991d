//! 2x2 matrices over Z/nZ and materialized subgroups of GL(2, Z/nZ).

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, gcd_u64, inv_mod};
use crate::error::{Error, Result};
use crate::group::{self, FiniteGroup, GroupFingerprint, Mask};

pub const DEFAULT_BUDGET: usize = 5_000_000;

/// Levels up to this bound use a dense membership table.
const DENSE_LEVEL: u32 = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ResidueMatrix {
    level: u32,
    e: [u32; 4],
}

impl ResidueMatrix {
    pub fn new(level: u32, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if level == 0 {
            return Err(Error::invalid("level must be positive"));
        }
        let r = |x: i64| x.rem_euclid(level as i64) as u32;
        Ok(ResidueMatrix {
            level,
            e: [r(a), r(b), r(c), r(d)],
        })
    }

    pub fn identity(level: u32) -> Self {
        let one = 1 % level.max(1);
        ResidueMatrix {
            level,
            e: [one, 0, 0, one],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn entries(&self) -> [u32; 4] {
        self.e
    }

    pub fn rows(&self) -> [[u32; 2]; 2] {
        [[self.e[0], self.e[1]], [self.e[2], self.e[3]]]
    }

    pub fn det(&self) -> u32 {
        let n = self.level as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        ((a * d % n + n - b * c % n) % n) as u32
    }

    pub fn trace(&self) -> u32 {
        ((self.e[0] as u64 + self.e[3] as u64) % self.level as u64) as u32
    }

    pub fn is_invertible(&self) -> bool {
        gcd_u64(self.det() as u64, self.level as u64) == 1
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.level != o.level {
            return Err(Error::invalid(format!(
                "cannot multiply matrices of levels {} and {}",
                self.level, o.level
            )));
        }
        Ok(self.mul_unchecked(o))
    }

    pub(crate) fn mul_unchecked(&self, o: &Self) -> Self {
        let n = self.level as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        let [p, q, r, s] = o.e.map(|x| x as u64);
        ResidueMatrix {
            level: self.level,
            e: [
                ((a * p + b * r) % n) as u32,
                ((a * q + b * s) % n) as u32,
                ((c * p + d * r) % n) as u32,
                ((c * q + d * s) % n) as u32,
            ],
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.level as u64;
        let di = inv_mod(self.det() as u64, n)?;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        let m = |x: u64| (x % n * di % n) as u32;
        Some(ResidueMatrix {
            level: self.level,
            e: [m(d), m((n - b) % n), m((n - c) % n), m(a)],
        })
    }

    /// Reduction to a divisor level.
    pub fn reduce(&self, m: u32) -> Result<Self> {
        if m == 0 || self.level % m != 0 {
            return Err(Error::invalid(format!("{m} does not divide level {}", self.level)));
        }
        Ok(ResidueMatrix {
            level: m,
            e: self.e.map(|x| x % m),
        })
    }

    /// Lift along the canonical map to a multiple of the level (entries kept).
    pub fn lift(&self, level: u32) -> Result<Self> {
        if level % self.level != 0 {
            return Err(Error::invalid(format!("{} does not divide {level}", self.level)));
        }
        Ok(ResidueMatrix { level, e: self.e })
    }

    pub fn code(&self) -> u32 {
        let n = self.level;
        ((self.e[0] * n + self.e[1]) * n + self.e[2]) * n + self.e[3]
    }

    pub fn from_code(level: u32, mut code: u32) -> Self {
        let n = level;
        let d = code % n;
        code /= n;
        let c = code % n;
        code /= n;
        let b = code % n;
        let a = code / n;
        ResidueMatrix { level, e: [a, b, c, d] }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.level)
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]] mod {}",
            self.e[0], self.e[1], self.e[2], self.e[3], self.level
        )
    }
}

/// |GL(2, Z/nZ)|.
pub fn order_gl2(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("level must be positive"));
    }
    let mut acc = 1u64;
    for (p, k) in factor_u64(n) {
        let pk = p.pow(k);
        acc *= pk.pow(4) / (p * p * p * p) * (p * p - 1) * (p * p - p);
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
enum Lookup {
    Dense(Vec<u32>),
    Sparse(HashMap<u32, u32>),
}

impl Lookup {
    fn get(&self, code: u32) -> Option<usize> {
        match self {
            Lookup::Dense(v) => v.get(code as usize).copied().filter(|&i| i != u32::MAX).map(|i| i as usize),
            Lookup::Sparse(m) => m.get(&code).map(|&i| i as usize),
        }
    }
}

/// A subgroup of GL(2, Z/nZ) with all elements materialized in sorted order.
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    level: u32,
    generators: Vec<ResidueMatrix>,
    elements: Vec<u32>,
    index: Lookup,
    gen_idx: Vec<usize>,
}

impl PartialEq for FiniteMatrixGroup {
    fn eq(&self, o: &Self) -> bool {
        self.level == o.level && self.elements == o.elements
    }
}

fn check_level(level: u32) -> Result<()> {
    if level == 0 {
        return Err(Error::invalid("level must be positive"));
    }
    if level > 255 {
        return Err(Error::budget(format!("level {level} exceeds the supported maximum 255")));
    }
    Ok(())
}

impl FiniteMatrixGroup {
    /// Subgroup generated by `gens` at level `n`.
    pub fn closure(gens: &[ResidueMatrix], n: u32) -> Result<Self> {
        Self::closure_with_budget(gens, n, DEFAULT_BUDGET)
    }

    pub fn closure_with_budget(gens: &[ResidueMatrix], n: u32, budget: usize) -> Result<Self> {
        check_level(n)?;
        for g in gens {
            if g.level != n {
                return Err(Error::invalid(format!(
                    "generator {g} does not have level {n}"
                )));
            }
            if !g.is_invertible() {
                return Err(Error::invalid(format!("generator {g} is not invertible")));
            }
        }
        let gens: Vec<ResidueMatrix> = {
            let mut v: Vec<ResidueMatrix> = gens.iter().copied().filter(|g| !g.is_identity()).collect();
            v.dedup();
            v
        };
        let id = ResidueMatrix::identity(n);
        let mut seen: std::collections::HashSet<u32> = std::collections::HashSet::new();
        seen.insert(id.code());
        let mut queue = vec![id];
        let mut elements = vec![id.code()];
        while let Some(x) = queue.pop() {
            for g in &gens {
                let y = x.mul_unchecked(g);
                if seen.insert(y.code()) {
                    elements.push(y.code());
                    if elements.len() > budget {
                        return Err(Error::budget(format!(
                            "group closure exceeded the element budget of {budget}"
                        )));
                    }
                    queue.push(y);
                }
            }
        }
        Ok(Self::from_parts(n, gens, elements))
    }

    fn from_parts(level: u32, generators: Vec<ResidueMatrix>, mut elements: Vec<u32>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let index = if level <= DENSE_LEVEL {
            let mut v = vec![u32::MAX; (level as usize).pow(4)];
            for (i, &c) in elements.iter().enumerate() {
                v[c as usize] = i as u32;
            }
            Lookup::Dense(v)
        } else {
            Lookup::Sparse(elements.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect())
        };
        let mut g = FiniteMatrixGroup {
            level,
            generators,
            elements,
            index,
            gen_idx: vec![],
        };
        g.gen_idx = g
            .generators
            .iter()
            .map(|m| g.index_of(m).expect("generator is an element"))
            .collect();
        g
    }

    /// Build from a known closed element set; a small generating set is chosen.
    pub fn from_elements(level: u32, elems: Vec<ResidueMatrix>) -> Result<Self> {
        check_level(level)?;
        let codes = elems.iter().map(|m| m.code()).collect();
        let mut g = Self::from_parts(level, vec![], codes);
        let all = vec![true; g.order()];
        let gi = group::small_generating_set(&g, &all);
        g.generators = gi.iter().map(|&i| g.element(i)).collect();
        g.gen_idx = gi;
        Ok(g)
    }

    /// Subgroup of the elements selected by a mask over this group's indices.
    pub fn subgroup_from_mask(&self, mask: &Mask) -> Self {
        let gi = group::small_generating_set(self, mask);
        let codes = group::mask_elements(mask)
            .into_iter()
            .map(|i| self.elements[i])
            .collect();
        let gens = gi.iter().map(|&i| self.element(i)).collect();
        Self::from_parts(self.level, gens, codes)
    }

    pub fn trivial(level: u32) -> Result<Self> {
        Self::closure(&[], level)
    }

    /// All of GL(2, Z/nZ).
    pub fn gl2(n: u32) -> Result<Self> {
        check_level(n)?;
        let mut gens = vec![
            ResidueMatrix::new(n, 1, 1, 0, 1)?,
            ResidueMatrix::new(n, 1, 0, 1, 1)?,
        ];
        for u in 1..n.max(2) {
            if gcd_u64(u as u64, n as u64) == 1 {
                gens.push(ResidueMatrix::new(n, u as i64, 0, 0, 1)?);
            }
        }
        Self::closure(&gens, n)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn generators(&self) -> &[ResidueMatrix] {
        &self.generators
    }

    pub fn element(&self, i: usize) -> ResidueMatrix {
        ResidueMatrix::from_code(self.level, self.elements[i])
    }

    pub fn elements(&self) -> impl Iterator<Item = ResidueMatrix> + '_ {
        self.elements.iter().map(|&c| ResidueMatrix::from_code(self.level, c))
    }

    pub fn index_of(&self, m: &ResidueMatrix) -> Option<usize> {
        if m.level != self.level {
            return None;
        }
        self.index.get(m.code())
    }

    pub fn contains(&self, m: &ResidueMatrix) -> bool {
        self.index_of(m).is_some()
    }

    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        self.level == other.level && self.elements().all(|m| other.contains(&m))
    }

    pub fn is_normal_in(&self, other: &Self) -> bool {
        other.generators.iter().all(|h| {
            let hi = h.inverse().unwrap();
            self.generators
                .iter()
                .all(|n| self.contains(&h.mul_unchecked(n).mul_unchecked(&hi)))
        })
    }

    pub fn fingerprint(&self) -> GroupFingerprint {
        group::fingerprint(self)
    }

    /// Image under reduction mod a divisor `m` of the level.
    pub fn project(&self, m: u32) -> Result<Self> {
        if m == 0 || self.level % m != 0 {
            return Err(Error::invalid(format!("{m} does not divide level {}", self.level)));
        }
        let gens: Vec<ResidueMatrix> = self
            .generators
            .iter()
            .map(|g| g.reduce(m).unwrap())
            .filter(|g| !g.is_identity())
            .collect();
        let mut codes: Vec<u32> = self.elements().map(|g| g.reduce(m).unwrap().code()).collect();
        codes.sort_unstable();
        codes.dedup();
        let mut gens = gens;
        gens.sort();
        gens.dedup();
        Ok(Self::from_parts(m, gens, codes))
    }

    /// N_e = {g in G : g ≡ I mod e}.
    pub fn kernel_of_reduction(&self, e: u32) -> Result<Self> {
        if e == 0 || self.level % e != 0 {
            return Err(Error::invalid(format!("{e} does not divide level {}", self.level)));
        }
        let mask: Mask = self
            .elements()
            .map(|g| g.reduce(e).unwrap().is_identity())
            .collect();
        Ok(self.subgroup_from_mask(&mask))
    }

    /// Elements with determinant ≡ 1 mod `d`.
    pub fn det_kernel(&self, d: u32) -> Result<Self> {
        if d == 0 || self.level % d != 0 {
            return Err(Error::invalid(format!("{d} does not divide level {}", self.level)));
        }
        let mask: Mask = self.elements().map(|g| g.det() % d == 1 % d).collect();
        Ok(self.subgroup_from_mask(&mask))
    }

    /// Derived subgroup [G,G].
    pub fn commutator_subgroup(&self) -> Self {
        let mask = group::derived_subgroup(self);
        self.subgroup_from_mask(&mask)
    }

    /// Sorted determinant values and whether they exhaust (Z/nZ)^x.
    pub fn det_image(&self) -> (Vec<u32>, bool) {
        let mut dets: Vec<u32> = self.elements().map(|g| g.det()).collect();
        dets.sort_unstable();
        dets.dedup();
        let units = (0..self.level)
            .filter(|&u| gcd_u64(u as u64, self.level as u64) == 1)
            .count()
            .max(1);
        let full = dets.len() == units;
        (dets, full)
    }

    /// Projections to the prime-power parts of the level, and whether G is
    /// the full fiber product of them.
    pub fn crt_split(&self) -> Result<(Vec<FiniteMatrixGroup>, bool)> {
        let parts: Vec<u32> = factor_u64(self.level as u64)
            .into_iter()
            .map(|(p, k)| p.pow(k) as u32)
            .collect();
        if parts.len() <= 1 {
            return Ok((vec![self.clone()], true));
        }
        let projections = parts
            .iter()
            .map(|&q| self.project(q))
            .collect::<Result<Vec<_>>>()?;
        let prod: usize = projections.iter().map(|g| g.order()).product();
        Ok((projections, prod == self.order()))
    }

    /// Full preimage of this group at a multiple of its level.
    pub fn preimage(&self, level: u32) -> Result<Self> {
        if level % self.level != 0 {
            return Err(Error::invalid(format!("{} does not divide {level}", self.level)));
        }
        let mut gens: Vec<ResidueMatrix> = self
            .generators
            .iter()
            .map(|g| lift_invertible(g, level))
            .collect::<Result<_>>()?;
        let kernel = FiniteMatrixGroup::gl2(level)?.kernel_of_reduction(self.level)?;
        gens.extend(kernel.generators.iter().copied());
        Self::closure(&gens, level)
    }
}

/// Lift an invertible matrix to an invertible matrix at a multiple level.
pub fn lift_invertible(g: &ResidueMatrix, level: u32) -> Result<ResidueMatrix> {
    let n = g.level;
    let k = level / n;
    let [a, b, c, d] = g.e;
    for i in 0..k.min(64) {
        for j in 0..k.min(64) {
            let m = ResidueMatrix::new(
                level,
                (a + i * n) as i64,
                b as i64,
                c as i64,
                (d + j * n) as i64,
            )?;
            if m.is_invertible() {
                return Ok(m);
            }
        }
    }
    Err(Error::structural(format!("no invertible lift of {g} to level {level}")))
}

/// Subgroup join ⟨H1 ∪ H2⟩.
pub fn join(h1: &FiniteMatrixGroup, h2: &FiniteMatrixGroup) -> Result<FiniteMatrixGroup> {
    if h1.level != h2.level {
        return Err(Error::invalid(format!(
            "cannot join groups of levels {} and {}",
            h1.level, h2.level
        )));
    }
    let gens: Vec<ResidueMatrix> = h1.generators.iter().chain(&h2.generators).copied().collect();
    FiniteMatrixGroup::closure(&gens, h1.level)
}

/// Fingerprint of G/N after checking N ⊆ G and N normal in G.
pub fn quotient_fingerprint(g: &FiniteMatrixGroup, n: &FiniteMatrixGroup) -> Result<GroupFingerprint> {
    let mask = normal_mask(g, n)?;
    Ok(group::fingerprint(&group::Quotient::new(g, &mask)))
}

/// Mask of N inside G after checking containment and normality.
pub fn normal_mask(g: &FiniteMatrixGroup, n: &FiniteMatrixGroup) -> Result<Mask> {
    if g.level != n.level {
        return Err(Error::invalid("quotient of groups at different levels"));
    }
    let mut mask = vec![false; g.order()];
    for m in n.elements() {
        match g.index_of(&m) {
            Some(i) => mask[i] = true,
            None => return Err(Error::invalid(format!("subgroup element {m} is not in the ambient group"))),
        }
    }
    if !n.is_normal_in(g) {
        return Err(Error::invalid("subgroup is not normal"));
    }
    Ok(mask)
}

impl FiniteGroup for FiniteMatrixGroup {
    fn order(&self) -> usize {
        self.elements.len()
    }
    fn identity(&self) -> usize {
        self.index_of(&ResidueMatrix::identity(self.level)).unwrap()
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        let m = self.element(a).mul_unchecked(&self.element(b));
        self.index.get(m.code()).expect("closed under multiplication")
    }
    fn inv(&self, a: usize) -> usize {
        let m = self.element(a).inverse().unwrap();
        self.index.get(m.code()).expect("closed under inversion")
    }
    fn generators(&self) -> Vec<usize> {
        self.gen_idx.clone()
    }
}

impl FiniteMatrixGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Serializable subgroup description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub level: u32,
    pub generators: Vec<[[i64; 2]; 2]>,
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteMatrixGroup> {
        self.build_with_budget(DEFAULT_BUDGET)
    }

    pub fn build_with_budget(&self, budget: usize) -> Result<FiniteMatrixGroup> {
        check_level(self.level)?;
        let gens = self
            .generators
            .iter()
            .map(|m| ResidueMatrix::new(self.level, m[0][0], m[0][1], m[1][0], m[1][1]))
            .collect::<Result<Vec<_>>>()?;
        FiniteMatrixGroup::closure_with_budget(&gens, self.level, budget)
    }

    pub fn of(g: &FiniteMatrixGroup) -> Self {
        GroupSpec {
            level: g.level,
            generators: g
                .generators
                .iter()
                .map(|m| m.rows().map(|r| r.map(|x| x as i64)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u32, a: i64, b: i64, c: i64, d: i64) -> ResidueMatrix {
        ResidueMatrix::new(n, a, b, c, d).unwrap()
    }

    #[test]
    fn gl2_orders() {
        assert_eq!(order_gl2(2).unwrap(), 6);
        assert_eq!(order_gl2(3).unwrap(), 48);
        assert_eq!(order_gl2(6).unwrap(), 288);
        assert_eq!(order_gl2(8).unwrap(), 1536);
        assert!(order_gl2(0).is_err());
        let g3 = FiniteMatrixGroup::closure(&[m(3, 0, 1, 1, 0), m(3, 1, 1, 0, 1), m(3, 2, 0, 0, 1)], 3).unwrap();
        assert_eq!(g3.order(), 48);
    }

    #[test]
    fn closure_examples() {
        assert_eq!(FiniteMatrixGroup::closure(&[m(5, 1, 0, 0, 1)], 5).unwrap().order(), 1);
        assert_eq!(FiniteMatrixGroup::closure(&[m(2, 0, 1, 1, 0), m(2, 1, 1, 0, 1)], 2).unwrap().order(), 6);
        assert_eq!(FiniteMatrixGroup::closure(&[m(5, 2, 0, 0, 1), m(5, 1, 0, 0, 2)], 5).unwrap().order(), 16);
        assert!(FiniteMatrixGroup::closure(&[m(4, 2, 0, 0, 1)], 4).is_err());
        assert!(FiniteMatrixGroup::closure(&[m(4, 1, 0, 0, 1), m(2, 1, 1, 0, 1)], 4).is_err());
        assert!(matches!(
            FiniteMatrixGroup::closure_with_budget(&[m(5, 1, 1, 0, 1), m(5, 1, 0, 1, 1)], 5, 10),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn elements_are_sorted_lexicographically() {
        let g = FiniteMatrixGroup::gl2(3).unwrap();
        let v: Vec<[u32; 4]> = g.elements().map(|x| x.entries()).collect();
        let mut w = v.clone();
        w.sort();
        assert_eq!(v, w);
    }

    #[test]
    fn kernels_joins_quotients() {
        let g = FiniteMatrixGroup::gl2(6).unwrap();
        let n3 = g.kernel_of_reduction(3).unwrap();
        assert_eq!(n3.order(), 6);
        assert!(n3.is_normal_in(&g));
        assert_eq!(g.kernel_of_reduction(6).unwrap().order(), 1);
        assert_eq!(g.kernel_of_reduction(1).unwrap().order(), 288);
        let n2 = g.kernel_of_reduction(2).unwrap();
        assert_eq!(join(&n2, &n3).unwrap().order(), 288);
        assert!(quotient_fingerprint(&g, &g).unwrap().is_trivial());
        let (dets, full) = g.det_image();
        assert!(full);
        assert_eq!(dets, vec![1, 5]);
        let (parts, fiber) = g.crt_split().unwrap();
        assert_eq!(parts.iter().map(|p| p.order()).collect::<Vec<_>>(), vec![6, 48]);
        assert!(fiber);
    }

    #[test]
    fn split_cartan_quotient() {
        let cs = FiniteMatrixGroup::closure(&[m(5, 2, 0, 0, 1), m(5, 1, 0, 0, 2)], 5).unwrap();
        let triv = FiniteMatrixGroup::trivial(5).unwrap();
        let fp = quotient_fingerprint(&cs, &triv).unwrap();
        assert_eq!(fp.abelian_invariants, vec![4, 4]);
        let unip = FiniteMatrixGroup::closure(&[m(5, 1, 1, 0, 1)], 5).unwrap();
        assert_eq!(unip.det_image().0, vec![1]);
    }

    #[test]
    fn inverse_and_codes() {
        let a = m(12, 5, 7, 1, 4);
        let ai = a.inverse().unwrap();
        assert!(a.mul(&ai).unwrap().is_identity());
        assert_eq!(ResidueMatrix::from_code(12, a.code()), a);
    }
}
