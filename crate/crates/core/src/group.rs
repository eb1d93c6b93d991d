//! Generic algorithms on small finite groups whose elements are indexed
//! `0..order`: closures, normal closures, quotients and fingerprints.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, invariant_factors, lcm_u64};

/// A finite group with elements labelled by `0..order()`.
pub trait FiniteGroup: Sync {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
    fn inv(&self, a: usize) -> usize;
    /// A generating set (may be empty for the trivial group).
    fn generators(&self) -> Vec<usize>;
}

/// Membership mask of a subset.
pub type Mask = Vec<bool>;

pub fn mask_len(m: &Mask) -> usize {
    m.iter().filter(|&&b| b).count()
}

pub fn mask_elements(m: &Mask) -> Vec<usize> {
    m.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

/// Subgroup generated by `gens`.
pub fn subgroup_closure<G: FiniteGroup + ?Sized>(g: &G, gens: &[usize]) -> Mask {
    let mut mask = vec![false; g.order()];
    let id = g.identity();
    mask[id] = true;
    let mut queue = vec![id];
    while let Some(x) = queue.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if !mask[y] {
                mask[y] = true;
                queue.push(y);
            }
        }
    }
    mask
}

/// Smallest normal subgroup containing `seeds`.
pub fn normal_closure<G: FiniteGroup + ?Sized>(g: &G, seeds: &[usize]) -> Mask {
    let gens = g.generators();
    let mut mask = vec![false; g.order()];
    let id = g.identity();
    mask[id] = true;
    let mut elems = vec![id];
    let mut pending: Vec<usize> = seeds.to_vec();
    let mut sub_gens: Vec<usize> = Vec::new();
    while let Some(s) = pending.pop() {
        if mask[s] {
            continue;
        }
        sub_gens.push(s);
        // Extend the subgroup by the new generator.
        let mut queue: Vec<usize> = elems.clone();
        while let Some(x) = queue.pop() {
            for &t in &sub_gens {
                let y = g.mul(x, t);
                if !mask[y] {
                    mask[y] = true;
                    elems.push(y);
                    queue.push(y);
                }
            }
        }
        // Conjugates of every subgroup generator must be inside.
        for &t in &sub_gens {
            for &h in &gens {
                let c = g.mul(g.mul(h, t), g.inv(h));
                if !mask[c] {
                    pending.push(c);
                }
            }
        }
    }
    mask
}

pub fn commutator(g: &(impl FiniteGroup + ?Sized), a: usize, b: usize) -> usize {
    g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b)))
}

/// The derived subgroup [G,G].
pub fn derived_subgroup<G: FiniteGroup + ?Sized>(g: &G) -> Mask {
    let gens = g.generators();
    let mut seeds = Vec::new();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            seeds.push(commutator(g, a, b));
        }
    }
    normal_closure(g, &seeds)
}

pub fn is_normal<G: FiniteGroup + ?Sized>(g: &G, sub: &Mask, sub_gens: &[usize]) -> bool {
    g.generators().iter().all(|&h| {
        let hi = g.inv(h);
        sub_gens.iter().all(|&n| sub[g.mul(g.mul(h, n), hi)])
    })
}

pub fn element_order<G: FiniteGroup + ?Sized>(g: &G, x: usize) -> u64 {
    let id = g.identity();
    let mut y = x;
    let mut k = 1;
    while y != id {
        y = g.mul(y, x);
        k += 1;
    }
    k
}

pub fn is_abelian<G: FiniteGroup + ?Sized>(g: &G) -> bool {
    let gens = g.generators();
    gens.iter()
        .all(|&a| gens.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
}

/// Number of conjugacy classes (orbits of conjugation by the generators).
pub fn conjugacy_class_count<G: FiniteGroup + ?Sized>(g: &G) -> usize {
    let n = g.order();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let gens = g.generators();
    let invs: Vec<usize> = gens.iter().map(|&h| g.inv(h)).collect();
    for x in 0..n {
        for (&h, &hi) in gens.iter().zip(&invs) {
            let y = g.mul(g.mul(h, x), hi);
            let (a, b) = (find(&mut parent, x), find(&mut parent, y));
            if a != b {
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

/// Invariant factors of an abelian group from its element orders.
pub fn abelian_invariants_from_orders(orders: &[u64]) -> Vec<u64> {
    let m = orders.len() as u64;
    let mut cyclic = Vec::new();
    for (p, kmax) in factor_u64(m) {
        // s[i] = log_p #{x : x^{p^i} = 1}
        let mut s = vec![0u32];
        for i in 1..=kmax {
            let pi = p.pow(i);
            let mut e = 0;
            let mut c = orders.iter().filter(|&&o| pi % o == 0).count() as u64;
            while c > 1 {
                c /= p;
                e += 1;
            }
            s.push(e);
        }
        // r[i] = number of cyclic p-factors of order >= p^i
        let r: Vec<u32> = (1..s.len()).map(|i| s[i] - s[i - 1]).collect();
        for i in 0..r.len() {
            let next = r.get(i + 1).copied().unwrap_or(0);
            for _ in 0..(r[i] - next) {
                cyclic.push(p.pow(i as u32 + 1));
            }
        }
    }
    invariant_factors(&cyclic)
}

/// Computable isomorphism-type surrogate of a finite group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupFingerprint {
    pub order: u64,
    pub is_abelian: bool,
    /// Invariant factors `d1 | d2 | ...` when the group is abelian, else empty.
    pub abelian_invariants: Vec<u64>,
    pub exponent: u64,
    pub conjugacy_class_count: u64,
    pub abelianization_invariants: Vec<u64>,
}

impl GroupFingerprint {
    pub fn trivial() -> Self {
        GroupFingerprint {
            order: 1,
            is_abelian: true,
            abelian_invariants: vec![],
            exponent: 1,
            conjugacy_class_count: 1,
            abelianization_invariants: vec![],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }
}

pub fn fingerprint<G: FiniteGroup + ?Sized>(g: &G) -> GroupFingerprint {
    let n = g.order();
    let orders: Vec<u64> = (0..n).map(|x| element_order(g, x)).collect();
    let exponent = orders.iter().fold(1, |a, &b| lcm_u64(a, b));
    let abelian = is_abelian(g);
    let derived = derived_subgroup(g);
    let ab = Quotient::new(g, &derived);
    let ab_orders: Vec<u64> = (0..ab.order()).map(|x| element_order(&ab, x)).collect();
    let abelianization_invariants = abelian_invariants_from_orders(&ab_orders);
    GroupFingerprint {
        order: n as u64,
        is_abelian: abelian,
        abelian_invariants: if abelian {
            abelianization_invariants.clone()
        } else {
            vec![]
        },
        exponent,
        conjugacy_class_count: if abelian {
            n as u64
        } else {
            conjugacy_class_count(g) as u64
        },
        abelianization_invariants,
    }
}

/// The coset group G/N for a normal subgroup N given as a mask.
pub struct Quotient<'a, G: FiniteGroup + ?Sized> {
    base: &'a G,
    reps: Vec<usize>,
    coset_of: Vec<u32>,
    gens: Vec<usize>,
}

impl<'a, G: FiniteGroup + ?Sized> Quotient<'a, G> {
    /// Caller guarantees `normal` is a normal subgroup of `base`.
    pub fn new(base: &'a G, normal: &Mask) -> Self {
        let n_elems = mask_elements(normal);
        let mut coset_of = vec![u32::MAX; base.order()];
        let mut reps = Vec::new();
        // The identity coset gets label 0.
        let id = base.identity();
        let order_iter = std::iter::once(id).chain((0..base.order()).filter(|&x| x != id));
        for x in order_iter {
            if coset_of[x] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(x);
            for &k in &n_elems {
                coset_of[base.mul(x, k)] = c;
            }
        }
        let mut gens: Vec<usize> = base
            .generators()
            .iter()
            .map(|&s| coset_of[s] as usize)
            .filter(|&c| c != 0)
            .collect();
        gens.sort_unstable();
        gens.dedup();
        Quotient {
            base,
            reps,
            coset_of,
            gens,
        }
    }

    pub fn coset_of(&self, x: usize) -> usize {
        self.coset_of[x] as usize
    }

    pub fn representative(&self, c: usize) -> usize {
        self.reps[c]
    }
}

impl<G: FiniteGroup + ?Sized> FiniteGroup for Quotient<'_, G> {
    fn order(&self) -> usize {
        self.reps.len()
    }
    fn identity(&self) -> usize {
        0
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        self.coset_of[self.base.mul(self.reps[a], self.reps[b])] as usize
    }
    fn inv(&self, a: usize) -> usize {
        self.coset_of[self.base.inv(self.reps[a])] as usize
    }
    fn generators(&self) -> Vec<usize> {
        self.gens.clone()
    }
}

/// All normal subgroups, as masks sorted by size. Intended for small groups.
pub fn normal_subgroups<G: FiniteGroup + ?Sized>(g: &G) -> Vec<Mask> {
    let n = g.order();
    let mut found: BTreeMap<Vec<usize>, Mask> = BTreeMap::new();
    let trivial = {
        let mut m = vec![false; n];
        m[g.identity()] = true;
        m
    };
    found.insert(mask_elements(&trivial), trivial);
    for x in 0..n {
        let m = normal_closure(g, &[x]);
        found.entry(mask_elements(&m)).or_insert(m);
    }
    // Close under joins.
    loop {
        let current: Vec<Mask> = found.values().cloned().collect();
        let mut added = false;
        for (i, a) in current.iter().enumerate() {
            for b in &current[i + 1..] {
                if a.iter().zip(b).all(|(x, y)| !*y || *x) || b.iter().zip(a).all(|(x, y)| !*y || *x) {
                    continue;
                }
                let seeds: Vec<usize> = mask_elements(a).into_iter().chain(mask_elements(b)).collect();
                let j = subgroup_closure(g, &seeds);
                let key = mask_elements(&j);
                if !found.contains_key(&key) {
                    found.insert(key, j);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let mut out: Vec<Mask> = found.into_values().collect();
    out.sort_by_key(mask_len);
    out
}

/// Fingerprints of all quotients G/K with K a nontrivial normal subgroup.
pub fn proper_quotient_fingerprints<G: FiniteGroup + ?Sized>(g: &G) -> Vec<GroupFingerprint> {
    let mut out: Vec<GroupFingerprint> = normal_subgroups(g)
        .into_iter()
        .filter(|m| mask_len(m) > 1)
        .map(|m| fingerprint(&Quotient::new(g, &m)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Subgroup generated by all squares; contains [G,G] and has 2-elementary quotient.
pub fn square_subgroup<G: FiniteGroup + ?Sized>(g: &G) -> Mask {
    let squares: Vec<usize> = (0..g.order()).map(|x| g.mul(x, x)).collect();
    subgroup_closure(g, &squares)
}

/// All subgroups of index 2, as masks.
pub fn index_two_subgroups<G: FiniteGroup + ?Sized>(g: &G) -> Vec<Mask> {
    let m = square_subgroup(g);
    let q = Quotient::new(g, &m);
    // Coordinates of each element of the elementary abelian quotient.
    let mut coord = vec![u64::MAX; q.order()];
    coord[0] = 0;
    let mut span = vec![0usize];
    let mut rank = 0;
    for x in 0..q.order() {
        if coord[x] != u64::MAX {
            continue;
        }
        let bit = 1u64 << rank;
        rank += 1;
        let ext: Vec<usize> = span.iter().map(|&s| q.mul(s, x)).collect();
        for (&s, &y) in span.iter().zip(&ext) {
            coord[y] = coord[s] | bit;
        }
        span.extend(ext);
    }
    (1u64..(1u64 << rank))
        .map(|f| {
            (0..g.order())
                .map(|x| (coord[q.coset_of(x)] & f).count_ones() % 2 == 0)
                .collect()
        })
        .collect()
}

/// Greedy generating set of a subgroup mask.
pub fn small_generating_set<G: FiniteGroup + ?Sized>(g: &G, sub: &Mask) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = vec![false; g.order()];
    span[g.identity()] = true;
    for x in mask_elements(sub) {
        if !span[x] {
            gens.push(x);
            span = subgroup_closure(g, &gens);
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cyclic group Z/n.
    struct Cyclic(usize);
    impl FiniteGroup for Cyclic {
        fn order(&self) -> usize {
            self.0
        }
        fn identity(&self) -> usize {
            0
        }
        fn mul(&self, a: usize, b: usize) -> usize {
            (a + b) % self.0
        }
        fn inv(&self, a: usize) -> usize {
            (self.0 - a) % self.0
        }
        fn generators(&self) -> Vec<usize> {
            if self.0 > 1 {
                vec![1]
            } else {
                vec![]
            }
        }
    }

    /// Symmetric group S3 as permutations of 0..3, indexed lexicographically.
    struct S3(Vec<[usize; 3]>);
    impl S3 {
        fn new() -> Self {
            S3(vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]])
        }
        fn idx(&self, p: [usize; 3]) -> usize {
            self.0.iter().position(|&q| q == p).unwrap()
        }
    }
    impl FiniteGroup for S3 {
        fn order(&self) -> usize {
            6
        }
        fn identity(&self) -> usize {
            0
        }
        fn mul(&self, a: usize, b: usize) -> usize {
            let (p, q) = (self.0[a], self.0[b]);
            self.idx([p[q[0]], p[q[1]], p[q[2]]])
        }
        fn inv(&self, a: usize) -> usize {
            let p = self.0[a];
            let mut r = [0; 3];
            for i in 0..3 {
                r[p[i]] = i;
            }
            self.idx(r)
        }
        fn generators(&self) -> Vec<usize> {
            vec![1, 3]
        }
    }

    #[test]
    fn cyclic_fingerprint() {
        let fp = fingerprint(&Cyclic(12));
        assert_eq!(fp.abelian_invariants, vec![12]);
        assert_eq!(fp.exponent, 12);
        assert_eq!(fp.conjugacy_class_count, 12);
    }

    #[test]
    fn s3_fingerprint_and_quotients() {
        let g = S3::new();
        let fp = fingerprint(&g);
        assert!(!fp.is_abelian);
        assert_eq!(fp.conjugacy_class_count, 3);
        assert_eq!(fp.abelianization_invariants, vec![2]);
        assert_eq!(fp.exponent, 6);
        assert_eq!(normal_subgroups(&g).len(), 3);
        let qs = proper_quotient_fingerprints(&g);
        assert_eq!(qs.len(), 2);
        assert_eq!(index_two_subgroups(&g).len(), 1);
    }

    #[test]
    fn invariants_from_orders() {
        // Z/2 x Z/4
        let orders = [1, 2, 2, 2, 4, 4, 4, 4];
        assert_eq!(abelian_invariants_from_orders(&orders), vec![2, 4]);
        assert_eq!(abelian_invariants_from_orders(&[1]), Vec::<u64>::new());
    }
}
