//! Group-theoretic entanglement: detection, type, the primitivity order,
//! and the abelian / Weil refinements.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, gcd_u64, lcm_u64};
use crate::error::{Error, Result};
use crate::group::{self, GroupFingerprint, Quotient};
use crate::modmat::{join, normal_mask, quotient_fingerprint, FiniteMatrixGroup};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub level: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub order_g_c: usize,
    pub order_n_a: usize,
    pub order_n_b: usize,
    pub order_n_d: usize,
    pub order_join: usize,
    pub nontrivial: bool,
    pub type_fingerprint: Option<GroupFingerprint>,
    pub warnings: Vec<String>,
}

struct Pieces {
    a: u32,
    b: u32,
    c: u32,
    d: u32,
    gc: FiniteMatrixGroup,
    na: FiniteMatrixGroup,
    nb: FiniteMatrixGroup,
    nd: FiniteMatrixGroup,
    join: FiniteMatrixGroup,
    warnings: Vec<String>,
}

fn pieces(g: &FiniteMatrixGroup, a: u32, b: u32) -> Result<Pieces> {
    let n = g.level();
    for x in [a, b] {
        if x == 0 || n % x != 0 {
            return Err(Error::invalid(format!("{x} does not divide the level {n}")));
        }
    }
    if a == b {
        return Err(Error::invalid("the pair (a, b) must have a != b"));
    }
    let (a, b) = (a.min(b), a.max(b));
    let c = lcm_u64(a as u64, b as u64) as u32;
    let d = gcd_u64(a as u64, b as u64) as u32;
    let mut warnings = Vec::new();
    if !g.det_image().1 {
        warnings.push("determinant is not surjective; cyclotomic correspondence is not guaranteed".into());
    }
    let gc = g.project(c)?;
    let na = gc.kernel_of_reduction(a)?;
    let nb = gc.kernel_of_reduction(b)?;
    let nd = gc.kernel_of_reduction(d)?;
    let j = join(&na, &nb)?;
    if !j.is_subgroup_of(&nd) {
        return Err(Error::structural("<N_a, N_b> is not contained in N_d"));
    }
    Ok(Pieces {
        a,
        b,
        c,
        d,
        gc,
        na,
        nb,
        nd,
        join: j,
        warnings,
    })
}

/// The (a, b)-entanglement data of G (the pair is put in ascending order).
pub fn entanglement_report(g: &FiniteMatrixGroup, a: u32, b: u32) -> Result<EntanglementReport> {
    let p = pieces(g, a, b)?;
    let nontrivial = p.join.order() < p.nd.order();
    let type_fingerprint = if nontrivial {
        Some(quotient_fingerprint(&p.nd, &p.join).map_err(|e| Error::structural(e.to_string()))?)
    } else {
        None
    };
    Ok(EntanglementReport {
        level: g.level(),
        a: p.a,
        b: p.b,
        c: p.c,
        d: p.d,
        order_g_c: p.gc.order(),
        order_n_a: p.na.order(),
        order_n_b: p.nb.order(),
        order_n_d: p.nd.order(),
        order_join: p.join.order(),
        nontrivial,
        type_fingerprint,
        warnings: p.warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeEntry {
    pub a: u32,
    pub b: u32,
    pub fingerprint: GroupFingerprint,
    /// Fingerprints of the quotients of the type by its nontrivial normal subgroups.
    #[serde(skip)]
    pub proper_quotients: Vec<GroupFingerprint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementLattice {
    pub level: u32,
    pub entries: Vec<LatticeEntry>,
    pub maximal: Option<LatticeEntry>,
    /// Set when a maximal element exists and lcm(a, b) equals the level.
    pub primitive: bool,
}

fn divides(x: u32, y: u32) -> bool {
    y % x == 0
}

/// The order on entanglement types: `lo <= hi`.
///
/// Either the types agree and `hi`'s pair divides `lo`'s (in some orientation),
/// or `lo`'s type is a proper quotient of `hi`'s and `lo`'s pair divides `hi`'s.
pub fn precedes(lo: &LatticeEntry, hi: &LatticeEntry) -> bool {
    let cond1 = lo.fingerprint == hi.fingerprint
        && ((divides(hi.a, lo.a) && divides(hi.b, lo.b)) || (divides(hi.b, lo.a) && divides(hi.a, lo.b)));
    let cond2 = hi.proper_quotients.contains(&lo.fingerprint)
        && ((divides(lo.a, hi.a) && divides(lo.b, hi.b)) || (divides(lo.b, hi.a) && divides(lo.a, hi.b)));
    cond1 || cond2
}

/// All nontrivial entanglements among divisor pairs of the level, with the
/// dominating element when there is one.
pub fn entanglement_lattice(g: &FiniteMatrixGroup) -> Result<EntanglementLattice> {
    let n = g.level();
    let ds: Vec<u32> = divisors(n as u64).into_iter().map(|d| d as u32).collect();
    let pairs: Vec<(u32, u32)> = ds
        .iter()
        .flat_map(|&a| ds.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
        .collect();
    let found: Vec<Option<LatticeEntry>> = pairs
        .par_iter()
        .map(|&(a, b)| -> Result<Option<LatticeEntry>> {
            let p = pieces(g, a, b)?;
            if p.join.order() == p.nd.order() {
                return Ok(None);
            }
            let mask = normal_mask(&p.nd, &p.join).map_err(|e| Error::structural(e.to_string()))?;
            let q = Quotient::new(&p.nd, &mask);
            Ok(Some(LatticeEntry {
                a,
                b,
                fingerprint: group::fingerprint(&q),
                proper_quotients: group::proper_quotient_fingerprints(&q),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let entries: Vec<LatticeEntry> = found.into_iter().flatten().collect();
    let maximal = entries
        .iter()
        .find(|m| entries.iter().all(|e| precedes(e, m)))
        .cloned();
    let primitive = maximal
        .as_ref()
        .is_some_and(|m| lcm_u64(m.a as u64, m.b as u64) == n as u64);
    Ok(EntanglementLattice {
        level: n,
        entries,
        maximal,
        primitive,
    })
}

fn closure_of(groups: &[&FiniteMatrixGroup], level: u32) -> Result<FiniteMatrixGroup> {
    let gens: Vec<_> = groups.iter().flat_map(|g| g.generators().iter().copied()).collect();
    FiniteMatrixGroup::closure(&gens, level)
}

fn det_quotient(
    dd: &FiniteMatrixGroup,
    denom: &FiniteMatrixGroup,
) -> Result<Option<GroupFingerprint>> {
    if !denom.is_subgroup_of(dd) {
        return Err(Error::structural(
            "denominator subgroup is not contained in the determinant kernel",
        ));
    }
    let fp = quotient_fingerprint(dd, denom).map_err(|e| Error::structural(e.to_string()))?;
    Ok((!fp.is_trivial()).then_some(fp))
}

/// Abelian type: D_d / ⟨N_a, N_b, [G_c, G_c]⟩ with D_d the det ≡ 1 mod d subgroup.
pub fn abelian_type(g: &FiniteMatrixGroup, a: u32, b: u32) -> Result<Option<GroupFingerprint>> {
    let p = pieces(g, a, b)?;
    let comm = p.gc.commutator_subgroup();
    let dd = p.gc.det_kernel(p.d)?;
    let denom = closure_of(&[&p.na, &p.nb, &comm], p.c)?;
    det_quotient(&dd, &denom)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilType {
    /// D_d / ⟨N_a, [G_c,G_c], D_b⟩.
    pub from_a: Option<GroupFingerprint>,
    /// D_d / ⟨N_b, [G_c,G_c], D_a⟩.
    pub from_b: Option<GroupFingerprint>,
    /// The larger of the two.
    pub headline: Option<GroupFingerprint>,
}

pub fn weil_type(g: &FiniteMatrixGroup, a: u32, b: u32) -> Result<WeilType> {
    let p = pieces(g, a, b)?;
    let comm = p.gc.commutator_subgroup();
    let dd = p.gc.det_kernel(p.d)?;
    let da = p.gc.det_kernel(p.a)?;
    let db = p.gc.det_kernel(p.b)?;
    let from_a = det_quotient(&dd, &closure_of(&[&p.na, &comm, &db], p.c)?)?;
    let from_b = det_quotient(&dd, &closure_of(&[&p.nb, &comm, &da], p.c)?)?;
    let headline = match (&from_a, &from_b) {
        (Some(x), Some(y)) => Some(if y.order > x.order { y.clone() } else { x.clone() }),
        (x, y) => x.clone().or_else(|| y.clone()),
    };
    Ok(WeilType {
        from_a,
        from_b,
        headline,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub report: EntanglementReport,
    pub abelian: Option<GroupFingerprint>,
    pub weil: WeilType,
}

pub fn classify(g: &FiniteMatrixGroup, a: u32, b: u32) -> Result<Classification> {
    Ok(Classification {
        report: entanglement_report(g, a, b)?,
        abelian: abelian_type(g, a, b)?,
        weil: weil_type(g, a, b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn full_gl2_has_no_entanglement() {
        let g = FiniteMatrixGroup::gl2(6).unwrap();
        let r = entanglement_report(&g, 2, 3).unwrap();
        assert!(!r.nontrivial);
        assert!(r.type_fingerprint.is_none());
        assert!(abelian_type(&g, 2, 3).unwrap().is_none());
        assert!(entanglement_lattice(&g).unwrap().entries.is_empty());
        assert!(entanglement_report(&g, 2, 2).is_err());
        assert!(entanglement_report(&g, 4, 3).is_err());
    }

    #[test]
    fn serre6_entanglement() {
        let g = fixtures::group("serre6").unwrap();
        assert_eq!(g.order(), 144);
        let r = entanglement_report(&g, 3, 2).unwrap();
        assert_eq!((r.a, r.b), (2, 3));
        assert!(r.nontrivial);
        assert_eq!(r.type_fingerprint.unwrap().abelian_invariants, vec![2]);
        assert_eq!(abelian_type(&g, 2, 3).unwrap().unwrap().abelian_invariants, vec![2]);
        assert_eq!(weil_type(&g, 2, 3).unwrap().headline.unwrap().abelian_invariants, vec![2]);
        let lat = entanglement_lattice(&g).unwrap();
        assert_eq!(lat.entries.len(), 1);
        let m = lat.maximal.unwrap();
        assert_eq!((m.a, m.b), (2, 3));
        assert!(lat.primitive);
    }

    #[test]
    fn abelian_not_weil() {
        let g = fixtures::group("abelian_not_weil_6").unwrap();
        assert_eq!(abelian_type(&g, 2, 3).unwrap().unwrap().abelian_invariants, vec![2]);
        assert!(weil_type(&g, 2, 3).unwrap().headline.is_none());
    }

    #[test]
    fn twist15_and_full_15() {
        let g = fixtures::group("twist15").unwrap();
        let r = entanglement_report(&g, 3, 5).unwrap();
        assert_eq!(r.type_fingerprint.unwrap().abelian_invariants, vec![2]);
        let full = FiniteMatrixGroup::gl2(15).unwrap();
        assert!(weil_type(&full, 3, 5).unwrap().headline.is_none());
    }
}
