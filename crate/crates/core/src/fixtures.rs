//! Embedded example data: groups, curves and the CM j-invariant table.

use serde::Serialize;

use crate::eqcurves::CurveQ;
use crate::error::{Error, Result};
use crate::modmat::{FiniteMatrixGroup, GroupSpec};

type M = [[i64; 2]; 2];

const I2: M = [[1, 0], [0, 1]];

/// Entrywise CRT of a mod-2 and a mod-3 matrix into level 6.
fn crt6(u: M, v: M) -> M {
    let f = |i: usize, j: usize| (3 * u[i][j] + 4 * v[i][j]).rem_euclid(6);
    [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]]
}

/// Entrywise CRT of a mod-3 and a mod-5 matrix into level 15.
fn crt15(u: M, v: M) -> M {
    let f = |i: usize, j: usize| (10 * u[i][j] + 6 * v[i][j]).rem_euclid(15);
    [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]]
}

pub const GROUP_NAMES: &[&str] = &["serre6", "twist15", "abelian_not_weil_6", "borel3_50a1", "borel5_50a1"];

/// Generators of a named group fixture.
pub fn group_spec(name: &str) -> Result<GroupSpec> {
    let (level, generators) = match name {
        // pairs (g, h) in GL2(F_2) x GL2(F_3) with sign(g) = (det h / 3)
        "serre6" => (
            6,
            vec![
                crt6([[0, 1], [1, 0]], [[2, 0], [0, 1]]),
                crt6([[1, 1], [1, 0]], I2),
                crt6(I2, [[1, 1], [0, 1]]),
                crt6(I2, [[1, 0], [1, 1]]),
            ],
        ),
        // Borel mod 3 and mod 5 twisted by a common quadratic character
        "twist15" => (
            15,
            vec![
                crt15([[2, 0], [0, 1]], I2),
                crt15(I2, [[2, 0], [0, 1]]),
                crt15([[1, 1], [0, 1]], I2),
                crt15(I2, [[1, 1], [0, 1]]),
                crt15([[-1, 0], [0, -1]], [[-1, 0], [0, -1]]),
            ],
        ),
        // Klein four-group whose determinant is still surjective mod 6
        "abelian_not_weil_6" => (
            6,
            vec![
                crt6([[1, 1], [0, 1]], [[-1, 0], [0, -1]]),
                crt6(I2, [[1, 0], [0, -1]]),
            ],
        ),
        "borel3_50a1" => (3, vec![[[2, 0], [0, 1]], [[1, 1], [0, 1]]]),
        "borel5_50a1" => (5, vec![[[2, 0], [0, 1]], [[1, 1], [0, 1]]]),
        _ => return Err(Error::invalid(format!("unknown group fixture {name:?}"))),
    };
    Ok(GroupSpec { level, generators })
}

pub fn group(name: &str) -> Result<FiniteMatrixGroup> {
    group_spec(name)?.build()
}

/// (name, a-invariants, description)
pub const CURVES: &[(&str, [i64; 5], &str)] = &[
    ("E1", [0, 1, 0, -3, 1], "CM by Z[sqrt(-2)], base curve of the twist diagram"),
    ("E2", [0, -1, 0, -13, 21], "CM by Z[sqrt(-2)], twist partner of E1"),
    ("E3", [0, 1, 0, -13, -21], "CM by Z[sqrt(-2)], twist partner of E1"),
    ("E4", [0, -1, 0, -3, -1], "E1 twisted by -1"),
    ("50.a1", [1, 0, 1, -126, -552], "Borel images mod 3 and mod 5, Serre field Q(sqrt(-2))"),
    ("37.a1", [0, 0, 1, -1, 0], "surjective mod-3 image"),
    ("x3p1", [0, 0, 0, 0, 1], "y^2 = x^3 + 1"),
    ("x3mx", [0, 0, 0, -1, 0], "y^2 = x^3 - x, square discriminant"),
];

pub fn curve(name: &str) -> Result<CurveQ> {
    let (n, a, _) = CURVES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| Error::invalid(format!("unknown curve fixture {name:?}")))?;
    CurveQ::from_ints(*a, *n)
}

/// One row of the table of CM j-invariants with non-maximal image.
#[derive(Clone, Debug, Serialize)]
pub struct CmRow {
    pub j: i64,
    pub disc_k: i64,
    pub conductor: i64,
    pub labels: &'static str,
    /// Square class of j - 1728, computed by hand from the factorization.
    pub j_minus_1728_class: i64,
}

const fn row(j: i64, disc_k: i64, conductor: i64, labels: &'static str, class: i64) -> CmRow {
    CmRow {
        j,
        disc_k,
        conductor,
        labels,
        j_minus_1728_class: class,
    }
}

pub const CM_TABLE: &[CmRow] = &[
    row(54000, -3, 2, "36.a1, 36.a2", 3),
    row(-12288000, -3, 3, "27.a1, 27.a2", -3),
    row(-3375, -7, 1, "49.a2, 49.a4", -7),
    row(16581375, -7, 2, "49.a1, 49.a3", 7),
    row(-32768, -11, 1, "121.b1, 121.b2", -11),
    row(-884736, -19, 1, "361.a1, 361.a2", -19),
    row(-884736000, -43, 1, "1849.b1, 1849.b2", -43),
    row(-147197952000, -67, 1, "4489.b1, 4489.b2", -67),
    row(-262537412640768000, -163, 1, "26569.a1, 26569.a2", -163),
];

#[derive(Clone, Debug, Serialize)]
pub struct FixtureInfo {
    pub kind: &'static str,
    pub name: String,
    pub description: String,
}

/// Everything embedded, for `--list-fixtures`.
pub fn list() -> Vec<FixtureInfo> {
    let mut out = Vec::new();
    let gdesc = |n: &str| match n {
        "serre6" => "index-2 fiber product in GL(2,Z/6) where the sign character mod 2 meets the quadratic character of det mod 3",
        "twist15" => "Borel mod 3 times Borel mod 5, twisted by one shared quadratic character",
        "abelian_not_weil_6" => "level-6 Klein four-group with an abelian (2,3)-entanglement that is not explained by roots of unity",
        "borel3_50a1" => "displayed mod-3 image shape of 50.a1",
        _ => "displayed mod-5 image shape of 50.a1",
    };
    for n in GROUP_NAMES {
        out.push(FixtureInfo {
            kind: "group",
            name: n.to_string(),
            description: gdesc(n).into(),
        });
    }
    for (n, _, d) in CURVES {
        out.push(FixtureInfo {
            kind: "curve",
            name: n.to_string(),
            description: d.to_string(),
        });
    }
    for n in crate::eqcurves::FAMILY_NAMES {
        out.push(FixtureInfo {
            kind: "family",
            name: n.to_string(),
            description: family_description(n).into(),
        });
    }
    for r in CM_TABLE {
        out.push(FixtureInfo {
            kind: "cm_j",
            name: r.j.to_string(),
            description: format!("CM discriminant {}, conductor {}, curves {}", r.disc_k, r.conductor, r.labels),
        });
    }
    out
}

fn family_description(n: &str) -> &'static str {
    match n {
        "hesse3" => "Hesse cubic family with a rational 3-torsion point",
        "rs9" => "curves whose 2-division field lies in Q(zeta_9)",
        "isog5" => "rational 5-isogeny family with quadratic factor of psi_5",
        "isog7" => "rational 7-isogeny family with cubic factor of psi_7",
        "tors4" => "rational 4-torsion family in the parameter d",
        "serre_p" => "j = p* t^2 + 1728 style family with Serre field Q(sqrt(p*))",
        "jfam1" | "jfam2" | "jfam3" => "non-Weil abelian (2,7)-entanglement of type Z/3",
        _ => "non-Weil abelian (3,5)-entanglement of type Z/2",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        assert_eq!(group("serre6").unwrap().order(), 144);
        assert_eq!(group("twist15").unwrap().order(), 240);
        assert_eq!(group("abelian_not_weil_6").unwrap().order(), 4);
        assert_eq!(group("borel5_50a1").unwrap().order(), 20);
        assert!(group("nope").is_err());
    }

    #[test]
    fn curves_build() {
        for (n, _, _) in CURVES {
            curve(n).unwrap();
        }
    }
}
