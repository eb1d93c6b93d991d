use num_bigint::BigInt;
use proptest::prelude::*;

use tangle::arith::{rational_square_class, same_square_class};
use tangle::entangle::{abelian_type, entanglement_report, weil_type};
use tangle::eqcurves::{quadratic_twist, universal_curve, CurveQ};
use tangle::field::{q, qi, Field, Q};
use tangle::frobsample::{count_points, frob_signature, verify_image};
use tangle::gaussperiod::{companion_family, period_polynomial};
use tangle::modmat::{join, order_gl2, quotient_fingerprint, FiniteMatrixGroup, ResidueMatrix};
use tangle::poly::Poly;
use tangle::qpoly::{division_polynomial, poly_discriminant, small_rational_factors};
use tangle::stdgroups::{cartan_group, cartan_normalizer, CartanParams};

fn random_group(n: u32, picks: &[usize]) -> FiniteMatrixGroup {
    let gl = FiniteMatrixGroup::gl2(n).unwrap();
    let gens: Vec<ResidueMatrix> = picks.iter().map(|&i| gl.element(i % gl.order())).collect();
    FiniteMatrixGroup::closure(&gens, n).unwrap()
}

fn curve_strategy() -> impl Strategy<Value = CurveQ> {
    (-20i64..20, -20i64..20, -20i64..20, -20i64..20, -20i64..20)
        .prop_filter_map("singular", |(a1, a2, a3, a4, a6)| CurveQ::from_ints([a1, a2, a3, a4, a6], "").ok())
}

fn nonzero_q() -> impl Strategy<Value = Q> {
    (-500i64..500, 1i64..60).prop_filter_map("zero", |(n, d)| (n != 0).then(|| q(n, d)))
}

#[test]
fn gl2_orders_match_closure() {
    for n in 1u32..=12 {
        let mut gens = vec![
            ResidueMatrix::new(n, 1, 1, 0, 1).unwrap(),
            ResidueMatrix::new(n, 1, 0, 1, 1).unwrap(),
        ];
        for u in 1..n as i64 {
            if num_integer::gcd(u, n as i64) == 1 {
                gens.push(ResidueMatrix::new(n, u, 0, 0, 1).unwrap());
            }
        }
        let g = FiniteMatrixGroup::closure(&gens, n).unwrap();
        assert_eq!(g.order() as u64, order_gl2(n as u64).unwrap(), "level {n}");
    }
}

#[test]
fn standard_normalizers_have_index_two() {
    for ell in tangle::arith::primes_up_to(31).into_iter().filter(|&p| p > 2) {
        for (n, c) in [("Ns", "Cs"), ("Nn", "Cn")] {
            let big = tangle::stdgroups::standard_subgroup(n, ell).unwrap();
            let small = tangle::stdgroups::standard_subgroup(c, ell).unwrap();
            assert!(small.is_subgroup_of(&big));
            assert_eq!(big.order(), 2 * small.order(), "{n}({ell})");
        }
    }
}

#[test]
fn cm_cartan_at_inert_prime_looks_nonsplit() {
    // Δ_K = -7 is a non-residue mod 3, 5, 13.
    for ell in [3u32, 5, 13] {
        let p = tangle::stdgroups::cartan_params(-7, 1, ell).unwrap();
        let c = cartan_group(&p).unwrap();
        let cn = tangle::stdgroups::standard_subgroup("Cn", ell as u64).unwrap();
        assert_eq!(c.fingerprint(), cn.fingerprint(), "ℓ = {ell}");
        if ell <= 5 {
            let gl = FiniteMatrixGroup::gl2(ell).unwrap();
            let conj = gl.elements().any(|g| {
                let gi = g.inverse().unwrap();
                c.generators().iter().all(|x| cn.contains(&g.mul(x).unwrap().mul(&gi).unwrap()))
            });
            assert!(conj, "not conjugate at ℓ = {ell}");
        }
    }
}

#[test]
fn period_discriminants_are_squares() {
    for ell in tangle::arith::primes_up_to(100) {
        if ell % 4 == 3 && ell > 3 {
            let pp = period_polynomial(ell).unwrap();
            let d = pp.poly.discriminant();
            assert!(!Field::is_zero(&d) && tangle::arith::is_rational_square(&d), "ℓ = {ell}");
            assert_eq!(pp.coefficients[0], 1);
            assert_eq!(pp.poly.deg(), pp.e);
        }
    }
}

#[test]
fn period_splitting_law() {
    for ell in [7u64, 11, 23] {
        let pp = period_polynomial(ell).unwrap();
        let e = pp.e as u64;
        for p in tangle::arith::primes_up_to(10_000) {
            if p == ell {
                continue;
            }
            // p lies in the index-e subgroup of units iff p^((ℓ-1)/e) ≡ 1.
            let in_subgroup = tangle::arith::pow_mod(p % ell, (ell - 1) / e, ell) == 1;
            let fp = tangle::qpoly::factor_fingerprint_mod_p(&pp.poly, p).unwrap();
            let splits = !fp.ramified && fp.degree_multiset.iter().all(|&d| d == 1);
            assert_eq!(splits, in_subgroup, "ℓ = {ell}, p = {p}");
        }
    }
}

#[test]
fn division_polynomial_degrees() {
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(50));
    runner
        .run(&curve_strategy(), |e| {
            for m in 1u32..=12 {
                let f = division_polynomial(&e, m).unwrap();
                let expected = if m % 2 == 1 { (m * m - 1) / 2 } else { (m * m - 4) / 2 + 3 };
                prop_assert_eq!(f.deg() as u32, expected, "m = {}", m);
            }
            Ok(())
        })
        .unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn closure_is_a_subgroup(n in 2u32..=12, picks in proptest::collection::vec(0usize..5000, 1..4)) {
        let g = random_group(n, &picks);
        prop_assert_eq!(order_gl2(n as u64).unwrap() % g.order() as u64, 0);
        prop_assert!(g.contains(&ResidueMatrix::identity(n)));
        for x in g.generators() {
            prop_assert!(x.is_invertible());
            for y in g.generators() {
                prop_assert!(g.contains(&x.mul(y).unwrap()));
            }
            prop_assert!(g.contains(&x.inverse().unwrap()));
        }
        let fp = g.fingerprint();
        prop_assert_eq!(fp.order % fp.exponent, 0);
        if fp.is_abelian {
            prop_assert_eq!(fp.abelian_invariants.iter().product::<u64>(), fp.order as u64);
        }
    }

    #[test]
    fn reduction_kernels_are_normal(n in 2u32..=12, picks in proptest::collection::vec(0usize..5000, 1..4)) {
        let g = random_group(n, &picks);
        for e in tangle::arith::divisors(n as u64) {
            let k = g.kernel_of_reduction(e as u32).unwrap();
            prop_assert!(k.is_normal_in(&g));
        }
        let trivial = FiniteMatrixGroup::trivial(n).unwrap();
        prop_assert_eq!(quotient_fingerprint(&g, &trivial).unwrap().order, g.order() as u64);
    }

    #[test]
    fn join_contains_both(n in 2u32..=10, a in proptest::collection::vec(0usize..5000, 1..3), b in proptest::collection::vec(0usize..5000, 1..3)) {
        let h1 = random_group(n, &a);
        let h2 = random_group(n, &b);
        let j = join(&h1, &h2).unwrap();
        prop_assert!(h1.is_subgroup_of(&j) && h2.is_subgroup_of(&j));
        prop_assert_eq!(join(&h1, &h1).unwrap(), h1.clone());
        let with_trivial = join(&h1, &FiniteMatrixGroup::trivial(n).unwrap()).unwrap();
        prop_assert_eq!(with_trivial, h1);
    }

    #[test]
    fn crt_split_order_product(n in prop::sample::select(vec![6u32, 10, 12, 15]), picks in proptest::collection::vec(0usize..20000, 1..4)) {
        let g = random_group(n, &picks);
        let (parts, full) = g.crt_split().unwrap();
        let prod: usize = parts.iter().map(|p| p.order()).product();
        prop_assert_eq!(prod == g.order(), full);
        prop_assert!(prod >= g.order());
    }

    #[test]
    fn entanglement_symmetry_and_chain(n in prop::sample::select(vec![6u32, 10, 12]), picks in proptest::collection::vec(0usize..20000, 1..4)) {
        let g = random_group(n, &picks);
        let divs: Vec<u32> = tangle::arith::divisors(n as u64).into_iter().map(|d| d as u32).collect();
        for &a in &divs {
            for &b in &divs {
                if a >= b {
                    continue;
                }
                let r = entanglement_report(&g, a, b).unwrap();
                prop_assert_eq!(&r, &entanglement_report(&g, b, a).unwrap());
                let t = r.type_fingerprint.as_ref().map_or(1, |f| f.order);
                prop_assert_eq!(r.order_n_d as u64, r.order_join as u64 * t);
                let ab = abelian_type(&g, a, b).unwrap();
                prop_assert!(weil_type(&g, a, b).unwrap().headline.is_none() || ab.is_some());
                if num_integer::gcd(a, b) == 1 {
                    prop_assert!(ab.is_none() || r.nontrivial);
                }
            }
        }
    }

    #[test]
    fn full_fiber_products_have_no_coprime_entanglement(picks in proptest::collection::vec(0usize..20000, 1..4)) {
        let g = random_group(6, &picks);
        let (_, full) = g.crt_split().unwrap();
        if full {
            prop_assert!(!entanglement_report(&g, 2, 3).unwrap().nontrivial);
        }
    }

    #[test]
    fn cm_cartan_groups(dk in prop::sample::select(vec![-3i64, -4, -7, -8, -11, -19, -20, -24]), f in 1u64..4, n in 2u32..=16) {
        let p = tangle::stdgroups::cartan_params(dk, f, n).unwrap();
        let c = cartan_group(&p).unwrap();
        let nz = cartan_normalizer(&p).unwrap();
        prop_assert!(c.fingerprint().is_abelian);
        prop_assert!(c.is_normal_in(&nz));
        // At level 2 the extra generator [[-1,0],[φ,1]] can already lie in C.
        if n > 2 {
            prop_assert_eq!(nz.order(), 2 * c.order());
        } else {
            prop_assert!(nz.order() == c.order() || nz.order() == 2 * c.order());
        }
    }

    #[test]
    fn cm_cartan_crt(delta in 0u32..200, m in prop::sample::select(vec![3u32, 4, 5, 8]), k in prop::sample::select(vec![3u32, 5, 7])) {
        prop_assume!(num_integer::gcd(m, k) == 1);
        let params = |n: u32| CartanParams { delta: delta % n, phi: 0, level: n, disc_k: -4, conductor: 1 };
        let whole = cartan_group(&params(m * k)).unwrap().order();
        let parts = cartan_group(&params(m)).unwrap().order() * cartan_group(&params(k)).unwrap().order();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn twists_preserve_j(e in curve_strategy(), d in prop::sample::select(vec![-1i64, 2, -2, 3, -3, 5, 6, -7, 10, -15])) {
        let d = BigInt::from(d);
        let t = quadratic_twist(&e, &d).unwrap();
        prop_assert_eq!(t.j_invariant(), e.j_invariant());
        let back = quadratic_twist(&t, &d).unwrap();
        prop_assert_eq!(back.j_invariant(), e.j_invariant());
        prop_assert!(same_square_class(&back.discriminant(), &e.discriminant()));
        prop_assert!(tangle::eqcurves::is_isomorphic(&back, &e));
    }

    #[test]
    fn universal_curve_j_and_class(j0 in nonzero_q()) {
        prop_assume!(j0 != qi(1728));
        let c = universal_curve(&j0).unwrap();
        prop_assert_eq!(c.j_invariant(), j0.clone());
        prop_assert!(same_square_class(&c.discriminant(), &(j0 - qi(1728))));
    }

    #[test]
    fn rational_factors_divide(a in -6i64..6, b in -6i64..6, c in -6i64..6, d in -6i64..6, e in -6i64..6) {
        let f = &Poly::from_ints(&[a, b, 1]) * &Poly::from_ints(&[c, d, e, 1]);
        let fs = small_rational_factors(&f, 3).unwrap();
        for g in &fs {
            prop_assert!(f.exact_div(g).is_some());
            prop_assert!(g.deg() >= 1 && g.deg() <= 3);
        }
    }

    #[test]
    fn discriminant_of_product(f in proptest::collection::vec(-5i64..5, 2..4), g in proptest::collection::vec(-5i64..5, 2..4)) {
        let mut f = f; f.push(1);
        let mut g = g; g.push(1);
        let (f, g) = (Poly::from_ints(&f), Poly::from_ints(&g));
        let fg = &f * &g;
        let lhs: Q = poly_discriminant(&fg).unwrap();
        let r = f.resultant(&g);
        let rhs = f.discriminant() * g.discriminant() * &r * &r;
        prop_assert_eq!(lhs.clone(), rhs);
        if !Field::is_zero(&lhs) {
            prop_assert_eq!(
                rational_square_class(&lhs).unwrap(),
                rational_square_class(&(f.discriminant() * g.discriminant())).unwrap()
            );
        }
    }

    #[test]
    fn signature_congruences(e in curve_strategy(), n in prop::sample::select(vec![2u32, 3, 4, 5, 6, 8])) {
        let bad = tangle::frobsample::excluded_primes(&e, n).unwrap();
        for p in tangle::arith::primes_up_to(200).into_iter().filter(|p| !bad.contains(p)) {
            let s = frob_signature(&e, p, n).unwrap();
            let count = count_points(&e, p).unwrap();
            let predicted = (s.det_mod_n as i64 - s.trace_mod_n as i64 + 1).rem_euclid(n as i64);
            prop_assert_eq!((count % n as u64) as i64, predicted);
            prop_assert_eq!(s.fix_profile.get(&1), Some(&[1, 1]));
            for (&m1, v1) in &s.fix_profile {
                for (&m2, v2) in &s.fix_profile {
                    if m2 % m1 == 0 {
                        prop_assert_eq!((v2[0] * v2[1]) % (v1[0] * v1[1]), 0);
                        prop_assert!(v1[0] <= v2[0] && v1[1] <= v2[1]);
                    }
                }
                prop_assert!(v1[1] % v1[0] == 0 && m1 % v1[1] == 0);
            }
        }
    }

    #[test]
    fn companion_members_are_traceless(b in proptest::collection::vec(-4i64..4, 3)) {
        prop_assume!(b.iter().any(|&x| x != 0));
        let f = period_polynomial(7).unwrap().poly;
        let bq: Vec<Q> = b.iter().map(|&x| qi(x)).collect();
        let m = companion_family(&f, &bq).unwrap();
        for a in &m.alphas {
            let tr = (0..3).fold(qi(0), |acc, i| acc + &a[i][i]);
            prop_assert!(Field::is_zero(&tr));
        }
        prop_assert!(Field::is_zero(&m.member.coeff(2)));
    }
}

#[test]
fn image_verdicts_are_monotone() {
    let e = tangle::fixtures::curve("50.a1").unwrap();
    for (small, big) in [
        (tangle::fixtures::group("borel3_50a1").unwrap(), tangle::stdgroups::standard_subgroup("B", 3).unwrap()),
        (tangle::stdgroups::standard_subgroup("B", 3).unwrap(), FiniteMatrixGroup::gl2(3).unwrap()),
        (tangle::stdgroups::standard_subgroup("B", 5).unwrap(), FiniteMatrixGroup::gl2(5).unwrap()),
    ] {
        assert!(small.is_subgroup_of(&big));
        let vs = verify_image(&e, &small, 1000).unwrap();
        let vb = verify_image(&e, &big, 1000).unwrap();
        if vs.containment_violations.is_empty() {
            assert!(vb.containment_violations.is_empty());
        }
    }
}
