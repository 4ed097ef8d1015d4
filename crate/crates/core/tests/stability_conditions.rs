use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kronecker_stab::atlas::g_k;
use kronecker_stab::ksequence::{kclass_of, KClass};
use kronecker_stab::mutation::{
    chart_relation, check_ext_exceptional, class_mutation, left_mutation_pair, right_mutation_pair, ExcLabel, Side,
};
use kronecker_stab::stability::{construct, hn_direct_sum, sigma_minus1, validate, StabilityRecord};

type V = (i128, i128);

fn chi(n: i128, x: V, y: V) -> i128 {
    x.0 * y.0 + x.1 * y.1 + n * x.0 * y.1
}

/// Right mutation written out on i128 pairs.
fn right(n: i128, cs: &[V], i: usize) -> Vec<V> {
    let (x, y) = (cs[i - 1], cs[i]);
    let m = chi(n, x, y) - chi(n, y, x);
    let mut out = cs.to_vec();
    out[i - 1] = y;
    out[i] = (m * y.0 - x.0, m * y.1 - x.1);
    out
}

fn to_v(c: &KClass) -> V {
    (c.c0.to_string().parse().unwrap(), c.c1.to_string().parse().unwrap())
}

fn to_k(v: V) -> KClass {
    KClass::new(BigInt::from(v.0), BigInt::from(v.1))
}

#[test]
fn class_mutation_matches_oracle_and_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..2000 {
        let n = rng.gen_range(1..=5_u32);
        let cs: Vec<KClass> = (0..3).map(|_| to_k((rng.gen_range(-9..=9), rng.gen_range(-9..=9)))).collect();
        let vs: Vec<V> = cs.iter().map(to_v).collect();
        let r1 = class_mutation(Side::Right, 1, &cs, n).unwrap();
        assert_eq!(r1.iter().map(to_v).collect::<Vec<_>>(), right(i128::from(n), &vs, 1));
        // L_i R_i = id
        for i in 1..=2 {
            let r = class_mutation(Side::Right, i, &cs, n).unwrap();
            assert_eq!(class_mutation(Side::Left, i, &r, n).unwrap(), cs);
            let l = class_mutation(Side::Left, i, &cs, n).unwrap();
            assert_eq!(class_mutation(Side::Right, i, &l, n).unwrap(), cs);
        }
        // R_1 R_2 R_1 = R_2 R_1 R_2
        let a = [1, 2, 1].iter().fold(cs.clone(), |acc, &i| class_mutation(Side::Right, i, &acc, n).unwrap());
        let b = [2, 1, 2].iter().fold(cs.clone(), |acc, &i| class_mutation(Side::Right, i, &acc, n).unwrap());
        assert_eq!(a, b);
    }
    assert!(class_mutation(Side::Right, 0, &[KClass::new(1, 0)], 2).is_err());
}

#[test]
fn mutations_walk_the_chain() {
    for n in 1..=4 {
        for k in -5..5 {
            let cs = vec![kclass_of(n, k - 1, 0), kclass_of(n, k, 0)];
            let r = class_mutation(Side::Right, 1, &cs, n).unwrap();
            assert_eq!(r, vec![kclass_of(n, k, 0), kclass_of(n, k + 1, 0)]);
        }
    }
    let p = (ExcLabel::new(0, 0), ExcLabel::new(1, 0));
    assert_eq!(right_mutation_pair(p).unwrap(), (ExcLabel::new(1, 0), ExcLabel::new(2, 0)));
    assert_eq!(left_mutation_pair(p).unwrap(), (ExcLabel::new(-1, 0), ExcLabel::new(0, 0)));
    assert!(right_mutation_pair((ExcLabel::new(0, 0), ExcLabel::new(2, 0))).is_err());
}

#[test]
fn ext_exceptional_shifts() {
    for n in 1..=4 {
        for (p, q) in [(1, 0), (2, 0), (1, -1), (2, -1)] {
            let pair = (ExcLabel::new(0, p), ExcLabel::new(1, q));
            assert!(check_ext_exceptional(n, pair).is_ok(), "n={n} p={p} q={q}");
        }
        // the standard heart <S_0, S_1> has Hom^0(S_0, S_1) = C^n
        assert!(check_ext_exceptional(n, (ExcLabel::new(0, 0), ExcLabel::new(1, 0))).is_err());
    }
    let rel = chart_relation(2, &[ExcLabel::new(0, 1), ExcLabel::new(1, 0)]).unwrap();
    assert!(rel.is_some());
}

fn random_charge(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = rng.gen_range(0.01..10.0_f64);
    let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    Complex64::from_polar(r, t)
}

fn check_surjective(n: u32, z0: Complex64, z1: Complex64) {
    let rec = construct(n, z0, z1).unwrap();
    let report = validate(&rec);
    assert!(report.is_valid(), "n={n} {z0} {z1}: {:?}", report.violations);
    for c in rec.charges {
        assert!(c.im > 0.0 || (c.im == 0.0 && c.re < 0.0));
    }
    let (a, b) = rec.central_charge();
    assert!((a - z0).norm() < 1e-12 * (1.0 + z0.norm()) && (b - z1).norm() < 1e-12 * (1.0 + z1.norm()));
    // the chart point reproduces the charges through g_k
    if let Some(pt) = rec.chart_point() {
        let (g0, g1) = g_k(n, pt.k, pt.z, pt.w).unwrap();
        let scale = 1.0 + z0.norm() + z1.norm();
        assert!((g0 - z0).norm() < 1e-9 * scale && (g1 - z1).norm() < 1e-9 * scale);
    }
}

#[test]
fn construct_is_surjective() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=6);
        check_surjective(n, random_charge(&mut rng), random_charge(&mut rng));
    }
    for n in 1..=4 {
        let z = Complex64::new(0.3, -1.2);
        check_surjective(n, Complex64::new(0.0, 0.0), z);
        check_surjective(n, z, Complex64::new(0.0, 0.0));
        // real axis boundaries
        check_surjective(n, Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0));
        check_surjective(n, Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0));
    }
    assert!(construct(2, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).is_err());
}

#[test]
fn degenerate_charges_land_in_side_charts() {
    let n = 3;
    let r = construct(n, Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)).unwrap();
    assert_eq!(r.chart(), Some(1));
    let w = r.quotient().unwrap().w;
    assert!((w - Complex64::new(3f64.ln(), 2.0 * std::f64::consts::PI)).norm() < 1e-12);
    let r = construct(n, Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)).unwrap();
    assert_eq!(r.chart(), Some(-1));
    let w = r.quotient().unwrap().w;
    assert!((w - Complex64::new(-(3f64.ln()), 2.0 * std::f64::consts::PI)).norm() < 1e-12);
}

#[test]
fn sigma_minus1_and_hn() {
    for n in 1..=4 {
        let s = sigma_minus1(n);
        assert!(validate(&s).is_valid());
        let hn = hn_direct_sum(&s, &[(ExcLabel::new(0, 1), 2), (ExcLabel::new(1, 0), 1), (ExcLabel::new(1, 1), 1)])
            .unwrap();
        let phases: Vec<f64> = hn.factors.iter().map(|f| f.phase).collect();
        assert!(phases.windows(2).all(|p| p[0] > p[1]));
        assert!((hn.phi_plus() - 1.25).abs() < 1e-12);
        assert!((hn.phi_minus() - 0.25).abs() < 1e-12);
    }
    let s = sigma_minus1(2);
    assert!(hn_direct_sum(&s, &[(ExcLabel::new(5, 0), 1)]).is_err());
}

#[test]
fn invalid_records_are_rejected() {
    let bad = StabilityRecord::new(
        2,
        (ExcLabel::new(0, 0), ExcLabel::new(1, 0)),
        [Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)],
    );
    let report = validate(&bad);
    assert!(report.violations.len() >= 2);
}

proptest! {
    #[test]
    fn construct_round_trip(n in 1u32..7, r0 in 0.01f64..5.0, t0 in -3.14f64..3.14, r1 in 0.01f64..5.0, t1 in -3.14f64..3.14) {
        check_surjective(n, Complex64::from_polar(r0, t0), Complex64::from_polar(r1, t1));
    }
}
