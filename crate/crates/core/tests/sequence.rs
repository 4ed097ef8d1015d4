use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use kronecker_stab::ksequence::{a_seq, closed_form, euler_form, kclass_of, ratio_limits, slit_params, KClass};

/// Plain i128 recurrence, run backward for negative indices.
fn oracle(n: i128, k: i64) -> i128 {
    let (mut prev, mut cur) = (0_i128, 1_i128);
    if k == 0 {
        return 0;
    }
    if k > 0 {
        for _ in 1..k {
            let next = n * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    } else {
        // a_{k-1} = n a_k - a_{k+1}
        let (mut hi, mut lo) = (1_i128, 0_i128);
        for _ in 0..(-k) {
            let next = n * lo - hi;
            hi = lo;
            lo = next;
        }
        lo
    }
}

#[test]
fn recurrence_matches_oracle() {
    for n in 1..=6_u32 {
        for k in -40..=40 {
            assert_eq!(a_seq(n, k), BigInt::from(oracle(i128::from(n), k)), "n={n} k={k}");
        }
    }
}

#[test]
fn determinant_identity_exact() {
    for n in 1..=6 {
        for k in -200..=200 {
            let lhs = a_seq(n, k).pow(2) - a_seq(n, k + 1) * a_seq(n, k - 1);
            assert!(lhs.is_one(), "n={n} k={k}");
        }
    }
}

#[test]
fn closed_form_relative_error() {
    for n in 3..=10 {
        for k in 0..=40 {
            let exact = a_seq(n, k).to_f64().unwrap();
            let approx = closed_form(n, k).unwrap();
            let err = if exact == 0.0 { approx.abs() } else { ((approx - exact) / exact).abs() };
            assert!(err < 1e-10, "n={n} k={k} err={err}");
        }
    }
}

#[test]
fn ratios_monotone_to_limits() {
    let (lo, hi) = ratio_limits(3).unwrap();
    let mut prev_up = f64::INFINITY;
    let mut prev_down = 0.0;
    for k in 1..=40 {
        let (a, b) = (a_seq(3, k).to_f64().unwrap(), a_seq(3, k + 1).to_f64().unwrap());
        assert!(b / a <= prev_up && a / b >= prev_down, "k={k}");
        prev_up = b / a;
        prev_down = a / b;
    }
    assert!((prev_up - hi).abs() < 1e-8 && (prev_down - lo).abs() < 1e-8);
    assert!(lo * hi - 1.0 < 1e-15);
}

#[test]
fn slit_values() {
    let p = slit_params(2, 30).unwrap();
    assert!((p.x[&1] - (0.5f64).ln()).abs() < 1e-15);
    for k in 1..=30 {
        assert_eq!(p.x[&k], -p.x[&-k]);
        assert!((p.x[&k] - (k as f64 / (k + 1) as f64).ln()).abs() < 1e-14);
    }
    let p = slit_params(3, 400).unwrap();
    assert!((p.b.unwrap() + 0.9624).abs() < 1e-4 && (p.c.unwrap() - 0.9624).abs() < 1e-4);
    // far slits approach the band edge
    assert!((p.x[&400] - p.b.unwrap()).abs() < 1e-12);
    assert!(slit_params(1, 3).is_err());
}

#[test]
fn euler_form_on_chain() {
    // chi(S_k, S_{k+1}) = n and chi(S_{k+1}, S_k) = 0 for consecutive objects
    for n in 1..=5 {
        for k in -10..10 {
            let a = kclass_of(n, k, 0);
            let b = kclass_of(n, k + 1, 0);
            assert_eq!(euler_form(n, &a, &b), BigInt::from(n));
            assert_eq!(euler_form(n, &b, &a), BigInt::from(0));
            assert_eq!(euler_form(n, &a, &a), BigInt::from(1));
        }
    }
    assert_eq!(kclass_of(3, 2, 1), KClass::new(1, -3));
}

proptest! {
    #[test]
    fn antisymmetry(n in 1u32..8, k in -120i64..120) {
        prop_assert_eq!(a_seq(n, -k), -a_seq(n, k));
        prop_assert_eq!(a_seq(n, k + 1), BigInt::from(n) * a_seq(n, k) - a_seq(n, k - 1));
    }
}
