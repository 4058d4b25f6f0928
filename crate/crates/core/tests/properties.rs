use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sp4_core::group::{random_k, GroupElement};
use sp4_core::intmat::{self, diag};
use sp4_core::symplectic::random_gamma;
use sp4_core::{cartan_C, hnf, iwasawa_H, similitude_of, snf_exponents};

fn random_similitude(rng: &mut ChaCha8Rng, p: i64, r: u32, a: u32, b: u32) -> sp4_core::IntMat4 {
    let d = diag([p.pow(a), p.pow(b), p.pow(r - a), p.pow(r - b)]);
    intmat::mul(&intmat::mul(&random_gamma(rng, 6), &d), &random_gamma(rng, 6))
}

#[test]
fn hnf_is_left_gamma_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..200 {
        let (p, r) = if i % 2 == 0 { (2, 3) } else { (3, 2) };
        let m = random_similitude(&mut rng, p, r, 0, 1);
        assert_eq!(similitude_of(&m), Some(p.pow(r)));
        let u = random_gamma(&mut rng, 8);
        assert_eq!(hnf(&intmat::mul(&u, &m)).unwrap(), hnf(&m).unwrap());
    }
}

#[test]
fn snf_is_two_sided_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (p, r, a, b) in [(2, 4, 0, 1), (3, 3, 0, 1), (2, 4, 1, 2), (5, 2, 0, 0), (2, 6, 1, 3)] {
        let m = random_similitude(&mut rng, p, r, a, b);
        let l = random_gamma(&mut rng, 5);
        let rr = random_gamma(&mut rng, 5);
        assert_eq!(snf_exponents(&m, p, r).unwrap(), (a, b));
        assert_eq!(snf_exponents(&intmat::mul(&intmat::mul(&l, &m), &rr), p, r).unwrap(), (a, b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cartan_of_inverse(t1 in -2.0f64..2.0, t2 in -2.0f64..2.0, n in -2.0f64..2.0, x in -1.0f64..1.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_k(&mut rng).mul(&GroupElement::exp_a(t1, t2)).mul(&GroupElement::unipotent(n, [[x, 0.3], [0.3, -x]]));
        let c = cartan_C(&g).unwrap();
        let ci = cartan_C(&g.inverse()).unwrap();
        prop_assert!((c.t1 - ci.t1).abs() < 1e-9 && (c.t2 - ci.t2).abs() < 1e-9);
    }

    #[test]
    fn iwasawa_right_n_left_k_invariance(t1 in -1.5f64..1.5, t2 in -1.5f64..1.5, n in -2.0f64..2.0, x in -1.0f64..1.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_k(&mut rng).mul(&GroupElement::exp_a(t1, t2)).mul(&random_k(&mut rng));
        let h = iwasawa_H(&g).unwrap();
        let nn = GroupElement::unipotent(n, [[x, -0.2], [-0.2, 0.5]]);
        let hn = iwasawa_H(&g.mul(&nn)).unwrap();
        let hk = iwasawa_H(&random_k(&mut rng).mul(&g)).unwrap();
        prop_assert!((h.t1 - hn.t1).abs() < 1e-10 && (h.t2 - hn.t2).abs() < 1e-10);
        prop_assert!((h.t1 - hk.t1).abs() < 1e-10 && (h.t2 - hk.t2).abs() < 1e-10);
    }
}
