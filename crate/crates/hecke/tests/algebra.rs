use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sp4_hecke::multiply::{Budgets, HeckeAlgebra};
use sp4_hecke::satake::satake;
use sp4_hecke::{DoubleCosetLabel, HeckeElement};

fn primitive_labels(p: u64, rmax: u32) -> Vec<DoubleCosetLabel> {
    (1..=rmax).flat_map(|r| DoubleCosetLabel::all(p, r)).filter(|l| l.a == 0).collect()
}

fn random_element(rng: &mut ChaCha8Rng, p: u64, r: u32) -> HeckeElement {
    let mut e = HeckeElement::zero(p);
    for l in DoubleCosetLabel::all(p, r) {
        let c: i64 = rng.gen_range(-3..=3);
        e.add_term(l, BigRational::from_integer(BigInt::from(c)));
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn products_commute(i in 0usize..64, j in 0usize..64) {
        let labels = primitive_labels(2, 3);
        let (a, b) = (labels[i % labels.len()], labels[j % labels.len()]);
        let mut h = HeckeAlgebra::new(2, Budgets::default()).unwrap();
        let ab = h.primitive_product(&a, &b).unwrap();
        let ba = h.primitive_product(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn products_associate(i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let labels = primitive_labels(2, 2);
        let (a, b, c) = (labels[i % labels.len()], labels[j % labels.len()], labels[k % labels.len()]);
        let mut h = HeckeAlgebra::new(2, Budgets::default()).unwrap();
        let (a, b, c) = (HeckeElement::from_label(a), HeckeElement::from_label(b), HeckeElement::from_label(c));
        let ab = h.hecke_multiply(&a, &b).unwrap();
        let bc = h.hecke_multiply(&b, &c).unwrap();
        prop_assert_eq!(h.hecke_multiply(&ab, &c).unwrap(), h.hecke_multiply(&a, &bc).unwrap());
    }
}

#[test]
fn satake_is_multiplicative() {
    for (p, rsum) in [(2u64, 5u32), (3, 4)] {
        let mut h = HeckeAlgebra::new(p, Budgets::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        for _ in 0..10 {
            let r1 = rng.gen_range(1..rsum);
            let r2 = rng.gen_range(1..=rsum - r1);
            let t1 = random_element(&mut rng, p, r1);
            let t2 = random_element(&mut rng, p, r2);
            let prod = h.hecke_multiply(&t1, &t2).unwrap();
            let lhs = satake(&mut h, &prod).unwrap();
            let rhs = satake(&mut h, &t1).unwrap().mul(&satake(&mut h, &t2).unwrap());
            assert_eq!(lhs, rhs, "p={p} r1={r1} r2={r2}");
        }
    }
}
