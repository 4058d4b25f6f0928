use num_complex::Complex64;
use proptest::prelude::*;
use sp4_core::CartanVector;
use sp4_spherical::cfunction::{c_function_inv_sq, c_inv_sq_closed};
use sp4_spherical::{phi, phi_at_level, SpectralParameter};

fn signed_permutations(t1: f64, t2: f64) -> [CartanVector; 8] {
    std::array::from_fn(|w| {
        let (a, b) = if w & 4 == 0 { (t1, t2) } else { (t2, t1) };
        let a = if w & 1 == 0 { a } else { -a };
        let b = if w & 2 == 0 { b } else { -b };
        CartanVector::new(a, b)
    })
}

#[test]
fn rho_parameters_give_one() {
    let h = CartanVector::new(0.7, -0.3);
    for l in [SpectralParameter::i_rho(), SpectralParameter::i_rho().neg()] {
        let v = phi(&l, &h).unwrap().value;
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-8, "{l:?}: {v}");
    }
}

#[test]
fn identity_gives_one() {
    let v = phi_at_level(&SpectralParameter::real(17.0, -4.0), &CartanVector::new(0.0, 0.0), 6).unwrap();
    assert!((v.value - 1.0).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bounded_and_weyl_invariant(l1 in -6.0f64..6.0, l2 in -6.0f64..6.0, t1 in -0.5f64..0.5, t2 in -0.5f64..0.5) {
        let l = SpectralParameter::real(l1, l2);
        let h = CartanVector::new(t1, t2);
        let base = phi(&l, &h).unwrap().value;
        prop_assert!(base.norm() <= 1.0 + 1e-8);
        prop_assert!(base.im.abs() < 1e-8);
        let w = (l1.to_bits() % 8) as usize;
        let other = phi(&l.weyl(w), &h).unwrap().value;
        prop_assert!((other - base).norm() < 1e-6, "lambda: {} vs {}", other, base);
        let hw = signed_permutations(t1, t2)[(t2.to_bits() % 8) as usize];
        let moved = phi(&l, &hw).unwrap().value;
        prop_assert!((moved - base).norm() < 1e-6, "H: {} vs {}", moved, base);
    }

    #[test]
    fn plancherel_density_is_weyl_invariant(l1 in -40.0f64..40.0, l2 in -40.0f64..40.0) {
        let base = c_inv_sq_closed(l1, l2);
        prop_assert!(base >= 0.0);
        for (a, b) in [(l2, l1), (-l1, l2), (l1, -l2), (-l2, -l1)] {
            let v = c_inv_sq_closed(a, b);
            prop_assert!((v - base).abs() <= 1e-10 * base.max(1e-300));
        }
        let both = c_function_inv_sq(l1, l2);
        if let Some(d) = both.relative_difference {
            prop_assert!(d < 1e-10);
        }
    }
}
