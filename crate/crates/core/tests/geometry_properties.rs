use involute_core::geometry::{bracket, exterior_derivative, lie_derivative, pair, wedge, KForm};
use involute_core::random;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), n in 3usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random::chart(n);
        let f = KForm::function(&c, random::polynomial(&mut rng, c.coords(), 3, 3));
        prop_assert!(exterior_derivative(&exterior_derivative(&f).unwrap()).unwrap().is_zero());
        let w = random::one_form(&mut rng, &c, c.coords(), 2);
        prop_assert!(exterior_derivative(&exterior_derivative(&w).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn jacobi_identity(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random::chart(n);
        let [x, y, z] = [0, 1, 2].map(|_| random::field(&mut rng, &c, c.coords(), 2));
        let t1 = bracket(&x, &bracket(&y, &z).unwrap()).unwrap();
        let t2 = bracket(&y, &bracket(&z, &x).unwrap()).unwrap();
        let t3 = bracket(&z, &bracket(&x, &y).unwrap()).unwrap();
        prop_assert!(t1.add(&t2).unwrap().add(&t3).unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_commutes_with_d(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random::chart(n);
        let x = random::field(&mut rng, &c, c.coords(), 2);
        let w = random::one_form(&mut rng, &c, c.coords(), 2);
        let lhs = lie_derivative(&x, &exterior_derivative(&w).unwrap()).unwrap();
        let rhs = exterior_derivative(&lie_derivative(&x, &w).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lie_derivative_leibniz_on_pairings(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random::chart(n);
        let x = random::field(&mut rng, &c, c.coords(), 2);
        let y = random::field(&mut rng, &c, c.coords(), 2);
        let w = random::one_form(&mut rng, &c, c.coords(), 2);
        let lhs = x.apply(&pair(&w, &y).unwrap());
        let rhs = pair(&lie_derivative(&x, &w).unwrap(), &y).unwrap() + pair(&w, &bracket(&x, &y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_of_one_forms_anticommutes(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random::chart(n);
        let a = random::one_form(&mut rng, &c, c.coords(), 2);
        let b = random::one_form(&mut rng, &c, c.coords(), 2);
        prop_assert_eq!(wedge(&a, &b).unwrap(), wedge(&b, &a).unwrap().neg());
        prop_assert!(wedge(&a, &a).unwrap().is_zero());
    }
}
