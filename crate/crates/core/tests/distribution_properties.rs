use involute_core::distribution::{coform_kernel, Distribution};
use involute_core::geometry::{bracket, lie_derivative, pair, VectorField};
use involute_core::random;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> (ChaCha8Rng, Distribution) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=5);
    let m = rng.gen_range(1..n);
    let c = random::chart(n);
    let d = random::distribution(&mut rng, &c, m, c.coords(), 2);
    (rng, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn annihilator_round_trip(seed in any::<u64>()) {
        let (_, d) = instance(seed);
        let ann = d.annihilator().unwrap();
        prop_assert_eq!(ann.len() + d.rank(), d.chart().dim());
        for w in &ann {
            for g in d.tangent() {
                prop_assert!(pair(w, g).unwrap().is_zero());
            }
        }
        for v in coform_kernel(d.chart(), &ann).unwrap() {
            prop_assert!(d.contains_vf(&v).unwrap().0.is_member());
        }
    }

    #[test]
    fn annihilating_forms_satisfy_the_bracket_identity(seed in any::<u64>()) {
        let (mut rng, d) = instance(seed);
        let c = d.chart().clone();
        let ann = d.annihilator().unwrap();
        let w = random::form_combination(&mut rng, &ann, c.coords(), 1);
        let y = random::combination(&mut rng, d.tangent(), c.coords(), 1);
        let x = random::field(&mut rng, &c, c.coords(), 2);
        let total = pair(&lie_derivative(&x, &w).unwrap(), &y).unwrap() + pair(&w, &bracket(&x, &y).unwrap()).unwrap();
        prop_assert!(total.is_zero());
    }

    #[test]
    fn form_and_bracket_criteria_agree(seed in any::<u64>(), translation in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(1..n);
        let c = random::chart(n);
        // coefficients avoid the last coordinate, so its translation is a symmetry
        let d = random::distribution(&mut rng, &c, m, &c.coords()[..n - 1], 2);
        let x = if translation { VectorField::coordinate(&c, n - 1) } else { random::field(&mut rng, &c, c.coords(), 1) };
        let by_brackets = d.is_symmetry_brackets(&x).unwrap().holds();
        prop_assert_eq!(by_brackets, d.is_symmetry_forms(&x).unwrap().holds());
        if translation {
            prop_assert!(by_brackets);
        }
    }
}
