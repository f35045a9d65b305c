use involute_cli::model::Model;
use involute_core::random;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_fields_parse_back(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random::chart(n);
        let x = random::field(&mut rng, &c, c.coords(), 2);
        let names: Vec<String> = c.coords().iter().map(|s| s.to_string()).collect();
        let sparse: Vec<String> = names.iter().zip(x.coeffs()).map(|(v, e)| format!("{v}: {e}")).collect();
        let positional: Vec<String> = x.coeffs().iter().map(|e| e.to_string()).collect();
        let src = format!(
            "[coordinates]\n{}\n[vectorfields]\nA = {}\nB = {}\n",
            names.join(", "),
            sparse.join(", "),
            positional.join(", ")
        );
        let m = Model::parse("gen", &src).unwrap();
        prop_assert_eq!(m.field("A").unwrap(), x.clone());
        prop_assert_eq!(m.field("B").unwrap(), x);
    }

    #[test]
    fn errors_point_inside_the_file(src in "[\\[\\]a-z0-9=,:;()+*^ \n#-]{0,120}") {
        if let Err(e) = Model::parse("junk", &src) {
            let lines = src.lines().count().max(1);
            prop_assert!(e.line >= 1 && e.line <= lines, "{e} in {lines} lines");
            prop_assert!(e.column >= 1);
        }
    }
}
