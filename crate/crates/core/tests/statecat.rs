mod common;

use common::{ab, random_morphism, random_object};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use strmach_core::statecat::{compose, tensor};

proptest! {
    #[test]
    fn composite_degrees_add_and_stay_valid(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let cat = ab();
        let (a, b, c) = (random_object(&mut rng, &cat), random_object(&mut rng, &cat), random_object(&mut rng, &cat));
        let f = random_morphism(&mut rng, &cat, &a, &b);
        let g = random_morphism(&mut rng, &cat, &b, &c);
        let gf = compose(&g, &f).unwrap();
        prop_assert_eq!(gf.degree(), f.degree() + g.degree());
        prop_assert!(gf.validate().is_empty(), "{:?}", gf.validate());
        for x in 0..a.len() {
            prop_assert_eq!(gf.transition()[x], g.transition()[f.transition()[x]]);
        }
    }

    #[test]
    fn tensor_degrees_add_and_stay_valid(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let cat = ab();
        let (a, b, c, d) = (
            random_object(&mut rng, &cat),
            random_object(&mut rng, &cat),
            random_object(&mut rng, &cat),
            random_object(&mut rng, &cat),
        );
        let f = random_morphism(&mut rng, &cat, &a, &b);
        let g = random_morphism(&mut rng, &cat, &c, &d);
        let fg = tensor(&f, &g).unwrap();
        prop_assert_eq!(fg.degree(), f.degree() + g.degree());
        prop_assert_eq!(fg.source().len(), a.len() * c.len());
        prop_assert!(fg.validate().is_empty());
    }

    #[test]
    fn composition_is_associative_on_transitions(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let cat = ab();
        let objs: Vec<_> = (0..4).map(|_| random_object(&mut rng, &cat)).collect();
        let f = random_morphism(&mut rng, &cat, &objs[0], &objs[1]);
        let g = random_morphism(&mut rng, &cat, &objs[1], &objs[2]);
        let h = random_morphism(&mut rng, &cat, &objs[2], &objs[3]);
        let left = compose(&h, &compose(&g, &f).unwrap()).unwrap();
        let right = compose(&compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(left.transition(), right.transition());
        prop_assert_eq!(left.degree(), right.degree());
    }
}
