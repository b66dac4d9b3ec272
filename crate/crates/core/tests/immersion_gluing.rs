//! Immersion criteria on larger random maps, and uniqueness of gluing.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clocksys::behavior::{check_stoch_behavior, enumerate_stoch_behaviors};
use clocksys::clock::Horizon;
use clocksys::filtercat::{
    enumerate_filtered_maps, glue_behavior, is_immersion_kernel, is_immersion_martingale, pullback_behavior,
    FilteredMap, FilteredSpace,
};
use clocksys::gen::{random_filtration, random_space, random_system};
use clocksys::interface::small_arenas;
use clocksys::{EnumConfig, MonadTag};

fn filtered(r: &mut ChaCha8Rng, n: usize, t: usize) -> FilteredSpace {
    let null = r.gen_bool(0.3);
    let space = random_space(r, n, 4, null);
    FilteredSpace::new(space, random_filtration(r, n, t)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn criteria_agree_up_to_four_points(seed in any::<u64>()) {
        let cfg = EnumConfig::default();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let t = r.gen_range(1..=3);
        let (n, m) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let a = filtered(&mut r, n, t);
        let b = filtered(&mut r, m, t);
        for phi in enumerate_filtered_maps(&a, &b, &cfg).unwrap() {
            prop_assert_eq!(is_immersion_kernel(&phi), is_immersion_martingale(&phi, &cfg).unwrap().immersion);
        }
    }

    #[test]
    fn immersions_compose(seed in any::<u64>()) {
        let cfg = EnumConfig::default();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let t = r.gen_range(1..=2);
        let (n1, n2, n3) = (r.gen_range(1..=4), r.gen_range(1..=3), r.gen_range(1..=2));
        let (a, b, c) = (filtered(&mut r, n1, t), filtered(&mut r, n2, t), filtered(&mut r, n3, t));
        let ab: Vec<FilteredMap> = enumerate_filtered_maps(&a, &b, &cfg).unwrap().into_iter().filter(is_immersion_kernel).collect();
        let bc: Vec<FilteredMap> = enumerate_filtered_maps(&b, &c, &cfg).unwrap().into_iter().filter(is_immersion_kernel).collect();
        if let (Some(f), Some(g)) = (ab.choose(&mut r), bc.choose(&mut r)) {
            prop_assert!(is_immersion_kernel(&f.then(g).unwrap()));
        }
    }

    /// Gluing then pulling back returns the behavior we started from on
    /// positive-mass points, so the descended behavior is unique there.
    #[test]
    fn gluing_is_unique(seed in any::<u64>()) {
        let cfg = EnumConfig::with_budget(1 << 16);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let t = r.gen_range(1..=2);
        let (n, e) = (r.gen_range(1..=3), r.gen_range(1..=2));
        let omega = filtered(&mut r, n, t);
        let extra = filtered(&mut r, e, t);
        let gamma = FilteredSpace::product(&omega, &extra).unwrap();
        let table = (0..gamma.space.len()).map(|k| k / e).collect();
        let phi = FilteredMap::new(gamma.clone(), omega.clone(), table).unwrap();
        let arenas = small_arenas(2, 2);
        let arena = arenas.choose(&mut r).unwrap();
        let s = random_system(&mut r, MonadTag::Dist, 2, arena);
        let Ok(bs) = enumerate_stoch_behaviors(&s, &omega.space, &omega.filt, Horizon::new(t).unwrap(), &cfg) else { return Ok(()) };
        for b in bs.iter().take(6) {
            let up = pullback_behavior(&phi, b);
            prop_assert!(check_stoch_behavior(&s, &gamma.space, &gamma.filt, &up).unwrap());
            let down = glue_behavior(&phi, &s, &up).unwrap();
            let again = pullback_behavior(&phi, &down);
            for (p, q) in [(&up.xs, &again.xs), (&up.outs, &again.outs), (&up.ins, &again.ins)] {
                for i in 0..p.len() {
                    for g in 0..gamma.space.len() {
                        if gamma.space.prob(g) != clocksys::Rational::from_integer(0) {
                            prop_assert_eq!(p.step(i)[g], q.step(i)[g]);
                        }
                    }
                }
            }
        }
    }
}
