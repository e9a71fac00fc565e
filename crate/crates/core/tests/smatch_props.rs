mod common;

use common::{brute_force_matched, parse, RandGraph};
use hrdialogue::amr::{serialize_penman, sorted_triples};
use hrdialogue::smatch::{smatch_exact, smatch_hillclimb};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pair(seed: u64) -> (RandGraph, RandGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (RandGraph::random(&mut rng, 5), RandGraph::random(&mut rng, 5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_matches_brute_force(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        let (ga, gb) = (parse(&a.penman("a")), parse(&b.penman("b")));
        let r = smatch_exact(&ga, &gb).unwrap();
        prop_assert_eq!(r.left_triples, a.triples().len());
        prop_assert_eq!(r.right_triples, b.triples().len());
        prop_assert_eq!(r.matched, brute_force_matched(&a, &b));
    }

    #[test]
    fn hillclimb_never_beats_exact(seed in any::<u64>(), restarts in 0usize..6) {
        let (a, b) = pair(seed);
        let (ga, gb) = (parse(&a.penman("a")), parse(&b.penman("b")));
        let exact = smatch_exact(&ga, &gb).unwrap();
        let hill = smatch_hillclimb(&ga, &gb, restarts, seed);
        prop_assert!(hill.matched <= exact.matched);
        prop_assert_eq!(&hill, &smatch_hillclimb(&ga, &gb, restarts, seed));
    }

    #[test]
    fn symmetric_and_reflexive(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        let (ga, gb) = (parse(&a.penman("a")), parse(&b.penman("b")));
        prop_assert_eq!(smatch_exact(&ga, &gb).unwrap().f1, smatch_exact(&gb, &ga).unwrap().f1);
        prop_assert_eq!(smatch_exact(&ga, &ga).unwrap().f1, 1.0);
    }

    #[test]
    fn serialize_parse_round_trip(seed in any::<u64>()) {
        let (a, _) = pair(seed);
        let g = parse(&a.penman("v"));
        let again = parse(&serialize_penman(&g));
        prop_assert_eq!(sorted_triples(&g), sorted_triples(&again));
    }
}
