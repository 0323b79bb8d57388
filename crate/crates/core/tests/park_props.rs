mod common;

use common::{dot, q, r, random_inner, random_symmetric, random_symmetric_inner};
use maprad_core::park::{
    center_of_symmetry, is_parkable, parkability_report, parks_at, section_polytope, Hyperplane,
    PolytopeH, Verdict,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_plane(rng: &mut ChaCha8Rng, dim: usize) -> Hyperplane {
    loop {
        let normal: Vec<_> = (0..dim).map(|_| r(rng.random_range(-3..=3))).collect();
        if normal.iter().any(|c| !c.is_zero()) {
            return Hyperplane { normal, offset: q(rng.random_range(-6..=6), 4) };
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn returned_parking_points_work(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.random_range(1..=3);
        let b = random_symmetric(&mut rng, dim);
        let c = random_inner(&mut rng, &b);
        let res = is_parkable(&c, &b).unwrap();
        if let Some(v) = res.v {
            prop_assert!(res.parkable);
            prop_assert!(parks_at(&c, &b, &v).unwrap());
        }
    }

    #[test]
    fn symmetric_sets_park_at_their_center(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.random_range(1..=3);
        let b = random_symmetric(&mut rng, dim);
        let (c, z) = random_symmetric_inner(&mut rng, &b);
        prop_assert!(is_parkable(&c, &b).unwrap().parkable);
        prop_assert!(parks_at(&c, &b, &z).unwrap());
        prop_assert_eq!(center_of_symmetry(&c).unwrap(), Some(z));
    }

    #[test]
    fn sections_are_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = rng.random_range(1..=3);
        let b = random_symmetric(&mut rng, dim);
        let h = random_plane(&mut rng, dim);
        let sec = section_polytope(&b, &h).unwrap();
        for v in &sec.vertices {
            prop_assert_eq!(dot(&h.normal, v), h.offset.clone());
            prop_assert!(b.contains(v));
        }
    }

    #[test]
    fn planar_sections_always_park(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_symmetric(&mut rng, 2);
        let sample: Vec<Hyperplane> = (0..6).map(|_| random_plane(&mut rng, 2)).collect();
        let rep = parkability_report(&b, &sample).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::NoViolationFound);
    }
}

#[test]
fn cube_reports_refute_and_disc_proxy_does_not() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cube = PolytopeH::cube(3, r(1));
    let mut sample: Vec<Hyperplane> = (0..10).map(|_| random_plane(&mut rng, 3)).collect();
    sample.push(Hyperplane { normal: vec![r(1), r(1), r(1)], offset: r(1) });
    let rep = parkability_report(&cube, &sample).unwrap();
    assert_eq!(rep.verdict, Verdict::RefutedByWitness);
    assert_eq!(rep.entries.len(), 11);
    assert_eq!(rep.entries[10].parkable, Some(false));

    let disc = PolytopeH::disc_proxy(8);
    let sample: Vec<Hyperplane> = (0..30).map(|_| random_plane(&mut rng, 2)).collect();
    let rep = parkability_report(&disc, &sample).unwrap();
    assert_eq!(rep.verdict, Verdict::NoViolationFound);
    for e in &rep.entries {
        assert!(e.section.len() <= 2);
    }
}
