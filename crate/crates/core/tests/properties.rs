use mapforest::forest::{decode_forest, height_process, lr_counts, sample_degree_bridge, sample_forest, vervaat_shift};
use mapforest::labels::{decompose_labels, decorate, sample_label_bridge};
use mapforest::map::{build_map, glue_degree_two, reroot_to_uniform, verify_euler};
use mapforest::metrics::{bfs, check_cactus, label_distance_violations};
use mapforest::rng::stream;
use mapforest::{DegreeSequence, LatticePath, PathKind};
use proptest::prelude::*;
use rand::Rng;

fn degrees() -> impl Strategy<Value = DegreeSequence> {
    (prop::collection::btree_map(1u64..8, 0u64..40, 1..5), 1u64..30).prop_filter_map("no faces", |(c, rho)| {
        DegreeSequence::new(c, rho).ok().filter(|d| d.stats().unwrap().upsilon <= 2000)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forest_matches_degree_sequence(d in degrees(), seed in any::<u64>()) {
        let mut rng = stream(seed, 0);
        let f = sample_forest(&d, &mut rng).unwrap();
        prop_assert_eq!(f.degree_sequence().unwrap(), d.clone());
        prop_assert_eq!(f.rho() as u64, d.rho());
        // Children are consecutive in depth-first order after the subtree
        // of each older sibling.
        for i in 0..f.len() {
            let mut next = i + 1;
            for c in f.children(i) {
                prop_assert_eq!(c, next);
                prop_assert_eq!(f.parent(c), Some(i));
                next = c + f.subtree_size(c);
            }
        }
        let h = height_process(&f);
        for i in 0..f.len() {
            prop_assert_eq!(h[i + 1] as usize, f.depth(i));
        }
    }

    #[test]
    fn bridge_shift_decode_round_trip(d in degrees(), seed in any::<u64>()) {
        let mut rng = stream(seed, 1);
        let b = sample_degree_bridge(&d, &mut rng).unwrap();
        prop_assert_eq!(b.terminal(), -(d.rho() as i64));
        let w = vervaat_shift(&b, &mut rng).unwrap();
        let f = decode_forest(&w).unwrap();
        prop_assert_eq!(f.lukasiewicz(), w.clone());
        let mut sorted_b = b.steps().to_vec();
        let mut sorted_w = w.steps().to_vec();
        sorted_b.sort_unstable();
        sorted_w.sort_unstable();
        prop_assert_eq!(sorted_b, sorted_w);
    }

    #[test]
    fn right_counts_follow_the_path(d in degrees(), seed in any::<u64>()) {
        let f = sample_forest(&d, &mut stream(seed, 2)).unwrap();
        let w = f.lukasiewicz_values();
        let mut min = i64::MAX;
        for i in 0..f.len() {
            min = min.min(w[i]);
            prop_assert_eq!(lr_counts(&f, i).r as i64, w[i] - min);
        }
    }

    #[test]
    fn labels_are_valid_and_decompose(d in degrees(), seed in any::<u64>()) {
        let mut rng = stream(seed, 3);
        let lf = decorate(sample_forest(&d, &mut rng).unwrap(), &mut rng);
        prop_assert!(lf.validate().is_ok());
        let p = decompose_labels(&lf);
        for i in 0..=lf.forest().len() {
            prop_assert_eq!(p.l[i], p.l_tilde[i] + p.boundary[i]);
        }
        prop_assert_eq!(*p.b.last().unwrap(), 0);
    }

    #[test]
    fn label_bridge_shape(k in 1usize..60, seed in any::<u64>()) {
        let b = sample_label_bridge(k, &mut stream(seed, 4)).unwrap();
        prop_assert_eq!(b.len(), k);
        prop_assert_eq!(*b.last().unwrap(), 0);
        let mut prev = 0;
        for &x in &b {
            prop_assert!(x - prev >= -1);
            prev = x;
        }
    }

    #[test]
    fn map_invariants(d in degrees(), seed in any::<u64>()) {
        let mut rng = stream(seed, 5);
        let lf = decorate(sample_forest(&d, &mut rng).unwrap(), &mut rng);
        let m = build_map(&lf).unwrap();
        prop_assert!(verify_euler(&m, &d).unwrap().pass);
        prop_assert!(m.map.bipartition().is_some());
        prop_assert!(label_distance_violations(&m, &lf).unwrap().is_empty());
        let dist = bfs(&m.map, m.star).unwrap();
        prop_assert!(dist.iter().all(|&x| x != u32::MAX));

        let v = lf.forest().len();
        let pairs: Vec<(usize, usize)> =
            (0..50).map(|_| (rng.random_range(0..v), rng.random_range(0..v))).collect();
        prop_assert!(check_cactus(&m, &lf, &pairs).unwrap().pass());

        let r = reroot_to_uniform(&m, &mut rng).unwrap();
        prop_assert_eq!(r.map.external_degree(), 2 * d.rho() as usize);
    }

    #[test]
    fn gluing_removes_digons(c1 in 1u64..30, c2 in 0u64..30, rho in 1u64..10, seed in any::<u64>()) {
        let d = DegreeSequence::new([(1, c1), (2, c2)], rho).unwrap();
        let mut rng = stream(seed, 6);
        let lf = decorate(sample_forest(&d, &mut rng).unwrap(), &mut rng);
        let m = build_map(&lf).unwrap();
        let g = glue_degree_two(&m.map).unwrap();
        prop_assert!(g.inner_face_degrees().iter().all(|&k| k != 2));
        prop_assert_eq!(g.num_vertices(), m.map.num_vertices());
        prop_assert_eq!(g.euler_characteristic(), 2);
    }

    #[test]
    fn path_text_round_trip(steps in prop::collection::vec(-1i64..5, 1..200)) {
        let p = LatticePath::new(steps, PathKind::Bridge).unwrap();
        let q = LatticePath::from_text(&p.to_text(), PathKind::Bridge).unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn degree_text_and_json_round_trip(d in degrees()) {
        prop_assert_eq!(DegreeSequence::from_text(&d.to_text()).unwrap(), d.clone());
        prop_assert_eq!(DegreeSequence::from_json(&d.to_json()).unwrap(), d);
    }
}
