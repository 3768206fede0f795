//! Randomized invariants over the whole public surface.

use num_integer::Integer;
use proptest::prelude::*;

use commgraph::{
    build_graph, check_units_lemma, classify, coprime_neighbor, factorize, path3,
    prime_power_neighbor, verify_path, DomainKind, DomainSpec, ModMatrix, ModulusClass,
    DEFAULT_VERTEX_GUARD,
};

fn matrix(n: usize, m: u64) -> impl Strategy<Value = ModMatrix> {
    prop::collection::vec(0..m, n * n)
        .prop_map(move |entries| ModMatrix::from_entries(n, m, &entries))
}

fn dims() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=3, 2u64..=12)
}

proptest! {
    #[test]
    fn factorize_reconstructs_the_modulus(m in 2u64..100_000) {
        let factors = factorize(m).unwrap();
        let product: u64 = factors.iter().map(|&(p, e)| p.pow(e)).product();
        prop_assert_eq!(product, m);
        for window in factors.windows(2) {
            prop_assert!(window[0].0 < window[1].0);
        }
    }

    #[test]
    fn classify_partitions_the_modulus(m in 2u64..100_000) {
        match classify(m).unwrap() {
            ModulusClass::Prime(p) => {
                prop_assert_eq!(p, m);
                prop_assert_eq!(factorize(m).unwrap(), vec![(m, 1)]);
            }
            ModulusClass::PrimePower { p, t } => {
                prop_assert!(t >= 2);
                prop_assert_eq!(p.pow(t), m);
            }
            ModulusClass::CoprimeSplit { s, t } => {
                prop_assert_eq!(s * t, m);
                prop_assert!(s >= 2 && t >= 2);
                prop_assert_eq!(s.gcd(&t), 1);
            }
        }
    }

    #[test]
    fn determinant_is_multiplicative((n, m) in dims(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            let entries: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..m)).collect();
            ModMatrix::from_entries(n, m, &entries)
        };
        let a = sample(&mut rng);
        let b = sample(&mut rng);
        let lhs = a.mul(&b).det();
        let rhs = a.det() * b.det();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn determinant_ignores_transpose((n, m) in dims(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..m)).collect();
        let a = ModMatrix::from_entries(n, m, &entries);
        prop_assert_eq!(a.det(), a.transpose().det());
    }

    #[test]
    fn invertibility_matches_unit_determinant((n, m) in dims(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..m)).collect();
        let a = ModMatrix::from_entries(n, m, &entries);
        prop_assert_eq!(a.is_invertible(), a.det().value().gcd(&m) == 1);
    }

    #[test]
    fn commutation_is_symmetric_and_reflexive(
        (n, m) in dims(),
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            let entries: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..m)).collect();
            ModMatrix::from_entries(n, m, &entries)
        };
        let a = sample(&mut rng);
        let b = sample(&mut rng);
        prop_assert!(a.commutes_with(&a));
        prop_assert_eq!(a.commutes_with(&b), b.commutes_with(&a));
        // The kernel must agree with the definition.
        prop_assert_eq!(a.commutes_with(&b), a.mul(&b) == b.mul(&a));
    }

    #[test]
    fn encode_decode_round_trips(a in (1usize..=3, 2u64..=9).prop_flat_map(|(n, m)| matrix(n, m))) {
        let index = a.encode().unwrap();
        let back = ModMatrix::decode(a.n(), a.modulus(), index).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn text_format_round_trips(a in (1usize..=3, 2u64..=9).prop_flat_map(|(n, m)| matrix(n, m))) {
        let text = a.to_string();
        let back: ModMatrix = text.parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn units_identity_holds_on_coprime_tuples(
        u in 1u64..200,
        v in 1u64..200,
        s in 2u64..50,
        t in 2u64..50,
        k in 1u32..6,
        l in 1u32..6,
    ) {
        // Nudge each value upward until the tuple is pairwise coprime.
        fn next_coprime(mut candidate: u64, taken: &[u64]) -> u64 {
            while taken.iter().any(|&o| candidate.gcd(&o) != 1) {
                candidate += 1;
            }
            candidate
        }
        let v = next_coprime(v, &[u]);
        let s = next_coprime(s, &[u, v]);
        let t = next_coprime(t, &[u, v, s]);
        prop_assert!(check_units_lemma(u, v, s, t, k, l).unwrap());
    }

    #[test]
    fn prime_power_witness_always_commutes(
        seed in any::<u64>(),
        pt in prop::sample::select(vec![(2u64, 2u32), (2, 3), (3, 2), (5, 2)]),
    ) {
        use rand::{Rng, SeedableRng};
        let (p, t) = pt;
        let m = p.pow(t);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<u64> = (0..4).map(|_| rng.gen_range(0..m)).collect();
        let x = ModMatrix::from_entries(2, m, &entries);
        prop_assume!(!x.is_scalar());
        let w = prime_power_neighbor(&x, p, t).unwrap();
        prop_assert!(w.witness.commutes_with(&x));
        prop_assert!(!w.witness.is_scalar());
        prop_assert!(w.witness.is_invertible());
    }

    #[test]
    fn coprime_witness_always_commutes(
        seed in any::<u64>(),
        st in prop::sample::select(vec![(2u64, 3u64), (3, 2), (4, 3), (2, 5), (5, 2), (9, 2)]),
        invertible in any::<bool>(),
    ) {
        use rand::{Rng, SeedableRng};
        let (s, t) = st;
        let m = s * t;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<u64> = (0..4).map(|_| rng.gen_range(0..m)).collect();
        let x = ModMatrix::from_entries(2, m, &entries);
        prop_assume!(!x.is_scalar());
        // Invertible witnesses are only promised for invertible bases.
        let want_invertible = invertible && x.is_invertible();
        let w = coprime_neighbor(&x, s, t, want_invertible).unwrap();
        prop_assert!(w.witness.commutes_with(&x));
        prop_assert!(!w.witness.is_scalar());
        if want_invertible {
            prop_assert!(w.witness.is_invertible());
        }
    }
}

proptest! {
    // Graph builds are costlier per case, so fewer of them.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructed_paths_verify_and_match_bfs(
        seed in any::<u64>(),
        m in prop::sample::select(vec![4u64, 6, 9]),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            let entries: Vec<u64> = (0..4).map(|_| rng.gen_range(0..m)).collect();
            ModMatrix::from_entries(2, m, &entries)
        };
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        prop_assume!(!x.is_scalar() && !y.is_scalar());
        let domain = DomainSpec::new(DomainKind::MatrixRing, 2, m).unwrap();
        let w = path3(&x, &y, domain).unwrap();
        prop_assert!(w.verified);
        prop_assert!(w.len() <= 3);
        prop_assert!(verify_path(&w, DEFAULT_VERTEX_GUARD).is_pass());
        let g = build_graph(domain, DEFAULT_VERTEX_GUARD).unwrap();
        let d = g.bfs_distance(&x, &y).unwrap().unwrap();
        prop_assert!(u32::try_from(w.len()).unwrap() >= d);
        if d >= 2 {
            // Interior vertices certify the exact hop count up to the bound.
            prop_assert!(w.len() == d as usize || w.len() == 3);
        }
    }

    #[test]
    fn vertex_count_excludes_exactly_the_scalars(m in prop::sample::select(vec![2u64, 3, 4, 5, 6])) {
        let domain = DomainSpec::new(DomainKind::MatrixRing, 2, m).unwrap();
        let g = build_graph(domain, DEFAULT_VERTEX_GUARD).unwrap();
        prop_assert_eq!(g.vertex_count() as u64, m.pow(4) - m);
    }

    #[test]
    fn bfs_never_exceeds_the_diameter(
        seed in any::<u64>(),
        m in prop::sample::select(vec![4u64, 6]),
    ) {
        use rand::{Rng, SeedableRng};
        let domain = DomainSpec::new(DomainKind::MatrixRing, 2, m).unwrap();
        let g = build_graph(domain, DEFAULT_VERTEX_GUARD).unwrap();
        let diameter = g.diameter(1).unwrap().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let i = rng.gen_range(0..g.vertex_count());
        let j = rng.gen_range(0..g.vertex_count());
        let x = g.vertex_matrix(i);
        let y = g.vertex_matrix(j);
        let d = g.bfs_distance(&x, &y).unwrap().unwrap();
        prop_assert!(d <= diameter);
    }
}
