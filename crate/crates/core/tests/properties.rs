use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use unimap::cperm::{
    count_by_cycle_type, count_cperms, expected_cycle_count_exact, expected_cycle_count_log, lambda_bound,
    valid_cycle_types, Count, CountMode, CPermSampler, ExactCountTable, LogCountTable,
};
use unimap::cycles::{enumerate_short_cycles, shortest_cycle, EnumerationOptions};
use unimap::maps::{build_underlying_graph, kernelize, Kernel};
use unimap::oracle::naive_cycle_enumeration;
use unimap::rng::stream_from_seed;
use unimap::stats::{intensity, TOL};
use unimap::validate::random_small_instance;

fn genus_for(n: usize, pick: usize) -> usize {
    pick % ((n - 1) / 2 + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_permutations_are_odd_with_the_right_genus(
        n in 1usize..80,
        pick in any::<usize>(),
        log in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let g = genus_for(n, pick);
        let mode = if log { CountMode::Log } else { CountMode::Exact };
        let sampler = CPermSampler::new(n, g, mode).unwrap();
        let mut rng = stream_from_seed(seed);
        for _ in 0..8 {
            let s = sampler.sample(&mut rng);
            prop_assert_eq!(s.n(), n);
            prop_assert_eq!(s.genus(), g);
            prop_assert_eq!(s.cycle_count(), n - 2 * g);
            prop_assert!(s.cycles().iter().all(|c| c.len() % 2 == 1));
            let mut seen = s.images();
            seen.sort_unstable();
            prop_assert!(seen.iter().enumerate().all(|(i, &x)| i == x as usize));
        }
    }

    #[test]
    fn kernel_matches_naive_search(seed in any::<u64>()) {
        let mut rng = stream_from_seed(seed);
        let dt = random_small_instance(30, 5, &mut rng).unwrap();
        let graph = build_underlying_graph(&dt.tree, &dt.sigma).unwrap();
        let cap = dt.n_edges();
        let naive = naive_cycle_enumeration(&graph, cap).unwrap();
        let opts = EnumerationOptions::new(cap as u32);
        let fast = Kernel::from_decorated_tree(&dt);
        prop_assert_eq!(&enumerate_short_cycles(&fast, &opts).records, &naive);
        prop_assert_eq!(&enumerate_short_cycles(&kernelize(&graph), &opts).records, &naive);
        for short_cap in 1..cap as u32 {
            let some = enumerate_short_cycles(&fast, &EnumerationOptions::new(short_cap)).records;
            let want: Vec<_> = naive.iter().filter(|r| r.len <= short_cap).copied().collect();
            prop_assert_eq!(some, want);
        }
    }

    #[test]
    fn kernel_keeps_the_cycle_rank(seed in any::<u64>()) {
        let mut rng = stream_from_seed(seed);
        let dt = random_small_instance(200, 20, &mut rng).unwrap();
        let graph = build_underlying_graph(&dt.tree, &dt.sigma).unwrap();
        prop_assert!(graph.is_connected());
        prop_assert_eq!(graph.cyclomatic_number(), 2 * dt.genus());
        let k = Kernel::from_decorated_tree(&dt);
        if dt.genus() > 0 {
            prop_assert_eq!(k.n_edges() + 1, k.n_vertices() + 2 * dt.genus());
            prop_assert_eq!(k.components(), 1);
            prop_assert!(k.total_weight() <= dt.n_edges() as u64);
        } else {
            prop_assert!(k.is_empty());
        }
    }

    #[test]
    fn shortest_cycle_is_the_minimum_of_the_full_list(seed in any::<u64>(), loops in any::<bool>()) {
        let mut rng = stream_from_seed(seed);
        let dt = random_small_instance(60, 6, &mut rng).unwrap();
        let k = Kernel::from_decorated_tree(&dt);
        let all = enumerate_short_cycles(&k, &EnumerationOptions::new(dt.n_edges() as u32));
        prop_assert_eq!(shortest_cycle(&k, 1, loops), all.shortest(loops));
    }

    #[test]
    fn intensity_is_additive(a in 0.0f64..4.0, b in 0.0f64..4.0, c in 0.0f64..4.0) {
        let mut v = [a, b, c];
        v.sort_by(f64::total_cmp);
        let whole = intensity(v[0], v[2], TOL).unwrap();
        let parts = intensity(v[0], v[1], TOL).unwrap() + intensity(v[1], v[2], TOL).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12);
    }

    #[test]
    fn cycle_mean_bound_on_a_genus_grid(n in 1_000usize..100_000, frac in 0.0f64..1.0) {
        // g ranges over [1, min(n/8, 1000)]
        let g_max = (n / 8).min(1000);
        let g = 1 + ((g_max - 1) as f64 * frac) as usize;
        let table = LogCountTable::new(n, g).unwrap();
        for nu in [3usize, 5, 7, 9, 11, 21] {
            let e = expected_cycle_count_log(n, g, nu, &table).unwrap();
            let b = lambda_bound(n, g, nu).unwrap();
            prop_assert!(e <= b * (1.0 + 1e-9), "n={} g={} nu={}: {} > {}", n, g, nu, e, b);
        }
    }

    #[test]
    fn three_cycle_deficit_is_small(n in 7usize..400, frac in 0.0f64..1.0) {
        // every g < n/6
        let g = 1 + (((n - 1) / 6 - 1) as f64 * frac) as usize;
        prop_assume!(6 * g < n);
        let table = ExactCountTable::new(n, g).unwrap();
        let e = expected_cycle_count_exact(n, g, 3, &table).unwrap();
        let deficit = BigRational::from_integer(g.into()) - e;
        prop_assert!(deficit >= BigRational::zero());
        prop_assert!(deficit <= BigRational::new((5 * g * g).into(), (n - 6 * g).into()));
    }
}

#[test]
fn cycle_types_sum_to_the_table() {
    for n in 1..=11 {
        for g in 0..=(n - 1) / 2 {
            let by_type: BigUint = valid_cycle_types(n, g).iter().map(count_by_cycle_type).sum();
            let Count::Exact(h) = count_cperms(n, g, CountMode::Exact).unwrap() else {
                unreachable!()
            };
            assert_eq!(by_type, h, "n={n} g={g}");
        }
    }
}
