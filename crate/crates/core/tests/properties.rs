mod common;

use proptest::prelude::*;
use sample_sched_core::numerics::{integrate_with_breaks, rng_stream};
use sample_sched_core::pairwise::{cost_from_pairwise, kappa, pairwise_matrix, rog};
use sample_sched_core::{Distribution, Instance, Policy, QuadratureConfig};

use common::{log_uniform, random_dist, random_instance};

fn mixed(seed: u64) -> Instance {
    random_instance(&mut rng_stream(seed, 0), 2..=6, random_dist)
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_probabilities_are_complementary(seed in any::<u64>()) {
        let inst = mixed(seed);
        let m = pairwise_matrix(&inst, Policy::Sam, &cfg()).unwrap();
        prop_assert!(m.is_consistent(1e-12));
        for row in m.rows() {
            for p in row {
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }

    #[test]
    fn gap_lies_in_unit_interval_and_under_kappa_bound(seed in any::<u64>()) {
        let inst = mixed(seed);
        let m = pairwise_matrix(&inst, Policy::Sam, &cfg()).unwrap();
        let r = rog(&inst, &m).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&r), "rog {}", r);
        prop_assert!(r <= 1.0 - kappa(&inst, &m) + 1e-9);
        let cost = cost_from_pairwise(&inst, &m).unwrap();
        prop_assert!(cost >= inst.l_cost() * (1.0 - 1e-12) && cost <= inst.h_cost() * (1.0 + 1e-12));
    }

    #[test]
    fn wsept_is_best_and_its_reverse_worst(seed in any::<u64>()) {
        let inst = mixed(seed);
        let m = pairwise_matrix(&inst, Policy::Wsept, &cfg()).unwrap();
        prop_assert_eq!(rog(&inst, &m).unwrap(), 0.0);
        let rev = inst.wsept_order().reversed();
        let h = inst.expected_cost(&rev).unwrap();
        prop_assert!((h - inst.h_cost()).abs() <= 1e-12 * h);
        prop_assert!((inst.h_cost() - inst.l_cost() - inst.total_delta()).abs() <= 1e-9 * inst.h_cost());
    }

    #[test]
    fn gap_is_invariant_to_weight_and_time_scaling(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut rng = rng_stream(seed, 1);
        let n = 2 + (seed % 5) as usize;
        let jobs: Vec<(f64, f64)> = (0..n)
            .map(|_| (log_uniform(&mut rng, 0.1, 10.0), log_uniform(&mut rng, 0.1, 10.0)))
            .collect();
        let build = |wscale: f64, tscale: f64| {
            Instance::from_pairs(
                jobs.iter().map(|&(w, rate)| (w * wscale, Distribution::exponential(rate / tscale).unwrap())),
            )
            .unwrap()
        };
        let base = build(1.0, 1.0);
        let r0 = rog(&base, &pairwise_matrix(&base, Policy::Sam, &cfg()).unwrap()).unwrap();
        for scaled in [build(c, 1.0), build(1.0, c)] {
            let r = rog(&scaled, &pairwise_matrix(&scaled, Policy::Sam, &cfg()).unwrap()).unwrap();
            prop_assert!((r - r0).abs() <= 1e-9, "{} vs {}", r, r0);
        }
    }

    #[test]
    fn densities_integrate_to_one(seed in any::<u64>()) {
        let d = random_dist(&mut rng_stream(seed, 2));
        if !d.is_atomic() {
            let (lo, _) = d.support();
            let hi = d.truncation_point(1e-12);
            let total = integrate_with_breaks(|x| d.pdf(x).unwrap(), lo, hi, &d.breakpoints(), &cfg()).unwrap();
            prop_assert!((total - 1.0).abs() <= 1e-9, "{:?}: {}", d.kind(), total);
            let mean = integrate_with_breaks(|x| x * d.pdf(x).unwrap(), lo, hi, &d.breakpoints(), &cfg()).unwrap();
            prop_assert!((mean - d.mean()).abs() <= 1e-8 * d.mean(), "{:?}: {} vs {}", d.kind(), mean, d.mean());
        }
    }

    #[test]
    fn quantile_inverts_cdf(seed in any::<u64>(), u in 0.001f64..0.999) {
        let d = random_dist(&mut rng_stream(seed, 3));
        let x = d.quantile(u);
        prop_assert!(d.cdf(x) >= u - 1e-9);
        if !d.is_atomic() {
            prop_assert!((d.cdf(x) - u).abs() <= 1e-9);
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let inst = mixed(seed);
        let back = Instance::from_json(&inst.to_json().unwrap()).unwrap();
        prop_assert_eq!(inst, back);
    }
}
