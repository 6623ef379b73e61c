use proptest::prelude::*;
use stuperm_core::{
    exact_permutation_null, exact_permutation_pvalue, permutation_null, permutation_test, run_method, Alternative,
    Method, PValueConvention, PairedSample, PermutationStatistic, RngState, ScenarioSpec, TestConfig,
};

const STATS: [PermutationStatistic; 2] = [PermutationStatistic::PlainRs, PermutationStatistic::StuRs];
const ALTS: [Alternative; 3] = [Alternative::Greater, Alternative::Less, Alternative::TwoSided];

fn normal_sample(n: usize, stream: u64) -> PairedSample {
    let (x, y) = ScenarioSpec::Mvn.draw(n, &mut RngState::new(31, stream).rng());
    PairedSample::new(x, y).unwrap()
}

#[test]
fn sampled_matches_exact_for_small_n() {
    for (i, n) in [4usize, 5, 6].into_iter().enumerate() {
        let s = normal_sample(n, i as u64);
        for stat in STATS {
            for alt in ALTS {
                let exact = exact_permutation_pvalue(&s, stat, alt).unwrap();
                let sampled = permutation_test(&s, stat, alt, 40_000, 8, PValueConvention::Plain).unwrap();
                // 5 binomial standard errors at p = 1/2
                assert!(
                    (exact - sampled.p_value).abs() < 0.0125,
                    "n={n} {stat:?} {alt:?}: {exact} vs {}",
                    sampled.p_value
                );
            }
        }
    }
}

#[test]
fn tails_and_ties_partition_the_exact_null() {
    for n in 3..=7 {
        let s = normal_sample(n, 100 + n as u64);
        for stat in STATS {
            let null = exact_permutation_null(&s, stat).unwrap();
            let total = null.len() as f64;
            let ties = null.values.iter().filter(|&&v| v == null.observed).count() as f64 / total;
            let g = exact_permutation_pvalue(&s, stat, Alternative::Greater).unwrap();
            let l = exact_permutation_pvalue(&s, stat, Alternative::Less).unwrap();
            assert!((g + l - (1.0 - ties)).abs() < 1e-12);
            assert!(ties >= 1.0 / total, "observed pairing is in its own null");
        }
    }
}

#[test]
fn negating_y_swaps_exact_tails() {
    let s = normal_sample(6, 7);
    let neg = s.map_y(|v| -v).unwrap();
    for stat in STATS {
        let g = exact_permutation_pvalue(&s, stat, Alternative::Greater).unwrap();
        let l = exact_permutation_pvalue(&neg, stat, Alternative::Less).unwrap();
        assert_eq!(g, l);
        let t1 = exact_permutation_pvalue(&s, stat, Alternative::TwoSided).unwrap();
        let t2 = exact_permutation_pvalue(&neg, stat, Alternative::TwoSided).unwrap();
        assert_eq!(t1, t2);
    }
}

#[test]
fn all_methods_are_invariant_to_monotone_transforms() {
    let s = normal_sample(25, 3);
    let t = s.map_x(f64::exp).unwrap().map_y(|v| 3.0 * v + 2.0).unwrap();
    let cfg = TestConfig {
        permutations: 2_000,
        seed: 5,
        convention: PValueConvention::Plain,
    };
    for m in Method::ALL {
        for alt in ALTS {
            let a = run_method(m, &s, alt, &cfg).unwrap();
            let b = run_method(m, &t, alt, &cfg).unwrap();
            assert_eq!(a.statistic, b.statistic, "{m:?}");
            assert_eq!(a.p_value, b.p_value, "{m:?}");
        }
    }
}

#[test]
fn stu_null_is_roughly_standard_after_scaling() {
    let n = 60;
    let s = normal_sample(n, 11);
    let null = permutation_null(&s, PermutationStatistic::StuRs, 20_000, 1).unwrap();
    let z: Vec<f64> = null.values.iter().map(|v| v * (n as f64).sqrt()).collect();
    let m = z.iter().sum::<f64>() / z.len() as f64;
    let var = z.iter().map(|v| (v - m).powi(2)).sum::<f64>() / z.len() as f64;
    assert!(m.abs() < 0.05, "mean {m}");
    assert!((var - 1.0).abs() < 0.1, "var {var}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn p_values_are_probabilities(stream in 0u64..10_000, n in 4usize..30, seed: u64) {
        let s = normal_sample(n, stream);
        let cfg = TestConfig { permutations: 200, seed, convention: PValueConvention::Plain };
        for m in Method::ALL {
            for alt in ALTS {
                let r = run_method(m, &s, alt, &cfg).unwrap();
                prop_assert!((0.0..=1.0).contains(&r.p_value), "{:?} {}", m, r.p_value);
            }
        }
    }

    #[test]
    fn add_one_never_below_plain(stream in 0u64..10_000, n in 3usize..20, seed: u64) {
        let s = normal_sample(n, stream);
        for stat in STATS {
            let plain = permutation_test(&s, stat, Alternative::Greater, 99, seed, PValueConvention::Plain).unwrap();
            let add = permutation_test(&s, stat, Alternative::Greater, 99, seed, PValueConvention::AddOne).unwrap();
            prop_assert!(add.p_value >= plain.p_value && add.p_value > 0.0);
        }
    }

    #[test]
    fn swapping_margins_keeps_the_statistic(stream in 0u64..10_000, n in 4usize..30) {
        let s = normal_sample(n, stream);
        let cfg = TestConfig::default();
        for m in [Method::TTest, Method::FisherZ, Method::FisherYates, Method::AsympNorm] {
            let a = run_method(m, &s, Alternative::Greater, &cfg).unwrap();
            let b = run_method(m, &s.swapped(), Alternative::Greater, &cfg).unwrap();
            prop_assert!((a.statistic - b.statistic).abs() < 1e-12);
        }
    }
}
