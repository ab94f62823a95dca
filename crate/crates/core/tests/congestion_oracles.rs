use fronthaul_mdc::congestion::*;
use proptest::prelude::*;

/// `Σ_{t=N}^{T} C(t−1, N−1) (1−ε)^N ε^(t−N)`, term by term.
fn negative_binomial_cdf(eps: f64, n: u64, t_max: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut total = 0.0;
    for t in n..=t_max {
        let mut c = 1.0;
        for i in 0..(n - 1) {
            c *= (t - 1 - i) as f64 / (i + 1) as f64;
        }
        total += c * (1.0 - eps).powi(n as i32) * eps.powi((t - n) as i32);
    }
    total
}

#[test]
fn delivery_matches_negative_binomial_sum() {
    for eps in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9] {
        for n in 0..=8 {
            for t in 0..=20 {
                let a = delivery_probability(eps, n, t);
                let b = negative_binomial_cdf(eps, n, t);
                assert!((a - b).abs() < 1e-12, "eps {eps} N {n} T {t}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn default_setup_grid() {
    let cfg = FronthaulConfig::two_path(100e6, 0.5);
    assert_eq!(deadline_slots(&cfg), 16);
    assert!((cfg.rate_step() - 1.2).abs() < 1e-15);
    assert_eq!(packets_per_description(1.2, &cfg).unwrap(), 1);
    assert_eq!(packets_per_description(20.4, &cfg).unwrap(), 17);
}

#[test]
fn pmf_of_two_routes() {
    let pmf = description_pmf_2path(0.5, 0.5);
    assert_eq!(pmf.probs(), &[0.25, 0.5, 0.25]);
    assert_eq!(pmf.at_least_one(), 0.75);
    let w = pmf.layer_weights();
    assert_eq!((w.layer1, w.layer2), (0.75, 0.25));
}

#[test]
fn general_pmf_agrees_with_two_route_formula() {
    let a = description_pmf_general(&[0.3, 0.8]).unwrap();
    let b = description_pmf_2path(0.3, 0.8);
    for m in 0..3 {
        assert!((a.p(m) - b.p(m)).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn pmf_is_a_distribution(p in prop::collection::vec(0.0f64..=1.0, 1..8)) {
        let pmf = description_pmf_general(&p).unwrap();
        prop_assert_eq!(pmf.probs().len(), p.len() + 1);
        prop_assert!((pmf.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mean: f64 = pmf.probs().iter().enumerate().map(|(m, q)| m as f64 * q).sum();
        prop_assert!((mean - p.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn delivery_is_monotone(eps in 0.0f64..0.99, n in 1u64..10, t in 1u64..30) {
        let d = delivery_probability(eps, n, t);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(delivery_probability(eps, n, t + 1) >= d - 1e-15);
        prop_assert!(delivery_probability(eps, n + 1, t) <= d + 1e-15);
        prop_assert!(delivery_probability((eps + 0.005).min(0.999), n, t) <= d + 1e-15);
    }
}
