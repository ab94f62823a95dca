use fronthaul_mdc::channel::{received_covariance, sample_channel, ChannelSizes, Geometry, PowerSplit};
use fronthaul_mdc::linalg::{c64, CMatrix, HermitianMatrix};
use fronthaul_mdc::rate_region::*;
use proptest::prelude::*;

fn pd_matrix(n: usize, entries: &[f64], shift: f64) -> HermitianMatrix {
    let b = CMatrix::from_fn(n, n, |i, j| c64::new(entries[2 * (i * n + j)], entries[2 * (i * n + j) + 1]));
    &HermitianMatrix::gram(&b) + &HermitianMatrix::scaled_identity(n, shift)
}

fn entries() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 18)
}

#[test]
fn scalar_joint_rate_closed_form() {
    let (s, a, b) = (5.0f64, 0.7f64, 2.3f64);
    let q = MdcQuantizer::new(HermitianMatrix::scaled_identity(1, a), HermitianMatrix::scaled_identity(1, b)).unwrap();
    let expected = ((a * b + s * a + 2.0 * s * b) * (s + a).powi(2) / (a * a * b * (a + 2.0 * s))).log2();
    let got = g_sum(&HermitianMatrix::scaled_identity(1, s), &q).unwrap();
    assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
}

#[test]
fn joint_rate_at_least_twice_side_rate() {
    // Two side descriptions with Ω₀ → ∞ still need their mutual information on top.
    let sy = HermitianMatrix::scaled_identity(1, 4.0);
    let q = MdcQuantizer::new(HermitianMatrix::identity(1), HermitianMatrix::scaled_identity(1, 1e12)).unwrap();
    let g1 = g_individual(&sy, &q).unwrap();
    assert!(g_sum(&sy, &q).unwrap() >= 2.0 * g1 - 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi_bounds_log_det(n in 1usize..=3, ea in entries(), eb in entries(), sa in 0.05f64..3.0, sb in 0.05f64..3.0) {
        let a = pd_matrix(n, &ea, sa);
        let b = pd_matrix(n, &eb, sb);
        let la = a.log2_det().unwrap();
        prop_assert!(phi(&a, &b).unwrap() >= la - 1e-9 * la.abs().max(1.0));
        prop_assert!((phi(&a, &a).unwrap() - la).abs() <= 1e-9 * la.abs().max(1.0));
    }

    #[test]
    fn surrogates_bound_exact_rates(
        n in 1usize..=3,
        e in prop::collection::vec(entries(), 4),
        s in prop::collection::vec(0.05f64..3.0, 4),
    ) {
        let sy = &pd_matrix(n, &e[0], 0.5) + &HermitianMatrix::identity(n);
        let q = MdcQuantizer::new(pd_matrix(n, &e[1], s[0]), pd_matrix(n, &e[2], s[1])).unwrap();
        let qt = MdcQuantizer::new(pd_matrix(n, &e[3], s[2]), pd_matrix(n, &e[1], s[3])).unwrap();
        let at = LinearizationPoint { split: PowerSplit::even(1, 1.0), quantizer: qt.clone() };
        let g1 = g_individual(&sy, &q).unwrap();
        let gs = g_sum(&sy, &q).unwrap();
        prop_assert!(surrogate_g1(&q, &at, &sy).unwrap() >= g1 - 1e-9 * g1.max(1.0));
        prop_assert!(surrogate_gsum(&q, &at, &sy).unwrap() >= gs - 1e-9 * gs.max(1.0));
        let here = LinearizationPoint { split: PowerSplit::even(1, 1.0), quantizer: q.clone() };
        prop_assert!((surrogate_g1(&q, &here, &sy).unwrap() - g1).abs() <= 1e-9 * g1.max(1.0));
        prop_assert!((surrogate_gsum(&q, &here, &sy).unwrap() - gs).abs() <= 1e-9 * gs.max(1.0));
    }

    #[test]
    fn surrogate_objective_minorizes(
        seed in 0u64..10_000,
        frac in 0.0f64..=1.0,
        frac_t in 0.0f64..=1.0,
        w in prop::collection::vec(0.01f64..20.0, 4),
        weights in (0.0f64..=1.0, 0.0f64..=1.0),
    ) {
        let ch = sample_channel(&Geometry::default(), &ChannelSizes::uniform(2, 2, 1), 1.0, 300.0, seed).unwrap();
        let p = ch.power();
        let weights = LayerWeights { layer1: weights.0.max(weights.1), layer2: weights.0.min(weights.1) };
        let split = PowerSplit::from_layer1(vec![frac * p, (1.0 - frac) * p], p).unwrap();
        let q = MdcQuantizer::scaled_identity(2, w[0]);
        let q = MdcQuantizer::new(q.omega, HermitianMatrix::scaled_identity(2, w[1])).unwrap();
        let at = LinearizationPoint {
            split: PowerSplit::from_layer1(vec![frac_t * p; 2], p).unwrap(),
            quantizer: MdcQuantizer::new(HermitianMatrix::scaled_identity(2, w[2]), HermitianMatrix::scaled_identity(2, w[3])).unwrap(),
        };
        let exact = weighted_objective(&split, &q, weights, &ch).unwrap();
        prop_assert!(surrogate_objective(&split, &q, &at, weights, &ch).unwrap() <= exact + 1e-9 * exact.max(1.0));
        let here = LinearizationPoint { split: split.clone(), quantizer: q.clone() };
        prop_assert!((surrogate_objective(&split, &q, &here, weights, &ch).unwrap() - exact).abs() <= 1e-9 * exact.max(1.0));
        let _ = received_covariance(&ch);
    }
}
