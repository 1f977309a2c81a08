//! Edge-free models decompose per node, giving a closed-form oracle that
//! scales far beyond exhaustive tuple enumeration: level m assigns label 1
//! at node v exactly when `theta_v(1) + gamma^m <= theta_v(0)` (highest
//! minimizer, ties to 1). The solver must reproduce this bitwise at any
//! size.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use divcut::diversity::{DiversityMeasure, GammaSchedule};
use divcut::energy::EnergyModel;
use divcut::solver::{solve_joint, solve_with_schedule, Strategy};
use divcut::Scale;

#[test]
fn separable_models_match_per_node_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (n, m_count, lambda) in [(50usize, 3usize, 1.0f64), (500, 6, 0.4), (2000, 8, 2.5)] {
        let unary: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(-50..=50) as f64 / 8.0, rng.random_range(-50..=50) as f64 / 8.0))
            .collect();
        let model = EnergyModel::new(n, &unary, &[], Scale::default()).unwrap();
        let measure = DiversityMeasure::hamming(m_count);
        let schedule = GammaSchedule::new(&measure, lambda, model.scale()).unwrap();

        for strategy in [Strategy::Independent, Strategy::Sequential, Strategy::Parallel(3)] {
            let sol = solve_with_schedule(&model, &schedule, strategy).unwrap();
            for level in 0..m_count {
                let gamma = schedule.gamma_units(level);
                for v in 0..n {
                    let [c0, c1] = model.unary_units(v);
                    let expected = c1 + gamma <= c0;
                    assert_eq!(
                        sol.tuple.get(level).get(v),
                        expected,
                        "n={n} M={m_count} {strategy} level={level} node={v}"
                    );
                }
            }
        }
    }
}

#[test]
fn separable_objective_matches_per_node_minimization() {
    // The joint objective of an edge-free model is the sum over nodes of
    // min over zero-counts z of: z * theta(0) + (M - z) * theta(1)
    // - lambda * delta(z); computed here straight from the quantized table.
    let mut rng = ChaCha8Rng::seed_from_u64(4048);
    for _ in 0..20 {
        let n = rng.random_range(1..=200);
        let m_count = rng.random_range(1..=9);
        let lambda = [0.1, 1.0, 10.0][rng.random_range(0..3)];
        let unary: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(-6..=6) as f64, rng.random_range(-6..=6) as f64))
            .collect();
        let model = EnergyModel::new(n, &unary, &[], Scale::default()).unwrap();
        let measure = DiversityMeasure::hamming(m_count);
        let schedule = GammaSchedule::new(&measure, lambda, model.scale()).unwrap();

        let mut expected = 0i64;
        for v in 0..n {
            let [c0, c1] = model.unary_units(v);
            expected += (0..=m_count)
                .map(|z| {
                    z as i64 * c0 + (m_count - z) as i64 * c1
                        - schedule.scaled_diversity_units(z)
                })
                .min()
                .unwrap();
        }
        let sol = solve_joint(&model, &measure, lambda, Strategy::Sequential).unwrap();
        assert_eq!(sol.joint_objective_units, expected);
    }
}
