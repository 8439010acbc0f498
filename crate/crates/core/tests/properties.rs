use std::sync::OnceLock;

use equigeo::engine::{
    bracket_m, classify_vector, class_residuals, cross_residuals, equigeodesic_residual,
    generate_system, max_residual, CoefficientVector, QuadraticSystem,
};
use equigeo::homspace::{build_space, MetricClassPartition, MetricSpec, SpaceConfig, SpaceSpec};
use proptest::prelude::*;

const SPECS: [&str; 10] = [
    "wallach-so(1,3,2)",
    "wallach-so(2,2,2)",
    "stiefel-v2(4)",
    "stiefel-v2(6)",
    "stiefel-v1k(3,2)",
    "wallach-u3",
    "wallach-sp3",
    "sphere-u(2)",
    "sphere-u(3)",
    "sphere-sp(2)",
];

fn configs() -> &'static [SpaceConfig] {
    static CONFIGS: OnceLock<Vec<SpaceConfig>> = OnceLock::new();
    CONFIGS.get_or_init(|| {
        SPECS
            .iter()
            .map(|s| build_space(&s.parse::<SpaceSpec>().unwrap()).unwrap())
            .collect()
    })
}

fn vector(c: &SpaceConfig, raw: &[f64]) -> CoefficientVector {
    CoefficientVector::new((0..c.dim_m()).map(|i| raw[i % raw.len()] * (1.0 + i as f64 * 0.01)).collect())
}

fn lambdas(c: &SpaceConfig, raw: &[f64]) -> MetricSpec {
    MetricSpec::generic((0..c.modules.len()).map(|k| raw[k % raw.len()]).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metric_independence_identity(
        k in 0..SPECS.len(),
        raw in prop::collection::vec(-3.0f64..3.0, 1..40),
        lam in prop::collection::vec(0.1f64..10.0, 1..6),
    ) {
        let c = &configs()[k];
        let x = vector(c, &raw);
        let metric = lambdas(c, &lam);
        let direct = equigeodesic_residual(c, &metric, &x).unwrap();
        let mut expanded = CoefficientVector::zeros(c.dim_m());
        for ((i, j), r) in cross_residuals(c, &x).unwrap() {
            expanded = expanded.add(&r.scaled(metric.lambdas[j] - metric.lambdas[i]));
        }
        let n2 = x.norm().powi(2);
        prop_assert!(direct.sub(&expanded).max_abs() <= 1e-12 * n2.max(1e-300));
    }

    #[test]
    fn bracket_is_antisymmetric(
        k in 0..SPECS.len(),
        a in prop::collection::vec(-2.0f64..2.0, 1..30),
        b in prop::collection::vec(-2.0f64..2.0, 1..30),
    ) {
        let c = &configs()[k];
        let x = vector(c, &a);
        let y = vector(c, &b);
        let xy = bracket_m(c, &x, &y).unwrap();
        let yx = bracket_m(c, &y, &x).unwrap();
        prop_assert!(xy.add(&yx).max_abs() <= 1e-12 * (1.0 + x.norm() * y.norm()));
    }

    #[test]
    fn classification_is_scale_invariant(
        k in 0..SPECS.len(),
        module in 0usize..4,
        raw in prop::collection::vec(-2.0f64..2.0, 1..20),
        s in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0],
    ) {
        let c = &configs()[k];
        let x = vector(c, &raw);
        prop_assume!(x.norm() > 1e-6);
        let single = x.restrict(c, module % c.modules.len());
        for v in [x, single] {
            if v.norm() == 0.0 {
                continue;
            }
            let a = classify_vector(c, &v).unwrap();
            let b = classify_vector(c, &v.scaled(s)).unwrap();
            prop_assert_eq!(a.class, b.class);
            prop_assert_eq!(a.support, b.support);
        }
    }

    #[test]
    fn residual_scales_quadratically(
        k in 0..SPECS.len(),
        raw in prop::collection::vec(-2.0f64..2.0, 1..20),
        s in 0.1f64..10.0,
    ) {
        let c = &configs()[k];
        let x = vector(c, &raw);
        let r1 = max_residual(&cross_residuals(c, &x).unwrap());
        let r2 = max_residual(&cross_residuals(c, &x.scaled(s)).unwrap());
        prop_assert!((r2 - s * s * r1).abs() <= 1e-10 * (1.0 + r2));
    }

    #[test]
    fn system_matches_class_residuals(
        k in 0..SPECS.len(),
        raw in prop::collection::vec(-2.0f64..2.0, 1..30),
    ) {
        let c = &configs()[k];
        let p = MetricClassPartition::singleton(c);
        let system = generate_system(c, &p).unwrap();
        let x = vector(c, &raw);
        let eq = system.evaluate(&x.values).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = max_residual(&class_residuals(c, &p, &x).unwrap());
        // integer normalization rescales rows, so only simultaneous vanishing is compared
        prop_assert_eq!(eq < 1e-9, res < 1e-9);
    }

    #[test]
    fn vector_json_round_trip(raw in prop::collection::vec(-1e6f64..1e6, 0..40)) {
        let x = CoefficientVector::new(raw);
        let text = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<CoefficientVector>(&text).unwrap(), x);
    }
}

#[test]
fn systems_round_trip_through_json() {
    for c in configs() {
        let system = generate_system(c, &MetricClassPartition::singleton(c)).unwrap();
        assert_eq!(QuadraticSystem::from_json(&system.to_json()).unwrap(), system);
    }
}

#[test]
fn coarser_partition_keeps_solutions() {
    // a vector in the span of one class satisfies every coarsening
    let c = build_space(&"stiefel-v2(5)".parse().unwrap()).unwrap();
    let fine = MetricClassPartition::parse(&c, "m0|m1,m2").unwrap();
    let coarse = MetricClassPartition::parse(&c, "m0,m1,m2").unwrap();
    assert!(MetricClassPartition::singleton(&c).refines(&fine));
    assert!(fine.refines(&coarse) && !coarse.refines(&fine));
    let mut x = CoefficientVector::zeros(c.dim_m());
    for (i, v) in x.values.iter_mut().enumerate() {
        if c.modules[c.module_of(i)].label != "m0" {
            *v = 1.0 + i as f64;
        }
    }
    assert_eq!(max_residual(&class_residuals(&c, &fine, &x).unwrap()), 0.0);
    assert!(class_residuals(&c, &coarse, &x).unwrap().is_empty());
}
