use equigeo::catalog::{list_families, printed_spaces, printed_system, verify_family, Claim};
use equigeo::engine::{
    classify_with, compare_with_printed, generate_system, ClassifyOptions, CoefficientVector,
};
use equigeo::homspace::{build, build_space, MetricClassPartition, SpaceFamily};
use equigeo::solver::{exhaustiveness_report, solve, SolverOptions};

#[test]
fn printed_systems_compare() {
    let mut unequal = Vec::new();
    for spec in printed_spaces() {
        let c = build_space(&spec).unwrap();
        let (partition, text) = printed_system(&spec).unwrap();
        let p = MetricClassPartition::parse(&c, partition).unwrap();
        let cmp = compare_with_printed(&generate_system(&c, &p).unwrap(), text).unwrap();
        assert_eq!(cmp.generated, cmp.printed, "{spec}");
        if !cmp.equal {
            unequal.push((spec.to_string(), cmp.missing, cmp.extra));
        }
    }
    // the transcribed Jensen system carries one sign that direct computation contradicts
    assert_eq!(unequal.len(), 1, "{unequal:?}");
    assert_eq!(unequal[0].0, "stiefel-v1k(3,2)");
    assert_eq!(unequal[0].1, ["a23*a25 + a34*a45 + a13*a15 = 0"]);
    assert_eq!(unequal[0].2, ["a23*a25 - a34*a45 + a13*a15 = 0"]);
}

#[test]
fn solver_output_is_equigeodesic_and_cataloged() {
    let c = build(SpaceFamily::StiefelV2, &[5]).unwrap();
    let p = MetricClassPartition::singleton(&c);
    let system = generate_system(&c, &p).unwrap();
    let opts = SolverOptions {
        restarts: 200,
        seed: 11,
        ..SolverOptions::default()
    };
    let result = solve(&system, &opts).unwrap();
    assert!(result.converged_count > 0);
    for s in &result.solutions {
        let x = CoefficientVector::new(s.coordinates.clone());
        let cl = classify_with(&c, &p, &x, ClassifyOptions::default()).unwrap();
        assert!(cl.class.is_equigeodesic(), "{:?}", s.coordinates);
    }
    let families = list_families(&c, None).unwrap();
    let report = exhaustiveness_report(&c, &result, &families).unwrap();
    assert_eq!(report.solutions, result.solutions.len());
    assert!(report.unmatched.is_empty(), "{:?}", report.unmatched);
}

#[test]
fn einstein_families_need_the_coarse_partition() {
    let c = build(SpaceFamily::StiefelV2, &[6]).unwrap();
    let fams = list_families(&c, Some("einstein")).unwrap();
    assert_eq!(fams.len(), 2);
    let spread = fams.iter().find(|f| f.claim != Claim::Trivial).unwrap();
    let r = verify_family(&c, spread, 20, 1e-10, 4).unwrap();
    assert!(r.passed, "{:?}", r.failures);
    let mut strict = spread.clone();
    strict.partition = String::new();
    let r = verify_family(&c, &strict, 20, 1e-10, 4).unwrap();
    assert!(!r.passed);
}

#[test]
fn verification_reports_are_reproducible() {
    let c = build(SpaceFamily::WallachSo, &[1, 3, 2]).unwrap();
    let fams = list_families(&c, None).unwrap();
    let a = serde_json::to_string(&verify_family(&c, &fams[2], 40, 1e-10, 21).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_family(&c, &fams[2], 40, 1e-10, 21).unwrap()).unwrap();
    assert_eq!(a, b);
}
