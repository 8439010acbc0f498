//! Random-sample verification of listed families.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{instantiate_ordered, SolutionFamily};
use crate::engine::{
    class_residuals, classify_with, equigeodesic_residual, geodesic_vector_check_tol, max_residual,
    ClassifyOptions,
};
use crate::homspace::{random_metric, SpaceConfig};
use crate::Result;

const METRICS_PER_SAMPLE: usize = 10;
const MAX_LISTED_FAILURES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family_id: String,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    /// Largest cross-class residual over `|X|^2`.
    pub max_class_residual: f64,
    /// Largest `[X, Lambda X]_m` over `|X|^2` for partition-compatible metrics.
    pub max_metric_residual: f64,
    /// Largest geodesic-test violation over `|X|^2`.
    pub max_geodesic_violation: f64,
    /// Observed classification counts.
    pub classes: BTreeMap<String, usize>,
    pub failure_count: usize,
    /// The first few failures, in sample order.
    pub failures: Vec<String>,
    pub passed: bool,
}

struct Sample {
    class_residual: f64,
    metric_residual: f64,
    geodesic_violation: f64,
    class: Option<String>,
    failures: Vec<String>,
}

fn draw_params(family: &SolutionFamily, rng: &mut ChaCha8Rng) -> Vec<f64> {
    family
        .free_params
        .iter()
        .map(|p| {
            if family.constraints.contains(p) {
                let v = rng.gen_range(0.1..=2.0);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            } else {
                rng.gen_range(-2.0..=2.0)
            }
        })
        .collect()
}

fn run_sample(config: &SpaceConfig, family: &SolutionFamily, tol: f64, seed: u64, i: usize) -> Result<Sample> {
    let partition = family.partition(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let params = draw_params(family, &mut rng);
    let mut s = Sample {
        class_residual: 0.0,
        metric_residual: 0.0,
        geodesic_violation: 0.0,
        class: None,
        failures: Vec::new(),
    };
    let x = match instantiate_ordered(family, &params) {
        Ok(x) => x,
        Err(e) => {
            s.failures.push(format!("sample {i}: {e}"));
            return Ok(s);
        }
    };
    let n2 = x.norm().powi(2);
    if n2 == 0.0 {
        s.failures.push(format!("sample {i}: zero vector"));
        return Ok(s);
    }
    s.class_residual = max_residual(&class_residuals(config, &partition, &x)?) / n2;
    if s.class_residual >= tol {
        s.failures.push(format!(
            "sample {i}: cross-class residual {:e}",
            s.class_residual
        ));
    }
    for _ in 0..METRICS_PER_SAMPLE {
        let metric = random_metric(&partition, &mut rng);
        let r = equigeodesic_residual(config, &metric, &x)?.max_abs() / n2;
        s.metric_residual = s.metric_residual.max(r);
        let g = geodesic_vector_check_tol(config, &metric, &x, tol)?;
        s.geodesic_violation = s.geodesic_violation.max(g.max_violation / n2);
    }
    if s.metric_residual >= tol {
        s.failures.push(format!(
            "sample {i}: [X, Lambda X] residual {:e}",
            s.metric_residual
        ));
    }
    if s.geodesic_violation > tol {
        s.failures.push(format!(
            "sample {i}: geodesic violation {:e}",
            s.geodesic_violation
        ));
    }
    let cl = classify_with(config, &partition, &x, ClassifyOptions::default())?;
    if !family.claim.accepts(cl.class) {
        s.failures.push(format!(
            "sample {i}: classified {} with support {:?}, claim {}",
            cl.class, cl.support, family.claim
        ));
    }
    s.class = Some(cl.class.to_string());
    Ok(s)
}

/// Draws `samples` parameter vectors and checks cross-class residuals, the
/// equigeodesic residual and geodesic test for 10 partition-compatible
/// metrics each, and the classification claim.
pub fn verify_family(
    config: &SpaceConfig,
    family: &SolutionFamily,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let results: Vec<Sample> = (0..samples)
        .into_par_iter()
        .map(|i| run_sample(config, family, tol, seed, i))
        .collect::<Result<_>>()?;
    let mut report = VerificationReport {
        family_id: family.id.clone(),
        samples,
        tol,
        seed,
        max_class_residual: 0.0,
        max_metric_residual: 0.0,
        max_geodesic_violation: 0.0,
        classes: BTreeMap::new(),
        failure_count: 0,
        failures: Vec::new(),
        passed: samples > 0,
    };
    for s in results {
        report.max_class_residual = report.max_class_residual.max(s.class_residual);
        report.max_metric_residual = report.max_metric_residual.max(s.metric_residual);
        report.max_geodesic_violation = report.max_geodesic_violation.max(s.geodesic_violation);
        if let Some(c) = s.class {
            *report.classes.entry(c).or_default() += 1;
        }
        report.failure_count += s.failures.len();
        for f in s.failures {
            if report.failures.len() < MAX_LISTED_FAILURES {
                report.failures.push(f);
            }
        }
    }
    report.passed &= report.failure_count == 0;
    Ok(report)
}

/// [`verify_family`] over several families; family `k` uses `seed + k`.
pub fn verify_all(
    config: &SpaceConfig,
    families: &[SolutionFamily],
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    families
        .par_iter()
        .enumerate()
        .map(|(k, f)| verify_family(config, f, samples, tol, seed.wrapping_add(k as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::list_families;
    use crate::homspace::{build, SpaceFamily};

    #[test]
    fn so6_families_pass() {
        let c = build(SpaceFamily::WallachSo, &[1, 3, 2]).unwrap();
        let fams = list_families(&c, None).unwrap();
        for r in verify_all(&c, &fams, 30, 1e-10, 1).unwrap() {
            assert!(r.passed, "{}: {:?}", r.family_id, r.failures);
        }
    }

    #[test]
    fn deterministic() {
        let c = build(SpaceFamily::StiefelV2, &[5]).unwrap();
        let fams = list_families(&c, None).unwrap();
        let a = verify_family(&c, &fams[0], 20, 1e-10, 9).unwrap();
        let b = verify_family(&c, &fams[0], 20, 1e-10, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn w12_family_5_reports_failure() {
        let c = build(SpaceFamily::WallachSp3, &[]).unwrap();
        let fams = list_families(&c, None).unwrap();
        let r = verify_family(&c, &fams[4], 10, 1e-10, 3).unwrap();
        assert!(!r.passed);
        assert!(r.max_class_residual > 1e-3);
    }

    #[test]
    fn jensen_free_block_passes() {
        let c = build(SpaceFamily::StiefelV1k, &[3, 2]).unwrap();
        let fams = list_families(&c, Some("jensen")).unwrap();
        let r = verify_family(&c, &fams[41], 50, 1e-10, 5).unwrap();
        assert!(r.passed, "{:?}", r.failures);
    }
}
