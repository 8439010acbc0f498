//! Random-restart Levenberg-Marquardt search for unit-norm zeros of a
//! generated system, with support clustering and family matching.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{instantiate_ordered, Assignment, SolutionFamily};
use crate::engine::{CoefficientVector, QuadraticSystem};
use crate::homspace::SpaceConfig;
use crate::{Error, Result};

const MAX_ITER: usize = 200;
const MIN_STEP: f64 = 1e-14;
const DEDUP_DISTANCE: f64 = 1e-4;
const MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub restarts: usize,
    /// Convergence threshold on the largest equation value.
    pub tol: f64,
    pub seed: u64,
    /// Relative module-norm threshold for support signatures.
    pub threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            restarts: 1000,
            tol: 1e-12,
            seed: 0,
            threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Unit-norm coordinates in `m` order.
    pub coordinates: Vec<f64>,
    /// Largest absolute equation value.
    pub residual: f64,
    pub support: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub solutions: Vec<Solution>,
    pub restarts_used: usize,
    /// Restarts that reached the tolerance, before deduplication.
    pub converged_count: usize,
    pub seed: u64,
    pub tol: f64,
    pub threshold: f64,
}

impl SolverResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("solver JSON: {e}")))
    }

    /// Solutions whose support touches more than one module.
    pub fn multi_module(&self) -> impl Iterator<Item = &Solution> {
        self.solutions.iter().filter(|s| s.support.len() > 1)
    }
}

/// Labels of modules whose block norm exceeds `threshold * |X|`.
pub fn support_signature(config: &SpaceConfig, x: &CoefficientVector, threshold: f64) -> Result<Vec<String>> {
    config.check_shape(x)?;
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::InvalidInput("the zero vector has no support".into()));
    }
    Ok(x.module_norms(config)
        .iter()
        .zip(&config.modules)
        .filter(|(n, _)| **n > threshold * norm)
        .map(|(_, m)| m.label.clone())
        .collect())
}

fn support_of(system: &QuadraticSystem, x: &[f64], threshold: f64) -> Vec<String> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    system
        .modules
        .iter()
        .filter(|m| {
            let n = x[m.start..m.start + m.len].iter().map(|v| v * v).sum::<f64>().sqrt();
            n > threshold * norm
        })
        .map(|m| m.label.clone())
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// One damped Gauss-Newton run on the unit sphere. Returns the final point
/// and its residual.
fn descend(system: &QuadraticSystem, mut x: Vec<f64>) -> (Vec<f64>, f64) {
    let n = x.len();
    let mut mu = 1e-3;
    let mut f = system.evaluate(&x);
    let mut cost: f64 = f.iter().map(|v| v * v).sum();
    for _ in 0..MAX_ITER {
        if max_abs(&f) < 1e-300 {
            break;
        }
        let rows = system.jacobian(&x);
        let xv = DVector::from_vec(x.clone());
        // Jacobian restricted to the tangent space of the sphere at x
        let proj = DMatrix::identity(n, n) - &xv * xv.transpose();
        let j = DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]) * proj;
        let jt = j.transpose();
        let mut a = &jt * &j;
        let g = &jt * DVector::from_vec(f.clone());
        let scale = a.diagonal().max().max(1e-12);
        for i in 0..n {
            a[(i, i)] += mu * scale;
        }
        let Some(chol) = a.cholesky() else {
            mu *= 2.0;
            continue;
        };
        let step = -chol.solve(&g);
        let step_norm = step.norm();
        let mut trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        normalize(&mut trial);
        let tf = system.evaluate(&trial);
        let tcost: f64 = tf.iter().map(|v| v * v).sum();
        if tcost < cost {
            x = trial;
            f = tf;
            cost = tcost;
            mu = (mu / 2.0).max(1e-15);
        } else {
            mu *= 2.0;
        }
        if step_norm < MIN_STEP || mu > 1e12 {
            break;
        }
    }
    let r = max_abs(&f);
    (x, r)
}

fn distance_up_to_sign(a: &[f64], b: &[f64]) -> f64 {
    let plus = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let minus = a.iter().zip(b).map(|(x, y)| (x + y).powi(2)).sum::<f64>().sqrt();
    plus.min(minus)
}

/// Fixes the sign so the first coordinate above 1e-9 in magnitude is positive.
fn canonical_sign(x: &mut [f64]) {
    if let Some(v) = x.iter().find(|v| v.abs() > 1e-9) {
        if *v < 0.0 {
            x.iter_mut().for_each(|y| *y = -*y);
        }
    }
}

/// Minimizes the system residual from `restarts` random unit vectors.
/// Restart `i` draws from its own stream of a ChaCha generator seeded with
/// `seed`, so the result depends only on the options.
pub fn solve(system: &QuadraticSystem, opts: &SolverOptions) -> Result<SolverResult> {
    if opts.restarts == 0 || opts.tol <= 0.0 || opts.threshold <= 0.0 {
        return Err(Error::InvalidInput(
            "restarts, tol and threshold must be positive".into(),
        ));
    }
    let n = system.dim();
    let runs: Vec<(Vec<f64>, f64)> = (0..opts.restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            normalize(&mut x);
            descend(system, x)
        })
        .collect();
    let mut converged: Vec<Solution> = runs
        .into_iter()
        .filter(|(_, r)| *r < opts.tol)
        .map(|(mut x, residual)| {
            canonical_sign(&mut x);
            let support = support_of(system, &x, opts.threshold);
            Solution {
                coordinates: x,
                residual,
                support,
            }
        })
        .collect();
    let converged_count = converged.len();
    converged.sort_by(|a, b| {
        a.support
            .cmp(&b.support)
            .then_with(|| a.coordinates.partial_cmp(&b.coordinates).expect("finite"))
    });
    let mut solutions: Vec<Solution> = Vec::new();
    for s in converged {
        let dup = solutions.iter().any(|t| {
            t.support == s.support && distance_up_to_sign(&t.coordinates, &s.coordinates) < DEDUP_DISTANCE
        });
        if !dup {
            solutions.push(s);
        }
    }
    Ok(SolverResult {
        solutions,
        restarts_used: opts.restarts,
        converged_count,
        seed: opts.seed,
        tol: opts.tol,
        threshold: opts.threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionMatch {
    pub solution: usize,
    /// Family id, when one reproduces the solution.
    pub family: Option<String>,
    /// Infinity-norm distance to the best family instance found.
    pub distance: f64,
    pub support: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustivenessReport {
    pub solutions: usize,
    pub matched: usize,
    pub matches: Vec<SolutionMatch>,
    /// Indices of solutions outside every family.
    pub unmatched: Vec<usize>,
    /// Families that reproduced at least one solution.
    pub families_hit: Vec<String>,
}

/// Reads free parameters off the solution coordinates at each family's free
/// positions, instantiates, and compares. Families whose constraint values
/// are within 1e-12 of zero at the solution are skipped.
pub fn exhaustiveness_report(
    config: &SpaceConfig,
    result: &SolverResult,
    families: &[SolutionFamily],
) -> Result<ExhaustivenessReport> {
    let mut matches = Vec::new();
    let mut hit = BTreeSet::new();
    for (i, s) in result.solutions.iter().enumerate() {
        let x = CoefficientVector::new(s.coordinates.clone());
        config.check_shape(&x)?;
        let mut best: (f64, Option<String>) = (f64::INFINITY, None);
        for f in families {
            let params: Vec<f64> = f
                .free_params
                .iter()
                .map(|p| {
                    let pos = f
                        .assignments
                        .iter()
                        .position(|a| matches!(a, Assignment::Free(q) if q == p))
                        .expect("free parameter has a position");
                    s.coordinates[pos]
                })
                .collect();
            let Ok(inst) = instantiate_ordered(f, &params) else {
                continue;
            };
            let d = inst.sub(&x).max_abs();
            if d < best.0 {
                best = (d, Some(f.id.clone()));
            }
        }
        let family = if best.0 < MATCH_TOL { best.1.clone() } else { None };
        if let Some(id) = &family {
            hit.insert(id.clone());
        }
        matches.push(SolutionMatch {
            solution: i,
            family,
            distance: best.0,
            support: s.support.clone(),
        });
    }
    let unmatched: Vec<usize> = matches
        .iter()
        .filter(|m| m.family.is_none())
        .map(|m| m.solution)
        .collect();
    Ok(ExhaustivenessReport {
        solutions: matches.len(),
        matched: matches.len() - unmatched.len(),
        matches,
        unmatched,
        families_hit: hit.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::list_families;
    use crate::engine::{class_residuals, generate_system, max_residual};
    use crate::homspace::{build, MetricClassPartition, SpaceFamily};

    fn opts(restarts: usize, seed: u64) -> SolverOptions {
        SolverOptions {
            restarts,
            seed,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn w6_solutions_single_module() {
        let c = build(SpaceFamily::WallachU3, &[]).unwrap();
        let sys = generate_system(&c, &MetricClassPartition::singleton(&c)).unwrap();
        let r = solve(&sys, &opts(200, 7)).unwrap();
        assert!(r.converged_count > 0);
        assert_eq!(r.multi_module().count(), 0);
        for s in &r.solutions {
            let n: f64 = s.coordinates.iter().map(|v| v * v).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn solutions_are_sound_and_deterministic() {
        let c = build(SpaceFamily::StiefelV2, &[4]).unwrap();
        let p = MetricClassPartition::singleton(&c);
        let sys = generate_system(&c, &p).unwrap();
        let r = solve(&sys, &opts(100, 3)).unwrap();
        assert_eq!(r, solve(&sys, &opts(100, 3)).unwrap());
        for s in &r.solutions {
            let x = CoefficientVector::new(s.coordinates.clone());
            assert!(max_residual(&class_residuals(&c, &p, &x).unwrap()) < 10.0 * r.tol);
        }
    }

    #[test]
    fn v2r4_solutions_match_families() {
        let c = build(SpaceFamily::StiefelV2, &[4]).unwrap();
        let sys = generate_system(&c, &MetricClassPartition::singleton(&c)).unwrap();
        let r = solve(&sys, &opts(200, 11)).unwrap();
        let fams = list_families(&c, None).unwrap();
        let rep = exhaustiveness_report(&c, &r, &fams).unwrap();
        assert!(rep.unmatched.is_empty(), "{:?}", rep.matches);
    }

    #[test]
    fn support_signature_threshold() {
        let c = build(SpaceFamily::WallachU3, &[]).unwrap();
        let mut x = CoefficientVector::new(vec![1e-15; 6]);
        x.values[4] = 1.0;
        assert_eq!(support_signature(&c, &x, 1e-6).unwrap(), ["m23"]);
        assert!(support_signature(&c, &CoefficientVector::zeros(6), 1e-6).is_err());
    }

    #[test]
    fn bad_options_rejected() {
        let c = build(SpaceFamily::WallachU3, &[]).unwrap();
        let sys = generate_system(&c, &MetricClassPartition::singleton(&c)).unwrap();
        assert!(solve(&sys, &opts(0, 1)).is_err());
    }
}
