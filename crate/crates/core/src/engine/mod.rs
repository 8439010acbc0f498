//! Projected brackets, equigeodesic residuals and the geodesic-vector test.
//!
//! For `X = X_1 + ... + X_s` with `X_i` in module `m_i` and a diagonal metric
//! `Lambda`, `[X, Lambda X]_m = sum_{i<j} (lambda_j - lambda_i) [X_i, X_j]_m`.
//! The pairwise terms are what [`cross_residuals`] returns, and their
//! vanishing is the equigeodesic condition for every metric.

mod classify;
mod system;

pub use classify::{classify_vector, classify_with, ClassifyOptions, Classification, VectorClass};
pub use system::{
    compare_with_printed, generate_system, parse_equation, parse_printed_system, BilinearEquation,
    ModuleRange, PrintedComparison, QuadraticSystem, Term,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::homspace::{MetricClassPartition, MetricSpec, SpaceConfig};
use crate::{Error, Result};

/// A vector of `m`, one coefficient per `m` basis position in module order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Euclidean norm of the coefficients.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.values.iter().map(|v| v * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    /// Component of the vector inside module `k`, zero elsewhere.
    pub fn restrict(&self, config: &SpaceConfig, k: usize) -> Self {
        let r = config.module_ranges()[k].clone();
        let mut out = vec![0.0; self.values.len()];
        out[r.clone()].copy_from_slice(&self.values[r]);
        Self::new(out)
    }

    /// Euclidean norm of each module block.
    pub fn module_norms(&self, config: &SpaceConfig) -> Vec<f64> {
        config
            .module_ranges()
            .into_iter()
            .map(|r| self.values[r].iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }
}

/// `[X, Y]_m`, read off the `m` part of the ambient structure constants.
pub fn bracket_m(
    config: &SpaceConfig,
    x: &CoefficientVector,
    y: &CoefficientVector,
) -> Result<CoefficientVector> {
    config.check_shape(x)?;
    config.check_shape(y)?;
    Ok(bracket_unchecked(config, &x.values, &y.values))
}

fn bracket_unchecked(config: &SpaceConfig, x: &[f64], y: &[f64]) -> CoefficientVector {
    let mut out = vec![0.0; config.dim_m()];
    for (p, &xp) in x.iter().enumerate() {
        if xp == 0.0 {
            continue;
        }
        for (q, &yq) in y.iter().enumerate() {
            if yq == 0.0 {
                continue;
            }
            for &(r, c) in config.m_bracket(p, q) {
                out[r] += c * xp * yq;
            }
        }
    }
    CoefficientVector::new(out)
}

/// `Lambda X`: module block `i` scaled by `lambda_i`.
pub fn apply_metric(
    config: &SpaceConfig,
    metric: &MetricSpec,
    x: &CoefficientVector,
) -> Result<CoefficientVector> {
    metric.check(config)?;
    config.check_shape(x)?;
    let mut out = x.values.clone();
    for (k, r) in config.module_ranges().into_iter().enumerate() {
        for v in &mut out[r] {
            *v *= metric.lambdas[k];
        }
    }
    Ok(CoefficientVector::new(out))
}

/// `[X, Lambda X]_m`; zero exactly when `X` is geodesic-orbit for `Lambda`
/// in the equigeodesic sense.
pub fn equigeodesic_residual(
    config: &SpaceConfig,
    metric: &MetricSpec,
    x: &CoefficientVector,
) -> Result<CoefficientVector> {
    let lx = apply_metric(config, metric, x)?;
    Ok(bracket_unchecked(config, &x.values, &lx.values))
}

/// `[X_i, X_j]_m` for every module pair `i < j`.
pub fn cross_residuals(
    config: &SpaceConfig,
    x: &CoefficientVector,
) -> Result<BTreeMap<(usize, usize), CoefficientVector>> {
    config.check_shape(x)?;
    let parts: Vec<CoefficientVector> =
        (0..config.modules.len()).map(|k| x.restrict(config, k)).collect();
    let mut out = BTreeMap::new();
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            out.insert((i, j), bracket_unchecked(config, &parts[i].values, &parts[j].values));
        }
    }
    Ok(out)
}

/// `[X_A, X_B]_m` for every pair of metric classes `A < B`, where `X_A` is
/// the part of `X` in the modules of class `A`.
pub fn class_residuals(
    config: &SpaceConfig,
    partition: &MetricClassPartition,
    x: &CoefficientVector,
) -> Result<BTreeMap<(usize, usize), CoefficientVector>> {
    config.check_shape(x)?;
    let owner = partition.class_of();
    if owner.len() != config.modules.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} modules, {} has {}",
            owner.len(),
            config.spec,
            config.modules.len()
        )));
    }
    let ranges = config.module_ranges();
    let parts: Vec<Vec<f64>> = (0..partition.classes.len())
        .map(|c| {
            let mut v = vec![0.0; config.dim_m()];
            for (k, r) in ranges.iter().enumerate() {
                if owner[k] == c {
                    v[r.clone()].copy_from_slice(&x.values[r.clone()]);
                }
            }
            v
        })
        .collect();
    let mut out = BTreeMap::new();
    for a in 0..parts.len() {
        for b in (a + 1)..parts.len() {
            out.insert((a, b), bracket_unchecked(config, &parts[a], &parts[b]));
        }
    }
    Ok(out)
}

/// Largest entry over a residual map.
pub fn max_residual(map: &BTreeMap<(usize, usize), CoefficientVector>) -> f64 {
    map.values().map(CoefficientVector::max_abs).fold(0.0, f64::max)
}

/// Outcome of [`geodesic_vector_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicCheck {
    pub geodesic: bool,
    /// `max_Z |B(Lambda X, [X, Z]_m)|` over `m` basis vectors `Z`.
    pub max_violation: f64,
    pub tolerance: f64,
}

/// Tests `B(Lambda X, [X, Z]_m) = 0` for every `m` basis vector `Z`, with
/// tolerance `1e-10 * |X|^2`.
pub fn geodesic_vector_check(
    config: &SpaceConfig,
    metric: &MetricSpec,
    x: &CoefficientVector,
) -> Result<GeodesicCheck> {
    geodesic_vector_check_tol(config, metric, x, 1e-10)
}

pub fn geodesic_vector_check_tol(
    config: &SpaceConfig,
    metric: &MetricSpec,
    x: &CoefficientVector,
    rel_tol: f64,
) -> Result<GeodesicCheck> {
    let lx = apply_metric(config, metric, x)?;
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::InvalidInput("the zero vector is not a geodesic vector".into()));
    }
    let n = config.dim_m();
    let mut worst = 0.0_f64;
    for z in 0..n {
        // B(Lambda X, [X, e_z]_m) = sum_p x_p sum_s c_{pz}^s (Lambda X)_s g_s
        let mut acc = 0.0;
        for (p, &xp) in x.values.iter().enumerate() {
            if xp == 0.0 {
                continue;
            }
            for &(s, c) in config.m_bracket(p, z) {
                acc += xp * c * lx.values[s] * config.m_gram(s);
            }
        }
        worst = worst.max(acc.abs());
    }
    let tolerance = rel_tol * norm * norm;
    Ok(GeodesicCheck {
        geodesic: worst <= tolerance,
        max_violation: worst,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homspace::{build, project_m, SpaceFamily};
    use crate::liealg::commutator;

    #[test]
    fn bracket_matches_matrix_commutator() {
        let c = build(SpaceFamily::WallachSp3, &[]).unwrap();
        let x = CoefficientVector::new((0..c.dim_m()).map(|i| (i as f64 * 0.37).sin()).collect());
        let y = CoefficientVector::new((0..c.dim_m()).map(|i| (i as f64 * 1.3).cos()).collect());
        let direct = project_m(
            &c,
            &commutator(&c.to_matrix(&x).unwrap(), &c.to_matrix(&y).unwrap()).unwrap(),
        )
        .unwrap();
        let via = bracket_m(&c, &x, &y).unwrap();
        assert!(direct.sub(&via).max_abs() < 1e-12);
        assert!(bracket_m(&c, &x, &x).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn wallach_u3_m12_m13_lands_in_m23() {
        let c = build(SpaceFamily::WallachU3, &[]).unwrap();
        let r = bracket_m(&c, &c.unit_named("a12").unwrap(), &c.unit_named("a13").unwrap()).unwrap();
        let norms = r.module_norms(&c);
        assert_eq!(norms[0], 0.0);
        assert_eq!(norms[1], 0.0);
        assert!(norms[2] > 0.0);
    }

    #[test]
    fn stiefel_v2_xi13_xi23_lands_in_m0() {
        let c = build(SpaceFamily::StiefelV2, &[4]).unwrap();
        let r = bracket_m(&c, &c.unit_named("a13").unwrap(), &c.unit_named("a23").unwrap()).unwrap();
        assert_eq!(r.values[c.variable_position("a12").unwrap()], -1.0);
        assert_eq!(r.module_norms(&c)[1..], [0.0, 0.0]);
    }

    #[test]
    fn single_module_vector_has_zero_residual() {
        let c = build(SpaceFamily::WallachSo, &[1, 3, 2]).unwrap();
        let mut x = CoefficientVector::zeros(c.dim_m());
        for p in c.module_ranges()[2].clone() {
            x.values[p] = p as f64 - 3.5;
        }
        let m = MetricSpec::generic(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(equigeodesic_residual(&c, &m, &x).unwrap().max_abs(), 0.0);
        assert!(geodesic_vector_check(&c, &m, &x).unwrap().geodesic);
        assert!(cross_residuals(&c, &x).unwrap().values().all(|v| v.max_abs() == 0.0));
    }

    #[test]
    fn wallach_u3_e12_f13_is_not_equigeodesic() {
        let c = build(SpaceFamily::WallachU3, &[]).unwrap();
        let x = c.unit_named("a12").unwrap().add(&c.unit_named("b13").unwrap());
        let m = MetricSpec::generic(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(equigeodesic_residual(&c, &m, &x).unwrap().max_abs() > 0.5);
        assert!(!geodesic_vector_check(&c, &m, &x).unwrap().geodesic);
    }

    #[test]
    fn sphere_u_f11_e12_pair_nonzero() {
        let c = build(SpaceFamily::SphereU, &[3]).unwrap();
        let x = c.unit_named("alpha11").unwrap().add(&c.unit_named("alpha12").unwrap());
        let r = cross_residuals(&c, &x).unwrap();
        let v = &r[&(0, 1)];
        assert!(v.values[c.variable_position("beta12").unwrap()].abs() > 0.5);
    }

    #[test]
    fn v2r4_catalog_vector_all_metrics() {
        let c = build(SpaceFamily::StiefelV2, &[4]).unwrap();
        let mut x = CoefficientVector::zeros(c.dim_m());
        for (name, v) in [("a13", 1.0), ("a14", 1.0), ("a23", 1.0), ("a24", -1.0)] {
            x.values[c.variable_position(name).unwrap()] = v;
        }
        for k in 0..100 {
            let t = k as f64;
            let m = MetricSpec::generic(vec![1.0 + t, 0.5 + (t * 0.3).sin().abs(), 2.0 + t.cos()]).unwrap();
            assert!(equigeodesic_residual(&c, &m, &x).unwrap().max_abs() < 1e-10);
        }
    }

    #[test]
    fn zero_vector_and_bad_metric_rejected() {
        let c = build(SpaceFamily::WallachU3, &[]).unwrap();
        let m = MetricSpec::generic(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            geodesic_vector_check(&c, &m, &CoefficientVector::zeros(6)),
            Err(Error::InvalidInput(_))
        ));
        let bad = MetricSpec { lambdas: vec![1.0, -1.0, 1.0], ..m };
        assert!(matches!(
            equigeodesic_residual(&c, &bad, &c.unit(0)),
            Err(Error::InvalidMetric(_))
        ));
        assert!(bracket_m(&c, &CoefficientVector::zeros(3), &c.unit(0)).is_err());
    }
}
