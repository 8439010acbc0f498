//! Trivial, structural and algebraic equigeodesic vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{class_residuals, max_residual, CoefficientVector};
use crate::homspace::{MetricClassPartition, SpaceConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorClass {
    /// Supported in a single module.
    Trivial,
    /// The system restricted to the support coordinates vanishes identically.
    StructuralNontrivial,
    /// Solves the system without it vanishing on the support subspace.
    Algebraic,
    NotEquigeodesic,
}

impl VectorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            VectorClass::Trivial => "trivial",
            VectorClass::StructuralNontrivial => "structural-nontrivial",
            VectorClass::Algebraic => "algebraic",
            VectorClass::NotEquigeodesic => "not-equigeodesic",
        }
    }

    pub fn is_equigeodesic(self) -> bool {
        self != VectorClass::NotEquigeodesic
    }
}

impl fmt::Display for VectorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VectorClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(VectorClass::Trivial),
            "structural-nontrivial" | "structural" => Ok(VectorClass::StructuralNontrivial),
            "algebraic" => Ok(VectorClass::Algebraic),
            "not-equigeodesic" => Ok(VectorClass::NotEquigeodesic),
            other => Err(Error::Parse(format!("unknown vector class {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Relative threshold, against `|X|`, for a module or coordinate to count
    /// as supported.
    pub support_threshold: f64,
    /// Relative tolerance, against `|X|^2`, on the cross-class residuals.
    pub residual_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            support_threshold: 1e-9,
            residual_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: VectorClass,
    /// Labels of modules carrying the vector.
    pub support: Vec<String>,
    /// Variables with a nonzero coefficient.
    pub support_variables: Vec<String>,
    /// Largest cross-class residual divided by `|X|^2`.
    pub relative_residual: f64,
    pub note: Option<String>,
}

const STRUCTURAL_NOTE: &str = "structural is decided on the coordinate subspace spanned by the \
     support variables: every cross-class bracket term vanishes there";

/// Classification with respect to the full equigeodesic condition.
pub fn classify_vector(config: &SpaceConfig, x: &CoefficientVector) -> Result<Classification> {
    classify_with(
        config,
        &MetricClassPartition::singleton(config),
        x,
        ClassifyOptions::default(),
    )
}

/// Classification relative to a metric class partition: only cross-class
/// brackets enter the residual and the structural test.
pub fn classify_with(
    config: &SpaceConfig,
    partition: &MetricClassPartition,
    x: &CoefficientVector,
    opts: ClassifyOptions,
) -> Result<Classification> {
    config.check_shape(x)?;
    let norm = x.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidInput(format!(
            "cannot classify a vector of norm {norm}"
        )));
    }
    let cut = opts.support_threshold * norm;
    let owner = partition.class_of();
    let module_norms = x.module_norms(config);
    let support_modules: Vec<usize> = (0..module_norms.len())
        .filter(|&k| module_norms[k] > cut)
        .collect();
    let coords: Vec<bool> = x.values.iter().map(|v| v.abs() > cut).collect();
    let support = support_modules
        .iter()
        .map(|&k| config.modules[k].label.clone())
        .collect();
    let support_variables = coords
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(p, _)| config.variables[p].clone())
        .collect();

    let residual = max_residual(&class_residuals(config, partition, x)?) / (norm * norm);
    let (class, note) = if support_modules.len() == 1 {
        (VectorClass::Trivial, None)
    } else if residual > opts.residual_tol {
        (VectorClass::NotEquigeodesic, None)
    } else if vanishes_identically(config, &owner, &coords) {
        (VectorClass::StructuralNontrivial, Some(STRUCTURAL_NOTE.to_string()))
    } else {
        (VectorClass::Algebraic, None)
    };
    Ok(Classification {
        class,
        support,
        support_variables,
        relative_residual: residual,
        note,
    })
}

/// True when `[e_p, e_q]_m = 0` for all supported `p, q` in different classes.
fn vanishes_identically(config: &SpaceConfig, owner: &[usize], coords: &[bool]) -> bool {
    let class = |p: usize| owner[config.module_of(p)];
    let live: Vec<usize> = (0..coords.len()).filter(|&p| coords[p]).collect();
    live.iter().all(|&p| {
        live.iter()
            .all(|&q| class(p) == class(q) || config.m_bracket(p, q).is_empty())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homspace::{build, SpaceFamily};

    fn vector(c: &SpaceConfig, entries: &[(&str, f64)]) -> CoefficientVector {
        let mut x = CoefficientVector::zeros(c.dim_m());
        for &(n, v) in entries {
            x.values[c.variable_position(n).unwrap()] = v;
        }
        x
    }

    #[test]
    fn single_module_is_trivial() {
        for f in SpaceFamily::ALL {
            let c = build(f, &f.default_params()).unwrap();
            for r in c.module_ranges() {
                let mut x = CoefficientVector::zeros(c.dim_m());
                for p in r {
                    x.values[p] = 1.0 + p as f64;
                }
                assert_eq!(classify_vector(&c, &x).unwrap().class, VectorClass::Trivial);
            }
        }
    }

    #[test]
    fn tiny_noise_ignored() {
        let c = build(SpaceFamily::WallachU3, &[]).unwrap();
        let mut x = CoefficientVector::new(vec![1e-15; 6]);
        x.values[0] = 1.0;
        let cl = classify_vector(&c, &x).unwrap();
        assert_eq!(cl.class, VectorClass::Trivial);
        assert_eq!(cl.support, ["m12"]);
    }

    #[test]
    fn v2r4_diagonal_is_structural() {
        let c = build(SpaceFamily::StiefelV2, &[4]).unwrap();
        let cl = classify_vector(&c, &vector(&c, &[("a13", 1.0), ("a24", 1.0)])).unwrap();
        assert_eq!(cl.class, VectorClass::StructuralNontrivial);
        assert!(cl.note.is_some());
    }

    #[test]
    fn v2r4_pivot_is_algebraic() {
        let c = build(SpaceFamily::StiefelV2, &[4]).unwrap();
        let x = vector(&c, &[("a13", 1.0), ("a14", 1.0), ("a23", 1.0), ("a24", -1.0)]);
        assert_eq!(classify_vector(&c, &x).unwrap().class, VectorClass::Algebraic);
    }

    #[test]
    fn non_solution_detected() {
        let c = build(SpaceFamily::WallachU3, &[]).unwrap();
        let x = vector(&c, &[("a12", 1.0), ("a13", 1.0)]);
        assert_eq!(classify_vector(&c, &x).unwrap().class, VectorClass::NotEquigeodesic);
    }

    #[test]
    fn partition_relaxes_condition() {
        let c = build(SpaceFamily::StiefelV2, &[5]).unwrap();
        let x = vector(&c, &[("a13", 1.0), ("a23", 1.0)]);
        assert_eq!(classify_vector(&c, &x).unwrap().class, VectorClass::NotEquigeodesic);
        let p = MetricClassPartition::parse(&c, "m0|m1,m2").unwrap();
        let cl = classify_with(&c, &p, &x, ClassifyOptions::default()).unwrap();
        assert_eq!(cl.class, VectorClass::StructuralNontrivial);
    }

    #[test]
    fn zero_vector_rejected() {
        let c = build(SpaceFamily::WallachU3, &[]).unwrap();
        assert!(matches!(
            classify_vector(&c, &CoefficientVector::zeros(6)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn class_names_round_trip() {
        for k in [
            VectorClass::Trivial,
            VectorClass::StructuralNontrivial,
            VectorClass::Algebraic,
            VectorClass::NotEquigeodesic,
        ] {
            assert_eq!(k.as_str().parse::<VectorClass>().unwrap(), k);
        }
    }
}
