//! Listed solution families, loaded from the JSON files in `data/families`.
//!
//! A file names a space (either a full spec such as `wallach-so(1,3,2)` or a
//! bare family name, which applies to every parameter choice without a
//! dedicated file), an optional named metric and partition, and a list of
//! entries. An entry is either explicit:
//!
//! ```json
//! {"free_params": ["a13", "a14", "a23"],
//!  "assignments": {"a24": {"num": [[-1, ["a13", "a23"]]], "den": ["a14"]}},
//!  "constraints": ["a14"],
//!  "claim": "algebraic"}
//! ```
//!
//! or a template (`module-span`, `v2-pivot`, `v2-diagonal`,
//! `v2-pivots-descending`) expanded against the concrete configuration.
//! Variables that are neither free nor assigned are zero.

mod verify;

pub use verify::{verify_all, verify_family, VerificationReport};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{CoefficientVector, VectorClass};
use crate::homspace::{MetricClassPartition, SpaceConfig, SpaceFamily, SpaceSpec};
use crate::liealg::so_label;
use crate::{Error, Result};

const DATA: &[(&str, &str)] = &[
    ("wallach-so-1-3-2.json", include_str!("../../data/families/wallach-so-1-3-2.json")),
    ("stiefel-v2-4.json", include_str!("../../data/families/stiefel-v2-4.json")),
    ("stiefel-v2-5.json", include_str!("../../data/families/stiefel-v2-5.json")),
    ("stiefel-v2-6.json", include_str!("../../data/families/stiefel-v2-6.json")),
    ("stiefel-v2.json", include_str!("../../data/families/stiefel-v2.json")),
    ("stiefel-v2-einstein.json", include_str!("../../data/families/stiefel-v2-einstein.json")),
    ("wallach-u3.json", include_str!("../../data/families/wallach-u3.json")),
    ("wallach-sp3.json", include_str!("../../data/families/wallach-sp3.json")),
    (
        "stiefel-v1k-3-2-jensen.json",
        include_str!("../../data/families/stiefel-v1k-3-2-jensen.json"),
    ),
    ("sphere-u.json", include_str!("../../data/families/sphere-u.json")),
    ("sphere-sp.json", include_str!("../../data/families/sphere-sp.json")),
];

/// Transcribed systems: `(space, partition, text)`.
const PRINTED: &[(&str, &str, &str)] = &[
    ("wallach-u3", "", include_str!("../../data/printed/wallach-u3.txt")),
    ("wallach-sp3", "", include_str!("../../data/printed/wallach-sp3.txt")),
    ("wallach-so(1,3,2)", "", include_str!("../../data/printed/wallach-so-1-3-2.txt")),
    ("stiefel-v2(4)", "", include_str!("../../data/printed/stiefel-v2-4.txt")),
    ("stiefel-v2(5)", "", include_str!("../../data/printed/stiefel-v2-5.txt")),
    ("stiefel-v2(6)", "", include_str!("../../data/printed/stiefel-v2-6.txt")),
    ("stiefel-v2(7)", "", include_str!("../../data/printed/stiefel-v2-7.txt")),
    ("stiefel-v2(8)", "", include_str!("../../data/printed/stiefel-v2-8.txt")),
    (
        "stiefel-v1k(3,2)",
        "so(3),m12|m13,m23",
        include_str!("../../data/printed/stiefel-v1k-3-2-jensen.txt"),
    ),
    ("sphere-sp(1)", "", include_str!("../../data/printed/sphere-sp-1.txt")),
    ("sphere-sp(2)", "", include_str!("../../data/printed/sphere-sp-2.txt")),
];

/// A transcribed system for `spec`, with the partition it belongs to.
pub fn printed_system(spec: &SpaceSpec) -> Option<(&'static str, &'static str)> {
    let key = spec.to_string();
    PRINTED
        .iter()
        .find(|(s, _, _)| *s == key)
        .map(|&(_, partition, text)| (partition, text))
}

/// Every space with a transcribed system.
pub fn printed_spaces() -> Vec<SpaceSpec> {
    PRINTED
        .iter()
        .map(|(s, _, _)| s.parse().expect("valid space spec"))
        .collect()
}

/// Classification asserted for a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    Trivial,
    /// Nontrivial; structural vectors are the algebraic ones whose system
    /// vanishes identically on their support, so both are accepted.
    Algebraic,
    Structural,
}

impl Claim {
    pub fn as_str(self) -> &'static str {
        match self {
            Claim::Trivial => "trivial",
            Claim::Algebraic => "algebraic",
            Claim::Structural => "structural",
        }
    }

    pub fn accepts(self, class: VectorClass) -> bool {
        match self {
            Claim::Trivial => class == VectorClass::Trivial,
            Claim::Algebraic => matches!(
                class,
                VectorClass::Algebraic | VectorClass::StructuralNontrivial
            ),
            Claim::Structural => class == VectorClass::StructuralNontrivial,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `sum_i c_i * prod(monomial_i) / prod(denominator)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyExpression {
    #[serde(rename = "num")]
    pub numerator: Vec<(i64, Vec<String>)>,
    #[serde(rename = "den", default)]
    pub denominator: Vec<String>,
}

impl FamilyExpression {
    pub fn params(&self) -> impl Iterator<Item = &String> {
        self.numerator
            .iter()
            .flat_map(|(_, m)| m.iter())
            .chain(&self.denominator)
    }

    /// Evaluates with `value` looking up parameters; the caller has already
    /// checked the denominator is nonzero.
    pub fn evaluate(&self, value: &dyn Fn(&str) -> f64) -> f64 {
        let num: f64 = self
            .numerator
            .iter()
            .map(|(c, m)| *c as f64 * m.iter().map(|p| value(p)).product::<f64>())
            .sum();
        let den: f64 = self.denominator.iter().map(|p| value(p)).product();
        num / den
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, (c, m)) in self.numerator.iter().enumerate() {
            let sign = if *c < 0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                s.push(' ');
            }
            s.push_str(sign);
            if i > 0 {
                s.push(' ');
            }
            if c.abs() != 1 || m.is_empty() {
                s.push_str(&c.abs().to_string());
                if !m.is_empty() {
                    s.push('*');
                }
            }
            s.push_str(&m.join("*"));
        }
        if self.denominator.is_empty() {
            s
        } else if self.numerator.len() > 1 {
            format!("({s})/({})", self.denominator.join("*"))
        } else {
            format!("{s}/({})", self.denominator.join("*"))
        }
    }
}

/// Value of one `m` coordinate in a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Assignment {
    Zero,
    Free(String),
    Expression(FamilyExpression),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub space: SpaceSpec,
    /// `space[+metric]/index`, 1-based in listing order.
    pub id: String,
    pub index: usize,
    pub metric: Option<String>,
    /// Partition text under which the family is equigeodesic; empty means
    /// singleton.
    pub partition: String,
    pub free_params: Vec<String>,
    /// One entry per `m` coordinate.
    pub assignments: Vec<Assignment>,
    pub constraints: Vec<String>,
    pub claim: Claim,
    pub source: String,
}

impl SolutionFamily {
    pub fn partition(&self, config: &SpaceConfig) -> Result<MetricClassPartition> {
        MetricClassPartition::parse(config, &self.partition)
    }

    /// `var = value` lines for every nonzero coordinate.
    pub fn render(&self, variables: &[String]) -> Vec<String> {
        self.assignments
            .iter()
            .zip(variables)
            .filter_map(|(a, v)| match a {
                Assignment::Zero => None,
                Assignment::Free(p) if p == v => Some(format!("{v} free")),
                Assignment::Free(p) => Some(format!("{v} = {p}")),
                Assignment::Expression(e) => Some(format!("{v} = {}", e.render())),
            })
            .collect()
    }

    /// Module labels touched by free or assigned coordinates.
    pub fn modules(&self, config: &SpaceConfig) -> Vec<String> {
        let mut set = BTreeSet::new();
        for (p, a) in self.assignments.iter().enumerate() {
            if *a != Assignment::Zero {
                set.insert(config.module_of(p));
            }
        }
        set.into_iter().map(|k| config.modules[k].label.clone()).collect()
    }
}

/// Evaluates every coordinate of the family at named parameter values.
pub fn instantiate(family: &SolutionFamily, values: &BTreeMap<String, f64>) -> Result<CoefficientVector> {
    for p in &family.free_params {
        if !values.contains_key(p) {
            return Err(Error::MissingParameter(format!("{}: no value for {p}", family.id)));
        }
    }
    for c in &family.constraints {
        let v = values[c];
        if v.abs() < 1e-12 {
            return Err(Error::ConstraintViolation(format!(
                "{}: {c} = {v:e} must be nonzero",
                family.id
            )));
        }
    }
    let lookup = |p: &str| values[p];
    Ok(CoefficientVector::new(
        family
            .assignments
            .iter()
            .map(|a| match a {
                Assignment::Zero => 0.0,
                Assignment::Free(p) => values[p],
                Assignment::Expression(e) => e.evaluate(&lookup),
            })
            .collect(),
    ))
}

/// Same as [`instantiate`] with values in `free_params` order.
pub fn instantiate_ordered(family: &SolutionFamily, values: &[f64]) -> Result<CoefficientVector> {
    if values.len() != family.free_params.len() {
        return Err(Error::MissingParameter(format!(
            "{}: {} values for {} free parameters",
            family.id,
            values.len(),
            family.free_params.len()
        )));
    }
    let map = family
        .free_params
        .iter()
        .cloned()
        .zip(values.iter().copied())
        .collect();
    instantiate(family, &map)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDoc {
    space: String,
    #[serde(default)]
    metric: Option<String>,
    #[serde(default)]
    partition: String,
    #[serde(default)]
    #[allow(dead_code)]
    comment: Option<String>,
    families: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Template(TemplateEntry),
    Explicit(ExplicitEntry),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateEntry {
    template: String,
    #[serde(default)]
    modules: Vec<String>,
    #[serde(default)]
    pivot: Option<usize>,
    claim: Claim,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitEntry {
    free_params: Vec<String>,
    #[serde(default)]
    assignments: BTreeMap<String, FamilyExpression>,
    #[serde(default)]
    constraints: Vec<String>,
    claim: Claim,
}

/// Named metrics accepted by [`list_families`], normalized.
fn metric_key(name: &str) -> Result<&'static str> {
    match name {
        "einstein" | "einstein-v2" => Ok("einstein-v2"),
        "jensen" | "jensen-plus" | "jensen-minus" => Ok("jensen"),
        other => Err(Error::InvalidInput(format!("unknown metric {other:?}"))),
    }
}

/// Chooses the data file: exact spec first, then a family-wide file.
fn find_file(spec: &SpaceSpec, metric: Option<&str>) -> Result<Option<(&'static str, FileDoc)>> {
    let metric = metric.map(metric_key).transpose()?;
    let mut generic = None;
    for &(name, text) in DATA {
        let doc: FileDoc = serde_json::from_str(text).map_err(|e| Error::Schema {
            source_name: name.to_string(),
            message: e.to_string(),
        })?;
        if doc.metric.as_deref() != metric {
            continue;
        }
        if doc.space == spec.to_string() {
            return Ok(Some((name, doc)));
        }
        if doc.space == spec.family.name() && generic.is_none() {
            generic = Some((name, doc));
        }
    }
    Ok(generic)
}

/// Spaces and metrics with a catalog, as `(space pattern, metric)`.
pub fn cataloged_spaces() -> Vec<(String, Option<String>)> {
    DATA.iter()
        .filter_map(|(_, text)| serde_json::from_str::<FileDoc>(text).ok())
        .map(|d| (d.space, d.metric))
        .collect()
}

/// Families listed for `config` under the named metric (`None` for the full
/// equigeodesic condition).
pub fn list_families(config: &SpaceConfig, metric: Option<&str>) -> Result<Vec<SolutionFamily>> {
    let spec = &config.spec;
    let (source, doc) = find_file(spec, metric)?.ok_or_else(|| {
        Error::NotFound(format!(
            "no catalog for {spec}{}",
            metric.map(|m| format!(" with metric {m}")).unwrap_or_default()
        ))
    })?;
    let schema = |message: String| Error::Schema {
        source_name: source.to_string(),
        message,
    };
    MetricClassPartition::parse(config, &doc.partition).map_err(|e| schema(e.to_string()))?;
    let prefix = match &doc.metric {
        Some(m) => format!("{spec}+{m}"),
        None => spec.to_string(),
    };
    let mut out = Vec::new();
    for entry in &doc.families {
        let expanded = match entry {
            Entry::Explicit(e) => vec![explicit(config, e).map_err(schema)?],
            Entry::Template(t) => template(config, t).map_err(schema)?,
        };
        for (free_params, assignments, constraints, claim) in expanded {
            let index = out.len() + 1;
            out.push(SolutionFamily {
                space: spec.clone(),
                id: format!("{prefix}/{index}"),
                index,
                metric: doc.metric.clone(),
                partition: doc.partition.clone(),
                free_params,
                assignments,
                constraints,
                claim,
                source: source.to_string(),
            });
        }
    }
    Ok(out)
}

type Expanded = (Vec<String>, Vec<Assignment>, Vec<String>, Claim);

fn explicit(config: &SpaceConfig, e: &ExplicitEntry) -> std::result::Result<Expanded, String> {
    let pos = |v: &str| {
        config
            .variables
            .iter()
            .position(|x| x == v)
            .ok_or_else(|| format!("unknown variable {v}"))
    };
    let mut assignments = vec![Assignment::Zero; config.dim_m()];
    let free: BTreeSet<&String> = e.free_params.iter().collect();
    if free.len() != e.free_params.len() {
        return Err("duplicate free parameter".into());
    }
    for p in &e.free_params {
        assignments[pos(p)?] = Assignment::Free(p.clone());
    }
    for c in &e.constraints {
        if !free.contains(c) {
            return Err(format!("constraint {c} is not a free parameter"));
        }
    }
    for (var, expr) in &e.assignments {
        let i = pos(var)?;
        if assignments[i] != Assignment::Zero {
            return Err(format!("{var} is both free and assigned"));
        }
        for p in expr.params() {
            if !free.contains(p) {
                return Err(format!("{var} uses {p}, which is not free"));
            }
        }
        if expr.numerator.iter().any(|(_, m)| m.len() > 3) || expr.denominator.len() > 2 {
            return Err(format!("{var}: expression degree out of range"));
        }
        if let Some(d) = expr.denominator.iter().find(|d| !e.constraints.contains(d)) {
            return Err(format!("{var}: denominator {d} is not constrained nonzero"));
        }
        assignments[i] = Assignment::Expression(expr.clone());
    }
    Ok((e.free_params.clone(), assignments, e.constraints.clone(), e.claim))
}

fn template(config: &SpaceConfig, t: &TemplateEntry) -> std::result::Result<Vec<Expanded>, String> {
    let n = config.spec.params.first().copied().unwrap_or(0);
    let v2 = || {
        if config.spec.family == SpaceFamily::StiefelV2 {
            Ok(())
        } else {
            Err(format!("template {} needs stiefel-v2", t.template))
        }
    };
    let var = |a: usize, b: usize| -> std::result::Result<String, String> {
        config
            .ambient
            .position(&so_label(a, b))
            .and_then(|p| config.m_coordinate(p))
            .map(|i| config.variables[i].clone())
            .ok_or_else(|| format!("no m coordinate for {}", so_label(a, b)))
    };
    let from_free = |free: Vec<String>, expr: Option<(String, FamilyExpression)>, constraints: Vec<String>| {
        let mut assignments = vec![Assignment::Zero; config.dim_m()];
        for f in &free {
            let i = config.variables.iter().position(|v| v == f).expect("template variable");
            assignments[i] = Assignment::Free(f.clone());
        }
        if let Some((v, e)) = expr {
            let i = config.variables.iter().position(|x| *x == v).expect("template variable");
            assignments[i] = Assignment::Expression(e);
        }
        (free, assignments, constraints, t.claim)
    };
    let pivot = |k: usize| -> std::result::Result<Expanded, String> {
        if k < 4 || k > n {
            return Err(format!("pivot {k} out of range for n = {n}"));
        }
        let mut free = Vec::new();
        for j in 3..=k {
            free.push(var(1, j)?);
        }
        for j in (3..=n).filter(|&j| j != k) {
            free.push(var(2, j)?);
        }
        let a1k = var(1, k)?;
        let expr = FamilyExpression {
            numerator: (3..k)
                .map(|j| Ok((-1, vec![var(1, j)?, var(2, j)?])))
                .collect::<std::result::Result<_, String>>()?,
            denominator: vec![a1k.clone()],
        };
        Ok(from_free(free, Some((var(2, k)?, expr)), vec![a1k]))
    };
    match t.template.as_str() {
        "module-span" => {
            if t.modules.is_empty() {
                return Err("module-span needs modules".into());
            }
            let ranges = config.module_ranges();
            let mut free = Vec::new();
            for m in &t.modules {
                let k = config.module_index(m).ok_or_else(|| format!("unknown module {m}"))?;
                free.extend(ranges[k].clone().map(|p| config.variables[p].clone()));
            }
            Ok(vec![from_free(free, None, vec![])])
        }
        "v2-diagonal" => {
            v2()?;
            let mut free = vec![var(1, 3)?];
            for j in 4..=n {
                free.push(var(2, j)?);
            }
            Ok(vec![from_free(free, None, vec![])])
        }
        "v2-pivot" => {
            v2()?;
            let k = t.pivot.ok_or("v2-pivot needs pivot")?;
            Ok(vec![pivot(k)?])
        }
        "v2-pivots-descending" => {
            v2()?;
            (4..=n).rev().map(pivot).collect()
        }
        other => Err(format!("unknown template {other:?}")),
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(Claim::Trivial),
            "algebraic" => Ok(Claim::Algebraic),
            "structural" => Ok(Claim::Structural),
            other => Err(Error::Parse(format!("unknown claim {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{classify_vector, generate_system};
    use crate::homspace::build;

    fn families(f: SpaceFamily, p: &[usize], metric: Option<&str>) -> (SpaceConfig, Vec<SolutionFamily>) {
        let c = build(f, p).unwrap();
        let fams = list_families(&c, metric).unwrap();
        (c, fams)
    }

    #[test]
    fn counts() {
        assert_eq!(families(SpaceFamily::WallachSo, &[1, 3, 2], None).1.len(), 6);
        assert_eq!(families(SpaceFamily::WallachU3, &[], None).1.len(), 3);
        assert_eq!(families(SpaceFamily::WallachSp3, &[], None).1.len(), 5);
        assert_eq!(families(SpaceFamily::StiefelV1k, &[3, 2], Some("jensen")).1.len(), 42);
        for n in 4..=9 {
            let (_, f) = families(SpaceFamily::StiefelV2, &[n], None);
            assert_eq!(f.len(), n);
            assert_eq!(f.iter().filter(|f| f.claim == Claim::Trivial).count(), 2);
            assert_eq!(families(SpaceFamily::StiefelV2, &[n], Some("einstein")).1.len(), 2);
        }
        for n in 1..=3 {
            assert_eq!(families(SpaceFamily::SphereU, &[n], None).1.len(), 2);
            assert_eq!(families(SpaceFamily::SphereSp, &[n], None).1.len(), 2);
        }
    }

    #[test]
    fn uncataloged_is_not_found() {
        let c = build(SpaceFamily::WallachSo, &[2, 2, 2]).unwrap();
        assert!(matches!(list_families(&c, None), Err(Error::NotFound(_))));
        let c = build(SpaceFamily::StiefelV1k, &[3, 2]).unwrap();
        assert!(matches!(list_families(&c, None), Err(Error::NotFound(_))));
        assert!(matches!(list_families(&c, Some("bogus")), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn v2r4_pivot_instance() {
        let (c, f) = families(SpaceFamily::StiefelV2, &[4], None);
        assert_eq!(f[0].free_params, ["a13", "a14", "a23"]);
        let x = instantiate_ordered(&f[0], &[1.0, 1.0, 1.0]).unwrap();
        let expect = [("a13", 1.0), ("a14", 1.0), ("a23", 1.0), ("a24", -1.0)];
        for (v, e) in expect {
            assert_eq!(x.values[c.variable_position(v).unwrap()], e);
        }
        assert_eq!(x.values[c.variable_position("a12").unwrap()], 0.0);
    }

    #[test]
    fn w12_family_4_instance() {
        let (c, f) = families(SpaceFamily::WallachSp3, &[], None);
        let x = instantiate_ordered(&f[3], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(&x.values[c.module_ranges()[0].clone()], &[1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn instantiate_errors() {
        let (_, f) = families(SpaceFamily::StiefelV2, &[4], None);
        assert!(matches!(
            instantiate_ordered(&f[0], &[1.0, 0.0, 1.0]),
            Err(Error::ConstraintViolation(_))
        ));
        let mut m = BTreeMap::new();
        m.insert("a13".to_string(), 1.0);
        assert!(matches!(instantiate(&f[0], &m), Err(Error::MissingParameter(_))));
    }

    #[test]
    fn zero_instance_rejected_by_classify() {
        let (c, f) = families(SpaceFamily::WallachU3, &[], None);
        let x = instantiate_ordered(&f[0], &[0.0, 0.0]).unwrap();
        assert!(classify_vector(&c, &x).is_err());
    }

    #[test]
    fn families_solve_generated_systems() {
        let cases: Vec<(SpaceFamily, Vec<usize>, Option<&str>)> = vec![
            (SpaceFamily::WallachSo, vec![1, 3, 2], None),
            (SpaceFamily::StiefelV2, vec![6], None),
            (SpaceFamily::StiefelV2, vec![7], Some("einstein")),
            (SpaceFamily::StiefelV1k, vec![3, 2], Some("jensen")),
        ];
        for (fam, p, metric) in cases {
            let (c, fs) = families(fam, &p, metric);
            for f in &fs {
                let sys = generate_system(&c, &f.partition(&c).unwrap()).unwrap();
                for k in 0..20 {
                    let vals: Vec<f64> = (0..f.free_params.len())
                        .map(|i| 0.3 + ((i * 7 + k * 3) % 11) as f64 * 0.17)
                        .collect();
                    let x = instantiate_ordered(f, &vals).unwrap();
                    let worst = sys.evaluate(&x.values).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                    assert!(worst < 1e-10, "{} residual {worst}", f.id);
                }
            }
        }
    }

    #[test]
    fn render_expression() {
        let (c, f) = families(SpaceFamily::WallachSo, &[1, 3, 2], None);
        let lines = f[0].render(&c.variables);
        assert!(lines.contains(&"a45 = (-a12*a25 - a13*a35)/(a14)".to_string()));
    }

    #[test]
    fn printed_systems_parse() {
        for spec in printed_spaces() {
            let c = crate::homspace::build_space(&spec).unwrap();
            let (_, text) = printed_system(&spec).unwrap();
            crate::engine::parse_printed_system(text, &c.variables).unwrap();
        }
    }
}
