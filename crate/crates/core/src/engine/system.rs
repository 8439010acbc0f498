//! Bilinear systems whose common zeros are the equigeodesic vectors.
//!
//! For classes `A < B` of a metric partition and every target basis vector
//! `Y` of `m`, the equation is
//! `sum_{p in A, q in B} x_p x_q B([e_p, e_q], Y) = 0`.
//! With the singleton partition these are exactly the pairwise conditions
//! `[X_i, X_j]_m = 0`.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::homspace::{MetricClassPartition, SpaceConfig, SpaceSpec};
use crate::{Error, Result};

/// `coef * x_p * x_q` with `p < q` (positions in `m`).
pub type Term = (usize, usize, i64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilinearEquation {
    /// Sorted by `(p, q)`, coprime, first coefficient positive.
    pub terms: Vec<Term>,
    /// Class labels of the bracketed parts, e.g. `["so(3),m12", "m13,m23"]`.
    pub source: [String; 2],
    /// `m` position of the target basis vector `Y`.
    pub target: usize,
    pub target_name: String,
    /// Readable form, e.g. `a12*a13 + b12*b13 = 0`.
    pub text: String,
}

impl BilinearEquation {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|&(p, q, c)| c as f64 * x[p] * x[q])
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleRange {
    pub label: String,
    pub start: usize,
    pub len: usize,
}

/// A generated system plus enough context to read it without the
/// configuration: variable names, basis labels and module ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSystem {
    pub space: SpaceSpec,
    pub variables: Vec<String>,
    pub basis_labels: Vec<String>,
    pub modules: Vec<ModuleRange>,
    /// Module labels per metric class.
    pub partition: Vec<Vec<String>>,
    pub equations: Vec<BilinearEquation>,
    /// Cross-class module pairs whose brackets vanish identically on `m`.
    pub dropped_pairs: Vec<String>,
    pub notes: Vec<String>,
}

impl QuadraticSystem {
    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    /// Value of every equation at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        self.equations.iter().map(|e| e.evaluate(x)).collect()
    }

    /// Row-major Jacobian, one row per equation.
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.equations
            .iter()
            .map(|e| {
                let mut row = vec![0.0; self.dim()];
                for &(p, q, c) in &e.terms {
                    let c = c as f64;
                    row[p] += c * x[q];
                    row[q] += c * x[p];
                }
                row
            })
            .collect()
    }

    /// Module index of every `m` position.
    pub fn module_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for (k, m) in self.modules.iter().enumerate() {
            for v in &mut out[m.start..m.start + m.len] {
                *v = k;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("system JSON: {e}")))
    }

    /// One equation per line.
    pub fn render(&self) -> String {
        self.equations
            .iter()
            .map(|e| e.text.clone())
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// True when every equation has no term with both variables in `support`.
    pub fn vanishes_on(&self, support: &[bool]) -> bool {
        self.equations
            .iter()
            .all(|e| e.terms.iter().all(|&(p, q, _)| !(support[p] && support[q])))
    }
}

/// Sorts terms, scales to coprime integers with a positive leading
/// coefficient. Returns `None` when the coefficients are not commensurable.
fn normalize(raw: &BTreeMap<(usize, usize), f64>) -> Option<Vec<Term>> {
    let vals: Vec<f64> = raw.values().copied().filter(|v| v.abs() > 1e-12).collect();
    if vals.is_empty() {
        return Some(Vec::new());
    }
    let base = vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let mut ints = None;
    for mult in 1..=48 {
        let scaled: Vec<f64> = raw.values().map(|v| v / base * mult as f64).collect();
        if scaled.iter().all(|s| (s - s.round()).abs() < 1e-9) {
            ints = Some(scaled.iter().map(|s| s.round() as i64).collect::<Vec<_>>());
            break;
        }
    }
    let ints = ints?;
    let g = ints.iter().fold(0i64, |g, v| g.gcd(v));
    let mut terms: Vec<Term> = raw
        .keys()
        .zip(&ints)
        .filter(|(_, &c)| c != 0)
        .map(|(&(p, q), &c)| (p, q, c / g))
        .collect();
    terms.sort_by_key(|t| (t.0, t.1));
    if terms[0].2 < 0 {
        for t in &mut terms {
            t.2 = -t.2;
        }
    }
    Some(terms)
}

fn render_terms(terms: &[Term], vars: &[String]) -> String {
    let mut s = String::new();
    for (i, &(p, q, c)) in terms.iter().enumerate() {
        if i == 0 {
            if c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0 { " - " } else { " + " });
        }
        if c.abs() != 1 {
            s.push_str(&format!("{}*", c.abs()));
        }
        s.push_str(&format!("{}*{}", vars[p], vars[q]));
    }
    if s.is_empty() {
        s.push('0');
    }
    s.push_str(" = 0");
    s
}

/// Emits one bilinear equation per (class pair, target) that is not
/// identically zero, deduplicated after normalization.
pub fn generate_system(
    config: &SpaceConfig,
    partition: &MetricClassPartition,
) -> Result<QuadraticSystem> {
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
    let vars = &config.variables;
    let labels = partition.label_classes(config);
    let class_label = |c: usize| labels[c].join(",");
    let n = config.dim_m();

    let mut dropped = Vec::new();
    for i in 0..ranges.len() {
        for j in (i + 1)..ranges.len() {
            if owner[i] == owner[j] {
                continue;
            }
            let zero = ranges[i]
                .clone()
                .all(|p| ranges[j].clone().all(|q| config.m_bracket(p, q).is_empty()));
            if zero {
                dropped.push(format!(
                    "[{}, {}]",
                    config.modules[i].label, config.modules[j].label
                ));
            }
        }
    }

    let mut equations = Vec::new();
    let mut seen = HashSet::new();
    for a in 0..partition.classes.len() {
        for b in (a + 1)..partition.classes.len() {
            // raw[target][(p, q)] = B([e_p, e_q], e_target)
            let mut raw: Vec<BTreeMap<(usize, usize), f64>> = vec![BTreeMap::new(); n];
            for &mi in &partition.classes[a] {
                for &mj in &partition.classes[b] {
                    for p in ranges[mi].clone() {
                        for q in ranges[mj].clone() {
                            for &(r, c) in config.m_bracket(p, q) {
                                let key = (p.min(q), p.max(q));
                                *raw[r].entry(key).or_insert(0.0) += c * config.m_gram(r);
                            }
                        }
                    }
                }
            }
            for (r, terms) in raw.iter().enumerate() {
                let terms = normalize(terms).ok_or_else(|| {
                    Error::InternalConsistency(format!(
                        "non-commensurable coefficients for target {}",
                        vars[r]
                    ))
                })?;
                if terms.is_empty() || !seen.insert(terms.clone()) {
                    continue;
                }
                let text = render_terms(&terms, vars);
                equations.push(BilinearEquation {
                    terms,
                    source: [class_label(a), class_label(b)],
                    target: r,
                    target_name: vars[r].clone(),
                    text,
                });
            }
        }
    }

    let mut notes = Vec::new();
    if !dropped.is_empty() {
        notes.push(format!(
            "module pairs with identically zero brackets: {}",
            dropped.join(", ")
        ));
    }
    Ok(QuadraticSystem {
        space: config.spec.clone(),
        variables: vars.clone(),
        basis_labels: config.basis_labels(),
        modules: config
            .modules
            .iter()
            .zip(&ranges)
            .map(|(m, r)| ModuleRange {
                label: m.label.clone(),
                start: r.start,
                len: r.len(),
            })
            .collect(),
        partition: labels,
        equations,
        dropped_pairs: dropped,
        notes,
    })
}

/// Parses `a12*a13 + b12*b13 = 0` (also `2*a11*c12`, `-a45*a24`, implicit
/// products `a15a12` are not accepted) into normalized terms.
pub fn parse_equation(line: &str, variables: &[String]) -> Result<Vec<Term>> {
    let index: HashMap<&str, usize> = variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let (lhs, rhs) = line
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("missing '=' in {line:?}")))?;
    if rhs.trim() != "0" {
        return Err(Error::Parse(format!("right-hand side must be 0 in {line:?}")));
    }
    let mut raw: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let cleaned = lhs.replace(' ', "");
    let mut chunks = Vec::new();
    let mut cur = String::new();
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            chunks.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    if !cur.is_empty() {
        chunks.push(cur);
    }
    for chunk in chunks {
        let (sign, body) = match chunk.as_bytes()[0] {
            b'-' => (-1.0, &chunk[1..]),
            b'+' => (1.0, &chunk[1..]),
            _ => (1.0, &chunk[..]),
        };
        let mut coef = sign;
        let mut vs = Vec::new();
        for factor in body.split('*') {
            if let Ok(k) = factor.parse::<i64>() {
                coef *= k as f64;
            } else if let Some(&i) = index.get(factor) {
                vs.push(i);
            } else {
                return Err(Error::Parse(format!("unknown factor {factor:?} in {line:?}")));
            }
        }
        if vs.len() != 2 || vs[0] == vs[1] {
            return Err(Error::Parse(format!(
                "term {chunk:?} is not a product of two distinct variables"
            )));
        }
        *raw.entry((vs[0].min(vs[1]), vs[0].max(vs[1]))).or_insert(0.0) += coef;
    }
    let terms = normalize(&raw).ok_or_else(|| Error::Parse(format!("bad coefficients in {line:?}")))?;
    if terms.is_empty() {
        return Err(Error::Parse(format!("equation {line:?} is identically zero")));
    }
    Ok(terms)
}

/// Parses a text system: one equation per line, `#` starts a comment.
pub fn parse_printed_system(text: &str, variables: &[String]) -> Result<Vec<Vec<Term>>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| parse_equation(l, variables))
        .collect()
}

/// Set comparison of a generated system with a transcribed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrintedComparison {
    pub generated: usize,
    pub printed: usize,
    pub matched: usize,
    /// Transcribed equations with no generated counterpart.
    pub missing: Vec<String>,
    /// Generated equations with no transcribed counterpart.
    pub extra: Vec<String>,
    /// Variable name and the basis label it multiplies, in basis order.
    pub renaming: Vec<(String, String)>,
    pub equal: bool,
}

/// Compares as sets of normalized equations, i.e. up to sign and scale.
pub fn compare_with_printed(system: &QuadraticSystem, printed: &str) -> Result<PrintedComparison> {
    let theirs = parse_printed_system(printed, &system.variables)?;
    let ours: Vec<Vec<Term>> = system.equations.iter().map(|e| e.terms.clone()).collect();
    let ours_set: HashSet<&Vec<Term>> = ours.iter().collect();
    let theirs_set: HashSet<&Vec<Term>> = theirs.iter().collect();
    let missing: Vec<String> = theirs
        .iter()
        .filter(|t| !ours_set.contains(t))
        .map(|t| render_terms(t, &system.variables))
        .collect();
    let extra: Vec<String> = ours
        .iter()
        .filter(|t| !theirs_set.contains(t))
        .map(|t| render_terms(t, &system.variables))
        .collect();
    let matched = theirs_set.iter().filter(|t| ours_set.contains(*t)).count();
    let equal = missing.is_empty() && extra.is_empty() && theirs_set.len() == theirs.len();
    Ok(PrintedComparison {
        generated: ours.len(),
        printed: theirs.len(),
        matched,
        missing,
        extra,
        renaming: system
            .variables
            .iter()
            .cloned()
            .zip(system.basis_labels.iter().cloned())
            .collect(),
        equal,
    })
}
