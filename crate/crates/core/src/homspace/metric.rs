//! Diagonal invariant metrics and module class partitions.

use num_integer::Roots;
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SpaceConfig, SpaceFamily};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricName {
    Generic,
    Wallach,
    EinsteinV2,
    JensenPlus,
    JensenMinus,
}

impl MetricName {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Generic => "generic",
            MetricName::Wallach => "wallach",
            MetricName::EinsteinV2 => "einstein-v2",
            MetricName::JensenPlus => "jensen-plus",
            MetricName::JensenMinus => "jensen-minus",
        }
    }
}

/// `Lambda = sum_i lambda_i Id_{m_i}`, one positive scalar per module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub lambdas: Vec<f64>,
    pub name: MetricName,
    /// Exact values when they are rational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<Ratio<i64>>>,
}

impl MetricSpec {
    pub fn new(lambdas: Vec<f64>, name: MetricName) -> Result<Self> {
        if let Some(bad) = lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidMetric(format!("lambda {bad} is not positive")));
        }
        Ok(Self {
            lambdas,
            name,
            exact: None,
        })
    }

    pub fn generic(lambdas: Vec<f64>) -> Result<Self> {
        Self::new(lambdas, MetricName::Generic)
    }

    fn from_exact(exact: Vec<Ratio<i64>>, name: MetricName) -> Self {
        let lambdas = exact.iter().map(|r| *r.numer() as f64 / *r.denom() as f64).collect();
        Self {
            lambdas,
            name,
            exact: Some(exact),
        }
    }

    /// Errors unless there is one positive lambda per module.
    pub fn check(&self, config: &SpaceConfig) -> Result<()> {
        if self.lambdas.len() != config.modules.len() {
            return Err(Error::InvalidMetric(format!(
                "{} lambdas for {} modules",
                self.lambdas.len(),
                config.modules.len()
            )));
        }
        if let Some(bad) = self.lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidMetric(format!("lambda {bad} is not positive")));
        }
        Ok(())
    }
}

/// `(n - 1) / (2 (n - 2))`, the Einstein parameter on `V_2 R^n`.
pub fn einstein_v2_lambda(n: usize) -> Ratio<i64> {
    let n = n as i64;
    Ratio::new(n - 1, 2 * (n - 2))
}

/// `(n - 2 +/- sqrt(n^2 - 7n + 7)) / (n - 1)`, the Jensen parameter on `V_4 R^n`.
pub fn jensen_lambda(n: usize, plus: bool) -> f64 {
    let nf = n as f64;
    let root = (nf * nf - 7.0 * nf + 7.0).sqrt();
    let s = if plus { root } else { -root };
    (nf - 2.0 + s) / (nf - 1.0)
}

/// Exact Jensen parameter when the discriminant is a perfect square.
pub fn jensen_lambda_exact(n: usize, plus: bool) -> Option<Ratio<i64>> {
    let n = n as i64;
    let disc = n * n - 7 * n + 7;
    if disc < 0 {
        return None;
    }
    let root = disc.sqrt();
    if root * root != disc {
        return None;
    }
    let s = if plus { root } else { -root };
    Some(Ratio::new(n - 2 + s, n - 1))
}

/// Named metrics known for the configuration's family; always includes the
/// all-ones generic metric.
pub fn metric_presets(config: &SpaceConfig) -> Vec<MetricSpec> {
    let k = config.modules.len();
    let one = Ratio::from_integer(1);
    let mut out = vec![MetricSpec::from_exact(vec![one; k], MetricName::Generic)];
    let p = &config.spec.params;
    match config.spec.family {
        SpaceFamily::StiefelV2 => {
            let l = einstein_v2_lambda(p[0]);
            out.push(MetricSpec::from_exact(vec![one, l, l], MetricName::EinsteinV2));
        }
        SpaceFamily::StiefelV1k if p[0] == 3 => {
            let n = 1 + p[0] + p[1];
            for (plus, name) in [(true, MetricName::JensenPlus), (false, MetricName::JensenMinus)] {
                let spec = match jensen_lambda_exact(n, plus) {
                    Some(l) => MetricSpec::from_exact(vec![l, l, one, one], name),
                    None => {
                        let l = jensen_lambda(n, plus);
                        MetricSpec {
                            lambdas: vec![l, l, 1.0, 1.0],
                            name,
                            exact: None,
                        }
                    }
                };
                out.push(spec);
            }
        }
        _ => {}
    }
    out
}

/// Groups of modules that share one metric parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricClassPartition {
    /// Module indices per class, each class sorted, classes ordered by
    /// their first module.
    pub classes: Vec<Vec<usize>>,
}

impl MetricClassPartition {
    fn normalized(mut classes: Vec<Vec<usize>>, modules: usize) -> Result<Self> {
        let mut seen = vec![false; modules];
        for class in &mut classes {
            if class.is_empty() {
                return Err(Error::InvalidPartition("empty class".into()));
            }
            class.sort_unstable();
            for &m in class.iter() {
                if m >= modules {
                    return Err(Error::InvalidPartition(format!("module index {m} out of range")));
                }
                if seen[m] {
                    return Err(Error::InvalidPartition(format!("module {m} appears twice")));
                }
                seen[m] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("module {missing} is not covered")));
        }
        classes.sort_by_key(|c| c[0]);
        Ok(Self { classes })
    }

    /// Every module in its own class: the full equigeodesic condition.
    pub fn singleton(config: &SpaceConfig) -> Self {
        Self {
            classes: (0..config.modules.len()).map(|i| vec![i]).collect(),
        }
    }

    pub fn from_indices(config: &SpaceConfig, classes: Vec<Vec<usize>>) -> Result<Self> {
        Self::normalized(classes, config.modules.len())
    }

    /// Parses `"so(3),m12|m13,m23"`: classes split by `|`, labels by `,`.
    /// An empty string gives the singleton partition.
    pub fn parse(config: &SpaceConfig, text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::singleton(config));
        }
        let mut classes = Vec::new();
        for part in text.split('|') {
            let mut class = Vec::new();
            for label in split_labels(part) {
                let i = config.module_index(label).ok_or_else(|| {
                    Error::InvalidPartition(format!("unknown module {label:?} for {}", config.spec))
                })?;
                class.push(i);
            }
            classes.push(class);
        }
        Self::normalized(classes, config.modules.len())
    }

    /// Modules with equal lambda share a class.
    pub fn from_metric(config: &SpaceConfig, metric: &MetricSpec) -> Result<Self> {
        metric.check(config)?;
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, l) in metric.lambdas.iter().enumerate() {
            let found = classes.iter_mut().find(|c| {
                let r = metric.lambdas[c[0]];
                (r - l).abs() <= 1e-12 * r.abs().max(l.abs())
            });
            match found {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        Self::normalized(classes, config.modules.len())
    }

    pub fn render(&self, config: &SpaceConfig) -> String {
        self.label_classes(config)
            .iter()
            .map(|c| c.join(","))
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn label_classes(&self, config: &SpaceConfig) -> Vec<Vec<String>> {
        self.classes
            .iter()
            .map(|c| c.iter().map(|&i| config.modules[i].label.clone()).collect())
            .collect()
    }

    /// Class index of each module.
    pub fn class_of(&self) -> Vec<usize> {
        let n = self.classes.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (k, c) in self.classes.iter().enumerate() {
            for &m in c {
                out[m] = k;
            }
        }
        out
    }

    pub fn is_singleton(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// True when every class of `self` lies inside a class of `other`.
    pub fn refines(&self, other: &Self) -> bool {
        let owner = other.class_of();
        self.classes
            .iter()
            .all(|c| c.iter().all(|&m| owner[m] == owner[c[0]]))
    }
}

/// Splits on commas that are not inside parentheses, so `so(3)` survives.
fn split_labels(part: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in part.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(part[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(part[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

/// A random metric constant on each class, lambdas drawn from `[0.2, 5]`.
pub fn random_metric<R: Rng + ?Sized>(partition: &MetricClassPartition, rng: &mut R) -> MetricSpec {
    let per_class: Vec<f64> = partition
        .classes
        .iter()
        .map(|_| rng.gen_range(0.2..5.0))
        .collect();
    let owner = partition.class_of();
    MetricSpec {
        lambdas: owner.iter().map(|&c| per_class[c]).collect(),
        name: MetricName::Generic,
        exact: None,
    }
}
