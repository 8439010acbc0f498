//! Reductive decompositions `g = h + m` for the supported homogeneous spaces.
//!
//! Every configuration lives inside one ambient basis from [`crate::liealg`].
//! The isotropy algebra and the modules of `m` are lists of ambient basis
//! positions, so brackets are read directly off the ambient structure
//! constants.

mod metric;
mod validate;

pub use metric::{
    einstein_v2_lambda, jensen_lambda, jensen_lambda_exact, metric_presets, random_metric,
    MetricClassPartition, MetricName, MetricSpec,
};
pub use validate::{structure_report, symmetric_commutant_dim, validate_wallach};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::CoefficientVector;
use crate::liealg::{build_so_basis, build_sp_basis, build_u_basis, so_label, LieBasis, MatrixElement};
use crate::{Error, Result};

/// Largest ambient matrix size accepted by [`build_space`].
pub const MAX_MATRIX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceFamily {
    #[serde(rename = "wallach-so")]
    WallachSo,
    #[serde(rename = "stiefel-v2")]
    StiefelV2,
    #[serde(rename = "stiefel-v1k")]
    StiefelV1k,
    #[serde(rename = "wallach-u3")]
    WallachU3,
    #[serde(rename = "wallach-sp3")]
    WallachSp3,
    #[serde(rename = "sphere-u")]
    SphereU,
    #[serde(rename = "sphere-sp")]
    SphereSp,
}

impl SpaceFamily {
    pub const ALL: [SpaceFamily; 7] = [
        SpaceFamily::WallachSo,
        SpaceFamily::StiefelV2,
        SpaceFamily::StiefelV1k,
        SpaceFamily::WallachU3,
        SpaceFamily::WallachSp3,
        SpaceFamily::SphereU,
        SpaceFamily::SphereSp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpaceFamily::WallachSo => "wallach-so",
            SpaceFamily::StiefelV2 => "stiefel-v2",
            SpaceFamily::StiefelV1k => "stiefel-v1k",
            SpaceFamily::WallachU3 => "wallach-u3",
            SpaceFamily::WallachSp3 => "wallach-sp3",
            SpaceFamily::SphereU => "sphere-u",
            SpaceFamily::SphereSp => "sphere-sp",
        }
    }

    /// Number of integer parameters.
    pub fn arity(self) -> usize {
        match self {
            SpaceFamily::WallachSo => 3,
            SpaceFamily::StiefelV1k => 2,
            SpaceFamily::StiefelV2 | SpaceFamily::SphereU | SpaceFamily::SphereSp => 1,
            SpaceFamily::WallachU3 | SpaceFamily::WallachSp3 => 0,
        }
    }

    /// Human-readable parameter constraints.
    pub fn constraints(self) -> &'static str {
        match self {
            SpaceFamily::WallachSo => "params n1,n2,n3 >= 1 with n1+n2+n3 >= 3; SO(n1+n2+n3)/SO(n1)SO(n2)SO(n3)",
            SpaceFamily::StiefelV2 => "n >= 4; V_2 R^n = SO(n)/SO(n-2)",
            SpaceFamily::StiefelV1k => "params n2,n3 >= 2; V_{1+n2} R^n = SO(1+n2+n3)/SO(n3)",
            SpaceFamily::WallachU3 => "no parameters; U(3)/U(1)^3",
            SpaceFamily::WallachSp3 => "no parameters; Sp(3)/Sp(1)^3",
            SpaceFamily::SphereU => "n >= 1; S^{2n+1} = U(n+1)/U(n)",
            SpaceFamily::SphereSp => "n >= 1; S^{4n+3} = Sp(n+1)/Sp(n)",
        }
    }

    /// Parameters used when listing the family without explicit values.
    pub fn default_params(self) -> Vec<usize> {
        match self {
            SpaceFamily::WallachSo => vec![1, 3, 2],
            SpaceFamily::StiefelV2 => vec![4],
            SpaceFamily::StiefelV1k => vec![3, 2],
            SpaceFamily::WallachU3 | SpaceFamily::WallachSp3 => vec![],
            SpaceFamily::SphereU | SpaceFamily::SphereSp => vec![1],
        }
    }
}

impl fmt::Display for SpaceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpaceFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown space family {s:?}")))
    }
}

/// A space family together with its integer parameters.
///
/// JSON form: `{"family": "wallach-so", "params": [1, 3, 2]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub family: SpaceFamily,
    #[serde(default)]
    pub params: Vec<usize>,
}

impl SpaceSpec {
    pub fn new(family: SpaceFamily, params: Vec<usize>) -> Self {
        Self { family, params }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(usize::to_string).collect();
            write!(f, "({})", p.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    /// Parses `wallach-so(1,3,2)`, `stiefel-v2(5)` or `wallach-u3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = match s.find('(') {
            Some(i) => {
                let inner = s[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {s:?}")))?;
                let params = inner
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad parameter {p:?} in {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (&s[..i], params)
            }
            None => (s, Vec::new()),
        };
        Ok(SpaceSpec::new(name.parse()?, params))
    }
}

/// A labeled summand of `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Module {
    pub label: String,
    /// Ambient basis positions.
    pub positions: Vec<usize>,
}

/// A validated reductive decomposition.
#[derive(Debug, Clone)]
pub struct SpaceConfig {
    pub spec: SpaceSpec,
    pub ambient: LieBasis,
    /// Ambient positions spanning `h`.
    pub h_positions: Vec<usize>,
    pub modules: Vec<Module>,
    /// Ambient position of each `m` coordinate, modules concatenated in order.
    pub m_positions: Vec<usize>,
    /// Coefficient name of each `m` coordinate.
    pub variables: Vec<String>,
    pub notes: Vec<String>,
    m_index: Vec<Option<usize>>,
    m_structure: Vec<Vec<(usize, f64)>>,
}

impl SpaceConfig {
    fn assemble(
        spec: SpaceSpec,
        ambient: LieBasis,
        h_positions: Vec<usize>,
        modules: Vec<Module>,
        variables: Vec<String>,
        notes: Vec<String>,
    ) -> Result<Self> {
        let m_positions: Vec<usize> = modules.iter().flat_map(|m| m.positions.iter().copied()).collect();
        let mut m_index = vec![None; ambient.dim()];
        for (i, &p) in m_positions.iter().enumerate() {
            m_index[p] = Some(i);
        }
        let dm = m_positions.len();
        let mut m_structure = vec![Vec::new(); dm * dm];
        for p in 0..dm {
            for q in 0..dm {
                m_structure[p * dm + q] = ambient
                    .structure
                    .get(m_positions[p], m_positions[q])
                    .iter()
                    .filter_map(|&(k, c)| m_index[k].map(|r| (r, c)))
                    .collect();
            }
        }
        let config = Self {
            spec,
            ambient,
            h_positions,
            modules,
            m_positions,
            variables,
            notes,
            m_index,
            m_structure,
        };
        let report = structure_report(&config);
        if let Some(bad) = report.failures().next() {
            return Err(Error::InternalConsistency(format!(
                "{}: {} (residual {:e})",
                config.spec, bad.name, bad.residual
            )));
        }
        Ok(config)
    }

    pub fn dim_m(&self) -> usize {
        self.m_positions.len()
    }

    pub fn dim_h(&self) -> usize {
        self.h_positions.len()
    }

    pub fn module_dims(&self) -> Vec<usize> {
        self.modules.iter().map(|m| m.positions.len()).collect()
    }

    /// Coordinate ranges of each module inside an `m` vector.
    pub fn module_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.modules
            .iter()
            .map(|m| {
                let r = start..start + m.positions.len();
                start = r.end;
                r
            })
            .collect()
    }

    pub fn module_index(&self, label: &str) -> Option<usize> {
        self.modules.iter().position(|m| m.label == label)
    }

    /// Module containing `m` coordinate `i`.
    pub fn module_of(&self, i: usize) -> usize {
        let mut acc = 0;
        for (k, m) in self.modules.iter().enumerate() {
            acc += m.positions.len();
            if i < acc {
                return k;
            }
        }
        panic!("coordinate {i} out of range for dim m = {}", self.dim_m())
    }

    /// `m` coordinate of an ambient position, if it lies in `m`.
    pub fn m_coordinate(&self, ambient_position: usize) -> Option<usize> {
        self.m_index.get(ambient_position).copied().flatten()
    }

    /// Ambient basis label of each `m` coordinate.
    pub fn basis_labels(&self) -> Vec<String> {
        self.m_positions
            .iter()
            .map(|&p| self.ambient.labels[p].clone())
            .collect()
    }

    /// `[e_p, e_q]_m` as `(r, coefficient)` over `m` coordinates.
    pub fn m_bracket(&self, p: usize, q: usize) -> &[(usize, f64)] {
        &self.m_structure[p * self.dim_m() + q]
    }

    /// `B(e_p, e_p)` for `m` coordinate `p`.
    pub fn m_gram(&self, p: usize) -> f64 {
        self.ambient.gram[self.m_positions[p]]
    }

    /// Unit vector on `m` coordinate `p`.
    pub fn unit(&self, p: usize) -> CoefficientVector {
        let mut v = vec![0.0; self.dim_m()];
        v[p] = 1.0;
        CoefficientVector::new(v)
    }

    /// Unit vector for a variable name or ambient basis label.
    pub fn unit_named(&self, name: &str) -> Result<CoefficientVector> {
        self.variable_position(name)
            .map(|p| self.unit(p))
            .ok_or_else(|| Error::NotFound(format!("no m coordinate named {name} in {}", self.spec)))
    }

    /// Position of a variable, accepting either its coefficient name or the
    /// ambient basis label.
    pub fn variable_position(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name).or_else(|| {
            self.ambient
                .position(name)
                .and_then(|p| self.m_coordinate(p))
        })
    }

    /// Matrix realization of an `m` vector.
    pub fn to_matrix(&self, x: &CoefficientVector) -> Result<MatrixElement> {
        self.check_shape(x)?;
        let mut coords = vec![0.0; self.ambient.dim()];
        for (i, &p) in self.m_positions.iter().enumerate() {
            coords[p] = x.values[i];
        }
        Ok(self.ambient.combine(&coords))
    }

    pub fn check_shape(&self, x: &CoefficientVector) -> Result<()> {
        if x.values.len() != self.dim_m() {
            return Err(Error::IncompatibleElements(format!(
                "vector of length {} for {} with dim m = {}",
                x.values.len(),
                self.spec,
                self.dim_m()
            )));
        }
        Ok(())
    }

    /// Same configuration with modules renamed, e.g. to run the Wallach
    /// checks on a space whose labels are not `m12, m13, m23`.
    pub fn relabeled(&self, renames: &[(&str, &str)]) -> Result<Self> {
        let mut out = self.clone();
        for (old, new) in renames {
            let i = out
                .module_index(old)
                .ok_or_else(|| Error::NotFound(format!("module {old} in {}", self.spec)))?;
            out.modules[i].label = (*new).to_string();
        }
        Ok(out)
    }
}

/// Orthogonal projection onto `m`: `a_k = B(X, e_k) / B(e_k, e_k)`.
pub fn project_m(config: &SpaceConfig, x: &MatrixElement) -> Result<CoefficientVector> {
    let amb = &config.ambient;
    if x.dim() != amb.matrix_dim() || x.kind != amb.kind {
        return Err(Error::IncompatibleElements(format!(
            "{}({}) element for an ambient {}({}) realization",
            x.kind,
            x.dim(),
            amb.kind,
            amb.matrix_dim()
        )));
    }
    let coords = amb.coordinates(x);
    Ok(CoefficientVector::new(
        config.m_positions.iter().map(|&p| coords[p]).collect(),
    ))
}

/// Coefficient name `prefix` + indices; indices of two digits are separated
/// by an underscore to keep names unambiguous.
fn var_name(prefix: &str, a: usize, b: usize) -> String {
    if a >= 10 || b >= 10 {
        format!("{prefix}{a}_{b}")
    } else {
        format!("{prefix}{a}{b}")
    }
}

fn require(cond: bool, spec: &SpaceSpec) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "{spec}: {}",
            spec.family.constraints()
        )))
    }
}

fn pos(basis: &LieBasis, label: &str) -> usize {
    basis
        .position(label)
        .unwrap_or_else(|| panic!("ambient basis lacks {label}"))
}

/// Builds and validates one of the supported configurations.
pub fn build_space(spec: &SpaceSpec) -> Result<SpaceConfig> {
    let family = spec.family;
    if spec.params.len() != family.arity() {
        return Err(Error::InvalidParameters(format!(
            "{family} takes {} parameter(s), got {}",
            family.arity(),
            spec.params.len()
        )));
    }
    let p = &spec.params;
    let matrix_dim = match family {
        SpaceFamily::WallachSo => p.iter().sum(),
        SpaceFamily::StiefelV2 => p[0],
        SpaceFamily::StiefelV1k => 1 + p[0] + p[1],
        SpaceFamily::WallachU3 => 3,
        SpaceFamily::WallachSp3 => 6,
        SpaceFamily::SphereU => p[0] + 1,
        SpaceFamily::SphereSp => 2 * (p[0] + 1),
    };
    if matrix_dim > MAX_MATRIX_DIM {
        return Err(Error::InvalidParameters(format!(
            "{spec}: ambient matrices of size {matrix_dim} exceed the supported maximum {MAX_MATRIX_DIM}"
        )));
    }
    match family {
        SpaceFamily::WallachSo => {
            require(p.iter().all(|&n| n >= 1) && matrix_dim >= 3, spec)?;
            build_wallach_so(spec.clone(), p[0], p[1], p[2])
        }
        SpaceFamily::StiefelV2 => {
            require(p[0] >= 4, spec)?;
            build_stiefel_v2(spec.clone(), p[0])
        }
        SpaceFamily::StiefelV1k => {
            require(p[0] >= 2 && p[1] >= 2, spec)?;
            build_stiefel_v1k(spec.clone(), p[0], p[1])
        }
        SpaceFamily::WallachU3 => build_wallach_u3(spec.clone()),
        SpaceFamily::WallachSp3 => build_wallach_sp3(spec.clone()),
        SpaceFamily::SphereU => {
            require(p[0] >= 1, spec)?;
            build_sphere_u(spec.clone(), p[0])
        }
        SpaceFamily::SphereSp => {
            require(p[0] >= 1, spec)?;
            build_sphere_sp(spec.clone(), p[0])
        }
    }
}

/// Convenience wrapper around [`build_space`].
pub fn build(family: SpaceFamily, params: &[usize]) -> Result<SpaceConfig> {
    build_space(&SpaceSpec::new(family, params.to_vec()))
}

/// Positions and names of `xi(a,b)` for `a` in `rows`, `b` in `cols`, `a < b`.
fn so_block(
    basis: &LieBasis,
    rows: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
) -> (Vec<usize>, Vec<String>) {
    let mut ps = Vec::new();
    let mut names = Vec::new();
    for a in rows {
        for b in cols.clone() {
            if a < b {
                ps.push(pos(basis, &so_label(a, b)));
                names.push(var_name("a", a, b));
            }
        }
    }
    (ps, names)
}

fn so_modules(
    basis: &LieBasis,
    blocks: &[(&str, std::ops::RangeInclusive<usize>, std::ops::RangeInclusive<usize>)],
) -> (Vec<Module>, Vec<String>) {
    let mut modules = Vec::new();
    let mut vars = Vec::new();
    for (label, rows, cols) in blocks {
        let (ps, names) = so_block(basis, rows.clone(), cols.clone());
        modules.push(Module {
            label: (*label).to_string(),
            positions: ps,
        });
        vars.extend(names);
    }
    (modules, vars)
}

const SCALE_NOTE: &str =
    "form B(X,Y) = -Re tr(XY); conventions scaling B by a positive constant give the same systems";

fn build_wallach_so(spec: SpaceSpec, n1: usize, n2: usize, n3: usize) -> Result<SpaceConfig> {
    let n = n1 + n2 + n3;
    let basis = build_so_basis(n)?;
    let b1 = 1..=n1;
    let b2 = n1 + 1..=n1 + n2;
    let b3 = n1 + n2 + 1..=n;
    let mut h = Vec::new();
    for blk in [&b1, &b2, &b3] {
        h.extend(so_block(&basis, blk.clone(), blk.clone()).0);
    }
    let (modules, vars) = so_modules(
        &basis,
        &[("m12", b1.clone(), b2.clone()), ("m13", b1, b3.clone()), ("m23", b2, b3)],
    );
    let mut notes = vec![SCALE_NOTE.to_string()];
    if n1.min(n2).min(n3) < 2 {
        notes.push("parameters below the generalized Wallach bound n_i >= 2".into());
    }
    SpaceConfig::assemble(spec, basis, h, modules, vars, notes)
}

fn build_stiefel_v2(spec: SpaceSpec, n: usize) -> Result<SpaceConfig> {
    let basis = build_so_basis(n)?;
    let h = so_block(&basis, 3..=n, 3..=n).0;
    let (modules, vars) = so_modules(
        &basis,
        &[("m0", 1..=1, 2..=2), ("m1", 1..=1, 3..=n), ("m2", 2..=2, 3..=n)],
    );
    SpaceConfig::assemble(spec, basis, h, modules, vars, vec![SCALE_NOTE.to_string()])
}

fn build_stiefel_v1k(spec: SpaceSpec, n2: usize, n3: usize) -> Result<SpaceConfig> {
    let n = 1 + n2 + n3;
    let basis = build_so_basis(n)?;
    let b2 = 2..=1 + n2;
    let b3 = 2 + n2..=n;
    let h = so_block(&basis, b3.clone(), b3.clone()).0;
    let so_label_k = format!("so({n2})");
    let (modules, vars) = so_modules(
        &basis,
        &[
            (&so_label_k, b2.clone(), b2.clone()),
            ("m12", 1..=1, b2.clone()),
            ("m13", 1..=1, b3.clone()),
            ("m23", b2, b3),
        ],
    );
    let notes = vec![
        SCALE_NOTE.to_string(),
        format!("modules are irreducible under K = SO({n2})SO({n3}), not under H = SO({n3})"),
    ];
    SpaceConfig::assemble(spec, basis, h, modules, vars, notes)
}

fn build_wallach_u3(spec: SpaceSpec) -> Result<SpaceConfig> {
    let basis = build_u_basis(3)?;
    let h = (1..=3).map(|a| pos(&basis, &format!("f({a},{a})"))).collect();
    let mut modules = Vec::new();
    let mut vars = Vec::new();
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        let mut ps = Vec::new();
        for (kind, prefix) in [('e', "a"), ('f', "b")] {
            ps.push(pos(&basis, &format!("{kind}({i},{j})")));
            vars.push(var_name(prefix, i, j));
        }
        modules.push(Module {
            label: format!("m{i}{j}"),
            positions: ps,
        });
    }
    SpaceConfig::assemble(spec, basis, h, modules, vars, vec![SCALE_NOTE.to_string()])
}

fn build_wallach_sp3(spec: SpaceSpec) -> Result<SpaceConfig> {
    let basis = build_sp_basis(3)?;
    let mut h = Vec::new();
    for a in 1..=3 {
        for kind in ['f', 'g', 'h'] {
            h.push(pos(&basis, &format!("{kind}({a},{a})")));
        }
    }
    let mut modules = Vec::new();
    let mut vars = Vec::new();
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        let mut ps = Vec::new();
        for (kind, prefix) in [('e', "a"), ('f', "b"), ('g', "c"), ('h', "q")] {
            ps.push(pos(&basis, &format!("{kind}({i},{j})")));
            vars.push(var_name(prefix, i, j));
        }
        modules.push(Module {
            label: format!("m{i}{j}"),
            positions: ps,
        });
    }
    SpaceConfig::assemble(spec, basis, h, modules, vars, vec![SCALE_NOTE.to_string()])
}

fn build_sphere_u(spec: SpaceSpec, n: usize) -> Result<SpaceConfig> {
    let basis = build_u_basis(n + 1)?;
    let mut h = Vec::new();
    for i in 2..=n + 1 {
        for j in i..=n + 1 {
            if i < j {
                h.push(pos(&basis, &format!("e({i},{j})")));
            }
            h.push(pos(&basis, &format!("f({i},{j})")));
        }
    }
    let m1 = Module {
        label: "m1".into(),
        positions: vec![pos(&basis, "f(1,1)")],
    };
    let mut vars = vec![var_name("alpha", 1, 1)];
    let mut ps = Vec::new();
    for j in 2..=n + 1 {
        for (kind, prefix) in [('e', "alpha"), ('f', "beta")] {
            ps.push(pos(&basis, &format!("{kind}(1,{j})")));
            vars.push(var_name(prefix, 1, j));
        }
    }
    let m2 = Module {
        label: "m2".into(),
        positions: ps,
    };
    SpaceConfig::assemble(spec, basis, h, vec![m1, m2], vars, vec![SCALE_NOTE.to_string()])
}

fn build_sphere_sp(spec: SpaceSpec, n: usize) -> Result<SpaceConfig> {
    let rank = n + 1;
    let mut basis = build_sp_basis(rank)?;
    let top = n + 2;
    basis.relabel(&[
        ("f(1,1)", "u(1,1)".to_string()),
        ("g(1,1)", format!("k(1,{top})")),
        ("h(1,1)", format!("mu(1,{top})")),
    ])?;
    let mut h = Vec::new();
    for a in 2..=rank {
        for b in a..=rank {
            let kinds: &[char] = if a < b { &['e', 'f', 'g', 'h'] } else { &['f', 'g', 'h'] };
            for k in kinds {
                h.push(pos(&basis, &format!("{k}({a},{b})")));
            }
        }
    }
    let m1 = Module {
        label: "m1".into(),
        positions: vec![
            pos(&basis, "u(1,1)"),
            pos(&basis, &format!("k(1,{top})")),
            pos(&basis, &format!("mu(1,{top})")),
        ],
    };
    let mut vars = vec![var_name("a", 1, 1), var_name("a", 1, top), var_name("b", 1, top)];
    let mut ps = Vec::new();
    for b in 2..=rank {
        for (kind, prefix) in [('e', "c"), ('f', "d"), ('g', "l"), ('h', "m")] {
            ps.push(pos(&basis, &format!("{kind}(1,{b})")));
            vars.push(var_name(prefix, 1, b));
        }
    }
    let m2 = Module {
        label: "m2".into(),
        positions: ps,
    };
    let notes = vec![
        SCALE_NOTE.to_string(),
        "u(1,1), k(1,n+2), mu(1,n+2) are the diagonal generators at index 1 of sp(n+1)".into(),
    ];
    SpaceConfig::assemble(spec, basis, h, vec![m1, m2], vars, notes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(c: &SpaceConfig, module: &str) -> Vec<String> {
        let m = &c.modules[c.module_index(module).unwrap()];
        m.positions.iter().map(|&p| c.ambient.labels[p].clone()).collect()
    }

    #[test]
    fn wallach_so_132_dims() {
        let c = build(SpaceFamily::WallachSo, &[1, 3, 2]).unwrap();
        assert_eq!(c.module_dims(), [3, 2, 6]);
        assert_eq!(c.dim_h() + c.dim_m(), c.ambient.dim());
    }

    #[test]
    fn sphere_sp_dims() {
        for n in 1..=3 {
            let c = build(SpaceFamily::SphereSp, &[n]).unwrap();
            assert_eq!(c.module_dims(), [3, 4 * n]);
            assert_eq!(c.dim_h() + c.dim_m(), c.ambient.dim());
        }
    }

    #[test]
    fn stiefel_v1k_blocks() {
        let c = build(SpaceFamily::StiefelV1k, &[3, 2]).unwrap();
        let l = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(labels(&c, "so(3)"), l(&["xi(2,3)", "xi(2,4)", "xi(3,4)"]));
        assert_eq!(labels(&c, "m12"), l(&["xi(1,2)", "xi(1,3)", "xi(1,4)"]));
        assert_eq!(labels(&c, "m13"), l(&["xi(1,5)", "xi(1,6)"]));
        assert_eq!(
            labels(&c, "m23"),
            l(&["xi(2,5)", "xi(2,6)", "xi(3,5)", "xi(3,6)", "xi(4,5)", "xi(4,6)"])
        );
    }

    #[test]
    fn parameter_bounds() {
        assert!(matches!(build(SpaceFamily::StiefelV2, &[3]), Err(Error::InvalidParameters(_))));
        assert!(matches!(build(SpaceFamily::StiefelV1k, &[1, 2]), Err(Error::InvalidParameters(_))));
        assert!(matches!(build(SpaceFamily::SphereU, &[0]), Err(Error::InvalidParameters(_))));
        assert!(matches!(build(SpaceFamily::WallachSo, &[0, 1, 2]), Err(Error::InvalidParameters(_))));
        assert!(matches!(build(SpaceFamily::WallachU3, &[1]), Err(Error::InvalidParameters(_))));
        assert!(matches!(build(SpaceFamily::StiefelV2, &[40]), Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn spec_round_trip() {
        for s in ["wallach-so(1,3,2)", "stiefel-v2(5)", "wallach-u3", "sphere-sp(2)"] {
            let spec: SpaceSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("nope(1)".parse::<SpaceSpec>().is_err());
        let json = serde_json::to_string(&SpaceSpec::new(SpaceFamily::StiefelV1k, vec![3, 2])).unwrap();
        assert_eq!(json, r#"{"family":"stiefel-v1k","params":[3,2]}"#);
    }

    #[test]
    fn projection_of_basis_and_h_elements() {
        let c = build(SpaceFamily::WallachSo, &[1, 3, 2]).unwrap();
        for p in 0..c.dim_m() {
            let e = &c.ambient.elements[c.m_positions[p]];
            assert_eq!(project_m(&c, e).unwrap(), c.unit(p));
        }
        for &hp in &c.h_positions {
            assert!(project_m(&c, &c.ambient.elements[hp]).unwrap().values.iter().all(|v| *v == 0.0));
        }
        let other = build_so_basis(4).unwrap();
        assert!(matches!(project_m(&c, &other.elements[0]), Err(Error::IncompatibleElements(_))));
    }

    #[test]
    fn projected_bracket_xi15_xi12() {
        let c = build(SpaceFamily::WallachSo, &[1, 3, 2]).unwrap();
        let x = c.ambient.element("xi(1,5)").unwrap();
        let y = c.ambient.element("xi(1,2)").unwrap();
        let v = project_m(&c, &crate::liealg::commutator(x, y).unwrap()).unwrap();
        let p = c.variable_position("a25").unwrap();
        assert_eq!(v.values[p], 1.0);
        assert_eq!(v.values.iter().filter(|x| **x != 0.0).count(), 1);
    }

    #[test]
    fn sphere_sp_m1_is_subalgebra() {
        let c = build(SpaceFamily::SphereSp, &[2]).unwrap();
        let m1 = c.module_ranges()[0].clone();
        for p in m1.clone() {
            for q in m1.clone() {
                for &(r, _) in c.m_bracket(p, q) {
                    assert!(m1.contains(&r));
                }
            }
        }
        assert_eq!(c.variables[..3], ["a11", "a14", "b14"]);
    }

    #[test]
    fn stiefel_v1k_so_block_commutes_with_m13() {
        let c = build(SpaceFamily::StiefelV1k, &[3, 2]).unwrap();
        let r = c.module_ranges();
        for p in r[0].clone() {
            for q in r[2].clone() {
                assert!(c.ambient.structure.get(c.m_positions[p], c.m_positions[q]).is_empty());
            }
        }
    }

    #[test]
    fn variable_names() {
        let c = build(SpaceFamily::WallachSp3, &[]).unwrap();
        assert_eq!(c.variables[..4], ["a12", "b12", "c12", "q12"]);
        let s = build(SpaceFamily::SphereU, &[2]).unwrap();
        assert_eq!(s.variables, ["alpha11", "alpha12", "beta12", "alpha13", "beta13"]);
    }
}
