//! Matrix realizations of `so(n)`, `u(n)` and `sp(n)`.
//!
//! Complex matrices are stored as a pair of real matrices `(re, im)`, so all
//! three algebras share one real arithmetic kernel. Every basis built here is
//! orthogonal for `B(X, Y) = -Re tr(XY)` and carries its structure constants,
//! computed from matrix commutators rather than from bracket tables.

mod lemmas;

pub use lemmas::{validate_bracket_lemma, BracketLemma};

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coefficients below this magnitude are treated as exact zeros when
/// structure constants are extracted.
const COEFF_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    So,
    U,
    Sp,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraKind::So => "so",
            AlgebraKind::U => "u",
            AlgebraKind::Sp => "sp",
        };
        f.write_str(s)
    }
}

/// A square complex matrix tagged with the algebra it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixElement {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
    pub kind: AlgebraKind,
}

impl MatrixElement {
    pub fn zeros(kind: AlgebraKind, dim: usize) -> Self {
        Self {
            re: DMatrix::zeros(dim, dim),
            im: DMatrix::zeros(dim, dim),
            kind,
        }
    }

    /// Ambient matrix dimension `d` (the element is `d x d`).
    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    /// Adds `value` at 1-based entry `(row, col)`.
    fn add_entry(&mut self, row: usize, col: usize, re: f64, im: f64) {
        self.re[(row - 1, col - 1)] += re;
        self.im[(row - 1, col - 1)] += im;
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            re: &self.re * factor,
            im: &self.im * factor,
            kind: self.kind,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
            kind: self.kind,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
            kind: self.kind,
        }
    }

    /// `self += factor * other`, in place.
    pub fn axpy(&mut self, factor: f64, other: &Self) {
        self.re += &other.re * factor;
        self.im += &other.im * factor;
    }

    pub fn max_abs(&self) -> f64 {
        self.re
            .iter()
            .chain(self.im.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn mul(&self, other: &Self) -> (DMatrix<f64>, DMatrix<f64>) {
        let re = &self.re * &other.re - &self.im * &other.im;
        let im = &self.re * &other.im + &self.im * &other.re;
        (re, im)
    }

    /// `Re tr(self * other)` without forming the product.
    fn re_trace_product(&self, other: &Self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += self.re[(i, j)] * other.re[(j, i)] - self.im[(i, j)] * other.im[(j, i)];
            }
        }
        acc
    }

    /// Largest violation of the defining conditions of the tagged algebra.
    pub fn membership_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        // skew-Hermitian: X^H = -X
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.re[(j, i)] + self.re[(i, j)]).abs());
                worst = worst.max((self.im[(j, i)] - self.im[(i, j)]).abs());
            }
        }
        match self.kind {
            AlgebraKind::So => worst.max(self.im.iter().fold(0.0_f64, |m, v| m.max(v.abs()))),
            AlgebraKind::U => worst,
            AlgebraKind::Sp => {
                // blocks ((X, -conj Y), (Y, conj X)) with Y symmetric
                let n = d / 2;
                for i in 0..n {
                    for j in 0..n {
                        let (xr, xi) = (self.re[(i, j)], self.im[(i, j)]);
                        let (yr, yi) = (self.re[(n + i, j)], self.im[(n + i, j)]);
                        worst = worst.max((self.re[(n + i, n + j)] - xr).abs());
                        worst = worst.max((self.im[(n + i, n + j)] + xi).abs());
                        worst = worst.max((self.re[(i, n + j)] + yr).abs());
                        worst = worst.max((self.im[(i, n + j)] - yi).abs());
                        worst = worst.max((yr - self.re[(n + j, i)]).abs());
                        worst = worst.max((yi - self.im[(n + j, i)]).abs());
                    }
                }
                worst
            }
        }
    }
}

/// `[X, Y] = XY - YX`.
pub fn commutator(x: &MatrixElement, y: &MatrixElement) -> Result<MatrixElement> {
    if x.dim() != y.dim() {
        return Err(Error::IncompatibleElements(format!(
            "dimensions {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    if x.kind != y.kind {
        return Err(Error::IncompatibleElements(format!(
            "algebras {} and {}",
            x.kind, y.kind
        )));
    }
    let (a_re, a_im) = x.mul(y);
    let (b_re, b_im) = y.mul(x);
    Ok(MatrixElement {
        re: a_re - b_re,
        im: a_im - b_im,
        kind: x.kind,
    })
}

/// The invariant form `B(X, Y) = -scale * Re tr(XY)`.
///
/// `scale` defaults to 1. Orthogonality, the equigeodesic condition and the
/// generated systems do not depend on it; it exists so that constants can be
/// compared against conventions such as `-(n-2) tr XY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearForm {
    pub scale: f64,
}

impl Default for BilinearForm {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

impl BilinearForm {
    pub fn eval(&self, x: &MatrixElement, y: &MatrixElement) -> f64 {
        -self.scale * x.re_trace_product(y)
    }
}

/// Sparse structure tensor: `[e_i, e_j] = sum_k c_ij^k e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    entries: Vec<Vec<(usize, f64)>>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero `(k, c_ij^k)` for the pair `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &[(usize, f64)] {
        &self.entries[i * self.dim + j]
    }

    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> f64 {
        self.get(i, j)
            .iter()
            .find(|(kk, _)| *kk == k)
            .map_or(0.0, |(_, c)| *c)
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0.0 {
                    continue;
                }
                for &(k, c) in self.get(i, j) {
                    out[k] += c * xi * yj;
                }
            }
        }
        out
    }

    /// Iterates all `(i, j, k, c)` with `c != 0`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.entries.iter().enumerate().flat_map(move |(idx, list)| {
            let (i, j) = (idx / self.dim, idx % self.dim);
            list.iter().map(move |&(k, c)| (i, j, k, c))
        })
    }
}

/// An ordered, `B`-orthogonal basis of a matrix Lie algebra.
#[derive(Debug, Clone)]
pub struct LieBasis {
    pub kind: AlgebraKind,
    /// The `n` of `so(n)`, `u(n)` or `sp(n)`.
    pub rank: usize,
    pub elements: Vec<MatrixElement>,
    pub labels: Vec<String>,
    /// `B(e_i, e_i)`.
    pub gram: Vec<f64>,
    pub structure: StructureConstants,
    pub form: BilinearForm,
    index: HashMap<String, usize>,
    /// Nonzero entries `(row, col, re, im)` of each element.
    supports: Vec<Vec<(usize, usize, f64, f64)>>,
}

impl LieBasis {
    fn assemble(
        kind: AlgebraKind,
        rank: usize,
        items: Vec<(String, MatrixElement)>,
        form: BilinearForm,
    ) -> Result<Self> {
        let (labels, elements): (Vec<_>, Vec<_>) = items.into_iter().unzip();
        let dim = elements.len();
        let gram: Vec<f64> = elements.iter().map(|e| form.eval(e, e)).collect();
        let supports: Vec<_> = elements.iter().map(sparse_entries).collect();
        for (label, g) in labels.iter().zip(&gram) {
            if *g <= 0.0 {
                return Err(Error::InternalConsistency(format!(
                    "B({label}, {label}) = {g} is not positive"
                )));
            }
        }
        let mut entries = vec![Vec::new(); dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let c = commutator(&elements[i], &elements[j])?;
                let mut list = Vec::new();
                let mut rebuilt = MatrixElement::zeros(kind, c.dim());
                for k in 0..dim {
                    let coeff = sparse_form(form, &c, &supports[k]) / gram[k];
                    if coeff.abs() > COEFF_EPS {
                        rebuilt.axpy(coeff, &elements[k]);
                        list.push((k, coeff));
                    }
                }
                let closure = rebuilt.sub(&c).max_abs();
                if closure > 1e-12 {
                    return Err(Error::InternalConsistency(format!(
                        "[{}, {}] leaves the span of the basis (residual {closure:e})",
                        labels[i], labels[j]
                    )));
                }
                entries[j * dim + i] = list.iter().map(|&(k, v)| (k, -v)).collect();
                entries[i * dim + j] = list;
            }
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Ok(Self {
            kind,
            rank,
            elements,
            labels,
            gram,
            structure: StructureConstants { dim, entries },
            form,
            index,
            supports,
        })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Matrix size `d` of the realization.
    pub fn matrix_dim(&self) -> usize {
        self.elements.first().map_or(0, MatrixElement::dim)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn element(&self, label: &str) -> Option<&MatrixElement> {
        self.position(label).map(|i| &self.elements[i])
    }

    /// Same basis and structure constants under the form `scale * B`.
    pub fn with_form_scale(&self, scale: f64) -> Result<Self> {
        if scale <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "form scale must be positive, got {scale}"
            )));
        }
        let items = self
            .labels
            .iter()
            .cloned()
            .zip(self.elements.iter().cloned())
            .collect();
        Self::assemble(self.kind, self.rank, items, BilinearForm { scale })
    }

    /// Renames basis elements; order and structure are unchanged.
    pub fn relabel(&mut self, renames: &[(&str, String)]) -> Result<()> {
        for (old, new) in renames {
            let pos = self
                .position(old)
                .ok_or_else(|| Error::NotFound(format!("basis label {old}")))?;
            self.index.remove(*old);
            self.labels[pos] = new.clone();
            self.index.insert(new.clone(), pos);
        }
        Ok(())
    }

    /// Coordinates of an arbitrary matrix in this basis.
    pub fn coordinates(&self, x: &MatrixElement) -> Vec<f64> {
        self.supports
            .iter()
            .zip(&self.gram)
            .map(|(s, g)| sparse_form(self.form, x, s) / g)
            .collect()
    }

    pub fn combine(&self, coords: &[f64]) -> MatrixElement {
        let mut out = MatrixElement::zeros(self.kind, self.matrix_dim());
        for (c, e) in coords.iter().zip(&self.elements) {
            if *c != 0.0 {
                out.axpy(*c, e);
            }
        }
        out
    }

    /// `B` on coordinate vectors.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .zip(&self.gram)
            .map(|((a, b), g)| a * b * g)
            .sum()
    }

    /// Maximum Jacobi-identity residual over all index triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let s = &self.structure;
        let mut worst = 0.0_f64;
        let mut acc = vec![0.0; n];
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    acc.iter_mut().for_each(|v| *v = 0.0);
                    for &(a, b, c) in &[(i, j, k), (j, k, i), (k, i, j)] {
                        for &(m, c1) in s.get(a, b) {
                            for &(r, c2) in s.get(m, c) {
                                acc[r] += c1 * c2;
                            }
                        }
                    }
                    worst = acc.iter().fold(worst, |w, v| w.max(v.abs()));
                }
            }
        }
        worst
    }

    /// Maximum `|B([z, x], y) + B(x, [z, y])|` over basis triples.
    pub fn ad_invariance_residual(&self) -> f64 {
        let n = self.dim();
        let s = &self.structure;
        let mut worst = 0.0_f64;
        for z in 0..n {
            for x in 0..n {
                for y in 0..n {
                    let a = s.coefficient(z, x, y) * self.gram[y];
                    let b = s.coefficient(z, y, x) * self.gram[x];
                    worst = worst.max((a + b).abs());
                }
            }
        }
        worst
    }

    /// Largest off-diagonal `|B(e_i, e_j)|`, computed from the matrices.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max(self.form.eval(&self.elements[i], &self.elements[j]).abs());
            }
        }
        worst
    }

    /// Largest `|c_ij^k + c_ji^k|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for &(k, c) in self.structure.get(i, j) {
                    worst = worst.max((c + self.structure.coefficient(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest entrywise gap between `[e_i, e_j]` and its expansion through
    /// the structure constants.
    pub fn reconstruction_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let direct = commutator(&self.elements[i], &self.elements[j])
                    .expect("basis elements share dimension and kind");
                let mut rebuilt = MatrixElement::zeros(self.kind, self.matrix_dim());
                for &(k, c) in self.structure.get(i, j) {
                    rebuilt.axpy(c, &self.elements[k]);
                }
                worst = worst.max(rebuilt.sub(&direct).max_abs());
            }
        }
        worst
    }
}

fn sparse_entries(m: &MatrixElement) -> Vec<(usize, usize, f64, f64)> {
    let d = m.dim();
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let (re, im) = (m.re[(i, j)], m.im[(i, j)]);
            if re != 0.0 || im != 0.0 {
                out.push((i, j, re, im));
            }
        }
    }
    out
}

/// `B(x, e)` where `e` is given by its nonzero entries.
fn sparse_form(form: BilinearForm, x: &MatrixElement, e: &[(usize, usize, f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for &(i, j, re, im) in e {
        acc += x.re[(j, i)] * re - x.im[(j, i)] * im;
    }
    -form.scale * acc
}

fn unit(kind: AlgebraKind, d: usize, entries: &[(usize, usize, f64, f64)]) -> MatrixElement {
    let mut m = MatrixElement::zeros(kind, d);
    for &(r, c, re, im) in entries {
        m.add_entry(r, c, re, im);
    }
    m
}

/// `xi(a,b) = E_ab - E_ba` for `1 <= a < b <= n`, ordered by `(a, b)`.
pub fn build_so_basis(n: usize) -> Result<LieBasis> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("so(n) needs n >= 2, got {n}")));
    }
    let mut items = Vec::with_capacity(n * (n - 1) / 2);
    for a in 1..=n {
        for b in (a + 1)..=n {
            items.push((
                so_label(a, b),
                unit(AlgebraKind::So, n, &[(a, b, 1.0, 0.0), (b, a, -1.0, 0.0)]),
            ));
        }
    }
    LieBasis::assemble(AlgebraKind::So, n, items, BilinearForm::default())
}

pub fn so_label(a: usize, b: usize) -> String {
    format!("xi({a},{b})")
}

/// `e(i,j) = E_ij - E_ji` (`i < j`) and `f(i,j) = i(E_ij + E_ji)` (`i <= j`),
/// ordered by the index pair and then `e` before `f`. Note `f(a,a) = 2i E_aa`.
pub fn build_u_basis(n: usize) -> Result<LieBasis> {
    if n < 1 {
        return Err(Error::InvalidDimension(format!("u(n) needs n >= 1, got {n}")));
    }
    let kind = AlgebraKind::U;
    let mut items = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in i..=n {
            if i < j {
                items.push((
                    format!("e({i},{j})"),
                    unit(kind, n, &[(i, j, 1.0, 0.0), (j, i, -1.0, 0.0)]),
                ));
            }
            items.push((
                format!("f({i},{j})"),
                unit(kind, n, &[(i, j, 0.0, 1.0), (j, i, 0.0, 1.0)]),
            ));
        }
    }
    LieBasis::assemble(kind, n, items, BilinearForm::default())
}

/// Orthogonal basis of `sp(n)` realized in `2n x 2n` complex matrices of the
/// form `((X, -conj Y), (Y, conj X))`.
///
/// For `a < b`: `e(a,b)` has `X = E_ab - E_ba`; `f(a,b)` has
/// `X = i(E_ab + E_ba)`; `g(a,b)` has `Y = E_ab + E_ba`; `h(a,b)` has
/// `Y = i(E_ab + E_ba)`. The diagonal generators `f(a,a)`, `g(a,a)`, `h(a,a)`
/// use `X = i E_aa`, `Y = E_aa`, `Y = i E_aa`. Ordering is by index pair,
/// then `e, f, g, h`.
pub fn build_sp_basis(n: usize) -> Result<LieBasis> {
    if n < 1 {
        return Err(Error::InvalidDimension(format!("sp(n) needs n >= 1, got {n}")));
    }
    let kind = AlgebraKind::Sp;
    let d = 2 * n;
    let mut items = Vec::with_capacity(2 * n * n + n);
    for a in 1..=n {
        for b in a..=n {
            let (na, nb) = (n + a, n + b);
            if a < b {
                items.push((
                    format!("e({a},{b})"),
                    unit(
                        kind,
                        d,
                        &[
                            (a, b, 1.0, 0.0),
                            (b, a, -1.0, 0.0),
                            (na, nb, 1.0, 0.0),
                            (nb, na, -1.0, 0.0),
                        ],
                    ),
                ));
                items.push((
                    format!("f({a},{b})"),
                    unit(
                        kind,
                        d,
                        &[
                            (a, b, 0.0, 1.0),
                            (b, a, 0.0, 1.0),
                            (na, nb, 0.0, -1.0),
                            (nb, na, 0.0, -1.0),
                        ],
                    ),
                ));
                items.push((
                    format!("g({a},{b})"),
                    unit(
                        kind,
                        d,
                        &[
                            (a, nb, -1.0, 0.0),
                            (b, na, -1.0, 0.0),
                            (nb, a, 1.0, 0.0),
                            (na, b, 1.0, 0.0),
                        ],
                    ),
                ));
                items.push((
                    format!("h({a},{b})"),
                    unit(
                        kind,
                        d,
                        &[
                            (a, nb, 0.0, 1.0),
                            (b, na, 0.0, 1.0),
                            (nb, a, 0.0, 1.0),
                            (na, b, 0.0, 1.0),
                        ],
                    ),
                ));
            } else {
                items.push((
                    format!("f({a},{a})"),
                    unit(kind, d, &[(a, a, 0.0, 1.0), (na, na, 0.0, -1.0)]),
                ));
                items.push((
                    format!("g({a},{a})"),
                    unit(kind, d, &[(a, na, -1.0, 0.0), (na, a, 1.0, 0.0)]),
                ));
                items.push((
                    format!("h({a},{a})"),
                    unit(kind, d, &[(a, na, 0.0, 1.0), (na, a, 0.0, 1.0)]),
                ));
            }
        }
    }
    LieBasis::assemble(kind, n, items, BilinearForm::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bracket_label(basis: &LieBasis, x: &str, y: &str) -> Vec<(String, f64)> {
        let (i, j) = (basis.position(x).unwrap(), basis.position(y).unwrap());
        basis
            .structure
            .get(i, j)
            .iter()
            .map(|&(k, c)| (basis.labels[k].clone(), c))
            .collect()
    }

    #[test]
    fn so3_bracket_and_norm() {
        let b = build_so_basis(3).unwrap();
        assert_eq!(b.labels, ["xi(1,2)", "xi(1,3)", "xi(2,3)"]);
        assert_eq!(bracket_label(&b, "xi(1,2)", "xi(2,3)"), [("xi(1,3)".to_string(), 1.0)]);
        assert_eq!(b.gram[0], 2.0);
    }

    #[test]
    fn so4_disjoint_indices_commute() {
        let b = build_so_basis(4).unwrap();
        assert!(bracket_label(&b, "xi(1,2)", "xi(3,4)").is_empty());
    }

    #[test]
    fn invalid_dimensions() {
        assert!(matches!(build_so_basis(1), Err(Error::InvalidDimension(_))));
        assert!(matches!(build_u_basis(0), Err(Error::InvalidDimension(_))));
        assert!(matches!(build_sp_basis(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn u_basis_sizes_and_brackets() {
        let b = build_u_basis(3).unwrap();
        assert_eq!(b.dim(), 9);
        assert_eq!(bracket_label(&b, "e(1,2)", "e(2,3)"), [("e(1,3)".to_string(), 1.0)]);
        let b2 = build_u_basis(2).unwrap();
        assert!(bracket_label(&b2, "e(1,2)", "e(1,2)").is_empty());
        // [e12, f12] = 2i(E11 - E22) = f(1,1) - f(2,2)
        let mut got = bracket_label(&b2, "e(1,2)", "f(1,2)");
        got.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(got, [("f(1,1)".to_string(), 1.0), ("f(2,2)".to_string(), -1.0)]);
    }

    #[test]
    fn sp_basis_membership_and_sample_brackets() {
        for n in 1..=3 {
            let b = build_sp_basis(n).unwrap();
            assert_eq!(b.dim(), 2 * n * n + n);
            for e in &b.elements {
                assert!(e.membership_residual() < 1e-15);
            }
        }
        let b = build_sp_basis(3).unwrap();
        assert_eq!(bracket_label(&b, "e(1,2)", "g(2,3)"), [("g(1,3)".to_string(), 1.0)]);
        assert_eq!(bracket_label(&b, "f(1,2)", "g(2,3)"), [("h(1,3)".to_string(), -1.0)]);
    }

    #[test]
    fn sp_out_of_range_labels_absent() {
        let b = build_sp_basis(2).unwrap();
        assert!(b.position("f(2,3)").is_none());
        assert!(b.position("e(1,2)").is_some());
    }

    #[test]
    fn commutator_rejects_mismatch() {
        let so3 = build_so_basis(3).unwrap();
        let so4 = build_so_basis(4).unwrap();
        let u3 = build_u_basis(3).unwrap();
        assert!(matches!(
            commutator(&so3.elements[0], &so4.elements[0]),
            Err(Error::IncompatibleElements(_))
        ));
        assert!(matches!(
            commutator(&so3.elements[0], &u3.elements[0]),
            Err(Error::IncompatibleElements(_))
        ));
        let zero = commutator(&so3.elements[0], &so3.elements[0]).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn form_scale_leaves_structure_unchanged() {
        let b = build_so_basis(4).unwrap();
        let scaled = b.with_form_scale(2.0).unwrap();
        assert_eq!(scaled.structure, b.structure);
        assert_eq!(scaled.gram[0], 2.0 * b.gram[0]);
        assert!(b.with_form_scale(0.0).is_err());
    }

    #[test]
    fn membership_invariants_hold() {
        for n in 2..=5 {
            for e in &build_so_basis(n).unwrap().elements {
                assert_eq!(e.membership_residual(), 0.0);
            }
        }
        for n in 1..=3 {
            for e in &build_u_basis(n).unwrap().elements {
                assert_eq!(e.membership_residual(), 0.0);
            }
        }
    }
}
