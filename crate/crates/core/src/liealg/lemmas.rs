//! Printed bracket tables checked against direct matrix commutators.
//!
//! Each table is expanded over every admissible index assignment. The
//! commutator of the matrix realizations is the reference value; a relation
//! that disagrees is recorded as a failed entry, never corrected.

use serde::{Deserialize, Serialize};

use super::{commutator, AlgebraKind, LieBasis};
use crate::report::ValidationReport;

const MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BracketLemma {
    /// `[xi_ab, xi_bc] = xi_ac`; brackets with four distinct indices vanish.
    So,
    /// Kronecker-delta formulas for `[e, e]`, `[f, f]`, `[f, e]` in `u(n)`.
    U,
    /// Ten relations `[x_ab, y_bc] = +/- z_ac` in `sp(n)`, `a, b, c` distinct.
    Sp,
    /// Brackets of `u11`, `k_{1,n+2}`, `mu_{1,n+2}` with `e, f, g, h` in `sp(n+1)`.
    SphereSp,
}

impl BracketLemma {
    pub fn name(self) -> &'static str {
        match self {
            BracketLemma::So => "so-lemma",
            BracketLemma::U => "u-lemma",
            BracketLemma::Sp => "sp-lemma",
            BracketLemma::SphereSp => "sphere-sp-lemma",
        }
    }

    fn algebra(self) -> AlgebraKind {
        match self {
            BracketLemma::So => AlgebraKind::So,
            BracketLemma::U => AlgebraKind::U,
            BracketLemma::Sp | BracketLemma::SphereSp => AlgebraKind::Sp,
        }
    }
}

impl std::str::FromStr for BracketLemma {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "so-lemma" | "so" => Ok(BracketLemma::So),
            "u-lemma" | "u" => Ok(BracketLemma::U),
            "sp-lemma" | "sp" => Ok(BracketLemma::Sp),
            "sphere-sp-lemma" | "sphere-sp" => Ok(BracketLemma::SphereSp),
            other => Err(crate::Error::InvalidInput(format!("unknown lemma {other}"))),
        }
    }
}

/// A signed sum of named generators, written with the index conventions of
/// the tables (`e_ba = -e_ab`, `e_aa = 0`, `f, g, h` symmetric in their indices).
#[derive(Debug, Clone)]
struct Combo(Vec<(f64, char, usize, usize)>);

impl Combo {
    fn one(sign: f64, kind: char, a: usize, b: usize) -> Self {
        Combo(vec![(sign, kind, a, b)])
    }

    fn zero() -> Self {
        Combo(Vec::new())
    }

    fn plus(mut self, sign: f64, kind: char, a: usize, b: usize) -> Self {
        self.0.push((sign, kind, a, b));
        self
    }

    fn render(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (s, k, a, b)) in self.0.iter().enumerate() {
            let sign = if *s < 0.0 { "-" } else { "+" };
            if i == 0 {
                if *s < 0.0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let mag = s.abs();
            if (mag - 1.0).abs() > 0.0 {
                out.push_str(&format!("{mag}"));
            }
            out.push_str(&format!("{k}{a}{b}"));
        }
        out
    }
}

/// Coordinates of a named generator, applying the table conventions.
fn generator(basis: &LieBasis, kind: char, a: usize, b: usize) -> Option<(f64, usize)> {
    let antisym = matches!(kind, 'e' | 'x');
    if antisym && a == b {
        return None;
    }
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, if antisym { -1.0 } else { 1.0 }) };
    let label = match kind {
        'x' => super::so_label(lo, hi),
        _ => format!("{kind}({lo},{hi})"),
    };
    basis.position(&label).map(|p| (sign, p))
}

fn combo_coords(basis: &LieBasis, combo: &Combo) -> Option<Vec<f64>> {
    let mut v = vec![0.0; basis.dim()];
    for &(s, k, a, b) in &combo.0 {
        if let Some((sign, p)) = generator(basis, k, a, b) {
            v[p] += s * sign;
        } else if !(matches!(k, 'e' | 'x') && a == b) {
            return None;
        }
    }
    Some(v)
}

/// Renders a coordinate vector as a signed sum of basis labels.
pub(crate) fn render_coords(labels: &[String], coords: &[f64]) -> String {
    let mut out = String::new();
    for (label, &c) in labels.iter().zip(coords) {
        if c.abs() < 1e-12 {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0.0 { " - " } else { " + " });
        }
        if (mag - 1.0).abs() > 1e-12 {
            out.push_str(&format!("{mag}*"));
        }
        out.push_str(label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

struct Checker<'a> {
    basis: &'a LieBasis,
    report: ValidationReport,
}

impl Checker<'_> {
    /// Checks `[x, y] = rhs`, where `x`, `y` are single generators.
    fn check(&mut self, x: (char, usize, usize), y: (char, usize, usize), rhs: Combo) {
        let b = self.basis;
        let (Some(xc), Some(yc), Some(expected)) = (
            combo_coords(b, &Combo::one(1.0, x.0, x.1, x.2)),
            combo_coords(b, &Combo::one(1.0, y.0, y.1, y.2)),
            combo_coords(b, &rhs),
        ) else {
            return;
        };
        let computed = b.coordinates(
            &commutator(&b.combine(&xc), &b.combine(&yc)).expect("same algebra and dimension"),
        );
        let residual = computed
            .iter()
            .zip(&expected)
            .fold(0.0_f64, |m, (c, e)| m.max((c - e).abs()));
        let name = format!("[{}{}{}, {}{}{}]", x.0, x.1, x.2, y.0, y.1, y.2);
        let ok = residual <= MATCH_TOL;
        self.report.push(
            name,
            rhs.render(),
            render_coords(&b.labels, &computed),
            residual,
            ok,
        );
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Expands the chosen bracket table over all admissible indices and compares
/// each entry with the matrix commutator.
pub fn validate_bracket_lemma(basis: &LieBasis, lemma: BracketLemma) -> ValidationReport {
    let mut ck = Checker {
        basis,
        report: ValidationReport::new(format!("{} on {}({})", lemma.name(), basis.kind, basis.rank)),
    };
    if basis.kind != lemma.algebra() {
        ck.report.push(
            "algebra",
            lemma.algebra().to_string(),
            basis.kind.to_string(),
            f64::INFINITY,
            false,
        );
        return ck.report;
    }
    let n = basis.rank;
    match lemma {
        BracketLemma::So => {
            for a in 1..=n {
                for b in 1..=n {
                    for c in 1..=n {
                        if a == b || b == c || a == c {
                            continue;
                        }
                        ck.check(('x', a, b), ('x', b, c), Combo::one(1.0, 'x', a, c));
                        for d in 1..=n {
                            if d != a && d != b && d != c {
                                ck.check(('x', a, b), ('x', c, d), Combo::zero());
                            }
                        }
                    }
                }
            }
            if n < 3 {
                ck.report.notes.push("no index triple available for n < 3".into());
            }
        }
        BracketLemma::U => {
            for i in 1..=n {
                for j in 1..=n {
                    for k in 1..=n {
                        for l in 1..=n {
                            let terms = |kind: char, s: [f64; 4]| {
                                let mut c = Combo::zero();
                                for (coef, (p, q)) in [
                                    (s[0] * delta(j, k), (i, l)),
                                    (s[1] * delta(i, l), (k, j)),
                                    (s[2] * delta(i, k), (j, l)),
                                    (s[3] * delta(j, l), (i, k)),
                                ] {
                                    if coef != 0.0 {
                                        c = c.plus(coef, kind, p, q);
                                    }
                                }
                                c
                            };
                            ck.check(('e', i, j), ('e', k, l), terms('e', [1.0, -1.0, -1.0, -1.0]));
                            ck.check(('f', i, j), ('f', k, l), terms('e', [-1.0, 1.0, -1.0, -1.0]));
                            ck.check(('f', i, j), ('e', k, l), terms('f', [1.0, -1.0, -1.0, -1.0]));
                        }
                    }
                }
            }
            let mismatches: Vec<String> = ck.report.failures().map(|e| e.name.clone()).collect();
            if !mismatches.is_empty() {
                ck.report.notes.push(format!(
                    "{} entries disagree with the matrix commutator: {}",
                    mismatches.len(),
                    mismatches.join(", ")
                ));
            }
        }
        BracketLemma::Sp => {
            let table: [(char, char, f64, char); 10] = [
                ('e', 'e', 1.0, 'e'),
                ('e', 'f', 1.0, 'f'),
                ('e', 'g', 1.0, 'g'),
                ('e', 'h', 1.0, 'h'),
                ('f', 'f', -1.0, 'e'),
                ('f', 'g', -1.0, 'h'),
                ('f', 'h', 1.0, 'g'),
                ('g', 'g', -1.0, 'e'),
                ('g', 'h', -1.0, 'f'),
                ('h', 'h', -1.0, 'e'),
            ];
            for a in 1..=n {
                for b in 1..=n {
                    for c in 1..=n {
                        if a == b || b == c || a == c {
                            continue;
                        }
                        for &(x, y, s, z) in &table {
                            ck.check((x, a, b), (y, b, c), Combo::one(s, z, a, c));
                        }
                    }
                }
            }
            if n < 3 {
                ck.report.notes.push("no index triple available for n < 3".into());
            }
        }
        BracketLemma::SphereSp => sphere_sp(&mut ck, n),
    }
    ck.report
}

fn sphere_sp(ck: &mut Checker<'_>, rank: usize) {
    // u11, k_{1,n+2}, mu_{1,n+2} are the diagonal generators at index 1.
    let b = ck.basis;
    let find = |primary: &str, fallback: &str| b.position(primary).or_else(|| b.position(fallback));
    let (Some(u), Some(k), Some(mu)) = (
        find("u(1,1)", "f(1,1)"),
        find(&format!("k(1,{})", rank + 1), "g(1,1)"),
        find(&format!("mu(1,{})", rank + 1), "h(1,1)"),
    ) else {
        ck.report.push("generators", "u11, k, mu present", "missing", f64::INFINITY, false);
        return;
    };
    let unit = |p: usize| {
        let mut v = vec![0.0; b.dim()];
        v[p] = 1.0;
        v
    };
    let specials = [("u11", u), ("k", k), ("mu", mu)];
    let check = |ck: &mut Checker<'_>, name: String, x: Vec<f64>, y: Vec<f64>, rhs: Vec<f64>, rhs_text: String| {
        let computed =
            b.coordinates(&commutator(&b.combine(&x), &b.combine(&y)).expect("same algebra"));
        let residual = computed
            .iter()
            .zip(&rhs)
            .fold(0.0_f64, |m, (c, e)| m.max((c - e).abs()));
        ck.report.push(
            name,
            rhs_text,
            render_coords(&b.labels, &computed),
            residual,
            residual <= MATCH_TOL,
        );
    };
    let (u_v, k_v, mu_v) = (unit(u), unit(k), unit(mu));
    check(ck, "[u11, k]".into(), u_v.clone(), k_v.clone(), mu_v.iter().map(|x| -2.0 * x).collect(), "-2mu".into());
    check(ck, "[u11, mu]".into(), u_v.clone(), mu_v.clone(), k_v.iter().map(|x| 2.0 * x).collect(), "2k".into());
    // relations with x_{1b}: (special, generator, sign, result)
    let table: [(usize, char, f64, char); 12] = [
        (0, 'e', 1.0, 'f'),
        (0, 'f', -1.0, 'e'),
        (0, 'g', -1.0, 'h'),
        (0, 'h', 1.0, 'g'),
        (1, 'e', 1.0, 'g'),
        (2, 'e', 1.0, 'h'),
        (1, 'f', 1.0, 'h'),
        (2, 'f', -1.0, 'g'),
        (1, 'g', -1.0, 'e'),
        (2, 'g', 1.0, 'f'),
        (1, 'h', -1.0, 'f'),
        (2, 'h', -1.0, 'e'),
    ];
    // entries with k or mu are printed as [x_ab, k] = ...; the table above stores
    // them as [k, x_ab] = -(...), hence the flipped signs.
    for bb in 2..=rank {
        for &(s_idx, kind, sign, res) in &table {
            let (sname, sp) = specials[s_idx];
            let Some((_, xp)) = generator(b, kind, 1, bb) else { continue };
            let Some((_, rp)) = generator(b, res, 1, bb) else { continue };
            let mut rhs = vec![0.0; b.dim()];
            rhs[rp] = sign;
            let (name, x, y, rhs, text) = if s_idx == 0 {
                (format!("[u11, {kind}1{bb}]"), unit(sp), unit(xp), rhs, Combo::one(sign, res, 1, bb).render())
            } else {
                let printed: Vec<f64> = rhs.iter().map(|v| -v).collect();
                (
                    format!("[{kind}1{bb}, {sname}]"),
                    unit(xp),
                    unit(sp),
                    printed,
                    Combo::one(-sign, res, 1, bb).render(),
                )
            };
            check(ck, name, x, y, rhs, text);
        }
    }
    if rank < 2 {
        ck.report.notes.push("no e, f, g, h generators with index 1 for rank 1".into());
    }
}
