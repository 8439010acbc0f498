//! Structural checks on a decomposition `g = h + m_1 + ... + m_s`.

use nalgebra::DMatrix;

use super::SpaceConfig;
use crate::report::ValidationReport;
use crate::{Error, Result};

const TOL: f64 = 1e-12;

/// Largest coefficient of `[e_i, e_j]` on ambient positions outside `allowed`,
/// over `i` in `xs`, `j` in `ys`.
fn leak(config: &SpaceConfig, xs: &[usize], ys: &[usize], allowed: &[bool]) -> f64 {
    let s = &config.ambient.structure;
    let mut worst = 0.0_f64;
    for &i in xs {
        for &j in ys {
            for &(k, c) in s.get(i, j) {
                if !allowed[k] {
                    worst = worst.max(c.abs());
                }
            }
        }
    }
    worst
}

fn mask(config: &SpaceConfig, positions: &[usize]) -> Vec<bool> {
    let mut m = vec![false; config.ambient.dim()];
    for &p in positions {
        m[p] = true;
    }
    m
}

fn max_cross_form(config: &SpaceConfig, xs: &[usize], ys: &[usize]) -> f64 {
    let amb = &config.ambient;
    let mut worst = 0.0_f64;
    for &i in xs {
        for &j in ys {
            worst = worst.max(amb.form.eval(&amb.elements[i], &amb.elements[j]).abs());
        }
    }
    worst
}

/// Invariants every configuration must satisfy: dimension count, `h` a
/// subalgebra, `m` orthogonal to `h`, modules mutually orthogonal and
/// `ad(h)`-invariant.
pub fn structure_report(config: &SpaceConfig) -> ValidationReport {
    let mut r = ValidationReport::new(format!("structure of {}", config.spec));
    let g = config.ambient.dim();
    let total = config.dim_h() + config.dim_m();
    r.push(
        "dim h + dim m = dim g",
        g.to_string(),
        total.to_string(),
        (g as f64 - total as f64).abs(),
        g == total,
    );

    let mut count = vec![0usize; g];
    for &p in config.h_positions.iter().chain(&config.m_positions) {
        count[p] += 1;
    }
    let bad = count.iter().filter(|&&c| c != 1).count();
    r.push(
        "h and modules partition the basis",
        "each position once",
        format!("{bad} positions covered != 1 times"),
        bad as f64,
        bad == 0,
    );

    let h = &config.h_positions;
    let h_mask = mask(config, h);
    let res = leak(config, h, h, &h_mask);
    r.push("[h, h] in h", "0", format!("{res:e}"), res, res < TOL);

    let res = max_cross_form(config, h, &config.m_positions);
    r.push("B(h, m) = 0", "0", format!("{res:e}"), res, res < TOL);

    for (i, a) in config.modules.iter().enumerate() {
        for b in &config.modules[i + 1..] {
            let res = max_cross_form(config, &a.positions, &b.positions);
            r.push(
                format!("B({}, {}) = 0", a.label, b.label),
                "0",
                format!("{res:e}"),
                res,
                res < TOL,
            );
        }
    }

    for m in &config.modules {
        let res = leak(config, h, &m.positions, &mask(config, &m.positions));
        r.push(
            format!("[h, {0}] in {0}", m.label),
            "0",
            format!("{res:e}"),
            res,
            res < TOL,
        );
    }
    r
}

/// Dimension of the space of symmetric operators on the module commuting
/// with `ad(h)`. A value of 1 means the module carries a unique invariant
/// inner product up to scale, so it has no proper invariant subspace.
pub fn symmetric_commutant_dim(config: &SpaceConfig, module: usize) -> usize {
    let ps = &config.modules[module].positions;
    let d = ps.len();
    let amb = &config.ambient;
    let local: Vec<Option<usize>> = {
        let mut v = vec![None; amb.dim()];
        for (i, &p) in ps.iter().enumerate() {
            v[p] = Some(i);
        }
        v
    };
    // ad(h_k) on the module in B-orthonormal coordinates
    let ops: Vec<DMatrix<f64>> = config
        .h_positions
        .iter()
        .map(|&hk| {
            let mut a = DMatrix::zeros(d, d);
            for (col, &p) in ps.iter().enumerate() {
                for &(k, c) in amb.structure.get(hk, p) {
                    if let Some(row) = local[k] {
                        a[(row, col)] = c * (amb.gram[k] / amb.gram[p]).sqrt();
                    }
                }
            }
            a
        })
        .collect();
    // symmetric unknowns s_{ij}, i <= j
    let mut var = vec![vec![0usize; d]; d];
    let mut nv = 0;
    for i in 0..d {
        for j in i..d {
            var[i][j] = nv;
            var[j][i] = nv;
            nv += 1;
        }
    }
    if ops.is_empty() {
        return nv;
    }
    // normal matrix of the stacked system [A_k, S] = 0
    let mut normal = DMatrix::<f64>::zeros(nv, nv);
    let mut row = vec![0.0; nv];
    for a in &ops {
        for i in 0..d {
            for j in 0..d {
                row.iter_mut().for_each(|v| *v = 0.0);
                // (A S - S A)_{ij} = sum_l A_il S_lj - S_il A_lj
                for l in 0..d {
                    row[var[l][j]] += a[(i, l)];
                    row[var[i][l]] -= a[(l, j)];
                }
                for (x, &rx) in row.iter().enumerate() {
                    if rx == 0.0 {
                        continue;
                    }
                    for (y, &ry) in row.iter().enumerate() {
                        normal[(x, y)] += rx * ry;
                    }
                }
            }
        }
    }
    let eig = normal.symmetric_eigenvalues();
    let scale = eig.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    eig.iter().filter(|v| v.abs() <= 1e-10 * scale).count()
}

/// Generalized Wallach relations `[m_ij, m_ij] in h`, the cyclic relations
/// among `m12, m13, m23`, and irreducibility of each module.
pub fn validate_wallach(config: &SpaceConfig) -> Result<ValidationReport> {
    let labels = ["m12", "m13", "m23"];
    let idx: Vec<Option<usize>> = labels.iter().map(|l| config.module_index(l)).collect();
    if config.modules.len() != 3 || idx.iter().any(Option::is_none) {
        return Err(Error::NotApplicable(format!(
            "{} has modules {:?}; three modules labeled m12, m13, m23 are required",
            config.spec,
            config.modules.iter().map(|m| m.label.as_str()).collect::<Vec<_>>()
        )));
    }
    let idx: Vec<usize> = idx.into_iter().flatten().collect();
    let pos = |i: usize| &config.modules[idx[i]].positions;
    let mut r = ValidationReport::new(format!("generalized Wallach relations on {}", config.spec));
    let h_mask = mask(config, &config.h_positions);
    for i in 0..3 {
        let res = leak(config, pos(i), pos(i), &h_mask);
        r.push(
            format!("[{0}, {0}] in h", labels[i]),
            "0",
            format!("{res:e}"),
            res,
            res < TOL,
        );
    }
    for (a, b, c) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        let res = leak(config, pos(a), pos(b), &mask(config, pos(c)));
        r.push(
            format!("[{}, {}] in {}", labels[a], labels[b], labels[c]),
            "0",
            format!("{res:e}"),
            res,
            res < TOL,
        );
    }
    for (i, label) in labels.iter().enumerate() {
        let k = symmetric_commutant_dim(config, idx[i]);
        r.push(
            format!("{label} irreducible"),
            "symmetric commutant dimension 1",
            format!("symmetric commutant dimension {k}"),
            (k as f64 - 1.0).abs(),
            k == 1,
        );
        if k > 1 {
            r.notes.push(format!(
                "{label} has a proper ad(h)-invariant subspace; the decomposition refines further"
            ));
        }
    }
    if !r.passed() {
        r.notes.push(format!("{} is not a generalized Wallach space with this decomposition", config.spec));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::{build, SpaceFamily};
    use super::*;

    #[test]
    fn wallach_u3_and_sp3_pass() {
        for f in [SpaceFamily::WallachU3, SpaceFamily::WallachSp3] {
            let c = build(f, &[]).unwrap();
            let r = validate_wallach(&c).unwrap();
            assert!(r.passed(), "{f}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn wallach_so_222_is_not_wallach() {
        let c = build(SpaceFamily::WallachSo, &[2, 2, 2]).unwrap();
        assert!(structure_report(&c).passed());
        let r = validate_wallach(&c).unwrap();
        assert!(!r.passed());
        assert!(r.failures().all(|e| e.name.ends_with("irreducible")));
    }

    #[test]
    fn wallach_so_132_passes() {
        let c = build(SpaceFamily::WallachSo, &[1, 3, 2]).unwrap();
        assert!(validate_wallach(&c).unwrap().passed());
        let c = build(SpaceFamily::WallachSo, &[3, 3, 2]).unwrap();
        assert!(validate_wallach(&c).unwrap().passed());
    }

    #[test]
    fn stiefel_v2_relabeled_passes() {
        for n in 4..=7 {
            let c = build(SpaceFamily::StiefelV2, &[n]).unwrap();
            assert!(matches!(validate_wallach(&c), Err(Error::NotApplicable(_))));
            let c = c.relabeled(&[("m0", "m12"), ("m1", "m13"), ("m2", "m23")]).unwrap();
            assert!(validate_wallach(&c).unwrap().passed());
        }
    }

    #[test]
    fn sphere_not_applicable() {
        let c = build(SpaceFamily::SphereU, &[2]).unwrap();
        assert!(matches!(validate_wallach(&c), Err(Error::NotApplicable(_))));
    }
}
