//! Generators for the primitive matrix families the constructions
//! consume, plus a few small preset designs.
//!
//! Every family has a fixed, documented enumeration order so that all
//! downstream constructions are byte-reproducible.

use crate::design::{ConditionalStructure, Design, GroupStructure};
use crate::error::{Error, Result};
use crate::linalg::{kron, Complex64, ComplexMatrix};
use std::collections::BTreeMap;

/// An ordered list of equal-size matrices with a family label.
#[derive(Debug, Clone)]
pub struct MatrixFamily {
    pub name: String,
    pub dimension: usize,
    pub members: Vec<ComplexMatrix>,
}

impl MatrixFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2x2 Pauli-type generators used throughout the catalog.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 0.0)],
    ])
    .unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(0.0, -1.0)],
        vec![c(0.0, 1.0), c(0.0, 0.0)],
    ])
    .unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(-1.0, 0.0)],
    ])
    .unwrap()
}

/// k² unitary, Hermitian, real-linearly independent k x k matrices.
///
/// Enumeration order: the diagonal sign matrices Z_1..Z_k (all ones,
/// then a single -1 sweeping positions 2..k), then the symmetric
/// pair-swap matrices V_{n,m} in lexicographic (n, m) order, then their
/// skew counterparts W_{n,m} (entries ±i off the diagonal) in the same
/// order.
pub fn hermitian_basis(k: usize) -> Result<MatrixFamily> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "hermitian_basis needs k >= 1".into(),
        ));
    }
    let mut members = Vec::with_capacity(k * k);
    for n in 0..k {
        let mut diag = vec![c(1.0, 0.0); k];
        if n > 0 {
            diag[n] = c(-1.0, 0.0);
        }
        members.push(ComplexMatrix::diagonal(&diag));
    }
    for n in 0..k {
        for m in (n + 1)..k {
            let mut v = ComplexMatrix::zeros(k, k);
            v[(n, m)] = c(1.0, 0.0);
            v[(m, n)] = c(1.0, 0.0);
            for l in 0..k {
                if l != n && l != m {
                    v[(l, l)] = c(1.0, 0.0);
                }
            }
            members.push(v);
        }
    }
    for n in 0..k {
        for m in (n + 1)..k {
            let mut w = ComplexMatrix::zeros(k, k);
            w[(n, m)] = c(0.0, 1.0);
            w[(m, n)] = c(0.0, -1.0);
            for l in 0..k {
                if l != n && l != m {
                    w[(l, l)] = c(1.0, 0.0);
                }
            }
            members.push(w);
        }
    }
    Ok(MatrixFamily {
        name: format!("hermitian_basis({k})"),
        dimension: k,
        members,
    })
}

/// A real basis of all k x k complex matrices made of 2k² unitary
/// matrices: the Hermitian family followed by i times each member.
pub fn unitary_basis(k: usize) -> Result<MatrixFamily> {
    let h = hermitian_basis(k)?;
    let mut members = h.members.clone();
    members.extend(h.members.iter().map(|m| m.scale(c(0.0, 1.0))));
    Ok(MatrixFamily {
        name: format!("unitary_basis({k})"),
        dimension: k,
        members,
    })
}

/// The m diagonal sign-flip matrices: all ones, then a single -1 at
/// position j for j = 2..m. Hermitian and mutually commuting.
pub fn diag_sign_set(m: usize) -> Result<MatrixFamily> {
    if m == 0 {
        return Err(Error::InvalidArgument("diag_sign_set needs m >= 1".into()));
    }
    let mut members = Vec::with_capacity(m);
    for n in 0..m {
        let mut diag = vec![c(1.0, 0.0); m];
        if n > 0 {
            diag[n] = c(-1.0, 0.0);
        }
        members.push(ComplexMatrix::diagonal(&diag));
    }
    Ok(MatrixFamily {
        name: format!("diag_sign_set({m})"),
        dimension: m,
        members,
    })
}

/// Weight set of a maximal-rate square orthogonal design: 2m+2 unitary,
/// real-linearly independent, pairwise Hurwitz-Radon orthogonal
/// 2^m x 2^m matrices.
///
/// Realized as the identity followed by i times each of the 2m+1
/// mutually anticommuting Hermitian unitary Jordan-Wigner generators
/// g_{2k-1} = Z^(k-1) (x) X (x) I^(m-k), g_{2k} = Z^(k-1) (x) Y (x) I^(m-k)
/// for k = 1..m, and g_{2m+1} = Z^m.
pub fn cod_weights(m: usize) -> Result<MatrixFamily> {
    let dim = 1usize << m;
    let mut members = Vec::with_capacity(2 * m + 2);
    members.push(ComplexMatrix::identity(dim));
    let tensor_chain = |parts: &[ComplexMatrix]| -> ComplexMatrix {
        let mut acc = ComplexMatrix::identity(1);
        for p in parts {
            acc = kron(&acc, p);
        }
        acc
    };
    let mut generators = Vec::with_capacity(2 * m + 1);
    for k in 0..m {
        for mid in [pauli_x(), pauli_y()] {
            let mut parts = vec![pauli_z(); k];
            parts.push(mid);
            parts.extend(std::iter::repeat_n(ComplexMatrix::identity(2), m - k - 1));
            generators.push(tensor_chain(&parts));
        }
    }
    generators.push(tensor_chain(&vec![pauli_z(); m]));
    members.extend(generators.into_iter().map(|g| g.scale(c(0.0, 1.0))));
    Ok(MatrixFamily {
        name: format!("cod_weights({m})"),
        dimension: dim,
        members,
    })
}

const PRESET_NAMES: &[&str] = &["alamouti", "ciod2", "srinath_rajan_2x2"];

/// Rotation angle of the 2x2 coordinate-interleaved design: arctan(2)/2.
pub fn ciod_angle() -> f64 {
    0.5 * 2.0f64.atan()
}

fn ciod2_weights() -> Vec<ComplexMatrix> {
    let phi = ciod_angle();
    let (cs, sn) = (phi.cos(), phi.sin());
    let d = |a: Complex64, b: Complex64| ComplexMatrix::diagonal(&[a, b]);
    vec![
        d(c(cs, 0.0), c(0.0, sn)),
        d(c(-sn, 0.0), c(0.0, cs)),
        d(c(0.0, sn), c(cs, 0.0)),
        d(c(0.0, cs), c(-sn, 0.0)),
    ]
}

fn anti_diag(top: Complex64, bottom: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), top], vec![bottom, c(0.0, 0.0)]]).unwrap()
}

/// Returns one of the named 2-antenna preset designs.
///
/// * `alamouti` - the 2x2 orthogonal design; four single-real-symbol
///   decoding groups.
/// * `ciod2` - the 2x2 coordinate-interleaved design; two groups of two.
/// * `srinath_rajan_2x2` - the rate-2 fast-decodable extension of
///   `ciod2` with four anti-diagonal weights scaled by e^{i pi/4};
///   conditioning on symbols 5..8 leaves the two ciod2 groups.
pub fn preset(name: &str) -> Result<Design> {
    match name {
        "alamouti" => {
            let weights = vec![
                ComplexMatrix::identity(2),
                ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]),
                anti_diag(c(0.0, 1.0), c(0.0, 1.0)),
                anti_diag(c(-1.0, 0.0), c(1.0, 0.0)),
            ];
            let groups = GroupStructure::flat(vec![vec![0], vec![1], vec![2], vec![3]]);
            Design::new("alamouti", 2, 2, weights, groups, meta_for("alamouti"))
        }
        "ciod2" => {
            let groups = GroupStructure::flat(vec![vec![0, 1], vec![2, 3]]);
            Design::new("ciod2", 2, 2, ciod2_weights(), groups, meta_for("ciod2"))
        }
        "srinath_rajan_2x2" => {
            let phi = ciod_angle();
            let (cs, sn) = (phi.cos(), phi.sin());
            let alpha = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
            let mut weights = ciod2_weights();
            for (top, bottom) in [
                (c(0.0, sn), c(cs, 0.0)),
                (c(0.0, cs), c(-sn, 0.0)),
                (c(cs, 0.0), c(0.0, sn)),
                (c(-sn, 0.0), c(0.0, cs)),
            ] {
                weights.push(anti_diag(top, bottom).scale(alpha));
            }
            let mut groups = GroupStructure::flat(vec![(0..8).collect()]);
            groups.conditional.insert(
                0,
                ConditionalStructure {
                    outer: vec![4, 5, 6, 7],
                    inner: vec![vec![0, 1], vec![2, 3]],
                },
            );
            Design::new(
                "srinath_rajan_2x2",
                2,
                2,
                weights,
                groups,
                meta_for("srinath_rajan_2x2"),
            )
        }
        _ => Err(Error::UnknownPreset {
            name: name.into(),
            valid: PRESET_NAMES.join(", "),
        }),
    }
}

fn meta_for(family: &str) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert("family".into(), family.into());
    meta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_hr_orthogonal, rank_real_span, Tolerance};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn hermitian_basis_smallest() {
        let h = hermitian_basis(1).unwrap();
        assert_eq!(h.members.len(), 1);
        assert!(h.members[0].approx_eq(&ComplexMatrix::identity(1), 1e-15));
        assert!(hermitian_basis(0).is_err());
    }

    #[test]
    fn hermitian_basis_k2_matches_published_list() {
        let h = hermitian_basis(2).unwrap();
        let w12 = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(h.members.len(), 4);
        assert!(h.members[0].approx_eq(&ComplexMatrix::identity(2), 1e-15));
        assert!(h.members[1].approx_eq(&pauli_z(), 1e-15));
        assert!(h.members[2].approx_eq(&pauli_x(), 1e-15));
        assert!(h.members[3].approx_eq(&w12, 1e-15));
    }

    #[test]
    fn hermitian_basis_k3_matches_published_set() {
        // The nine 3x3 members, compared as a set against the published
        // listing (which interleaves the V and W families).
        let h = hermitian_basis(3).unwrap();
        assert_eq!(h.members.len(), 9);
        let m = |rows: [[(f64, f64); 3]; 3]| {
            ComplexMatrix::from_rows(
                &rows
                    .iter()
                    .map(|r| r.iter().map(|&(re, im)| c(re, im)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        };
        let z = (0.0, 0.0);
        let o = (1.0, 0.0);
        let n = (-1.0, 0.0);
        let pi = (0.0, 1.0);
        let ni = (0.0, -1.0);
        let published = [
            m([[o, z, z], [z, o, z], [z, z, o]]),
            m([[o, z, z], [z, n, z], [z, z, o]]),
            m([[o, z, z], [z, o, z], [z, z, n]]),
            m([[z, o, z], [o, z, z], [z, z, o]]),
            m([[z, pi, z], [ni, z, z], [z, z, o]]),
            m([[z, z, o], [z, o, z], [o, z, z]]),
            m([[z, z, pi], [z, o, z], [ni, z, z]]),
            m([[o, z, z], [z, z, o], [z, o, z]]),
            m([[o, z, z], [z, z, pi], [z, ni, z]]),
        ];
        for want in &published {
            assert!(
                h.members.iter().any(|got| got.approx_eq(want, 1e-15)),
                "missing a published member"
            );
        }
    }

    #[test]
    fn hermitian_basis_members_are_unitary_hermitian_independent() {
        for k in 1..=6 {
            let h = hermitian_basis(k).unwrap();
            assert_eq!(h.members.len(), k * k);
            for m in &h.members {
                assert!(m.is_unitary(&tol()), "k={k}");
                assert!(m.is_hermitian(&tol()), "k={k}");
            }
            assert_eq!(rank_real_span(&h.members, &tol()).unwrap(), k * k);
        }
    }

    #[test]
    fn unitary_basis_spans_everything() {
        let b1 = unitary_basis(1).unwrap();
        assert_eq!(b1.members.len(), 2);
        assert!(b1.members[1].approx_eq(&ComplexMatrix::identity(1).scale(c(0.0, 1.0)), 1e-15));
        for k in 1..=6 {
            let b = unitary_basis(k).unwrap();
            assert_eq!(b.members.len(), 2 * k * k);
            assert_eq!(rank_real_span(&b.members, &tol()).unwrap(), 2 * k * k);
        }
    }

    #[test]
    fn unitary_basis_k3_min_singular_values() {
        // Independent unitarity route: entrywise Gram check is done by
        // is_unitary; here assert the singular values directly.
        let b = unitary_basis(3).unwrap();
        assert_eq!(b.members.len(), 18);
        for m in &b.members {
            assert!((m.min_singular_value() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn diag_sign_set_basics() {
        assert!(diag_sign_set(0).is_err());
        let d1 = diag_sign_set(1).unwrap();
        assert_eq!(d1.members.len(), 1);
        let d2 = diag_sign_set(2).unwrap();
        assert!(d2.members[0].approx_eq(&ComplexMatrix::identity(2), 1e-15));
        assert!(d2.members[1].approx_eq(&pauli_z(), 1e-15));
        for m in 1..=8 {
            let d = diag_sign_set(m).unwrap();
            assert_eq!(rank_real_span(&d.members, &tol()).unwrap(), m);
            for a in &d.members {
                assert!(a.is_hermitian(&tol()));
                for b in &d.members {
                    let ab = a.matmul(b).unwrap();
                    let ba = b.matmul(a).unwrap();
                    assert!(ab.approx_eq(&ba, 1e-12));
                }
            }
        }
    }

    #[test]
    fn diag_sign_set_m4_diagonal_pattern() {
        // The matrix of diagonals equals 11^T - diag(0, 2, 2, 2).
        let d = diag_sign_set(4).unwrap();
        for (col, m) in d.members.iter().enumerate() {
            for row in 0..4 {
                let want = if row == col && row > 0 { -1.0 } else { 1.0 };
                assert_eq!(m[(row, row)], c(want, 0.0));
            }
        }
    }

    #[test]
    fn cod_weights_smallest_cases() {
        let o0 = cod_weights(0).unwrap();
        assert_eq!(o0.members.len(), 2);
        assert!(o0.members[0].approx_eq(&ComplexMatrix::identity(1), 1e-15));
        assert!(o0.members[1].approx_eq(&ComplexMatrix::identity(1).scale(c(0.0, 1.0)), 1e-15));

        let o2 = cod_weights(2).unwrap();
        assert_eq!(o2.members.len(), 6);
        assert_eq!(o2.dimension, 4);
    }

    #[test]
    fn cod_weights_satisfy_all_three_predicates() {
        for m in 0..=4 {
            let o = cod_weights(m).unwrap();
            assert_eq!(o.members.len(), 2 * m + 2);
            assert_eq!(
                rank_real_span(&o.members, &tol()).unwrap(),
                2 * m + 2,
                "independence at m={m}"
            );
            for (i, a) in o.members.iter().enumerate() {
                assert!(a.is_unitary(&tol()), "unitarity at m={m}");
                for b in o.members.iter().skip(i + 1) {
                    assert!(is_hr_orthogonal(a, b, &tol()).unwrap(), "HR at m={m}");
                }
            }
        }
    }

    #[test]
    fn alamouti_weight_instance_passes_same_predicates() {
        // The classical 2x2 instance passes the identical predicate set
        // that cod_weights(1) is built to satisfy.
        let d = preset("alamouti").unwrap();
        let o1 = cod_weights(1).unwrap();
        for fam in [d.weights(), &o1.members[..]] {
            for (i, a) in fam.iter().enumerate() {
                for b in fam.iter().skip(i + 1) {
                    assert!(is_hr_orthogonal(a, b, &tol()).unwrap());
                }
            }
            assert_eq!(rank_real_span(fam, &tol()).unwrap(), 4);
        }
    }

    #[test]
    fn preset_ciod2_shape() {
        let d = preset("ciod2").unwrap();
        assert_eq!((d.t(), d.n(), d.k()), (2, 2, 4));
        for w in d.weights() {
            assert!(w.determinant().unwrap().norm() > 1e-3, "full-rank weights");
        }
        assert_eq!(*d.rate().numer(), 1);
    }

    #[test]
    fn preset_srinath_rajan_shape() {
        let d = preset("srinath_rajan_2x2").unwrap();
        assert_eq!(d.k(), 8);
        assert_eq!(*d.rate().numer(), 2);
        assert_eq!(*d.rate().denom(), 1);
        for w in d.weights() {
            assert!(w.determinant().unwrap().norm() > 1e-3);
        }
    }

    #[test]
    fn preset_unknown_name_lists_valid() {
        let err = preset("nope").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alamouti") && msg.contains("ciod2"));
    }
}
