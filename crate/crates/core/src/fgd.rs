//! Fast-group-decodable designs for even antenna counts: the rate-5/4
//! construction from the five 2x2 generators tensored with diagonal
//! sign matrices, rate reduction by puncturing, and the decoding-cost
//! exponent of the family.

use crate::catalog::{diag_sign_set, pauli_x, pauli_z};
use crate::design::{ConditionalStructure, Design, GroupStructure, Rational};
use crate::error::{Error, Result};
use crate::linalg::{kron, Complex64, ComplexMatrix};
use std::collections::BTreeMap;

/// The five 2x2 generators, in canonical order I, iX, iZ, ZX, iI.
/// The first four are the weight matrices of the 2x2 orthogonal design.
fn generators() -> [ComplexMatrix; 5] {
    let i = Complex64::new(0.0, 1.0);
    let eye = ComplexMatrix::identity(2);
    let zx = pauli_z().matmul(&pauli_x()).expect("2x2");
    [
        eye.clone(),
        pauli_x().scale(i),
        pauli_z().scale(i),
        zx,
        eye.scale(i),
    ]
}

fn fgd_meta(m: usize) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert("family".into(), "fgd".into());
    meta.insert("m".into(), m.to_string());
    meta
}

/// Builds the rate-5/4 fast-group-decodable design for N = 2m antennas.
///
/// Weights are the five generators tensored with the m diagonal sign
/// matrices, generator-major. The flat partition puts the m symbols of
/// the identity generator in group 1 and the remaining 4m in group 2;
/// group 2 is conditionally 3-group decodable with the iI block as the
/// conditioning set.
pub fn build_fgd(n: usize) -> Result<Design> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "fast-group-decodable designs need an even antenna count, got {n}"
        )));
    }
    let m = n / 2;
    let signs = diag_sign_set(m)?;
    let mut weights = Vec::with_capacity(5 * m);
    for gen in &generators() {
        for d in &signs.members {
            weights.push(kron(gen, d));
        }
    }
    let group1: Vec<usize> = (0..m).collect();
    let group2: Vec<usize> = (m..5 * m).collect();
    let mut groups = GroupStructure::flat(vec![group1, group2]);
    groups.conditional.insert(
        1,
        ConditionalStructure {
            outer: (4 * m..5 * m).collect(),
            inner: vec![
                (m..2 * m).collect(),
                (2 * m..3 * m).collect(),
                (3 * m..4 * m).collect(),
            ],
        },
    );
    Design::new(format!("fgd-N{n}"), n, n, weights, groups, fgd_meta(m))
}

/// Number of conditioning symbols kept at rate `r`: ceil(4m(R-1)).
fn kept_outer(m: usize, r: Rational) -> usize {
    let extra = (r - Rational::new(1, 1)) * Rational::new(4 * m as i64, 1);
    extra.ceil().to_integer() as usize
}

/// Reduces a rate-5/4 fast-group-decodable design to rate 1 <= R <= 5/4
/// by dropping a suffix of the conditioning symbols (the iI block is
/// punctured from the back, keeping a deterministic prefix).
///
/// At R = 1 the result degenerates to the classical rate-1 four-group
/// design; for R > 1 the two-group partition and the conditional
/// structure survive on the remaining indices.
pub fn puncture_fgd(d: &Design, r: Rational) -> Result<Design> {
    if d.meta().get("family").map(String::as_str) != Some("fgd") {
        return Err(Error::InvalidArgument(
            "puncture_fgd expects a design produced by build_fgd".into(),
        ));
    }
    if r < Rational::new(1, 1) || r > Rational::new(5, 4) {
        return Err(Error::InvalidArgument(format!(
            "puncture rate must lie in [1, 5/4], got {r}"
        )));
    }
    let m = d.n() / 2;
    let keep_extra = kept_outer(m, r);
    let k = 4 * m + keep_extra;
    let weights: Vec<ComplexMatrix> = d.weights()[..k].to_vec();
    let groups = if keep_extra == 0 {
        GroupStructure::flat((0..4).map(|b| (b * m..(b + 1) * m).collect()).collect())
    } else {
        let mut g = GroupStructure::flat(vec![(0..m).collect(), (m..k).collect()]);
        g.conditional.insert(
            1,
            ConditionalStructure {
                outer: (4 * m..k).collect(),
                inner: vec![
                    (m..2 * m).collect(),
                    (2 * m..3 * m).collect(),
                    (3 * m..4 * m).collect(),
                ],
            },
        );
        g
    };
    Design::new(
        format!("fgd-N{}-R{}-{}", d.n(), r.numer(), r.denom()),
        d.t(),
        d.n(),
        weights,
        groups,
        fgd_meta(m),
    )
}

/// Decoding-cost exponent of M for the rate-R family at N antennas:
/// (N/4)(4R-3) - 1/2, valid for 1 < R <= 5/4. The leading multiplier 3
/// is reported separately in complexity profiles.
pub fn fgd_exponent(n: usize, r: Rational) -> Result<f64> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidArgument(
            "exponent needs an even antenna count".into(),
        ));
    }
    if r <= Rational::new(1, 1) || r > Rational::new(5, 4) {
        return Err(Error::InvalidArgument(format!(
            "exponent formula holds for rates in (1, 5/4], got {r}"
        )));
    }
    let scaled = Rational::new(n as i64, 4) * (Rational::new(4, 1) * r - Rational::new(3, 1))
        - Rational::new(1, 2);
    Ok(*scaled.numer() as f64 / *scaled.denom() as f64)
}
