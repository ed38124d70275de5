//! Dense complex matrices and the two structural predicates the whole
//! library rests on: real-linear independence and Hurwitz-Radon
//! orthogonality.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
pub use num_complex::Complex64;

/// Numerical tolerances for rank decisions and entrywise zero tests.
///
/// `rank_eps` is a relative singular-value cutoff (against the largest
/// singular value); `zero_eps` is an absolute entrywise magnitude cutoff.
/// Every matrix produced by the catalog has entries drawn from
/// {0, ±1, ±i, ±cos φ, ±sin φ}, so the defaults sit far below any
/// structural gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rank_eps: f64,
    pub zero_eps: f64,
}

impl Tolerance {
    pub fn new(rank_eps: f64, zero_eps: f64) -> Result<Self> {
        let bad = |x: f64| x.is_nan() || x <= 0.0;
        if bad(rank_eps) || bad(zero_eps) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be positive, got rank_eps={rank_eps}, zero_eps={zero_eps}"
            )));
        }
        Ok(Self { rank_eps, zero_eps })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_eps: 1e-9,
            zero_eps: 1e-9,
        }
    }
}

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from the given diagonal entries.
    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Convenience constructor from nested real/imag pairs, row by row.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * a).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::DimensionMismatch("add of unequal shapes".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.same_shape(other)
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| (a - b).norm() <= eps)
    }

    /// Entrywise check of `AᴴA == I`.
    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        if !self.is_square() {
            return false;
        }
        let gram = self.adjoint().matmul(self).expect("square");
        gram.approx_eq(
            &Self::identity(self.rows),
            tol.zero_eps * (self.rows as f64),
        )
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), tol.zero_eps)
    }

    /// Determinant via LU with partial pivoting. Square matrices only.
    pub fn determinant(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "determinant of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[col * n + col].norm_sqr();
            for r in (col + 1)..n {
                let v = a[r * n + col].norm_sqr();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in (col + 1)..n {
                let f = a[r * n + col] / p;
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        Ok(det)
    }

    /// Singular values in descending order.
    ///
    /// Computed from the real embedding `[[X, -Y], [Y, X]]` of `X + iY`,
    /// whose spectrum is that of the complex matrix with doubled
    /// multiplicities.
    pub fn singular_values(&self) -> Vec<f64> {
        let (r, c) = (self.rows, self.cols);
        if r == 0 || c == 0 {
            return Vec::new();
        }
        let mut real = DMatrix::<f64>::zeros(2 * r, 2 * c);
        for i in 0..r {
            for j in 0..c {
                let z = self[(i, j)];
                real[(i, j)] = z.re;
                real[(i, j + c)] = -z.im;
                real[(i + r, j)] = z.im;
                real[(i + r, j + c)] = z.re;
            }
        }
        let mut sv: Vec<f64> = real.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv.into_iter().step_by(2).collect()
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn min_singular_value(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }

    /// Numerical rank at the relative cutoff `tol.rank_eps`.
    pub fn rank(&self, tol: &Tolerance) -> usize {
        let sv = self.singular_values();
        let Some(&max) = sv.first() else { return 0 };
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol.rank_eps * max).count()
    }

    /// Real vectorization: real parts then imaginary parts, row-major.
    ///
    /// A real-linear map, so real-linear (in)dependence of matrices is
    /// exactly linear (in)dependence of these vectors.
    pub fn vectorize_real(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.entries.len());
        v.extend(self.entries.iter().map(|z| z.re));
        v.extend(self.entries.iter().map(|z| z.im));
        v
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Rank of the real span of a set of equal-shape matrices.
///
/// Stacks the real vectorizations and thresholds singular values at
/// `rank_eps` times the largest one. The empty set has rank 0.
pub fn rank_real_span(set: &[ComplexMatrix], tol: &Tolerance) -> Result<usize> {
    let Some(first) = set.first() else {
        return Ok(0);
    };
    if set.iter().any(|m| !m.same_shape(first)) {
        return Err(Error::DimensionMismatch(
            "rank_real_span needs equal shapes".into(),
        ));
    }
    let dim = 2 * first.rows() * first.cols();
    let mut stacked = DMatrix::<f64>::zeros(set.len(), dim);
    for (i, m) in set.iter().enumerate() {
        for (j, x) in m.vectorize_real().into_iter().enumerate() {
            stacked[(i, j)] = x;
        }
    }
    let mut sv: Vec<f64> = stacked.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let Some(&max) = sv.first() else { return Ok(0) };
    if max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol.rank_eps * max).count())
}

/// Hurwitz-Radon orthogonality test: `AᴴB + BᴴA == 0` entrywise.
pub fn is_hr_orthogonal(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    if !a.same_shape(b) {
        return Err(Error::DimensionMismatch(
            "HR test needs equal shapes".into(),
        ));
    }
    let s = a.adjoint().matmul(b)?.add(&b.adjoint().matmul(a)?)?;
    Ok(s.max_abs_entry() <= tol.zero_eps)
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let f = a[(ia, ja)];
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = f * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Square block-diagonal matrix `diag(A₁, …, A_d)`.
pub fn block_diag(parts: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if parts.is_empty() {
        return Err(Error::InvalidArgument("block_diag of empty list".into()));
    }
    if parts.iter().any(|p| !p.is_square()) {
        return Err(Error::DimensionMismatch(
            "block_diag parts must be square".into(),
        ));
    }
    let n: usize = parts.iter().map(|p| p.rows()).sum();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut off = 0;
    for p in parts {
        for i in 0..p.rows() {
            for j in 0..p.cols() {
                out[(off + i, off + j)] = p[(i, j)];
            }
        }
        off += p.rows();
    }
    Ok(out)
}

/// Kind selector for [`compose`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposeKind {
    Kronecker,
    BlockDiag,
}

/// Composes matrices as a Kronecker product (exactly two parts) or a
/// block-diagonal stack (square parts).
pub fn compose(kind: ComposeKind, parts: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if parts.is_empty() {
        return Err(Error::InvalidArgument("compose of empty list".into()));
    }
    match kind {
        ComposeKind::Kronecker => {
            if parts.len() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "kronecker composition takes exactly 2 parts, got {}",
                    parts.len()
                )));
            }
            Ok(kron(&parts[0], &parts[1]))
        }
        ComposeKind::BlockDiag => block_diag(parts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// Deterministic pseudo-random matrix for oracle tests.
    fn pseudo_random(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let entries = (0..rows * cols).map(|_| c(next(), next())).collect();
        ComplexMatrix::new(rows, cols, entries).unwrap()
    }

    #[test]
    fn vectorize_single_entry() {
        let m = ComplexMatrix::new(1, 1, vec![c(1.0, 2.0)]).unwrap();
        assert_eq!(m.vectorize_real(), vec![1.0, 2.0]);
    }

    #[test]
    fn vectorize_zero_matrix() {
        let m = ComplexMatrix::zeros(2, 2);
        assert_eq!(m.vectorize_real(), vec![0.0; 8]);
    }

    #[test]
    fn vectorize_is_linear() {
        // Oracle: elementwise sum computed directly on entries.
        let a = pseudo_random(3, 3, 7);
        let b = pseudo_random(3, 3, 11);
        let sum = a.add(&b).unwrap();
        let lhs = sum.vectorize_real();
        let va = a.vectorize_real();
        let vb = b.vectorize_real();
        for (i, x) in lhs.iter().enumerate() {
            assert!((x - (va[i] + vb[i])).abs() < 1e-14);
        }
    }

    #[test]
    fn vectorize_preserves_frobenius_norm() {
        let a = pseudo_random(4, 3, 3);
        let v = a.vectorize_real();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - a.frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn rank_of_identity_and_i_identity() {
        let i2 = ComplexMatrix::identity(2);
        let ii2 = i2.scale(c(0.0, 1.0));
        assert_eq!(rank_real_span(&[i2, ii2], &tol()).unwrap(), 2);
    }

    #[test]
    fn rank_of_scalar_multiple_is_one() {
        let a = pseudo_random(3, 3, 21);
        let b = a.scale(c(2.0, 0.0));
        assert_eq!(rank_real_span(&[a, b], &tol()).unwrap(), 1);
    }

    #[test]
    fn rank_of_empty_set_is_zero() {
        assert_eq!(rank_real_span(&[], &tol()).unwrap(), 0);
    }

    #[test]
    fn rank_rejects_mixed_shapes() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(rank_real_span(&[a, b], &tol()).is_err());
    }

    #[test]
    fn hr_orthogonality_basics() {
        let i2 = ComplexMatrix::identity(2);
        let ii2 = i2.scale(c(0.0, 1.0));
        assert!(is_hr_orthogonal(&i2, &ii2, &tol()).unwrap());
        assert!(!is_hr_orthogonal(&i2, &i2, &tol()).unwrap());
    }

    #[test]
    fn hr_orthogonality_is_symmetric() {
        let a = pseudo_random(3, 3, 5);
        let b = pseudo_random(3, 3, 9);
        assert_eq!(
            is_hr_orthogonal(&a, &b, &tol()).unwrap(),
            is_hr_orthogonal(&b, &a, &tol()).unwrap()
        );
    }

    #[test]
    fn block_diag_signs() {
        let i2 = ComplexMatrix::identity(2);
        let m = block_diag(&[i2.clone(), i2.scale(c(-1.0, 0.0))]).unwrap();
        assert_eq!(m.rows(), 4);
        for (i, want) in [(0, 1.0), (1, 1.0), (2, -1.0), (3, -1.0)] {
            assert_eq!(m[(i, i)], c(want, 0.0));
        }
    }

    #[test]
    fn kron_identity_replicates_blocks() {
        let u = pseudo_random(2, 2, 13);
        let m = kron(&ComplexMatrix::identity(2), &u);
        assert_eq!(m.rows(), 4);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m[(i, j)], u[(i, j)]);
                assert_eq!(m[(2 + i, 2 + j)], u[(i, j)]);
                assert_eq!(m[(i, 2 + j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn kron_is_associative() {
        // Oracle: direct three-index entry formula.
        let a = pseudo_random(2, 2, 1);
        let b = pseudo_random(2, 2, 2);
        let cm = pseudo_random(2, 2, 3);
        let left = kron(&kron(&a, &b), &cm);
        let right = kron(&a, &kron(&b, &cm));
        assert!(left.approx_eq(&right, 1e-13));
        for i in 0..8 {
            for j in 0..8 {
                let (ia, ib, ic) = (i / 4, (i / 2) % 2, i % 2);
                let (ja, jb, jc) = (j / 4, (j / 2) % 2, j % 2);
                let want = a[(ia, ja)] * b[(ib, jb)] * cm[(ic, jc)];
                assert!((left[(i, j)] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn compose_argument_checks() {
        let i2 = ComplexMatrix::identity(2);
        assert!(compose(ComposeKind::Kronecker, std::slice::from_ref(&i2)).is_err());
        assert!(compose(ComposeKind::BlockDiag, &[]).is_err());
        let tall = ComplexMatrix::zeros(2, 3);
        assert!(compose(ComposeKind::BlockDiag, &[tall]).is_err());
    }

    #[test]
    fn unitary_has_unit_singular_values() {
        let x = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        for m in [ComplexMatrix::identity(3), x] {
            assert!((m.min_singular_value() - 1.0).abs() < 1e-9);
            assert!((m.max_singular_value() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn determinant_of_known_matrices() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        assert!((m.determinant().unwrap() - c(-2.0, 0.0)).norm() < 1e-12);
        let s = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        assert!(s.determinant().unwrap().norm() < 1e-12);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(Tolerance::new(0.0, 1e-9).is_err());
    }

    proptest! {
        #[test]
        fn rank_is_permutation_invariant(seed in 0u64..500) {
            let mats: Vec<ComplexMatrix> =
                (0..4).map(|i| pseudo_random(2, 2, seed * 31 + i)).collect();
            let forward = rank_real_span(&mats, &tol()).unwrap();
            let mut rev = mats.clone();
            rev.reverse();
            prop_assert_eq!(forward, rank_real_span(&rev, &tol()).unwrap());
        }

        #[test]
        fn rank_is_monotone_under_inclusion(seed in 0u64..500) {
            let mats: Vec<ComplexMatrix> =
                (0..5).map(|i| pseudo_random(2, 2, seed * 17 + i)).collect();
            let mut prev = 0;
            for k in 1..=mats.len() {
                let r = rank_real_span(&mats[..k], &tol()).unwrap();
                prop_assert!(r >= prev);
                prop_assert!(r <= k);
                prev = r;
            }
        }

        #[test]
        fn hr_test_matches_definition(seed in 0u64..200) {
            // Oracle: evaluate AᴴB + BᴴA entrywise with independent loops.
            let a = pseudo_random(2, 2, seed * 7 + 1);
            let b = pseudo_random(2, 2, seed * 7 + 2);
            let mut max_abs: f64 = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..2 {
                        s += a[(k, i)].conj() * b[(k, j)] + b[(k, i)].conj() * a[(k, j)];
                    }
                    max_abs = max_abs.max(s.norm());
                }
            }
            prop_assert_eq!(
                is_hr_orthogonal(&a, &b, &tol()).unwrap(),
                max_abs <= 1e-9
            );
        }
    }
}
