//! Independent oracles shared by the integration tests. These
//! re-derive quantities through a different route than the library
//! (row reduction instead of singular values, raw complex loops
//! instead of matrix helpers).

use stbc_core::{Complex64, ComplexMatrix};

/// Rank over the reals by Gaussian elimination with partial pivoting on
/// the stacked real vectorizations.
#[allow(clippy::needless_range_loop)]
pub fn rank_by_row_reduction(set: &[ComplexMatrix], eps: f64) -> usize {
    if set.is_empty() {
        return 0;
    }
    let mut rows: Vec<Vec<f64>> = set.iter().map(|m| m.vectorize_real()).collect();
    let cols = rows[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows.len() && col < cols {
        let (pivot, max) = rows[rank..]
            .iter()
            .enumerate()
            .map(|(i, r)| (rank + i, r[col].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if max <= eps {
            col += 1;
            continue;
        }
        rows.swap(rank, pivot);
        let lead = rows[rank][col];
        for r in (rank + 1)..rows.len() {
            let f = rows[r][col] / lead;
            if f != 0.0 {
                for c in col..cols {
                    let v = rows[rank][c];
                    rows[r][c] -= f * v;
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Hurwitz-Radon predicate evaluated with raw index loops.
pub fn hr_orthogonal_raw(a: &ComplexMatrix, b: &ComplexMatrix, eps: f64) -> bool {
    let (rows, cols) = (a.rows(), a.cols());
    for i in 0..cols {
        for j in 0..cols {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..rows {
                s += a[(k, i)].conj() * b[(k, j)] + b[(k, i)].conj() * a[(k, j)];
            }
            if s.norm() > eps {
                return false;
            }
        }
    }
    true
}

/// Connected components of the non-orthogonality graph, via repeated
/// breadth-first search. Returns sorted component sizes.
pub fn component_sizes_raw(weights: &[ComplexMatrix], eps: f64) -> Vec<usize> {
    let k = weights.len();
    let mut seen = vec![false; k];
    let mut sizes = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut queue = vec![start];
        seen[start] = true;
        let mut size = 0;
        while let Some(i) = queue.pop() {
            size += 1;
            for j in 0..k {
                if !seen[j] && !hr_orthogonal_raw(&weights[i], &weights[j], eps) {
                    seen[j] = true;
                    queue.push(j);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable();
    sizes
}
