//! Block-diagonal multigroup constructions: the two block-extension
//! maps, their chained form, the general grouped builder, the
//! delay-optimal asymptotically-good family, and the vertical-stacking
//! transform that trades delay for fewer antennas.

use crate::catalog::{cod_weights, hermitian_basis};
use crate::design::{Design, GroupStructure, Rational};
use crate::error::{Error, Result};
use crate::linalg::{
    block_diag, is_hr_orthogonal, kron, rank_real_span, Complex64, ComplexMatrix, Tolerance,
};
use std::collections::BTreeMap;

fn neg(m: &ComplexMatrix) -> ComplexMatrix {
    m.scale(Complex64::new(-1.0, 0.0))
}

fn check_extend_args(
    set: &[ComplexMatrix],
    block: &ComplexMatrix,
    pivot: usize,
    tol: &Tolerance,
) -> Result<()> {
    if set.is_empty() {
        return Err(Error::InvalidArgument(
            "block extension needs a non-empty set".into(),
        ));
    }
    if pivot >= set.len() {
        return Err(Error::InvalidArgument(format!(
            "pivot index {pivot} out of range for set of {}",
            set.len()
        )));
    }
    let first = &set[0];
    if !first.is_square() || !block.is_square() {
        return Err(Error::DimensionMismatch(
            "block extension needs square matrices".into(),
        ));
    }
    if set.iter().any(|m| !m.same_shape(first)) {
        return Err(Error::DimensionMismatch(
            "set members must share dimensions".into(),
        ));
    }
    if block.rank(tol) < block.rows() {
        return Err(Error::InvalidArgument(
            "extension block must be full-rank".into(),
        ));
    }
    Ok(())
}

/// Appends a fixed block after every member: diag(A, C) for each A,
/// plus one extra member diag(A_pivot, -C). Output cardinality is
/// |set| + 1, and real-linear independence of the input is preserved.
pub fn append_block(
    set: &[ComplexMatrix],
    block: &ComplexMatrix,
    pivot: usize,
    tol: &Tolerance,
) -> Result<Vec<ComplexMatrix>> {
    check_extend_args(set, block, pivot, tol)?;
    let mut out = Vec::with_capacity(set.len() + 1);
    for a in set {
        out.push(block_diag(&[a.clone(), block.clone()])?);
    }
    out.push(block_diag(&[set[pivot].clone(), neg(block)])?);
    Ok(out)
}

/// Mirror image of [`append_block`]: diag(C, A) for each A, plus
/// diag(-C, A_pivot).
pub fn prepend_block(
    set: &[ComplexMatrix],
    block: &ComplexMatrix,
    pivot: usize,
    tol: &Tolerance,
) -> Result<Vec<ComplexMatrix>> {
    check_extend_args(set, block, pivot, tol)?;
    let mut out = Vec::with_capacity(set.len() + 1);
    for a in set {
        out.push(block_diag(&[block.clone(), a.clone()])?);
    }
    out.push(block_diag(&[neg(block), set[pivot].clone()])?);
    Ok(out)
}

/// Places a free set into slot `slot` (1-based) of a d-block diagonal
/// chain whose other slots hold the fixed blocks, in positional order.
///
/// `fixed` lists the d-1 blocks for slots {1..d} \ {slot} in increasing
/// slot order. Every output matrix is block-diagonal with block i in
/// {±fixed_i} for i != slot and block `slot` drawn from ±(free set).
/// Output cardinality is |free| + d - 1. The pivot at every extension
/// step is the element at index 0 of the current working list, which
/// makes the output reproducible.
pub fn block_chain(
    slot: usize,
    free: &[ComplexMatrix],
    fixed: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<Vec<ComplexMatrix>> {
    let d = fixed.len() + 1;
    if slot == 0 || slot > d {
        return Err(Error::InvalidArgument(format!(
            "slot {slot} out of range 1..={d}"
        )));
    }
    let mut working = free.to_vec();
    // Blocks before the slot, nearest first so that positional order is
    // preserved; then the blocks after the slot in increasing order.
    for i in (0..slot - 1).rev() {
        working = prepend_block(&working, &fixed[i], 0, tol)?;
    }
    for block in fixed.iter().skip(slot - 1) {
        working = append_block(&working, block, 0, tol)?;
    }
    Ok(working)
}

/// Inputs for one decoding group of the general grouped construction.
#[derive(Debug, Clone)]
pub struct GroupInputSet {
    /// 0-based group index l.
    pub index: usize,
    /// The g-1 fixed matrices, ordered by peer group index (increasing,
    /// skipping `index`). The entry for peer j is the block this group
    /// contributes, at its own slot, to peer j's chain.
    pub fixed: Vec<ComplexMatrix>,
    /// Non-empty free set; its span carries this group's symbols.
    pub free: Vec<ComplexMatrix>,
    /// Side length of this group's block.
    pub dim: usize,
}

impl GroupInputSet {
    /// Position of peer group `peer` inside `fixed`.
    fn peer_pos(&self, peer: usize) -> usize {
        if peer < self.index {
            peer
        } else {
            peer - 1
        }
    }

    fn all_members(&self) -> Vec<ComplexMatrix> {
        self.fixed.iter().chain(self.free.iter()).cloned().collect()
    }

    /// Full-rank and joint real-linear independence of fixed + free.
    fn check_c1(&self, tol: &Tolerance) -> Result<()> {
        let members = self.all_members();
        for (i, m) in members.iter().enumerate() {
            if m.rows() != self.dim || m.cols() != self.dim {
                return Err(Error::ConditionViolation {
                    condition: "C1".into(),
                    detail: format!(
                        "group {}: member {} is {}x{}, expected {}x{}",
                        self.index + 1,
                        i + 1,
                        m.rows(),
                        m.cols(),
                        self.dim,
                        self.dim
                    ),
                });
            }
            if m.rank(tol) < self.dim {
                return Err(Error::ConditionViolation {
                    condition: "C1".into(),
                    detail: format!(
                        "group {}: member {} is rank-deficient",
                        self.index + 1,
                        i + 1
                    ),
                });
            }
        }
        let rank = rank_real_span(&members, tol)?;
        if rank < members.len() {
            return Err(Error::ConditionViolation {
                condition: "C1".into(),
                detail: format!(
                    "group {}: members span rank {} < {}",
                    self.index + 1,
                    rank,
                    members.len()
                ),
            });
        }
        Ok(())
    }

    /// Hurwitz-Radon orthogonality of every fixed member against the
    /// free set and of the fixed members pairwise.
    fn check_c2(&self, tol: &Tolerance) -> Result<()> {
        for (j, a) in self.fixed.iter().enumerate() {
            for (b_idx, b) in self.free.iter().enumerate() {
                if !is_hr_orthogonal(a, b, tol)? {
                    return Err(Error::ConditionViolation {
                        condition: "C2".into(),
                        detail: format!(
                            "group {}: fixed member {} vs free member {}",
                            self.index + 1,
                            j + 1,
                            b_idx + 1
                        ),
                    });
                }
            }
            for (j2, a2) in self.fixed.iter().enumerate().skip(j + 1) {
                if !is_hr_orthogonal(a, a2, tol)? {
                    return Err(Error::ConditionViolation {
                        condition: "C2".into(),
                        detail: format!(
                            "group {}: fixed members {} and {}",
                            self.index + 1,
                            j + 1,
                            j2 + 1
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

/// General grouped construction: one block-diagonal chain per group,
/// free set in the group's own slot, peers' fixed matrices elsewhere.
/// The result is a delay-optimal design whose flat partition has one
/// group per input set, with all cross-group pairs Hurwitz-Radon
/// orthogonal.
pub fn build_from_inputs(inputs: &[GroupInputSet], tol: &Tolerance) -> Result<Design> {
    let g = inputs.len();
    if g < 2 {
        return Err(Error::InvalidArgument(
            "grouped construction needs g >= 2".into(),
        ));
    }
    for (l, input) in inputs.iter().enumerate() {
        if input.index != l {
            return Err(Error::InvalidArgument(format!(
                "input {} carries group index {}",
                l, input.index
            )));
        }
        if input.free.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "group {} has an empty free set",
                l + 1
            )));
        }
        if input.fixed.len() != g - 1 {
            return Err(Error::InvalidArgument(format!(
                "group {} has {} fixed members, expected {}",
                l + 1,
                input.fixed.len(),
                g - 1
            )));
        }
        input.check_c1(tol)?;
        input.check_c2(tol)?;
    }

    let n_total: usize = inputs.iter().map(|i| i.dim).sum();
    let mut weights = Vec::new();
    let mut partition = Vec::with_capacity(g);
    for l in 0..g {
        // Slot i of group l's chain holds the member of group i's fixed
        // set assigned to peer l.
        let fixed_for_l: Vec<ComplexMatrix> = (0..g)
            .filter(|&i| i != l)
            .map(|i| inputs[i].fixed[inputs[i].peer_pos(l)].clone())
            .collect();
        let members = block_chain(l + 1, &inputs[l].free, &fixed_for_l, tol)?;
        let start = weights.len();
        weights.extend(members);
        partition.push((start..weights.len()).collect());
    }

    let mut meta = BTreeMap::new();
    meta.insert("family".into(), "multigroup".into());
    meta.insert("g".into(), g.to_string());
    Design::new(
        format!("multigroup-g{g}-N{n_total}"),
        n_total,
        n_total,
        weights,
        GroupStructure::flat(partition),
        meta,
    )
}

/// Parameters of the delay-optimal family at (g, N): block scale
/// 2^floor((g-1)/2), n = N / scale, p = floor(n/g), t = n - g*p.
struct AgParams {
    scale: usize,
    n: usize,
    p: usize,
    t: usize,
}

fn ag_params(g: usize, n_antennas: usize) -> Result<AgParams> {
    if g < 2 {
        return Err(Error::InvalidArgument("g must be at least 2".into()));
    }
    let scale = 1usize << ((g - 1) / 2);
    if n_antennas == 0 || n_antennas % scale != 0 || n_antennas / scale < g {
        return Err(Error::InvalidArgument(format!(
            "N must equal n*2^floor((g-1)/2) with n >= g; got N={n_antennas}, g={g} \
             (block scale {scale})"
        )));
    }
    let n = n_antennas / scale;
    let p = n / g;
    let t = n - g * p;
    Ok(AgParams { scale, n, p, t })
}

/// Number of real symbols per decoding group of the family.
pub(crate) fn ag_group_symbols(g: usize, n_antennas: usize) -> Result<usize> {
    let params = ag_params(g, n_antennas)?;
    let p2 = params.p * params.p;
    Ok(if g % 2 == 0 {
        p2 + g - 1
    } else {
        2 * p2 + g - 1
    })
}

/// Exact rate of the delay-optimal g-group family at N antennas:
/// g*p^2 / (N*(1 + [g even])) + (g^2 - g) / (2N).
pub fn rate_ag(g: usize, n_antennas: usize) -> Result<Rational> {
    let params = ag_params(g, n_antennas)?;
    let p2 = (params.p * params.p) as i64;
    let n = n_antennas as i64;
    let gi = g as i64;
    let even = if g % 2 == 0 { 2 } else { 1 };
    Ok(Rational::new(gi * p2, n * even) + Rational::new(gi * gi - gi, 2 * n))
}

/// Builds the delay-optimal, g-group decodable design for
/// N = n * 2^floor((g-1)/2) antennas, n >= g. All weights are unitary
/// and the flat partition has g balanced groups. The t enlarged groups
/// (when n is not a multiple of g) come first. Within each group the
/// free part enumerates Hermitian-basis members in catalog order,
/// tensored with the trailing orthogonal-design weights (inner loop),
/// so the construction is byte-reproducible.
pub fn build_ag(g: usize, n_antennas: usize) -> Result<Design> {
    let tol = Tolerance::default();
    let params = ag_params(g, n_antennas)?;
    let AgParams { scale, p, t, .. } = params;
    let m = (g - 1) / 2;
    let orth = cod_weights(m)?;
    debug_assert_eq!(orth.members.len(), 2 * m + 2);

    let h_small = hermitian_basis(p)?;
    let h_large = if t > 0 {
        Some(hermitian_basis(p + 1)?)
    } else {
        None
    };

    let mut inputs = Vec::with_capacity(g);
    for l in 0..g {
        let enlarged = l < t;
        let side = if enlarged { p + 1 } else { p };
        let eye = ComplexMatrix::identity(side);
        // Free part: p^2 Hermitian-basis members (a prefix of the larger
        // basis for enlarged groups), tensored with the trailing
        // orthogonal-design weights.
        let h_members: Vec<&ComplexMatrix> = if enlarged {
            h_large
                .as_ref()
                .unwrap()
                .members
                .iter()
                .take(p * p)
                .collect()
        } else {
            h_small.members.iter().collect()
        };
        let (fixed_count, free_tail): (usize, &[ComplexMatrix]) = if g % 2 == 0 {
            (2 * m + 1, &orth.members[2 * m + 1..])
        } else {
            (2 * m, &orth.members[2 * m..])
        };
        let fixed: Vec<ComplexMatrix> = orth.members[..fixed_count]
            .iter()
            .map(|u| kron(&eye, u))
            .collect();
        let mut free = Vec::with_capacity(h_members.len() * free_tail.len());
        for a in &h_members {
            for u in free_tail {
                free.push(kron(a, u));
            }
        }
        inputs.push(GroupInputSet {
            index: l,
            fixed,
            free,
            dim: side * scale,
        });
    }

    let built = build_from_inputs(&inputs, &tol)?;
    let mut meta = BTreeMap::new();
    meta.insert("family".into(), "ag".into());
    meta.insert("g".into(), g.to_string());
    meta.insert("n".into(), params.n.to_string());
    meta.insert("p".into(), p.to_string());
    meta.insert("t".into(), t.to_string());
    let d = Design::new(
        format!("ag-g{g}-N{n_antennas}"),
        n_antennas,
        n_antennas,
        built.weights().to_vec(),
        built.groups().clone(),
        meta,
    )?;
    debug_assert_eq!(d.rate(), rate_ag(g, n_antennas)?);
    Ok(d)
}

/// Vertically stacks the g equal diagonal blocks of every weight,
/// turning an N x N block-diagonal design into an N x (N/g) design with
/// the same symbol count and partition. Requires the input to be
/// block-diagonal with g equal square blocks.
pub fn stack_phi(d: &Design, g: usize) -> Result<Design> {
    let tol = Tolerance::default();
    if d.t() != d.n() {
        return Err(Error::InvalidArgument(
            "stacking needs a delay-optimal input".into(),
        ));
    }
    if g < 2 || d.n() % g != 0 {
        return Err(Error::InvalidArgument(format!(
            "cannot split {} columns into {g} equal blocks",
            d.n()
        )));
    }
    let side = d.n() / g;
    for (wi, w) in d.weights().iter().enumerate() {
        for r in 0..d.t() {
            for c in 0..d.n() {
                if r / side != c / side && w[(r, c)].norm() > tol.zero_eps {
                    return Err(Error::InvalidArgument(format!(
                        "weight {} is not block-diagonal with {g} blocks of side {side}",
                        wi + 1
                    )));
                }
            }
        }
    }
    let stacked: Vec<ComplexMatrix> = d
        .weights()
        .iter()
        .map(|w| {
            let mut out = ComplexMatrix::zeros(d.n(), side);
            for b in 0..g {
                for r in 0..side {
                    for c in 0..side {
                        out[(b * side + r, c)] = w[(b * side + r, b * side + c)];
                    }
                }
            }
            out
        })
        .collect();
    let mut meta = d.meta().clone();
    meta.insert("stacked_from".into(), d.name().to_string());
    meta.insert("stack_g".into(), g.to_string());
    Design::new(
        format!("{}-stacked", d.name()),
        d.n(),
        side,
        stacked,
        d.groups().clone(),
        meta,
    )
}
