//! Fast-decodable code assembly: basis completion, diagonal-algebraic
//! base designs, rate changes by extension or puncturing, the
//! decoding-cost calculus, and the base-design selection search.

use crate::catalog::{unitary_basis, MatrixFamily};
use crate::design::{ConditionalStructure, Design, GroupStructure, Rational};
use crate::error::{Error, Result};
use crate::fgd::{build_fgd, fgd_exponent, puncture_fgd};
use crate::linalg::{Complex64, ComplexMatrix, Tolerance};
use crate::multigroup::{ag_group_symbols, build_ag};
use std::collections::BTreeMap;

/// Base-design families considered by the selection search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseFamily {
    /// Diagonal algebraic base: rate 1, two groups, any antenna count.
    Dast,
    /// Fast-group-decodable base: rate 5/4, even antenna counts.
    Fgd,
    /// Delay-optimal asymptotically-good g-group base.
    Ag(usize),
    /// A published reference family; used only for labeling.
    External(String),
}

impl std::fmt::Display for BaseFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaseFamily::Dast => write!(f, "F_DAST"),
            BaseFamily::Fgd => write!(f, "F_FGD"),
            BaseFamily::Ag(g) => write!(f, "F_{g}AG"),
            BaseFamily::External(s) => write!(f, "{s}"),
        }
    }
}

/// How the target rate relates to the base design's rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    Base,
    Punctured,
    Extended,
}

impl std::fmt::Display for RateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateMode::Base => write!(f, "base"),
            RateMode::Punctured => write!(f, "punctured"),
            RateMode::Extended => write!(f, "extended"),
        }
    }
}

/// One additive component of a decoding cost: multiplier * M^exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTerm {
    pub label: String,
    pub exponent: f64,
    pub multiplier: f64,
}

/// Exponent of M in the ML decoding cost, with its additive
/// decomposition. The headline exponent is the maximum over terms
/// (dominant-term convention).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityProfile {
    pub exponent: f64,
    pub terms: Vec<ProfileTerm>,
    pub base_family: BaseFamily,
    pub k: usize,
    pub k_b: usize,
    pub mode: RateMode,
}

impl ComplexityProfile {
    /// Total number of candidate metric evaluations at constellation
    /// size M, i.e. the sum multiplier * M^exponent over all terms.
    pub fn evaluation_count(&self, m: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.multiplier * m.powf(t.exponent))
            .sum()
    }
}

/// The number of real symbols carried at rate R over N antennas:
/// K = ceil(2 R N).
pub fn symbols_for_rate(n: usize, r: Rational) -> usize {
    (r * Rational::new(2 * n as i64, 1)).ceil().to_integer() as usize
}

/// Group sizes after removing `remove` symbols from g balanced groups,
/// always taking from the currently largest group and breaking ties
/// toward the highest group index. The larger residue thus stays with
/// the earlier groups.
fn punctured_group_sizes(g: usize, k_b: usize, k: usize) -> Vec<usize> {
    debug_assert!(k_b % g == 0 && k <= k_b);
    let mut sizes = vec![k_b / g; g];
    for _ in 0..(k_b - k) {
        let max = *sizes.iter().max().unwrap();
        let idx = sizes.iter().rposition(|&s| s == max).unwrap();
        sizes[idx] -= 1;
    }
    sizes
}

fn half(x: i64) -> f64 {
    x as f64 / 2.0
}

/// Terms of a flat g-group decode with per-group hard-limiting of the
/// final symbol: one term per distinct group size k, cost M^((k-1)/2).
fn group_terms(sizes: &[usize]) -> Vec<ProfileTerm> {
    let mut by_size: BTreeMap<usize, usize> = BTreeMap::new();
    for &s in sizes {
        *by_size.entry(s).or_insert(0) += 1;
    }
    by_size
        .into_iter()
        .rev()
        .map(|(size, count)| ProfileTerm {
            label: format!("group of {size}"),
            exponent: half(size as i64 - 1),
            multiplier: count as f64,
        })
        .collect()
}

fn finish(
    terms: Vec<ProfileTerm>,
    base_family: BaseFamily,
    k: usize,
    k_b: usize,
    mode: RateMode,
) -> ComplexityProfile {
    let exponent = terms
        .iter()
        .map(|t| t.exponent)
        .fold(f64::NEG_INFINITY, f64::max);
    ComplexityProfile {
        exponent,
        terms,
        base_family,
        k,
        k_b,
        mode,
    }
}

fn shift_terms(terms: Vec<ProfileTerm>, shift: f64) -> Vec<ProfileTerm> {
    terms
        .into_iter()
        .map(|t| ProfileTerm {
            label: format!("conditioned {}", t.label),
            exponent: t.exponent + shift,
            multiplier: t.multiplier,
        })
        .collect()
}

/// Symbol count of the named base family at N antennas.
pub fn base_symbol_count(family: &BaseFamily, n: usize) -> Result<usize> {
    match family {
        BaseFamily::Dast => Ok(2 * n),
        BaseFamily::Fgd => {
            if n % 2 != 0 {
                return Err(Error::InvalidArgument(
                    "fast-group-decodable bases need an even antenna count".into(),
                ));
            }
            Ok(5 * n / 2)
        }
        BaseFamily::Ag(g) => Ok(*g * ag_group_symbols(*g, n)?),
        BaseFamily::External(name) => Err(Error::InvalidArgument(format!(
            "no symbol count for external family {name}"
        ))),
    }
}

/// Decoding-cost exponent of M at rate R over N antennas when the
/// named family provides the base design.
///
/// With K = ceil(2RN) and K_b the base symbol count:
/// * g-group bases at R <= R_b decode with M^((ceil(K/g)-1)/2) after
///   balanced puncturing;
/// * fast-group-decodable bases at 1 < R <= 5/4 decode with the
///   two-term cost M^(m/2-1/2) + 3 M^(2m(R-1)+m/2-1/2), and at R = 1
///   degenerate to four balanced groups;
/// * any base extended to R > R_b multiplies its cost by M^((K-K_b)/2).
pub fn exponent_for(family: &BaseFamily, n: usize, r: Rational) -> Result<ComplexityProfile> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 antennas".into()));
    }
    if r < Rational::new(1, 1) {
        return Err(Error::InvalidArgument(format!(
            "rate must be at least 1, got {r}"
        )));
    }
    if r > Rational::new(n as i64, 1) {
        return Err(Error::InvalidArgument(format!(
            "rate {r} exceeds full rate N={n} (K would exceed 2N^2)"
        )));
    }
    let k = symbols_for_rate(n, r);
    let k_b = base_symbol_count(family, n)?;
    let r_b = Rational::new(k_b as i64, 2 * n as i64);

    match family {
        BaseFamily::Dast | BaseFamily::Ag(_) => {
            let g = match family {
                BaseFamily::Dast => 2,
                BaseFamily::Ag(g) => *g,
                _ => unreachable!(),
            };
            if r < r_b {
                let sizes = punctured_group_sizes(g, k_b, k);
                Ok(finish(
                    group_terms(&sizes),
                    family.clone(),
                    k,
                    k_b,
                    RateMode::Punctured,
                ))
            } else if r == r_b {
                let sizes = vec![k_b / g; g];
                Ok(finish(
                    group_terms(&sizes),
                    family.clone(),
                    k,
                    k_b,
                    RateMode::Base,
                ))
            } else {
                let shift = half((k - k_b) as i64);
                let base = group_terms(&vec![k_b / g; g]);
                Ok(finish(
                    shift_terms(base, shift),
                    family.clone(),
                    k,
                    k_b,
                    RateMode::Extended,
                ))
            }
        }
        BaseFamily::Fgd => {
            let m = n / 2;
            let first = ProfileTerm {
                label: "independent group".into(),
                exponent: half(m as i64 - 1),
                multiplier: 1.0,
            };
            if r == Rational::new(1, 1) {
                let sizes = vec![m; 4];
                Ok(finish(
                    group_terms(&sizes),
                    BaseFamily::Fgd,
                    k,
                    k_b,
                    RateMode::Punctured,
                ))
            } else if r <= Rational::new(5, 4) {
                let conditional = ProfileTerm {
                    label: "conditioned 3-group".into(),
                    exponent: fgd_exponent(n, r)?,
                    multiplier: 3.0,
                };
                let mode = if r == Rational::new(5, 4) {
                    RateMode::Base
                } else {
                    RateMode::Punctured
                };
                Ok(finish(
                    vec![first, conditional],
                    BaseFamily::Fgd,
                    k,
                    k_b,
                    mode,
                ))
            } else {
                let shift = half((k - k_b) as i64);
                let base = vec![
                    first,
                    ProfileTerm {
                        label: "conditioned 3-group".into(),
                        exponent: fgd_exponent(n, Rational::new(5, 4))?,
                        multiplier: 3.0,
                    },
                ];
                Ok(finish(
                    shift_terms(base, shift),
                    BaseFamily::Fgd,
                    k,
                    k_b,
                    RateMode::Extended,
                ))
            }
        }
        BaseFamily::External(name) => Err(Error::InvalidArgument(format!(
            "cannot profile external family {name}"
        ))),
    }
}

/// A candidate base design with its family label and the exponent of
/// its own decoding cost.
#[derive(Debug, Clone)]
pub struct BaseCandidate {
    pub family: BaseFamily,
    pub design: Design,
    pub base_exponent: f64,
}

/// Every base family available at N antennas: the diagonal algebraic
/// base always, the fast-group-decodable base for even N, and the
/// g-group bases for every g with N = n * 2^floor((g-1)/2), n >= g.
pub fn candidate_families(n: usize) -> Vec<BaseFamily> {
    let mut out = vec![BaseFamily::Dast];
    if n % 2 == 0 {
        out.push(BaseFamily::Fgd);
    }
    let mut g = 2;
    loop {
        let scale = 1usize << ((g - 1) / 2);
        if scale > n {
            break;
        }
        if n % scale == 0 && n / scale >= g {
            out.push(BaseFamily::Ag(g));
        }
        g += 1;
    }
    out
}

/// Tie-break priority: fast-group-decodable first, then the diagonal
/// algebraic base, then g-group bases with larger g first.
fn family_priority(f: &BaseFamily) -> (u8, i64) {
    match f {
        BaseFamily::Fgd => (0, 0),
        BaseFamily::Dast => (1, 0),
        BaseFamily::Ag(g) => (2, -(*g as i64)),
        BaseFamily::External(_) => (3, 0),
    }
}

/// Selection search without realizing the winning design.
pub fn select_base_profile(n: usize, r: Rational) -> Result<(BaseFamily, ComplexityProfile)> {
    let mut best: Option<(BaseFamily, ComplexityProfile)> = None;
    for family in candidate_families(n) {
        let profile = exponent_for(&family, n, r)?;
        let better = match &best {
            None => true,
            Some((bf, bp)) => {
                profile.exponent < bp.exponent
                    || (profile.exponent == bp.exponent
                        && family_priority(&family) < family_priority(bf))
            }
        };
        if better {
            best = Some((family, profile));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument(format!("no base family exists for N={n}")))
}

/// Default real orthogonal rotation for diagonal algebraic bases: a
/// plane rotation by arctan(2)/2 at N = 2, and the Householder
/// reflection I - (2/N) 11^T for N >= 3. All entries are nonzero, so
/// the diagonal weights are full-rank.
pub fn default_rotation(n: usize) -> ComplexMatrix {
    match n {
        0 => ComplexMatrix::zeros(0, 0),
        1 => ComplexMatrix::identity(1),
        2 => {
            let theta = crate::catalog::ciod_angle();
            let (c, s) = (theta.cos(), theta.sin());
            ComplexMatrix::from_rows(&[
                vec![Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                vec![Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ])
            .unwrap()
        }
        _ => {
            let mut m = ComplexMatrix::zeros(n, n);
            let off = -2.0 / n as f64;
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = Complex64::new(if i == j { 1.0 + off } else { off }, 0.0);
                }
            }
            m
        }
    }
}

/// Rate-1 diagonal algebraic base over a real orthogonal rotation
/// U = [u_1 .. u_N]: weights diag(u_k) followed by i diag(u_k), two
/// decoding groups of N symbols each. Every rotation entry must be
/// nonzero, otherwise a weight matrix would be singular.
pub fn dast_base(n: usize, rotation: &ComplexMatrix) -> Result<Design> {
    let tol = Tolerance::default();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one antenna".into()));
    }
    if rotation.rows() != n || rotation.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "rotation must be {n}x{n}, got {}x{}",
            rotation.rows(),
            rotation.cols()
        )));
    }
    if rotation.entries().iter().any(|z| z.im.abs() > tol.zero_eps) {
        return Err(Error::InvalidArgument("rotation must be real".into()));
    }
    let gram = rotation.adjoint().matmul(rotation)?;
    if !gram.approx_eq(&ComplexMatrix::identity(n), tol.zero_eps * n as f64) {
        return Err(Error::InvalidArgument("rotation must be orthogonal".into()));
    }
    if let Some(pos) = rotation
        .entries()
        .iter()
        .position(|z| z.norm() <= tol.zero_eps)
    {
        return Err(Error::InvalidArgument(format!(
            "rotation entry at flat index {pos} is zero; diagonal weights would be singular"
        )));
    }
    let mut weights = Vec::with_capacity(2 * n);
    for col in 0..n {
        let diag: Vec<Complex64> = (0..n).map(|row| rotation[(row, col)]).collect();
        weights.push(ComplexMatrix::diagonal(&diag));
    }
    let i = Complex64::new(0.0, 1.0);
    for col in 0..n {
        weights.push(weights[col].scale(i));
    }
    let groups = GroupStructure::flat(vec![(0..n).collect(), (n..2 * n).collect()]);
    let mut meta = BTreeMap::new();
    meta.insert("family".into(), "dast".into());
    Design::new(format!("dast-N{n}"), n, n, weights, groups, meta)
}

/// Deterministic sieve that completes a base design's weights to K
/// independent matrices using members of a spanning family.
///
/// Walks the concatenation (base weights, then family members) keeping
/// every matrix that is independent of what was kept before — the
/// matrices deleted are exactly the earliest ones dependent on their
/// predecessors — and returns the first K - K_b kept family members.
pub fn complete_basis(base: &Design, basis: &MatrixFamily, k: usize) -> Result<Vec<ComplexMatrix>> {
    let tol = Tolerance::default();
    if base.t() != base.n() {
        return Err(Error::InvalidArgument(
            "basis completion needs a square design".into(),
        ));
    }
    let n = base.n();
    if basis.dimension != n {
        return Err(Error::DimensionMismatch(format!(
            "basis dimension {} does not match design size {n}",
            basis.dimension
        )));
    }
    let k_b = base.k();
    if k <= k_b {
        return Err(Error::InvalidArgument(format!(
            "target symbol count {k} must exceed the base's {k_b}"
        )));
    }
    if k > 2 * n * n {
        return Err(Error::InvalidArgument(format!(
            "target symbol count {k} exceeds 2N^2 = {} (rate beyond full-rate times N)",
            2 * n * n
        )));
    }

    // Modified Gram-Schmidt with re-orthogonalization over the real
    // vectorizations; `kept` holds an orthonormal spanning set.
    let dim = 2 * n * n;
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut accept = |mat: &ComplexMatrix| -> bool {
        let mut v = mat.vectorize_real();
        let orig: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if orig == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for q in &kept {
                let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= dot * y;
                }
            }
        }
        let res: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if res > tol.rank_eps * orig {
            for x in v.iter_mut() {
                *x /= res;
            }
            kept.push(v);
            true
        } else {
            false
        }
    };

    for (i, w) in base.weights().iter().enumerate() {
        if !accept(w) {
            return Err(Error::InvalidArgument(format!(
                "base weights are not independent (weight {})",
                i + 1
            )));
        }
    }
    let mut extension = Vec::with_capacity(k - k_b);
    for member in &basis.members {
        if extension.len() == k - k_b {
            break;
        }
        if accept(member) {
            extension.push(member.clone());
        }
    }
    if extension.len() < k - k_b {
        return Err(Error::InvalidArgument(format!(
            "family {} cannot complete the base to {k} independent matrices",
            basis.name
        )));
    }
    Ok(extension)
}

/// Extends a base design to rate R > R_b by appending unitary-basis
/// completions. The appended indices form the conditioning set; fixing
/// them leaves the base's own groups independently decodable.
pub fn build_fd(base: &Design, r: Rational) -> Result<Design> {
    let tol = Tolerance::default();
    if base.t() != base.n() {
        return Err(Error::InvalidArgument(
            "extension needs a delay-optimal base".into(),
        ));
    }
    if r <= base.rate() {
        return Err(Error::InvalidArgument(format!(
            "target rate {r} does not exceed the base rate {}; use puncturing instead",
            base.rate()
        )));
    }
    for (i, w) in base.weights().iter().enumerate() {
        if w.rank(&tol) < base.n() {
            return Err(Error::InvalidArgument(format!(
                "extension needs full-rank base weights; weight {} is rank-deficient",
                i + 1
            )));
        }
    }
    let n = base.n();
    let k = symbols_for_rate(n, r);
    let extension = complete_basis(base, &unitary_basis(n)?, k)?;
    let k_b = base.k();
    let mut weights = base.weights().to_vec();
    weights.extend(extension);

    let mut groups = GroupStructure::single_group(k);
    groups.conditional.insert(
        0,
        ConditionalStructure {
            outer: (k_b..k).collect(),
            inner: base.groups().partition.clone(),
        },
    );
    let mut meta = base.meta().clone();
    meta.insert("base".into(), base.name().to_string());
    meta.insert("k_b".into(), k_b.to_string());
    Design::new(
        format!("{}-fd-R{}-{}", base.name(), r.numer(), r.denom()),
        n,
        n,
        weights,
        groups,
        meta,
    )
}

/// Reduces a flat multigroup design to rate R < R_b by removing symbols
/// one at a time from the currently largest group (ties toward the
/// highest group index), dropping the highest-indexed symbol of the
/// chosen group each time.
pub fn puncture_design(base: &Design, r: Rational) -> Result<Design> {
    if r >= base.rate() {
        return Err(Error::InvalidArgument(format!(
            "target rate {r} is not below the base rate {}; use extension instead",
            base.rate()
        )));
    }
    if !base.groups().conditional.is_empty() {
        return Err(Error::InvalidArgument(
            "puncturing expects a flat multigroup base (no conditional structure)".into(),
        ));
    }
    let k = symbols_for_rate(base.n(), r);
    if k == 0 {
        return Err(Error::InvalidArgument(
            "cannot puncture away every symbol".into(),
        ));
    }
    let mut groups: Vec<Vec<usize>> = base.groups().partition.clone();
    for g in &mut groups {
        g.sort_unstable();
    }
    let mut remove = base.k() - k;
    while remove > 0 {
        let max = groups.iter().map(Vec::len).max().unwrap();
        let idx = groups.iter().rposition(|g| g.len() == max).unwrap();
        groups[idx].pop();
        remove -= 1;
    }
    let mut survivors: Vec<usize> = groups.iter().flatten().copied().collect();
    survivors.sort_unstable();
    let remap: BTreeMap<usize, usize> = survivors
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let weights: Vec<ComplexMatrix> = survivors
        .iter()
        .map(|&i| base.weights()[i].clone())
        .collect();
    let partition: Vec<Vec<usize>> = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| g.into_iter().map(|i| remap[&i]).collect())
        .collect();
    let mut meta = base.meta().clone();
    meta.insert("base".into(), base.name().to_string());
    meta.insert("k_b".into(), base.k().to_string());
    Design::new(
        format!("{}-punctured-R{}-{}", base.name(), r.numer(), r.denom()),
        base.t(),
        base.n(),
        weights,
        GroupStructure::flat(partition),
        meta,
    )
}

/// Realizes the named base family as an actual design.
pub fn realize_base(family: &BaseFamily, n: usize) -> Result<Design> {
    match family {
        BaseFamily::Dast => dast_base(n, &default_rotation(n)),
        BaseFamily::Fgd => build_fgd(n),
        BaseFamily::Ag(g) => build_ag(*g, n),
        BaseFamily::External(name) => Err(Error::InvalidArgument(format!(
            "cannot realize external family {name}"
        ))),
    }
}

/// Exponent of the base design's own decoding cost.
pub fn base_exponent(family: &BaseFamily, n: usize) -> Result<f64> {
    match family {
        BaseFamily::Dast => Ok(half(n as i64 - 1)),
        BaseFamily::Fgd => fgd_exponent(n, Rational::new(5, 4)),
        BaseFamily::Ag(g) => {
            let per_group = ag_group_symbols(*g, n)?;
            Ok(half(per_group as i64 - 1))
        }
        BaseFamily::External(name) => Err(Error::InvalidArgument(format!(
            "no base exponent for external family {name}"
        ))),
    }
}

/// Enumerates all base families available at N antennas, profiles a
/// rate-R code over each, and returns the winner of the minimum
/// decoding-cost exponent together with its realized design.
pub fn select_base(n: usize, r: Rational) -> Result<(BaseCandidate, ComplexityProfile)> {
    let (family, profile) = select_base_profile(n, r)?;
    let design = realize_base(&family, n)?;
    let base_exp = base_exponent(&family, n)?;
    Ok((
        BaseCandidate {
            family,
            design,
            base_exponent: base_exp,
        },
        profile,
    ))
}

/// Builds the minimum-complexity rate-R design for N antennas: selects
/// the base, then extends, punctures, or returns it unchanged as the
/// target rate dictates.
pub fn construct_for_rate(n: usize, r: Rational) -> Result<(Design, ComplexityProfile)> {
    let (candidate, profile) = select_base(n, r)?;
    let base = candidate.design;
    let design = if r > base.rate() {
        build_fd(&base, r)?
    } else if r < base.rate() {
        match candidate.family {
            BaseFamily::Fgd => puncture_fgd(&base, r)?,
            _ => puncture_design(&base, r)?,
        }
    } else {
        base
    };
    Ok((design, profile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::preset;
    use crate::design::verify_design;
    use crate::linalg::rank_real_span;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn rat(num: i64, den: i64) -> Rational {
        Rational::new(num, den)
    }

    #[test]
    fn complete_basis_from_alamouti() {
        let base = preset("alamouti").unwrap();
        let family = unitary_basis(2).unwrap();
        let ext = complete_basis(&base, &family, 8).unwrap();
        assert_eq!(ext.len(), 4);
        let mut all = base.weights().to_vec();
        all.extend(ext.clone());
        // Oracle: rank of the stacked vectorizations.
        assert_eq!(rank_real_span(&all, &tol()).unwrap(), 8);
        // Deterministic sieve: a second run returns identical matrices.
        let again = complete_basis(&base, &family, 8).unwrap();
        for (a, b) in ext.iter().zip(&again) {
            assert!(a.approx_eq(b, 0.0));
        }
    }

    #[test]
    fn complete_basis_to_full_dimension() {
        let base = preset("ciod2").unwrap();
        let family = unitary_basis(2).unwrap();
        let ext = complete_basis(&base, &family, 8).unwrap();
        let mut all = base.weights().to_vec();
        all.extend(ext);
        assert_eq!(rank_real_span(&all, &tol()).unwrap(), 8);
        assert!(complete_basis(&base, &family, 9).is_err());
        assert!(complete_basis(&base, &family, 4).is_err());
    }

    #[test]
    fn dast_base_shapes() {
        for n in [2usize, 3, 5, 7] {
            let d = dast_base(n, &default_rotation(n)).unwrap();
            assert_eq!(d.k(), 2 * n);
            assert_eq!(d.rate(), rat(1, 1));
            let report = verify_design(&d, &tol());
            assert!(report.all_ok(), "N={n}:\n{}", report.render());
            for w in d.weights() {
                assert!(w.determinant().unwrap().norm() > 1e-9);
            }
        }
    }

    #[test]
    fn dast_rejects_rotation_with_zero_entry() {
        let eye = ComplexMatrix::identity(3);
        assert!(dast_base(3, &eye).is_err());
        // Non-orthogonal rejection.
        let mut skew = default_rotation(3);
        skew[(0, 0)] += Complex64::new(0.5, 0.0);
        assert!(dast_base(3, &skew).is_err());
    }

    #[test]
    fn build_fd_matches_reference_parameters() {
        let base = build_ag(2, 6).unwrap();
        let fd = build_fd(&base, rat(2, 1)).unwrap();
        assert_eq!(fd.k(), 24);
        assert_eq!(fd.rate(), rat(2, 1));
        let report = verify_design(&fd, &tol());
        assert!(report.all_ok(), "{}", report.render());

        let base = build_fgd(4).unwrap();
        let fd = build_fd(&base, rat(2, 1)).unwrap();
        assert_eq!(fd.k(), 16);
        assert!(verify_design(&fd, &tol()).all_ok());

        let base = dast_base(3, &default_rotation(3)).unwrap();
        let fd = build_fd(&base, rat(3, 1)).unwrap();
        assert_eq!(fd.k(), 18);
        assert!(verify_design(&fd, &tol()).all_ok());
    }

    #[test]
    fn build_fd_rejects_low_rates() {
        let base = build_ag(2, 6).unwrap();
        let err = build_fd(&base, rat(1, 1)).unwrap_err().to_string();
        assert!(err.contains("punctur"), "{err}");
    }

    #[test]
    fn puncture_design_balanced_removal() {
        let base = build_ag(2, 8).unwrap();
        assert_eq!(base.k(), 34);
        let p = puncture_design(&base, rat(2, 1)).unwrap();
        assert_eq!(p.k(), 32);
        let sizes: Vec<usize> = p.groups().partition.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![16, 16]);
        assert!(verify_design(&p, &tol()).all_ok());

        let base = build_ag(2, 7).unwrap();
        let p = puncture_design(&base, rat(5, 4)).unwrap();
        assert_eq!(p.k(), 18);
        let sizes: Vec<usize> = p.groups().partition.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![9, 9]);
    }

    #[test]
    fn puncture_design_single_symbol() {
        let base = build_ag(2, 6).unwrap();
        // One symbol below the base rate: R = (K-1)/(2T).
        let r = rat(base.k() as i64 - 1, 2 * base.t() as i64);
        let p = puncture_design(&base, r).unwrap();
        assert_eq!(p.k(), base.k() - 1);
    }

    #[test]
    fn exponent_for_reference_cells() {
        let cases: &[(BaseFamily, usize, Rational, f64)] = &[
            (BaseFamily::Ag(2), 6, rat(2, 1), 6.5),
            (BaseFamily::Ag(2), 8, rat(2, 1), 7.5),
            (BaseFamily::Fgd, 4, rat(2, 1), 4.5),
            (BaseFamily::Dast, 5, rat(5, 4), 3.5),
            (BaseFamily::Ag(2), 9, rat(5, 4), 5.5),
        ];
        for (family, n, r, want) in cases {
            let p = exponent_for(family, *n, *r).unwrap();
            assert_eq!(p.exponent, *want, "{family} N={n} R={r}");
        }
    }

    #[test]
    fn exponent_modes_and_invariants() {
        let p = exponent_for(&BaseFamily::Ag(2), 8, rat(2, 1)).unwrap();
        assert_eq!(p.mode, RateMode::Punctured);
        assert!(p.k <= p.k_b);
        let p = exponent_for(&BaseFamily::Fgd, 4, rat(2, 1)).unwrap();
        assert_eq!(p.mode, RateMode::Extended);
        assert!(p.k >= p.k_b);
        let max_term = p
            .terms
            .iter()
            .map(|t| t.exponent)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(p.exponent, max_term);
        assert!(exponent_for(&BaseFamily::Fgd, 3, rat(2, 1)).is_err());
        assert!(exponent_for(&BaseFamily::Dast, 4, rat(1, 2)).is_err());
        assert!(exponent_for(&BaseFamily::Dast, 4, rat(5, 1)).is_err());
    }

    #[test]
    fn select_base_reference_cells() {
        let (fam, p) = select_base_profile(6, rat(5, 4)).unwrap();
        assert_eq!(fam, BaseFamily::Fgd);
        assert_eq!(p.exponent, 2.5);
        let (fam, p) = select_base_profile(7, rat(3, 1)).unwrap();
        assert_eq!(fam, BaseFamily::Ag(2));
        assert_eq!(p.exponent, 15.5);
        let (fam, p) = select_base_profile(3, rat(3, 1)).unwrap();
        assert_eq!(fam, BaseFamily::Dast);
        assert_eq!(p.exponent, 7.0);
    }

    #[test]
    fn candidate_families_enumeration() {
        let fams = candidate_families(8);
        assert!(fams.contains(&BaseFamily::Dast));
        assert!(fams.contains(&BaseFamily::Fgd));
        assert!(fams.contains(&BaseFamily::Ag(2)));
        assert!(fams.contains(&BaseFamily::Ag(3)));
        assert!(fams.contains(&BaseFamily::Ag(4)));
        assert!(!fams.contains(&BaseFamily::Ag(5)));
        let fams = candidate_families(7);
        assert!(!fams.contains(&BaseFamily::Fgd));
        assert!(fams.contains(&BaseFamily::Ag(2)));
        assert!(!fams.contains(&BaseFamily::Ag(3)));
    }

    #[test]
    fn construct_for_rate_produces_verified_designs() {
        for (n, r) in [
            (2usize, rat(2, 1)),
            (4, rat(5, 4)),
            (6, rat(2, 1)),
            (5, rat(5, 4)),
        ] {
            let (d, profile) = construct_for_rate(n, r).unwrap();
            assert_eq!(d.k(), profile.k, "N={n} R={r}");
            let report = verify_design(&d, &tol());
            assert!(report.all_ok(), "N={n} R={r}:\n{}", report.render());
        }
    }
}
