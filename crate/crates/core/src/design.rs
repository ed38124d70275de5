//! The linear-dispersion design aggregate, its structural verifier, the
//! finest-partition detector, and the versioned design file format.

use crate::diversity::{PamScaling, PamSpec};
use crate::error::{Error, Result};
use crate::linalg::{is_hr_orthogonal, rank_real_span, Complex64, ComplexMatrix, Tolerance};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

/// Exact rational, used for rates so that table values like 5/3 or 17/9
/// never suffer rounding.
pub type Rational = num_rational::Ratio<i64>;

/// Conditional decodability inside one decoding group: fixing the
/// symbols in `outer` leaves the `inner` sub-groups independently
/// decodable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalStructure {
    /// Conditioning symbol indices (0-based).
    pub outer: Vec<usize>,
    /// Disjoint inner sub-groups covering the rest of the group.
    pub inner: Vec<Vec<usize>>,
}

/// Decoding-structure descriptor: a flat partition of the symbol
/// indices plus optional per-group conditional sub-structure.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupStructure {
    /// Disjoint groups covering 0..K (0-based symbol indices).
    pub partition: Vec<Vec<usize>>,
    /// Conditional structure keyed by index into `partition`.
    pub conditional: BTreeMap<usize, ConditionalStructure>,
}

impl GroupStructure {
    pub fn flat(partition: Vec<Vec<usize>>) -> Self {
        Self {
            partition,
            conditional: BTreeMap::new(),
        }
    }

    pub fn single_group(k: usize) -> Self {
        Self::flat(vec![(0..k).collect()])
    }

    pub fn num_groups(&self) -> usize {
        self.partition.len()
    }

    /// Checks that the partition covers 0..k exactly once and every
    /// conditional block is a disjoint cover of its group.
    pub fn validate(&self, k: usize) -> Result<()> {
        if self.partition.is_empty() {
            return Err(Error::InvalidArgument(
                "partition must have at least one group".into(),
            ));
        }
        let mut seen = vec![false; k];
        for group in &self.partition {
            if group.is_empty() {
                return Err(Error::InvalidArgument("empty decoding group".into()));
            }
            for &i in group {
                if i >= k {
                    return Err(Error::InvalidArgument(format!(
                        "group index {i} out of range for K={k}"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidArgument(format!("index {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument(
                "partition does not cover all symbols".into(),
            ));
        }
        for (&gidx, cond) in &self.conditional {
            let Some(group) = self.partition.get(gidx) else {
                return Err(Error::InvalidArgument(format!(
                    "conditional refers to missing group {gidx}"
                )));
            };
            let group_set: BTreeSet<usize> = group.iter().copied().collect();
            if cond.outer.is_empty() {
                return Err(Error::InvalidArgument(
                    "conditional outer set is empty".into(),
                ));
            }
            let mut covered: BTreeSet<usize> = BTreeSet::new();
            for &i in cond.outer.iter().chain(cond.inner.iter().flatten()) {
                if !group_set.contains(&i) {
                    return Err(Error::InvalidArgument(format!(
                        "conditional index {i} lies outside group {gidx}"
                    )));
                }
                if !covered.insert(i) {
                    return Err(Error::InvalidArgument(format!(
                        "conditional index {i} appears twice"
                    )));
                }
            }
            if cond.inner.iter().any(|s| s.is_empty()) {
                return Err(Error::InvalidArgument("empty conditional sub-group".into()));
            }
            if covered != group_set {
                return Err(Error::InvalidArgument(format!(
                    "conditional blocks must cover group {gidx} exactly"
                )));
            }
        }
        Ok(())
    }
}

/// A linear-dispersion design: K weight matrices of shape T x N with a
/// declared decoding structure and provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    name: String,
    t: usize,
    n: usize,
    weights: Vec<ComplexMatrix>,
    groups: GroupStructure,
    meta: BTreeMap<String, String>,
}

impl Design {
    pub fn new(
        name: impl Into<String>,
        t: usize,
        n: usize,
        weights: Vec<ComplexMatrix>,
        groups: GroupStructure,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        if t == 0 || n == 0 || weights.is_empty() {
            return Err(Error::InvalidArgument("design needs T, N, K >= 1".into()));
        }
        for (i, w) in weights.iter().enumerate() {
            if w.rows() != t || w.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "weight {} is {}x{}, expected {t}x{n}",
                    i + 1,
                    w.rows(),
                    w.cols()
                )));
            }
        }
        groups.validate(weights.len())?;
        Ok(Self {
            name: name.into(),
            t,
            n,
            weights,
            groups,
            meta,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// Rate in complex symbols per channel use, K / (2T), reduced.
    pub fn rate(&self) -> Rational {
        Rational::new(self.k() as i64, 2 * self.t as i64)
    }

    pub fn weights(&self) -> &[ComplexMatrix] {
        &self.weights
    }

    pub fn groups(&self) -> &GroupStructure {
        &self.groups
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn is_delay_optimal(&self) -> bool {
        self.t == self.n
    }
}

/// Outcome of the structural verifier. Violating pairs are 0-based
/// weight indices; rendering adds 1 for human output.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub k: usize,
    pub independence_rank: usize,
    pub cross_group_violations: Vec<(usize, usize)>,
    pub conditional_violations: Vec<(usize, usize)>,
    pub weight_ranks: Vec<usize>,
    pub rank_deficient_weights: Vec<usize>,
}

impl VerifyReport {
    pub fn independent(&self) -> bool {
        self.independence_rank == self.k
    }

    pub fn all_ok(&self) -> bool {
        self.independent()
            && self.cross_group_violations.is_empty()
            && self.conditional_violations.is_empty()
            && self.rank_deficient_weights.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let ok = |b: bool| if b { "ok" } else { "FAIL" };
        let _ = writeln!(
            s,
            "independence: {} (rank {} of {})",
            ok(self.independent()),
            self.independence_rank,
            self.k
        );
        let _ = writeln!(
            s,
            "cross-group HR orthogonality: {}",
            ok(self.cross_group_violations.is_empty())
        );
        for &(i, j) in &self.cross_group_violations {
            let _ = writeln!(s, "  violating pair: ({}, {})", i + 1, j + 1);
        }
        let _ = writeln!(
            s,
            "conditional HR orthogonality: {}",
            ok(self.conditional_violations.is_empty())
        );
        for &(i, j) in &self.conditional_violations {
            let _ = writeln!(s, "  violating pair: ({}, {})", i + 1, j + 1);
        }
        let _ = writeln!(
            s,
            "full-rank weights: {}",
            ok(self.rank_deficient_weights.is_empty())
        );
        for &i in &self.rank_deficient_weights {
            let _ = writeln!(s, "  rank-deficient weight: {}", i + 1);
        }
        let _ = writeln!(
            s,
            "overall: {}",
            if self.all_ok() { "PASS" } else { "FAIL" }
        );
        s
    }
}

/// Verifies every declared structural invariant of a design and reports
/// findings instead of failing, so third-party design files can be
/// audited.
pub fn verify_design(d: &Design, tol: &Tolerance) -> VerifyReport {
    let k = d.k();
    let independence_rank = rank_real_span(d.weights(), tol).expect("weights share shape");

    let mut cross = Vec::new();
    let part = &d.groups().partition;
    for a in 0..part.len() {
        for b in (a + 1)..part.len() {
            for &i in &part[a] {
                for &j in &part[b] {
                    if !is_hr_orthogonal(&d.weights()[i], &d.weights()[j], tol).expect("shapes") {
                        cross.push((i.min(j), i.max(j)));
                    }
                }
            }
        }
    }

    let mut conditional = Vec::new();
    for cond in d.groups().conditional.values() {
        for a in 0..cond.inner.len() {
            for b in (a + 1)..cond.inner.len() {
                for &i in &cond.inner[a] {
                    for &j in &cond.inner[b] {
                        if !is_hr_orthogonal(&d.weights()[i], &d.weights()[j], tol).expect("shapes")
                        {
                            conditional.push((i.min(j), i.max(j)));
                        }
                    }
                }
            }
        }
    }

    let full = d.t().min(d.n());
    let weight_ranks: Vec<usize> = d.weights().iter().map(|w| w.rank(tol)).collect();
    let rank_deficient: Vec<usize> = weight_ranks
        .iter()
        .enumerate()
        .filter(|&(_, &r)| r < full)
        .map(|(i, _)| i)
        .collect();

    VerifyReport {
        k,
        independence_rank,
        cross_group_violations: cross,
        conditional_violations: conditional,
        weight_ranks,
        rank_deficient_weights: rank_deficient,
    }
}

/// Finest valid flat partition: connected components of the graph whose
/// edges join weight pairs that are *not* Hurwitz-Radon orthogonal.
/// Every valid declared partition is a coarsening of this one.
pub fn detect_groups(d: &Design, tol: &Tolerance) -> GroupStructure {
    let k = d.k();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if !is_hr_orthogonal(&d.weights()[i], &d.weights()[j], tol).expect("shapes") {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        components.entry(r).or_default().push(i);
    }
    GroupStructure::flat(components.into_values().collect())
}

/// True when `coarse` can be obtained by merging groups of `fine`.
pub fn is_coarsening_of(coarse: &GroupStructure, fine: &GroupStructure) -> bool {
    fine.partition.iter().all(|component| {
        coarse
            .partition
            .iter()
            .any(|group| component.iter().all(|i| group.contains(i)))
    })
}

pub const DESIGN_FILE_VERSION: i64 = 1;

fn fmt_f64(x: f64) -> String {
    // 17 significant digits: enough to reproduce any f64 exactly.
    format!("{x:.16e}")
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization")
}

/// Serializes a design (and an optional PAM spec) into the versioned
/// design file format.
pub fn render_design_file(d: &Design, pam: Option<&PamSpec>) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"version\": {},", DESIGN_FILE_VERSION);
    let _ = writeln!(s, "  \"name\": {},", json_string(d.name()));
    let _ = writeln!(s, "  \"T\": {},", d.t());
    let _ = writeln!(s, "  \"N\": {},", d.n());
    let _ = writeln!(s, "  \"K\": {},", d.k());
    let rate = d.rate();
    let _ = writeln!(
        s,
        "  \"rate\": {{\"num\": {}, \"den\": {}}},",
        rate.numer(),
        rate.denom()
    );
    s.push_str("  \"weights\": [\n");
    for (wi, w) in d.weights().iter().enumerate() {
        s.push_str("    [");
        for (ei, z) in w.entries().iter().enumerate() {
            if ei > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "[{}, {}]", fmt_f64(z.re), fmt_f64(z.im));
        }
        s.push(']');
        s.push_str(if wi + 1 < d.k() { ",\n" } else { "\n" });
    }
    s.push_str("  ],\n");
    s.push_str("  \"groups\": [");
    for (gi, group) in d.groups().partition.iter().enumerate() {
        if gi > 0 {
            s.push_str(", ");
        }
        let one_based: Vec<String> = group.iter().map(|i| (i + 1).to_string()).collect();
        let _ = write!(s, "[{}]", one_based.join(", "));
    }
    s.push_str("],\n");
    if d.groups().conditional.is_empty() {
        s.push_str("  \"conditional\": null,\n");
    } else {
        s.push_str("  \"conditional\": {");
        for (ci, (gidx, cond)) in d.groups().conditional.iter().enumerate() {
            if ci > 0 {
                s.push_str(", ");
            }
            let outer: Vec<String> = cond.outer.iter().map(|i| (i + 1).to_string()).collect();
            let inner: Vec<String> = cond
                .inner
                .iter()
                .map(|sub| {
                    let xs: Vec<String> = sub.iter().map(|i| (i + 1).to_string()).collect();
                    format!("[{}]", xs.join(", "))
                })
                .collect();
            let _ = write!(
                s,
                "\"{}\": {{\"outer\": [{}], \"inner\": [{}]}}",
                gidx + 1,
                outer.join(", "),
                inner.join(", ")
            );
        }
        s.push_str("},\n");
    }
    s.push_str("  \"meta\": {");
    for (mi, (key, value)) in d.meta().iter().enumerate() {
        if mi > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{}: {}", json_string(key), json_string(value));
    }
    s.push('}');
    if let Some(p) = pam {
        s.push_str(",\n");
        let _ = writeln!(s, "  \"pam\": {{");
        let _ = write!(s, "    \"q\": {},", p.q);
        match &p.scaling {
            PamScaling::Distances(d) => {
                let xs: Vec<String> = d.iter().map(|x| fmt_f64(*x)).collect();
                let _ = write!(s, " \"mode\": \"distances\", \"d\": [{}]", xs.join(", "));
            }
            PamScaling::UnitCircle(a) => {
                let xs: Vec<String> = a
                    .iter()
                    .map(|z| format!("[{}, {}]", fmt_f64(z.re), fmt_f64(z.im)))
                    .collect();
                let _ = write!(
                    s,
                    " \"mode\": \"unit_circle\", \"alpha\": [{}]",
                    xs.join(", ")
                );
            }
        }
        s.push_str("\n  }\n");
    } else {
        s.push('\n');
    }
    s.push_str("}\n");
    s
}

#[derive(Deserialize)]
struct RateDto {
    num: i64,
    den: i64,
}

#[derive(Deserialize)]
struct ConditionalDto {
    outer: Vec<usize>,
    inner: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct PamDto {
    q: usize,
    mode: String,
    #[serde(default)]
    d: Option<Vec<f64>>,
    #[serde(default)]
    alpha: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
struct DesignFileDto {
    version: i64,
    name: String,
    #[serde(rename = "T")]
    t: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    rate: RateDto,
    weights: Vec<Vec<[f64; 2]>>,
    groups: Vec<Vec<usize>>,
    #[serde(default)]
    conditional: Option<BTreeMap<String, ConditionalDto>>,
    #[serde(default)]
    meta: BTreeMap<String, String>,
    #[serde(default)]
    pam: Option<PamDto>,
}

fn one_based_to_zero(indices: &[usize], k: usize, what: &str) -> Result<Vec<usize>> {
    indices
        .iter()
        .map(|&i| {
            if i == 0 || i > k {
                Err(Error::Inconsistent(format!(
                    "{what} index {i} out of range 1..={k}"
                )))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

/// Parses the design file format; see [`render_design_file`].
pub fn parse_design_file(text: &str) -> Result<(Design, Option<PamSpec>)> {
    let dto: DesignFileDto =
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    if dto.version != DESIGN_FILE_VERSION {
        return Err(Error::VersionMismatch {
            found: dto.version,
            expected: DESIGN_FILE_VERSION,
        });
    }
    if dto.weights.len() != dto.k {
        return Err(Error::Inconsistent(format!(
            "K={} but {} weight matrices present",
            dto.k,
            dto.weights.len()
        )));
    }
    let mut weights = Vec::with_capacity(dto.k);
    for (i, flat) in dto.weights.iter().enumerate() {
        if flat.len() != dto.t * dto.n {
            return Err(Error::Inconsistent(format!(
                "weight {} has {} entries, expected {}",
                i + 1,
                flat.len(),
                dto.t * dto.n
            )));
        }
        let entries: Vec<Complex64> = flat
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        weights.push(
            ComplexMatrix::new(dto.t, dto.n, entries)
                .map_err(|e| Error::Inconsistent(e.to_string()))?,
        );
    }
    let expected_rate = Rational::new(dto.k as i64, 2 * dto.t as i64);
    if dto.rate.den == 0 || Rational::new(dto.rate.num, dto.rate.den) != expected_rate {
        return Err(Error::Inconsistent(format!(
            "rate {}/{} does not equal K/(2T) = {}",
            dto.rate.num, dto.rate.den, expected_rate
        )));
    }
    let mut partition = Vec::with_capacity(dto.groups.len());
    for group in &dto.groups {
        partition.push(one_based_to_zero(group, dto.k, "group")?);
    }
    let mut conditional = BTreeMap::new();
    if let Some(cond_map) = &dto.conditional {
        for (key, cond) in cond_map {
            let gidx: usize = key
                .parse()
                .map_err(|_| Error::Inconsistent(format!("conditional key '{key}'")))?;
            if gidx == 0 || gidx > partition.len() {
                return Err(Error::Inconsistent(format!(
                    "conditional group {gidx} out of range"
                )));
            }
            let mut inner = Vec::new();
            for sub in &cond.inner {
                inner.push(one_based_to_zero(sub, dto.k, "conditional inner")?);
            }
            conditional.insert(
                gidx - 1,
                ConditionalStructure {
                    outer: one_based_to_zero(&cond.outer, dto.k, "conditional outer")?,
                    inner,
                },
            );
        }
    }
    let groups = GroupStructure {
        partition,
        conditional,
    };
    let design = Design::new(dto.name, dto.t, dto.n, weights, groups, dto.meta)
        .map_err(|e| Error::Inconsistent(e.to_string()))?;
    let pam = match dto.pam {
        None => None,
        Some(p) => Some(match p.mode.as_str() {
            "distances" => {
                let d = p.d.ok_or_else(|| {
                    Error::Inconsistent("pam mode 'distances' without 'd'".into())
                })?;
                PamSpec::distances(p.q, d).map_err(|e| Error::Inconsistent(e.to_string()))?
            }
            "unit_circle" => {
                let a = p.alpha.ok_or_else(|| {
                    Error::Inconsistent("pam mode 'unit_circle' without 'alpha'".into())
                })?;
                let alpha = a.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                PamSpec::unit_circle(p.q, alpha).map_err(|e| Error::Inconsistent(e.to_string()))?
            }
            other => return Err(Error::Inconsistent(format!("unknown pam mode '{other}'"))),
        }),
    };
    if let Some(p) = &pam {
        if p.len() != design.k() {
            return Err(Error::Inconsistent(format!(
                "pam spec has {} entries for K={}",
                p.len(),
                design.k()
            )));
        }
    }
    Ok((design, pam))
}

/// Writes `d` to `path` in the design file format.
pub fn save(d: &Design, path: impl AsRef<Path>) -> Result<()> {
    save_with_pam(d, None, path)
}

pub fn save_with_pam(d: &Design, pam: Option<&PamSpec>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_design_file(d, pam))?;
    Ok(())
}

/// Loads a design, discarding any attached PAM spec.
pub fn load(path: impl AsRef<Path>) -> Result<Design> {
    Ok(load_with_pam(path)?.0)
}

pub fn load_with_pam(path: impl AsRef<Path>) -> Result<(Design, Option<PamSpec>)> {
    let text = std::fs::read_to_string(path)?;
    parse_design_file(&text)
}
