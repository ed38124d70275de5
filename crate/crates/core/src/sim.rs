//! Quasi-static Rayleigh flat-fading simulation: PAM encoding with
//! unit-average-energy normalization, exhaustive and structure-aware ML
//! decoders, and reproducible Monte-Carlo bit-error-rate estimation.

use crate::design::{verify_design, Design};
use crate::diversity::PamSpec;
use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix, Tolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Default cap on the exhaustive-decoder codebook size.
pub const DEFAULT_CODEBOOK_BUDGET: u64 = 10_000_000;

/// Scale factor that normalizes the PAM codebook of a design to unit
/// average energy per channel use.
pub fn codebook_scale(d: &Design, pam: &PamSpec) -> Result<f64> {
    if pam.len() != d.k() {
        return Err(Error::DimensionMismatch(format!(
            "PAM spec covers {} symbols, design has {}",
            pam.len(),
            d.k()
        )));
    }
    let q2 = (pam.q * pam.q) as f64;
    let mut energy = 0.0;
    for i in 0..d.k() {
        let w = pam.scaled_weight(d, i);
        let var = pam.distance(i).powi(2) * (q2 - 1.0) / 12.0;
        energy += var * w.frobenius_norm().powi(2);
    }
    Ok((d.t() as f64 / energy).sqrt())
}

/// Builds the codeword for one tuple of PAM indices, including the
/// unit-average-energy normalization.
pub fn encode(d: &Design, pam: &PamSpec, indices: &[usize]) -> Result<ComplexMatrix> {
    if indices.len() != d.k() {
        return Err(Error::DimensionMismatch(format!(
            "{} indices for K={} symbols",
            indices.len(),
            d.k()
        )));
    }
    let scale = codebook_scale(d, pam)?;
    let mut x = ComplexMatrix::zeros(d.t(), d.n());
    for (i, &ji) in indices.iter().enumerate() {
        if ji >= pam.q {
            return Err(Error::InvalidArgument(format!(
                "symbol {} index {ji} out of range for Q={}",
                i + 1,
                pam.q
            )));
        }
        let v = pam.points(i)[ji] * scale;
        x = x.add(&pam.scaled_weight(d, i).scale(Complex64::new(v, 0.0)))?;
    }
    Ok(x)
}

/// Squared Frobenius distance between Y and X H.
pub fn ml_metric(y: &ComplexMatrix, x: &ComplexMatrix, h: &ComplexMatrix) -> Result<f64> {
    let xh = x.matmul(h)?;
    Ok(y.sub(&xh)?.frobenius_norm().powi(2))
}

/// Exhaustive ML decoder over the full codebook.
pub struct ExhaustiveDecoder {
    q: usize,
    k: usize,
    codebook: Vec<ComplexMatrix>,
}

impl ExhaustiveDecoder {
    pub fn new(d: &Design, pam: &PamSpec, budget: u64) -> Result<Self> {
        let k = d.k();
        let size = (pam.q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if size > budget as u128 {
            return Err(Error::BudgetExceeded {
                required: size,
                budget,
            });
        }
        let size = size as usize;
        let mut codebook = Vec::with_capacity(size);
        let mut indices = vec![0usize; k];
        for flat in 0..size {
            let mut rem = flat;
            // Symbol 0 is the most significant digit so that flat order
            // equals lexicographic order of index tuples.
            for i in (0..k).rev() {
                indices[i] = rem % pam.q;
                rem /= pam.q;
            }
            codebook.push(encode(d, pam, &indices)?);
        }
        Ok(Self {
            q: pam.q,
            k,
            codebook,
        })
    }

    /// Returns the codebook cardinality Q^K.
    pub fn codebook_len(&self) -> usize {
        self.codebook.len()
    }

    /// Argmin of the ML metric; ties resolve to the lexicographically
    /// smallest index tuple.
    pub fn decode(&self, y: &ComplexMatrix, h: &ComplexMatrix) -> Result<Vec<usize>> {
        let mut best = f64::INFINITY;
        let mut best_flat = 0;
        for (flat, x) in self.codebook.iter().enumerate() {
            let m = ml_metric(y, x, h)?;
            if m < best {
                best = m;
                best_flat = flat;
            }
        }
        let mut indices = vec![0usize; self.k];
        let mut rem = best_flat;
        for i in (0..self.k).rev() {
            indices[i] = rem % self.q;
            rem /= self.q;
        }
        Ok(indices)
    }
}

/// Decoding plan for one flat group: its conditioning symbols (empty
/// for plain groups) and the independently decodable sub-groups.
struct GroupPlan {
    outer: Vec<usize>,
    subs: Vec<Vec<usize>>,
}

/// Best metric, its (symbol, PAM index) assignments, and how many
/// candidates were evaluated to find it.
type SubMinimum = (f64, Vec<(usize, usize)>, u64);

/// Structure-aware ML decoder: independent per-group minimization, with
/// conditional enumeration of the outer symbols where the design
/// declares conditional structure, and scaling + hard-limiting of the
/// final PAM symbol of every sub-group.
pub struct StructuredDecoder {
    q: usize,
    k: usize,
    t: usize,
    weights: Vec<ComplexMatrix>,
    points: Vec<Vec<f64>>,
    plans: Vec<GroupPlan>,
}

impl StructuredDecoder {
    /// Verifies the declared structure before building the decoder;
    /// refuses designs whose declaration fails verification.
    pub fn new(d: &Design, pam: &PamSpec, tol: &Tolerance) -> Result<Self> {
        if pam.len() != d.k() {
            return Err(Error::DimensionMismatch(format!(
                "PAM spec covers {} symbols, design has {}",
                pam.len(),
                d.k()
            )));
        }
        let report = verify_design(d, tol);
        if !report.all_ok() {
            return Err(Error::UnverifiedStructure(report.render()));
        }
        let scale = codebook_scale(d, pam)?;
        let weights: Vec<ComplexMatrix> = (0..d.k())
            .map(|i| pam.scaled_weight(d, i).scale(Complex64::new(scale, 0.0)))
            .collect();
        let points: Vec<Vec<f64>> = (0..d.k()).map(|i| pam.points(i)).collect();
        let plans = d
            .groups()
            .partition
            .iter()
            .enumerate()
            .map(|(gi, group)| match d.groups().conditional.get(&gi) {
                Some(cond) => GroupPlan {
                    outer: cond.outer.clone(),
                    subs: cond.inner.clone(),
                },
                None => GroupPlan {
                    outer: Vec::new(),
                    subs: vec![group.clone()],
                },
            })
            .collect();
        Ok(Self {
            q: pam.q,
            k: d.k(),
            t: d.t(),
            weights,
            points,
            plans,
        })
    }

    pub fn decode(&self, y: &ComplexMatrix, h: &ComplexMatrix) -> Result<Vec<usize>> {
        Ok(self.decode_counted(y, h)?.0)
    }

    /// Decodes and reports the number of candidate metric evaluations
    /// performed in sub-group minimizations.
    pub fn decode_counted(
        &self,
        y: &ComplexMatrix,
        h: &ComplexMatrix,
    ) -> Result<(Vec<usize>, u64)> {
        let n_rx = h.cols();
        let wh: Vec<ComplexMatrix> = self
            .weights
            .iter()
            .map(|w| w.matmul(h))
            .collect::<Result<_>>()?;
        let wh_norm2: Vec<f64> = wh.iter().map(|m| m.frobenius_norm().powi(2)).collect();
        let mut decoded = vec![0usize; self.k];
        let mut evaluations = 0u64;

        let inner_cells = self.t * n_rx;
        let mut seff = vec![Complex64::new(0.0, 0.0); inner_cells];

        for plan in &self.plans {
            let mut best_metric = f64::INFINITY;
            let mut best_assign: Option<Vec<(usize, usize)>> = None;
            let outer_card = self.q.pow(plan.outer.len() as u32);
            for outer_flat in 0..outer_card {
                // y_eff = y - sum outer v_i (A_i h); also the outer part
                // of the group metric.
                let mut rem = outer_flat;
                let mut outer_idx = vec![0usize; plan.outer.len()];
                for slot in (0..plan.outer.len()).rev() {
                    outer_idx[slot] = rem % self.q;
                    rem /= self.q;
                }
                for (cell, s) in seff.iter_mut().enumerate() {
                    *s = y.entries()[cell];
                }
                let mut outer_metric = 0.0;
                {
                    let mut so = vec![Complex64::new(0.0, 0.0); inner_cells];
                    for (slot, &sym) in plan.outer.iter().enumerate() {
                        let v = self.points[sym][outer_idx[slot]];
                        for (cell, s) in so.iter_mut().enumerate() {
                            *s += wh[sym].entries()[cell] * v;
                        }
                    }
                    for cell in 0..inner_cells {
                        outer_metric +=
                            so[cell].norm_sqr() - 2.0 * (y.entries()[cell].conj() * so[cell]).re;
                        seff[cell] -= so[cell];
                    }
                }

                let mut total = outer_metric;
                let mut assign: Vec<(usize, usize)> = plan
                    .outer
                    .iter()
                    .zip(&outer_idx)
                    .map(|(&sym, &idx)| (sym, idx))
                    .collect();
                for sub in &plan.subs {
                    let (sub_metric, sub_assign, evals) =
                        self.minimize_sub(sub, &seff, &wh, &wh_norm2)?;
                    evaluations += evals;
                    total += sub_metric;
                    assign.extend(sub_assign);
                }
                if total < best_metric {
                    best_metric = total;
                    best_assign = Some(assign);
                }
            }
            for (sym, idx) in best_assign.expect("at least one outer candidate") {
                decoded[sym] = idx;
            }
        }
        Ok((decoded, evaluations))
    }

    /// Minimizes one sub-group against the effective received matrix:
    /// enumerates all but the last symbol and hard-limits the last.
    /// Returns (metric, symbol assignments, evaluation count).
    fn minimize_sub(
        &self,
        sub: &[usize],
        y_eff: &[Complex64],
        wh: &[ComplexMatrix],
        wh_norm2: &[f64],
    ) -> Result<SubMinimum> {
        let cells = y_eff.len();
        let last = *sub.last().expect("non-empty sub-group");
        let heads = &sub[..sub.len() - 1];
        let head_card = self.q.pow(heads.len() as u32);
        let mut best = f64::INFINITY;
        let mut best_assign = Vec::new();
        let mut evals = 0u64;
        let mut head_sum = vec![Complex64::new(0.0, 0.0); cells];
        for head_flat in 0..head_card {
            let mut rem = head_flat;
            let mut head_idx = vec![0usize; heads.len()];
            for slot in (0..heads.len()).rev() {
                head_idx[slot] = rem % self.q;
                rem /= self.q;
            }
            for s in head_sum.iter_mut() {
                *s = Complex64::new(0.0, 0.0);
            }
            for (slot, &sym) in heads.iter().enumerate() {
                let v = self.points[sym][head_idx[slot]];
                for (cell, s) in head_sum.iter_mut().enumerate() {
                    *s += wh[sym].entries()[cell] * v;
                }
            }
            // Quadratic in the last symbol value v:
            //   a v^2 + b v + c,  a = ||A_last h||^2,
            //   b = 2 Re<head - y_eff, A_last h>.
            let a = wh_norm2[last];
            let mut b = 0.0;
            for cell in 0..cells {
                b += 2.0 * ((head_sum[cell] - y_eff[cell]).conj() * wh[last].entries()[cell]).re;
            }
            let v_star = if a > 0.0 { -b / (2.0 * a) } else { 0.0 };
            let pts = &self.points[last];
            let d_last = pts[1] - pts[0];
            let pos = (v_star - pts[0]) / d_last;
            let j = (pos.round().max(0.0) as usize).min(self.q - 1);
            let v = pts[j];
            let mut metric = 0.0;
            for cell in 0..cells {
                let s = head_sum[cell] + wh[last].entries()[cell] * v;
                metric += s.norm_sqr() - 2.0 * (y_eff[cell].conj() * s).re;
            }
            evals += 1;
            if metric < best {
                best = metric;
                best_assign = heads
                    .iter()
                    .zip(&head_idx)
                    .map(|(&sym, &idx)| (sym, idx))
                    .chain(std::iter::once((last, j)))
                    .collect();
            }
        }
        Ok((best, best_assign, evals))
    }
}

/// Decoder selection for Monte-Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Exhaustive,
    Structured,
}

/// Monte-Carlo configuration. SNR is the average received symbol
/// energy per receive antenna over the noise variance; the codebook is
/// normalized to unit average energy per channel use, so the noise
/// variance per complex entry at snr_db is 10^(-snr_db/10).
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub q: usize,
    /// Per-symbol PAM distances; all ones when absent.
    pub distances: Option<Vec<f64>>,
    pub n_rx: usize,
    pub snr_db_grid: Vec<f64>,
    pub trials_per_point: u64,
    pub seed: u64,
    pub decoder: DecoderKind,
}

/// One sampled channel use: fading matrix H with unit-variance
/// circularly-symmetric Gaussian entries and noise W with variance
/// sigma^2 per complex entry.
pub struct ChannelRealization {
    pub h: ComplexMatrix,
    pub w: ComplexMatrix,
}

impl ChannelRealization {
    pub fn sample(n: usize, n_rx: usize, t: usize, sigma2: f64, rng: &mut ChaCha12Rng) -> Self {
        let mut draw = |rows: usize, cols: usize, var: f64| {
            let std = (var / 2.0).sqrt();
            let entries = (0..rows * cols)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    Complex64::new(re * std, im * std)
                })
                .collect();
            ComplexMatrix::new(rows, cols, entries).expect("finite samples")
        };
        let h = draw(n, n_rx, 1.0);
        let w = draw(t, n_rx, sigma2);
        Self { h, w }
    }
}

/// One estimated point of a bit-error-rate curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub ber: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub frames: u64,
}

/// Renders BER points as CSV with columns snr_db, ber, bits,
/// frame_errors, frames.
pub fn render_ber_csv(points: &[BerPoint]) -> String {
    let mut out = String::from("snr_db,ber,bits,frame_errors,frames\n");
    for p in points {
        out.push_str(&format!(
            "{},{:.6e},{},{},{}\n",
            p.snr_db, p.ber, p.bits, p.frame_errors, p.frames
        ));
    }
    out
}

fn gray(j: usize) -> usize {
    j ^ (j >> 1)
}

fn trial_rng(seed: u64, snr_idx: u64, trial: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&snr_idx.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

enum AnyDecoder {
    Exhaustive(ExhaustiveDecoder),
    Structured(StructuredDecoder),
}

impl AnyDecoder {
    fn decode(&self, y: &ComplexMatrix, h: &ComplexMatrix) -> Result<Vec<usize>> {
        match self {
            AnyDecoder::Exhaustive(d) => d.decode(y, h),
            AnyDecoder::Structured(d) => d.decode(y, h),
        }
    }
}

/// Monte-Carlo BER estimation with Gray-mapped bits per PAM symbol.
///
/// Each trial draws from its own counter-based random stream keyed by
/// (seed, snr index, trial index), and error counts are integer sums,
/// so the output is identical for any number of worker threads.
pub fn ber_curve(d: &Design, cfg: &SimConfig) -> Result<Vec<BerPoint>> {
    if !cfg.q.is_power_of_two() || cfg.q < 2 {
        return Err(Error::InvalidArgument(
            "bit mapping needs Q to be a power of two (Q >= 2)".into(),
        ));
    }
    if cfg.n_rx == 0 || cfg.trials_per_point == 0 {
        return Err(Error::InvalidArgument(
            "need n_rx >= 1 and at least one trial".into(),
        ));
    }
    let pam = match &cfg.distances {
        Some(dist) => PamSpec::distances(cfg.q, dist.clone())?,
        None => PamSpec::uniform(cfg.q, d.k())?,
    };
    let decoder = match cfg.decoder {
        DecoderKind::Exhaustive => {
            AnyDecoder::Exhaustive(ExhaustiveDecoder::new(d, &pam, DEFAULT_CODEBOOK_BUDGET)?)
        }
        DecoderKind::Structured => {
            AnyDecoder::Structured(StructuredDecoder::new(d, &pam, &Tolerance::default())?)
        }
    };
    let bits_per_symbol = cfg.q.trailing_zeros() as u64;
    let k = d.k();
    let scale = codebook_scale(d, &pam)?;
    let scaled_weights: Vec<ComplexMatrix> = (0..k)
        .map(|i| pam.scaled_weight(d, i).scale(Complex64::new(scale, 0.0)))
        .collect();
    let points: Vec<Vec<f64>> = (0..k).map(|i| pam.points(i)).collect();

    let mut out = Vec::with_capacity(cfg.snr_db_grid.len());
    for (si, &snr_db) in cfg.snr_db_grid.iter().enumerate() {
        let sigma2 = 10f64.powf(-snr_db / 10.0);
        let (bit_errors, frame_errors) = (0..cfg.trials_per_point)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(cfg.seed, si as u64, trial);
                let tx: Vec<usize> = (0..k)
                    .map(|_| (rand::Rng::random_range(&mut rng, 0..cfg.q as u64)) as usize)
                    .collect();
                let mut x = ComplexMatrix::zeros(d.t(), d.n());
                for (i, &ji) in tx.iter().enumerate() {
                    x = x
                        .add(&scaled_weights[i].scale(Complex64::new(points[i][ji], 0.0)))
                        .expect("same shape");
                }
                let ch = ChannelRealization::sample(d.n(), cfg.n_rx, d.t(), sigma2, &mut rng);
                let y = x.matmul(&ch.h).expect("shapes").add(&ch.w).expect("shapes");
                let rx = decoder.decode(&y, &ch.h).expect("decoder inputs are valid");
                let mut bit_errs = 0u64;
                for (a, b) in tx.iter().zip(&rx) {
                    bit_errs += ((gray(*a) ^ gray(*b)) as u64).count_ones() as u64;
                }
                (bit_errs, u64::from(tx != rx))
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let bits = cfg.trials_per_point * k as u64 * bits_per_symbol;
        out.push(BerPoint {
            snr_db,
            ber: bit_errors as f64 / bits as f64,
            bits,
            bit_errors,
            frame_errors,
            frames: cfg.trials_per_point,
        });
    }
    Ok(out)
}

/// Convenience wrapper over [`ExhaustiveDecoder`].
pub fn decode_exhaustive(
    d: &Design,
    pam: &PamSpec,
    y: &ComplexMatrix,
    h: &ComplexMatrix,
) -> Result<Vec<usize>> {
    ExhaustiveDecoder::new(d, pam, DEFAULT_CODEBOOK_BUDGET)?.decode(y, h)
}

/// Convenience wrapper over [`StructuredDecoder`].
pub fn decode_structured(
    d: &Design,
    pam: &PamSpec,
    y: &ComplexMatrix,
    h: &ComplexMatrix,
) -> Result<Vec<usize>> {
    StructuredDecoder::new(d, pam, &Tolerance::default())?.decode(y, h)
}
