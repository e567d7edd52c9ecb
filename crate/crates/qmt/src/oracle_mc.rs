//! Monte Carlo verification of the closed forms: uniformly random pure
//! states, state-averaged moments, and ratio estimators for the
//! single-outcome quantities.
//!
//! States are sampled by normalizing 2d independent standard normal
//! deviates, which realizes the uniform measure on the unit sphere of the
//! d-dimensional complex Hilbert space. Sampling is chunked; every chunk
//! owns a counter-indexed stream of one seeded generator and chunk totals
//! are merged in chunk order, so results are bit-for-bit reproducible for a
//! given (seed, n) regardless of thread count.

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::accum::CompensatedSum;
use crate::spectrum::SingularSpectrum;

/// Samples per chunk; fixed so the chunk layout (and hence the reduction
/// order) does not depend on thread count.
const CHUNK_SAMPLES: u64 = 1 << 16;

/// Stream index offset separating bootstrap resampling from state sampling.
const BOOTSTRAP_STREAM_BASE: u64 = 1 << 32;

/// Default number of bootstrap resamples.
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 200;

/// How standard errors of the nonlinear estimators are obtained.
///
/// The information estimator is a nonlinear functional of two correlated
/// means; the nonparametric bootstrap handles it without linearization,
/// while the delta method is a fast large-n approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorMethod {
    Delta,
    Bootstrap { resamples: usize },
}

/// A Monte Carlo mean with its standard error and provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Distance from `target` in standard errors; `None` for zero-variance
    /// estimates, which should be compared exactly.
    pub fn z_score(&self, target: f64) -> Option<f64> {
        (self.std_error > 0.0).then(|| (self.mean - target) / self.std_error)
    }
}

/// One pure state: complex amplitudes as (re, im) pairs, unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateSample {
    amplitudes: Vec<(f64, f64)>,
}

impl PureStateSample {
    pub fn amplitudes(&self) -> &[(f64, f64)] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|(re, im)| re * re + im * im).sum()
    }

    /// Outcome-basis probabilities `|c_i|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .map(|(re, im)| re * re + im * im)
            .collect()
    }
}

/// Draws one state uniformly from the unit sphere in 2d real dimensions.
pub fn sample_state(d: usize, rng: &mut impl Rng) -> PureStateSample {
    let mut amplitudes = vec![(0.0, 0.0); d];
    loop {
        let mut norm_sq = 0.0;
        for slot in amplitudes.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *slot = (re, im);
            norm_sq += re * re + im * im;
        }
        if norm_sq > 1e-300 {
            let inv = 1.0 / norm_sq.sqrt();
            for (re, im) in amplitudes.iter_mut() {
                *re *= inv;
                *im *= inv;
            }
            return PureStateSample { amplitudes };
        }
    }
}

fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fills the buffer with standard normals and returns their squared norm,
/// redrawing in the (measure-zero) event of an all-zero draw.
fn fill_unit_gaussians(gauss: &mut [f64], rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let mut norm_sq = 0.0;
        for g in gauss.iter_mut() {
            *g = StandardNormal.sample(rng);
            norm_sq += *g * *g;
        }
        if norm_sq > 1e-300 {
            return norm_sq;
        }
    }
}

/// Index ordering of the per-sample statistics stored by the spectrum pass.
const STAT_Q: usize = 0;
const STAT_QLOGQ: usize = 1;
const STAT_FSQ: usize = 2;
const STAT_QC: usize = 3;

struct SpectrumPass {
    n: u64,
    /// Sums of the four statistics.
    s: [f64; 4],
    /// Sums of their squares.
    s2: [f64; 4],
    /// Sums of products with q (for delta-method covariances).
    sq_cross: [f64; 4],
    /// Per-sample rows, kept only when bootstrapping.
    raw: Option<Vec<[f64; 4]>>,
}

/// One pass over n sampled states, accumulating everything the estimators
/// need. `q` and `f` use the shifted forms
/// `q = min^2 + sum (lambda_i^2 - min^2) p_i` and
/// `f = min + sum (lambda_i - min) p_i`, algebraically identical to the
/// direct sums (the probabilities add to one) but exact for uniform
/// spectra, which is what makes identity-spectrum rows zero-variance.
fn run_spectrum_pass(s: &SingularSpectrum, n: u64, seed: u64, keep_raw: bool) -> SpectrumPass {
    let d = s.dim();
    let lambda: Vec<f64> = s.values().to_vec();
    let lambda_sq: Vec<f64> = lambda.iter().map(|v| v * v).collect();
    let min = s.min_value();
    let min_sq = min * min;
    let n_chunks = n.div_ceil(CHUNK_SAMPLES);

    struct ChunkOut {
        sums: [CompensatedSum; 12],
        raw: Option<Vec<[f64; 4]>>,
    }

    let chunks: Vec<ChunkOut> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, chunk);
            let count = CHUNK_SAMPLES.min(n - chunk * CHUNK_SAMPLES);
            let mut sums = [CompensatedSum::new(); 12];
            let mut raw = keep_raw.then(|| Vec::with_capacity(count as usize));
            let mut gauss = vec![0.0_f64; 2 * d];
            for _ in 0..count {
                let norm_sq = fill_unit_gaussians(&mut gauss, &mut rng);
                let inv = 1.0 / norm_sq;
                let mut q = min_sq;
                let mut f = min;
                let mut p_max = 0.0;
                for i in 0..d {
                    let p = (gauss[2 * i] * gauss[2 * i] + gauss[2 * i + 1] * gauss[2 * i + 1])
                        * inv;
                    if i == 0 {
                        p_max = p;
                    }
                    q += (lambda_sq[i] - min_sq) * p;
                    f += (lambda[i] - min) * p;
                }
                let qlogq = if q > 0.0 { q * q.log2() } else { 0.0 };
                let row = [q, qlogq, f * f, q * p_max];
                for (i, &v) in row.iter().enumerate() {
                    sums[i].add(v);
                    sums[4 + i].add(v * v);
                    sums[8 + i].add(q * v);
                }
                if let Some(store) = raw.as_mut() {
                    store.push(row);
                }
            }
            ChunkOut { sums, raw }
        })
        .collect();

    let mut merged = [CompensatedSum::new(); 12];
    let mut raw = keep_raw.then(|| Vec::with_capacity(n as usize));
    for chunk in &chunks {
        for (into, from) in merged.iter_mut().zip(chunk.sums.iter()) {
            into.merge(from);
        }
        if let (Some(store), Some(part)) = (raw.as_mut(), chunk.raw.as_ref()) {
            store.extend_from_slice(part);
        }
    }
    SpectrumPass {
        n,
        s: [
            merged[0].value(),
            merged[1].value(),
            merged[2].value(),
            merged[3].value(),
        ],
        s2: [
            merged[4].value(),
            merged[5].value(),
            merged[6].value(),
            merged[7].value(),
        ],
        sq_cross: [
            merged[8].value(),
            merged[9].value(),
            merged[10].value(),
            merged[11].value(),
        ],
        raw,
    }
}

impl SpectrumPass {
    fn mean(&self, stat: usize) -> f64 {
        self.s[stat] / self.n as f64
    }

    /// Sample variance of one statistic.
    fn variance(&self, stat: usize) -> f64 {
        let n = self.n as f64;
        let mean = self.mean(stat);
        ((self.s2[stat] / n - mean * mean) * n / (n - 1.0)).max(0.0)
    }

    /// Sample covariance of a statistic with q.
    fn covariance_with_q(&self, stat: usize) -> f64 {
        let n = self.n as f64;
        (self.sq_cross[stat] / n - self.mean(stat) * self.mean(STAT_Q)) * n / (n - 1.0)
    }

    fn mean_estimate(&self, stat: usize, seed: u64) -> McEstimate {
        McEstimate {
            mean: self.mean(stat),
            std_error: (self.variance(stat) / self.n as f64).sqrt(),
            n_samples: self.n,
            seed,
        }
    }
}

/// State-averaged moments of one spectrum: `mean q`, `mean q log2 q`, and
/// `mean f^2`, with plain standard errors.
///
/// Targets: `sigma^2/d`, [`crate::quantities::mean_q_log2_q`], and
/// `(sigma^2 + tau^2)/(d(d+1))`.
#[derive(Clone, Copy, Debug)]
pub struct McAverages {
    pub q: McEstimate,
    pub q_log2_q: McEstimate,
    pub f_sq: McEstimate,
}

pub fn mc_averages(s: &SingularSpectrum, n: u64, seed: u64) -> McAverages {
    let pass = run_spectrum_pass(s, n, seed, false);
    McAverages {
        q: pass.mean_estimate(STAT_Q, seed),
        q_log2_q: pass.mean_estimate(STAT_QLOGQ, seed),
        f_sq: pass.mean_estimate(STAT_FSQ, seed),
    }
}

/// Monte Carlo estimates of the appendix moment constants: the second
/// moment `|c_1|^2` (target `1/d`), fourth moment `|c_1|^4` (target
/// `2/(d(d+1))`), and the cross moment `|c_1|^2 |c_2|^2` (target
/// `1/(d(d+1))`).
#[derive(Clone, Copy, Debug)]
pub struct MomentConstants {
    pub second: McEstimate,
    pub fourth: McEstimate,
    pub cross: McEstimate,
}

pub fn moment_constants(d: usize, n: u64, seed: u64) -> MomentConstants {
    let n_chunks = n.div_ceil(CHUNK_SAMPLES);
    let chunks: Vec<[CompensatedSum; 5]> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, chunk);
            let count = CHUNK_SAMPLES.min(n - chunk * CHUNK_SAMPLES);
            let mut sums = [CompensatedSum::new(); 5];
            let mut gauss = vec![0.0_f64; 2 * d];
            for _ in 0..count {
                let norm_sq = fill_unit_gaussians(&mut gauss, &mut rng);
                let inv = 1.0 / norm_sq;
                let p1 = (gauss[0] * gauss[0] + gauss[1] * gauss[1]) * inv;
                let p2 = (gauss[2] * gauss[2] + gauss[3] * gauss[3]) * inv;
                let cross = p1 * p2;
                sums[0].add(p1);
                sums[1].add(p1 * p1);
                sums[2].add(p1 * p1 * p1 * p1);
                sums[3].add(cross);
                sums[4].add(cross * cross);
            }
            sums
        })
        .collect();
    let mut merged = [CompensatedSum::new(); 5];
    for chunk in &chunks {
        for (into, from) in merged.iter_mut().zip(chunk.iter()) {
            into.merge(from);
        }
    }
    let nf = n as f64;
    let estimate = |sum: f64, sum_sq: f64| {
        let mean = sum / nf;
        let var = ((sum_sq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
        McEstimate {
            mean,
            std_error: (var / nf).sqrt(),
            n_samples: n,
            seed,
        }
    };
    MomentConstants {
        second: estimate(merged[0].value(), merged[1].value()),
        fourth: estimate(merged[1].value(), merged[2].value()),
        cross: estimate(merged[3].value(), merged[4].value()),
    }
}

/// Ratio estimators for the single-outcome quantities.
///
/// With posterior weight proportional to q, conditional averages reduce to
/// `mean[q X] / mean[q]`:
/// `I = (mean[q log2 q] - mean[q] log2 mean[q]) / mean[q]`,
/// `F = mean[f^2] / mean[q]`, `R = lambda_min^2 / mean[q]`, and
/// `G = mean[q |c_max|^2] / mean[q]`.
#[derive(Clone, Copy, Debug)]
pub struct McQuantities {
    pub information: McEstimate,
    pub fidelity: McEstimate,
    pub reversibility: McEstimate,
    pub estimation_fidelity: McEstimate,
}

pub fn mc_quantities(
    s: &SingularSpectrum,
    n: u64,
    seed: u64,
    method: ErrorMethod,
) -> McQuantities {
    let keep_raw = matches!(method, ErrorMethod::Bootstrap { .. });
    let pass = run_spectrum_pass(s, n, seed, keep_raw);
    let min = s.min_value();
    let min_sq = min * min;
    let nf = n as f64;

    let mean_q = pass.mean(STAT_Q);
    let info = ratio_information(pass.mean(STAT_QLOGQ), mean_q);
    let fid = pass.mean(STAT_FSQ) / mean_q;
    let rev = min_sq / mean_q;
    let est = pass.mean(STAT_QC) / mean_q;

    let (se_info, se_fid, se_rev, se_est) = match method {
        ErrorMethod::Delta => {
            let var_q = pass.variance(STAT_Q);
            // information: gradient (1/B, -A/B^2 - 1/(B ln 2)) over (A, B)
            let a = pass.mean(STAT_QLOGQ);
            let ga = 1.0 / mean_q;
            let gb = -a / (mean_q * mean_q) - 1.0 / (mean_q * std::f64::consts::LN_2);
            let var_info = ga * ga * pass.variance(STAT_QLOGQ)
                + 2.0 * ga * gb * pass.covariance_with_q(STAT_QLOGQ)
                + gb * gb * var_q;
            let se_ratio = |stat: usize, theta: f64| {
                let var = pass.variance(stat) - 2.0 * theta * pass.covariance_with_q(stat)
                    + theta * theta * var_q;
                (var.max(0.0) / nf).sqrt() / mean_q
            };
            let se_rev = min_sq * (var_q / nf).sqrt() / (mean_q * mean_q);
            (
                (var_info.max(0.0) / nf).sqrt(),
                se_ratio(STAT_FSQ, fid),
                se_rev,
                se_ratio(STAT_QC, est),
            )
        }
        ErrorMethod::Bootstrap { resamples } => {
            let raw = pass.raw.as_deref().expect("raw rows kept for bootstrap");
            bootstrap_errors(raw, seed, resamples, min_sq)
        }
    };

    let wrap = |mean: f64, std_error: f64| McEstimate {
        mean,
        std_error,
        n_samples: n,
        seed,
    };
    McQuantities {
        information: wrap(info, se_info),
        fidelity: wrap(fid, se_fid),
        reversibility: if min_sq == 0.0 {
            // exactly irreversible; no sampling noise
            wrap(0.0, 0.0)
        } else {
            wrap(rev, se_rev)
        },
        estimation_fidelity: wrap(est, se_est),
    }
}

fn ratio_information(mean_qlogq: f64, mean_q: f64) -> f64 {
    (mean_qlogq - mean_q * mean_q.log2()) / mean_q
}

/// Nonparametric bootstrap over the stored per-sample rows. Resample b
/// draws its indices from stream `BOOTSTRAP_STREAM_BASE + b` of the same
/// seed, so results stay reproducible and independent of the state streams.
fn bootstrap_errors(
    raw: &[[f64; 4]],
    seed: u64,
    resamples: usize,
    min_sq: f64,
) -> (f64, f64, f64, f64) {
    let n = raw.len();
    let replicates: Vec<[f64; 4]> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = chunk_rng(seed, BOOTSTRAP_STREAM_BASE + b as u64);
            let mut sums = [0.0_f64; 4];
            for _ in 0..n {
                let row = &raw[rng.gen_range(0..n)];
                for (acc, v) in sums.iter_mut().zip(row.iter()) {
                    *acc += v;
                }
            }
            let mean_q = sums[STAT_Q] / n as f64;
            [
                ratio_information(sums[STAT_QLOGQ] / n as f64, mean_q),
                sums[STAT_FSQ] / n as f64 / mean_q,
                min_sq / mean_q,
                sums[STAT_QC] / n as f64 / mean_q,
            ]
        })
        .collect();
    let mut out = [0.0_f64; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        let mean = replicates.iter().map(|r| r[i]).sum::<f64>() / resamples as f64;
        let var = replicates
            .iter()
            .map(|r| (r[i] - mean) * (r[i] - mean))
            .sum::<f64>()
            / (resamples as f64 - 1.0);
        *slot = var.sqrt();
    }
    (out[0], out[1], out[2], out[3])
}
