//! The dangerous term J and the single-outcome quantities built on it:
//! information gain, operation fidelity, physical reversibility, estimation
//! fidelity, and the subentropy-like spectral term, plus their averages
//! over a complete measurement set.
//!
//! Two routes compute J. The naive sum over distinct singular values is the
//! oracle; it refuses spectra with near-degenerate squared values. The
//! grouped route expands each degeneracy group with the series coefficients
//! from [`crate::coefficients`] and needs no limit operations. When distinct
//! group values lie close enough that the grouped terms cancel badly in
//! double precision, the evaluation silently reruns in double-double.

use crate::coefficients::{c_coeff_sq_g, factorial_g, h_coeff_g, harmonic_g};
use crate::dd::{Dd, Real};
use crate::error::{Error, Result};
use crate::spectrum::{MeasurementSet, SingularSpectrum, SpectrumGroups, COMPLETENESS_REL_TOL};

/// The naive route refuses spectra whose minimal squared gap between
/// distinct nonzero values falls below this fraction of sigma^2.
pub const NAIVE_GAP_REL_TOL: f64 = 1e-6;

/// Rerun the grouped evaluation in double-double when the largest per-group
/// term exceeds the total by this factor (a proxy for cancelled digits).
const ESCALATION_RATIO: f64 = 1e3;

/// Dimension-only part of the information bound:
/// `log2(d) - [eta(d) - 1] / ln 2`. Information and the subentropy-like
/// term of one spectrum always sum to this value.
pub fn info_upper_bound(d: usize) -> f64 {
    (d as f64).log2() - (harmonic_g::<f64>(d) - 1.0) / std::f64::consts::LN_2
}

/// Naive dangerous term
/// `J = sum_i lambda_i^{2d} log2(lambda_i^2) / prod_{k != i}(lambda_i^2 - lambda_k^2)`.
///
/// Zero singular values are skipped; their limiting contribution vanishes.
/// Fails with [`Error::DegenerateSpectrum`] when distinct values are too
/// close for the products to be trustworthy — use [`j_grouped`] instead.
pub fn j_naive(s: &SingularSpectrum) -> Result<f64> {
    let sq: Vec<f64> = s.values().iter().map(|v| v * v).collect();
    let sigma_sq = s.hs_norm_sq();
    let threshold = NAIVE_GAP_REL_TOL * sigma_sq;
    let nonzero: Vec<usize> = (0..sq.len()).filter(|&i| sq[i] > 0.0).collect();
    for (a, &i) in nonzero.iter().enumerate() {
        for &k in &nonzero[a + 1..] {
            let gap = (sq[i] - sq[k]).abs();
            if gap < threshold {
                return Err(Error::DegenerateSpectrum { gap, threshold });
            }
        }
    }
    let d = s.dim();
    let mut total = 0.0;
    for &i in &nonzero {
        let mut denom = 1.0;
        for k in 0..sq.len() {
            if k != i {
                denom *= sq[i] - sq[k];
            }
        }
        total += sq[i].powi(d as i32) * sq[i].log2() / denom;
    }
    Ok(total)
}

fn group_arrays(g: &SpectrumGroups) -> (Vec<f64>, Vec<usize>) {
    let values: Vec<f64> = g.groups().iter().map(|gr| gr.value).collect();
    let mult: Vec<usize> = g.groups().iter().map(|gr| gr.multiplicity).collect();
    (values, mult)
}

/// Per-group contributions J_s of the grouped dangerous term.
///
/// Group s contributes
/// `[prod_{r != s}(g_s - g_r)^{n_r}]^{-1} sum_{n=0}^{n_s-1} c_n(g_s) b_{n_s-1-n}`
/// with g the squared group values; zero-valued groups contribute nothing.
pub fn j_grouped_terms(g: &SpectrumGroups, d: usize) -> Vec<f64> {
    let (values, mult) = group_arrays(g);
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let (terms, bound) = j_terms_generic::<f64>(&sq, &mult, d);
    let total: f64 = terms.iter().sum();
    if bound > ESCALATION_RATIO * total.abs().max(f64::MIN_POSITIVE) {
        let sq_dd: Vec<Dd> = values.iter().map(|&v| Dd::sq_exact(v)).collect();
        return j_terms_generic::<Dd>(&sq_dd, &mult, d)
            .0
            .into_iter()
            .map(|t| t.to_f64())
            .collect();
    }
    terms
}

/// Grouped dangerous term, free from apparent divergences: the sum of
/// [`j_grouped_terms`]. For an all-distinct grouping it equals [`j_naive`].
pub fn j_grouped(g: &SpectrumGroups, d: usize) -> f64 {
    let (values, mult) = group_arrays(g);
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let (terms, bound) = j_terms_generic::<f64>(&sq, &mult, d);
    let total: f64 = terms.iter().sum();
    if bound > ESCALATION_RATIO * total.abs().max(f64::MIN_POSITIVE) {
        let sq_dd: Vec<Dd> = values.iter().map(|&v| Dd::sq_exact(v)).collect();
        let (terms, _) = j_terms_generic::<Dd>(&sq_dd, &mult, d);
        let mut acc = Dd::ZERO;
        for t in terms {
            acc = acc + t;
        }
        return acc.to_f64();
    }
    total
}

/// Evaluates every per-group term along with a bound on the magnitudes
/// flowing through the evaluation: the same recurrences run on absolute
/// values. The bound over the final total estimates how many digits the
/// cancellations consumed, both across groups and inside each group's sum.
fn j_terms_generic<T: Real>(sq: &[T], mult: &[usize], d: usize) -> (Vec<T>, T) {
    let mut terms = Vec::with_capacity(sq.len());
    let mut bound = T::ZERO;
    for s in 0..sq.len() {
        if !(sq[s] > T::ZERO) {
            terms.push(T::ZERO);
            continue;
        }
        let ns = mult[s];
        // b_0 .. b_{ns-1} from the Bell recurrence over the h coefficients
        let hs: Vec<T> = (1..ns).map(|n| h_coeff_g::<T>(sq, mult, s, n)).collect();
        let hs_abs: Vec<T> = hs.iter().map(|h| h.abs()).collect();
        let mut bell: Vec<T> = Vec::with_capacity(ns);
        let mut bell_abs: Vec<T> = Vec::with_capacity(ns);
        bell.push(T::ONE);
        bell_abs.push(T::ONE);
        for m in 0..ns.saturating_sub(1) {
            let mut acc = T::ZERO;
            let mut acc_abs = T::ZERO;
            let mut binom = T::ONE; // C(m, k) built incrementally
            for k in 0..=m {
                acc = acc + binom * bell[m - k] * hs[k];
                acc_abs = acc_abs + binom * bell_abs[m - k] * hs_abs[k];
                binom = binom * T::from_usize(m - k) / T::from_usize(k + 1);
            }
            bell.push(acc);
            bell_abs.push(acc_abs);
        }
        let mut denom = T::ONE;
        for r in 0..sq.len() {
            if r != s {
                denom = denom * (sq[s] - sq[r]).powu(mult[r]);
            }
        }
        let denom_abs = denom.abs();
        let mut sum = T::ZERO;
        let mut sum_abs = T::ZERO;
        for n in 0..ns {
            let c = c_coeff_sq_g::<T>(d, n, sq[s]);
            let fact = factorial_g::<T>(ns - 1 - n);
            sum = sum + c * (bell[ns - 1 - n] / fact);
            sum_abs = sum_abs + c.abs() * (bell_abs[ns - 1 - n] / fact);
        }
        terms.push(sum / denom);
        bound = bound + sum_abs / denom_abs;
    }
    (terms, bound)
}

fn j_with_tol(s: &SingularSpectrum, group_rel_tol: f64) -> f64 {
    j_grouped(&s.group(group_rel_tol), s.dim())
}

fn j_default(s: &SingularSpectrum) -> f64 {
    j_grouped(&s.group_default(), s.dim())
}

/// Information gain of the outcome, in bits:
/// `log2(d) - [eta(d)-1]/ln2 - log2(sigma^2) + J / sigma^2`.
///
/// Always routed through the grouped evaluator. Nonnegative; zero exactly
/// when all singular values are equal.
pub fn information(s: &SingularSpectrum) -> f64 {
    information_with_group_tol(s, crate::spectrum::GROUP_REL_TOL)
}

/// [`information`] with an explicit degeneracy-grouping tolerance.
pub fn information_with_group_tol(s: &SingularSpectrum, group_rel_tol: f64) -> f64 {
    let sigma_sq = s.hs_norm_sq();
    let value =
        info_upper_bound(s.dim()) - sigma_sq.log2() + j_with_tol(s, group_rel_tol) / sigma_sq;
    // the formula is nonnegative; snap rounding residue at the identity
    if value < 0.0 && value > -1e-9 {
        0.0
    } else {
        value
    }
}

/// Spectrum-dependent part of the information:
/// `Q = log2(sigma^2) - J / sigma^2`, in bits. Lies between 0 (one nonzero
/// value) and `info_upper_bound(d)` (all values equal).
pub fn subentropy_q(s: &SingularSpectrum) -> f64 {
    subentropy_q_with_group_tol(s, crate::spectrum::GROUP_REL_TOL)
}

/// [`subentropy_q`] with an explicit degeneracy-grouping tolerance.
pub fn subentropy_q_with_group_tol(s: &SingularSpectrum, group_rel_tol: f64) -> f64 {
    let sigma_sq = s.hs_norm_sq();
    sigma_sq.log2() - j_with_tol(s, group_rel_tol) / sigma_sq
}

/// Operation fidelity `F = (sigma^2 + tau^2) / ((d+1) sigma^2)`.
pub fn fidelity(s: &SingularSpectrum) -> f64 {
    let sigma_sq = s.hs_norm_sq();
    let tau = s.trace_norm();
    (sigma_sq + tau * tau) / ((s.dim() as f64 + 1.0) * sigma_sq)
}

/// Physical reversibility `R = d * lambda_min^2 / sigma^2`: the maximal
/// success probability of a reversing measurement, averaged over posteriors.
pub fn reversibility(s: &SingularSpectrum) -> f64 {
    let min = s.min_value();
    s.dim() as f64 * min * min / s.hs_norm_sq()
}

/// Estimation fidelity `G = (sigma^2 + lambda_max^2) / ((d+1) sigma^2)` of
/// the optimal single-state guess.
pub fn estimation_fidelity(s: &SingularSpectrum) -> f64 {
    let sigma_sq = s.hs_norm_sq();
    let max = s.max_value();
    (sigma_sq + max * max) / ((s.dim() as f64 + 1.0) * sigma_sq)
}

/// Closed-form mean of `q` over uniformly random pure states: `sigma^2 / d`.
pub fn mean_q(s: &SingularSpectrum) -> f64 {
    s.hs_norm_sq() / s.dim() as f64
}

/// Closed-form mean of `q log2 q`:
/// `[J - sigma^2 (eta(d)-1)/ln2] / d`.
pub fn mean_q_log2_q(s: &SingularSpectrum) -> f64 {
    let d = s.dim();
    (j_default(s) - s.hs_norm_sq() * (harmonic_g::<f64>(d) - 1.0) / std::f64::consts::LN_2)
        / d as f64
}

/// Closed-form mean of the squared overlap `f^2`:
/// `(sigma^2 + tau^2) / (d (d+1))`.
pub fn mean_f_sq(s: &SingularSpectrum) -> f64 {
    let d = s.dim() as f64;
    let tau = s.trace_norm();
    (s.hs_norm_sq() + tau * tau) / (d * (d + 1.0))
}

/// Every single-outcome quantity of one spectrum.
///
/// The efficiencies are `None` where their denominators vanish (the
/// identity operation); consumers print the analytic limits instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutcomeReport {
    pub dim: usize,
    pub sigma_sq: f64,
    pub tau: f64,
    pub info_bits: f64,
    pub fidelity: f64,
    pub reversibility: f64,
    pub estimation_fidelity: f64,
    pub subentropy_q: f64,
    pub eff_fidelity: Option<f64>,
    pub eff_reversibility: Option<f64>,
}

impl OutcomeReport {
    pub fn from_spectrum(s: &SingularSpectrum) -> Self {
        Self::with_group_tol(s, crate::spectrum::GROUP_REL_TOL)
    }

    pub fn with_group_tol(s: &SingularSpectrum, group_rel_tol: f64) -> Self {
        let dim = s.dim();
        let sigma_sq = s.hs_norm_sq();
        let tau = s.trace_norm();
        if s.is_uniform() {
            // uniform spectra are the identity operation up to rescaling;
            // every quantity is known exactly
            return OutcomeReport {
                dim,
                sigma_sq,
                tau,
                info_bits: 0.0,
                fidelity: 1.0,
                reversibility: 1.0,
                estimation_fidelity: 1.0 / dim as f64,
                subentropy_q: info_upper_bound(dim),
                eff_fidelity: None,
                eff_reversibility: None,
            };
        }
        let info_bits = information_with_group_tol(s, group_rel_tol);
        let fid = fidelity(s);
        let rev = reversibility(s);
        let mut report = OutcomeReport {
            dim,
            sigma_sq,
            tau,
            info_bits,
            fidelity: fid,
            reversibility: rev,
            estimation_fidelity: estimation_fidelity(s),
            subentropy_q: subentropy_q_with_group_tol(s, group_rel_tol),
            eff_fidelity: None,
            eff_reversibility: None,
        };
        let (ef, er) = efficiencies(&report);
        report.eff_fidelity = ef;
        report.eff_reversibility = er;
        report
    }
}

/// Measurement efficiencies `E_F = I/(1-F)` and `E_R = I/(1-R)`.
///
/// Undefined (`None`) where fidelity or reversibility equals one. For the
/// identity spectrum the analytic limits are `2/(d ln 2)` and `0`; see
/// [`crate::example_class::IdentityExpansion`].
pub fn efficiencies(rep: &OutcomeReport) -> (Option<f64>, Option<f64>) {
    let ef = (rep.fidelity < 1.0).then(|| rep.info_bits / (1.0 - rep.fidelity));
    let er = (rep.reversibility < 1.0).then(|| rep.info_bits / (1.0 - rep.reversibility));
    (ef, er)
}

/// Outcome-averaged quantities of a complete measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AverageReport {
    /// Mutual information between the state label and the outcome, in bits.
    pub mutual_info_bits: f64,
    /// Mean operation fidelity.
    pub mean_fidelity: f64,
    /// Mean reversibility `sum_m lambda_{m,min}^2`.
    pub mean_reversibility: f64,
    /// Mean estimation fidelity.
    pub mean_estimation: f64,
}

/// Averages over outcomes with the default completeness tolerance
/// `d * `[`COMPLETENESS_REL_TOL`].
pub fn averages(set: &MeasurementSet) -> Result<AverageReport> {
    averages_with_tolerance(set, set.dim() as f64 * COMPLETENESS_REL_TOL)
}

/// Averages over outcomes, computed from the closed-form sums rather than
/// the probability-weighted single-outcome quantities (the two agree; the
/// closed forms avoid compounding division error).
pub fn averages_with_tolerance(set: &MeasurementSet, tolerance: f64) -> Result<AverageReport> {
    averages_with(set, tolerance, crate::spectrum::GROUP_REL_TOL)
}

/// [`averages_with_tolerance`] with an explicit grouping tolerance.
pub fn averages_with(
    set: &MeasurementSet,
    tolerance: f64,
    group_rel_tol: f64,
) -> Result<AverageReport> {
    let defect = set.completeness_defect();
    if defect > tolerance {
        return Err(Error::IncompleteSet { defect, tolerance });
    }
    let d = set.dim() as f64;
    let mut info_sum = 0.0;
    let mut tau_sq_sum = 0.0;
    let mut min_sq_sum = 0.0;
    let mut max_sq_sum = 0.0;
    for s in set.outcomes() {
        let sigma_sq = s.hs_norm_sq();
        let j = j_with_tol(s, group_rel_tol);
        info_sum += sigma_sq * sigma_sq.log2() - j;
        let tau = s.trace_norm();
        tau_sq_sum += tau * tau;
        min_sq_sum += s.min_value() * s.min_value();
        max_sq_sum += s.max_value() * s.max_value();
    }
    Ok(AverageReport {
        mutual_info_bits: info_upper_bound(set.dim()) - info_sum / d,
        mean_fidelity: (d + tau_sq_sum) / (d * (d + 1.0)),
        mean_reversibility: min_sq_sum,
        mean_estimation: (d + max_sq_sum) / (d * (d + 1.0)),
    })
}
