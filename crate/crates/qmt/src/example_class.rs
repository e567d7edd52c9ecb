//! The (k, l, lambda) measurement family: k unit singular values, l values
//! equal to lambda, and d-k-l zeros, plus projective measurements and the
//! near-identity expansion.
//!
//! The family's information gain has a closed form whose two finite sums
//! develop huge cancelling terms as lambda approaches 1 (the groups merge).
//! Direct evaluation is used away from that point; close to it the dangerous
//! term is summed as a power series in `eps = 1 - lambda^2`, whose regular
//! part carries the whole finite value.

use crate::coefficients::{a_coeff_g, binomial, c_coeff_sq_g};
use crate::error::{Error, Result};
use crate::quantities::{info_upper_bound, OutcomeReport};
use crate::spectrum::SingularSpectrum;

/// Switch from direct summation to the eps-series when
/// `eps = 1 - lambda^2` drops below this (lambda above 0.75).
const SERIES_EPS_SWITCH: f64 = 0.4375;

/// Series order; at the switch point the tail is below 1e-34 of the lead.
const SERIES_TERMS: usize = 96;

/// Parameters of the family: dimension d, k unit values, l values of
/// lambda in (0, 1), and d-k-l zeros.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExampleParams {
    d: usize,
    k: usize,
    l: usize,
    lambda: f64,
}

impl ExampleParams {
    pub fn new(d: usize, k: usize, l: usize, lambda: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadParams(format!("dimension {d} below 2")));
        }
        if k == 0 || k > d - 1 {
            return Err(Error::BadParams(format!("k = {k} outside 1..={}", d - 1)));
        }
        if l == 0 || l > d - k {
            return Err(Error::BadParams(format!("l = {l} outside 1..={}", d - k)));
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::BadParams(format!(
                "lambda = {lambda} outside the open interval (0, 1); the endpoints are projective measurements"
            )));
        }
        Ok(ExampleParams { d, k, l, lambda })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn l(&self) -> usize {
        self.l
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Squared Hilbert-Schmidt norm `k + l lambda^2`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.k as f64 + self.l as f64 * self.lambda * self.lambda
    }
}

/// The family's spectrum, sorted descending.
pub fn spectrum_of(p: &ExampleParams) -> SingularSpectrum {
    let mut values = Vec::with_capacity(p.d);
    values.extend(std::iter::repeat(1.0).take(p.k));
    values.extend(std::iter::repeat(p.lambda).take(p.l));
    values.extend(std::iter::repeat(0.0).take(p.d - p.k - p.l));
    SingularSpectrum::new(values).expect("family spectrum is valid by construction")
}

fn binom0(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        0.0
    } else {
        binomial(n as usize, k as usize)
    }
}

/// Dangerous term of the family by direct summation of the two finite sums.
fn j_example_direct(k: usize, l: usize, lambda: f64) -> f64 {
    let kk = k as i64;
    let ll = l as i64;
    let big_k = k + l;
    let lam_sq = lambda * lambda;
    let sign_l = if l % 2 == 0 { 1.0 } else { -1.0 };
    let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut j1 = 0.0;
    for n in 0..k {
        j1 += binom0(kk + ll - n as i64 - 2, ll - 1) * a_coeff_g::<f64>(big_k, n)
            / (lam_sq - 1.0).powi((big_k - n - 1) as i32);
    }
    let mut j2 = 0.0;
    for n in 0..l {
        j2 += binom0(kk + ll - n as i64 - 2, kk - 1) * c_coeff_sq_g::<f64>(big_k, n, lam_sq)
            / (1.0 - lam_sq).powi((big_k - n - 1) as i32);
    }
    sign_l * j1 + sign_k * j2
}

/// Dangerous term of the family as a series in `eps = 1 - lambda^2`.
///
/// Each numerator coefficient expands as
/// `(1 - eps)^{K-n} [a_n - C(K, n) L(eps)]` with
/// `L(eps) = -log2(1 - eps) = (1/ln2) sum eps^m / m`; dividing by
/// `eps^{K-n-1}` shifts the series down. Negative powers cancel against the
/// first sum, so only the regular part is accumulated.
fn j_example_series(k: usize, l: usize, eps: f64) -> f64 {
    let big_k = k + l;
    let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
    let ln2 = std::f64::consts::LN_2;
    let order = SERIES_TERMS + big_k;
    let mut g = [0.0; SERIES_TERMS];
    let mut gamma = vec![0.0; order + 1];
    for n in 0..l {
        let kn = big_k - n;
        // gamma_j of (1-eps)^{K-n} * [a_n - C(K,n)/ln2 * sum eps^m/m]
        let a_n = a_coeff_g::<f64>(big_k, n);
        let log_scale = binomial(big_k, n) / ln2;
        for (j, slot) in gamma.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..=j.min(kn) {
                let poly = binomial(kn, i) * if i % 2 == 0 { 1.0 } else { -1.0 };
                let series = if j == i {
                    a_n
                } else {
                    -log_scale / (j - i) as f64
                };
                acc += poly * series;
            }
            *slot = acc;
        }
        let prefactor = sign_k * binom0((big_k - n) as i64 - 2, k as i64 - 1);
        let offset = big_k - n - 1;
        for (p, slot) in g.iter_mut().enumerate() {
            *slot += prefactor * gamma[p + offset];
        }
    }
    let mut acc = 0.0;
    for &coeff in g.iter().rev() {
        acc = acc * eps + coeff;
    }
    acc
}

fn j_example(k: usize, l: usize, lambda: f64) -> f64 {
    let eps = 1.0 - lambda * lambda;
    if eps >= SERIES_EPS_SWITCH {
        j_example_direct(k, l, lambda)
    } else {
        j_example_series(k, l, eps)
    }
}

/// Closed-form information gain of the family, in bits. Agrees with
/// [`crate::quantities::information`] on [`spectrum_of`].
pub fn information_ex(p: &ExampleParams) -> f64 {
    let sigma_sq = p.hs_norm_sq();
    info_upper_bound(p.d) - sigma_sq.log2() + j_example(p.k, p.l, p.lambda) / sigma_sq
}

/// Closed-form fidelity
/// `[k(k+1) + 2kl lambda + l(l+1) lambda^2] / ((d+1)(k + l lambda^2))`.
pub fn fidelity_ex(p: &ExampleParams) -> f64 {
    let (k, l, lam) = (p.k as f64, p.l as f64, p.lambda);
    let numer = k * (k + 1.0) + 2.0 * k * l * lam + l * (l + 1.0) * lam * lam;
    numer / ((p.d as f64 + 1.0) * p.hs_norm_sq())
}

/// Closed-form reversibility: `d lambda^2 / (k + l lambda^2)` when the
/// family has no zero values (k + l = d), zero otherwise.
pub fn reversibility_ex(p: &ExampleParams) -> f64 {
    if p.k + p.l == p.d {
        p.d as f64 * p.lambda * p.lambda / p.hs_norm_sq()
    } else {
        0.0
    }
}

/// Closed-form information of the rank-r projective measurement:
/// `log2(d/r) - [eta(d) - eta(r)] / ln 2`.
pub fn projective_information(d: usize, r: usize) -> Result<f64> {
    if r == 0 || r > d {
        return Err(Error::RankOutOfRange { rank: r, dim: d });
    }
    let eta_diff = crate::coefficients::eta(d)? - crate::coefficients::eta(r)?;
    Ok((d as f64 / r as f64).log2() - eta_diff / std::f64::consts::LN_2)
}

/// Full report of the projective measurement with r unit singular values,
/// computed through the generic machinery on the rank-r spectrum.
pub fn projective(d: usize, r: usize) -> Result<OutcomeReport> {
    if r == 0 || r > d || d < 2 {
        return Err(Error::RankOutOfRange { rank: r, dim: d });
    }
    let mut values = vec![0.0; d];
    values[..r].fill(1.0);
    let s = SingularSpectrum::new(values).expect("projective spectrum is valid");
    Ok(OutcomeReport::from_spectrum(&s))
}

/// Leading expansion coefficients of the family at `(k, l) = (d-1, 1)`
/// around the identity, in powers of `eps = 1 - lambda^2`:
///
/// * information `I ~ i2 * eps^2`,
/// * fidelity `F ~ 1 - f2 * eps^2`,
/// * reversibility `R ~ 1 - r1 * eps - r2 * eps^2`.
///
/// The efficiency limits at the identity follow:
/// `E_F -> i2/f2 = 2/(d ln 2)` and `E_R -> 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityExpansion {
    pub info_quadratic: f64,
    pub fidelity_quadratic: f64,
    pub reversibility_linear: f64,
    pub reversibility_quadratic: f64,
}

impl IdentityExpansion {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadParams(format!("dimension {d} below 2")));
        }
        let df = d as f64;
        Ok(IdentityExpansion {
            info_quadratic: (df - 1.0) / (2.0 * df * df * (df + 1.0) * std::f64::consts::LN_2),
            fidelity_quadratic: (df - 1.0) / (4.0 * df * (df + 1.0)),
            reversibility_linear: (df - 1.0) / df,
            reversibility_quadratic: (df - 1.0) / (df * df),
        })
    }

    pub fn information(&self, eps: f64) -> f64 {
        self.info_quadratic * eps * eps
    }

    pub fn fidelity(&self, eps: f64) -> f64 {
        1.0 - self.fidelity_quadratic * eps * eps
    }

    pub fn reversibility(&self, eps: f64) -> f64 {
        1.0 - self.reversibility_linear * eps - self.reversibility_quadratic * eps * eps
    }

    /// Limit of `E_F` at the identity: `2 / (d ln 2)`.
    pub fn eff_fidelity_limit(d: usize) -> f64 {
        2.0 / (d as f64 * std::f64::consts::LN_2)
    }

    /// Limit of `E_R` at the identity.
    pub fn eff_reversibility_limit() -> f64 {
        0.0
    }
}
