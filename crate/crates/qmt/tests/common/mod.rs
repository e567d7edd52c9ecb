//! Shared test support: an extended-precision naive evaluation of the
//! dangerous term (independent of the grouped production path) and
//! deterministic random-spectrum generators.
#![allow(dead_code)] // each integration test uses a different subset

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmt::dd::{Dd, Real};
use qmt::spectrum::SingularSpectrum;

/// Naive dangerous term summed in double-double arithmetic.
///
/// Same formula as the production naive route but with ~32 significant
/// digits, so it survives the cancellation caused by tightly spaced values.
/// The gap products are exact up to the double-double additions because
/// each squared input is split exactly.
pub fn j_naive_dd(values: &[f64], d: usize) -> f64 {
    let sq: Vec<Dd> = values.iter().map(|&v| Dd::sq_exact(v)).collect();
    let mut total = Dd::ZERO;
    for i in 0..values.len() {
        if values[i] == 0.0 {
            continue;
        }
        let mut denom = Dd::ONE;
        for (k, &sk) in sq.iter().enumerate() {
            if k != i {
                denom = denom * (sq[i] - sk);
            }
        }
        let log2_sq = sq[i].ln() / Dd::ln_2();
        total = total + sq[i].powu(d) * log2_sq / denom;
    }
    total.to_f64()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spectrum with all squared values separated by at least `min_gap`,
/// drawn from [0.05, 1].
pub fn random_distinct_spectrum(d: usize, min_gap: f64, rng: &mut ChaCha8Rng) -> SingularSpectrum {
    loop {
        let mut values: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..=1.0)).collect();
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let distinct = values
            .windows(2)
            .all(|w| w[0] * w[0] - w[1] * w[1] >= min_gap);
        if distinct {
            return SingularSpectrum::new(values).expect("valid random spectrum");
        }
    }
}

/// Random spectrum over [0, 1] without separation constraints (may contain
/// near-degenerate values).
pub fn random_spectrum(d: usize, rng: &mut ChaCha8Rng) -> SingularSpectrum {
    loop {
        let values: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect();
        if let Ok(s) = SingularSpectrum::new(values) {
            return s;
        }
    }
}
