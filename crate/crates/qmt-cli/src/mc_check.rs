//! Monte Carlo verification: compare sampled estimates against the closed
//! forms and report a z-score per target.

use qmt::example_class::{spectrum_of, ExampleParams};
use qmt::oracle_mc::{mc_averages, mc_quantities, moment_constants, ErrorMethod, McEstimate};
use qmt::quantities;
use qmt::spectrum::SingularSpectrum;

use crate::output::fmt_sci;

/// Pass when |z| stays below this.
pub const Z_LIMIT: f64 = 4.0;

/// Zero-variance rows are exact; allow only rounding noise.
pub const EXACT_TOL: f64 = 1e-10;

pub struct CheckRow {
    pub subject: String,
    pub quantity: &'static str,
    pub target: f64,
    pub estimate: McEstimate,
}

pub enum RowStatus {
    Ok(f64),
    Exact,
    Fail(Option<f64>),
}

impl CheckRow {
    pub fn status(&self) -> RowStatus {
        match self.estimate.z_score(self.target) {
            Some(z) if z.abs() <= Z_LIMIT => RowStatus::Ok(z),
            Some(z) => RowStatus::Fail(Some(z)),
            None => {
                if (self.estimate.mean - self.target).abs() <= EXACT_TOL {
                    RowStatus::Exact
                } else {
                    RowStatus::Fail(None)
                }
            }
        }
    }
}

/// All comparisons for one spectrum: the three state-averaged moments and
/// the four outcome quantities.
pub fn check_spectrum(
    label: &str,
    s: &SingularSpectrum,
    n: u64,
    seed: u64,
) -> Vec<CheckRow> {
    let avg = mc_averages(s, n, seed);
    let q = mc_quantities(s, n, seed, ErrorMethod::Delta);
    let row = |quantity: &'static str, target: f64, estimate: McEstimate| CheckRow {
        subject: label.to_string(),
        quantity,
        target,
        estimate,
    };
    vec![
        row("mean_q", quantities::mean_q(s), avg.q),
        row("mean_q_log2_q", quantities::mean_q_log2_q(s), avg.q_log2_q),
        row("mean_f_sq", quantities::mean_f_sq(s), avg.f_sq),
        row("information", quantities::information(s), q.information),
        row("fidelity", quantities::fidelity(s), q.fidelity),
        row("reversibility", quantities::reversibility(s), q.reversibility),
        row(
            "estimation_fidelity",
            quantities::estimation_fidelity(s),
            q.estimation_fidelity,
        ),
    ]
}

/// Appendix-constant comparisons for one dimension.
pub fn check_constants(d: usize, n: u64, seed: u64) -> Vec<CheckRow> {
    let m = moment_constants(d, n, seed);
    let df = d as f64;
    let label = format!("d={d} moments");
    vec![
        CheckRow {
            subject: label.clone(),
            quantity: "second_moment",
            target: 1.0 / df,
            estimate: m.second,
        },
        CheckRow {
            subject: label.clone(),
            quantity: "fourth_moment",
            target: 2.0 / (df * (df + 1.0)),
            estimate: m.fourth,
        },
        CheckRow {
            subject: label,
            quantity: "cross_moment",
            target: 1.0 / (df * (df + 1.0)),
            estimate: m.cross,
        },
    ]
}

/// The built-in suite: for d in {2, 3, 4, 6} an identity spectrum, a rank-1
/// projector, and a mixed spectrum with a degenerate group (d >= 3), plus
/// the moment constants per dimension.
pub fn default_suite(n: u64, seed: u64) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for &d in &[2usize, 3, 4, 6] {
        let identity = SingularSpectrum::new(vec![1.0; d]).expect("valid");
        let mut rank1 = vec![0.0; d];
        rank1[0] = 1.0;
        let rank1 = SingularSpectrum::new(rank1).expect("valid");
        let mixed = mixed_spectrum(d);
        for (name, s) in [
            ("identity", &identity),
            ("rank1", &rank1),
            ("mixed", &mixed),
        ] {
            rows.extend(check_spectrum(&format!("d={d} {name}"), s, n, seed));
        }
        rows.extend(check_constants(d, n, seed));
    }
    rows
}

/// Mixed spectra with degenerate groups where the dimension allows one
/// (d = 2 only has room for two distinct values).
fn mixed_spectrum(d: usize) -> SingularSpectrum {
    let values: Vec<f64> = match d {
        2 => vec![1.0, 0.5],
        3 => vec![1.0, 0.6, 0.6],
        4 => vec![1.0, 0.7, 0.7, 0.3],
        6 => vec![0.75, 0.5, 0.5, 0.5, 0.25, 0.25],
        _ => {
            let p = ExampleParams::new(d, 2.min(d - 1), (d - 2).max(1), 0.5).expect("valid");
            return spectrum_of(&p);
        }
    };
    SingularSpectrum::new(values).expect("valid")
}

pub fn table_rows(rows: &[CheckRow]) -> (Vec<Vec<String>>, bool) {
    let mut any_fail = false;
    let table = rows
        .iter()
        .map(|row| {
            let (z_text, status) = match row.status() {
                RowStatus::Ok(z) => (format!("{z:+.3}"), "ok".to_string()),
                RowStatus::Exact => ("".to_string(), "exact".to_string()),
                RowStatus::Fail(z) => {
                    any_fail = true;
                    (
                        z.map(|z| format!("{z:+.3}")).unwrap_or_default(),
                        "FAIL".to_string(),
                    )
                }
            };
            vec![
                row.subject.clone(),
                row.quantity.to_string(),
                fmt_sci(row.target),
                fmt_sci(row.estimate.mean),
                fmt_sci(row.estimate.std_error),
                z_text,
                status,
            ]
        })
        .collect();
    (table, any_fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rows_flagged_exact() {
        let s = SingularSpectrum::new(vec![1.0; 2]).unwrap();
        let rows = check_spectrum("id", &s, 5000, 1);
        let info_row = rows.iter().find(|r| r.quantity == "information").unwrap();
        assert!(matches!(info_row.status(), RowStatus::Exact));
    }

    #[test]
    fn small_suite_passes() {
        let s = SingularSpectrum::new([1.0, 0.5]).unwrap();
        let rows = check_spectrum("d=2", &s, 100_000, 11);
        let (_, any_fail) = table_rows(&rows);
        assert!(!any_fail);
    }
}
