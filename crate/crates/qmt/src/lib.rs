//! Information gain, operation fidelity, physical reversibility, and
//! estimation fidelity of efficient quantum measurements on d-level
//! systems, computed directly from the singular values of the measurement
//! operator for one outcome.
//!
//! The premeasurement state is taken to be completely unknown (uniform over
//! pure states), so every quantity reduces to a function of the singular
//! values alone. The crate provides:
//!
//! - [`spectrum`]: validated singular-value spectra, degeneracy grouping,
//!   and complete measurement sets;
//! - [`coefficients`]: harmonic numbers, binomials, series coefficients,
//!   and complete Bell polynomials;
//! - [`quantities`]: the dangerous term J (naive and degeneracy-safe
//!   grouped routes) and the per-outcome and averaged quantities;
//! - [`example_class`]: the (k, l, lambda) family with closed forms,
//!   projective measurements, and the near-identity expansion;
//! - [`oracle_mc`]: a Monte Carlo oracle over uniformly random pure states
//!   that verifies every closed form.
//!
//! ```
//! use qmt::spectrum::SingularSpectrum;
//! use qmt::quantities::OutcomeReport;
//!
//! let s = SingularSpectrum::new([1.0, 0.5]).unwrap();
//! let report = OutcomeReport::from_spectrum(&s);
//! assert!((report.fidelity - 14.0 / 15.0).abs() < 1e-12);
//! assert!((report.reversibility - 0.4).abs() < 1e-12);
//! ```

pub mod accum;
pub mod coefficients;
pub mod dd;
mod error;
pub mod example_class;
pub mod oracle_mc;
pub mod quantities;
pub mod spectrum;

pub use error::{Error, Result};
