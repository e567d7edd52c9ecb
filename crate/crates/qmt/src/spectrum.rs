//! Singular-value spectra, degeneracy grouping, and complete measurement
//! sets.
//!
//! A [`SingularSpectrum`] holds the d singular values of one measurement
//! operator, sorted nonincreasing — the sole physics input of every quantity
//! in this crate. A [`MeasurementSet`] collects the spectra of all outcomes
//! and checks the completeness identity `sum_m sigma_m^2 = d`.
//!
//! All types are immutable after construction and all operations are pure,
//! so values can be shared freely across threads.

use crate::error::{Error, Result};

/// Default relative tolerance for merging squared singular values into one
/// degeneracy group. The naive dangerous-term formula loses all precision
/// as gaps approach machine epsilon; this keeps the grouped path active
/// well before that.
pub const GROUP_REL_TOL: f64 = 1e-9;

/// Absolute floor for the grouping scale, so exact-zero values form a group.
pub const GROUP_ABS_FLOOR: f64 = 1e-300;

/// Default completeness tolerance per unit of dimension: a set passes when
/// `|sum sigma^2 - d| <= d * COMPLETENESS_REL_TOL`.
pub const COMPLETENESS_REL_TOL: f64 = 1e-9;

/// Nonincreasing singular values of one measurement operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    /// Validates and sorts a spectrum. Values must lie in [0, 1]; at least
    /// one must be positive; at least two entries are required.
    pub fn new(values: impl Into<Vec<f64>>) -> Result<Self> {
        Self::build(values.into(), false)
    }

    /// Like [`SingularSpectrum::new`] but accepts values above 1 by
    /// rescaling the whole spectrum so its maximum becomes 1. Downstream
    /// quantities are invariant under that rescaling.
    pub fn new_rescaled(values: impl Into<Vec<f64>>) -> Result<Self> {
        Self::build(values.into(), true)
    }

    fn build(mut values: Vec<f64>, rescale: bool) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooSmallDimension(values.len()));
        }
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(v));
            }
            if v < 0.0 {
                return Err(Error::NegativeValue(v));
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite values"));
        let max = values[0];
        if max == 0.0 {
            return Err(Error::AllZero);
        }
        if max > 1.0 {
            if !rescale {
                return Err(Error::ValueAboveOne(max));
            }
            for v in &mut values {
                *v /= max;
            }
        }
        Ok(SingularSpectrum { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Values in nonincreasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    /// Squared Hilbert–Schmidt norm `sigma^2 = sum lambda_i^2`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Trace norm `tau = sum lambda_i`.
    pub fn trace_norm(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Divides every value by the maximum so the largest becomes exactly 1.
    pub fn rescale_to_unit_max(&self) -> SingularSpectrum {
        let max = self.max_value();
        SingularSpectrum {
            values: self.values.iter().map(|v| v / max).collect(),
        }
    }

    /// True when every value equals every other (the identity operation up
    /// to rescaling).
    pub fn is_uniform(&self) -> bool {
        self.values[0] == *self.values.last().expect("nonempty")
    }

    /// Merges near-equal values into degeneracy groups.
    ///
    /// Adjacent sorted values join one group when their squared difference
    /// is within `rel_tol * max(previous squared value, floor)`; each group
    /// takes the root of the mean of its members' squares as representative.
    pub fn group(&self, rel_tol: f64) -> SpectrumGroups {
        let rel_tol = rel_tol.max(0.0);
        let mut groups: Vec<Group> = Vec::new();
        let mut member_sq: Vec<f64> = Vec::new();
        let mut prev_sq = f64::NAN;
        for &v in &self.values {
            let sq = v * v;
            let merge = !member_sq.is_empty() && {
                let scale = prev_sq.max(GROUP_ABS_FLOOR);
                prev_sq - sq <= rel_tol * scale
            };
            if !merge && !member_sq.is_empty() {
                groups.push(Group::from_squares(&member_sq));
                member_sq.clear();
            }
            member_sq.push(sq);
            prev_sq = sq;
        }
        groups.push(Group::from_squares(&member_sq));
        SpectrumGroups {
            groups,
            tolerance: rel_tol,
        }
    }

    /// Grouping with the default tolerance [`GROUP_REL_TOL`].
    pub fn group_default(&self) -> SpectrumGroups {
        self.group(GROUP_REL_TOL)
    }
}

/// One degeneracy group: a representative value and how many singular
/// values it stands for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Group {
    pub value: f64,
    pub multiplicity: usize,
}

impl Group {
    fn from_squares(squares: &[f64]) -> Group {
        let mean = squares.iter().sum::<f64>() / squares.len() as f64;
        Group {
            value: mean.sqrt(),
            multiplicity: squares.len(),
        }
    }
}

/// Degeneracy grouping of a spectrum: strictly decreasing representative
/// values with multiplicities summing to the dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumGroups {
    groups: Vec<Group>,
    tolerance: f64,
}

impl SpectrumGroups {
    /// Builds a grouping directly from (value, multiplicity) pairs.
    ///
    /// Pairs must be strictly decreasing in value with positive
    /// multiplicities; useful for constructing analytically known groupings.
    pub fn from_parts(parts: &[(f64, usize)], tolerance: f64) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::AllZero);
        }
        let mut groups = Vec::with_capacity(parts.len());
        for (i, &(value, multiplicity)) in parts.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteValue(value));
            }
            if value < 0.0 {
                return Err(Error::NegativeValue(value));
            }
            if multiplicity == 0 {
                return Err(Error::BadParams("group multiplicity must be positive".into()));
            }
            if i > 0 && value >= parts[i - 1].0 {
                return Err(Error::BadParams(
                    "group values must be strictly decreasing".into(),
                ));
            }
            groups.push(Group {
                value,
                multiplicity,
            });
        }
        Ok(SpectrumGroups { groups, tolerance })
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Total multiplicity, i.e. the dimension of the source spectrum.
    pub fn dim(&self) -> usize {
        self.groups.iter().map(|g| g.multiplicity).sum()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Expands the grouping back to a flat nonincreasing value list.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for g in &self.groups {
            out.extend(std::iter::repeat(g.value).take(g.multiplicity));
        }
        out
    }
}

/// The spectra of every outcome of one measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    outcomes: Vec<SingularSpectrum>,
}

impl MeasurementSet {
    /// All outcomes must share one dimension; completeness is checked
    /// separately via [`MeasurementSet::completeness_defect`].
    pub fn new(outcomes: Vec<SingularSpectrum>) -> Result<Self> {
        let first = outcomes.first().ok_or(Error::EmptySet)?;
        let d = first.dim();
        for s in &outcomes {
            if s.dim() != d {
                return Err(Error::DimensionMismatch(d, s.dim()));
            }
        }
        Ok(MeasurementSet { outcomes })
    }

    pub fn outcomes(&self) -> &[SingularSpectrum] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].dim()
    }

    /// Distance from the completeness identity: `|sum_m sigma_m^2 - d|`.
    pub fn completeness_defect(&self) -> f64 {
        let total: f64 = self.outcomes.iter().map(|s| s.hs_norm_sq()).sum();
        (total - self.dim() as f64).abs()
    }

    /// Outcome probabilities `p(m) = sigma_m^2 / d` for a uniformly random
    /// pure input state.
    pub fn outcome_probabilities(&self) -> Vec<f64> {
        let d = self.dim() as f64;
        self.outcomes.iter().map(|s| s.hs_norm_sq() / d).collect()
    }
}
