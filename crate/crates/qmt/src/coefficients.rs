//! Harmonic numbers, binomial coefficients, the Taylor coefficients of
//! `(x^2 + eps)^d log2(x^2 + eps)`, and complete Bell polynomials.
//!
//! These are the building blocks of the grouped evaluation of the dangerous
//! term: the series coefficients `a`, `c`, `h`, and `b` combine into the
//! per-group contributions without any limit operations, even for highly
//! degenerate spectra.
//!
//! Binomials and factorials come from exact integer tables up to order 64
//! and are converted to floating point at the last step; beyond the table
//! they fall back to a multiplicative evaluation. Double precision limits
//! practical dimensions to d <= 64 — binomial growth past that erodes the
//! accuracy of the alternating sums.

use std::sync::OnceLock;

use crate::dd::Real;
use crate::error::{Error, Result};
use crate::spectrum::SpectrumGroups;

/// Largest order kept in the exact integer tables.
pub const MAX_TABLE_ORDER: usize = 64;

static BINOMIAL_TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();

fn binomial_table() -> &'static [Vec<u128>] {
    BINOMIAL_TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(MAX_TABLE_ORDER + 1);
        rows.push(vec![1]);
        for n in 1..=MAX_TABLE_ORDER {
            let prev = &rows[n - 1];
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        rows
    })
}

/// Binomial coefficient C(n, k), with C(n, k) = 0 for k > n.
pub fn binomial(n: usize, k: usize) -> f64 {
    binomial_g::<f64>(n, k)
}

pub(crate) fn binomial_g<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::ZERO;
    }
    if n <= MAX_TABLE_ORDER {
        let exact = binomial_table()[n][k];
        // u128 -> T via two 64-bit halves so table entries stay exact
        let hi = (exact >> 64) as u64;
        let lo = exact as u64;
        return T::from_f64(hi as f64) * T::from_f64(18446744073709551616.0)
            + T::from_f64(lo as f64);
    }
    let k = k.min(n - k);
    let mut acc = T::ONE;
    for i in 0..k {
        acc = acc * T::from_usize(n - i) / T::from_usize(i + 1);
    }
    acc
}

/// Factorial n! (exact up to 22!, floating point beyond).
pub fn factorial(n: usize) -> f64 {
    factorial_g::<f64>(n)
}

pub(crate) fn factorial_g<T: Real>(n: usize) -> T {
    let mut acc = T::ONE;
    for i in 2..=n {
        acc = acc * T::from_usize(i);
    }
    acc
}

/// Harmonic number 1 + 1/2 + ... + 1/n.
///
/// The empty sum for n = 0 is rejected; the difference form used by the
/// coefficient formulas never needs it.
pub fn eta(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::NonPositiveOrder);
    }
    Ok(harmonic_g::<f64>(n))
}

pub(crate) fn harmonic_g<T: Real>(n: usize) -> T {
    // summed smallest-first
    let mut acc = T::ZERO;
    for k in (1..=n).rev() {
        acc = acc + T::ONE / T::from_usize(k);
    }
    acc
}

/// Taylor coefficient of eps^n in `(1 + eps)^d log2(1 + eps)`:
/// `C(d, n) [eta(d) - eta(d - n)] / ln 2`, for 0 <= n <= d-1.
pub fn a_coeff(d: usize, n: usize) -> Result<f64> {
    check_order(d, n)?;
    Ok(a_coeff_g::<f64>(d, n))
}

pub(crate) fn a_coeff_g<T: Real>(d: usize, n: usize) -> T {
    if n == 0 {
        return T::ZERO;
    }
    let eta_diff = harmonic_g::<T>(d) - harmonic_g::<T>(d - n);
    binomial_g::<T>(d, n) * eta_diff / T::ln_2()
}

/// Alternating-sum form of [`a_coeff`]:
/// `(1/ln 2) * sum_{k=1}^{n} (-1)^{k+1} C(d, n-k) / k`.
///
/// Kept as an independent cross-check of the closed form; the two agree for
/// every valid (d, n).
pub fn a_coeff_alt(d: usize, n: usize) -> Result<f64> {
    check_order(d, n)?;
    let mut acc = 0.0;
    for k in 1..=n {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * binomial(d, n - k) / k as f64;
    }
    Ok(acc / std::f64::consts::LN_2)
}

/// Taylor coefficient of eps^n in `(lambda^2 + eps)^d log2(lambda^2 + eps)`:
/// `lambda^{2(d-n)} [C(d, n) log2(lambda^2) + a_coeff(d, n)]`.
///
/// Returns exactly 0 at lambda = 0, the limiting value for n <= d-1.
pub fn c_coeff(d: usize, n: usize, lambda: f64) -> Result<f64> {
    check_order(d, n)?;
    if !(lambda >= 0.0) {
        return Err(Error::NegativeValue(lambda));
    }
    Ok(c_coeff_sq_g::<f64>(d, n, lambda * lambda))
}

/// Same coefficient written in terms of the squared value.
pub(crate) fn c_coeff_sq_g<T: Real>(d: usize, n: usize, lambda_sq: T) -> T {
    if !(lambda_sq > T::ZERO) {
        return T::ZERO;
    }
    let log2_sq = lambda_sq.ln() / T::ln_2();
    lambda_sq.powu(d - n) * (binomial_g::<T>(d, n) * log2_sq + a_coeff_g::<T>(d, n))
}

fn check_order(d: usize, n: usize) -> Result<()> {
    if d == 0 || n >= d {
        return Err(Error::OrderOutOfRange {
            order: n,
            max: d.saturating_sub(1),
        });
    }
    Ok(())
}

/// Group s of a grouped spectrum, viewed from dimension d.
///
/// Carries what the per-group series coefficients need: the squared value of
/// every group and which group the expansion is taken around.
#[derive(Clone, Copy, Debug)]
pub struct GroupContext<'a> {
    pub groups: &'a SpectrumGroups,
    pub group_index: usize,
    pub dimension: usize,
}

impl<'a> GroupContext<'a> {
    pub fn new(groups: &'a SpectrumGroups, group_index: usize, dimension: usize) -> Self {
        GroupContext {
            groups,
            group_index,
            dimension,
        }
    }
}

/// Log-series coefficient `h_n = (-1)^n (n-1)! sum_{r != s} n_r / (g_s - g_r)^n`
/// with g the squared group values.
pub fn h_coeff(ctx: &GroupContext, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::NonPositiveOrder);
    }
    let gs: Vec<f64> = ctx.groups.groups().iter().map(|g| g.value * g.value).collect();
    let mult: Vec<usize> = ctx.groups.groups().iter().map(|g| g.multiplicity).collect();
    let s = ctx.group_index;
    for (r, &g) in gs.iter().enumerate() {
        if r != s && g == gs[s] {
            return Err(Error::SingularGap);
        }
    }
    Ok(h_coeff_g::<f64>(&gs, &mult, s, n))
}

pub(crate) fn h_coeff_g<T: Real>(sq: &[T], mult: &[usize], s: usize, n: usize) -> T {
    let mut acc = T::ZERO;
    for r in 0..sq.len() {
        if r == s {
            continue;
        }
        acc = acc + T::from_usize(mult[r]) / (sq[s] - sq[r]).powu(n);
    }
    let signed = if n % 2 == 1 { -acc } else { acc };
    factorial_g::<T>(n - 1) * signed
}

/// Complete Bell polynomial B_n(x_1, ..., x_n) by the recurrence
/// `B_{m+1} = sum_{k=0}^{m} C(m, k) B_{m-k} x_{k+1}`, seeded with B_0 = 1.
pub fn bell_complete(n: usize, xs: &[f64]) -> Result<f64> {
    if xs.len() < n {
        return Err(Error::InsufficientInput {
            order: n,
            got: xs.len(),
        });
    }
    Ok(bell_complete_g::<f64>(n, xs))
}

pub(crate) fn bell_complete_g<T: Real>(n: usize, xs: &[T]) -> T {
    let mut b: Vec<T> = Vec::with_capacity(n + 1);
    b.push(T::ONE);
    for m in 0..n {
        let mut acc = T::ZERO;
        for k in 0..=m {
            acc = acc + binomial_g::<T>(m, k) * b[m - k] * xs[k];
        }
        b.push(acc);
    }
    b[n]
}

/// Complete Bell polynomial by explicit partition enumeration.
///
/// Sums `n! / prod(j_r!) * prod((x_r / r!)^{j_r})` over all multisets with
/// `sum r * j_r = n`. Exponential cost; a reference for [`bell_complete`]
/// at small orders (n <= 20), not a production path.
pub fn bell_by_partitions(n: usize, xs: &[f64]) -> Result<f64> {
    if xs.len() < n {
        return Err(Error::InsufficientInput {
            order: n,
            got: xs.len(),
        });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let n_fact = factorial(n);
    let mut total = 0.0;
    let mut counts = vec![0usize; n + 1];
    fn recurse(r: usize, remaining: usize, counts: &mut Vec<usize>, xs: &[f64], n_fact: f64, total: &mut f64) {
        if remaining == 0 {
            let mut term = n_fact;
            for (part, &j) in counts.iter().enumerate().skip(1) {
                if j == 0 {
                    continue;
                }
                term /= factorial(j);
                term *= (xs[part - 1] / factorial(part)).powi(j as i32);
            }
            *total += term;
            return;
        }
        if r == 0 {
            return;
        }
        for j in 0..=(remaining / r) {
            counts[r] = j;
            recurse(r - 1, remaining - r * j, counts, xs, n_fact, total);
        }
        counts[r] = 0;
    }
    recurse(n, n, &mut counts, xs, n_fact, &mut total);
    Ok(total)
}

/// Expansion coefficient `b_n = B_n(h_1, ..., h_n) / n!` of the inverse
/// gap-product around group s.
pub fn b_coeff(ctx: &GroupContext, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let hs: Result<Vec<f64>> = (1..=n).map(|i| h_coeff(ctx, i)).collect();
    Ok(bell_complete(n, &hs?)? / factorial(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn eta_small_values() {
        assert_eq!(eta(1).unwrap(), 1.0);
        assert_eq!(eta(2).unwrap(), 1.5);
        assert_relative_eq!(eta(4).unwrap(), 25.0 / 12.0, max_relative = 1e-15);
        assert_eq!(eta(0), Err(Error::NonPositiveOrder));
    }

    #[test]
    fn binomial_table_and_fallback() {
        assert_eq!(binomial(0, 0), 1.0);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(4, 7), 0.0);
        assert_eq!(binomial(64, 32), 1832624140942590534.0);
        // beyond the table: multiplicative route
        assert_relative_eq!(binomial(70, 3), 54740.0, max_relative = 1e-12);
    }

    #[test]
    fn a_coeff_reference_values() {
        assert_eq!(a_coeff(4, 0).unwrap(), 0.0);
        assert_relative_eq!(a_coeff(4, 1).unwrap(), 1.0 / LN_2, max_relative = 1e-15);
        // order d-1: (4/ln2)(1/2 + 1/3 + 1/4)
        assert_relative_eq!(
            a_coeff(4, 3).unwrap(),
            4.0 / LN_2 * (0.5 + 1.0 / 3.0 + 0.25),
            max_relative = 1e-14
        );
        assert!(matches!(a_coeff(4, 4), Err(Error::OrderOutOfRange { .. })));
    }

    #[test]
    fn a_coeff_alt_matches_closed_form() {
        assert_relative_eq!(a_coeff_alt(4, 1).unwrap(), 1.0 / LN_2, max_relative = 1e-15);
        assert_relative_eq!(a_coeff_alt(2, 1).unwrap(), 1.0 / LN_2, max_relative = 1e-15);
        // (1/ln2)(C(4,1) - 1/2) = 3.5/ln2 = C(4,2)(eta(4)-eta(2))/ln2
        assert_relative_eq!(a_coeff_alt(4, 2).unwrap(), 3.5 / LN_2, max_relative = 1e-14);
        assert_relative_eq!(
            a_coeff_alt(4, 2).unwrap(),
            a_coeff(4, 2).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn a_coeff_recurrence() {
        // a^{(d)}_n = a^{(d-1)}_n + a^{(d-1)}_{n-1}
        for d in 3..=20 {
            for n in 1..=(d - 2) {
                let lhs = a_coeff(d, n).unwrap();
                let rhs = a_coeff(d - 1, n).unwrap() + a_coeff(d - 1, n - 1).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn c_coeff_endpoints_and_value() {
        assert_eq!(c_coeff(3, 1, 0.0).unwrap(), 0.0);
        for n in 0..4 {
            assert_relative_eq!(
                c_coeff(5, n, 1.0).unwrap(),
                a_coeff(5, n).unwrap(),
                max_relative = 1e-14
            );
        }
        // d=2, n=0, lambda=0.5: 0.5^4 log2(0.25) = -0.125
        assert_relative_eq!(c_coeff(2, 0, 0.5).unwrap(), -0.125, max_relative = 1e-15);
    }

    #[test]
    fn bell_small_orders() {
        assert_eq!(bell_complete(0, &[]).unwrap(), 1.0);
        assert_eq!(bell_complete(1, &[5.0]).unwrap(), 5.0);
        // B_2 = x1^2 + x2, B_3 = x1^3 + 3 x1 x2 + x3
        assert_eq!(bell_complete(2, &[2.0, 3.0]).unwrap(), 7.0);
        assert_eq!(bell_complete(3, &[1.0, 1.0, 1.0]).unwrap(), 5.0);
        assert!(matches!(
            bell_complete(3, &[1.0]),
            Err(Error::InsufficientInput { .. })
        ));
    }

    #[test]
    fn bell_partitions_agrees() {
        assert_eq!(bell_by_partitions(1, &[5.0]).unwrap(), 5.0);
        assert_eq!(bell_by_partitions(2, &[2.0, 3.0]).unwrap(), 7.0);
        let xs: Vec<f64> = (1..=9).map(|i| (i as f64 * 0.37).sin()).collect();
        for n in 0..=9 {
            assert_relative_eq!(
                bell_by_partitions(n, &xs).unwrap(),
                bell_complete(n, &xs).unwrap(),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn bell_factorial_identity() {
        // B_n(0! m, 1! m, ..., (n-1)! m) = n! C(m+n-1, m-1)
        let m = 2.0;
        let xs: Vec<f64> = (0..4).map(|r| factorial(r) * m).collect();
        assert_eq!(bell_by_partitions(4, &xs).unwrap(), 120.0);
        assert_eq!(bell_complete(4, &xs).unwrap(), 120.0);
    }

    #[test]
    fn h_and_b_match_worked_example() {
        // groups (lambda,3), (sqrt2 lambda,2), (sqrt3 lambda,1): around the
        // lowest group h_1 = 5/(2 lambda^2), h_2 = 9/(4 lambda^4),
        // b_1 = 5/(2 lambda^2), b_2 = 17/(4 lambda^4)
        let lam = 0.4_f64;
        let groups = SpectrumGroups::from_parts(
            &[
                (lam * 3.0_f64.sqrt(), 1),
                (lam * 2.0_f64.sqrt(), 2),
                (lam, 3),
            ],
            1e-9,
        )
        .unwrap();
        let ctx = GroupContext::new(&groups, 2, 6);
        let l2 = lam * lam;
        assert_relative_eq!(h_coeff(&ctx, 1).unwrap(), 2.5 / l2, max_relative = 1e-12);
        assert_relative_eq!(h_coeff(&ctx, 2).unwrap(), 2.25 / (l2 * l2), max_relative = 1e-12);
        assert_eq!(b_coeff(&ctx, 0).unwrap(), 1.0);
        assert_relative_eq!(b_coeff(&ctx, 1).unwrap(), 2.5 / l2, max_relative = 1e-12);
        assert_relative_eq!(b_coeff(&ctx, 2).unwrap(), 4.25 / (l2 * l2), max_relative = 1e-12);
    }

    #[test]
    fn h_two_group_single_term() {
        let groups = SpectrumGroups::from_parts(&[(1.0, 1), (0.5, 1)], 1e-9).unwrap();
        let ctx = GroupContext::new(&groups, 0, 2);
        let gap = 1.0 - 0.25;
        assert_relative_eq!(h_coeff(&ctx, 1).unwrap(), -1.0 / gap, max_relative = 1e-15);
    }
}
