//! Crossing points `z_n` of consecutive branches `λ_n`, `λ_{n+1}`.
//!
//! `z_n` is the unique positive zero of `M(-1/2, n+1, ·)`, equivalently of
//! `(z - n - 1/2) M(1/2, n+1, z) - z M'(1/2, n+1, z)`. At a crossing
//! `λ_n(z_n) = z_n - n - 1`, and for large `n`
//! `z_n = n + α√n + (α²+2)/3 + O(n^{-1/2})`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disk::{lambda_n, shifted_kummer};
use crate::error::{Error, Result};
use crate::numerics::{brent_root, Tolerances};
use crate::specfun::kummer_log_ratio;

/// One crossing with the residuals of its defining identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionRecord {
    pub n: u32,
    pub z_n: f64,
    pub lambda_at_zn: f64,
    /// `(z_n - n - 1/2)/√n`; absent for `n = 0`.
    pub beta_n: Option<f64>,
    /// `|M(-1/2, n+1, z_n)|`, on the scale `M(-1/2, n+1, 0) = 1`.
    pub residual_m: f64,
    /// `|z_n - n - 1/2 - z_n M'/M|` with `M = M(1/2, n+1, ·)`.
    pub residual_char: f64,
    /// `|λ_n(z_n) - (z_n - n - 1)|`.
    pub residual_f: f64,
}

/// Least-squares coefficients of `z_n - n` in the basis `√n, 1, n^{-1/2}, n^{-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub coefficients: Vec<f64>,
    pub n_range: (u32, u32),
    pub max_residual: f64,
}

/// Root bracket `[n+1, n + α√n + (α²+2)/3 + 5√(n+1)]`.
pub fn zn_bracket(n: u32) -> Result<(f64, f64)> {
    let alpha = crate::models::alpha()?;
    let nf = f64::from(n);
    Ok((nf + 1.0, nf + alpha * nf.sqrt() + (alpha * alpha + 2.0) / 3.0 + 5.0 * (nf + 1.0).sqrt()))
}

fn solve_on_bracket<F: Fn(f64) -> Result<f64>>(f: F, n: u32, tol: &Tolerances) -> Result<f64> {
    let (lo, hi) = zn_bracket(n)?;
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::InvalidBracket { lo, hi, f_lo, f_hi });
    }
    let mut failure = None;
    let root = brent_root(
        |z| match f(z) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol,
    );
    match failure {
        Some(e) => Err(e),
        None => root,
    }
}

/// `z_n` as the zero of `M(-1/2, n+1, ·)`.
pub fn zn_with(n: u32, tol: &Tolerances) -> Result<f64> {
    solve_on_bracket(|z| shifted_kummer(n, z), n, tol)
}

/// `z_n` with default tolerances.
pub fn zn(n: u32) -> Result<f64> {
    zn_with(n, &Tolerances::default())
}

fn characterization(n: u32, z: f64) -> Result<f64> {
    Ok(z - f64::from(n) - 0.5 - z * kummer_log_ratio(0.5, f64::from(n) + 1.0, z)?)
}

/// `z_n` as the zero of the log-derivative characterization; shares no series with [`zn`].
pub fn zn_by_characterization(n: u32, tol: &Tolerances) -> Result<f64> {
    solve_on_bracket(|z| characterization(n, z), n, tol)
}

/// Locates `z_n` and evaluates its residuals.
pub fn find_zn(n: u32) -> Result<IntersectionRecord> {
    find_zn_with(n, &Tolerances::default())
}

pub fn find_zn_with(n: u32, tol: &Tolerances) -> Result<IntersectionRecord> {
    let z = zn_with(n, tol)?;
    let nf = f64::from(n);
    let lambda_at_zn = lambda_n(n, z)?;
    Ok(IntersectionRecord {
        n,
        z_n: z,
        lambda_at_zn,
        beta_n: (n > 0).then(|| (z - nf - 0.5) / nf.sqrt()),
        residual_m: shifted_kummer(n, z)?.abs(),
        residual_char: characterization(n, z)?.abs(),
        residual_f: (lambda_at_zn - (z - nf - 1.0)).abs(),
    })
}

/// Records for every `n` in the range, in order.
pub fn find_zn_range(range: std::ops::RangeInclusive<u32>, tol: &Tolerances) -> Result<Vec<IntersectionRecord>> {
    range.into_par_iter().map(|n| find_zn_with(n, tol)).collect()
}

/// `max_{0 <= n <= n_max} |λ_n(z_n) - (z_n - n - 1)|`.
pub fn check_f_formula(n_max: u32) -> Result<f64> {
    let records = find_zn_range(0..=n_max, &Tolerances::default())?;
    Ok(records.iter().map(|r| r.residual_f).fold(0.0, f64::max))
}

/// `β_n = (z_n - n - 1/2)/√n`.
pub fn beta_n(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("beta_n", "undefined for n = 0"));
    }
    let nf = f64::from(n);
    Ok((zn(n)? - nf - 0.5) / nf.sqrt())
}

/// `z_n - z_{n-1}`.
pub fn gap_zn(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("gap_zn", "n must be >= 1"));
    }
    Ok(zn(n)? - zn(n - 1)?)
}

/// Basis function `j` of the fit at `n`: `n^{(1-j)/2}`.
fn basis(j: usize, n: f64) -> f64 {
    n.powf(0.5 * (1.0 - j as f64))
}

/// Least-squares fit of `z_n - n` on the first `terms` basis functions.
pub fn fit_asymptotics(records: &[IntersectionRecord], terms: usize) -> Result<AsymptoticFit> {
    if !(1..=4).contains(&terms) {
        return Err(Error::IllConditioned(format!("terms = {terms} outside 1..=4")));
    }
    let n_lo = records.iter().map(|r| r.n).min().unwrap_or(0);
    let n_hi = records.iter().map(|r| r.n).max().unwrap_or(0);
    if n_lo == 0 {
        return Err(Error::IllConditioned("fit needs n >= 1 (basis contains n^{-1/2})".into()));
    }
    if records.len() < terms || f64::from(n_hi) < 4.0 * f64::from(n_lo) {
        return Err(Error::IllConditioned(format!(
            "range [{n_lo}, {n_hi}] with {} records cannot resolve {terms} terms (need n_hi >= 4 n_lo)",
            records.len()
        )));
    }
    let rows = records.len();
    let design = DMatrix::from_fn(rows, terms, |i, j| basis(j, f64::from(records[i].n)));
    let target = DVector::from_fn(rows, |i, _| records[i].z_n - f64::from(records[i].n));
    let svd = design.clone().svd(true, true);
    let coefficients = svd
        .solve(&target, 1e-12 * svd.singular_values.max())
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let residuals = &design * &coefficients - &target;
    Ok(AsymptoticFit {
        coefficients: coefficients.iter().copied().collect(),
        n_range: (n_lo, n_hi),
        max_residual: residuals.amax(),
    })
}

/// `|λ - α√n - (α²-1)/3|`, the remainder of the two-term law for `λ_n(z_n)`.
pub fn lambda_at_zn_asymptotic_residual(n: u32, lambda: f64, alpha: f64) -> f64 {
    (lambda - alpha * f64::from(n).sqrt() - (alpha * alpha - 1.0) / 3.0).abs()
}

/// Remainder of the two-term law for `λ_n(z_n)` at a computed crossing, `n >= 100`.
pub fn lambda_at_zn_asymptotic_check(n: u32) -> Result<f64> {
    if n < 100 {
        return Err(Error::domain("lambda_at_zn_asymptotic_check", format!("n = {n} must be >= 100")));
    }
    let record = find_zn(n)?;
    Ok(lambda_at_zn_asymptotic_residual(n, record.lambda_at_zn, crate::models::alpha()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bisection on a 30-term partial sum of M(-1/2, 1, z).
    fn z0_oracle() -> f64 {
        let m = |z: f64| {
            let (mut term, mut sum) = (1.0, 1.0);
            for k in 0..30 {
                let k = k as f64;
                term *= (-0.5 + k) * z / ((1.0 + k) * (k + 1.0));
                sum += term;
            }
            sum
        };
        let (mut lo, mut hi) = (1.5, 1.7);
        assert!(m(lo) > 0.0 && m(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn first_crossing_against_bisection() {
        let rec = find_zn(0).unwrap();
        assert!((rec.z_n - z0_oracle()).abs() < 1e-12);
        assert!(rec.beta_n.is_none());
        assert!(rec.residual_m <= 1e-9 && rec.residual_char <= 1e-9 && rec.residual_f <= 1e-8);
    }

    #[test]
    fn characterizations_agree() {
        let tol = Tolerances::default();
        for n in [0u32, 1, 2, 5, 17, 50, 200, 1000] {
            let a = zn(n).unwrap();
            let b = zn_by_characterization(n, &tol).unwrap();
            assert!((a - b).abs() <= 1e-9, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn crossings_are_ordered_and_beyond_n_plus_one() {
        let recs = find_zn_range(0..=60, &Tolerances::default()).unwrap();
        for r in &recs {
            assert!(r.z_n > f64::from(r.n) + 1.0);
            assert!(r.residual_f <= 1e-8, "n={}: {}", r.n, r.residual_f);
        }
        assert!(recs.windows(2).all(|w| w[1].z_n > w[0].z_n));
        assert!(check_f_formula(0).unwrap() <= 1e-8);
    }

    #[test]
    fn crossings_are_where_neighbouring_branches_meet() {
        for n in [0u32, 3, 12] {
            let z = zn(n).unwrap();
            let gap = lambda_n(n, z).unwrap() - lambda_n(n + 1, z).unwrap();
            assert!(gap.abs() < 1e-9, "n={n}: {gap}");
        }
    }

    #[test]
    fn beta_and_gap_basics() {
        assert!((beta_n(1).unwrap() - (zn(1).unwrap() - 1.5)).abs() < 1e-15);
        assert!(gap_zn(1).unwrap() > 0.0);
        assert!(beta_n(0).is_err() && gap_zn(0).is_err());
    }

    #[test]
    fn fit_recovers_synthetic_model() {
        let (alpha, c) = (0.764_950_867_3, 0.861_72);
        let records: Vec<IntersectionRecord> = (100..=1000u32)
            .step_by(9)
            .map(|n| {
                let nf = f64::from(n);
                IntersectionRecord {
                    n,
                    z_n: nf + alpha * nf.sqrt() + c,
                    lambda_at_zn: 0.0,
                    beta_n: None,
                    residual_m: 0.0,
                    residual_char: 0.0,
                    residual_f: 0.0,
                }
            })
            .collect();
        for terms in 2..=4 {
            let fit = fit_asymptotics(&records, terms).unwrap();
            assert!((fit.coefficients[0] - alpha).abs() < 1e-10);
            assert!((fit.coefficients[1] - c).abs() < 1e-10);
            assert!(fit.max_residual < 1e-9);
        }
        assert!(fit_asymptotics(&records, 5).is_err());
        assert!(fit_asymptotics(&records[..10], 2).is_err());
    }

    #[test]
    fn asymptotic_residual_of_exact_law_is_zero() {
        let alpha = 0.75;
        let lambda = alpha * 30.0 + (alpha * alpha - 1.0) / 3.0;
        assert!(lambda_at_zn_asymptotic_residual(900, lambda, alpha) < 1e-13);
        assert!(lambda_at_zn_asymptotic_check(10).is_err());
        assert!(lambda_at_zn_asymptotic_check(100).unwrap() <= 0.5);
    }
}
