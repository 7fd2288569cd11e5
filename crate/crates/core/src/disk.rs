//! Steklov branches of the unit disk and the ground-state envelope.
//!
//! Mode `n >= 0` at field parameter `b` has eigenvalue
//! `λ_n(b) = n - b + 2b M'(1/2, n+1, b) / M(1/2, n+1, b)`; the negative modes
//! are `λ_{-n}(b) = λ_n(-b)`. The ground state `λ^DN(b)` equals `λ_n(b)` on
//! `[z_{n-1}, z_n]`, where `z_n` are the branch crossings (`z_{-1} = 0`).

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intersect;
use crate::numerics::{backward_diff, ScaledReal};
use crate::specfun::{kummer_log_ratio, kummer_m, kummer_m_prime, kummer_scaled, laguerre_scaled, KUMMER_MAX_ARG};

/// One sample `(n, b, λ_n(b))` of a branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCurvePoint {
    pub n: u32,
    pub b: f64,
    pub lambda: f64,
}

/// Ground-state sample: `lambda_dn = λ_{active_mode}(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub b: f64,
    pub active_mode: u32,
    pub lambda_dn: f64,
}

fn check_field(func: &'static str, b: f64) -> Result<()> {
    if !(b.abs() <= KUMMER_MAX_ARG) {
        return Err(Error::domain(func, format!("|b| = {} must be finite and <= {KUMMER_MAX_ARG}", b.abs())));
    }
    Ok(())
}

/// Branch eigenvalue `λ_n(b)`; negative `b` gives the mirrored branch `λ_{-n}(|b|)`.
pub fn lambda_n(n: u32, b: f64) -> Result<f64> {
    check_field("lambda_n", b)?;
    let nf = f64::from(n);
    if b == 0.0 {
        return Ok(nf);
    }
    if b > 0.0 {
        return Ok(nf - b + 2.0 * b * kummer_log_ratio(0.5, nf + 1.0, b)?);
    }
    // M'(1/2, n+1, -s) / M(1/2, n+1, -s) = M(n+1/2, n+2, s) / (2(n+1) M(n+1/2, n+1, s))
    let s = -b;
    let num = kummer_scaled(nf + 0.5, nf + 2.0, s)?;
    let den = kummer_scaled(nf + 0.5, nf + 1.0, s)?;
    let ratio = num.ratio(den) / (2.0 * (nf + 1.0));
    Ok(nf + s - 2.0 * s * ratio)
}

/// `λ_{-n}(b) = λ_n(-b)`.
pub fn lambda_minus_n(n: u32, b: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("lambda_minus_n", "n must be >= 1"));
    }
    lambda_n(n, -b)
}

pub(crate) fn radial_solution_scaled(n: u32, b: f64, r: f64) -> Result<ScaledReal> {
    check_field("radial_solution", b)?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::domain("radial_solution", format!("r = {r} outside (0, 1]")));
    }
    let x = b * r * r;
    let laguerre = laguerre_scaled(-0.5, f64::from(n), x)?;
    Ok(laguerre * ScaledReal::exp(-0.5 * x + f64::from(n) * r.ln()))
}

/// Radial factor `v_n(r) = e^{-br²/2} r^n L_{-1/2}^n(br²)` of the mode-`n` solution.
pub fn radial_solution(n: u32, b: f64, r: f64) -> Result<f64> {
    Ok(radial_solution_scaled(n, b, r)?.to_f64())
}

/// `v_n'(1) / v_n(1)` by a one-sided difference; a cross-check for [`lambda_n`].
pub fn radial_log_derivative(n: u32, b: f64) -> Result<f64> {
    let at_one = radial_solution_scaled(n, b, 1.0)?;
    if at_one.is_zero() {
        return Err(Error::domain("radial_log_derivative", "v_n(1) = 0"));
    }
    // probe a point inside the domain first so errors surface before the stencil
    radial_solution_scaled(n, b, 0.999)?;
    let normalized = |r: f64| {
        radial_solution_scaled(n, b, r)
            .map(|v| v.ratio(at_one))
            .unwrap_or(f64::NAN)
    };
    Ok(backward_diff(normalized, 1.0))
}

fn check_prime_args(func: &'static str, n: u32, z: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(func, "n must be >= 1"));
    }
    if !(z > 0.0 && z <= KUMMER_MAX_ARG) {
        return Err(Error::domain(func, format!("z = {z} outside (0, {KUMMER_MAX_ARG}]")));
    }
    Ok(())
}

/// `λ_n'(z) = -2n M'(1/2, n+1, z) M(-1/2, n, z) / M(1/2, n+1, z)²`.
pub fn lambda_n_prime(n: u32, z: f64) -> Result<f64> {
    check_prime_args("lambda_n_prime", n, z)?;
    let nf = f64::from(n);
    let m = kummer_scaled(0.5, nf + 1.0, z)?;
    let dm = kummer_m_prime(0.5, nf + 1.0, z)?;
    let lower = kummer_scaled(-0.5, nf, z)?;
    Ok((dm * lower).ratio(m * m) * (-2.0 * nf))
}

/// `λ_n'(z) = M'(1/2, n+1, z) (M(1/2, n+1, z) - (2n+1) M(-1/2, n+1, z)) / M(1/2, n+1, z)²`.
pub fn lambda_n_prime_alt(n: u32, z: f64) -> Result<f64> {
    check_prime_args("lambda_n_prime_alt", n, z)?;
    let nf = f64::from(n);
    let m = kummer_scaled(0.5, nf + 1.0, z)?;
    let dm = kummer_m_prime(0.5, nf + 1.0, z)?;
    let shifted = kummer_scaled(-0.5, nf + 1.0, z)?;
    Ok((dm * (m - shifted.mul_f64(2.0 * nf + 1.0))).ratio(m * m))
}

/// `λ_n''(z_{n-1}) = (z_{n-1} - n) / z_{n-1}`.
pub fn lambda_n_second_at_zprev(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("lambda_n_second_at_zprev", "n must be >= 1"));
    }
    let z = intersect::zn(n - 1)?;
    Ok((z - f64::from(n)) / z)
}

/// Samples `λ_n(b)` for every mode in `modes` and field in `b_grid`, mode-major.
pub fn eigen_curves(modes: std::ops::RangeInclusive<u32>, b_grid: &[f64]) -> Result<Vec<EigenCurvePoint>> {
    let pairs: Vec<(u32, f64)> = modes.flat_map(|n| b_grid.iter().map(move |&b| (n, b))).collect();
    pairs
        .into_par_iter()
        .map(|(n, b)| Ok(EigenCurvePoint { n, b, lambda: lambda_n(n, b)? }))
        .collect()
}

/// Memoized crossing points shared by the envelope workers.
struct CrossingTable {
    known: Mutex<HashMap<u32, f64>>,
}

impl CrossingTable {
    fn new() -> Self {
        Self {
            known: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, n: u32) -> Result<f64> {
        if let Some(&z) = self.known.lock().expect("crossing table poisoned").get(&n) {
            return Ok(z);
        }
        let z = intersect::zn(n)?;
        self.known.lock().expect("crossing table poisoned").insert(n, z);
        Ok(z)
    }

    /// The mode owning `b`: `z_{n-1} <= b <= z_n`.
    fn owner(&self, b: f64, alpha: f64) -> Result<u32> {
        // invert z_n ~ n + α√n + (α²+2)/3 for a starting guess
        let c = (alpha * alpha + 2.0) / 3.0;
        let s = 0.5 * (-alpha + (alpha * alpha + 4.0 * (b - c)).max(0.0).sqrt());
        let mut n = (s.max(0.0) * s.max(0.0)).floor() as u32;
        while n > 0 && b < self.get(n - 1)? {
            n -= 1;
        }
        while b > self.get(n)? {
            n += 1;
        }
        Ok(n)
    }
}

/// Minimum of `λ_n(b)` over the window of modes that can be active at `b`.
fn window_minimum(b: f64) -> Result<(u32, f64)> {
    let lo = ((b - 3.0 * b.sqrt()).floor() - 2.0).max(0.0) as u32;
    let hi = b.ceil() as u32 + 2;
    let mut best = (lo, lambda_n(lo, b)?);
    for n in lo + 1..=hi {
        let value = lambda_n(n, b)?;
        if value < best.1 {
            best = (n, value);
        }
    }
    Ok(best)
}

/// Ground-state envelope on an ascending grid of `b >= 0`; output order matches the grid.
pub fn envelope(b_grid: &[f64]) -> Result<Vec<EnvelopePoint>> {
    if let Some(bad) = b_grid.iter().find(|b| !(**b >= 0.0 && **b <= KUMMER_MAX_ARG)) {
        return Err(Error::domain("envelope", format!("b = {bad} outside [0, {KUMMER_MAX_ARG}]")));
    }
    if b_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("envelope", "grid must be sorted ascending"));
    }
    let alpha = crate::models::alpha()?;
    let table = CrossingTable::new();
    b_grid
        .par_iter()
        .map(|&b| {
            if b == 0.0 {
                return Ok(EnvelopePoint {
                    b,
                    active_mode: 0,
                    lambda_dn: 0.0,
                });
            }
            let n = table.owner(b, alpha)?;
            let lambda_dn = lambda_n(n, b)?;
            if cfg!(debug_assertions) {
                let (mode, least) = window_minimum(b)?;
                if lambda_dn > least + 1e-9 * least.abs().max(1.0) {
                    return Err(Error::IllConditioned(format!(
                        "envelope at b = {b}: crossing partition picks mode {n} ({lambda_dn}) but mode {mode} is lower ({least})"
                    )));
                }
            }
            Ok(EnvelopePoint {
                b,
                active_mode: n,
                lambda_dn,
            })
        })
        .collect()
}

/// `M(-1/2, n+1, z)` as an ordinary double, saturating at the largest finite value.
pub(crate) fn shifted_kummer(n: u32, z: f64) -> Result<f64> {
    let v = kummer_m(-0.5, f64::from(n) + 1.0, z)?;
    if !v.converged {
        return Err(Error::NoConvergence {
            what: "kummer_m",
            iterations: v.terms_used,
        });
    }
    Ok(v.to_f64().clamp(-f64::MAX, f64::MAX))
}
