//! Parabolic cylinder functions `D_ν(z)` for real order and argument.
//!
//! For `ν <= -1/2` the value comes from the Laplace-type integral
//! `D_ν(z) = e^{-z²/4} / Γ(-ν) ∫₀^∞ t^{-ν-1} e^{-t²/2 - zt} dt`,
//! whose integrand is positive, so `D_ν > 0` there. Larger orders are
//! reached with the three-term recurrence
//! `D_{ν+1}(z) = z D_ν(z) - ν D_{ν-1}(z)` from two anchors in
//! `(-5/2, -1/2]`; keeping the anchors at or below `-1/2` keeps the
//! endpoint factor `t^{-ν-1}` no worse than `t^{-1/2}`. The derivative is
//! `D'_ν(z) = (z/2) D_ν(z) - D_{ν+1}(z)`.

use crate::error::{Error, Result};
use crate::numerics::{gamma, integrate_semi_infinite, Tolerances};

/// Orders accepted by [`cylinder_d`].
pub const CYLINDER_NU_RANGE: (f64, f64) = (-4.0, 4.0);
/// Largest `|z|` accepted by [`cylinder_d`].
pub const CYLINDER_MAX_ARG: f64 = 50.0;

const DIRECT_MAX_NU: f64 = -0.5;

/// `D_ν(z)` together with `D'_ν(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderValue {
    pub value: f64,
    pub derivative: f64,
    pub nu: f64,
    pub z: f64,
}

fn check_args(nu: f64, z: f64) -> Result<()> {
    let (lo, hi) = CYLINDER_NU_RANGE;
    if !(lo..=hi).contains(&nu) {
        return Err(Error::domain("cylinder_d", format!("nu = {nu} outside [{lo}, {hi}]")));
    }
    if !(z.abs() <= CYLINDER_MAX_ARG) {
        return Err(Error::domain("cylinder_d", format!("|z| = {} exceeds {CYLINDER_MAX_ARG}", z.abs())));
    }
    Ok(())
}

/// Integral representation, valid for `ν < 0`.
///
/// For `z < 0` the exponent is completed to `-(t+z)²/2 + z²/2` so the
/// integrand peaks at `O(1)` near `t = -z` instead of at `e^{z²/2}`.
fn integral_rep(nu: f64, z: f64, tol: &Tolerances) -> Result<f64> {
    debug_assert!(nu < 0.0);
    let p = -nu - 1.0;
    let spread = p.max(0.0).sqrt() + 1.0;
    let norm = gamma(-nu)?;
    if z >= 0.0 {
        let integral = integrate_semi_infinite(|t: f64| t.powf(p) * (-t * (0.5 * t + z)).exp(), spread, tol)?;
        Ok((-0.25 * z * z).exp() * integral / norm)
    } else {
        let integral = integrate_semi_infinite(|t: f64| t.powf(p) * (-0.5 * (t + z) * (t + z)).exp(), spread - z, tol)?;
        Ok((0.25 * z * z).exp() * integral / norm)
    }
}

/// `(D_ν(z), D_{ν+1}(z))`.
pub(crate) fn cylinder_pair(nu: f64, z: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    if nu + 1.0 <= DIRECT_MAX_NU {
        return Ok((integral_rep(nu, z, tol)?, integral_rep(nu + 1.0, z, tol)?));
    }
    // base = nu - lifts lies in (-3/2, -1/2]
    let lifts = (nu - DIRECT_MAX_NU).ceil().max(0.0) as usize;
    let base = nu - lifts as f64;
    let mut order = base;
    let mut lower = integral_rep(base - 1.0, z, tol)?;
    let mut upper = integral_rep(base, z, tol)?;
    for _ in 0..=lifts {
        let next = z * upper - order * lower;
        lower = upper;
        upper = next;
        order += 1.0;
    }
    Ok((lower, upper))
}

/// `D_ν(z)` and its derivative with explicit quadrature tolerances.
pub fn cylinder_d_with(nu: f64, z: f64, tol: &Tolerances) -> Result<CylinderValue> {
    check_args(nu, z)?;
    let (value, next) = cylinder_pair(nu, z, tol)?;
    Ok(CylinderValue {
        value,
        derivative: 0.5 * z * value - next,
        nu,
        z,
    })
}

/// `D_ν(z)` and its derivative for `ν ∈ [-4, 4]`, `|z| <= 50`.
pub fn cylinder_d(nu: f64, z: f64) -> Result<CylinderValue> {
    cylinder_d_with(nu, z, &Tolerances::default())
}
