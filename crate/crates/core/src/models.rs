//! Model problems behind the large-field behaviour: the constant `α`, the
//! half-plane multiplier `f₁`, the De Gennes root `ξ₀` with `Θ₀ = ξ₀²`, the
//! limit functions `Φ` and `Δ`, and the comparison bound `√2 Θ₀ / u₀(0)²`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{brent_root, golden_section_min, integrate, integrate_semi_infinite, Tolerances};
use crate::specfun::{cylinder_d_with, CylinderValue};

/// Constants resolved once at the default tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    /// `-α` is the negative zero of `D_{1/2}`.
    pub alpha: f64,
    pub xi0: f64,
    /// Always `xi0²`.
    pub theta0: f64,
    /// `Δ(α)` by quadrature.
    pub delta_alpha: f64,
    pub u0_sq_at_0: f64,
    /// `√2 Θ₀ / u₀(0)²`, an upper bound for `α`.
    pub comparison_bound: f64,
    pub resolved_tol: f64,
}

/// Upper end of the `u₀` normalization integral; the integrand is below `e^{-100}` past it.
pub const GROUND_STATE_CUTOFF: f64 = 12.0;

fn d(nu: f64, z: f64, tol: &Tolerances) -> Result<CylinderValue> {
    cylinder_d_with(nu, z, tol)
}

/// Root of `x ↦ D_{1/2}(-x)` on `(0.5, 1)`.
pub fn compute_alpha(tol: &Tolerances) -> Result<f64> {
    root_of(|x| Ok(d(0.5, -x, tol)?.value), 0.5, 1.0, tol)
}

fn root_of<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, tol: &Tolerances) -> Result<f64> {
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo * f_hi >= 0.0 {
        return Err(Error::InvalidBracket { lo, hi, f_lo, f_hi });
    }
    let mut failure = None;
    let root = brent_root(
        |x| {
            f(x).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            })
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

/// `α` at default tolerances, computed once.
pub fn alpha() -> Result<f64> {
    static ALPHA: OnceLock<Result<f64>> = OnceLock::new();
    ALPHA.get_or_init(|| compute_alpha(&Tolerances::default())).clone()
}

/// `f₁(ξ) = -2 D'_{-1/2}(-ξ) / D_{-1/2}(-ξ)`.
pub fn halfplane_multiplier(xi: f64) -> Result<f64> {
    halfplane_multiplier_with(xi, &Tolerances::default())
}

pub fn halfplane_multiplier_with(xi: f64, tol: &Tolerances) -> Result<f64> {
    let w = d(-0.5, -xi, tol)?;
    Ok(-2.0 * w.derivative / w.value)
}

/// Minimizer of `f₁` on `[0, 2]`.
///
/// Golden-section search brackets the minimum to `~1e-7`; comparing values
/// alone cannot go below `~sqrt(eps)`. Newton steps on symmetric differences
/// of `f₁` values then refine it, with bias `~h² f₁⁽³⁾/(6 f₁'')` and noise
/// `~eps/(f₁'' h)`, both near `1e-11` at `h = 1e-5`.
pub fn halfplane_argmin(tol: &Tolerances) -> Result<f64> {
    let f = |xi: f64| halfplane_multiplier_with(xi, tol);
    let mut failure = None;
    let coarse = golden_section_min(
        |xi| {
            f(xi).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            })
        },
        0.0,
        2.0,
        1e-7,
        tol.max_iter,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let mut x = coarse?;
    const H: f64 = 1e-5;
    for _ in 0..3 {
        let (lo, mid, hi) = (f(x - H)?, f(x)?, f(x + H)?);
        let curvature = lo - 2.0 * mid + hi;
        if !(curvature > 0.0) {
            break;
        }
        let step = 0.5 * H * (lo - hi) / curvature;
        x += step;
        if step.abs() < 1e-13 {
            break;
        }
    }
    Ok(x)
}

/// Bottom of the half-plane spectrum at field `b`: `√b α`.
pub fn halfplane_bottom(b: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain("halfplane_bottom", format!("b = {b} must be positive")));
    }
    Ok(b.sqrt() * alpha()?)
}

/// `ν(ξ) = (ξ² - 1)/2`.
pub fn degennes_nu(xi: f64) -> f64 {
    0.5 * (xi * xi - 1.0)
}

/// `f(ξ) = ξ D_{ν(ξ)}(-√2 ξ) + √2 D_{ν(ξ)+1}(-√2 ξ)` for `ξ ∈ [0, 1.5]`.
pub fn degennes_f(xi: f64) -> Result<f64> {
    degennes_f_with(xi, &Tolerances::default())
}

pub fn degennes_f_with(xi: f64, tol: &Tolerances) -> Result<f64> {
    if !(0.0..=1.5).contains(&xi) {
        return Err(Error::domain("degennes_f", format!("xi = {xi} outside [0, 1.5]")));
    }
    let z = -std::f64::consts::SQRT_2 * xi;
    let nu = degennes_nu(xi);
    let lower = d(nu, z, tol)?.value;
    let upper = d(nu + 1.0, z, tol)?.value;
    Ok(xi * lower + std::f64::consts::SQRT_2 * upper)
}

/// Root `ξ₀` of [`degennes_f`] on `(0.5, 1)`.
pub fn compute_xi0(tol: &Tolerances) -> Result<f64> {
    root_of(|xi| degennes_f_with(xi, tol), 0.5, 1.0, tol)
}

/// `D'_{ν(ξ)}(-√2 ξ)` via `D'_ν = -(z/2) D_ν + ν D_{ν-1}`; vanishes at `ξ₀`.
pub fn neumann_residual(xi: f64, tol: &Tolerances) -> Result<f64> {
    let z = -std::f64::consts::SQRT_2 * xi;
    let nu = degennes_nu(xi);
    Ok(-0.5 * z * d(nu, z, tol)?.value + nu * d(nu - 1.0, z, tol)?.value)
}

/// `Φ(β) = β + D_{1/2}(-β) / D_{-1/2}(-β)`.
pub fn phi(beta: f64) -> Result<f64> {
    let tol = Tolerances::default();
    Ok(beta + d(0.5, -beta, &tol)?.value / d(-0.5, -beta, &tol)?.value)
}

/// The integrals `∫₀^∞ e^{βs - s²/2} g(s) ds` for
/// `g = s^{1/2}, (s - s³/3) s^{1/2}, s^{-1/2}, (s - s³/3) s^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitIntegrals {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

pub fn limit_integrals(beta: f64, tol: &Tolerances) -> Result<LimitIntegrals> {
    if !beta.is_finite() || beta.abs() > 20.0 {
        return Err(Error::domain("limit_integrals", format!("|beta| = {} exceeds 20", beta.abs())));
    }
    let scale = beta.max(0.0) + 2.0;
    let weight = move |s: f64| (beta * s - 0.5 * s * s).exp();
    let cubic = |s: f64| s - s * s * s / 3.0;
    Ok(LimitIntegrals {
        a: integrate_semi_infinite(|s| weight(s) * s.sqrt(), scale, tol)?,
        b: integrate_semi_infinite(|s| weight(s) * cubic(s) * s.sqrt(), scale, tol)?,
        c: integrate_semi_infinite(|s| weight(s) / s.sqrt(), scale, tol)?,
        d: integrate_semi_infinite(|s| weight(s) * cubic(s) / s.sqrt(), scale, tol)?,
    })
}

/// `Φ(β) = A/C` by direct quadrature.
pub fn phi_quadrature(beta: f64) -> Result<f64> {
    let m = limit_integrals(beta, &Tolerances::default())?;
    Ok(m.a / m.c)
}

/// `Δ(β) = (BC - AD)/C²` by direct quadrature.
pub fn delta(beta: f64) -> Result<f64> {
    let m = limit_integrals(beta, &Tolerances::default())?;
    Ok((m.b * m.c - m.a * m.d) / (m.c * m.c))
}

/// `C(β) = ∫₀^∞ e^{βs - s²/2} s^{-1/2} ds`.
pub fn c_of_beta(beta: f64) -> Result<f64> {
    Ok(limit_integrals(beta, &Tolerances::default())?.c)
}

/// `D(β)/C(β)`, whose derivative is `Δ(β)`.
pub fn d_over_c(beta: f64) -> Result<f64> {
    let m = limit_integrals(beta, &Tolerances::default())?;
    Ok(m.d / m.c)
}

/// `u₀(0)²` of the normalized De Gennes ground state and the bound `√2 Θ₀ / u₀(0)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBound {
    pub u0_sq: f64,
    pub bound: f64,
}

pub fn comparison_bound_at(xi0: f64, tol: &Tolerances) -> Result<ComparisonBound> {
    let nu = degennes_nu(xi0);
    let shape = |t: f64| d(nu, std::f64::consts::SQRT_2 * (t - xi0), tol).map(|w| w.value);
    let at_zero = shape(0.0)?;
    // the outer rule nests the inner quadrature, so ask for less than it delivers
    let outer = tol.with_rel_tol(tol.rel_tol.max(1e-11));
    let failure = std::cell::OnceCell::new();
    let norm_sq = integrate(
        |t| {
            shape(t).map(|v| v * v).unwrap_or_else(|e| {
                let _ = failure.set(e);
                f64::NAN
            })
        },
        0.0,
        GROUND_STATE_CUTOFF,
        &outer,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let u0_sq = at_zero * at_zero / norm_sq?.value;
    Ok(ComparisonBound {
        u0_sq,
        bound: std::f64::consts::SQRT_2 * xi0 * xi0 / u0_sq,
    })
}

/// [`comparison_bound_at`] for the cached `ξ₀`.
pub fn comparison_bound() -> Result<ComparisonBound> {
    let c = model_constants()?;
    Ok(ComparisonBound {
        u0_sq: c.u0_sq_at_0,
        bound: c.comparison_bound,
    })
}

fn resolve_constants(tol: &Tolerances) -> Result<ModelConstants> {
    let alpha = compute_alpha(tol)?;
    let xi0 = compute_xi0(tol)?;
    let bound = comparison_bound_at(xi0, tol)?;
    let m = limit_integrals(alpha, tol)?;
    Ok(ModelConstants {
        alpha,
        xi0,
        theta0: xi0 * xi0,
        delta_alpha: (m.b * m.c - m.a * m.d) / (m.c * m.c),
        u0_sq_at_0: bound.u0_sq,
        comparison_bound: bound.bound,
        resolved_tol: tol.rel_tol,
    })
}

/// All model constants at default tolerances, computed once per process.
pub fn model_constants() -> Result<&'static ModelConstants> {
    static CONSTANTS: OnceLock<Result<ModelConstants>> = OnceLock::new();
    CONSTANTS
        .get_or_init(|| resolve_constants(&Tolerances::default()))
        .as_ref()
        .map_err(Clone::clone)
}

/// Constants resolved at caller-chosen tolerances, bypassing the cache.
pub fn model_constants_with(tol: &Tolerances) -> Result<ModelConstants> {
    tol.validate()?;
    resolve_constants(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{central_diff, gamma, DerivOrder};

    #[test]
    fn alpha_is_a_zero_of_half_order_function() {
        let a = alpha().unwrap();
        assert!(a > 0.0 && a < 1.0);
        let tol = Tolerances::default();
        assert!(d(0.5, -a, &tol).unwrap().value.abs() <= 1e-10);
        assert!((halfplane_multiplier(a).unwrap() - a).abs() <= 1e-8);
    }

    #[test]
    fn multiplier_at_origin() {
        // D'_{-1/2}(0) = -D_{1/2}(0), and D_ν(0) = 2^{ν/2} √π / Γ((1-ν)/2)
        let d_half = 2f64.powf(0.25) * std::f64::consts::PI.sqrt() / gamma(0.25).unwrap();
        let d_minus_half = 2f64.powf(-0.25) * std::f64::consts::PI.sqrt() / gamma(0.75).unwrap();
        assert!((halfplane_multiplier(0.0).unwrap() - 2.0 * d_half / d_minus_half).abs() < 1e-11);
    }

    #[test]
    fn multiplier_derivative_law() {
        // f₁' = (ξ² - f₁²)/2 follows from the Weber equation
        for &xi in &[-1.0, 0.0, 0.4, 1.3] {
            let f = halfplane_multiplier(xi).unwrap();
            let fd = central_diff(|x| halfplane_multiplier(x).unwrap(), xi, DerivOrder::First);
            assert!((fd - 0.5 * (xi * xi - f * f)).abs() < 1e-7, "xi={xi}");
        }
    }

    #[test]
    fn bottom_scales_with_root_of_field() {
        let a = alpha().unwrap();
        for &b in &[1.0, 2.0, 10.0, 100.0] {
            assert!((halfplane_bottom(b).unwrap() / b.sqrt() - a).abs() < 1e-15);
        }
        assert!((halfplane_bottom(4.0).unwrap() - 2.0 * a).abs() < 1e-15);
        assert!(halfplane_bottom(0.0).is_err());
    }

    #[test]
    fn degennes_sign_change_and_neumann_condition() {
        assert!(degennes_f(0.5).unwrap() * degennes_f(1.0).unwrap() < 0.0);
        let tol = Tolerances::default();
        let xi0 = compute_xi0(&tol).unwrap();
        assert!(degennes_f(xi0).unwrap().abs() <= 1e-7);
        assert!(neumann_residual(xi0, &tol).unwrap().abs() <= 1e-7);
        assert!(degennes_f(1.6).is_err());
    }

    #[test]
    fn phi_two_routes() {
        for &beta in &[0.0, 0.5, 1.0, -1.5] {
            let a = phi(beta).unwrap();
            let b = phi_quadrature(beta).unwrap();
            assert!((a - b).abs() <= 1e-9, "beta={beta}: {a} vs {b}");
        }
    }

    #[test]
    fn delta_is_derivative_of_d_over_c() {
        for &beta in &[-0.5, 0.3, 1.2] {
            let fd = central_diff(|x| d_over_c(x).unwrap(), beta, DerivOrder::First);
            assert!((delta(beta).unwrap() - fd).abs() <= 1e-5, "beta={beta}");
        }
    }

    #[test]
    fn c_solves_its_ode() {
        for &beta in &[-1.0, 0.0, 0.77, 1.5] {
            let c = c_of_beta(beta).unwrap();
            let c1 = central_diff(|x| c_of_beta(x).unwrap(), beta, DerivOrder::First);
            let c2 = central_diff(|x| c_of_beta(x).unwrap(), beta, DerivOrder::Second);
            assert!((c2 - beta * c1 - 0.5 * c).abs() <= 1e-5 * c.max(1.0), "beta={beta}");
        }
    }

    #[test]
    fn denominator_positive_on_window() {
        let tol = Tolerances::default();
        for i in 0..=40 {
            let beta = -2.0 + 0.1 * f64::from(i);
            assert!(d(-0.5, -beta, &tol).unwrap().value > 0.0);
        }
    }
}
