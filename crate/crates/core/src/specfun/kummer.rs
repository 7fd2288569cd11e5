//! Kummer's confluent hypergeometric function `M(a, c, z) = ₁F₁(a; c; z)`.
//!
//! Everything is summed from the defining power series. Terms are carried
//! with a shared binary exponent so that `M(1/2, n+1, b) ~ e^b` at
//! `b ~ 10^5` stays representable; negative arguments go through Kummer's
//! transformation `M(a, c, z) = e^z M(c - a, c, -z)`, which turns every
//! series used in this crate into one with positive terms.

use crate::error::{Error, Result};
use crate::numerics::{ldexp, ln_gamma, gamma, ScaledReal, GAMMA_MAX_ARG};

/// Largest `|z|` accepted.
pub const KUMMER_MAX_ARG: f64 = 1e6;

// Enough for |z| = 1e6 with c = 1, where the terms peak near k = z and
// spread over a few thousand indices on either side.
const MAX_TERMS: usize = 2_000_000;

// Tail bound relative to the largest partial sum; below f64 resolution.
const TAIL_EPS: f64 = 1e-17;

const RESCALE_AT: f64 = 1e150;
const RESCALE_EXP: i64 = 498; // 2^498 ~ 1e150

/// A Kummer function value with its summation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerValue {
    pub value: ScaledReal,
    pub terms_used: usize,
    pub converged: bool,
}

impl KummerValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    fn require_converged(self, func: &'static str) -> Result<ScaledReal> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NoConvergence {
                what: func,
                iterations: self.terms_used,
            })
        }
    }
}

fn check_args(func: &'static str, a: f64, c: f64, z: f64) -> Result<()> {
    if !a.is_finite() || !c.is_finite() || !z.is_finite() {
        return Err(Error::domain(func, format!("non-finite argument (a={a}, c={c}, z={z})")));
    }
    if c <= 0.0 && c == c.floor() {
        return Err(Error::domain(func, format!("c = {c} is a non-positive integer")));
    }
    if z.abs() > KUMMER_MAX_ARG {
        return Err(Error::domain(func, format!("|z| = {} exceeds {KUMMER_MAX_ARG}", z.abs())));
    }
    Ok(())
}

/// Sums `Σ (a)_k/(c)_k z^k/k!` directly.
///
/// Stops once the index is past the point where term ratios are monotone,
/// the ratio is below one, and the geometric tail bound is below
/// `TAIL_EPS` times the largest partial-sum magnitude seen. Measuring against
/// the largest magnitude keeps the stopping rule meaningful when the sum
/// cancels to nearly zero (as `M(-1/2, n+1, z)` does near its root).
pub(crate) fn sum_series(a: f64, c: f64, z: f64) -> KummerValue {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut scale = 1.0f64;
    let mut exp2: i64 = 0;
    let monotone_from = (c.abs().sqrt() + a.abs() + c.abs().min(a.abs()) + 2.0).ceil() as usize;
    let mut k = 0usize;
    let mut converged = false;
    while k < MAX_TERMS {
        let kf = k as f64;
        let ratio = (a + kf) * z / ((c + kf) * (kf + 1.0));
        term *= ratio;
        k += 1;
        if term == 0.0 {
            // polynomial case: a is a non-positive integer
            converged = true;
            break;
        }
        sum += term;
        scale = scale.max(sum.abs()).max(term.abs());
        if scale > RESCALE_AT {
            term = ldexp(term, -RESCALE_EXP);
            sum = ldexp(sum, -RESCALE_EXP);
            scale = ldexp(scale, -RESCALE_EXP);
            exp2 += RESCALE_EXP;
        }
        if k >= monotone_from {
            let kf = k as f64;
            let next = ((a + kf) * z / ((c + kf) * (kf + 1.0))).abs();
            if next < 1.0 && term.abs() * next / (1.0 - next) <= TAIL_EPS * scale {
                converged = true;
                break;
            }
        }
    }
    KummerValue {
        value: ScaledReal::new(sum, exp2),
        terms_used: k + 1,
        converged,
    }
}

/// `M(a, c, z)` for real arguments.
///
/// For `z >= 0` the series is summed directly; for `z < 0` Kummer's
/// transformation is applied first. The `converged` flag is cleared if the
/// term budget runs out.
pub fn kummer_m(a: f64, c: f64, z: f64) -> Result<KummerValue> {
    check_args("kummer_m", a, c, z)?;
    if z == 0.0 || a == 0.0 {
        return Ok(KummerValue {
            value: ScaledReal::ONE,
            terms_used: 1,
            converged: true,
        });
    }
    if z > 0.0 {
        return Ok(sum_series(a, c, z));
    }
    let mut v = sum_series(c - a, c, -z);
    v.value = v.value * ScaledReal::exp(z);
    Ok(v)
}

/// `M'(a, c, z) = (a/c) M(a+1, c+1, z)`.
pub fn kummer_m_prime(a: f64, c: f64, z: f64) -> Result<ScaledReal> {
    check_args("kummer_m_prime", a, c, z)?;
    if a == 0.0 {
        return Ok(ScaledReal::ZERO);
    }
    let m = kummer_m(a + 1.0, c + 1.0, z)?.require_converged("kummer_m_prime")?;
    Ok(m.mul_f64(a / c))
}

/// Logarithmic derivative `M'(a, c, z) / M(a, c, z)` for `a, c > 0`, `z >= 0`.
///
/// Both series have positive terms, and their `e^z` growth cancels in the
/// scaled quotient.
pub fn kummer_log_ratio(a: f64, c: f64, z: f64) -> Result<f64> {
    check_args("kummer_log_ratio", a, c, z)?;
    if !(a > 0.0 && c > 0.0 && z >= 0.0) {
        return Err(Error::domain(
            "kummer_log_ratio",
            format!("requires a > 0, c > 0, z >= 0 (a={a}, c={c}, z={z})"),
        ));
    }
    let num = kummer_m_prime(a, c, z)?;
    let den = kummer_m(a, c, z)?.require_converged("kummer_log_ratio")?;
    Ok(num.ratio(den))
}

/// Converged `M(a, c, z)` as a scaled value.
pub fn kummer_scaled(a: f64, c: f64, z: f64) -> Result<ScaledReal> {
    kummer_m(a, c, z)?.require_converged("kummer_m")
}

/// `Γ(p) / (Γ(q) Γ(r))` for positive arguments, through logarithms when any
/// argument is past the range of `Γ`.
fn gamma_quotient(p: f64, q: f64, r: f64) -> Result<ScaledReal> {
    if p.max(q).max(r) < GAMMA_MAX_ARG - 1.0 {
        return Ok(ScaledReal::from_f64(gamma(p)? / (gamma(q)? * gamma(r)?)));
    }
    Ok(ScaledReal::exp(ln_gamma(p)? - ln_gamma(q)? - ln_gamma(r)?))
}

/// Generalized Laguerre function
/// `L_ν^α(z) = Γ(α+ν+1) / (Γ(α+1) Γ(ν+1)) M(-ν, α+1, z)`, scaled.
pub fn laguerre_scaled(nu: f64, alpha: f64, z: f64) -> Result<ScaledReal> {
    for (label, arg) in [("alpha + nu + 1", alpha + nu + 1.0), ("alpha + 1", alpha + 1.0), ("nu + 1", nu + 1.0)] {
        if !(arg > 0.0) {
            return Err(Error::domain("laguerre", format!("{label} = {arg} must be > 0")));
        }
    }
    let factor = gamma_quotient(alpha + nu + 1.0, alpha + 1.0, nu + 1.0)?;
    Ok(factor * kummer_scaled(-nu, alpha + 1.0, z)?)
}

/// Generalized Laguerre function `L_ν^α(z)`.
pub fn laguerre(nu: f64, alpha: f64, z: f64) -> Result<f64> {
    Ok(laguerre_scaled(nu, alpha, z)?.to_f64())
}
