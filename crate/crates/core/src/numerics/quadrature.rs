//! Quadrature on bounded and semi-infinite intervals.
//!
//! Smooth panels use a globally adaptive 15-point Gauss–Kronrod rule.
//! Panels that touch an algebraic endpoint singularity `t^p`, `p > -1`, use
//! tanh-sinh (double-exponential) quadrature, which never evaluates the
//! endpoint itself and converges geometrically in the level count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Tolerances;
use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Gauss–Kronrod panel with the QUADPACK error heuristic.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, error }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Stops once the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`; fails after `quad_panels_max` panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerances) -> Result<QuadratureResult> {
    integrate_to(&f, a, b, tol.rel_tol, tol.abs_tol, tol.quad_panels_max)
}

fn integrate_to<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error: 0.0,
            panels: 0,
        });
    }
    let first = gk15(f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut panels = 1;
    while error > abs_tol.max(rel_tol * value.abs()) {
        if !value.is_finite() {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature (non-finite integrand)",
                iterations: panels,
            });
        }
        if panels >= max_panels {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                iterations: panels,
            });
        }
        let worst = heap.pop().expect("heap holds every live panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // panel can no longer be split in floating point
            return Err(Error::NoConvergence {
                what: "adaptive quadrature (panel underflow)",
                iterations: panels,
            });
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        panels += 1;
        // resum occasionally so cancellation in the running totals cannot drift
        if panels % 64 == 0 {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let abs_error = heap.iter().map(|p| p.error).sum();
    Ok(QuadratureResult {
        value,
        abs_error,
        panels,
    })
}

const TANH_SINH_TMAX: f64 = 4.0;
const TANH_SINH_MAX_LEVEL: u32 = 12;

/// Tanh-sinh integration of `f` over `[a, b]`, tolerating integrable
/// algebraic singularities at the endpoints.
///
/// Abscissae are generated as distances from the nearer endpoint, so a
/// singularity at `a = 0` is resolved down to subnormal distances. Near a
/// non-zero endpoint resolution stops at the spacing of doubles there; move
/// such singularities to the origin by a change of variable when full
/// accuracy matters.
pub fn integrate_tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerances) -> Result<QuadratureResult> {
    tanh_sinh_to(&f, a, b, tol.rel_tol, tol.abs_tol)
}

fn tanh_sinh_to<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadratureResult> {
    let half = 0.5 * (b - a);
    let center = a + half;
    let pi_2 = std::f64::consts::FRAC_PI_2;

    // contribution of the symmetric node pair at t (t > 0), or the centre at t = 0
    let node = |t: f64| -> f64 {
        if t == 0.0 {
            return pi_2 * f(center);
        }
        let u = pi_2 * t.sinh();
        let e = (-2.0 * u).exp();
        let dist = half * 2.0 * e / (1.0 + e);
        let (left, right) = (a + dist, b - dist);
        // a node that rounds onto its endpoint is dropped on that side only
        let values = if left == a { 0.0 } else { f(left) } + if right == b { 0.0 } else { f(right) };
        let cosh_u = u.cosh();
        let w = pi_2 * t.cosh() / (cosh_u * cosh_u);
        if w == 0.0 {
            return 0.0;
        }
        w * values
    };

    let mut step = 1.0;
    let count = (TANH_SINH_TMAX / step) as usize;
    let mut sum: f64 = (0..=count).map(|j| node(j as f64 * step)).sum();
    let mut estimate = sum * step * half;
    let mut evaluations = 2 * count + 1;
    for level in 1..=TANH_SINH_MAX_LEVEL {
        step *= 0.5;
        let count = (TANH_SINH_TMAX / step) as usize;
        let fresh: f64 = (1..=count).step_by(2).map(|j| node(j as f64 * step)).sum();
        evaluations += count + 1;
        sum += fresh;
        let next = sum * step * half;
        let diff = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            break;
        }
        // the error of level k is roughly the square of the level-to-level change
        if level >= 3 && diff <= abs_tol.max(rel_tol * estimate.abs()) {
            return Ok(QuadratureResult {
                value: estimate,
                abs_error: diff,
                panels: evaluations,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "tanh-sinh quadrature",
        iterations: TANH_SINH_MAX_LEVEL as usize,
    })
}

const MAX_TAIL_PANELS: usize = 64;

/// Integrates `f` over `(0, ∞)`.
///
/// `decay_scale` is the distance beyond which `f` is known to decay (for
/// integrands like `t^p e^{ct - t^2/2}` pass roughly `max(c, 0) + 1`).
/// The first panel `[0, min(1, decay_scale)]` uses tanh-sinh so that an
/// endpoint factor `t^p`, `p > -1`, is harmless. The remainder is covered by
/// Gauss–Kronrod panels of doubling width until one panel contributes less
/// than a tenth of the relative tolerance; at that point the tail beyond the
/// truncation is negligible for any integrand that keeps decaying.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, decay_scale: f64, tol: &Tolerances) -> Result<f64> {
    tol.validate()?;
    if !(decay_scale > 0.0) || !decay_scale.is_finite() {
        return Err(Error::domain(
            "integrate_semi_infinite",
            format!("decay_scale = {decay_scale} must be positive and finite"),
        ));
    }
    let head_end = decay_scale.min(1.0);
    let head = tanh_sinh_to(&f, 0.0, head_end, tol.rel_tol, tol.abs_tol)?;
    let mut total = head.value;
    let mut lo = head_end;
    let mut width = decay_scale.max(head_end);
    let mut settled = false;
    let mut panels_used = head.panels.min(tol.quad_panels_max);
    for k in 0..MAX_TAIL_PANELS {
        let hi = lo + width;
        let abs_target = tol.abs_tol.max(0.25 * tol.rel_tol * total.abs());
        let budget = tol.quad_panels_max.saturating_sub(panels_used).max(1);
        let piece = integrate_to(&f, lo, hi, tol.rel_tol, abs_target, budget)?;
        panels_used += piece.panels;
        total += piece.value;
        if !total.is_finite() {
            return Err(Error::NoConvergence {
                what: "semi-infinite quadrature (non-finite integrand)",
                iterations: k + 1,
            });
        }
        // the first tail panel always covers the bulk [head_end, decay_scale]
        if k >= 1 && piece.value.abs() <= 0.1 * tol.rel_tol * total.abs().max(tol.abs_tol) {
            settled = true;
            break;
        }
        lo = hi;
        width *= 2.0;
    }
    if !settled {
        return Err(Error::NoConvergence {
            what: "semi-infinite quadrature tail",
            iterations: MAX_TAIL_PANELS,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma;
    use approx::assert_relative_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    /// Crude composite midpoint rule on [0, upper] after the substitution
    /// t = u^2 (removes a t^{-1/2} endpoint factor); an independent oracle.
    fn midpoint_oracle<F: Fn(f64) -> f64>(f: F, upper: f64, n: usize) -> f64 {
        let umax = upper.sqrt();
        let h = umax / n as f64;
        (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) * h;
                f(u * u) * 2.0 * u
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn kronrod_weights_are_consistent() {
        let kronrod: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let gauss: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((kronrod - 2.0).abs() < 1e-15);
        assert!((gauss - 2.0).abs() < 1e-15);
        // G7K15 is exact for polynomials of degree 22
        let p = gk15(&|x: f64| x.powi(22), 0.0, 1.0);
        assert_relative_eq!(p.value, 1.0 / 23.0, max_relative = 1e-14);
    }

    #[test]
    fn bounded_smooth_integrals() {
        let r = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, &tol()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-13);
        let r = integrate(|x: f64| (-x * x).exp(), -6.0, 6.0, &tol()).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        let r = integrate_tanh_sinh(|x: f64| x.powf(-0.5), 0.0, 1.0, &tol()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-13);
        // Beta(1/2, 3/4), split so each singularity sits at the origin
        let beta = gamma(0.5).unwrap() * gamma(0.75).unwrap() / gamma(1.25).unwrap();
        let g = |x: f64, y: f64| x.powf(-0.5) * y.powf(-0.25);
        let left = integrate_tanh_sinh(|x: f64| g(x, 1.0 - x), 0.0, 0.5, &tol()).unwrap();
        let right = integrate_tanh_sinh(|y: f64| g(1.0 - y, y), 0.0, 0.5, &tol()).unwrap();
        assert_relative_eq!(left.value + right.value, beta, max_relative = 1e-13);
        // unsplit: limited by double spacing near 1 but still finite
        let r = integrate_tanh_sinh(|x: f64| g(x, 1.0 - x), 0.0, 1.0, &tol().with_rel_tol(1e-9)).unwrap();
        assert_relative_eq!(r.value, beta, max_relative = 1e-8);
    }

    #[test]
    fn semi_infinite_exponential() {
        let v = integrate_semi_infinite(|t: f64| (-t).exp(), 1.0, &tol()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn semi_infinite_half_gaussians_against_midpoint_oracle() {
        let f = |t: f64| t.powf(-0.5) * (-0.5 * t * t).exp();
        let oracle = midpoint_oracle(f, 40.0, 1_000_000);
        let closed = 2f64.powf(-0.75) * gamma(0.25).unwrap();
        assert_relative_eq!(oracle, closed, max_relative = 1e-9);
        let v = integrate_semi_infinite(f, 1.0, &tol()).unwrap();
        assert_relative_eq!(v, 2.155_800_549_540_928, max_relative = 1e-13);

        let g = |t: f64| t.sqrt() * (-0.5 * t * t).exp();
        let oracle = midpoint_oracle(g, 40.0, 1_000_000);
        let closed = 2f64.powf(-0.25) * gamma(0.75).unwrap();
        assert_relative_eq!(oracle, closed, max_relative = 1e-9);
        let v = integrate_semi_infinite(g, 1.0, &tol()).unwrap();
        assert_relative_eq!(v, 1.030_448_512_294_995_5, max_relative = 1e-13);
    }

    #[test]
    fn semi_infinite_gamma_property() {
        for &k in &[-0.5, 0.0, 0.5, 1.0, 2.0] {
            let v = integrate_semi_infinite(|t: f64| t.powf(k) * (-t).exp(), 1.0, &tol()).unwrap();
            let expected = gamma(k + 1.0).unwrap();
            assert!(
                ((v - expected) / expected).abs() <= tol().rel_tol,
                "k = {k}: {v} vs {expected}"
            );
        }
    }

    #[test]
    fn semi_infinite_shifted_peak() {
        // ∫ e^{-(t-30)^2/2} dt over (0, ∞) = sqrt(pi/2) (1 + erf(30/sqrt 2)) ≈ sqrt(2 pi)
        let v = integrate_semi_infinite(|t: f64| (-0.5 * (t - 30.0).powi(2)).exp(), 31.0, &tol()).unwrap();
        assert_relative_eq!(v, (2.0 * std::f64::consts::PI).sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(integrate_semi_infinite(|t: f64| (-t).exp(), 0.0, &tol()).is_err());
    }

    #[test]
    fn panel_budget_is_enforced() {
        let tight = Tolerances {
            rel_tol: 1e-15,
            quad_panels_max: 2,
            ..Tolerances::default()
        };
        let r = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &tight);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}
