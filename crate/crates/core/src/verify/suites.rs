use rayon::prelude::*;

use super::{CheckOutcome, Suite, VerifyContext};
use crate::disk::{envelope, lambda_minus_n, lambda_n, lambda_n_prime, lambda_n_prime_alt, lambda_n_second_at_zprev};
use crate::error::Result;
use crate::intersect::{find_zn_range, zn_by_characterization, zn_with};
use crate::models::{
    c_of_beta, halfplane_argmin, halfplane_bottom, model_constants, model_constants_with, neumann_residual,
    ModelConstants,
};
use crate::numerics::{
    brent_root, central_diff, gamma, integrate_semi_infinite, DerivOrder, ScaledReal, Tolerances,
};
use crate::specfun::{cylinder_d_with, kummer_log_ratio, kummer_m_prime, kummer_scaled};

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates so a broken evaluation cannot pass
    values.into_iter().fold(0.0, |acc: f64, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}

fn collect_max<I, F>(items: I, f: F) -> Result<f64>
where
    I: IntoParallelIterator,
    F: Fn(I::Item) -> Result<f64> + Sync + Send,
{
    let values: Vec<f64> = items.into_par_iter().map(f).collect::<Result<_>>()?;
    Ok(max_of(values))
}

/// Relative residuals of the four contiguous relations at `(a, c, z)`,
/// each divided by the sum of the magnitudes of its terms.
pub fn contiguous_residuals(a: f64, c: f64, z: f64) -> Result<[f64; 4]> {
    let m = |a: f64, c: f64| kummer_scaled(a, c, z);
    let mz = ScaledReal::from_f64(z);
    let base = m(a, c)?;
    let prime = kummer_m_prime(a, c, z)?;
    let relative = |terms: &[ScaledReal]| {
        let total: ScaledReal = terms.iter().copied().sum();
        let size: ScaledReal = terms.iter().map(|t| t.abs()).sum();
        total.ratio(size).abs()
    };
    Ok([
        relative(&[m(a, c - 1.0)?.mul_f64(c - 1.0), base.mul_f64(a + 1.0 - c), -m(a + 1.0, c)?.mul_f64(a)]),
        relative(&[base.mul_f64(c), -m(a - 1.0, c)?.mul_f64(c), -(mz * m(a, c + 1.0)?)]),
        relative(&[m(a + 1.0, c)?.mul_f64(a), -base.mul_f64(a), -(mz * prime)]),
        relative(&[m(a - 1.0, c)?.mul_f64(c - a), base.mul_f64(z + a - c), -(mz * prime)]),
    ])
}

pub struct NumericsSuite;

impl Suite for NumericsSuite {
    fn name(&self) -> &'static str {
        "numerics"
    }

    fn description(&self) -> &'static str {
        "scaled reals, semi-infinite quadrature, bracketing roots"
    }

    fn run(&self, ctx: &VerifyContext) -> Vec<CheckOutcome> {
        const S: &str = "numerics";
        let mut out = Vec::new();

        let samples = [1.0, -3.5, 1e-310, 5e-324, 1.7e308, std::f64::consts::PI, -0.0];
        let exact = samples.iter().all(|&x| ScaledReal::from_f64(x).to_f64() == x);
        out.push(CheckOutcome::holds(S, "scaled round trip", exact, None));

        let terms: Vec<ScaledReal> = (1..=200).map(|k| ScaledReal::exp(0.37 * f64::from(k))).collect();
        let forward: ScaledReal = terms.iter().copied().sum();
        let backward: ScaledReal = terms.iter().rev().copied().sum();
        let paired: ScaledReal = terms.chunks(2).map(|p| p.iter().copied().sum::<ScaledReal>()).sum();
        let spread = max_of([(forward.ratio(backward) - 1.0).abs(), (forward.ratio(paired) - 1.0).abs()]);
        out.push(CheckOutcome::bound(S, "scaled sum grouping", spread, 2.0 * 200.0 * f64::EPSILON));

        let gamma_dev = collect_max(vec![-0.5, 0.0, 0.5, 1.0, 2.0], |k: f64| {
            let value = integrate_semi_infinite(|t| t.powf(k) * (-t).exp(), 1.0, &ctx.tol)?;
            Ok((value / gamma(k + 1.0)? - 1.0).abs())
        });
        out.push(CheckOutcome::from_result(S, "semi-infinite integral of t^k e^-t", 1e3 * ctx.tol.rel_tol.max(1e-13), gamma_dev));

        let cubic = |x: f64| x * x * x - x - 2.0;
        let roots: Result<Vec<f64>> = [(1.0, 2.0), (0.0, 3.0), (-1.0, 10.0)]
            .iter()
            .map(|&(lo, hi)| brent_root(cubic, lo, hi, &ctx.tol))
            .collect();
        let root_spread = roots.map(|r| max_of(r.iter().map(|x| (x - r[0]).abs())));
        out.push(CheckOutcome::from_result(S, "root invariant under bracket enlargement", 1e-10, root_spread));
        out
    }
}

pub struct SpecfunSuite;

impl Suite for SpecfunSuite {
    fn name(&self) -> &'static str {
        "specfun"
    }

    fn description(&self) -> &'static str {
        "Kummer contiguous relations and derivative, cylinder recurrences, equation, asymptotics, positivity"
    }

    fn run(&self, ctx: &VerifyContext) -> Vec<CheckOutcome> {
        const S: &str = "specfun";
        let tol = ctx.tol;
        let mut out = Vec::new();
        let mut grid = Vec::new();
        for a in [0.5, 1.5] {
            for c in [2.0, 5.0, 11.0] {
                for z in [0.1, 1.0, 10.0, 50.0] {
                    grid.push((a, c, z));
                }
            }
        }
        match grid.iter().map(|&(a, c, z)| contiguous_residuals(a, c, z)).collect::<Result<Vec<_>>>() {
            Ok(all) => {
                for (i, label) in ["i", "ii", "iii", "iv"].iter().enumerate() {
                    let worst = max_of(all.iter().map(|r| r[i]));
                    out.push(CheckOutcome::bound(S, format!("contiguous relation ({label})"), worst, 1e-10));
                }
            }
            Err(e) => out.push(CheckOutcome::failed(S, "contiguous relations", 1e-10, &e)),
        }

        let deriv = collect_max(grid.clone(), |(a, c, z)| {
            let closed = kummer_m_prime(a, c, z)?.to_f64();
            let fd = central_diff(|x| kummer_scaled(a, c, x).map(|v| v.to_f64()).unwrap_or(f64::NAN), z, DerivOrder::First);
            Ok((fd / closed - 1.0).abs())
        });
        out.push(CheckOutcome::from_result(S, "Kummer derivative vs difference quotient", 1e-6, deriv));

        let mut pts = Vec::new();
        for nu in [-1.5, -0.5, 0.5] {
            for z in [-2.0, -0.5, 0.0, 1.0, 3.0] {
                pts.push((nu, z));
            }
        }
        let d = move |nu: f64, z: f64| cylinder_d_with(nu, z, &tol);
        let rec = |which: usize| {
            collect_max(pts.clone(), move |(nu, z)| {
                let here = d(nu, z)?;
                let up = d(nu + 1.0, z)?.value;
                let down = d(nu - 1.0, z)?.value;
                Ok(match which {
                    0 => (here.derivative - 0.5 * z * here.value + up).abs(),
                    1 => (up - z * here.value + nu * down).abs(),
                    _ => (here.derivative + 0.5 * z * here.value - nu * down).abs(),
                })
            })
        };
        out.push(CheckOutcome::from_result(S, "cylinder recurrence D' - zD/2 + D_{v+1} = 0", 1e-9, rec(0)));
        out.push(CheckOutcome::from_result(S, "cylinder recurrence D_{v+1} - zD + vD_{v-1} = 0", 1e-9, rec(1)));
        out.push(CheckOutcome::from_result(S, "cylinder recurrence D' + zD/2 - vD_{v-1} = 0", 1e-9, rec(2)));

        let ode = collect_max(pts.clone(), move |(nu, z)| {
            let w = d(nu, z)?.value;
            let w2 = central_diff(|x| d(nu, x).map(|v| v.value).unwrap_or(f64::NAN), z, DerivOrder::Second);
            Ok((w2 - (0.25 * z * z - nu - 0.5) * w).abs() / w.abs().max(1e-3))
        });
        out.push(CheckOutcome::from_result(S, "Weber equation residual", 1e-5, ode));

        let asym = collect_max(vec![-1.5, -0.5], move |nu: f64| {
            let z = 12.0f64;
            Ok((d(nu, z)?.value * (0.25 * z * z).exp() * z.powf(-nu) - 1.0).abs())
        });
        out.push(CheckOutcome::from_result(S, "large-argument asymptotics at z = 12", 0.02, asym));

        let mut negative_orders = Vec::new();
        for nu in [-3.5, -2.0, -1.5, -0.75, -0.5, -0.1] {
            for i in 0..=20 {
                negative_orders.push((nu, -10.0 + f64::from(i)));
            }
        }
        let positive: Result<bool> = negative_orders
            .into_par_iter()
            .map(|(nu, z)| Ok(d(nu, z)?.value > 0.0))
            .collect::<Result<Vec<bool>>>()
            .map(|v| v.into_iter().all(|b| b));
        out.push(match positive {
            Ok(ok) => CheckOutcome::holds(S, "D_v > 0 for v < 0 on [-10, 10]", ok, None),
            Err(e) => CheckOutcome::failed(S, "D_v > 0 for v < 0 on [-10, 10]", 0.0, &e),
        });
        out
    }
}

pub struct DiskSuite;

/// Uniform grid of `count` points on `(0, upper]`.
fn open_grid(upper: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| upper * i as f64 / count as f64).collect()
}

impl Suite for DiskSuite {
    fn name(&self) -> &'static str {
        "disk"
    }

    fn description(&self) -> &'static str {
        "branch ordering and positivity, derivative formulas, envelope monotonicity and mode switching"
    }

    fn run(&self, ctx: &VerifyContext) -> Vec<CheckOutcome> {
        const S: &str = "disk";
        let mut out = Vec::new();
        let mut branch_grid = Vec::new();
        for n in 1..=20u32 {
            for b in open_grid(50.0, 50) {
                branch_grid.push((n, b));
            }
        }
        let excess = collect_max(branch_grid.clone(), |(n, b)| Ok(lambda_n(n, b)? - lambda_minus_n(n, b)?));
        out.push(CheckOutcome::from_result(S, "lambda_n(b) <= lambda_n(-b)", 0.0, excess));

        let negativity = collect_max(branch_grid, |(n, b)| Ok(-lambda_n(n, b)?.min(lambda_n(n - 1, b)?)));
        out.push(CheckOutcome::from_result(S, "branches nonnegative", 0.0, negativity));

        let mut deriv_pts = Vec::new();
        for n in [1u32, 3, 10] {
            for z in [1.0, 5.0, 20.0] {
                deriv_pts.push((n, z));
            }
        }
        let fd_dev = collect_max(deriv_pts.clone(), |(n, z)| {
            let closed = lambda_n_prime(n, z)?;
            let fd = central_diff(|x| lambda_n(n, x).unwrap_or(f64::NAN), z, DerivOrder::First);
            Ok((closed - fd).abs() / closed.abs().max(1.0))
        });
        out.push(CheckOutcome::from_result(S, "lambda_n' vs difference quotient", 1e-6, fd_dev));
        let forms = collect_max(deriv_pts, |(n, z)| Ok((lambda_n_prime(n, z)? - lambda_n_prime_alt(n, z)?).abs()));
        out.push(CheckOutcome::from_result(S, "two closed forms of lambda_n'", 1e-10, forms));

        let grid = open_grid(100.0, 2000);
        match envelope(&grid) {
            Ok(env) => {
                let increasing = env.windows(2).all(|w| w[1].lambda_dn > w[0].lambda_dn);
                out.push(CheckOutcome::holds(S, "envelope strictly increasing on (0, 100]", increasing, None));
                let switches = mode_switches_at_crossings(&env, &ctx.tol);
                out.push(match switches {
                    Ok(None) => CheckOutcome::holds(S, "mode switches by +1 at crossings", true, None),
                    Ok(Some(msg)) => CheckOutcome::holds(S, "mode switches by +1 at crossings", false, Some(msg)),
                    Err(e) => CheckOutcome::failed(S, "mode switches by +1 at crossings", 0.0, &e),
                });
            }
            Err(e) => out.push(CheckOutcome::failed(S, "envelope", 0.0, &e)),
        }
        out
    }
}

fn mode_switches_at_crossings(env: &[crate::disk::EnvelopePoint], tol: &Tolerances) -> Result<Option<String>> {
    for w in env.windows(2) {
        let (prev, next) = (w[0], w[1]);
        if next.active_mode == prev.active_mode {
            continue;
        }
        if next.active_mode != prev.active_mode + 1 {
            return Ok(Some(format!("mode jumps {} -> {} at b = {}", prev.active_mode, next.active_mode, next.b)));
        }
        let z = zn_with(prev.active_mode, tol)?;
        if !(prev.b <= z && z <= next.b) {
            return Ok(Some(format!("switch at ({}, {}] misses z_{} = {z}", prev.b, next.b, prev.active_mode)));
        }
    }
    Ok(None)
}

pub struct IntersectSuite;

impl Suite for IntersectSuite {
    fn name(&self) -> &'static str {
        "intersect"
    }

    fn description(&self) -> &'static str {
        "crossing characterizations, crossing identity, ordering, second derivative, beta trend, envelope sandwich"
    }

    fn run(&self, ctx: &VerifyContext) -> Vec<CheckOutcome> {
        const S: &str = "intersect";
        let tol = ctx.tol;
        let mut out = Vec::new();
        let records = match find_zn_range(0..=50, &tol) {
            Ok(r) => r,
            Err(e) => {
                out.push(CheckOutcome::failed(S, "crossing points n <= 50", 0.0, &e));
                return out;
            }
        };
        let agree = collect_max(records.clone(), |r| Ok((zn_by_characterization(r.n, &tol)? - r.z_n).abs()));
        out.push(CheckOutcome::from_result(S, "two characterizations of z_n agree", 1e-9, agree));
        out.push(CheckOutcome::bound(S, "lambda_n(z_n) = z_n - n - 1", max_of(records.iter().map(|r| r.residual_f)), 1e-8));
        out.push(CheckOutcome::bound(S, "M(-1/2, n+1, z_n) residual", max_of(records.iter().map(|r| r.residual_m)), 1e-9));
        let ordered = records.windows(2).all(|w| w[1].z_n > w[0].z_n) && records.iter().all(|r| r.z_n > f64::from(r.n) + 1.0);
        out.push(CheckOutcome::holds(S, "z_n increasing and z_n > n + 1", ordered, None));

        let stationary = collect_max(1..=30u32, |n| Ok(lambda_n_prime(n, records[n as usize - 1].z_n)?.abs()));
        out.push(CheckOutcome::from_result(S, "lambda_n'(z_{n-1}) = 0", 1e-6, stationary));
        let curvature = collect_max(1..=30u32, |n| {
            let z = records[n as usize - 1].z_n;
            // the same curvature as M'(1/2, n+1, z)/M(1/2, n+1, z) at the crossing
            Ok((lambda_n_second_at_zprev(n)? - kummer_log_ratio(0.5, f64::from(n) + 1.0, z)?).abs())
        });
        out.push(CheckOutcome::from_result(S, "lambda_n''(z_{n-1}) closed forms agree", 1e-6, curvature));

        let beta_trend = (|| -> Result<f64> {
            let alpha = crate::models::alpha()?;
            let second = (2.0 * alpha * alpha + 1.0) / 6.0;
            collect_max(vec![100u32, 400, 1600, 6400], |n| {
                let nf = f64::from(n);
                let beta = (zn_with(n, &tol)? - nf - 0.5) / nf.sqrt();
                Ok(nf * (beta - alpha - second / nf.sqrt()).abs())
            })
        })();
        out.push(CheckOutcome::from_result(S, "n |beta_n - alpha - (2 alpha^2 + 1)/(6 sqrt n)| bounded", 2.0, beta_trend));

        let sandwich = collect_max(1..=20u32, |n| {
            let (lo, hi) = (records[n as usize - 1].z_n, records[n as usize].z_n);
            let nf = f64::from(n);
            let grid: Vec<f64> = (0..=8).map(|k| lo + (hi - lo) * f64::from(k) / 8.0).collect();
            let env = envelope(&grid)?;
            Ok(max_of(env.iter().map(|p| {
                let below = (lo - nf) - p.lambda_dn;
                let above = p.lambda_dn - (hi - nf - 1.0);
                below.max(above)
            })))
        });
        out.push(CheckOutcome::from_result(S, "z_{n-1} - n <= lambda_DN <= z_n - n - 1", 1e-9, sandwich));
        out
    }
}

pub struct ModelsSuite;

fn constants_for(ctx: &VerifyContext) -> Result<ModelConstants> {
    if ctx.is_default() {
        model_constants().copied()
    } else {
        model_constants_with(&ctx.tol)
    }
}

impl Suite for ModelsSuite {
    fn name(&self) -> &'static str {
        "models"
    }

    fn description(&self) -> &'static str {
        "half-plane minimum, Neumann condition, limit-function identities, scaling"
    }

    fn run(&self, ctx: &VerifyContext) -> Vec<CheckOutcome> {
        const S: &str = "models";
        let tol = ctx.tol;
        let mut out = Vec::new();
        let constants = match constants_for(ctx) {
            Ok(c) => c,
            Err(e) => {
                out.push(CheckOutcome::failed(S, "model constants", 0.0, &e));
                return out;
            }
        };
        let alpha = constants.alpha;

        let first_order = (|| -> Result<f64> {
            let xi = halfplane_argmin(&tol)?;
            let w = cylinder_d_with(-0.5, -xi, &tol)?;
            Ok((0.5 * xi * w.value + w.derivative).abs())
        })();
        out.push(CheckOutcome::from_result(S, "first-order condition at argmin of f1", 1e-8, first_order));
        out.push(CheckOutcome::from_result(
            S,
            "Neumann condition at xi0",
            1e-7,
            neumann_residual(constants.xi0, &tol).map(f64::abs),
        ));

        let c_ode = collect_max(vec![-1.0, 0.0, alpha, 1.5], |beta: f64| {
            let c = |x: f64| c_of_beta(x).unwrap_or(f64::NAN);
            let (c0, c1, c2) = (c(beta), central_diff(c, beta, DerivOrder::First), central_diff(c, beta, DerivOrder::Second));
            Ok((c2 - beta * c1 - 0.5 * c0).abs() / c0.max(1.0))
        });
        out.push(CheckOutcome::from_result(S, "C'' - beta C' - C/2 = 0", 1e-5, c_ode));

        let positive = (0..=40)
            .map(|i| cylinder_d_with(-0.5, 2.0 - 0.1 * f64::from(i), &tol).map(|w| w.value > 0.0))
            .collect::<Result<Vec<bool>>>();
        out.push(match positive {
            Ok(v) => CheckOutcome::holds(S, "D_{-1/2}(-beta) > 0 on [-2, 2]", v.into_iter().all(|b| b), None),
            Err(e) => CheckOutcome::failed(S, "D_{-1/2}(-beta) > 0 on [-2, 2]", 0.0, &e),
        });

        let scaling = collect_max(vec![1.0, 2.0, 10.0, 100.0], |b: f64| Ok((halfplane_bottom(b)? / b.sqrt() - alpha).abs()));
        out.push(CheckOutcome::from_result(S, "half-plane bottom / sqrt(b) = alpha", 1e-14, scaling));
        out.push(CheckOutcome::bound(
            S,
            "Delta(alpha) = (1 - 10 alpha^2)/12",
            (constants.delta_alpha - (1.0 - 10.0 * alpha * alpha) / 12.0).abs(),
            1e-6,
        ));
        out.push(CheckOutcome::holds(
            S,
            "alpha <= sqrt(2) Theta0 / u0(0)^2",
            alpha <= constants.comparison_bound,
            Some(format!("alpha = {alpha}, bound = {}", constants.comparison_bound)),
        ));
        out
    }
}
