//! Subcommands as trait objects, looked up by name.

use magsteklov::disk::{eigen_curves, envelope, lambda_n};
use magsteklov::intersect::{find_zn_range, fit_asymptotics, gap_zn, zn_with};
use magsteklov::models::{
    compute_alpha, degennes_f_with, delta, halfplane_argmin, halfplane_multiplier_with, model_constants,
    model_constants_with, neumann_residual, phi, ModelConstants,
};
use magsteklov::numerics::{central_diff, DerivOrder};
use magsteklov::specfun::cylinder_d_with;
use magsteklov::verify::{CheckOutcome, SuiteRegistry, VerifyContext};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{Defaults, Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{format_float, Body, Cell, Output, Table, SCHEMA_VERSION};

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn defaults(&self) -> Defaults {
        Defaults::default()
    }
    fn run(&self, cfg: &RunConfig) -> CliResult<Output>;
}

/// Commands in registration order, unique by name.
pub struct CommandRegistry {
    commands: Vec<Box<dyn Command>>,
}

impl CommandRegistry {
    pub fn standard() -> Self {
        let mut reg = Self { commands: Vec::new() };
        reg.register(Box::new(Curves));
        reg.register(Box::new(Envelope));
        reg.register(Box::new(Intersections));
        reg.register(Box::new(Asymptotics));
        reg.register(Box::new(Constants));
        reg.register(Box::new(Halfplane));
        reg.register(Box::new(Degennes));
        reg.register(Box::new(Verify));
        reg
    }

    pub fn register(&mut self, command: Box<dyn Command>) {
        self.commands.retain(|c| c.name() != command.name());
        self.commands.push(command);
    }

    pub fn get(&self, name: &str) -> CliResult<&dyn Command> {
        self.commands.iter().find(|c| c.name() == name).map(|c| c.as_ref()).ok_or_else(|| {
            CliError::Config(format!("unknown command '{name}' (known: {})", self.names().join(", ")))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.iter().map(|c| c.name()).collect()
    }

    /// One line per command for `--help`-style listings.
    pub fn summary(&self) -> String {
        self.commands.iter().map(|c| format!("  {:<14} {}\n", c.name(), c.about())).collect()
    }
}

fn require_nonnegative_field(cfg: &RunConfig) -> CliResult<()> {
    if cfg.b_min < 0.0 {
        return Err(CliError::Config(format!("b_min = {} must be >= 0 for {}", cfg.b_min, cfg.command)));
    }
    Ok(())
}

struct Curves;

impl Command for Curves {
    fn name(&self) -> &'static str {
        "curves"
    }

    fn about(&self) -> &'static str {
        "branch eigenvalues lambda_n(b) (pos) and lambda_n(-b) (neg) on a b grid"
    }

    fn run(&self, cfg: &RunConfig) -> CliResult<Output> {
        require_nonnegative_field(cfg)?;
        let grid = cfg.grid();
        let mut table = Table::new(vec!["n", "b", "lambda", "branch"]);
        for p in eigen_curves(cfg.n_min..=cfg.n_max, &grid)? {
            table.push(vec![p.n.into(), p.b.into(), p.lambda.into(), "pos".into()]);
        }
        let pairs: Vec<(u32, f64)> = (cfg.n_min..=cfg.n_max).flat_map(|n| grid.iter().map(move |&b| (n, b))).collect();
        let neg: Vec<f64> = pairs.par_iter().map(|&(n, b)| lambda_n(n, -b)).collect::<magsteklov::Result<_>>()?;
        for (&(n, b), lambda) in pairs.iter().zip(neg) {
            table.push(vec![n.into(), b.into(), lambda.into(), "neg".into()]);
        }
        Ok(Output::table(table))
    }
}

struct Envelope;

impl Command for Envelope {
    fn name(&self) -> &'static str {
        "envelope"
    }

    fn about(&self) -> &'static str {
        "ground-state envelope with its active mode and the large-field asymptote"
    }

    fn run(&self, cfg: &RunConfig) -> CliResult<Output> {
        require_nonnegative_field(cfg)?;
        let alpha = alpha_for(cfg)?;
        let shift = (alpha * alpha + 2.0) / 6.0;
        let mut table = Table::new(vec!["b", "active_mode", "lambda_dn", "asymptote"]);
        for p in envelope(&cfg.grid())? {
            table.push(vec![p.b.into(), p.active_mode.into(), p.lambda_dn.into(), (alpha * p.b.sqrt() - shift).into()]);
        }
        Ok(Output::table(table))
    }
}

fn alpha_for(cfg: &RunConfig) -> CliResult<f64> {
    Ok(if cfg.uses_default_tol() { magsteklov::models::alpha()? } else { compute_alpha(&cfg.tol)? })
}

struct Intersections;

impl Command for Intersections {
    fn name(&self) -> &'static str {
        "intersections"
    }

    fn about(&self) -> &'static str {
        "crossing points z_n with the residuals of their defining identities"
    }

    fn defaults(&self) -> Defaults {
        Defaults { n: (0, 50), ..Defaults::default() }
    }

    fn run(&self, cfg: &RunConfig) -> CliResult<Output> {
        let mut table = Table::new(vec!["n", "z_n", "lambda_at_zn", "beta_n", "residual_M", "residual_F"]);
        for r in find_zn_range(cfg.n_min..=cfg.n_max, &cfg.tol)? {
            table.push(vec![
                r.n.into(),
                r.z_n.into(),
                r.lambda_at_zn.into(),
                r.beta_n.into(),
                r.residual_m.into(),
                r.residual_f.into(),
            ]);
        }
        Ok(Output::table(table))
    }
}

struct Asymptotics;

impl Command for Asymptotics {
    fn name(&self) -> &'static str {
        "asymptotics"
    }

    fn about(&self) -> &'static str {
        "least-squares fit of z_n - n in sqrt(n), 1, n^-1/2, n^-1 against the predicted leading terms"
    }

    fn defaults(&self) -> Defaults {
        Defaults { n: (1000, 10_000), ..Defaults::default() }
    }

    fn run(&self, cfg: &RunConfig) -> CliResult<Output> {
        let records = find_zn_range(cfg.n_min..=cfg.n_max, &cfg.tol)?;
        let fit = fit_asymptotics(&records, 4).map_err(|e| CliError::Config(e.to_string()))?;
        let alpha = alpha_for(cfg)?;
        let predicted = [Some(alpha), Some((alpha * alpha + 2.0) / 3.0), None, None];
        let mut table = Table::new(vec!["term", "coefficient", "predicted", "abs_error"]);
        for ((term, c), p) in ["sqrt_n", "const", "n^-1/2", "n^-1"].iter().zip(&fit.coefficients).zip(predicted) {
            table.push(vec![(*term).into(), (*c).into(), p.into(), p.map(|p| (c - p).abs()).into()]);
        }
        let gap = gap_zn(cfg.n_max)?;
        let gap_law = 1.0 + 0.5 * alpha / f64::from(cfg.n_max).sqrt();
        table.push(vec!["gap_at_n_max".into(), gap.into(), gap_law.into(), (gap - gap_law).abs().into()]);
        table.push(vec!["max_fit_residual".into(), fit.max_residual.into(), Cell::Empty, Cell::Empty]);
        Ok(Output::table(table))
    }
}

struct Constants;

/// `(name, value, threshold)`; passes iff `value <= threshold`.
fn constant_checks(c: &ModelConstants, cfg: &RunConfig) -> CliResult<Vec<(&'static str, f64, f64)>> {
    let alpha = c.alpha;
    let f_formula = find_zn_range(0..=50, &cfg.tol)?.iter().map(|r| r.residual_f).fold(0.0, f64::max);
    let phi_prime = central_diff(|b| phi(b).unwrap_or(f64::NAN), alpha, DerivOrder::First);
    let d_half = cylinder_d_with(0.5, -alpha, &cfg.tol)?.value;
    let fixed_point = (halfplane_multiplier_with(alpha, &cfg.tol)? - alpha).abs();
    let argmin = (halfplane_argmin(&cfg.tol)? - alpha).abs();
    let delta_identity = (delta(alpha)? - (1.0 - 10.0 * alpha * alpha) / 12.0).abs();
    let crossing = (zn_with(0, &cfg.tol)? - 1.0 - lambda_n(0, zn_with(0, &cfg.tol)?)?).abs();
    Ok(vec![
        ("f_formula_max_residual", f_formula, 1e-8),
        ("phi_prime_alpha", (phi_prime - 0.5).abs(), 1e-6),
        ("alpha_zero_residual", d_half.abs(), 1e-10),
        ("halfplane_fixed_point", fixed_point, 1e-8),
        ("halfplane_argmin_error", argmin, 1e-6),
        ("neumann_residual_xi0", neumann_residual(c.xi0, &cfg.tol)?.abs(), 1e-7),
        ("delta_alpha_identity", delta_identity, 1e-6),
        ("first_crossing_identity", crossing, 1e-8),
        ("alpha_minus_comparison_bound", alpha - c.comparison_bound, 0.0),
    ])
}

impl Command for Constants {
    fn name(&self) -> &'static str {
        "constants"
    }

    fn about(&self) -> &'static str {
        "model constants with self-checks; exits nonzero if any check fails"
    }

    fn defaults(&self) -> Defaults {
        Defaults { format: Format::Json, ..Defaults::default() }
    }

    fn run(&self, cfg: &RunConfig) -> CliResult<Output> {
        let c = if cfg.uses_default_tol() { *model_constants()? } else { model_constants_with(&cfg.tol)? };
        let mut checks = Map::new();
        let mut failures = Vec::new();
        for (name, value, threshold) in constant_checks(&c, cfg)? {
            let passed = value <= threshold;
            if !passed {
                failures.push(name.to_owned());
            }
            checks.insert(name.to_owned(), json!({ "value": value, "threshold": threshold, "passed": passed }));
        }
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "alpha": c.alpha,
            "xi0": c.xi0,
            "theta0": c.theta0,
            "delta_alpha": c.delta_alpha,
            "u0_sq_at_0": c.u0_sq_at_0,
            "comparison_bound": c.comparison_bound,
            "resolved_tol": c.resolved_tol,
            "checks": Value::Object(checks),
        });
        Ok(Output { body: Body::Document(doc), failures })
    }
}

struct Halfplane;

impl Command for Halfplane {
    fn name(&self) -> &'static str {
        "halfplane"
    }

    fn about(&self) -> &'static str {
        "half-plane multiplier f1(x) and D_{1/2}(x) on an x grid (b range)"
    }

    fn defaults(&self) -> Defaults {
        Defaults { b: (-3.0, 3.0), steps: 121, ..Defaults::default() }
    }

    fn run(&self, cfg: &RunConfig) -> CliResult<Output> {
        let rows: Vec<(f64, f64, f64)> = cfg
            .grid()
            .into_par_iter()
            .map(|x| Ok((x, halfplane_multiplier_with(x, &cfg.tol)?, cylinder_d_with(0.5, x, &cfg.tol)?.value)))
            .collect::<magsteklov::Result<_>>()?;
        let mut table = Table::new(vec!["x", "f1", "d_half"]);
        for (x, f1, d) in rows {
            table.push(vec![x.into(), f1.into(), d.into()]);
        }
        Ok(Output::table(table))
    }
}

struct Degennes;

impl Command for Degennes {
    fn name(&self) -> &'static str {
        "degennes"
    }

    fn about(&self) -> &'static str {
        "De Gennes function f(xi) on a xi grid within [0, 1.5] (b range)"
    }

    fn defaults(&self) -> Defaults {
        Defaults { b: (0.0, 1.5), steps: 151, ..Defaults::default() }
    }

    fn run(&self, cfg: &RunConfig) -> CliResult<Output> {
        if cfg.b_min < 0.0 || cfg.b_max > 1.5 {
            return Err(CliError::Config(format!("xi range [{}, {}] must lie within [0, 1.5]", cfg.b_min, cfg.b_max)));
        }
        let values: Vec<f64> = cfg
            .grid()
            .into_par_iter()
            .map(|xi| degennes_f_with(xi, &cfg.tol))
            .collect::<magsteklov::Result<_>>()?;
        let mut table = Table::new(vec!["xi", "f"]);
        for (xi, f) in cfg.grid().into_iter().zip(values) {
            table.push(vec![xi.into(), f.into()]);
        }
        Ok(Output::table(table))
    }
}

struct Verify;

fn verify_report(outcomes: &[CheckOutcome]) -> String {
    let mut text = format!("{:<6} {:<10} {:<24} {:<24} check\n", "status", "suite", "value", "threshold");
    for o in outcomes {
        text.push_str(&format!(
            "{:<6} {:<10} {:<24} {:<24} {}{}\n",
            if o.passed { "PASS" } else { "FAIL" },
            o.suite,
            format_float(o.value),
            format_float(o.threshold),
            o.name,
            o.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default(),
        ));
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    text.push_str(&format!("{} checks, {} passed, {failed} failed\n", outcomes.len(), outcomes.len() - failed));
    text
}

impl Command for Verify {
    fn name(&self) -> &'static str {
        "verify"
    }

    fn about(&self) -> &'static str {
        "run the invariant suites (all, or one with --only); exits nonzero on failure"
    }

    fn run(&self, cfg: &RunConfig) -> CliResult<Output> {
        let registry = SuiteRegistry::standard();
        if let Some(name) = cfg.only.as_deref() {
            if registry.get(name).is_none() {
                return Err(CliError::Config(format!(
                    "unknown suite '{name}' (known: {})",
                    registry.names().join(", ")
                )));
            }
        }
        let ctx = VerifyContext::new(cfg.tol).map_err(|e| CliError::Config(e.to_string()))?;
        let outcomes = registry.run(cfg.only.as_deref(), &ctx)?;
        let failures = outcomes.iter().filter(|o| !o.passed).map(|o| format!("{}/{}", o.suite, o.name)).collect();
        let body = match cfg.format {
            Format::Csv => Body::Text(verify_report(&outcomes)),
            Format::Json => Body::Document(json!({ "schema_version": SCHEMA_VERSION, "outcomes": outcomes })),
        };
        Ok(Output { body, failures })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_knows_every_command_once() {
        let reg = CommandRegistry::standard();
        assert_eq!(
            reg.names(),
            vec!["curves", "envelope", "intersections", "asymptotics", "constants", "halfplane", "degennes", "verify"]
        );
        assert!(matches!(reg.get("nope"), Err(CliError::Config(_))));
    }

    #[test]
    fn report_counts_failures() {
        let outcomes = vec![
            CheckOutcome::bound("s", "good", 0.5, 1.0),
            CheckOutcome::bound("s", "bad", 2.0, 1.0),
        ];
        let text = verify_report(&outcomes);
        assert!(text.contains("FAIL   s"));
        assert!(text.ends_with("2 checks, 1 passed, 1 failed\n"));
    }
}
