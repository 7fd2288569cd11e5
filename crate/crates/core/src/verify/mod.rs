//! Runtime invariant suites, one per module, looked up by name.
//!
//! Each [`Suite`] returns a list of [`CheckOutcome`]s; an evaluation error
//! inside a check is reported as a failed outcome rather than aborting the run.

mod suites;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::Tolerances;

pub use suites::{
    contiguous_residuals, DiskSuite, IntersectSuite, ModelsSuite, NumericsSuite, SpecfunSuite,
};

/// Settings shared by every suite in a run.
#[derive(Debug, Clone, Default)]
pub struct VerifyContext {
    pub tol: Tolerances,
}

impl VerifyContext {
    pub fn new(tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        Ok(Self { tol })
    }

    /// True when the run uses the default tolerances, so cached constants apply.
    pub fn is_default(&self) -> bool {
        self.tol == Tolerances::default()
    }
}

/// The result of one named check: `passed` iff `value <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

impl CheckOutcome {
    /// Compares a computed deviation with its threshold; NaN fails.
    pub fn bound(suite: &'static str, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
            detail: None,
        }
    }

    /// A yes/no property; recorded as 0 (holds) or 1 (violated) against threshold 0.
    pub fn holds(suite: &'static str, name: impl Into<String>, ok: bool, detail: Option<String>) -> Self {
        Self {
            suite,
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            passed: ok,
            detail,
        }
    }

    pub fn from_result(suite: &'static str, name: impl Into<String>, threshold: f64, value: Result<f64>) -> Self {
        let name = name.into();
        match value {
            Ok(v) => Self::bound(suite, name, v, threshold),
            Err(e) => Self::failed(suite, name, threshold, &e),
        }
    }

    pub fn failed(suite: &'static str, name: impl Into<String>, threshold: f64, error: &Error) -> Self {
        Self {
            suite,
            name: name.into(),
            value: f64::NAN,
            threshold,
            passed: false,
            detail: Some(error.to_string()),
        }
    }
}

/// A named group of invariant checks.
pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, ctx: &VerifyContext) -> Vec<CheckOutcome>;
}

/// Suites keyed by name, in registration order.
pub struct SuiteRegistry {
    suites: Vec<Box<dyn Suite>>,
}

impl SuiteRegistry {
    pub fn empty() -> Self {
        Self { suites: Vec::new() }
    }

    /// The five module suites.
    pub fn standard() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(NumericsSuite));
        registry.register(Box::new(SpecfunSuite));
        registry.register(Box::new(DiskSuite));
        registry.register(Box::new(IntersectSuite));
        registry.register(Box::new(ModelsSuite));
        registry
    }

    /// Adds a suite, replacing any suite with the same name.
    pub fn register(&mut self, suite: Box<dyn Suite>) {
        self.suites.retain(|s| s.name() != suite.name());
        self.suites.push(suite);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn Suite> {
        self.suites.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    /// Runs one suite (`only`) or all of them.
    pub fn run(&self, only: Option<&str>, ctx: &VerifyContext) -> Result<Vec<CheckOutcome>> {
        match only {
            Some(name) => {
                let suite = self.get(name).ok_or_else(|| {
                    Error::domain("verify", format!("unknown suite '{name}' (known: {})", self.names().join(", ")))
                })?;
                Ok(suite.run(ctx))
            }
            None => Ok(self.suites.iter().flat_map(|s| s.run(ctx)).collect()),
        }
    }
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(&'static str, bool);

    impl Suite for Fixed {
        fn name(&self) -> &'static str {
            self.0
        }
        fn description(&self) -> &'static str {
            "fixed outcome"
        }
        fn run(&self, _: &VerifyContext) -> Vec<CheckOutcome> {
            vec![CheckOutcome::holds(self.0, "fixed", self.1, None)]
        }
    }

    #[test]
    fn registry_filters_and_replaces() {
        let mut reg = SuiteRegistry::empty();
        reg.register(Box::new(Fixed("a", true)));
        reg.register(Box::new(Fixed("b", false)));
        reg.register(Box::new(Fixed("a", false)));
        assert_eq!(reg.names(), vec!["b", "a"]);
        let ctx = VerifyContext::default();
        assert!(!reg.run(Some("a"), &ctx).unwrap()[0].passed);
        assert_eq!(reg.run(None, &ctx).unwrap().len(), 2);
        assert!(reg.run(Some("zzz"), &ctx).is_err());
    }

    #[test]
    fn standard_names() {
        assert_eq!(
            SuiteRegistry::standard().names(),
            vec!["numerics", "specfun", "disk", "intersect", "models"]
        );
    }

    #[test]
    fn standard_suites_pass_at_default_tolerances() {
        let outcomes = SuiteRegistry::standard().run(None, &VerifyContext::default()).unwrap();
        let failures: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
        assert!(failures.is_empty(), "{failures:#?}");
        assert!(outcomes.len() > 20);
    }

    #[test]
    fn nan_never_passes() {
        assert!(!CheckOutcome::bound("s", "n", f64::NAN, 1.0).passed);
        let e = Error::domain("f", "x");
        assert!(!CheckOutcome::from_result("s", "n", 1.0, Err(e)).passed);
    }
}
