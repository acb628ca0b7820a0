//! Named verification suites, looked up in a registry and run against a [`SuiteContext`].

mod brackets;
mod hessian;
mod identities;
mod lines;
mod measures;
mod positivity;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measures::GridSpec;
use crate::poly::check_group_n;
use crate::quadrature::QuadratureSpec;
use crate::report::{CheckRecord, ReportDocument};
use crate::scalar::Mode;

pub use brackets::Brackets;
pub use hessian::Hessian;
pub use identities::Identities;
pub use lines::Lines;
pub use measures::Measures;
pub use positivity::Positivity;

/// Parameters shared by every suite.
#[derive(Clone, Debug)]
pub struct SuiteContext {
    pub n: usize,
    pub mode: Mode,
    pub seed: u64,
    /// Overrides each check's default tolerance when set.
    pub tol: Option<f64>,
    /// Overrides each suite's default number of random trials when set.
    pub trials: Option<usize>,
    pub quadrature: QuadratureSpec,
    pub grid: GridSpec,
}

impl SuiteContext {
    pub fn new(n: usize, mode: Mode, seed: u64) -> Result<Self> {
        check_group_n(n)?;
        Ok(Self {
            n,
            mode,
            seed,
            tol: None,
            trials: None,
            quadrature: QuadratureSpec::default(),
            grid: default_grid(n),
        })
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    /// A generator seeded from the run seed and a per-suite salt.
    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// Tensor grids over `4n + 1` dimensions: coarser as `n` grows.
pub fn default_grid(n: usize) -> GridSpec {
    match n {
        1 => GridSpec { points_per_axis: 6, rule: "midpoint".into(), refinement_levels: 1 },
        2 => GridSpec { points_per_axis: 3, rule: "midpoint".into(), refinement_levels: 0 },
        _ => GridSpec { points_per_axis: 2, rule: "midpoint".into(), refinement_levels: 0 },
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn run(&self, ctx: &SuiteContext) -> Result<Vec<CheckRecord>>;
}

/// Suites registered by name; `all` runs every registered suite in order.
#[derive(Clone)]
pub struct SuiteRegistry {
    suites: BTreeMap<&'static str, Arc<dyn Suite>>,
    order: Vec<&'static str>,
}

impl SuiteRegistry {
    pub fn empty() -> Self {
        Self { suites: BTreeMap::new(), order: Vec::new() }
    }

    pub fn register(&mut self, suite: Arc<dyn Suite>) {
        let name = suite.name();
        if self.suites.insert(name, suite).is_none() {
            self.order.push(name);
        }
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Suite>> {
        self.suites.get(name).cloned().ok_or_else(|| Error::Unknown { kind: "suite", name: name.into() })
    }

    /// Registered names in run order.
    pub fn names(&self) -> &[&'static str] {
        &self.order
    }

    /// Runs one suite, or all of them for `"all"`.
    pub fn run(&self, name: &str, ctx: &SuiteContext) -> Result<ReportDocument> {
        let start = Instant::now();
        let checks = if name == "all" {
            let mut out = Vec::new();
            for s in &self.order {
                out.extend(self.suites[s].run(ctx)?.into_iter().map(|c| c.scoped(s)));
            }
            out
        } else {
            self.get(name)?.run(ctx)?
        };
        Ok(ReportDocument {
            suite: name.into(),
            checks,
            seed: ctx.seed,
            n: ctx.n,
            mode: ctx.mode.as_str().into(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        })
    }
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Identities));
        r.register(Arc::new(Brackets));
        r.register(Arc::new(Positivity));
        r.register(Arc::new(Hessian));
        r.register(Arc::new(Lines));
        r.register(Arc::new(Measures));
        r
    }
}

/// Running maximum of a residual over trials.
#[derive(Default)]
pub(crate) struct Worst {
    pub residual: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub inputs: String,
    pub count: usize,
}

impl Worst {
    pub fn record(&mut self, lhs: f64, rhs: f64, residual: f64, inputs: impl std::fmt::Display) {
        use std::fmt::Write;
        self.count += 1;
        let _ = writeln!(self.inputs, "{inputs}");
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if residual >= self.residual || self.count == 1 {
            self.residual = residual;
            self.lhs = lhs;
            self.rhs = rhs;
        }
    }

    pub fn finish(self, name: &str, anchor: &str, tol: f64) -> CheckRecord {
        CheckRecord::with_residual(name, anchor, &self.inputs, self.lhs, self.rhs, self.residual, tol)
    }
}

/// Largest coefficient magnitude of a polynomial form.
pub(crate) fn form_norm<R: crate::scalar::Real>(f: &crate::calculus::PolyForm<R>) -> f64 {
    f.terms().map(|(_, c)| c.norm_inf()).fold(0.0, f64::max)
}

/// `‖a − b‖ / max(1, ‖b‖)`; zero exactly when the forms agree.
pub(crate) fn form_residual<R: crate::scalar::Real>(
    a: &crate::calculus::PolyForm<R>,
    b: &crate::calculus::PolyForm<R>,
) -> Result<f64> {
    Ok(form_norm(&a.sub(b)?) / form_norm(b).max(1.0))
}

/// Exact checks use tolerance 0 in rational mode.
pub(crate) fn exact_tol(ctx: &SuiteContext, float_default: f64) -> f64 {
    match ctx.mode {
        Mode::Rational => ctx.tol.unwrap_or(0.0),
        Mode::Float => ctx.tol_or(float_default),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_and_errors() {
        let r = SuiteRegistry::default();
        assert_eq!(r.names(), ["identities", "brackets", "positivity", "hessian", "lines", "measures"]);
        assert!(matches!(r.get("nope"), Err(Error::Unknown { .. })));
        assert!(SuiteContext::new(0, Mode::Float, 1).is_err());
    }

    #[test]
    fn brackets_suite_report() {
        let r = SuiteRegistry::default();
        let ctx = SuiteContext::new(1, Mode::Rational, 3).unwrap();
        let doc = r.run("brackets", &ctx).unwrap();
        assert!(doc.all_pass(), "{:?}", doc.failures().collect::<Vec<_>>());
        assert_eq!(doc.mode, "rational");
    }
}
