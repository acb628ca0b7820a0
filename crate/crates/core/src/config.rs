//! TOML run configuration mirroring the command-line flags.
//!
//! ```toml
//! n = 2
//! mode = "rational"
//! seed = 7
//!
//! [grid]
//! points_per_axis = 4
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::measures::GridSpec;
use crate::quadrature::QuadratureSpec;
use crate::scalar::Mode;
use crate::suites::{default_grid, SuiteContext};

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points_per_axis: Option<usize>,
    pub rule: Option<String>,
    pub refinement_levels: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub radial_cells: Option<usize>,
    pub t_cells: Option<usize>,
    pub refinement_levels: Option<usize>,
    pub rule: Option<String>,
}

/// Every field is optional; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub n: Option<usize>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub trials: Option<usize>,
    pub report: Option<PathBuf>,
    pub grid: Option<GridConfig>,
    pub quadrature: Option<QuadratureConfig>,
}

/// 1-based line and column of a byte offset.
fn line_column(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

impl Config {
    pub fn parse(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_column(src, s.start));
            Error::Parse { line, column, message: e.message().trim().to_string() }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The grid for `n`, starting from the per-`n` default.
    pub fn grid_for(&self, n: usize) -> Result<GridSpec> {
        let mut g = default_grid(n);
        if let Some(c) = &self.grid {
            if let Some(p) = c.points_per_axis {
                g.points_per_axis = p;
            }
            if let Some(r) = &c.rule {
                g.rule = r.clone();
            }
            if let Some(l) = c.refinement_levels {
                g.refinement_levels = l;
            }
        }
        g.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(g)
    }

    pub fn quadrature_spec(&self) -> Result<QuadratureSpec> {
        let mut q = QuadratureSpec::default();
        if let Some(c) = &self.quadrature {
            if let Some(v) = c.radial_cells {
                q.radial_cells = v;
            }
            if let Some(v) = c.t_cells {
                q.t_cells = v;
            }
            if let Some(v) = c.refinement_levels {
                q.refinement_levels = v;
            }
            if let Some(r) = &c.rule {
                q.rule = r.clone();
            }
        }
        q.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(q)
    }

    /// Builds a suite context; `None` fields fall back to `n = 1`, float mode and seed 0.
    pub fn context(&self) -> Result<SuiteContext> {
        let n = self.n.unwrap_or(1);
        let mut ctx = SuiteContext::new(n, self.mode.unwrap_or(Mode::Float), self.seed.unwrap_or(0))?;
        if let Some(tol) = self.tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::Config(format!("tol must be a nonnegative number, got {tol}")));
            }
            ctx.tol = Some(tol);
        }
        ctx.trials = self.trials;
        ctx.grid = self.grid_for(n)?;
        ctx.quadrature = self.quadrature_spec()?;
        Ok(ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config() {
        let c = Config::parse(
            "n = 2\nmode = \"rational\"\nseed = 7\ntol = 1e-6\ntrials = 3\nreport = \"out.json\"\n\
             [grid]\npoints_per_axis = 4\nrule = \"trapezoid\"\n[quadrature]\nradial_cells = 8\n",
        )
        .unwrap();
        let ctx = c.context().unwrap();
        assert_eq!((ctx.n, ctx.mode, ctx.seed), (2, Mode::Rational, 7));
        assert_eq!(ctx.tol, Some(1e-6));
        assert_eq!(ctx.trials, Some(3));
        assert_eq!(ctx.grid.points_per_axis, 4);
        assert_eq!(ctx.grid.rule, "trapezoid");
        assert_eq!(ctx.quadrature.radial_cells, 8);
        assert_eq!(ctx.quadrature.t_cells, QuadratureSpec::default().t_cells);
        assert_eq!(c.report.as_deref(), Some(Path::new("out.json")));
    }

    #[test]
    fn empty_uses_defaults() {
        let ctx = Config::parse("").unwrap().context().unwrap();
        assert_eq!((ctx.n, ctx.mode, ctx.seed), (1, Mode::Float, 0));
        assert_eq!(ctx.grid, default_grid(1));
    }

    #[test]
    fn errors_carry_location() {
        match Config::parse("n = 1\nbogus = 2\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("{other:?}"),
        }
        match Config::parse("n = 1\nmode = \"complex\"\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Config::parse("n = 0").unwrap().context(), Err(Error::Limit(_))));
        assert!(matches!(Config::parse("[grid]\npoints_per_axis = 1").unwrap().context(), Err(Error::Config(_))));
        assert!(matches!(Config::parse("tol = -1.0").unwrap().context(), Err(Error::Config(_))));
    }
}
