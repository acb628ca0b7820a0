//! Composite one-dimensional quadrature rules, selected by name, and tensor-grid integration.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

/// A composite rule on `[a, b]` split into equal panels.
pub trait QuadratureRule: Send + Sync {
    fn name(&self) -> &'static str;

    /// Nodes and weights for `cells` panels on `[a, b]`.
    fn nodes(&self, a: f64, b: f64, cells: usize) -> Vec<(f64, f64)>;

    /// True if the rule evaluates the interval endpoints.
    fn uses_endpoints(&self) -> bool {
        false
    }
}

pub struct Midpoint;

impl QuadratureRule for Midpoint {
    fn name(&self) -> &'static str {
        "midpoint"
    }

    fn nodes(&self, a: f64, b: f64, cells: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / cells as f64;
        (0..cells).map(|k| (a + (k as f64 + 0.5) * h, h)).collect()
    }
}

pub struct Trapezoid;

impl QuadratureRule for Trapezoid {
    fn name(&self) -> &'static str {
        "trapezoid"
    }

    fn nodes(&self, a: f64, b: f64, cells: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / cells as f64;
        (0..=cells)
            .map(|k| {
                let w = if k == 0 || k == cells { 0.5 * h } else { h };
                (a + k as f64 * h, w)
            })
            .collect()
    }

    fn uses_endpoints(&self) -> bool {
        true
    }
}

/// Four-point Gauss-Legendre on every panel.
pub struct GaussLegendre;

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_8),
];

impl QuadratureRule for GaussLegendre {
    fn name(&self) -> &'static str {
        "gauss-legendre"
    }

    fn nodes(&self, a: f64, b: f64, cells: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / cells as f64;
        let mut out = Vec::with_capacity(4 * cells);
        for k in 0..cells {
            let mid = a + (k as f64 + 0.5) * h;
            for &(x, w) in &GL4 {
                out.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
        out
    }
}

/// Rules registered by name.
#[derive(Clone)]
pub struct RuleRegistry {
    rules: BTreeMap<&'static str, Arc<dyn QuadratureRule>>,
}

impl RuleRegistry {
    pub fn empty() -> Self {
        Self { rules: BTreeMap::new() }
    }

    pub fn register(&mut self, rule: Arc<dyn QuadratureRule>) {
        self.rules.insert(rule.name(), rule);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn QuadratureRule>> {
        self.rules.get(name).cloned().ok_or_else(|| Error::Unknown { kind: "quadrature rule", name: name.to_string() })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.rules.keys().copied().collect()
    }
}

impl Default for RuleRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Midpoint));
        r.register(Arc::new(Trapezoid));
        r.register(Arc::new(GaussLegendre));
        r
    }
}

/// Looks a rule up in the default registry.
pub fn rule(name: &str) -> Result<Arc<dyn QuadratureRule>> {
    RuleRegistry::default().get(name)
}

/// Grid resolution for the two-dimensional line integrals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_cells: usize,
    pub t_cells: usize,
    pub refinement_levels: usize,
    pub rule: String,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { radial_cells: 48, t_cells: 48, refinement_levels: 1, rule: "gauss-legendre".into() }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial_cells == 0 || self.t_cells == 0 {
            return Err(validation("quadrature needs at least one cell per axis"));
        }
        rule(&self.rule).map(|_| ())
    }

    /// The same spec with cell counts multiplied by `2^level`.
    pub fn refined(&self, level: usize) -> Self {
        Self { radial_cells: self.radial_cells << level, t_cells: self.t_cells << level, ..self.clone() }
    }
}

/// Sum in a fixed binary tree, independent of thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `∫ f` over the box `Π [lo_k, hi_k]` with a tensor product of one-dimensional node sets.
///
/// The outermost axis is split across threads; slices are combined by [`pairwise_sum`].
pub fn tensor_integrate<F>(axes: &[Vec<(f64, f64)>], f: F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if axes.is_empty() || axes.iter().any(Vec::is_empty) {
        return 0.0;
    }
    let (first, rest) = axes.split_first().expect("nonempty");
    let slices: Vec<f64> = first
        .par_iter()
        .map(|&(x0, w0)| {
            let mut point = vec![0.0; axes.len()];
            point[0] = x0;
            w0 * inner_sum(rest, 1, &mut point, &f)
        })
        .collect();
    pairwise_sum(&slices)
}

fn inner_sum<F: Fn(&[f64]) -> f64>(axes: &[Vec<(f64, f64)>], depth: usize, point: &mut [f64], f: &F) -> f64 {
    match axes.split_first() {
        None => f(point),
        Some((axis, rest)) => {
            let mut acc = 0.0;
            for &(x, w) in axis {
                point[depth] = x;
                acc += w * inner_sum(rest, depth + 1, point, f);
            }
            acc
        }
    }
}

/// Values of a quadrature under successive refinements.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Refinement {
    pub values: Vec<f64>,
}

impl Refinement {
    pub fn run(levels: usize, mut f: impl FnMut(usize) -> Result<f64>) -> Result<Self> {
        let values = (0..=levels).map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    pub fn value(&self) -> f64 {
        *self.values.last().expect("at least one level")
    }

    /// `|v_L − v_{L−1}| / |v_L|`, or 0 with a single level.
    pub fn relative_change(&self) -> f64 {
        match self.values.len() {
            0 | 1 => 0.0,
            k => (self.values[k - 1] - self.values[k - 2]).abs() / self.values[k - 1].abs().max(1e-300),
        }
    }

    /// Successive absolute differences.
    pub fn differences(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).collect()
    }
}
