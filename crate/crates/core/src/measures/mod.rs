//! Grid integration of Monge-Ampère densities over boxes and gauge balls, and the
//! estimate and principle checks built on it.

mod checks;

pub use checks::{
    cln_check, comparison_check, ma_convergence_check, ma_integral_table, minimum_principle_check, stokes_check,
    superadditivity_integral, superadditivity_pointwise, ClnResult, ComparisonResult, ConvergenceTable,
    MinPrincipleResult, StokesResult,
};

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::heisenberg::GroupPoint;
use crate::poly::{check_group_n, gauge_quartic, Poly};
use crate::qma::horizontal_hessian_direct;
use crate::quadrature::{rule, tensor_integrate, Refinement};
use crate::scalar::factorial;

/// Axis-aligned box around `center`, optionally cut down to the gauge ball `‖center⁻¹ξ‖ < r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub center: GroupPoint<f64>,
    pub half_widths: Vec<f64>,
    pub gauge_radius: Option<f64>,
}

impl BoxDomain {
    pub fn new(center: GroupPoint<f64>, half_widths: Vec<f64>, gauge_radius: Option<f64>) -> Result<Self> {
        let dim = center.x.len() + 1;
        if half_widths.len() != dim {
            return Err(Error::Dimension(format!("expected {dim} half-widths, got {}", half_widths.len())));
        }
        if half_widths.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(validation("half-widths must be positive"));
        }
        if let Some(r) = gauge_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(validation("gauge radius must be positive"));
            }
        }
        check_group_n(center.n())?;
        Ok(Self { center, half_widths, gauge_radius })
    }

    /// Half-width `r` in every `x` and `r²` in `t`.
    pub fn koranyi_box(center: GroupPoint<f64>, r: f64) -> Result<Self> {
        let mut w = vec![r; center.x.len()];
        w.push(r * r);
        Self::new(center, w, None)
    }

    /// The smallest box containing `D(center, r)`, restricted to that ball.
    pub fn gauge_ball(center: GroupPoint<f64>, r: f64) -> Result<Self> {
        let x_norm = center.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut w = vec![r; center.x.len()];
        w.push(r * r + 2.0 * x_norm * r);
        Self::new(center, w, Some(r))
    }

    pub fn n(&self) -> usize {
        self.center.n()
    }

    pub fn dim(&self) -> usize {
        self.half_widths.len()
    }

    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        let c = if axis + 1 == self.dim() { self.center.t } else { self.center.x[axis] };
        (c - self.half_widths[axis], c + self.half_widths[axis])
    }

    /// `‖center⁻¹ξ‖`.
    pub fn gauge_distance(&self, coords: &[f64]) -> f64 {
        let p = GroupPoint { x: coords[..coords.len() - 1].to_vec(), t: coords[coords.len() - 1] };
        self.center.inv().mul(&p).map(|g| g.koranyi_norm()).unwrap_or(f64::INFINITY)
    }

    /// Closed box, and the open gauge ball when present.
    pub fn contains(&self, coords: &[f64]) -> bool {
        let in_box = (0..self.dim()).all(|k| {
            let (lo, hi) = self.bounds(k);
            (lo..=hi).contains(&coords[k])
        });
        in_box && self.gauge_radius.is_none_or(|r| self.gauge_distance(coords) < r)
    }

    /// True if `self` lies in the interior of `outer`.
    pub fn strictly_inside(&self, outer: &BoxDomain) -> bool {
        if self.dim() != outer.dim() {
            return false;
        }
        let boxed = (0..self.dim()).all(|k| {
            let (a, b) = self.bounds(k);
            let (c, d) = outer.bounds(k);
            c < a && b < d
        });
        if !boxed {
            return false;
        }
        match outer.gauge_radius {
            None => true,
            Some(r) => match (self.gauge_radius, self.center == outer.center) {
                (Some(s), true) => s < r,
                _ => corners(self).iter().all(|p| outer.gauge_distance(p) < r),
            },
        }
    }

    /// `‖center⁻¹ξ‖⁴ − r⁴`, which vanishes on the sphere of the gauge ball.
    pub fn gauge_defining_poly(&self) -> Result<Poly<f64>> {
        let r = self.gauge_radius.ok_or_else(|| validation("domain has no gauge ball"))?;
        let n = self.n();
        let shifted = crate::heisenberg::left_translate_poly(&gauge_quartic::<f64>(n), &self.center.inv())?;
        Ok(shifted.sub(&Poly::real_constant(4 * n + 1, r.powi(4))))
    }

    /// Interior sample points, deterministic in `seed`.
    pub fn interior_samples(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![self.center.coords()];
        let mut attempts = 0;
        while out.len() < count && attempts < 1000 * count.max(1) {
            attempts += 1;
            let p: Vec<f64> = (0..self.dim())
                .map(|k| {
                    let (lo, hi) = self.bounds(k);
                    rng.gen_range(lo..hi)
                })
                .collect();
            if self.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// Points on the boundary: box faces, or the gauge sphere when present.
    pub fn boundary_samples(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = self.dim();
        match self.gauge_radius {
            Some(r) => (0..count)
                .map(|_| {
                    let x: Vec<f64> = (0..dim - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let p = GroupPoint { x, t: rng.gen_range(-1.0..1.0) };
                    let g = p.koranyi_norm().max(1e-12);
                    let q = p.dilate(&(r / g)).expect("positive factor");
                    self.center.mul(&q).expect("same group").coords()
                })
                .collect(),
            None => (0..count)
                .map(|i| {
                    let axis = i % dim;
                    let side = (i / dim) % 2;
                    (0..dim)
                        .map(|k| {
                            let (lo, hi) = self.bounds(k);
                            if k == axis {
                                if side == 0 {
                                    lo
                                } else {
                                    hi
                                }
                            } else {
                                rng.gen_range(lo..hi)
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Maps a point to the boundary: dilation about the center onto the gauge sphere,
    /// or clamping into the box and moving the relatively farthest coordinate onto its face.
    pub fn project_to_boundary(&self, coords: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        match self.gauge_radius {
            Some(r) => {
                let p = GroupPoint { x: coords[..dim - 1].to_vec(), t: coords[dim - 1] };
                let mut q = self.center.inv().mul(&p).expect("same group");
                if q.koranyi_norm() < 1e-12 {
                    q.t = 1.0;
                }
                let q = q.dilate(&(r / q.koranyi_norm())).expect("positive factor");
                self.center.mul(&q).expect("same group").coords()
            }
            None => {
                let mut out: Vec<f64> = (0..dim)
                    .map(|k| {
                        let (lo, hi) = self.bounds(k);
                        coords[k].clamp(lo, hi)
                    })
                    .collect();
                let offset = |k: usize, v: f64| {
                    let (lo, hi) = self.bounds(k);
                    (v - 0.5 * (lo + hi)) / (0.5 * (hi - lo))
                };
                let far = (0..dim)
                    .max_by(|&a, &b| offset(a, out[a]).abs().total_cmp(&offset(b, out[b]).abs()))
                    .expect("nonempty");
                let (lo, hi) = self.bounds(far);
                out[far] = if offset(far, out[far]) < 0.0 { lo } else { hi };
                out
            }
        }
    }

    /// Euclidean box volume (the gauge restriction is not applied).
    pub fn box_volume(&self) -> f64 {
        self.half_widths.iter().map(|w| 2.0 * w).product()
    }
}

fn corners(d: &BoxDomain) -> Vec<Vec<f64>> {
    let dim = d.dim();
    (0..1usize << dim)
        .map(|mask| {
            (0..dim)
                .map(|k| {
                    let (lo, hi) = d.bounds(k);
                    if mask >> k & 1 == 1 {
                        hi
                    } else {
                        lo
                    }
                })
                .collect()
        })
        .collect()
}

/// Tensor grid: `points_per_axis` panels per axis (doubled per refinement level).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub rule: String,
    pub refinement_levels: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points_per_axis: 6, rule: "midpoint".into(), refinement_levels: 1 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_axis < 2 {
            return Err(validation("a grid needs at least 2 points per axis"));
        }
        rule(&self.rule).map(|_| ())
    }

    fn points(&self, level: usize) -> usize {
        self.points_per_axis << level
    }

    fn axes(&self, dom: &BoxDomain, level: usize) -> Result<Vec<Vec<(f64, f64)>>> {
        let r = rule(&self.rule)?;
        let m = self.points(level);
        let cells = if r.uses_endpoints() { m - 1 } else { m };
        Ok((0..dom.dim())
            .map(|k| {
                let (lo, hi) = dom.bounds(k);
                r.nodes(lo, hi, cells)
            })
            .collect())
    }

    /// `m` equally spaced points per axis including both endpoints.
    fn lattice(&self, dom: &BoxDomain, level: usize) -> Vec<Vec<f64>> {
        let m = self.points(level);
        (0..dom.dim())
            .map(|k| {
                let (lo, hi) = dom.bounds(k);
                (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
            })
            .collect()
    }
}

/// `∫_Ω f dV` at every refinement level.
pub fn integrate<F>(dom: &BoxDomain, grid: &GridSpec, f: F) -> Result<Refinement>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    grid.validate()?;
    Refinement::run(grid.refinement_levels, |level| {
        let axes = grid.axes(dom, level)?;
        Ok(match dom.gauge_radius {
            None => tensor_integrate(&axes, &f),
            Some(_) => tensor_integrate(&axes, |p| if dom.contains(p) { f(p) } else { 0.0 }),
        })
    })
}

/// Visits the endpoint lattice of the finest level; the flag marks points on a box face.
/// With a gauge ball only points in the closed ball are visited.
pub(crate) fn visit_lattice(dom: &BoxDomain, grid: &GridSpec, mut f: impl FnMut(&[f64], bool)) -> Result<()> {
    grid.validate()?;
    let axes = grid.lattice(dom, grid.refinement_levels);
    let mut idx = vec![0usize; axes.len()];
    let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    loop {
        let inside = dom.gauge_radius.is_none_or(|r| dom.gauge_distance(&point) <= r);
        if inside {
            let on_face = idx.iter().zip(&axes).any(|(&i, a)| i == 0 || i + 1 == a.len());
            f(&point, on_face);
        }
        let mut k = 0;
        loop {
            if k == axes.len() {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                point[k] = axes[k][idx[k]];
                break;
            }
            idx[k] = 0;
            point[k] = axes[k][0];
            k += 1;
        }
    }
}

/// `max_{ξ ∈ Ω̄} f(ξ)` over the endpoint lattice of the finest level.
pub fn grid_max<F>(dom: &BoxDomain, grid: &GridSpec, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = f64::NEG_INFINITY;
    visit_lattice(dom, grid, |p, _| best = best.max(f(p)))?;
    Ok(best)
}

fn require_domain_for(u: &Poly<f64>, dom: &BoxDomain) -> Result<()> {
    if u.nvars() != dom.dim() {
        return Err(Error::Dimension(format!(
            "polynomial has {} variables but the domain has dimension {}",
            u.nvars(),
            dom.dim()
        )));
    }
    Ok(())
}

/// `∫_Ω n!·det(Hess u) dV`, the mass of `(Δu)ⁿ`.
pub fn integrate_density(u: &Poly<f64>, dom: &BoxDomain, grid: &GridSpec) -> Result<Refinement> {
    require_domain_for(u, dom)?;
    let h = horizontal_hessian_direct(u)?.compile();
    let nf = factorial(dom.n()) as f64;
    integrate(dom, grid, |p| nf * h.density(p))
}

/// Writes `n!·det(Hess u)` on the endpoint lattice as CSV: coordinates, then density.
pub fn write_density_csv<W: Write>(u: &Poly<f64>, dom: &BoxDomain, points_per_axis: usize, mut w: W) -> Result<()> {
    require_domain_for(u, dom)?;
    let grid = GridSpec { points_per_axis, rule: "trapezoid".into(), refinement_levels: 0 };
    grid.validate()?;
    let n = dom.n();
    let h = horizontal_hessian_direct(u)?.compile();
    let nf = factorial(n) as f64;
    let header: Vec<String> = (1..=4 * n).map(|a| format!("x{a}")).chain(["t".into(), "density".into()]).collect();
    writeln!(w, "{}", header.join(","))?;
    let axes = grid.lattice(dom, 0);
    let total: usize = axes.iter().map(Vec::len).product();
    for flat in 0..total {
        let mut rem = flat;
        let point: Vec<f64> = axes
            .iter()
            .map(|a| {
                let v = a[rem % a.len()];
                rem /= a.len();
                v
            })
            .collect();
        if !dom.contains(&point) {
            continue;
        }
        let cols: Vec<String> = point.iter().chain([nf * h.density(&point)].iter()).map(|v| format!("{v}")).collect();
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}

pub(crate) fn format_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{norm_sq, parse_poly};

    fn unit_box(n: usize) -> BoxDomain {
        BoxDomain::koranyi_box(GroupPoint::identity(n), 1.0).unwrap()
    }

    #[test]
    fn constant_density_integral() {
        let dom = unit_box(1);
        let v = integrate_density(&norm_sq(1), &dom, &GridSpec::default()).unwrap();
        assert!((v.value() - 8.0 * 32.0).abs() < 1e-10 * 256.0);
        let lin: Poly<f64> = parse_poly("x1 + 3*t - x4", 1).unwrap();
        assert_eq!(integrate_density(&lin, &dom, &GridSpec::default()).unwrap().value(), 0.0);
    }

    #[test]
    fn gauge_ball_volume_converges() {
        // |D(0,1)| for n = 1: 2π² ∫ s³·2√(1−s⁴) ds = 2π²/3
        let dom = BoxDomain::gauge_ball(GroupPoint::identity(1), 1.0).unwrap();
        let grid = GridSpec { points_per_axis: 10, rule: "midpoint".into(), refinement_levels: 1 };
        let v = integrate(&dom, &grid, |_| 1.0).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2) / 3.0;
        assert!((v.value() - exact).abs() < 0.05 * exact, "{:?}", v.values);
    }

    #[test]
    fn domain_geometry() {
        let c = GroupPoint::new(vec![0.5, 0.0, 0.0, 0.0], 0.0).unwrap();
        let ball = BoxDomain::gauge_ball(c.clone(), 0.5).unwrap();
        for p in ball.boundary_samples(20, 3) {
            assert!((ball.gauge_distance(&p) - 0.5).abs() < 1e-12);
            assert!((0..5).all(|k| {
                let (lo, hi) = ball.bounds(k);
                lo - 1e-12 <= p[k] && p[k] <= hi + 1e-12
            }));
        }
        let inner = BoxDomain::gauge_ball(c, 0.25).unwrap();
        assert!(inner.strictly_inside(&ball));
        assert!(!ball.strictly_inside(&inner));
        assert!(BoxDomain::new(GroupPoint::identity(1), vec![1.0; 4], None).is_err());
        assert!(unit_box(1).contains(&[1.0, 0.0, 0.0, 0.0, -1.0]));
    }

    #[test]
    fn grid_max_hits_corners() {
        let dom = unit_box(1);
        let m = grid_max(&dom, &GridSpec::default(), |p| p[..4].iter().map(|v| v * v).sum()).unwrap();
        assert_eq!(m, 4.0);
    }

    #[test]
    fn csv_export() {
        let mut buf = Vec::new();
        write_density_csv(&norm_sq(1), &unit_box(1), 2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x1,x2,x3,x4,t,density");
        assert_eq!(lines.len(), 1 + 32);
        assert!(lines[1].ends_with(",8"));
    }
}
