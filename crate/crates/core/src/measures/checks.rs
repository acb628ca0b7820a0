use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{format_point, grid_max, integrate, integrate_density, visit_lattice, BoxDomain, GridSpec};
use crate::calculus::{d_alpha, laplacian, scalar_form, PolyForm, Prime};
use crate::error::{validation, Error, Result};
use crate::exterior::{ConstForm, Form};
use crate::poly::{norm_sq, CompiledPoly, Poly};
use crate::qma::{horizontal_hessian_direct, psh_violation};
use crate::quadrature::Refinement;
use crate::quaternion::{moore_det, HyperhermitianMatrix};
use crate::scalar::factorial;

const SAMPLE_SEED: u64 = 0x5eed;
const SAMPLES: usize = 64;
const BOUNDARY_TOL: f64 = 1e-8;

fn hypothesis(point: &[f64], message: impl Into<String>) -> Error {
    Error::Hypothesis { point: format_point(point), message: message.into() }
}

fn require_psh(u: &Poly<f64>, label: &str, samples: &[Vec<f64>], tol: f64) -> Result<()> {
    if let Some((p, v)) = psh_violation(u, samples, tol)? {
        return Err(hypothesis(&p, format!("{label} is not PSH: Hessian eigenvalue {v:e}")));
    }
    Ok(())
}

fn domain_samples(dom: &BoxDomain) -> Vec<Vec<f64>> {
    let mut s = dom.interior_samples(SAMPLES, SAMPLE_SEED);
    s.extend(dom.boundary_samples(SAMPLES, SAMPLE_SEED + 1));
    s
}

/// `det(A + B)` against `det A + det B`.
pub fn superadditivity_pointwise(a: &HyperhermitianMatrix<f64>, b: &HyperhermitianMatrix<f64>) -> Result<(f64, f64)> {
    let s = a.add(b)?;
    Ok((moore_det(&s), moore_det(a) + moore_det(b)))
}

/// `∫(Δ(u+v))ⁿ` against `∫(Δu)ⁿ + ∫(Δv)ⁿ`.
pub fn superadditivity_integral(u: &Poly<f64>, v: &Poly<f64>, dom: &BoxDomain, grid: &GridSpec) -> Result<(f64, f64)> {
    let lhs = integrate_density(&u.add(v), dom, grid)?.value();
    let rhs = integrate_density(u, dom, grid)?.value() + integrate_density(v, dom, grid)?.value();
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClnResult {
    /// Mass of `Δu_1∧…∧Δu_k∧βₙ^{n−k}` on `L`.
    pub lhs: f64,
    /// `∏_i sup_K |u_i|`.
    pub bound: f64,
    pub ratio: f64,
    pub refinement: Refinement,
}

struct CompiledForm {
    n: usize,
    degree: usize,
    terms: Vec<(Vec<usize>, CompiledPoly)>,
}

impl CompiledForm {
    fn new(f: &PolyForm<f64>) -> Self {
        Self { n: f.n(), degree: f.degree(), terms: f.terms().map(|(mi, c)| (mi.indices(), c.compile())).collect() }
    }

    fn at(&self, p: &[f64]) -> ConstForm<f64> {
        let mut out = Form::zero(self.n, self.degree);
        for (idx, c) in &self.terms {
            out.add_term(idx, c.eval(p));
        }
        out
    }
}

/// Chern-Levine-Nirenberg type estimate: reports `‖Δu_1∧…∧Δu_k‖_L` against `∏ ‖u_i‖_{C⁰(K)}`.
pub fn cln_check(
    us: &[Poly<f64>],
    k_dom: &BoxDomain,
    l_dom: &BoxDomain,
    grid: &GridSpec,
    tol: f64,
) -> Result<ClnResult> {
    let n = k_dom.n();
    if us.is_empty() || us.len() > n {
        return Err(validation(format!("need between 1 and {n} functions, got {}", us.len())));
    }
    if !l_dom.strictly_inside(k_dom) {
        return Err(validation("L must lie strictly inside K"));
    }
    let samples = domain_samples(k_dom);
    for (i, u) in us.iter().enumerate() {
        super::require_domain_for(u, k_dom)?;
        require_psh(u, &format!("u_{}", i + 1), &samples, tol)?;
    }
    let forms: Vec<CompiledForm> =
        us.iter().map(|u| laplacian(u).map(|f| CompiledForm::new(&f))).collect::<Result<_>>()?;
    let beta = ConstForm::<f64>::beta(n).wedge_power(n - us.len(), Complex::new(1.0, 0.0))?;
    let refinement = integrate(l_dom, grid, |p| {
        let mut acc = beta.clone();
        for f in &forms {
            acc = acc.wedge(&f.at(p)).expect("degrees fit");
        }
        acc.delta_n_coeff().expect("top degree").map_or(0.0, |c| c.re)
    })?;
    let mut bound = 1.0;
    for u in us {
        let c = u.compile();
        bound *= grid_max(k_dom, grid, |p| c.eval_re(p).abs())?;
    }
    let lhs = refinement.value();
    Ok(ClnResult { lhs, bound, ratio: lhs / bound, refinement })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub mass_u: f64,
    pub mass_v: f64,
    pub pass: bool,
}

/// For PSH `u ≥ v` with `u = v` on `∂Ω`: checks `∫_Ω(Δu)ⁿ ≤ ∫_Ω(Δv)ⁿ + tol`.
pub fn comparison_check(
    u: &Poly<f64>,
    v: &Poly<f64>,
    dom: &BoxDomain,
    grid: &GridSpec,
    tol: f64,
) -> Result<ComparisonResult> {
    super::require_domain_for(u, dom)?;
    super::require_domain_for(v, dom)?;
    let interior = dom.interior_samples(SAMPLES, SAMPLE_SEED);
    require_psh(u, "u", &interior, tol)?;
    require_psh(v, "v", &interior, tol)?;
    let (cu, cv) = (u.compile(), v.compile());
    for p in &interior {
        let (a, b) = (cu.eval_re(p), cv.eval_re(p));
        if a < b - tol {
            return Err(hypothesis(p, format!("u < v inside the domain ({a} < {b})")));
        }
    }
    for p in dom.boundary_samples(SAMPLES, SAMPLE_SEED + 1) {
        let (a, b) = (cu.eval_re(&p), cv.eval_re(&p));
        if (a - b).abs() > BOUNDARY_TOL * (1.0 + b.abs()) {
            return Err(hypothesis(&p, format!("u ≠ v on the boundary ({a} vs {b})")));
        }
    }
    let mass_u = integrate_density(u, dom, grid)?.value();
    let mass_v = integrate_density(v, dom, grid)?.value();
    Ok(ComparisonResult { mass_u, mass_v, pass: mass_u <= mass_v + tol })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinPrincipleResult {
    pub min_closure: f64,
    pub min_boundary: f64,
    pub pass: bool,
}

/// If `(Δu)ⁿ ≤ (Δv)ⁿ` on `Ω`, checks that `min(u − v)` over `Ω̄` is attained on `∂Ω`.
pub fn minimum_principle_check(
    u: &Poly<f64>,
    v: &Poly<f64>,
    dom: &BoxDomain,
    grid: &GridSpec,
    tol: f64,
) -> Result<MinPrincipleResult> {
    super::require_domain_for(u, dom)?;
    super::require_domain_for(v, dom)?;
    let (hu, hv) = (horizontal_hessian_direct(u)?.compile(), horizontal_hessian_direct(v)?.compile());
    let nf = factorial(dom.n()) as f64;
    for p in domain_samples(dom) {
        let (a, b) = (nf * hu.density(&p), nf * hv.density(&p));
        if a > b + tol {
            return Err(hypothesis(&p, format!("(Δu)ⁿ > (Δv)ⁿ ({a} > {b})")));
        }
    }
    let diff = u.sub(v).compile();
    let f = |p: &[f64]| diff.eval_re(p);
    let mut starts: Vec<(f64, Vec<f64>)> =
        dom.boundary_samples(8 * SAMPLES, SAMPLE_SEED + 2).into_iter().map(|p| (f(&p), p)).collect();
    let mut min_closure = f64::INFINITY;
    let mut lowest_inside: Option<Vec<f64>> = None;
    let faces_are_boundary = dom.gauge_radius.is_none();
    visit_lattice(dom, grid, |p, on_face| {
        let w = f(p);
        if w < min_closure {
            min_closure = w;
            lowest_inside = Some(p.to_vec());
        }
        if on_face && faces_are_boundary {
            starts.push((w, p.to_vec()));
        }
    })?;
    if let Some(p) = lowest_inside {
        let b = dom.project_to_boundary(&p);
        starts.push((f(&b), b));
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut min_boundary = f64::INFINITY;
    for (_, p) in starts.iter().take(8) {
        min_boundary = min_boundary.min(boundary_descent(dom, &f, p.clone()));
    }
    min_closure = min_closure.min(min_boundary);
    Ok(MinPrincipleResult { min_closure, min_boundary, pass: min_closure >= min_boundary - tol })
}

/// Pattern search for a local minimum of `f` along the boundary, starting from `p`.
fn boundary_descent(dom: &BoxDomain, f: &impl Fn(&[f64]) -> f64, mut p: Vec<f64>) -> f64 {
    let mut best = f(&p);
    let mut step = 0.25 * dom.half_widths.iter().cloned().fold(0.0, f64::max);
    while step > 1e-9 {
        let mut improved = false;
        for k in 0..p.len() {
            for sign in [1.0, -1.0] {
                let mut q = p.clone();
                q[k] += sign * step;
                let q = dom.project_to_boundary(&q);
                let w = f(&q);
                if w < best {
                    best = w;
                    p = q;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StokesResult {
    /// `∫_Ω h·d_αT`.
    pub volume_term: (f64, f64),
    /// `∫_Ω d_αh∧T`.
    pub boundary_term: (f64, f64),
    /// `|∫ h·d_αT + ∫ d_αh∧T|`.
    pub residual: f64,
    /// `max(|∫ h·d_αT|, |∫ d_αh∧T|, 1)`.
    pub scale: f64,
}

fn integrate_complex<F>(dom: &BoxDomain, grid: &GridSpec, f: F) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> Complex<f64> + Sync,
{
    let a = integrate(dom, grid, |p| f(p).re)?.value();
    let b = integrate(dom, grid, |p| f(p).im)?.value();
    Ok((a, b))
}

/// `∫_Ω h·d_αT = −∫_Ω d_αh∧T` for `h` vanishing on `∂Ω` and a `(2n−1)`-form `T`.
pub fn stokes_check(
    h: &Poly<f64>,
    t: &PolyForm<f64>,
    alpha: Prime,
    dom: &BoxDomain,
    grid: &GridSpec,
) -> Result<StokesResult> {
    let n = dom.n();
    super::require_domain_for(h, dom)?;
    if t.n() != n || t.degree() + 1 != 2 * n {
        return Err(validation(format!("T must be a {}-form on n = {n}", 2 * n - 1)));
    }
    let ch = h.compile();
    for p in dom.boundary_samples(SAMPLES, SAMPLE_SEED + 3) {
        let v = ch.eval_re(&p);
        if v.abs() > BOUNDARY_TOL {
            return Err(hypothesis(&p, format!("h does not vanish on the boundary ({v:e})")));
        }
    }
    // h, d_αT, d_αh and T are evaluated separately at each node
    let dt = d_alpha(t, alpha)?.delta_n_coeff()?.unwrap_or_else(|| Poly::zero(h.nvars())).compile();
    let dh = CompiledForm::new(&d_alpha(&scalar_form(h)?, alpha)?);
    let tc = CompiledForm::new(t);
    let a = integrate_complex(dom, grid, |p| dt.eval(p) * ch.eval_re(p))?;
    let b = integrate_complex(dom, grid, |p| {
        let w = dh.at(p).wedge(&tc.at(p)).expect("degrees fit");
        w.delta_n_coeff().expect("top degree").unwrap_or_default()
    })?;
    let residual = ((a.0 + b.0).powi(2) + (a.1 + b.1).powi(2)).sqrt();
    let scale = a.0.hypot(a.1).max(b.0.hypot(b.1)).max(1.0);
    Ok(StokesResult { volume_term: a, boundary_term: b, residual, scale })
}

/// `∫χ(Δu_j)ⁿ` for `u_j = u + |x|²/j` and `u′_j = u + (|x|² + 1)/j²`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub js: Vec<usize>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// `∫χ(Δu)ⁿ` computed directly.
    pub direct: f64,
    /// Polynomial extrapolation of each sequence to `j = ∞`.
    pub first_limit: f64,
    pub second_limit: f64,
    /// True if successive differences never grow.
    pub cauchy: bool,
}

/// `∫_Ω χ·n!·det(Hess u_k)` for each `u_k`.
pub fn ma_integral_table(us: &[Poly<f64>], chi: &Poly<f64>, dom: &BoxDomain, grid: &GridSpec) -> Result<Vec<f64>> {
    super::require_domain_for(chi, dom)?;
    let c = chi.compile();
    let nf = factorial(dom.n()) as f64;
    us.iter()
        .map(|u| {
            super::require_domain_for(u, dom)?;
            let h = horizontal_hessian_direct(u)?.compile();
            Ok(integrate(dom, grid, |p| c.eval_re(p) * nf * h.density(p))?.value())
        })
        .collect()
}

/// Neville evaluation at 0 of the interpolant through `(h_k, y_k)`.
fn extrapolate_to_zero(h: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let m = p.len();
    for level in 1..m {
        for i in 0..m - level {
            let (hi, hj) = (h[i], h[i + level]);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    p[0]
}

fn differences_nonincreasing(v: &[f64]) -> bool {
    let d: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-12)
}

/// Monge-Ampère masses along two PSH sequences decreasing to `u`.
///
/// For each point the density is a degree-`n` polynomial in `1/j` (resp. `1/j²`), so
/// extrapolating through more than `n` terms recovers the limit.
pub fn ma_convergence_check(
    u: &Poly<f64>,
    chi: &Poly<f64>,
    dom: &BoxDomain,
    grid: &GridSpec,
    js: &[usize],
    tol: f64,
) -> Result<ConvergenceTable> {
    let n = dom.n();
    if js.len() < 2 || js.contains(&0) {
        return Err(validation("need at least two positive indices j"));
    }
    if js.windows(2).any(|w| w[1] <= w[0]) {
        return Err(validation("indices j must increase"));
    }
    super::require_domain_for(u, dom)?;
    require_psh(u, "u", &domain_samples(dom), tol)?;
    let r2 = norm_sq::<f64>(n);
    let one = Poly::one(4 * n + 1);
    let seq_a: Vec<Poly<f64>> = js.iter().map(|&j| u.add(&r2.scale_real(&(1.0 / j as f64)))).collect();
    let seq_b: Vec<Poly<f64>> = js.iter().map(|&j| u.add(&r2.add(&one).scale_real(&(1.0 / (j * j) as f64)))).collect();
    let first = ma_integral_table(&seq_a, chi, dom, grid)?;
    let second = ma_integral_table(&seq_b, chi, dom, grid)?;
    let direct = ma_integral_table(std::slice::from_ref(u), chi, dom, grid)?[0];
    let ha: Vec<f64> = js.iter().map(|&j| 1.0 / j as f64).collect();
    let hb: Vec<f64> = js.iter().map(|&j| 1.0 / (j * j) as f64).collect();
    let first_limit = extrapolate_to_zero(&ha, &first);
    let second_limit = extrapolate_to_zero(&hb, &second);
    let cauchy = differences_nonincreasing(&first) && differences_nonincreasing(&second);
    Ok(ConvergenceTable { js: js.to_vec(), first, second, direct, first_limit, second_limit, cauchy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::GroupPoint;
    use crate::poly::parse_poly;

    fn unit_box() -> BoxDomain {
        BoxDomain::koranyi_box(GroupPoint::identity(1), 1.0).unwrap()
    }

    #[test]
    fn extrapolation_is_exact_on_polynomials() {
        let h = [1.0, 0.5, 0.25, 0.125];
        let y: Vec<f64> = h.iter().map(|x| 3.0 + 2.0 * x - x * x * x).collect();
        assert!((extrapolate_to_zero(&h, &y) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cln_scaling_and_subsets() {
        let k = unit_box();
        let l = BoxDomain::koranyi_box(GroupPoint::identity(1), 0.5).unwrap();
        let grid = GridSpec::default();
        let u = norm_sq::<f64>(1);
        let r = cln_check(std::slice::from_ref(&u), &k, &l, &grid, 1e-9).unwrap();
        assert!((r.lhs - 8.0 * 2f64.powi(5) * 0.5f64.powi(4) * 0.25).abs() < 1e-9);
        assert_eq!(r.bound, 4.0);
        let r3 = cln_check(&[u.scale_real(&3.0)], &k, &l, &grid, 1e-9).unwrap();
        assert!((r3.ratio - r.ratio).abs() < 1e-10 * r.ratio);
        assert!(cln_check(std::slice::from_ref(&u), &l, &k, &grid, 1e-9).is_err());
        assert!(matches!(cln_check(&[u.neg()], &k, &l, &grid, 1e-9), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn comparison_scaling_family() {
        let dom = BoxDomain::gauge_ball(GroupPoint::identity(1), 1.0).unwrap();
        let v = dom.gauge_defining_poly().unwrap();
        let grid = GridSpec { points_per_axis: 6, rule: "midpoint".into(), refinement_levels: 0 };
        let eps = 0.2;
        let u = v.scale_real(&(1.0 - eps));
        let r = comparison_check(&u, &v, &dom, &grid, 1e-9).unwrap();
        assert!(r.pass);
        assert!((r.mass_u / r.mass_v - (1.0 - eps)).abs() < 1e-3);
        assert!(matches!(comparison_check(&v, &u, &dom, &grid, 1e-9), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn minimum_principle_examples() {
        let dom = BoxDomain::gauge_ball(GroupPoint::identity(1), 1.0).unwrap();
        let v = dom.gauge_defining_poly().unwrap();
        let grid = GridSpec { points_per_axis: 6, rule: "midpoint".into(), refinement_levels: 0 };
        let r = minimum_principle_check(&v.scale_real(&0.5), &v, &dom, &grid, 1e-9).unwrap();
        assert!(r.pass && r.min_boundary.abs() < 1e-12);
        let c = Poly::real_constant(5, 2.0);
        let r = minimum_principle_check(&v.add(&c), &v, &dom, &grid, 1e-9).unwrap();
        assert!(r.pass && (r.min_closure - 2.0).abs() < 1e-12);
        assert!(minimum_principle_check(&v, &v.scale_real(&0.5), &dom, &grid, 1e-9).is_err());
    }

    #[test]
    fn stokes_on_box() {
        let dom = unit_box();
        let h: Poly<f64> = parse_poly("(1 - x1^2)*(1 - x2^2)*(1 - x3^2)*(1 - x4^2)*(1 - t^2)*(x1 + t)", 1).unwrap();
        let mut t = Form::zero(1, 1);
        t.add_term(&[0], parse_poly::<f64>("x2*t + x3^2", 1).unwrap());
        t.add_term(&[1], parse_poly::<f64>("x1*x4", 1).unwrap());
        let grid = GridSpec { points_per_axis: 3, rule: "gauss-legendre".into(), refinement_levels: 0 };
        for alpha in [Prime::Zero, Prime::One] {
            let r = stokes_check(&h, &t, alpha, &dom, &grid).unwrap();
            assert!(r.residual < 1e-10 * r.scale, "{r:?}");
        }
    }

    #[test]
    fn convergence_of_masses() {
        let dom = unit_box();
        let chi: Poly<f64> = parse_poly("(1 - x1^2)*(1 - t^2)", 1).unwrap();
        let grid = GridSpec { points_per_axis: 4, rule: "midpoint".into(), refinement_levels: 0 };
        let u = norm_sq::<f64>(1);
        let table = ma_convergence_check(&u, &chi, &dom, &grid, &[1, 2, 4, 8], 1e-9).unwrap();
        assert!(table.cauchy);
        assert!((table.first_limit - table.second_limit).abs() < 1e-6);
        assert!((table.first_limit - table.direct).abs() < 1e-6);
        let mass = |j: f64| (8.0 + 8.0 / j) * table.direct / 8.0;
        assert!((table.first[1] - mass(2.0)).abs() < 1e-9);
    }

    #[test]
    fn superadditivity_of_determinants() {
        let a = HyperhermitianMatrix::diagonal(&[1.0, 2.0]);
        let b = HyperhermitianMatrix::diagonal(&[3.0, 0.5]);
        let (l, r) = superadditivity_pointwise(&a, &b).unwrap();
        assert!(l >= r);
        assert_eq!(l, 4.0 * 2.5);
    }
}
