use num_complex::Complex;

use super::GroupPoint;
use crate::calculus::Prime;
use crate::calculus::{RealField, VectorFieldId};
use crate::error::{validation, Error, Result};
use crate::poly::{check_group_n, Poly};
use crate::quadrature::{pairwise_sum, GaussLegendre, QuadratureRule};
use crate::quaternion::{HyperhermitianMatrix, QuatMatrix, Quaternion};

/// Discretized left regularization `u ↦ χ_ε * u` with `χ = c(1 − ‖ξ‖⁴)⁴` on `D(0, 1)`.
///
/// `(χ_ε * u)(ξ) = ∫ χ(g) u(δ_ε(g)⁻¹ξ) dg`, with `g = (ρω, s)`: Gauss-Legendre in `ρ = |y|`
/// and `s`, and a positive cubature on `S^{4n−1}` (exact to degree 5 for `n = 1`, degree 3
/// otherwise). Weights are normalized so that constants are reproduced exactly.
#[derive(Clone, Debug)]
pub struct Mollifier {
    n: usize,
    eps: f64,
    nodes: Vec<(GroupPoint<f64>, f64)>,
}

fn sphere_rule(d: usize) -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::new();
    let axis = |i: usize, s: f64| {
        let mut v = vec![0.0; d];
        v[i] = s;
        v
    };
    if d <= 4 {
        let b = 1.0 / (d * (d + 2)) as f64;
        let a = (4 - d) as f64 / (2 * d * (d + 2)) as f64;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..d {
            if a > 0.0 {
                out.push((axis(i, 1.0), a));
                out.push((axis(i, -1.0), a));
            }
            for j in i + 1..d {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut v = vec![0.0; d];
                    v[i] = si * h;
                    v[j] = sj * h;
                    out.push((v, b));
                }
            }
        }
    } else {
        let w = 1.0 / (2 * d) as f64;
        for i in 0..d {
            out.push((axis(i, 1.0), w));
            out.push((axis(i, -1.0), w));
        }
    }
    out
}

impl Mollifier {
    /// `cells` Gauss-Legendre panels on each of `ρ ∈ [0, 1]` and `s ∈ [−1, 1]`.
    pub fn new(n: usize, eps: f64, cells: usize) -> Result<Self> {
        check_group_n(n)?;
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(validation("ε must be positive"));
        }
        if cells == 0 {
            return Err(validation("need at least one cell"));
        }
        let d = 4 * n;
        let dirs = sphere_rule(d);
        let radial = GaussLegendre.nodes(0.0, 1.0, cells);
        let vertical = GaussLegendre.nodes(-1.0, 1.0, cells);
        let mut nodes = Vec::new();
        for &(rho, wr) in &radial {
            for &(s, ws) in &vertical {
                let g4 = rho.powi(4) + s * s;
                if g4 >= 1.0 {
                    continue;
                }
                let chi = (1.0 - g4).powi(4);
                let base = wr * ws * rho.powi(d as i32 - 1) * chi;
                for (dir, wd) in &dirs {
                    let x = dir.iter().map(|v| v * rho).collect();
                    let g = GroupPoint { x, t: s };
                    let scaled = g.dilate(&eps)?.inv();
                    nodes.push((scaled, base * wd));
                }
            }
        }
        let total: f64 = pairwise_sum(&nodes.iter().map(|(_, w)| *w).collect::<Vec<_>>());
        if !(total > 0.0) {
            return Err(validation("mollifier has no mass"));
        }
        for (_, w) in &mut nodes {
            *w /= total;
        }
        Ok(Self { n, eps, nodes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// `(χ_ε * u)(ξ)`; `u` is sampled at `δ_ε(g_k)⁻¹ξ`.
    pub fn apply<F>(&self, u: F, xi: &GroupPoint<f64>) -> Result<f64>
    where
        F: Fn(&GroupPoint<f64>) -> f64,
    {
        if xi.n() != self.n {
            return Err(Error::Dimension("point lives on a different group".into()));
        }
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (g, w) in &self.nodes {
            terms.push(w * u(&g.mul(xi)?));
        }
        Ok(pairwise_sum(&terms))
    }

    /// Convolution of a real polynomial.
    pub fn apply_poly(&self, u: &Poly<f64>, xi: &GroupPoint<f64>) -> Result<f64> {
        let c = u.compile();
        self.apply(|p| c.eval_re(&p.coords()), xi)
    }
}

fn step(n: usize, a: usize, h: f64) -> GroupPoint<f64> {
    let mut g = GroupPoint::identity(n);
    g.x[a - 1] = h;
    g
}

/// Central difference for `X_a f(ξ) = d/dh f(ξ·(h e_a, 0))` at `h = 0`.
pub fn fd_x<F>(f: F, xi: &GroupPoint<f64>, a: usize, h: f64) -> Result<f64>
where
    F: Fn(&GroupPoint<f64>) -> Result<f64>,
{
    let n = xi.n();
    if !(1..=4 * n).contains(&a) {
        return Err(Error::Index(format!("X_{a} out of range for n = {n}")));
    }
    let plus = f(&xi.mul(&step(n, a, h))?)?;
    let minus = f(&xi.mul(&step(n, a, -h))?)?;
    Ok((plus - minus) / (2.0 * h))
}

/// `X_a X_b f(ξ)` by mixed central differences along `ξ·(s e_a)·(r e_b)`.
fn fd_xx<F>(f: &F, xi: &GroupPoint<f64>, a: usize, b: usize, h: f64) -> Result<f64>
where
    F: Fn(&GroupPoint<f64>) -> Result<f64>,
{
    let n = xi.n();
    let mut acc = 0.0;
    for (s, r, sign) in [(h, h, 1.0), (h, -h, -1.0), (-h, h, -1.0), (-h, -h, 1.0)] {
        let p = xi.mul(&step(n, a, s))?.mul(&step(n, b, r))?;
        acc += sign * f(&p)?;
    }
    Ok(acc / (4.0 * h * h))
}

/// The horizontal Hessian `(2Δ_{l(n+m)}f + 2Δ_{lm}f·𝐣)` of a sampled function by finite
/// differences, symmetrized to hyperhermitian form.
pub fn fd_horizontal_hessian<F>(f: F, xi: &GroupPoint<f64>, h: f64) -> Result<HyperhermitianMatrix<f64>>
where
    F: Fn(&GroupPoint<f64>) -> Result<f64>,
{
    let n = xi.n();
    let d = 4 * n;
    let mut dd = vec![vec![0.0; d]; d];
    for (a, row) in dd.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = fd_xx(&f, xi, a + 1, b + 1, h)?;
        }
    }
    let comps = |field: VectorFieldId| -> Result<Vec<(Complex<f64>, usize)>> {
        let c = field.complex_components::<f64>(n)?.expect("Z fields are complex");
        Ok(c.into_iter()
            .map(|(z, rf)| match rf {
                RealField::X(a) => (z, a - 1),
                RealField::Dt => unreachable!("Z fields are horizontal"),
            })
            .collect())
    };
    // Δ_AB f = ½(Z_{A0′}Z_{B1′}f − Z_{B0′}Z_{A1′}f)
    let delta = |a: usize, b: usize| -> Result<Complex<f64>> {
        let mut acc = Complex::new(0.0, 0.0);
        for (outer, inner, sign) in [(a, b, 1.0), (b, a, -1.0)] {
            for (c0, i) in comps(VectorFieldId::Z(outer, Prime::Zero))? {
                for (c1, j) in comps(VectorFieldId::Z(inner, Prime::One))? {
                    acc += c0 * c1 * dd[i][j] * sign;
                }
            }
        }
        Ok(acc * 0.5)
    };
    let mut m = QuatMatrix::zeros(n, n);
    for l in 0..n {
        for k in 0..n {
            let a = delta(l, n + k)? * 2.0;
            let b = delta(l, k)? * 2.0;
            m.set(l, k, Quaternion::from_complex_pair(&a, &b));
        }
    }
    let sym = m.add(&m.adjoint())?.scale(&0.5);
    HyperhermitianMatrix::new(sym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{norm_sq, parse_poly};
    use crate::qma::hessian_at;

    #[test]
    fn sphere_rule_moments() {
        for d in [4, 8] {
            let r = sphere_rule(d);
            let tot: f64 = r.iter().map(|(_, w)| w).sum();
            assert!((tot - 1.0).abs() < 1e-14);
            let m2: f64 = r.iter().map(|(v, w)| w * v[0] * v[0]).sum();
            assert!((m2 - 1.0 / d as f64).abs() < 1e-14);
        }
        let r = sphere_rule(4);
        let m4: f64 = r.iter().map(|(v, w)| w * v[0].powi(4)).sum();
        let m22: f64 = r.iter().map(|(v, w)| w * v[0] * v[0] * v[1] * v[1]).sum();
        assert!((m4 - 3.0 / 24.0).abs() < 1e-14 && (m22 - 1.0 / 24.0).abs() < 1e-14);
    }

    #[test]
    fn constants_reproduced() {
        let m = Mollifier::new(1, 0.3, 4).unwrap();
        let xi = GroupPoint::new(vec![0.1, 0.2, -0.3, 0.4], 0.5).unwrap();
        assert!((m.apply(|_| 2.5, &xi).unwrap() - 2.5).abs() < 1e-13);
        assert!(Mollifier::new(1, 0.0, 4).is_err());
    }

    #[test]
    fn derivatives_commute_with_convolution() {
        let m = Mollifier::new(1, 0.2, 3).unwrap();
        let u: Poly<f64> = parse_poly("x1^2*t + x2*x3 - t^2 + x4^3", 1).unwrap();
        let xi = GroupPoint::new(vec![0.3, -0.1, 0.2, 0.4], 0.1).unwrap();
        for a in 1..=4 {
            let lhs = fd_x(|p| m.apply_poly(&u, p), &xi, a, 1e-4).unwrap();
            let xu = crate::calculus::apply_x(1, a, &u);
            let rhs = m.apply_poly(&xu, &xi).unwrap();
            assert!((lhs - rhs).abs() < 1e-6, "a = {a}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn fd_hessian_matches_symbolic() {
        let u: Poly<f64> = parse_poly("x1^2 + 2*x2^2 + x1*x3 + 3*x4^2 - x2*t + t*x4", 1).unwrap();
        let xi = GroupPoint::new(vec![0.2, 0.1, -0.4, 0.3], 0.2).unwrap();
        let c = u.compile();
        let fd = fd_horizontal_hessian(|p| Ok(c.eval_re(&p.coords())), &xi, 1e-3).unwrap();
        let exact = hessian_at(&u, &xi.coords()).unwrap();
        let diff = fd.matrix().sub(exact.matrix()).unwrap().norm_inf();
        assert!(diff < 1e-6, "{diff}");

        let m = Mollifier::new(1, 0.25, 3).unwrap();
        let sq = norm_sq::<f64>(1);
        let h = fd_horizontal_hessian(|p| m.apply_poly(&sq, p), &xi, 1e-3).unwrap();
        assert!(crate::quaternion::is_nonneg(&h, 1e-6));
    }
}
