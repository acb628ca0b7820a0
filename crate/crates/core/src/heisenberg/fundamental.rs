use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::line::{line_field, pullback_to_line, LineFrame, LinePoint, LINE_NVARS};
use crate::error::{validation, Error, Result};
use crate::poly::Poly;
use crate::quadrature::{rule, tensor_integrate, QuadratureSpec, Refinement};
use crate::scalar::Real;

const DEGENERATE_TOL: f64 = 1e-12;

fn require_nondegenerate(frame: &LineFrame<f64>) -> Result<f64> {
    let lam = frame.lambda();
    if lam <= DEGENERATE_TOL {
        return Err(validation(format!("degenerate line: Λ = {lam:e}")));
    }
    Ok(lam)
}

/// `ρ_q = Λ²|λ|⁴ + t²` in the line variables.
pub fn rho_poly<R: Real>(frame: &LineFrame<R>) -> Poly<R> {
    let lam2 = (0..4).fold(Poly::zero(LINE_NVARS), |acc, k| acc.add(&Poly::var(LINE_NVARS, k).pow(2)));
    lam2.pow(2).scale_real(frame.lambda_sq()).add(&Poly::var(LINE_NVARS, 4).pow(2))
}

/// `Δ̃_q(−1/(ρ_q+ε)) − 32Λ²|λ|²ε/(ρ_q+ε)³` at `p`, with `X̃_jρ_q`, `X̃_j²ρ_q` differentiated exactly.
pub fn fs_residual(frame: &LineFrame<f64>, p: &LinePoint<f64>, eps: f64) -> Result<f64> {
    require_nondegenerate(frame)?;
    if eps < 0.0 {
        return Err(validation("ε must be nonnegative"));
    }
    let rho = rho_poly(frame);
    let pt = p.coords();
    let r = rho.eval(&pt).re + eps;
    if r == 0.0 {
        return Err(validation("ρ_q + ε vanishes at the origin"));
    }
    let mut lap = 0.0;
    for j in 1..=4 {
        let d1 = line_field(frame, j, &rho)?;
        let d2 = line_field(frame, j, &d1)?;
        let (g, h) = (d1.eval(&pt).re, d2.eval(&pt).re);
        lap += h / (r * r) - 2.0 * g * g / (r * r * r);
    }
    let lam2: f64 = p.lambda.norm_sqr();
    let closed = 32.0 * frame.lambda_sq() * lam2 * eps / (r * r * r);
    Ok(lap - closed)
}

/// `C_q⁻¹ = ∫ 32Λ²|λ|²/(ρ_q + 1)³ dλ dt` at every refinement level.
///
/// After the `S³` factor `2π²`, the integral runs over `(s, t) ∈ [0, ∞)²` (doubled for `t < 0`)
/// with `s = σ/(1−σ)` and `t = τ/(1−τ²)`.
pub fn cq_inverse(lambda: f64, quad: &QuadratureSpec) -> Result<Refinement> {
    if !(lambda > DEGENERATE_TOL) || !lambda.is_finite() {
        return Err(validation(format!("Λ must be positive, got {lambda}")));
    }
    quad.validate()?;
    let r = rule(&quad.rule)?;
    let l2 = lambda * lambda;
    Refinement::run(quad.refinement_levels, |level| {
        let spec = quad.refined(level);
        let axes = [r.nodes(0.0, 1.0, spec.radial_cells), r.nodes(0.0, 1.0, spec.t_cells)];
        let v = tensor_integrate(&axes, |p| {
            let (sig, tau) = (p[0], p[1]);
            if sig >= 1.0 || tau >= 1.0 {
                return 0.0;
            }
            let s = sig / (1.0 - sig);
            let ds = 1.0 / ((1.0 - sig) * (1.0 - sig));
            let den = 1.0 - tau * tau;
            let t = tau / den;
            let dt = (1.0 + tau * tau) / (den * den);
            let s2 = s * s;
            let rho = l2 * s2 * s2 + t * t + 1.0;
            32.0 * l2 * s2 * s2 * s / (rho * rho * rho) * ds * dt
        });
        Ok(4.0 * std::f64::consts::PI.powi(2) * v)
    })
}

/// `C_q`, the reciprocal of the finest [`cq_inverse`] value.
pub fn cq_constant(frame: &LineFrame<f64>, quad: &QuadratureSpec) -> Result<f64> {
    let lam = require_nondegenerate(frame)?;
    Ok(1.0 / cq_inverse(lam, quad)?.value())
}

/// `Γ_q(p) = −C_q/ρ_q(p)`.
pub fn fundamental_solution(frame: &LineFrame<f64>, p: &LinePoint<f64>, cq: f64) -> Result<f64> {
    require_nondegenerate(frame)?;
    if p.is_origin() {
        return Err(validation("the fundamental solution is singular at the origin"));
    }
    Ok(-cq / rho_poly(frame).eval(&p.coords()).re)
}

/// Gauge-polar nodes `(ρ, φ, weight)` on `D_q(0, r)` for `∫ K_q f dV / 2π²`:
/// `s = ρ√(cos φ/Λ)`, `t = ρ² sin φ`, `K_q dV = 2π² Λ⁻¹ ρ⁵ cos²φ dρ dφ`.
fn gauge_nodes(r: f64, spec: &QuadratureSpec) -> Result<Vec<Vec<(f64, f64)>>> {
    let q = rule(&spec.rule)?;
    let rho = q.nodes(0.0, r, spec.radial_cells);
    let phi = q.nodes(-FRAC_PI_2, FRAC_PI_2, spec.t_cells);
    Ok(vec![rho, phi])
}

/// `m_q` with `M_r^q(1) = 1`, from the kernel mass of the unit gauge ball.
pub fn mq_constant(lambda: f64, quad: &QuadratureSpec) -> Result<Refinement> {
    if !(lambda > DEGENERATE_TOL) {
        return Err(validation(format!("Λ must be positive, got {lambda}")));
    }
    quad.validate()?;
    Refinement::run(quad.refinement_levels, |level| {
        let axes = gauge_nodes(1.0, &quad.refined(level))?;
        let mass = tensor_integrate(&axes, |p| p[0].powi(5) * p[1].cos().powi(2));
        Ok(lambda / (2.0 * std::f64::consts::PI.powi(2) * mass))
    })
}

/// Per-`Λ` constants of a line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineConstants {
    pub lambda: f64,
    pub cq_inverse: Refinement,
    pub mq: Refinement,
}

impl LineConstants {
    pub fn cq(&self) -> f64 {
        1.0 / self.cq_inverse.value()
    }

    pub fn mq(&self) -> f64 {
        self.mq.value()
    }
}

pub fn line_constants(frame: &LineFrame<f64>, quad: &QuadratureSpec) -> Result<LineConstants> {
    let lambda = require_nondegenerate(frame)?;
    Ok(LineConstants { lambda, cq_inverse: cq_inverse(lambda, quad)?, mq: mq_constant(lambda, quad)? })
}

/// Memoizes [`LineConstants`] by `Λ` and quadrature spec.
#[derive(Default)]
pub struct LineConstantCache {
    entries: BTreeMap<(u64, String), LineConstants>,
}

impl LineConstantCache {
    pub fn get(&mut self, frame: &LineFrame<f64>, quad: &QuadratureSpec) -> Result<&LineConstants> {
        let lambda = require_nondegenerate(frame)?;
        let key = (lambda.to_bits(), format!("{quad:?}"));
        if !self.entries.contains_key(&key) {
            let c = line_constants(frame, quad)?;
            self.entries.insert(key.clone(), c);
        }
        Ok(&self.entries[&key])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn double_factorial_odd(k: u32) -> f64 {
    // (k − 1)!! for even k
    (1..k).step_by(2).map(f64::from).product()
}

/// Average of `ω^α` over the unit sphere `S³`.
fn sphere_moment(alpha: &[u8]) -> f64 {
    if alpha.iter().any(|&a| a % 2 == 1) {
        return 0.0;
    }
    let m: u32 = alpha.iter().map(|&a| u32::from(a)).sum::<u32>() / 2;
    let num: f64 = alpha.iter().map(|&a| double_factorial_odd(u32::from(a))).product();
    let den = 2f64.powi(m as i32) * (1..=m + 1).map(f64::from).product::<f64>();
    num / den
}

/// `M_r^q(u)(η) = (m_q/r⁶) ∫_{D_q(0,r)} K_q ι*_{η,q}u dV`, `K_q = Λ²|λ|²/‖(λ,t)‖_q²`.
///
/// The pulled-back polynomial is averaged over `S³` exactly; the remaining `(ρ, φ)`
/// integral is done by quadrature.
pub fn mean_value(frame: &LineFrame<f64>, u: &Poly<f64>, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    let lambda = require_nondegenerate(frame)?;
    let mq = mq_constant(lambda, quad)?.value();
    mean_value_with(frame, u, r, quad, mq)
}

/// [`mean_value`] with a precomputed `m_q`.
pub fn mean_value_with(frame: &LineFrame<f64>, u: &Poly<f64>, r: f64, quad: &QuadratureSpec, mq: f64) -> Result<f64> {
    let lambda = require_nondegenerate(frame)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(validation("radius must be positive"));
    }
    if !u.is_real() {
        return Err(Error::Validation("mean values need a real polynomial".into()));
    }
    let v = pullback_to_line(frame, u)?;
    // radial profile in (s, t)
    let mut radial = Poly::zero(2);
    for (e, c) in v.terms() {
        let w = sphere_moment(&e[..4]);
        if w == 0.0 {
            continue;
        }
        let deg: u32 = e[..4].iter().map(|&a| u32::from(a)).sum();
        radial.add_term(vec![deg as u8, e[4]], *c * w);
    }
    let profile = radial.compile();
    let axes = gauge_nodes(r, &quad.refined(quad.refinement_levels))?;
    let integral = tensor_integrate(&axes, |p| {
        let (rho, phi) = (p[0], p[1]);
        let c = phi.cos().max(0.0);
        let s = rho * (c / lambda).sqrt();
        let t = rho * rho * phi.sin();
        rho.powi(5) * c * c * profile.eval_re(&[s, t])
    });
    Ok(mq * 2.0 * std::f64::consts::PI.powi(2) / lambda * integral / r.powi(6))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::GroupPoint;
    use crate::poly::{norm_sq, parse_poly};
    use crate::quaternion::Quaternion;
    use std::f64::consts::PI;

    fn frame(q: Vec<Quaternion<f64>>) -> LineFrame<f64> {
        LineFrame::new(GroupPoint::identity(q.len()), q).unwrap()
    }

    #[test]
    fn sphere_moments() {
        assert_eq!(sphere_moment(&[0, 0, 0, 0]), 1.0);
        assert!((sphere_moment(&[2, 0, 0, 0]) - 0.25).abs() < 1e-15);
        assert!((sphere_moment(&[4, 0, 0, 0]) - 3.0 / 24.0).abs() < 1e-15);
        assert!((sphere_moment(&[2, 2, 0, 0]) - 1.0 / 24.0).abs() < 1e-15);
        assert_eq!(sphere_moment(&[1, 1, 0, 0]), 0.0);
    }

    #[test]
    fn residual_vanishes() {
        let f = frame(vec![Quaternion::new(1.0, 0.5, -0.3, 0.2), Quaternion::new(0.1, 0.0, 0.7, -1.0)]);
        for (l, t) in [(0.3, 0.1), (-1.2, 2.0), (0.05, -0.4)] {
            let p = LinePoint::new(Quaternion::new(l, 0.2, -l, 0.4), t);
            for eps in [1.0, 0.1, 0.0] {
                assert!(fs_residual(&f, &p, eps).unwrap().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cq_matches_closed_form_and_scaling() {
        let quad = QuadratureSpec { refinement_levels: 1, ..Default::default() };
        let base = cq_inverse(1.0, &quad).unwrap();
        assert!(base.relative_change() < 1e-4);
        assert!((base.value() - 4.0 * PI.powi(3)).abs() < 1e-6 * base.value());
        for lam in [0.5, 2.0, 3.7] {
            let v = cq_inverse(lam, &quad).unwrap().value();
            assert!((v * lam / base.value() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn mq_and_mean_values() {
        let quad = QuadratureSpec::default();
        assert!((mq_constant(2.0, &quad).unwrap().value() - 12.0 / PI.powi(3)).abs() < 1e-10);
        let eta = GroupPoint::new(vec![0.3, -0.2, 0.5, 1.0], 0.7).unwrap();
        let f = LineFrame::new(eta.clone(), vec![Quaternion::new(0.8, 0.1, -0.5, 0.3)]).unwrap();
        let one = Poly::one(5);
        assert!((mean_value(&f, &one, 0.5, &quad).unwrap() - 1.0).abs() < 1e-12);
        let lin: Poly<f64> = parse_poly("2*x1 - x3 + 4*t + 1", 1).unwrap();
        let at_eta = lin.eval(&eta.coords()).re;
        assert!((mean_value(&f, &lin, 0.5, &quad).unwrap() - at_eta).abs() < 1e-12);
        let sq = norm_sq::<f64>(1);
        let m = mean_value(&f, &sq, 0.5, &quad).unwrap();
        assert!(m > sq.eval(&eta.coords()).re);
        assert!(mean_value(&frame(vec![Quaternion::one(), Quaternion::unit_j()]), &Poly::one(9), 1.0, &quad).is_err());
    }

    #[test]
    fn fundamental_solution_errors() {
        let f = frame(vec![Quaternion::one()]);
        let origin = LinePoint::new(Quaternion::zero(), 0.0);
        assert!(fundamental_solution(&f, &origin, 1.0).is_err());
        let p = LinePoint::new(Quaternion::zero(), 2.0);
        assert_eq!(fundamental_solution(&f, &p, 1.0).unwrap(), -0.25);
    }
}
