//! The Heisenberg group `ℋ = ℝ^{4n+1}`, its quaternionic Heisenberg lines, fundamental
//! solutions, mean values and regularization.

mod convolve;
mod fundamental;
mod line;

pub use convolve::{fd_horizontal_hessian, fd_x, Mollifier};
pub use fundamental::{
    cq_constant, cq_inverse, fs_residual, fundamental_solution, line_constants, mean_value, mean_value_with,
    mq_constant, rho_poly, LineConstantCache, LineConstants,
};
pub use line::{
    is_degenerate, line_field, line_sublaplacian, pullback_to_line, pushforward_field, LineFrame, LinePoint, LINE_NVARS,
};

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::poly::{check_group_n, group_nvars, Poly};
use crate::scalar::{cx_real, Real};

/// Point `(x, t)` of the group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint<R = f64> {
    pub x: Vec<R>,
    pub t: R,
}

/// `⟨x, y⟩ = Σ_l (x_{2l−1}y_{2l} − x_{2l}y_{2l−1})`.
pub fn symplectic<R: Real>(x: &[R], y: &[R]) -> R {
    x.chunks(2)
        .zip(y.chunks(2))
        .fold(R::zero(), |acc, (a, b)| acc + a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone())
}

/// Homogeneous dimension `4n + 2`.
pub fn homogeneous_dimension(n: usize) -> usize {
    4 * n + 2
}

impl<R: Real> GroupPoint<R> {
    pub fn new(x: Vec<R>, t: R) -> Result<Self> {
        if x.is_empty() || !x.len().is_multiple_of(4) {
            return Err(Error::Dimension(format!("x must have length 4n, got {}", x.len())));
        }
        Ok(Self { x, t })
    }

    pub fn identity(n: usize) -> Self {
        Self { x: vec![R::zero(); 4 * n], t: R::zero() }
    }

    /// From `(x_1, …, x_{4n}, t)`.
    pub fn from_coords(c: &[R]) -> Result<Self> {
        let (t, x) = c.split_last().ok_or_else(|| validation("empty coordinate list"))?;
        Self::new(x.to_vec(), t.clone())
    }

    pub fn coords(&self) -> Vec<R> {
        let mut c = self.x.clone();
        c.push(self.t.clone());
        c
    }

    pub fn n(&self) -> usize {
        self.x.len() / 4
    }

    /// `(x, t)(y, s) = (x + y, t + s + 2⟨x, y⟩)`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.x.len() != o.x.len() {
            return Err(Error::Dimension("points on different groups".into()));
        }
        let x = self.x.iter().zip(&o.x).map(|(a, b)| a.clone() + b.clone()).collect();
        let t = self.t.clone() + o.t.clone() + R::from_i64(2) * symplectic(&self.x, &o.x);
        Ok(Self { x, t })
    }

    pub fn inv(&self) -> Self {
        Self { x: self.x.iter().map(|v| -v.clone()).collect(), t: -self.t.clone() }
    }

    /// `δ_r(x, t) = (rx, r²t)`.
    pub fn dilate(&self, r: &R) -> Result<Self> {
        if *r <= R::zero() {
            return Err(validation("dilation factor must be positive"));
        }
        Ok(Self {
            x: self.x.iter().map(|v| v.clone() * r.clone()).collect(),
            t: self.t.clone() * r.clone() * r.clone(),
        })
    }

    /// `‖(x, t)‖ = (|x|⁴ + t²)^{1/4}`.
    pub fn koranyi_norm(&self) -> f64 {
        let x2: f64 = self.x.iter().map(|v| v.to_f64().powi(2)).sum();
        let t = self.t.to_f64();
        (x2 * x2 + t * t).powf(0.25)
    }

    pub fn to_f64(&self) -> GroupPoint<f64> {
        GroupPoint { x: self.x.iter().map(Real::to_f64).collect(), t: self.t.to_f64() }
    }
}

/// `u ∘ L_g`, i.e. `(x, t) ↦ u(g·(x, t))`, as a polynomial.
pub fn left_translate_poly<R: Real>(u: &Poly<R>, g: &GroupPoint<R>) -> Result<Poly<R>> {
    let n = g.n();
    check_group_n(n)?;
    let nv = group_nvars(n);
    if u.nvars() != nv {
        return Err(Error::Dimension("polynomial and point live on different groups".into()));
    }
    let vars: Vec<Poly<R>> = (0..nv).map(|v| Poly::var(nv, v)).collect();
    let mut subs: Vec<Poly<R>> = (0..4 * n).map(|a| vars[a].add(&Poly::real_constant(nv, g.x[a].clone()))).collect();
    let mut t = vars[4 * n].add(&Poly::real_constant(nv, g.t.clone()));
    let two = cx_real(R::from_i64(2));
    for l in 0..2 * n {
        let (a, b) = (2 * l, 2 * l + 1);
        let term = vars[b].scale_real(&g.x[a]).sub(&vars[a].scale_real(&g.x[b])).scale(&two);
        t = t.add(&term);
    }
    subs.push(t);
    Ok(u.compose(&subs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{apply, VectorFieldId};
    use crate::poly::parse_poly;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_point(rng: &mut ChaCha8Rng, n: usize) -> GroupPoint<Rational> {
        let mut r = || Rational::ratio(rng.gen_range(-20..=20), rng.gen_range(1..=7));
        GroupPoint { x: (0..4 * n).map(|_| r()).collect(), t: r() }
    }

    #[test]
    fn group_axioms_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let n = rng.gen_range(1..=3);
            let (a, b, c) = (rand_point(&mut rng, n), rand_point(&mut rng, n), rand_point(&mut rng, n));
            assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            assert_eq!(a.mul(&a.inv()).unwrap(), GroupPoint::identity(n));
        }
    }

    #[test]
    fn horizontal_product_and_norm() {
        let x = GroupPoint::new(vec![1.0, 2.0, 0.0, 0.0], 0.0).unwrap();
        let y = GroupPoint::new(vec![3.0, -1.0, 0.0, 0.0], 0.0).unwrap();
        let p = x.mul(&y).unwrap();
        assert_eq!(p.t, 2.0 * (-1.0 - 2.0 * 3.0));
        let z = GroupPoint::new(vec![0.0; 4], 9.0).unwrap();
        assert!((z.koranyi_norm() - 3.0).abs() < 1e-15);
        for r in [0.5, 2.0, 10.0] {
            let d = p.dilate(&r).unwrap();
            assert!((d.koranyi_norm() - r * p.koranyi_norm()).abs() < 1e-12 * d.koranyi_norm());
        }
        assert!(p.dilate(&0.0).is_err());
        assert_eq!(homogeneous_dimension(2), 10);
    }

    #[test]
    fn x_fields_are_left_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u: Poly<Rational> = parse_poly("x1^2*t + x3*x2 - t^2*x4 + x1*x2*x3", 1).unwrap();
        for _ in 0..5 {
            let g = rand_point(&mut rng, 1);
            for a in 1..=4 {
                let lhs = apply(VectorFieldId::X(a), &left_translate_poly(&u, &g).unwrap()).unwrap();
                let rhs = left_translate_poly(&apply(VectorFieldId::X(a), &u).unwrap(), &g).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
