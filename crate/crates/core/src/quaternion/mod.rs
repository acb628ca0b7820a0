//! Quaternion arithmetic, quaternionic matrices and the Moore determinant.

mod matrix;
mod moore;

pub use matrix::{j_symplectic, ComplexMatrix, HyperhermitianMatrix, QuatMatrix};
pub use moore::{
    eigen_hyperhermitian, is_nonneg, mixed_discriminant, mixed_discriminant_exact, moore_det, moore_det_expansion,
    moore_det_generic, HyperEigen, MAX_MIXED_ORDER,
};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::{cx, Cx, Real};

/// `re + i·1 + j·𝐣 + k·𝐤`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quaternion<R = f64> {
    pub re: R,
    pub i: R,
    pub j: R,
    pub k: R,
}

impl<R: Real> Quaternion<R> {
    pub fn new(re: R, i: R, j: R, k: R) -> Self {
        Self { re, i, j, k }
    }

    pub fn zero() -> Self {
        Self::new(R::zero(), R::zero(), R::zero(), R::zero())
    }

    pub fn one() -> Self {
        Self::real(R::one())
    }

    pub fn real(re: R) -> Self {
        Self::new(re, R::zero(), R::zero(), R::zero())
    }

    pub fn unit_i() -> Self {
        Self::new(R::zero(), R::one(), R::zero(), R::zero())
    }

    pub fn unit_j() -> Self {
        Self::new(R::zero(), R::zero(), R::one(), R::zero())
    }

    pub fn unit_k() -> Self {
        Self::new(R::zero(), R::zero(), R::zero(), R::one())
    }

    /// Basis unit `𝐢_a` for `a` in 0..4: (1, 𝐢, 𝐣, 𝐤).
    pub fn basis(a: usize) -> Self {
        match a {
            0 => Self::one(),
            1 => Self::unit_i(),
            2 => Self::unit_j(),
            3 => Self::unit_k(),
            _ => panic!("quaternion basis index {a} out of range"),
        }
    }

    pub fn from_components(c: [R; 4]) -> Self {
        let [re, i, j, k] = c;
        Self::new(re, i, j, k)
    }

    pub fn components(&self) -> [R; 4] {
        [self.re.clone(), self.i.clone(), self.j.clone(), self.k.clone()]
    }

    /// Builds `a + b𝐣` from complex `a`, `b`.
    pub fn from_complex_pair(a: &Cx<R>, b: &Cx<R>) -> Self {
        Self::new(a.re.clone(), a.im.clone(), b.re.clone(), b.im.clone())
    }

    /// Splits into `(a, b)` with `self = a + b𝐣`.
    pub fn complex_pair(&self) -> (Cx<R>, Cx<R>) {
        (cx(self.re.clone(), self.i.clone()), cx(self.j.clone(), self.k.clone()))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.i.clone(), -self.j.clone(), -self.k.clone())
    }

    pub fn norm_sqr(&self) -> R {
        self.re.clone() * self.re.clone()
            + self.i.clone() * self.i.clone()
            + self.j.clone() * self.j.clone()
            + self.k.clone() * self.k.clone()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().to_f64().sqrt()
    }

    pub fn scale(&self, s: &R) -> Self {
        Self::new(
            self.re.clone() * s.clone(),
            self.i.clone() * s.clone(),
            self.j.clone() * s.clone(),
            self.k.clone() * s.clone(),
        )
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let inv = R::one() / n;
        Some(self.conj().scale(&inv))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.i.is_zero() && self.j.is_zero() && self.k.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.i.is_zero() && self.j.is_zero() && self.k.is_zero()
    }

    pub fn to_f64(&self) -> Quaternion<f64> {
        Quaternion::new(self.re.to_f64(), self.i.to_f64(), self.j.to_f64(), self.k.to_f64())
    }

    pub fn from_f64(q: &Quaternion<f64>) -> Self {
        Self::new(R::from_f64(q.re), R::from_f64(q.i), R::from_f64(q.j), R::from_f64(q.k))
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.components().iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl<R: Real> Add for Quaternion<R> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.i + o.i, self.j + o.j, self.k + o.k)
    }
}

impl<R: Real> Sub for Quaternion<R> {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.i - o.i, self.j - o.j, self.k - o.k)
    }
}

impl<R: Real> Neg for Quaternion<R> {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.re, -self.i, -self.j, -self.k)
    }
}

impl<R: Real> Mul for Quaternion<R> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        let (a1, b1, c1, d1) = (self.re, self.i, self.j, self.k);
        let (a2, b2, c2, d2) = (o.re, o.i, o.j, o.k);
        Self::new(
            a1.clone() * a2.clone() - b1.clone() * b2.clone() - c1.clone() * c2.clone() - d1.clone() * d2.clone(),
            a1.clone() * b2.clone() + b1.clone() * a2.clone() + c1.clone() * d2.clone() - d1.clone() * c2.clone(),
            a1.clone() * c2.clone() - b1.clone() * d2.clone() + c1.clone() * a2.clone() + d1.clone() * b2.clone(),
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl<'a, R: Real> Mul<&'a Quaternion<R>> for &'a Quaternion<R> {
    type Output = Quaternion<R>;

    fn mul(self, o: &'a Quaternion<R>) -> Quaternion<R> {
        self.clone() * o.clone()
    }
}

impl<R: Real> fmt::Display for Quaternion<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.re, self.i, self.j, self.k)
    }
}

/// 4×4 real matrix of left multiplication by `q` acting on `(y1, y2, y3, y4)`.
pub fn real_rep<R: Real>(q: &Quaternion<R>) -> [[R; 4]; 4] {
    let (x1, x2, x3, x4) = (q.re.clone(), q.i.clone(), q.j.clone(), q.k.clone());
    [
        [x1.clone(), -x2.clone(), -x3.clone(), -x4.clone()],
        [x2.clone(), x1.clone(), -x4.clone(), x3.clone()],
        [x3.clone(), x4.clone(), x1.clone(), -x2.clone()],
        [x4, -x3, x2, x1],
    ]
}

/// The standard symplectic block `J` on `ℝ⁴`.
pub fn symplectic_j<R: Real>() -> [[R; 4]; 4] {
    let z = R::zero;
    let o = R::one;
    [[z(), o(), z(), z()], [-o(), z(), z(), z()], [z(), z(), z(), o()], [z(), z(), -o(), z()]]
}

pub fn mat4_mul<R: Real>(a: &[[R; 4]; 4], b: &[[R; 4]; 4]) -> [[R; 4]; 4] {
    std::array::from_fn(|r| {
        std::array::from_fn(|c| (0..4).fold(R::zero(), |acc, k| acc + a[r][k].clone() * b[k][c].clone()))
    })
}

pub fn mat4_transpose<R: Real>(a: &[[R; 4]; 4]) -> [[R; 4]; 4] {
    std::array::from_fn(|r| std::array::from_fn(|c| a[c][r].clone()))
}

pub fn mat4_identity<R: Real>() -> [[R; 4]; 4] {
    std::array::from_fn(|r| std::array::from_fn(|c| if r == c { R::one() } else { R::zero() }))
}
