use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{group_n, group_nvars, x, Poly};
use crate::scalar::{cx_int, Cx, Real};

/// The primed index `0′` or `1′` of `Z_{AA′}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Prime {
    Zero,
    One,
}

impl Prime {
    pub fn index(self) -> usize {
        match self {
            Prime::Zero => 0,
            Prime::One => 1,
        }
    }
}

/// Left-invariant vector fields on the group of half-dimension `n`.
///
/// `X(a)` and `W(j)`, `Wbar(j)` are 1-based (`a ∈ 1..=4n`, `j ∈ 1..=2n`);
/// `Z(A, A′)` has `A ∈ 0..2n`; `Q(l)`, `Qbar(l)` have `l ∈ 0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VectorFieldId {
    X(usize),
    Dt,
    Z(usize, Prime),
    W(usize),
    Wbar(usize),
    Q(usize),
    Qbar(usize),
}

impl fmt::Display for VectorFieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorFieldId::X(a) => write!(f, "X{a}"),
            VectorFieldId::Dt => write!(f, "Dt"),
            VectorFieldId::Z(a, p) => write!(f, "Z{a},{}'", p.index()),
            VectorFieldId::W(j) => write!(f, "W{j}"),
            VectorFieldId::Wbar(j) => write!(f, "Wbar{j}"),
            VectorFieldId::Q(l) => write!(f, "Q{l}"),
            VectorFieldId::Qbar(l) => write!(f, "Qbar{l}"),
        }
    }
}

/// Real building blocks `X_a` (1-based) and `∂_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealField {
    X(usize),
    Dt,
}

impl VectorFieldId {
    pub fn validate(self, n: usize) -> Result<()> {
        let ok = match self {
            VectorFieldId::X(a) => (1..=4 * n).contains(&a),
            VectorFieldId::Dt => true,
            VectorFieldId::Z(a, _) => a < 2 * n,
            VectorFieldId::W(j) | VectorFieldId::Wbar(j) => (1..=2 * n).contains(&j),
            VectorFieldId::Q(l) | VectorFieldId::Qbar(l) => l < n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Index(format!("{self} is not defined for n = {n}")))
        }
    }

    /// Complex combination of `X_a`, `∂_t`; `None` for the quaternion-valued `Q`, `Q̄`.
    pub fn complex_components<R: Real>(self, n: usize) -> Result<Option<Vec<(Cx<R>, RealField)>>> {
        self.validate(n)?;
        let one = Cx::<R>::one;
        let i = || Cx::<R>::new(R::zero(), R::one());
        let x = RealField::X;
        Ok(Some(match self {
            VectorFieldId::X(a) => vec![(one(), x(a))],
            VectorFieldId::Dt => vec![(one(), RealField::Dt)],
            VectorFieldId::Z(a, p) => {
                let (l, upper) = if a < n { (a, false) } else { (a - n, true) };
                let b = 4 * l;
                match (upper, p) {
                    (false, Prime::Zero) => vec![(one(), x(b + 1)), (i(), x(b + 2))],
                    (false, Prime::One) => vec![(-one(), x(b + 3)), (-i(), x(b + 4))],
                    (true, Prime::Zero) => vec![(one(), x(b + 3)), (-i(), x(b + 4))],
                    (true, Prime::One) => vec![(one(), x(b + 1)), (-i(), x(b + 2))],
                }
            }
            VectorFieldId::W(j) => vec![(one(), x(2 * j - 1)), (-i(), x(2 * j))],
            VectorFieldId::Wbar(j) => vec![(one(), x(2 * j - 1)), (i(), x(2 * j))],
            VectorFieldId::Q(_) | VectorFieldId::Qbar(_) => return Ok(None),
        }))
    }
}

/// `X_a u` for 1-based `a`: `∂_{x_{2l−1}} − 2x_{2l}∂_t` or `∂_{x_{2l}} + 2x_{2l−1}∂_t`.
pub fn apply_x<R: Real>(n: usize, a: usize, u: &Poly<R>) -> Poly<R> {
    let dt = u.deriv(4 * n);
    let base = u.deriv(a - 1);
    if dt.is_zero() {
        return base;
    }
    let (partner, sign) = if a % 2 == 1 { (a + 1, -2) } else { (a - 1, 2) };
    base.add(&x::<R>(n, partner).mul(&dt).scale(&cx_int(sign)))
}

fn apply_real<R: Real>(n: usize, f: RealField, u: &Poly<R>) -> Poly<R> {
    match f {
        RealField::X(a) => apply_x(n, a, u),
        RealField::Dt => u.deriv(4 * n),
    }
}

/// Applies a complex vector field to a polynomial on the group.
pub fn apply<R: Real>(field: VectorFieldId, u: &Poly<R>) -> Result<Poly<R>> {
    let n = group_n(u)?;
    let comps = field
        .complex_components::<R>(n)?
        .ok_or_else(|| Error::Validation(format!("{field} is quaternion-valued; use apply_quaternionic")))?;
    let mut out = Poly::zero(u.nvars());
    for (c, f) in comps {
        out = out.add(&apply_real(n, f, u).scale(&c));
    }
    Ok(out)
}

/// First-order operator `Σ_v c_v ∂_v` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderOp<R: Real = f64> {
    coeffs: Vec<Poly<R>>,
}

impl<R: Real> FirstOrderOp<R> {
    pub fn zero(nvars: usize) -> Self {
        Self { coeffs: vec![Poly::zero(nvars); nvars] }
    }

    pub fn of_field(field: VectorFieldId, n: usize) -> Result<Self> {
        let nv = group_nvars(n);
        let comps = field
            .complex_components::<R>(n)?
            .ok_or_else(|| Error::Validation(format!("{field} is quaternion-valued")))?;
        let mut op = Self::zero(nv);
        for (c, f) in comps {
            match f {
                RealField::Dt => op.coeffs[4 * n] = op.coeffs[4 * n].add(&Poly::constant(nv, c)),
                RealField::X(a) => {
                    op.coeffs[a - 1] = op.coeffs[a - 1].add(&Poly::constant(nv, c.clone()));
                    let (partner, sign) = if a % 2 == 1 { (a + 1, -2) } else { (a - 1, 2) };
                    let term = x::<R>(n, partner).scale(&(c * cx_int::<R>(sign)));
                    op.coeffs[4 * n] = op.coeffs[4 * n].add(&term);
                }
            }
        }
        Ok(op)
    }

    pub fn coeffs(&self) -> &[Poly<R>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    pub fn apply(&self, u: &Poly<R>) -> Poly<R> {
        self.coeffs.iter().enumerate().fold(Poly::zero(u.nvars()), |acc, (v, c)| acc.add(&c.mul(&u.deriv(v))))
    }

    pub fn scale(&self, s: &Cx<R>) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// `[self, o] = self∘o − o∘self`.
    pub fn commutator(&self, o: &Self) -> Self {
        let coeffs = (0..self.coeffs.len()).map(|v| self.apply(&o.coeffs[v]).sub(&o.apply(&self.coeffs[v]))).collect();
        Self { coeffs }
    }
}

/// One commutator `[left, right]` with the value predicted by the structure equations.
#[derive(Clone, Debug)]
pub struct Bracket<R: Real = f64> {
    pub left: VectorFieldId,
    pub right: VectorFieldId,
    pub computed: FirstOrderOp<R>,
    pub expected: FirstOrderOp<R>,
}

impl<R: Real> Bracket<R> {
    pub fn matches(&self) -> bool {
        self.computed == self.expected
    }
}

fn dt_multiple<R: Real>(n: usize, c: Cx<R>) -> FirstOrderOp<R> {
    FirstOrderOp::of_field(VectorFieldId::Dt, n).expect("valid field").scale(&c)
}

/// Predicted `[X_a, X_b]` (with `∂_t` as index `None`).
fn expected_real<R: Real>(n: usize, a: Option<usize>, b: Option<usize>) -> FirstOrderOp<R> {
    match (a, b) {
        (Some(a), Some(b)) if a % 2 == 1 && b == a + 1 => dt_multiple(n, cx_int(4)),
        (Some(a), Some(b)) if b % 2 == 1 && a == b + 1 => dt_multiple(n, cx_int(-4)),
        _ => FirstOrderOp::zero(group_nvars(n)),
    }
}

/// Predicted `[Z_{Aα′}, Z_{Bβ′}]`.
fn expected_z<R: Real>(n: usize, (a, p): (usize, Prime), (b, q): (usize, Prime)) -> FirstOrderOp<R> {
    let minus_8i = Cx::new(R::zero(), R::from_i64(-8));
    let paired = a + n == b || b + n == a;
    match (p, q) {
        (Prime::Zero, Prime::One) if paired => dt_multiple(n, minus_8i),
        (Prime::One, Prime::Zero) if paired => dt_multiple(n, -minus_8i),
        _ => FirstOrderOp::zero(group_nvars(n)),
    }
}

/// All pairwise commutators among `{X_a, ∂_t}` and among `{Z_{AA′}}`, computed symbolically.
pub fn bracket_table<R: Real>(n: usize) -> Result<Vec<Bracket<R>>> {
    crate::poly::check_group_n(n)?;
    let mut out = Vec::new();
    let reals: Vec<Option<usize>> = (1..=4 * n).map(Some).chain([None]).collect();
    let id = |r: Option<usize>| r.map_or(VectorFieldId::Dt, VectorFieldId::X);
    for &a in &reals {
        for &b in &reals {
            let (fa, fb) = (id(a), id(b));
            let computed = FirstOrderOp::of_field(fa, n)?.commutator(&FirstOrderOp::of_field(fb, n)?);
            out.push(Bracket { left: fa, right: fb, computed, expected: expected_real(n, a, b) });
        }
    }
    let zs: Vec<(usize, Prime)> = (0..2 * n).flat_map(|a| [(a, Prime::Zero), (a, Prime::One)]).collect();
    for &za in &zs {
        for &zb in &zs {
            let (fa, fb) = (VectorFieldId::Z(za.0, za.1), VectorFieldId::Z(zb.0, zb.1));
            let computed = FirstOrderOp::of_field(fa, n)?.commutator(&FirstOrderOp::of_field(fb, n)?);
            out.push(Bracket { left: fa, right: fb, computed, expected: expected_z(n, za, zb) });
        }
    }
    Ok(out)
}
