use super::fields::{apply_x, VectorFieldId};
use crate::error::{validation, Result};
use crate::poly::{group_n, Poly};
use crate::quaternion::Quaternion;
use crate::scalar::{Cx, Real};

/// Quaternion-valued polynomial `a + b𝐣` with complex polynomial parts.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatPoly<R: Real = f64> {
    pub a: Poly<R>,
    pub b: Poly<R>,
}

impl<R: Real> QuatPoly<R> {
    pub fn zero(nvars: usize) -> Self {
        Self { a: Poly::zero(nvars), b: Poly::zero(nvars) }
    }

    /// A complex polynomial viewed as quaternion-valued.
    pub fn from_complex(a: Poly<R>) -> Self {
        let b = Poly::zero(a.nvars());
        Self { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { a: self.a.add(&o.a), b: self.b.add(&o.b) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { a: self.a.sub(&o.a), b: self.b.sub(&o.b) }
    }

    pub fn neg(&self) -> Self {
        Self { a: self.a.neg(), b: self.b.neg() }
    }

    pub fn scale_real(&self, s: &R) -> Self {
        Self { a: self.a.scale_real(s), b: self.b.scale_real(s) }
    }

    /// Left multiplication by the unit `(1, 𝐢, 𝐣, 𝐤)[unit]`.
    pub fn left_unit(&self, unit: usize) -> Self {
        let i = Cx::new(R::zero(), R::one());
        match unit {
            0 => self.clone(),
            1 => Self { a: self.a.scale(&i), b: self.b.scale(&i) },
            2 => Self { a: self.b.conj().neg(), b: self.a.conj() },
            3 => Self { a: self.b.conj().scale(&-i.clone()), b: self.a.conj().scale(&i) },
            _ => panic!("quaternion unit {unit} out of range"),
        }
    }

    /// Componentwise `X_a` (1-based).
    pub fn apply_x(&self, n: usize, a: usize) -> Self {
        Self { a: apply_x(n, a, &self.a), b: apply_x(n, a, &self.b) }
    }

    pub fn eval(&self, point: &[R]) -> Quaternion<R> {
        Quaternion::from_complex_pair(&self.a.eval(point), &self.b.eval(point))
    }
}

/// `Q̄_l f = X_{4l+1}f + 𝐢X_{4l+2}f + 𝐣X_{4l+3}f + 𝐤X_{4l+4}f`; `Q_l` flips the imaginary signs.
pub fn apply_quaternionic<R: Real>(field: VectorFieldId, f: &QuatPoly<R>) -> Result<QuatPoly<R>> {
    let n = group_n(&f.a)?;
    field.validate(n)?;
    let (l, sign) = match field {
        VectorFieldId::Qbar(l) => (l, 1),
        VectorFieldId::Q(l) => (l, -1),
        other => {
            return Err(validation(format!("{other} is complex-valued; use apply")));
        }
    };
    let mut out = f.apply_x(n, 4 * l + 1);
    for unit in 1..4 {
        let term = f.apply_x(n, 4 * l + 1 + unit).left_unit(unit);
        out = if sign > 0 { out.add(&term) } else { out.sub(&term) };
    }
    Ok(out)
}
