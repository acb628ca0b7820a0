//! Left-invariant operators on polynomials and polynomial forms: `X_a`, `Z_{AA′}`,
//! `d_0`, `d_1`, the quaternionic Laplacian `Δ = d_0 d_1` and `Q̄_l`, `Q_l`.

mod fields;
mod quat_poly;

pub use fields::{apply, apply_x, bracket_table, Bracket, FirstOrderOp, Prime, RealField, VectorFieldId};
pub use quat_poly::{apply_quaternionic, QuatPoly};

use crate::error::{validation, Result};
use crate::exterior::Form;
use crate::poly::{check_group_n, group_n, group_nvars, Poly};
use crate::scalar::{cx_real, Real};

/// Form with polynomial coefficients.
pub type PolyForm<R = f64> = Form<Poly<R>>;

/// The 0-form `u`.
pub fn scalar_form<R: Real>(u: &Poly<R>) -> Result<PolyForm<R>> {
    let n = group_n(u)?;
    Ok(Form::scalar(n, u.clone()))
}

fn check_form<R: Real>(f: &PolyForm<R>) -> Result<usize> {
    let n = f.n();
    check_group_n(n)?;
    let nv = group_nvars(n);
    if f.terms().any(|(_, c)| c.nvars() != nv) {
        return Err(validation("form coefficients use the wrong variable count"));
    }
    Ok(n)
}

/// `d_α F = Σ_I Σ_A Z_{Aα′} f_I ω^A∧ω^I`.
pub fn d_alpha<R: Real>(f: &PolyForm<R>, alpha: Prime) -> Result<PolyForm<R>> {
    let n = check_form(f)?;
    if f.degree() >= 2 * n {
        return Err(validation(format!("d_{} is not defined on forms of top degree {}", alpha.index(), 2 * n)));
    }
    let mut out = Form::zero(n, f.degree() + 1);
    for (mi, c) in f.terms() {
        let idx = mi.indices();
        for a in 0..2 * n {
            if mi.contains(a) {
                continue;
            }
            let z = apply(VectorFieldId::Z(a, alpha), c)?;
            if z.is_zero() {
                continue;
            }
            let mut full = Vec::with_capacity(idx.len() + 1);
            full.push(a);
            full.extend_from_slice(&idx);
            out.add_term(&full, z);
        }
    }
    Ok(out)
}

pub fn d0<R: Real>(f: &PolyForm<R>) -> Result<PolyForm<R>> {
    d_alpha(f, Prime::Zero)
}

pub fn d1<R: Real>(f: &PolyForm<R>) -> Result<PolyForm<R>> {
    d_alpha(f, Prime::One)
}

/// `Δ_{AB} u = ½(Z_{A0′}Z_{B1′}u − Z_{B0′}Z_{A1′}u)`.
pub fn delta_ab<R: Real>(u: &Poly<R>, a: usize, b: usize) -> Result<Poly<R>> {
    let zb1 = apply(VectorFieldId::Z(b, Prime::One), u)?;
    let za1 = apply(VectorFieldId::Z(a, Prime::One), u)?;
    let lhs = apply(VectorFieldId::Z(a, Prime::Zero), &zb1)?;
    let rhs = apply(VectorFieldId::Z(b, Prime::Zero), &za1)?;
    Ok(lhs.sub(&rhs).scale(&cx_real(R::half())))
}

/// `Δu = Σ_{A,B} Δ_{AB}u ω^A∧ω^B`.
pub fn laplacian<R: Real>(u: &Poly<R>) -> Result<PolyForm<R>> {
    let n = group_n(u)?;
    let mut out = Form::zero(n, 2);
    let two = cx_real(R::from_i64(2));
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            out.add_term(&[a, b], delta_ab(u, a, b)?.scale(&two));
        }
    }
    Ok(out)
}

/// Evaluates every coefficient at a point, giving a constant-coefficient form.
pub fn eval_form<R: Real>(f: &PolyForm<R>, point: &[R]) -> crate::exterior::ConstForm<R> {
    f.map(|c| c.eval(point))
}
