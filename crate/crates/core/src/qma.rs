//! Horizontal quaternionic Hessian, Monge-Ampère density and PSH tests.

use num_traits::Zero;

use crate::calculus::{
    apply_quaternionic, d0, d1, delta_ab, laplacian, scalar_form, PolyForm, QuatPoly, VectorFieldId,
};
use crate::error::{validation, Result};
use crate::exterior::{ConstForm, Form};
use crate::poly::{group_n, CompiledPoly, Poly};
use crate::quaternion::{
    eigen_hyperhermitian, moore_det, moore_det_generic, HyperhermitianMatrix, QuatMatrix, Quaternion,
};
use crate::scalar::{cx_real, factorial, one_cx, Cx, Real};

/// `n×n` matrix of quaternion-valued polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatPolyMatrix<R: Real = f64> {
    n: usize,
    entries: Vec<QuatPoly<R>>,
}

impl<R: Real> QuatPolyMatrix<R> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, l: usize, m: usize) -> &QuatPoly<R> {
        &self.entries[l * self.n + m]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(QuatPoly::is_zero)
    }

    /// Hyperhermitian as polynomials: `a_lm = ā_ml`, `b_lm = −b_ml`.
    pub fn is_hyperhermitian(&self) -> bool {
        (0..self.n).all(|l| {
            (0..self.n).all(|m| {
                let (p, q) = (self.get(l, m), self.get(m, l));
                p.a == q.a.conj() && p.b == q.b.neg()
            })
        })
    }

    pub fn eval(&self, point: &[R]) -> QuatMatrix<R> {
        QuatMatrix::from_fn(self.n, self.n, |l, m| self.get(l, m).eval(point))
    }

    /// `τ(H)𝕁 = [[b, a], [−ā, b̄]]` as a `2n×2n` polynomial matrix.
    pub fn tau_j(&self) -> Vec<Vec<Poly<R>>> {
        let n = self.n;
        (0..2 * n)
            .map(|r| {
                (0..2 * n)
                    .map(|c| {
                        let e = self.get(r % n, c % n);
                        match (r < n, c < n) {
                            (true, true) => e.b.clone(),
                            (true, false) => e.a.clone(),
                            (false, true) => e.a.conj().neg(),
                            (false, false) => e.b.conj(),
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn compile(&self) -> CompiledHessian {
        CompiledHessian { n: self.n, entries: self.entries.iter().map(|e| (e.a.compile(), e.b.compile())).collect() }
    }
}

fn require_real<R: Real>(u: &Poly<R>) -> Result<usize> {
    let n = group_n(u)?;
    if !u.is_real() {
        return Err(validation("expected a real-valued polynomial"));
    }
    u.check_degree()?;
    Ok(n)
}

/// Hessian through the Laplacian: entry `(l, m)` is `2Δ_{l(n+m)}u + 2Δ_{lm}u·𝐣`.
pub fn horizontal_hessian<R: Real>(u: &Poly<R>) -> Result<QuatPolyMatrix<R>> {
    let n = require_real(u)?;
    let two = R::from_i64(2);
    let mut entries = Vec::with_capacity(n * n);
    for l in 0..n {
        for m in 0..n {
            let a = delta_ab(u, l, n + m)?.scale_real(&two);
            let b = delta_ab(u, l, m)?.scale_real(&two);
            entries.push(QuatPoly { a, b });
        }
    }
    Ok(QuatPolyMatrix { n, entries })
}

/// Hessian through the tangential Cauchy-Fueter operators: `Q̄_l Q_m u + 8δ_lm 𝐢∂_t u`.
pub fn horizontal_hessian_direct<R: Real>(u: &Poly<R>) -> Result<QuatPolyMatrix<R>> {
    let n = require_real(u)?;
    let base = QuatPoly::from_complex(u.clone());
    let q: Vec<QuatPoly<R>> = (0..n).map(|m| apply_quaternionic(VectorFieldId::Q(m), &base)).collect::<Result<_>>()?;
    let i_dt = QuatPoly::from_complex(u.deriv(4 * n).scale(&Cx::new(R::zero(), R::from_i64(8))));
    let mut entries = Vec::with_capacity(n * n);
    for l in 0..n {
        for (m, qm) in q.iter().enumerate() {
            let mut e = apply_quaternionic(VectorFieldId::Qbar(l), qm)?;
            if l == m {
                e = e.add(&i_dt);
            }
            entries.push(e);
        }
    }
    Ok(QuatPolyMatrix { n, entries })
}

/// The Hessian at a point, validated as hyperhermitian.
pub fn hessian_at<R: Real>(u: &Poly<R>, point: &[R]) -> Result<HyperhermitianMatrix<R>> {
    HyperhermitianMatrix::new(horizontal_hessian_direct(u)?.eval(point))
}

/// `det(Q̄_l Q_m u + 8δ_lm 𝐢∂_t u)` at a point (Moore determinant).
pub fn qma_density<R: Real>(u: &Poly<R>, point: &[R]) -> Result<R> {
    Ok(moore_det_generic(&hessian_at(u, point)?))
}

/// The Hessian prepared for fast `f64` evaluation.
#[derive(Clone, Debug)]
pub struct CompiledHessian {
    n: usize,
    entries: Vec<(CompiledPoly, CompiledPoly)>,
}

impl CompiledHessian {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix_at(&self, point: &[f64]) -> QuatMatrix<f64> {
        QuatMatrix::from_fn(self.n, self.n, |l, m| {
            let (a, b) = &self.entries[l * self.n + m];
            Quaternion::from_complex_pair(&a.eval(point), &b.eval(point))
        })
    }

    pub fn at(&self, point: &[f64]) -> Result<HyperhermitianMatrix<f64>> {
        HyperhermitianMatrix::new(self.matrix_at(point))
    }

    /// Moore determinant at a point, with closed forms for `n ≤ 2`.
    pub fn density(&self, point: &[f64]) -> f64 {
        match self.n {
            1 => self.entries[0].0.eval_re(point),
            2 => {
                let a11 = self.entries[0].0.eval_re(point);
                let a22 = self.entries[3].0.eval_re(point);
                let m12 = Quaternion::from_complex_pair(&self.entries[1].0.eval(point), &self.entries[1].1.eval(point));
                a11 * a22 - m12.norm_sqr()
            }
            _ => {
                let m = HyperhermitianMatrix::new(self.matrix_at(point)).expect("Hessian is hyperhermitian");
                moore_det(&m)
            }
        }
    }

    pub fn min_eigenvalue(&self, point: &[f64]) -> f64 {
        let m = HyperhermitianMatrix::new(self.matrix_at(point)).expect("Hessian is hyperhermitian");
        eigen_hyperhermitian(&m, false).values[0]
    }
}

/// Both sides of `(Δu)ⁿ = n!·det(Hess u)·Ω₂ₙ` at a point.
#[derive(Clone, Debug)]
pub struct IdentityResidual {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / (1 + |rhs|)`.
    pub residual: f64,
    /// True when both sides agree exactly (only meaningful for exact scalars).
    pub exact_match: bool,
}

/// Compares the `Ω₂ₙ` coefficient of `(Δu)ⁿ` with `n!` times the Monge-Ampère density.
pub fn verify_delta_power_identity<R: Real>(u: &Poly<R>, point: &[R]) -> Result<IdentityResidual> {
    let n = require_real(u)?;
    let lap: ConstForm<R> = laplacian(u)?.map(|c| c.eval(point));
    let top = lap.wedge_power(n, one_cx())?;
    let lhs = top.delta_n_coeff()?.unwrap_or_else(Cx::zero);
    let rhs = qma_density(u, point)? * R::from_i64(factorial(n) as i64);
    let exact_match = lhs.im.is_zero() && lhs.re == rhs;
    let (l, r) = (lhs.re.to_f64(), rhs.to_f64());
    let residual = ((l - r).abs() + lhs.im.to_f64().abs()) / (1.0 + r.abs());
    Ok(IdentityResidual { lhs: l, rhs: r, residual, exact_match })
}

/// True iff the Hessian is nonnegative (within `tol`) at every sample point.
pub fn is_psh_poly(u: &Poly<f64>, samples: &[Vec<f64>], tol: f64) -> Result<bool> {
    if samples.is_empty() {
        return Err(validation("at least one sample point is required"));
    }
    let h = horizontal_hessian_direct(u)?.compile();
    Ok(samples.iter().all(|p| h.min_eigenvalue(p) >= -tol))
}

/// First sample where the Hessian has an eigenvalue below `-tol`.
pub fn psh_violation(u: &Poly<f64>, samples: &[Vec<f64>], tol: f64) -> Result<Option<(Vec<f64>, f64)>> {
    let h = horizontal_hessian_direct(u)?.compile();
    Ok(samples.iter().find_map(|p| {
        let v = h.min_eigenvalue(p);
        (v < -tol).then(|| (p.clone(), v))
    }))
}

/// True iff every `Δ_{AB}u` vanishes (exactly for exact scalars, else coefficients within `tol`).
pub fn is_pluriharmonic<R: Real>(u: &Poly<R>, tol: f64) -> Result<bool> {
    require_real(u)?;
    let lap = laplacian(u)?;
    if R::EXACT {
        return Ok(lap.is_zero());
    }
    let small = lap.terms().all(|(_, c)| c.norm_inf() <= tol);
    Ok(small)
}

/// Outcome of the tangential 1-Cauchy-Fueter check for `(f_{0′}, f_{1′})`.
#[derive(Clone, Debug)]
pub struct Cf1Result<R: Real = f64> {
    pub is_cf1: bool,
    /// `d_1 f_{0′} − d_0 f_{1′}`.
    pub defect: PolyForm<R>,
    /// Laplacians of `Re f_{0′}`, `Im f_{0′}`, `Re f_{1′}`, `Im f_{1′}`.
    pub component_laplacians: [PolyForm<R>; 4],
}

pub fn cf1_check<R: Real>(f0: &Poly<R>, f1: &Poly<R>) -> Result<Cf1Result<R>> {
    group_n(f0)?;
    if f0.nvars() != f1.nvars() {
        return Err(validation("components live on different groups"));
    }
    let defect = d1(&scalar_form(f0)?)?.sub(&d0(&scalar_form(f1)?)?)?;
    let component_laplacians = [laplacian(&f0.re())?, laplacian(&f0.im())?, laplacian(&f1.re())?, laplacian(&f1.im())?];
    Ok(Cf1Result { is_cf1: defect.is_zero(), defect, component_laplacians })
}

/// `(Δv)ⁿ − (Δu)ⁿ − Σ_{p=1}^{n} (Δv)^{p−1}∧Δ(v−u)∧(Δu)^{n−p}`; the zero form when the identity holds.
pub fn telescoping_identity<R: Real>(u: &Poly<R>, v: &Poly<R>) -> Result<PolyForm<R>> {
    let n = require_real(u)?;
    require_real(v)?;
    let one = Poly::one(u.nvars());
    let (lu, lv) = (laplacian(u)?, laplacian(v)?);
    let ldiff = laplacian(&v.sub(u))?;
    let pu: Vec<PolyForm<R>> = (0..=n).map(|k| lu.wedge_power(k, one.clone())).collect::<Result<_>>()?;
    let pv: Vec<PolyForm<R>> = (0..=n).map(|k| lv.wedge_power(k, one.clone())).collect::<Result<_>>()?;
    let mut out = pv[n].sub(&pu[n])?;
    for p in 1..=n {
        out = out.sub(&pv[p - 1].wedge(&ldiff)?.wedge(&pu[n - p])?)?;
    }
    Ok(out)
}

/// The four expressions `Δu₁∧…∧Δu_k`, `d₀(d₁u₁∧Δu₂∧…)`, `−d₁(d₀u₁∧Δu₂∧…)`, `Δ(u₁Δu₂∧…)` which agree.
pub fn laplacian_product_chain<R: Real>(us: &[Poly<R>]) -> Result<[PolyForm<R>; 4]> {
    let first = us.first().ok_or_else(|| validation("need at least one function"))?;
    let n = group_n(first)?;
    let one = Poly::one(first.nvars());
    let mut rest = Form::scalar(n, one);
    for u in &us[1..] {
        rest = rest.wedge(&laplacian(u)?)?;
    }
    let product = laplacian(first)?.wedge(&rest)?;
    let u1 = scalar_form(first)?;
    let via_d0 = d0(&d1(&u1)?.wedge(&rest)?)?;
    let via_d1 = d1(&d0(&u1)?.wedge(&rest)?)?.neg();
    let via_delta = d0(&d1(&rest.scale(first))?)?;
    Ok([product, via_d0, via_d1, via_delta])
}

/// `Re Σ_{l,m} q̄_l H_lm q_m` for a quaternion vector `q`, as a real polynomial.
pub fn quadratic_form<R: Real>(h: &QuatPolyMatrix<R>, q: &[Quaternion<R>]) -> Result<Poly<R>> {
    if q.len() != h.n() {
        return Err(validation("quaternion vector length must equal n"));
    }
    let nv = h.get(0, 0).a.nvars();
    let mut out = Poly::zero(nv);
    for l in 0..h.n() {
        for m in 0..h.n() {
            out = out.add(&real_part_sandwich(&q[l].conj(), h.get(l, m), &q[m]));
        }
    }
    Ok(out)
}

/// `Re(p · f · q)` for constant quaternions `p`, `q`.
fn real_part_sandwich<R: Real>(p: &Quaternion<R>, f: &QuatPoly<R>, q: &Quaternion<R>) -> Poly<R> {
    // f = Σ_u f_u 𝐢_u with real polynomial parts f_u
    let parts = [f.a.re(), f.a.im(), f.b.re(), f.b.im()];
    let mut out = Poly::zero(f.a.nvars());
    for (unit, part) in parts.iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        let c = (p.clone() * Quaternion::basis(unit)) * q.clone();
        out = out.add(&part.scale(&cx_real(c.re)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{norm_sq, parse_poly, t, x};
    use crate::scalar::Rational;

    fn point<R: Real>(n: usize, vals: &[i64]) -> Vec<R> {
        (0..4 * n + 1).map(|k| R::ratio(vals[k % vals.len()], 3)).collect()
    }

    #[test]
    fn norm_square_hessian() {
        for n in 1..=3 {
            let u = norm_sq::<Rational>(n);
            let h = horizontal_hessian(&u).unwrap();
            let d = horizontal_hessian_direct(&u).unwrap();
            assert_eq!(h, d);
            let at = h.eval(&point::<Rational>(n, &[1, -2, 5]));
            assert_eq!(at, QuatMatrix::diagonal(&vec![Rational::from_i64(8); n]));
            let dens = qma_density(&u, &point::<Rational>(n, &[0])).unwrap();
            assert_eq!(dens, Rational::from_i64(8i64.pow(n as u32)));
        }
    }

    #[test]
    fn t_and_linear_have_zero_hessian() {
        for n in 1..=2 {
            assert!(horizontal_hessian(&t::<Rational>(n)).unwrap().is_zero());
            assert!(horizontal_hessian_direct(&t::<Rational>(n)).unwrap().is_zero());
            assert!(horizontal_hessian(&x::<Rational>(n, 1)).unwrap().is_zero());
        }
        let c: Poly<Rational> = parse_poly("i*x1", 1).unwrap();
        assert!(horizontal_hessian(&c).is_err());
    }

    #[test]
    fn x1_squared_at_origin() {
        let u: Poly<Rational> = parse_poly("x1^2", 2).unwrap();
        let h = hessian_at(&u, &vec![Rational::zero(); 9]).unwrap();
        let expect = QuatMatrix::diagonal(&[Rational::from_i64(2), Rational::zero()]);
        assert_eq!(h.matrix(), &expect);
    }

    #[test]
    fn two_routes_agree_on_cubics() {
        let u: Poly<Rational> = parse_poly("x1^2*x6 + 3*x2*t - x5*x7*x3 + x8^3 - 2*x4*x5 + t*x1", 2).unwrap();
        let h = horizontal_hessian(&u).unwrap();
        assert_eq!(h, horizontal_hessian_direct(&u).unwrap());
        assert!(h.is_hyperhermitian());
        let lap = laplacian(&u).unwrap();
        let tj = h.tau_j();
        for a in 0..4 {
            for b in 0..4 {
                let expect = delta_ab(&u, a, b).unwrap().scale_real(&Rational::from_i64(2));
                assert_eq!(tj[a][b], expect);
                if a < b {
                    assert_eq!(lap.coeff(&[a, b]).unwrap_or_else(|| Poly::zero(9)), expect);
                }
            }
        }
        let r = verify_delta_power_identity(&u, &point::<Rational>(2, &[1, 4, -2, 7])).unwrap();
        assert!(r.exact_match, "{r:?}");
    }

    #[test]
    fn psh_and_pluriharmonic() {
        let n = 1;
        let samples = vec![vec![0.0; 5], vec![0.3, -0.2, 0.1, 0.5, 0.7]];
        assert!(is_psh_poly(&norm_sq::<f64>(n), &samples, 1e-9).unwrap());
        assert!(!is_psh_poly(&norm_sq::<f64>(n).neg(), &samples, 1e-9).unwrap());
        assert!(is_psh_poly(&x::<f64>(n, 1), &samples, 1e-9).unwrap());
        assert!(is_pluriharmonic(&t::<Rational>(n), 0.0).unwrap());
        assert!(is_pluriharmonic(&x::<Rational>(n, 1), 0.0).unwrap());
        assert!(!is_pluriharmonic(&norm_sq::<Rational>(n), 0.0).unwrap());
    }

    #[test]
    fn cauchy_fueter_pairs() {
        let one = Poly::<Rational>::one(5);
        let zero = Poly::<Rational>::zero(5);
        let r = cf1_check(&one, &zero).unwrap();
        assert!(r.is_cf1 && r.component_laplacians.iter().all(Form::is_zero));
        let f: Poly<Rational> = parse_poly("x1 - i*x2", 1).unwrap();
        assert!(cf1_check(&f, &zero).unwrap().is_cf1);
        let g: Poly<Rational> = parse_poly("x1 + i*x2", 1).unwrap();
        assert!(!cf1_check(&g, &zero).unwrap().is_cf1);
    }

    #[test]
    fn telescoping_examples() {
        let n = 2;
        let u = norm_sq::<Rational>(n);
        let v = u.scale_real(&Rational::from_i64(2));
        assert!(telescoping_identity(&u, &v).unwrap().is_zero());
        assert!(telescoping_identity(&u, &u).unwrap().is_zero());
    }

    #[test]
    fn product_chain_n2() {
        let u1: Poly<Rational> = parse_poly("x1^2 + x2*x6 - t*x3", 2).unwrap();
        let u2: Poly<Rational> = parse_poly("x5^2 - 2*x1*x7 + t", 2).unwrap();
        let [a, b, c, d] = laplacian_product_chain(&[u1, u2]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, d);
    }
}
