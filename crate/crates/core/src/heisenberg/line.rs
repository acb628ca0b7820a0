use serde::{Deserialize, Serialize};

use super::GroupPoint;
use crate::calculus::apply_x;
use crate::error::{validation, Error, Result};
use crate::poly::{group_n, group_nvars, Poly};
use crate::quaternion::{mat4_mul, mat4_transpose, real_rep, symplectic_j, Quaternion};
use crate::scalar::{cx_real, Real};

/// Variables `(λ_1, …, λ_4, t)` of a line group.
pub const LINE_NVARS: usize = 5;

/// Point `(λ, t)` of the line group `H̃_q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinePoint<R = f64> {
    pub lambda: Quaternion<R>,
    pub t: R,
}

impl<R: Real> LinePoint<R> {
    pub fn new(lambda: Quaternion<R>, t: R) -> Self {
        Self { lambda, t }
    }

    pub fn coords(&self) -> Vec<R> {
        let mut c = self.lambda.components().to_vec();
        c.push(self.t.clone());
        c
    }

    pub fn is_origin(&self) -> bool {
        self.lambda.is_zero() && self.t.is_zero()
    }
}

/// A quaternionic Heisenberg line `ℋ_{η,q}` with its cached `B^q` and `Λ_q²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFrame<R = f64> {
    pub eta: GroupPoint<R>,
    pub q: Vec<Quaternion<R>>,
    b: [[R; 4]; 4],
    lambda_sq: R,
}

impl<R: Real> LineFrame<R> {
    pub fn new(eta: GroupPoint<R>, q: Vec<Quaternion<R>>) -> Result<Self> {
        if q.is_empty() || q.len() != eta.n() {
            return Err(Error::Dimension(format!(
                "q has {} entries but the base point lives on n = {}",
                q.len(),
                eta.n()
            )));
        }
        if q.iter().all(Quaternion::is_zero) {
            return Err(validation("q must be nonzero"));
        }
        let j = symplectic_j::<R>();
        let mut b: [[R; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| R::zero()));
        let mut sum = Quaternion::<R>::zero();
        for ql in &q {
            let r = real_rep(ql);
            let term = mat4_mul(&mat4_transpose(&r), &mat4_mul(&j, &r));
            for (row, trow) in b.iter_mut().zip(&term) {
                for (v, tv) in row.iter_mut().zip(trow) {
                    *v = v.clone() + tv.clone();
                }
            }
            sum = sum + ql.conj() * Quaternion::unit_i() * ql.clone();
        }
        let lambda_sq = sum.norm_sqr();
        Ok(Self { eta, q, b, lambda_sq })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// `B^q = Σ_l (q_l^ℝ)ᵀ J q_l^ℝ`.
    pub fn b(&self) -> &[[R; 4]; 4] {
        &self.b
    }

    pub fn lambda_sq(&self) -> &R {
        &self.lambda_sq
    }

    /// `Λ_q = |Σ_l q̄_l 𝐢 q_l|`.
    pub fn lambda(&self) -> f64 {
        self.lambda_sq.to_f64().sqrt()
    }

    /// `(S_1, S_2, S_3)` with `Λ_q² = S_1² + S_2² + S_3²`.
    pub fn s_components(&self) -> [R; 3] {
        let two = R::from_i64(2);
        let mut s = [R::zero(), R::zero(), R::zero()];
        for ql in &self.q {
            let [x1, x2, x3, x4] = ql.components();
            s[0] = s[0].clone() + x1.clone() * x1.clone() + x2.clone() * x2.clone()
                - x3.clone() * x3.clone()
                - x4.clone() * x4.clone();
            s[1] = s[1].clone() + two.clone() * (x2.clone() * x3.clone() - x1.clone() * x4.clone());
            s[2] = s[2].clone() + two.clone() * (x1 * x3 + x2 * x4);
        }
        s
    }

    pub fn to_f64(&self) -> LineFrame<f64> {
        LineFrame {
            eta: self.eta.to_f64(),
            q: self.q.iter().map(Quaternion::to_f64).collect(),
            b: self.b.clone().map(|row| row.map(|v| v.to_f64())),
            lambda_sq: self.lambda_sq.to_f64(),
        }
    }

    /// `(λ, t)(λ′, t′) = (λ + λ′, t + t′ + 2 λᵀ B λ′)`.
    pub fn line_mul(&self, p: &LinePoint<R>, o: &LinePoint<R>) -> LinePoint<R> {
        let (a, b) = (p.lambda.components(), o.lambda.components());
        let mut form = R::zero();
        for k in 0..4 {
            for j in 0..4 {
                form = form + self.b[k][j].clone() * a[k].clone() * b[j].clone();
            }
        }
        LinePoint { lambda: p.lambda.clone() + o.lambda.clone(), t: p.t.clone() + o.t.clone() + R::from_i64(2) * form }
    }

    /// `ι_{η,q}(λ, t) = η·(qλ, t)`.
    pub fn embed(&self, p: &LinePoint<R>) -> Result<GroupPoint<R>> {
        let x: Vec<R> = self.q.iter().flat_map(|ql| (ql.clone() * p.lambda.clone()).components()).collect();
        self.eta.mul(&GroupPoint { x, t: p.t.clone() })
    }
}

/// True iff `Λ_q ≤ tol`.
pub fn is_degenerate(q: &[Quaternion<f64>], tol: f64) -> Result<bool> {
    let frame = LineFrame::new(GroupPoint::identity(q.len()), q.to_vec())?;
    Ok(frame.lambda() <= tol)
}

fn check_line_poly<R: Real>(v: &Poly<R>) -> Result<()> {
    if v.nvars() != LINE_NVARS {
        return Err(Error::Dimension(format!("line polynomials use {LINE_NVARS} variables, got {}", v.nvars())));
    }
    Ok(())
}

/// `X̃_j v = ∂_{λ_j} v + 2 Σ_k B_kj λ_k ∂_t v` for `j ∈ 1..=4`.
pub fn line_field<R: Real>(frame: &LineFrame<R>, j: usize, v: &Poly<R>) -> Result<Poly<R>> {
    check_line_poly(v)?;
    if !(1..=4).contains(&j) {
        return Err(Error::Index(format!("line field index {j} not in 1..=4")));
    }
    let mut coeff = Poly::zero(LINE_NVARS);
    for k in 0..4 {
        coeff = coeff.add(&Poly::var(LINE_NVARS, k).scale_real(&frame.b[k][j - 1]));
    }
    let dt = v.deriv(4);
    Ok(v.deriv(j - 1).add(&coeff.mul(&dt).scale(&cx_real(R::from_i64(2)))))
}

/// `Δ̃_q v = Σ_j X̃_j² v`.
pub fn line_sublaplacian<R: Real>(frame: &LineFrame<R>, v: &Poly<R>) -> Result<Poly<R>> {
    let mut out = Poly::zero(LINE_NVARS);
    for j in 1..=4 {
        out = out.add(&line_field(frame, j, &line_field(frame, j, v)?)?);
    }
    Ok(out)
}

/// `ι_{η,q}^* u`, the composition with `(λ, t) ↦ η·(qλ, t)`.
pub fn pullback_to_line<R: Real>(frame: &LineFrame<R>, u: &Poly<R>) -> Result<Poly<R>> {
    let n = group_n(u)?;
    if n != frame.n() {
        return Err(Error::Dimension("polynomial and line live on different groups".into()));
    }
    let lam: Vec<Poly<R>> = (0..4).map(|k| Poly::var(LINE_NVARS, k)).collect();
    let mut horizontal = Vec::with_capacity(4 * n);
    for ql in &frame.q {
        let r = real_rep(ql);
        for row in &r {
            let comp = (0..4).fold(Poly::zero(LINE_NVARS), |acc, k| acc.add(&lam[k].scale_real(&row[k])));
            horizontal.push(comp);
        }
    }
    // η·(y, t) = (η_x + y, η_t + t + 2⟨η_x, y⟩)
    let eta = &frame.eta;
    let mut t = Poly::var(LINE_NVARS, 4).add(&Poly::real_constant(LINE_NVARS, eta.t.clone()));
    let two = R::from_i64(2);
    for l in 0..2 * n {
        let (a, b) = (2 * l, 2 * l + 1);
        let term = horizontal[b].scale_real(&eta.x[a]).sub(&horizontal[a].scale_real(&eta.x[b]));
        t = t.add(&term.scale_real(&two));
    }
    let mut subs: Vec<Poly<R>> =
        horizontal.iter().zip(&eta.x).map(|(h, e)| h.add(&Poly::real_constant(LINE_NVARS, e.clone()))).collect();
    subs.push(t);
    debug_assert_eq!(subs.len(), group_nvars(n));
    Ok(u.compose(&subs))
}

/// `Σ_{l,k} (q̄_l^ℝ)_{jk} X_{4l+k} u`, the push-forward of `X̃_j` applied to `u`.
pub fn pushforward_field<R: Real>(frame: &LineFrame<R>, j: usize, u: &Poly<R>) -> Result<Poly<R>> {
    let n = group_n(u)?;
    if !(1..=4).contains(&j) {
        return Err(Error::Index(format!("line field index {j} not in 1..=4")));
    }
    let mut out = Poly::zero(u.nvars());
    for (l, ql) in frame.q.iter().enumerate() {
        let r = real_rep(&ql.conj());
        for k in 1..=4 {
            let c = &r[j - 1][k - 1];
            if c.is_zero() {
                continue;
            }
            out = out.add(&apply_x(n, 4 * l + k, u).scale_real(c));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{norm_sq, parse_poly};
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rq(rng: &mut ChaCha8Rng) -> Quaternion<Rational> {
        let mut r = || Rational::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        Quaternion::new(r(), r(), r(), r())
    }

    #[test]
    fn unit_frame() {
        let f = LineFrame::new(GroupPoint::<Rational>::identity(1), vec![Quaternion::one()]).unwrap();
        assert_eq!(f.b(), &symplectic_j::<Rational>());
        assert_eq!(f.lambda_sq(), &Rational::from_i64(1));
    }

    #[test]
    fn degenerate_pair() {
        assert!(is_degenerate(&[Quaternion::one(), Quaternion::unit_j()], 1e-12).unwrap());
        assert!(!is_degenerate(&[Quaternion::one(), Quaternion::one()], 1e-12).unwrap());
        assert!(LineFrame::new(GroupPoint::<f64>::identity(1), vec![Quaternion::zero()]).is_err());
    }

    #[test]
    fn b_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let q: Vec<_> = (0..n).map(|_| rq(&mut rng)).collect();
            let f = LineFrame::new(GroupPoint::identity(n), q).unwrap();
            let b = f.b();
            let bbt = mat4_mul(b, &mat4_transpose(b));
            for r in 0..4 {
                for c in 0..4 {
                    assert_eq!(b[r][c], -b[c][r].clone());
                    let expect = if r == c { f.lambda_sq().clone() } else { Rational::from_i64(0) };
                    assert_eq!(bbt[r][c], expect);
                }
            }
            let [s1, s2, s3] = f.s_components();
            assert_eq!(s1.clone() * s1 + s2.clone() * s2 + s3.clone() * s3, f.lambda_sq().clone());
        }
    }

    #[test]
    fn embedding_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 2;
        let q: Vec<_> = (0..n).map(|_| rq(&mut rng)).collect();
        let f = LineFrame::new(GroupPoint::identity(n), q.clone()).unwrap();
        let p = LinePoint::new(rq(&mut rng), Rational::from_i64(3));
        let o = LinePoint::new(rq(&mut rng), Rational::ratio(-1, 2));
        let lhs = f.embed(&f.line_mul(&p, &o)).unwrap();
        let rhs = f.embed(&p).unwrap().mul(&f.embed(&o).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        let eta =
            GroupPoint::new((0..4 * n).map(|k| Rational::from_i64(k as i64 - 3)).collect(), Rational::from_i64(2))
                .unwrap();
        let g = LineFrame::new(eta.clone(), q).unwrap();
        assert_eq!(g.embed(&p).unwrap(), eta.mul(&f.embed(&p).unwrap()).unwrap());
    }

    #[test]
    fn line_field_examples() {
        let f = LineFrame::new(GroupPoint::<Rational>::identity(1), vec![Quaternion::one()]).unwrap();
        let lam2 = (0..4).fold(Poly::zero(5), |acc, k| acc.add(&Poly::<Rational>::var(5, k).pow(2)));
        assert_eq!(line_sublaplacian(&f, &lam2).unwrap(), Poly::real_constant(5, Rational::from_i64(8)));
        let u = parse_poly::<Rational>("x1", 1).unwrap();
        assert_eq!(pullback_to_line(&f, &u).unwrap(), Poly::var(5, 0));
        let t = Poly::<Rational>::var(5, 4);
        let xt = line_field(&f, 1, &t).unwrap();
        assert_eq!(xt, Poly::var(5, 1).scale_real(&Rational::from_i64(-2)));
    }

    #[test]
    fn intertwining_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 2;
        let u: Poly<Rational> = parse_poly("x1^2*t + x2*x7 - 3*x5*x6*x8 + t^2 + x4*x3", n).unwrap();
        for _ in 0..3 {
            let q: Vec<_> = (0..n).map(|_| rq(&mut rng)).collect();
            let eta = GroupPoint::new(
                (0..4 * n).map(|_| Rational::from_i64(rng.gen_range(-3..=3))).collect(),
                Rational::from_i64(1),
            )
            .unwrap();
            let f = LineFrame::new(eta, q).unwrap();
            let pulled = pullback_to_line(&f, &u).unwrap();
            for j in 1..=4 {
                let lhs = line_field(&f, j, &pulled).unwrap();
                let rhs = pullback_to_line(&f, &pushforward_field(&f, j, &u).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        let f = LineFrame::new(GroupPoint::identity(n), vec![Quaternion::one(), Quaternion::zero()]).unwrap();
        let v = pullback_to_line(&f, &norm_sq::<Rational>(n)).unwrap();
        assert_eq!(line_sublaplacian(&f, &v).unwrap(), Poly::real_constant(5, Rational::from_i64(8)));
    }
}
