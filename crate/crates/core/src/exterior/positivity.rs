use rand::Rng;

use super::{ConstForm, Form};
use crate::error::{validation, Error, Result};
use crate::quaternion::{eigen_hyperhermitian, ComplexMatrix, HyperhermitianMatrix, QuatMatrix, Quaternion};
use crate::scalar::{cx_to_f64, Cx, Real};

/// `Σ_{A,B} M_AB ω^A∧ω^B` for a skew-symmetric `2n×2n` matrix.
pub fn two_form_from_matrix<R: Real>(m: &ComplexMatrix<R>) -> Result<ConstForm<R>> {
    let size = m.rows();
    if size != m.cols() || size == 0 || !size.is_multiple_of(2) {
        return Err(validation(format!("expected an even square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let defect = m.transpose().scale(&-Cx::<R>::new(R::one(), R::zero())).sub(m)?;
    let skew = if R::EXACT { defect.norm_inf() == 0.0 } else { defect.norm_inf() <= 1e-10 * (1.0 + m.norm_inf()) };
    if !skew {
        return Err(validation(format!("matrix is not skew-symmetric: |M + M^T| = {:e}", defect.norm_inf())));
    }
    let n = size / 2;
    let mut f = Form::zero(n, 2);
    for a in 0..size {
        for b in a + 1..size {
            f.add_term(&[a, b], m.get(a, b).clone() - m.get(b, a).clone());
        }
    }
    Ok(f)
}

/// Pulls a form on `C^{rows}` back along `g`, with `g*ω̃^p = Σ_j g_pj ω^j`.
pub fn pullback<R: Real>(f: &ConstForm<R>, g: &ComplexMatrix<R>) -> Result<ConstForm<R>> {
    if g.rows() != 2 * f.n() || !g.cols().is_multiple_of(2) || g.cols() == 0 {
        return Err(Error::Dimension(format!(
            "cannot pull a form on C^{} back along a {}x{} matrix",
            2 * f.n(),
            g.rows(),
            g.cols()
        )));
    }
    let target_n = g.cols() / 2;
    if f.degree() > g.cols() {
        return Ok(Form::zero(target_n, 0));
    }
    let images: Vec<ConstForm<R>> = (0..g.rows())
        .map(|p| {
            let mut one_form = Form::zero(target_n, 1);
            for j in 0..g.cols() {
                one_form.add_term(&[j], g.get(p, j).clone());
            }
            one_form
        })
        .collect();
    let mut out = Form::zero(target_n, f.degree());
    for (mi, c) in f.terms() {
        let mut term = Form::scalar(target_n, c.clone());
        for p in mi.indices() {
            term = term.wedge(&images[p])?;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Pullback of `ω̃^0∧ω̃^k∧…∧ω̃^{k−1}∧ω̃^{2k−1}` along `τ(M)` for a rank-`k` quaternionic `k×n` matrix.
pub fn elementary_strongly_positive<R: Real>(m: &QuatMatrix<R>) -> Result<ConstForm<R>> {
    let (k, n) = (m.rows(), m.cols());
    if k > n {
        return Err(validation(format!("expected k <= n, got a {k}x{n} matrix")));
    }
    let t = m.tau();
    let svd = t.to_nalgebra().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    if !(max > 0.0 && min > 1e-10 * max) {
        return Err(validation(format!("quaternionic matrix has rank below {k}")));
    }
    pullback(&ConstForm::<R>::omega(k), &t)
}

/// Outcome of the exact strong-positivity test for real 2-forms.
#[derive(Clone, Debug)]
pub struct StrongPositivity {
    pub nonneg: bool,
    /// Ascending eigenvalues of the recovered hyperhermitian matrix.
    pub eigenvalues: Vec<f64>,
    pub matrix: HyperhermitianMatrix<f64>,
}

/// Recovers `M` with `two_form_from_matrix(τ(M)𝕁) = F` and tests `M ≥ 0`.
pub fn strong_positivity_test_2form<R: Real>(f: &ConstForm<R>, tol: f64) -> Result<StrongPositivity> {
    if f.degree() != 2 {
        return Err(validation(format!("expected a 2-form, got degree {}", f.degree())));
    }
    let n = f.n();
    let coeff = |a: usize, b: usize| -> Cx<f64> { f.coeff(&[a, b]).map(|c| cx_to_f64(&c)).unwrap_or_default() };
    let scale = 1e-10 * (1.0 + f.to_f64().norm_inf());
    let mut entries = Vec::with_capacity(n * n);
    for l in 0..n {
        for m in 0..n {
            let a = coeff(l, n + m) * 0.5;
            let b = if l == m { Cx::default() } else { coeff(l, m) * 0.5 };
            let a_mirror = coeff(m, n + l) * 0.5;
            if (a - a_mirror.conj()).norm() > scale {
                return Err(validation(format!("2-form is not j-real: mixed block is not hermitian at ({l}, {m})")));
            }
            if l != m && (coeff(n + l, n + m) * 0.5 - b.conj()).norm() > scale {
                return Err(validation(format!("2-form is not j-real: blocks disagree at ({l}, {m})")));
            }
            entries.push(Quaternion::from_complex_pair(&a, &b));
        }
    }
    let matrix = HyperhermitianMatrix::new(QuatMatrix::from_vec(n, n, entries)?)?;
    let eigenvalues = eigen_hyperhermitian(&matrix, false).values;
    let nonneg = eigenvalues.first().is_none_or(|&v| v >= -tol);
    Ok(StrongPositivity { nonneg, eigenvalues, matrix })
}

/// True iff `F = κ·Ω₂ₙ` with real `κ ≥ −tol`.
pub fn positivity_certificate_2nform<R: Real>(f: &ConstForm<R>, tol: f64) -> Result<bool> {
    let c = f.delta_n_coeff()?.map(|c| cx_to_f64(&c)).unwrap_or_default();
    Ok(c.re >= -tol && c.im.abs() <= tol.max(0.0) + 1e-12 * c.re.abs())
}

/// Randomized necessary condition for strong positivity of a `2k`-form:
/// `F ∧ G` must be positive for sampled elementary strongly positive `(2n−2k)`-forms `G`.
pub fn strong_positivity_certificate<G: Rng>(
    f: &ConstForm<f64>,
    samples: usize,
    rng: &mut G,
    tol: f64,
) -> Result<bool> {
    let (n, deg) = (f.n(), f.degree());
    if deg % 2 != 0 {
        return Err(validation("strong positivity needs an even degree"));
    }
    let k = deg / 2;
    if k == n {
        return positivity_certificate_2nform(f, tol);
    }
    let rows = n - k;
    for _ in 0..samples {
        let m = QuatMatrix::from_fn(rows, n, |_, _| {
            Quaternion::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        });
        let g = match elementary_strongly_positive(&m) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let scale = f.norm_inf() * g.norm_inf();
        if !positivity_certificate_2nform(&f.wedge(&g)?, tol * (1.0 + scale))? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::{j_symplectic, mixed_discriminant};
    use crate::scalar::{one_cx, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rand_hh(rng: &mut ChaCha8Rng, n: usize) -> HyperhermitianMatrix<f64> {
        let a = QuatMatrix::from_fn(n, n, |_, _| {
            Quaternion::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        });
        HyperhermitianMatrix::new(a.add(&a.adjoint()).unwrap()).unwrap()
    }

    fn hessian_form(m: &HyperhermitianMatrix<f64>) -> ConstForm<f64> {
        let tj = m.tau().mul(&j_symplectic(m.n())).unwrap();
        two_form_from_matrix(&tj).unwrap()
    }

    #[test]
    fn identity_block_gives_two_beta() {
        for n in 1..=3 {
            let m = HyperhermitianMatrix::<Rational>::identity(n);
            let tj = m.tau().mul(&j_symplectic(n)).unwrap();
            let f = two_form_from_matrix(&tj).unwrap();
            assert_eq!(f, ConstForm::<Rational>::beta(n).scale_real(Rational::from_i64(2)));
        }
    }

    #[test]
    fn rejects_non_skew() {
        let m = ComplexMatrix::<f64>::identity(2);
        assert!(two_form_from_matrix(&m).is_err());
    }

    #[test]
    fn mixed_discriminant_bridge() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=4 {
            let ms: Vec<_> = (0..n).map(|_| rand_hh(&mut rng, n)).collect();
            let mut acc = ConstForm::<f64>::scalar(n, one_cx());
            for m in &ms {
                let f = hessian_form(m);
                assert!(f.is_real(1e-12));
                acc = acc.wedge(&f).unwrap();
            }
            let lhs = acc.delta_n_coeff().unwrap().unwrap().re;
            let md = mixed_discriminant(&ms).unwrap();
            let rhs = (1u64 << n) as f64 * crate::scalar::factorial(n) as f64 * md;
            assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs.abs()), "n={n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn recovers_hessian_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=3 {
            let m = rand_hh(&mut rng, n);
            let sp = strong_positivity_test_2form(&hessian_form(&m), 1e-9).unwrap();
            let diff = sp.matrix.matrix().sub(m.matrix()).unwrap().norm_inf();
            assert!(diff < 1e-12);
        }
        let sp = strong_positivity_test_2form(&ConstForm::<f64>::beta(2), 1e-9).unwrap();
        assert!(sp.nonneg);
        assert!(sp.eigenvalues.iter().all(|&v| (v - 0.5).abs() < 1e-12));
        assert!(!strong_positivity_test_2form(&ConstForm::<f64>::beta(2).neg(), 1e-9).unwrap().nonneg);
        let not_real = ConstForm::<f64>::monomial(2, &[0, 3], Cx::new(1.0, 0.0)).unwrap();
        assert!(strong_positivity_test_2form(&not_real, 1e-9).is_err());
    }

    #[test]
    fn elementary_identity_rows() {
        let n = 3;
        for k in 1..=n {
            let m = QuatMatrix::<Rational>::from_fn(
                k,
                n,
                |r, c| {
                    if r == c {
                        Quaternion::one()
                    } else {
                        Quaternion::zero()
                    }
                },
            );
            let f = elementary_strongly_positive(&m).unwrap();
            let idx: Vec<usize> = (0..k).flat_map(|l| [l, n + l]).collect();
            assert_eq!(f, ConstForm::<Rational>::monomial(n, &idx, one_cx()).unwrap());
        }
        let id = QuatMatrix::<Rational>::identity(2);
        assert_eq!(elementary_strongly_positive(&id).unwrap(), ConstForm::omega(2));
        let rank0 = QuatMatrix::<f64>::zeros(1, 2);
        assert!(elementary_strongly_positive(&rank0).is_err());
    }

    #[test]
    fn pullback_is_functorial() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rq = |rng: &mut ChaCha8Rng| {
            Quaternion::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        };
        for _ in 0..10 {
            let a = QuatMatrix::from_fn(1, 2, |_, _| rq(&mut rng));
            let b = QuatMatrix::from_fn(2, 3, |_, _| rq(&mut rng));
            let ab = a.mul(&b).unwrap();
            {
                let idx = [0usize, 1usize];
                let f = ConstForm::<f64>::monomial(1, &idx, Cx::new(1.0, 0.0)).unwrap();
                let direct = pullback(&f, &ab.tau()).unwrap();
                let staged = pullback(&pullback(&f, &a.tau()).unwrap(), &b.tau()).unwrap();
                assert!(direct.sub(&staged).unwrap().norm_inf() < 1e-12);
            }
        }
    }

    #[test]
    fn certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        assert!(positivity_certificate_2nform(&ConstForm::<f64>::omega(2), 1e-12).unwrap());
        assert!(!positivity_certificate_2nform(&ConstForm::<f64>::omega(2).neg(), 1e-12).unwrap());
        let b = ConstForm::<f64>::beta(3);
        assert!(strong_positivity_certificate(&b, 20, &mut rng, 1e-10).unwrap());
        assert!(!strong_positivity_certificate(&b.neg(), 20, &mut rng, 1e-10).unwrap());
    }
}
