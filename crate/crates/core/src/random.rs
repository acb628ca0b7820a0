//! Seeded generators for test inputs: polynomials, forms, quaternionic matrices, PSH quadratics.

use rand::Rng;

use crate::calculus::PolyForm;
use crate::error::Result;
use crate::exterior::Form;
use crate::poly::{group_nvars, norm_sq, Poly};
use crate::qma::hessian_at;
use crate::quaternion::{eigen_hyperhermitian, HyperhermitianMatrix, QuatMatrix, Quaternion};
use crate::scalar::{cx, Real};

fn small_rational<R: Real, G: Rng>(rng: &mut G) -> R {
    let mut num = rng.gen_range(-6..=6);
    if num == 0 {
        num = 1;
    }
    R::ratio(num, rng.gen_range(1..=3))
}

/// Sparse polynomial with `terms` monomials of total degree `≤ max_degree`; complex coefficients
/// when `complex` is set.
pub fn random_poly<R: Real, G: Rng>(
    rng: &mut G,
    nvars: usize,
    terms: usize,
    max_degree: usize,
    complex: bool,
) -> Poly<R> {
    let mut p = Poly::zero(nvars);
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_degree);
        let mut e = vec![0u8; nvars];
        for _ in 0..deg {
            e[rng.gen_range(0..nvars)] += 1;
        }
        let im = if complex && rng.gen_bool(0.5) { small_rational(rng) } else { R::zero() };
        p.add_term(e, cx(small_rational(rng), im));
    }
    p
}

/// Real polynomial on the group of dimension `n`.
pub fn random_group_poly<R: Real, G: Rng>(rng: &mut G, n: usize, terms: usize, max_degree: usize) -> Poly<R> {
    random_poly(rng, group_nvars(n), terms, max_degree, false)
}

/// A `degree`-form with `len` random multi-indices and complex polynomial coefficients.
pub fn random_poly_form<R: Real, G: Rng>(rng: &mut G, n: usize, degree: usize, len: usize) -> PolyForm<R> {
    let mut f = Form::zero(n, degree);
    for _ in 0..len {
        let mut idx: Vec<usize> = (0..2 * n).collect();
        for k in 0..degree {
            let j = rng.gen_range(k..2 * n);
            idx.swap(k, j);
        }
        idx.truncate(degree);
        f.add_term(&idx, random_poly(rng, group_nvars(n), 3, 3, true));
    }
    f
}

/// Random point with small rational coordinates.
pub fn random_point<R: Real, G: Rng>(rng: &mut G, n: usize) -> Vec<R> {
    (0..group_nvars(n)).map(|_| R::ratio(rng.gen_range(-8..=8), rng.gen_range(1..=4))).collect()
}

/// Quaternion with small rational components, never zero.
pub fn random_quaternion_exact<R: Real, G: Rng>(rng: &mut G) -> Quaternion<R> {
    Quaternion::new(small_rational(rng), small_rational(rng), small_rational(rng), small_rational(rng))
}

pub fn random_quaternion<G: Rng>(rng: &mut G) -> Quaternion<f64> {
    Quaternion::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

pub fn random_quat_matrix<G: Rng>(rng: &mut G, rows: usize, cols: usize) -> QuatMatrix<f64> {
    QuatMatrix::from_fn(rows, cols, |_, _| random_quaternion(rng))
}

/// `A + A*` for a random `A`.
pub fn random_hyperhermitian<G: Rng>(rng: &mut G, n: usize) -> HyperhermitianMatrix<f64> {
    let a = random_quat_matrix(rng, n, n);
    HyperhermitianMatrix::new(a.add(&a.adjoint()).expect("square")).expect("hyperhermitian by construction")
}

/// `C*C` for a random `C`.
pub fn random_nonneg_hyperhermitian<G: Rng>(rng: &mut G, n: usize) -> HyperhermitianMatrix<f64> {
    HyperhermitianMatrix::gram(&random_quat_matrix(rng, n, n)).expect("square")
}

/// Complex hermitian matrix embedded as a hyperhermitian one (no `𝐣` parts).
pub fn random_complex_hermitian<G: Rng>(rng: &mut G, n: usize) -> HyperhermitianMatrix<f64> {
    let mut m = QuatMatrix::zeros(n, n);
    for r in 0..n {
        for c in r..n {
            let (re, im) = (rng.gen_range(-1.0..1.0), if r == c { 0.0 } else { rng.gen_range(-1.0..1.0) });
            m.set(r, c, Quaternion::new(re, im, 0.0, 0.0));
            m.set(c, r, Quaternion::new(re, -im, 0.0, 0.0));
        }
    }
    HyperhermitianMatrix::new(m).expect("hermitian by construction")
}

/// A random quadratic in `x` plus linear and `t` terms, shifted by `c|x|²` so that the smallest
/// Hessian eigenvalue is at least `margin`.
pub fn random_psh_quadratic<G: Rng>(rng: &mut G, n: usize, margin: f64) -> Result<Poly<f64>> {
    let nv = group_nvars(n);
    let mut u = Poly::zero(nv);
    for a in 0..4 * n {
        for b in a..4 * n {
            let mut e = vec![0u8; nv];
            e[a] += 1;
            e[b] += 1;
            u.add_term(e, cx(rng.gen_range(-1.0..1.0), 0.0));
        }
        let mut e = vec![0u8; nv];
        e[a] = 1;
        u.add_term(e, cx(rng.gen_range(-1.0..1.0), 0.0));
    }
    let mut e = vec![0u8; nv];
    e[4 * n] = 1;
    u.add_term(e, cx(rng.gen_range(-1.0..1.0), 0.0));
    let h = hessian_at(&u, &vec![0.0; nv])?;
    let lowest = eigen_hyperhermitian(&h, false).values[0];
    let shift = (margin - lowest).max(0.0) / 8.0;
    Ok(u.add(&norm_sq::<f64>(n).scale_real(&shift)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::is_nonneg;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn psh_quadratics_have_margin() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=2 {
            for _ in 0..5 {
                let u = random_psh_quadratic(&mut rng, n, 0.1).unwrap();
                let h = hessian_at(&u, &vec![0.3; 4 * n + 1]).unwrap();
                assert!(eigen_hyperhermitian(&h, false).values[0] >= 0.1 - 1e-9);
            }
        }
    }

    #[test]
    fn generators_respect_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_poly_form::<f64, _>(&mut rng, 2, 2, 3);
        assert_eq!((f.n(), f.degree()), (2, 2));
        assert!(is_nonneg(&random_nonneg_hyperhermitian(&mut rng, 3), 1e-10));
        let h = random_complex_hermitian(&mut rng, 3);
        assert!(h.matrix().entries().iter().all(|q| q.j == 0.0 && q.k == 0.0));
    }
}
