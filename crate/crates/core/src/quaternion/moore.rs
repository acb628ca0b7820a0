use nalgebra::{DMatrix, SymmetricEigen};

use super::{HyperhermitianMatrix, QuatMatrix, Quaternion};
use crate::error::{validation, Error, Result};
use crate::scalar::{Cx, Real};

/// Largest order accepted by the mixed discriminant.
pub const MAX_MIXED_ORDER: usize = 8;

/// Quaternionic eigen-decomposition `U* M U = diag(values)`.
#[derive(Clone, Debug)]
pub struct HyperEigen {
    /// Ascending real eigenvalues, one per quaternionic dimension.
    pub values: Vec<f64>,
    pub vectors: Option<QuatMatrix<f64>>,
}

/// Eigenvalues (and optionally a quaternionic unitary) of a hyperhermitian matrix,
/// read off the doubled spectrum of its complex image.
pub fn eigen_hyperhermitian(m: &HyperhermitianMatrix<f64>, want_vectors: bool) -> HyperEigen {
    let n = m.n();
    let t: DMatrix<Cx<f64>> = m.tau().to_nalgebra();
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> =
        (0..n).map(|i| 0.5 * (eig.eigenvalues[order[2 * i]] + eig.eigenvalues[order[2 * i + 1]])).collect();
    if !want_vectors {
        return HyperEigen { values, vectors: None };
    }

    let mut columns: Vec<Vec<Quaternion<f64>>> = Vec::with_capacity(n);
    let mut used = vec![false; 2 * n];
    while columns.len() < n {
        let mut pick: Option<(usize, Vec<Quaternion<f64>>, f64)> = None;
        for &idx in &order {
            if used[idx] {
                continue;
            }
            let v = eig.eigenvectors.column(idx);
            let x: Vec<Quaternion<f64>> =
                (0..n).map(|l| Quaternion::from_complex_pair(&v[l], &v[n + l].conj())).collect();
            let x = project_out(&columns, x);
            let norm = quat_vec_norm(&x);
            let better = pick.as_ref().is_none_or(|p| norm > p.2);
            if better {
                pick = Some((idx, x, norm));
            }
            if norm * norm >= 0.5 {
                break;
            }
        }
        let (idx, x, norm) = pick.expect("candidate eigenvector available");
        used[idx] = true;
        if norm <= 1e-12 {
            continue;
        }
        columns.push(x.into_iter().map(|q| q.scale(&(1.0 / norm))).collect());
    }

    let mut with_rayleigh: Vec<(f64, Vec<Quaternion<f64>>)> =
        columns.into_iter().map(|col| (rayleigh(m, &col), col)).collect();
    with_rayleigh.sort_by(|a, b| a.0.total_cmp(&b.0));
    let u = QuatMatrix::from_fn(n, n, |r, c| with_rayleigh[c].1[r].clone());
    HyperEigen { values, vectors: Some(u) }
}

fn quat_vec_norm(x: &[Quaternion<f64>]) -> f64 {
    x.iter().map(Quaternion::norm_sqr).sum::<f64>().sqrt()
}

/// Removes the right-quaternionic span of orthonormal `basis` from `x`.
fn project_out(basis: &[Vec<Quaternion<f64>>], mut x: Vec<Quaternion<f64>>) -> Vec<Quaternion<f64>> {
    for _ in 0..2 {
        for y in basis {
            let coeff = y.iter().zip(&x).fold(Quaternion::zero(), |acc, (yl, xl)| acc + yl.conj() * xl.clone());
            for (xl, yl) in x.iter_mut().zip(y) {
                *xl = xl.clone() - yl.clone() * coeff.clone();
            }
        }
    }
    x
}

fn rayleigh(m: &HyperhermitianMatrix<f64>, x: &[Quaternion<f64>]) -> f64 {
    let n = m.n();
    let mut acc = Quaternion::zero();
    for r in 0..n {
        for c in 0..n {
            acc = acc + x[r].conj() * m.get(r, c).clone() * x[c].clone();
        }
    }
    acc.re
}

/// Moore determinant as the product of the quaternionic eigenvalues.
pub fn moore_det(m: &HyperhermitianMatrix<f64>) -> f64 {
    eigen_hyperhermitian(m, false).values.iter().product()
}

/// Moore determinant by its permutation-cycle expansion; exact for rational entries.
pub fn moore_det_expansion<R: Real>(m: &HyperhermitianMatrix<R>) -> R {
    let n = m.n();
    let mut total = Quaternion::<R>::zero();
    for_each_permutation(n, |perm| {
        let cycles = canonical_cycles(perm);
        let mut prod = Quaternion::<R>::one();
        for cycle in &cycles {
            for w in 0..cycle.len() {
                let from = cycle[w];
                let to = cycle[(w + 1) % cycle.len()];
                prod = prod * m.get(from, to).clone();
            }
        }
        if (n - cycles.len()) % 2 == 1 {
            prod = -prod;
        }
        total = total.clone() + prod;
    });
    total.re
}

/// Exact expansion for exact scalars, eigenvalue product otherwise.
pub fn moore_det_generic<R: Real>(m: &HyperhermitianMatrix<R>) -> R {
    if R::EXACT {
        moore_det_expansion(m)
    } else {
        R::from_f64(moore_det(&m.to_f64()))
    }
}

/// Cycles of `perm`, each starting at its smallest element, ordered by decreasing leader.
fn canonical_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = perm[start];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = perm[cur];
        }
        cycles.push(cycle);
    }
    cycles.reverse();
    cycles
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(k: usize, perm: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if k == perm.len() {
            f(perm);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            rec(k + 1, perm, f);
            perm.swap(k, i);
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    rec(0, &mut perm, &mut f);
}

fn check_mixed_args<R: Real>(ms: &[HyperhermitianMatrix<R>]) -> Result<usize> {
    let n = ms.first().ok_or_else(|| validation("mixed discriminant needs at least one matrix"))?.n();
    if ms.iter().any(|m| m.n() != n) {
        return Err(validation("mixed discriminant arguments differ in size"));
    }
    if ms.len() != n {
        return Err(validation(format!(
            "mixed discriminant of {n}x{n} matrices takes {n} arguments, got {}",
            ms.len()
        )));
    }
    if n > MAX_MIXED_ORDER {
        return Err(Error::Limit(format!("mixed discriminant supports n <= {MAX_MIXED_ORDER}, got {n}")));
    }
    Ok(n)
}

fn polarize<R: Real>(ms: &[HyperhermitianMatrix<R>], det: impl Fn(&HyperhermitianMatrix<R>) -> R) -> Result<R> {
    let n = check_mixed_args(ms)?;
    let mut total = R::zero();
    for mask in 1u32..(1 << n) {
        let mut sum: Option<HyperhermitianMatrix<R>> = None;
        for (i, m) in ms.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum = Some(match sum {
                    None => m.clone(),
                    Some(s) => s.add(m)?,
                });
            }
        }
        let d = det(&sum.expect("non-empty subset"));
        if (n - mask.count_ones() as usize).is_multiple_of(2) {
            total = total + d;
        } else {
            total = total - d;
        }
    }
    Ok(total / R::from_i64(crate::scalar::factorial(n) as i64))
}

/// Mixed discriminant by inclusion–exclusion over subsets, using eigenvalue determinants.
pub fn mixed_discriminant(ms: &[HyperhermitianMatrix<f64>]) -> Result<f64> {
    polarize(ms, moore_det)
}

/// Mixed discriminant using the exact cycle expansion (or eigenvalues for float scalars).
pub fn mixed_discriminant_exact<R: Real>(ms: &[HyperhermitianMatrix<R>]) -> Result<R> {
    polarize(ms, moore_det_generic)
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_nonneg(m: &HyperhermitianMatrix<f64>, tol: f64) -> bool {
    eigen_hyperhermitian(m, false).values.first().is_none_or(|&v| v >= -tol)
}
