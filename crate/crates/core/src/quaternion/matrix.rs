use nalgebra::DMatrix;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::Quaternion;
use crate::error::{validation, Error, Result};
use crate::scalar::{cx_norm_inf, Cx, Real};

/// Dense quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuatMatrix<R = f64> {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion<R>>,
}

impl<R: Real> QuatMatrix<R> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Quaternion<R>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(validation("quaternionic matrix must have positive dimensions"));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion<R>) -> Self {
        assert!(rows > 0 && cols > 0, "quaternionic matrix must have positive dimensions");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Quaternion::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { Quaternion::one() } else { Quaternion::zero() })
    }

    pub fn diagonal(d: &[R]) -> Self {
        Self::from_fn(d.len(), d.len(), |r, c| if r == c { Quaternion::real(d[r].clone()) } else { Quaternion::zero() })
    }

    /// Builds `a + b𝐣` from complex matrices of equal shape.
    pub fn from_complex_parts(a: &ComplexMatrix<R>, b: &ComplexMatrix<R>) -> Result<Self> {
        if a.rows != b.rows || a.cols != b.cols {
            return Err(Error::Dimension("complex parts differ in shape".into()));
        }
        Ok(Self::from_fn(a.rows, a.cols, |r, c| Quaternion::from_complex_pair(a.get(r, c), b.get(r, c))))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Quaternion<R>] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &Quaternion<R> {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, q: Quaternion<R>) {
        self.data[r * self.cols + c] = q;
    }

    pub fn row(&self, r: usize) -> &[Quaternion<R>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(Self::from_fn(self.rows, o.cols, |r, c| {
            (0..self.cols).fold(Quaternion::zero(), |acc, k| acc + self.get(r, k) * o.get(k, c))
        }))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.clone() - b.clone())
    }

    fn zip(&self, o: &Self, f: impl Fn(&Quaternion<R>, &Quaternion<R>) -> Quaternion<R>) -> Result<Self> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension("matrix shapes differ".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols, |r, c| f(self.get(r, c), o.get(r, c))))
    }

    pub fn scale(&self, s: &R) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.get(r, c).scale(s))
    }

    /// Largest absolute real component over all entries.
    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(Quaternion::max_abs).fold(0.0, f64::max)
    }

    /// Complex parts `(a, b)` with `self = a + b𝐣`.
    pub fn complex_parts(&self) -> (ComplexMatrix<R>, ComplexMatrix<R>) {
        let a = ComplexMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).complex_pair().0);
        let b = ComplexMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).complex_pair().1);
        (a, b)
    }

    /// The complex `2p×2m` image `[[a, −b], [b̄, ā]]`.
    pub fn tau(&self) -> ComplexMatrix<R> {
        let (p, m) = (self.rows, self.cols);
        ComplexMatrix::from_fn(2 * p, 2 * m, |r, c| {
            let (a, b) = self.get(r % p, c % m).complex_pair();
            match (r < p, c < m) {
                (true, true) => a,
                (true, false) => -b,
                (false, true) => b.conj(),
                (false, false) => a.conj(),
            }
        })
    }

    pub fn to_f64(&self) -> QuatMatrix<f64> {
        QuatMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).to_f64())
    }

    pub fn from_f64(m: &QuatMatrix<f64>) -> Self {
        Self::from_fn(m.rows, m.cols, |r, c| Quaternion::from_f64(m.get(r, c)))
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<R = f64> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<R>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Cx<R>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Cx::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { Cx::one() } else { Cx::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Cx<R> {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, z: Cx<R>) {
        self.data[r * self.cols + c] = z;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(Self::from_fn(self.rows, o.cols, |r, c| {
            (0..self.cols).fold(Cx::zero(), |acc: Cx<R>, k| acc + self.get(r, k).clone() * o.get(k, c).clone())
        }))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension("matrix shapes differ".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols, |r, c| self.get(r, c).clone() - o.get(r, c).clone()))
    }

    pub fn scale(&self, s: &Cx<R>) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.get(r, c).clone() * s.clone())
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(cx_norm_inf).fold(0.0, f64::max)
    }

    pub fn is_hermitian_exact(&self) -> bool {
        self.rows == self.cols && *self == self.adjoint()
    }

    pub fn to_f64(&self) -> ComplexMatrix<f64> {
        ComplexMatrix::from_fn(self.rows, self.cols, |r, c| {
            let z = self.get(r, c);
            Cx::new(z.re.to_f64(), z.im.to_f64())
        })
    }

    pub fn to_nalgebra(&self) -> DMatrix<Cx<f64>> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| {
            let z = self.get(r, c);
            Cx::new(z.re.to_f64(), z.im.to_f64())
        })
    }
}

/// The `2n×2n` block matrix `[[0, I], [−I, 0]]`.
pub fn j_symplectic<R: Real>(n: usize) -> ComplexMatrix<R> {
    ComplexMatrix::from_fn(2 * n, 2 * n, |r, c| {
        if r < n && c == r + n {
            Cx::one()
        } else if r >= n && c + n == r {
            -Cx::<R>::one()
        } else {
            Cx::zero()
        }
    })
}

/// A square quaternionic matrix with `M = M*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuatMatrix<R>", into = "QuatMatrix<R>")]
pub struct HyperhermitianMatrix<R: Real = f64>(QuatMatrix<R>);

impl<R: Real> HyperhermitianMatrix<R> {
    /// Float input must satisfy `‖M − M*‖∞ ≤ 1e-10·(1 + ‖M‖∞)`; exact input must be exactly hyperhermitian.
    pub fn new(m: QuatMatrix<R>) -> Result<Self> {
        if !m.is_square() {
            return Err(validation(format!("hyperhermitian matrix must be square, got {}x{}", m.rows(), m.cols())));
        }
        let defect = m.sub(&m.adjoint())?;
        let ok = if R::EXACT {
            defect.entries().iter().all(Quaternion::is_zero)
        } else {
            defect.norm_inf() <= 1e-10 * (1.0 + m.norm_inf())
        };
        if !ok {
            return Err(validation(format!("matrix is not hyperhermitian: |M - M*| = {:e}", defect.norm_inf())));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(QuatMatrix::identity(n))
    }

    pub fn diagonal(d: &[R]) -> Self {
        Self(QuatMatrix::diagonal(d))
    }

    /// Builds `C* M C`, which is hyperhermitian for any `C`.
    pub fn congruence(&self, c: &QuatMatrix<R>) -> Result<Self> {
        let m = c.adjoint().mul(&self.0)?.mul(c)?;
        Ok(Self(symmetrize(&m)))
    }

    /// Builds `C* C`.
    pub fn gram(c: &QuatMatrix<R>) -> Result<Self> {
        Ok(Self(symmetrize(&c.adjoint().mul(c)?)))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &QuatMatrix<R> {
        &self.0
    }

    pub fn into_inner(self) -> QuatMatrix<R> {
        self.0
    }

    pub fn get(&self, r: usize, c: usize) -> &Quaternion<R> {
        self.0.get(r, c)
    }

    pub fn tau(&self) -> ComplexMatrix<R> {
        self.0.tau()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self(self.0.add(&o.0)?))
    }

    pub fn scale(&self, s: &R) -> Self {
        Self(self.0.scale(s))
    }

    pub fn to_f64(&self) -> HyperhermitianMatrix<f64> {
        HyperhermitianMatrix(self.0.to_f64())
    }
}

/// Averages `M` and `M*`; used only where hyperhermitian structure holds up to rounding by construction.
fn symmetrize<R: Real>(m: &QuatMatrix<R>) -> QuatMatrix<R> {
    let adj = m.adjoint();
    let half = R::half();
    QuatMatrix::from_fn(m.rows(), m.cols(), |r, c| (m.get(r, c).clone() + adj.get(r, c).clone()).scale(&half))
}

impl<R: Real> TryFrom<QuatMatrix<R>> for HyperhermitianMatrix<R> {
    type Error = Error;

    fn try_from(m: QuatMatrix<R>) -> Result<Self> {
        Self::new(m)
    }
}

impl<R: Real> From<HyperhermitianMatrix<R>> for QuatMatrix<R> {
    fn from(m: HyperhermitianMatrix<R>) -> Self {
        m.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> QuatMatrix<f64> {
        QuatMatrix::from_fn(r, c, |_, _| {
            Quaternion::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
    }

    #[test]
    fn tau_of_identity_and_j() {
        assert_eq!(QuatMatrix::<Rational>::identity(3).tau(), ComplexMatrix::identity(6));
        let m = QuatMatrix::from_vec(1, 1, vec![Quaternion::<Rational>::unit_j()]).unwrap();
        let t = m.tau();
        let expect = ComplexMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => -Cx::<Rational>::one(),
            (1, 0) => Cx::one(),
            _ => Cx::zero(),
        });
        assert_eq!(t, expect);
    }

    #[test]
    fn tau_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = rand_matrix(&mut rng, 2, 3);
            let b = rand_matrix(&mut rng, 3, 2);
            let lhs = a.mul(&b).unwrap().tau();
            let rhs = a.tau().mul(&b.tau()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().norm_inf() <= 1e-12);
        }
    }

    #[test]
    fn rejects_non_hyperhermitian() {
        let m = QuatMatrix::<f64>::from_vec(
            2,
            2,
            vec![Quaternion::one(), Quaternion::unit_j(), Quaternion::unit_j(), Quaternion::one()],
        )
        .unwrap();
        assert!(matches!(HyperhermitianMatrix::new(m), Err(Error::Validation(_))));
        let ok = QuatMatrix::<f64>::from_vec(
            2,
            2,
            vec![Quaternion::one(), Quaternion::unit_j(), -Quaternion::unit_j(), Quaternion::one()],
        )
        .unwrap();
        let h = HyperhermitianMatrix::new(ok).unwrap();
        assert!(h.tau().is_hermitian_exact());
    }

    #[test]
    fn j_squares_to_minus_identity() {
        let j = j_symplectic::<Rational>(2);
        let jj = j.mul(&j).unwrap();
        assert_eq!(jj, ComplexMatrix::identity(4).scale(&-Cx::<Rational>::one()));
    }

    #[test]
    fn wrong_entry_count() {
        assert!(matches!(QuatMatrix::<f64>::from_vec(2, 2, vec![Quaternion::one()]), Err(Error::Dimension(_))));
    }
}
