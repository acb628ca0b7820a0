//! Multivariate polynomials with complex coefficients in `(x_1, …, x_{4n}, t)`.

mod parse;

pub use parse::{parse_poly, parse_poly_vars};

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cx_is_zero, cx_norm_inf, cx_real, Cx, Real, Ring};

/// Largest total degree accepted at API boundaries.
pub const MAX_DEGREE: usize = 16;
/// Largest half-dimension accepted at API boundaries.
pub const MAX_GROUP_N: usize = 4;

/// Exponent vector; the last variable is `t`.
pub type Exponents = Vec<u8>;

/// Sparse polynomial over `Cx<R>` in `nvars` real variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<R: Real = f64> {
    nvars: usize,
    terms: BTreeMap<Exponents, Cx<R>>,
}

impl<R: Real> Poly<R> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Cx<R>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn real_constant(nvars: usize, c: R) -> Self {
        Self::constant(nvars, cx_real(c))
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Cx::one())
    }

    /// The coordinate function of variable `v` (0-based).
    pub fn var(nvars: usize, v: usize) -> Self {
        assert!(v < nvars, "variable {v} out of range");
        let mut e = vec![0; nvars];
        e[v] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Cx::one());
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Cx<R>, Exponents)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension(format!("exponent vector of length {} for {nvars} variables", e.len())));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, e: Exponents, c: Cx<R>) {
        debug_assert_eq!(e.len(), self.nvars);
        if cx_is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.clone() + c;
                if cx_is_zero(v) {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Cx<R>)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u8]) -> Cx<R> {
        self.terms.get(e).cloned().unwrap_or_else(Cx::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> Cx<R> {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&k| k as usize).sum()).max().unwrap_or(0)
    }

    /// True iff every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }

    /// Largest absolute real or imaginary part of any coefficient.
    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(cx_norm_inf).fold(0.0, f64::max)
    }

    pub fn re(&self) -> Self {
        self.map_coeffs(|c| cx_real(c.re.clone()))
    }

    pub fn im(&self) -> Self {
        self.map_coeffs(|c| cx_real(c.im.clone()))
    }

    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    pub fn map_coeffs(&self, f: impl Fn(&Cx<R>) -> Cx<R>) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn scale(&self, s: &Cx<R>) -> Self {
        self.map_coeffs(|c| c.clone() * s.clone())
    }

    pub fn scale_real(&self, s: &R) -> Self {
        self.map_coeffs(|c| c.clone() * s.clone())
    }

    pub fn cast<S: Real>(&self) -> Poly<S> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), Complex::new(S::from_f64(c.re.to_f64()), S::from_f64(c.im.to_f64())));
        }
        out
    }

    pub fn to_f64(&self) -> Poly<f64> {
        self.cast()
    }

    fn check_vars(&self, o: &Self) {
        assert_eq!(self.nvars, o.nvars, "polynomials in different variable counts");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_vars(o);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check_vars(o);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_vars(o);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative in variable `v`.
    pub fn deriv(&self, v: usize) -> Self {
        assert!(v < self.nvars, "variable {v} out of range");
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[v];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[v] = k - 1;
            out.add_term(e2, c.clone() * cx_real(R::from_i64(k as i64)));
        }
        out
    }

    /// Evaluates at a real point.
    pub fn eval(&self, point: &[R]) -> Cx<R> {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let mut acc = Cx::<R>::zero();
        for (e, c) in &self.terms {
            let mut m = R::one();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    m = m * x.clone();
                }
            }
            acc = acc + c.clone() * cx_real(m);
        }
        acc
    }

    /// Substitutes `subs[v]` for variable `v`; all substitutes share one variable count.
    pub fn compose(&self, subs: &[Poly<R>]) -> Self {
        assert_eq!(subs.len(), self.nvars, "one substitute per variable");
        let target = subs.first().map_or(0, |s| s.nvars);
        let mut powers: Vec<Vec<Poly<R>>> = subs.iter().map(|s| vec![Poly::one(s.nvars).clone(), s.clone()]).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut m = Poly::constant(target, c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[v].len() <= k as usize {
                    let next = powers[v].last().expect("nonempty").mul(&subs[v]);
                    powers[v].push(next);
                }
                m = m.mul(&powers[v][k as usize]);
            }
            out = out.add(&m);
        }
        out
    }

    /// Fast `f64` evaluator.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            nvars: self.nvars,
            max_exp: self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize,
            terms: self.terms.iter().map(|(e, c)| (Complex::new(c.re.to_f64(), c.im.to_f64()), e.clone())).collect(),
        }
    }

    /// Rejects polynomials outside the supported degree range.
    pub fn check_degree(&self) -> Result<()> {
        let d = self.degree();
        if d > MAX_DEGREE {
            return Err(Error::Limit(format!("polynomial degree {d} exceeds {MAX_DEGREE}")));
        }
        Ok(())
    }
}

impl<R: Real> Ring for Poly<R> {
    fn zero_like(&self) -> Self {
        Poly::zero(self.nvars)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        Poly::add(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }

    fn neg(&self) -> Self {
        Poly::neg(self)
    }

    fn conj(&self) -> Self {
        Poly::conj(self)
    }
}

/// Polynomial prepared for repeated `f64` evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    max_exp: usize,
    terms: Vec<(Complex<f64>, Exponents)>,
}

impl CompiledPoly {
    pub fn eval(&self, point: &[f64]) -> Complex<f64> {
        debug_assert_eq!(point.len(), self.nvars);
        if self.terms.is_empty() {
            return Complex::zero();
        }
        let w = self.max_exp + 1;
        let mut table = vec![1.0; self.nvars * w];
        for (v, &x) in point.iter().enumerate() {
            for k in 1..w {
                table[v * w + k] = table[v * w + k - 1] * x;
            }
        }
        let mut acc = Complex::zero();
        for (c, e) in &self.terms {
            let mut m = 1.0;
            for (v, &k) in e.iter().enumerate() {
                if k != 0 {
                    m *= table[v * w + k as usize];
                }
            }
            acc += c * m;
        }
        acc
    }

    pub fn eval_re(&self, point: &[f64]) -> f64 {
        self.eval(point).re
    }
}

/// Variable count `4n + 1` for the group of half-dimension `n`.
pub fn group_nvars(n: usize) -> usize {
    4 * n + 1
}

/// Half-dimension `n` of a group polynomial, checking the variable count and size limit.
pub fn group_n<R: Real>(u: &Poly<R>) -> Result<usize> {
    let nv = u.nvars();
    if nv < 5 || !(nv - 1).is_multiple_of(4) {
        return Err(Error::Dimension(format!("{nv} variables do not describe (x_1..x_4n, t)")));
    }
    let n = (nv - 1) / 4;
    check_group_n(n)?;
    Ok(n)
}

pub fn check_group_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GROUP_N {
        return Err(Error::Limit(format!("n must be in 1..={MAX_GROUP_N}, got {n}")));
    }
    Ok(())
}

/// `x_a` (1-based) on the group of half-dimension `n`.
pub fn x<R: Real>(n: usize, a: usize) -> Poly<R> {
    assert!((1..=4 * n).contains(&a), "x_{a} out of range");
    Poly::var(group_nvars(n), a - 1)
}

/// `t` on the group of half-dimension `n`.
pub fn t<R: Real>(n: usize) -> Poly<R> {
    Poly::var(group_nvars(n), 4 * n)
}

/// `|x|² = Σ x_a²`.
pub fn norm_sq<R: Real>(n: usize) -> Poly<R> {
    (1..=4 * n).fold(Poly::zero(group_nvars(n)), |acc, a| acc.add(&x::<R>(n, a).pow(2)))
}

/// `‖(x, t)‖⁴ = |x|⁴ + t²`.
pub fn gauge_quartic<R: Real>(n: usize) -> Poly<R> {
    norm_sq::<R>(n).pow(2).add(&t::<R>(n).pow(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn product_and_derivative() {
        let n = 1;
        let p: Poly<Rational> = x(n, 1).add(&t(n));
        let sq = p.mul(&p);
        assert_eq!(sq.degree(), 2);
        let d = sq.deriv(0);
        assert_eq!(d, p.scale_real(&Rational::from_i64(2)));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn compose_and_eval() {
        let n = 1;
        let u: Poly<f64> = x::<f64>(n, 1).mul(&t(n)).add(&Poly::real_constant(5, 2.0));
        let subs: Vec<Poly<f64>> = (0..5).map(|v| Poly::var(5, v).add(&Poly::real_constant(5, 1.0))).collect();
        let c = u.compose(&subs);
        let pt = [0.5, 0.0, 0.0, 0.0, -1.5];
        let shifted: Vec<f64> = pt.iter().map(|v| v + 1.0).collect();
        assert!((c.eval(&pt) - u.eval(&shifted)).norm() < 1e-12);
        assert!((c.compile().eval(&pt) - u.eval(&shifted)).norm() < 1e-12);
    }

    #[test]
    fn gauge_quartic_degree() {
        let g = gauge_quartic::<Rational>(2);
        assert_eq!(g.degree(), 4);
        assert!(g.check_degree().is_ok());
        assert!(x::<Rational>(1, 1).pow(17).check_degree().is_err());
        assert!(check_group_n(5).is_err());
    }
}
