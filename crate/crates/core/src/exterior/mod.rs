//! Exterior algebra of `C^{2n}` with sparse coefficient maps.

mod positivity;

pub use positivity::{
    elementary_strongly_positive, positivity_certificate_2nform, pullback, strong_positivity_certificate,
    strong_positivity_test_2form, two_form_from_matrix, StrongPositivity,
};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::scalar::{cx_norm_inf, one_cx, sort_sign, Cx, Real, Ring};

/// Largest supported half-dimension.
pub const MAX_N: usize = 4;

/// Strictly increasing basis index tuple `(i_1 < … < i_p)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    /// Sorts `indices`, returning the index and the sorting sign, or `None` on repetition.
    pub fn sorted(indices: &[usize]) -> Option<(Self, i32)> {
        let sign = sort_sign(indices)?;
        let mut v: Vec<u8> = indices.iter().map(|&i| i as u8).collect();
        v.sort_unstable();
        Some((Self(v), sign))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|&i| i as usize).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&(i as u8)).is_ok()
    }

    /// Indices of `0..2n` not in `self`.
    pub fn complement(&self, n: usize) -> Self {
        Self((0..2 * n as u8).filter(|i| self.0.binary_search(i).is_err()).collect())
    }

    /// Sign and index of `ω^self ∧ ω^other`, or `None` if they overlap.
    pub fn merge(&self, other: &Self) -> Option<(Self, i32)> {
        let mut inversions = 0usize;
        for &a in &self.0 {
            for &b in &other.0 {
                if a == b {
                    return None;
                }
                if b < a {
                    inversions += 1;
                }
            }
        }
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Some((Self(v), if inversions.is_multiple_of(2) { 1 } else { -1 }))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| format!("w{i}")).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// The order `(0, n, 1, n+1, …, n−1, 2n−1)` defining `Ω₂ₙ`.
pub fn omega_order(n: usize) -> Vec<usize> {
    (0..n).flat_map(|l| [l, n + l]).collect()
}

/// Sign `σ` with `Ω₂ₙ = σ·ω^0∧ω^1∧…∧ω^{2n−1}`.
pub fn omega_sign(n: usize) -> i32 {
    sort_sign(&omega_order(n)).expect("distinct indices")
}

/// `ε_I` with `ε_I·ω^I∧ω^Î = Ω₂ₙ`.
pub fn epsilon(n: usize, index: &MultiIndex) -> i32 {
    let comp = index.complement(n);
    let (_, s) = index.merge(&comp).expect("complement is disjoint");
    s * omega_sign(n)
}

/// `𝕁.ω^p`: `ω^{p+n}` for `p < n`, `−ω^{p−n}` otherwise.
fn j_image(n: usize, p: usize) -> (usize, i32) {
    if p < n {
        (p + n, 1)
    } else {
        (p - n, -1)
    }
}

/// Element of `Λ^p C^{2n}` with coefficients in `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<T> {
    n: usize,
    degree: usize,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Ring> Form<T> {
    pub fn zero(n: usize, degree: usize) -> Self {
        assert!(degree <= 2 * n, "degree {degree} exceeds 2n = {}", 2 * n);
        Self { n, degree, terms: BTreeMap::new() }
    }

    /// Degree-0 form `c`.
    pub fn scalar(n: usize, c: T) -> Self {
        let mut f = Self::zero(n, 0);
        f.add_term(&[], c);
        f
    }

    /// `c·ω^{i_1}∧…∧ω^{i_p}` for indices in any order.
    pub fn monomial(n: usize, indices: &[usize], c: T) -> Result<Self> {
        check_indices(n, indices)?;
        let mut f = Self::zero(n, indices.len());
        f.add_term(indices, c);
        Ok(f)
    }

    /// Accumulates `c·ω^{indices}` (unsorted; repeated indices contribute nothing).
    pub fn add_term(&mut self, indices: &[usize], c: T) {
        debug_assert_eq!(indices.len(), self.degree);
        if let Some((mi, sign)) = MultiIndex::sorted(indices) {
            let c = if sign < 0 { c.neg() } else { c };
            self.add_sorted(mi, c);
        }
    }

    fn add_sorted(&mut self, mi: MultiIndex, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mi) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&mi);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(mi, c);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.terms.iter()
    }

    pub fn get(&self, mi: &MultiIndex) -> Option<&T> {
        self.terms.get(mi)
    }

    /// Coefficient of `ω^{indices}` in the given order (zero coefficients as `None`).
    pub fn coeff(&self, indices: &[usize]) -> Option<T> {
        let (mi, sign) = MultiIndex::sorted(indices)?;
        let c = self.terms.get(&mi)?;
        Some(if sign < 0 { c.neg() } else { c.clone() })
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Dimension(format!("forms live on C^{} and C^{}", 2 * self.n, 2 * o.n)));
        }
        Ok(())
    }

    /// Sum; a zero form of another degree acts as the identity.
    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        if self.degree != o.degree {
            if o.is_zero() {
                return Ok(self.clone());
            }
            if self.is_zero() {
                return Ok(o.clone());
            }
            return Err(validation(format!("cannot add forms of degree {} and {}", self.degree, o.degree)));
        }
        let mut out = self.clone();
        for (mi, c) in &o.terms {
            out.add_sorted(mi.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        for (mi, v) in &self.terms {
            out.add_sorted(mi.clone(), c.mul(v));
        }
        out
    }

    /// Coefficient-wise map (zero results dropped).
    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Form<U> {
        let mut out = Form::zero(self.n, self.degree);
        for (mi, v) in &self.terms {
            out.add_sorted(mi.clone(), f(v));
        }
        out
    }

    /// Fallible coefficient-wise map.
    pub fn try_map<U: Ring>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Form<U>> {
        let mut out = Form::zero(self.n, self.degree);
        for (mi, v) in &self.terms {
            out.add_sorted(mi.clone(), f(v)?);
        }
        Ok(out)
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        if self.degree + o.degree > 2 * self.n {
            return Err(validation(format!(
                "wedge of degrees {} and {} exceeds 2n = {}",
                self.degree,
                o.degree,
                2 * self.n
            )));
        }
        let mut out = Self::zero(self.n, self.degree + o.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                if let Some((mi, sign)) = a.merge(b) {
                    let prod = ca.mul(cb);
                    out.add_sorted(mi, if sign < 0 { prod.neg() } else { prod });
                }
            }
        }
        Ok(out)
    }

    /// `self ∧ self ∧ … ` (`k` factors); `k = 0` gives the scalar `one`.
    pub fn wedge_power(&self, k: usize, one: T) -> Result<Self> {
        let mut acc = Form::scalar(self.n, one);
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// The unique `c` with `self = c·Ω₂ₙ` (zero form gives `None`).
    pub fn delta_n_coeff(&self) -> Result<Option<T>> {
        if self.degree != 2 * self.n {
            return Err(validation(format!("expected a form of degree {}, got degree {}", 2 * self.n, self.degree)));
        }
        let full = MultiIndex((0..2 * self.n as u8).collect());
        Ok(self.terms.get(&full).map(|c| if omega_sign(self.n) < 0 { c.neg() } else { c.clone() }))
    }

    /// Applies the real structure `z ω^I ↦ z̄ (𝕁.ω^{i_1})∧…∧(𝕁.ω^{i_p})`.
    pub fn rho_j(&self) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        for (mi, c) in &self.terms {
            let mut sign = 1;
            let mut image = Vec::with_capacity(mi.degree());
            for p in mi.indices() {
                let (q, s) = j_image(self.n, p);
                sign *= s;
                image.push(q);
            }
            let c = c.conj();
            out.add_term(&image, if sign < 0 { c.neg() } else { c });
        }
        out
    }
}

fn check_indices(n: usize, indices: &[usize]) -> Result<()> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= 2 * n) {
        return Err(Error::Index(format!("basis index {bad} out of range for n = {n}")));
    }
    Ok(())
}

/// Complex-coefficient forms.
pub type ConstForm<R = f64> = Form<Cx<R>>;

impl<R: Real> Form<Cx<R>> {
    /// `Ω₂ₙ = ω^0∧ω^n∧ω^1∧ω^{n+1}∧…`.
    pub fn omega(n: usize) -> Self {
        let mut f = Self::zero(n, 2 * n);
        f.add_term(&omega_order(n), one_cx());
        f
    }

    /// `βₙ = Σ_l ω^l∧ω^{n+l}`.
    pub fn beta(n: usize) -> Self {
        let mut f = Self::zero(n, 2);
        for l in 0..n {
            f.add_term(&[l, n + l], one_cx());
        }
        f
    }

    pub fn scale_real(&self, s: R) -> Self {
        self.scale(&Cx::new(s, R::zero()))
    }

    /// Largest absolute real or imaginary part of any coefficient.
    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(cx_norm_inf).fold(0.0, f64::max)
    }

    /// True iff `‖ρ(𝐣)F − F‖∞ ≤ tol` (exact equality for exact scalars when `tol = 0`).
    pub fn is_real(&self, tol: f64) -> bool {
        let diff = self.rho_j().sub(self).expect("same shape");
        if R::EXACT && tol == 0.0 {
            diff.is_zero()
        } else {
            diff.norm_inf() <= tol
        }
    }

    pub fn to_f64(&self) -> ConstForm<f64> {
        self.map(|c| Cx::new(c.re.to_f64(), c.im.to_f64()))
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(mi, c)| TermJson { indices: mi.indices(), re: c.re.to_f64(), im: c.im.to_f64() })
                .collect(),
        }
    }

    pub fn from_json(doc: &FormJson) -> Result<Self> {
        let mut f = Self::zero(doc.n, doc.degree);
        for t in &doc.terms {
            if t.indices.len() != doc.degree {
                return Err(validation("term degree disagrees with form degree"));
            }
            check_indices(doc.n, &t.indices)?;
            f.add_term(&t.indices, Cx::new(R::from_f64(t.re), R::from_f64(t.im)));
        }
        Ok(f)
    }
}

/// Serialized form `{n, degree, terms: [{indices, re, im}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub n: usize,
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub indices: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx_i, Rational};

    type F = ConstForm<Rational>;

    fn one() -> Cx<Rational> {
        one_cx()
    }

    #[test]
    fn antisymmetry_and_repeats() {
        let w0 = F::monomial(2, &[0], one()).unwrap();
        let w1 = F::monomial(2, &[1], one()).unwrap();
        assert_eq!(w0.wedge(&w1).unwrap(), w1.wedge(&w0).unwrap().neg());
        assert!(w0.wedge(&w0).unwrap().is_zero());
        assert!(matches!(F::monomial(2, &[4], one()), Err(Error::Index(_))));
    }

    #[test]
    fn beta_power_is_factorial_omega() {
        for n in 1..=4 {
            let b = F::beta(n).wedge_power(n, one()).unwrap();
            let c = b.delta_n_coeff().unwrap().unwrap();
            assert_eq!(c, Cx::new(Rational::from_i64(crate::scalar::factorial(n) as i64), Rational::from_i64(0)));
            assert_eq!(F::omega(n).delta_n_coeff().unwrap().unwrap(), one());
        }
    }

    #[test]
    fn epsilon_complements() {
        for n in 1..=3 {
            for mask in 0u32..(1 << (2 * n)) {
                if mask.count_ones() % 2 == 1 {
                    continue;
                }
                let idx: Vec<usize> = (0..2 * n).filter(|i| mask & (1 << i) != 0).collect();
                let (mi, _) = MultiIndex::sorted(&idx).unwrap();
                let a = F::monomial(n, &idx, one()).unwrap();
                let b = F::monomial(n, &mi.complement(n).indices(), one()).unwrap();
                let eps = Rational::from_i64(epsilon(n, &mi) as i64);
                let prod = a.wedge(&b).unwrap().scale_real(eps);
                assert_eq!(prod, F::omega(n));
            }
        }
    }

    #[test]
    fn real_structure() {
        for n in 1..=3 {
            assert_eq!(F::beta(n).rho_j(), F::beta(n));
            assert!(F::beta(n).is_real(0.0));
            assert!(!F::beta(n).scale(&cx_i()).is_real(0.0));
            let io = F::omega(n).scale(&cx_i());
            assert_eq!(io.rho_j(), io.neg());
        }
        let f = F::monomial(2, &[0, 3], Cx::new(Rational::from_i64(2), Rational::from_i64(5))).unwrap();
        assert_eq!(f.rho_j().rho_j(), f);
    }

    #[test]
    fn delta_n_coeff_requires_top_degree() {
        assert!(F::beta(2).delta_n_coeff().is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = ConstForm::<f64>::beta(2).scale_real(0.5);
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back: FormJson = serde_json::from_str(&text).unwrap();
        assert_eq!(ConstForm::<f64>::from_json(&back).unwrap(), f);
    }
}
