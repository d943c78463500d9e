//! Truncated sections of the formal Weyl bundle tensored with forms.
//!
//! A [`WeylForm`] is a finite sum of monomials `h^k y^α dx^β` with polynomial
//! coefficients in the chart variables. Every stored monomial satisfies the
//! Fedosov-degree bound `2k + |α| <= n_work`; everything above is dropped, so
//! all identities hold modulo degree `> n_work`.

mod connection;
mod delta;
mod product;

pub use connection::{covariant_derivative, curvature_form, exterior_d};
pub use delta::{delta, delta_inv};
pub use product::wedge_sign;

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// Largest chart dimension the storage layout supports.
pub const MAX_DIM: usize = 6;

/// Canonical monomial label: `h^h y^y dx^dx`, with `dx` a bitmask of the
/// strictly increasing index set.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Key {
    pub h: u8,
    pub y: [u8; MAX_DIM],
    pub dx: u8,
}

impl Key {
    pub fn central(h: u8) -> Self {
        Key {
            h,
            ..Key::default()
        }
    }

    pub fn y_degree(&self) -> usize {
        self.y.iter().map(|&e| e as usize).sum()
    }

    pub fn fedosov_degree(&self) -> usize {
        2 * self.h as usize + self.y_degree()
    }

    pub fn form_degree(&self) -> usize {
        self.dx.count_ones() as usize
    }

    pub fn is_central(&self) -> bool {
        self.dx == 0 && self.y.iter().all(|&e| e == 0)
    }

    pub fn is_y_free(&self) -> bool {
        self.y.iter().all(|&e| e == 0)
    }

    /// The dx indices in increasing order.
    pub fn dx_indices(&self) -> Vec<usize> {
        (0..8).filter(|i| self.dx & (1 << i) != 0).collect()
    }
}

/// A truncated element of `C^∞(W ⊗ Λ)` with polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeylForm {
    dim: u8,
    n_work: u8,
    terms: BTreeMap<Key, Poly>,
}

impl WeylForm {
    pub fn zero(dim: usize, n_work: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        WeylForm {
            dim: dim as u8,
            n_work: n_work as u8,
            terms: BTreeMap::new(),
        }
    }

    /// The central 0-form `p(x)`.
    pub fn scalar(dim: usize, n_work: usize, p: Poly) -> Self {
        let mut w = WeylForm::zero(dim, n_work);
        w.add_term(Key::default(), &p);
        w
    }

    pub fn one(dim: usize, n_work: usize) -> Self {
        WeylForm::scalar(dim, n_work, Poly::one())
    }

    /// The fiber coordinate `y^(i+1)`.
    pub fn y(dim: usize, n_work: usize, i: usize) -> Self {
        let mut key = Key::default();
        key.y[i] = 1;
        WeylForm::monomial(dim, n_work, key, Poly::one())
    }

    /// The 1-form `dx^(i+1)`.
    pub fn dx(dim: usize, n_work: usize, i: usize) -> Self {
        let key = Key {
            dx: 1 << i,
            ..Key::default()
        };
        WeylForm::monomial(dim, n_work, key, Poly::one())
    }

    /// The formal parameter `h`.
    pub fn hbar(dim: usize, n_work: usize) -> Self {
        WeylForm::monomial(dim, n_work, Key::central(1), Poly::one())
    }

    pub fn monomial(dim: usize, n_work: usize, key: Key, p: Poly) -> Self {
        let mut w = WeylForm::zero(dim, n_work);
        w.add_term(key, &p);
        w
    }

    pub fn from_terms(
        dim: usize,
        n_work: usize,
        it: impl IntoIterator<Item = (Key, Poly)>,
    ) -> Self {
        let mut w = WeylForm::zero(dim, n_work);
        for (k, p) in it {
            w.add_term(k, &p);
        }
        w
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn n_work(&self) -> usize {
        self.n_work as usize
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

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &Key) -> Poly {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    /// Adds `p h^k y^α dx^β`; terms above the working degree are dropped.
    pub fn add_term(&mut self, key: Key, p: &Poly) {
        if p.is_zero() || key.fedosov_degree() > self.n_work() {
            return;
        }
        debug_assert!(key.dx < (1 << self.dim), "dx index beyond dimension");
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += p;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, p.clone());
            }
        }
    }

    /// Adds `c * p` at `key`.
    pub fn add_scaled_term(&mut self, key: Key, p: &Poly, c: &Scalar) {
        if c.is_zero() || key.fedosov_degree() > self.n_work() {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        p.add_scaled_into(c, slot);
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn check_compatible(&self, other: &WeylForm) -> Result<()> {
        if self.dim != other.dim || self.n_work != other.n_work {
            return Err(Error::Config(format!(
                "incompatible Weyl forms: dimension {} / degree {} vs dimension {} / degree {}",
                self.dim, self.n_work, other.dim, other.n_work
            )));
        }
        Ok(())
    }

    fn assert_compatible(&self, other: &WeylForm) {
        if let Err(e) = self.check_compatible(other) {
            panic!("{e}");
        }
    }

    /// Same terms with a different working degree (dropping any that no longer fit).
    pub fn with_n_work(&self, n_work: usize) -> WeylForm {
        let mut out = WeylForm::zero(self.dim(), n_work);
        for (k, p) in &self.terms {
            out.add_term(*k, p);
        }
        out
    }

    /// `P_m`: the monomials of Fedosov degree exactly `m`.
    pub fn degree_part(&self, m: usize) -> WeylForm {
        self.filter(|k| k.fedosov_degree() == m)
    }

    /// Monomials of Fedosov degree at most `m`.
    pub fn up_to_degree(&self, m: usize) -> WeylForm {
        self.filter(|k| k.fedosov_degree() <= m)
    }

    /// The part of form degree `p`.
    pub fn form_part(&self, p: usize) -> WeylForm {
        self.filter(|k| k.form_degree() == p)
    }

    /// The central (y-free, dx-free) part `a_00`.
    pub fn central_part(&self) -> WeylForm {
        self.filter(Key::is_central)
    }

    pub fn filter(&self, keep: impl Fn(&Key) -> bool) -> WeylForm {
        WeylForm {
            dim: self.dim,
            n_work: self.n_work,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, p)| (*k, p.clone()))
                .collect(),
        }
    }

    /// Lowest Fedosov degree present, `None` for zero.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(Key::fedosov_degree).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(Key::fedosov_degree).max()
    }

    /// Distinct form degrees present.
    pub fn form_degrees(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().map(Key::form_degree).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// True if no monomial carries a fiber variable `y`.
    pub fn is_y_free(&self) -> bool {
        self.terms.keys().all(Key::is_y_free)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> WeylForm {
        let mut out = WeylForm::zero(self.dim(), self.n_work());
        for (k, p) in &self.terms {
            out.add_term(*k, &f(p));
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> WeylForm {
        self.map_coeffs(|p| p.scale(c))
    }

    /// Multiplies every coefficient by the central polynomial `q`.
    pub fn mul_poly(&self, q: &Poly) -> WeylForm {
        self.map_coeffs(|p| p * q)
    }

    /// Multiplies by `h^k`, dropping what leaves the truncation window.
    pub fn mul_hbar_pow(&self, k: u8) -> WeylForm {
        let mut out = WeylForm::zero(self.dim(), self.n_work());
        for (key, p) in &self.terms {
            let mut nk = *key;
            nk.h += k;
            out.add_term(nk, p);
        }
        out
    }

    /// `∂/∂t` applied to the coefficients.
    pub fn diff_t(&self) -> WeylForm {
        self.map_coeffs(Poly::diff_t)
    }

    /// Coefficientwise `∫_0^t`.
    pub fn integrate_t(&self) -> WeylForm {
        self.map_coeffs(Poly::integrate_t)
    }

    pub fn eval_t_one(&self) -> WeylForm {
        self.map_coeffs(Poly::eval_t_one)
    }

    pub fn eval_t_zero(&self) -> WeylForm {
        self.map_coeffs(Poly::eval_t_zero)
    }

    pub fn depends_on_t(&self) -> bool {
        self.terms.values().any(Poly::depends_on_t)
    }

    /// `∂a/∂y^(i+1)`.
    pub fn y_derivative(&self, i: usize) -> WeylForm {
        let mut out = WeylForm::zero(self.dim(), self.n_work());
        for (k, p) in &self.terms {
            let e = k.y[i];
            if e == 0 {
                continue;
            }
            let mut nk = *k;
            nk.y[i] -= 1;
            out.add_scaled_term(nk, p, &Scalar::from_int(e as i64));
        }
        out
    }

    /// Fiberwise product, failing on incompatible operands.
    pub fn try_circ(&self, other: &WeylForm) -> Result<WeylForm> {
        self.check_compatible(other)?;
        Ok(product::moyal(self, other, product::Mode::Product))
    }

    /// Fiberwise product `a ∘ b`. Panics on incompatible operands.
    pub fn circ(&self, other: &WeylForm) -> WeylForm {
        self.assert_compatible(other);
        product::moyal(self, other, product::Mode::Product)
    }

    /// Graded commutator `[a, b] = a ∘ b − (−1)^{rs} b ∘ a`, extended
    /// bilinearly over form-degree components.
    pub fn commutator(&self, other: &WeylForm) -> WeylForm {
        self.assert_compatible(other);
        product::moyal(self, other, product::Mode::Commutator)
    }

    /// `(i/h) [a, b]`, computed without leaving exact arithmetic.
    pub fn ih_commutator(&self, other: &WeylForm) -> WeylForm {
        self.assert_compatible(other);
        product::moyal(self, other, product::Mode::IhCommutator)
    }
}

/// Fiberwise product with compatibility checking.
pub fn fiberwise_product(a: &WeylForm, b: &WeylForm) -> Result<WeylForm> {
    a.try_circ(b)
}

/// Graded commutator with compatibility checking.
pub fn graded_commutator(a: &WeylForm, b: &WeylForm) -> Result<WeylForm> {
    a.check_compatible(b)?;
    Ok(a.commutator(b))
}

/// `P_m(a)`.
pub fn degree_filter(a: &WeylForm, m: usize) -> WeylForm {
    a.degree_part(m)
}

impl<'a> Add<&'a WeylForm> for &'a WeylForm {
    type Output = WeylForm;
    fn add(self, rhs: &WeylForm) -> WeylForm {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for WeylForm {
    type Output = WeylForm;
    fn add(mut self, rhs: WeylForm) -> WeylForm {
        self += &rhs;
        self
    }
}

impl AddAssign<&WeylForm> for WeylForm {
    fn add_assign(&mut self, rhs: &WeylForm) {
        self.assert_compatible(rhs);
        for (k, p) in &rhs.terms {
            self.add_term(*k, p);
        }
    }
}

impl<'a> Sub<&'a WeylForm> for &'a WeylForm {
    type Output = WeylForm;
    fn sub(self, rhs: &WeylForm) -> WeylForm {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for WeylForm {
    type Output = WeylForm;
    fn sub(mut self, rhs: WeylForm) -> WeylForm {
        self -= &rhs;
        self
    }
}

impl SubAssign<&WeylForm> for WeylForm {
    fn sub_assign(&mut self, rhs: &WeylForm) {
        self.assert_compatible(rhs);
        for (k, p) in &rhs.terms {
            self.add_term(*k, &-p);
        }
    }
}

impl Neg for WeylForm {
    type Output = WeylForm;
    fn neg(self) -> WeylForm {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Neg for &WeylForm {
    type Output = WeylForm;
    fn neg(self) -> WeylForm {
        self.scale(&Scalar::from_int(-1))
    }
}

/// `a * b` is the fiberwise product `a ∘ b`.
impl<'a> Mul<&'a WeylForm> for &'a WeylForm {
    type Output = WeylForm;
    fn mul(self, rhs: &WeylForm) -> WeylForm {
        self.circ(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(i: usize) -> WeylForm {
        WeylForm::y(2, 6, i)
    }

    #[test]
    fn degree_filter_examples() {
        // P_2(h + y1 y2 + y1) = h + y1 y2
        let a = &(&WeylForm::hbar(2, 6) + &y(0).circ(&y(1)).filter(|k| k.h == 0)) + &y(0);
        let p2 = degree_filter(&a, 2);
        let expect = &WeylForm::hbar(2, 6) + &y(0).circ(&y(1)).filter(|k| k.h == 0);
        assert_eq!(p2, expect);
        let f = WeylForm::scalar(2, 6, Poly::x(0));
        assert_eq!(degree_filter(&f, 0), f);
    }

    #[test]
    fn truncation_drops_high_degree() {
        let mut a = WeylForm::zero(2, 2);
        let mut key = Key::default();
        key.y[0] = 3;
        a.add_term(key, &Poly::one());
        assert!(a.is_zero());
    }

    #[test]
    fn mismatched_forms_are_rejected() {
        let a = WeylForm::y(2, 6, 0);
        let b = WeylForm::y(2, 4, 0);
        assert!(matches!(fiberwise_product(&a, &b), Err(Error::Config(_))));
    }
}
