//! Sparse multivariate polynomials over [`Scalar`] in the chart coordinates
//! `x1..xn` and the homotopy parameter `t`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scalar::Scalar;

/// Number of exponent slots in a monomial.
pub const SLOTS: usize = 8;
/// Slot holding the exponent of `t`.
pub const T_SLOT: usize = SLOTS - 1;
/// Largest number of chart coordinates a monomial can carry.
pub const MAX_X: usize = T_SLOT;

/// Exponent vector over `(x1, .., x7, t)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub [u8; SLOTS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; SLOTS]);

    pub fn x(i: usize) -> Self {
        let mut e = [0; SLOTS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn x_degree(&self) -> u32 {
        self.0[..MAX_X].iter().map(|&e| e as u32).sum()
    }

    pub fn t_degree(&self) -> u8 {
        self.0[T_SLOT]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("monomial exponent overflow");
        }
        Monomial(e)
    }
}

/// Kinds accepted by [`poly_arith`].
#[derive(Clone, Debug)]
pub enum PolyOp<'a> {
    Add(&'a Poly),
    Mul(&'a Poly),
    DiffX(usize),
    DiffT,
    IntegrateT,
}

/// Dispatches a single polynomial operation; derivative indices are checked
/// against the chart dimension `dim`.
pub fn poly_arith(op: PolyOp<'_>, p: &Poly, dim: usize) -> Result<Poly> {
    match op {
        PolyOp::Add(q) => Ok(p + q),
        PolyOp::Mul(q) => Ok(p * q),
        PolyOp::DiffX(i) => {
            if i >= dim || i >= MAX_X {
                return Err(Error::Index {
                    index: i,
                    bound: dim.min(MAX_X),
                });
            }
            Ok(p.diff_x(i))
        }
        PolyOp::DiffT => Ok(p.diff_t()),
        PolyOp::IntegrateT => Ok(p.integrate_t_unit()),
    }
}

/// A polynomial with exact coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::term(Monomial::ONE, c)
    }

    pub fn term(m: Monomial, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// The coordinate `x^(i+1)` (0-based index).
    pub fn x(i: usize) -> Self {
        assert!(i < MAX_X, "coordinate index {i} out of range");
        Poly::term(Monomial::x(i), Scalar::one())
    }

    pub fn t() -> Self {
        Poly::term(Monomial::x(T_SLOT), Scalar::one())
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The constant term.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::ONE)
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Poly {
        if r.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v.scale(r))).collect(),
        }
    }

    /// Adds `c * self` into `acc`.
    pub fn add_scaled_into(&self, c: &Scalar, acc: &mut Poly) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &self.terms {
            acc.add_term(*m, &(v * c));
        }
    }

    /// Partial derivative with respect to `x^(i+1)`.
    pub fn diff_x(&self, i: usize) -> Poly {
        self.diff_slot(i)
    }

    pub fn diff_t(&self) -> Poly {
        self.diff_slot(T_SLOT)
    }

    fn diff_slot(&self, s: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.0[s];
            if e == 0 {
                continue;
            }
            let mut dm = *m;
            dm.0[s] -= 1;
            out.add_term(dm, &c.scale(&Rational::from_int(e as i64)));
        }
        out
    }

    /// Antiderivative in `t` vanishing at `t = 0`, i.e. `∫_0^t p dτ`.
    pub fn integrate_t(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut im = *m;
            im.0[T_SLOT] += 1;
            let r = Rational::ratio(1, im.0[T_SLOT] as i64);
            out.add_term(im, &c.scale(&r));
        }
        out
    }

    /// Definite integral `∫_0^1 p dt`, a `t`-free polynomial.
    pub fn integrate_t_unit(&self) -> Poly {
        self.integrate_t().eval_t_one()
    }

    /// Substitutes `t = 1`.
    pub fn eval_t_one(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut em = *m;
            em.0[T_SLOT] = 0;
            out.add_term(em, c);
        }
        out
    }

    /// Substitutes `t = 0`.
    pub fn eval_t_zero(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0[T_SLOT] == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Substitutes `t -> t^k`.
    pub fn compose_t_power(&self, k: u8) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut em = *m;
            em.0[T_SLOT] = em.0[T_SLOT].checked_mul(k).expect("t exponent overflow");
            out.add_term(em, c);
        }
        out
    }

    pub fn depends_on_t(&self) -> bool {
        self.terms.keys().any(|m| m.0[T_SLOT] > 0)
    }

    /// Largest coordinate index (0-based) with a nonzero exponent, if any.
    pub fn max_x_index(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| (0..MAX_X).rev().find(|&i| m.0[i] > 0))
            .max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Terms ordered by ascending total degree, then `x1` before `x2`.
    pub fn display_order(&self) -> Vec<(&Monomial, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            a.0.total_degree()
                .cmp(&b.0.total_degree())
                .then_with(|| b.0.cmp(a.0))
        });
        v
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c);
        }
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, &-c);
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

pub(crate) fn write_monomial(m: &Monomial, f: &mut impl fmt::Write) -> fmt::Result {
    let mut first = true;
    for i in 0..MAX_X {
        let e = m.0[i];
        if e == 0 {
            continue;
        }
        if !first {
            f.write_char(' ')?;
        }
        first = false;
        write!(f, "x{}", i + 1)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    let e = m.0[T_SLOT];
    if e > 0 {
        if !first {
            f.write_char(' ')?;
        }
        f.write_char('t')?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        crate::render::write_poly_terms(self.display_order(), &mut s, "")?;
        if s.is_empty() {
            s.push('0');
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::x(i)
    }

    #[test]
    fn ring_examples() {
        // (x1 + x2) x1 = x1^2 + x1 x2
        let p = &(&x(0) + &x(1)) * &x(0);
        let expect = &(&x(0) * &x(0)) + &(&x(0) * &x(1));
        assert_eq!(p, expect);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn power_rule() {
        let p = &(&x(0) * &x(0)) * &x(1);
        let d = poly_arith(PolyOp::DiffX(0), &p, 2).unwrap();
        assert_eq!(d, (&x(0) * &x(1)).scale(&Scalar::from_int(2)));
    }

    #[test]
    fn exact_t_integration() {
        let p = &(&Poly::t() * &Poly::t()) * &x(0);
        let p = p.scale(&Scalar::from_int(3));
        assert_eq!(poly_arith(PolyOp::IntegrateT, &p, 2).unwrap(), x(0));
        let q = p.integrate_t();
        assert_eq!(q.diff_t(), p);
        assert!(q.eval_t_zero().is_zero());
    }

    #[test]
    fn diff_index_out_of_range() {
        let err = poly_arith(PolyOp::DiffX(2), &x(0), 2).unwrap_err();
        assert_eq!(err, Error::Index { index: 2, bound: 2 });
    }

    #[test]
    fn display() {
        let p = &(&x(0) * &x(0)) + &x(1).scale(&Scalar::ratio(-1, 2));
        assert_eq!(p.to_string(), "-(1/2) x2 + x1^2");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
