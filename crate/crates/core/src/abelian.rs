//! The Abelian connection `D = -δ + ∂ + (i/h)[r, ·]`, the flat lift `Q`, its
//! inverse and the star product `f * g = Q⁻¹(Q f ∘ Q g)`.
//!
//! Accuracy: `r` and `Q(f)` are exact through the working degree `N`. Because
//! `δ` lowers degree, `D(a)` for a truncated `a` is exact only through `N - 1`,
//! and flatness is checked there. A star product exact to `h^K` needs
//! `N >= 2K + 2`, which also leaves room for the `(i/h)` in star commutators.

use std::ops::{Add, Neg, Sub};

use crate::chart::{omega_lower, Chart};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::weyl::{covariant_derivative, curvature_form, delta, delta_inv, Key, WeylForm};

/// A formal series `Σ_k h^k f_k(x)`, stored with trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct StarFunction {
    coeffs: Vec<Poly>,
}

impl StarFunction {
    pub fn new(mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(Poly::is_zero) {
            coeffs.pop();
        }
        StarFunction { coeffs }
    }

    pub fn zero() -> Self {
        StarFunction::default()
    }

    pub fn one() -> Self {
        StarFunction::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        StarFunction::new(vec![p])
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    /// Coefficient of `h^k`.
    pub fn coeff(&self, k: usize) -> Poly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest stored power of `h`.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Drops all powers above `h^k`.
    pub fn truncate(&self, k: usize) -> StarFunction {
        StarFunction::new(self.coeffs.iter().take(k + 1).cloned().collect())
    }

    pub fn scale(&self, c: &Scalar) -> StarFunction {
        StarFunction::new(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    /// Multiplies by `h^k`.
    pub fn mul_hbar_pow(&self, k: usize) -> StarFunction {
        let mut coeffs = vec![Poly::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        StarFunction::new(coeffs)
    }

    /// Divides by `h^k`; the lowest `k` coefficients must vanish.
    pub fn div_hbar_pow(&self, k: usize) -> Option<StarFunction> {
        if self.coeffs.iter().take(k).any(|p| !p.is_zero()) {
            return None;
        }
        Some(StarFunction::new(
            self.coeffs.iter().skip(k).cloned().collect(),
        ))
    }

    /// Pointwise (undeformed) product, truncated at `h^k`.
    pub fn pointwise_mul(&self, other: &StarFunction, k: usize) -> StarFunction {
        let mut out = vec![Poly::zero(); k + 1];
        for (a, pa) in self.coeffs.iter().enumerate() {
            for (b, pb) in other.coeffs.iter().enumerate() {
                if a + b <= k {
                    out[a + b] += &(pa * pb);
                }
            }
        }
        StarFunction::new(out)
    }

    pub fn diff_x(&self, i: usize) -> StarFunction {
        StarFunction::new(self.coeffs.iter().map(|p| p.diff_x(i)).collect())
    }

    /// The central 0-form `Σ h^k f_k`, dropping powers above the working degree.
    pub fn to_weyl(&self, dim: usize, n_work: usize) -> WeylForm {
        WeylForm::from_terms(
            dim,
            n_work,
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(k, _)| 2 * k <= n_work)
                .map(|(k, p)| (Key::central(k as u8), p.clone())),
        )
    }
}

impl<'a> Add<&'a StarFunction> for &'a StarFunction {
    type Output = StarFunction;
    fn add(self, rhs: &StarFunction) -> StarFunction {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        StarFunction::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Add for StarFunction {
    type Output = StarFunction;
    fn add(self, rhs: StarFunction) -> StarFunction {
        &self + &rhs
    }
}

impl<'a> Sub<&'a StarFunction> for &'a StarFunction {
    type Output = StarFunction;
    fn sub(self, rhs: &StarFunction) -> StarFunction {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        StarFunction::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl Sub for StarFunction {
    type Output = StarFunction;
    fn sub(self, rhs: StarFunction) -> StarFunction {
        &self - &rhs
    }
}

impl Neg for &StarFunction {
    type Output = StarFunction;
    fn neg(self) -> StarFunction {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Neg for StarFunction {
    type Output = StarFunction;
    fn neg(self) -> StarFunction {
        -&self
    }
}

impl From<Poly> for StarFunction {
    fn from(p: Poly) -> Self {
        StarFunction::from_poly(p)
    }
}

/// The normalized Abelian connection of a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianConnection {
    chart: Chart,
    r: WeylForm,
    gamma_total: WeylForm,
}

/// `ω_ij y^i dx^j`, whose `(i/h)` commutator is `-δ`.
pub fn omega_form(dim: usize, n_work: usize) -> WeylForm {
    let mut out = WeylForm::zero(dim, n_work);
    for i in 0..dim {
        for j in 0..dim {
            let w = omega_lower(i, j);
            if w == 0 {
                continue;
            }
            let mut key = Key::default();
            key.y[i] = 1;
            key.dx = 1 << j;
            out.add_term(key, &Poly::constant(Scalar::from_int(w)));
        }
    }
    out
}

/// Solves `a = b + K(a)` for a linear `K` that raises the Fedosov degree.
///
/// Iterates on increments, `Δ_0 = b` and `Δ_{n+1} = K(Δ_n)`, so each pass only
/// processes terms that are still changing.
pub(crate) fn solve_linear(
    seed: &WeylForm,
    n_work: usize,
    step: impl Fn(&WeylForm) -> WeylForm,
) -> WeylForm {
    let mut sum = seed.clone();
    let mut delta = seed.clone();
    for _ in 0..=n_work + 1 {
        delta = step(&delta);
        if delta.is_zero() {
            return sum;
        }
        sum += &delta;
    }
    panic!(
        "linear iteration did not stabilise within {} passes",
        n_work + 2
    );
}

impl AbelianConnection {
    /// Computes `r` from `r = δ⁻¹R + δ⁻¹(∂r + (i/h) r∘r)`, recomputing the
    /// quadratic term from the current iterate on every pass.
    pub fn build(chart: &Chart) -> Self {
        let (dim, n) = (chart.dim(), chart.n_work());
        let r = if chart.is_flat() {
            WeylForm::zero(dim, n)
        } else {
            // r ↦ δ⁻¹R + δ⁻¹(∂r + ½ (i/h)[r, r]). On 1-forms [a, b] = [b, a], so
            // the change of the quadratic term is [Δ, r_new + r_old].
            let half = Scalar::ratio(1, 2);
            let mut r_old = WeylForm::zero(dim, n);
            let mut r = delta_inv(&curvature_form(chart));
            let mut delta = r.clone();
            let mut passes = 0;
            while !delta.is_zero() {
                passes += 1;
                assert!(passes <= n + 2, "r iteration did not stabilise");
                let quad = delta.ih_commutator(&(&r + &r_old)).scale(&half);
                let next = delta_inv(&(&covariant_derivative(chart, &delta) + &quad));
                r_old = r.clone();
                r += &next;
                delta = next;
            }
            r
        };
        let gamma_total = &(&omega_form(dim, n) + chart.gamma_form()) + &r;
        AbelianConnection {
            chart: chart.clone(),
            r,
            gamma_total,
        }
    }

    /// The trivial connection `D₀ = d - δ` of a flat chart.
    pub fn trivial(dim: usize, n_work: usize, h_order: usize) -> Result<Self> {
        Ok(AbelianConnection::build(&Chart::flat(
            dim, n_work, h_order,
        )?))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn r(&self) -> &WeylForm {
        &self.r
    }

    /// `γ = ω_ij y^i dx^j + ½ Γ_ijk y^i y^j dx^k + r`.
    pub fn gamma_total(&self) -> &WeylForm {
        &self.gamma_total
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn n_work(&self) -> usize {
        self.chart.n_work()
    }

    pub fn h_order(&self) -> usize {
        self.chart.h_order()
    }

    fn check(&self, a: &WeylForm) -> Result<()> {
        if a.dim() != self.dim() || a.n_work() != self.n_work() {
            return Err(Error::Config(format!(
                "form of dimension {} / degree {} used with a connection of dimension {} / degree {}",
                a.dim(),
                a.n_work(),
                self.dim(),
                self.n_work()
            )));
        }
        Ok(())
    }

    /// `(D + δ) a = ∂a + (i/h)[r, a]`.
    pub fn d_plus_delta(&self, a: &WeylForm) -> WeylForm {
        let mut out = covariant_derivative(&self.chart, a);
        if !self.r.is_zero() {
            out += &self.r.ih_commutator(a);
        }
        out
    }

    /// `D a = -δa + ∂a + (i/h)[r, a]`.
    pub fn apply_d(&self, a: &WeylForm) -> WeylForm {
        &self.d_plus_delta(a) - &delta(a)
    }

    /// Like [`apply_d`](Self::apply_d) but rejects forms from another chart.
    pub fn try_apply_d(&self, a: &WeylForm) -> Result<WeylForm> {
        self.check(a)?;
        Ok(self.apply_d(a))
    }

    /// `Q(a)`: the solution of `b = a + δ⁻¹(D + δ) b`.
    pub fn quantize_form(&self, a: &WeylForm) -> WeylForm {
        solve_linear(a, self.n_work(), |b| delta_inv(&self.d_plus_delta(b)))
    }

    /// `Q(f)` for a central function: the unique flat section with central part `f`.
    pub fn quantize(&self, f: &StarFunction) -> WeylForm {
        self.quantize_form(&f.to_weyl(self.dim(), self.n_work()))
    }

    /// General inverse `Q⁻¹ a = a - δ⁻¹(D + δ) a`.
    pub fn q_inverse(&self, a: &WeylForm) -> WeylForm {
        a - &delta_inv(&self.d_plus_delta(a))
    }

    /// Flat if `D a` vanishes through degree `horizon`.
    pub fn is_flat_through(&self, a: &WeylForm, horizon: usize) -> bool {
        self.apply_d(a).up_to_degree(horizon).is_zero()
    }

    /// The star product truncated at the chart's `h` order.
    pub fn star_product(&self, f: &StarFunction, g: &StarFunction) -> Result<StarFunction> {
        let k = self.h_order();
        if self.n_work() < 2 * k + 2 {
            return Err(Error::Config(format!(
                "star product to h^{k} needs working degree at least {}, have {}",
                2 * k + 2,
                self.n_work()
            )));
        }
        Ok(self.star_product_to(f, g, k))
    }

    /// `f * g` truncated at `h^order`; exact when `2 * order <= n_work`.
    pub fn star_product_to(
        &self,
        f: &StarFunction,
        g: &StarFunction,
        order: usize,
    ) -> StarFunction {
        let (qf, qg) = (self.quantize(f), self.quantize(g));
        central_function(&qf.circ(&qg), order)
    }

    /// `(i/h)(f * g - g * f)` truncated at `h^order`.
    pub fn ih_star_commutator(
        &self,
        f: &StarFunction,
        g: &StarFunction,
        order: usize,
    ) -> StarFunction {
        let (qf, qg) = (self.quantize(f), self.quantize(g));
        central_function(&qf.ih_commutator(&qg), order)
    }

    /// Solves `D a = b` for a form `b` of positive degree via `a = -Q δ⁻¹ b`.
    ///
    /// The solvability condition `D b = 0` is checked through degree
    /// `n_work - 1`, which assumes `b` is exact through `n_work`.
    pub fn solve_d(&self, b: &WeylForm) -> Result<WeylForm> {
        self.check(b)?;
        if b.terms().any(|(k, _)| k.form_degree() == 0) {
            return Err(Error::Domain(
                "right-hand side must have positive form degree".into(),
            ));
        }
        let horizon = self.n_work().saturating_sub(1);
        let residual = self.apply_d(b).up_to_degree(horizon);
        if !residual.is_zero() {
            return Err(Error::Solvability(format!(
                "D b does not vanish: {}",
                crate::render::render_weyl(&residual).text
            )));
        }
        Ok(-self.quantize_form(&delta_inv(b)))
    }
}

/// Builds the Abelian connection of a chart.
pub fn build_r(chart: &Chart) -> AbelianConnection {
    AbelianConnection::build(chart)
}

/// Central part of a Weyl form as a star function, truncated at `h^order`.
pub fn central_function(a: &WeylForm, order: usize) -> StarFunction {
    let mut coeffs = vec![Poly::zero(); order + 1];
    for (k, p) in a.terms() {
        if k.is_central() && (k.h as usize) <= order {
            coeffs[k.h as usize] += p;
        }
    }
    StarFunction::new(coeffs)
}

/// `Q⁻¹` on a flat section: its central part. Forms of positive degree are rejected.
pub fn project_center(a: &WeylForm) -> Result<StarFunction> {
    if let Some(p) = a.form_degrees().into_iter().find(|&p| p > 0) {
        return Err(Error::Domain(format!(
            "expected a section of W, found a component of form degree {p}"
        )));
    }
    let order = a.terms().map(|(k, _)| k.h as usize).max().unwrap_or(0);
    Ok(central_function(a, order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_unit_and_coordinates_flat() {
        let conn = AbelianConnection::trivial(2, 6, 2).unwrap();
        assert_eq!(conn.quantize(&StarFunction::one()), WeylForm::one(2, 6));
        for i in 0..2 {
            let q = conn.quantize(&StarFunction::from_poly(Poly::x(i)));
            let expect = &WeylForm::scalar(2, 6, Poly::x(i)) + &WeylForm::y(2, 6, i);
            assert_eq!(q, expect);
        }
    }

    #[test]
    fn project_center_examples() {
        let a = &WeylForm::scalar(2, 6, Poly::x(0)) + &WeylForm::y(2, 6, 0);
        assert_eq!(
            project_center(&a).unwrap(),
            StarFunction::from_poly(Poly::x(0))
        );
        // Q⁻¹(h y1 y2 + h^2) = h^2
        let mut key = Key::central(1);
        key.y[0] = 1;
        key.y[1] = 1;
        let b = &WeylForm::monomial(2, 6, key, Poly::one())
            + &WeylForm::monomial(2, 6, Key::central(2), Poly::one());
        assert_eq!(
            project_center(&b).unwrap(),
            StarFunction::one().mul_hbar_pow(2)
        );
        assert!(matches!(
            project_center(&WeylForm::dx(2, 6, 0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn flat_connection_has_zero_r() {
        let conn = AbelianConnection::trivial(2, 6, 2).unwrap();
        assert!(conn.r().is_zero());
        let a = &WeylForm::y(2, 6, 0).mul_poly(&Poly::x(1)) + &WeylForm::scalar(2, 6, Poly::x(0));
        // D = d - δ when Γ = 0
        let expect = &crate::weyl::exterior_d(&a) - &delta(&a);
        assert_eq!(conn.apply_d(&a), expect);
    }

    #[test]
    fn star_product_needs_enough_degree() {
        let conn = AbelianConnection::trivial(2, 4, 2).unwrap();
        let f = StarFunction::from_poly(Poly::x(0));
        assert!(matches!(conn.star_product(&f, &f), Err(Error::Config(_))));
    }

    #[test]
    fn solve_d_zero_and_obstruction() {
        let chart = Chart::from_entries(2, 6, 2, &[([0, 0, 0], Poly::x(1))]).unwrap();
        let conn = AbelianConnection::build(&chart);
        let zero = WeylForm::zero(2, 6);
        assert!(conn.solve_d(&zero).unwrap().is_zero());
        // D(x1 dx2) = dx1 dx2 ≠ 0
        let b = WeylForm::dx(2, 6, 1).mul_poly(&Poly::x(0));
        assert!(matches!(conn.solve_d(&b), Err(Error::Solvability(_))));
        assert!(matches!(
            conn.solve_d(&WeylForm::one(2, 6)),
            Err(Error::Domain(_))
        ));
    }
}
