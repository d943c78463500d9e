//! Closed-form expressions computed directly from `Γ_ijk` with tensor algebra,
//! independent of the Weyl-algebra engine. They serve as oracles for the
//! iterative constructions.
//!
//! All index sums run over the full range; raising uses `a^i = ω^{ij} a_j`.

use crate::abelian::StarFunction;
use crate::chart::{omega_upper, Chart};
use crate::poly::Poly;
use crate::rational::{factorial, Rational};
use crate::scalar::Scalar;
use crate::weyl::{Key, WeylForm};

/// A dense covariant tensor of polynomials, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    dim: usize,
    rank: usize,
    data: Vec<Poly>,
}

impl Tensor {
    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Poly) -> Self {
        let data = tuples(dim, rank).map(|idx| f(&idx)).collect();
        Tensor { dim, rank, data }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, idx: &[usize]) -> &Poly {
        debug_assert_eq!(idx.len(), self.rank);
        let pos = idx.iter().fold(0, |acc, &i| acc * self.dim + i);
        &self.data[pos]
    }

    /// `Γ_ijk` of a chart.
    pub fn gamma(chart: &Chart) -> Self {
        Tensor::from_fn(chart.dim(), 3, |ix| {
            chart.gamma(ix[0], ix[1], ix[2]).clone()
        })
    }

    /// Raises every index.
    pub fn raise_all(&self) -> Self {
        let mut cur = self.clone();
        for slot in 0..self.rank {
            cur = cur.raise(slot);
        }
        cur
    }

    /// Raises the index in `slot`.
    pub fn raise(&self, slot: usize) -> Self {
        Tensor::from_fn(self.dim, self.rank, |ix| {
            let mut acc = Poly::zero();
            let mut jx = ix.to_vec();
            for j in 0..self.dim {
                let w = omega_upper(ix[slot], j);
                if w != 0 {
                    jx[slot] = j;
                    self.get(&jx)
                        .add_scaled_into(&Scalar::from_int(w), &mut acc);
                }
            }
            acc
        })
    }

    pub fn diff_t(&self) -> Self {
        Tensor::from_fn(self.dim, self.rank, |ix| self.get(ix).diff_t())
    }

    /// Covariant derivative of a covariant tensor: a new leading index `i`
    /// with `∇_i T_{j..} = ∂_i T_{j..} − Σ_slots Γ^p_{i j_s} T_{..p..}`.
    pub fn covariant(&self, chart: &Chart) -> Self {
        Tensor::from_fn(self.dim, self.rank + 1, |ix| {
            let (i, rest) = (ix[0], &ix[1..]);
            let mut acc = self.get(rest).diff_x(i);
            let mut jx = rest.to_vec();
            for s in 0..self.rank {
                for p in 0..self.dim {
                    jx[s] = p;
                    acc -= &(chart.gamma_upper(p, i, rest[s]) * self.get(&jx));
                }
                jx[s] = rest[s];
            }
            acc
        })
    }
}

fn tuples(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut n| {
        let mut idx = vec![0; rank];
        for slot in (0..rank).rev() {
            idx[slot] = n % dim;
            n /= dim;
        }
        idx
    })
}

fn y_key(h: u8, idx: &[usize]) -> Key {
    let mut key = Key::central(h);
    for &i in idx {
        key.y[i] += 1;
    }
    key
}

/// `Γ^{ijk}`, all indices raised.
pub fn gamma_raised(chart: &Chart) -> Tensor {
    Tensor::gamma(chart).raise_all()
}

/// Coefficients of the five structures of [`hamiltonian_structures`].
pub const HAMILTONIAN_COEFFICIENTS: [(i64, i64); 5] =
    [(-1, 6), (-1, 24), (-1, 120), (-1, 80), (1, 32)];

/// The tensor structures of `H(t)` through degree 5 for `Γ(t) = tΓ`, unscaled:
///
/// `Γ̇_ijk y³`, `∇_iΓ̇_jkl y⁴`, `∇_i∇_jΓ̇_klm y⁵`, `R_ijpk Γ̇^p_lm y⁵`,
/// `h² R_ijkl Γ̇^{ijk} y^l`,
///
/// with `∇` and `R` those of `Γ(t)`. Terms above `n_work` are dropped.
pub fn hamiltonian_structures(chart: &Chart, n_work: usize) -> [WeylForm; 5] {
    let d = chart.dim();
    let chart_t = chart.scaled_by_t_power(1);
    let g_dot = Tensor::gamma(&chart_t).diff_t();
    let d1 = g_dot.covariant(&chart_t);
    let d2 = d1.covariant(&chart_t);
    let g_dot_up1 = g_dot.raise(0);
    let g_dot_up3 = g_dot.raise_all();
    let mut out: [WeylForm; 5] = std::array::from_fn(|_| WeylForm::zero(d, n_work));
    let add = |out: &mut WeylForm, h: u8, idx: &[usize], p: &Poly| {
        if !p.is_zero() {
            out.add_term(y_key(h, idx), p);
        }
    };
    for ix in tuples(d, 3) {
        add(&mut out[0], 0, &ix, g_dot.get(&ix));
    }
    for ix in tuples(d, 4) {
        add(&mut out[1], 0, &ix, d1.get(&ix));
    }
    for ix in tuples(d, 5) {
        add(&mut out[2], 0, &ix, d2.get(&ix));
        let (i, j, k, l, m) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        let mut acc = Poly::zero();
        for p in 0..d {
            acc += &(chart_t.riemann(i, j, p, k) * g_dot_up1.get(&[p, l, m]));
        }
        add(&mut out[3], 0, &ix, &acc);
    }
    for l in 0..d {
        let mut acc = Poly::zero();
        for ix in tuples(d, 3) {
            acc += &(chart_t.riemann(ix[0], ix[1], ix[2], l) * g_dot_up3.get(&ix));
        }
        add(&mut out[4], 2, &[l], &acc);
    }
    out
}

/// `H(t)` through degree 5: the structures weighted by
/// `-1/6, -1/24, -1/120, -1/80, 1/32`.
pub fn hamiltonian_closed_form(chart: &Chart, n_work: usize) -> WeylForm {
    let mut out = WeylForm::zero(chart.dim(), n_work);
    for (s, (num, den)) in hamiltonian_structures(chart, n_work)
        .iter()
        .zip(HAMILTONIAN_COEFFICIENTS)
    {
        out += &s.scale(&Scalar::ratio(num, den));
    }
    out
}

/// Coefficients of the three structures of [`trivialization_structures`].
pub const TRIVIALIZATION_COEFFICIENTS: [(i64, i64); 3] = [(1, 48), (1, 16), (1, 24)];

/// The structures of the `ħ²` correction of `T⁻¹(Q₀a₀)`, unscaled:
///
/// `ω^{ls} ∂_s a₀ ∂_lΓ_ijk Γ^{ijk}`, `ω^{ls} ∂_s∂_k a₀ Γ^{ijk}Γ_ijl`,
/// `∂_i∂_j∂_k a₀ Γ^{ijk}`.
pub fn trivialization_structures(chart: &Chart, a0: &Poly) -> [Poly; 3] {
    let d = chart.dim();
    let gu = gamma_raised(chart);
    let mut out: [Poly; 3] = Default::default();
    for ix in tuples(d, 3) {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let g_up = gu.get(&ix);
        if g_up.is_zero() {
            continue;
        }
        for l in 0..d {
            for s in 0..d {
                if omega_upper(l, s) == 0 {
                    continue;
                }
                let w = Scalar::from_int(omega_upper(l, s));
                let t1 = &(&a0.diff_x(s) * &chart.gamma(i, j, k).diff_x(l)) * g_up;
                out[0] += &t1.scale(&w);
                let t2 = &(&a0.diff_x(s).diff_x(k) * g_up) * chart.gamma(i, j, l);
                out[1] += &t2.scale(&w);
            }
        }
        out[2] += &(&a0.diff_x(i).diff_x(j).diff_x(k) * g_up);
    }
    out
}

/// The `ħ²` correction `C(a₀)` with `T⁻¹(Q₀a₀) = Q(a₀ + h² C(a₀) + ..)`:
/// the structures weighted by `1/48, 1/16, 1/24`.
pub fn trivialization_correction(chart: &Chart, a0: &Poly) -> Poly {
    weighted(
        &trivialization_structures(chart, a0),
        &TRIVIALIZATION_COEFFICIENTS,
    )
}

fn weighted(parts: &[Poly], coeffs: &[(i64, i64)]) -> Poly {
    let mut out = Poly::zero();
    for (p, &(num, den)) in parts.iter().zip(coeffs) {
        out += &p.scale(&Scalar::ratio(num, den));
    }
    out
}

/// `∂_iΓ_jkl Γ^{jkl}`.
fn gamma_contraction_derivative(chart: &Chart, i: usize) -> Poly {
    let gu = gamma_raised(chart);
    let mut acc = Poly::zero();
    for ix in tuples(chart.dim(), 3) {
        acc += &(&chart.gamma(ix[0], ix[1], ix[2]).diff_x(i) * gu.get(&ix));
    }
    acc
}

/// The `ħ²` coefficient of `λ_i`: `−1/48 ∂_iΓ_jkl Γ^{jkl}`.
pub fn lambda_correction(chart: &Chart, i: usize) -> Poly {
    gamma_contraction_derivative(chart, i).scale(&Scalar::ratio(-1, 48))
}

/// `λ_i = ω_ij x^j + h² λ_correction` through `h²`.
pub fn lambda_closed_form(chart: &Chart, i: usize) -> StarFunction {
    let mut lin = Poly::zero();
    for j in 0..chart.dim() {
        let w = crate::chart::omega_lower(i, j);
        if w != 0 {
            lin += &Poly::x(j).scale(&Scalar::from_int(w));
        }
    }
    StarFunction::new(vec![lin, Poly::zero(), lambda_correction(chart, i)])
}

/// Coefficients of the three structures of [`derivation_structures`].
pub const DERIVATION_COEFFICIENTS: [(i64, i64); 3] = [(-1, 48), (-1, 16), (-1, 24)];

/// The structures of the `ħ²` coefficient of `X_i(f)` for a classical `f`,
/// unscaled:
///
/// `ω^{ls} ∂_s f ∂_i(∂_lΓ_mjk Γ^{mjk})`, `ω^{ls} ∂_s∂_k f ∂_i(Γ^{mjk}Γ_mjl)`,
/// `∂_m∂_j∂_k f ∂_iΓ^{mjk}`.
pub fn derivation_structures(chart: &Chart, i: usize, f: &Poly) -> [Poly; 3] {
    let d = chart.dim();
    let gu = gamma_raised(chart);
    let mut out: [Poly; 3] = Default::default();
    for l in 0..d {
        for s in 0..d {
            if omega_upper(l, s) == 0 {
                continue;
            }
            let w = Scalar::from_int(omega_upper(l, s));
            let c1 = gamma_contraction_derivative(chart, l).diff_x(i);
            out[0] += &(&f.diff_x(s) * &c1).scale(&w);
            for k in 0..d {
                let mut c2 = Poly::zero();
                for m in 0..d {
                    for j in 0..d {
                        c2 += &(gu.get(&[m, j, k]) * chart.gamma(m, j, l));
                    }
                }
                out[1] += &(&f.diff_x(s).diff_x(k) * &c2.diff_x(i)).scale(&w);
            }
        }
    }
    for ix in tuples(d, 3) {
        out[2] += &(&f.diff_x(ix[0]).diff_x(ix[1]).diff_x(ix[2]) * &gu.get(&ix).diff_x(i));
    }
    out
}

/// The `ħ²` coefficient of `X_i(f)` for a classical `f`: the structures
/// weighted by `-1/48, -1/16, -1/24`.
pub fn derivation_correction(chart: &Chart, i: usize, f: &Poly) -> Poly {
    weighted(
        &derivation_structures(chart, i, f),
        &DERIVATION_COEFFICIENTS,
    )
}

/// The Moyal product on the base, `Σ_n (−ih/2)^n/n! ω^{i₁j₁}..ω^{iₙjₙ}
/// ∂_{i₁..iₙ}f ∂_{j₁..jₙ}g`, truncated at `h^order`.
pub fn moyal_base(f: &StarFunction, g: &StarFunction, dim: usize, order: usize) -> StarFunction {
    let mut coeffs = vec![Poly::zero(); order + 1];
    for (a, fa) in f.coeffs().iter().enumerate() {
        for (b, gb) in g.coeffs().iter().enumerate() {
            for n in 0..=order.saturating_sub(a + b) {
                if a + b > order {
                    break;
                }
                // (−i/2)^n / n!
                let c = Scalar::real(&Rational::ratio(1, 1 << n) / &factorial(n))
                    .mul_i_pow(3 * n as u32);
                let mut term = Poly::zero();
                for ix in tuples(dim, n) {
                    let mut w = 1i64;
                    let mut df = fa.clone();
                    let mut dg = gb.clone();
                    for &i in &ix {
                        // the unique j with ω^{ij} ≠ 0
                        let j = i ^ 1;
                        w *= omega_upper(i, j);
                        df = df.diff_x(i);
                        dg = dg.diff_x(j);
                    }
                    if !df.is_zero() && !dg.is_zero() {
                        term += &(&df * &dg).scale(&Scalar::from_int(w));
                    }
                }
                coeffs[a + b + n] += &term.scale(&c);
            }
        }
    }
    StarFunction::new(coeffs)
}
