//! Darboux chart data: the standard symplectic matrix, the lowered connection
//! coefficients `Γ_ijk` and the truncation parameters.
//!
//! Indices are 0-based throughout the API; coordinate `x^(i+1)` has index `i`.
//! The symplectic form pairs `(2a, 2a+1)` with `ω_{2a,2a+1} = 1`, and the
//! inverse matrix is fixed by `ω^{mi} ω_{ij} = δ^m_j`, so that
//! `ω^{2a,2a+1} = -1`. Indices are raised with `a^i = ω^{ij} a_j` and lowered
//! with `a_i = ω_{ij} a^j`.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::poly::{Poly, MAX_X};
use crate::scalar::Scalar;
use crate::weyl::{Key, WeylForm, MAX_DIM};

/// Largest supported working degree.
pub const MAX_N_WORK: usize = 40;

/// `ω_ij` of the standard Darboux form.
pub fn omega_lower(i: usize, j: usize) -> i64 {
    if i / 2 != j / 2 || i == j {
        0
    } else if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `ω^ij`, the inverse with `ω^{mi} ω_{ij} = δ^m_j`.
pub fn omega_upper(i: usize, j: usize) -> i64 {
    -omega_lower(i, j)
}

#[derive(Debug)]
struct Derived {
    gamma_upper: OnceLock<Vec<Poly>>,
    riemann: OnceLock<Vec<Poly>>,
    gamma_form: OnceLock<WeylForm>,
}

impl Derived {
    fn new() -> Arc<Self> {
        Arc::new(Derived {
            gamma_upper: OnceLock::new(),
            riemann: OnceLock::new(),
            gamma_form: OnceLock::new(),
        })
    }
}

/// A Darboux chart together with a symplectic connection and truncation orders.
#[derive(Clone, Debug)]
pub struct Chart {
    dim: usize,
    n_work: usize,
    h_order: usize,
    gamma: Arc<Vec<Poly>>,
    derived: Arc<Derived>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.n_work == other.n_work
            && self.h_order == other.h_order
            && self.gamma == other.gamma
    }
}

impl Eq for Chart {}

impl Chart {
    /// Builds a chart from a dense `dim^3` array of lowered coefficients.
    pub fn new(dim: usize, n_work: usize, h_order: usize, gamma: Vec<Poly>) -> Result<Self> {
        check_dimensions(dim, n_work)?;
        if gamma.len() != dim * dim * dim {
            return Err(Error::Validation(format!(
                "expected {} connection coefficients, got {}",
                dim * dim * dim,
                gamma.len()
            )));
        }
        let chart = Chart {
            dim,
            n_work,
            h_order,
            gamma: Arc::new(gamma),
            derived: Derived::new(),
        };
        for (i, j, k) in chart.triples() {
            let g = chart.gamma(i, j, k);
            for (a, b, c) in [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                if chart.gamma(a, b, c) != g {
                    return Err(Error::Validation(format!(
                        "connection coefficients are not totally symmetric at ({}, {}, {})",
                        i + 1,
                        j + 1,
                        k + 1
                    )));
                }
            }
            if let Some(v) = g.max_x_index() {
                if v >= dim {
                    return Err(Error::Validation(format!(
                        "coefficient at ({}, {}, {}) uses x{} outside a {dim}-dimensional chart",
                        i + 1,
                        j + 1,
                        k + 1,
                        v + 1
                    )));
                }
            }
        }
        Ok(chart)
    }

    /// Builds a chart from sparse entries; each entry is mirrored to all index
    /// permutations. Conflicting duplicates are rejected.
    pub fn from_entries(
        dim: usize,
        n_work: usize,
        h_order: usize,
        entries: &[([usize; 3], Poly)],
    ) -> Result<Self> {
        check_dimensions(dim, n_work)?;
        let mut gamma: Vec<Option<Poly>> = vec![None; dim * dim * dim];
        for (idx, p) in entries {
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::Index {
                    index: bad,
                    bound: dim,
                });
            }
            if p.depends_on_t() {
                return Err(Error::Validation(
                    "connection coefficients may not depend on t".into(),
                ));
            }
            let [i, j, k] = *idx;
            for (a, b, c) in [
                (i, j, k),
                (i, k, j),
                (j, i, k),
                (j, k, i),
                (k, i, j),
                (k, j, i),
            ] {
                let slot = &mut gamma[(a * dim + b) * dim + c];
                match slot {
                    Some(existing) if existing != p => {
                        return Err(Error::Validation(format!(
                            "conflicting coefficients for Γ({}, {}, {}): {} vs {}",
                            i + 1,
                            j + 1,
                            k + 1,
                            existing,
                            p
                        )));
                    }
                    _ => *slot = Some(p.clone()),
                }
            }
        }
        let gamma = gamma.into_iter().map(Option::unwrap_or_default).collect();
        Chart::new(dim, n_work, h_order, gamma)
    }

    /// A chart with vanishing connection coefficients.
    pub fn flat(dim: usize, n_work: usize, h_order: usize) -> Result<Self> {
        Chart::new(dim, n_work, h_order, vec![Poly::zero(); dim * dim * dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_work(&self) -> usize {
        self.n_work
    }

    pub fn h_order(&self) -> usize {
        self.h_order
    }

    pub fn with_truncation(&self, n_work: usize, h_order: usize) -> Result<Self> {
        check_dimensions(self.dim, n_work)?;
        Ok(Chart {
            dim: self.dim,
            n_work,
            h_order,
            gamma: self.gamma.clone(),
            derived: Derived::new(),
        })
    }

    /// The same chart with every coefficient multiplied by `t^power`, i.e. the
    /// homotopy `Γ(t) = t^power Γ`.
    pub fn scaled_by_t_power(&self, power: u8) -> Self {
        let tp = (0..power).fold(Poly::one(), |acc, _| &acc * &Poly::t());
        Chart {
            dim: self.dim,
            n_work: self.n_work,
            h_order: self.h_order,
            gamma: Arc::new(self.gamma.iter().map(|g| g * &tp).collect()),
            derived: Derived::new(),
        }
    }

    /// The chart with all coefficients replaced by zero.
    pub fn flattened(&self) -> Self {
        Chart::flat(self.dim, self.n_work, self.h_order).expect("dimensions already validated")
    }

    pub fn is_flat(&self) -> bool {
        self.gamma.iter().all(Poly::is_zero)
    }

    /// Lowered coefficient `Γ_ijk`.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &Poly {
        &self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// `Γ^l_jk = ω^{li} Γ_ijk`.
    pub fn gamma_upper(&self, l: usize, j: usize, k: usize) -> &Poly {
        let d = self.dim;
        let table = self.derived.gamma_upper.get_or_init(|| {
            let mut out = vec![Poly::zero(); d * d * d];
            for l in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        out[(l * d + j) * d + k] = self.raise(l, |i| self.gamma(i, j, k));
                    }
                }
            }
            out
        });
        &table[(l * d + j) * d + k]
    }

    /// `ω^{li} v(i)`.
    pub fn raise<'a>(&self, l: usize, v: impl Fn(usize) -> &'a Poly) -> Poly {
        let mut acc = Poly::zero();
        for i in 0..self.dim {
            let w = omega_upper(l, i);
            if w != 0 {
                v(i).add_scaled_into(&Scalar::from_int(w), &mut acc);
            }
        }
        acc
    }

    /// `ω_{li} v(i)`.
    pub fn lower<'a>(&self, l: usize, v: impl Fn(usize) -> &'a Poly) -> Poly {
        let mut acc = Poly::zero();
        for i in 0..self.dim {
            let w = omega_lower(l, i);
            if w != 0 {
                v(i).add_scaled_into(&Scalar::from_int(w), &mut acc);
            }
        }
        acc
    }

    /// Curvature components `R^i_jkl = ∂_k Γ^i_lj − ∂_l Γ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj`.
    pub fn riemann_upper(&self, i: usize, j: usize, k: usize, l: usize) -> Poly {
        let d = self.dim;
        let mut acc = &self.gamma_upper(i, l, j).diff_x(k) - &self.gamma_upper(i, k, j).diff_x(l);
        for m in 0..d {
            acc += &(self.gamma_upper(i, k, m) * self.gamma_upper(m, l, j));
            acc -= &(self.gamma_upper(i, l, m) * self.gamma_upper(m, k, j));
        }
        acc
    }

    /// Lowered curvature `R_ijkl = ω_im R^m_jkl`.
    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> &Poly {
        let d = self.dim;
        let table = self.derived.riemann.get_or_init(|| {
            let upper: Vec<Poly> = (0..d * d * d * d)
                .map(|n| {
                    let (i, j, k, l) = (n / (d * d * d), (n / (d * d)) % d, (n / d) % d, n % d);
                    self.riemann_upper(i, j, k, l)
                })
                .collect();
            (0..d * d * d * d)
                .map(|n| {
                    let (i, rest) = (n / (d * d * d), n % (d * d * d));
                    self.lower(i, |m| &upper[m * d * d * d + rest])
                })
                .collect()
        });
        &table[((i * d + j) * d + k) * d + l]
    }

    /// The Weyl 1-form `½ Γ_ijk y^i y^j dx^k`.
    pub fn gamma_form(&self) -> &WeylForm {
        self.derived.gamma_form.get_or_init(|| {
            let d = self.dim;
            let mut out = WeylForm::zero(d, self.n_work);
            let half = Scalar::ratio(1, 2);
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let g = self.gamma(i, j, k);
                        if g.is_zero() {
                            continue;
                        }
                        let mut key = Key::default();
                        key.y[i] += 1;
                        key.y[j] += 1;
                        key.dx = 1 << k;
                        out.add_term(key, &g.scale(&half));
                    }
                }
            }
            out
        })
    }

    /// Index triples `(i, j, k)` over the chart.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let d = self.dim;
        (0..d * d * d).map(move |n| (n / (d * d), (n / d) % d, n % d))
    }

    /// `n x n` matrix of `ω_ij` as scalars.
    pub fn omega_lower_matrix(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| Scalar::from_int(omega_lower(i, j)))
                    .collect()
            })
            .collect()
    }

    /// `n x n` matrix of `ω^ij` as scalars.
    pub fn omega_upper_matrix(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| Scalar::from_int(omega_upper(i, j)))
                    .collect()
            })
            .collect()
    }

    /// True when the two charts agree on dimension and working degree.
    pub fn compatible(&self, other: &Chart) -> bool {
        self.dim == other.dim && self.n_work == other.n_work
    }
}

fn check_dimensions(dim: usize, n_work: usize) -> Result<()> {
    if dim < 2 || !dim.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "chart dimension must be even and at least 2, got {dim}"
        )));
    }
    if dim > MAX_DIM.min(MAX_X) {
        return Err(Error::Validation(format!(
            "chart dimension {dim} exceeds the supported maximum {MAX_DIM}"
        )));
    }
    if n_work > MAX_N_WORK {
        return Err(Error::Validation(format!(
            "working degree {n_work} exceeds the supported maximum {MAX_N_WORK}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_inverse_convention() {
        for dim in [2usize, 4, 6] {
            for m in 0..dim {
                for j in 0..dim {
                    let s: i64 = (0..dim)
                        .map(|i| omega_upper(m, i) * omega_lower(i, j))
                        .sum();
                    assert_eq!(s, i64::from(m == j));
                }
            }
        }
        assert_eq!(omega_lower(0, 1), 1);
        assert_eq!(omega_upper(0, 1), -1);
    }

    #[test]
    fn raise_then_lower_is_identity() {
        let chart = Chart::flat(4, 4, 1).unwrap();
        let v: Vec<Poly> = (0..4)
            .map(|i| Poly::x(i).scale(&Scalar::from_int(i as i64 + 1)))
            .collect();
        let up: Vec<Poly> = (0..4).map(|l| chart.raise(l, |i| &v[i])).collect();
        let down: Vec<Poly> = (0..4).map(|l| chart.lower(l, |i| &up[i])).collect();
        assert_eq!(v, down);
    }

    #[test]
    fn rejects_odd_dimension() {
        assert!(matches!(Chart::flat(3, 6, 2), Err(Error::Validation(_))));
    }

    #[test]
    fn mirrors_entries_and_rejects_conflicts() {
        let c = Chart::from_entries(2, 6, 2, &[([0, 0, 1], Poly::x(0))]).unwrap();
        assert_eq!(c.gamma(1, 0, 0), &Poly::x(0));
        assert_eq!(c.gamma(0, 1, 0), &Poly::x(0));
        let err = Chart::from_entries(2, 6, 2, &[([0, 0, 1], Poly::x(0)), ([0, 1, 0], Poly::x(1))])
            .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn rejects_non_symmetric_dense_array() {
        let mut g = vec![Poly::zero(); 8];
        g[1] = Poly::one();
        assert!(matches!(Chart::new(2, 6, 2, g), Err(Error::Validation(_))));
    }

    #[test]
    fn flat_curvature_vanishes() {
        let c = Chart::flat(2, 6, 2).unwrap();
        for n in 0..16 {
            assert!(c.riemann(n / 8, (n / 4) % 2, (n / 2) % 2, n % 2).is_zero());
        }
    }
}
