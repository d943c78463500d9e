//! Deformed differential calculus on `A_* = C(O)[[h]]`.
//!
//! The frame `λ_i = ω_ij Q⁻¹ T⁻¹ Q₀ x^j` gives inner derivations
//! `X_i = (i/h)[λ_i *, ·]`. Tensors and forms are stored by their values on
//! the frame `(X_1, .., X_n)`: tensors densely over all index tuples, forms
//! over strictly increasing tuples only.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use itertools::Itertools;
use num_traits::One;

use crate::abelian::{central_function, AbelianConnection, StarFunction};
use crate::chart::{omega_lower, omega_upper};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{factorial, Rational};
use crate::scalar::Scalar;
use crate::trivialization::TrivializationMap;
use crate::weyl::WeylForm;

fn rational(num: Rational, den: Rational) -> Scalar {
    Scalar::real(&num / &den)
}

/// Sign of the permutation sorting `idx`, with the sorted tuple; `None` on a
/// repeated index.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut negative = false;
    for i in 0..v.len() {
        for j in 0..v.len() - i - 1 {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                negative = !negative;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, negative))
}

fn check_indices(idx: &[usize], dim: usize) -> Result<()> {
    match idx.iter().find(|&&i| i >= dim) {
        Some(&i) => Err(Error::Index {
            index: i,
            bound: dim,
        }),
        None => Ok(()),
    }
}

/// Which side a module multiplication acts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A `k`-tensor over `A_*` given by its values on all frame tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarTensor {
    dim: usize,
    rank: usize,
    comps: Vec<StarFunction>,
}

impl StarTensor {
    pub fn zero(dim: usize, rank: usize) -> Self {
        StarTensor {
            dim,
            rank,
            comps: vec![StarFunction::zero(); dim.pow(rank as u32)],
        }
    }

    /// Builds a tensor from a component function of the index tuple.
    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> StarFunction) -> Self {
        let mut t = StarTensor::zero(dim, rank);
        for (n, idx) in StarTensor::tuples(dim, rank).enumerate() {
            t.comps[n] = f(&idx);
        }
        t
    }

    /// All index tuples in row-major order.
    fn tuples(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
        let total = dim.pow(rank as u32);
        (0..total).map(move |mut n| {
            let mut idx = vec![0; rank];
            for slot in idx.iter_mut().rev() {
                *slot = n % dim;
                n /= dim;
            }
            idx
        })
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, idx: &[usize]) -> Result<&StarFunction> {
        if idx.len() != self.rank {
            return Err(Error::Config(format!(
                "{} indices given for a tensor of rank {}",
                idx.len(),
                self.rank
            )));
        }
        check_indices(idx, self.dim)?;
        Ok(&self.comps[self.offset(idx)])
    }

    pub fn set(&mut self, idx: &[usize], f: StarFunction) -> Result<()> {
        self.get(idx)?;
        let n = self.offset(idx);
        self.comps[n] = f;
        Ok(())
    }

    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &StarFunction)> {
        StarTensor::tuples(self.dim, self.rank).zip(self.comps.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(StarFunction::is_zero)
    }

    fn map(&self, f: impl Fn(&StarFunction) -> StarFunction) -> StarTensor {
        StarTensor {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &StarTensor) -> StarTensor {
        assert_eq!((self.dim, self.rank), (other.dim, other.rank));
        StarTensor {
            dim: self.dim,
            rank: self.rank,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// A `k`-form over `A_*`, stored by strictly increasing index tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarForm {
    dim: usize,
    rank: usize,
    comps: BTreeMap<Vec<usize>, StarFunction>,
}

impl StarForm {
    pub fn zero(dim: usize, rank: usize) -> Self {
        StarForm {
            dim,
            rank,
            comps: BTreeMap::new(),
        }
    }

    /// The 0-form `f`.
    pub fn function(dim: usize, f: StarFunction) -> Self {
        let mut out = StarForm::zero(dim, 0);
        out.insert(Vec::new(), f);
        out
    }

    /// Builds a form from its increasing components; entries at non-increasing
    /// tuples are sorted with sign and repeated indices are rejected.
    pub fn from_components(
        dim: usize,
        rank: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, StarFunction)>,
    ) -> Result<Self> {
        let mut out = StarForm::zero(dim, rank);
        for (idx, f) in entries {
            if idx.len() != rank {
                return Err(Error::Config(format!(
                    "{} indices given for a {rank}-form",
                    idx.len()
                )));
            }
            check_indices(&idx, dim)?;
            let (sorted, negative) = sort_with_sign(&idx).ok_or_else(|| {
                Error::Validation(format!("repeated index in form component {idx:?}"))
            })?;
            let f = if negative { -f } else { f };
            let acc = out.comps.remove(&sorted).unwrap_or_default();
            out.insert(sorted, &acc + &f);
        }
        Ok(out)
    }

    fn insert(&mut self, idx: Vec<usize>, f: StarFunction) {
        if f.is_zero() {
            self.comps.remove(&idx);
        } else {
            self.comps.insert(idx, f);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Nonzero components at increasing tuples.
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &StarFunction)> {
        self.comps.iter()
    }

    /// Component at an arbitrary tuple, with the permutation sign applied.
    pub fn eval(&self, idx: &[usize]) -> Result<StarFunction> {
        if idx.len() != self.rank {
            return Err(Error::Config(format!(
                "{} indices given for a {}-form",
                idx.len(),
                self.rank
            )));
        }
        check_indices(idx, self.dim)?;
        Ok(match sort_with_sign(idx) {
            None => StarFunction::zero(),
            Some((sorted, negative)) => {
                let f = self.comps.get(&sorted).cloned().unwrap_or_default();
                if negative {
                    -f
                } else {
                    f
                }
            }
        })
    }

    pub fn to_tensor(&self) -> StarTensor {
        StarTensor::from_fn(self.dim, self.rank, |idx| self.eval(idx).expect("in range"))
    }

    pub fn add(&self, other: &StarForm) -> StarForm {
        assert_eq!((self.dim, self.rank), (other.dim, other.rank));
        let mut out = self.clone();
        for (idx, f) in &other.comps {
            let acc = out.comps.remove(idx).unwrap_or_default();
            out.insert(idx.clone(), &acc + f);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> StarForm {
        let mut out = StarForm::zero(self.dim, self.rank);
        for (idx, f) in &self.comps {
            out.insert(idx.clone(), f.scale(c));
        }
        out
    }

    /// Drops every power of `h` above `h^k` (the `h = 0` limit for `k = 0`).
    pub fn truncate(&self, k: usize) -> StarForm {
        let mut out = StarForm::zero(self.dim, self.rank);
        for (idx, f) in &self.comps {
            out.insert(idx.clone(), f.truncate(k));
        }
        out
    }
}

/// Either kind of frame-component object; used by [`Frame::eval_on_frame`].
pub enum Components<'a> {
    Tensor(&'a StarTensor),
    Form(&'a StarForm),
}

impl<'a> From<&'a StarTensor> for Components<'a> {
    fn from(t: &'a StarTensor) -> Self {
        Components::Tensor(t)
    }
}

impl<'a> From<&'a StarForm> for Components<'a> {
    fn from(f: &'a StarForm) -> Self {
        Components::Form(f)
    }
}

/// The frame `λ_i` together with the connection used for all star products.
#[derive(Debug)]
pub struct Frame {
    conn: AbelianConnection,
    triv: TrivializationMap,
    lambdas: Vec<StarFunction>,
    q_lambdas: Vec<WeylForm>,
    order: usize,
    lifts: Mutex<HashMap<StarFunction, WeylForm>>,
}

impl Frame {
    /// Computes `λ_i` through `h^K` and checks `(i/h)[λ_i *, λ_j] = -ω_ij`.
    pub fn build(conn: &AbelianConnection, triv: &TrivializationMap) -> Result<Self> {
        let (dim, n, k) = (conn.dim(), conn.n_work(), conn.h_order());
        if n < 2 * k + 2 {
            return Err(Error::Config(format!(
                "frame to h^{k} needs working degree at least {}, have {n}",
                2 * k + 2
            )));
        }
        let trivial = AbelianConnection::trivial(dim, n, k)?;
        let mut raw = Vec::with_capacity(dim);
        for j in 0..dim {
            let a0 = trivial.quantize(&StarFunction::from_poly(Poly::x(j)));
            let a1 = triv.apply_t_inv(&a0)?;
            raw.push(central_function(&a1, k));
        }
        let lambdas: Vec<StarFunction> = (0..dim)
            .map(|i| {
                (0..dim).fold(StarFunction::zero(), |acc, j| match omega_lower(i, j) {
                    0 => acc,
                    w => &acc + &raw[j].scale(&Scalar::from_int(w)),
                })
            })
            .collect();
        let q_lambdas = lambdas.iter().map(|l| conn.quantize(l)).collect();
        let frame = Frame {
            conn: conn.clone(),
            triv: triv.clone(),
            lambdas,
            q_lambdas,
            order: k,
            lifts: Mutex::new(HashMap::new()),
        };
        for i in 0..dim {
            for j in 0..dim {
                let residual = frame.lemma_residual(i, j);
                if !residual.is_zero() {
                    return Err(Error::Consistency(format!(
                        "(i/h)[λ_{} *, λ_{}] + ω_{}{} = {}",
                        i + 1,
                        j + 1,
                        i + 1,
                        j + 1,
                        crate::render::render_star(&residual).text
                    )));
                }
            }
        }
        Ok(frame)
    }

    /// Builds the connection, trivialization and frame of a chart in one go.
    pub fn for_connection(conn: &AbelianConnection) -> Result<Self> {
        Frame::build(conn, &TrivializationMap::build(conn))
    }

    pub fn connection(&self) -> &AbelianConnection {
        &self.conn
    }

    pub fn trivialization(&self) -> &TrivializationMap {
        &self.triv
    }

    pub fn dim(&self) -> usize {
        self.conn.dim()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn lambdas(&self) -> &[StarFunction] {
        &self.lambdas
    }

    pub fn lambda(&self, i: usize) -> Result<&StarFunction> {
        check_indices(&[i], self.dim())?;
        Ok(&self.lambdas[i])
    }

    /// `(i/h)[λ_i *, λ_j] + ω_ij`, zero for a consistent frame.
    pub fn lemma_residual(&self, i: usize, j: usize) -> StarFunction {
        let c = central_function(
            &self.q_lambdas[i].ih_commutator(&self.q_lambdas[j]),
            self.order,
        );
        &c + &StarFunction::from_poly(Poly::constant(Scalar::from_int(omega_lower(i, j))))
    }

    fn lift(&self, f: &StarFunction) -> WeylForm {
        let f = f.truncate(self.order);
        let mut cache = self.lifts.lock().expect("lift cache poisoned");
        if let Some(q) = cache.get(&f) {
            return q.clone();
        }
        let q = self.conn.quantize(&f);
        cache.insert(f, q.clone());
        q
    }

    /// `f * g` through `h^K`.
    pub fn star(&self, f: &StarFunction, g: &StarFunction) -> StarFunction {
        if f.is_zero() || g.is_zero() {
            return StarFunction::zero();
        }
        central_function(&self.lift(f).circ(&self.lift(g)), self.order)
    }

    /// `X_i(f) = (i/h)[λ_i *, f]` through `h^K`.
    pub fn derive(&self, i: usize, f: &StarFunction) -> Result<StarFunction> {
        check_indices(&[i], self.dim())?;
        if f.is_zero() {
            return Ok(StarFunction::zero());
        }
        Ok(central_function(
            &self.q_lambdas[i].ih_commutator(&self.lift(f)),
            self.order,
        ))
    }

    pub fn derive_all(&self, f: &StarFunction) -> Vec<StarFunction> {
        (0..self.dim())
            .map(|i| self.derive(i, f).expect("in range"))
            .collect()
    }

    /// `X_i(f) = Q⁻¹ T⁻¹ ∂/∂y^i (T Q f)`.
    ///
    /// `∂/∂y^i` loses the top degree, so `T⁻¹` is applied without its flatness
    /// check; the result is still exact through `h^K` because `N >= 2K + 2`.
    pub fn derive_via_trivialization(&self, i: usize, f: &StarFunction) -> Result<StarFunction> {
        check_indices(&[i], self.dim())?;
        let qf = self.conn.quantize(&f.truncate(self.order));
        let b = self.triv.apply_t(&qf)?;
        let c = self.triv.apply_t_inv_unchecked(&b.y_derivative(i));
        Ok(central_function(&c, self.order))
    }

    /// The coframe `θ^j = d_*(ω^{jk} λ_k)`.
    pub fn theta(&self, j: usize) -> Result<StarForm> {
        check_indices(&[j], self.dim())?;
        let f = (0..self.dim()).fold(StarFunction::zero(), |acc, k| match omega_upper(j, k) {
            0 => acc,
            w => &acc + &self.lambdas[k].scale(&Scalar::from_int(w)),
        });
        Ok(self.d_star(&StarForm::function(self.dim(), f)))
    }

    /// `(T ⊗_* S)(i.., j..) = T(i..) * S(j..)`.
    pub fn tensor_star(&self, t: &StarTensor, s: &StarTensor) -> StarTensor {
        assert_eq!(t.dim, s.dim, "tensors over different frames");
        let l = s.rank;
        StarTensor::from_fn(t.dim, t.rank + l, |idx| {
            let (a, b) = idx.split_at(t.rank);
            self.star(t.get(a).expect("in range"), s.get(b).expect("in range"))
        })
    }

    /// `η ∧_* ξ = (k+l)!/(k! l!) Alt(η ⊗_* ξ)`.
    pub fn wedge_star(&self, eta: &StarForm, xi: &StarForm) -> StarForm {
        assert_eq!(eta.dim, xi.dim, "forms over different frames");
        let (k, l, n) = (eta.rank, xi.rank, eta.dim);
        let mut products: HashMap<(Vec<usize>, Vec<usize>), StarFunction> = HashMap::new();
        let tensor = StarTensor::from_fn(n, k + l, |idx| {
            let (a, b) = idx.split_at(k);
            match (sort_with_sign(a), sort_with_sign(b)) {
                (Some((sa, na)), Some((sb, nb))) => {
                    let p = products
                        .entry((sa.clone(), sb.clone()))
                        .or_insert_with(|| {
                            let fa = eta.comps.get(&sa).cloned().unwrap_or_default();
                            let fb = xi.comps.get(&sb).cloned().unwrap_or_default();
                            self.star(&fa, &fb)
                        })
                        .clone();
                    if na ^ nb {
                        -p
                    } else {
                        p
                    }
                }
                _ => StarFunction::zero(),
            }
        });
        let c = rational(factorial(k + l), factorial(k) * factorial(l));
        alt(&tensor).scale(&c)
    }

    /// `d_*` on a `k`-form: at an increasing tuple `M`,
    /// `(d_* η)_M = Σ_s (-1)^s X_{m_s}(η_{M \ m_s})`.
    pub fn d_star(&self, eta: &StarForm) -> StarForm {
        let (n, k) = (eta.dim, eta.rank);
        let mut out = StarForm::zero(n, k + 1);
        let mut derived: HashMap<(usize, Vec<usize>), StarFunction> = HashMap::new();
        for m in (0..n).combinations(k + 1) {
            let mut acc = StarFunction::zero();
            for s in 0..=k {
                let mut rest = m.clone();
                let j = rest.remove(s);
                let Some(f) = eta.comps.get(&rest) else {
                    continue;
                };
                let x = derived
                    .entry((j, rest.clone()))
                    .or_insert_with(|| self.derive(j, f).expect("in range"))
                    .clone();
                acc = if s % 2 == 0 { &acc + &x } else { &acc - &x };
            }
            out.insert(m, acc);
        }
        out
    }

    /// `d_*` of `(1/k!) η_{i..} θ^{i..}` for arbitrary (not necessarily
    /// antisymmetric) components `η_{i..}`.
    pub fn d_star_of_components(&self, eta: &StarTensor) -> StarForm {
        let (n, k) = (eta.dim, eta.rank);
        let mut out = StarForm::zero(n, k + 1);
        let inv = rational(Rational::one(), factorial(k));
        for m in (0..n).combinations(k + 1) {
            let mut acc = StarFunction::zero();
            for perm in (0..=k).permutations(k + 1) {
                let idx: Vec<usize> = perm.iter().map(|&p| m[p]).collect();
                let (_, negative) = sort_with_sign(&perm).expect("a permutation");
                let x = self
                    .derive(idx[0], eta.get(&idx[1..]).expect("in range"))
                    .expect("in range");
                acc = if negative { &acc - &x } else { &acc + &x };
            }
            out.insert(m, acc.scale(&inv));
        }
        out
    }

    /// Value of a tensor or form on `(X_{i1}, .., X_{ik})`.
    pub fn eval_on_frame<'a>(
        &self,
        t: impl Into<Components<'a>>,
        idx: &[usize],
    ) -> Result<StarFunction> {
        match t.into() {
            Components::Tensor(t) => t.get(idx).cloned(),
            Components::Form(f) => f.eval(idx),
        }
    }

    /// `f * η` or `η * f`, componentwise.
    pub fn module_mul(&self, side: Side, f: &StarFunction, eta: &StarForm) -> StarForm {
        let mut out = StarForm::zero(eta.dim, eta.rank);
        for (idx, c) in &eta.comps {
            let p = match side {
                Side::Left => self.star(f, c),
                Side::Right => self.star(c, f),
            };
            out.insert(idx.clone(), p);
        }
        out
    }

    /// Componentwise module multiplication of a tensor.
    pub fn module_mul_tensor(&self, side: Side, f: &StarFunction, t: &StarTensor) -> StarTensor {
        t.map(|c| match side {
            Side::Left => self.star(f, c),
            Side::Right => self.star(c, f),
        })
    }
}

/// `Alt(T)(i..) = (1/k!) Σ_σ sgn(σ) T(i_σ..)`, stored at increasing tuples.
pub fn alt(t: &StarTensor) -> StarForm {
    let (n, k) = (t.dim, t.rank);
    let mut out = StarForm::zero(n, k);
    let inv = rational(Rational::one(), factorial(k));
    for m in (0..n).combinations(k) {
        let mut acc = StarFunction::zero();
        for perm in (0..k).permutations(k) {
            let idx: Vec<usize> = perm.iter().map(|&p| m[p]).collect();
            let (_, negative) = sort_with_sign(&perm).expect("a permutation");
            let c = t.get(&idx).expect("in range");
            acc = if negative { &acc - c } else { &acc + c };
        }
        out.insert(m, acc.scale(&inv));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_frame() -> Frame {
        let conn = AbelianConnection::trivial(2, 6, 2).unwrap();
        Frame::for_connection(&conn).unwrap()
    }

    #[test]
    fn permutation_sign() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], false)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], true)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn flat_frame_is_darboux() {
        let f = flat_frame();
        assert_eq!(f.lambdas()[0], StarFunction::from_poly(Poly::x(1)));
        assert_eq!(f.lambdas()[1], -StarFunction::from_poly(Poly::x(0)));
        let g = StarFunction::from_poly(&Poly::x(0) * &Poly::x(0));
        assert_eq!(f.derive(0, &g).unwrap(), g.diff_x(0));
        assert!(f.derive(1, &StarFunction::one()).unwrap().is_zero());
    }

    #[test]
    fn theta_is_dual() {
        let f = flat_frame();
        for j in 0..2 {
            let t = f.theta(j).unwrap();
            for i in 0..2 {
                let expect = if i == j {
                    StarFunction::one()
                } else {
                    StarFunction::zero()
                };
                assert_eq!(f.eval_on_frame(&t, &[i]).unwrap(), expect);
            }
        }
    }

    #[test]
    fn alt_kills_symmetric() {
        let s = StarTensor::from_fn(2, 2, |_| StarFunction::from_poly(Poly::x(0)));
        assert!(alt(&s).is_zero());
    }

    #[test]
    fn forms_vanish_above_dimension() {
        let f = flat_frame();
        let t0 = f.theta(0).unwrap();
        let t1 = f.theta(1).unwrap();
        let w = f.wedge_star(&f.wedge_star(&t0, &t1), &t0);
        assert!(w.is_zero());
        assert!(matches!(
            f.eval_on_frame(&t0, &[2]),
            Err(Error::Index { .. })
        ));
    }
}
