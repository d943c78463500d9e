//! Seeded random generators for property checks.

use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::abelian::StarFunction;
use crate::calculus::StarForm;
use crate::chart::Chart;
use crate::error::Result;
use crate::poly::{Monomial, Poly};
use crate::scalar::Scalar;
use crate::weyl::{Key, WeylForm};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero small rational, sometimes with an imaginary part.
pub fn scalar(rng: &mut impl Rng, complex: bool) -> Scalar {
    let num = loop {
        let n: i64 = rng.gen_range(-3..=3);
        if n != 0 {
            break n;
        }
    };
    let den: i64 = rng.gen_range(1..=3);
    let re = Scalar::ratio(num, den);
    if complex && rng.gen_bool(0.25) {
        &re + &Scalar::i().scale(&crate::rational::Rational::ratio(rng.gen_range(-2..=2), 1))
    } else {
        re
    }
}

/// A polynomial in `x1..x_dim` of total degree `<= max_degree` with up to
/// `max_terms` terms.
pub fn poly(rng: &mut impl Rng, dim: usize, max_degree: u32, max_terms: usize) -> Poly {
    let mut out = Poly::zero();
    let n = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..n {
        let deg = rng.gen_range(0..=max_degree);
        let mut m = Monomial::default();
        for _ in 0..deg {
            m.0[rng.gen_range(0..dim)] += 1;
        }
        out.add_term(m, &scalar(rng, false));
    }
    out
}

/// A star function with coefficients up to `h^order`.
pub fn star_function(
    rng: &mut impl Rng,
    dim: usize,
    order: usize,
    max_degree: u32,
) -> StarFunction {
    let coeffs = (0..=order)
        .map(|k| {
            if k == 0 || rng.gen_bool(0.5) {
                poly(rng, dim, max_degree, 3)
            } else {
                Poly::zero()
            }
        })
        .collect();
    StarFunction::new(coeffs)
}

/// A classical (`h`-free) star function.
pub fn classical(rng: &mut impl Rng, dim: usize, max_degree: u32) -> StarFunction {
    StarFunction::from_poly(poly(rng, dim, max_degree, 3))
}

/// A Weyl form with `terms` random monomials of form degree in `forms`.
pub fn weyl(
    rng: &mut impl Rng,
    dim: usize,
    n_work: usize,
    terms: usize,
    forms: &[usize],
) -> WeylForm {
    let mut out = WeylForm::zero(dim, n_work);
    for _ in 0..terms {
        let mut key = Key::default();
        let budget = rng.gen_range(0..=n_work);
        key.h = rng.gen_range(0..=budget / 2) as u8;
        for _ in 0..budget - 2 * key.h as usize {
            key.y[rng.gen_range(0..dim)] += 1;
        }
        let p = forms[rng.gen_range(0..forms.len())].min(dim);
        let mut idx: Vec<usize> = (0..dim).collect();
        for _ in 0..p {
            let pick = idx.remove(rng.gen_range(0..idx.len()));
            key.dx |= 1 << pick;
        }
        out.add_term(key, &poly(rng, dim, 2, 2));
    }
    out
}

/// A chart with random totally symmetric `Γ` of degree `<= max_degree`.
pub fn chart(
    rng: &mut impl Rng,
    dim: usize,
    n_work: usize,
    h_order: usize,
    max_degree: u32,
) -> Result<Chart> {
    let mut entries = Vec::new();
    for i in 0..dim {
        for j in i..dim {
            for k in j..dim {
                if rng.gen_bool(0.6) {
                    entries.push(([i, j, k], poly(rng, dim, max_degree, 2)));
                }
            }
        }
    }
    Chart::from_entries(dim, n_work, h_order, &entries)
}

/// A star form of the given rank with classical polynomial components.
pub fn form(rng: &mut impl Rng, dim: usize, rank: usize, max_degree: u32) -> StarForm {
    let entries: Vec<(Vec<usize>, StarFunction)> = (0..dim)
        .combinations(rank)
        .filter_map(|idx| {
            rng.gen_bool(0.8)
                .then(|| (idx, classical(rng, dim, max_degree)))
        })
        .collect();
    StarForm::from_components(dim, rank, entries).expect("increasing indices")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = poly(&mut rng(7), 2, 3, 4);
        let b = poly(&mut rng(7), 2, 3, 4);
        assert_eq!(a, b);
    }

    #[test]
    fn charts_are_valid() {
        let mut r = rng(1);
        for _ in 0..10 {
            chart(&mut r, 2, 6, 2, 2).unwrap();
        }
    }

    #[test]
    fn forms_have_requested_rank() {
        let eta = form(&mut rng(3), 2, 2, 2);
        assert_eq!(eta.rank(), 2);
        assert!(eta.components().all(|(idx, _)| idx == &vec![0, 1]));
    }
}
