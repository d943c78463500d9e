//! Fiberwise Moyal product and graded commutators.
//!
//! With `c = -i h / 2`, the product is `exp(c ω^{ij} ←∂_i →∂_j)`. Since the
//! standard `ω^{ij}` only couples `(q_a, p_a) = (y^{2a}, y^{2a+1})`, the
//! exponential factors into independent sums over two contraction counts per
//! pair: `k1` copies of `ω^{qp} ←∂_q →∂_p` and `k2` copies of `ω^{pq} ←∂_p →∂_q`,
//! each weighted by `(c ω)^k / k!`.

use num_traits::One;

use super::{Key, WeylForm};
use crate::chart::omega_upper;
use crate::poly::Poly;
use crate::rational::Rational;
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(super) enum Mode {
    Product,
    Commutator,
    IhCommutator,
}

/// Sign of `dx^A ∧ dx^B` relative to the sorted union: `Some(true)` when
/// negative, `None` when the sets overlap.
pub fn wedge_sign(a: u8, b: u8) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(swaps % 2 == 1)
}

fn falling(n: u8, k: u8) -> Rational {
    (0..k).fold(Rational::one(), |acc, i| {
        &acc * &Rational::from_int((n - i) as i64)
    })
}

fn factorial(k: u8) -> Rational {
    falling(k, k)
}

pub(super) fn moyal(a: &WeylForm, b: &WeylForm, mode: Mode) -> WeylForm {
    let dim = a.dim();
    let n_work = a.n_work() as isize;
    let pairs = dim / 2;
    let mut out = WeylForm::zero(dim, a.n_work());
    let degree_shift: isize = if mode == Mode::IhCommutator { -2 } else { 0 };
    // ω^{qp} for each pair; the reverse entry is its negative.
    let w_qp = omega_upper(0, 1);
    debug_assert_eq!(w_qp, -omega_upper(1, 0));

    let mut limits = vec![0u8; 2 * pairs];
    let mut digits = vec![0u8; 2 * pairs];

    for (ka, pa) in a.terms() {
        let da = ka.fedosov_degree() as isize;
        for (kb, pb) in b.terms() {
            let db = kb.fedosov_degree() as isize;
            if da + db + degree_shift > n_work {
                continue;
            }
            let Some(wedge_neg) = wedge_sign(ka.dx, kb.dx) else {
                continue;
            };
            for pair in 0..pairs {
                let (q, p) = (2 * pair, 2 * pair + 1);
                limits[2 * pair] = ka.y[q].min(kb.y[p]);
                limits[2 * pair + 1] = ka.y[p].min(kb.y[q]);
            }
            if mode != Mode::Product && limits.iter().all(|&l| l == 0) {
                continue;
            }
            digits.iter_mut().for_each(|d| *d = 0);
            let mut product: Option<Poly> = None;
            loop {
                let m: u32 = digits.iter().map(|&d| d as u32).sum();
                let wanted = match mode {
                    Mode::Product => true,
                    Mode::Commutator | Mode::IhCommutator => m % 2 == 1,
                };
                if wanted {
                    let mut num = Rational::one();
                    let mut den = Rational::from_int(1i64 << m);
                    let mut key = Key {
                        h: ka.h + kb.h + m as u8,
                        y: [0; super::MAX_DIM],
                        dx: ka.dx | kb.dx,
                    };
                    let mut negative = wedge_neg;
                    for pair in 0..pairs {
                        let (q, p) = (2 * pair, 2 * pair + 1);
                        let (k1, k2) = (digits[2 * pair], digits[2 * pair + 1]);
                        num = num
                            * falling(ka.y[q], k1)
                            * falling(ka.y[p], k2)
                            * falling(kb.y[p], k1)
                            * falling(kb.y[q], k2);
                        den = den * factorial(k1) * factorial(k2);
                        // sign of (ω^{qp})^k1 (ω^{pq})^k2
                        if w_qp < 0 && k1 % 2 == 1 {
                            negative = !negative;
                        }
                        if w_qp > 0 && k2 % 2 == 1 {
                            negative = !negative;
                        }
                        key.y[q] = ka.y[q] - k1 + kb.y[q] - k2;
                        key.y[p] = ka.y[p] - k2 + kb.y[p] - k1;
                    }
                    // (-i)^m = i^{3m}
                    let mut i_power = 3 * m;
                    match mode {
                        Mode::Product => {}
                        Mode::Commutator => num = num * Rational::from_int(2),
                        Mode::IhCommutator => {
                            num = num * Rational::from_int(2);
                            i_power += 1;
                            key.h -= 1;
                        }
                    }
                    if negative {
                        num = -num;
                    }
                    let c = Scalar::real(&num / &den).mul_i_pow(i_power);
                    let prod = product.get_or_insert_with(|| pa * pb);
                    out.add_scaled_term(key, prod, &c);
                }
                // odometer
                let mut idx = 0;
                loop {
                    if idx == digits.len() {
                        break;
                    }
                    if digits[idx] < limits[idx] {
                        digits[idx] += 1;
                        break;
                    }
                    digits[idx] = 0;
                    idx += 1;
                }
                if idx == digits.len() {
                    break;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(false));
        assert_eq!(wedge_sign(0b10, 0b01), Some(true));
        assert_eq!(wedge_sign(0b11, 0b01), None);
        // dx2 dx3 ∧ dx1 = dx1 dx2 dx3 (two swaps)
        assert_eq!(wedge_sign(0b110, 0b001), Some(false));
        assert_eq!(wedge_sign(0, 0), Some(false));
    }
}
