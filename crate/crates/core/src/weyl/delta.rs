use super::{wedge_sign, Key, WeylForm};
use crate::rational::Rational;
use crate::scalar::Scalar;

/// `δa = dx^k ∧ ∂a/∂y^k`. Lowers the Fedosov degree by one.
pub fn delta(a: &WeylForm) -> WeylForm {
    let mut out = WeylForm::zero(a.dim(), a.n_work());
    for (key, p) in a.terms() {
        for i in 0..a.dim() {
            let e = key.y[i];
            let bit = 1u8 << i;
            if e == 0 || key.dx & bit != 0 {
                continue;
            }
            let neg = wedge_sign(bit, key.dx).expect("disjoint by construction");
            let mut nk = *key;
            nk.y[i] -= 1;
            nk.dx |= bit;
            let c = if neg { -(e as i64) } else { e as i64 };
            out.add_scaled_term(nk, p, &Scalar::from_int(c));
        }
    }
    out
}

/// `δ⁻¹a = (1/(p+q)) y^s ι(∂/∂x^s) a` on a monomial with `p` fiber and `q`
/// form factors; zero on the `p = q = 0` part.
pub fn delta_inv(a: &WeylForm) -> WeylForm {
    let mut out = WeylForm::zero(a.dim(), a.n_work());
    for (key, p) in a.terms() {
        let total = key.y_degree() + key.form_degree();
        if total == 0 {
            continue;
        }
        for (pos, s) in key.dx_indices().into_iter().enumerate() {
            let mut nk: Key = *key;
            nk.dx &= !(1u8 << s);
            nk.y[s] += 1;
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            let c = Rational::ratio(sign as i64, total as i64);
            out.add_scaled_term(nk, p, &Scalar::real(c));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    #[test]
    fn delta_of_coordinate() {
        assert_eq!(delta(&WeylForm::y(2, 6, 0)), WeylForm::dx(2, 6, 0));
        assert!(delta(&WeylForm::scalar(2, 6, Poly::x(1))).is_zero());
    }

    #[test]
    fn delta_inv_of_dx() {
        assert_eq!(delta_inv(&WeylForm::dx(2, 6, 0)), WeylForm::y(2, 6, 0));
        assert!(delta_inv(&WeylForm::scalar(2, 6, Poly::x(0))).is_zero());
    }

    #[test]
    fn delta_of_y1_y2() {
        // δ(y1 y2) = y2 dx1 + y1 dx2
        let a = WeylForm::y(2, 6, 0)
            .circ(&WeylForm::y(2, 6, 1))
            .filter(|k| k.h == 0);
        let expect = &WeylForm::y(2, 6, 1).circ(&WeylForm::dx(2, 6, 0))
            + &WeylForm::y(2, 6, 0).circ(&WeylForm::dx(2, 6, 1));
        assert_eq!(delta(&a), expect);
    }
}
