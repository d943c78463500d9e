use super::{wedge_sign, Key, WeylForm};
use crate::chart::Chart;
use crate::scalar::Scalar;

/// Exterior derivative in the base variables: `d(p dx^β) = ∂_i p dx^i ∧ dx^β`.
pub fn exterior_d(a: &WeylForm) -> WeylForm {
    let mut out = WeylForm::zero(a.dim(), a.n_work());
    for (key, p) in a.terms() {
        for i in 0..a.dim() {
            let bit = 1u8 << i;
            if key.dx & bit != 0 {
                continue;
            }
            let dp = p.diff_x(i);
            if dp.is_zero() {
                continue;
            }
            let neg = wedge_sign(bit, key.dx).expect("disjoint by construction");
            let mut nk = *key;
            nk.dx |= bit;
            let c = Scalar::from_int(if neg { -1 } else { 1 });
            out.add_scaled_term(nk, &dp, &c);
        }
    }
    out
}

fn gamma_form_for(chart: &Chart, a: &WeylForm) -> WeylForm {
    let g = chart.gamma_form();
    if g.n_work() == a.n_work() {
        g.clone()
    } else {
        g.with_n_work(a.n_work())
    }
}

/// Symplectic covariant derivative `∂a = da + (i/h)[½ Γ_ijk y^i y^j dx^k, a]`.
pub fn covariant_derivative(chart: &Chart, a: &WeylForm) -> WeylForm {
    assert_eq!(chart.dim(), a.dim(), "chart and form dimensions differ");
    let mut out = exterior_d(a);
    if !chart.is_flat() {
        out += &gamma_form_for(chart, a).ih_commutator(a);
    }
    out
}

/// `R = ¼ R_ijkl y^i y^j dx^k ∧ dx^l` built from the curvature components of
/// the chart's connection.
pub fn curvature_form(chart: &Chart) -> WeylForm {
    let d = chart.dim();
    let mut out = WeylForm::zero(d, chart.n_work());
    let quarter = Scalar::ratio(1, 4);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in (k + 1)..d {
                    let c = chart.riemann(i, j, k, l) - chart.riemann(i, j, l, k);
                    if c.is_zero() {
                        continue;
                    }
                    let mut key = Key::default();
                    key.y[i] += 1;
                    key.y[j] += 1;
                    key.dx = (1 << k) | (1 << l);
                    out.add_scaled_term(key, &c, &quarter);
                }
            }
        }
    }
    out
}
