//! Canonical rendering of polynomials, Weyl forms, star functions and star forms.
//!
//! A rendered value is a flat sum of monomials
//! `coeff x.. t^.. h^.. y.. dx..`, ordered by `h` power, then Fedosov degree,
//! then fiber monomial, then form indices, then base monomial. The output is
//! accepted back by [`crate::parse`], and rendering is injective on canonical
//! values.

use std::fmt::{self, Write};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::abelian::StarFunction;
use crate::calculus::StarForm;
use crate::poly::{write_monomial, Monomial};
use crate::scalar::Scalar;
use crate::weyl::{Key, WeylForm};

/// One monomial group of a rendered series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RenderedTerm {
    pub h_power: usize,
    /// Exponents of `y1..yn`.
    pub y_degrees: Vec<u8>,
    /// 1-based, strictly increasing.
    pub dx_indices: Vec<usize>,
    pub poly: String,
}

/// Canonical text plus a structured breakdown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RenderedSeries {
    pub text: String,
    pub terms: Vec<RenderedTerm>,
}

/// Splits `c` into a sign and a magnitude whose leading component is positive.
fn sign_and_magnitude(c: &Scalar) -> (bool, Scalar) {
    let negative = c.re.is_negative() || (c.re.is_zero() && c.im.is_negative());
    if negative {
        (true, -c)
    } else {
        (false, c.clone())
    }
}

fn coeff_text(mag: &Scalar, has_factors: bool) -> String {
    if mag.is_one() {
        return if has_factors {
            String::new()
        } else {
            "1".into()
        };
    }
    if mag.is_real() && mag.re.is_integer() {
        return mag.re.numer().to_string();
    }
    if mag == &Scalar::i() {
        return "I".into();
    }
    format!("({mag})")
}

/// Writes `Σ c_k f_k` where each item is a coefficient and a factor string.
pub(crate) fn write_sum<'a>(
    items: impl IntoIterator<Item = (&'a Scalar, String)>,
    out: &mut impl Write,
) -> fmt::Result {
    let mut first = true;
    for (c, factors) in items {
        if c.is_zero() {
            continue;
        }
        let (neg, mag) = sign_and_magnitude(c);
        let ct = coeff_text(&mag, !factors.is_empty());
        let body = match (ct.is_empty(), factors.is_empty()) {
            (true, _) => factors,
            (false, true) => ct,
            (false, false) => format!("{ct} {factors}"),
        };
        match (first, neg) {
            (true, true) => write!(out, "-{body}")?,
            (true, false) => out.write_str(&body)?,
            (false, true) => write!(out, " - {body}")?,
            (false, false) => write!(out, " + {body}")?,
        }
        first = false;
    }
    Ok(())
}

pub(crate) fn write_poly_terms(
    terms: Vec<(&Monomial, &Scalar)>,
    out: &mut impl Write,
    suffix: &str,
) -> fmt::Result {
    write_sum(
        terms.into_iter().map(|(m, c)| {
            let mut f = String::new();
            write_monomial(m, &mut f).expect("string write");
            if !suffix.is_empty() {
                if !f.is_empty() {
                    f.push(' ');
                }
                f.push_str(suffix);
            }
            (c, f)
        }),
        out,
    )
}

fn key_suffix(key: &Key, dim: usize) -> String {
    let mut parts = Vec::new();
    if key.h == 1 {
        parts.push("h".to_string());
    } else if key.h > 1 {
        parts.push(format!("h^{}", key.h));
    }
    for i in 0..dim {
        match key.y[i] {
            0 => {}
            1 => parts.push(format!("y{}", i + 1)),
            e => parts.push(format!("y{}^{e}", i + 1)),
        }
    }
    for i in key.dx_indices() {
        parts.push(format!("dx{}", i + 1));
    }
    parts.join(" ")
}

fn sorted_keys(a: &WeylForm) -> Vec<(&Key, &crate::poly::Poly)> {
    let mut v: Vec<_> = a.terms().collect();
    v.sort_by(|(ka, _), (kb, _)| {
        ka.h.cmp(&kb.h)
            .then(ka.fedosov_degree().cmp(&kb.fedosov_degree()))
            .then(kb.y.cmp(&ka.y))
            .then(ka.dx_indices().cmp(&kb.dx_indices()))
    });
    v
}

/// Renders a Weyl form.
pub fn render_weyl(a: &WeylForm) -> RenderedSeries {
    let mut text = String::new();
    let mut terms = Vec::new();
    let mut first = true;
    for (key, p) in sorted_keys(a) {
        let suffix = key_suffix(key, a.dim());
        let mut chunk = String::new();
        write_poly_terms(p.display_order(), &mut chunk, &suffix).expect("string write");
        append_chunk(&mut text, &chunk, &mut first);
        terms.push(RenderedTerm {
            h_power: key.h as usize,
            y_degrees: key.y[..a.dim()].to_vec(),
            dx_indices: key.dx_indices().into_iter().map(|i| i + 1).collect(),
            poly: p.to_string(),
        });
    }
    if text.is_empty() {
        text.push('0');
    }
    RenderedSeries { text, terms }
}

/// Renders a star function `Σ h^k f_k`.
pub fn render_star(f: &StarFunction) -> RenderedSeries {
    let mut text = String::new();
    let mut terms = Vec::new();
    let mut first = true;
    for (k, p) in f.coeffs().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let suffix = key_suffix(&Key::central(k as u8), 0);
        let mut chunk = String::new();
        write_poly_terms(p.display_order(), &mut chunk, &suffix).expect("string write");
        append_chunk(&mut text, &chunk, &mut first);
        terms.push(RenderedTerm {
            h_power: k,
            y_degrees: Vec::new(),
            dx_indices: Vec::new(),
            poly: p.to_string(),
        });
    }
    if text.is_empty() {
        text.push('0');
    }
    RenderedSeries { text, terms }
}

/// Renders a star form as one line per nonzero increasing component,
/// `[i1,..,ik]: <component>`.
pub fn render_form(eta: &StarForm) -> RenderedSeries {
    let mut text = String::new();
    let mut terms = Vec::new();
    for (idx, f) in eta.components() {
        if f.is_zero() {
            continue;
        }
        let r = render_star(f);
        let label: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        if !text.is_empty() {
            text.push('\n');
        }
        let _ = write!(text, "[{}]: {}", label.join(","), r.text);
        for mut t in r.terms {
            t.dx_indices = idx.iter().map(|i| i + 1).collect();
            terms.push(t);
        }
    }
    if text.is_empty() {
        text.push('0');
    }
    RenderedSeries { text, terms }
}

/// Joins a chunk that is itself a rendered signed sum onto `text`.
fn append_chunk(text: &mut String, chunk: &str, first: &mut bool) {
    if chunk.is_empty() {
        return;
    }
    if *first {
        text.push_str(chunk);
        *first = false;
    } else if let Some(rest) = chunk.strip_prefix('-') {
        text.push_str(" - ");
        text.push_str(rest);
    } else {
        text.push_str(" + ");
        text.push_str(chunk);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    #[test]
    fn star_function_ordering() {
        let f = StarFunction::new(vec![
            Poly::x(0),
            Poly::zero(),
            Poly::constant(Scalar::ratio(1, 2)),
        ]);
        assert_eq!(render_star(&f).text, "x1 + (1/2) h^2");
    }

    #[test]
    fn canonical_weyl_monomial() {
        let mut key = Key::default();
        key.y[0] = 1;
        key.y[1] = 1;
        key.dx = 1;
        let a = WeylForm::monomial(2, 6, key, Poly::one());
        assert_eq!(render_weyl(&a).text, "y1 y2 dx1");
        assert_eq!(render_weyl(&a).terms[0].dx_indices, vec![1]);
    }

    #[test]
    fn complex_coefficients() {
        let f = StarFunction::new(vec![
            Poly::x(0) * Poly::x(1),
            Poly::constant(Scalar::i().scale(&crate::rational::Rational::ratio(1, 2))),
        ]);
        assert_eq!(render_star(&f).text, "x1 x2 + (1/2 I) h");
        let g = StarFunction::new(vec![Poly::x(0).scale(&-Scalar::i())]);
        assert_eq!(render_star(&g).text, "-I x1");
    }
}
