//! Parser for the series grammar used on the command line and in chart files.
//!
//! ```text
//! sum    ::= ["+" | "-"] term (("+" | "-") term)*
//! term   ::= factor (["*"] factor)*
//! factor ::= INT ["/" INT] | "I" | "(" sum ")" | "x"INT ["^"INT] | "t" ["^"INT]
//!          | "h" ["^"INT] | "y"INT ["^"INT] | "dx"INT
//! ```
//!
//! Parenthesized groups may only contain numbers and `I`. Indices are 1-based.
//! `dx` factors may appear in any order; they are sorted with the permutation
//! sign and a repeated `dx` makes the term vanish.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::abelian::StarFunction;
use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly, MAX_X, T_SLOT};
use crate::rational::Rational;
use crate::scalar::Scalar;
use crate::weyl::{wedge_sign, Key, WeylForm, MAX_DIM};

/// One parsed monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedTerm {
    pub coeff: Scalar,
    pub x: Monomial,
    pub h: u8,
    pub y: [u8; MAX_DIM],
    /// 0-based dx indices in the order written.
    pub dx: Vec<usize>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: 1,
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    /// Accepts '-' and the UTF-8 minus sign.
    fn eat_sign(&mut self) -> Option<bool> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(false)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(true)
            }
            Some(0xE2) if self.src[self.pos..].starts_with("−".as_bytes()) => {
                self.pos += "−".len();
                Some(true)
            }
            _ => None,
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn small_int(&mut self, what: &str) -> Result<usize> {
        let start = self.pos;
        let n = self.int()?;
        match usize::try_from(n) {
            Ok(v) if v <= 255 => Ok(v),
            _ => {
                self.pos = start;
                self.err(format!("{what} out of range"))
            }
        }
    }

    fn exponent(&mut self) -> Result<u8> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            Ok(self.small_int("exponent")? as u8)
        } else {
            Ok(1)
        }
    }

    fn index(&mut self) -> Result<usize> {
        let start = self.pos;
        let i = self.small_int("index")?;
        if i == 0 {
            self.pos = start;
            return self.err("indices are 1-based");
        }
        Ok(i - 1)
    }

    fn sum(&mut self, scalar_only: bool) -> Result<Vec<ParsedTerm>> {
        let mut terms = Vec::new();
        self.skip_ws();
        let mut negative = self.eat_sign().unwrap_or(false);
        loop {
            self.skip_ws();
            let mut t = self.term(scalar_only)?;
            if negative {
                t.coeff = -t.coeff;
            }
            terms.push(t);
            self.skip_ws();
            match self.eat_sign() {
                Some(n) => negative = n,
                None => break,
            }
        }
        Ok(terms)
    }

    fn term(&mut self, scalar_only: bool) -> Result<ParsedTerm> {
        let mut t = ParsedTerm {
            coeff: Scalar::one(),
            x: Monomial::ONE,
            h: 0,
            y: [0; MAX_DIM],
            dx: Vec::new(),
        };
        let mut any = false;
        loop {
            self.skip_ws();
            if any && self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
            }
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let num = self.int()?;
                    let mut r = Rational::from(num);
                    if self.peek() == Some(b'/') {
                        self.pos += 1;
                        let den = self.int()?;
                        if den.is_zero() {
                            return self.err("zero denominator");
                        }
                        r = &r / &Rational::from(den);
                    }
                    t.coeff = t.coeff.scale(&r);
                }
                Some(b'I') => {
                    self.pos += 1;
                    t.coeff = t.coeff.mul_i_pow(1);
                }
                Some(b'(') => {
                    self.pos += 1;
                    let inner = self.sum(true)?;
                    self.skip_ws();
                    if self.peek() != Some(b')') {
                        return self.err("expected ')'");
                    }
                    self.pos += 1;
                    let s = inner
                        .into_iter()
                        .fold(Scalar::zero(), |acc, term| &acc + &term.coeff);
                    t.coeff = &t.coeff * &s;
                }
                Some(b'x') if !scalar_only => {
                    self.pos += 1;
                    let start = self.pos;
                    let i = self.index()?;
                    if i >= MAX_X {
                        self.pos = start;
                        return self.err(format!("coordinate x{} out of range", i + 1));
                    }
                    let e = self.exponent()?;
                    t.x.0[i] = t.x.0[i].saturating_add(e);
                }
                Some(b't') if !scalar_only => {
                    self.pos += 1;
                    let e = self.exponent()?;
                    t.x.0[T_SLOT] = t.x.0[T_SLOT].saturating_add(e);
                }
                Some(b'h') if !scalar_only => {
                    self.pos += 1;
                    let e = self.exponent()?;
                    t.h = t.h.saturating_add(e);
                }
                Some(b'y') if !scalar_only => {
                    self.pos += 1;
                    let start = self.pos;
                    let i = self.index()?;
                    if i >= MAX_DIM {
                        self.pos = start;
                        return self.err(format!("fiber variable y{} out of range", i + 1));
                    }
                    let e = self.exponent()?;
                    t.y[i] = t.y[i].saturating_add(e);
                }
                Some(b'd') if !scalar_only => {
                    self.pos += 1;
                    if self.peek() != Some(b'x') {
                        return self.err("expected 'dx'");
                    }
                    self.pos += 1;
                    let start = self.pos;
                    let i = self.index()?;
                    if i >= MAX_DIM {
                        self.pos = start;
                        return self.err(format!("form index dx{} out of range", i + 1));
                    }
                    t.dx.push(i);
                }
                _ => {
                    if !any {
                        return self.err("expected a term");
                    }
                    return Ok(t);
                }
            }
            any = true;
        }
    }
}

/// Parses a sum of monomials into its raw terms.
pub fn parse_terms(text: &str) -> Result<Vec<ParsedTerm>> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let terms = p.sum(false)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("unexpected trailing input");
    }
    Ok(terms)
}

fn reject(term_ok: bool, what: &str) -> Result<()> {
    if term_ok {
        Ok(())
    } else {
        Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("{what} not allowed here"),
        })
    }
}

/// Parses a polynomial in `x1..xn` and `t`.
pub fn parse_poly(text: &str) -> Result<Poly> {
    let mut out = Poly::zero();
    for t in parse_terms(text)? {
        reject(t.h == 0, "h")?;
        reject(t.y.iter().all(|&e| e == 0), "y")?;
        reject(t.dx.is_empty(), "dx")?;
        out.add_term(t.x, &t.coeff);
    }
    Ok(out)
}

/// Parses `Σ h^k f_k(x)`.
pub fn parse_star_function(text: &str) -> Result<StarFunction> {
    let mut coeffs: Vec<Poly> = Vec::new();
    for t in parse_terms(text)? {
        reject(t.y.iter().all(|&e| e == 0), "y")?;
        reject(t.dx.is_empty(), "dx")?;
        reject(t.x.t_degree() == 0, "t")?;
        let k = t.h as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Poly::zero());
        }
        coeffs[k].add_term(t.x, &t.coeff);
    }
    Ok(StarFunction::new(coeffs))
}

/// Parses a Weyl form; indices must lie inside the chart and monomials above
/// `n_work` are dropped.
pub fn parse_weyl(text: &str, dim: usize, n_work: usize) -> Result<WeylForm> {
    let mut out = WeylForm::zero(dim, n_work);
    for t in parse_terms(text)? {
        let max_y = (0..MAX_DIM).rev().find(|&i| t.y[i] > 0);
        let max_x = (0..MAX_X).rev().find(|&i| t.x.0[i] > 0);
        for idx in max_y.into_iter().chain(max_x).chain(t.dx.iter().copied()) {
            if idx >= dim {
                return Err(Error::Index {
                    index: idx,
                    bound: dim,
                });
            }
        }
        let mut mask = 0u8;
        let mut negative = false;
        let mut vanishes = false;
        for &i in &t.dx {
            match wedge_sign(mask, 1 << i) {
                Some(neg) => {
                    negative ^= neg;
                    mask |= 1 << i;
                }
                None => vanishes = true,
            }
        }
        if vanishes {
            continue;
        }
        let key = Key {
            h: t.h,
            y: t.y,
            dx: mask,
        };
        let c = if negative { -t.coeff } else { t.coeff };
        out.add_term(key, &Poly::term(t.x, c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_and_imaginary_coefficients() {
        let p = parse_poly("3/4 x1^2 x2 - (1/2 I) x2 + 2 I").unwrap();
        let mut expect = Poly::zero();
        let mut m = Monomial::ONE;
        m.0[0] = 2;
        m.0[1] = 1;
        expect.add_term(m, &Scalar::ratio(3, 4));
        expect.add_term(Monomial::x(1), &-Scalar::i().scale(&Rational::ratio(1, 2)));
        expect.add_term(Monomial::ONE, &Scalar::i().scale(&Rational::from_int(2)));
        assert_eq!(p, expect);
    }

    #[test]
    fn unicode_minus_and_products() {
        assert_eq!(
            parse_poly("x1*x2 − x1").unwrap(),
            parse_poly("x1 x2 - x1").unwrap()
        );
    }

    #[test]
    fn error_reports_column() {
        match parse_poly("x1 + + x2") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_poly("x0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("1/0"), Err(Error::Parse { .. })));
    }

    #[test]
    fn dx_order_is_normalised() {
        let a = parse_weyl("y1 dx2 dx1", 2, 6).unwrap();
        let b = parse_weyl("-y1 dx1 dx2", 2, 6).unwrap();
        assert_eq!(a, b);
        assert!(parse_weyl("dx1 dx1", 2, 6).unwrap().is_zero());
        assert!(matches!(parse_weyl("y3", 2, 6), Err(Error::Index { .. })));
    }
}
