//! Textual syntax for polynomials and forms.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := number | coord ['^' int] | 'd' '(' coord ')' ['^' int]
//! number := int ['/' int]
//! ```
//!
//! Coordinates are identifiers; `d` is reserved. Negative exponents are only
//! accepted on inverted even coordinates. Printing is canonical and
//! `parse(print(f)) = f` holds coefficient-for-coefficient.

use crate::forms::{FormElement, FormMonomial};
use crate::ring::{ChartSignature, SuperPolynomial};
use crate::scalar::{is_negative, FieldSpec, Scalar};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

// ---------------------------------------------------------------- printing

fn write_monomial_factors(
    out: &mut String,
    sig: &ChartSignature,
    mono: &FormMonomial,
) {
    for (i, &e) in mono.func.even_exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        out.push_str(&sig.even_names[i]);
        if e != 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
        out.push('*');
    }
    let mut mask = mono.func.odd_mask;
    while mask != 0 {
        let j = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        out.push_str(&sig.odd_names[j]);
        out.push('*');
    }
    let mut dx = mono.dx_mask;
    while dx != 0 {
        let i = dx.trailing_zeros() as usize;
        dx &= dx - 1;
        out.push_str("d(");
        out.push_str(&sig.even_names[i]);
        out.push_str(")*");
    }
    for (j, &k) in mono.dtheta.iter().enumerate() {
        if k == 0 {
            continue;
        }
        out.push_str("d(");
        out.push_str(&sig.odd_names[j]);
        out.push(')');
        if k != 1 {
            out.push('^');
            out.push_str(&k.to_string());
        }
        out.push('*');
    }
    if out.ends_with('*') {
        out.pop();
    }
}

pub fn write_form(f: &mut fmt::Formatter<'_>, form: &FormElement) -> fmt::Result {
    if form.terms.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (mono, coeff) in &form.terms {
        let neg = is_negative(coeff);
        let mag = if neg { coeff.neg() } else { coeff.clone() };
        if first {
            if neg {
                write!(f, "-")?;
            }
            first = false;
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let mut factors = String::new();
        write_monomial_factors(&mut factors, &form.sig, mono);
        if factors.is_empty() {
            write!(f, "{mag}")?;
        } else if mag.is_one() {
            write!(f, "{factors}")?;
        } else {
            write!(f, "{mag}*{factors}")?;
        }
    }
    Ok(())
}

pub fn write_polynomial(f: &mut fmt::Formatter<'_>, poly: &SuperPolynomial) -> fmt::Result {
    write_form(f, &FormElement::from_polynomial(poly))
}

// ----------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v: i64 = text[start..i]
                    .parse()
                    .map_err(|_| ParseError {
                        pos: start,
                        msg: "integer too large".into(),
                    })?;
                toks.push((start, Tok::Int(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => return err(i, format!("unexpected character {other:?}")),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    sig: &'a Arc<ChartSignature>,
    field: FieldSpec,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let here = self.here();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            other => err(here, format!("expected {tok:?}, found {other:?}")),
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let here = self.here();
        match self.bump() {
            Some(Tok::Int(v)) => Ok(v),
            Some(Tok::Minus) => match self.bump() {
                Some(Tok::Int(v)) => Ok(-v),
                other => err(here, format!("expected integer, found {other:?}")),
            },
            other => err(here, format!("expected integer, found {other:?}")),
        }
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            self.signed_int()
        } else {
            Ok(1)
        }
    }

    fn coordinate_factor(&mut self, name: &str, pos: usize) -> Result<FormElement, ParseError> {
        let e = self.exponent()?;
        if let Some(i) = self.sig.even_index(name) {
            if e < 0 && !self.sig.inverted.contains(&i) {
                return err(pos, format!("negative power of non-inverted coordinate {name}"));
            }
            let p = SuperPolynomial::even_coordinate(self.sig.clone(), self.field, i)
                .pow(e as i32)
                .ok_or(ParseError {
                    pos,
                    msg: format!("cannot invert {name}"),
                })?;
            Ok(FormElement::from_polynomial(&p))
        } else if let Some(j) = self.sig.odd_index(name) {
            if e < 0 {
                return err(pos, format!("negative power of odd coordinate {name}"));
            }
            let t = FormElement::from_polynomial(&SuperPolynomial::odd_coordinate(
                self.sig.clone(),
                self.field,
                j,
            ));
            let mut acc = FormElement::from_polynomial(&SuperPolynomial::one(
                self.sig.clone(),
                self.field,
            ));
            for _ in 0..e {
                acc = acc.wedge(&t);
            }
            Ok(acc)
        } else {
            err(pos, format!("unknown coordinate {name}"))
        }
    }

    fn differential_factor(&mut self) -> Result<FormElement, ParseError> {
        self.expect(Tok::LParen)?;
        let here = self.here();
        let name = match self.bump() {
            Some(Tok::Ident(n)) => n,
            other => return err(here, format!("expected coordinate, found {other:?}")),
        };
        self.expect(Tok::RParen)?;
        let e = self.exponent()?;
        if e < 0 {
            return err(here, "negative power of a differential");
        }
        let gen = if let Some(i) = self.sig.even_index(&name) {
            FormElement::dx(self.sig.clone(), self.field, i)
        } else if let Some(j) = self.sig.odd_index(&name) {
            FormElement::dtheta(self.sig.clone(), self.field, j)
        } else {
            return err(here, format!("unknown coordinate {name}"));
        };
        let mut acc =
            FormElement::from_polynomial(&SuperPolynomial::one(self.sig.clone(), self.field));
        for _ in 0..e {
            acc = acc.wedge(&gen);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<FormElement, ParseError> {
        let here = self.here();
        match self.bump() {
            Some(Tok::Int(v)) => {
                let mut num = self.field.from_i64(v);
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let dpos = self.here();
                    let den = self.signed_int()?;
                    let d = self.field.from_i64(den);
                    if d.is_zero() {
                        return err(dpos, "zero denominator");
                    }
                    num = num.div(&d);
                }
                Ok(FormElement::from_polynomial(&SuperPolynomial::constant(
                    self.sig.clone(),
                    self.field,
                    num,
                )))
            }
            Some(Tok::Ident(name)) => {
                if name == "d" && self.peek() == Some(&Tok::LParen) {
                    self.differential_factor()
                } else {
                    self.coordinate_factor(&name, here)
                }
            }
            other => err(here, format!("expected factor, found {other:?}")),
        }
    }

    fn term(&mut self) -> Result<FormElement, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            let f = self.factor()?;
            acc = acc.wedge(&f);
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<FormElement, ParseError> {
        let mut negate = false;
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                None => return Ok(acc),
                Some(_) => return err(self.here(), "expected + or -"),
            }
        }
    }
}

pub fn parse_form(
    sig: &Arc<ChartSignature>,
    field: FieldSpec,
    text: &str,
) -> Result<FormElement, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        sig,
        field,
        end: text.len(),
    };
    p.expr()
}

pub fn parse_polynomial(
    sig: &Arc<ChartSignature>,
    field: FieldSpec,
    text: &str,
) -> Result<SuperPolynomial, ParseError> {
    let form = parse_form(sig, field, text)?;
    let mut out = SuperPolynomial::zero(sig.clone(), field);
    for (m, c) in &form.terms {
        if m.degree() != 0 {
            return err(0, "expected a polynomial, found differential factors");
        }
        out.add_term(m.func.clone(), c.clone());
    }
    Ok(out)
}

/// Canonical text of a scalar matching the parser's number syntax.
pub fn scalar_text(s: &Scalar) -> String {
    format!("{s}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn sig() -> Arc<ChartSignature> {
        ChartSignature::new(vec!["z", "y"], vec!["t1", "t2"]).localized([0])
    }

    #[test]
    fn parse_basic() {
        let s = sig();
        let f = parse_polynomial(&s, q(), "z^-1*t1*t2 + 3/2*y - 1").unwrap();
        assert_eq!(format!("{f}"), "z^-1*t1*t2 - 1 + 3/2*y");
        let g = parse_polynomial(&s, q(), &format!("{f}")).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn parse_forms() {
        let s = sig();
        let f = parse_form(&s, q(), "d(z)*d(t1)^2 - t1*d(t2)^2*d(y)").unwrap();
        assert_eq!(f.degree(), Some(3));
        let g = parse_form(&s, q(), &format!("{f}")).unwrap();
        assert_eq!(f, g);
        // degree-inhomogeneous forms are allowed in the algebra
        let h = parse_form(&s, q(), "d(z) + 1").unwrap();
        assert_eq!(h.degree(), None);
    }

    #[test]
    fn error_positions() {
        let s = sig();
        let e = parse_polynomial(&s, q(), "z + q").unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse_polynomial(&s, q(), "y^-1").unwrap_err();
        assert_eq!(e.pos, 0);
    }

    #[test]
    fn mod_p_round_trip() {
        let s = sig();
        let f = parse_polynomial(&s, FieldSpec::ModP(5), "4*z + 7*y").unwrap();
        assert_eq!(format!("{f}"), "2*y + 4*z");
        let g = parse_polynomial(&s, FieldSpec::ModP(5), &format!("{f}")).unwrap();
        assert_eq!(f, g);
    }

    prop_compose! {
        fn arb_poly_text()(terms in proptest::collection::vec(
            (-4i32..=4, 0u32..4u32, -5i64..=5, 1i64..=3), 1..5
        )) -> Vec<(i32, u32, i64, i64)> {
            terms
        }
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(terms in arb_poly_text()) {
            let s = sig();
            let mut f = SuperPolynomial::zero(s.clone(), q());
            for (ze, mask, num, den) in terms {
                let m = crate::ring::SuperMonomial {
                    even_exps: vec![ze, (ze.unsigned_abs() % 3) as i32],
                    odd_mask: mask & 3,
                };
                f.add_term(m, q().from_fraction(num, den));
            }
            let text = format!("{f}");
            let g = parse_polynomial(&s, q(), &text).unwrap();
            prop_assert_eq!(f, g);
        }
    }
}
