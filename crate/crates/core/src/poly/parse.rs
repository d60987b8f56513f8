//! Recursive-descent parser for polynomial text.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := coeff ['*' factor ('*' factor)*] | factor ('*' factor)*
//! coeff  := integer ['/' integer] | '(' field-element ')'
//! factor := 'x' index ['^' exponent]
//! ```
//!
//! Whitespace is ignored, integers are reduced into the field, and a
//! parenthesised coefficient uses the field's element syntax (`(2*a+1)` in
//! an extension field).

use num_bigint::BigInt;

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
    field: &'a Field,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::SyntaxError {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn small_integer(&mut self, what: &str) -> Result<usize> {
        let start = self.pos;
        let n = self.integer()?;
        usize::try_from(n).or_else(|_| {
            self.pos = start;
            self.err(format!("{what} too large"))
        })
    }

    fn coefficient(&mut self) -> Result<FieldElement> {
        if self.eat(b'(') {
            let start = self.pos;
            let mut depth = 1;
            while self.pos < self.src.len() {
                match self.src[self.pos] {
                    b'(' => depth += 1,
                    b')' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                self.pos += 1;
            }
            if self.pos >= self.src.len() {
                return self.err("unclosed parenthesis");
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii input");
            let value = self.field.parse_element(text).map_err(|_| Error::SyntaxError {
                pos: start,
                msg: format!("invalid field element `{text}`"),
            })?;
            self.pos += 1;
            return Ok(value);
        }
        let num = self.integer()?;
        if self.eat(b'/') {
            let den_pos = self.pos;
            let den = self.integer()?;
            return self.field.from_ratio(&num, &den).map_err(|_| Error::SyntaxError {
                pos: den_pos,
                msg: "denominator is zero in this field".to_string(),
            });
        }
        Ok(self.field.from_bigint(&num))
    }

    fn factor(&mut self, exps: &mut [u16]) -> Result<()> {
        if !self.eat(b'x') {
            return self.err("expected variable `x<index>`");
        }
        let idx_pos = self.pos;
        let index = self.small_integer("variable index")?;
        if index >= self.nvars {
            self.pos = idx_pos;
            return Err(Error::VariableOutOfRange {
                index,
                nvars: self.nvars,
            });
        }
        let e = if self.eat(b'^') {
            let e = self.small_integer("exponent")?;
            u16::try_from(e).or_else(|_| self.err("exponent too large"))?
        } else {
            1
        };
        exps[index] = exps[index]
            .checked_add(e)
            .ok_or_else(|| Error::SyntaxError {
                pos: self.pos,
                msg: "exponent too large".into(),
            })?;
        Ok(())
    }

    fn term(&mut self) -> Result<(Monomial, FieldElement)> {
        let mut exps = vec![0u16; self.nvars];
        let coef = match self.peek() {
            Some(b'x') => {
                self.factor(&mut exps)?;
                self.field.one()
            }
            Some(c) if c.is_ascii_digit() || c == b'(' => {
                let c = self.coefficient()?;
                if !self.eat(b'*') {
                    return Ok((Monomial::new(&exps), c));
                }
                self.factor(&mut exps)?;
                c
            }
            Some(_) => return self.err("expected coefficient or variable"),
            None => return self.err("unexpected end of input"),
        };
        while self.eat(b'*') {
            self.factor(&mut exps)?;
        }
        Ok((Monomial::new(&exps), coef))
    }

    fn expr(&mut self) -> Result<Vec<(Monomial, FieldElement)>> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.eat(b'-') {
            negative = true;
        } else {
            self.eat(b'+');
        }
        loop {
            let (m, c) = self.term()?;
            let c = if negative { self.field.neg(&c) } else { c };
            terms.push((m, c));
            negative = match self.peek() {
                Some(b'+') => false,
                Some(b'-') => true,
                None => break,
                Some(_) => return self.err("expected `+`, `-` or end of input"),
            };
            self.pos += 1;
        }
        Ok(terms)
    }
}

/// Parse polynomial text in `nvars` variables over `field`. The result must
/// be homogeneous.
pub fn parse(text: &str, nvars: usize, field: &Field) -> Result<Polynomial> {
    if !text.is_ascii() {
        let pos = text.char_indices().find(|(_, c)| !c.is_ascii()).map_or(0, |(i, _)| i);
        return Err(Error::SyntaxError {
            pos,
            msg: "non-ASCII character".into(),
        });
    }
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        nvars,
        field,
    };
    let terms = parser.expr()?;
    Polynomial::from_terms(field, nvars, 0, terms)
}

/// Largest variable index mentioned in the text plus one (at least 1).
pub fn infer_nvars(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'x' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_whitespace() {
                j += 1;
            }
            let start = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if let Ok(n) = text[start..j].parse::<usize>() {
                best = best.max(n + 1);
            }
            i = j;
        } else {
            i += 1;
        }
    }
    best.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let f7: Field = "p:7".parse().unwrap();
        let fermat = parse("x0^3+x1^3+x2^3", 3, &f7).unwrap();
        assert_eq!(fermat.num_terms(), 3);
        assert_eq!(fermat.degree(), 3);
        assert!(matches!(
            parse("x0^2+x1^3", 2, &f7),
            Err(Error::NotHomogeneous { first_degree: 2, second_degree: 3, .. })
        ));
        let g = parse("x2^3 - x0^3 - x1^3", 3, &f7).unwrap();
        assert_eq!(g.coefficient(&Monomial::new(&[0, 0, 3])), f7.element(1));
        assert_eq!(g.coefficient(&Monomial::new(&[3, 0, 0])), f7.element(6));
        assert_eq!(g.coefficient(&Monomial::new(&[0, 3, 0])), f7.element(6));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let f7: Field = "p:7".parse().unwrap();
        assert_eq!(
            parse("x0^2 + y1", 2, &f7),
            Err(Error::SyntaxError {
                pos: 7,
                msg: "expected coefficient or variable".into()
            })
        );
        assert!(matches!(
            parse("x0*x3", 3, &f7),
            Err(Error::VariableOutOfRange { index: 3, nvars: 3 })
        ));
        assert!(matches!(parse("x0 +", 1, &f7), Err(Error::SyntaxError { pos: 4, .. })));
        assert!(matches!(parse("1/7*x0", 1, &f7), Err(Error::SyntaxError { .. })));
    }

    #[test]
    fn text_round_trip_over_various_fields() {
        for (spec, text) in [
            ("p:13", "x0^3+12*x0*x1*x2+x2^3"),
            ("Q", "x0^2-1/2*x1^2+3*x0*x2"),
            ("ext:3^2", "(a+1)*x0^2+2*x1*x0+(a)*x1^2"),
            ("p:5", "0"),
        ] {
            let field: Field = spec.parse().unwrap();
            let poly = parse(text, 3, &field).unwrap();
            let again = parse(&poly.to_text(), 3, &field).unwrap();
            assert_eq!(poly, again, "{spec}: {}", poly.to_text());
        }
    }

    #[test]
    fn leading_sign_and_implicit_products() {
        let q = Field::rationals();
        let a = parse("-x0*x0 + 2*x1^2", 2, &q).unwrap();
        assert_eq!(a.to_text(), "-x0^2+2*x1^2");
        assert_eq!(infer_nvars("x0^3 + x12*x1^2"), 13);
    }
}
