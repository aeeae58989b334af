//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := 'x' | 'y' | 't' | uint | '(' expr ')'
//! ```
//!
//! Whitespace between tokens is ignored. Integer literals are reduced mod `p`.

use super::{BivarPoly, PolyError};
use crate::ff::{Field, FieldElement};

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u64 = 4096;

pub fn parse_poly(expr: &str, field: &Field) -> Result<BivarPoly, PolyError> {
    let mut parser = Parser {
        src: expr.as_bytes(),
        pos: 0,
        field,
    };
    let poly = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected character"));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a Field,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, message: &str) -> PolyError {
        let message = match self.src.get(self.pos) {
            Some(&c) => format!("{message} '{}'", c as char),
            None => format!("{message}: end of input"),
        };
        PolyError::Syntax {
            position: self.pos,
            message,
        }
    }

    fn expr(&mut self) -> Result<BivarPoly, PolyError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' {
                acc.add(self.field, &rhs)
            } else {
                acc.sub(self.field, &rhs)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BivarPoly, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = acc.mul(self.field, &rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<BivarPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let e = self.exponent()?;
            if e > MAX_EXPONENT {
                return Err(PolyError::ExponentTooLarge {
                    position: start,
                    max: MAX_EXPONENT,
                });
            }
            return Ok(base.pow(self.field, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BivarPoly, PolyError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(BivarPoly::x())
            }
            Some(b'y') => {
                self.pos += 1;
                Ok(BivarPoly::y())
            }
            Some(b't') => {
                let position = self.pos;
                self.pos += 1;
                let t = self
                    .field
                    .generator()
                    .ok_or(PolyError::GeneratorInPrimeField { position })?;
                Ok(BivarPoly::constant(t))
            }
            Some(b'0'..=b'9') => {
                let c = self.literal();
                Ok(BivarPoly::constant(c))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')' but found"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("expected x, y, t, integer or '(' but found")),
        }
    }

    /// Integer literal reduced mod `p`, digit by digit.
    fn literal(&mut self) -> FieldElement {
        let p = self.field.p() as u64;
        let mut acc = 0u64;
        while let Some(&c @ b'0'..=b'9') = self.src.get(self.pos) {
            acc = (acc * 10 + (c - b'0') as u64) % p;
            self.pos += 1;
        }
        self.field.from_int(acc as i64)
    }

    fn exponent(&mut self) -> Result<u64, PolyError> {
        let start = self.pos;
        let mut acc = 0u64;
        while let Some(&c @ b'0'..=b'9') = self.src.get(self.pos) {
            acc = acc.saturating_mul(10).saturating_add((c - b'0') as u64);
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected exponent but found"));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key(f: &BivarPoly) -> Vec<((u32, u32), u32)> {
        f.terms().iter().map(|(&k, c)| (k, c.index())).collect()
    }

    #[test]
    fn examples() {
        let f5 = Field::prime(5).unwrap();
        let p = parse_poly("x*y+1", &f5).unwrap();
        assert_eq!(key(&p), vec![((0, 0), 1), ((1, 1), 1)]);
        let f7 = Field::prime(7).unwrap();
        let p = parse_poly("(x-y)^2", &f7).unwrap();
        assert_eq!(key(&p), vec![((0, 2), 1), ((1, 1), 5), ((2, 0), 1)]);
        match parse_poly("x^", &f7) {
            Err(PolyError::Syntax { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generator_needs_extension() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(
            parse_poly("x + t", &f7),
            Err(PolyError::GeneratorInPrimeField { position: 4 })
        );
        let f9 = Field::new(3, 2).unwrap();
        let p = parse_poly("t^2 + 1", &f9).unwrap();
        assert!(p.is_zero(), "t^2 = -1 under modulus x^2+1");
    }

    #[test]
    fn rejects_garbage() {
        let f = Field::prime(11).unwrap();
        for (src, pos) in [("", 0), ("x+", 2), ("(x", 2), ("x y", 2), ("-x", 0), ("x**y", 2), ("z", 0)] {
            match parse_poly(src, &f) {
                Err(PolyError::Syntax { position, .. }) => assert_eq!(position, pos, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_poly("x^99999", &f),
            Err(PolyError::ExponentTooLarge { position: 2, .. })
        ));
    }

    #[test]
    fn literals_reduce() {
        let f = Field::prime(7).unwrap();
        assert_eq!(parse_poly("100000000000000000000007", &f).unwrap(), parse_poly("5", &f).unwrap());
        assert!(parse_poly("7*x", &f).unwrap().is_zero());
    }

    fn expr_strategy() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("x".to_string()),
            Just("y".to_string()),
            Just("t".to_string()),
            (0u32..30).prop_map(|n| n.to_string()),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}+{b}")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}-{b}")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
                (inner.clone(), 0u32..4).prop_map(|(a, e)| format!("({a})^{e}")),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_reparses(src in expr_strategy()) {
            let field = Field::new(5, 2).unwrap();
            let p = parse_poly(&src, &field).unwrap();
            let again = parse_poly(&p.render(&field), &field).unwrap();
            prop_assert_eq!(again, p);
        }
    }
}
