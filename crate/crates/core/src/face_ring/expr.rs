//! A small expression language for face-ring elements:
//! rationals (`3`, `-1/2`), atom variables `x1..xn` (1-based), poset
//! elements `e<id>`, parameters `t1..td`, with `+ - * ^` and parentheses.

use thiserror::Error;

use super::{FaceRing, FaceRingElement, Lsop};
use crate::algebra::{parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("unexpected '{found}' at offset {pos}")]
    Unexpected { pos: usize, found: char },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("bad number at offset {0}")]
    BadNumber(usize),
    #[error("no atom x{0}")]
    UnknownAtom(usize),
    #[error("no element e{0}")]
    UnknownElement(usize),
    #[error("no parameter t{0}")]
    UnknownTheta(usize),
    #[error("t-variables need a parameter system")]
    NoParameters,
}

struct Parser<'a, 'r> {
    text: &'a [u8],
    pos: usize,
    ring: &'r FaceRing<'r>,
    lsop: Option<&'r Lsop>,
}

pub fn parse_element(
    ring: &FaceRing<'_>,
    lsop: Option<&Lsop>,
    text: &str,
) -> Result<FaceRingElement, ExprError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        ring,
        lsop,
    };
    let out = p.expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(out),
        Some(c) => Err(ExprError::Unexpected {
            pos: p.pos,
            found: c as char,
        }),
    }
}

impl<'a, 'r> Parser<'a, 'r> {
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<FaceRingElement, ExprError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FaceRingElement, ExprError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                let rhs = self.unary()?;
                acc = self.ring.mul(&acc, &rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FaceRingElement, ExprError> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(inner.scale(&-Rational::from_integer(1.into())));
        }
        let base = self.primary()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k = u32::try_from(k).map_err(|_| ExprError::BadNumber(self.pos))?;
            return Ok(self.ring.pow(&base, k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<usize, ExprError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.peek() {
                None => Err(ExprError::UnexpectedEnd),
                Some(c) => Err(ExprError::Unexpected {
                    pos: self.pos,
                    found: c as char,
                }),
            };
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| ExprError::BadNumber(start))
    }

    fn primary(&mut self) -> Result<FaceRingElement, ExprError> {
        self.skip_ws();
        let poset = self.ring.poset();
        match self.peek() {
            None => Err(ExprError::UnexpectedEnd),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(c) => Err(ExprError::Unexpected {
                        pos: self.pos,
                        found: c as char,
                    }),
                    None => Err(ExprError::UnexpectedEnd),
                }
            }
            Some(b'x') => {
                self.pos += 1;
                let k = self.integer()?;
                if k == 0 || k > poset.num_atoms() {
                    return Err(ExprError::UnknownAtom(k));
                }
                Ok(self.ring.atom(k - 1))
            }
            Some(b'e') => {
                self.pos += 1;
                let k = self.integer()?;
                if k >= poset.len() {
                    return Err(ExprError::UnknownElement(k));
                }
                Ok(self.ring.element(k))
            }
            Some(b't') => {
                self.pos += 1;
                let k = self.integer()?;
                let lsop = self.lsop.ok_or(ExprError::NoParameters)?;
                if k == 0 || k > lsop.dim() {
                    return Err(ExprError::UnknownTheta(k));
                }
                Ok(lsop.theta(self.ring, k - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                self.integer()?;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.integer()?;
                }
                let text = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii");
                let q = parse_rational(text).ok_or(ExprError::BadNumber(start))?;
                Ok(FaceRingElement::constant(q))
            }
            Some(c) => Err(ExprError::Unexpected {
                pos: self.pos,
                found: c as char,
            }),
        }
    }
}
