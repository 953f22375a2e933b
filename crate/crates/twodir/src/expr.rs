//! Constant-expression grammar for mask files.
//!
//! Entries like `(2-sqrt(7))/(4*sqrt(2))` carry surd-exact coefficients into
//! the files without hand-rounded decimals. Grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | primary
//! primary := number | '(' expr ')' | 'sqrt' '(' expr ')'
//! ```
//!
//! `*` and `/` are left-associative and bind tighter than `+` and `-`;
//! unary minus binds tighter than the binary operators.

use std::fmt;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    TrailingInput,
    BadNumber,
    SqrtOfNegative,
    DivisionByZero,
    ExpectedIdent(String),
}

/// Parse/evaluation failure with the byte position it occurred at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    pub kind: ExprErrorKind,
    pub position: usize,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character '{c}' at position {}", self.position)
            }
            ExprErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of expression at position {}", self.position)
            }
            ExprErrorKind::TrailingInput => {
                write!(f, "trailing input at position {}", self.position)
            }
            ExprErrorKind::BadNumber => {
                write!(f, "malformed number at position {}", self.position)
            }
            ExprErrorKind::SqrtOfNegative => {
                write!(f, "sqrt of negative at position {}", self.position)
            }
            ExprErrorKind::DivisionByZero => {
                write!(f, "division by zero at position {}", self.position)
            }
            ExprErrorKind::ExpectedIdent(name) => {
                write!(f, "unknown identifier '{name}' at position {}", self.position)
            }
        }
    }
}

impl std::error::Error for ExprError {}

/// Evaluate a constant expression. Deterministic; rejects `sqrt` of a
/// negative argument and division by zero.
pub fn eval<T: Scalar>(text: &str) -> Result<T, ExprError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.error(ExprErrorKind::TrailingInput));
    }
    Ok(value)
}

/// `f64` evaluation, the form the mask files use.
pub fn parse_const_expr(text: &str) -> Result<f64, ExprError> {
    eval(text)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, kind: ExprErrorKind) -> ExprError {
        ExprError {
            kind,
            position: self.pos,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr<T: Scalar>(&mut self) -> Result<T, ExprError> {
        let mut acc = self.term()?;
        while let Some(op) = self.peek() {
            match op {
                b'+' => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term<T: Scalar>(&mut self) -> Result<T, ExprError> {
        let mut acc = self.factor()?;
        while let Some(op) = self.peek() {
            match op {
                b'*' => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let denom = self.factor()?;
                    if denom == T::zero() {
                        return Err(ExprError {
                            kind: ExprErrorKind::DivisionByZero,
                            position: at,
                        });
                    }
                    acc = acc / denom;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor<T: Scalar>(&mut self) -> Result<T, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor::<T>()?)
            }
            _ => self.primary(),
        }
    }

    fn primary<T: Scalar>(&mut self) -> Result<T, ExprError> {
        match self.peek() {
            None => Err(self.error(ExprErrorKind::UnexpectedEnd)),
            Some(b'(') => {
                self.pos += 1;
                let value = self.expr()?;
                self.expect(b')')?;
                Ok(value)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident();
                if name != "sqrt" {
                    return Err(ExprError {
                        kind: ExprErrorKind::ExpectedIdent(name),
                        position: start,
                    });
                }
                self.expect(b'(')?;
                let arg_pos = self.pos;
                let arg = self.expr::<T>()?;
                self.expect(b')')?;
                if arg < T::zero() {
                    return Err(ExprError {
                        kind: ExprErrorKind::SqrtOfNegative,
                        position: arg_pos,
                    });
                }
                Ok(arg.sqrt())
            }
            Some(c) => Err(self.error(ExprErrorKind::UnexpectedChar(c as char))),
        }
    }

    fn expect(&mut self, want: u8) -> Result<(), ExprError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(ExprErrorKind::UnexpectedChar(c as char))),
            None => Err(self.error(ExprErrorKind::UnexpectedEnd)),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn number<T: Scalar>(&mut self) -> Result<T, ExprError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        // optional exponent
        if matches!(self.bytes.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = mark; // 'e' belonged to something else; back out
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        let value: f64 = text.parse().map_err(|_| ExprError {
            kind: ExprErrorKind::BadNumber,
            position: start,
        })?;
        T::from_f64(value).ok_or(ExprError {
            kind: ExprErrorKind::BadNumber,
            position: start,
        })
    }
}
