//! Infix expression parser (Pratt style).
//!
//! Grammar: numbers (integers or decimals, read exactly), identifiers, calls
//! `name(args)`, `diff(expr, v1, v2, ...)`, unary minus, `+ - * / ^`. The
//! exponent of `^` must evaluate to an integer. A `diff` variable is either a
//! symbol (chain rule) or a 1-based argument slot of a single function
//! application.

use super::{Elementary, Expr, Genericity, Rational, Symbol, UNSUPPORTED_ELEMENTARY};
use num::{BigInt, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("at offset {offset}: found {found}, expected {}", expected.join(" or "))]
    Unexpected {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("at offset {offset}: unsupported elementary function `{name}`")]
    UnknownElementary { offset: usize, name: String },
    #[error("at offset {offset}: exponent must be an integer")]
    NonIntegerExponent { offset: usize },
    #[error("at offset {offset}: division by zero")]
    DivisionByZero { offset: usize },
    #[error("at offset {offset}: {reason}")]
    Invalid { offset: usize, reason: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Unexpected { offset, .. }
            | ParseError::UnknownElementary { offset, .. }
            | ParseError::NonIntegerExponent { offset }
            | ParseError::DivisionByZero { offset }
            | ParseError::Invalid { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(q) => format!("number `{q}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c.is_ascii_digit() || c == '.' {
            let mut end = i;
            let mut seen_dot = false;
            while let Some(&(j, d)) = it.peek() {
                if d.is_ascii_digit() || (d == '.' && !seen_dot) {
                    seen_dot |= d == '.';
                    end = j + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            let text = &src[i..end];
            let (int, frac) = text.split_once('.').unwrap_or((text, ""));
            if int.is_empty() && frac.is_empty() {
                return Err(ParseError::Unexpected {
                    offset: i,
                    found: "`.`".into(),
                    expected: vec!["number"],
                });
            }
            let digits: BigInt = format!("{int}{frac}").parse().unwrap_or_else(|_| BigInt::zero());
            let scale = num::pow(BigInt::from(10), frac.len());
            out.push((i, Tok::Num(Rational::new(digits, scale))));
        } else if c.is_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = it.peek() {
                if d.is_alphanumeric() || d == '_' {
                    end = j + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            out.push((i, Tok::Ident(src[i..end].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Op(c)));
            it.next();
        } else {
            return Err(ParseError::Unexpected {
                offset: i,
                found: format!("`{c}`"),
                expected: vec!["expression"],
            });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    generic: Genericity,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Unexpected {
            offset: self.offset(),
            found: self.peek().describe(),
            expected,
        }
    }

    fn expect(&mut self, c: char, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(vec![name]))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                Tok::Op(c @ ('+' | '-' | '*' | '/' | '^')) => *c,
                _ => break,
            };
            let (l, r) = match op {
                '+' | '-' => (1, 2),
                '*' | '/' => (3, 4),
                _ => (7, 6),
            };
            if l < min_bp {
                break;
            }
            self.bump();
            let at = self.offset();
            let rhs = self.expr(r)?;
            lhs = match op {
                '+' => lhs + rhs,
                '-' => lhs - rhs,
                '*' => lhs * rhs,
                '/' => {
                    if rhs.is_zero() {
                        return Err(ParseError::DivisionByZero { offset: at });
                    }
                    self.generic.assume_nonzero(&rhs);
                    lhs / rhs
                }
                _ => {
                    let n = rhs.as_integer().ok_or(ParseError::NonIntegerExponent { offset: at })?;
                    if n.unsigned_abs() > 10_000 {
                        return Err(ParseError::Invalid { offset: at, reason: "exponent too large".into() });
                    }
                    if n < 0 {
                        if lhs.is_zero() {
                            return Err(ParseError::DivisionByZero { offset: at });
                        }
                        self.generic.assume_nonzero(&lhs);
                    }
                    lhs.pow(n)
                }
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let (at, tok) = self.bump();
        match tok {
            Tok::Num(q) => Ok(Expr::rational(q)),
            Tok::Op('-') => Ok(-self.expr(5)?),
            Tok::Op('+') => self.expr(5),
            Tok::Op('(') => {
                let e = self.expr(0)?;
                self.expect(')', "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Op('(') {
                    self.bump();
                    self.call(at, name)
                } else {
                    Ok(Expr::symbol(&name))
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected(vec!["number", "identifier", "`(`", "`-`"]))
            }
        }
    }

    fn call(&mut self, at: usize, name: String) -> Result<Expr, ParseError> {
        if name == "diff" {
            return self.diff_call(at);
        }
        if UNSUPPORTED_ELEMENTARY.contains(&name.as_str()) {
            return Err(ParseError::UnknownElementary { offset: at, name });
        }
        let mut args = vec![self.expr(0)?];
        while *self.peek() == Tok::Op(',') {
            self.bump();
            args.push(self.expr(0)?);
        }
        self.expect(')', "`)` or `,`")?;
        if let Some(kind) = Elementary::from_name(&name) {
            if args.len() != 1 {
                return Err(ParseError::Invalid {
                    offset: at,
                    reason: format!("`{name}` takes one argument, got {}", args.len()),
                });
            }
            let arg = args.pop().unwrap();
            if kind == Elementary::Ln && arg.is_zero() {
                return Err(ParseError::Invalid { offset: at, reason: "ln(0) is undefined".into() });
            }
            return Ok(Expr::elementary(kind, arg));
        }
        Ok(Expr::apply(&name, args))
    }

    fn diff_call(&mut self, at: usize) -> Result<Expr, ParseError> {
        let mut e = self.expr(0)?;
        let mut nvars = 0;
        while *self.peek() == Tok::Op(',') {
            self.bump();
            let (vat, tok) = self.bump();
            match tok {
                Tok::Ident(v) => e = e.diff(&Symbol::new(&v)),
                Tok::Num(q) => {
                    let slot = Expr::rational(q).as_integer().filter(|&k| k >= 1);
                    let Some(k) = slot else {
                        return Err(ParseError::Invalid { offset: vat, reason: "slot index must be a positive integer".into() });
                    };
                    e = e.diff_slot(k as usize - 1).ok_or_else(|| ParseError::Invalid {
                        offset: vat,
                        reason: format!("slot {k} needs a single function application with at least {k} arguments"),
                    })?;
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected(vec!["identifier", "slot number"]));
                }
            }
            nvars += 1;
        }
        self.expect(')', "`)` or `,`")?;
        if nvars == 0 {
            return Err(ParseError::Invalid { offset: at, reason: "diff needs at least one variable".into() });
        }
        Ok(e)
    }
}

/// Parse an expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse_with_genericity(src).map(|(e, _)| e)
}

/// Parse an expression, also returning the divisors assumed nonzero.
pub fn parse_with_genericity(src: &str) -> Result<(Expr, Genericity), ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, generic: Genericity::new() };
    let e = p.expr(0)?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(vec!["operator", "end of input"]));
    }
    Ok((e, p.generic))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(parse("-x^2").unwrap(), -parse("x^2").unwrap());
        assert_eq!(parse("2^3^2").unwrap(), Expr::integer(512));
        assert_eq!(parse("1 - 2 - 3").unwrap(), Expr::integer(-4));
        assert_eq!(parse("8/2/2").unwrap(), Expr::integer(2));
        assert_eq!(parse("0.25").unwrap(), Expr::ratio(1, 4));
    }

    #[test]
    fn errors_carry_offsets() {
        let err = parse("x + * y").unwrap_err();
        assert_eq!(err.offset(), 4);
        assert!(matches!(parse("sqrt(x)"), Err(ParseError::UnknownElementary { .. })));
        assert!(matches!(parse("x^y"), Err(ParseError::NonIntegerExponent { .. })));
        assert!(matches!(parse("x/0"), Err(ParseError::DivisionByZero { .. })));
        assert!(parse("(x").is_err());
        assert!(parse("x y").is_err());
        assert!(parse("diff(x)").is_err());
        assert!(parse("diff(x, 1)").is_err());
    }

    #[test]
    fn undefined_functions() {
        let e = parse("F(x, y) + diff(F(x, y), 2)").unwrap();
        assert_eq!(e.function_names().len(), 1);
        assert!(matches!(parse("sin(x, y)"), Err(ParseError::Invalid { .. })));
    }
}
