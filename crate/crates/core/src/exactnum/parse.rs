//! A small recursive-descent parser for rational-function strings such as
//! `"(t+1)/(t-1)"`, `"2*x^2 - 3/4*y"` or `"-1/2"`.
//!
//! Grammar: `expr := term (('+'|'-') term)*`, `term := unary (('*'|'/') unary)*`,
//! `unary := '-' unary | power`, `power := atom ('^' integer)?`,
//! `atom := integer | identifier | '(' expr ')'`. Juxtaposition such as `2x`
//! is accepted as multiplication.

use std::collections::BTreeSet;

use super::{ExactError, MultiPoly, Rational, RationalFunction, Ring, Vars};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, ExactError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(chars[st..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Tok::Ident(chars[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(ExactError::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

/// Identifiers occurring in `s`, sorted.
pub fn identifiers(s: &str) -> Result<Vec<String>, ExactError> {
    let set: BTreeSet<String> = tokenize(s)?
        .into_iter()
        .filter_map(|t| match t {
            Tok::Ident(n) => Some(n),
            _ => None,
        })
        .collect();
    Ok(set.into_iter().collect())
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a Vars,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ExactError {
        ExactError::Parse(format!("{msg} in {:?}", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<RationalFunction, ExactError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction, ExactError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().cloned() {
                Some(Tok::Op(c @ ('*' | '/'))) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = if c == '*' {
                        acc.mul(&rhs)
                    } else {
                        acc.div(&rhs).ok_or(ExactError::DivisionByZero)?
                    };
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, ExactError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction, ExactError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let neg = if let Some(Tok::Op('-')) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            let Some(Tok::Num(n)) = self.peek().cloned() else {
                return Err(self.err("expected integer exponent"));
            };
            self.pos += 1;
            let e: u32 = n.parse().map_err(|_| self.err("exponent too large"))?;
            let p = base.pow_u(e);
            return if neg {
                p.inv().ok_or(ExactError::DivisionByZero)
            } else {
                Ok(p)
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction, ExactError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let r: Rational = n.parse()?;
                Ok(RationalFunction::constant(self.vars.clone(), r))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or(ExactError::UnknownVariable(name))?;
                Ok(RationalFunction::var(self.vars.clone(), i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(self.err("missing ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.err("unexpected end of expression")),
        }
    }
}

/// Parses `s` as a rational function over `vars`.
pub fn parse_rational_function(s: &str, vars: &Vars) -> Result<RationalFunction, ExactError> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(ExactError::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        src: s,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Parses `s` as a polynomial over `vars`; rejects genuine fractions.
pub fn parse_poly(s: &str, vars: &Vars) -> Result<MultiPoly, ExactError> {
    let f = parse_rational_function(s, vars)?;
    let Some(d) = f.denom().constant_value() else {
        return Err(ExactError::Parse(format!("{s:?} is not a polynomial")));
    };
    Ok(f.numer().scale(&d.inv().unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::vars_of;

    #[test]
    fn parses_common_forms() {
        let v = vars_of(&["t", "s"]);
        let f = parse_rational_function("(t+1)/(t-1)", &v).unwrap();
        assert_eq!(f.to_string(), "(t + 1)/(t - 1)");
        let p = parse_poly("2t^2 - 3/4*s + 1", &v).unwrap();
        assert_eq!(p.to_string(), "2*t^2 - 3/4*s + 1");
        assert_eq!(parse_poly("-(t - s)^2", &v).unwrap().to_string(), "-t^2 + 2*t*s - s^2");
        assert!(parse_poly("1/t", &v).is_err());
        assert!(parse_rational_function("t +", &v).is_err());
        assert!(parse_rational_function("u", &v).is_err());
        assert_eq!(identifiers("x1*y + x1^2").unwrap(), vec!["x1", "y"]);
    }
}
