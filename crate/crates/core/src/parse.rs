//! Surface syntax.
//!
//! ```text
//! term     := sum
//! sum      := product ('+' product)*
//! product  := atom ('*' atom)*
//! atom     := '0' | ident | 'S' '(' term ')' | '(' term ')' | '#' digits
//! equation := term '=' term
//! formula  := conj ('|' conj)*
//! conj     := prim ('&' prim)*
//! prim     := '(' formula ')' | term '=' term        -- right side must be ground
//! ```
//!
//! `+` and `*` associate to the left and `*` binds tighter. The canonical
//! renderer emits fully parenthesized terms, which this grammar accepts.

use num_bigint::BigUint;

use crate::decide::formula::PositiveFormula;
use crate::models::standard_eval;
use crate::term::{bnum, Equation, Term, VarTable};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("{message} at position {pos}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

pub(crate) struct Cursor<'s, 't> {
    src: &'s [u8],
    pub(crate) pos: usize,
    pub(crate) vars: &'t mut VarTable,
}

impl<'s, 't> Cursor<'s, 't> {
    pub(crate) fn new(text: &'s str, vars: &'t mut VarTable) -> Self {
        Cursor { src: text.as_bytes(), pos: 0, vars }
    }

    pub(crate) fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, message: message.into() })
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    pub(crate) fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(format!("expected '{}'", c as char))
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(crate) fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    pub(crate) fn digits(&mut self) -> Result<BigUint, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("nonempty digit string"))
    }

    pub(crate) fn ident(&mut self) -> Option<&'s str> {
        self.skip_ws();
        let start = self.pos;
        let is_start = |c: u8| c.is_ascii_alphabetic() || c == b'_';
        let is_cont = |c: u8| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'';
        if self.pos < self.src.len() && is_start(self.src[self.pos]) {
            self.pos += 1;
            while self.pos < self.src.len() && is_cont(self.src[self.pos]) {
                self.pos += 1;
            }
            Some(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier"))
        } else {
            None
        }
    }

    pub(crate) fn variable(&mut self, name: &str, at: usize) -> Result<u32, ParseError> {
        match self.vars.intern(name) {
            Some(id) => Ok(id),
            None => Err(ParseError { pos: at, message: format!("too many variables (at '{name}')") }),
        }
    }

    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.product()?;
        while self.eat(b'+') {
            let rhs = self.product()?;
            acc = Term::add(acc, rhs);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom()?;
        while self.eat(b'*') {
            let rhs = self.atom()?;
            acc = Term::mul(acc, rhs);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(b')')?;
                Ok(t)
            }
            Some(b'#') => {
                self.pos += 1;
                Ok(bnum(self.digits()?))
            }
            Some(b'0') => {
                let at = self.pos;
                let n = self.digits()?;
                if n != BigUint::from(0u32) {
                    return Err(ParseError { pos: at, message: "numerals other than 0 need '#'".into() });
                }
                Ok(Term::zero())
            }
            Some(_) => {
                let at = self.pos;
                let Some(name) = self.ident() else {
                    return self.error("expected a term");
                };
                if name == "S" {
                    self.expect(b'(')?;
                    let t = self.term()?;
                    self.expect(b')')?;
                    return Ok(Term::succ(t));
                }
                Ok(Term::var(self.variable(name, at)?))
            }
            None => self.error("unexpected end of input"),
        }
    }

    fn formula(&mut self) -> Result<PositiveFormula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.eat(b'|') {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { PositiveFormula::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<PositiveFormula, ParseError> {
        let mut parts = vec![self.primary()?];
        while self.eat(b'&') {
            parts.push(self.primary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { PositiveFormula::And(parts) })
    }

    fn primary(&mut self) -> Result<PositiveFormula, ParseError> {
        if self.peek() == Some(b'(') {
            // Either a parenthesized formula or an atom whose left side starts
            // with a parenthesis; try the former and fall back.
            let save = self.pos;
            let names = self.vars.clone();
            self.pos += 1;
            if let Ok(f) = self.formula() {
                if self.eat(b')') {
                    return Ok(f);
                }
            }
            self.pos = save;
            *self.vars = names;
        }
        self.atom_formula()
    }

    fn atom_formula(&mut self) -> Result<PositiveFormula, ParseError> {
        let lhs = self.term()?;
        self.expect(b'=')?;
        let at = self.pos;
        let rhs = self.term()?;
        if !rhs.is_ground() {
            return Err(ParseError { pos: at, message: "right side of an atom must be a numeral".into() });
        }
        let value = standard_eval(&rhs, &Default::default()).expect("ground term evaluates");
        Ok(PositiveFormula::Atom(lhs, value))
    }
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_term_with(text, &mut VarTable::new())
}

/// Parses a term, resolving variable names through (and extending) `vars`.
pub fn parse_term_with(text: &str, vars: &mut VarTable) -> Result<Term, ParseError> {
    let mut c = Cursor::new(text, vars);
    let t = c.term()?;
    c.finish()?;
    Ok(t)
}

pub fn parse_equation(text: &str) -> Result<(Equation, VarTable), ParseError> {
    let mut vars = VarTable::new();
    let eq = parse_equation_with(text, &mut vars)?;
    Ok((eq, vars))
}

pub fn parse_equation_with(text: &str, vars: &mut VarTable) -> Result<Equation, ParseError> {
    let mut c = Cursor::new(text, vars);
    let lhs = c.term()?;
    c.expect(b'=')?;
    let rhs = c.term()?;
    c.finish()?;
    Ok(Equation::new(lhs, rhs))
}

pub fn parse_formula(text: &str) -> Result<(PositiveFormula, VarTable), ParseError> {
    let mut vars = VarTable::new();
    let f = parse_formula_with(text, &mut vars)?;
    Ok((f, vars))
}

pub fn parse_formula_with(text: &str, vars: &mut VarTable) -> Result<PositiveFormula, ParseError> {
    let mut c = Cursor::new(text, vars);
    let f = c.formula()?;
    c.finish()?;
    Ok(f)
}
