//! Prefix term syntax: `m(x, inv(y))`, constants as bare names or `e()`.
//! Identifiers that are not operations are variables.

use super::{RewriteError, Signature, Term};

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn err(&self, msg: impl Into<String>) -> RewriteError {
        RewriteError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn expect(&mut self, c: char) -> Result<(), RewriteError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<&'a str, RewriteError> {
        self.skip_ws();
        let start = self.pos;
        for (i, c) in self.src[start..].char_indices() {
            let ok = if i == 0 { c.is_alphabetic() || c == '_' || c == '*' } else { c.is_alphanumeric() || c == '_' || c == '\'' };
            if !ok {
                break;
            }
            self.pos = start + i + c.len_utf8();
        }
        if self.pos == start {
            return Err(self.err("expected an identifier"));
        }
        Ok(&self.src[start..self.pos])
    }
}

/// Parses a term; unknown identifiers become variables, numbered by their
/// position in `names` (new ones are appended).
pub fn parse_term(sig: &Signature, src: &str, names: &mut Vec<String>) -> Result<Term, RewriteError> {
    let mut lx = Lexer { src, pos: 0 };
    let t = term(sig, &mut lx, names)?;
    if lx.peek().is_some() {
        return Err(lx.err("trailing input"));
    }
    Ok(t)
}

fn term(sig: &Signature, lx: &mut Lexer, names: &mut Vec<String>) -> Result<Term, RewriteError> {
    let name = lx.ident()?;
    let Some(op) = sig.op_id(name) else {
        if lx.peek() == Some('(') {
            return Err(RewriteError::UnknownOp(name.into()));
        }
        let v = match names.iter().position(|n| n == name) {
            Some(v) => v,
            None => {
                names.push(name.into());
                names.len() - 1
            }
        };
        return Ok(Term::Var(v));
    };
    let mut args = Vec::new();
    if lx.peek() == Some('(') {
        lx.expect('(')?;
        if lx.peek() != Some(')') {
            loop {
                args.push(term(sig, lx, names)?);
                if lx.peek() == Some(',') {
                    lx.expect(',')?;
                } else {
                    break;
                }
            }
        }
        lx.expect(')')?;
    }
    let arity = sig.op(op).args.len();
    let ok = if sig.is_ac(op) { args.len() >= 2 } else { args.len() == arity };
    if !ok {
        return Err(RewriteError::Arity { op: name.into(), expected: arity, found: args.len() });
    }
    Ok(sig.app(op, args))
}
