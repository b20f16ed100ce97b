//! Recursive-descent parser for types and terms.
//!
//! Binder forms (`\`, `let`, `pm`, `case0`) and the body of `to` extend as far right as
//! possible. Application is left-associative and takes atomic values as arguments.

use super::ast::{AnyType, Comp, CompType, Term, Value, ValueType};
use super::lexer::{is_keyword, tokenize, Spanned, Tok};
use super::signature::Signature;
use super::ParseError;

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
    sig: &'a Signature,
    bound: Vec<String>,
}

fn eof_position(text: &str) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature) -> Result<Self, ParseError> {
        Ok(Parser { toks: tokenize(text)?, pos: 0, eof: eof_position(text), sig, bound: Vec::new() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.eof, |s| (s.line, s.col))
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (l, c) = self.here();
        Err(ParseError::grammar(l, c, message))
    }

    fn found(&self) -> String {
        self.peek().map_or_else(|| "end of input".to_string(), Tok::describe)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", tok.describe(), self.found()))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", self.found()))
        }
    }

    fn binder(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !is_keyword(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected a variable name, found {}", self.found())),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            self.err(format!("unexpected {} after end of term", self.found()))
        } else {
            Ok(())
        }
    }

    fn with_bound<T>(
        &mut self,
        names: &[&String],
        f: impl FnOnce(&mut Self) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let depth = self.bound.len();
        self.bound.extend(names.iter().map(|n| (*n).clone()));
        let r = f(self);
        self.bound.truncate(depth);
        r
    }

    // ---- types ----

    fn vtype(&mut self) -> Result<ValueType, ParseError> {
        let left = self.vprod()?;
        if self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            Ok(ValueType::sum(left, self.vtype()?))
        } else {
            Ok(left)
        }
    }

    fn vprod(&mut self) -> Result<ValueType, ParseError> {
        let left = self.vatom_type()?;
        if self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            Ok(ValueType::prod(left, self.vprod()?))
        } else {
            Ok(left)
        }
    }

    fn vatom_type(&mut self) -> Result<ValueType, ParseError> {
        let (l, c) = self.here();
        match self.peek().cloned() {
            Some(Tok::Digit(1)) => {
                self.pos += 1;
                Ok(ValueType::Unit)
            }
            Some(Tok::Digit(_)) => {
                self.pos += 1;
                Ok(ValueType::Empty)
            }
            Some(Tok::Ident(s)) if s == "U" => {
                self.pos += 1;
                Ok(ValueType::thunk(self.catom_type()?))
            }
            Some(Tok::Ident(s)) if !is_keyword(&s) => {
                self.pos += 1;
                if self.sig.is_value_base(&s) {
                    Ok(ValueType::Base(s))
                } else if self.sig.is_comp_base(&s) {
                    Err(ParseError::grammar(l, c, format!("`{s}` is a computation base type, expected a value type")))
                } else {
                    Err(ParseError::unknown(l, c, &s))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.vtype()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.err(format!("expected a value type, found {}", self.found())),
        }
    }

    fn ctype(&mut self) -> Result<CompType, ParseError> {
        let save = self.pos;
        if let Ok(a) = self.vtype() {
            if self.peek() == Some(&Tok::Arrow) {
                self.pos += 1;
                return Ok(CompType::arrow(a, self.ctype()?));
            }
        }
        self.pos = save;
        self.cwith()
    }

    fn cwith(&mut self) -> Result<CompType, ParseError> {
        let left = self.catom_type()?;
        if self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            Ok(CompType::with(left, self.cwith()?))
        } else {
            Ok(left)
        }
    }

    fn catom_type(&mut self) -> Result<CompType, ParseError> {
        let (l, c) = self.here();
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "F" => {
                self.pos += 1;
                Ok(CompType::free(self.vatom_type()?))
            }
            Some(Tok::Ident(s)) if s == "Top" => {
                self.pos += 1;
                Ok(CompType::Top)
            }
            Some(Tok::Ident(s)) if !is_keyword(&s) => {
                self.pos += 1;
                if self.sig.is_comp_base(&s) {
                    Ok(CompType::Base(s))
                } else if self.sig.is_value_base(&s) {
                    Err(ParseError::grammar(l, c, format!("`{s}` is a value base type, expected a computation type")))
                } else {
                    Err(ParseError::unknown(l, c, &s))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.ctype()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.err(format!("expected a computation type, found {}", self.found())),
        }
    }

    // ---- values ----

    fn value(&mut self) -> Result<Value, ParseError> {
        if self.is_kw("inl") {
            self.pos += 1;
            return Ok(Value::inl(self.value()?));
        }
        if self.is_kw("inr") {
            self.pos += 1;
            return Ok(Value::inr(self.value()?));
        }
        if self.is_kw("thunk") {
            self.pos += 1;
            return Ok(Value::thunk(self.catom()?));
        }
        self.vatom()
    }

    fn starts_vatom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => !is_keyword(s),
            Some(Tok::LParen) => true,
            _ => false,
        }
    }

    fn vatom(&mut self) -> Result<Value, ParseError> {
        let (l, c) = self.here();
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if !is_keyword(&s) => {
                self.pos += 1;
                if self.bound.contains(&s) {
                    Ok(Value::Var(s))
                } else {
                    match self.sig.constant(&s) {
                        Some(AnyType::Value(_)) => Ok(Value::Const(s)),
                        Some(AnyType::Comp(_)) => Err(ParseError::grammar(
                            l,
                            c,
                            format!("`{s}` is a computation constant; write `thunk {s}` for its value"),
                        )),
                        None if self.sig.op(&s).is_some() => {
                            Err(ParseError::grammar(l, c, format!("operation `{s}` used as a value")))
                        }
                        None => Err(ParseError::unknown(l, c, &s)),
                    }
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::RParen) {
                    self.pos += 1;
                    return Ok(Value::Unit);
                }
                let v = self.value()?;
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    let w = self.value()?;
                    self.expect(Tok::RParen)?;
                    Ok(Value::pair(v, w))
                } else {
                    self.expect(Tok::RParen)?;
                    Ok(v)
                }
            }
            _ => self.err(format!("expected a value, found {}", self.found())),
        }
    }

    // ---- computations ----

    fn comp(&mut self) -> Result<Comp, ParseError> {
        match self.peek() {
            Some(Tok::Lambda) => {
                self.pos += 1;
                let x = self.binder()?;
                let ty = if self.peek() == Some(&Tok::Colon) {
                    self.pos += 1;
                    Some(self.vtype()?)
                } else {
                    None
                };
                self.expect(Tok::Dot)?;
                let body = self.with_bound(&[&x], |p| p.comp())?;
                Ok(Comp::lambda(x, ty, body))
            }
            Some(Tok::Ident(s)) if s == "let" => {
                self.pos += 1;
                let x = self.binder()?;
                self.expect(Tok::Equals)?;
                let v = self.value()?;
                self.expect_kw("in")?;
                let body = self.with_bound(&[&x], |p| p.comp())?;
                Ok(Comp::LetVal(x, Box::new(v), Box::new(body)))
            }
            Some(Tok::Ident(s)) if s == "pm" => {
                self.pos += 1;
                let v = self.value()?;
                self.expect_kw("as")?;
                self.expect(Tok::LParen)?;
                let x = self.binder()?;
                self.expect(Tok::Comma)?;
                let y = self.binder()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                let body = self.with_bound(&[&x, &y], |p| p.comp())?;
                Ok(Comp::PmPair(Box::new(v), x, y, Box::new(body)))
            }
            Some(Tok::Ident(s)) if s == "case0" => {
                self.pos += 1;
                let v = self.value()?;
                self.expect(Tok::Colon)?;
                let b = self.ctype()?;
                Ok(Comp::CaseEmpty(Box::new(v), b))
            }
            _ => {
                let m = self.app()?;
                if self.is_kw("to") {
                    self.pos += 1;
                    let x = self.binder()?;
                    self.expect(Tok::Dot)?;
                    let n = self.with_bound(&[&x], |p| p.comp())?;
                    Ok(Comp::to(m, x, n))
                } else {
                    Ok(m)
                }
            }
        }
    }

    fn app(&mut self) -> Result<Comp, ParseError> {
        let mut head = self.head()?;
        while self.starts_vatom() {
            let v = self.vatom()?;
            head = Comp::app(head, v);
        }
        Ok(head)
    }

    fn head(&mut self) -> Result<Comp, ParseError> {
        if self.is_kw("return") {
            self.pos += 1;
            return Ok(Comp::ret(self.value()?));
        }
        if self.is_kw("force") {
            self.pos += 1;
            return Ok(Comp::force(self.value()?));
        }
        if self.is_kw("fst") {
            self.pos += 1;
            return Ok(Comp::Proj1(Box::new(self.catom()?)));
        }
        if self.is_kw("snd") {
            self.pos += 1;
            return Ok(Comp::Proj2(Box::new(self.catom()?)));
        }
        self.catom()
    }

    fn catom(&mut self) -> Result<Comp, ParseError> {
        let (l, c) = self.here();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let m = self.comp()?;
                self.expect(Tok::RParen)?;
                Ok(m)
            }
            Some(Tok::LAngle) => {
                self.pos += 1;
                let m = self.comp()?;
                self.expect(Tok::Comma)?;
                let n = self.comp()?;
                self.expect(Tok::RAngle)?;
                Ok(Comp::CPair(Box::new(m), Box::new(n)))
            }
            Some(Tok::Ident(s)) if s == "case" => {
                self.pos += 1;
                let v = self.value()?;
                self.expect_kw("of")?;
                self.expect(Tok::LBrace)?;
                self.expect_kw("inl")?;
                let x = self.binder()?;
                self.expect(Tok::Dot)?;
                let left = self.with_bound(&[&x], |p| p.comp())?;
                self.expect(Tok::Bar)?;
                self.expect_kw("inr")?;
                let y = self.binder()?;
                self.expect(Tok::Dot)?;
                let right = self.with_bound(&[&y], |p| p.comp())?;
                self.expect(Tok::RBrace)?;
                Ok(Comp::Case(Box::new(v), x, Box::new(left), y, Box::new(right)))
            }
            Some(Tok::Ident(s)) if !is_keyword(&s) => {
                self.pos += 1;
                if self.sig.op(&s).is_some() {
                    return self.op_rest(s);
                }
                match self.sig.constant(&s) {
                    Some(AnyType::Comp(_)) => Ok(Comp::Const(s)),
                    Some(AnyType::Value(_)) => {
                        Err(ParseError::grammar(l, c, format!("`{s}` is a value constant; use `return {s}`")))
                    }
                    None if self.bound.contains(&s) => Err(ParseError::grammar(
                        l,
                        c,
                        format!("variable `{s}` used as a computation; write `force {s}`"),
                    )),
                    None => Err(ParseError::unknown(l, c, &s)),
                }
            }
            _ => self.err(format!("expected a computation, found {}", self.found())),
        }
    }

    fn op_rest(&mut self, name: String) -> Result<Comp, ParseError> {
        let param = if self.peek() == Some(&Tok::LBrack) {
            self.pos += 1;
            let v = self.value()?;
            self.expect(Tok::RBrack)?;
            Some(v)
        } else {
            None
        };
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            if self.peek() != Some(&Tok::RParen) {
                args.push(self.comp()?);
                while self.peek() == Some(&Tok::Semi) {
                    self.pos += 1;
                    args.push(self.comp()?);
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(Comp::op(name, param, args))
    }
}

fn run<T>(text: &str, sig: &Signature, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser::new(text, sig)?;
    let t = f(&mut p)?;
    p.finish()?;
    Ok(t)
}

pub fn parse_vtype(text: &str, sig: &Signature) -> Result<ValueType, ParseError> {
    run(text, sig, |p| p.vtype())
}

pub fn parse_ctype(text: &str, sig: &Signature) -> Result<CompType, ParseError> {
    run(text, sig, |p| p.ctype())
}

/// A type of either sort; computation types are tried first.
pub fn parse_any_type(text: &str, sig: &Signature) -> Result<AnyType, ParseError> {
    match parse_ctype(text, sig) {
        Ok(b) => Ok(AnyType::Comp(b)),
        Err(ce) => match parse_vtype(text, sig) {
            Ok(a) => Ok(AnyType::Value(a)),
            Err(ve) => Err(further(ce, ve)),
        },
    }
}

pub fn parse_value(text: &str, sig: &Signature) -> Result<Value, ParseError> {
    run(text, sig, |p| p.value())
}

pub fn parse_comp(text: &str, sig: &Signature) -> Result<Comp, ParseError> {
    run(text, sig, |p| p.comp())
}

/// Value terms whose free variables are the given names.
pub fn parse_value_in(text: &str, sig: &Signature, vars: &[String]) -> Result<Value, ParseError> {
    run(text, sig, |p| {
        p.bound.extend(vars.iter().cloned());
        p.value()
    })
}

pub fn parse_comp_in(text: &str, sig: &Signature, vars: &[String]) -> Result<Comp, ParseError> {
    run(text, sig, |p| {
        p.bound.extend(vars.iter().cloned());
        p.comp()
    })
}

/// Parses a whole program, which is a computation or, failing that, a value.
pub fn parse_program(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    parse_program_in(text, sig, &[])
}

/// Like `parse_program`, with `vars` in scope.
pub fn parse_program_in(text: &str, sig: &Signature, vars: &[String]) -> Result<Term, ParseError> {
    match parse_comp_in(text, sig, vars) {
        Ok(m) => Ok(Term::Comp(m)),
        Err(ce) => match parse_value_in(text, sig, vars) {
            Ok(v) => Ok(Term::Value(v)),
            Err(ve) => Err(further(ce, ve)),
        },
    }
}

fn further(a: ParseError, b: ParseError) -> ParseError {
    if a.kind == super::ParseErrorKind::Lexical || (b.line, b.col) <= (a.line, a.col) {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ParseErrorKind;

    fn nondet() -> Signature {
        Signature::new()
            .with_value_base("b")
            .with_op("or", 2, None)
            .with_op("fail", 0, None)
            .with_const("a", AnyType::Value(ValueType::base("b")))
    }

    #[test]
    fn return_unit() {
        assert_eq!(parse_program("return ()", &nondet()).unwrap(), Term::Comp(Comp::ret(Value::Unit)));
    }

    #[test]
    fn binary_op() {
        let t = parse_program("or(return inl (); return inr ())", &nondet()).unwrap();
        let want = Comp::op("or", None, vec![Comp::ret(Value::inl(Value::Unit)), Comp::ret(Value::inr(Value::Unit))]);
        assert_eq!(t, Term::Comp(want));
    }

    #[test]
    fn thunk_of_lambda() {
        let t = parse_program("thunk (λx. return x)", &nondet()).unwrap();
        let want = Value::thunk(Comp::lambda("x", None, Comp::ret(Value::var("x"))));
        assert_eq!(t, Term::Value(want));
    }

    #[test]
    fn to_extends_right_and_app_is_left_assoc() {
        let sig = nondet();
        let m = parse_comp("return a to x. return x to y. return y", &sig).unwrap();
        match m {
            Comp::To(_, x, n) => {
                assert_eq!(x, "x");
                assert!(matches!(*n, Comp::To(..)));
            }
            other => panic!("{other:?}"),
        }
        let m = parse_comp(r"(\x : b. \y : b. return x) a a", &sig).unwrap();
        assert!(matches!(m, Comp::App(ref f, _) if matches!(**f, Comp::App(..))));
    }

    #[test]
    fn bare_nullary_op() {
        let m = parse_comp("or(fail; fail())", &nondet()).unwrap();
        assert_eq!(m, Comp::op("or", None, vec![Comp::op("fail", None, vec![]), Comp::op("fail", None, vec![])]));
    }

    #[test]
    fn types() {
        let sig = nondet();
        assert_eq!(
            parse_ctype("1 + 1 -> F (b * U Top)", &sig).unwrap(),
            CompType::arrow(
                ValueType::bool(),
                CompType::free(ValueType::prod(ValueType::base("b"), ValueType::thunk(CompType::Top)))
            )
        );
        assert_eq!(
            parse_ctype("(F 1) & Top", &sig).unwrap(),
            CompType::with(CompType::free(ValueType::Unit), CompType::Top)
        );
        assert_eq!(parse_ctype("(1) -> Top", &sig).unwrap(), CompType::arrow(ValueType::Unit, CompType::Top));
    }

    #[test]
    fn errors_carry_positions() {
        let sig = nondet();
        let e = parse_program("return zz", &sig).unwrap_err();
        assert_eq!((e.kind, e.line, e.col), (ParseErrorKind::UnknownIdentifier, 1, 8));
        let e = parse_program("return (", &sig).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Grammar);
        let e = parse_program("\\x. x", &sig).unwrap_err();
        assert_eq!((e.kind, e.col), (ParseErrorKind::Grammar, 5));
    }

    #[test]
    fn case_and_pm() {
        let sig = nondet();
        let m = parse_comp("case inl () of { inl x. return x | inr y. pm (y, y) as (p, q). return q }", &sig).unwrap();
        assert!(matches!(m, Comp::Case(..)));
        assert!(parse_comp("let z = a in case0 z : F b", &sig).is_ok());
    }
}
