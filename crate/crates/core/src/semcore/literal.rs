//! Text syntax for semantic values, as printed by `Display` for `SemVal`:
//! `()`, `(v, w)`, `inl v`, `inr v`, atoms, `{..}` sets, `[..]` lists, `ok v`,
//! `raise e`, `state[(x, s), ..]`, `ret v`, `op[p](t; ..)` trees and `fun{k => v, ..}`.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::value::{FunVal, MonVal, SemVal};
use super::SemError;

struct Lit<'a> {
    src: &'a str,
    pos: usize,
}

fn is_atom_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '-'
}

impl Lit<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, SemError> {
        Err(SemError::Literal(format!("{msg} at offset {} in `{}`", self.pos, self.src)))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), SemError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(&format!("expected `{s}`"))
        }
    }

    fn word(&mut self) -> Option<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len: usize = rest.chars().take_while(|c| is_atom_char(*c)).map(char::len_utf8).sum();
        if len == 0 {
            None
        } else {
            self.pos += len;
            Some(rest[..len].to_string())
        }
    }

    fn seq<T>(
        &mut self,
        close: &str,
        sep: &str,
        mut item: impl FnMut(&mut Self) -> Result<T, SemError>,
    ) -> Result<Vec<T>, SemError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(sep)?;
        }
    }

    fn mon(&mut self) -> Result<MonVal, SemError> {
        match self.value()? {
            SemVal::Mon(m) => Ok(m),
            other => self.err(&format!("expected a monadic value, found {other}")),
        }
    }

    fn value(&mut self) -> Result<SemVal, SemError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                if self.eat(")") {
                    return Ok(SemVal::Unit);
                }
                let a = self.value()?;
                if self.eat(",") {
                    let b = self.value()?;
                    self.expect(")")?;
                    Ok(SemVal::pair(a, b))
                } else {
                    self.expect(")")?;
                    Ok(a)
                }
            }
            Some('{') => {
                self.pos += 1;
                let items = self.seq("}", ",", |p| p.value())?;
                Ok(SemVal::Mon(MonVal::Set(Arc::new(items.into_iter().collect::<BTreeSet<_>>()))))
            }
            Some('[') => {
                self.pos += 1;
                let items = self.seq("]", ",", |p| p.value())?;
                Ok(SemVal::list(items))
            }
            Some(_) => {
                let Some(w) = self.word() else {
                    return self.err("expected a value");
                };
                // `raise(..)` with no space is an operation node named `raise`.
                let glued = matches!(self.src[self.pos..].chars().next(), Some('(' | '['));
                match w.as_str() {
                    "inl" | "inr" | "ok" | "raise" | "ret" if glued => self.node(w),
                    "inl" => Ok(SemVal::inl(self.value()?)),
                    "inr" => Ok(SemVal::inr(self.value()?)),
                    "ok" => Ok(SemVal::Mon(MonVal::Ok(Arc::new(self.value()?)))),
                    "raise" => Ok(SemVal::Mon(MonVal::Raise(Arc::new(self.value()?)))),
                    "ret" => Ok(SemVal::Mon(MonVal::Ret(Arc::new(self.value()?)))),
                    "state" => {
                        self.expect("[")?;
                        let rows = self.seq("]", ",", |p| {
                            p.expect("(")?;
                            let x = p.value()?;
                            p.expect(",")?;
                            let s = p.value()?;
                            p.expect(")")?;
                            Ok((x, s))
                        })?;
                        Ok(SemVal::Mon(MonVal::State(Arc::new(rows))))
                    }
                    "fun" => {
                        self.expect("{")?;
                        let rows = self.seq("}", ",", |p| {
                            let k = p.value()?;
                            p.expect("=>")?;
                            let v = p.value()?;
                            Ok((k, v))
                        })?;
                        Ok(SemVal::Fun(FunVal::table(rows)))
                    }
                    _ => self.node(w),
                }
            }
            None => self.err("unexpected end of literal"),
        }
    }

    fn node(&mut self, w: String) -> Result<SemVal, SemError> {
        let param = if self.peek() == Some('[') {
            self.pos += 1;
            let p = self.value()?;
            self.expect("]")?;
            Some(Arc::new(p))
        } else {
            None
        };
        if self.peek() == Some('(') {
            self.pos += 1;
            let args = self.seq(")", ";", |p| p.mon())?;
            Ok(SemVal::Mon(MonVal::Node { op: Arc::from(w.as_str()), param, args: Arc::new(args) }))
        } else if param.is_some() {
            self.err("operation node needs an argument list")
        } else {
            Ok(SemVal::atom(&w))
        }
    }
}

pub fn parse_literal(text: &str) -> Result<SemVal, SemError> {
    let mut p = Lit { src: text, pos: 0 };
    let v = p.value()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_display() {
        let samples = [
            "()",
            "(a, inl (inr ()))",
            "{a, b}",
            "[a, b, a]",
            "ok a",
            "raise e1",
            "state[(a, s0), (b, s1)]",
            "or(ret a; fail())",
            "raise[e](fail())",
            "fun{a => {}, b => {a}}",
        ];
        for s in samples {
            let v = parse_literal(s).unwrap();
            assert_eq!(parse_literal(&v.to_string()).unwrap(), v, "{s}");
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_literal("(a,").is_err());
        assert!(parse_literal("a b").is_err());
    }
}
