//! Alpha-equivalence via a canonical nameless form: each binder is renamed to its
//! binding depth, so bound occurrences become de Bruijn levels. Free variables keep
//! their names; the level names use `#`, which no identifier contains.

use super::ast::{Comp, Term, Value};

struct Scope {
    names: Vec<(String, String)>,
}

impl Scope {
    fn lookup(&self, x: &str) -> String {
        self.names.iter().rev().find(|(orig, _)| orig == x).map_or_else(|| x.to_string(), |(_, canon)| canon.clone())
    }

    fn bind<T>(&mut self, xs: &[&String], f: impl FnOnce(&mut Self, &[String]) -> T) -> T {
        let depth = self.names.len();
        let fresh: Vec<String> = xs.iter().enumerate().map(|(i, _)| format!("#{}", depth + i)).collect();
        for (x, c) in xs.iter().zip(&fresh) {
            self.names.push(((*x).clone(), c.clone()));
        }
        let r = f(self, &fresh);
        self.names.truncate(depth);
        r
    }
}

fn value(v: &Value, s: &mut Scope) -> Value {
    match v {
        Value::Var(x) => Value::Var(s.lookup(x)),
        Value::Unit => Value::Unit,
        Value::Const(c) => Value::Const(c.clone()),
        Value::Pair(a, b) => Value::pair(value(a, s), value(b, s)),
        Value::Inl(a) => Value::inl(value(a, s)),
        Value::Inr(a) => Value::inr(value(a, s)),
        Value::Thunk(m) => Value::thunk(comp(m, s)),
    }
}

fn comp(m: &Comp, s: &mut Scope) -> Comp {
    match m {
        Comp::Return(v) => Comp::ret(value(v, s)),
        Comp::To(m, x, n) => {
            let m = comp(m, s);
            s.bind(&[x], |s, f| Comp::to(m, f[0].clone(), comp(n, s)))
        }
        Comp::Force(v) => Comp::force(value(v, s)),
        Comp::Lambda(x, ty, body) => s.bind(&[x], |s, f| Comp::lambda(f[0].clone(), ty.clone(), comp(body, s))),
        Comp::App(m, v) => Comp::app(comp(m, s), value(v, s)),
        Comp::CPair(m, n) => Comp::CPair(Box::new(comp(m, s)), Box::new(comp(n, s))),
        Comp::Proj1(m) => Comp::Proj1(Box::new(comp(m, s))),
        Comp::Proj2(m) => Comp::Proj2(Box::new(comp(m, s))),
        Comp::PmPair(v, x, y, body) => {
            let v = value(v, s);
            s.bind(&[x, y], |s, f| Comp::PmPair(Box::new(v), f[0].clone(), f[1].clone(), Box::new(comp(body, s))))
        }
        Comp::Case(v, x, l, y, r) => {
            let v = value(v, s);
            let (xl, l) = s.bind(&[x], |s, f| (f[0].clone(), comp(l, s)));
            let (yr, r) = s.bind(&[y], |s, f| (f[0].clone(), comp(r, s)));
            Comp::Case(Box::new(v), xl, Box::new(l), yr, Box::new(r))
        }
        Comp::CaseEmpty(v, b) => Comp::CaseEmpty(Box::new(value(v, s)), b.clone()),
        Comp::LetVal(x, v, body) => {
            let v = value(v, s);
            s.bind(&[x], |s, f| Comp::LetVal(f[0].clone(), Box::new(v), Box::new(comp(body, s))))
        }
        Comp::Op(name, p, args) => {
            Comp::op(name.clone(), p.as_ref().map(|p| value(p, s)), args.iter().map(|a| comp(a, s)).collect())
        }
        Comp::Const(c) => Comp::Const(c.clone()),
    }
}

pub fn canonical_comp(m: &Comp) -> Comp {
    comp(m, &mut Scope { names: Vec::new() })
}

pub fn canonical_value(v: &Value) -> Value {
    value(v, &mut Scope { names: Vec::new() })
}

pub fn alpha_eq_comp(a: &Comp, b: &Comp) -> bool {
    canonical_comp(a) == canonical_comp(b)
}

pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Comp(m), Term::Comp(n)) => alpha_eq_comp(m, n),
        (Term::Value(v), Term::Value(w)) => canonical_value(v) == canonical_value(w),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ValueType;

    #[test]
    fn renaming_binders_is_invisible() {
        let a = Comp::lambda("x", Some(ValueType::Unit), Comp::ret(Value::var("x")));
        let b = Comp::lambda("y", Some(ValueType::Unit), Comp::ret(Value::var("y")));
        assert!(alpha_eq_comp(&a, &b));
    }

    #[test]
    fn free_variables_are_not_renamed() {
        let a = Comp::ret(Value::var("x"));
        let b = Comp::ret(Value::var("y"));
        assert!(!alpha_eq_comp(&a, &b));
    }

    #[test]
    fn shadowing_resolves_to_innermost() {
        let u = Some(ValueType::Unit);
        let a = Comp::lambda("x", u.clone(), Comp::lambda("x", u.clone(), Comp::ret(Value::var("x"))));
        let b = Comp::lambda("x", u.clone(), Comp::lambda("y", u.clone(), Comp::ret(Value::var("y"))));
        let c = Comp::lambda("x", u.clone(), Comp::lambda("y", u, Comp::ret(Value::var("x"))));
        assert!(alpha_eq_comp(&a, &b));
        assert!(!alpha_eq_comp(&a, &c));
    }
}
