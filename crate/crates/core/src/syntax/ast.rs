//! Abstract syntax for values, computations and their types.

use std::fmt;

/// Value types `A`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueType {
    Base(String),
    Unit,
    Prod(Box<ValueType>, Box<ValueType>),
    Empty,
    Sum(Box<ValueType>, Box<ValueType>),
    Thunk(Box<CompType>),
}

/// Computation types `B`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompType {
    Base(String),
    Free(Box<ValueType>),
    Top,
    With(Box<CompType>, Box<CompType>),
    Arrow(Box<ValueType>, Box<CompType>),
}

/// Either sort of type; used where a declaration may be of both sorts (constants).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AnyType {
    Value(ValueType),
    Comp(CompType),
}

impl ValueType {
    pub fn prod(a: ValueType, b: ValueType) -> Self {
        ValueType::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: ValueType, b: ValueType) -> Self {
        ValueType::Sum(Box::new(a), Box::new(b))
    }

    pub fn thunk(b: CompType) -> Self {
        ValueType::Thunk(Box::new(b))
    }

    pub fn base(name: impl Into<String>) -> Self {
        ValueType::Base(name.into())
    }

    /// `1 + 1`, the booleans.
    pub fn bool() -> Self {
        ValueType::sum(ValueType::Unit, ValueType::Unit)
    }
}

impl CompType {
    pub fn free(a: ValueType) -> Self {
        CompType::Free(Box::new(a))
    }

    pub fn with(a: CompType, b: CompType) -> Self {
        CompType::With(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: ValueType, b: CompType) -> Self {
        CompType::Arrow(Box::new(a), Box::new(b))
    }

    pub fn base(name: impl Into<String>) -> Self {
        CompType::Base(name.into())
    }
}

/// Value terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Var(String),
    Unit,
    Pair(Box<Value>, Box<Value>),
    Inl(Box<Value>),
    Inr(Box<Value>),
    Thunk(Box<Comp>),
    Const(String),
}

/// Computation terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Comp {
    Return(Box<Value>),
    /// `M to x. N`
    To(Box<Comp>, String, Box<Comp>),
    Force(Box<Value>),
    /// `\x : A. M`; the annotation is optional in the grammar but required by the typechecker.
    Lambda(String, Option<ValueType>, Box<Comp>),
    App(Box<Comp>, Box<Value>),
    CPair(Box<Comp>, Box<Comp>),
    Proj1(Box<Comp>),
    Proj2(Box<Comp>),
    /// `pm V as (x, y). M`
    PmPair(Box<Value>, String, String, Box<Comp>),
    /// `case V of { inl x. M | inr y. N }`
    Case(Box<Value>, String, Box<Comp>, String, Box<Comp>),
    /// `case0 V : B`
    CaseEmpty(Box<Value>, CompType),
    LetVal(String, Box<Value>, Box<Comp>),
    /// `op(M1; ...; Mn)` or `op[V](M1; ...; Mn)`
    Op(String, Option<Box<Value>>, Vec<Comp>),
    Const(String),
}

/// A parsed program: either a value or a computation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Value(Value),
    Comp(Comp),
}

impl Value {
    pub fn var(name: impl Into<String>) -> Self {
        Value::Var(name.into())
    }

    pub fn pair(a: Value, b: Value) -> Self {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn inl(v: Value) -> Self {
        Value::Inl(Box::new(v))
    }

    pub fn inr(v: Value) -> Self {
        Value::Inr(Box::new(v))
    }

    pub fn thunk(m: Comp) -> Self {
        Value::Thunk(Box::new(m))
    }

    /// Variables occurring free in the value.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_value(self, &mut Vec::new(), &mut out);
        out
    }
}

impl Comp {
    pub fn ret(v: Value) -> Self {
        Comp::Return(Box::new(v))
    }

    pub fn to(m: Comp, x: impl Into<String>, n: Comp) -> Self {
        Comp::To(Box::new(m), x.into(), Box::new(n))
    }

    pub fn force(v: Value) -> Self {
        Comp::Force(Box::new(v))
    }

    pub fn lambda(x: impl Into<String>, ty: Option<ValueType>, body: Comp) -> Self {
        Comp::Lambda(x.into(), ty, Box::new(body))
    }

    pub fn app(m: Comp, v: Value) -> Self {
        Comp::App(Box::new(m), Box::new(v))
    }

    pub fn op(name: impl Into<String>, param: Option<Value>, args: Vec<Comp>) -> Self {
        Comp::Op(name.into(), param.map(Box::new), args)
    }

    /// Variables occurring free in the computation, in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_comp(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of syntax nodes, counting values.
    pub fn size(&self) -> usize {
        match self {
            Comp::Return(v) | Comp::Force(v) => 1 + v.size(),
            Comp::To(m, _, n) | Comp::CPair(m, n) => 1 + m.size() + n.size(),
            Comp::Lambda(_, _, m) | Comp::Proj1(m) | Comp::Proj2(m) => 1 + m.size(),
            Comp::App(m, v) => 1 + m.size() + v.size(),
            Comp::PmPair(v, _, _, m) | Comp::LetVal(_, v, m) => 1 + v.size() + m.size(),
            Comp::Case(v, _, m, _, n) => 1 + v.size() + m.size() + n.size(),
            Comp::CaseEmpty(v, _) => 1 + v.size(),
            Comp::Op(_, p, args) => 1 + p.as_ref().map_or(0, |p| p.size()) + args.iter().map(Comp::size).sum::<usize>(),
            Comp::Const(_) => 1,
        }
    }
}

impl Value {
    pub fn size(&self) -> usize {
        match self {
            Value::Var(_) | Value::Unit | Value::Const(_) => 1,
            Value::Pair(a, b) => 1 + a.size() + b.size(),
            Value::Inl(v) | Value::Inr(v) => 1 + v.size(),
            Value::Thunk(m) => 1 + m.size(),
        }
    }
}

fn note_free(name: &str, bound: &[String], out: &mut Vec<String>) {
    if !bound.iter().any(|b| b == name) && !out.iter().any(|o| o == name) {
        out.push(name.to_string());
    }
}

fn collect_value(v: &Value, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match v {
        Value::Var(x) => note_free(x, bound, out),
        Value::Unit | Value::Const(_) => {}
        Value::Pair(a, b) => {
            collect_value(a, bound, out);
            collect_value(b, bound, out);
        }
        Value::Inl(v) | Value::Inr(v) => collect_value(v, bound, out),
        Value::Thunk(m) => collect_comp(m, bound, out),
    }
}

fn under(bound: &mut Vec<String>, names: &[&String], f: impl FnOnce(&mut Vec<String>)) {
    let depth = bound.len();
    bound.extend(names.iter().map(|n| (*n).clone()));
    f(bound);
    bound.truncate(depth);
}

fn collect_comp(m: &Comp, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match m {
        Comp::Return(v) | Comp::Force(v) | Comp::CaseEmpty(v, _) => collect_value(v, bound, out),
        Comp::To(m, x, n) => {
            collect_comp(m, bound, out);
            under(bound, &[x], |b| collect_comp(n, b, out));
        }
        Comp::Lambda(x, _, body) => under(bound, &[x], |b| collect_comp(body, b, out)),
        Comp::App(m, v) => {
            collect_comp(m, bound, out);
            collect_value(v, bound, out);
        }
        Comp::CPair(m, n) => {
            collect_comp(m, bound, out);
            collect_comp(n, bound, out);
        }
        Comp::Proj1(m) | Comp::Proj2(m) => collect_comp(m, bound, out),
        Comp::PmPair(v, x, y, body) => {
            collect_value(v, bound, out);
            under(bound, &[x, y], |b| collect_comp(body, b, out));
        }
        Comp::Case(v, x, l, y, r) => {
            collect_value(v, bound, out);
            under(bound, &[x], |b| collect_comp(l, b, out));
            under(bound, &[y], |b| collect_comp(r, b, out));
        }
        Comp::LetVal(x, v, body) => {
            collect_value(v, bound, out);
            under(bound, &[x], |b| collect_comp(body, b, out));
        }
        Comp::Op(_, p, args) => {
            if let Some(p) = p {
                collect_value(p, bound, out);
            }
            for a in args {
                collect_comp(a, bound, out);
            }
        }
        Comp::Const(_) => {}
    }
}

impl fmt::Display for AnyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyType::Value(a) => a.fmt(f),
            AnyType::Comp(b) => b.fmt(f),
        }
    }
}
