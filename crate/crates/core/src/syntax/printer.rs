//! Concrete syntax output. Every non-atomic subterm in an operand position is
//! parenthesised, so the output re-parses to the same tree.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::{Comp, CompType, Term, Value, ValueType};

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Value(v) => v.to_string(),
        Term::Comp(m) => m.to_string(),
    }
}

fn vtype_atomic(a: &ValueType) -> bool {
    !matches!(a, ValueType::Prod(..) | ValueType::Sum(..))
}

fn ctype_atomic(b: &CompType) -> bool {
    !matches!(b, CompType::With(..) | CompType::Arrow(..))
}

struct VAtomType<'a>(&'a ValueType);
struct CAtomType<'a>(&'a CompType);

impl Display for VAtomType<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if vtype_atomic(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl Display for CAtomType<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if ctype_atomic(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl Display for ValueType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::Base(n) => f.write_str(n),
            ValueType::Unit => f.write_str("1"),
            ValueType::Empty => f.write_str("0"),
            ValueType::Prod(a, b) => write!(f, "{} * {}", VAtomType(a), VAtomType(b)),
            ValueType::Sum(a, b) => write!(f, "{} + {}", VAtomType(a), VAtomType(b)),
            ValueType::Thunk(b) => write!(f, "U {}", CAtomType(b)),
        }
    }
}

impl Display for CompType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            CompType::Base(n) => f.write_str(n),
            CompType::Free(a) => write!(f, "F {}", VAtomType(a)),
            CompType::Top => f.write_str("Top"),
            CompType::With(a, b) => write!(f, "{} & {}", CAtomType(a), CAtomType(b)),
            CompType::Arrow(a, b) => write!(f, "{} -> {}", VAtomType(a), CAtomType(b)),
        }
    }
}

fn value_atomic(v: &Value) -> bool {
    matches!(v, Value::Var(_) | Value::Unit | Value::Pair(..) | Value::Const(_))
}

fn comp_atomic(m: &Comp) -> bool {
    matches!(m, Comp::CPair(..) | Comp::Case(..) | Comp::Op(..) | Comp::Const(_))
}

struct VAtom<'a>(&'a Value);
struct CAtom<'a>(&'a Comp);

impl Display for VAtom<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if value_atomic(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl Display for CAtom<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if comp_atomic(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl Display for Value {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Value::Var(x) | Value::Const(x) => f.write_str(x),
            Value::Unit => f.write_str("()"),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
            Value::Inl(v) => write!(f, "inl {}", VAtom(v)),
            Value::Inr(v) => write!(f, "inr {}", VAtom(v)),
            Value::Thunk(m) => write!(f, "thunk {}", CAtom(m)),
        }
    }
}

impl Display for Comp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Comp::Return(v) => write!(f, "return {v}"),
            Comp::To(m, x, n) => write!(f, "{} to {x}. {}", CAtom(m), CAtom(n)),
            Comp::Force(v) => write!(f, "force {v}"),
            Comp::Lambda(x, Some(a), m) => write!(f, "\\{x} : {a}. {m}"),
            Comp::Lambda(x, None, m) => write!(f, "\\{x}. {m}"),
            Comp::App(m, v) => write!(f, "{} {}", CAtom(m), VAtom(v)),
            Comp::CPair(m, n) => write!(f, "<{m}, {n}>"),
            Comp::Proj1(m) => write!(f, "fst {}", CAtom(m)),
            Comp::Proj2(m) => write!(f, "snd {}", CAtom(m)),
            Comp::PmPair(v, x, y, m) => write!(f, "pm {v} as ({x}, {y}). {m}"),
            Comp::Case(v, x, l, y, r) => write!(f, "case {v} of {{ inl {x}. {l} | inr {y}. {r} }}"),
            Comp::CaseEmpty(v, b) => write!(f, "case0 {v} : {b}"),
            Comp::LetVal(x, v, m) => write!(f, "let {x} = {v} in {m}"),
            Comp::Op(name, param, args) => {
                f.write_str(name)?;
                if let Some(p) = param {
                    write!(f, "[{p}]")?;
                }
                if !args.is_empty() {
                    f.write_char('(')?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str("; ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_char(')')?;
                }
                Ok(())
            }
            Comp::Const(c) => f.write_str(c),
        }
    }
}
