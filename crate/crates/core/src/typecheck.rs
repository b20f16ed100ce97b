//! Bidirectional typing for values and computations.
//!
//! Checking pushes a partially known type into the term; inference is checking against
//! the unknown type. Partial types only ever have holes where the term places no
//! constraint at all (the other side of an injection, a nullary operation), so any
//! completion of a returned partial type is a valid type for the term. Positions whose
//! type the evaluator needs (binders, scrutinees, function arguments, projections)
//! must resolve to complete types.

use std::fmt;

use thiserror::Error;

use crate::syntax::{AnyType, Comp, CompType, Signature, Value, ValueType};

/// Ordered typing context; later entries shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    entries: Vec<(String, ValueType)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<(String, ValueType)>) -> Self {
        Context { entries }
    }

    pub fn extend(&self, x: &str, a: ValueType) -> Self {
        let mut c = self.clone();
        c.push(x, a);
        c
    }

    pub fn push(&mut self, x: &str, a: ValueType) {
        self.entries.push((x.to_string(), a));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn lookup(&self, x: &str) -> Option<&ValueType> {
        self.entries.iter().rev().find(|(n, _)| n == x).map(|(_, t)| t)
    }

    pub fn entries(&self) -> &[(String, ValueType)] {
        &self.entries
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("unknown constant `{0}`")]
    UnknownConst(String),
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("unknown base type `{0}`")]
    UnknownBase(String),
    #[error("type mismatch in {term}: expected {expected}, found {found}")]
    Mismatch { term: String, expected: String, found: String },
    #[error("cannot determine the type of {0}")]
    Ambiguous(String),
    #[error("operation `{op}` expects {expected} arguments, got {found}")]
    Arity { op: String, expected: usize, found: usize },
    #[error("operation `{0}` parameter mismatch: {1}")]
    Param(String, String),
    #[error("lambda binder `{0}` needs a type annotation")]
    MissingAnnotation(String),
}

/// Value types with holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PV {
    Hole,
    Base(String),
    Unit,
    Empty,
    Prod(Box<PV>, Box<PV>),
    Sum(Box<PV>, Box<PV>),
    Thunk(Box<PC>),
}

/// Computation types with holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PC {
    Hole,
    Base(String),
    Free(Box<PV>),
    Top,
    With(Box<PC>, Box<PC>),
    Arrow(Box<PV>, Box<PC>),
}

impl From<&ValueType> for PV {
    fn from(a: &ValueType) -> Self {
        match a {
            ValueType::Base(n) => PV::Base(n.clone()),
            ValueType::Unit => PV::Unit,
            ValueType::Empty => PV::Empty,
            ValueType::Prod(a, b) => PV::Prod(Box::new((&**a).into()), Box::new((&**b).into())),
            ValueType::Sum(a, b) => PV::Sum(Box::new((&**a).into()), Box::new((&**b).into())),
            ValueType::Thunk(b) => PV::Thunk(Box::new((&**b).into())),
        }
    }
}

impl From<&CompType> for PC {
    fn from(b: &CompType) -> Self {
        match b {
            CompType::Base(n) => PC::Base(n.clone()),
            CompType::Free(a) => PC::Free(Box::new((&**a).into())),
            CompType::Top => PC::Top,
            CompType::With(a, b) => PC::With(Box::new((&**a).into()), Box::new((&**b).into())),
            CompType::Arrow(a, b) => PC::Arrow(Box::new((&**a).into()), Box::new((&**b).into())),
        }
    }
}

impl PV {
    pub fn complete(&self) -> Option<ValueType> {
        Some(match self {
            PV::Hole => return None,
            PV::Base(n) => ValueType::Base(n.clone()),
            PV::Unit => ValueType::Unit,
            PV::Empty => ValueType::Empty,
            PV::Prod(a, b) => ValueType::prod(a.complete()?, b.complete()?),
            PV::Sum(a, b) => ValueType::sum(a.complete()?, b.complete()?),
            PV::Thunk(b) => ValueType::thunk(b.complete()?),
        })
    }
}

impl PC {
    pub fn complete(&self) -> Option<CompType> {
        Some(match self {
            PC::Hole => return None,
            PC::Base(n) => CompType::Base(n.clone()),
            PC::Free(a) => CompType::free(a.complete()?),
            PC::Top => CompType::Top,
            PC::With(a, b) => CompType::with(a.complete()?, b.complete()?),
            PC::Arrow(a, b) => CompType::arrow(a.complete()?, b.complete()?),
        })
    }
}

impl fmt::Display for PV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PV::Hole => f.write_str("?"),
            PV::Base(n) => f.write_str(n),
            PV::Unit => f.write_str("1"),
            PV::Empty => f.write_str("0"),
            PV::Prod(a, b) => write!(f, "({a} * {b})"),
            PV::Sum(a, b) => write!(f, "({a} + {b})"),
            PV::Thunk(b) => write!(f, "U ({b})"),
        }
    }
}

impl fmt::Display for PC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PC::Hole => f.write_str("?"),
            PC::Base(n) => f.write_str(n),
            PC::Free(a) => write!(f, "F ({a})"),
            PC::Top => f.write_str("Top"),
            PC::With(a, b) => write!(f, "({a} & {b})"),
            PC::Arrow(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}

fn merge_v(a: &PV, b: &PV) -> Option<PV> {
    Some(match (a, b) {
        (PV::Hole, x) | (x, PV::Hole) => x.clone(),
        (PV::Base(x), PV::Base(y)) if x == y => a.clone(),
        (PV::Unit, PV::Unit) => PV::Unit,
        (PV::Empty, PV::Empty) => PV::Empty,
        (PV::Prod(a1, a2), PV::Prod(b1, b2)) => PV::Prod(Box::new(merge_v(a1, b1)?), Box::new(merge_v(a2, b2)?)),
        (PV::Sum(a1, a2), PV::Sum(b1, b2)) => PV::Sum(Box::new(merge_v(a1, b1)?), Box::new(merge_v(a2, b2)?)),
        (PV::Thunk(x), PV::Thunk(y)) => PV::Thunk(Box::new(merge_c(x, y)?)),
        _ => return None,
    })
}

fn merge_c(a: &PC, b: &PC) -> Option<PC> {
    Some(match (a, b) {
        (PC::Hole, x) | (x, PC::Hole) => x.clone(),
        (PC::Base(x), PC::Base(y)) if x == y => a.clone(),
        (PC::Top, PC::Top) => PC::Top,
        (PC::Free(x), PC::Free(y)) => PC::Free(Box::new(merge_v(x, y)?)),
        (PC::With(a1, a2), PC::With(b1, b2)) => PC::With(Box::new(merge_c(a1, b1)?), Box::new(merge_c(a2, b2)?)),
        (PC::Arrow(a1, a2), PC::Arrow(b1, b2)) => PC::Arrow(Box::new(merge_v(a1, b1)?), Box::new(merge_c(a2, b2)?)),
        _ => return None,
    })
}

fn short(s: String) -> String {
    if s.chars().count() > 60 {
        let cut: String = s.chars().take(57).collect();
        format!("{cut}...")
    } else {
        s
    }
}

struct Checker<'a> {
    sig: &'a Signature,
    ctx: Context,
}

impl Checker<'_> {
    fn mismatch_v(&self, v: &Value, expected: &PV, found: &PV) -> TypeError {
        TypeError::Mismatch { term: short(format!("`{v}`")), expected: expected.to_string(), found: found.to_string() }
    }

    fn mismatch_c(&self, m: &Comp, expected: &PC, found: &PC) -> TypeError {
        TypeError::Mismatch { term: short(format!("`{m}`")), expected: expected.to_string(), found: found.to_string() }
    }

    fn fit_v(&self, v: &Value, found: PV, expected: &PV) -> Result<PV, TypeError> {
        merge_v(&found, expected).ok_or_else(|| self.mismatch_v(v, expected, &found))
    }

    fn fit_c(&self, m: &Comp, found: PC, expected: &PC) -> Result<PC, TypeError> {
        merge_c(&found, expected).ok_or_else(|| self.mismatch_c(m, expected, &found))
    }

    fn wf_v(&self, a: &ValueType) -> Result<(), TypeError> {
        match a {
            ValueType::Base(n) if !self.sig.is_value_base(n) => Err(TypeError::UnknownBase(n.clone())),
            ValueType::Base(_) | ValueType::Unit | ValueType::Empty => Ok(()),
            ValueType::Prod(a, b) | ValueType::Sum(a, b) => {
                self.wf_v(a)?;
                self.wf_v(b)
            }
            ValueType::Thunk(b) => self.wf_c(b),
        }
    }

    fn wf_c(&self, b: &CompType) -> Result<(), TypeError> {
        match b {
            CompType::Base(n) if !self.sig.is_comp_base(n) => Err(TypeError::UnknownBase(n.clone())),
            CompType::Base(_) | CompType::Top => Ok(()),
            CompType::Free(a) => self.wf_v(a),
            CompType::With(a, b) => {
                self.wf_c(a)?;
                self.wf_c(b)
            }
            CompType::Arrow(a, b) => {
                self.wf_v(a)?;
                self.wf_c(b)
            }
        }
    }

    fn value(&mut self, v: &Value, exp: &PV) -> Result<PV, TypeError> {
        match v {
            Value::Var(x) => {
                let t = self.ctx.lookup(x).ok_or_else(|| TypeError::Unbound(x.clone()))?;
                self.fit_v(v, t.into(), exp)
            }
            Value::Const(c) => match self.sig.constant(c) {
                Some(AnyType::Value(a)) => self.fit_v(v, a.into(), exp),
                Some(AnyType::Comp(b)) => Err(self.mismatch_v(v, exp, &PV::Thunk(Box::new(PC::from(b))))),
                None => Err(TypeError::UnknownConst(c.clone())),
            },
            Value::Unit => self.fit_v(v, PV::Unit, exp),
            Value::Pair(a, b) => {
                let (ea, eb) = match exp {
                    PV::Hole => (PV::Hole, PV::Hole),
                    PV::Prod(x, y) => ((**x).clone(), (**y).clone()),
                    other => return Err(self.mismatch_v(v, other, &PV::Prod(Box::new(PV::Hole), Box::new(PV::Hole)))),
                };
                let ta = self.value(a, &ea)?;
                let tb = self.value(b, &eb)?;
                Ok(PV::Prod(Box::new(ta), Box::new(tb)))
            }
            Value::Inl(a) | Value::Inr(a) => {
                let (el, er) = match exp {
                    PV::Hole => (PV::Hole, PV::Hole),
                    PV::Sum(x, y) => ((**x).clone(), (**y).clone()),
                    other => return Err(self.mismatch_v(v, other, &PV::Sum(Box::new(PV::Hole), Box::new(PV::Hole)))),
                };
                if matches!(v, Value::Inl(_)) {
                    let t = self.value(a, &el)?;
                    Ok(PV::Sum(Box::new(t), Box::new(er)))
                } else {
                    let t = self.value(a, &er)?;
                    Ok(PV::Sum(Box::new(el), Box::new(t)))
                }
            }
            Value::Thunk(m) => {
                let eb = match exp {
                    PV::Hole => PC::Hole,
                    PV::Thunk(b) => (**b).clone(),
                    other => return Err(self.mismatch_v(v, other, &PV::Thunk(Box::new(PC::Hole)))),
                };
                Ok(PV::Thunk(Box::new(self.comp(m, &eb)?)))
            }
        }
    }

    fn complete_value(&mut self, v: &Value, exp: &PV) -> Result<ValueType, TypeError> {
        self.value(v, exp)?.complete().ok_or_else(|| TypeError::Ambiguous(short(format!("`{v}`"))))
    }

    fn under<T>(&mut self, binds: &[(&String, ValueType)], f: impl FnOnce(&mut Self) -> T) -> T {
        for (x, a) in binds {
            self.ctx.push(x, a.clone());
        }
        let r = f(self);
        for _ in binds {
            self.ctx.pop();
        }
        r
    }

    fn comp(&mut self, m: &Comp, exp: &PC) -> Result<PC, TypeError> {
        match m {
            Comp::Return(v) => {
                let ea = match exp {
                    PC::Hole => PV::Hole,
                    PC::Free(a) => (**a).clone(),
                    other => return Err(self.mismatch_c(m, other, &PC::Free(Box::new(PV::Hole)))),
                };
                Ok(PC::Free(Box::new(self.value(v, &ea)?)))
            }
            Comp::To(head, x, body) => {
                let a = self.binder_type(head)?;
                self.under(&[(x, a)], |c| c.comp(body, exp))
            }
            Comp::Force(v) => match self.value(v, &PV::Thunk(Box::new(exp.clone())))? {
                PV::Thunk(b) => Ok(*b),
                PV::Hole => Ok(exp.clone()),
                other => Err(self.mismatch_v(v, &PV::Thunk(Box::new(exp.clone())), &other)),
            },
            Comp::Lambda(x, ann, body) => {
                let a = ann.clone().ok_or_else(|| TypeError::MissingAnnotation(x.clone()))?;
                self.wf_v(&a)?;
                let eb = match exp {
                    PC::Hole => PC::Hole,
                    PC::Arrow(ea, eb) => {
                        if merge_v(ea, &PV::from(&a)).is_none() {
                            return Err(self.mismatch_c(m, exp, &PC::Arrow(Box::new((&a).into()), Box::new(PC::Hole))));
                        }
                        (**eb).clone()
                    }
                    other => {
                        return Err(self.mismatch_c(m, other, &PC::Arrow(Box::new((&a).into()), Box::new(PC::Hole))))
                    }
                };
                let b = self.under(&[(x, a.clone())], |c| c.comp(body, &eb))?;
                Ok(PC::Arrow(Box::new((&a).into()), Box::new(b)))
            }
            Comp::App(f, v) => {
                let tf = self.comp(f, &PC::Arrow(Box::new(PV::Hole), Box::new(exp.clone())))?;
                let (a, b) = match tf {
                    PC::Arrow(a, b) => (a, b),
                    _ => return Err(TypeError::Ambiguous(short(format!("the function `{f}`")))),
                };
                let a =
                    a.complete().ok_or_else(|| TypeError::Ambiguous(short(format!("the argument type of `{f}`"))))?;
                self.value(v, &(&a).into())?;
                Ok(*b)
            }
            Comp::CPair(l, r) => {
                let (el, er) = match exp {
                    PC::Hole => (PC::Hole, PC::Hole),
                    PC::With(x, y) => ((**x).clone(), (**y).clone()),
                    other => return Err(self.mismatch_c(m, other, &PC::With(Box::new(PC::Hole), Box::new(PC::Hole)))),
                };
                let tl = self.comp(l, &el)?;
                let tr = self.comp(r, &er)?;
                Ok(PC::With(Box::new(tl), Box::new(tr)))
            }
            Comp::Proj1(p) | Comp::Proj2(p) => {
                let first = matches!(m, Comp::Proj1(_));
                let want = if first {
                    PC::With(Box::new(exp.clone()), Box::new(PC::Hole))
                } else {
                    PC::With(Box::new(PC::Hole), Box::new(exp.clone()))
                };
                let t = self.comp(p, &want)?;
                if t.complete().is_none() {
                    return Err(TypeError::Ambiguous(short(format!("the pair `{p}`"))));
                }
                match t {
                    PC::With(a, b) => Ok(if first { *a } else { *b }),
                    other => Err(self.mismatch_c(p, &want, &other)),
                }
            }
            Comp::PmPair(v, x, y, body) => {
                match self.complete_value(v, &PV::Prod(Box::new(PV::Hole), Box::new(PV::Hole)))? {
                    ValueType::Prod(a, b) => self.under(&[(x, *a), (y, *b)], |c| c.comp(body, exp)),
                    _ => unreachable!("checked against a product"),
                }
            }
            Comp::Case(v, x, l, y, r) => {
                match self.complete_value(v, &PV::Sum(Box::new(PV::Hole), Box::new(PV::Hole)))? {
                    ValueType::Sum(a, b) => {
                        let tl = self.under(&[(x, *a)], |c| c.comp(l, exp))?;
                        let tr = self.under(&[(y, *b)], |c| c.comp(r, &tl))?;
                        Ok(tr)
                    }
                    _ => unreachable!("checked against a sum"),
                }
            }
            Comp::CaseEmpty(v, b) => {
                self.wf_c(b)?;
                self.value(v, &PV::Empty)?;
                self.fit_c(m, b.into(), exp)
            }
            Comp::LetVal(x, v, body) => {
                let a = self.complete_value(v, &PV::Hole)?;
                self.under(&[(x, a)], |c| c.comp(body, exp))
            }
            Comp::Op(name, param, args) => {
                let decl = self.sig.op(name).ok_or_else(|| TypeError::UnknownOp(name.clone()))?.clone();
                if args.len() != decl.arity {
                    return Err(TypeError::Arity { op: name.clone(), expected: decl.arity, found: args.len() });
                }
                match (&decl.param, param) {
                    (Some(pt), Some(pv)) => {
                        self.value(pv, &pt.into())?;
                    }
                    (None, None) => {}
                    (Some(pt), None) => {
                        return Err(TypeError::Param(name.clone(), format!("expected a parameter of type {pt}")))
                    }
                    (None, Some(_)) => return Err(TypeError::Param(name.clone(), "takes no parameter".into())),
                }
                let mut t = exp.clone();
                for a in args {
                    t = self.comp(a, &t)?;
                }
                Ok(t)
            }
            Comp::Const(c) => match self.sig.constant(c) {
                Some(AnyType::Comp(b)) => self.fit_c(m, b.into(), exp),
                Some(AnyType::Value(a)) => Err(self.mismatch_c(m, exp, &PC::Free(Box::new(a.into())))),
                None => Err(TypeError::UnknownConst(c.clone())),
            },
        }
    }

    fn binder_type(&mut self, head: &Comp) -> Result<ValueType, TypeError> {
        match self.comp(head, &PC::Free(Box::new(PV::Hole)))? {
            PC::Free(a) => a.complete().ok_or_else(|| TypeError::Ambiguous(short(format!("the result of `{head}`")))),
            _ => Err(TypeError::Ambiguous(short(format!("the result of `{head}`")))),
        }
    }
}

fn checker<'a>(sig: &'a Signature, ctx: &Context) -> Checker<'a> {
    Checker { sig, ctx: ctx.clone() }
}

pub fn infer_value(ctx: &Context, v: &Value, sig: &Signature) -> Result<ValueType, TypeError> {
    checker(sig, ctx).complete_value(v, &PV::Hole)
}

pub fn infer_comp(ctx: &Context, m: &Comp, sig: &Signature) -> Result<CompType, TypeError> {
    checker(sig, ctx).comp(m, &PC::Hole)?.complete().ok_or_else(|| TypeError::Ambiguous(short(format!("`{m}`"))))
}

/// Partial inference: holes mark positions the term leaves unconstrained.
pub fn infer_comp_partial(ctx: &Context, m: &Comp, sig: &Signature) -> Result<PC, TypeError> {
    checker(sig, ctx).comp(m, &PC::Hole)
}

pub fn check_value(ctx: &Context, v: &Value, a: &ValueType, sig: &Signature) -> Result<(), TypeError> {
    let mut c = checker(sig, ctx);
    c.wf_v(a)?;
    let got = c.value(v, &a.into())?;
    debug_assert_eq!(got.complete().as_ref(), Some(a));
    Ok(())
}

pub fn check_comp(ctx: &Context, m: &Comp, b: &CompType, sig: &Signature) -> Result<(), TypeError> {
    let mut c = checker(sig, ctx);
    c.wf_c(b)?;
    let got = c.comp(m, &b.into())?;
    debug_assert_eq!(got.complete().as_ref(), Some(b));
    Ok(())
}

/// Type of the head of `M to x. N`, used by the evaluator.
pub fn binder_type(ctx: &Context, head: &Comp, sig: &Signature) -> Result<ValueType, TypeError> {
    checker(sig, ctx).binder_type(head)
}

/// Complete type of a value in a position that must be inferable.
pub fn scrutinee_type(ctx: &Context, v: &Value, sig: &Signature) -> Result<ValueType, TypeError> {
    infer_value(ctx, v, sig)
}

/// Type of `f` in `f V` when the application has type `b`.
pub fn function_type(ctx: &Context, f: &Comp, b: &CompType, sig: &Signature) -> Result<CompType, TypeError> {
    let mut c = checker(sig, ctx);
    let t = c.comp(f, &PC::Arrow(Box::new(PV::Hole), Box::new(b.into())))?;
    t.complete().ok_or_else(|| TypeError::Ambiguous(short(format!("the function `{f}`"))))
}

/// Type of `p` in `fst p` or `snd p` when the projection has type `b`.
pub fn pair_type(ctx: &Context, p: &Comp, b: &CompType, first: bool, sig: &Signature) -> Result<CompType, TypeError> {
    let mut c = checker(sig, ctx);
    let want = if first {
        PC::With(Box::new(b.into()), Box::new(PC::Hole))
    } else {
        PC::With(Box::new(PC::Hole), Box::new(b.into()))
    };
    let t = c.comp(p, &want)?;
    t.complete().ok_or_else(|| TypeError::Ambiguous(short(format!("the pair `{p}`"))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_comp;

    fn sig() -> Signature {
        Signature::new()
            .with_value_base("b")
            .with_op("or", 2, None)
            .with_op("fail", 0, None)
            .with_const("a", AnyType::Value(ValueType::base("b")))
    }

    #[test]
    fn value_inference() {
        let s = sig();
        assert_eq!(infer_value(&Context::new(), &Value::Unit, &s).unwrap(), ValueType::Unit);
        let th = Value::thunk(Comp::ret(Value::Unit));
        assert_eq!(infer_value(&Context::new(), &th, &s).unwrap(), ValueType::thunk(CompType::free(ValueType::Unit)));
        let ctx = Context::new().extend("x", ValueType::Unit);
        let p = Value::pair(Value::var("x"), Value::var("x"));
        assert_eq!(infer_value(&ctx, &p, &s).unwrap(), ValueType::prod(ValueType::Unit, ValueType::Unit));
    }

    #[test]
    fn comp_inference() {
        let s = sig();
        let ctx = Context::new();
        assert_eq!(infer_comp(&ctx, &Comp::ret(Value::Unit), &s).unwrap(), CompType::free(ValueType::Unit));
        let m = Comp::lambda("x", None, Comp::ret(Value::var("x")));
        assert_eq!(infer_comp(&ctx, &m, &s), Err(TypeError::MissingAnnotation("x".into())));
        let m = parse_comp(r"\x : b. return x", &s).unwrap();
        assert_eq!(
            infer_comp(&ctx, &m, &s).unwrap(),
            CompType::arrow(ValueType::base("b"), CompType::free(ValueType::base("b")))
        );
        let m = parse_comp("or(return inl (); return inr ())", &s).unwrap();
        assert_eq!(infer_comp(&ctx, &m, &s).unwrap(), CompType::free(ValueType::bool()));
    }

    #[test]
    fn nullary_op_needs_checking() {
        let s = sig();
        let fail = Comp::op("fail", None, vec![]);
        assert!(matches!(infer_comp(&Context::new(), &fail, &s), Err(TypeError::Ambiguous(_))));
        check_comp(&Context::new(), &fail, &CompType::Top, &s).unwrap();
    }

    #[test]
    fn errors() {
        let s = sig();
        let ctx = Context::new();
        assert_eq!(infer_value(&ctx, &Value::var("y"), &s), Err(TypeError::Unbound("y".into())));
        let m = Comp::op("or", None, vec![Comp::ret(Value::Unit)]);
        assert!(matches!(infer_comp(&ctx, &m, &s), Err(TypeError::Arity { .. })));
        let m = parse_comp("or(return (); return a)", &s).unwrap();
        assert!(matches!(infer_comp(&ctx, &m, &s), Err(TypeError::Mismatch { .. })));
        let m = parse_comp("return inl () to x. return x", &s).unwrap();
        assert!(matches!(infer_comp(&ctx, &m, &s), Err(TypeError::Ambiguous(_))));
    }

    #[test]
    fn checking_against_a_different_type_fails() {
        let s = sig();
        let m = parse_comp("return a", &s).unwrap();
        assert!(check_comp(&Context::new(), &m, &CompType::free(ValueType::Unit), &s).is_err());
        assert!(check_comp(&Context::new(), &m, &CompType::free(ValueType::base("b")), &s).is_ok());
    }
}
