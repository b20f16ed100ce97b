//! The denotational interpreter.
//!
//! Evaluation is type-directed: every term is evaluated against its type, which
//! selects the computation object doing the sequencing. Variables are bound in an
//! environment; there is no substitution. Force and thunk are identities on
//! denotations.

use std::sync::Arc;

use thiserror::Error;

pub use crate::semcore::{interp_ctype, interp_vtype};
use crate::semcore::{FunVal, Kont, ModelRef, SemError, SemVal};
use crate::syntax::{Comp, CompType, Value, ValueType};
use crate::typecheck::{self, Context, TypeError};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error("type error: {0}")]
    Type(#[from] TypeError),
}

impl From<EvalError> for SemError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Sem(s) => s,
            EvalError::Type(t) => SemError::Defensive(t.to_string()),
        }
    }
}

/// Variables with their types and denotations, innermost last.
#[derive(Clone, Debug, Default)]
pub struct Env {
    entries: Arc<Vec<(String, ValueType, SemVal)>>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extend(&self, x: &str, a: ValueType, v: SemVal) -> Self {
        let mut entries = (*self.entries).clone();
        entries.push((x.to_string(), a, v));
        Env { entries: Arc::new(entries) }
    }

    pub fn lookup(&self, x: &str) -> Option<&SemVal> {
        self.entries.iter().rev().find(|(n, _, _)| n == x).map(|(_, _, v)| v)
    }

    pub fn context(&self) -> Context {
        Context::from_entries(self.entries.iter().map(|(n, a, _)| (n.clone(), a.clone())).collect())
    }

    pub fn entries(&self) -> &[(String, ValueType, SemVal)] {
        &self.entries
    }

    /// Splits an environment of a product model into its two component environments.
    fn split(&self) -> Result<(Env, Env), SemError> {
        let mut l = Vec::with_capacity(self.entries.len());
        let mut r = Vec::with_capacity(self.entries.len());
        for (n, a, v) in self.entries.iter() {
            let (x, y) = v.as_pair()?;
            l.push((n.clone(), a.clone(), x.clone()));
            r.push((n.clone(), a.clone(), y.clone()));
        }
        Ok((Env { entries: Arc::new(l) }, Env { entries: Arc::new(r) }))
    }
}

fn defensive(msg: String) -> EvalError {
    EvalError::Sem(SemError::Defensive(msg))
}

pub fn eval_value(model: &ModelRef, env: &Env, v: &Value, a: &ValueType) -> Result<SemVal, EvalError> {
    if let Some((l, r)) = model.components() {
        let (el, er) = env.split()?;
        return Ok(SemVal::pair(eval_value(&l, &el, v, a)?, eval_value(&r, &er, v, a)?));
    }
    Ok(match (v, a) {
        (Value::Var(x), _) => env.lookup(x).cloned().ok_or_else(|| TypeError::Unbound(x.clone()))?,
        (Value::Const(c), _) => model.const_interp(c)?,
        (Value::Unit, ValueType::Unit) => SemVal::Unit,
        (Value::Pair(x, y), ValueType::Prod(a1, a2)) => {
            SemVal::pair(eval_value(model, env, x, a1)?, eval_value(model, env, y, a2)?)
        }
        (Value::Inl(x), ValueType::Sum(a1, _)) => SemVal::inl(eval_value(model, env, x, a1)?),
        (Value::Inr(y), ValueType::Sum(_, a2)) => SemVal::inr(eval_value(model, env, y, a2)?),
        (Value::Thunk(m), ValueType::Thunk(b)) => eval_comp(model, env, m, b)?,
        _ => return Err(defensive(format!("value `{v}` at type {a}"))),
    })
}

pub fn eval_comp(model: &ModelRef, env: &Env, m: &Comp, b: &CompType) -> Result<SemVal, EvalError> {
    if let Some((l, r)) = model.components() {
        let (el, er) = env.split()?;
        return Ok(SemVal::pair(eval_comp(&l, &el, m, b)?, eval_comp(&r, &er, m, b)?));
    }
    let sig = model.signature();
    match m {
        Comp::Return(v) => {
            let CompType::Free(a) = b else { return Err(defensive(format!("`{m}` at type {b}"))) };
            let monad = model.monad().ok_or_else(|| defensive("model without a monad".into()))?;
            Ok(SemVal::Mon(monad.unit(eval_value(model, env, v, a)?)))
        }
        Comp::To(head, x, body) => {
            let a = typecheck::binder_type(&env.context(), head, sig)?;
            let t = eval_comp(model, env, head, &CompType::free(a.clone()))?;
            let obj = interp_ctype(model.as_ref(), b)?;
            let (model2, env2, x, body, b2) = (model.clone(), env.clone(), x.clone(), (**body).clone(), b.clone());
            let k: Kont =
                Arc::new(move |v| Ok(eval_comp(&model2, &env2.extend(&x, a.clone(), v.clone()), &body, &b2)?));
            Ok(obj.extend(&t, &k)?)
        }
        Comp::Force(v) => eval_value(model, env, v, &ValueType::thunk(b.clone())),
        Comp::Lambda(x, _, body) => {
            let CompType::Arrow(a, c) = b else { return Err(defensive(format!("`{m}` at type {b}"))) };
            let dom = interp_vtype(model.as_ref(), a)?;
            if dom.is_finite() {
                let mut rows = Vec::new();
                for v in dom.elements()? {
                    let r = eval_comp(model, &env.extend(x, (**a).clone(), v.clone()), body, c)?;
                    rows.push((v, r));
                }
                Ok(SemVal::Fun(FunVal::table(rows)))
            } else {
                let (model2, env2, x, body, a, c) =
                    (model.clone(), env.clone(), x.clone(), (**body).clone(), (**a).clone(), (**c).clone());
                Ok(SemVal::Fun(FunVal::closure(move |v| {
                    Ok(eval_comp(&model2, &env2.extend(&x, a.clone(), v.clone()), &body, &c)?)
                })))
            }
        }
        Comp::App(f, v) => {
            let ft = typecheck::function_type(&env.context(), f, b, sig)?;
            let CompType::Arrow(a, _) = &ft else { return Err(defensive(format!("`{f}` is not a function"))) };
            let fv = eval_comp(model, env, f, &ft)?;
            let arg = eval_value(model, env, v, a)?;
            Ok(fv.as_fun()?.apply(&arg)?)
        }
        Comp::CPair(p, q) => {
            let CompType::With(b1, b2) = b else { return Err(defensive(format!("`{m}` at type {b}"))) };
            Ok(SemVal::pair(eval_comp(model, env, p, b1)?, eval_comp(model, env, q, b2)?))
        }
        Comp::Proj1(p) | Comp::Proj2(p) => {
            let first = matches!(m, Comp::Proj1(_));
            let pt = typecheck::pair_type(&env.context(), p, b, first, sig)?;
            let pv = eval_comp(model, env, p, &pt)?;
            let (x, y) = pv.as_pair()?;
            Ok(if first { x.clone() } else { y.clone() })
        }
        Comp::PmPair(v, x, y, body) => {
            let ValueType::Prod(a1, a2) = typecheck::scrutinee_type(&env.context(), v, sig)? else {
                return Err(defensive(format!("`{v}` is not a pair")));
            };
            let pv = eval_value(model, env, v, &ValueType::Prod(a1.clone(), a2.clone()))?;
            let (p, q) = pv.as_pair()?;
            let env2 = env.extend(x, *a1, p.clone()).extend(y, *a2, q.clone());
            eval_comp(model, &env2, body, b)
        }
        Comp::Case(v, x, left, y, right) => {
            let ValueType::Sum(a1, a2) = typecheck::scrutinee_type(&env.context(), v, sig)? else {
                return Err(defensive(format!("`{v}` is not a sum")));
            };
            match eval_value(model, env, v, &ValueType::Sum(a1.clone(), a2.clone()))? {
                SemVal::Inl(p) => eval_comp(model, &env.extend(x, *a1, (*p).clone()), left, b),
                SemVal::Inr(q) => eval_comp(model, &env.extend(y, *a2, (*q).clone()), right, b),
                other => Err(defensive(format!("{other} is not an injection"))),
            }
        }
        Comp::CaseEmpty(v, _) => Err(defensive(format!("`{v}` inhabits the empty type"))),
        Comp::LetVal(x, v, body) => {
            let a = typecheck::scrutinee_type(&env.context(), v, sig)?;
            let val = eval_value(model, env, v, &a)?;
            eval_comp(model, &env.extend(x, a, val), body, b)
        }
        Comp::Op(name, param, args) => {
            let decl = sig.op(name).ok_or_else(|| TypeError::UnknownOp(name.clone()))?;
            let p = match (param, &decl.param) {
                (Some(v), Some(pt)) => Some(eval_value(model, env, v, pt)?),
                (None, None) => None,
                _ => {
                    return Err(TypeError::Param(
                        name.clone(),
                        "parameter presence differs from the declaration".into(),
                    )
                    .into())
                }
            };
            let vals: Vec<SemVal> = args.iter().map(|a| eval_comp(model, env, a, b)).collect::<Result<_, _>>()?;
            Ok(interp_ctype(model.as_ref(), b)?.op(name, p.as_ref(), &vals)?)
        }
        Comp::Const(c) => Ok(model.const_interp(c)?),
    }
}

/// Infers the type of a closed computation and evaluates it.
pub fn eval_closed(model: &ModelRef, m: &Comp) -> Result<(CompType, SemVal), EvalError> {
    let b = typecheck::infer_comp(&Context::new(), m, model.signature())?;
    let v = eval_comp(model, &Env::new(), m, &b)?;
    Ok((b, v))
}

/// Projects a product-model denotation onto a component.
pub fn project(v: &SemVal, first: bool) -> Result<SemVal, SemError> {
    let (x, y) = v.as_pair()?;
    Ok(if first { x.clone() } else { y.clone() })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::semcore::{parse_literal, AlgebraModel, Monad, ProductModel, SemSet, StorageModel};
    use crate::syntax::{parse_comp, Signature};

    fn nd() -> Signature {
        Signature::new().with_value_base("b").with_op("or", 2, None).with_op("fail", 0, None)
    }

    fn algebra(monad: Monad) -> ModelRef {
        let bases = BTreeMap::from([("b".to_string(), SemSet::atoms(["a", "c"]))]);
        Arc::new(AlgebraModel::new(nd(), monad, bases, BTreeMap::new(), BTreeMap::new()).unwrap())
    }

    fn run(model: &ModelRef, src: &str) -> String {
        let m = parse_comp(src, model.signature()).unwrap();
        eval_closed(model, &m).unwrap().1.to_string()
    }

    #[test]
    fn nondeterministic_choice() {
        let src = "or(return inl (); return inr ())";
        assert_eq!(run(&algebra(Monad::pfin()), src), "{inl (), inr ()}");
        assert_eq!(run(&algebra(Monad::list()), src), "[inl (), inr ()]");
    }

    #[test]
    fn sequencing_and_thunks() {
        let pf = algebra(Monad::pfin());
        assert_eq!(run(&pf, "return ()"), "{()}");
        assert_eq!(run(&pf, "force (thunk (return ()))"), "{()}");
        let src = "or(return inl (); return inr ()) to x. case x of { inl u. return () | inr v. fail }";
        assert_eq!(run(&pf, src), "{()}");
        assert_eq!(
            run(&algebra(Monad::list()), "or(return (); return ()) to x. or(return x; return x)"),
            "[(), (), (), ()]"
        );
    }

    #[test]
    fn functions_over_finite_domains_are_tables() {
        let pf = algebra(Monad::pfin());
        assert_eq!(run(&pf, r"\x : 1 + 1. return x"), "fun{inl () => {inl ()}, inr () => {inr ()}}");
        assert_eq!(run(&pf, r"(\x : 1. return x) ()"), "{()}");
    }

    #[test]
    fn closures_over_infinite_domains() {
        let l = algebra(Monad::list());
        let m = parse_comp(r"\x : U (F 1). force x", l.signature()).unwrap();
        let (_, f) = eval_closed(&l, &m).unwrap();
        let arg = parse_literal("[(), ()]").unwrap();
        assert_eq!(f.as_fun().unwrap().apply(&arg).unwrap(), arg);
    }

    #[test]
    fn storage_read() {
        let sig = Signature::new().with_value_base("b").with_op("read", 2, None).with_op("write_s1", 1, None);
        let bases = BTreeMap::from([("b".to_string(), SemSet::atoms(["a", "c"]))]);
        let sig = sig.with_const("a", crate::syntax::AnyType::Value(ValueType::base("b")));
        let sig = sig.with_const("c", crate::syntax::AnyType::Value(ValueType::base("b")));
        let consts = BTreeMap::from([("a".into(), SemVal::atom("a")), ("c".into(), SemVal::atom("c"))]);
        let m: ModelRef =
            Arc::new(StorageModel::new(sig, SemSet::atoms(["s0", "s1"]), bases, BTreeMap::new(), consts).unwrap());
        assert_eq!(run(&m, "read(return a; return c)"), "state[(a, s0), (c, s1)]");
        assert_eq!(run(&m, "write_s1(read(return a; return c))"), "state[(c, s1), (c, s1)]");
    }

    #[test]
    fn product_is_componentwise() {
        let p: ModelRef = Arc::new(ProductModel::new(algebra(Monad::pfin()), algebra(Monad::list())).unwrap());
        assert_eq!(run(&p, "or(return (); return ())"), "({()}, [(), ()])");
    }
}
