//! Helpers shared by the integration tests: a syntactic substitution oracle,
//! the standard signatures and one model per kind.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use cbpv_core::semcore::{AlgebraModel, ModelRef, Monad, ProductModel, SemSet, SemVal, StorageModel};
use cbpv_core::syntax::{AnyType, Comp, CompType, Generator, Signature, Value, ValueType};
use cbpv_core::typecheck::{check_comp, Context};
use rand::Rng;

/// `v[w/x]` for a closed `w`. Closedness means no binder can capture, so only
/// shadowing needs care.
pub fn subst_value(v: &Value, x: &str, w: &Value) -> Value {
    match v {
        Value::Var(y) if y == x => w.clone(),
        Value::Var(_) | Value::Unit | Value::Const(_) => v.clone(),
        Value::Pair(a, b) => Value::pair(subst_value(a, x, w), subst_value(b, x, w)),
        Value::Inl(a) => Value::inl(subst_value(a, x, w)),
        Value::Inr(a) => Value::inr(subst_value(a, x, w)),
        Value::Thunk(m) => Value::thunk(subst(m, x, w)),
    }
}

fn under(y: &str, body: &Comp, x: &str, w: &Value) -> Box<Comp> {
    Box::new(if y == x { body.clone() } else { subst(body, x, w) })
}

/// `m[w/x]` for a closed `w`.
pub fn subst(m: &Comp, x: &str, w: &Value) -> Comp {
    assert!(w.free_vars().is_empty(), "substituted value must be closed");
    let sv = |v: &Value| Box::new(subst_value(v, x, w));
    let sc = |n: &Comp| Box::new(subst(n, x, w));
    match m {
        Comp::Return(v) => Comp::Return(sv(v)),
        Comp::To(a, y, b) => Comp::To(sc(a), y.clone(), under(y, b, x, w)),
        Comp::Force(v) => Comp::Force(sv(v)),
        Comp::Lambda(y, ty, b) => Comp::Lambda(y.clone(), ty.clone(), under(y, b, x, w)),
        Comp::App(f, v) => Comp::App(sc(f), sv(v)),
        Comp::CPair(a, b) => Comp::CPair(sc(a), sc(b)),
        Comp::Proj1(a) => Comp::Proj1(sc(a)),
        Comp::Proj2(a) => Comp::Proj2(sc(a)),
        Comp::PmPair(v, y, z, b) => {
            let body = if y == x || z == x { b.clone() } else { sc(b) };
            Comp::PmPair(sv(v), y.clone(), z.clone(), body)
        }
        Comp::Case(v, y, l, z, r) => Comp::Case(sv(v), y.clone(), under(y, l, x, w), z.clone(), under(z, r, x, w)),
        Comp::CaseEmpty(v, b) => Comp::CaseEmpty(sv(v), b.clone()),
        Comp::LetVal(y, v, b) => Comp::LetVal(y.clone(), sv(v), under(y, b, x, w)),
        Comp::Op(name, p, args) => {
            Comp::Op(name.clone(), p.as_ref().map(|p| sv(p)), args.iter().map(|a| subst(a, x, w)).collect())
        }
        Comp::Const(_) => m.clone(),
    }
}

pub fn ab() -> SemSet {
    SemSet::atoms(["a", "b"])
}

/// The base type `b` with constants `c` and `d` naming its two elements.
fn base_sig() -> Signature {
    let b = || AnyType::Value(ValueType::base("b"));
    Signature::new().with_value_base("b").with_const("c", b()).with_const("d", b())
}

pub fn nd_sig() -> Signature {
    base_sig().with_op("or", 2, None).with_op("fail", 0, None)
}

pub fn exc_sig() -> Signature {
    base_sig().with_op("raise_e1", 0, None).with_op("raise_e2", 0, None)
}

pub fn state_sig() -> Signature {
    base_sig().with_op("read", 2, None).with_op("write_s0", 1, None).with_op("write_s1", 1, None)
}

fn bases() -> BTreeMap<String, SemSet> {
    BTreeMap::from([("b".to_string(), ab())])
}

pub fn consts() -> BTreeMap<String, SemVal> {
    BTreeMap::from([("c".to_string(), SemVal::atom("a")), ("d".to_string(), SemVal::atom("b"))])
}

pub fn algebra(sig: &Signature, m: Monad) -> ModelRef {
    algebra_with(sig, m, consts())
}

pub fn algebra_with(sig: &Signature, m: Monad, consts: BTreeMap<String, SemVal>) -> ModelRef {
    Arc::new(AlgebraModel::new(sig.clone(), m, bases(), BTreeMap::new(), consts).unwrap())
}

pub fn free_monad() -> Monad {
    AlgebraModel::free_monad(&nd_sig(), &bases()).unwrap()
}

/// One model of every kind, each paired with its signature.
pub fn model_kinds() -> Vec<(&'static str, ModelRef)> {
    let states = || SemSet::atoms(["s0", "s1"]);
    let nd = nd_sig();
    vec![
        ("pfin", algebra(&nd, Monad::pfin())),
        ("list", algebra(&nd, Monad::list())),
        ("free", algebra(&nd, free_monad())),
        ("exception", algebra(&exc_sig(), Monad::exception(SemSet::atoms(["e1", "e2"])).unwrap())),
        ("state", algebra(&state_sig(), Monad::state(states()).unwrap())),
        ("storage", Arc::new(StorageModel::new(state_sig(), states(), bases(), BTreeMap::new(), consts()).unwrap())),
        ("product", Arc::new(ProductModel::new(algebra(&nd, Monad::pfin()), algebra(&nd, Monad::list())).unwrap())),
    ]
}

/// A redex and its contractum, both closed of type `ty`.
pub struct BetaInstance {
    pub law: &'static str,
    pub redex: Comp,
    pub reduct: Comp,
    pub ty: CompType,
}

fn binder_types() -> Vec<ValueType> {
    let b = || ValueType::base("b");
    vec![b(), ValueType::Unit, ValueType::bool(), ValueType::prod(b(), b()), ValueType::sum(b(), ValueType::Unit)]
}

/// Result types whose denotations are closure-free in every model kind.
fn result_types() -> Vec<CompType> {
    let b = || ValueType::base("b");
    vec![
        CompType::free(b()),
        CompType::free(ValueType::sum(ValueType::Unit, b())),
        CompType::arrow(b(), CompType::free(b())),
        CompType::with(CompType::free(b()), CompType::free(ValueType::Unit)),
        CompType::arrow(ValueType::bool(), CompType::free(ValueType::prod(b(), ValueType::Unit))),
    ]
}

/// `n` instances cycling through the β-laws, deterministic in `seed`. Redexes
/// the bidirectional checker cannot type (an unannotated `inl V` in synthesis
/// position, say) are regenerated.
pub fn beta_instances(sig: &Signature, seed: u64, n: usize) -> Vec<BetaInstance> {
    let (avs, bs) = (binder_types(), result_types());
    let mut g = Generator::new(sig, seed);
    for a in &avs {
        g.add_binder_type(a.clone());
    }
    let mut out = Vec::with_capacity(n);
    let mut i = 0usize;
    while out.len() < n {
        let a = avs[g.rng().gen_range(0..avs.len())].clone();
        let a2 = avs[g.rng().gen_range(0..avs.len())].clone();
        let ty = bs[g.rng().gen_range(0..bs.len())].clone();
        let got = beta_instance(&mut g, i % 8, &a, &a2, &ty);
        i += 1;
        let typed = |m: &Comp| check_comp(&Context::new(), m, &ty, sig).is_ok();
        if let Some(inst) = got.filter(|x| typed(&x.redex) && typed(&x.reduct)) {
            out.push(inst);
        }
    }
    out
}

fn beta_instance(g: &mut Generator, law: usize, a: &ValueType, a2: &ValueType, ty: &CompType) -> Option<BetaInstance> {
    let (y, z) = ("y".to_string(), "z".to_string());
    let v = g.closed_value(a, 2)?;
    let open = |g: &mut Generator, ctx: &[(String, ValueType)]| g.open_comp(ctx, ty, 3);
    let mk = |law, redex, reduct| Some(BetaInstance { law, redex, reduct, ty: ty.clone() });
    match law {
        0..=2 => {
            let m = open(g, &[(y.clone(), a.clone())])?;
            let reduct = subst(&m, &y, &v);
            match law {
                0 => mk("lambda", Comp::app(Comp::lambda(&y, Some(a.clone()), m), v), reduct),
                1 => mk("return-to", Comp::to(Comp::ret(v), &y, m), reduct),
                _ => mk("let", Comp::LetVal(y, Box::new(v), Box::new(m)), reduct),
            }
        }
        3 => {
            let n = g.closed_comp(ty, 3)?;
            mk("force-thunk", Comp::force(Value::thunk(n.clone())), n)
        }
        4 | 5 => {
            let (n1, n2) = (g.closed_comp(ty, 3)?, g.closed_comp(ty, 3)?);
            let pair = Comp::CPair(Box::new(n1.clone()), Box::new(n2.clone()));
            if law == 4 {
                mk("fst", Comp::Proj1(Box::new(pair)), n1)
            } else {
                mk("snd", Comp::Proj2(Box::new(pair)), n2)
            }
        }
        6 => {
            // `inl V` cannot synthesize its type, so the scrutinee arrives through an
            // annotated binder: `(\s : A + A2. case s of ...) (inl V)`.
            let m = open(g, &[(y.clone(), a.clone())])?;
            let other = open(g, &[(z.clone(), a2.clone())])?;
            let reduct = subst(&m, &y, &v);
            let s = Value::var("s");
            let (law, case, arg, sum) = if g.rng().gen_bool(0.5) {
                let sum = ValueType::sum(a.clone(), a2.clone());
                ("case-inl", Comp::Case(Box::new(s), y, Box::new(m), z, Box::new(other)), Value::inl(v), sum)
            } else {
                let sum = ValueType::sum(a2.clone(), a.clone());
                ("case-inr", Comp::Case(Box::new(s), z, Box::new(other), y, Box::new(m)), Value::inr(v), sum)
            };
            mk(law, Comp::app(Comp::lambda("s", Some(sum), case), arg), reduct)
        }
        _ => {
            let w = g.closed_value(a2, 2)?;
            let m = open(g, &[(y.clone(), a.clone()), (z.clone(), a2.clone())])?;
            let reduct = subst(&subst(&m, &y, &v), &z, &w);
            mk("pm", Comp::PmPair(Box::new(Value::pair(v, w)), y, z, Box::new(m)), reduct)
        }
    }
}
