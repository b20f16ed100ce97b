//! Computation objects and the three model constructions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::monad::{Monad, MonadKind, OpInstance};
use super::set::{FreeOp, SemSet};
use super::value::{FunVal, MonVal, SemVal};
use super::SemError;
use crate::syntax::{AnyType, CompType, Signature, ValueType};

/// A continuation into a computation carrier. Shared so that power objects can
/// capture it in closures.
pub type Kont = Arc<dyn Fn(&SemVal) -> Result<SemVal, SemError> + Send + Sync>;

/// A finite Eilenberg–Moore algebra given by operation tables.
#[derive(Debug)]
pub struct BaseAlgebra {
    pub name: String,
    monad: Arc<Monad>,
    carrier: Vec<SemVal>,
    tables: BTreeMap<String, BTreeMap<Vec<SemVal>, SemVal>>,
}

impl BaseAlgebra {
    /// Builds the algebra and validates it: every table is total on the carrier,
    /// each operation agrees with the structure map, and the multiplication law
    /// holds on `T T Y` (bounded to rank 2 when infinite).
    pub fn new(
        name: &str,
        monad: Arc<Monad>,
        carrier: Vec<SemVal>,
        entries: Vec<(OpInstance, Vec<SemVal>, SemVal)>,
    ) -> Result<Self, SemError> {
        let bad = |msg: String| SemError::Config(format!("algebra `{name}`: {msg}"));
        let distinct: BTreeSet<&SemVal> = carrier.iter().collect();
        if distinct.len() != carrier.len() {
            return Err(bad("duplicate carrier element".into()));
        }
        let mut tables: BTreeMap<String, BTreeMap<Vec<SemVal>, SemVal>> = BTreeMap::new();
        for (inst, args, res) in entries {
            let arity = monad.arity(&inst);
            if args.len() != arity {
                return Err(bad(format!("`{inst}` takes {arity} arguments, entry has {}", args.len())));
            }
            if let Some(x) = args.iter().chain([&res]).find(|x| !carrier.contains(x)) {
                return Err(bad(format!("{x} is not in the carrier")));
            }
            let table = tables.entry(inst.to_string()).or_default();
            if table.get(&args).is_some_and(|r| *r != res) {
                return Err(bad(format!("conflicting entries for `{inst}`")));
            }
            table.insert(args, res);
        }
        let alg = BaseAlgebra { name: name.to_string(), monad, carrier, tables };
        alg.validate().map_err(|e| match e {
            SemError::Config(m) => bad(m),
            other => other,
        })?;
        Ok(alg)
    }

    fn validate(&self) -> Result<(), SemError> {
        let known: BTreeSet<String> = self.monad.instances()?.iter().map(|i| i.to_string()).collect();
        if let Some(extra) = self.tables.keys().find(|k| !known.contains(*k)) {
            return Err(SemError::Config(format!("`{extra}` is not an operation of {}", self.monad)));
        }
        for inst in self.monad.instances()? {
            let arity = self.monad.arity(&inst);
            for args in tuples(&self.carrier, arity) {
                let direct = self
                    .tables
                    .get(&inst.to_string())
                    .and_then(|t| t.get(&args))
                    .ok_or_else(|| SemError::Config(format!("no entry for `{inst}` at ({})", join(&args))))?;
                let free_args: Vec<MonVal> = args.iter().map(|a| self.monad.unit(a.clone())).collect();
                let via = self.structure(&self.monad.op_instance(&inst, &free_args)?)?;
                if *direct != via {
                    return Err(SemError::Config(format!(
                        "`{inst}`({}) is {direct} but the structure map gives {via}",
                        join(&args)
                    )));
                }
            }
        }
        let ty = self.monad.apply(&SemSet::finite(self.carrier.clone()));
        let tty = self.monad.apply(&ty);
        let outer = if tty.is_finite() { tty.elements()? } else { tty.bounded(2)? };
        for tt in outer {
            let tt = tt.as_mon()?;
            let flat = self.monad.bind(tt, &mut |t| Ok(t.as_mon()?.clone()))?;
            let inner = self.monad.map(tt, &mut |t| self.structure(t.as_mon()?))?;
            let (l, r) = (self.structure(&flat)?, self.structure(&inner)?);
            if l != r {
                return Err(SemError::Config(format!("multiplication law fails at {tt}: {l} vs {r}")));
            }
        }
        Ok(())
    }

    pub fn carrier(&self) -> &[SemVal] {
        &self.carrier
    }

    pub fn monad(&self) -> &Arc<Monad> {
        &self.monad
    }

    pub fn op(&self, inst: &OpInstance, args: &[SemVal]) -> Result<SemVal, SemError> {
        self.tables.get(&inst.to_string()).and_then(|t| t.get(args)).cloned().ok_or_else(|| {
            SemError::Defensive(format!("algebra `{}` has no entry for `{inst}`({})", self.name, join(args)))
        })
    }

    /// The structure map `T Y -> Y`.
    pub fn structure(&self, t: &MonVal) -> Result<SemVal, SemError> {
        self.monad.fold(t, &mut |y| Ok(y.clone()), &mut |inst, ys| self.op(inst, &ys))
    }
}

fn tuples(xs: &[SemVal], n: usize) -> Vec<Vec<SemVal>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                xs.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn join(xs: &[SemVal]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// The interpretation of a computation type: a carrier with sequencing and
/// operations. Force is invisible, so the carrier is also `U` of the object.
#[derive(Clone, Debug)]
pub enum CompObject {
    /// `F X` as the free algebra `T X`; for storage models `T` is the state monad.
    FreeAlg {
        monad: Arc<Monad>,
        x: SemSet,
    },
    BaseAlg(Arc<BaseAlgebra>),
    /// A storage base type `S => Y`.
    StateBase {
        name: String,
        monad: Arc<Monad>,
        y: SemSet,
    },
    Power {
        dom: SemSet,
        cod: Box<CompObject>,
    },
    With(Box<CompObject>, Box<CompObject>),
    Top,
    /// Product models: one object per component.
    Pair(Box<CompObject>, Box<CompObject>),
}

impl CompObject {
    pub fn carrier(&self) -> SemSet {
        match self {
            CompObject::FreeAlg { monad, x } => monad.apply(x),
            CompObject::BaseAlg(a) => SemSet::finite(a.carrier.clone()),
            CompObject::StateBase { monad, y, .. } => {
                SemSet::fun(monad.state_set().unwrap_or(SemSet::Empty), y.clone())
            }
            CompObject::Power { dom, cod } => SemSet::fun(dom.clone(), cod.carrier()),
            CompObject::With(a, b) | CompObject::Pair(a, b) => SemSet::prod(a.carrier(), b.carrier()),
            CompObject::Top => SemSet::Unit,
        }
    }

    /// Sequencing: given `t` in `T X` and `k : X -> carrier`, the extension of `k`.
    pub fn extend(&self, t: &SemVal, k: &Kont) -> Result<SemVal, SemError> {
        match self {
            CompObject::FreeAlg { monad, .. } => {
                Ok(SemVal::Mon(monad.bind(t.as_mon()?, &mut |x| Ok(k(x)?.as_mon()?.clone()))?))
            }
            CompObject::BaseAlg(alg) => alg.monad.fold(t.as_mon()?, &mut |x| k(x), &mut |inst, ys| alg.op(inst, &ys)),
            CompObject::StateBase { monad, .. } => {
                let (MonadKind::State(states), MonVal::State(table)) = (monad.kind(), t.as_mon()?) else {
                    return Err(SemError::Defensive(format!("{t} is not a state table")));
                };
                let mut rows = Vec::with_capacity(states.len());
                for (s, (x, s1)) in states.iter().zip(table.iter()) {
                    rows.push((s.clone(), k(x)?.as_fun()?.apply(s1)?));
                }
                Ok(SemVal::Fun(FunVal::table(rows)))
            }
            CompObject::Power { dom, cod } => {
                let at = |a: SemVal| -> Kont {
                    let k = k.clone();
                    Arc::new(move |x| k(x)?.as_fun()?.apply(&a))
                };
                if dom.is_finite() {
                    let mut rows = Vec::new();
                    for a in dom.elements()? {
                        rows.push((a.clone(), cod.extend(t, &at(a))?));
                    }
                    Ok(SemVal::Fun(FunVal::table(rows)))
                } else {
                    let (cod, t, k) = (cod.clone(), t.clone(), k.clone());
                    Ok(SemVal::Fun(FunVal::closure(move |a| {
                        let (k, a) = (k.clone(), a.clone());
                        let ka: Kont = Arc::new(move |x| k(x)?.as_fun()?.apply(&a));
                        cod.extend(&t, &ka)
                    })))
                }
            }
            CompObject::With(a, b) => {
                let (k1, k2) = (k.clone(), k.clone());
                let left: Kont = Arc::new(move |x| Ok(k1(x)?.as_pair()?.0.clone()));
                let right: Kont = Arc::new(move |x| Ok(k2(x)?.as_pair()?.1.clone()));
                Ok(SemVal::pair(a.extend(t, &left)?, b.extend(t, &right)?))
            }
            CompObject::Top => Ok(SemVal::Unit),
            CompObject::Pair(..) => {
                Err(SemError::Defensive("product-model objects sequence componentwise, not through extend".into()))
            }
        }
    }

    /// Interprets an algebraic operation on carrier elements.
    pub fn op(&self, name: &str, param: Option<&SemVal>, args: &[SemVal]) -> Result<SemVal, SemError> {
        match self {
            CompObject::FreeAlg { monad, .. } => {
                let mons: Vec<MonVal> = args.iter().map(|a| a.as_mon().cloned()).collect::<Result<_, _>>()?;
                Ok(SemVal::Mon(monad.op(name, param, &mons)?))
            }
            CompObject::BaseAlg(alg) => alg.op(&alg.monad.resolve(name, param)?, args),
            CompObject::StateBase { monad, .. } => {
                let states = monad.states().unwrap_or_default();
                let rows: Vec<(SemVal, SemVal)> = match monad.resolve(name, param)? {
                    OpInstance::Read => states
                        .iter()
                        .zip(args)
                        .map(|(s, a)| Ok((s.clone(), a.as_fun()?.apply(s)?)))
                        .collect::<Result<_, SemError>>()?,
                    OpInstance::Write(s1) => {
                        let v = args
                            .first()
                            .ok_or_else(|| SemError::Defensive("write takes one argument".into()))?
                            .as_fun()?
                            .apply(&s1)?;
                        states.iter().map(|s| (s.clone(), v.clone())).collect()
                    }
                    other => return Err(SemError::Defensive(format!("`{other}` is not a storage operation"))),
                };
                Ok(SemVal::Fun(FunVal::table(rows)))
            }
            CompObject::Power { dom, cod } => {
                if dom.is_finite() {
                    let mut rows = Vec::new();
                    for a in dom.elements()? {
                        let at: Vec<SemVal> = args.iter().map(|f| f.as_fun()?.apply(&a)).collect::<Result<_, _>>()?;
                        rows.push((a, cod.op(name, param, &at)?));
                    }
                    Ok(SemVal::Fun(FunVal::table(rows)))
                } else {
                    let (cod, name, param, args) = (cod.clone(), name.to_string(), param.cloned(), args.to_vec());
                    Ok(SemVal::Fun(FunVal::closure(move |a| {
                        let at: Vec<SemVal> = args.iter().map(|f| f.as_fun()?.apply(a)).collect::<Result<_, _>>()?;
                        cod.op(&name, param.as_ref(), &at)
                    })))
                }
            }
            CompObject::With(a, b) => {
                let firsts: Vec<SemVal> =
                    args.iter().map(|x| Ok(x.as_pair()?.0.clone())).collect::<Result<_, SemError>>()?;
                let seconds: Vec<SemVal> =
                    args.iter().map(|x| Ok(x.as_pair()?.1.clone())).collect::<Result<_, SemError>>()?;
                Ok(SemVal::pair(a.op(name, param, &firsts)?, b.op(name, param, &seconds)?))
            }
            CompObject::Top => Ok(SemVal::Unit),
            CompObject::Pair(a, b) => {
                let (p1, p2) = match param {
                    Some(p) => {
                        let (x, y) = p.as_pair()?;
                        (Some(x), Some(y))
                    }
                    None => (None, None),
                };
                let firsts: Vec<SemVal> =
                    args.iter().map(|x| Ok(x.as_pair()?.0.clone())).collect::<Result<_, SemError>>()?;
                let seconds: Vec<SemVal> =
                    args.iter().map(|x| Ok(x.as_pair()?.1.clone())).collect::<Result<_, SemError>>()?;
                Ok(SemVal::pair(a.op(name, p1, &firsts)?, b.op(name, p2, &seconds)?))
            }
        }
    }
}

/// A CBPV model over sets.
pub trait Model: Send + Sync + fmt::Debug {
    /// `algebra`, `storage` or `product`.
    fn kind(&self) -> &'static str;
    fn signature(&self) -> &Signature;
    /// `None` for product models, whose components carry their own monads.
    fn monad(&self) -> Option<&Arc<Monad>>;
    fn base_vtype(&self, name: &str) -> Result<SemSet, SemError>;
    fn base_ctype(&self, name: &str) -> Result<CompObject, SemError>;
    fn free_obj(&self, x: &SemSet) -> Result<CompObject, SemError>;
    fn power_obj(&self, x: &SemSet, o: CompObject) -> Result<CompObject, SemError> {
        Ok(CompObject::Power { dom: x.clone(), cod: Box::new(o) })
    }
    fn with_obj(&self, a: CompObject, b: CompObject) -> Result<CompObject, SemError> {
        Ok(CompObject::With(Box::new(a), Box::new(b)))
    }
    fn top_obj(&self) -> CompObject {
        CompObject::Top
    }
    fn const_interp(&self, name: &str) -> Result<SemVal, SemError>;
    fn components(&self) -> Option<(ModelRef, ModelRef)> {
        None
    }
}

pub type ModelRef = Arc<dyn Model>;

pub fn interp_vtype(model: &dyn Model, a: &ValueType) -> Result<SemSet, SemError> {
    if let Some((l, r)) = model.components() {
        return Ok(SemSet::prod(interp_vtype(l.as_ref(), a)?, interp_vtype(r.as_ref(), a)?));
    }
    Ok(match a {
        ValueType::Base(n) => model.base_vtype(n)?,
        ValueType::Unit => SemSet::Unit,
        ValueType::Empty => SemSet::Empty,
        ValueType::Prod(x, y) => SemSet::prod(interp_vtype(model, x)?, interp_vtype(model, y)?),
        ValueType::Sum(x, y) => SemSet::sum(interp_vtype(model, x)?, interp_vtype(model, y)?),
        ValueType::Thunk(b) => interp_ctype(model, b)?.carrier(),
    })
}

pub fn interp_ctype(model: &dyn Model, b: &CompType) -> Result<CompObject, SemError> {
    if let Some((l, r)) = model.components() {
        return Ok(CompObject::Pair(Box::new(interp_ctype(l.as_ref(), b)?), Box::new(interp_ctype(r.as_ref(), b)?)));
    }
    match b {
        CompType::Base(n) => model.base_ctype(n),
        CompType::Free(a) => model.free_obj(&interp_vtype(model, a)?),
        CompType::Top => Ok(model.top_obj()),
        CompType::With(x, y) => model.with_obj(interp_ctype(model, x)?, interp_ctype(model, y)?),
        CompType::Arrow(a, c) => model.power_obj(&interp_vtype(model, a)?, interp_ctype(model, c)?),
    }
}

/// Interprets a value type that mentions no thunks, from base carriers alone.
/// Operation parameters must be of this kind.
pub fn first_order_interp(a: &ValueType, bases: &BTreeMap<String, SemSet>) -> Result<SemSet, SemError> {
    Ok(match a {
        ValueType::Base(n) => bases.get(n).cloned().ok_or_else(|| SemError::UnknownBase(n.clone()))?,
        ValueType::Unit => SemSet::Unit,
        ValueType::Empty => SemSet::Empty,
        ValueType::Prod(x, y) => SemSet::prod(first_order_interp(x, bases)?, first_order_interp(y, bases)?),
        ValueType::Sum(x, y) => SemSet::sum(first_order_interp(x, bases)?, first_order_interp(y, bases)?),
        ValueType::Thunk(_) => return Err(SemError::Config(format!("operation parameter type {a} mentions a thunk"))),
    })
}

/// Data shared by algebra and storage models.
#[derive(Debug)]
struct Interps {
    sig: Signature,
    bases: BTreeMap<String, SemSet>,
    consts: BTreeMap<String, SemVal>,
}

impl Interps {
    fn new(
        sig: Signature,
        monad: &Monad,
        bases: BTreeMap<String, SemSet>,
        consts: BTreeMap<String, SemVal>,
    ) -> Result<Self, SemError> {
        sig.validate().map_err(|e| SemError::Config(e.to_string()))?;
        same_keys("value base", sig.value_bases.iter(), bases.keys())?;
        monad.check_signature(&sig)?;
        for op in &sig.operations {
            if let Some(pt) = &op.param {
                for p in first_order_interp(pt, &bases)?.elements()? {
                    monad.resolve(&op.name, Some(&p))?;
                }
            }
        }
        Ok(Interps { sig, bases, consts })
    }

    fn base_vtype(&self, name: &str) -> Result<SemSet, SemError> {
        self.bases.get(name).cloned().ok_or_else(|| SemError::UnknownBase(name.to_string()))
    }

    fn const_interp(&self, name: &str) -> Result<SemVal, SemError> {
        self.consts.get(name).cloned().ok_or_else(|| SemError::UnknownConst(name.to_string()))
    }
}

fn same_keys<'a>(
    what: &str,
    declared: impl Iterator<Item = &'a String>,
    given: impl Iterator<Item = &'a String>,
) -> Result<(), SemError> {
    let d: BTreeSet<&String> = declared.collect();
    let g: BTreeSet<&String> = given.collect();
    if let Some(missing) = d.difference(&g).next() {
        return Err(SemError::Config(format!("no interpretation for {what} `{missing}`")));
    }
    if let Some(extra) = g.difference(&d).next() {
        return Err(SemError::Config(format!("{what} `{extra}` is not declared in the signature")));
    }
    Ok(())
}

/// Checks that every declared constant is interpreted inside its type's carrier.
fn check_consts(model: &dyn Model, consts: &BTreeMap<String, SemVal>) -> Result<(), SemError> {
    let sig = model.signature();
    same_keys("constant", sig.constants.keys(), consts.keys())?;
    for (name, ty) in &sig.constants {
        let v = &consts[name];
        let carrier = match ty {
            AnyType::Value(a) => interp_vtype(model, a)?,
            AnyType::Comp(b) => interp_ctype(model, b)?.carrier(),
        };
        if !carrier.contains(v) {
            return Err(SemError::NotInCarrier { value: format!("{v} (constant `{name}`)"), ty: ty_string(ty) });
        }
    }
    Ok(())
}

fn ty_string(t: &AnyType) -> String {
    match t {
        AnyType::Value(a) => a.to_string(),
        AnyType::Comp(b) => b.to_string(),
    }
}

/// Computation types as algebras of a monad.
#[derive(Debug)]
pub struct AlgebraModel {
    monad: Arc<Monad>,
    interps: Interps,
    comp_bases: BTreeMap<String, Arc<BaseAlgebra>>,
}

impl AlgebraModel {
    pub fn new(
        sig: Signature,
        monad: Monad,
        bases: BTreeMap<String, SemSet>,
        comp_bases: BTreeMap<String, BaseAlgebra>,
        consts: BTreeMap<String, SemVal>,
    ) -> Result<Self, SemError> {
        let interps = Interps::new(sig, &monad, bases, consts)?;
        same_keys("computation base", interps.sig.comp_bases.iter(), comp_bases.keys())?;
        if let Some(alg) = comp_bases.values().find(|a| *a.monad != monad) {
            return Err(SemError::Config(format!("algebra `{}` is over {}, not {monad}", alg.name, alg.monad)));
        }
        let model = AlgebraModel {
            monad: Arc::new(monad),
            interps,
            comp_bases: comp_bases.into_iter().map(|(k, v)| (k, Arc::new(v))).collect(),
        };
        check_consts(&model, &model.interps.consts)?;
        Ok(model)
    }

    /// The free monad on a signature's operations, with parameter carriers taken
    /// from the base interpretations.
    pub fn free_monad(sig: &Signature, bases: &BTreeMap<String, SemSet>) -> Result<Monad, SemError> {
        let ops = sig
            .operations
            .iter()
            .map(|o| {
                Ok(FreeOp {
                    name: o.name.clone(),
                    arity: o.arity,
                    param: o.param.as_ref().map(|p| first_order_interp(p, bases)).transpose()?,
                })
            })
            .collect::<Result<Vec<_>, SemError>>()?;
        Ok(Monad::free(ops))
    }
}

impl Model for AlgebraModel {
    fn kind(&self) -> &'static str {
        "algebra"
    }

    fn signature(&self) -> &Signature {
        &self.interps.sig
    }

    fn monad(&self) -> Option<&Arc<Monad>> {
        Some(&self.monad)
    }

    fn base_vtype(&self, name: &str) -> Result<SemSet, SemError> {
        self.interps.base_vtype(name)
    }

    fn base_ctype(&self, name: &str) -> Result<CompObject, SemError> {
        self.comp_bases
            .get(name)
            .map(|a| CompObject::BaseAlg(a.clone()))
            .ok_or_else(|| SemError::UnknownBase(name.to_string()))
    }

    fn free_obj(&self, x: &SemSet) -> Result<CompObject, SemError> {
        Ok(CompObject::FreeAlg { monad: self.monad.clone(), x: x.clone() })
    }

    fn const_interp(&self, name: &str) -> Result<SemVal, SemError> {
        self.interps.const_interp(name)
    }
}

/// The adjunction `(-) x S -| S => (-)`: computation types are sets, `F X` is
/// `S => X x S`, and a computation base type `Y` is `S => Y`.
#[derive(Debug)]
pub struct StorageModel {
    monad: Arc<Monad>,
    interps: Interps,
    comp_bases: BTreeMap<String, SemSet>,
}

impl StorageModel {
    pub fn new(
        sig: Signature,
        states: SemSet,
        bases: BTreeMap<String, SemSet>,
        comp_bases: BTreeMap<String, SemSet>,
        consts: BTreeMap<String, SemVal>,
    ) -> Result<Self, SemError> {
        let monad = Monad::state(states)?;
        let interps = Interps::new(sig, &monad, bases, consts)?;
        same_keys("computation base", interps.sig.comp_bases.iter(), comp_bases.keys())?;
        let model = StorageModel { monad: Arc::new(monad), interps, comp_bases };
        check_consts(&model, &model.interps.consts)?;
        Ok(model)
    }

    pub fn states(&self) -> &[SemVal] {
        self.monad.states().unwrap_or_default()
    }
}

impl Model for StorageModel {
    fn kind(&self) -> &'static str {
        "storage"
    }

    fn signature(&self) -> &Signature {
        &self.interps.sig
    }

    fn monad(&self) -> Option<&Arc<Monad>> {
        Some(&self.monad)
    }

    fn base_vtype(&self, name: &str) -> Result<SemSet, SemError> {
        self.interps.base_vtype(name)
    }

    fn base_ctype(&self, name: &str) -> Result<CompObject, SemError> {
        let y = self.comp_bases.get(name).ok_or_else(|| SemError::UnknownBase(name.to_string()))?;
        Ok(CompObject::StateBase { name: name.to_string(), monad: self.monad.clone(), y: y.clone() })
    }

    fn free_obj(&self, x: &SemSet) -> Result<CompObject, SemError> {
        Ok(CompObject::FreeAlg { monad: self.monad.clone(), x: x.clone() })
    }

    fn const_interp(&self, name: &str) -> Result<SemVal, SemError> {
        self.interps.const_interp(name)
    }
}

/// The componentwise product of two models over one signature.
#[derive(Debug)]
pub struct ProductModel {
    left: ModelRef,
    right: ModelRef,
}

impl ProductModel {
    pub fn new(left: ModelRef, right: ModelRef) -> Result<Self, SemError> {
        if left.signature() != right.signature() {
            return Err(SemError::Config("product components must share one signature".into()));
        }
        Ok(ProductModel { left, right })
    }

    pub fn left(&self) -> &ModelRef {
        &self.left
    }

    pub fn right(&self) -> &ModelRef {
        &self.right
    }
}

fn split(x: &SemSet) -> Result<(SemSet, SemSet), SemError> {
    match x {
        SemSet::Prod(a, b) => Ok(((**a).clone(), (**b).clone())),
        other => Err(SemError::Defensive(format!("{other} is not a product-model carrier"))),
    }
}

fn split_obj(o: CompObject) -> Result<(CompObject, CompObject), SemError> {
    match o {
        CompObject::Pair(a, b) => Ok((*a, *b)),
        other => Err(SemError::Defensive(format!("{other:?} is not a product-model object"))),
    }
}

impl Model for ProductModel {
    fn kind(&self) -> &'static str {
        "product"
    }

    fn signature(&self) -> &Signature {
        self.left.signature()
    }

    fn monad(&self) -> Option<&Arc<Monad>> {
        None
    }

    fn base_vtype(&self, name: &str) -> Result<SemSet, SemError> {
        Ok(SemSet::prod(self.left.base_vtype(name)?, self.right.base_vtype(name)?))
    }

    fn base_ctype(&self, name: &str) -> Result<CompObject, SemError> {
        Ok(CompObject::Pair(Box::new(self.left.base_ctype(name)?), Box::new(self.right.base_ctype(name)?)))
    }

    fn free_obj(&self, x: &SemSet) -> Result<CompObject, SemError> {
        let (a, b) = split(x)?;
        Ok(CompObject::Pair(Box::new(self.left.free_obj(&a)?), Box::new(self.right.free_obj(&b)?)))
    }

    fn power_obj(&self, x: &SemSet, o: CompObject) -> Result<CompObject, SemError> {
        let (a, b) = split(x)?;
        let (oa, ob) = split_obj(o)?;
        Ok(CompObject::Pair(Box::new(self.left.power_obj(&a, oa)?), Box::new(self.right.power_obj(&b, ob)?)))
    }

    fn with_obj(&self, a: CompObject, b: CompObject) -> Result<CompObject, SemError> {
        let (a1, a2) = split_obj(a)?;
        let (b1, b2) = split_obj(b)?;
        Ok(CompObject::Pair(Box::new(self.left.with_obj(a1, b1)?), Box::new(self.right.with_obj(a2, b2)?)))
    }

    fn top_obj(&self) -> CompObject {
        CompObject::Pair(Box::new(self.left.top_obj()), Box::new(self.right.top_obj()))
    }

    fn const_interp(&self, name: &str) -> Result<SemVal, SemError> {
        Ok(SemVal::pair(self.left.const_interp(name)?, self.right.const_interp(name)?))
    }

    fn components(&self) -> Option<(ModelRef, ModelRef)> {
        Some((self.left.clone(), self.right.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semcore::parse_literal;

    fn lit(s: &str) -> SemVal {
        parse_literal(s).unwrap()
    }

    fn beta(elems: &[&str]) -> BTreeMap<String, SemSet> {
        BTreeMap::from([("b".to_string(), SemSet::atoms(elems))])
    }

    fn kont(f: impl Fn(&SemVal) -> Result<SemVal, SemError> + Send + Sync + 'static) -> Kont {
        Arc::new(f)
    }

    fn nd_sig() -> Signature {
        Signature::new().with_value_base("b").with_op("or", 2, None).with_op("fail", 0, None)
    }

    #[test]
    fn pfin_free_extend_is_union() {
        let m =
            AlgebraModel::new(nd_sig(), Monad::pfin(), beta(&["x", "y"]), BTreeMap::new(), BTreeMap::new()).unwrap();
        let obj = interp_ctype(&m, &CompType::free(ValueType::base("b"))).unwrap();
        let k = kont(|v| Ok(SemVal::set([SemVal::pair(v.clone(), v.clone())])));
        assert_eq!(obj.extend(&lit("{x, y}"), &k).unwrap(), lit("{(x, x), (y, y)}"));
        assert_eq!(obj.carrier().size(), Some(4));
    }

    #[test]
    fn list_or_concatenates() {
        let m =
            AlgebraModel::new(nd_sig(), Monad::list(), beta(&["a", "b"]), BTreeMap::new(), BTreeMap::new()).unwrap();
        let obj = m.free_obj(&SemSet::atoms(["a", "b"])).unwrap();
        assert_eq!(obj.op("or", None, &[lit("[a]"), lit("[b, a]")]).unwrap(), lit("[a, b, a]"));
    }

    #[test]
    fn storage_read_and_write() {
        let sig = Signature::new().with_value_base("b").with_op("read", 2, None).with_op("write_s1", 1, None);
        let m =
            StorageModel::new(sig, SemSet::atoms(["s0", "s1"]), beta(&["a", "b"]), BTreeMap::new(), BTreeMap::new())
                .unwrap();
        let obj = m.free_obj(&SemSet::atoms(["a", "b"])).unwrap();
        let ret = |x: &str| SemVal::Mon(m.monad.unit(SemVal::atom(x)));
        let r = obj.op("read", None, &[ret("a"), ret("b")]).unwrap();
        assert_eq!(r, lit("state[(a, s0), (b, s1)]"));
        let w = obj.op("write_s1", None, &[r]).unwrap();
        assert_eq!(w, lit("state[(b, s1), (b, s1)]"));
    }

    #[test]
    fn storage_base_threads_state() {
        let sig = Signature::new().with_comp_base("C").with_op("read", 2, None);
        let comp_bases = BTreeMap::from([("C".to_string(), SemSet::atoms(["y0", "y1"]))]);
        let m =
            StorageModel::new(sig, SemSet::atoms(["s0", "s1"]), BTreeMap::new(), comp_bases, BTreeMap::new()).unwrap();
        let obj = m.base_ctype("C").unwrap();
        assert_eq!(obj.carrier().size(), Some(4));
        // t flips the state and returns the old one; k maps a state to a constant reader.
        let t = lit("state[(s0, s1), (s1, s0)]");
        let k = kont(|x| {
            let y = if x == &SemVal::atom("s0") { "y0" } else { "y1" };
            Ok(SemVal::Fun(FunVal::table(vec![
                (SemVal::atom("s0"), SemVal::atom(y)),
                (SemVal::atom("s1"), SemVal::atom(y)),
            ])))
        });
        assert_eq!(obj.extend(&t, &k).unwrap(), lit("fun{s0 => y0, s1 => y1}"));
    }

    #[test]
    fn base_algebra_validation() {
        let monad = Arc::new(Monad::pfin());
        let (p, q) = (SemVal::atom("p"), SemVal::atom("q"));
        let mut entries = vec![(OpInstance::Fail, vec![], p.clone())];
        for x in [&p, &q] {
            for y in [&p, &q] {
                let r = if *x == q || *y == q { q.clone() } else { p.clone() };
                entries.push((OpInstance::Or, vec![x.clone(), y.clone()], r));
            }
        }
        let alg = BaseAlgebra::new("J", monad.clone(), vec![p.clone(), q.clone()], entries.clone()).unwrap();
        assert_eq!(alg.structure(&lit("{p, q}").as_mon().unwrap().clone()).unwrap(), q);
        // A non-commutative `or` is not a powerset algebra.
        entries.retain(|(i, a, _)| !(*i == OpInstance::Or && a == &vec![q.clone(), p.clone()]));
        entries.push((OpInstance::Or, vec![q.clone(), p.clone()], p.clone()));
        assert!(BaseAlgebra::new("J", monad, vec![p, q], entries).is_err());
    }

    #[test]
    fn product_components() {
        let mk = |m: Monad| -> ModelRef {
            Arc::new(AlgebraModel::new(nd_sig(), m, beta(&["a"]), BTreeMap::new(), BTreeMap::new()).unwrap())
        };
        let prod = ProductModel::new(mk(Monad::pfin()), mk(Monad::list())).unwrap();
        let obj = interp_ctype(&prod, &CompType::free(ValueType::base("b"))).unwrap();
        assert!(obj.carrier().contains(&lit("({a}, [a, a])")));
        let r = obj.op("or", None, &[lit("({a}, [a])"), lit("({}, [a])")]).unwrap();
        assert_eq!(r, lit("({a}, [a, a])"));
    }

    #[test]
    fn unsupported_and_unrelated() {
        let sig = Signature::new().with_op("read", 2, None);
        assert!(matches!(
            AlgebraModel::new(sig, Monad::pfin(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new()),
            Err(SemError::UnsupportedOp { .. })
        ));
        let sig = nd_sig().with_const("c", AnyType::Value(ValueType::base("b")));
        let consts = BTreeMap::from([("c".to_string(), SemVal::atom("zzz"))]);
        assert!(matches!(
            AlgebraModel::new(sig, Monad::pfin(), beta(&["a"]), BTreeMap::new(), consts),
            Err(SemError::NotInCarrier { .. })
        ));
    }
}
