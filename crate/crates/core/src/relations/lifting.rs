//! Monad liftings: relation transformers from a relation on `X` to one on `T X`.
//!
//! Binary liftings act on a predicate over `X × Y` and return one over `T1 X × T2 Y`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::Pred;
use crate::semcore::{BaseAlgebra, MonVal, Monad, MonadKind, OpInstance, SemError, SemSet, SemVal};

/// The monads a lifting acts on.
#[derive(Clone, Debug)]
pub enum Effect {
    Unary(Arc<Monad>),
    Binary(Arc<Monad>, Arc<Monad>),
}

impl Effect {
    pub fn monads(&self) -> Vec<Arc<Monad>> {
        match self {
            Effect::Unary(m) => vec![m.clone()],
            Effect::Binary(a, b) => vec![a.clone(), b.clone()],
        }
    }

    /// The lifted carrier over `x` (a product `X × Y` for binary effects).
    pub fn apply(&self, x: &SemSet) -> Result<SemSet, SemError> {
        match self {
            Effect::Unary(m) => Ok(m.apply(x)),
            Effect::Binary(a, b) => {
                let (l, r) = split_prod(x)?;
                Ok(SemSet::prod(a.apply(&l), b.apply(&r)))
            }
        }
    }
}

pub(crate) fn split_prod(x: &SemSet) -> Result<(SemSet, SemSet), SemError> {
    match x {
        SemSet::Prod(l, r) => Ok(((**l).clone(), (**r).clone())),
        other => Err(SemError::CarrierMismatch { expected: "a product carrier".into(), found: other.to_string() }),
    }
}

pub trait Lifting: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn effect(&self) -> Effect;
    fn lift(&self, r: &Pred) -> Result<Pred, SemError>;

    /// Operation instances the lifted relations are closed under.
    fn operations(&self) -> Result<Vec<OpInstance>, SemError> {
        shared_instances(&self.effect().monads())
    }
}

/// Operation instances every monad of an effect interprets, at equal arity.
pub(crate) fn shared_instances(monads: &[Arc<Monad>]) -> Result<Vec<OpInstance>, SemError> {
    let mut out = Vec::new();
    for inst in monads[0].instances()? {
        let mut everywhere = true;
        for m in &monads[1..] {
            everywhere &= m.instances()?.contains(&inst) && m.arity(&inst) == monads[0].arity(&inst);
        }
        if everywhere {
            out.push(inst);
        }
    }
    Ok(out)
}

pub type LiftingRef = Arc<dyn Lifting>;

fn mismatch(expected: &SemSet, found: &SemSet) -> SemError {
    SemError::CarrierMismatch { expected: expected.to_string(), found: found.to_string() }
}

fn expect_kind(m: &Monad, ok: bool, want: &str) -> Result<(), SemError> {
    if ok {
        Ok(())
    } else {
        Err(SemError::Config(format!("a {want} lifting needs the {want} monad, not {}", m.name())))
    }
}

/// Normal results in `R`, raised errors in a fixed `Ē`.
#[derive(Clone, Debug)]
pub struct ExceptionLifting {
    monad: Arc<Monad>,
    ebar: Pred,
}

pub fn exception_lifting(monad: Arc<Monad>, ebar: Pred) -> Result<ExceptionLifting, SemError> {
    let MonadKind::Exception(e) = monad.kind() else {
        return Err(SemError::Config(format!("an exception lifting needs the exception monad, not {}", monad.name())));
    };
    if *e != ebar.carrier {
        return Err(mismatch(e, &ebar.carrier));
    }
    Ok(ExceptionLifting { monad, ebar })
}

impl Lifting for ExceptionLifting {
    fn name(&self) -> String {
        "exception".into()
    }

    fn effect(&self) -> Effect {
        Effect::Unary(self.monad.clone())
    }

    fn lift(&self, r: &Pred) -> Result<Pred, SemError> {
        let (r, ebar) = (r.clone(), self.ebar.clone());
        Ok(Pred::new(self.monad.apply(&r.carrier), move |t| match t.as_mon()? {
            MonVal::Ok(x) => r.contains(x),
            MonVal::Raise(e) => ebar.contains(e),
            other => Err(SemError::Defensive(format!("{other} is not an exception value"))),
        }))
    }

    /// Only the related exceptions may be raised.
    fn operations(&self) -> Result<Vec<OpInstance>, SemError> {
        Ok(self.ebar.members()?.into_iter().map(OpInstance::Raise).collect())
    }
}

/// The least relation containing related returns and closed under every operation.
#[derive(Clone, Debug)]
pub struct FreeLifting {
    monad: Arc<Monad>,
}

pub fn free_lifting(monad: Arc<Monad>) -> Result<FreeLifting, SemError> {
    expect_kind(&monad, matches!(monad.kind(), MonadKind::Free(_)), "free")?;
    Ok(FreeLifting { monad })
}

fn tree_in(r: &Pred, t: &MonVal) -> Result<bool, SemError> {
    match t {
        MonVal::Ret(x) => r.contains(x),
        MonVal::Node { args, .. } => {
            for a in args.iter() {
                if !tree_in(r, a)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        other => Err(SemError::Defensive(format!("{other} is not a tree"))),
    }
}

impl Lifting for FreeLifting {
    fn name(&self) -> String {
        "free".into()
    }

    fn effect(&self) -> Effect {
        Effect::Unary(self.monad.clone())
    }

    fn lift(&self, r: &Pred) -> Result<Pred, SemError> {
        let r = r.clone();
        Ok(Pred::new(self.monad.apply(&r.carrier), move |t| tree_in(&r, t.as_mon()?)))
    }
}

pub type AlgebraFn = Arc<dyn Fn(&MonVal) -> Result<SemVal, SemError> + Send + Sync>;

/// Lifting by tests into a parameter algebra `(P, α)` with a predicate `P̄`:
/// `t ∈ lift(R)` iff `α(T k t) ∈ P̄` for every `k : X → P` sending `R` into `P̄`.
#[derive(Clone)]
pub struct TtLifting {
    monad: Arc<Monad>,
    param: Vec<SemVal>,
    algebra: AlgebraFn,
    pbar: Pred,
}

impl fmt::Debug for TtLifting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TtLifting({} over {:?})", self.monad, self.param)
    }
}

pub fn tt_lifting(
    monad: Arc<Monad>,
    param_carrier: SemSet,
    algebra: impl Fn(&MonVal) -> Result<SemVal, SemError> + Send + Sync + 'static,
    pbar: Pred,
) -> Result<TtLifting, SemError> {
    if !param_carrier.is_finite() {
        return Err(SemError::NotFinite(param_carrier.to_string()));
    }
    if pbar.carrier != param_carrier {
        return Err(mismatch(&param_carrier, &pbar.carrier));
    }
    let lifting = TtLifting { monad, param: param_carrier.elements()?, algebra: Arc::new(algebra), pbar };
    lifting.validate()?;
    Ok(lifting)
}

impl TtLifting {
    /// Nondeterminism tested by "may return 1": `P = {0, 1}`, `α(p) = 1` iff `1 ∈ p`, `P̄ = {1}`.
    pub fn erratic() -> Self {
        let one = SemVal::atom("1");
        let carrier = SemSet::atoms(["0", "1"]);
        let pbar = Pred::from_members(carrier.clone(), [one.clone()]).expect("1 is in {0, 1}");
        tt_lifting(
            Arc::new(Monad::pfin()),
            carrier,
            move |p| match p {
                MonVal::Set(s) => Ok(SemVal::atom(if s.contains(&one) { "1" } else { "0" })),
                other => Err(SemError::Defensive(format!("{other} is not a set"))),
            },
            pbar,
        )
        .expect("the may-algebra is a pfin algebra")
    }

    /// Uses the structure map of a finite algebra as the parameter.
    pub fn from_base_algebra(alg: Arc<BaseAlgebra>, pbar: Pred) -> Result<Self, SemError> {
        let carrier = SemSet::finite(alg.carrier().to_vec());
        let a = alg.clone();
        tt_lifting(alg.monad().clone(), carrier, move |t| a.structure(t), pbar)
    }

    /// `α ∘ η = id` and `α ∘ μ = α ∘ T α` on `T T P` (bounded when infinite).
    fn validate(&self) -> Result<(), SemError> {
        let bad = |what: &str| SemError::Config(format!("tt parameter is not an algebra: {what}"));
        let p = SemSet::finite(self.param.clone());
        for x in &self.param {
            if (self.algebra)(&self.monad.unit(x.clone()))? != *x {
                return Err(bad(&format!("unit law fails at {x}")));
            }
        }
        let tp = self.monad.apply(&p);
        let ttp = self.monad.apply(&tp);
        let outer = if ttp.is_finite() { ttp.elements()? } else { ttp.bounded(2)? };
        for tt in outer {
            let tt = tt.as_mon()?;
            let flat = self.monad.bind(tt, &mut |inner| Ok(inner.as_mon()?.clone()))?;
            let lhs = (self.algebra)(&flat)?;
            let rhs = (self.algebra)(&self.monad.map(tt, &mut |inner| (self.algebra)(inner.as_mon()?))?)?;
            if lhs != rhs {
                return Err(bad(&format!("multiplication law fails at {tt}")));
            }
            if !self.param.contains(&lhs) {
                return Err(bad(&format!("{lhs} is outside the carrier")));
            }
        }
        Ok(())
    }

    pub fn monad(&self) -> &Arc<Monad> {
        &self.monad
    }
}

impl Lifting for TtLifting {
    fn name(&self) -> String {
        "tt".into()
    }

    fn effect(&self) -> Effect {
        Effect::Unary(self.monad.clone())
    }

    fn lift(&self, r: &Pred) -> Result<Pred, SemError> {
        if !r.carrier.is_finite() {
            return Err(SemError::NotFinite(r.carrier.to_string()));
        }
        let xs = r.carrier.elements()?;
        let good: Vec<SemVal> = self.pbar.members()?;
        // Per point, the values a test may take there.
        let mut choices = Vec::with_capacity(xs.len());
        for x in &xs {
            choices.push(if r.contains(x)? { good.clone() } else { self.param.clone() });
        }
        let mut tests: Vec<Vec<SemVal>> = vec![Vec::new()];
        for c in &choices {
            tests = tests
                .iter()
                .flat_map(|t| c.iter().map(move |v| [t.as_slice(), std::slice::from_ref(v)].concat()))
                .collect();
        }
        let index: BTreeMap<SemVal, usize> = xs.into_iter().enumerate().map(|(i, x)| (x, i)).collect();
        let (monad, algebra, pbar) = (self.monad.clone(), self.algebra.clone(), self.pbar.clone());
        Ok(Pred::new(self.monad.apply(&r.carrier), move |t| {
            let t = t.as_mon()?;
            for k in &tests {
                let mapped = monad.map(t, &mut |x| {
                    let i = index
                        .get(x)
                        .ok_or_else(|| SemError::NotInCarrier { value: x.to_string(), ty: "the test domain".into() })?;
                    Ok(k[*i].clone())
                })?;
                if !pbar.contains(&algebra(&mapped)?)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }))
    }

    /// The instances whose algebra interpretation keeps `P̄` closed.
    fn operations(&self) -> Result<Vec<OpInstance>, SemError> {
        let good = self.pbar.members()?;
        let mut out = Vec::new();
        for inst in self.monad.instances()? {
            let arity = self.monad.arity(&inst);
            let mut closed = true;
            for idx in 0..good.len().pow(arity as u32) {
                let mut rest = idx;
                let args: Vec<MonVal> = (0..arity)
                    .map(|_| {
                        let p = good[rest % good.len()].clone();
                        rest /= good.len();
                        self.monad.unit(p)
                    })
                    .collect();
                if !self.pbar.contains(&(self.algebra)(&self.monad.op_instance(&inst, &args)?)?)? {
                    closed = false;
                    break;
                }
            }
            if closed {
                out.push(inst);
            }
        }
        Ok(out)
    }
}

/// Which clauses of the powerset/list relation are enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmVariant {
    /// Every set element is matched in the list and every list element in the set.
    Full,
    /// Only set elements need a match.
    ForwardOnly,
    /// `Full`, but the empty pair is left out.
    NoEmpty,
}

/// Relates a finite set to a list over a relation on elements.
#[derive(Clone, Debug)]
pub struct EmLifting {
    variant: EmVariant,
    pfin: Arc<Monad>,
    list: Arc<Monad>,
}

pub fn em_pair_lifting(variant: EmVariant) -> EmLifting {
    EmLifting { variant, pfin: Arc::new(Monad::pfin()), list: Arc::new(Monad::list()) }
}

impl Lifting for EmLifting {
    fn name(&self) -> String {
        match self.variant {
            EmVariant::Full => "em".into(),
            EmVariant::ForwardOnly => "em-forward".into(),
            EmVariant::NoEmpty => "em-nonempty".into(),
        }
    }

    fn effect(&self) -> Effect {
        Effect::Binary(self.pfin.clone(), self.list.clone())
    }

    fn lift(&self, r: &Pred) -> Result<Pred, SemError> {
        let carrier = self.effect().apply(&r.carrier)?;
        let (r, variant) = (r.clone(), self.variant);
        Ok(Pred::new(carrier, move |v| {
            let (p, l) = v.as_pair()?;
            let (MonVal::Set(p), MonVal::List(l)) = (p.as_mon()?, l.as_mon()?) else {
                return Err(SemError::Defensive(format!("{v} is not a set/list pair")));
            };
            if variant == EmVariant::NoEmpty && p.is_empty() && l.is_empty() {
                return Ok(false);
            }
            let rel = |x: &SemVal, y: &SemVal| r.contains(&SemVal::pair(x.clone(), y.clone()));
            for x in p.iter() {
                if !any(l.iter(), |y| rel(x, y))? {
                    return Ok(false);
                }
            }
            if variant != EmVariant::ForwardOnly {
                for y in l.iter() {
                    if !any(p.iter(), |x| rel(x, y))? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }))
    }
}

fn any<'a>(
    mut it: impl Iterator<Item = &'a SemVal>,
    mut f: impl FnMut(&SemVal) -> Result<bool, SemError>,
) -> Result<bool, SemError> {
    it.try_fold(false, |acc, x| Ok(acc || f(x)?))
}

/// Equal-length lists related pointwise.
#[derive(Clone, Debug)]
pub struct PairListLifting {
    list: Arc<Monad>,
}

pub fn pair_list_lifting() -> PairListLifting {
    PairListLifting { list: Arc::new(Monad::list()) }
}

impl Lifting for PairListLifting {
    fn name(&self) -> String {
        "list-pointwise".into()
    }

    fn effect(&self) -> Effect {
        Effect::Binary(self.list.clone(), self.list.clone())
    }

    fn lift(&self, r: &Pred) -> Result<Pred, SemError> {
        let carrier = self.effect().apply(&r.carrier)?;
        let r = r.clone();
        Ok(Pred::new(carrier, move |v| {
            let (a, b) = v.as_pair()?;
            let (MonVal::List(a), MonVal::List(b)) = (a.as_mon()?, b.as_mon()?) else {
                return Err(SemError::Defensive(format!("{v} is not a pair of lists")));
            };
            if a.len() != b.len() {
                return Ok(false);
            }
            for (x, y) in a.iter().zip(b.iter()) {
                if !r.contains(&SemVal::pair(x.clone(), y.clone()))? {
                    return Ok(false);
                }
            }
            Ok(true)
        }))
    }
}

/// The set of elements of a list.
pub fn flatten(l: &[SemVal]) -> BTreeSet<SemVal> {
    l.iter().cloned().collect()
}
