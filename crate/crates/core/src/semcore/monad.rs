//! The concrete strong monads on semantic sets.
//!
//! Strength is not reified: continuations passed to `bind` are ordinary closures and
//! may capture whatever environment they need.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::set::{FreeOp, SemSet};
use super::value::{MonVal, SemVal};
use super::SemError;
use crate::syntax::Signature;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonadKind {
    Pfin,
    List,
    /// Errors `E`.
    Exception(SemSet),
    /// States `S`, listed in a fixed order; state tables are positional.
    State(Arc<Vec<SemVal>>),
    Free(Arc<Vec<FreeOp>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monad {
    kind: MonadKind,
}

/// An operation instance after resolving signature aliases such as `raise_e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpInstance {
    Or,
    Fail,
    Raise(SemVal),
    Read,
    Write(SemVal),
    Formal(String, Option<SemVal>),
}

pub type Cont<'a> = dyn FnMut(&SemVal) -> Result<MonVal, SemError> + 'a;

impl Monad {
    pub fn pfin() -> Self {
        Monad { kind: MonadKind::Pfin }
    }

    pub fn list() -> Self {
        Monad { kind: MonadKind::List }
    }

    pub fn exception(errors: SemSet) -> Result<Self, SemError> {
        if !errors.is_finite() {
            return Err(SemError::NotFinite(errors.to_string()));
        }
        Ok(Monad { kind: MonadKind::Exception(errors) })
    }

    pub fn state(states: SemSet) -> Result<Self, SemError> {
        let elems = states.elements()?;
        if elems.is_empty() {
            return Err(SemError::EmptyState);
        }
        Ok(Monad { kind: MonadKind::State(Arc::new(elems)) })
    }

    pub fn free(ops: Vec<FreeOp>) -> Self {
        Monad { kind: MonadKind::Free(Arc::new(ops)) }
    }

    pub fn kind(&self) -> &MonadKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MonadKind::Pfin => "pfin",
            MonadKind::List => "list",
            MonadKind::Exception(_) => "exception",
            MonadKind::State(_) => "state",
            MonadKind::Free(_) => "free",
        }
    }

    pub fn states(&self) -> Option<&[SemVal]> {
        match &self.kind {
            MonadKind::State(s) => Some(s),
            _ => None,
        }
    }

    pub fn state_set(&self) -> Option<SemSet> {
        self.states().map(|s| SemSet::finite(s.to_vec()))
    }

    fn state_index(&self, s: &SemVal) -> Result<usize, SemError> {
        self.states()
            .and_then(|st| st.iter().position(|x| x == s))
            .ok_or_else(|| SemError::Defensive(format!("{s} is not a state")))
    }

    /// `T X`.
    pub fn apply(&self, x: &SemSet) -> SemSet {
        let x = Arc::new(x.clone());
        match &self.kind {
            MonadKind::Pfin => SemSet::Pfin(x),
            MonadKind::List => SemSet::List(x),
            MonadKind::Exception(e) => SemSet::Exc(x, Arc::new(e.clone())),
            MonadKind::State(s) => SemSet::State(Arc::new(SemSet::finite(s.to_vec())), x),
            MonadKind::Free(ops) => SemSet::Free(ops.clone(), x),
        }
    }

    pub fn unit(&self, x: SemVal) -> MonVal {
        match &self.kind {
            MonadKind::Pfin => MonVal::Set(Arc::new(BTreeSet::from([x]))),
            MonadKind::List => MonVal::List(Arc::new(vec![x])),
            MonadKind::Exception(_) => MonVal::Ok(Arc::new(x)),
            MonadKind::State(s) => MonVal::State(Arc::new(s.iter().map(|st| (x.clone(), st.clone())).collect())),
            MonadKind::Free(_) => MonVal::Ret(Arc::new(x)),
        }
    }

    fn mismatch(&self, t: &MonVal) -> SemError {
        SemError::Defensive(format!("{t} is not a {} value", self.name()))
    }

    pub fn bind(&self, t: &MonVal, k: &mut Cont<'_>) -> Result<MonVal, SemError> {
        match (&self.kind, t) {
            (MonadKind::Pfin, MonVal::Set(s)) => {
                let mut out = BTreeSet::new();
                for x in s.iter() {
                    match k(x)? {
                        MonVal::Set(r) => out.extend(r.iter().cloned()),
                        other => return Err(self.mismatch(&other)),
                    }
                }
                Ok(MonVal::Set(Arc::new(out)))
            }
            (MonadKind::List, MonVal::List(l)) => {
                let mut out = Vec::new();
                for x in l.iter() {
                    match k(x)? {
                        MonVal::List(r) => out.extend(r.iter().cloned()),
                        other => return Err(self.mismatch(&other)),
                    }
                }
                Ok(MonVal::List(Arc::new(out)))
            }
            (MonadKind::Exception(_), MonVal::Ok(x)) => k(x),
            (MonadKind::Exception(_), MonVal::Raise(_)) => Ok(t.clone()),
            (MonadKind::State(_), MonVal::State(table)) => {
                let mut out = Vec::with_capacity(table.len());
                for (x, s1) in table.iter() {
                    match k(x)? {
                        MonVal::State(r) => out.push(r[self.state_index(s1)?].clone()),
                        other => return Err(self.mismatch(&other)),
                    }
                }
                Ok(MonVal::State(Arc::new(out)))
            }
            (MonadKind::Free(_), MonVal::Ret(x)) => k(x),
            (MonadKind::Free(_), MonVal::Node { op, param, args }) => {
                let mut new_args = Vec::with_capacity(args.len());
                for a in args.iter() {
                    new_args.push(self.bind(a, k)?);
                }
                Ok(MonVal::Node { op: op.clone(), param: param.clone(), args: Arc::new(new_args) })
            }
            _ => Err(self.mismatch(t)),
        }
    }

    pub fn map(&self, t: &MonVal, f: &mut dyn FnMut(&SemVal) -> Result<SemVal, SemError>) -> Result<MonVal, SemError> {
        self.bind(t, &mut |x| Ok(self.unit(f(x)?)))
    }

    /// The operations this monad interprets, as `(name, arity, parameter carrier)`.
    pub fn operations(&self) -> Vec<FreeOp> {
        let op = |name: &str, arity, param| FreeOp { name: name.to_string(), arity, param };
        match &self.kind {
            MonadKind::Pfin | MonadKind::List => vec![op("or", 2, None), op("fail", 0, None)],
            MonadKind::Exception(e) => {
                let mut v = vec![op("raise", 0, Some(e.clone()))];
                for x in e.elements().unwrap_or_default() {
                    if let SemVal::Atom(a) = &x {
                        v.push(op(&format!("raise_{a}"), 0, None));
                    }
                }
                v
            }
            MonadKind::State(s) => {
                let mut v = vec![op("read", s.len(), None), op("write", 1, Some(SemSet::finite(s.to_vec())))];
                for x in s.iter() {
                    if let SemVal::Atom(a) = x {
                        v.push(op(&format!("write_{a}"), 1, None));
                    }
                }
                v
            }
            MonadKind::Free(ops) => ops.to_vec(),
        }
    }

    /// Resolves a signature operation (with its parameter, if any) for this monad.
    pub fn resolve(&self, name: &str, param: Option<&SemVal>) -> Result<OpInstance, SemError> {
        let unsupported = || SemError::UnsupportedOp { monad: self.name().to_string(), op: name.to_string() };
        match &self.kind {
            MonadKind::Pfin | MonadKind::List => match (name, param) {
                ("or", None) => Ok(OpInstance::Or),
                ("fail", None) => Ok(OpInstance::Fail),
                _ => Err(unsupported()),
            },
            MonadKind::Exception(e) => {
                let err = match (name, param) {
                    ("raise", Some(p)) => p.clone(),
                    (n, None) if n.starts_with("raise_") => SemVal::atom(&n["raise_".len()..]),
                    _ => return Err(unsupported()),
                };
                if e.contains(&err) {
                    Ok(OpInstance::Raise(err))
                } else {
                    Err(SemError::Defensive(format!("{err} is not an exception of this monad")))
                }
            }
            MonadKind::State(s) => {
                let st = match (name, param) {
                    ("read", None) => return Ok(OpInstance::Read),
                    ("write", Some(p)) => p.clone(),
                    (n, None) if n.starts_with("write_") => SemVal::atom(&n["write_".len()..]),
                    _ => return Err(unsupported()),
                };
                if s.contains(&st) {
                    Ok(OpInstance::Write(st))
                } else {
                    Err(SemError::Defensive(format!("{st} is not a state of this monad")))
                }
            }
            MonadKind::Free(ops) => {
                let decl = ops.iter().find(|o| o.name == name).ok_or_else(unsupported)?;
                match (&decl.param, param) {
                    (None, None) => Ok(OpInstance::Formal(name.to_string(), None)),
                    (Some(ps), Some(p)) if ps.contains(p) => Ok(OpInstance::Formal(name.to_string(), Some(p.clone()))),
                    _ => Err(SemError::Defensive(format!("bad parameter for `{name}`"))),
                }
            }
        }
    }

    /// Every operation instance, one per parameter value.
    pub fn instances(&self) -> Result<Vec<OpInstance>, SemError> {
        Ok(match &self.kind {
            MonadKind::Pfin | MonadKind::List => vec![OpInstance::Or, OpInstance::Fail],
            MonadKind::Exception(e) => e.elements()?.into_iter().map(OpInstance::Raise).collect(),
            MonadKind::State(s) => {
                let mut v = vec![OpInstance::Read];
                v.extend(s.iter().cloned().map(OpInstance::Write));
                v
            }
            MonadKind::Free(ops) => {
                let mut v = Vec::new();
                for o in ops.iter() {
                    match &o.param {
                        None => v.push(OpInstance::Formal(o.name.clone(), None)),
                        Some(ps) => {
                            for p in ps.elements()? {
                                v.push(OpInstance::Formal(o.name.clone(), Some(p)));
                            }
                        }
                    }
                }
                v
            }
        })
    }

    pub fn arity(&self, inst: &OpInstance) -> usize {
        match inst {
            OpInstance::Or => 2,
            OpInstance::Fail | OpInstance::Raise(_) => 0,
            OpInstance::Read => self.states().map_or(0, <[SemVal]>::len),
            OpInstance::Write(_) => 1,
            OpInstance::Formal(name, _) => match &self.kind {
                MonadKind::Free(ops) => ops.iter().find(|o| &o.name == name).map_or(0, |o| o.arity),
                _ => 0,
            },
        }
    }

    /// Checks that every operation of the signature is interpretable with the right arity.
    pub fn check_signature(&self, sig: &Signature) -> Result<(), SemError> {
        let supported = self.operations();
        for op in &sig.operations {
            let decl = supported
                .iter()
                .find(|o| o.name == op.name)
                .ok_or_else(|| SemError::UnsupportedOp { monad: self.name().to_string(), op: op.name.clone() })?;
            if decl.arity != op.arity || decl.param.is_some() != op.param.is_some() {
                return Err(SemError::UnsupportedOp {
                    monad: self.name().to_string(),
                    op: format!(
                        "{} with arity {}{}",
                        op.name,
                        op.arity,
                        if op.param.is_some() { " and a parameter" } else { "" }
                    ),
                });
            }
        }
        Ok(())
    }

    /// The free-algebra interpretation of an operation.
    pub fn op(&self, name: &str, param: Option<&SemVal>, args: &[MonVal]) -> Result<MonVal, SemError> {
        let inst = self.resolve(name, param)?;
        self.op_instance(&inst, args)
    }

    pub fn op_instance(&self, inst: &OpInstance, args: &[MonVal]) -> Result<MonVal, SemError> {
        let arity = self.arity(inst);
        if args.len() != arity {
            return Err(SemError::Defensive(format!("operation expects {arity} arguments, got {}", args.len())));
        }
        match (&self.kind, inst) {
            (MonadKind::Pfin, OpInstance::Or) => match (&args[0], &args[1]) {
                (MonVal::Set(a), MonVal::Set(b)) => Ok(MonVal::Set(Arc::new(a.union(b).cloned().collect()))),
                (a, _) => Err(self.mismatch(a)),
            },
            (MonadKind::Pfin, OpInstance::Fail) => Ok(MonVal::Set(Arc::new(BTreeSet::new()))),
            (MonadKind::List, OpInstance::Or) => match (&args[0], &args[1]) {
                (MonVal::List(a), MonVal::List(b)) => {
                    Ok(MonVal::List(Arc::new(a.iter().chain(b.iter()).cloned().collect())))
                }
                (a, _) => Err(self.mismatch(a)),
            },
            (MonadKind::List, OpInstance::Fail) => Ok(MonVal::List(Arc::new(Vec::new()))),
            (MonadKind::Exception(_), OpInstance::Raise(e)) => Ok(MonVal::Raise(Arc::new(e.clone()))),
            (MonadKind::State(s), OpInstance::Read) => {
                let mut out = Vec::with_capacity(s.len());
                for (i, a) in args.iter().enumerate() {
                    match a {
                        MonVal::State(t) => out.push(t[i].clone()),
                        other => return Err(self.mismatch(other)),
                    }
                }
                Ok(MonVal::State(Arc::new(out)))
            }
            (MonadKind::State(s), OpInstance::Write(st)) => match &args[0] {
                MonVal::State(t) => {
                    let j = self.state_index(st)?;
                    Ok(MonVal::State(Arc::new(vec![t[j].clone(); s.len()])))
                }
                other => Err(self.mismatch(other)),
            },
            (MonadKind::Free(_), OpInstance::Formal(name, p)) => Ok(MonVal::Node {
                op: Arc::from(name.as_str()),
                param: p.clone().map(Arc::new),
                args: Arc::new(args.to_vec()),
            }),
            _ => Err(SemError::Defensive(format!("operation {inst:?} does not belong to {}", self.name()))),
        }
    }

    /// Folds a monadic value through its canonical presentation by returns and
    /// operations: sets and lists as `or`-chains ending in a return (or `fail` when
    /// empty), exceptions as `raise`, state tables as `read(write[s'](return x), ..)`.
    #[allow(clippy::type_complexity)]
    pub fn fold<Y>(
        &self,
        t: &MonVal,
        ret: &mut dyn FnMut(&SemVal) -> Result<Y, SemError>,
        op: &mut dyn FnMut(&OpInstance, Vec<Y>) -> Result<Y, SemError>,
    ) -> Result<Y, SemError> {
        match (&self.kind, t) {
            (MonadKind::Pfin, MonVal::Set(_)) | (MonadKind::List, MonVal::List(_)) => {
                let items: Vec<&SemVal> = match t {
                    MonVal::Set(s) => s.iter().collect(),
                    MonVal::List(l) => l.iter().collect(),
                    _ => unreachable!(),
                };
                let Some((last, init)) = items.split_last() else {
                    return op(&OpInstance::Fail, Vec::new());
                };
                let mut acc = ret(last)?;
                for x in init.iter().rev() {
                    let r = ret(x)?;
                    acc = op(&OpInstance::Or, vec![r, acc])?;
                }
                Ok(acc)
            }
            (MonadKind::Exception(_), MonVal::Ok(x)) => ret(x),
            (MonadKind::Exception(_), MonVal::Raise(e)) => op(&OpInstance::Raise((**e).clone()), Vec::new()),
            (MonadKind::State(_), MonVal::State(table)) => {
                let mut branches = Vec::with_capacity(table.len());
                for (x, s1) in table.iter() {
                    let r = ret(x)?;
                    branches.push(op(&OpInstance::Write(s1.clone()), vec![r])?);
                }
                op(&OpInstance::Read, branches)
            }
            (MonadKind::Free(_), MonVal::Ret(x)) => ret(x),
            (MonadKind::Free(_), MonVal::Node { op: name, param, args }) => {
                let mut ys = Vec::with_capacity(args.len());
                for a in args.iter() {
                    ys.push(self.fold(a, ret, op)?);
                }
                op(&OpInstance::Formal(name.to_string(), param.as_deref().cloned()), ys)
            }
            _ => Err(self.mismatch(t)),
        }
    }
}

impl fmt::Display for OpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpInstance::Or => f.write_str("or"),
            OpInstance::Fail => f.write_str("fail"),
            OpInstance::Raise(e) => write!(f, "raise[{e}]"),
            OpInstance::Read => f.write_str("read"),
            OpInstance::Write(s) => write!(f, "write[{s}]"),
            OpInstance::Formal(n, None) => f.write_str(n),
            OpInstance::Formal(n, Some(p)) => write!(f, "{n}[{p}]"),
        }
    }
}

impl fmt::Display for Monad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MonadKind::Exception(e) => write!(f, "exception({e})"),
            MonadKind::State(s) => write!(f, "state({})", SemSet::finite(s.to_vec())),
            _ => f.write_str(self.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> SemVal {
        SemVal::atom("a")
    }
    fn b() -> SemVal {
        SemVal::atom("b")
    }

    #[test]
    fn pfin_apply_and_bind() {
        let m = Monad::pfin();
        assert_eq!(m.apply(&SemSet::atoms(["a", "b"])).size(), Some(4));
        let t = MonVal::Set(Arc::new([a(), b()].into()));
        let r = m.bind(&t, &mut |x| Ok(MonVal::Set(Arc::new([SemVal::pair(x.clone(), x.clone())].into())))).unwrap();
        assert_eq!(r, MonVal::Set(Arc::new([SemVal::pair(a(), a()), SemVal::pair(b(), b())].into())));
    }

    #[test]
    fn exception_bind() {
        let m = Monad::exception(SemSet::atoms(["e"])).unwrap();
        let k = &mut |x: &SemVal| Ok(MonVal::Ok(Arc::new(SemVal::inl(x.clone()))));
        assert_eq!(m.bind(&m.unit(a()), k).unwrap(), MonVal::Ok(Arc::new(SemVal::inl(a()))));
        let r = MonVal::Raise(Arc::new(SemVal::atom("e")));
        assert_eq!(m.bind(&r, k).unwrap(), r);
    }

    #[test]
    fn list_or_concatenates() {
        let m = Monad::list();
        let l1 = MonVal::List(Arc::new(vec![a()]));
        let l2 = MonVal::List(Arc::new(vec![b(), a()]));
        assert_eq!(m.op("or", None, &[l1, l2]).unwrap(), MonVal::List(Arc::new(vec![a(), b(), a()])));
    }

    #[test]
    fn empty_state_rejected() {
        assert_eq!(Monad::state(SemSet::Empty), Err(SemError::EmptyState));
    }

    #[test]
    fn state_read_write() {
        let m = Monad::state(SemSet::atoms(["s0", "s1"])).unwrap();
        let s0 = SemVal::atom("s0");
        let s1 = SemVal::atom("s1");
        let branch = |x: SemVal| m.unit(x);
        let r = m.op("read", None, &[branch(a()), branch(b())]).unwrap();
        assert_eq!(r, MonVal::State(Arc::new(vec![(a(), s0.clone()), (b(), s1.clone())])));
        let w = m.op("write_s1", None, &[r]).unwrap();
        assert_eq!(w, MonVal::State(Arc::new(vec![(b(), s1.clone()), (b(), s1)])));
    }

    #[test]
    fn fold_reconstructs_value() {
        let m = Monad::state(SemSet::atoms(["s0", "s1"])).unwrap();
        for t in m.apply(&SemSet::atoms(["a", "b"])).elements().unwrap() {
            let t = t.as_mon().unwrap().clone();
            let back =
                m.fold(&t, &mut |x| Ok(m.unit(x.clone())), &mut |inst, args| m.op_instance(inst, &args)).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn unsupported_operation() {
        let sig = Signature::new().with_op("read", 2, None);
        assert!(matches!(Monad::pfin().check_signature(&sig), Err(SemError::UnsupportedOp { .. })));
    }
}
