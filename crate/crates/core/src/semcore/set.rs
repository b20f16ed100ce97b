use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::value::{FunVal, MonVal, SemVal};
use super::SemError;

/// Largest carrier `elements` will materialise.
pub const ELEMENT_LIMIT: u128 = 4_000_000;

/// An operation of a free monad's signature; `param` is the parameter carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeOp {
    pub name: String,
    pub arity: usize,
    pub param: Option<SemSet>,
}

/// Semantic carriers. Finite ones enumerate exhaustively; lists and free-monad trees
/// are enumerated by rank (length or depth).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemSet {
    Unit,
    Empty,
    Finite(Arc<Vec<SemVal>>),
    Prod(Arc<SemSet>, Arc<SemSet>),
    Sum(Arc<SemSet>, Arc<SemSet>),
    Fun(Arc<SemSet>, Arc<SemSet>),
    Pfin(Arc<SemSet>),
    List(Arc<SemSet>),
    /// Exception monad over `X` with errors `E`.
    Exc(Arc<SemSet>, Arc<SemSet>),
    /// State monad over `X` with states `S`: `State(S, X)`.
    State(Arc<SemSet>, Arc<SemSet>),
    Free(Arc<Vec<FreeOp>>, Arc<SemSet>),
}

fn sat_pow(base: u128, exp: u128) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc == u128::MAX || acc == 0 {
            break;
        }
    }
    acc
}

fn cartesian(parts: &[Vec<SemVal>]) -> Vec<Vec<SemVal>> {
    let mut out: Vec<Vec<SemVal>> = vec![Vec::new()];
    for p in parts {
        let mut next = Vec::with_capacity(out.len() * p.len());
        for prefix in &out {
            for x in p {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn cartesian_mon(parts: &[Vec<MonVal>]) -> Vec<Vec<MonVal>> {
    let mut out: Vec<Vec<MonVal>> = vec![Vec::new()];
    for p in parts {
        let mut next = Vec::with_capacity(out.len() * p.len());
        for prefix in &out {
            for x in p {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl SemSet {
    pub fn atoms<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Self {
        SemSet::Finite(Arc::new(names.into_iter().map(|n| SemVal::atom(n.as_ref())).collect()))
    }

    pub fn finite(elems: Vec<SemVal>) -> Self {
        SemSet::Finite(Arc::new(elems))
    }

    pub fn prod(a: SemSet, b: SemSet) -> Self {
        SemSet::Prod(Arc::new(a), Arc::new(b))
    }

    pub fn sum(a: SemSet, b: SemSet) -> Self {
        SemSet::Sum(Arc::new(a), Arc::new(b))
    }

    pub fn fun(a: SemSet, b: SemSet) -> Self {
        SemSet::Fun(Arc::new(a), Arc::new(b))
    }

    pub fn is_finite(&self) -> bool {
        match self {
            SemSet::Unit | SemSet::Empty | SemSet::Finite(_) => true,
            SemSet::Prod(a, b) | SemSet::Sum(a, b) | SemSet::Exc(a, b) | SemSet::State(a, b) => {
                (a.is_finite() && b.is_finite()) || self.size() == Some(0)
            }
            SemSet::Fun(d, c) => (d.is_finite() && c.is_finite()) || d.size() == Some(0),
            SemSet::Pfin(x) => x.is_finite(),
            SemSet::List(x) => x.size() == Some(0),
            SemSet::Free(ops, x) => {
                let no_leaves = x.size() == Some(0) && !ops.iter().any(|o| o.arity == 0);
                no_leaves
                    || (x.is_finite()
                        && ops.iter().all(|o| o.arity == 0 && o.param.as_ref().is_none_or(SemSet::is_finite)))
            }
        }
    }

    /// Cardinality, saturating; `None` for infinite sets.
    pub fn size(&self) -> Option<u128> {
        Some(match self {
            SemSet::Unit => 1,
            SemSet::Empty => 0,
            SemSet::Finite(v) => v.len() as u128,
            SemSet::Prod(a, b) => {
                let (sa, sb) = (a.size(), b.size());
                if sa == Some(0) || sb == Some(0) {
                    return Some(0);
                }
                sa?.saturating_mul(sb?)
            }
            SemSet::Sum(a, b) | SemSet::Exc(a, b) => a.size()?.saturating_add(b.size()?),
            SemSet::Fun(d, c) => {
                let sd = d.size();
                if sd == Some(0) {
                    return Some(1);
                }
                sat_pow(c.size()?, sd?)
            }
            SemSet::Pfin(x) => {
                let n = x.size()?;
                if n >= 127 {
                    u128::MAX
                } else {
                    1u128 << n
                }
            }
            SemSet::List(x) => {
                if x.size() == Some(0) {
                    1
                } else {
                    return None;
                }
            }
            SemSet::State(s, x) => {
                let ns = s.size()?;
                sat_pow(x.size()?.saturating_mul(ns), ns)
            }
            SemSet::Free(ops, x) => {
                if !self.is_finite() {
                    return None;
                }
                let mut n = x.size()?;
                for o in ops.iter() {
                    n = n.saturating_add(o.param.as_ref().map_or(Some(1), SemSet::size)?);
                }
                n
            }
        })
    }

    pub fn contains(&self, v: &SemVal) -> bool {
        match (self, v) {
            (SemSet::Unit, SemVal::Unit) => true,
            (SemSet::Finite(xs), v) => xs.contains(v),
            (SemSet::Prod(a, b), SemVal::Pair(x, y)) => a.contains(x) && b.contains(y),
            (SemSet::Sum(a, _), SemVal::Inl(x)) => a.contains(x),
            (SemSet::Sum(_, b), SemVal::Inr(y)) => b.contains(y),
            (SemSet::Fun(d, c), SemVal::Fun(FunVal::Table(t))) => {
                let keys_ok = match d.elements() {
                    Ok(dom) => {
                        dom.len() == t.len() && dom.iter().all(|k| t.binary_search_by(|(x, _)| x.cmp(k)).is_ok())
                    }
                    Err(_) => false,
                };
                keys_ok && t.iter().all(|(_, y)| c.contains(y))
            }
            (SemSet::Fun(d, _), SemVal::Fun(FunVal::Closure { .. })) => !d.is_finite(),
            (_, SemVal::Mon(m)) => self.contains_mon(m),
            _ => false,
        }
    }

    pub fn contains_mon(&self, m: &MonVal) -> bool {
        match (self, m) {
            (SemSet::Pfin(x), MonVal::Set(s)) => s.iter().all(|e| x.contains(e)),
            (SemSet::List(x), MonVal::List(l)) => l.iter().all(|e| x.contains(e)),
            (SemSet::Exc(x, _), MonVal::Ok(v)) => x.contains(v),
            (SemSet::Exc(_, e), MonVal::Raise(v)) => e.contains(v),
            (SemSet::State(s, x), MonVal::State(t)) => {
                s.size() == Some(t.len() as u128) && t.iter().all(|(a, st)| x.contains(a) && s.contains(st))
            }
            (SemSet::Free(_, x), MonVal::Ret(v)) => x.contains(v),
            (SemSet::Free(ops, _), MonVal::Node { op, param, args }) => {
                let Some(decl) = ops.iter().find(|o| *o.name == **op) else {
                    return false;
                };
                let param_ok = match (&decl.param, param) {
                    (None, None) => true,
                    (Some(ps), Some(p)) => ps.contains(p),
                    _ => false,
                };
                param_ok && decl.arity == args.len() && args.iter().all(|a| self.contains_mon(a))
            }
            _ => false,
        }
    }

    /// All elements of a finite carrier.
    pub fn elements(&self) -> Result<Vec<SemVal>, SemError> {
        match self.size() {
            None => Err(SemError::NotFinite(self.to_string())),
            Some(n) if n > ELEMENT_LIMIT => Err(SemError::TooLarge(self.to_string())),
            Some(_) => self.bounded(usize::MAX),
        }
    }

    /// Elements of rank at most `rank`: lists of length and trees of depth at most
    /// `rank`, with components bounded the same way. Finite sets give all elements.
    pub fn bounded(&self, rank: usize) -> Result<Vec<SemVal>, SemError> {
        Ok(match self {
            SemSet::Unit => vec![SemVal::Unit],
            SemSet::Empty => vec![],
            SemSet::Finite(xs) => xs.to_vec(),
            SemSet::Prod(a, b) => {
                let (xs, ys) = (a.bounded(rank)?, b.bounded(rank)?);
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for x in &xs {
                    for y in &ys {
                        out.push(SemVal::pair(x.clone(), y.clone()));
                    }
                }
                out
            }
            SemSet::Sum(a, b) => {
                let mut out: Vec<SemVal> = a.bounded(rank)?.into_iter().map(SemVal::inl).collect();
                out.extend(b.bounded(rank)?.into_iter().map(SemVal::inr));
                out
            }
            SemSet::Fun(d, c) => {
                let dom = d.elements()?;
                let cod = c.bounded(rank)?;
                let parts: Vec<Vec<SemVal>> = dom.iter().map(|_| cod.clone()).collect();
                guard(sat_pow(cod.len() as u128, dom.len() as u128), self)?;
                cartesian(&parts)
                    .into_iter()
                    .map(|vals| SemVal::Fun(FunVal::table(dom.iter().cloned().zip(vals).collect())))
                    .collect()
            }
            SemSet::Pfin(x) => {
                let xs = x.bounded(rank)?;
                if xs.len() >= 24 {
                    return Err(SemError::TooLarge(self.to_string()));
                }
                (0u32..(1u32 << xs.len()))
                    .map(|mask| {
                        SemVal::Mon(MonVal::Set(Arc::new(
                            xs.iter()
                                .enumerate()
                                .filter(|(i, _)| mask & (1 << i) != 0)
                                .map(|(_, e)| e.clone())
                                .collect::<BTreeSet<_>>(),
                        )))
                    })
                    .collect()
            }
            SemSet::List(x) => {
                let xs = x.bounded(rank)?;
                let max_len = if xs.is_empty() { 0 } else { rank };
                let mut out = vec![SemVal::list([])];
                let mut layer: Vec<Vec<SemVal>> = vec![Vec::new()];
                for _ in 0..max_len {
                    guard((layer.len() as u128).saturating_mul(xs.len() as u128), self)?;
                    let mut next = Vec::with_capacity(layer.len() * xs.len());
                    for l in &layer {
                        for x in &xs {
                            let mut l2 = l.clone();
                            l2.push(x.clone());
                            next.push(l2);
                        }
                    }
                    out.extend(next.iter().map(|l| SemVal::list(l.iter().cloned())));
                    layer = next;
                }
                out
            }
            SemSet::Exc(x, e) => {
                let mut out: Vec<SemVal> =
                    x.bounded(rank)?.into_iter().map(|v| SemVal::Mon(MonVal::Ok(Arc::new(v)))).collect();
                out.extend(e.bounded(rank)?.into_iter().map(|v| SemVal::Mon(MonVal::Raise(Arc::new(v)))));
                out
            }
            SemSet::State(s, x) => {
                let states = s.elements()?;
                let outcomes: Vec<SemVal> = SemSet::prod(x.as_ref().clone(), s.as_ref().clone()).bounded(rank)?;
                guard(sat_pow(outcomes.len() as u128, states.len() as u128), self)?;
                let parts: Vec<Vec<SemVal>> = states.iter().map(|_| outcomes.clone()).collect();
                cartesian(&parts)
                    .into_iter()
                    .map(|row| {
                        let table = row
                            .into_iter()
                            .map(|p| match p {
                                SemVal::Pair(a, b) => ((*a).clone(), (*b).clone()),
                                _ => unreachable!("product elements are pairs"),
                            })
                            .collect();
                        SemVal::Mon(MonVal::State(Arc::new(table)))
                    })
                    .collect()
            }
            SemSet::Free(ops, x) => free_trees(ops, x, rank)?.into_iter().map(SemVal::Mon).collect(),
        })
    }

    /// The first `n` elements in rank order, for inspecting infinite carriers.
    pub fn prefix(&self, n: usize) -> Result<Vec<SemVal>, SemError> {
        if self.is_finite() {
            let mut all = self.elements()?;
            all.truncate(n);
            return Ok(all);
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut rank = 0;
        while out.len() < n {
            for v in self.bounded(rank)? {
                if out.len() == n {
                    break;
                }
                if seen.insert(v.clone()) {
                    out.push(v);
                }
            }
            rank += 1;
        }
        Ok(out)
    }
}

fn guard(n: u128, set: &SemSet) -> Result<(), SemError> {
    if n > ELEMENT_LIMIT {
        Err(SemError::TooLarge(set.to_string()))
    } else {
        Ok(())
    }
}

fn free_trees(ops: &[FreeOp], x: &SemSet, depth: usize) -> Result<Vec<MonVal>, SemError> {
    let mut leaves: Vec<MonVal> = x.bounded(depth)?.into_iter().map(|v| MonVal::Ret(Arc::new(v))).collect();
    let params = |o: &FreeOp| -> Result<Vec<Option<Arc<SemVal>>>, SemError> {
        Ok(match &o.param {
            None => vec![None],
            Some(p) => p.bounded(depth)?.into_iter().map(|v| Some(Arc::new(v))).collect(),
        })
    };
    for o in ops.iter().filter(|o| o.arity == 0) {
        for p in params(o)? {
            leaves.push(MonVal::Node { op: Arc::from(o.name.as_str()), param: p, args: Arc::new(Vec::new()) });
        }
    }
    let mut level = leaves.clone();
    let has_nodes = ops.iter().any(|o| o.arity > 0);
    let mut d = 0;
    while d < depth && has_nodes {
        let mut next = leaves.clone();
        for o in ops.iter().filter(|o| o.arity > 0) {
            let count = sat_pow(level.len() as u128, o.arity as u128);
            if count.saturating_add(next.len() as u128) > ELEMENT_LIMIT {
                return Err(SemError::TooLarge(format!("free-monad trees of depth {}", d + 1)));
            }
            let parts: Vec<Vec<MonVal>> = (0..o.arity).map(|_| level.clone()).collect();
            for p in params(o)? {
                for args in cartesian_mon(&parts) {
                    next.push(MonVal::Node { op: Arc::from(o.name.as_str()), param: p.clone(), args: Arc::new(args) });
                }
            }
        }
        level = next;
        d += 1;
    }
    Ok(level)
}

impl fmt::Display for SemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemSet::Unit => f.write_str("1"),
            SemSet::Empty => f.write_str("0"),
            SemSet::Finite(xs) => {
                f.write_str("{")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
            SemSet::Prod(a, b) => write!(f, "({a} x {b})"),
            SemSet::Sum(a, b) => write!(f, "({a} + {b})"),
            SemSet::Fun(a, b) => write!(f, "({a} => {b})"),
            SemSet::Pfin(x) => write!(f, "Pfin {x}"),
            SemSet::List(x) => write!(f, "List {x}"),
            SemSet::Exc(x, e) => write!(f, "({x} + raise {e})"),
            SemSet::State(s, x) => write!(f, "({s} => {x} x {s})"),
            SemSet::Free(ops, x) => {
                let names: Vec<String> = ops.iter().map(|o| format!("{}/{}", o.name, o.arity)).collect();
                write!(f, "Free[{}] {x}", names.join(","))
            }
        }
    }
}
