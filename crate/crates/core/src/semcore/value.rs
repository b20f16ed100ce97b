use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use super::SemError;

/// Semantic values. Equality and ordering are structural; function tables are
/// canonical (sorted by argument), closures compare by identity, and `sem_eq`
/// refuses to compare closures at all.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemVal {
    Unit,
    Atom(Arc<str>),
    Pair(Arc<SemVal>, Arc<SemVal>),
    Inl(Arc<SemVal>),
    Inr(Arc<SemVal>),
    Fun(FunVal),
    Mon(MonVal),
}

pub type ClosureFn = dyn Fn(&SemVal) -> Result<SemVal, SemError> + Send + Sync;

#[derive(Clone)]
pub enum FunVal {
    /// Extensional: sorted `(argument, result)` entries over a finite domain.
    Table(Arc<Vec<(SemVal, SemVal)>>),
    /// Intensional: used only when the domain is not finite.
    Closure { id: u64, f: Arc<ClosureFn> },
}

static NEXT_CLOSURE: AtomicU64 = AtomicU64::new(0);

impl FunVal {
    pub fn table(mut entries: Vec<(SemVal, SemVal)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        entries.dedup_by(|a, b| a.0 == b.0);
        FunVal::Table(Arc::new(entries))
    }

    pub fn closure(f: impl Fn(&SemVal) -> Result<SemVal, SemError> + Send + Sync + 'static) -> Self {
        FunVal::Closure { id: NEXT_CLOSURE.fetch_add(1, AtomicOrdering::Relaxed), f: Arc::new(f) }
    }

    pub fn apply(&self, x: &SemVal) -> Result<SemVal, SemError> {
        match self {
            FunVal::Table(t) => t
                .binary_search_by(|(k, _)| k.cmp(x))
                .map(|i| t[i].1.clone())
                .map_err(|_| SemError::Defensive(format!("argument {x} outside function table"))),
            FunVal::Closure { f, .. } => f(x),
        }
    }

    fn key(&self) -> Result<&Vec<(SemVal, SemVal)>, u64> {
        match self {
            FunVal::Table(t) => Ok(t),
            FunVal::Closure { id, .. } => Err(*id),
        }
    }
}

impl PartialEq for FunVal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FunVal {}

impl PartialOrd for FunVal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FunVal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.key(), other.key()) {
            (Ok(a), Ok(b)) => a.cmp(b),
            (Ok(_), Err(_)) => Ordering::Less,
            (Err(_), Ok(_)) => Ordering::Greater,
            (Err(a), Err(b)) => a.cmp(&b),
        }
    }
}

impl Hash for FunVal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.key() {
            Ok(t) => t.hash(state),
            Err(id) => id.hash(state),
        }
    }
}

/// Monadic payloads, one variant family per monad kind.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MonVal {
    Set(Arc<BTreeSet<SemVal>>),
    List(Arc<Vec<SemVal>>),
    Ok(Arc<SemVal>),
    Raise(Arc<SemVal>),
    /// Entry `i` is the outcome `(result, final state)` from the `i`-th state.
    State(Arc<Vec<(SemVal, SemVal)>>),
    Ret(Arc<SemVal>),
    Node {
        op: Arc<str>,
        param: Option<Arc<SemVal>>,
        args: Arc<Vec<MonVal>>,
    },
}

impl SemVal {
    pub fn atom(s: &str) -> Self {
        SemVal::Atom(Arc::from(s))
    }

    pub fn pair(a: SemVal, b: SemVal) -> Self {
        SemVal::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn inl(a: SemVal) -> Self {
        SemVal::Inl(Arc::new(a))
    }

    pub fn inr(a: SemVal) -> Self {
        SemVal::Inr(Arc::new(a))
    }

    pub fn set(items: impl IntoIterator<Item = SemVal>) -> Self {
        SemVal::Mon(MonVal::Set(Arc::new(items.into_iter().collect())))
    }

    pub fn list(items: impl IntoIterator<Item = SemVal>) -> Self {
        SemVal::Mon(MonVal::List(Arc::new(items.into_iter().collect())))
    }

    pub fn as_mon(&self) -> Result<&MonVal, SemError> {
        match self {
            SemVal::Mon(m) => Ok(m),
            other => Err(SemError::Defensive(format!("expected a monadic value, found {other}"))),
        }
    }

    pub fn as_pair(&self) -> Result<(&SemVal, &SemVal), SemError> {
        match self {
            SemVal::Pair(a, b) => Ok((a, b)),
            other => Err(SemError::Defensive(format!("expected a pair, found {other}"))),
        }
    }

    pub fn as_fun(&self) -> Result<&FunVal, SemError> {
        match self {
            SemVal::Fun(f) => Ok(f),
            other => Err(SemError::Defensive(format!("expected a function, found {other}"))),
        }
    }

    pub fn contains_closure(&self) -> bool {
        match self {
            SemVal::Unit | SemVal::Atom(_) => false,
            SemVal::Pair(a, b) => a.contains_closure() || b.contains_closure(),
            SemVal::Inl(a) | SemVal::Inr(a) => a.contains_closure(),
            SemVal::Fun(FunVal::Closure { .. }) => true,
            SemVal::Fun(FunVal::Table(t)) => t.iter().any(|(k, v)| k.contains_closure() || v.contains_closure()),
            SemVal::Mon(m) => m.contains_closure(),
        }
    }
}

impl MonVal {
    pub fn contains_closure(&self) -> bool {
        match self {
            MonVal::Set(s) => s.iter().any(SemVal::contains_closure),
            MonVal::List(l) => l.iter().any(SemVal::contains_closure),
            MonVal::Ok(v) | MonVal::Raise(v) | MonVal::Ret(v) => v.contains_closure(),
            MonVal::State(t) => t.iter().any(|(x, s)| x.contains_closure() || s.contains_closure()),
            MonVal::Node { param, args, .. } => {
                param.as_ref().is_some_and(|p| p.contains_closure()) || args.iter().any(MonVal::contains_closure)
            }
        }
    }

    /// Tree depth for free-monad values (leaves have depth 0); other kinds are 0.
    pub fn depth(&self) -> usize {
        match self {
            MonVal::Node { args, .. } => args.iter().map(|a| 1 + a.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }
}

/// Extensional equality; fails when a closure would have to be compared.
pub fn sem_eq(a: &SemVal, b: &SemVal) -> Result<bool, SemError> {
    if a.contains_closure() || b.contains_closure() {
        return Err(SemError::ClosureComparison);
    }
    Ok(a == b)
}

fn write_seq<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: impl IntoIterator<Item = T>,
    sep: &str,
) -> fmt::Result {
    for (i, x) in items.into_iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for SemVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemVal::Unit => f.write_str("()"),
            SemVal::Atom(a) => f.write_str(a),
            SemVal::Pair(a, b) => write!(f, "({a}, {b})"),
            SemVal::Inl(a) => write!(f, "inl {}", Atomic(a)),
            SemVal::Inr(a) => write!(f, "inr {}", Atomic(a)),
            SemVal::Fun(FunVal::Table(t)) => {
                f.write_str("fun{")?;
                write_seq(f, t.iter().map(|(k, v)| format!("{k} => {v}")), ", ")?;
                f.write_str("}")
            }
            SemVal::Fun(FunVal::Closure { id, .. }) => write!(f, "<closure#{id}>"),
            SemVal::Mon(m) => write!(f, "{m}"),
        }
    }
}

impl fmt::Debug for SemVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for FunVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&SemVal::Fun(self.clone()), f)
    }
}

struct Atomic<'a>(&'a SemVal);

impl fmt::Display for Atomic<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            SemVal::Inl(_) | SemVal::Inr(_) => write!(f, "({})", self.0),
            SemVal::Mon(MonVal::Ok(_) | MonVal::Raise(_) | MonVal::Ret(_)) => {
                write!(f, "({})", self.0)
            }
            other => write!(f, "{other}"),
        }
    }
}

impl fmt::Display for MonVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonVal::Set(s) => {
                f.write_str("{")?;
                write_seq(f, s.iter(), ", ")?;
                f.write_str("}")
            }
            MonVal::List(l) => {
                f.write_str("[")?;
                write_seq(f, l.iter(), ", ")?;
                f.write_str("]")
            }
            MonVal::Ok(v) => write!(f, "ok {}", Atomic(v)),
            MonVal::Raise(e) => write!(f, "raise {}", Atomic(e)),
            MonVal::State(t) => {
                f.write_str("state[")?;
                write_seq(f, t.iter().map(|(x, s)| format!("({x}, {s})")), ", ")?;
                f.write_str("]")
            }
            MonVal::Ret(v) => write!(f, "ret {}", Atomic(v)),
            MonVal::Node { op, param, args } => {
                f.write_str(op)?;
                if let Some(p) = param {
                    write!(f, "[{p}]")?;
                }
                f.write_str("(")?;
                write_seq(f, args.iter(), "; ")?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for MonVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
