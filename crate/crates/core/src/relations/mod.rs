//! Decidable relations on carriers and the monad liftings that act on them.

pub mod laws;
pub mod lifting;
pub mod tt;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use laws::{check_lifting_laws, LiftingBounds, LiftingReport};
pub use lifting::{
    em_pair_lifting, exception_lifting, free_lifting, pair_list_lifting, tt_lifting, Effect, EmLifting, EmVariant,
    ExceptionLifting, FreeLifting, Lifting, LiftingRef, PairListLifting, TtLifting,
};
pub use tt::{tt_cross_check, TtCase, TtCrossCheck};

use crate::semcore::{SemError, SemSet, SemVal};

pub type Test = Arc<dyn Fn(&SemVal) -> Result<bool, SemError> + Send + Sync>;
pub type Test2 = Arc<dyn Fn(&SemVal, &SemVal) -> Result<bool, SemError> + Send + Sync>;

/// A predicate: a carrier with a membership test that is total on it.
#[derive(Clone)]
pub struct Pred {
    pub carrier: SemSet,
    test: Test,
}

impl fmt::Debug for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pred({})", self.carrier)
    }
}

impl Pred {
    pub fn new(carrier: SemSet, test: impl Fn(&SemVal) -> Result<bool, SemError> + Send + Sync + 'static) -> Self {
        Pred { carrier, test: Arc::new(test) }
    }

    pub fn full(carrier: SemSet) -> Self {
        Pred::new(carrier, |_| Ok(true))
    }

    pub fn empty(carrier: SemSet) -> Self {
        Pred::new(carrier, |_| Ok(false))
    }

    /// The subset given by `members`, which must lie in the carrier.
    pub fn from_members(carrier: SemSet, members: impl IntoIterator<Item = SemVal>) -> Result<Self, SemError> {
        let set: BTreeSet<SemVal> = members.into_iter().collect();
        if let Some(bad) = set.iter().find(|m| !carrier.contains(m)) {
            return Err(SemError::NotInCarrier { value: bad.to_string(), ty: carrier.to_string() });
        }
        Ok(Pred::new(carrier, move |v| Ok(set.contains(v))))
    }

    pub fn contains(&self, v: &SemVal) -> Result<bool, SemError> {
        (self.test)(v)
    }

    /// Members of a finite carrier, in enumeration order.
    pub fn members(&self) -> Result<Vec<SemVal>, SemError> {
        self.filter(self.carrier.elements()?)
    }

    /// Members among the carrier elements of rank at most `rank`.
    pub fn members_bounded(&self, rank: usize) -> Result<Vec<SemVal>, SemError> {
        self.filter(self.carrier.bounded(rank)?)
    }

    fn filter(&self, xs: Vec<SemVal>) -> Result<Vec<SemVal>, SemError> {
        let mut out = Vec::new();
        for x in xs {
            if self.contains(&x)? {
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Componentwise conjunction on pairs.
    pub fn prod(a: Pred, b: Pred) -> Self {
        let carrier = SemSet::prod(a.carrier.clone(), b.carrier.clone());
        Pred::new(carrier, move |v| {
            let (x, y) = v.as_pair()?;
            Ok(a.contains(x)? && b.contains(y)?)
        })
    }

    /// Tagged disjoint union.
    pub fn sum(a: Pred, b: Pred) -> Self {
        let carrier = SemSet::sum(a.carrier.clone(), b.carrier.clone());
        Pred::new(carrier, move |v| match v {
            SemVal::Inl(x) => a.contains(x),
            SemVal::Inr(y) => b.contains(y),
            other => Err(SemError::Defensive(format!("{other} is not an injection"))),
        })
    }

    /// The same test viewed on another (equal) carrier description.
    pub fn recarried(&self, carrier: SemSet) -> Self {
        Pred { carrier, test: self.test.clone() }
    }
}

/// A binary relation between two carriers.
#[derive(Clone)]
pub struct BinRel {
    pub left: SemSet,
    pub right: SemSet,
    test: Test2,
}

impl fmt::Debug for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinRel({} ~ {})", self.left, self.right)
    }
}

impl BinRel {
    pub fn new(
        left: SemSet,
        right: SemSet,
        test: impl Fn(&SemVal, &SemVal) -> Result<bool, SemError> + Send + Sync + 'static,
    ) -> Self {
        BinRel { left, right, test: Arc::new(test) }
    }

    pub fn identity(x: SemSet) -> Self {
        BinRel::new(x.clone(), x, |a, b| Ok(a == b))
    }

    pub fn from_pairs(
        left: SemSet,
        right: SemSet,
        pairs: impl IntoIterator<Item = (SemVal, SemVal)>,
    ) -> Result<Self, SemError> {
        let set: BTreeSet<(SemVal, SemVal)> = pairs.into_iter().collect();
        for (a, b) in &set {
            if !left.contains(a) || !right.contains(b) {
                return Err(SemError::NotInCarrier { value: format!("({a}, {b})"), ty: format!("{left} x {right}") });
            }
        }
        Ok(BinRel::new(left, right, move |a, b| Ok(set.contains(&(a.clone(), b.clone())))))
    }

    pub fn contains(&self, a: &SemVal, b: &SemVal) -> Result<bool, SemError> {
        (self.test)(a, b)
    }

    /// The relation as a predicate on the product carrier.
    pub fn as_pred(&self) -> Pred {
        let test = self.test.clone();
        Pred::new(SemSet::prod(self.left.clone(), self.right.clone()), move |v| {
            let (a, b) = v.as_pair()?;
            test(a, b)
        })
    }

    /// Reads a predicate on a product carrier as a relation.
    pub fn from_pred(p: &Pred) -> Result<Self, SemError> {
        let SemSet::Prod(l, r) = &p.carrier else {
            return Err(SemError::Defensive(format!("{} is not a product carrier", p.carrier)));
        };
        let p = p.clone();
        Ok(BinRel::new((**l).clone(), (**r).clone(), move |a, b| p.contains(&SemVal::pair(a.clone(), b.clone()))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_and_products() {
        let x = SemSet::atoms(["a", "b"]);
        let r = Pred::from_members(x.clone(), [SemVal::atom("a")]).unwrap();
        assert_eq!(r.members().unwrap(), vec![SemVal::atom("a")]);
        let s = Pred::sum(r.clone(), r.clone());
        let shown: Vec<String> = s.members().unwrap().iter().map(|v| v.to_string()).collect();
        assert_eq!(shown, ["inl a", "inr a"]);
        assert_eq!(Pred::prod(r.clone(), Pred::full(x.clone())).members().unwrap().len(), 2);
        assert!(Pred::from_members(x, [SemVal::atom("z")]).is_err());
    }

    #[test]
    fn binrel_round_trip() {
        let x = SemSet::atoms(["a", "b"]);
        let id = BinRel::identity(x);
        let p = id.as_pred();
        assert_eq!(p.members().unwrap().len(), 2);
        let back = BinRel::from_pred(&p).unwrap();
        assert!(back.contains(&SemVal::atom("a"), &SemVal::atom("a")).unwrap());
        assert!(!back.contains(&SemVal::atom("a"), &SemVal::atom("b")).unwrap());
    }
}
