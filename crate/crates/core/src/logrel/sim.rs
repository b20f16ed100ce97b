//! Effect simulation between powerset and list nondeterminism: every closed
//! computation denotes a pair `(γ(l), l)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{denotations, CorpusEntry, GluedModel, LogrelError, Mode};
use crate::eval::{eval_comp, Env};
use crate::relations::{em_pair_lifting, BinRel, EmVariant};
use crate::semcore::{ModelRef, MonVal, MonadKind, ProductModel, SemError, SemVal};
use crate::syntax::{CompType, ValueType};

use super::report::{Counterexample, SimReport, Verdict};

/// The set of elements of a list value.
pub fn gamma_flatten(l: &SemVal) -> Result<SemVal, SemError> {
    match l.as_mon()? {
        MonVal::List(items) => Ok(SemVal::set(items.iter().cloned())),
        other => Err(SemError::Defensive(format!("{other} is not a list"))),
    }
}

fn mentions_thunk(a: &ValueType) -> bool {
    match a {
        ValueType::Thunk(_) => true,
        ValueType::Prod(x, y) | ValueType::Sum(x, y) => mentions_thunk(x) || mentions_thunk(y),
        ValueType::Base(_) | ValueType::Unit | ValueType::Empty => false,
    }
}

/// The binary glued model over `m_set × m_list` with identities at the base types
/// and the powerset/list relation at `F`.
pub fn simulation_glue(m_set: &ModelRef, m_list: &ModelRef) -> Result<GluedModel, LogrelError> {
    let kinds = (m_set.monad().map(|m| m.kind().clone()), m_list.monad().map(|m| m.kind().clone()));
    if !matches!(kinds, (Some(MonadKind::Pfin), Some(MonadKind::List))) {
        return Err(LogrelError::Config("effect simulation needs a pfin model and a list model".into()));
    }
    let sig = m_set.signature();
    if let Some(op) = sig.operations.iter().find(|o| !matches!((o.name.as_str(), o.arity), ("or", 2) | ("fail", 0))) {
        return Err(LogrelError::Config(format!("operation `{}` is not choice or failure", op.name)));
    }
    if !sig.comp_bases.is_empty() {
        return Err(LogrelError::Config("effect simulation takes no computation base types".into()));
    }
    let mut rels = BTreeMap::new();
    for b in &sig.value_bases {
        let (x, y) = (m_set.base_vtype(b)?, m_list.base_vtype(b)?);
        if x != y {
            return Err(LogrelError::Config(format!("base type `{b}` is interpreted differently: {x} and {y}")));
        }
        rels.insert(b.clone(), BinRel::identity(x).as_pred());
    }
    let prod: ModelRef = Arc::new(ProductModel::new(m_set.clone(), m_list.clone())?);
    GluedModel::new(prod, Mode::Binary, rels, BTreeMap::new(), Arc::new(em_pair_lifting(EmVariant::Full)))
}

/// For each `M : F A` evaluates both models (as one product model) and checks
/// `p = γ(l)` and, separately, that `(p, l)` is in the lifted identity. Both checks
/// must hold, so a disagreement between them is itself a counterexample.
pub fn check_effect_sim(m_set: &ModelRef, m_list: &ModelRef, corpus: &[CorpusEntry]) -> Result<SimReport, LogrelError> {
    let g = simulation_glue(m_set, m_list)?;
    let mut report = SimReport::new("effect simulation, pfin against list".into());
    report.counterexamples.extend(g.unrelated_constants()?);
    let outcomes: Vec<Result<(Verdict, Option<Counterexample>), LogrelError>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let CompType::Free(a) = &e.ty else {
                return Err(LogrelError::Config(format!("`{}` has type {}, not a returner type", e.term, e.ty)));
            };
            if mentions_thunk(a) {
                return Err(LogrelError::Config(format!("{} returns thunks, which the two models do not share", e.ty)));
            }
            let v = eval_comp(g.base(), &Env::new(), &e.term, &e.ty)?;
            let (p, l) = v.as_pair()?;
            let equation = *p == gamma_flatten(l)?;
            let related = g.lift_ctype(&e.ty)?.contains(&v)?;
            let clause = match (equation, related) {
                (true, true) => None,
                (false, false) => Some("p = γ(l) fails and (p, l) is unrelated"),
                (false, true) => Some("checks disagree: p ≠ γ(l) but (p, l) is related"),
                (true, false) => Some("checks disagree: p = γ(l) but (p, l) is unrelated"),
            };
            let verdict = Verdict { index: i, term: e.term.to_string(), ty: e.ty.to_string(), pass: clause.is_none() };
            let cx = clause.map(|c| Counterexample {
                term: e.term.to_string(),
                ty: e.ty.to_string(),
                denotations: denotations(Mode::Binary, &v),
                clause: c.into(),
            });
            Ok((verdict, cx))
        })
        .collect();
    for o in outcomes {
        let (v, cx) = o?;
        report.verdicts.push(v);
        report.counterexamples.extend(cx);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logrel::parse_corpus;
    use crate::semcore::{parse_literal, AlgebraModel, Monad, SemSet};
    use crate::syntax::Signature;

    fn models() -> (ModelRef, ModelRef) {
        let sig = Signature::new()
            .with_value_base("b")
            .with_op("or", 2, None)
            .with_op("fail", 0, None)
            .with_const("a", crate::syntax::AnyType::Value(ValueType::base("b")))
            .with_const("c", crate::syntax::AnyType::Value(ValueType::base("b")));
        let bases = BTreeMap::from([("b".to_string(), SemSet::atoms(["a", "b"]))]);
        let consts = BTreeMap::from([("a".to_string(), SemVal::atom("a")), ("c".to_string(), SemVal::atom("b"))]);
        let mk = |m: Monad| -> ModelRef {
            Arc::new(AlgebraModel::new(sig.clone(), m, bases.clone(), BTreeMap::new(), consts.clone()).unwrap())
        };
        (mk(Monad::pfin()), mk(Monad::list()))
    }

    #[test]
    fn flatten() {
        let l = parse_literal("[a, b, a]").unwrap();
        assert_eq!(gamma_flatten(&l).unwrap(), parse_literal("{a, b}").unwrap());
        assert_eq!(gamma_flatten(&parse_literal("[]").unwrap()).unwrap(), parse_literal("{}").unwrap());
        assert!(gamma_flatten(&parse_literal("{a}").unwrap()).is_err());
    }

    #[test]
    fn worked_examples() {
        let (s, l) = models();
        let corpus =
            parse_corpus("or(return a; or(return c; return a))\nfail :: F b\nreturn a", s.signature()).unwrap();
        let r = check_effect_sim(&s, &l, &corpus).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.verdicts.len(), 3);
    }

    #[test]
    fn rejects_mismatched_models() {
        let (s, l) = models();
        assert!(check_effect_sim(&l, &s, &[]).is_err());
    }
}
