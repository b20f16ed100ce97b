//! Glued models: a base model together with a relation at every type, built from
//! relations at the base types and a monad lifting. Drives the basic-lemma and
//! effect-simulation checkers.

pub mod config;
pub mod report;
pub mod sim;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use config::{load_glue, GlueConfig, LiftingConfig, RelConfig};
pub use report::{Counterexample, SimReport, Verdict};
pub use sim::{check_effect_sim, gamma_flatten};

use crate::eval::{eval_comp, Env, EvalError};
use crate::relations::{LiftingRef, Pred};
use crate::semcore::{interp_ctype, interp_vtype, ModelRef, SemError, SemSet, SemVal};
use crate::syntax::{parse_comp, parse_ctype, AnyType, Comp, CompType, ParseError, Signature, ValueType};
use crate::typecheck::{self, Context, TypeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Predicates on the carriers of one model.
    Unary,
    /// Relations between the two components of a product model.
    Binary,
}

#[derive(Debug, thiserror::Error)]
pub enum LogrelError {
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("line {line}: {err}")]
    Parse { line: usize, err: ParseError },
    #[error("glue configuration: {0}")]
    Config(String),
}

impl From<EvalError> for LogrelError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Sem(s) => LogrelError::Sem(s),
            EvalError::Type(t) => LogrelError::Type(t),
        }
    }
}

#[derive(Debug)]
pub struct GluedModel {
    base: ModelRef,
    mode: Mode,
    base_rels: BTreeMap<String, Pred>,
    comp_base_rels: BTreeMap<String, Pred>,
    lifting: LiftingRef,
}

fn config(msg: String) -> LogrelError {
    LogrelError::Config(msg)
}

impl GluedModel {
    pub fn new(
        base: ModelRef,
        mode: Mode,
        base_rels: BTreeMap<String, Pred>,
        comp_base_rels: BTreeMap<String, Pred>,
        lifting: LiftingRef,
    ) -> Result<Self, LogrelError> {
        let sig = base.signature();
        let monads = lifting.effect().monads();
        let expected: Vec<_> = match (mode, base.components()) {
            (Mode::Unary, None) => vec![base.monad().cloned()],
            (Mode::Binary, Some((l, r))) => vec![l.monad().cloned(), r.monad().cloned()],
            (Mode::Unary, Some(_)) => return Err(config("unary gluing needs a single model, not a product".into())),
            (Mode::Binary, None) => return Err(config("binary gluing needs a product model".into())),
        };
        if expected.len() != monads.len()
            || expected.iter().zip(&monads).any(|(e, m)| e.as_ref().map(|e| **e != **m).unwrap_or(true))
        {
            return Err(config(format!("lifting `{}` does not act on the monads of the base model", lifting.name())));
        }
        for (kind, names, rels) in
            [("value", &sig.value_bases, &base_rels), ("computation", &sig.comp_bases, &comp_base_rels)]
        {
            for n in names {
                if !rels.contains_key(n) {
                    return Err(config(format!("no relation given for {kind} base type `{n}`")));
                }
            }
            if let Some(extra) = rels.keys().find(|k| !names.contains(k)) {
                return Err(config(format!("`{extra}` is not a {kind} base type")));
            }
        }
        for (n, r) in &base_rels {
            let want = interp_vtype(base.as_ref(), &ValueType::base(n.as_str()))?;
            if want != r.carrier {
                return Err(
                    SemError::CarrierMismatch { expected: want.to_string(), found: r.carrier.to_string() }.into()
                );
            }
        }
        for (n, r) in &comp_base_rels {
            let want = interp_ctype(base.as_ref(), &CompType::base(n.as_str()))?.carrier();
            if want != r.carrier {
                return Err(
                    SemError::CarrierMismatch { expected: want.to_string(), found: r.carrier.to_string() }.into()
                );
            }
        }
        Ok(GluedModel { base, mode, base_rels, comp_base_rels, lifting })
    }

    pub fn base(&self) -> &ModelRef {
        &self.base
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn lifting(&self) -> &LiftingRef {
        &self.lifting
    }

    /// The relation at a value type, on exactly the base model's carrier.
    pub fn lift_vtype(&self, a: &ValueType) -> Result<Pred, LogrelError> {
        let carrier = interp_vtype(self.base.as_ref(), a)?;
        Ok(match a {
            ValueType::Base(n) => {
                self.base_rels.get(n).cloned().ok_or_else(|| SemError::UnknownBase(n.clone()))?.recarried(carrier)
            }
            ValueType::Unit => Pred::full(carrier),
            ValueType::Empty => Pred::empty(carrier),
            ValueType::Prod(x, y) => self.both(carrier, self.lift_vtype(x)?, self.lift_vtype(y)?),
            ValueType::Sum(x, y) => self.either(carrier, self.lift_vtype(x)?, self.lift_vtype(y)?),
            ValueType::Thunk(b) => self.lift_ctype(b)?.recarried(carrier),
        })
    }

    /// The relation at a computation type, on the carrier of its object.
    pub fn lift_ctype(&self, b: &CompType) -> Result<Pred, LogrelError> {
        let carrier = interp_ctype(self.base.as_ref(), b)?.carrier();
        Ok(match b {
            CompType::Base(n) => {
                self.comp_base_rels.get(n).cloned().ok_or_else(|| SemError::UnknownBase(n.clone()))?.recarried(carrier)
            }
            CompType::Free(a) => self.lifting.lift(&self.lift_vtype(a)?)?.recarried(carrier),
            CompType::Top => Pred::full(carrier),
            CompType::With(x, y) => self.both(carrier, self.lift_ctype(x)?, self.lift_ctype(y)?),
            CompType::Arrow(a, c) => {
                let ra = self.lift_vtype(a)?;
                if !ra.carrier.is_finite() {
                    return Err(SemError::NotFinite(format!("{} (argument of {b})", ra.carrier)).into());
                }
                let args = ra.members()?;
                let rc = self.lift_ctype(c)?;
                let mode = self.mode;
                Pred::new(carrier, move |f| {
                    for x in &args {
                        let fx = match mode {
                            Mode::Unary => f.as_fun()?.apply(x)?,
                            Mode::Binary => {
                                let ((f1, f2), (x1, x2)) = (f.as_pair()?, x.as_pair()?);
                                SemVal::pair(f1.as_fun()?.apply(x1)?, f2.as_fun()?.apply(x2)?)
                            }
                        };
                        if !rc.contains(&fx)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })
            }
        })
    }

    /// Componentwise conjunction; in binary mode a pair of pairs is transposed first.
    fn both(&self, carrier: SemSet, l: Pred, r: Pred) -> Pred {
        match self.mode {
            Mode::Unary => Pred::prod(l, r).recarried(carrier),
            Mode::Binary => Pred::new(carrier, move |v| {
                let (v1, v2) = v.as_pair()?;
                let ((a1, b1), (a2, b2)) = (v1.as_pair()?, v2.as_pair()?);
                Ok(l.contains(&SemVal::pair(a1.clone(), a2.clone()))?
                    && r.contains(&SemVal::pair(b1.clone(), b2.clone()))?)
            }),
        }
    }

    /// Tagged union; in binary mode both sides must carry the same tag.
    fn either(&self, carrier: SemSet, l: Pred, r: Pred) -> Pred {
        match self.mode {
            Mode::Unary => Pred::sum(l, r).recarried(carrier),
            Mode::Binary => Pred::new(carrier, move |v| {
                let (v1, v2) = v.as_pair()?;
                match (v1, v2) {
                    (SemVal::Inl(a), SemVal::Inl(b)) => l.contains(&SemVal::pair((**a).clone(), (**b).clone())),
                    (SemVal::Inr(a), SemVal::Inr(b)) => r.contains(&SemVal::pair((**a).clone(), (**b).clone())),
                    _ => Ok(false),
                }
            }),
        }
    }

    /// Constants whose interpretation lies outside the relation at their type.
    pub fn unrelated_constants(&self) -> Result<Vec<Counterexample>, LogrelError> {
        let mut out = Vec::new();
        for (name, ty) in &self.base.signature().constants {
            let v = self.base.const_interp(name)?;
            let (rel, shown) = match ty {
                AnyType::Value(a) => (self.lift_vtype(a)?, a.to_string()),
                AnyType::Comp(b) => (self.lift_ctype(b)?, b.to_string()),
            };
            if !rel.contains(&v)? {
                out.push(Counterexample {
                    term: name.clone(),
                    ty: shown,
                    denotations: denotations(self.mode, &v),
                    clause: "unrelated constant".into(),
                });
            }
        }
        Ok(out)
    }
}

fn denotations(mode: Mode, v: &SemVal) -> Vec<String> {
    match (mode, v) {
        (Mode::Binary, SemVal::Pair(a, b)) => vec![a.to_string(), b.to_string()],
        _ => vec![v.to_string()],
    }
}

/// A closed corpus term with its type, as given or inferred.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub term: Comp,
    pub ty: CompType,
}

/// Parses a corpus: one term per line, optionally followed by `:: TYPE`; blank
/// lines and lines starting with `#` are skipped.
pub fn parse_corpus(text: &str, sig: &Signature) -> Result<Vec<CorpusEntry>, LogrelError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |err: ParseError| LogrelError::Parse { line: i + 1, err };
        let (src, ty) = match line.rsplit_once("::") {
            Some((t, ty)) => (t, Some(parse_ctype(ty.trim(), sig).map_err(at)?)),
            None => (line, None),
        };
        let term = parse_comp(src, sig).map_err(at)?;
        out.push(typed(term, ty, sig)?);
    }
    Ok(out)
}

/// Checks `term` against `ty` when given, infers otherwise.
pub fn typed(term: Comp, ty: Option<CompType>, sig: &Signature) -> Result<CorpusEntry, LogrelError> {
    let ctx = Context::default();
    let ty = match ty {
        Some(b) => {
            typecheck::check_comp(&ctx, &term, &b, sig)?;
            b
        }
        None => typecheck::infer_comp(&ctx, &term, sig)?,
    };
    Ok(CorpusEntry { term, ty })
}

/// Evaluates every corpus term and decides membership in the relation at its type.
/// Constants are checked first; unrelated ones are recorded as counterexamples.
pub fn check_basic_lemma(g: &GluedModel, corpus: &[CorpusEntry]) -> Result<SimReport, LogrelError> {
    let mut report = SimReport::new(format!("basic lemma, {} lifting", g.lifting.name()));
    report.counterexamples.extend(g.unrelated_constants()?);
    let outcomes: Vec<Result<(Verdict, Option<Counterexample>), LogrelError>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let v = eval_comp(&g.base, &Env::new(), &e.term, &e.ty)?;
            let ok = g.lift_ctype(&e.ty)?.contains(&v)?;
            let verdict = Verdict { index: i, term: e.term.to_string(), ty: e.ty.to_string(), pass: ok };
            let cx = (!ok).then(|| Counterexample {
                term: e.term.to_string(),
                ty: e.ty.to_string(),
                denotations: denotations(g.mode, &v),
                clause: format!("denotation outside the relation at {}", e.ty),
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
    use crate::relations::{em_pair_lifting, exception_lifting, free_lifting, BinRel, EmVariant};
    use crate::semcore::{load_model, parse_literal, AlgebraModel, Monad};
    use std::sync::Arc;

    fn ab() -> SemSet {
        SemSet::atoms(["a", "b"])
    }

    fn nd() -> Signature {
        Signature::new().with_value_base("b").with_op("or", 2, None).with_op("fail", 0, None)
    }

    fn free_glue() -> GluedModel {
        let sig = nd();
        let bases = BTreeMap::from([("b".to_string(), ab())]);
        let monad = AlgebraModel::free_monad(&sig, &bases).unwrap();
        let lifting = Arc::new(free_lifting(Arc::new(monad.clone())).unwrap());
        let model: ModelRef = Arc::new(AlgebraModel::new(sig, monad, bases, BTreeMap::new(), BTreeMap::new()).unwrap());
        let r = Pred::from_members(ab(), [SemVal::atom("a")]).unwrap();
        GluedModel::new(model, Mode::Unary, BTreeMap::from([("b".into(), r)]), BTreeMap::new(), lifting).unwrap()
    }

    #[test]
    fn value_clauses() {
        let g = free_glue();
        let sum = g.lift_vtype(&ValueType::sum(ValueType::base("b"), ValueType::base("b"))).unwrap();
        let m: Vec<String> = sum.members().unwrap().iter().map(ToString::to_string).collect();
        assert_eq!(m, ["inl a", "inr a"]);
        assert_eq!(g.lift_vtype(&ValueType::Unit).unwrap().members().unwrap(), [SemVal::Unit]);
        assert!(g.lift_vtype(&ValueType::Empty).unwrap().members().unwrap().is_empty());
    }

    #[test]
    fn carriers_are_the_base_interpretation() {
        let g = free_glue();
        let b = CompType::arrow(ValueType::bool(), CompType::free(ValueType::base("b")));
        assert_eq!(g.lift_ctype(&b).unwrap().carrier, interp_ctype(g.base().as_ref(), &b).unwrap().carrier());
    }

    #[test]
    fn arrow_clause_quantifies_over_related_arguments() {
        let g = free_glue();
        let b = CompType::arrow(ValueType::base("b"), CompType::free(ValueType::base("b")));
        let rel = g.lift_ctype(&b).unwrap();
        // Only the related argument `a` constrains the function.
        assert!(rel.contains(&parse_literal("fun{a => ret a, b => ret b}").unwrap()).unwrap());
        assert!(!rel.contains(&parse_literal("fun{a => ret b, b => ret a}").unwrap()).unwrap());
    }

    #[test]
    fn basic_lemma_on_small_corpus() {
        let g = free_glue();
        let corpus =
            parse_corpus("# demo\nor(return inl (); fail) :: F (1 + b)\nfail :: F b\n", g.base().signature()).unwrap();
        let r = check_basic_lemma(&g, &corpus).unwrap();
        assert!(r.passed());
        assert_eq!(r.verdicts.len(), 2);
    }

    #[test]
    fn unrelated_exception_constant() {
        let sig_json = r#"{"value_bases": ["b"], "operations": [{"name": "raise_e1", "arity": 0}],
            "constants": [{"name": "c", "type": "b"}, {"name": "throw", "type": "F b"}]}"#;
        let sig = Signature::from_json(sig_json).unwrap();
        let model_json = |exn: &str| {
            format!(
                r#"{{"kind": "algebra", "monad": {{"kind": "exception", "errors": ["e1", "e2"]}},
                "bases": {{"b": ["a", "b"]}}, "consts": {{"c": "a", "throw": "raise {exn}"}}}}"#
            )
        };
        let errors = SemSet::atoms(["e1", "e2"]);
        let ebar = Pred::from_members(errors.clone(), [SemVal::atom("e1")]).unwrap();
        let lifting = Arc::new(exception_lifting(Arc::new(Monad::exception(errors).unwrap()), ebar).unwrap());
        let r = Pred::from_members(ab(), [SemVal::atom("a")]).unwrap();
        let corpus = parse_corpus("throw to x. return x\nraise_e1 :: F b\nreturn c", &sig).unwrap();
        let run = |exn: &str| {
            let model = load_model(&model_json(exn), Some(&sig)).unwrap();
            let g = GluedModel::new(
                model,
                Mode::Unary,
                BTreeMap::from([("b".into(), r.clone())]),
                BTreeMap::new(),
                lifting.clone(),
            )
            .unwrap();
            check_basic_lemma(&g, &corpus).unwrap()
        };
        assert!(run("e1").passed());
        let bad = run("e2");
        assert_eq!(bad.counterexamples[0].clause, "unrelated constant");
        assert_eq!(bad.counterexamples[1].term, "throw to x. (return x)");
        assert_eq!(bad.counterexamples.len(), 2);
    }

    #[test]
    fn binary_em_relates_flattenings() {
        let sig = Signature::new().with_value_base("b").with_op("or", 2, None).with_op("fail", 0, None);
        let bases = BTreeMap::from([("b".to_string(), ab())]);
        let mk = |m: Monad| -> ModelRef {
            Arc::new(AlgebraModel::new(sig.clone(), m, bases.clone(), BTreeMap::new(), BTreeMap::new()).unwrap())
        };
        let prod: ModelRef = Arc::new(crate::semcore::ProductModel::new(mk(Monad::pfin()), mk(Monad::list())).unwrap());
        let id = BinRel::identity(ab()).as_pred();
        let g = GluedModel::new(
            prod,
            Mode::Binary,
            BTreeMap::from([("b".into(), id)]),
            BTreeMap::new(),
            Arc::new(em_pair_lifting(EmVariant::Full)),
        )
        .unwrap();
        let rel = g.lift_ctype(&CompType::free(ValueType::base("b"))).unwrap();
        assert!(rel.contains(&parse_literal("({a, b}, [b, a, b])").unwrap()).unwrap());
        assert!(!rel.contains(&parse_literal("({a}, [b, a])").unwrap()).unwrap());
        let corpus = parse_corpus("or(return a; or(fail; return b)) :: F b", &sig);
        assert!(corpus.is_err(), "`a` is not a term");
    }
}
