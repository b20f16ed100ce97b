//! The eight acceptance criteria. Each prints one PASS/FAIL line; the run exits
//! nonzero if any criterion fails. Runs without the libtest harness so the lines
//! are never captured.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cbpv_core::cli;
use cbpv_core::eval::{eval_comp, interp_ctype, Env};
use cbpv_core::lindcheck::{check_fibration_property, check_lind_axioms, delete_object, pred_truncation};
use cbpv_core::logrel::{check_basic_lemma, check_effect_sim, gamma_flatten, typed, CorpusEntry, GluedModel, Mode};
use cbpv_core::relations::{
    check_lifting_laws, em_pair_lifting, exception_lifting, free_lifting, tt_cross_check, EmVariant, Lifting,
    LiftingBounds, LiftingRef, Pred, TtLifting,
};
use cbpv_core::semcore::laws::{check_monad_laws, check_object_laws, LawBounds, LawReport};
use cbpv_core::semcore::{sem_eq, MonVal, Monad, SemSet, SemVal};
use cbpv_core::syntax::{
    alpha_eq, generate_terms, parse_program, print_term, AnyType, CompType, Signature, Term, ValueType,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{ab, algebra, beta_instances, free_monad, model_kinds, nd_sig, state_sig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fb() -> CompType {
    CompType::free(ValueType::base("b"))
}

fn corpus(sig: &Signature, tys: &[CompType], per_type: usize, seed: u64) -> Vec<CorpusEntry> {
    tys.iter()
        .flat_map(|ty| {
            generate_terms(sig, ty, 5, seed, per_type)
                .unwrap()
                .into_iter()
                .map(|m| typed(m, Some(ty.clone()), sig).unwrap())
        })
        .collect()
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cbpv-acceptance-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn effect_simulation() -> Outcome {
    let start = Instant::now();
    let sig = nd_sig();
    let (pfin, list) = (algebra(&sig, Monad::pfin()), algebra(&sig, Monad::list()));
    let entries = corpus(&sig, &[fb()], 500, 1);
    let report = check_effect_sim(&pfin, &list, &entries).map_err(|e| e.to_string())?;
    ensure(report.passed(), || report.summary())?;
    ensure(report.verdicts.len() == 500 && report.verdicts.iter().all(|v| v.pass), || report.summary())?;
    // The equation once more, evaluating each model on its own.
    let mut nonempty = 0;
    for e in &entries {
        let p = eval_comp(&pfin, &Env::new(), &e.term, &e.ty).map_err(|e| e.to_string())?;
        let l = eval_comp(&list, &Env::new(), &e.term, &e.ty).map_err(|e| e.to_string())?;
        ensure(p == gamma_flatten(&l).unwrap(), || format!("{:?}: {p} but {l}", e.term))?;
        nonempty += usize::from(p != SemVal::set([]));
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("500 terms of F b, |b| = 2: equation and em relation agree on all ({nonempty} nonempty), {took:.2?}"))
}

fn exception_glue(throw_to: &str) -> String {
    format!(
        r#"{{
        "signature": {{"value_bases": ["b"], "operations": [{{"name": "raise_e1", "arity": 0}}],
                       "constants": [{{"name": "c", "type": "b"}}, {{"name": "throw", "type": "F b"}}]}},
        "model": {{"kind": "algebra", "monad": {{"kind": "exception", "errors": ["e1", "e2"]}},
                   "bases": {{"b": ["a", "b"]}}, "consts": {{"c": "a", "throw": "raise {throw_to}"}}}},
        "mode": "unary",
        "lifting": {{"kind": "exception", "errors": ["e1"]}},
        "base_rels": {{"b": {{"base": "b", "members": ["a"]}}}}
    }}"#
    )
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run_with(std::iter::once("cbpv").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned() + &String::from_utf8_lossy(&err))
}

fn exception_gluing() -> Outcome {
    let g = cbpv_core::logrel::load_glue(&exception_glue("e1")).map_err(|e| e.to_string())?;
    let sig = g.base().signature().clone();
    let b = || ValueType::base("b");
    let tys = [
        fb(),
        CompType::free(ValueType::sum(b(), ValueType::Unit)),
        CompType::arrow(b(), fb()),
        CompType::with(fb(), CompType::free(ValueType::prod(b(), b()))),
        CompType::arrow(ValueType::bool(), CompType::free(ValueType::bool())),
    ];
    let entries = corpus(&sig, &tys, 100, 2);
    let uses_throw = entries.iter().filter(|e| format!("{:?}", e.term).contains("Const(\"throw\")")).count();
    let dir = scratch_dir("exception");
    let text: String =
        entries.iter().map(|e| format!("{} :: {}\n", print_term(&Term::Comp(e.term.clone())), e.ty)).collect();
    std::fs::write(dir.join("corpus.txt"), text).unwrap();
    let mut codes = Vec::new();
    let mut negative = String::new();
    for (tag, exn) in [("good", "e1"), ("bad", "e2")] {
        let glue = dir.join(format!("{tag}.json"));
        std::fs::write(&glue, exception_glue(exn)).unwrap();
        let (code, out) =
            run_cli(&["logrel", "--glue", glue.to_str().unwrap(), dir.join("corpus.txt").to_str().unwrap()]);
        codes.push(code);
        if tag == "bad" {
            negative = out;
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    let direct = check_basic_lemma(&g, &entries).map_err(|e| e.to_string())?;
    ensure(direct.passed() && direct.verdicts.len() == 500, || direct.summary())?;
    ensure(codes == [cli::EXIT_PASS, cli::EXIT_FAIL], || format!("exit codes {codes:?}: {negative}"))?;
    ensure(negative.contains("counterexample (unrelated constant): throw : F b"), || negative.clone())?;
    ensure(uses_throw > 0, || "no term mentions the constant".into())?;
    Ok(format!(
        "500 terms pass (exit 0); throw = raise e2 gives exit 1 with a counterexample ({uses_throw} terms use throw)"
    ))
}

/// Every leaf of `t` lies in `r`: membership by collecting the leaves first.
fn leaves(t: &MonVal, out: &mut Vec<SemVal>) {
    match t {
        MonVal::Ret(x) => out.push((**x).clone()),
        MonVal::Node { args, .. } => args.iter().for_each(|a| leaves(a, out)),
        other => panic!("{other} is not a tree"),
    }
}

fn random_tree(rng: &mut ChaCha8Rng, depth: usize) -> MonVal {
    let leaf = |rng: &mut ChaCha8Rng| MonVal::Ret(Arc::new(SemVal::atom(if rng.gen_bool(0.7) { "a" } else { "b" })));
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..4) {
        0 => leaf(rng),
        1 => MonVal::Node { op: "fail".into(), param: None, args: Arc::new(Vec::new()) },
        _ => MonVal::Node {
            op: "or".into(),
            param: None,
            args: Arc::new(vec![random_tree(rng, depth - 1), random_tree(rng, depth - 1)]),
        },
    }
}

fn free_gluing() -> Outcome {
    let b = || ValueType::base("b");
    // Only `c`, denoting the related element, is a constant.
    let sig = Signature::new()
        .with_value_base("b")
        .with_const("c", AnyType::Value(b()))
        .with_op("or", 2, None)
        .with_op("fail", 0, None);
    let monad = free_monad();
    let lifting = free_lifting(Arc::new(monad.clone())).map_err(|e| e.to_string())?;
    let lifting_ref: LiftingRef = Arc::new(lifting.clone());
    let r = Pred::from_members(ab(), [SemVal::atom("a")]).unwrap();
    let model = common::algebra_with(&sig, monad, BTreeMap::from([("c".into(), SemVal::atom("a"))]));
    let g =
        GluedModel::new(model, Mode::Unary, BTreeMap::from([("b".into(), r.clone())]), BTreeMap::new(), lifting_ref)
            .map_err(|e| e.to_string())?;
    let tys = [fb(), CompType::arrow(b(), fb()), CompType::free(ValueType::sum(b(), b())), CompType::with(fb(), fb())];
    let entries = corpus(&sig, &tys, 125, 3);
    let report = check_basic_lemma(&g, &entries).map_err(|e| e.to_string())?;
    ensure(report.passed() && report.verdicts.len() == 500, || report.summary())?;
    let lifted = lifting.lift(&r).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut members = 0;
    for _ in 0..100 {
        let t = random_tree(&mut rng, 3);
        let mut ls = Vec::new();
        leaves(&t, &mut ls);
        let oracle = ls.iter().all(|x| *x == SemVal::atom("a"));
        let got = lifted.contains(&SemVal::Mon(t.clone())).map_err(|e| e.to_string())?;
        ensure(got == oracle, || format!("{t}: lifting says {got}, oracle says {oracle}"))?;
        members += usize::from(got);
    }
    Ok(format!("500 terms pass; 100 sampled trees agree with the leaf oracle ({members} members)"))
}

fn lifting_laws() -> Outcome {
    let errors = SemSet::atoms(["e1", "e2"]);
    let exc = exception_lifting(
        Arc::new(Monad::exception(errors.clone()).unwrap()),
        Pred::from_members(errors, [SemVal::atom("e1")]).unwrap(),
    )
    .unwrap();
    let free = free_lifting(Arc::new(free_monad())).unwrap();
    let liftings: Vec<Box<dyn Lifting>> =
        vec![Box::new(exc), Box::new(free), Box::new(TtLifting::erratic()), Box::new(em_pair_lifting(EmVariant::Full))];
    let bounds = LiftingBounds::default();
    let mut parts = Vec::new();
    for l in &liftings {
        let r = check_lifting_laws(l.as_ref(), &bounds).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("{}: {:?}", r.subject, r.failures.first()))?;
        ensure(r.skipped.is_empty(), || format!("{}: skipped {:?}", r.subject, r.skipped))?;
        parts.push(format!("{} ({} cases)", l.name(), r.checked));
    }
    let broken = check_lifting_laws(&em_pair_lifting(EmVariant::NoEmpty), &bounds).map_err(|e| e.to_string())?;
    let cx = broken.failures.first().ok_or("the broken lifting passed")?;
    Ok(format!("{} pass at carrier 3, rank 3; em-nonempty rejected: {cx}", parts.join(", ")))
}

fn tt_report() -> Outcome {
    let r = tt_cross_check(4).map_err(|e| e.to_string())?;
    ensure(r.consistent, || format!("{:?}", r.notes))?;
    ensure(r.cases.len() == 1 + 2 + 4 + 8 + 16, || format!("{} cases", r.cases.len()))?;
    for c in &r.cases {
        let (brute, closed): (BTreeSet<_>, BTreeSet<_>) = (c.brute.iter().collect(), c.closed.iter().collect());
        let only_b: BTreeSet<_> = brute.difference(&closed).copied().collect();
        let only_c: BTreeSet<_> = closed.difference(&brute).copied().collect();
        ensure(only_b == c.only_brute.iter().collect() && only_c == c.only_closed.iter().collect(), || {
            format!("inconsistent case {c:?}")
        })?;
        ensure(
            c.empty_in_brute == c.brute.contains(&"{}".into()) && c.empty_in_closed == c.closed.contains(&"{}".into()),
            || format!("empty-set status wrong in {c:?}"),
        )?;
        let show = |v: &[String]| format!("[{}]", v.join(", "));
        let rel = c.relation.join(", ");
        if c.agrees() {
            println!("    |X|={} R={{{rel}}}: agree", c.size);
        } else {
            println!(
                "    |X|={} R={{{rel}}}: only brute {}, only closed {}",
                c.size,
                show(&c.only_brute),
                show(&c.only_closed)
            );
        }
    }
    let empty_only_closed = r.cases.iter().filter(|c| c.empty_in_closed && !c.empty_in_brute).count();
    Ok(format!(
        "{} cases, {} agree; the empty set is in the closed form but not the brute-force lift in {} cases",
        r.cases.len(),
        r.agreements(),
        empty_only_closed
    ))
}

fn model_laws() -> Outcome {
    let exhaustive = LawBounds { max_size: 4, combo_size: 3, budget: 5_000_000, ..LawBounds::default() };
    let bounded = LawBounds { max_size: 4, combo_size: 2, ..LawBounds::default() };
    let monads = [
        (Monad::pfin(), &exhaustive),
        (Monad::exception(SemSet::atoms(["e1", "e2"])).unwrap(), &exhaustive),
        (Monad::state(SemSet::atoms(["s0", "s1"])).unwrap(), &bounded),
        (Monad::list(), &exhaustive),
        (free_monad(), &bounded),
    ];
    let mut skipped = Vec::new();
    let mut checked = 0;
    let mut absorb = |r: LawReport| -> Result<(), String> {
        ensure(r.passed(), || format!("{}: {:?}", r.subject, r.failures.first()))?;
        checked += r.checked;
        skipped.extend(r.skipped.into_iter().map(|s| format!("{}: {s}", r.subject)));
        Ok(())
    };
    for (m, b) in &monads {
        absorb(check_monad_laws(m, b).map_err(|e| e.to_string())?)?;
    }
    let small = LawBounds { combo_size: 2, ..LawBounds::default() };
    let objects =
        [fb(), CompType::arrow(ValueType::bool(), fb()), CompType::with(fb(), CompType::free(ValueType::Unit))];
    for (_, model) in model_kinds().into_iter().filter(|(k, _)| *k != "product") {
        let monad = model.monad().unwrap().clone();
        for ty in &objects {
            let obj = interp_ctype(model.as_ref(), ty).map_err(|e| e.to_string())?;
            absorb(check_object_laws(&monad, &obj, &small).map_err(|e| e.to_string())?)?;
        }
    }
    let mut beta = 0;
    for (kind, model) in model_kinds() {
        for inst in beta_instances(model.signature(), 5, 500) {
            let l = eval_comp(&model, &Env::new(), &inst.redex, &inst.ty).map_err(|e| e.to_string())?;
            let r = eval_comp(&model, &Env::new(), &inst.reduct, &inst.ty).map_err(|e| e.to_string())?;
            ensure(sem_eq(&l, &r).unwrap_or(false), || format!("{kind}, {}: {:?}: {l} vs {r}", inst.law, inst.redex))?;
            beta += 1;
        }
    }
    for s in &skipped {
        println!("    skipped {s}");
    }
    Ok(format!(
        "{checked} law cases pass ({} shapes over budget, listed above); {beta} β instances over 7 model kinds",
        skipped.len()
    ))
}

fn fibration() -> Outcome {
    let start = Instant::now();
    let f = pred_truncation(2).map_err(|e| e.to_string())?;
    for (side, l) in [("predicates", &f.source), ("sets", &f.target)] {
        let r = check_lind_axioms(l).map_err(|e| e.to_string())?;
        ensure(r.valid(), || format!("{side}: {r}"))?;
    }
    let r = check_fibration_property(&f, u64::MAX).map_err(|e| e.to_string())?;
    ensure(r.is_fibration(), || r.to_string())?;
    let lifted = r.lifts.len();

    let gone = check_fibration_property(&delete_object(&f, "2{0}"), u64::MAX).map_err(|e| e.to_string())?;
    let named: Vec<_> = gone.failures.iter().map(|x| (x.k.as_str(), x.a.as_str(), x.y.as_str())).collect();
    ensure(named == [("2>2[10]", "2", "2{1}")], || gone.to_string())?;

    let mut bad = f.source.clone();
    let rho = "2{0,1}>2{0,1}[00]";
    bad.reindex.get_mut(rho).unwrap().insert("2{0,1}>2{0,1}[0001]".into(), "2{0,1}>2{0,1}[0101]".into());
    let v = check_lind_axioms(&bad).map_err(|e| e.to_string())?;
    ensure(!v.valid() && v.violations.iter().all(|x| x.location.contains(rho)), || v.to_string())?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!(
        "Pred truncation over {{0,1,2}} is a fibration ({lifted} arrows lifted); deleting 2{{0}} names `2>2[10]`; \
         a corrupted reindexing gives {} located violations; {took:.2?}",
        v.violations.len()
    ))
}

fn round_trip() -> Outcome {
    let b = || ValueType::base("b");
    let cases = [
        (nd_sig(), fb()),
        (nd_sig(), CompType::arrow(ValueType::sum(b(), ValueType::Unit), CompType::with(fb(), fb()))),
        (state_sig(), CompType::free(ValueType::prod(b(), ValueType::bool()))),
        (common::exc_sig(), CompType::arrow(b(), CompType::free(ValueType::thunk(fb())))),
    ];
    let mut n = 0;
    for (i, (sig, ty)) in cases.iter().enumerate() {
        for m in generate_terms(sig, ty, 5, 100 + i as u64, 250).unwrap() {
            let t = Term::Comp(m);
            let text = print_term(&t);
            let back = parse_program(&text, sig).map_err(|e| format!("{text}: {e}"))?;
            ensure(alpha_eq(&t, &back), || format!("{text} reparses differently"))?;
            n += 1;
        }
    }
    ensure(n == 1000, || format!("{n} terms"))?;
    Ok("1000/1000 terms reparse alpha-equivalently".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("effect simulation", effect_simulation),
        ("basic lemma, exception gluing", exception_gluing),
        ("basic lemma, free lifting", free_gluing),
        ("lifting laws", lifting_laws),
        ("tt cross-check", tt_report),
        ("monad and model laws", model_laws),
        ("fibration checker", fibration),
        ("parser/printer round trip", round_trip),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({:.1?}): {detail}", i + 1, start.elapsed()),
            Err(why) => {
                println!("criterion {}: FAIL  {name} ({:.1?}): {why}", i + 1, start.elapsed());
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
