//! Exhaustive law checks for monads and computation objects on small carriers.
//!
//! Continuations are enumerated as positional tables over the atoms `x0, x1, ..`.
//! Every quantifier runs over the complete finite space, or over all elements of
//! bounded rank when the carrier is infinite (lists, trees). A size combination
//! whose space exceeds the budget is recorded in `skipped`, never sampled.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::model::{CompObject, Kont};
use super::monad::{Monad, OpInstance};
use super::set::SemSet;
use super::value::{FunVal, MonVal, SemVal};
use super::SemError;

#[derive(Clone, Debug)]
pub struct LawBounds {
    /// Largest carrier `X` for the unit laws.
    pub max_size: usize,
    /// Largest carrier in associativity and algebraicity checks.
    pub combo_size: usize,
    /// Rank bound for elements of infinite carriers.
    pub rank: usize,
    /// Rank bound for continuation images.
    pub cont_rank: usize,
    /// Most cases a single size combination may enumerate.
    pub budget: u128,
}

impl Default for LawBounds {
    fn default() -> Self {
        LawBounds { max_size: 4, combo_size: 3, rank: 2, cont_rank: 1, budget: 2_000_000 }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LawReport {
    pub subject: String,
    pub checked: u64,
    pub failures: Vec<String>,
    pub skipped: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn absorb(&mut self, checked: u64, failures: Vec<String>) {
        self.checked += checked;
        self.failures.extend(failures);
    }
}

fn atoms(n: usize) -> Vec<SemVal> {
    (0..n).map(|i| SemVal::atom(&format!("x{i}"))).collect()
}

fn elements(set: &SemSet, rank: usize) -> Result<Vec<SemVal>, SemError> {
    if set.is_finite() {
        set.elements()
    } else {
        set.bounded(rank)
    }
}

fn monads(set: &SemSet, rank: usize) -> Result<Vec<MonVal>, SemError> {
    elements(set, rank)?.into_iter().map(|v| v.as_mon().cloned()).collect()
}

/// The `idx`-th function from `dom_len` positions into `cod`, as its list of images.
fn nth_images<T: Clone>(cod: &[T], dom_len: usize, mut idx: u128) -> Vec<T> {
    let n = cod.len() as u128;
    (0..dom_len)
        .map(|_| {
            let i = (idx % n) as usize;
            idx /= n;
            cod[i].clone()
        })
        .collect()
}

fn count(cod: usize, dom: usize) -> u128 {
    (cod as u128).checked_pow(dom as u32).unwrap_or(u128::MAX)
}

fn position(x: &SemVal) -> Result<usize, SemError> {
    match x {
        SemVal::Atom(a) => a[1..].parse().map_err(|_| SemError::Defensive(format!("{x} is not a test atom"))),
        _ => Err(SemError::Defensive(format!("{x} is not a test atom"))),
    }
}

fn total(parts: &[u128]) -> u128 {
    parts.iter().fold(1u128, |a, b| a.saturating_mul(*b))
}

/// The name and parameter under which `inst` is requested from an object.
pub fn instance_call(inst: &OpInstance) -> (String, Option<SemVal>) {
    match inst {
        OpInstance::Or => ("or".into(), None),
        OpInstance::Fail => ("fail".into(), None),
        OpInstance::Raise(e) => ("raise".into(), Some(e.clone())),
        OpInstance::Read => ("read".into(), None),
        OpInstance::Write(s) => ("write".into(), Some(s.clone())),
        OpInstance::Formal(n, p) => (n.clone(), p.clone()),
    }
}

/// Unit laws, associativity and algebraicity of operations for `monad`.
pub fn check_monad_laws(monad: &Monad, b: &LawBounds) -> Result<LawReport, SemError> {
    let mut report = LawReport { subject: format!("monad {monad}"), ..Default::default() };
    for n in 0..=b.max_size {
        let xs = atoms(n);
        let tx = monads(&monad.apply(&SemSet::finite(xs.clone())), b.rank)?;
        // Left unit: only k(x) matters, so quantify over x and the image.
        let mut fails = Vec::new();
        for x in &xs {
            for v in &tx {
                let got = monad.bind(&monad.unit(x.clone()), &mut |_| Ok(v.clone()))?;
                if got != *v {
                    fails.push(format!("left unit at |X|={n}: x={x}, k(x)={v}, got {got}"));
                }
            }
        }
        for t in &tx {
            let got = monad.bind(t, &mut |x| Ok(monad.unit(x.clone())))?;
            if got != *t {
                fails.push(format!("right unit at |X|={n}: t={t}, got {got}"));
            }
        }
        report.absorb((xs.len() * tx.len() + tx.len()) as u64, fails);
    }
    for a in 1..=b.combo_size {
        for bsz in 1..=b.combo_size {
            for c in 1..=b.combo_size {
                assoc(monad, b, (a, bsz, c), &mut report)?;
            }
        }
    }
    for inst in monad.instances()? {
        for a in 1..=b.combo_size {
            for c in 1..=b.combo_size {
                algebraic(monad, b, &inst, (a, c), &mut report)?;
            }
        }
    }
    Ok(report)
}

fn assoc(
    monad: &Monad,
    b: &LawBounds,
    (a, bsz, c): (usize, usize, usize),
    report: &mut LawReport,
) -> Result<(), SemError> {
    let tx = monads(&monad.apply(&SemSet::finite(atoms(a))), b.rank)?;
    let ty = monads(&monad.apply(&SemSet::finite(atoms(bsz))), b.cont_rank)?;
    let tz = monads(&monad.apply(&SemSet::finite(atoms(c))), b.cont_rank)?;
    let (nk, nh) = (count(ty.len(), a), count(tz.len(), bsz));
    let cases = total(&[tx.len() as u128, nk, nh]);
    if cases > b.budget {
        report.skipped.push(format!("associativity at sizes ({a},{bsz},{c}): {cases} cases"));
        return Ok(());
    }
    let outer: Vec<(usize, u128)> = (0..tx.len()).flat_map(|i| (0..nk).map(move |k| (i, k))).collect();
    let results: Vec<Result<Vec<String>, SemError>> = outer
        .par_iter()
        .map(|&(i, kidx)| {
            let t = &tx[i];
            let k = nth_images(&ty, a, kidx);
            let tk = monad.bind(t, &mut |x| Ok(k[position(x)?].clone()))?;
            let mut fails = Vec::new();
            for hidx in 0..nh {
                let h = nth_images(&tz, bsz, hidx);
                let lhs = monad.bind(&tk, &mut |y| Ok(h[position(y)?].clone()))?;
                let rhs = monad.bind(t, &mut |x| monad.bind(&k[position(x)?], &mut |y| Ok(h[position(y)?].clone())))?;
                if lhs != rhs {
                    fails.push(format!(
                        "associativity at sizes ({a},{bsz},{c}): t={t}, k={k:?}, h={h:?}: {lhs} vs {rhs}"
                    ));
                }
            }
            Ok(fails)
        })
        .collect();
    let mut fails = Vec::new();
    for r in results {
        fails.extend(r?);
    }
    report.absorb(cases as u64, fails);
    Ok(())
}

fn algebraic(
    monad: &Monad,
    b: &LawBounds,
    inst: &OpInstance,
    (a, c): (usize, usize),
    report: &mut LawReport,
) -> Result<(), SemError> {
    let arity = monad.arity(inst);
    let tx = monads(&monad.apply(&SemSet::finite(atoms(a))), b.cont_rank)?;
    let ty = monads(&monad.apply(&SemSet::finite(atoms(c))), b.cont_rank)?;
    let (nargs, nk) = (count(tx.len(), arity), count(ty.len(), a));
    let cases = total(&[nargs, nk]);
    if cases > b.budget {
        report.skipped.push(format!("algebraicity of `{inst}` at sizes ({a},{c}): {cases} cases"));
        return Ok(());
    }
    let results: Vec<Result<Vec<String>, SemError>> = (0..nargs)
        .into_par_iter()
        .map(|aidx| {
            let args = nth_images(&tx, arity, aidx);
            let whole = monad.op_instance(inst, &args)?;
            let mut fails = Vec::new();
            for kidx in 0..nk {
                let k = nth_images(&ty, a, kidx);
                let kf = &mut |x: &SemVal| Ok(k[position(x)?].clone());
                let lhs = monad.bind(&whole, kf)?;
                let parts: Vec<MonVal> = args.iter().map(|t| monad.bind(t, kf)).collect::<Result<_, _>>()?;
                let rhs = monad.op_instance(inst, &parts)?;
                if lhs != rhs {
                    fails.push(format!(
                        "algebraicity of `{inst}` at sizes ({a},{c}): args={args:?}, k={k:?}: {lhs} vs {rhs}"
                    ));
                }
            }
            Ok(fails)
        })
        .collect();
    let mut fails = Vec::new();
    for r in results {
        fails.extend(r?);
    }
    report.absorb(cases as u64, fails);
    Ok(())
}

fn table_kont(images: Vec<SemVal>) -> Kont {
    Arc::new(move |x| Ok(images[position(x)?].clone()))
}

/// Laws of a computation object over `monad`: `extend(unit x, k) = k x`,
/// compatibility of `extend` with `bind`, and algebraicity of every operation.
pub fn check_object_laws(monad: &Monad, obj: &CompObject, b: &LawBounds) -> Result<LawReport, SemError> {
    let mut report = LawReport { subject: format!("object with carrier {}", obj.carrier()), ..Default::default() };
    let carrier = elements(&obj.carrier(), b.cont_rank)?;
    for n in 1..=b.combo_size {
        let xs = atoms(n);
        let mut fails = Vec::new();
        for (i, x) in xs.iter().enumerate() {
            for c in &carrier {
                let mut images = vec![carrier[0].clone(); n];
                images[i] = c.clone();
                let got = obj.extend(&SemVal::Mon(monad.unit(x.clone())), &table_kont(images))?;
                if got != *c {
                    fails.push(format!("unit at |X|={n}: x={x}, k(x)={c}, got {got}"));
                }
            }
        }
        report.absorb((n * carrier.len()) as u64, fails);
    }
    for a in 1..=b.combo_size {
        for bsz in 1..=b.combo_size {
            let tx = monads(&monad.apply(&SemSet::finite(atoms(a))), b.rank)?;
            let ty = monads(&monad.apply(&SemSet::finite(atoms(bsz))), b.cont_rank)?;
            let (nf, nk) = (count(ty.len(), a), count(carrier.len(), bsz));
            let cases = total(&[tx.len() as u128, nf, nk]);
            if cases > b.budget {
                report.skipped.push(format!("sequencing at sizes ({a},{bsz}): {cases} cases"));
                continue;
            }
            let outer: Vec<(usize, u128)> = (0..tx.len()).flat_map(|i| (0..nf).map(move |f| (i, f))).collect();
            let results: Vec<Result<Vec<String>, SemError>> = outer
                .par_iter()
                .map(|&(i, fidx)| {
                    let t = &tx[i];
                    let f = nth_images(&ty, a, fidx);
                    let tf = SemVal::Mon(monad.bind(t, &mut |x| Ok(f[position(x)?].clone()))?);
                    let mut fails = Vec::new();
                    for kidx in 0..nk {
                        let k = table_kont(nth_images(&carrier, bsz, kidx));
                        let lhs = obj.extend(&tf, &k)?;
                        let (f2, k2, o2) = (f.clone(), k.clone(), obj.clone());
                        let inner: Kont = Arc::new(move |x| o2.extend(&SemVal::Mon(f2[position(x)?].clone()), &k2));
                        let rhs = obj.extend(&SemVal::Mon(t.clone()), &inner)?;
                        if lhs != rhs {
                            fails.push(format!("sequencing at sizes ({a},{bsz}): t={t}, f={f:?}: {lhs} vs {rhs}"));
                        }
                    }
                    Ok(fails)
                })
                .collect();
            let mut fails = Vec::new();
            for r in results {
                fails.extend(r?);
            }
            report.absorb(cases as u64, fails);
        }
    }
    for inst in monad.instances()? {
        let arity = monad.arity(&inst);
        let (name, param) = instance_call(&inst);
        for a in 1..=b.combo_size {
            let tx = monads(&monad.apply(&SemSet::finite(atoms(a))), b.cont_rank)?;
            let (nargs, nk) = (count(tx.len(), arity), count(carrier.len(), a));
            let cases = total(&[nargs, nk]);
            if cases > b.budget {
                report.skipped.push(format!("algebraicity of `{inst}` at size {a}: {cases} cases"));
                continue;
            }
            let results: Vec<Result<Vec<String>, SemError>> = (0..nargs)
                .into_par_iter()
                .map(|aidx| {
                    let args = nth_images(&tx, arity, aidx);
                    let whole = SemVal::Mon(monad.op_instance(&inst, &args)?);
                    let mut fails = Vec::new();
                    for kidx in 0..nk {
                        let k = table_kont(nth_images(&carrier, a, kidx));
                        let lhs = obj.extend(&whole, &k)?;
                        let parts: Vec<SemVal> =
                            args.iter().map(|t| obj.extend(&SemVal::Mon(t.clone()), &k)).collect::<Result<_, _>>()?;
                        let rhs = obj.op(&name, param.as_ref(), &parts)?;
                        if lhs != rhs {
                            fails.push(format!("algebraicity of `{inst}` at size {a}: args={args:?}: {lhs} vs {rhs}"));
                        }
                    }
                    Ok(fails)
                })
                .collect();
            let mut fails = Vec::new();
            for r in results {
                fails.extend(r?);
            }
            report.absorb(cases as u64, fails);
        }
    }
    Ok(report)
}

/// A function value from positional images, for callers building test continuations.
pub fn positional_fun(images: Vec<SemVal>) -> FunVal {
    FunVal::table(atoms(images.len()).into_iter().zip(images).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LawBounds {
        LawBounds { max_size: 2, combo_size: 2, rank: 2, cont_rank: 1, budget: 200_000 }
    }

    #[test]
    fn shipped_monads_pass() {
        let monads = [
            Monad::pfin(),
            Monad::list(),
            Monad::exception(SemSet::atoms(["e1", "e2"])).unwrap(),
            Monad::state(SemSet::atoms(["s0", "s1"])).unwrap(),
        ];
        for m in monads {
            let r = check_monad_laws(&m, &small()).unwrap();
            assert!(r.passed(), "{m}: {:?}", r.failures);
            assert!(r.checked > 0);
        }
    }

    #[test]
    fn free_objects_pass() {
        let m = Monad::state(SemSet::atoms(["s0", "s1"])).unwrap();
        let obj = CompObject::FreeAlg { monad: Arc::new(m.clone()), x: SemSet::atoms(["a"]) };
        let r = check_object_laws(&m, &obj, &small()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn storage_base_object_passes() {
        let m = Arc::new(Monad::state(SemSet::atoms(["s0", "s1"])).unwrap());
        let obj = CompObject::StateBase { name: "C".into(), monad: m.clone(), y: SemSet::atoms(["y0", "y1"]) };
        let r = check_object_laws(&m, &obj, &small()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn budget_overflow_is_reported() {
        let b = LawBounds { budget: 10, ..small() };
        let r = check_monad_laws(&Monad::pfin(), &b).unwrap();
        assert!(!r.skipped.is_empty());
    }
}
