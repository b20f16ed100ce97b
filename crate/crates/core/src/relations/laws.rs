//! Exhaustive closure checks for liftings.
//!
//! For every carrier shape up to the bound and every relation `R` on it, the checker
//! verifies unit closure, monotonicity in `R`, closure under each operation, and
//! closure under sequencing. Elements of infinite lifted carriers range over all
//! elements up to a rank. Values are interned per component, so the inner loops
//! only touch integer tables.
//!
//! Sequencing closure is checked in a reduced but complete form: given `R'` and a
//! continuation `k`, let `K` be the largest relation with `k(K) ⊆ lift(R')`; then
//! `bind(t, k) ∈ lift(R')` must hold for every `t ∈ lift(K)`. Any `R` satisfying the
//! hypothesis lies inside `K`, so with monotonicity this covers every `R`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::sync::Arc;

use super::lifting::{shared_instances, Lifting};
use super::Pred;
use crate::semcore::laws::LawReport;
use crate::semcore::{MonVal, Monad, OpInstance, SemError, SemSet, SemVal};

pub type LiftingReport = LawReport;

#[derive(Clone, Debug)]
pub struct LiftingBounds {
    /// Largest base carrier (on each side for binary liftings).
    pub carrier: usize,
    /// Rank of lifted elements in the unit and monotonicity checks.
    pub rank: usize,
    /// Rank of operation arguments and of sequenced computations.
    pub arg_rank: usize,
    /// Largest carrier a continuation lands in.
    pub cont_carrier: usize,
    /// Rank of continuation images.
    pub cont_rank: usize,
    /// Most cases one check at one shape may enumerate.
    pub budget: u128,
    /// Checks every instance with these names; `None` checks the instances the
    /// lifting claims closure under.
    pub ops: Option<Vec<String>>,
}

impl Default for LiftingBounds {
    fn default() -> Self {
        LiftingBounds { carrier: 3, rank: 3, arg_rank: 2, cont_carrier: 2, cont_rank: 1, budget: 20_000_000, ops: None }
    }
}

type Key = [usize; 2];

#[derive(Default)]
struct Interner {
    vals: Vec<SemVal>,
    index: HashMap<SemVal, usize>,
}

impl Interner {
    fn from_vals(vals: Vec<SemVal>) -> Self {
        let mut t = Interner::default();
        for v in vals {
            t.intern(v);
        }
        t
    }

    fn intern(&mut self, v: SemVal) -> usize {
        if let Some(i) = self.index.get(&v) {
            return *i;
        }
        self.vals.push(v.clone());
        self.index.insert(v, self.vals.len() - 1);
        self.vals.len() - 1
    }

    fn len(&self) -> usize {
        self.vals.len()
    }
}

/// Base carriers for one size combination, with the relation points enumerated.
struct Shape {
    monads: Vec<Arc<Monad>>,
    bases: Vec<SemSet>,
    sizes: Vec<usize>,
    carrier: SemSet,
    /// Point `p` sits at component positions `coords[p]`.
    points: Vec<SemVal>,
    coords: Vec<Key>,
}

impl Shape {
    fn new(monads: &[Arc<Monad>], sizes: &[usize]) -> Self {
        let names = ["x", "y"];
        let bases: Vec<SemSet> =
            sizes.iter().zip(names).map(|(n, p)| SemSet::atoms((0..*n).map(|i| format!("{p}{i}")))).collect();
        let (mut points, mut coords) = (Vec::new(), Vec::new());
        if sizes.len() == 1 {
            for i in 0..sizes[0] {
                points.push(SemVal::atom(&format!("x{i}")));
                coords.push([i, 0]);
            }
        } else {
            for i in 0..sizes[0] {
                for j in 0..sizes[1] {
                    points.push(SemVal::pair(SemVal::atom(&format!("x{i}")), SemVal::atom(&format!("y{j}"))));
                    coords.push([i, j]);
                }
            }
        }
        let carrier =
            if bases.len() == 1 { bases[0].clone() } else { SemSet::prod(bases[0].clone(), bases[1].clone()) };
        Shape { monads: monads.to_vec(), bases, sizes: sizes.to_vec(), carrier, points, coords }
    }

    fn describe(&self) -> String {
        match self.sizes.as_slice() {
            [n] => format!("|X|={n}"),
            [n, m] => format!("|X|={n}, |Y|={m}"),
            _ => unreachable!(),
        }
    }

    fn masks(&self) -> u64 {
        1u64 << self.points.len()
    }

    fn members(&self, mask: u64) -> Vec<SemVal> {
        (0..self.points.len()).filter(|p| mask >> p & 1 == 1).map(|p| self.points[p].clone()).collect()
    }

    fn show(&self, mask: u64) -> String {
        let m: Vec<String> = self.members(mask).iter().map(|v| v.to_string()).collect();
        format!("{{{}}}", m.join(", "))
    }

    fn relation(&self, lifting: &dyn Lifting, mask: u64) -> Result<Pred, SemError> {
        lifting.lift(&Pred::from_members(self.carrier.clone(), self.members(mask))?)
    }

    /// Per component, the lifted elements up to `rank`.
    fn lifted(&self, rank: usize) -> Result<Vec<Interner>, SemError> {
        self.monads
            .iter()
            .zip(&self.bases)
            .map(|(m, x)| {
                let tx = m.apply(x);
                Ok(Interner::from_vals(if tx.is_finite() { tx.elements()? } else { tx.bounded(rank)? }))
            })
            .collect()
    }
}

fn join(parts: &[&SemVal]) -> SemVal {
    match parts {
        [a] => (*a).clone(),
        [a, b] => SemVal::pair((*a).clone(), (*b).clone()),
        _ => unreachable!(),
    }
}

fn value(tables: &[Interner], key: Key) -> SemVal {
    let parts: Vec<&SemVal> = tables.iter().enumerate().map(|(i, t)| &t.vals[key[i]]).collect();
    join(&parts)
}

fn keys(tables: &[Interner]) -> Vec<Key> {
    let mut out = vec![[0, 0]];
    for (i, t) in tables.iter().enumerate() {
        out = out
            .iter()
            .flat_map(|k| {
                (0..t.len()).map(move |j| {
                    let mut k = *k;
                    k[i] = j;
                    k
                })
            })
            .collect();
    }
    out
}

/// Dense membership cache over interned component values.
struct Memo {
    pred: Pred,
    width: usize,
    cells: Vec<Option<bool>>,
}

impl Memo {
    fn new(pred: Pred, tables: &[Interner]) -> Self {
        let width = tables.get(1).map_or(1, Interner::len);
        Memo { pred, width, cells: Vec::new() }
    }

    fn holds(&mut self, tables: &[Interner], key: Key) -> Result<bool, SemError> {
        let at = key[0] * self.width + key[1];
        if at >= self.cells.len() {
            let size = tables.iter().map(Interner::len).product::<usize>().max(at + 1);
            self.cells.resize(size, None);
        }
        if let Some(b) = self.cells[at] {
            return Ok(b);
        }
        let b = self.pred.contains(&value(tables, key))?;
        self.cells[at] = Some(b);
        Ok(b)
    }
}

fn size_tuples(arity: usize, bound: usize) -> Vec<Vec<usize>> {
    if arity == 1 {
        (0..=bound).map(|n| vec![n]).collect()
    } else {
        (0..=bound).flat_map(|n| (0..=bound).map(move |m| vec![n, m])).collect()
    }
}

fn op_name(inst: &OpInstance) -> String {
    let s = inst.to_string();
    s.split('[').next().unwrap_or_default().to_string()
}

/// The claimed instances, or every instance with one of the requested names.
fn instances(lifting: &dyn Lifting, only: Option<&[String]>) -> Result<Vec<OpInstance>, SemError> {
    match only {
        None => lifting.operations(),
        Some(names) => Ok(shared_instances(&lifting.effect().monads())?
            .into_iter()
            .filter(|inst| names.contains(&op_name(inst)))
            .collect()),
    }
}

fn unit_of(sh: &Shape, p: usize) -> SemVal {
    let parts: Vec<SemVal> = sh
        .monads
        .iter()
        .enumerate()
        .map(|(i, m)| SemVal::Mon(m.unit(SemVal::atom(&format!("{}{}", ["x", "y"][i], sh.coords[p][i])))))
        .collect();
    join(&parts.iter().collect::<Vec<_>>())
}

fn position(x: &SemVal) -> Result<usize, SemError> {
    match x {
        SemVal::Atom(a) => a[1..].parse().map_err(|_| SemError::Defensive(format!("{x} is not a shape atom"))),
        _ => Err(SemError::Defensive(format!("{x} is not a shape atom"))),
    }
}

/// Unit closure, monotonicity, operation closure and sequencing closure of `lifting`.
pub fn check_lifting_laws(lifting: &dyn Lifting, b: &LiftingBounds) -> Result<LiftingReport, SemError> {
    let monads = lifting.effect().monads();
    let mut report = LiftingReport { subject: format!("lifting {}", lifting.name()), ..Default::default() };
    let insts = instances(lifting, b.ops.as_deref())?;
    for sizes in size_tuples(monads.len(), b.carrier) {
        let sh = Shape::new(&monads, &sizes);
        if sh.points.len() > 20 {
            report.skipped.push(format!("all checks at {}: too many relations", sh.describe()));
            continue;
        }
        unit_and_monotone(lifting, &sh, b, &mut report)?;
        operations(lifting, &sh, &insts, b, &mut report)?;
        for csizes in size_tuples(monads.len(), b.cont_carrier) {
            sequencing(lifting, &sh, &Shape::new(&monads, &csizes), b, &mut report)?;
        }
    }
    Ok(report)
}

fn unit_and_monotone(
    lifting: &dyn Lifting,
    sh: &Shape,
    b: &LiftingBounds,
    report: &mut LiftingReport,
) -> Result<(), SemError> {
    let tables = sh.lifted(b.rank)?;
    let ks = keys(&tables);
    let cases = (sh.masks() as u128) * (ks.len() as u128 + sh.points.len() as u128);
    if cases > b.budget {
        report.skipped.push(format!("unit and monotonicity at {}: {cases} cases", sh.describe()));
        return Ok(());
    }
    let mut member = Vec::with_capacity(sh.masks() as usize);
    for mask in 0..sh.masks() {
        let lr = sh.relation(lifting, mask)?;
        for p in (0..sh.points.len()).filter(|p| mask >> p & 1 == 1) {
            let u = unit_of(sh, p);
            if !lr.contains(&u)? {
                report.failures.push(format!(
                    "unit at {}: {} in R = {} but {u} is not in lift(R)",
                    sh.describe(),
                    sh.points[p],
                    sh.show(mask)
                ));
            }
        }
        let row: Vec<bool> = ks.iter().map(|k| lr.contains(&value(&tables, *k))).collect::<Result<_, _>>()?;
        member.push(row);
    }
    for mask in 0..sh.masks() {
        for p in (0..sh.points.len()).filter(|p| mask >> p & 1 == 0) {
            let wider = mask | 1 << p;
            for (j, k) in ks.iter().enumerate() {
                if member[mask as usize][j] && !member[wider as usize][j] {
                    report.failures.push(format!(
                        "monotonicity at {}: {} is in lift({}) but not in lift({})",
                        sh.describe(),
                        value(&tables, *k),
                        sh.show(mask),
                        sh.show(wider)
                    ));
                }
            }
        }
    }
    report.checked += cases as u64;
    Ok(())
}

/// Mixed-radix enumeration of `arity`-tuples over `n` items.
fn tuple_at(mut idx: usize, n: usize, arity: usize) -> Vec<usize> {
    (0..arity)
        .map(|_| {
            let i = idx % n;
            idx /= n;
            i
        })
        .collect()
}

fn operations(
    lifting: &dyn Lifting,
    sh: &Shape,
    insts: &[OpInstance],
    b: &LiftingBounds,
    report: &mut LiftingReport,
) -> Result<(), SemError> {
    let args = sh.lifted(b.arg_rank)?;
    let ks = keys(&args);
    for inst in insts {
        let arity = sh.monads[0].arity(inst);
        let cases = (sh.masks() as u128) * (ks.len() as u128).saturating_pow(arity as u32);
        if cases > b.budget {
            report.skipped.push(format!("closure under `{inst}` at {}: {cases} cases", sh.describe()));
            continue;
        }
        // Per component, the operation's table over interned arguments.
        let mut results: Vec<Interner> = Vec::new();
        let mut tables: Vec<Vec<usize>> = Vec::new();
        for (i, m) in sh.monads.iter().enumerate() {
            let n = args[i].len();
            let mut res = Interner::default();
            let mut table = Vec::new();
            for idx in 0..n.pow(arity as u32) {
                let tuple: Vec<MonVal> = tuple_at(idx, n, arity)
                    .iter()
                    .map(|j| args[i].vals[*j].as_mon().cloned())
                    .collect::<Result<_, _>>()?;
                table.push(res.intern(SemVal::Mon(m.op_instance(inst, &tuple)?)));
            }
            results.push(res);
            tables.push(table);
        }
        for mask in 0..sh.masks() {
            let lr = sh.relation(lifting, mask)?;
            let mut inside = Vec::new();
            for k in &ks {
                if lr.contains(&value(&args, *k))? {
                    inside.push(*k);
                }
            }
            let mut memo = Memo::new(lr, &results);
            for idx in 0..inside.len().pow(arity as u32) {
                let chosen = tuple_at(idx, inside.len(), arity);
                let mut key = [0, 0];
                for (i, table) in tables.iter().enumerate() {
                    let n = args[i].len();
                    let at = chosen.iter().rev().fold(0, |acc, c| acc * n + inside[*c][i]);
                    key[i] = table[at];
                }
                if !memo.holds(&results, key)? {
                    let shown: Vec<String> = chosen.iter().map(|c| value(&args, inside[*c]).to_string()).collect();
                    report.failures.push(format!(
                        "closure under `{inst}` at {}: arguments [{}] lie in lift({}) but {} does not",
                        sh.describe(),
                        shown.join("; "),
                        sh.show(mask),
                        value(&results, key)
                    ));
                }
            }
        }
        report.checked += cases as u64;
    }
    Ok(())
}

fn sequencing(
    lifting: &dyn Lifting,
    sh: &Shape,
    cs: &Shape,
    b: &LiftingBounds,
    report: &mut LiftingReport,
) -> Result<(), SemError> {
    let subjects = sh.lifted(b.arg_rank)?;
    let ks = keys(&subjects);
    let images = cs.lifted(b.cont_rank)?;
    // A continuation for component i is its image index at each base position.
    let conts: Vec<Vec<Vec<usize>>> = (0..sh.monads.len())
        .map(|i| {
            let (n, c) = (sh.sizes[i], images[i].len());
            (0..c.pow(n as u32)).map(|idx| tuple_at(idx, c, n)).collect()
        })
        .collect();
    let cont_tuples: u128 = conts.iter().map(|c| c.len() as u128).product();
    let cases = (cs.masks() as u128) * cont_tuples * ks.len() as u128;
    let label = format!("sequencing at {} into {}", sh.describe(), cs.describe());
    if cases > b.budget {
        report.skipped.push(format!("{label}: {cases} cases"));
        return Ok(());
    }
    let mut results: Vec<Interner> = Vec::new();
    let mut bound: Vec<Vec<Vec<usize>>> = Vec::new();
    for (i, m) in sh.monads.iter().enumerate() {
        let mut res = Interner::default();
        let mut table = Vec::with_capacity(subjects[i].len());
        for t in &subjects[i].vals {
            let t = t.as_mon()?;
            let mut row = Vec::with_capacity(conts[i].len());
            for k in &conts[i] {
                let r = m.bind(t, &mut |x| images[i].vals[k[position(x)?]].as_mon().cloned())?;
                row.push(res.intern(SemVal::Mon(r)));
            }
            table.push(row);
        }
        results.push(res);
        bound.push(table);
    }
    let mut lifted_at: HashMap<u64, Vec<bool>> = HashMap::new();
    for rmask in 0..cs.masks() {
        let lr = cs.relation(lifting, rmask)?;
        let mut on_images = Memo::new(lr.clone(), &images);
        let mut on_results = Memo::new(lr, &results);
        for ct in 0..cont_tuples as usize {
            let mut rest = ct;
            let chosen: Vec<usize> = conts
                .iter()
                .map(|c| {
                    let i = rest % c.len();
                    rest /= c.len();
                    i
                })
                .collect();
            let mut kmask = 0u64;
            for (p, at) in sh.coords.iter().enumerate() {
                let mut key = [0, 0];
                for i in 0..chosen.len() {
                    key[i] = conts[i][chosen[i]][at[i]];
                }
                if on_images.holds(&images, key)? {
                    kmask |= 1 << p;
                }
            }
            if let Entry::Vacant(slot) = lifted_at.entry(kmask) {
                let lk = sh.relation(lifting, kmask)?;
                slot.insert(ks.iter().map(|k| lk.contains(&value(&subjects, *k))).collect::<Result<_, _>>()?);
            }
            let row = &lifted_at[&kmask];
            for (j, k) in ks.iter().enumerate() {
                if !row[j] {
                    continue;
                }
                let mut key = [0, 0];
                for i in 0..chosen.len() {
                    key[i] = bound[i][k[i]][chosen[i]];
                }
                if !on_results.holds(&results, key)? {
                    let shown: Vec<String> = (0..chosen.len())
                        .map(|i| {
                            let maps: Vec<String> = conts[i][chosen[i]]
                                .iter()
                                .enumerate()
                                .map(|(x, c)| format!("{}{x} => {}", ["x", "y"][i], images[i].vals[*c]))
                                .collect();
                            format!("fun{{{}}}", maps.join(", "))
                        })
                        .collect();
                    report.failures.push(format!(
                        "{label}: R' = {}, k = {}, {} in lift({}) but its sequencing {} is not in lift(R')",
                        cs.show(rmask),
                        shown.join(" & "),
                        value(&subjects, *k),
                        sh.show(kmask),
                        value(&results, key)
                    ));
                }
            }
        }
    }
    report.checked += cases as u64;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::lifting::{em_pair_lifting, exception_lifting, EmVariant, TtLifting};

    fn small() -> LiftingBounds {
        LiftingBounds { carrier: 2, rank: 2, arg_rank: 1, cont_carrier: 1, cont_rank: 1, ..Default::default() }
    }

    #[test]
    fn exception_lifting_passes() {
        let errors = SemSet::atoms(["e1", "e2"]);
        let m = Arc::new(Monad::exception(errors.clone()).unwrap());
        let l = exception_lifting(m, Pred::from_members(errors, [SemVal::atom("e1")]).unwrap()).unwrap();
        let r = check_lifting_laws(&l, &small()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.skipped.is_empty());
    }

    #[test]
    fn em_variants() {
        let full = check_lifting_laws(&em_pair_lifting(EmVariant::Full), &small()).unwrap();
        assert!(full.passed(), "{:?}", full.failures);
        let fwd = check_lifting_laws(&em_pair_lifting(EmVariant::ForwardOnly), &small()).unwrap();
        assert!(fwd.passed(), "{:?}", fwd.failures);
        let broken = check_lifting_laws(&em_pair_lifting(EmVariant::NoEmpty), &small()).unwrap();
        assert!(broken.failures.iter().any(|f| f.contains("closure under `fail`")));
    }

    #[test]
    fn erratic_fails_only_at_fail() {
        let l = TtLifting::erratic();
        assert_eq!(l.operations().unwrap(), [OpInstance::Or]);
        assert!(check_lifting_laws(&l, &small()).unwrap().passed());
        let both = LiftingBounds { ops: Some(vec!["or".into(), "fail".into()]), ..small() };
        let r = check_lifting_laws(&l, &both).unwrap();
        assert!(!r.failures.is_empty());
        assert!(r.failures.iter().all(|f| f.contains("closure under `fail`")), "{:?}", r.failures);
    }

    #[test]
    fn budget_is_reported() {
        let tight = LiftingBounds { budget: 10, ..small() };
        let r = check_lifting_laws(&em_pair_lifting(EmVariant::Full), &tight).unwrap();
        assert!(!r.skipped.is_empty());
    }
}
