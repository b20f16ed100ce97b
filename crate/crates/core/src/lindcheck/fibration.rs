//! The lifting property of locally indexed fibrations, by exhaustive search.
//!
//! For `(p, P) : (E, 𝓔) → (B, 𝓑)` and every `k : A →₁ P(Y)` over the unit index,
//! the search looks for `Â` over `A` and `k̂ : Â →₁ Y` over `k` such that every
//! triangle `P(v) = (k ▹ !) ∘ u` over `p(e)` has exactly one `û : X →ₑ Â` with
//! `P(û) = u` and `(k̂ ▹ !) ∘ û = v`. Triangles range over every index `e`, and the
//! report counts the lifts found over each.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::table::Cat;
use super::{AxiomReport, FinLIndFunctor, Lind, LindError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftRecord {
    /// The arrow `k : A →₁ P(Y)` being lifted.
    pub k: String,
    pub a: String,
    pub y: String,
    pub lift_object: String,
    pub lift_arrow: String,
    /// Triangles checked, keyed by the index their unique lift lies over.
    pub lifts_by_index: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftFailure {
    pub k: String,
    pub a: String,
    pub y: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FibrationReport {
    pub source: AxiomReport,
    pub target: AxiomReport,
    /// Failures of functoriality or of compatibility with reindexing.
    pub functor: Vec<String>,
    /// Index arrows without a cartesian lift along `p`.
    pub index_fibration: Vec<String>,
    pub lifts: Vec<LiftRecord>,
    pub failures: Vec<LiftFailure>,
    pub steps: u64,
}

impl FibrationReport {
    /// Whether the preconditions held, so the lift search actually ran.
    pub fn searched(&self) -> bool {
        self.source.valid() && self.target.valid() && self.functor.is_empty() && self.index_fibration.is_empty()
    }

    pub fn is_fibration(&self) -> bool {
        self.searched() && self.failures.is_empty()
    }
}

impl fmt::Display for FibrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (side, r) in [("source", &self.source), ("target", &self.target)] {
            write!(f, "{side} ")?;
            fmt::Display::fmt(r, f)?;
        }
        for m in &self.functor {
            writeln!(f, "functor: {m}")?;
        }
        for m in &self.index_fibration {
            writeln!(f, "index functor: {m}")?;
        }
        for l in &self.lifts {
            let by: Vec<String> = l.lifts_by_index.iter().map(|(e, n)| format!("{e}: {n}")).collect();
            writeln!(
                f,
                "lift of `{}` : {} → P({}) is `{}` : {} → {}; unique lifts by index {{{}}}",
                l.k,
                l.a,
                l.y,
                l.lift_arrow,
                l.lift_object,
                l.y,
                by.join(", ")
            )?;
        }
        for x in &self.failures {
            writeln!(f, "no lift of `{}` : {} → P({}): {}", x.k, x.a, x.y, x.reason)?;
        }
        let verdict = if !self.searched() {
            "preconditions fail, lifts not searched".to_string()
        } else if self.failures.is_empty() {
            format!("fibration: yes ({} arrows lifted, {} steps)", self.lifts.len(), self.steps)
        } else {
            format!(
                "fibration: no ({} of {} arrows without a lift)",
                self.failures.len(),
                self.lifts.len() + self.failures.len()
            )
        };
        writeln!(f, "{verdict}")
    }
}

struct Compiled {
    src: Lind,
    tgt: Lind,
    p_obj: Vec<usize>,
    p_arr: Vec<u32>,
    obj: Vec<usize>,
    arr: Vec<Vec<u32>>,
}

fn lookup<'a>(map: &'a BTreeMap<String, String>, key: &str, what: &str) -> Result<&'a str, LindError> {
    map.get(key).map(String::as_str).ok_or_else(|| LindError::Malformed(format!("{what} does not map `{key}`")))
}

fn compile(f: &FinLIndFunctor, src: Lind, tgt: Lind) -> Result<Compiled, LindError> {
    let bad = |m: String| LindError::Malformed(m);
    let mut p_obj = Vec::new();
    for o in &src.index.objects {
        let t = lookup(&f.index_objects, o, "index object map")?;
        p_obj.push(tgt.index.object(t).ok_or_else(|| bad(format!("`{t}` is not a target index object")))?);
    }
    let mut p_arr = Vec::new();
    for a in &src.index.names {
        let t = lookup(&f.index_arrows, a, "index arrow map")?;
        p_arr.push(tgt.index.arrow(t).ok_or_else(|| bad(format!("`{t}` is not a target index arrow")))?);
    }
    let mut obj = Vec::new();
    for o in &src.objects {
        let t = lookup(&f.objects, o, "object map")?;
        obj.push(tgt.objects.iter().position(|x| x == t).ok_or_else(|| bad(format!("`{t}` is not a target object")))?);
    }
    let mut arr = Vec::new();
    for (c, fib) in src.fibres.iter().enumerate() {
        let cname = &src.index.objects[c];
        let map = f.arrows_at.get(cname).ok_or_else(|| bad(format!("no arrow map over `{cname}`")))?;
        let to = &tgt.fibres[p_obj[c]];
        let mut m = Vec::with_capacity(fib.len());
        for a in &fib.names {
            let t = lookup(map, a, &format!("arrow map over `{cname}`"))?;
            m.push(
                to.arrow(t)
                    .ok_or_else(|| bad(format!("`{t}` is not an arrow over `{}`", tgt.index.objects[p_obj[c]])))?,
            );
        }
        arr.push(m);
    }
    Ok(Compiled { src, tgt, p_obj, p_arr, obj, arr })
}

impl Compiled {
    fn functor_violations(&self) -> Vec<String> {
        let (s, t) = (&self.src, &self.tgt);
        let (si, ti) = (&s.index, &t.index);
        let mut out = Vec::new();
        for r in 0..si.len() as u32 {
            let pr = self.p_arr[r as usize];
            if ti.dom[pr as usize] != self.p_obj[si.dom[r as usize]]
                || ti.cod[pr as usize] != self.p_obj[si.cod[r as usize]]
            {
                out.push(format!("p(`{}`) = `{}` has the wrong endpoints", si.name(r), ti.name(pr)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (c, &i) in si.id.iter().enumerate() {
            if self.p_arr[i as usize] != ti.id[self.p_obj[c]] {
                out.push(format!("p does not preserve the identity of `{}`", si.objects[c]));
            }
        }
        for f in 0..si.len() as u32 {
            for &g in si.out_of(si.cod[f as usize]) {
                let (pf, pg) = (self.p_arr[f as usize], self.p_arr[g as usize]);
                if self.p_arr[si.then(f, g) as usize] != ti.then(pf, pg) {
                    out.push(format!("p does not preserve `{}` then `{}`", si.name(f), si.name(g)));
                }
            }
        }
        for (c, fib) in s.fibres.iter().enumerate() {
            let to = &t.fibres[self.p_obj[c]];
            let m = &self.arr[c];
            let over = &si.objects[c];
            let mut typed = true;
            for (f, &g) in m.iter().enumerate() {
                let g = g as usize;
                if to.dom[g] != self.obj[fib.dom[f]] || to.cod[g] != self.obj[fib.cod[f]] {
                    typed = false;
                    out.push(format!(
                        "P(`{}`) = `{}` over `{over}` has the wrong endpoints",
                        fib.names[f], to.names[g]
                    ));
                }
            }
            if !typed {
                continue;
            }
            for (a, &i) in fib.id.iter().enumerate() {
                if m[i as usize] != to.id[self.obj[a]] {
                    out.push(format!("P does not preserve the identity of `{}` over `{over}`", s.objects[a]));
                }
            }
            for f in 0..fib.len() as u32 {
                for &g in fib.out_of(fib.cod[f as usize]) {
                    if m[fib.then(f, g) as usize] != to.then(m[f as usize], m[g as usize]) {
                        out.push(format!("P does not preserve `{}` then `{}` over `{over}`", fib.name(f), fib.name(g)));
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        // P(f ▹ ρ) = P(f) ▹ p(ρ) for ρ : d → c.
        for r in 0..si.len() as u32 {
            let (d, c) = (si.dom[r as usize], si.cod[r as usize]);
            for f in 0..s.fibres[c].len() as u32 {
                let lhs = self.arr[d][s.re(f, r) as usize];
                let rhs = t.re(self.arr[c][f as usize], self.p_arr[r as usize]);
                if lhs != rhs {
                    out.push(format!(
                        "P(`{}` ▹ `{}`) is `{}` but P(`{}`) ▹ p(`{}`) is `{}`",
                        s.fibres[c].name(f),
                        si.name(r),
                        t.fibres[self.p_obj[d]].name(lhs),
                        s.fibres[c].name(f),
                        si.name(r),
                        t.fibres[self.p_obj[d]].name(rhs)
                    ));
                }
            }
        }
        out
    }

    /// Classical cartesian lifts for `p`: every `f : b → p(e)` needs some `φ : e′ → e`
    /// over it through which maps over a factorisation of their image factor uniquely.
    fn index_fibration_failures(&self) -> Vec<String> {
        let (e_cat, b_cat) = (&self.src.index, &self.tgt.index);
        let p = |a: u32| self.p_arr[a as usize];
        let into =
            |c: &Cat, e: usize| -> Vec<u32> { (0..c.len() as u32).filter(|&a| c.cod[a as usize] == e).collect() };
        let cartesian = |phi: u32| {
            let (e1, e) = (e_cat.dom[phi as usize], e_cat.cod[phi as usize]);
            into(e_cat, e).into_iter().all(|psi| {
                let e2 = e_cat.dom[psi as usize];
                b_cat.homs(self.p_obj[e2], self.p_obj[e1]).iter().filter(|&&g| b_cat.then(g, p(phi)) == p(psi)).all(
                    |&g| {
                        e_cat.homs(e2, e1).iter().filter(|&&chi| p(chi) == g && e_cat.then(chi, phi) == psi).count()
                            == 1
                    },
                )
            })
        };
        let mut out = Vec::new();
        for e in 0..e_cat.objects.len() {
            for f in into(b_cat, self.p_obj[e]) {
                let found = into(e_cat, e).into_iter().any(|phi| p(phi) == f && cartesian(phi));
                if !found {
                    out.push(format!("`{}` has no cartesian lift at `{}`", b_cat.name(f), e_cat.objects[e]));
                }
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn lift(
        &self,
        unit: usize,
        bang: &[u32],
        a: usize,
        y: usize,
        k: u32,
        steps: &AtomicU64,
        budget: u64,
    ) -> Result<Result<LiftRecord, LiftFailure>, LindError> {
        let (s, t) = (&self.src, &self.tgt);
        let (k_name, a_name, y_name) =
            (t.fibres[self.p_obj[unit]].name(k).to_string(), t.objects[a].clone(), s.objects[y].clone());
        let mut reasons = Vec::new();
        let over_a = (0..s.objects.len()).filter(|&x| self.obj[x] == a);
        for ah in over_a {
            for &kh in s.fibres[unit].homs(ah, y) {
                if self.arr[unit][kh as usize] != k {
                    continue;
                }
                match self.universal(ah, y, k, kh, bang, steps, budget)? {
                    Ok(lifts_by_index) => {
                        return Ok(Ok(LiftRecord {
                            k: k_name,
                            a: a_name,
                            y: y_name,
                            lift_object: s.objects[ah].clone(),
                            lift_arrow: s.fibres[unit].name(kh).to_string(),
                            lifts_by_index,
                        }))
                    }
                    Err(why) => reasons.push(format!(
                        "candidate `{}` : {} → {y_name}: {why}",
                        s.fibres[unit].name(kh),
                        s.objects[ah]
                    )),
                }
            }
        }
        let reason = if reasons.is_empty() {
            "no arrow over it into Y from an object over A".to_string()
        } else {
            reasons.join("; ")
        };
        Ok(Err(LiftFailure { k: k_name, a: a_name, y: y_name, reason }))
    }

    #[allow(clippy::too_many_arguments)]
    fn universal(
        &self,
        ah: usize,
        y: usize,
        k: u32,
        kh: u32,
        bang: &[u32],
        steps: &AtomicU64,
        budget: u64,
    ) -> Result<Result<BTreeMap<String, usize>, String>, LindError> {
        let (s, t) = (&self.src, &self.tgt);
        let mut by_index = BTreeMap::new();
        for (e, &be) in bang.iter().enumerate() {
            let (fe, te) = (&s.fibres[e], &t.fibres[self.p_obj[e]]);
            let kb = t.re(k, self.p_arr[be as usize]);
            let khb = s.re(kh, be);
            let pe = &self.arr[e];
            let mut count = 0;
            let mut work = 0u64;
            for x in 0..s.objects.len() {
                let lifts = fe.homs(x, ah);
                for &v in fe.homs(x, y) {
                    for &u in te.homs(self.obj[x], self.obj[ah]) {
                        work += 1 + lifts.len() as u64;
                        if te.then(u, kb) != pe[v as usize] {
                            continue;
                        }
                        let n = lifts.iter().filter(|&&uh| pe[uh as usize] == u && fe.then(uh, khb) == v).count();
                        if n != 1 {
                            return Ok(Err(format!(
                                "over `{}`, v = `{}` : {} → {} and u = `{}` have {n} lifts",
                                s.index.objects[e],
                                fe.name(v),
                                s.objects[x],
                                s.objects[y],
                                te.name(u)
                            )));
                        }
                        count += 1;
                    }
                }
            }
            if steps.fetch_add(work, Ordering::Relaxed) + work > budget {
                return Err(LindError::Budget(budget));
            }
            by_index.insert(s.index.objects[e].clone(), count);
        }
        Ok(Ok(by_index))
    }
}

/// Checks the preconditions (both sides are locally indexed categories, `(p, P)` is a
/// functor compatible with reindexing, `p` is a fibration, `unit` is terminal) and
/// then searches a lift for every arrow over the unit index. Work beyond `budget`
/// steps is an error rather than a verdict.
pub fn check_fibration_property(f: &FinLIndFunctor, budget: u64) -> Result<FibrationReport, LindError> {
    let (src, tgt) = (Lind::compile(&f.source)?, Lind::compile(&f.target)?);
    let mut report = FibrationReport {
        source: super::check_lind_axioms(&f.source)?,
        target: super::check_lind_axioms(&f.target)?,
        ..Default::default()
    };
    if !(report.source.valid() && report.target.valid()) {
        return Ok(report);
    }
    let c = compile(f, src, tgt)?;
    report.functor = c.functor_violations();
    if !report.functor.is_empty() {
        return Ok(report);
    }
    let si = &c.src.index;
    let unit =
        si.object(&f.unit).ok_or_else(|| LindError::Malformed(format!("unit `{}` is not an index object", f.unit)))?;
    let mut bang = Vec::with_capacity(si.objects.len());
    for e in 0..si.objects.len() {
        match si.homs(e, unit) {
            [one] => bang.push(*one),
            many => {
                return Err(LindError::Precondition(format!(
                    "`{}` is not terminal: {} arrows from `{}`",
                    f.unit,
                    many.len(),
                    si.objects[e]
                )))
            }
        }
    }
    report.index_fibration = c.index_fibration_failures();
    if !report.index_fibration.is_empty() {
        return Ok(report);
    }
    let pu = c.p_obj[unit];
    let mut jobs = Vec::new();
    for a in 0..c.tgt.objects.len() {
        for y in 0..c.src.objects.len() {
            for &k in c.tgt.fibres[pu].homs(a, c.obj[y]) {
                jobs.push((a, y, k));
            }
        }
    }
    let steps = AtomicU64::new(0);
    let results: Vec<_> = jobs.par_iter().map(|&(a, y, k)| c.lift(unit, &bang, a, y, k, &steps, budget)).collect();
    for r in results {
        match r? {
            Ok(l) => report.lifts.push(l),
            Err(x) => report.failures.push(x),
        }
    }
    report.steps = steps.into_inner();
    Ok(report)
}
