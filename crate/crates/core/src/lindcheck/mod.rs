//! Finite locally indexed categories and functors, with exhaustive checkers for
//! the reindexing axioms and for the lifting property of locally indexed fibrations.

mod fibration;
mod pred;
mod table;

use std::fmt;

use serde::Serialize;

pub use fibration::{check_fibration_property, FibrationReport, LiftFailure, LiftRecord};
pub use pred::{delete_object, identity_functor, pred_truncation, self_skeleton};
pub use table::{ArrowDecl, CatTable, FinCat, FinLInd, FinLIndFunctor};

use table::{object_index, Cat, NONE};

#[derive(Debug, thiserror::Error)]
pub enum LindError {
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error("search budget of {0} steps exceeded")]
    Budget(u64),
    #[error("{0}")]
    Precondition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Unit and associativity in the index category.
    Index,
    /// Unit and associativity in one fibre.
    Fibre,
    /// `(−) ▹ ρ` fixes objects and preserves identities and composites.
    ReindexFunctor,
    /// `f ▹ id = f`.
    ReindexIdentity,
    /// `f ▹ (ρ ∘ ρ′) = (f ▹ ρ) ▹ ρ′`.
    ReindexComposite,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Index => "index category",
            Family::Fibre => "fibre category",
            Family::ReindexFunctor => "reindexing is a functor",
            Family::ReindexIdentity => "reindexing along identities",
            Family::ReindexComposite => "reindexing along composites",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub family: Family,
    pub location: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: at {}: {}", self.family, self.location, self.detail)
    }
}

/// Every violated axiom instance; empty iff the instance is a locally indexed category.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub index_objects: usize,
    pub objects: usize,
    pub arrows: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        let verdict =
            if self.valid() { "valid".to_string() } else { format!("{} violation(s)", self.violations.len()) };
        writeln!(
            f,
            "locally indexed category: {} index objects, {} objects, {} arrows over all indices: {verdict}",
            self.index_objects, self.objects, self.arrows
        )
    }
}

/// The compiled instance: one fibre per index object, and per index arrow
/// `ρ : d → c` a map from arrows over `c` to arrows over `d`.
#[derive(Clone, Debug)]
pub(crate) struct Lind {
    pub index: Cat,
    pub objects: Vec<String>,
    pub fibres: Vec<Cat>,
    pub reindex: Vec<Vec<u32>>,
}

impl Lind {
    pub fn compile(l: &FinLInd) -> Result<Lind, LindError> {
        let index = Cat::compile(&l.index.objects, &l.index.table(), "index category")?;
        object_index(&l.objects, "objects")?;
        for k in l.homs_at.keys() {
            if index.object(k).is_none() {
                return Err(LindError::Malformed(format!("homs given at `{k}`, which is not an index object")));
            }
        }
        let mut fibres = Vec::with_capacity(index.objects.len());
        for c in &index.objects {
            let t = l.homs_at.get(c).ok_or_else(|| LindError::Malformed(format!("no homs at index `{c}`")))?;
            fibres.push(Cat::compile(&l.objects, t, &format!("fibre over `{c}`"))?);
        }
        for k in l.reindex.keys() {
            if index.arrow(k).is_none() {
                return Err(LindError::Malformed(format!("reindexing along `{k}`, which is not an index arrow")));
            }
        }
        let mut reindex = Vec::with_capacity(index.len());
        for r in 0..index.len() as u32 {
            let name = index.name(r);
            let (from, to) = (&fibres[index.cod[r as usize]], &fibres[index.dom[r as usize]]);
            let table =
                l.reindex.get(name).ok_or_else(|| LindError::Malformed(format!("no reindexing table for `{name}`")))?;
            let mut map = vec![NONE; from.len()];
            for (f, g) in table {
                let fi = from.arrow(f).ok_or_else(|| {
                    LindError::Malformed(format!("reindexing along `{name}` maps unknown arrow `{f}`"))
                })?;
                map[fi as usize] = to.arrow(g).ok_or_else(|| {
                    LindError::Malformed(format!("reindexing along `{name}` sends `{f}` to unknown arrow `{g}`"))
                })?;
            }
            if let Some(f) = map.iter().position(|&g| g == NONE) {
                return Err(LindError::Malformed(format!("reindexing along `{name}` omits `{}`", from.names[f])));
            }
            reindex.push(map);
        }
        Ok(Lind { index, objects: l.objects.clone(), fibres, reindex })
    }

    /// `f ▹ ρ`.
    pub fn re(&self, f: u32, rho: u32) -> u32 {
        self.reindex[rho as usize][f as usize]
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let ix = &self.index;
        let v = |family, location, detail| Violation { family, location, detail };
        for (location, detail) in ix.law_violations() {
            out.push(v(Family::Index, location, detail));
        }
        for (c, fib) in self.fibres.iter().enumerate() {
            for (location, detail) in fib.law_violations() {
                out.push(v(Family::Fibre, format!("{location} over `{}`", ix.objects[c]), detail));
            }
        }
        for r in 0..ix.len() as u32 {
            let (d, c) = (ix.dom[r as usize], ix.cod[r as usize]);
            let (from, to) = (&self.fibres[c], &self.fibres[d]);
            let at = |f: u32| format!("`{}` ▹ `{}`", from.name(f), ix.name(r));
            let mut typed = true;
            for f in 0..from.len() as u32 {
                let g = self.re(f, r);
                let (fu, gu) = (f as usize, g as usize);
                if from.dom[fu] != to.dom[gu] || from.cod[fu] != to.cod[gu] {
                    typed = false;
                    out.push(v(
                        Family::ReindexFunctor,
                        at(f),
                        format!("`{}` has different endpoints from `{}`", to.name(g), from.name(f)),
                    ));
                }
            }
            for (a, &i) in from.id.iter().enumerate() {
                if self.re(i, r) != to.id[a] {
                    out.push(v(
                        Family::ReindexFunctor,
                        at(i),
                        format!("identity of `{}` goes to `{}`", self.objects[a], to.name(self.re(i, r))),
                    ));
                }
            }
            // Composites of mistyped images are meaningless; the endpoint violations suffice.
            if typed {
                for f in 0..from.len() as u32 {
                    for &g in from.out_of(from.cod[f as usize]) {
                        let lhs = self.re(from.then(f, g), r);
                        let rhs = to.then(self.re(f, r), self.re(g, r));
                        if lhs != rhs {
                            out.push(v(
                                Family::ReindexFunctor,
                                format!("`{}` then `{}` reindexed along `{}`", from.name(f), from.name(g), ix.name(r)),
                                format!(
                                    "reindexed composite is `{}` but composite of reindexed is `{}`",
                                    to.name(lhs),
                                    to.name(rhs)
                                ),
                            ));
                        }
                    }
                }
            }
        }
        for (c, fib) in self.fibres.iter().enumerate() {
            let id = ix.id[c];
            for f in 0..fib.len() as u32 {
                if self.re(f, id) != f {
                    out.push(v(
                        Family::ReindexIdentity,
                        format!("`{}` ▹ `{}`", fib.name(f), ix.name(id)),
                        format!("gives `{}`", fib.name(self.re(f, id))),
                    ));
                }
            }
        }
        // ρ′ : e → d, ρ : d → c.
        for rp in 0..ix.len() as u32 {
            for &r in ix.out_of(ix.cod[rp as usize]) {
                let rr = ix.then(rp, r);
                let (c, e) = (ix.cod[r as usize], ix.dom[rp as usize]);
                let (fib, low) = (&self.fibres[c], &self.fibres[e]);
                for f in 0..fib.len() as u32 {
                    let (lhs, rhs) = (self.re(f, rr), self.re(self.re(f, r), rp));
                    if lhs != rhs {
                        out.push(v(
                            Family::ReindexComposite,
                            format!(
                                "`{}` ▹ `{}` with `{}` = `{}` ∘ `{}`",
                                fib.name(f),
                                ix.name(rr),
                                ix.name(rr),
                                ix.name(r),
                                ix.name(rp)
                            ),
                            format!("gives `{}`, but reindexing in two steps gives `{}`", low.name(lhs), low.name(rhs)),
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Checks the four axiom families (plus the index category's own laws) exhaustively.
pub fn check_lind_axioms(l: &FinLInd) -> Result<AxiomReport, LindError> {
    let c = Lind::compile(l)?;
    Ok(AxiomReport {
        index_objects: c.index.objects.len(),
        objects: c.objects.len(),
        arrows: c.fibres.iter().map(Cat::len).sum(),
        violations: c.violations(),
    })
}

/// Reads either a `FinLInd` or a `FinLIndFunctor` (recognised by its `source` field).
#[derive(Clone, Debug)]
pub enum LindInput {
    Category(FinLInd),
    Functor(Box<FinLIndFunctor>),
}

pub fn parse_lind_input(text: &str) -> Result<LindInput, LindError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| LindError::Malformed(e.to_string()))?;
    let functor = v.get("source").is_some();
    let err = |e: serde_json::Error| LindError::Malformed(e.to_string());
    Ok(if functor {
        LindInput::Functor(Box::new(serde_json::from_value(v).map_err(err)?))
    } else {
        LindInput::Category(serde_json::from_value(v).map_err(err)?)
    })
}
