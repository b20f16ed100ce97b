//! JSON tables and their compiled, integer-indexed form.
//!
//! A composition entry `[f, g, h]` records `h = g ∘ f` for `f : a → b`, `g : b → c`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::LindError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowDecl {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

impl ArrowDecl {
    pub fn new(name: impl Into<String>, dom: impl Into<String>, cod: impl Into<String>) -> Self {
        ArrowDecl { name: name.into(), dom: dom.into(), cod: cod.into() }
    }
}

/// Arrows, identities and composition over some object list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatTable {
    pub arrows: Vec<ArrowDecl>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinCat {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowDecl>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
}

impl FinCat {
    pub fn table(&self) -> CatTable {
        CatTable { arrows: self.arrows.clone(), identities: self.identities.clone(), compose: self.compose.clone() }
    }
}

/// A locally indexed category: one category per index object on a shared object
/// list, and for each index arrow `ρ : d → c` the table of `(−) ▹ ρ` from the arrows
/// over `c` to the arrows over `d`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinLInd {
    pub index: FinCat,
    pub objects: Vec<String>,
    pub homs_at: BTreeMap<String, CatTable>,
    pub reindex: BTreeMap<String, BTreeMap<String, String>>,
}

/// A locally indexed functor `(p, P)`; `unit` is the terminal index object of the
/// source, over which lifts are searched.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinLIndFunctor {
    pub source: FinLInd,
    pub target: FinLInd,
    pub unit: String,
    pub index_objects: BTreeMap<String, String>,
    pub index_arrows: BTreeMap<String, String>,
    pub objects: BTreeMap<String, String>,
    /// Per source index object `c`, the map from arrows over `c` to arrows over `p(c)`.
    pub arrows_at: BTreeMap<String, BTreeMap<String, String>>,
}

pub(crate) const NONE: u32 = u32::MAX;

/// A category with dense composition: `comp[f * n + g] = g ∘ f`.
#[derive(Clone, Debug)]
pub(crate) struct Cat {
    pub objects: Vec<String>,
    pub names: Vec<String>,
    pub dom: Vec<usize>,
    pub cod: Vec<usize>,
    pub id: Vec<u32>,
    pub hom: Vec<Vec<u32>>,
    pub comp: Vec<u32>,
    index: HashMap<String, u32>,
}

pub(crate) fn object_index(objects: &[String], what: &str) -> Result<HashMap<String, usize>, LindError> {
    let mut ix = HashMap::new();
    for (i, o) in objects.iter().enumerate() {
        if ix.insert(o.clone(), i).is_some() {
            return Err(LindError::Malformed(format!("{what}: object `{o}` listed twice")));
        }
    }
    Ok(ix)
}

impl Cat {
    pub fn compile(objects: &[String], t: &CatTable, what: &str) -> Result<Cat, LindError> {
        let bad = |m: String| LindError::Malformed(format!("{what}: {m}"));
        let oix = object_index(objects, what)?;
        let obj = |o: &str| oix.get(o).copied().ok_or_else(|| bad(format!("unknown object `{o}`")));
        let n_obj = objects.len();
        let mut c = Cat {
            objects: objects.to_vec(),
            names: Vec::new(),
            dom: Vec::new(),
            cod: Vec::new(),
            id: vec![NONE; n_obj],
            hom: vec![Vec::new(); n_obj * n_obj],
            comp: Vec::new(),
            index: HashMap::new(),
        };
        for a in &t.arrows {
            let (d, k) = (obj(&a.dom)?, obj(&a.cod)?);
            let i = c.names.len() as u32;
            if c.index.insert(a.name.clone(), i).is_some() {
                return Err(bad(format!("arrow `{}` declared twice", a.name)));
            }
            c.names.push(a.name.clone());
            c.dom.push(d);
            c.cod.push(k);
            c.hom[d * n_obj + k].push(i);
        }
        for (o, f) in &t.identities {
            let (x, i) = (obj(o)?, c.arrow(f).ok_or_else(|| bad(format!("unknown arrow `{f}`")))?);
            if c.dom[i as usize] != x || c.cod[i as usize] != x {
                return Err(bad(format!("identity `{f}` of `{o}` is not an endo-arrow of `{o}`")));
            }
            c.id[x] = i;
        }
        if let Some(x) = c.id.iter().position(|&i| i == NONE) {
            return Err(bad(format!("no identity for `{}`", objects[x])));
        }
        let n = c.names.len();
        c.comp = vec![NONE; n * n];
        for [f, g, h] in &t.compose {
            let look = |a: &str| c.arrow(a).ok_or_else(|| bad(format!("unknown arrow `{a}`")));
            let (f, g, h) = (look(f)?, look(g)?, look(h)?);
            let (fu, gu, hu) = (f as usize, g as usize, h as usize);
            if c.cod[fu] != c.dom[gu] {
                return Err(bad(format!("`{}` and `{}` are not composable", c.names[fu], c.names[gu])));
            }
            if c.dom[hu] != c.dom[fu] || c.cod[hu] != c.cod[gu] {
                return Err(bad(format!(
                    "composite of `{}` then `{}` is `{}`, which has the wrong type",
                    c.names[fu], c.names[gu], c.names[hu]
                )));
            }
            let slot = &mut c.comp[fu * n + gu];
            if *slot != NONE && *slot != h {
                return Err(bad(format!("two composites given for `{}` then `{}`", c.names[fu], c.names[gu])));
            }
            *slot = h;
        }
        for f in 0..n {
            for &g in c.out_of(c.cod[f]) {
                if c.comp[f * n + g as usize] == NONE {
                    return Err(bad(format!("no composite for `{}` then `{}`", c.names[f], c.names[g as usize])));
                }
            }
        }
        Ok(c)
    }

    pub fn arrow(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn object(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn homs(&self, a: usize, b: usize) -> &[u32] {
        &self.hom[a * self.objects.len() + b]
    }

    /// All arrows out of `a`.
    pub fn out_of(&self, a: usize) -> impl Iterator<Item = &u32> {
        let n = self.objects.len();
        (0..n).flat_map(move |b| self.hom[a * n + b].iter())
    }

    /// `g ∘ f`.
    pub fn then(&self, f: u32, g: u32) -> u32 {
        self.comp[f as usize * self.len() + g as usize]
    }

    pub fn name(&self, f: u32) -> &str {
        &self.names[f as usize]
    }

    /// Unit and associativity violations, as `(location, detail)` pairs.
    pub fn law_violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for f in 0..self.len() as u32 {
            let (d, k) = (self.dom[f as usize], self.cod[f as usize]);
            if self.then(self.id[d], f) != f {
                out.push((format!("`{}`", self.name(f)), format!("`{}` ∘ id ≠ `{}`", self.name(f), self.name(f))));
            }
            if self.then(f, self.id[k]) != f {
                out.push((format!("`{}`", self.name(f)), format!("id ∘ `{}` ≠ `{}`", self.name(f), self.name(f))));
            }
        }
        for f in 0..self.len() as u32 {
            for &g in self.out_of(self.cod[f as usize]) {
                let gf = self.then(f, g);
                for &h in self.out_of(self.cod[g as usize]) {
                    let (l, r) = (self.then(gf, h), self.then(f, self.then(g, h)));
                    if l != r {
                        out.push((
                            format!("`{}`, `{}`, `{}`", self.name(f), self.name(g), self.name(h)),
                            format!("(h ∘ g) ∘ f is `{}` but h ∘ (g ∘ f) is `{}`", self.name(r), self.name(l)),
                        ));
                    }
                }
            }
        }
        out
    }
}
