//! Concrete instances over a skeleton of finite sets `{0, 1, …, max}`.
//!
//! An object is a size `n` with a predicate `P ⊆ n`. Both the index category and
//! the fibres are built from the same data: arrows over `c` from `A` to `B` are the
//! functions `c × A → B` sending `Pc × PA` into `PB`, composed in the second argument,
//! and reindexed along `ρ : d → c` by `f ▹ ρ = f ∘ (ρ × A)`. With every predicate
//! full this is the self-indexing of the skeleton; with all predicates it is its
//! finite truncation of predicates over sets.

use std::collections::{BTreeMap, HashMap};

use super::table::{ArrowDecl, CatTable, FinCat, FinLInd, FinLIndFunctor};
use super::LindError;

#[derive(Clone, Debug)]
struct Obj {
    name: String,
    size: usize,
    pred: Vec<bool>,
}

fn full(n: usize) -> Obj {
    Obj { name: n.to_string(), size: n, pred: vec![true; n] }
}

fn subsets(n: usize) -> Vec<Obj> {
    (0..1usize << n)
        .map(|bits| {
            let pred: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            let ms: Vec<String> = (0..n).filter(|&i| pred[i]).map(|i| i.to_string()).collect();
            Obj { name: format!("{n}{{{}}}", ms.join(",")), size: n, pred }
        })
        .collect()
}

/// All functions `n → m` as value lists.
fn functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|f| (0..m).map(move |v| [f.clone(), vec![v]].concat())).collect();
    }
    out
}

fn arrow_name(a: &Obj, b: &Obj, vals: &[usize]) -> String {
    let vs: String = vals.iter().map(|v| char::from_digit(*v as u32, 10).unwrap_or('?')).collect();
    format!("{}>{}[{vs}]", a.name, b.name)
}

/// Functions `c × A → B` (row `γ`, column `a`) preserving the predicates.
fn fibre_arrows(c: &Obj, a: &Obj, b: &Obj) -> Vec<Vec<usize>> {
    functions(c.size * a.size, b.size)
        .into_iter()
        .filter(|f| (0..c.size).all(|g| (0..a.size).all(|x| !(c.pred[g] && a.pred[x]) || b.pred[f[g * a.size + x]])))
        .collect()
}

struct Built {
    table: CatTable,
    /// Arrow name by endpoints and values.
    by_vals: HashMap<(usize, usize, Vec<usize>), String>,
}

fn fibre(c: &Obj, objs: &[Obj]) -> Built {
    let mut table = CatTable::default();
    let mut by_vals = HashMap::new();
    let mut homs = vec![Vec::new(); objs.len() * objs.len()];
    for (i, a) in objs.iter().enumerate() {
        for (j, b) in objs.iter().enumerate() {
            for f in fibre_arrows(c, a, b) {
                let name = arrow_name(a, b, &f);
                table.arrows.push(ArrowDecl::new(name.clone(), a.name.clone(), b.name.clone()));
                by_vals.insert((i, j, f.clone()), name);
                homs[i * objs.len() + j].push(f);
            }
        }
        let id: Vec<usize> = (0..c.size).flat_map(|_| 0..a.size).collect();
        table.identities.insert(a.name.clone(), by_vals[&(i, i, id)].clone());
    }
    let n = objs.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let sa = objs[i].size;
                for f in &homs[i * n + j] {
                    for g in &homs[j * n + k] {
                        let sb = objs[j].size;
                        let h: Vec<usize> = (0..c.size)
                            .flat_map(|y| (0..sa).map(move |x| (y, x)))
                            .map(|(y, x)| g[y * sb + f[y * sa + x]])
                            .collect();
                        table.compose.push([
                            by_vals[&(i, j, f.clone())].clone(),
                            by_vals[&(j, k, g.clone())].clone(),
                            by_vals[&(i, k, h)].clone(),
                        ]);
                    }
                }
            }
        }
    }
    Built { table, by_vals }
}

/// The locally indexed category with index objects `ix` and objects `objs`, as
/// described in the module docs.
fn concrete(ix: &[Obj], objs: &[Obj]) -> (FinLInd, Vec<Built>, Built) {
    // Over the one-point index with full predicate, `1 × A → B` is just `A → B`.
    let index = fibre(&full(1), ix);
    let fibres: Vec<Built> = ix.iter().map(|c| fibre(c, objs)).collect();
    let mut reindex = BTreeMap::new();
    for (ci, c) in ix.iter().enumerate() {
        for (di, d) in ix.iter().enumerate() {
            for rho in fibre_arrows(&full(1), d, c) {
                let rname = &index.by_vals[&(di, ci, rho.clone())];
                let mut table = BTreeMap::new();
                for ((a, b, f), name) in &fibres[ci].by_vals {
                    let sa = objs[*a].size;
                    let g: Vec<usize> = (0..d.size)
                        .flat_map(|y| (0..sa).map(move |x| (y, x)))
                        .map(|(y, x)| f[rho[y] * sa + x])
                        .collect();
                    table.insert(name.clone(), fibres[di].by_vals[&(*a, *b, g)].clone());
                }
                reindex.insert(rname.clone(), table);
            }
        }
    }
    let l = FinLInd {
        index: FinCat {
            objects: ix.iter().map(|o| o.name.clone()).collect(),
            arrows: index.table.arrows.clone(),
            identities: index.table.identities.clone(),
            compose: index.table.compose.clone(),
        },
        objects: objs.iter().map(|o| o.name.clone()).collect(),
        homs_at: ix.iter().zip(&fibres).map(|(c, b)| (c.name.clone(), b.table.clone())).collect(),
        reindex,
    };
    (l, fibres, index)
}

fn skeleton_check(max: usize) -> Result<(), LindError> {
    if max > 3 {
        return Err(LindError::Precondition(format!("skeleton bound {max} is above 3")));
    }
    Ok(())
}

/// The self-indexing of the skeleton `{0, …, max}`: arrows over `c` from `A` to `B`
/// are the functions `c × A → B`.
pub fn self_skeleton(max: usize) -> Result<FinLInd, LindError> {
    skeleton_check(max)?;
    let objs: Vec<Obj> = (0..=max).map(full).collect();
    Ok(concrete(&objs, &objs).0)
}

/// The forgetful functor from predicates over the skeleton to the skeleton's
/// self-indexing, with unit `1{0}`.
pub fn pred_truncation(max: usize) -> Result<FinLIndFunctor, LindError> {
    skeleton_check(max)?;
    let preds: Vec<Obj> = (0..=max).flat_map(subsets).collect();
    let sets: Vec<Obj> = (0..=max).map(full).collect();
    let (source, src_fibres, src_index) = concrete(&preds, &preds);
    let (target, tgt_fibres, tgt_index) = concrete(&sets, &sets);
    let under = |i: usize| preds[i].size;
    let index_objects = preds.iter().map(|o| (o.name.clone(), o.size.to_string())).collect();
    let index_arrows = src_index
        .by_vals
        .iter()
        .map(|((a, b, f), n)| (n.clone(), tgt_index.by_vals[&(under(*a), under(*b), f.clone())].clone()))
        .collect();
    let objects = preds.iter().map(|o| (o.name.clone(), o.size.to_string())).collect();
    let arrows_at = preds
        .iter()
        .zip(&src_fibres)
        .map(|(c, b)| {
            let to = &tgt_fibres[c.size];
            let m = b
                .by_vals
                .iter()
                .map(|((a, bb, f), n)| (n.clone(), to.by_vals[&(under(*a), under(*bb), f.clone())].clone()))
                .collect();
            (c.name.clone(), m)
        })
        .collect();
    Ok(FinLIndFunctor { source, target, unit: "1{0}".into(), index_objects, index_arrows, objects, arrows_at })
}

/// The identity functor on `l`.
pub fn identity_functor(l: &FinLInd, unit: &str) -> FinLIndFunctor {
    let same = |xs: &mut dyn Iterator<Item = &String>| xs.map(|x| (x.clone(), x.clone())).collect::<BTreeMap<_, _>>();
    FinLIndFunctor {
        source: l.clone(),
        target: l.clone(),
        unit: unit.into(),
        index_objects: same(&mut l.index.objects.iter()),
        index_arrows: same(&mut l.index.arrows.iter().map(|a| &a.name)),
        objects: same(&mut l.objects.iter()),
        arrows_at: l.homs_at.iter().map(|(c, t)| (c.clone(), same(&mut t.arrows.iter().map(|a| &a.name)))).collect(),
    }
}

/// Removes a source object, with every arrow touching it, from `f`.
pub fn delete_object(f: &FinLIndFunctor, name: &str) -> FinLIndFunctor {
    let mut f = f.clone();
    let src = &mut f.source;
    src.objects.retain(|o| o != name);
    f.objects.remove(name);
    for (c, t) in src.homs_at.iter_mut() {
        let gone: Vec<String> =
            t.arrows.iter().filter(|a| a.dom == name || a.cod == name).map(|a| a.name.clone()).collect();
        t.arrows.retain(|a| a.dom != name && a.cod != name);
        t.identities.remove(name);
        t.compose.retain(|e| !e.iter().any(|a| gone.contains(a)));
        if let Some(m) = f.arrows_at.get_mut(c) {
            for a in &gone {
                m.remove(a);
            }
        }
        for table in src.reindex.values_mut() {
            for a in &gone {
                table.remove(a);
            }
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindcheck::{check_fibration_property, check_lind_axioms};

    #[test]
    fn functions_and_names() {
        assert_eq!(functions(2, 2), [[0, 0], [0, 1], [1, 0], [1, 1]]);
        assert_eq!(functions(0, 3), [Vec::<usize>::new()]);
        assert!(functions(1, 0).is_empty());
        let names: Vec<String> = subsets(2).into_iter().map(|o| o.name).collect();
        assert_eq!(names, ["2{}", "2{0}", "2{1}", "2{0,1}"]);
    }

    #[test]
    fn skeleton_sizes() {
        let l = self_skeleton(2).unwrap();
        // Functions n → m for n, m ≤ 2: 1 + 1 + 1 + 0 + 1 + 2 + 0 + 1 + 4.
        assert_eq!(l.index.arrows.len(), 11);
        // Over 1 the fibre is the index category again.
        assert_eq!(l.homs_at["1"].arrows.len(), 11);
        // Over 2, A → B means 2 × A → B: 1 + 1 + 1 + 0 + 1 + 4 + 0 + 1 + 16.
        assert_eq!(l.homs_at["2"].arrows.len(), 25);
        assert!(check_lind_axioms(&l).unwrap().valid());
        assert!(self_skeleton(4).is_err());
    }

    #[test]
    fn small_truncation_is_a_fibration() {
        let f = pred_truncation(1).unwrap();
        let r = check_fibration_property(&f, u64::MAX).unwrap();
        assert!(r.is_fibration(), "{r}");
        let id = identity_functor(&f.source, "1{0}");
        assert!(check_fibration_property(&id, u64::MAX).unwrap().is_fibration());
    }

    #[test]
    fn deleted_lift_is_named() {
        // The lift of `k : A →₁ P(Y)` is `(A, k⁻¹(PY))`. The only `k` with preimage `{0}`
        // into a surviving `Y` is the swap `2 → P(2{1})`.
        let f = delete_object(&pred_truncation(2).unwrap(), "2{0}");
        let r = check_fibration_property(&f, u64::MAX).unwrap();
        assert!(r.searched(), "{r}");
        let named: Vec<_> = r.failures.iter().map(|x| (x.k.as_str(), x.a.as_str(), x.y.as_str())).collect();
        assert_eq!(named, [("2>2[10]", "2", "2{1}")]);
    }
}
