//! Brute-force comparison of the erratic-choice ⊤⊤ family with the closed form
//! "every element of `t` lies in `R`".

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::lifting::{Lifting, TtLifting};
use super::Pred;
use crate::semcore::{MonVal, SemError, SemSet, SemVal};

/// One carrier and relation.
#[derive(Clone, Debug, Serialize)]
pub struct TtCase {
    pub size: usize,
    pub relation: Vec<String>,
    /// Sets in the lifted relation, computed from the test definition.
    pub brute: Vec<String>,
    /// Sets the closed form admits.
    pub closed: Vec<String>,
    pub only_brute: Vec<String>,
    pub only_closed: Vec<String>,
    pub empty_in_brute: bool,
    pub empty_in_closed: bool,
}

impl TtCase {
    pub fn agrees(&self) -> bool {
        self.only_brute.is_empty() && self.only_closed.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TtCrossCheck {
    pub cases: Vec<TtCase>,
    /// Unit closure, union closure and monotonicity of the brute-force family.
    pub consistent: bool,
    pub notes: Vec<String>,
}

impl TtCrossCheck {
    pub fn agreements(&self) -> usize {
        self.cases.iter().filter(|c| c.agrees()).count()
    }
}

fn show(s: &BTreeSet<SemVal>) -> String {
    SemVal::Mon(MonVal::Set(s.clone().into())).to_string()
}

fn subsets(xs: &[SemVal]) -> Vec<BTreeSet<SemVal>> {
    (0..1u32 << xs.len()).map(|m| (0..xs.len()).filter(|i| m >> i & 1 == 1).map(|i| xs[i].clone()).collect()).collect()
}

/// Runs every `R ⊆ X` for `|X| ≤ max_size`.
pub fn tt_cross_check(max_size: usize) -> Result<TtCrossCheck, SemError> {
    let lifting = TtLifting::erratic();
    let mut cases = Vec::new();
    let mut notes = Vec::new();
    for n in 0..=max_size {
        let xs: Vec<SemVal> = (0..n).map(|i| SemVal::atom(&format!("x{i}"))).collect();
        let carrier = SemSet::finite(xs.clone());
        let all = subsets(&xs);
        let mut families: Vec<BTreeSet<BTreeSet<SemVal>>> = Vec::new();
        for r in &all {
            let lr = lifting.lift(&Pred::from_members(carrier.clone(), r.iter().cloned())?)?;
            let mut brute = BTreeSet::new();
            for t in &all {
                if lr.contains(&SemVal::Mon(MonVal::Set(t.clone().into())))? {
                    brute.insert(t.clone());
                }
            }
            let closed: BTreeSet<BTreeSet<SemVal>> = all.iter().filter(|t| t.is_subset(r)).cloned().collect();
            let listed = |f: &BTreeSet<BTreeSet<SemVal>>| f.iter().map(show).collect::<Vec<_>>();
            let empty = BTreeSet::new();
            cases.push(TtCase {
                size: n,
                relation: r.iter().map(|v| v.to_string()).collect(),
                brute: listed(&brute),
                closed: listed(&closed),
                only_brute: listed(&brute.difference(&closed).cloned().collect()),
                only_closed: listed(&closed.difference(&brute).cloned().collect()),
                empty_in_brute: brute.contains(&empty),
                empty_in_closed: closed.contains(&empty),
            });
            families.push(brute);
        }
        // Law shadows on the computed families.
        for (ri, r) in all.iter().enumerate() {
            let fam = &families[ri];
            for x in r {
                if !fam.contains(&BTreeSet::from([x.clone()])) {
                    notes.push(format!("|X|={n}: unit of {x} missing from lift({})", show(r)));
                }
            }
            for a in fam {
                for b in fam {
                    if !fam.contains(&a.union(b).cloned().collect()) {
                        notes.push(format!("|X|={n}: lift({}) not closed under union", show(r)));
                    }
                }
            }
            for (si, s) in all.iter().enumerate() {
                if r.is_subset(s) && !fam.is_subset(&families[si]) {
                    notes.push(format!("|X|={n}: lift({}) is not inside lift({})", show(r), show(s)));
                }
            }
        }
    }
    let consistent = notes.is_empty();
    Ok(TtCrossCheck { cases, consistent, notes })
}

impl fmt::Display for TtCrossCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cases {
            write!(f, "|X|={} R={{{}}}: ", c.size, c.relation.join(", "))?;
            if c.agrees() {
                write!(f, "agree")?;
            } else {
                write!(
                    f,
                    "differ; only brute [{}]; only closed form [{}]",
                    c.only_brute.join(", "),
                    c.only_closed.join(", ")
                )?;
            }
            let yn = |b: bool| if b { "in" } else { "out" };
            writeln!(f, "; empty set {} brute, {} closed form", yn(c.empty_in_brute), yn(c.empty_in_closed))?;
        }
        writeln!(
            f,
            "{} of {} cases agree; family laws {}",
            self.agreements(),
            self.cases.len(),
            if self.consistent { "hold" } else { "fail" }
        )?;
        for n in &self.notes {
            writeln!(f, "  {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_on_two_points() {
        let r = tt_cross_check(2).unwrap();
        assert!(r.consistent);
        assert_eq!(r.cases.len(), 1 + 2 + 4);
        // The empty relation admits nothing under the tests but the empty set under the closed form.
        let c0 = &r.cases[0];
        assert!(c0.brute.is_empty());
        assert_eq!(c0.only_closed, ["{}"]);
        assert!(!c0.empty_in_brute && c0.empty_in_closed);
    }
}
