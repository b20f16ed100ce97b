use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub index: usize,
    pub term: String,
    pub ty: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub term: String,
    pub ty: String,
    pub denotations: Vec<String>,
    pub clause: String,
}

/// Per-term verdicts in input order plus every counterexample found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimReport {
    pub subject: String,
    pub verdicts: Vec<Verdict>,
    pub counterexamples: Vec<Counterexample>,
}

impl SimReport {
    pub fn new(subject: String) -> Self {
        SimReport { subject, verdicts: Vec::new(), counterexamples: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn summary(&self) -> String {
        let ok = self.verdicts.iter().filter(|v| v.pass).count();
        if self.passed() {
            format!("{}: {ok}/{} terms pass, no counterexample found", self.subject, self.verdicts.len())
        } else {
            format!(
                "{}: {ok}/{} terms pass, {} counterexample(s)",
                self.subject,
                self.verdicts.len(),
                self.counterexamples.len()
            )
        }
    }
}

impl fmt::Display for SimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.verdicts {
            writeln!(f, "{:>5}  {}  {} : {}", v.index, if v.pass { "pass" } else { "FAIL" }, v.term, v.ty)?;
        }
        for c in &self.counterexamples {
            writeln!(f, "counterexample ({}): {} : {}", c.clause, c.term, c.ty)?;
            for d in &c.denotations {
                writeln!(f, "    denotes {d}")?;
            }
        }
        writeln!(f, "{}", self.summary())
    }
}
