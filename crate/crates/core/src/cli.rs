//! The `cbpv` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a counterexample or violation is
//! found (the report lists them), 2 for usage, input and configuration errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::eval::{eval_comp, eval_value, Env};
use crate::lindcheck::{
    check_fibration_property, check_lind_axioms, delete_object, parse_lind_input, pred_truncation, LindInput,
};
use crate::logrel::{check_basic_lemma, check_effect_sim, load_glue, parse_corpus, typed, SimReport};
use crate::semcore::{interp_vtype, load_model, parse_literal, AlgebraModel, ModelRef, Monad, SemSet, SemVal};
use crate::syntax::{
    generate_terms, parse_ctype, parse_program, parse_program_in, parse_vtype, AnyType, CompType, Signature, Term,
    ValueType,
};
use crate::typecheck::{self, Context};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "cbpv", version, about = "Call-by-push-value semantics and logical relations workbench")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and typecheck a program, printing its type.
    Check {
        file: PathBuf,
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Evaluate a program in a model.
    Eval {
        file: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Free variables: `{"x": {"type": "b", "value": "a"}}`.
        #[arg(long)]
        env: Option<PathBuf>,
        /// Signature, when the model file has none.
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Check the basic lemma of a glued model on a corpus.
    Logrel {
        #[arg(long)]
        glue: PathBuf,
        #[arg(long, conflicts_with = "file")]
        corpus: Option<PathBuf>,
        file: Option<PathBuf>,
    },
    /// Check that powerset and list nondeterminism agree on generated terms.
    Simulate {
        #[command(flatten)]
        gen: GenArgs,
        /// Elements in each value base type.
        #[arg(long, default_value_t = 2)]
        elements: usize,
    },
    /// Generate closed well-typed terms, one per line.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Locally indexed categories and fibrations.
    Lind {
        #[command(subcommand)]
        cmd: LindCmd,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    sig: PathBuf,
    /// Computation type; defaults to `F` of the first value base type.
    #[arg(long = "type")]
    ty: Option<String>,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum LindCmd {
    /// Check a locally indexed category, or a locally indexed functor for the fibration property.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
    },
    /// Print the predicate truncation over the skeleton `{0, …, max}` as JSON.
    Pred {
        #[arg(long, default_value_t = 2)]
        max: usize,
        /// Delete this source object, e.g. `2{0}`.
        #[arg(long)]
        delete: Option<String>,
    },
}

/// A failure before any check ran.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Outcome = Result<(String, bool), Usage>;

fn read(path: &Path) -> Result<String, Usage> {
    fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn read_sig(path: Option<&Path>) -> Result<Signature, Usage> {
    match path {
        Some(p) => Ok(Signature::from_json(&read(p)?).map_err(|e| Usage(format!("{}: {e}", p.display())))?),
        None => Ok(Signature::new()),
    }
}

/// Drops `#` comment lines; everything else is one program.
fn program_text(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn render<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Text => text(),
        Format::Json => serde_json::to_string_pretty(value).map(|s| s + "\n").unwrap_or_default(),
    }
}

/// Runs `cbpv` with `argv` (including the program name), writing the report to `out`
/// and errors to `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Check { file, sig } => cmd_check(cli.format, &file, sig.as_deref()),
        Cmd::Eval { file, model, env, sig } => cmd_eval(cli.format, &file, &model, env.as_deref(), sig.as_deref()),
        Cmd::Logrel { glue, corpus, file } => match corpus.or(file) {
            Some(c) => cmd_logrel(cli.format, &glue, &c),
            None => Err(Usage("logrel needs a corpus: --corpus FILE or a positional FILE".into())),
        },
        Cmd::Simulate { gen, elements } => cmd_simulate(cli.format, &gen, elements),
        Cmd::Gen { gen } => cmd_gen(cli.format, &gen),
        Cmd::Lind { cmd: LindCmd::Check { file, budget } } => cmd_lind_check(cli.format, &file, budget),
        Cmd::Lind { cmd: LindCmd::Pred { max, delete } } => cmd_lind_pred(max, delete.as_deref()),
    };
    match outcome {
        Ok((report, pass)) => {
            let _ = out.write_all(report.as_bytes());
            if pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(Usage(m)) => {
            let _ = writeln!(err, "cbpv: {m}");
            EXIT_USAGE
        }
    }
}

/// Runs `cbpv` on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run_with(argv, &mut out, &mut err)
}

fn cmd_check(format: Format, file: &Path, sig: Option<&Path>) -> Outcome {
    let (text, sig) = (read(file)?, read_sig(sig)?);
    let src = program_text(&text);
    let ctx = Context::new();
    let result = parse_program(&src, &sig).map_err(|e| e.to_string()).and_then(|t| {
        let ty = match &t {
            Term::Comp(m) => typecheck::infer_comp(&ctx, m, &sig).map(|b| b.to_string()),
            Term::Value(v) => typecheck::infer_value(&ctx, v, &sig).map(|a| a.to_string()),
        };
        ty.map(|ty| (t, ty)).map_err(|e| e.to_string())
    });
    let report = match &result {
        Ok((t, ty)) => json!({"term": crate::syntax::print_term(t), "type": ty, "ok": true}),
        Err(e) => json!({"error": e, "ok": false}),
    };
    let text = render(format, &report, || match &result {
        Ok((_, ty)) => format!("{ty}\n"),
        Err(e) => format!("error: {e}\n"),
    });
    Ok((text, result.is_ok()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvEntry {
    #[serde(rename = "type")]
    ty: String,
    value: String,
}

fn cmd_eval(format: Format, file: &Path, model: &Path, env: Option<&Path>, sig: Option<&Path>) -> Outcome {
    let text = read(file)?;
    let model_text = read(model)?;
    let env_text = env.map(read).transpose()?;
    let sig = sig.map(|p| read_sig(Some(p))).transpose()?;
    let m = load_model(&model_text, sig.as_ref())?;
    let sig = m.signature().clone();
    let mut env = Env::new();
    if let Some(t) = env_text {
        let entries: BTreeMap<String, EnvEntry> = serde_json::from_str(&t)?;
        for (x, e) in entries {
            let a = parse_vtype(&e.ty, &sig)?;
            let v = parse_literal(&e.value)?;
            let carrier = interp_vtype(m.as_ref(), &a)?;
            if !carrier.contains(&v) {
                return Err(Usage(format!("`{x}` = {v} is not in the interpretation of {a}")));
            }
            env = env.extend(&x, a, v);
        }
    }
    let ctx = env.context();
    let vars: Vec<String> = env.entries().iter().map(|(x, _, _)| x.clone()).collect();
    let term = parse_program_in(&program_text(&text), &sig, &vars)?;
    let (ty, v) = match &term {
        Term::Comp(c) => {
            let b = typecheck::infer_comp(&ctx, c, &sig)?;
            let v = eval_comp(&m, &env, c, &b)?;
            (b.to_string(), v)
        }
        Term::Value(val) => {
            let a = typecheck::infer_value(&ctx, val, &sig)?;
            let v = eval_value(&m, &env, val, &a)?;
            (a.to_string(), v)
        }
    };
    let report = json!({"type": ty, "denotation": v.to_string()});
    Ok((render(format, &report, || format!("{v} : {ty}\n")), true))
}

fn report_outcome(format: Format, r: &SimReport) -> (String, bool) {
    (render(format, r, || r.to_string()), r.passed())
}

fn cmd_logrel(format: Format, glue: &Path, corpus: &Path) -> Outcome {
    let (glue_text, corpus_text) = (read(glue)?, read(corpus)?);
    let g = load_glue(&glue_text)?;
    let entries = parse_corpus(&corpus_text, g.base().signature())?;
    Ok(report_outcome(format, &check_basic_lemma(&g, &entries)?))
}

fn target_type(gen: &GenArgs, sig: &Signature) -> Result<CompType, Usage> {
    match &gen.ty {
        Some(t) => Ok(parse_ctype(t, sig)?),
        None => {
            Ok(CompType::free(sig.value_bases.first().map(|b| ValueType::base(b.as_str())).unwrap_or(ValueType::Unit)))
        }
    }
}

/// Each value base `b` is interpreted as the atoms `b1, …, bn`; its constants, in
/// name order, denote `b1, b2, …` cyclically. Constants of other types are rejected.
fn sim_models(sig: &Signature, elements: usize) -> Result<(ModelRef, ModelRef), Usage> {
    if elements == 0 {
        return Err(Usage("simulate needs at least one element per base type".into()));
    }
    let mut next: BTreeMap<&str, usize> = BTreeMap::new();
    let mut consts = BTreeMap::new();
    for (c, ty) in &sig.constants {
        let AnyType::Value(ValueType::Base(b)) = ty else {
            return Err(Usage(format!("simulate only interprets constants of base type, not `{c}` : {ty}")));
        };
        let i = next.entry(b.as_str()).or_insert(0);
        consts.insert(c.clone(), SemVal::atom(&format!("{b}{}", *i % elements + 1)));
        *i += 1;
    }
    let bases: BTreeMap<String, SemSet> =
        sig.value_bases.iter().map(|b| (b.clone(), SemSet::atoms((1..=elements).map(|i| format!("{b}{i}"))))).collect();
    let mk = |m: Monad| -> Result<ModelRef, Usage> {
        Ok(Arc::new(AlgebraModel::new(sig.clone(), m, bases.clone(), BTreeMap::new(), consts.clone())?))
    };
    Ok((mk(Monad::pfin())?, mk(Monad::list())?))
}

fn cmd_simulate(format: Format, gen: &GenArgs, elements: usize) -> Outcome {
    let sig = read_sig(Some(&gen.sig))?;
    let ty = target_type(gen, &sig)?;
    let (s, l) = sim_models(&sig, elements)?;
    let terms = generate_terms(&sig, &ty, gen.depth, gen.seed, gen.count)?;
    let corpus = terms.into_iter().map(|m| typed(m, Some(ty.clone()), &sig)).collect::<Result<Vec<_>, _>>()?;
    Ok(report_outcome(format, &check_effect_sim(&s, &l, &corpus)?))
}

fn cmd_gen(format: Format, gen: &GenArgs) -> Outcome {
    let sig = read_sig(Some(&gen.sig))?;
    let ty = target_type(gen, &sig)?;
    let terms: Vec<String> =
        generate_terms(&sig, &ty, gen.depth, gen.seed, gen.count)?.iter().map(ToString::to_string).collect();
    let report = json!({"type": ty.to_string(), "seed": gen.seed, "terms": terms});
    Ok((render(format, &report, || terms.iter().map(|t| format!("{t} :: {ty}\n")).collect()), true))
}

fn cmd_lind_check(format: Format, file: &Path, budget: u64) -> Outcome {
    match parse_lind_input(&read(file)?)? {
        LindInput::Category(l) => {
            let r = check_lind_axioms(&l)?;
            Ok((render(format, &r, || r.to_string()), r.valid()))
        }
        LindInput::Functor(f) => {
            let r = check_fibration_property(&f, budget)?;
            Ok((render(format, &r, || r.to_string()), r.is_fibration()))
        }
    }
}

fn cmd_lind_pred(max: usize, delete: Option<&str>) -> Outcome {
    let mut f = pred_truncation(max)?;
    if let Some(o) = delete {
        if !f.source.objects.iter().any(|x| x == o) {
            return Err(Usage(format!("`{o}` is not an object of the truncation")));
        }
        f = delete_object(&f, o);
    }
    Ok((serde_json::to_string(&f)? + "\n", true))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("cbpv").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn tmp(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("cbpv-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    const ND: &str =
        r#"{"value_bases": ["b"], "operations": [{"name": "or", "arity": 2}, {"name": "fail", "arity": 0}]}"#;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&[]).0, EXIT_USAGE);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        // Seeds are mandatory.
        let sig = tmp("nd.json", ND);
        assert_eq!(run_str(&["gen", "--sig", sig.to_str().unwrap(), "--count", "3"]).0, EXIT_USAGE);
        let (code, _, err) = run_str(&["check", "/nonexistent/prog.cbpv"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("/nonexistent/prog.cbpv"));
        assert_eq!(run_str(&["--help"]).0, EXIT_PASS);
    }

    #[test]
    fn check_prints_the_type() {
        let sig = tmp("nd2.json", ND);
        let prog = tmp("p.cbpv", "# choose\nor(return (); fail)\n");
        let (code, out, _) = run_str(&["check", prog.to_str().unwrap(), "--sig", sig.to_str().unwrap()]);
        assert_eq!((code, out.as_str()), (EXIT_PASS, "F 1\n"));
        let bad = tmp("bad.cbpv", "force ()");
        assert_eq!(run_str(&["check", bad.to_str().unwrap()]).0, EXIT_FAIL);
    }

    #[test]
    fn eval_with_env() {
        let model = tmp(
            "m.json",
            &format!(
                r#"{{"kind": "algebra", "signature": {ND}, "monad": {{"kind": "list"}}, "bases": {{"b": ["a", "c"]}}}}"#
            ),
        );
        let env = tmp("e.json", r#"{"x": {"type": "b", "value": "c"}}"#);
        let prog = tmp("q.cbpv", "or(return x; or(fail; return x))");
        let args = ["eval", prog.to_str().unwrap(), "--model", model.to_str().unwrap(), "--env", env.to_str().unwrap()];
        let (code, out, err) = run_str(&args);
        assert_eq!(code, EXIT_PASS, "{err}");
        assert_eq!(out, "[c, c] : F b\n");
        let env = tmp("e2.json", r#"{"x": {"type": "b", "value": "z"}}"#);
        let args = ["eval", prog.to_str().unwrap(), "--model", model.to_str().unwrap(), "--env", env.to_str().unwrap()];
        assert_eq!(run_str(&args).0, EXIT_USAGE);
    }

    #[test]
    fn gen_and_simulate_are_deterministic() {
        let sig = tmp("nd3.json", ND);
        let args = ["gen", "--sig", sig.to_str().unwrap(), "--count", "5", "--seed", "7", "--depth", "3"];
        let (code, a, _) = run_str(&args);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(a.lines().count(), 5);
        assert_eq!(a, run_str(&args).1);
        let args = ["--format", "json", "simulate", "--sig", sig.to_str().unwrap(), "--count", "20", "--seed", "7"];
        let (code, out, err) = run_str(&args);
        assert_eq!(code, EXIT_PASS, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["verdicts"].as_array().unwrap().len(), 20);
        assert_eq!(out, run_str(&args).1);
    }

    #[test]
    fn simulate_names_base_elements_with_constants() {
        let sig = tmp(
            "ndc.json",
            r#"{"value_bases": ["b"], "operations": [{"name": "or", "arity": 2}, {"name": "fail", "arity": 0}],
                "constants": [{"name": "c", "type": "b"}, {"name": "d", "type": "b"}]}"#,
        );
        let args = ["simulate", "--sig", sig.to_str().unwrap(), "--count", "30", "--seed", "1"];
        let (code, out, err) = run_str(&args);
        assert_eq!(code, EXIT_PASS, "{err}");
        assert!(out.contains("30/30 terms pass"), "{out}");
        let bad = tmp("ndt.json", r#"{"value_bases": ["b"], "constants": [{"name": "t", "type": "F b"}]}"#);
        assert_eq!(run_str(&["simulate", "--sig", bad.to_str().unwrap(), "--seed", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn logrel_negative_control_exits_one() {
        let glue = |exn: &str| {
            format!(
                r#"{{"model": {{"kind": "algebra",
                    "signature": {{"value_bases": ["b"], "constants": [{{"name": "c", "type": "b"}}, {{"name": "throw", "type": "F b"}}]}},
                    "monad": {{"kind": "exception", "errors": ["e1", "e2"]}},
                    "bases": {{"b": ["a", "b"]}}, "consts": {{"c": "a", "throw": "raise {exn}"}}}},
                  "mode": "unary", "lifting": {{"kind": "exception", "errors": ["e1"]}},
                  "base_rels": {{"b": {{"members": ["a"]}}}}}}"#
            )
        };
        let corpus = tmp("c.txt", "# corpus\nreturn c\nthrow to x. return x\n");
        let good = tmp("g1.json", &glue("e1"));
        assert_eq!(run_str(&["logrel", "--glue", good.to_str().unwrap(), corpus.to_str().unwrap()]).0, EXIT_PASS);
        let bad = tmp("g2.json", &glue("e2"));
        let (code, out, _) =
            run_str(&["logrel", "--glue", bad.to_str().unwrap(), "--corpus", corpus.to_str().unwrap()]);
        assert_eq!(code, EXIT_FAIL);
        assert!(out.contains("counterexample (unrelated constant): throw"), "{out}");
    }

    #[test]
    fn lind_round_trip() {
        let (code, json, _) = run_str(&["lind", "pred", "--max", "1"]);
        assert_eq!(code, EXIT_PASS);
        let p = tmp("pred1.json", &json);
        let (code, out, _) = run_str(&["lind", "check", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_PASS, "{out}");
        assert!(out.contains("fibration: yes"), "{out}");
        let (_, json, _) = run_str(&["lind", "pred", "--max", "2", "--delete", "2{0}"]);
        let p = tmp("pred2.json", &json);
        let (code, out, _) = run_str(&["lind", "check", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_FAIL);
        assert!(out.contains("no lift of `2>2[10]` : 2 → P(2{1})"), "{out}");
        assert_eq!(run_str(&["lind", "pred", "--delete", "9{}"]).0, EXIT_USAGE);
    }
}
