//! Seeded random generation of closed well-typed computations.
//!
//! Generation is type-directed with backtracking: every rule that applies at the
//! requested type is tried in a random (weighted) order until one succeeds. Depth 1
//! admits only leaf forms; type-forced introductions (lambda at arrow types, pairs at
//! `&` types) do not consume depth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::ast::{AnyType, Comp, CompType, Value, ValueType};
use super::signature::Signature;
use crate::typecheck::{self, Context};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("no closed term of type {ty} within depth {depth}")]
    Uninhabited { ty: String, depth: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
}

const FUEL_PER_ATTEMPT: usize = 20_000;
const ATTEMPTS_PER_TERM: usize = 40;

#[derive(Clone, Copy)]
enum Rule {
    Return,
    NullaryOp(usize),
    Const(usize),
    ForceVar(usize),
    Op(usize),
    To,
    LamApp,
    Case(usize),
    Pm(usize),
    Let,
    Proj,
    ApplyVar(usize),
}

pub struct Generator<'a> {
    sig: &'a Signature,
    rng: ChaCha8Rng,
    ctx: Vec<(String, ValueType)>,
    pool: Vec<ValueType>,
    fuel: usize,
    fresh: usize,
}

impl<'a> Generator<'a> {
    pub fn new(sig: &'a Signature, seed: u64) -> Self {
        let mut pool = vec![ValueType::Unit, ValueType::bool()];
        pool.extend(sig.base_value_types());
        Generator { sig, rng: ChaCha8Rng::seed_from_u64(seed), ctx: Vec::new(), pool, fuel: 0, fresh: 0 }
    }

    /// Adds a type that `to` and lambda binders may range over.
    pub fn add_binder_type(&mut self, a: ValueType) {
        if !self.pool.contains(&a) {
            self.pool.push(a);
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn context(&self) -> Context {
        Context::from_entries(self.ctx.clone())
    }

    fn fresh_name(&mut self) -> String {
        loop {
            let name = format!("x{}", self.fresh);
            self.fresh += 1;
            if self.sig.op(&name).is_none() && self.sig.constant(&name).is_none() {
                return name;
            }
        }
    }

    fn spend(&mut self) -> bool {
        if self.fuel == 0 {
            return false;
        }
        self.fuel -= 1;
        true
    }

    /// Weighted random permutation.
    fn order<T: Copy>(&mut self, mut items: Vec<(T, u32)>) -> Vec<T> {
        let mut out = Vec::with_capacity(items.len());
        while !items.is_empty() {
            let total: u32 = items.iter().map(|(_, w)| *w).sum();
            let mut pick = self.rng.gen_range(0..total);
            let mut idx = 0;
            for (i, (_, w)) in items.iter().enumerate() {
                if pick < *w {
                    idx = i;
                    break;
                }
                pick -= w;
            }
            out.push(items.remove(idx).0);
        }
        out
    }

    fn pick_pool(&mut self) -> Vec<ValueType> {
        let weighted = self.pool.iter().cloned().enumerate().map(|(i, _)| (i, 1)).collect();
        let order = self.order(weighted);
        order.into_iter().map(|i| self.pool[i].clone()).collect()
    }

    fn bind<T>(&mut self, x: &str, a: ValueType, f: impl FnOnce(&mut Self) -> T) -> T {
        self.ctx.push((x.to_string(), a));
        let r = f(self);
        self.ctx.pop();
        r
    }

    /// A closed value of type `a` in the current context.
    pub fn value(&mut self, a: &ValueType, depth: usize) -> Option<Value> {
        if !self.spend() {
            return None;
        }
        let mut options: Vec<(u8, u32)> = Vec::new();
        let vars: Vec<String> = self.ctx.iter().filter(|(_, t)| t == a).map(|(n, _)| n.clone()).collect();
        let consts: Vec<String> = self.sig.value_constants_of(a).into_iter().map(str::to_string).collect();
        if !vars.is_empty() {
            options.push((0, 2));
        }
        if !consts.is_empty() {
            options.push((1, 2));
        }
        options.push((2, 3));
        for choice in self.order(options) {
            let got = match choice {
                0 => Some(Value::Var(vars[self.rng.gen_range(0..vars.len())].clone())),
                1 => Some(Value::Const(consts[self.rng.gen_range(0..consts.len())].clone())),
                _ => self.construct_value(a, depth),
            };
            if got.is_some() {
                return got;
            }
        }
        None
    }

    fn construct_value(&mut self, a: &ValueType, depth: usize) -> Option<Value> {
        match a {
            ValueType::Unit => Some(Value::Unit),
            ValueType::Prod(x, y) => Some(Value::pair(self.value(x, depth)?, self.value(y, depth)?)),
            ValueType::Sum(x, y) => {
                let sides = self.order(vec![(true, 1), (false, 1)]);
                for left in sides {
                    let got =
                        if left { self.value(x, depth).map(Value::inl) } else { self.value(y, depth).map(Value::inr) };
                    if got.is_some() {
                        return got;
                    }
                }
                None
            }
            ValueType::Thunk(b) if depth > 1 => Some(Value::thunk(self.comp(b, depth - 1)?)),
            _ => None,
        }
    }

    fn is_inferable_head(&self, head: &Comp, a: &ValueType) -> bool {
        typecheck::binder_type(&self.context(), head, self.sig).is_ok_and(|t| &t == a)
    }

    /// A computation of type `b` in the current context.
    pub fn comp(&mut self, b: &CompType, depth: usize) -> Option<Comp> {
        if !self.spend() || depth == 0 {
            return None;
        }
        match b {
            CompType::Arrow(a, body) => {
                if self.rng.gen_bool(0.25) {
                    if let Some(m) = self.comp_by_rules(b, depth) {
                        return Some(m);
                    }
                }
                let x = self.fresh_name();
                let a = (**a).clone();
                return self
                    .bind(&x, a.clone(), |g| g.comp(body, depth))
                    .map(|m| Comp::lambda(x, Some(a), m))
                    .or_else(|| self.comp_by_rules(b, depth));
            }
            CompType::With(l, r) => {
                if self.rng.gen_bool(0.25) {
                    if let Some(m) = self.comp_by_rules(b, depth) {
                        return Some(m);
                    }
                }
                let pair = self
                    .comp(l, depth)
                    .and_then(|m| self.comp(r, depth).map(|n| Comp::CPair(Box::new(m), Box::new(n))));
                return pair.or_else(|| self.comp_by_rules(b, depth));
            }
            _ => {}
        }
        self.comp_by_rules(b, depth)
    }

    fn rules(&self, b: &CompType, depth: usize) -> Vec<(Rule, u32)> {
        let mut rules = Vec::new();
        if matches!(b, CompType::Free(_)) {
            rules.push((Rule::Return, 3));
        }
        for (i, op) in self.sig.operations.iter().enumerate() {
            if op.arity == 0 {
                rules.push((Rule::NullaryOp(i), 1));
            } else if depth > 1 {
                rules.push((Rule::Op(i), 4));
            }
        }
        for (i, (_, t)) in self.sig.constants.iter().enumerate() {
            if matches!(t, AnyType::Comp(c) if c == b) {
                rules.push((Rule::Const(i), 2));
            }
        }
        for (i, (_, t)) in self.ctx.iter().enumerate() {
            match t {
                ValueType::Thunk(c) if **c == *b => rules.push((Rule::ForceVar(i), 2)),
                ValueType::Thunk(c) if depth > 1 && matches!(&**c, CompType::Arrow(_, r) if **r == *b) => {
                    rules.push((Rule::ApplyVar(i), 2))
                }
                ValueType::Sum(..) if depth > 1 => rules.push((Rule::Case(i), 3)),
                ValueType::Prod(..) if depth > 1 => rules.push((Rule::Pm(i), 2)),
                _ => {}
            }
        }
        if depth > 1 {
            rules.push((Rule::To, 4));
            rules.push((Rule::LamApp, 2));
            rules.push((Rule::Let, 1));
            rules.push((Rule::Proj, 1));
        }
        rules
    }

    fn comp_by_rules(&mut self, b: &CompType, depth: usize) -> Option<Comp> {
        let rules = self.rules(b, depth);
        for rule in self.order(rules) {
            if self.fuel == 0 {
                return None;
            }
            if let Some(m) = self.apply(rule, b, depth) {
                return Some(m);
            }
        }
        None
    }

    fn op_param(&mut self, idx: usize, depth: usize) -> Option<Option<Value>> {
        match self.sig.operations[idx].param.clone() {
            Some(p) => self.value(&p, depth).map(Some),
            None => Some(None),
        }
    }

    fn apply(&mut self, rule: Rule, b: &CompType, depth: usize) -> Option<Comp> {
        let sub = depth - 1;
        match rule {
            Rule::Return => match b {
                CompType::Free(a) => self.value(a, depth).map(Comp::ret),
                _ => None,
            },
            Rule::NullaryOp(i) => {
                let param = self.op_param(i, depth)?;
                Some(Comp::op(self.sig.operations[i].name.clone(), param, vec![]))
            }
            Rule::Const(i) => self.sig.constants.keys().nth(i).map(|n| Comp::Const(n.clone())),
            Rule::ForceVar(i) => Some(Comp::force(Value::Var(self.ctx[i].0.clone()))),
            Rule::Op(i) => {
                let param = self.op_param(i, depth)?;
                let arity = self.sig.operations[i].arity;
                let mut args = Vec::with_capacity(arity);
                for _ in 0..arity {
                    args.push(self.comp(b, sub)?);
                }
                Some(Comp::op(self.sig.operations[i].name.clone(), param, args))
            }
            Rule::To => {
                for a in self.pick_pool() {
                    let fa = CompType::free(a.clone());
                    let Some(head) = self.comp(&fa, sub) else {
                        continue;
                    };
                    if !self.is_inferable_head(&head, &a) {
                        continue;
                    }
                    let x = self.fresh_name();
                    if let Some(n) = self.bind(&x, a, |g| g.comp(b, sub)) {
                        return Some(Comp::to(head, x, n));
                    }
                }
                None
            }
            Rule::LamApp => {
                for a in self.pick_pool() {
                    let x = self.fresh_name();
                    let Some(body) = self.bind(&x, a.clone(), |g| g.comp(b, sub)) else {
                        continue;
                    };
                    let Some(arg) = self.value(&a, sub) else {
                        continue;
                    };
                    return Some(Comp::app(Comp::lambda(x, Some(a), body), arg));
                }
                None
            }
            Rule::Case(i) => {
                let (v, t) = self.ctx[i].clone();
                let ValueType::Sum(l, r) = t else { return None };
                let x = self.fresh_name();
                let left = self.bind(&x, *l, |g| g.comp(b, sub))?;
                let y = self.fresh_name();
                let right = self.bind(&y, *r, |g| g.comp(b, sub))?;
                Some(Comp::Case(Box::new(Value::Var(v)), x, Box::new(left), y, Box::new(right)))
            }
            Rule::Pm(i) => {
                let (v, t) = self.ctx[i].clone();
                let ValueType::Prod(l, r) = t else {
                    return None;
                };
                let x = self.fresh_name();
                let y = self.fresh_name();
                let body = self.bind(&x, *l, |g| g.bind(&y, *r, |g| g.comp(b, sub)))?;
                Some(Comp::PmPair(Box::new(Value::Var(v)), x, y, Box::new(body)))
            }
            Rule::Let => {
                for a in self.pick_pool() {
                    let Some(v) = self.value(&a, sub) else {
                        continue;
                    };
                    if typecheck::infer_value(&self.context(), &v, self.sig).ok().as_ref() != Some(&a) {
                        continue;
                    }
                    let x = self.fresh_name();
                    if let Some(m) = self.bind(&x, a, |g| g.comp(b, sub)) {
                        return Some(Comp::LetVal(x, Box::new(v), Box::new(m)));
                    }
                }
                None
            }
            Rule::Proj => {
                let other = CompType::free(ValueType::Unit);
                let m = self.comp(b, sub)?;
                let n = self.comp(&other, sub)?;
                let first = self.rng.gen_bool(0.5);
                let (pair, proj) = if first {
                    let p = Comp::CPair(Box::new(m), Box::new(n));
                    (p.clone(), Comp::Proj1(Box::new(p)))
                } else {
                    let p = Comp::CPair(Box::new(n), Box::new(m));
                    (p.clone(), Comp::Proj2(Box::new(p)))
                };
                typecheck::pair_type(&self.context(), &pair, b, first, self.sig).ok()?;
                Some(proj)
            }
            Rule::ApplyVar(i) => {
                let (f, t) = self.ctx[i].clone();
                let ValueType::Thunk(c) = t else { return None };
                let CompType::Arrow(a, _) = *c else {
                    return None;
                };
                let arg = self.value(&a, sub)?;
                Some(Comp::app(Comp::force(Value::Var(f)), arg))
            }
        }
    }

    /// One closed term of type `b`, or `None` when the attempt budget runs out.
    pub fn closed_comp(&mut self, b: &CompType, depth: usize) -> Option<Comp> {
        for _ in 0..ATTEMPTS_PER_TERM {
            self.fuel = FUEL_PER_ATTEMPT;
            self.ctx.clear();
            if let Some(m) = self.comp(b, depth) {
                if typecheck::check_comp(&Context::new(), &m, b, self.sig).is_ok() {
                    return Some(m);
                }
            }
        }
        None
    }

    /// A term of type `b` with the given free variables.
    pub fn open_comp(&mut self, ctx: &[(String, ValueType)], b: &CompType, depth: usize) -> Option<Comp> {
        for _ in 0..ATTEMPTS_PER_TERM {
            self.fuel = FUEL_PER_ATTEMPT;
            self.ctx = ctx.to_vec();
            let got = self.comp(b, depth);
            self.ctx.clear();
            if let Some(m) = got {
                let c = Context::from_entries(ctx.to_vec());
                if typecheck::check_comp(&c, &m, b, self.sig).is_ok() {
                    return Some(m);
                }
            }
        }
        None
    }

    pub fn closed_value(&mut self, a: &ValueType, depth: usize) -> Option<Value> {
        for _ in 0..ATTEMPTS_PER_TERM {
            self.fuel = FUEL_PER_ATTEMPT;
            self.ctx.clear();
            if let Some(v) = self.value(a, depth) {
                if typecheck::check_value(&Context::new(), &v, a, self.sig).is_ok() {
                    return Some(v);
                }
            }
        }
        None
    }
}

fn collect_free_value_types(b: &CompType, out: &mut Vec<ValueType>) {
    match b {
        CompType::Free(a) => out.push((**a).clone()),
        CompType::With(l, r) => {
            collect_free_value_types(l, out);
            collect_free_value_types(r, out);
        }
        CompType::Arrow(a, r) => {
            out.push((**a).clone());
            collect_free_value_types(r, out);
        }
        CompType::Base(_) | CompType::Top => {}
    }
}

/// `count` closed computations of type `target`, deterministic in `seed`.
pub fn generate_terms(
    sig: &Signature,
    target: &CompType,
    max_depth: usize,
    seed: u64,
    count: usize,
) -> Result<Vec<Comp>, GenError> {
    if max_depth == 0 {
        return Err(GenError::ZeroDepth);
    }
    let mut g = Generator::new(sig, seed);
    let mut extra = Vec::new();
    collect_free_value_types(target, &mut extra);
    for a in extra {
        g.add_binder_type(a);
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        // Vary the size of terms: each term draws its own depth bound.
        let depth = g.rng.gen_range(1..=max_depth);
        let m = g
            .closed_comp(target, depth)
            .or_else(|| if depth < max_depth { g.closed_comp(target, max_depth) } else { None })
            .ok_or_else(|| GenError::Uninhabited { ty: target.to_string(), depth: max_depth })?;
        out.push(m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nondet() -> Signature {
        Signature::new().with_op("or", 2, None).with_op("fail", 0, None)
    }

    #[test]
    fn depth_one_gives_leaves() {
        let sig = nondet();
        let t = CompType::free(ValueType::bool());
        for seed in 0..20 {
            let ms = generate_terms(&sig, &t, 1, seed, 1).unwrap();
            let leaf = match &ms[0] {
                Comp::Return(_) => true,
                Comp::Op(_, _, args) => args.is_empty(),
                _ => false,
            };
            assert!(leaf, "{}", ms[0]);
        }
    }

    #[test]
    fn deterministic() {
        let sig = nondet();
        let t = CompType::free(ValueType::bool());
        assert_eq!(generate_terms(&sig, &t, 4, 9, 30).unwrap(), generate_terms(&sig, &t, 4, 9, 30).unwrap());
    }

    #[test]
    fn generated_terms_typecheck() {
        let sig = nondet().with_value_base("b").with_const("a", AnyType::Value(ValueType::base("b")));
        let targets = [
            CompType::free(ValueType::base("b")),
            CompType::arrow(ValueType::bool(), CompType::free(ValueType::Unit)),
            CompType::with(CompType::free(ValueType::Unit), CompType::Top),
        ];
        for t in &targets {
            for m in generate_terms(&sig, t, 4, 3, 50).unwrap() {
                typecheck::check_comp(&Context::new(), &m, t, &sig).unwrap();
                assert!(m.is_closed());
            }
        }
    }

    #[test]
    fn uninhabited_target_is_an_error() {
        let sig = Signature::new();
        let t = CompType::free(ValueType::Empty);
        assert!(matches!(generate_terms(&sig, &t, 2, 0, 1), Err(GenError::Uninhabited { .. })));
    }
}
