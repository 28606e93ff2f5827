//! Reduction and conversion: beta steps, user rewrite rules, weak head and
//! full normal forms, and the untyped congruence they generate (optionally
//! with eta).
//!
//! All reduction is fuel-bounded. Corpus theories are assumed confluent and
//! terminating; running out of fuel signals likely divergence rather than a
//! deep term.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::term::{instantiate, shift, subst, Substitution, Term, TermRef};
use crate::theory::{RewriteRule, Theory};

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionConfig {
    pub eta: bool,
    /// Reduction step budget, shared across one top-level call. Must be
    /// positive.
    pub fuel: u64,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig { eta: false, fuel: DEFAULT_FUEL }
    }
}

impl ReductionConfig {
    pub fn with_eta(eta: bool) -> Self {
        ReductionConfig { eta, ..ReductionConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("reduction fuel exhausted after {0} steps (possible non-termination)")]
    FuelExhausted(u64),
}

#[derive(Debug)]
struct Fuel {
    left: u64,
    start: u64,
}

impl Fuel {
    fn new(budget: u64) -> Self {
        let budget = budget.max(1);
        Fuel { left: budget, start: budget }
    }

    fn tick(&mut self) -> Result<(), EngineError> {
        if self.left == 0 {
            return Err(EngineError::FuelExhausted(self.start));
        }
        self.left -= 1;
        Ok(())
    }
}

/// Normalization order. Both must agree on confluent theories; the
/// property suite checks that on random well-typed terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
}

struct Engine<'a> {
    theory: &'a Theory,
    eta: bool,
    // call-local memo tables; a top-level call owns one engine
    whnf_cache: RefCell<HashMap<TermRef, TermRef>>,
    conv_cache: RefCell<HashMap<(TermRef, TermRef), bool>>,
}

impl<'a> Engine<'a> {
    fn new(theory: &'a Theory, eta: bool) -> Self {
        Engine {
            theory,
            eta,
            whnf_cache: RefCell::new(HashMap::new()),
            conv_cache: RefCell::new(HashMap::new()),
        }
    }
}

impl<'a> Engine<'a> {
    /// Reduces to weak head normal form: the head is neither a beta redex
    /// nor the root of a rule redex. Spine arguments stay untouched except
    /// where matching had to look at them.
    fn whnf(&self, t: &TermRef, fuel: &mut Fuel) -> Result<TermRef, EngineError> {
        if let Some(cached) = self.whnf_cache.borrow().get(t) {
            return Ok(cached.clone());
        }
        let result = self.whnf_uncached(t, fuel)?;
        let mut cache = self.whnf_cache.borrow_mut();
        cache.insert(t.clone(), result.clone());
        cache.insert(result.clone(), result.clone());
        Ok(result)
    }

    fn whnf_uncached(&self, t: &TermRef, fuel: &mut Fuel) -> Result<TermRef, EngineError> {
        let (mut head, mut args) = t.spine();
        // args in application order; operate on the reversed stack
        args.reverse();
        loop {
            match &*head.clone() {
                Term::Lam { body, .. } if !args.is_empty() => {
                    fuel.tick()?;
                    let arg = args.pop().expect("nonempty");
                    head = instantiate(body, &arg);
                    let (h, mut extra) = head.spine();
                    extra.reverse();
                    args.extend(extra);
                    head = h;
                }
                Term::Const(c) => {
                    if let Some(body) = self.theory.transparent_body(c) {
                        fuel.tick()?;
                        head = body.clone();
                        continue;
                    }
                    match self.try_rules(c, &mut args, fuel)? {
                        Some(reduct) => {
                            fuel.tick()?;
                            let (h, mut extra) = reduct.spine();
                            extra.reverse();
                            // the reduct's own arguments sit closest to the head
                            args.extend(extra);
                            head = h;
                        }
                        None => break,
                    }
                }
                _ => break,
            }
        }
        args.reverse();
        Ok(Term::apps(head, args))
    }

    /// Tries every rule for head constant `c` in declaration order against
    /// the argument stack (`args` reversed: last element is the first
    /// argument). On success returns the instantiated right-hand side and
    /// removes the consumed arguments.
    fn try_rules(
        &self,
        c: &str,
        args: &mut Vec<TermRef>,
        fuel: &mut Fuel,
    ) -> Result<Option<TermRef>, EngineError> {
        // matching may reduce arguments in place; earlier rules must then be
        // retried against the updated spine
        loop {
            let mut changed = false;
            for rule in self.theory.rules_for(c) {
                let (_, lhs_args) = rule.lhs.spine();
                let k = lhs_args.len();
                if args.len() < k {
                    continue;
                }
                let mut binding = Substitution::new();
                let mut ok = true;
                for (i, pat) in lhs_args.iter().enumerate() {
                    let idx = args.len() - 1 - i;
                    let subject = args[idx].clone();
                    let (matched, reduced) = self.match_one(pat, &subject, &mut binding, fuel)?;
                    if reduced != subject {
                        changed = true;
                    }
                    args[idx] = reduced;
                    if !matched {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    args.truncate(args.len() - k);
                    return Ok(Some(subst(&rule.rhs, &binding)));
                }
            }
            if !changed {
                return Ok(None);
            }
        }
    }

    /// First-order matching of one algebraic pattern against a subject.
    /// Reduces the subject as far as the pattern demands; repeated pattern
    /// variables are resolved up to convertibility. Returns whether the
    /// match succeeded together with the possibly-reduced subject, which
    /// the caller keeps either way.
    fn match_one(
        &self,
        pattern: &TermRef,
        subject: &TermRef,
        binding: &mut Substitution,
        fuel: &mut Fuel,
    ) -> Result<(bool, TermRef), EngineError> {
        match &**pattern {
            Term::Var(x) => {
                if let Some(prev) = binding.lookup(x).cloned() {
                    if !self.convertible(&prev, subject, fuel)? {
                        return Ok((false, subject.clone()));
                    }
                } else {
                    binding.insert(x.clone(), subject.clone());
                }
                Ok((true, subject.clone()))
            }
            Term::Const(_) | Term::App { .. } => {
                let (pat_head, pat_args) = pattern.spine();
                let pc = match &*pat_head {
                    Term::Const(pc) => pc.clone(),
                    _ => return Ok((false, subject.clone())),
                };
                let fits = |head: &TermRef, args: &[TermRef]| {
                    matches!(&**head, Term::Const(sc) if *sc == pc) && args.len() == pat_args.len()
                };
                // the pattern demands a constant-headed shape: use the
                // subject as is when it already has it, otherwise reduce
                // just enough to expose it
                let (subj_head, subj_args) = {
                    let (h, a) = subject.spine();
                    if fits(&h, &a) {
                        (h, a)
                    } else {
                        let reduced = self.whnf(subject, fuel)?;
                        let (h, a) = reduced.spine();
                        if !fits(&h, &a) {
                            return Ok((false, reduced));
                        }
                        (h, a)
                    }
                };
                let mut new_args: Vec<TermRef> = subj_args.clone();
                for (i, (p, s)) in pat_args.iter().zip(&subj_args).enumerate() {
                    let (matched, reduced) = self.match_one(p, s, binding, fuel)?;
                    new_args[i] = reduced;
                    if !matched {
                        return Ok((false, Term::apps(subj_head, new_args)));
                    }
                }
                Ok((true, Term::apps(subj_head, new_args)))
            }
            _ => Ok((false, subject.clone())),
        }
    }

    fn normalize(&self, t: &TermRef, fuel: &mut Fuel) -> Result<TermRef, EngineError> {
        let w = self.whnf(t, fuel)?;
        match &*w {
            Term::Lam { hint, domain, body } => Ok(Term::lam(
                hint.clone(),
                domain
                    .as_ref()
                    .map(|d| self.normalize(d, fuel))
                    .transpose()?,
                self.normalize(body, fuel)?,
            )),
            Term::Pi { hint, domain, codomain } => Ok(Term::pi(
                hint.clone(),
                self.normalize(domain, fuel)?,
                self.normalize(codomain, fuel)?,
            )),
            Term::App { .. } => {
                let (head, args) = w.spine();
                let args = args
                    .iter()
                    .map(|a| self.normalize(a, fuel))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Term::apps(head, args))
            }
            _ => Ok(w),
        }
    }

    fn normalize_innermost(&self, t: &TermRef, fuel: &mut Fuel) -> Result<TermRef, EngineError> {
        let t = match &**t {
            Term::Lam { hint, domain, body } => Term::lam(
                hint.clone(),
                domain
                    .as_ref()
                    .map(|d| self.normalize_innermost(d, fuel))
                    .transpose()?,
                self.normalize_innermost(body, fuel)?,
            ),
            Term::Pi { hint, domain, codomain } => Term::pi(
                hint.clone(),
                self.normalize_innermost(domain, fuel)?,
                self.normalize_innermost(codomain, fuel)?,
            ),
            Term::App { .. } => {
                let (head, args) = t.spine();
                // rightmost first
                let mut args: Vec<TermRef> = args
                    .iter()
                    .rev()
                    .map(|a| self.normalize_innermost(a, fuel))
                    .collect::<Result<Vec<_>, _>>()?;
                args.reverse();
                let head = match &*head {
                    Term::Lam { .. } => self.normalize_innermost(&head, fuel)?,
                    _ => head,
                };
                Term::apps(head, args)
            }
            _ => t.clone(),
        };
        match self.root_step(&t, fuel)? {
            Some(t2) => self.normalize_innermost(&t2, fuel),
            None => Ok(t),
        }
    }

    /// One beta or rule step at the root, if any.
    fn root_step(&self, t: &TermRef, fuel: &mut Fuel) -> Result<Option<TermRef>, EngineError> {
        let (head, args) = t.spine();
        if let Term::Lam { body, .. } = &*head {
            if !args.is_empty() {
                fuel.tick()?;
                let first = instantiate(body, &args[0]);
                return Ok(Some(Term::apps(first, args[1..].iter().cloned())));
            }
        }
        if let Term::Const(c) = &*head {
            if let Some(body) = self.theory.transparent_body(c) {
                fuel.tick()?;
                return Ok(Some(Term::apps(body.clone(), args)));
            }
            let mut stack: Vec<TermRef> = args.iter().rev().cloned().collect();
            if let Some(reduct) = self.try_rules(c, &mut stack, fuel)? {
                fuel.tick()?;
                stack.reverse();
                return Ok(Some(Term::apps(reduct, stack)));
            }
        }
        Ok(None)
    }

    /// Conversion test by weak-head reduction and congruence descent. With
    /// eta on, an abstraction compared against anything else has the other
    /// side applied to the bound variable.
    fn convertible(
        &self,
        t: &TermRef,
        u: &TermRef,
        fuel: &mut Fuel,
    ) -> Result<bool, EngineError> {
        let mut goals = vec![(t.clone(), u.clone())];
        let mut seen: HashSet<(TermRef, TermRef)> = HashSet::new();
        while let Some((a, b)) = goals.pop() {
            if a == b {
                continue;
            }
            match self.conv_cache.borrow().get(&(a.clone(), b.clone())) {
                Some(true) => continue,
                Some(false) => return Ok(false),
                None => {}
            }
            if !seen.insert((a.clone(), b.clone())) {
                continue;
            }
            let a = self.whnf(&a, fuel)?;
            let b = self.whnf(&b, fuel)?;
            if a == b {
                continue;
            }
            use Term::*;
            match (&*a, &*b) {
                (Lam { domain: d1, body: b1, .. }, Lam { domain: d2, body: b2, .. }) => {
                    if let (Some(d1), Some(d2)) = (d1, d2) {
                        goals.push((d1.clone(), d2.clone()));
                    }
                    goals.push((b1.clone(), b2.clone()));
                }
                (Pi { domain: d1, codomain: c1, .. }, Pi { domain: d2, codomain: c2, .. }) => {
                    goals.push((d1.clone(), d2.clone()));
                    goals.push((c1.clone(), c2.clone()));
                }
                (Lam { body, .. }, _) if self.eta => {
                    let expanded = Term::app(shift(&b, 1, 0), Term::bound(0));
                    goals.push((body.clone(), expanded));
                }
                (_, Lam { body, .. }) if self.eta => {
                    let expanded = Term::app(shift(&a, 1, 0), Term::bound(0));
                    goals.push((expanded, body.clone()));
                }
                (App { .. }, App { .. }) => {
                    let (h1, args1) = a.spine();
                    let (h2, args2) = b.spine();
                    if args1.len() != args2.len() {
                        self.conv_cache.borrow_mut().insert((a, b), false);
                        return Ok(false);
                    }
                    goals.push((h1, h2));
                    goals.extend(args1.into_iter().zip(args2));
                }
                _ => {
                    self.conv_cache.borrow_mut().insert((a, b), false);
                    return Ok(false);
                }
            }
        }
        let mut cache = self.conv_cache.borrow_mut();
        for pair in seen {
            cache.insert(pair, true);
        }
        Ok(true)
    }
}

/// Weak head normal form of `t` in `theory`.
pub fn whnf(theory: &Theory, t: &TermRef, config: &ReductionConfig) -> Result<TermRef, EngineError> {
    let engine = Engine::new(theory, config.eta);
    engine.whnf(t, &mut Fuel::new(config.fuel))
}

/// Full normal form, leftmost-outermost.
pub fn normalize(
    theory: &Theory,
    t: &TermRef,
    config: &ReductionConfig,
) -> Result<TermRef, EngineError> {
    normalize_with(theory, t, config, Strategy::LeftmostOutermost)
}

pub fn normalize_with(
    theory: &Theory,
    t: &TermRef,
    config: &ReductionConfig,
    strategy: Strategy,
) -> Result<TermRef, EngineError> {
    let engine = Engine::new(theory, config.eta);
    let mut fuel = Fuel::new(config.fuel);
    match strategy {
        Strategy::LeftmostOutermost => engine.normalize(t, &mut fuel),
        Strategy::RightmostInnermost => engine.normalize_innermost(t, &mut fuel),
    }
}

/// The untyped conversion `t ≡ u` generated by beta, the theory's rules and
/// (when enabled) eta.
pub fn convertible(
    theory: &Theory,
    t: &TermRef,
    u: &TermRef,
    config: &ReductionConfig,
) -> Result<bool, EngineError> {
    let engine = Engine::new(theory, config.eta);
    engine.convertible(t, u, &mut Fuel::new(config.fuel))
}

/// Matches a rule left-hand side against a term. Returns the substitution
/// on the pattern variables if one exists; repeated variables must bind
/// convertible terms (the first binding is kept).
pub fn match_pattern(
    lhs: &TermRef,
    t: &TermRef,
    config: &ReductionConfig,
    theory: &Theory,
) -> Result<Option<Substitution>, EngineError> {
    let engine = Engine::new(theory, config.eta);
    let mut fuel = Fuel::new(config.fuel);
    let mut binding = Substitution::new();
    let (matched, _) = engine.match_one(lhs, t, &mut binding, &mut fuel)?;
    Ok(if matched { Some(binding) } else { None })
}

/// Convenience: one rule applied at the root, if it matches.
pub fn apply_rule_at_root(
    theory: &Theory,
    rule: &RewriteRule,
    t: &TermRef,
    config: &ReductionConfig,
) -> Result<Option<TermRef>, EngineError> {
    match match_pattern(&rule.lhs, t, config, theory)? {
        Some(binding) => Ok(Some(subst(&rule.rhs, &binding))),
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;
    use crate::theory::{Entry, RewriteRule, Theory};

    fn iota() -> TermRef {
        Term::con("iota")
    }

    fn times(a: TermRef, b: TermRef) -> TermRef {
        Term::apps(Term::con("times"), [a, b])
    }

    fn div(a: TermRef, b: TermRef) -> TermRef {
        Term::apps(Term::con("div"), [a, b])
    }

    fn one() -> TermRef {
        Term::con("one")
    }

    /// times with `x * 1 --> x` only.
    fn tiny_mul() -> Theory {
        let mut thy = Theory::new("tiny");
        thy.push(Entry::Decl { name: "iota".into(), classifier: Term::sort_type() }).unwrap();
        thy.push(Entry::Decl {
            name: "times".into(),
            classifier: Term::arrow(iota(), Term::arrow(iota(), iota())),
        })
        .unwrap();
        thy.push(Entry::Decl { name: "one".into(), classifier: iota() }).unwrap();
        thy.push(Entry::Rule(RewriteRule::new(
            vec!["x".into()],
            times(Term::var("x"), one()),
            Term::var("x"),
        )))
        .unwrap();
        thy
    }

    /// div with `x / x --> 1`.
    fn tiny_div() -> Theory {
        let mut thy = Theory::new("tinydiv");
        thy.push(Entry::Decl { name: "iota".into(), classifier: Term::sort_type() }).unwrap();
        thy.push(Entry::Decl {
            name: "div".into(),
            classifier: Term::arrow(iota(), Term::arrow(iota(), iota())),
        })
        .unwrap();
        thy.push(Entry::Decl { name: "one".into(), classifier: iota() }).unwrap();
        thy.push(Entry::Rule(RewriteRule::new(
            vec!["x".into()],
            div(Term::var("x"), Term::var("x")),
            one(),
        )))
        .unwrap();
        thy
    }

    #[test]
    fn whnf_beta_then_rule() {
        // (lam x : iota. x * 1) c  -->  c
        let thy = tiny_mul();
        let t = Term::app(
            Term::lam("x", Some(iota()), times(Term::bound(0), one())),
            Term::con("c"),
        );
        let cfg = ReductionConfig::default();
        assert_eq!(whnf(&thy, &t, &cfg).unwrap(), Term::con("c"));
    }

    #[test]
    fn whnf_of_rigid_constant_is_identity() {
        let thy = tiny_mul();
        let t = Term::con("one");
        assert_eq!(whnf(&thy, &t, &ReductionConfig::default()).unwrap(), t);
    }

    #[test]
    fn match_constant_mismatch() {
        // pattern x * 1 against c * c: no match
        let thy = tiny_mul();
        let pat = times(Term::var("x"), one());
        let subj = times(Term::con("c"), Term::con("c"));
        assert!(match_pattern(&pat, &subj, &ReductionConfig::default(), &thy)
            .unwrap()
            .is_none());
    }

    #[test]
    fn match_nonlinear_up_to_conversion() {
        // x / x against (1/1) / 1: bindings 1/1 and 1 are convertible
        let thy = tiny_div();
        let pat = div(Term::var("x"), Term::var("x"));
        let subj = div(div(one(), one()), one());
        let binding = match_pattern(&pat, &subj, &ReductionConfig::default(), &thy)
            .unwrap()
            .expect("should match");
        // first occurrence kept
        assert_eq!(binding.lookup("x").unwrap(), &div(one(), one()));
        // and the whole subject reduces to 1
        assert_eq!(
            whnf(&thy, &subj, &ReductionConfig::default()).unwrap(),
            one()
        );
    }

    #[test]
    fn normalize_idempotent_on_normal_forms() {
        let thy = tiny_mul();
        let cfg = ReductionConfig::default();
        let t = times(Term::var("x"), Term::var("y"));
        let n = normalize(&thy, &t, &cfg).unwrap();
        assert_eq!(normalize(&thy, &n, &cfg).unwrap(), n);
    }

    #[test]
    fn convertible_reflexive() {
        let thy = tiny_mul();
        let t = times(Term::var("x"), Term::var("y"));
        assert!(convertible(&thy, &t, &t, &ReductionConfig::default()).unwrap());
    }

    #[test]
    fn eta_conversion_toggle() {
        let thy = tiny_mul();
        // lam x y. times x y  vs  times
        let t = Term::lam(
            "x",
            Some(iota()),
            Term::lam("y", Some(iota()), times(Term::bound(1), Term::bound(0))),
        );
        let u = Term::con("times");
        assert!(!convertible(&thy, &t, &u, &ReductionConfig::with_eta(false)).unwrap());
        assert!(convertible(&thy, &t, &u, &ReductionConfig::with_eta(true)).unwrap());
    }

    #[test]
    fn fuel_exhaustion_detected() {
        // loop : iota with rule loop --> loop (via a unary wrapper to keep
        // the lhs algebraic and non-variable)
        let mut thy = Theory::new("loop");
        thy.push(Entry::Decl { name: "iota".into(), classifier: Term::sort_type() }).unwrap();
        thy.push(Entry::Decl {
            name: "f".into(),
            classifier: Term::arrow(iota(), iota()),
        })
        .unwrap();
        thy.push(Entry::Rule(RewriteRule::new(
            vec!["x".into()],
            Term::app(Term::con("f"), Term::var("x")),
            Term::app(Term::con("f"), Term::var("x")),
        )))
        .unwrap();
        let t = Term::app(Term::con("f"), Term::con("one"));
        let cfg = ReductionConfig { eta: false, fuel: 1000 };
        assert!(matches!(
            whnf(&thy, &t, &cfg),
            Err(EngineError::FuelExhausted(_))
        ));
    }
}
