//! Bidirectional type checking for theories, contexts and terms, plus
//! rewrite-rule well-formedness.
//!
//! Conversion is folded into every checking position: an inferred
//! classifier counts as the expected one whenever the two are convertible
//! in the ambient theory.

use std::cell::Cell;
use std::collections::HashMap;

use thiserror::Error;

use crate::diag::Diagnostic;
use crate::pretty::{print_rule, print_term};
use crate::reduce::{convertible, whnf, EngineError, ReductionConfig};
use crate::term::{
    instantiate, open_with, subst, Context, Name, Substitution, Term, TermRef,
};
use crate::theory::{Delinearization, Entry, RewriteRule, Theory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypeError {
    #[error("unbound constant {0}")]
    UnboundConstant(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("{head} is applied to an argument but has classifier {classifier}, not a product")]
    NotAProduct { head: String, classifier: String },
    #[error("binder domain {domain} has classifier {classifier}, not Type")]
    DomainNotAType { domain: String, classifier: String },
    #[error("classifier mismatch: expected {expected}, got {actual}")]
    Mismatch { expected: String, actual: String },
    #[error("cannot infer a classifier for an abstraction without a domain annotation")]
    CannotInfer,
    #[error("Kind has no classifier")]
    KindUnclassified,
    #[error("dangling bound variable (index {0})")]
    DanglingIndex(u32),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A type checker over a fixed theory and reduction configuration.
pub struct Checker<'a> {
    pub theory: &'a Theory,
    pub config: ReductionConfig,
    supply: Cell<u64>,
}

impl<'a> Checker<'a> {
    pub fn new(theory: &'a Theory, config: &ReductionConfig) -> Self {
        Checker { theory, config: *config, supply: Cell::new(0) }
    }

    /// Fresh names live in a namespace the surface syntax cannot produce.
    fn fresh(&self, hint: &str) -> Name {
        let n = self.supply.get();
        self.supply.set(n + 1);
        let base = if hint.is_empty() { "x" } else { hint };
        format!("{base}#{n}")
    }

    fn conv(&self, a: &TermRef, b: &TermRef) -> Result<bool, TypeError> {
        Ok(convertible(self.theory, a, b, &self.config)?)
    }

    fn whnf(&self, t: &TermRef) -> Result<TermRef, TypeError> {
        Ok(whnf(self.theory, t, &self.config)?)
    }

    fn show(&self, t: &TermRef) -> String {
        // head-reduce for readability; show the original on fuel trouble
        match self.whnf(t) {
            Ok(w) => print_term(&w),
            Err(_) => print_term(t),
        }
    }

    fn mismatch(&self, expected: &TermRef, actual: &TermRef) -> TypeError {
        TypeError::Mismatch { expected: self.show(expected), actual: self.show(actual) }
    }

    /// Infers the classifier of `t` in `ctx`: the type of an object, the
    /// kind of a type family, or Kind for a kind.
    pub fn infer(&self, ctx: &Context, t: &TermRef) -> Result<TermRef, TypeError> {
        match &**t {
            Term::Type => Ok(Term::sort_kind()),
            Term::Kind => Err(TypeError::KindUnclassified),
            Term::Const(c) => self
                .theory
                .classifier_of(c)
                .cloned()
                .ok_or_else(|| TypeError::UnboundConstant(c.clone())),
            Term::Var(x) => ctx
                .lookup(x)
                .cloned()
                .ok_or_else(|| TypeError::UnboundVariable(x.clone())),
            Term::Bound(i) => Err(TypeError::DanglingIndex(*i)),
            Term::App { head, arg } => {
                // a redex with an unannotated abstraction at its head is
                // classified by its contraction; the argument is inferred
                // where possible (it may itself be an unannotated
                // abstraction, consumed by the substitution)
                let (spine_head, args) = t.spine();
                if let Term::Lam { domain: None, body, .. } = &*spine_head {
                    match self.infer(ctx, &args[0]) {
                        Ok(_) | Err(TypeError::CannotInfer) => {}
                        Err(e) => return Err(e),
                    }
                    let contracted = Term::apps(
                        instantiate(body, &args[0]),
                        args[1..].iter().cloned(),
                    );
                    return self.infer(ctx, &contracted);
                }
                let head_ty = self.infer(ctx, head)?;
                let head_ty = self.whnf(&head_ty)?;
                match &*head_ty {
                    Term::Pi { domain, codomain, .. } => {
                        self.check(ctx, arg, domain)?;
                        Ok(instantiate(codomain, arg))
                    }
                    _ => Err(TypeError::NotAProduct {
                        head: print_term(head),
                        classifier: print_term(&head_ty),
                    }),
                }
            }
            Term::Lam { hint, domain, body } => {
                let domain = domain.as_ref().ok_or(TypeError::CannotInfer)?;
                self.check_is_type(ctx, domain)?;
                let x = self.fresh(hint);
                let inner = ctx.extended(x.clone(), domain.clone());
                let body_ty = self.infer(&inner, &open_with(body, &x))?;
                // the codomain must itself be well-classified
                let body_ty_sort = self.infer(&inner, &body_ty)?;
                let body_ty_sort = self.whnf(&body_ty_sort)?;
                if !matches!(&*body_ty_sort, Term::Type | Term::Kind) {
                    return Err(self.mismatch(&Term::sort_type(), &body_ty_sort));
                }
                Ok(Term::pi(
                    hint.clone(),
                    domain.clone(),
                    crate::term::close_over(&body_ty, &x),
                ))
            }
            Term::Pi { hint, domain, codomain } => {
                self.check_is_type(ctx, domain)?;
                let x = self.fresh(hint);
                let inner = ctx.extended(x.clone(), domain.clone());
                let sort = self.infer(&inner, &open_with(codomain, &x))?;
                let sort = self.whnf(&sort)?;
                match &*sort {
                    Term::Type | Term::Kind => Ok(sort),
                    _ => Err(self.mismatch(&Term::sort_type(), &sort)),
                }
            }
        }
    }

    /// Checks `t` against an expected classifier. Abstractions are pushed
    /// into the expected product so that unannotated binders check.
    pub fn check(&self, ctx: &Context, t: &TermRef, expected: &TermRef) -> Result<(), TypeError> {
        if let Term::Lam { hint, domain, body } = &**t {
            let w = self.whnf(expected)?;
            if let Term::Pi { domain: exp_dom, codomain, .. } = &*w {
                if let Some(d) = domain {
                    self.check_is_type(ctx, d)?;
                    if !self.conv(d, exp_dom)? {
                        return Err(self.mismatch(exp_dom, d));
                    }
                }
                let x = self.fresh(hint);
                let inner = ctx.extended(x.clone(), exp_dom.clone());
                return self.check(&inner, &open_with(body, &x), &open_with(codomain, &x));
            }
            if domain.is_none() {
                return Err(self.mismatch(expected, t));
            }
        }
        let actual = self.infer(ctx, t)?;
        if self.conv(&actual, expected)? {
            Ok(())
        } else {
            Err(self.mismatch(expected, &actual))
        }
    }

    fn check_is_type(&self, ctx: &Context, t: &TermRef) -> Result<(), TypeError> {
        let sort = self.infer(ctx, t)?;
        let sort = self.whnf(&sort)?;
        if matches!(&*sort, Term::Type) {
            Ok(())
        } else {
            Err(TypeError::DomainNotAType {
                domain: print_term(t),
                classifier: print_term(&sort),
            })
        }
    }

    /// Infers a typing context for the pattern variables of an algebraic
    /// left-hand side, walking it left to right, outside in. A variable's
    /// type comes from its first occurrence; occurrences whose expected
    /// type is not convertible with an earlier one, and nested patterns
    /// whose classifier does not fit their slot, are recorded as conflicts
    /// for the linearization fallback.
    fn infer_pattern_ctx(
        &self,
        lhs: &TermRef,
        ctx: &mut Context,
        conflicts: &mut Vec<(TermRef, TermRef)>,
    ) -> Result<TermRef, TypeError> {
        let (head, args) = lhs.spine();
        let c = match &*head {
            Term::Const(c) => c.clone(),
            _ => return Err(TypeError::CannotInfer),
        };
        let mut ty = self
            .theory
            .classifier_of(&c)
            .cloned()
            .ok_or(TypeError::UnboundConstant(c.clone()))?;
        for arg in &args {
            let w = self.whnf(&ty)?;
            let (domain, codomain) = match &*w {
                Term::Pi { domain, codomain, .. } => (domain.clone(), codomain.clone()),
                _ => {
                    return Err(TypeError::NotAProduct {
                        head: c.clone(),
                        classifier: print_term(&w),
                    })
                }
            };
            match &**arg {
                Term::Var(x) => match ctx.lookup(x).cloned() {
                    Some(prev) => {
                        if !self.conv(&prev, &domain)? {
                            conflicts.push((domain.clone(), prev));
                        }
                    }
                    None => ctx.push(x.clone(), domain.clone()),
                },
                _ => {
                    let actual = self.infer_pattern_ctx(arg, ctx, conflicts)?;
                    if !self.conv(&actual, &domain)? {
                        conflicts.push((domain.clone(), actual));
                    }
                }
            }
            ty = instantiate(&codomain, arg);
        }
        Ok(ty)
    }

    /// Merges the pattern variables a linearized rule renamed apart:
    /// unifies each conflicting pair of classifiers treating pattern
    /// variables as flexible, and returns the merging substitution.
    fn delinearize(
        &self,
        pattern_vars: &[Name],
        conflicts: &[(TermRef, TermRef)],
    ) -> Result<Substitution, TypeError> {
        let mut merged: HashMap<Name, TermRef> = HashMap::new();
        let rank = |n: &str| pattern_vars.iter().position(|v| v == n);

        fn apply(t: &TermRef, merged: &HashMap<Name, TermRef>) -> TermRef {
            let sub: Substitution = merged
                .iter()
                .map(|(n, t)| (n.clone(), t.clone()))
                .collect();
            subst(t, &sub)
        }

        fn unify(
            checker: &Checker<'_>,
            a: &TermRef,
            b: &TermRef,
            merged: &mut HashMap<Name, TermRef>,
            rank: &dyn Fn(&str) -> Option<usize>,
        ) -> Result<(), TypeError> {
            let a = apply(a, merged);
            let b = apply(b, merged);
            if a == b {
                return Ok(());
            }
            match (&*a, &*b) {
                (Term::Var(x), Term::Var(y)) if rank(x).is_some() && rank(y).is_some() => {
                    // keep the variable listed first
                    let (from, to) = if rank(x) <= rank(y) { (y, x) } else { (x, y) };
                    merged.insert(from.clone(), Term::var(to.clone()));
                    Ok(())
                }
                (Term::Var(x), _) if rank(x).is_some() => {
                    if b.contains_var(x) {
                        return Err(checker.mismatch(&a, &b));
                    }
                    merged.insert(x.clone(), b.clone());
                    Ok(())
                }
                (_, Term::Var(y)) if rank(y).is_some() => {
                    if a.contains_var(y) {
                        return Err(checker.mismatch(&b, &a));
                    }
                    merged.insert(y.clone(), a.clone());
                    Ok(())
                }
                _ => {
                    let wa = checker.whnf(&a)?;
                    let wb = checker.whnf(&b)?;
                    if wa == wb {
                        return Ok(());
                    }
                    let (ha, argsa) = wa.spine();
                    let (hb, argsb) = wb.spine();
                    if ha == hb && argsa.len() == argsb.len() && !argsa.is_empty() {
                        for (x, y) in argsa.iter().zip(&argsb) {
                            unify(checker, x, y, merged, rank)?;
                        }
                        return Ok(());
                    }
                    match (&*wa, &*wb) {
                        (
                            Term::Pi { domain: d1, codomain: c1, .. },
                            Term::Pi { domain: d2, codomain: c2, .. },
                        ) => {
                            unify(checker, d1, d2, merged, rank)?;
                            unify(checker, c1, c2, merged, rank)
                        }
                        _ => Err(checker.mismatch(&a, &b)),
                    }
                }
            }
        }

        for (a, b) in conflicts {
            unify(self, a, b, &mut merged, &rank)?;
        }
        // resolve chains: x -> y -> z
        loop {
            let snapshot: Substitution = merged
                .iter()
                .map(|(n, t)| (n.clone(), t.clone()))
                .collect();
            let mut changed = false;
            for (_, t) in merged.iter_mut() {
                let nt = subst(t, &snapshot);
                if nt != *t {
                    *t = nt;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(merged.into_iter().collect())
    }

    /// Full rewrite-rule well-formedness: shape conditions are hard errors;
    /// typability is established by inferring a pattern context and
    /// comparing the classifiers of the two sides, falling back to the
    /// de-linearized variant when only variable re-identification is in the
    /// way. Returns the elaborated rule unless a hard error occurred.
    pub fn check_rule(&self, rule: &RewriteRule) -> (Option<RewriteRule>, Vec<Diagnostic>) {
        let mut diags = Vec::new();
        let label = print_rule(rule);
        if let Err(e) = rule.syntactic_check() {
            diags.push(Diagnostic::error("rule.shape", format!("in {label}: {e}")));
            return (None, diags);
        }
        if rule.unchecked {
            diags.push(Diagnostic::warning(
                "rule.unchecked",
                format!("rule marked unchecked, typing skipped: {label}"),
            ));
            return (Some(rule.clone()), diags);
        }

        let mut ctx = Context::new();
        let mut conflicts = Vec::new();
        let lhs_ty = match self.infer_pattern_ctx(&rule.lhs, &mut ctx, &mut conflicts) {
            Ok(t) => t,
            Err(e) => {
                diags.push(Diagnostic::error("rule.typing", format!("in {label}: {e}")));
                return (None, diags);
            }
        };
        // every slot type must be a well-formed classifier over its prefix
        if let Err(e) = self.check_pattern_ctx(&ctx) {
            diags.push(Diagnostic::error("rule.typing", format!("in {label}: {e}")));
            return (None, diags);
        }

        if conflicts.is_empty() {
            match self.check_rule_sides(&ctx, &lhs_ty, &rule.rhs) {
                Ok(()) => {
                    let mut out = rule.clone();
                    out.ctx = ctx;
                    (Some(out), diags)
                }
                Err(e) => {
                    diags.push(Diagnostic::error("rule.typing", format!("in {label}: {e}")));
                    (None, diags)
                }
            }
        } else {
            // linearization fallback: re-identify the renamed variables and
            // require the merged rule to typecheck
            let merging = match self.delinearize(&rule.pattern_vars, &conflicts) {
                Ok(s) => s,
                Err(e) => {
                    diags.push(Diagnostic::error(
                        "rule.typing",
                        format!("in {label}: conflicting pattern variable types: {e}"),
                    ));
                    return (None, diags);
                }
            };
            let dl_lhs = subst(&rule.lhs, &merging);
            let dl_rhs = subst(&rule.rhs, &merging);
            let mut dl_ctx = Context::new();
            let mut dl_conflicts = Vec::new();
            let verdict = self
                .infer_pattern_ctx(&dl_lhs, &mut dl_ctx, &mut dl_conflicts)
                .and_then(|dl_ty| {
                    if !dl_conflicts.is_empty() {
                        return Err(TypeError::Mismatch {
                            expected: self.show(&dl_conflicts[0].0),
                            actual: self.show(&dl_conflicts[0].1),
                        });
                    }
                    self.check_pattern_ctx(&dl_ctx)?;
                    self.check_rule_sides(&dl_ctx, &dl_ty, &dl_rhs)
                });
            match verdict {
                Ok(()) => {
                    diags.push(Diagnostic::warning(
                        "rule.linearized",
                        format!(
                            "left-linearized rule accepted: the variant {} --> {} typechecks",
                            print_term(&dl_lhs),
                            print_term(&dl_rhs)
                        ),
                    ));
                    let mut out = rule.clone();
                    out.ctx = ctx;
                    out.delin = Some(Box::new(Delinearization {
                        lhs: dl_lhs,
                        rhs: dl_rhs,
                        ctx: dl_ctx,
                    }));
                    (Some(out), diags)
                }
                Err(e) => {
                    diags.push(Diagnostic::error(
                        "rule.typing",
                        format!("in {label}: de-linearized variant fails to typecheck: {e}"),
                    ));
                    (None, diags)
                }
            }
        }
    }

    fn check_pattern_ctx(&self, ctx: &Context) -> Result<(), TypeError> {
        let mut prefix = Context::new();
        for (x, ty) in ctx.iter() {
            self.check_is_type(&prefix, ty)?;
            prefix.push(x.clone(), ty.clone());
        }
        Ok(())
    }

    fn check_rule_sides(
        &self,
        ctx: &Context,
        lhs_ty: &TermRef,
        rhs: &TermRef,
    ) -> Result<(), TypeError> {
        let rhs_ty = self.infer(ctx, rhs)?;
        if self.conv(lhs_ty, &rhs_ty)? {
            Ok(())
        } else {
            Err(self.mismatch(lhs_ty, &rhs_ty))
        }
    }
}

/// Checks a theory entry by entry against its own prefix, as declared.
/// Returns the elaborated theory (rewrite rules carry their inferred
/// pattern contexts) along with all diagnostics; entries that fail are
/// dropped from the result.
pub fn check_theory(theory: &Theory, config: &ReductionConfig) -> (Theory, Vec<Diagnostic>) {
    let (t, indexed) = check_theory_indexed(theory, config);
    (t, indexed.into_iter().map(|(_, d)| d).collect())
}

/// Like [`check_theory`], tagging each diagnostic with the index of the
/// offending entry so callers can attach source locations.
pub fn check_theory_indexed(
    theory: &Theory,
    config: &ReductionConfig,
) -> (Theory, Vec<(usize, Diagnostic)>) {
    let mut checked = Theory::new(theory.name.clone());
    let mut diags: Vec<(usize, Diagnostic)> = Vec::new();
    for (i, entry) in theory.entries().iter().enumerate() {
        let checker = Checker::new(&checked, config);
        match entry {
            Entry::Decl { name, classifier } => {
                match classifier_sort(&checker, classifier) {
                    Ok(()) => {}
                    Err(e) => {
                        diags.push((
                            i,
                            Diagnostic::error("decl.classifier", format!("in {name}: {e}")),
                        ));
                        continue;
                    }
                }
                let entry = entry.clone();
                drop(checker);
                if let Err(e) = checked.push(entry) {
                    diags.push((i, Diagnostic::error("decl.duplicate", e.to_string())));
                }
            }
            Entry::Def { name, classifier, body, opaque } => {
                let verdict = classifier_sort(&checker, classifier)
                    .and_then(|()| checker.check(&Context::new(), body, classifier));
                match verdict {
                    Ok(()) => {}
                    Err(e) => {
                        diags.push((
                            i,
                            Diagnostic::error("def.body", format!("in {name}: {e}")),
                        ));
                        continue;
                    }
                }
                let entry = Entry::Def {
                    name: name.clone(),
                    classifier: classifier.clone(),
                    body: body.clone(),
                    opaque: *opaque,
                };
                drop(checker);
                if let Err(e) = checked.push(entry) {
                    diags.push((i, Diagnostic::error("decl.duplicate", e.to_string())));
                }
            }
            Entry::Rule(rule) => {
                let (elaborated, ds) = checker.check_rule(rule);
                diags.extend(ds.into_iter().map(|d| (i, d)));
                drop(checker);
                if let Some(r) = elaborated {
                    checked
                        .push(Entry::Rule(r))
                        .expect("rules are unnamed, no duplicates possible");
                }
            }
        }
    }
    (checked, diags)
}

/// A declaration classifier must be a type (object constants) or a kind
/// (type constants).
fn classifier_sort(checker: &Checker<'_>, classifier: &TermRef) -> Result<(), TypeError> {
    let sort = checker.infer(&Context::new(), classifier)?;
    let sort = checker.whnf(&sort)?;
    match &*sort {
        Term::Type | Term::Kind => Ok(()),
        _ => Err(TypeError::Mismatch {
            expected: "Type or Kind".to_string(),
            actual: print_term(&sort),
        }),
    }
}

impl Term {
    fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(x) => x == name,
            Term::Lam { domain, body, .. } => {
                domain.as_deref().is_some_and(|d| d.contains_var(name))
                    || body.contains_var(name)
            }
            Term::Pi { domain, codomain, .. } => {
                domain.contains_var(name) || codomain.contains_var(name)
            }
            Term::App { head, arg } => head.contains_var(name) || arg.contains_var(name),
            _ => false,
        }
    }
}
