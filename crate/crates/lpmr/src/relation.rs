//! N-ary logical relations over families of parallel theory morphisms: the
//! predicate translation for objects and types, the relativized kind
//! translation, context duplication, and the well-formedness conditions.

use std::cell::Cell;
use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::morphism::{ConditionResult, Morphism, MorphismError, MorphismReport};
use crate::pretty::print_rule;
use crate::reduce::{convertible, whnf, EngineError, ReductionConfig};
use crate::term::{close_over, open_with, rename_free_vars, Context, Name, Substitution, Term, TermRef};
use crate::theory::Theory;
use crate::typing::{Checker, TypeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelationError {
    #[error("a logical relation needs at least one morphism")]
    Empty,
    #[error("the underlying morphisms do not share source and target")]
    MixedMorphisms,
    #[error("no assignment for source constant {0}")]
    MissingAssignment(String),
    #[error("assignment for {0} which is not a primitive constant of the source")]
    ExtraAssignment(String),
    #[error("assignment for {0} is not closed")]
    OpenAssignment(String),
    #[error("constant {0} is not in the source theory")]
    UnknownConstant(String),
    #[error("{0} is not a kind (expected Type or a product into a kind)")]
    NotAKind(String),
    #[error("the sorts Type and Kind have no term-level relation; use the kind translation")]
    SortAtTermLevel,
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

/// How one source variable fans out in a translated term: one copy per
/// morphism plus a witness that the copies are related. The generated
/// names use `#`, which no surface identifier can contain.
pub fn component_name(base: &str, i: usize) -> Name {
    format!("{base}#{i}")
}

pub fn witness_name(base: &str) -> Name {
    format!("{base}#*")
}

/// An n-ary logical relation over n parallel morphisms.
///
/// `irrelevant` names target type families whose inhabitants the rule
/// condition may identify; the target theory is expected to carry an
/// explicit irrelevance axiom for them.
#[derive(Debug, Clone)]
pub struct LogicalRelation {
    pub name: String,
    morphisms: Vec<Morphism>,
    assignment: HashMap<Name, TermRef>,
    def_images: HashMap<Name, TermRef>,
    pub irrelevant: Vec<Name>,
    supply: Cell<u64>,
}

impl LogicalRelation {
    pub fn new(
        name: impl Into<String>,
        morphisms: Vec<Morphism>,
        assignment: HashMap<Name, TermRef>,
        irrelevant: Vec<Name>,
    ) -> Result<Self, RelationError> {
        if morphisms.is_empty() {
            return Err(RelationError::Empty);
        }
        let source = morphisms[0].source().clone();
        let target = morphisms[0].target().clone();
        for m in &morphisms[1..] {
            if m.source().as_ref() != source.as_ref() || m.target().as_ref() != target.as_ref() {
                return Err(RelationError::MixedMorphisms);
            }
        }
        for (c, _) in source.primitives() {
            if !assignment.contains_key(c) {
                return Err(RelationError::MissingAssignment(c.clone()));
            }
        }
        for (c, t) in &assignment {
            if !source.is_primitive(c) {
                return Err(RelationError::ExtraAssignment(c.clone()));
            }
            if !t.is_closed() || !t.is_locally_closed() {
                return Err(RelationError::OpenAssignment(c.clone()));
            }
        }
        let mut lr = LogicalRelation {
            name: name.into(),
            morphisms,
            assignment,
            def_images: HashMap::new(),
            irrelevant,
            supply: Cell::new(0),
        };
        let defs: Vec<(Name, TermRef)> = lr
            .source()
            .definitions()
            .map(|(d, _, body, _)| (d.clone(), body.clone()))
            .collect();
        for (d, body) in defs {
            let image = lr.translate_term(&body)?;
            lr.def_images.insert(d, image);
        }
        Ok(lr)
    }

    pub fn arity(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn source(&self) -> &Arc<Theory> {
        self.morphisms[0].source()
    }

    pub fn target(&self) -> &Arc<Theory> {
        self.morphisms[0].target()
    }

    pub fn assignment(&self) -> &HashMap<Name, TermRef> {
        &self.assignment
    }

    fn fresh(&self, hint: &str) -> Name {
        let n = self.supply.get();
        self.supply.set(n + 1);
        let base = if hint.is_empty() { "x" } else { hint };
        format!("{base}#o{n}")
    }

    /// The i-th morphism image (1-based) with every free variable renamed
    /// to its i-th component.
    pub fn morphism_image(&self, i: usize, t: &TermRef) -> Result<TermRef, RelationError> {
        let img = self.morphisms[i - 1].apply(t)?;
        Ok(rename_free_vars(&img, &|x| component_name(x, i)))
    }

    fn all_images(&self, t: &TermRef) -> Result<Vec<TermRef>, RelationError> {
        (1..=self.arity()).map(|i| self.morphism_image(i, t)).collect()
    }

    fn component_vars(&self, base: &str) -> Vec<TermRef> {
        (1..=self.arity())
            .map(|i| Term::var(component_name(base, i)))
            .collect()
    }

    /// The predicate/witness translation of an object or type.
    ///
    /// Variables go to their witness copy; an application passes every
    /// morphism image of the argument before the argument's witness; a
    /// binder on `x` becomes binders on the components of `x` followed by
    /// one on its witness; a product becomes the predicate stating that
    /// functions map related arguments to related results.
    pub fn translate_term(&self, t: &TermRef) -> Result<TermRef, RelationError> {
        match &**t {
            Term::Var(x) => Ok(Term::var(witness_name(x))),
            Term::Const(c) => self
                .assignment
                .get(c)
                .or_else(|| self.def_images.get(c))
                .cloned()
                .ok_or_else(|| RelationError::UnknownConstant(c.clone())),
            Term::Type | Term::Kind => Err(RelationError::SortAtTermLevel),
            Term::Bound(_) => Err(RelationError::SortAtTermLevel),
            Term::App { head, arg } => {
                let mut out = self.translate_term(head)?;
                for img in self.all_images(arg)? {
                    out = Term::app(out, img);
                }
                Ok(Term::app(out, self.translate_term(arg)?))
            }
            Term::Lam { hint, domain, body } => {
                let x = self.fresh(hint);
                let inner = self.translate_term(&open_with(body, &x))?;
                let witness_dom = match domain {
                    Some(a) => Some(Term::apps(
                        self.translate_term(a)?,
                        self.component_vars(&x),
                    )),
                    None => None,
                };
                let mut out = Term::lam(
                    witness_hint(hint),
                    witness_dom,
                    close_over(&inner, &witness_name(&x)),
                );
                for i in (1..=self.arity()).rev() {
                    let dom = domain
                        .as_ref()
                        .map(|a| self.morphism_image(i, a))
                        .transpose()?;
                    out = Term::lam(
                        component_hint(hint, i),
                        dom,
                        close_over(&out, &component_name(&x, i)),
                    );
                }
                Ok(out)
            }
            Term::Pi { hint, domain, codomain } => {
                let x = self.fresh(hint);
                let f = self.fresh("f");
                let lr_cod = self.translate_term(&open_with(codomain, &x))?;
                // lr(B) (f_1 x_1) ... (f_n x_n)
                let mut out = lr_cod;
                for i in 1..=self.arity() {
                    out = Term::app(
                        out,
                        Term::app(
                            Term::var(component_name(&f, i)),
                            Term::var(component_name(&x, i)),
                        ),
                    );
                }
                // Pi x* : lr(A) x~ . ...
                let witness_dom =
                    Term::apps(self.translate_term(domain)?, self.component_vars(&x));
                out = Term::pi(
                    witness_hint(hint),
                    witness_dom,
                    close_over(&out, &witness_name(&x)),
                );
                // Pi x_n ... Pi x_1
                for i in (1..=self.arity()).rev() {
                    out = Term::pi(
                        component_hint(hint, i),
                        self.morphism_image(i, domain)?,
                        close_over(&out, &component_name(&x, i)),
                    );
                }
                // lam f_n ... lam f_1, each over an image of the product
                for i in (1..=self.arity()).rev() {
                    out = Term::lam(
                        component_hint("f", i),
                        Some(self.morphism_image(i, t)?),
                        close_over(&out, &component_name(&f, i)),
                    );
                }
                Ok(out)
            }
        }
    }

    /// The kind translation, relativized by a type family `family` of the
    /// source with the given kind: products thread `family x` inward and
    /// the base case produces a predicate kind over the images of the
    /// family.
    pub fn translate_kind(
        &self,
        family: &TermRef,
        kind: &TermRef,
    ) -> Result<TermRef, RelationError> {
        match &**kind {
            Term::Type => {
                let mut out = Term::sort_type();
                for i in (1..=self.arity()).rev() {
                    out = Term::arrow(self.morphism_image(i, family)?, out);
                }
                Ok(out)
            }
            Term::Pi { hint, domain, codomain } => {
                let x = self.fresh(hint);
                let inner_family = Term::app(family.clone(), Term::var(&x[..]));
                let mut out =
                    self.translate_kind(&inner_family, &open_with(codomain, &x))?;
                let witness_dom =
                    Term::apps(self.translate_term(domain)?, self.component_vars(&x));
                out = Term::pi(
                    witness_hint(hint),
                    witness_dom,
                    close_over(&out, &witness_name(&x)),
                );
                for i in (1..=self.arity()).rev() {
                    out = Term::pi(
                        component_hint(hint, i),
                        self.morphism_image(i, domain)?,
                        close_over(&out, &component_name(&x, i)),
                    );
                }
                Ok(out)
            }
            _ => Err(RelationError::NotAKind(crate::pretty::print_term(kind))),
        }
    }

    /// Context duplication: each binding fans out into one binding per
    /// morphism plus the witness binding, so the result has (n+1) times as
    /// many entries.
    pub fn translate_context(&self, ctx: &Context) -> Result<Context, RelationError> {
        let mut out = Context::new();
        for (x, a) in ctx.iter() {
            for i in 1..=self.arity() {
                out.push(component_name(x, i), self.morphism_image(i, a)?);
            }
            out.push(
                witness_name(x),
                Term::apps(self.translate_term(a)?, self.component_vars(x)),
            );
        }
        Ok(out)
    }

    /// Substitution duplication, mirroring context duplication.
    pub fn translate_subst(&self, theta: &Substitution) -> Result<Substitution, RelationError> {
        let mut out = Substitution::new();
        for (x, t) in theta.iter() {
            for i in 1..=self.arity() {
                out.insert(component_name(x, i), self.morphism_image(i, t)?);
            }
            out.insert(witness_name(x), self.translate_term(t)?);
        }
        Ok(out)
    }
}

fn component_hint(base: &str, i: usize) -> Name {
    let base = if base.is_empty() { "x" } else { base };
    format!("{base}{i}")
}

fn witness_hint(base: &str) -> Name {
    let base = if base.is_empty() { "x" } else { base };
    format!("{base}_r")
}

fn engine_result(e: EngineError) -> ConditionResult {
    match e {
        EngineError::FuelExhausted(_) => ConditionResult::FuelExhausted,
    }
}

/// Checks the relation's three conditions: every object constant's witness
/// checks against the translated classifier applied to its images, every
/// type constant's against the relativized kind translation, and every
/// rule's sides translate to convertible terms. When plain convertibility
/// fails but both sides are proofs of convertible classifiers in a family
/// the relation declares irrelevant, the condition is reported as holding
/// modulo irrelevance.
pub fn check_relation(lr: &LogicalRelation, config: &ReductionConfig) -> MorphismReport {
    let target = lr.target().clone();
    let source = lr.source().clone();
    let target_checker = Checker::new(&target, config);
    let source_checker = Checker::new(&source, config);

    let mut constants = Vec::new();
    for (c, classifier) in source.primitives() {
        let witness = lr.assignment()[c].clone();
        let result = (|| -> Result<ConditionResult, ConditionResult> {
            let sort = source_checker
                .infer(&Context::new(), classifier)
                .map_err(|e| ConditionResult::Failed(e.to_string()))?;
            let sort = whnf(&source, &sort, config).map_err(engine_result)?;
            let expected = match &*sort {
                Term::Type => {
                    // condition 1: lr_c : lr(A) mu_1(c) ... mu_n(c)
                    let pred = lr
                        .translate_term(classifier)
                        .map_err(|e| ConditionResult::Failed(e.to_string()))?;
                    let images = lr
                        .all_images(&Term::con(c.clone()))
                        .map_err(|e| ConditionResult::Failed(e.to_string()))?;
                    Term::apps(pred, images)
                }
                Term::Kind => {
                    // condition 2: lr_a : lr^a(K)
                    lr.translate_kind(&Term::con(c.clone()), classifier)
                        .map_err(|e| ConditionResult::Failed(e.to_string()))?
                }
                _ => {
                    return Err(ConditionResult::Failed(format!(
                        "classifier of {c} is neither a type nor a kind"
                    )))
                }
            };
            match target_checker.check(&Context::new(), &witness, &expected) {
                Ok(()) => Ok(ConditionResult::Ok),
                Err(TypeError::Engine(e)) => Err(engine_result(e)),
                Err(e @ TypeError::Mismatch { .. }) => {
                    Err(ConditionResult::ClassifierMismatch { detail: e.to_string() })
                }
                Err(e) => Err(ConditionResult::Failed(e.to_string())),
            }
        })()
        .unwrap_or_else(|e| e);
        constants.push((c.clone(), result));
    }

    let mut rules = Vec::new();
    for rule in source.rules() {
        let (lhs, rhs, ctx) = rule.condition_sides();
        let result = (|| -> ConditionResult {
            let (l, r) = match (lr.translate_term(lhs), lr.translate_term(rhs)) {
                (Ok(l), Ok(r)) => (l, r),
                (Err(e), _) | (_, Err(e)) => return ConditionResult::Failed(e.to_string()),
            };
            match convertible(&target, &l, &r, config) {
                Ok(true) => return ConditionResult::Ok,
                Ok(false) => {}
                Err(e) => return engine_result(e),
            }
            // irrelevance fallback: proofs of convertible classifiers in a
            // declared-irrelevant family are identified
            let lr_ctx = match lr.translate_context(ctx) {
                Ok(c) => c,
                Err(e) => return ConditionResult::Failed(e.to_string()),
            };
            let tl = target_checker.infer(&lr_ctx, &l);
            let tr = target_checker.infer(&lr_ctx, &r);
            match (tl, tr) {
                (Ok(tl), Ok(tr)) => {
                    let types_ok = matches!(convertible(&target, &tl, &tr, config), Ok(true));
                    if types_ok {
                        if let Ok(w) = whnf(&target, &tl, config) {
                            if let Some(fam) = w.head_const() {
                                if lr.irrelevant.iter().any(|f| f == fam) {
                                    return ConditionResult::OkModuloIrrelevance {
                                        family: fam.clone(),
                                    };
                                }
                            }
                        }
                    }
                    ConditionResult::NotConvertible {
                        lhs: crate::pretty::print_term(&l),
                        rhs: crate::pretty::print_term(&r),
                    }
                }
                _ => ConditionResult::NotConvertible {
                    lhs: crate::pretty::print_term(&l),
                    rhs: crate::pretty::print_term(&r),
                },
            }
        })();
        rules.push((print_rule(rule), result));
    }

    MorphismReport { name: lr.name.clone(), constants, rules }
}
