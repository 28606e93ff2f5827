//! Theory morphisms: homomorphic constant-to-term translations between
//! theories, their three well-formedness conditions, composition, and
//! executable theorem transport.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::diag::Diagnostic;
use crate::pretty::{print_rule, print_term};
use crate::reduce::{convertible, normalize, whnf, EngineError, ReductionConfig};
use crate::term::{beta_simplify, Context, Name, Substitution, Term, TermRef};
use crate::theory::{Entry, Theory};
use crate::typing::{check_theory, Checker, TypeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorphismError {
    #[error("no assignment for source constant {0}")]
    MissingAssignment(String),
    #[error("assignment for {0} which is not a primitive constant of the source")]
    ExtraAssignment(String),
    #[error("assignment for {0} is not closed")]
    OpenAssignment(String),
    #[error("constant {0} is not in the source theory")]
    UnknownConstant(String),
    #[error("target of the first morphism differs from source of the second")]
    TheoryMismatch,
}

/// A translation determined by a term of the target theory for every
/// primitive constant of the source theory. Definitions are translated,
/// not assigned: a source definition maps to the target's own copy when
/// the target literally contains one, and to its translated body otherwise.
#[derive(Debug, Clone)]
pub struct Morphism {
    pub name: String,
    source: Arc<Theory>,
    target: Arc<Theory>,
    assignment: HashMap<Name, TermRef>,
    def_images: HashMap<Name, TermRef>,
}

impl Morphism {
    pub fn new(
        name: impl Into<String>,
        source: Arc<Theory>,
        target: Arc<Theory>,
        assignment: HashMap<Name, TermRef>,
    ) -> Result<Self, MorphismError> {
        for (c, _) in source.primitives() {
            if !assignment.contains_key(c) {
                return Err(MorphismError::MissingAssignment(c.clone()));
            }
        }
        for (c, t) in &assignment {
            if !source.is_primitive(c) {
                return Err(MorphismError::ExtraAssignment(c.clone()));
            }
            if !t.is_closed() || !t.is_locally_closed() {
                return Err(MorphismError::OpenAssignment(c.clone()));
            }
        }
        let mut m = Morphism {
            name: name.into(),
            source,
            target,
            assignment,
            def_images: HashMap::new(),
        };
        let defs: Vec<(Name, TermRef, TermRef)> = m
            .source
            .definitions()
            .map(|(d, ty, body, _)| (d.clone(), ty.clone(), body.clone()))
            .collect();
        for (d, ty, body) in defs {
            let image = match m.target.definition(&d) {
                Some((t_ty, t_body, _))
                    if *t_ty == m.apply(&ty)? && *t_body == m.apply(&body)? =>
                {
                    Term::con(d.clone())
                }
                _ => m.apply(&body)?,
            };
            m.def_images.insert(d, image);
        }
        Ok(m)
    }

    /// The identity morphism of a theory: every constant to itself.
    pub fn identity(theory: Arc<Theory>) -> Self {
        let assignment = theory
            .primitives()
            .map(|(c, _)| (c.clone(), Term::con(c.clone())))
            .collect();
        Morphism::new(
            format!("id_{}", theory.name),
            theory.clone(),
            theory,
            assignment,
        )
        .expect("identity assignment covers the primitives")
    }

    /// The inclusion of a theory into an extension of it: identity on
    /// constants, but with a wider target.
    pub fn inclusion(source: Arc<Theory>, target: Arc<Theory>) -> Self {
        let assignment = source
            .primitives()
            .map(|(c, _)| (c.clone(), Term::con(c.clone())))
            .collect();
        Morphism::new(
            format!("incl_{}_{}", source.name, target.name),
            source,
            target,
            assignment,
        )
        .expect("identity assignment covers the primitives")
    }

    pub fn source(&self) -> &Arc<Theory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Theory> {
        &self.target
    }

    pub fn assignment(&self) -> &HashMap<Name, TermRef> {
        &self.assignment
    }

    pub fn image_of(&self, constant: &str) -> Option<&TermRef> {
        self.assignment
            .get(constant)
            .or_else(|| self.def_images.get(constant))
    }

    /// The homomorphic image of a term: variables fixed, constants
    /// replaced, binders and applications mapped structurally.
    pub fn apply(&self, t: &TermRef) -> Result<TermRef, MorphismError> {
        match &**t {
            Term::Const(c) => self
                .image_of(c)
                .cloned()
                .ok_or_else(|| MorphismError::UnknownConstant(c.clone())),
            Term::Var(_) | Term::Bound(_) | Term::Type | Term::Kind => Ok(t.clone()),
            Term::Lam { hint, domain, body } => Ok(Term::lam(
                hint.clone(),
                domain.as_ref().map(|d| self.apply(d)).transpose()?,
                self.apply(body)?,
            )),
            Term::Pi { hint, domain, codomain } => Ok(Term::pi(
                hint.clone(),
                self.apply(domain)?,
                self.apply(codomain)?,
            )),
            Term::App { head, arg } => Ok(Term::app(self.apply(head)?, self.apply(arg)?)),
        }
    }

    /// Pointwise extension to contexts.
    pub fn apply_context(&self, ctx: &Context) -> Result<Context, MorphismError> {
        let mut out = Context::new();
        for (x, ty) in ctx.iter() {
            out.push(x.clone(), self.apply(ty)?);
        }
        Ok(out)
    }

    /// Pointwise extension to substitutions.
    pub fn apply_subst(&self, theta: &Substitution) -> Result<Substitution, MorphismError> {
        theta
            .iter()
            .map(|(x, t)| Ok((x.clone(), self.apply(t)?)))
            .collect()
    }

    /// Composition: translate this morphism's assignments through `other`.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism, MorphismError> {
        if self.target.as_ref() != other.source.as_ref() {
            return Err(MorphismError::TheoryMismatch);
        }
        // contract the administrative redexes the pointwise image leaves
        let assignment = self
            .assignment
            .iter()
            .map(|(c, t)| Ok((c.clone(), beta_simplify(&other.apply(t)?))))
            .collect::<Result<HashMap<_, _>, MorphismError>>()?;
        Morphism::new(
            format!("{};{}", self.name, other.name),
            self.source.clone(),
            other.target.clone(),
            assignment,
        )
    }
}

/// Outcome of one condition of a morphism or relation check.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionResult {
    Ok,
    /// The sides are proofs of convertible classifiers and the relation
    /// treats that proof family as irrelevant.
    OkModuloIrrelevance { family: Name },
    ClassifierMismatch { detail: String },
    NotConvertible { lhs: String, rhs: String },
    FuelExhausted,
    Failed(String),
}

impl ConditionResult {
    pub fn is_ok(&self) -> bool {
        matches!(
            self,
            ConditionResult::Ok | ConditionResult::OkModuloIrrelevance { .. }
        )
    }
}

impl fmt::Display for ConditionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionResult::Ok => write!(f, "ok"),
            ConditionResult::OkModuloIrrelevance { family } => {
                write!(f, "ok (proofs of {family} are irrelevant)")
            }
            ConditionResult::ClassifierMismatch { detail } => write!(f, "{detail}"),
            ConditionResult::NotConvertible { lhs, rhs } => {
                write!(f, "sides not convertible: {lhs} vs {rhs}")
            }
            ConditionResult::FuelExhausted => write!(f, "fuel exhausted"),
            ConditionResult::Failed(e) => write!(f, "{e}"),
        }
    }
}

/// Per-constant and per-rule condition results for one translation.
#[derive(Debug, Clone)]
pub struct MorphismReport {
    pub name: String,
    /// Conditions 1 and 2: one entry per source constant, in order.
    pub constants: Vec<(Name, ConditionResult)>,
    /// Condition 3: one entry per source rewrite rule, in order.
    pub rules: Vec<(String, ConditionResult)>,
}

impl MorphismReport {
    pub fn is_valid(&self) -> bool {
        self.constants.iter().all(|(_, r)| r.is_ok()) && self.rules.iter().all(|(_, r)| r.is_ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &ConditionResult)> {
        self.constants
            .iter()
            .map(|(n, r)| (n.as_str(), r))
            .chain(self.rules.iter().map(|(n, r)| (n.as_str(), r)))
            .filter(|(_, r)| !r.is_ok())
    }

    pub fn to_diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (name, result) in self.constants.iter() {
            if !result.is_ok() {
                out.push(Diagnostic::error(
                    "morphism.constant",
                    format!("{}: condition fails for {name}: {result}", self.name),
                ));
            }
        }
        for (rule, result) in self.rules.iter() {
            if !result.is_ok() {
                out.push(Diagnostic::error(
                    "morphism.rule",
                    format!("{}: rule condition fails for {rule}: {result}", self.name),
                ));
            }
        }
        out
    }
}

impl fmt::Display for MorphismReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {}",
            self.name,
            if self.is_valid() { "valid" } else { "INVALID" }
        )?;
        for (name, r) in &self.constants {
            writeln!(f, "  constant {name}: {r}")?;
        }
        for (rule, r) in &self.rules {
            writeln!(f, "  rule {rule}: {r}")?;
        }
        Ok(())
    }
}

fn engine_result(e: EngineError) -> ConditionResult {
    match e {
        EngineError::FuelExhausted(_) => ConditionResult::FuelExhausted,
    }
}

fn show_normal(theory: &Theory, t: &TermRef, config: &ReductionConfig) -> String {
    match normalize(theory, t, config) {
        Ok(n) => print_term(&n),
        Err(_) => print_term(t),
    }
}

/// Checks the three morphism conditions: each constant's image is typed by
/// the image of its classifier, and each rule's sides have convertible
/// images. Rule conditions are checked on the de-linearized variant when
/// the rule was left-linearized, with pattern variables read as fresh
/// rigid symbols of their inferred types.
pub fn check_morphism(m: &Morphism, config: &ReductionConfig) -> MorphismReport {
    let target = m.target();
    let checker = Checker::new(target, config);
    let mut constants = Vec::new();
    for (c, classifier) in m.source().primitives() {
        let image = m.assignment()[c].clone();
        let result = match m.apply(classifier) {
            Err(e) => ConditionResult::Failed(e.to_string()),
            Ok(expected) => match checker.check(&Context::new(), &image, &expected) {
                Ok(()) => ConditionResult::Ok,
                Err(TypeError::Engine(e)) => engine_result(e),
                Err(e @ TypeError::Mismatch { .. }) => {
                    ConditionResult::ClassifierMismatch { detail: e.to_string() }
                }
                Err(e) => ConditionResult::Failed(e.to_string()),
            },
        };
        constants.push((c.clone(), result));
    }
    let mut rules = Vec::new();
    for rule in m.source().rules() {
        let (lhs, rhs, _) = rule.condition_sides();
        let result = match (m.apply(lhs), m.apply(rhs)) {
            (Ok(l), Ok(r)) => match convertible(target, &l, &r, config) {
                Ok(true) => ConditionResult::Ok,
                Ok(false) => ConditionResult::NotConvertible {
                    lhs: show_normal(target, &l, config),
                    rhs: show_normal(target, &r, config),
                },
                Err(e) => engine_result(e),
            },
            (Err(e), _) | (_, Err(e)) => ConditionResult::Failed(e.to_string()),
        };
        rules.push((print_rule(rule), result));
    }
    MorphismReport { name: m.name.clone(), constants, rules }
}

/// Whether two parallel morphisms agree definitionally: the images of every
/// source primitive are convertible in the shared target.
pub fn morphisms_convertible(
    m1: &Morphism,
    m2: &Morphism,
    config: &ReductionConfig,
) -> Result<bool, EngineError> {
    if m1.source().as_ref() != m2.source().as_ref() || m1.target().as_ref() != m2.target().as_ref()
    {
        return Ok(false);
    }
    for (c, _) in m1.source().primitives() {
        if !convertible(m1.target(), &m1.assignment()[c], &m2.assignment()[c], config)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Error)]
pub enum TransportError {
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error("transported name {0} collides with a target constant")]
    Collision(String),
    #[error("transported definitions fail to recheck (translation bug): {0:?}")]
    Recheck(Vec<Diagnostic>),
}

/// Translates every definition of the source theory along the morphism,
/// appending `suffix` to its name, and rechecks the result over the
/// target: executable judgment preservation. Earlier transported
/// definitions are referenced by their new names in later ones.
pub fn transport_definitions(
    m: &Morphism,
    suffix: &str,
    config: &ReductionConfig,
) -> Result<Vec<Entry>, TransportError> {
    let mut renames: HashMap<Name, TermRef> = HashMap::new();
    let apply_renamed = |m: &Morphism,
                         renames: &HashMap<Name, TermRef>,
                         t: &TermRef|
     -> Result<TermRef, MorphismError> {
        // definitions seen so far go to their transported copies; the
        // morphism handles everything else
        fn go(
            m: &Morphism,
            renames: &HashMap<Name, TermRef>,
            t: &TermRef,
        ) -> Result<TermRef, MorphismError> {
            match &**t {
                Term::Const(c) => match renames.get(c) {
                    Some(r) => Ok(r.clone()),
                    None => m
                        .image_of(c)
                        .cloned()
                        .ok_or_else(|| MorphismError::UnknownConstant(c.clone())),
                },
                Term::Var(_) | Term::Bound(_) | Term::Type | Term::Kind => Ok(t.clone()),
                Term::Lam { hint, domain, body } => Ok(Term::lam(
                    hint.clone(),
                    domain.as_ref().map(|d| go(m, renames, d)).transpose()?,
                    go(m, renames, body)?,
                )),
                Term::Pi { hint, domain, codomain } => Ok(Term::pi(
                    hint.clone(),
                    go(m, renames, domain)?,
                    go(m, renames, codomain)?,
                )),
                Term::App { head, arg } => {
                    Ok(Term::app(go(m, renames, head)?, go(m, renames, arg)?))
                }
            }
        }
        go(m, renames, t)
    };

    let mut out = Vec::new();
    for (d, classifier, body, opaque) in m.source().definitions() {
        let new_name = format!("{d}{suffix}");
        if m.target().contains(&new_name) {
            return Err(TransportError::Collision(new_name));
        }
        let entry = Entry::Def {
            name: new_name.clone(),
            classifier: beta_simplify(&apply_renamed(m, &renames, classifier)?),
            body: beta_simplify(&apply_renamed(m, &renames, body)?),
            opaque,
        };
        renames.insert(d.clone(), Term::con(new_name));
        out.push(entry);
    }

    let extended = m
        .target()
        .extended(format!("{}_transport", m.target().name), out.clone())
        .map_err(|e| TransportError::Recheck(vec![Diagnostic::error("decl.duplicate", e.to_string())]))?;
    let (_, diags) = check_theory(&extended, config);
    let errors: Vec<Diagnostic> = diags.into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(TransportError::Recheck(errors));
    }
    Ok(out)
}

/// Head-normalizes the image of a term in the target, a convenience for
/// reports and demos.
pub fn image_whnf(
    m: &Morphism,
    t: &TermRef,
    config: &ReductionConfig,
) -> Result<TermRef, MorphismError> {
    let img = m.apply(t)?;
    whnf(m.target(), &img, config).map_err(|_| MorphismError::UnknownConstant(String::new()))
}
