//! Translation skeletons and the batch workflow around them: generating a
//! copy of a source theory over a target theory with parameter gaps,
//! reading a filled copy back into a morphism or relation, checking files,
//! and transporting theorem libraries.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::diag::{has_errors, Diagnostic};
use crate::loader::{load_path, LoadError, LoadedModule};
use crate::morphism::{transport_definitions, Morphism, MorphismError, TransportError};
use crate::parse::Pragma;
use crate::pretty::print_term;
use crate::reduce::{convertible, normalize, ReductionConfig};
use crate::relation::{component_name, witness_name, LogicalRelation, RelationError};
use crate::term::{beta_simplify, rename_free_vars, replace_consts, subst, Name, Substitution, Term, TermRef};
use crate::theory::{Entry, Theory};
use crate::typing::{Checker, TypeError};

pub const MORPHISM_SUFFIX: &str = "_mu";
pub const RELATION_SUFFIX: &str = "_lr";

/// The placeholder users replace when filling a skeleton.
pub const TODO_TOKEN: &str = "TODO";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    Morphism,
    /// With the given arity.
    Relation(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SkeletonEntry {
    /// `def name : classifier := TODO.` — a translation parameter.
    Parameter { name: Name, classifier: TermRef },
    /// A source definition copied over, with constants renamed.
    CopiedDef {
        name: Name,
        classifier: TermRef,
        body: TermRef,
        opaque: bool,
    },
    /// A pattern variable of a rule, frozen as a local constant so the
    /// rule condition can be stated on closed terms.
    FrozenDecl { name: Name, classifier: TermRef },
    /// `#ASSERT lhs == rhs.` — one rule condition.
    Assert { lhs: TermRef, rhs: TermRef },
}

/// A generated translation file: a copy of the source theory as an
/// extension of the target, with every primitive awaiting a parameter,
/// every definition pre-translated, and one assertion per rewrite rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonFile {
    pub requires: Vec<Name>,
    pub entries: Vec<SkeletonEntry>,
}

impl SkeletonFile {
    /// The same skeleton with every visible beta redex contracted; the
    /// relation translation otherwise leaves administrative redexes in
    /// classifiers.
    pub fn simplified(&self) -> SkeletonFile {
        let entries = self
            .entries
            .iter()
            .map(|e| match e {
                SkeletonEntry::Parameter { name, classifier } => SkeletonEntry::Parameter {
                    name: name.clone(),
                    classifier: beta_simplify(classifier),
                },
                SkeletonEntry::CopiedDef { name, classifier, body, opaque } => {
                    SkeletonEntry::CopiedDef {
                        name: name.clone(),
                        classifier: beta_simplify(classifier),
                        body: beta_simplify(body),
                        opaque: *opaque,
                    }
                }
                SkeletonEntry::FrozenDecl { name, classifier } => SkeletonEntry::FrozenDecl {
                    name: name.clone(),
                    classifier: beta_simplify(classifier),
                },
                SkeletonEntry::Assert { lhs, rhs } => SkeletonEntry::Assert {
                    lhs: beta_simplify(lhs),
                    rhs: beta_simplify(rhs),
                },
            })
            .collect();
        SkeletonFile { requires: self.requires.clone(), entries }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.requires {
            out.push_str(&format!("#REQUIRE {r}.\n"));
        }
        if !self.requires.is_empty() {
            out.push('\n');
        }
        for e in &self.simplified().entries {
            match e {
                SkeletonEntry::Parameter { name, classifier } => {
                    out.push_str(&format!(
                        "def {name} : {} := {TODO_TOKEN}.\n",
                        print_term(classifier)
                    ));
                }
                SkeletonEntry::CopiedDef { name, classifier, body, opaque } => {
                    let kw = if *opaque { "thm" } else { "def" };
                    out.push_str(&format!(
                        "{kw} {name} : {} := {}.\n",
                        print_term(classifier),
                        print_term(body)
                    ));
                }
                SkeletonEntry::FrozenDecl { name, classifier } => {
                    out.push_str(&format!("{name} : {}.\n", print_term(classifier)));
                }
                SkeletonEntry::Assert { lhs, rhs } => {
                    out.push_str(&format!(
                        "#ASSERT {} == {}.\n",
                        print_term(lhs),
                        print_term(rhs)
                    ));
                }
            }
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum SkeletonError {
    #[error("generated name {0} collides with an existing constant")]
    Collision(String),
    #[error("source constant {0} has no classifier sort (theory not checked?)")]
    Unclassified(String),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// A copy of the theory in which definitions are declarations, so a
/// rename-everything morphism can be built over it.
fn primitivized(thy: &Theory) -> Arc<Theory> {
    let entries = thy.entries().iter().map(|e| match e {
        Entry::Def { name, classifier, .. } => Entry::Decl {
            name: name.clone(),
            classifier: classifier.clone(),
        },
        other => other.clone(),
    });
    Arc::new(
        Theory::from_entries(thy.name.clone(), entries).expect("names unchanged"),
    )
}

/// A morphism renaming every constant of `source` by a suffix; its target
/// is nominal (the renamed constants exist only in the generated file).
fn suffix_morphism(source: &Arc<Theory>, target: &Arc<Theory>, suffix: &str) -> Morphism {
    let assignment = source
        .primitives()
        .map(|(c, _)| (c.clone(), Term::con(format!("{c}{suffix}"))))
        .collect();
    Morphism::new(
        format!("suffix{suffix}"),
        source.clone(),
        target.clone(),
        assignment,
    )
    .expect("suffix assignment covers the primitives")
}

fn fresh_frozen(base: String, taken: &mut HashSet<Name>) -> Name {
    let mut candidate = base;
    while taken.contains(&candidate) {
        candidate.push('_');
    }
    taken.insert(candidate.clone());
    candidate
}

/// Generates the skeleton for a translation from `source` to `target`.
///
/// Morphism mode: every primitive `c : A` becomes `def c_mu : A' := TODO.`
/// with `A'` the constant-renamed classifier; definitions are copied
/// renamed; every rewrite rule becomes an `#ASSERT` over its sides with
/// pattern variables frozen as local constants.
///
/// Relation mode with arity n: every primitive gets n renamed copies
/// `c_mu_1 .. c_mu_n` plus a witness parameter `c_lr` whose classifier is
/// the relation translation of `A`.
pub fn generate_skeleton(
    source: &Arc<Theory>,
    target: &Arc<Theory>,
    kind: TemplateKind,
) -> Result<SkeletonFile, SkeletonError> {
    let config = ReductionConfig::default();
    let source_prim = primitivized(source);
    let checker_cfg = config;
    let source_checker = Checker::new(source, &checker_cfg);

    // collision checks first: suffixed names must be fresh in the target
    let suffixes: Vec<String> = match kind {
        TemplateKind::Morphism => vec![MORPHISM_SUFFIX.to_string()],
        TemplateKind::Relation(n) => (1..=n)
            .map(|i| format!("{MORPHISM_SUFFIX}_{i}"))
            .chain([RELATION_SUFFIX.to_string()])
            .collect(),
    };
    let mut taken: HashSet<Name> = target
        .entries()
        .iter()
        .filter_map(|e| e.name().cloned())
        .collect();
    for e in source.entries() {
        if let Some(c) = e.name() {
            for s in &suffixes {
                let renamed = format!("{c}{s}");
                if taken.contains(&renamed) {
                    return Err(SkeletonError::Collision(renamed));
                }
                taken.insert(renamed);
            }
        }
    }

    let mut entries = Vec::new();
    match kind {
        TemplateKind::Morphism => {
            let mu = suffix_morphism(&source_prim, target, MORPHISM_SUFFIX);
            for (idx, entry) in source.entries().iter().enumerate() {
                match entry {
                    Entry::Decl { name, classifier } => entries.push(SkeletonEntry::Parameter {
                        name: format!("{name}{MORPHISM_SUFFIX}"),
                        classifier: mu.apply(classifier)?,
                    }),
                    Entry::Def { name, classifier, body, opaque } => {
                        entries.push(SkeletonEntry::CopiedDef {
                            name: format!("{name}{MORPHISM_SUFFIX}"),
                            classifier: mu.apply(classifier)?,
                            body: mu.apply(body)?,
                            opaque: *opaque,
                        })
                    }
                    Entry::Rule(rule) => {
                        let (lhs, rhs, ctx) = rule.condition_sides();
                        // types of later pattern variables may mention
                        // earlier ones: rename constants first, then swap
                        // the variables for their frozen stand-ins
                        let mut frozen = Substitution::new();
                        for (x, ty) in ctx.iter() {
                            let name = fresh_frozen(format!("{x}_r{idx}"), &mut taken);
                            entries.push(SkeletonEntry::FrozenDecl {
                                name: name.clone(),
                                classifier: subst(&mu.apply(ty)?, &frozen),
                            });
                            frozen.insert(x.clone(), Term::con(name));
                        }
                        entries.push(SkeletonEntry::Assert {
                            lhs: subst(&mu.apply(lhs)?, &frozen),
                            rhs: subst(&mu.apply(rhs)?, &frozen),
                        });
                    }
                }
            }
        }
        TemplateKind::Relation(n) => {
            let mus: Vec<Morphism> = (1..=n)
                .map(|i| suffix_morphism(&source_prim, target, &format!("{MORPHISM_SUFFIX}_{i}")))
                .collect();
            let lr_assignment: HashMap<Name, TermRef> = source_prim
                .primitives()
                .map(|(c, _)| (c.clone(), Term::con(format!("{c}{RELATION_SUFFIX}"))))
                .collect();
            let lr = LogicalRelation::new("skeleton", mus.clone(), lr_assignment, vec![])?;

            for (idx, entry) in source.entries().iter().enumerate() {
                match entry {
                    Entry::Decl { name, classifier } => {
                        for (i, mu) in mus.iter().enumerate() {
                            entries.push(SkeletonEntry::Parameter {
                                name: format!("{name}{MORPHISM_SUFFIX}_{}", i + 1),
                                classifier: mu.apply(classifier)?,
                            });
                        }
                        let sort = source_checker
                            .infer(&Default::default(), classifier)
                            .map_err(SkeletonError::Type)?;
                        let witness_classifier = if matches!(&*sort, Term::Kind) {
                            lr.translate_kind(&Term::con(name.clone()), classifier)?
                        } else {
                            let images = (1..=n)
                                .map(|i| Term::con(format!("{name}{MORPHISM_SUFFIX}_{i}")));
                            Term::apps(lr.translate_term(classifier)?, images)
                        };
                        entries.push(SkeletonEntry::Parameter {
                            name: format!("{name}{RELATION_SUFFIX}"),
                            classifier: witness_classifier,
                        });
                    }
                    Entry::Def { name, classifier, body, opaque } => {
                        for (i, mu) in mus.iter().enumerate() {
                            entries.push(SkeletonEntry::CopiedDef {
                                name: format!("{name}{MORPHISM_SUFFIX}_{}", i + 1),
                                classifier: mu.apply(classifier)?,
                                body: mu.apply(body)?,
                                opaque: *opaque,
                            });
                        }
                        let sort = source_checker
                            .infer(&Default::default(), classifier)
                            .map_err(SkeletonError::Type)?;
                        let witness_classifier = if matches!(&*sort, Term::Kind) {
                            lr.translate_kind(&Term::con(name.clone()), classifier)?
                        } else {
                            let images = (1..=n)
                                .map(|i| Term::con(format!("{name}{MORPHISM_SUFFIX}_{i}")));
                            Term::apps(lr.translate_term(classifier)?, images)
                        };
                        entries.push(SkeletonEntry::CopiedDef {
                            name: format!("{name}{RELATION_SUFFIX}"),
                            classifier: witness_classifier,
                            body: lr.translate_term(body)?,
                            opaque: *opaque,
                        });
                    }
                    Entry::Rule(rule) => {
                        let (lhs, rhs, ctx) = rule.condition_sides();
                        // freeze x's components and witness as local
                        // constants of their duplicated types
                        let lr_ctx = lr.translate_context(ctx)?;
                        let mut renames: HashMap<Name, Name> = HashMap::new();
                        for (x, _) in ctx.iter() {
                            for i in 1..=n {
                                renames.insert(
                                    component_name(x, i),
                                    fresh_frozen(format!("{x}_{i}_r{idx}"), &mut taken),
                                );
                            }
                            renames.insert(
                                witness_name(x),
                                fresh_frozen(format!("{x}_w_r{idx}"), &mut taken),
                            );
                        }
                        let freeze = |t: &TermRef| {
                            rename_free_vars(t, &|v| {
                                renames.get(v).cloned().unwrap_or_else(|| v.to_string())
                            })
                        };
                        let freeze_consts = |t: &TermRef| -> TermRef {
                            // frozen variables become constants
                            let mut sub = Substitution::new();
                            for to in renames.values() {
                                sub.insert(to.clone(), Term::con(to.clone()));
                            }
                            subst(&freeze(t), &sub)
                        };
                        for (v, ty) in lr_ctx.iter() {
                            entries.push(SkeletonEntry::FrozenDecl {
                                name: renames[v].clone(),
                                classifier: freeze_consts(ty),
                            });
                        }
                        entries.push(SkeletonEntry::Assert {
                            lhs: freeze_consts(&lr.translate_term(lhs)?),
                            rhs: freeze_consts(&lr.translate_term(rhs)?),
                        });
                    }
                }
            }
        }
    }

    Ok(SkeletonFile { requires: vec![target.name.clone()], entries })
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("parameter {0} still contains the {TODO_TOKEN} placeholder")]
    TodoRemains(String),
    #[error("entry {0} has a translation suffix but no source counterpart")]
    UnknownCounterpart(String),
    #[error("no filled parameter found for source constant {0}")]
    MissingParameter(String),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// Splits `name` into a base and the index behind `_mu_`, if shaped so.
fn strip_component(name: &str) -> Option<(&str, usize)> {
    let pos = name.rfind("_mu_")?;
    let idx: usize = name[pos + 4..].parse().ok()?;
    Some((&name[..pos], idx))
}

/// Reads a filled morphism skeleton back into a [`Morphism`].
///
/// The assignment for a source primitive `c` is the body of `c_mu`, with
/// references to earlier parameters inlined, so the result is exactly what
/// a hand-written morphism over the bare target would be. The morphism's
/// target is the filled module's own theory (target plus helpers and
/// frozen declarations), which is conservative over the bare target.
pub fn ingest_morphism(
    filled: &LoadedModule,
    filled_module: &str,
    source: &Arc<Theory>,
) -> Result<Morphism, IngestError> {
    let target = Arc::new(filled.theory.clone());
    let mut inline: HashMap<Name, TermRef> = HashMap::new();
    let mut assignment: HashMap<Name, TermRef> = HashMap::new();
    for (entry, _) in filled.entries_of(filled_module) {
        let Entry::Def { name, body, .. } = entry else { continue };
        let Some(base) = name.strip_suffix(MORPHISM_SUFFIX) else { continue };
        if body.contains_const(TODO_TOKEN) {
            return Err(IngestError::TodoRemains(name.clone()));
        }
        if source.is_primitive(base) {
            let resolved = replace_consts(body, &inline);
            assignment.insert(base.to_string(), resolved.clone());
            inline.insert(name.clone(), resolved);
        } else if source.definition(base).is_some() {
            // a copied definition; transported, not assigned
        } else {
            return Err(IngestError::UnknownCounterpart(name.clone()));
        }
    }
    for (c, _) in source.primitives() {
        if !assignment.contains_key(c) {
            return Err(IngestError::MissingParameter(c.clone()));
        }
    }
    Ok(Morphism::new(
        filled_module.to_string(),
        source.clone(),
        target,
        assignment,
    )?)
}

/// Reads a filled relation skeleton back into a [`LogicalRelation`] of the
/// given arity.
pub fn ingest_relation(
    filled: &LoadedModule,
    filled_module: &str,
    source: &Arc<Theory>,
    arity: usize,
) -> Result<LogicalRelation, IngestError> {
    let target = Arc::new(filled.theory.clone());
    let mut component_assignments: Vec<HashMap<Name, TermRef>> =
        vec![HashMap::new(); arity];
    let mut witness_assignment: HashMap<Name, TermRef> = HashMap::new();
    let mut inline: HashMap<Name, TermRef> = HashMap::new();
    for (entry, _) in filled.entries_of(filled_module) {
        let Entry::Def { name, body, .. } = entry else { continue };
        if body.contains_const(TODO_TOKEN) {
            return Err(IngestError::TodoRemains(name.clone()));
        }
        let resolved = replace_consts(body, &inline);
        if let Some((base, i)) = strip_component(name) {
            if source.is_primitive(base) && (1..=arity).contains(&i) {
                component_assignments[i - 1].insert(base.to_string(), resolved.clone());
                inline.insert(name.clone(), resolved);
                continue;
            }
            if source.definition(base).is_some() {
                continue;
            }
            return Err(IngestError::UnknownCounterpart(name.clone()));
        }
        if let Some(base) = name.strip_suffix(RELATION_SUFFIX) {
            if source.is_primitive(base) {
                witness_assignment.insert(base.to_string(), resolved.clone());
                inline.insert(name.clone(), resolved);
                continue;
            }
            if source.definition(base).is_some() {
                continue;
            }
            return Err(IngestError::UnknownCounterpart(name.clone()));
        }
        if name.strip_suffix(MORPHISM_SUFFIX).is_some() {
            return Err(IngestError::UnknownCounterpart(name.clone()));
        }
    }
    for (c, _) in source.primitives() {
        for assignments in &component_assignments {
            if !assignments.contains_key(c) {
                return Err(IngestError::MissingParameter(c.clone()));
            }
        }
        if !witness_assignment.contains_key(c) {
            return Err(IngestError::MissingParameter(c.clone()));
        }
    }
    let morphisms = component_assignments
        .into_iter()
        .enumerate()
        .map(|(i, assignment)| {
            Morphism::new(
                format!("{filled_module}_{}", i + 1),
                source.clone(),
                target.clone(),
                assignment,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LogicalRelation::new(
        filled_module,
        morphisms,
        witness_assignment,
        vec![],
    )?)
}

/// Result of checking a batch of files.
#[derive(Debug, Default)]
pub struct CheckOutcome {
    pub diagnostics: Vec<Diagnostic>,
    pub parse_failed: bool,
    /// `#EVAL` results, one line each.
    pub eval_output: Vec<String>,
}

impl CheckOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.parse_failed {
            2
        } else if has_errors(&self.diagnostics) {
            1
        } else {
            0
        }
    }
}

/// Loads and checks each file, resolving requires against the file's
/// directory and `extra_dirs`, then evaluates its pragmas.
pub fn check_files(
    paths: &[PathBuf],
    extra_dirs: &[PathBuf],
    config: &ReductionConfig,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::default();
    for path in paths {
        match load_path(path, extra_dirs, config) {
            Err(e) => {
                outcome.parse_failed = true;
                outcome
                    .diagnostics
                    .push(Diagnostic::error("parse", e.to_string()));
            }
            Ok(module) => {
                outcome.diagnostics.extend(module.diagnostics.clone());
                run_pragmas(&module, config, &mut outcome);
            }
        }
    }
    outcome
}

fn run_pragmas(module: &LoadedModule, config: &ReductionConfig, outcome: &mut CheckOutcome) {
    let theory = &module.theory;
    let checker = Checker::new(theory, config);
    for p in &module.pragmas {
        let at = |d: Diagnostic| d.with_file(p.file.clone()).with_span(p.span);
        match &p.pragma {
            Pragma::Assert(lhs, rhs) => {
                if let Some(c) = unknown_constant(theory, lhs).or_else(|| unknown_constant(theory, rhs))
                {
                    outcome.diagnostics.push(at(Diagnostic::error(
                        "assert.scope",
                        format!("assertion mentions unknown constant {c}"),
                    )));
                    continue;
                }
                match convertible(theory, lhs, rhs, config) {
                    Ok(true) => {}
                    Ok(false) => {
                        let show = |t: &TermRef| match normalize(theory, t, config) {
                            Ok(n) => print_term(&n),
                            Err(_) => print_term(t),
                        };
                        outcome.diagnostics.push(at(Diagnostic::error(
                            "assert.failed",
                            format!(
                                "assertion failed: {} and {} are not convertible (normal forms {} and {})",
                                print_term(lhs),
                                print_term(rhs),
                                show(lhs),
                                show(rhs)
                            ),
                        )));
                    }
                    Err(e) => outcome
                        .diagnostics
                        .push(at(Diagnostic::error("assert.fuel", e.to_string()))),
                }
            }
            Pragma::Check(t) => {
                if let Err(e) = checker.infer(&Default::default(), t) {
                    outcome.diagnostics.push(at(Diagnostic::error(
                        "check.failed",
                        format!("{}: {e}", print_term(t)),
                    )));
                }
            }
            Pragma::Eval(t) => match normalize(theory, t, config) {
                Ok(n) => outcome.eval_output.push(format!(
                    "{}:{} {} --> {}",
                    p.file,
                    p.span,
                    print_term(t),
                    print_term(&n)
                )),
                Err(e) => outcome
                    .diagnostics
                    .push(at(Diagnostic::error("eval.fuel", e.to_string()))),
            },
        }
    }
}

fn unknown_constant(theory: &Theory, t: &TermRef) -> Option<Name> {
    match &**t {
        Term::Const(c) => {
            if theory.contains(c) {
                None
            } else {
                Some(c.clone())
            }
        }
        Term::Lam { domain, body, .. } => domain
            .as_ref()
            .and_then(|d| unknown_constant(theory, d))
            .or_else(|| unknown_constant(theory, body)),
        Term::Pi { domain, codomain, .. } => unknown_constant(theory, domain)
            .or_else(|| unknown_constant(theory, codomain)),
        Term::App { head, arg } => {
            unknown_constant(theory, head).or_else(|| unknown_constant(theory, arg))
        }
        _ => None,
    }
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{0} does not check; fix it before translating")]
    UncheckedInput(String),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("the filled skeleton is not a valid translation:\n{0}")]
    InvalidTranslation(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("transported output fails to recheck")]
    RecheckFailed(Vec<Diagnostic>),
}

fn load_checked(
    path: &Path,
    extra_dirs: &[PathBuf],
    config: &ReductionConfig,
) -> Result<LoadedModule, CommandError> {
    let module = load_path(path, extra_dirs, config)?;
    if has_errors(&module.diagnostics) {
        return Err(CommandError::UncheckedInput(path.display().to_string()));
    }
    Ok(module)
}

/// `translate`: generate a skeleton file for a morphism or relation from
/// the theory in `source_path` to the one in `target_path`.
pub fn cmd_translate(
    source_path: &Path,
    target_path: &Path,
    out_path: &Path,
    kind: TemplateKind,
    config: &ReductionConfig,
) -> Result<(), CommandError> {
    let source = load_checked(source_path, &[], config)?;
    let target = load_checked(target_path, &[], config)?;
    let skeleton = generate_skeleton(
        &Arc::new(source.theory),
        &Arc::new(target.theory),
        kind,
    )?;
    std::fs::write(out_path, skeleton.render()).map_err(|e| CommandError::Io {
        path: out_path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

/// `transport`: read a filled skeleton, validate the morphism it defines,
/// translate every definition of the source theory, write them to
/// `out_path` (over the target only: parameter references are inlined),
/// and recheck the output.
pub fn cmd_transport(
    filled_path: &Path,
    source_path: &Path,
    target_path: &Path,
    out_path: &Path,
    config: &ReductionConfig,
) -> Result<(), CommandError> {
    let source = load_checked(source_path, &[], config)?;
    let target_dirs: Vec<PathBuf> = target_path.parent().map(|p| p.to_path_buf()).into_iter().collect();
    let filled = load_checked(filled_path, &target_dirs, config)?;
    let filled_module = filled_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("filled")
        .to_string();
    let source_thy = Arc::new(source.theory);
    let morphism = ingest_morphism(&filled, &filled_module, &source_thy)?;
    let report = crate::morphism::check_morphism(&morphism, config);
    if !report.is_valid() {
        return Err(CommandError::InvalidTranslation(report.to_string()));
    }

    // rebase the morphism onto the bare target so the emitted file only
    // needs the target module
    let target = load_checked(target_path, &[], config)?;
    let target_thy = Arc::new(target.theory);
    let rebased = Morphism::new(
        morphism.name.clone(),
        source_thy.clone(),
        target_thy.clone(),
        morphism.assignment().clone(),
    )
    .map_err(IngestError::Morphism)?;
    let entries = transport_definitions(&rebased, MORPHISM_SUFFIX, config)?;

    let mut out = format!("#REQUIRE {}.\n\n", target_thy.name);
    for e in &entries {
        out.push_str(&crate::pretty::print_entry(e));
        out.push('\n');
    }
    std::fs::write(out_path, out).map_err(|e| CommandError::Io {
        path: out_path.to_path_buf(),
        source: e,
    })?;

    // recheck the emitted file from disk, as a user would
    let recheck = check_files(&[out_path.to_path_buf()], &target_dirs, config);
    if recheck.exit_code() != 0 {
        return Err(CommandError::RecheckFailed(recheck.diagnostics));
    }
    Ok(())
}
