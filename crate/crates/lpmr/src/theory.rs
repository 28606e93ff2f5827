//! Theories: ordered sequences of constant declarations, rewrite rules and
//! definitions, with name and rule-head indexes for lookup.

use std::collections::HashMap;

use thiserror::Error;

use crate::term::{free_vars, Context, Name, Term, TermRef};

/// A rewrite rule `lhs --> rhs` over the listed pattern variables.
///
/// The typing context for the pattern variables is inferred by the checker
/// from the left-hand side; until then it is empty. When the rule is
/// left-linearized, `delin` records the re-identified variant whose
/// typability justifies the rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RewriteRule {
    pub pattern_vars: Vec<Name>,
    pub lhs: TermRef,
    pub rhs: TermRef,
    pub ctx: Context,
    pub delin: Option<Box<Delinearization>>,
    pub unchecked: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Delinearization {
    pub lhs: TermRef,
    pub rhs: TermRef,
    pub ctx: Context,
}

impl RewriteRule {
    pub fn new(pattern_vars: Vec<Name>, lhs: TermRef, rhs: TermRef) -> Self {
        RewriteRule {
            pattern_vars,
            lhs,
            rhs,
            ctx: Context::new(),
            delin: None,
            unchecked: false,
        }
    }

    pub fn head_const(&self) -> Option<&Name> {
        self.lhs.head_const()
    }

    /// The sides condition 3 of a translation is checked on: the
    /// de-linearized variant when there is one, the rule itself otherwise.
    pub fn condition_sides(&self) -> (&TermRef, &TermRef, &Context) {
        match &self.delin {
            Some(d) => (&d.lhs, &d.rhs, &d.ctx),
            None => (&self.lhs, &self.rhs, &self.ctx),
        }
    }

    /// Checks the two syntactic well-formedness conditions: the left-hand
    /// side is algebraic but not a bare variable, and the right-hand side
    /// introduces no fresh variables.
    pub fn syntactic_check(&self) -> Result<(), RuleShapeError> {
        if matches!(&*self.lhs, Term::Var(_)) {
            return Err(RuleShapeError::LhsIsVariable);
        }
        check_algebraic(&self.lhs, &self.pattern_vars)?;
        let lhs_vars = free_vars(&self.lhs);
        for v in free_vars(&self.rhs) {
            if !lhs_vars.contains(&v) {
                return Err(RuleShapeError::FreshRhsVariable(v));
            }
        }
        Ok(())
    }
}

/// A term is algebraic if it is a pattern variable or a constant applied to
/// algebraic arguments.
fn check_algebraic(t: &TermRef, pattern_vars: &[Name]) -> Result<(), RuleShapeError> {
    match &**t {
        Term::Var(x) => {
            if pattern_vars.iter().any(|v| v == x) {
                Ok(())
            } else {
                Err(RuleShapeError::UnlistedVariable(x.clone()))
            }
        }
        Term::Const(_) => Ok(()),
        Term::App { .. } => {
            let (head, args) = t.spine();
            if !matches!(&*head, Term::Const(_)) {
                return Err(RuleShapeError::NonAlgebraic);
            }
            for a in &args {
                check_algebraic(a, pattern_vars)?;
            }
            Ok(())
        }
        _ => Err(RuleShapeError::NonAlgebraic),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleShapeError {
    #[error("left-hand side is algebraic but not simply a variable")]
    LhsIsVariable,
    #[error("left-hand side is not algebraic (only constants applied to algebraic arguments)")]
    NonAlgebraic,
    #[error("variable {0} is not listed as a pattern variable")]
    UnlistedVariable(String),
    #[error("right-hand side mentions {0} which is not free in the left-hand side")]
    FreshRhsVariable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    /// `c : A.` — a primitive constant.
    Decl { name: Name, classifier: TermRef },
    /// `[xs] lhs --> rhs.`
    Rule(RewriteRule),
    /// `def c : A := t.` (transparent) or `thm c : A := t.` (opaque). A
    /// transparent definition behaves as a declaration plus the rule
    /// `c --> t`; an opaque one is checked once and never unfolded.
    Def {
        name: Name,
        classifier: TermRef,
        body: TermRef,
        opaque: bool,
    },
}

impl Entry {
    pub fn name(&self) -> Option<&Name> {
        match self {
            Entry::Decl { name, .. } | Entry::Def { name, .. } => Some(name),
            Entry::Rule(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("duplicate name {0}")]
    DuplicateName(String),
}

/// An ordered theory. Entries only ever refer to earlier entries; the
/// checker enforces this, the structure just stores them.
#[derive(Debug, Clone, Default)]
pub struct Theory {
    pub name: String,
    entries: Vec<Entry>,
    const_index: HashMap<Name, usize>,
    rule_index: HashMap<Name, Vec<usize>>,
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Theory {
    pub fn new(name: impl Into<String>) -> Self {
        Theory { name: name.into(), ..Theory::default() }
    }

    pub fn push(&mut self, entry: Entry) -> Result<(), TheoryError> {
        if let Some(name) = entry.name() {
            if self.const_index.contains_key(name) {
                return Err(TheoryError::DuplicateName(name.clone()));
            }
            self.const_index.insert(name.clone(), self.entries.len());
        }
        if let Entry::Rule(rule) = &entry {
            if let Some(head) = rule.head_const() {
                self.rule_index
                    .entry(head.clone())
                    .or_default()
                    .push(self.entries.len());
            }
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn from_entries(
        name: impl Into<String>,
        entries: impl IntoIterator<Item = Entry>,
    ) -> Result<Self, TheoryError> {
        let mut thy = Theory::new(name);
        for e in entries {
            thy.push(e)?;
        }
        Ok(thy)
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn contains(&self, name: &str) -> bool {
        self.const_index.contains_key(name)
    }

    pub fn classifier_of(&self, name: &str) -> Option<&TermRef> {
        self.const_index.get(name).map(|&i| match &self.entries[i] {
            Entry::Decl { classifier, .. } | Entry::Def { classifier, .. } => classifier,
            Entry::Rule(_) => unreachable!("rules are unnamed"),
        })
    }

    /// The unfolding of a transparent definition, if any.
    pub fn transparent_body(&self, name: &str) -> Option<&TermRef> {
        self.const_index.get(name).and_then(|&i| match &self.entries[i] {
            Entry::Def { body, opaque: false, .. } => Some(body),
            _ => None,
        })
    }

    pub fn definition(&self, name: &str) -> Option<(&TermRef, &TermRef, bool)> {
        self.const_index.get(name).and_then(|&i| match &self.entries[i] {
            Entry::Def { classifier, body, opaque, .. } => Some((classifier, body, *opaque)),
            _ => None,
        })
    }

    /// Rules whose left-hand side head is the given constant, in
    /// declaration order.
    pub fn rules_for(&self, head: &str) -> impl Iterator<Item = &RewriteRule> {
        self.rule_index
            .get(head)
            .into_iter()
            .flatten()
            .map(move |&i| match &self.entries[i] {
                Entry::Rule(r) => r,
                _ => unreachable!("rule index points at a rule"),
            })
    }

    pub fn rules(&self) -> impl Iterator<Item = &RewriteRule> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Rule(r) => Some(r),
            _ => None,
        })
    }

    /// Primitive constants: declarations, in order. Definitions are not
    /// primitives; translations treat them by their bodies.
    pub fn primitives(&self) -> impl Iterator<Item = (&Name, &TermRef)> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Decl { name, classifier } => Some((name, classifier)),
            _ => None,
        })
    }

    pub fn is_primitive(&self, name: &str) -> bool {
        self.const_index
            .get(name)
            .is_some_and(|&i| matches!(self.entries[i], Entry::Decl { .. }))
    }

    pub fn definitions(&self) -> impl Iterator<Item = (&Name, &TermRef, &TermRef, bool)> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Def { name, classifier, body, opaque } => {
                Some((name, classifier, body, *opaque))
            }
            _ => None,
        })
    }

    /// A copy of this theory under a new name with extra entries appended.
    pub fn extended(
        &self,
        name: impl Into<String>,
        extra: impl IntoIterator<Item = Entry>,
    ) -> Result<Self, TheoryError> {
        let mut thy = self.clone();
        thy.name = name.into();
        for e in extra {
            thy.push(e)?;
        }
        Ok(thy)
    }
}
