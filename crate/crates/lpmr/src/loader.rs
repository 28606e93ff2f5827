//! Loading theories from source files: `#REQUIRE` resolution by in-order
//! concatenation (each module loaded once, cycles rejected), followed by a
//! full check of the combined theory.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::diag::Diagnostic;
use crate::parse::{parse_named_file, ParseError, ParsedEntry, Pragma, Span};
use crate::reduce::ReductionConfig;
use crate::theory::{Entry, RewriteRule, Theory};
use crate::typing::check_theory_indexed;

/// Maps module names to source text.
pub trait ModuleResolver {
    fn resolve(&self, module: &str) -> Option<String>;
    /// A display name for diagnostics (a path for file-backed resolvers).
    fn display_name(&self, module: &str) -> String {
        format!("{module}.dk")
    }
}

/// Looks for `<module>.dk` in a list of directories, first hit wins.
pub struct DirResolver {
    pub dirs: Vec<PathBuf>,
}

impl DirResolver {
    pub fn new(dirs: Vec<PathBuf>) -> Self {
        DirResolver { dirs }
    }

    fn find(&self, module: &str) -> Option<PathBuf> {
        self.dirs
            .iter()
            .map(|d| d.join(format!("{module}.dk")))
            .find(|p| p.is_file())
    }
}

impl ModuleResolver for DirResolver {
    fn resolve(&self, module: &str) -> Option<String> {
        std::fs::read_to_string(self.find(module)?).ok()
    }

    fn display_name(&self, module: &str) -> String {
        self.find(module)
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| format!("{module}.dk"))
    }
}

/// In-memory resolver, used for embedded fixtures and tests.
#[derive(Default)]
pub struct MapResolver {
    map: HashMap<String, String>,
}

impl MapResolver {
    pub fn new() -> Self {
        MapResolver::default()
    }

    pub fn insert(&mut self, module: impl Into<String>, source: impl Into<String>) {
        self.map.insert(module.into(), source.into());
    }
}

impl ModuleResolver for MapResolver {
    fn resolve(&self, module: &str) -> Option<String> {
        self.map.get(module).cloned()
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("module {0} not found")]
    NotFound(String),
    #[error("require cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("{file}: {error}")]
    Parse { file: String, error: ParseError },
}

/// A pragma with its source location, kept aside for the checker driver.
#[derive(Debug, Clone)]
pub struct LocatedPragma {
    pub file: String,
    pub span: Span,
    pub pragma: Pragma,
}

/// One source location per theory entry.
#[derive(Debug, Clone)]
pub struct EntryOrigin {
    pub module: String,
    pub file: String,
    pub span: Span,
}

#[derive(Debug)]
pub struct LoadedModule {
    /// The checked theory: the module's entries appended to everything it
    /// requires, with rewrite rules elaborated.
    pub theory: Theory,
    /// Where each entry of the *raw* concatenation came from.
    pub origins: Vec<EntryOrigin>,
    /// The raw concatenation, before checking.
    pub raw: Theory,
    pub pragmas: Vec<LocatedPragma>,
    pub diagnostics: Vec<Diagnostic>,
}

impl LoadedModule {
    pub fn entries_of<'a>(
        &'a self,
        module: &'a str,
    ) -> impl Iterator<Item = (&'a Entry, &'a EntryOrigin)> + 'a {
        self.raw
            .entries()
            .iter()
            .zip(&self.origins)
            .filter(move |(_, o)| o.module == module)
    }
}

struct Loader<'a> {
    resolver: &'a dyn ModuleResolver,
    visiting: Vec<String>,
    done: Vec<String>,
    entries: Vec<(Entry, EntryOrigin)>,
    pragmas: Vec<LocatedPragma>,
}

impl<'a> Loader<'a> {
    fn visit(&mut self, module: &str) -> Result<(), LoadError> {
        if self.done.iter().any(|m| m == module) {
            return Ok(());
        }
        if self.visiting.iter().any(|m| m == module) {
            let mut cycle = self.visiting.clone();
            cycle.push(module.to_string());
            return Err(LoadError::Cycle(cycle));
        }
        let source = self
            .resolver
            .resolve(module)
            .ok_or_else(|| LoadError::NotFound(module.to_string()))?;
        let file = self.resolver.display_name(module);
        let parsed = parse_named_file(module, &source)
            .map_err(|error| LoadError::Parse { file: file.clone(), error })?;
        self.visiting.push(module.to_string());
        for (required, _) in &parsed.requires {
            self.visit(required)?;
        }
        self.visiting.pop();
        self.done.push(module.to_string());
        for (entry, span) in parsed.entries {
            let origin = EntryOrigin {
                module: module.to_string(),
                file: file.clone(),
                span,
            };
            match entry {
                ParsedEntry::Decl { name, classifier, .. } => {
                    self.entries
                        .push((Entry::Decl { name, classifier }, origin));
                }
                ParsedEntry::Def { name, classifier, body, opaque } => {
                    self.entries
                        .push((Entry::Def { name, classifier, body, opaque }, origin));
                }
                ParsedEntry::Rule { vars, lhs, rhs } => {
                    self.entries
                        .push((Entry::Rule(RewriteRule::new(vars, lhs, rhs)), origin));
                }
                ParsedEntry::Pragma(pragma) => {
                    self.pragmas.push(LocatedPragma { file: file.clone(), span, pragma });
                }
            }
        }
        Ok(())
    }
}

/// Loads `module` and everything it requires, checks the concatenated
/// theory, and returns it with location-decorated diagnostics.
pub fn load_module(
    module: &str,
    resolver: &dyn ModuleResolver,
    config: &ReductionConfig,
) -> Result<LoadedModule, LoadError> {
    let mut loader = Loader {
        resolver,
        visiting: Vec::new(),
        done: Vec::new(),
        entries: Vec::new(),
        pragmas: Vec::new(),
    };
    loader.visit(module)?;

    let mut raw = Theory::new(module);
    let mut origins = Vec::new();
    let mut diagnostics = Vec::new();
    for (entry, origin) in loader.entries {
        match raw.push(entry) {
            Ok(()) => origins.push(origin),
            Err(e) => diagnostics.push(
                Diagnostic::error("decl.duplicate", e.to_string())
                    .with_file(origin.file.clone())
                    .with_span(origin.span),
            ),
        }
    }
    let (theory, indexed) = check_theory_indexed(&raw, config);
    for (i, diag) in indexed {
        let origin = &origins[i];
        diagnostics.push(diag.with_file(origin.file.clone()).with_span(origin.span));
    }
    Ok(LoadedModule {
        theory,
        origins,
        raw,
        pragmas: loader.pragmas,
        diagnostics,
    })
}

/// Loads the module a path points at, resolving requires against the
/// file's own directory (plus any extra search directories).
pub fn load_path(
    path: &Path,
    extra_dirs: &[PathBuf],
    config: &ReductionConfig,
) -> Result<LoadedModule, LoadError> {
    let module = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| LoadError::NotFound(path.display().to_string()))?;
    let mut dirs = Vec::new();
    if let Some(parent) = path.parent() {
        dirs.push(parent.to_path_buf());
    }
    dirs.extend(extra_dirs.iter().cloned());
    let resolver = DirResolver::new(dirs);
    load_module(module, &resolver, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::has_errors;

    #[test]
    fn requires_concatenate_in_order() {
        let mut r = MapResolver::new();
        r.insert("base", "iota : Type.");
        r.insert("ext", "#REQUIRE base.\none : iota.");
        let m = load_module("ext", &r, &ReductionConfig::default()).unwrap();
        assert!(!has_errors(&m.diagnostics), "{:?}", m.diagnostics);
        assert!(m.theory.contains("iota") && m.theory.contains("one"));
        assert_eq!(m.entries_of("ext").count(), 1);
    }

    #[test]
    fn diamond_requires_load_once() {
        let mut r = MapResolver::new();
        r.insert("base", "iota : Type.");
        r.insert("a", "#REQUIRE base.\none : iota.");
        r.insert("b", "#REQUIRE base.\ntwo : iota.");
        r.insert("top", "#REQUIRE a.\n#REQUIRE b.\nthree : iota.");
        let m = load_module("top", &r, &ReductionConfig::default()).unwrap();
        assert!(!has_errors(&m.diagnostics), "{:?}", m.diagnostics);
        assert_eq!(m.theory.entries().len(), 4);
    }

    #[test]
    fn cycles_rejected() {
        let mut r = MapResolver::new();
        r.insert("a", "#REQUIRE b.");
        r.insert("b", "#REQUIRE a.");
        assert!(matches!(
            load_module("a", &r, &ReductionConfig::default()),
            Err(LoadError::Cycle(_))
        ));
    }

    #[test]
    fn check_diagnostics_carry_locations() {
        let mut r = MapResolver::new();
        r.insert("bad", "iota : Type.\none : missing.");
        let m = load_module("bad", &r, &ReductionConfig::default()).unwrap();
        assert!(has_errors(&m.diagnostics));
        let d = &m.diagnostics[0];
        assert_eq!(d.span.unwrap().line, 2);
    }
}
