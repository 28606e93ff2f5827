//! Load every bundled theory, check it, and summarize what it contains.
//!
//! ```bash
//! cargo run -p lpmr --example check_corpus
//! ```

use lpmr::corpus;
use lpmr::diag::Severity;
use lpmr::theory::Entry;

fn main() {
    println!("{:<22} {:>6} {:>6} {:>6}  notes", "theory", "decls", "rules", "defs");
    for (name, _) in corpus::THEORY_SOURCES {
        let module = corpus::load(name);
        let mut decls = 0;
        let mut rules = 0;
        let mut defs = 0;
        for entry in module.theory.entries() {
            match entry {
                Entry::Decl { .. } => decls += 1,
                Entry::Rule(_) => rules += 1,
                Entry::Def { .. } => defs += 1,
            }
        }
        let warnings = module
            .diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Warning)
            .count();
        let notes = if warnings > 0 {
            format!("{warnings} linearized-rule warning(s)")
        } else {
            String::new()
        };
        println!("{name:<22} {decls:>6} {rules:>6} {defs:>6}  {notes}");
    }
    println!("\nall theories check");
}
