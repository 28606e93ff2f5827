//! A logical framework with dependent types and user-defined rewriting,
//! plus two verified translation templates between theories: morphisms and
//! n-ary logical relations.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run -p lpmr --example check_corpus          # load and check every bundled theory
//! cargo run -p lpmr --example rewrite_playground    # normal forms and conversion
//! cargo run -p lpmr --example group_isomorphism     # morphisms both ways between two group theories
//! cargo run -p lpmr --example deduction_to_computation  # skeleton generation and filling
//! cargo run -p lpmr --example lists_to_trees        # a data-structure embedding
//! cargo run -p lpmr --example sort_erasure          # sorted-to-unsorted logic translations
//! cargo run -p lpmr --example nat_to_int            # an invariant-carrying embedding
//! cargo run -p lpmr --example binary_relation       # a binary logical relation
//! cargo run -p lpmr --example transport_library     # batch theorem transport
//! ```
//!
//! The `lpmr` binary wraps the same entry points for file-based use:
//! `lpmr check`, `lpmr translate`, `lpmr transport`.

pub mod corpus;
pub mod diag;
pub mod loader;
pub mod parse;
pub mod pretty;
pub mod reduce;
pub mod template;
pub mod term;
pub mod theory;
pub mod morphism;
pub mod relation;
pub mod typing;

pub use diag::{Diagnostic, DiagnosticFormat, Severity};
pub use parse::{parse_file, parse_term_str, SourceFile};
pub use reduce::{convertible, match_pattern, normalize, whnf, ReductionConfig, Strategy};
pub use term::{alpha_eq, free_vars, subst, Context, Name, Substitution, Term, TermRef};
pub use theory::{Entry, RewriteRule, Theory};
pub use typing::{check_theory, Checker, TypeError};
