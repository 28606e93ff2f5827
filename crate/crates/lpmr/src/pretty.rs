//! Printing terms and theory entries back to the concrete syntax.
//!
//! Output reparses to an alpha-equal term: binder hints are renamed when
//! they would shadow a name the body refers to.

use std::collections::HashSet;

use crate::term::{Name, Term};
use crate::theory::{Entry, RewriteRule};

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    /// Binders and arrows.
    Term,
    /// Application spines.
    App,
    /// Names, sorts, parenthesized terms.
    Atom,
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    let mut scope = Vec::new();
    fmt_term(t, &mut scope, Prec::Term, &mut out);
    out
}

/// Names a binder avoids: everything the body could refer to by name.
fn names_in(t: &Term, out: &mut HashSet<Name>) {
    match t {
        Term::Const(n) | Term::Var(n) => {
            out.insert(n.clone());
        }
        Term::Lam { domain, body, .. } => {
            if let Some(d) = domain {
                names_in(d, out);
            }
            names_in(body, out);
        }
        Term::Pi { domain, codomain, .. } => {
            names_in(domain, out);
            names_in(codomain, out);
        }
        Term::App { head, arg } => {
            names_in(head, out);
            names_in(arg, out);
        }
        _ => {}
    }
}

fn uses_bound_zero(t: &Term) -> bool {
    fn go(t: &Term, depth: u32) -> bool {
        match t {
            Term::Bound(i) => *i == depth,
            Term::Lam { domain, body, .. } => {
                domain.as_deref().is_some_and(|d| go(d, depth)) || go(body, depth + 1)
            }
            Term::Pi { domain, codomain, .. } => go(domain, depth) || go(codomain, depth + 1),
            Term::App { head, arg } => go(head, depth) || go(arg, depth),
            _ => false,
        }
    }
    go(t, 0)
}

fn sanitize_hint(hint: &str) -> &str {
    let base = hint.split('#').next().unwrap_or("");
    if base.is_empty() {
        "x"
    } else {
        base
    }
}

fn pick_name(hint: &str, body: &Term, scope: &[Name]) -> Name {
    let base = sanitize_hint(hint);
    let mut avoid: HashSet<Name> = scope.iter().cloned().collect();
    names_in(body, &mut avoid);
    if !avoid.contains(base) {
        return base.to_string();
    }
    let mut i = 0usize;
    loop {
        i += 1;
        let candidate = format!("{base}{i}");
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
}

fn fmt_term(t: &Term, scope: &mut Vec<Name>, prec: Prec, out: &mut String) {
    match t {
        Term::Type => out.push_str("Type"),
        Term::Kind => out.push_str("Kind"),
        Term::Const(n) | Term::Var(n) => out.push_str(n),
        Term::Bound(i) => {
            let idx = scope.len().checked_sub(1 + *i as usize);
            match idx.and_then(|k| scope.get(k)) {
                Some(name) => out.push_str(name),
                // dangling index: diagnostics only, never emitted to files
                None => out.push_str(&format!("@{i}")),
            }
        }
        Term::Lam { hint, domain, body } => {
            let parens = prec > Prec::Term;
            if parens {
                out.push('(');
            }
            let name = pick_name(hint, body, scope);
            out.push_str(&name);
            if let Some(d) = domain {
                out.push_str(" : ");
                fmt_term(d, scope, Prec::App, out);
            }
            out.push_str(" => ");
            scope.push(name);
            fmt_term(body, scope, Prec::Term, out);
            scope.pop();
            if parens {
                out.push(')');
            }
        }
        Term::Pi { hint, domain, codomain } => {
            let parens = prec > Prec::Term;
            if parens {
                out.push('(');
            }
            if uses_bound_zero(codomain) {
                let name = pick_name(hint, codomain, scope);
                out.push_str(&name);
                out.push_str(" : ");
                fmt_term(domain, scope, Prec::App, out);
                out.push_str(" -> ");
                scope.push(name);
                fmt_term(codomain, scope, Prec::Term, out);
                scope.pop();
            } else {
                fmt_term(domain, scope, Prec::App, out);
                out.push_str(" -> ");
                // the binder is unused; keep the scope aligned with a
                // placeholder no name can collide with
                scope.push(String::new());
                fmt_term(codomain, scope, Prec::Term, out);
                scope.pop();
            }
            if parens {
                out.push(')');
            }
        }
        Term::App { head, arg } => {
            let parens = prec > Prec::App;
            if parens {
                out.push('(');
            }
            fmt_term(head, scope, Prec::App, out);
            out.push(' ');
            fmt_term(arg, scope, Prec::Atom, out);
            if parens {
                out.push(')');
            }
        }
    }
}

pub fn print_rule(rule: &RewriteRule) -> String {
    let vars = rule.pattern_vars.join(", ");
    format!(
        "[{vars}] {} --> {}.",
        print_term(&rule.lhs),
        print_term(&rule.rhs)
    )
}

pub fn print_entry(entry: &Entry) -> String {
    match entry {
        Entry::Decl { name, classifier } => format!("{name} : {}.", print_term(classifier)),
        Entry::Rule(rule) => print_rule(rule),
        Entry::Def { name, classifier, body, opaque } => {
            let kw = if *opaque { "thm" } else { "def" };
            format!(
                "{kw} {name} : {} := {}.",
                print_term(classifier),
                print_term(body)
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;

    #[test]
    fn sorts_and_arrows() {
        assert_eq!(print_term(&Term::Type), "Type");
        let t = Term::arrow(Term::con("Prop"), Term::sort_type());
        assert_eq!(print_term(&t), "Prop -> Type");
    }

    #[test]
    fn arrow_domain_parenthesized() {
        let prf = |p| Term::app(Term::con("Prf"), p);
        let inner = Term::arrow(prf(Term::con("p")), prf(Term::con("q")));
        let t = Term::arrow(inner, prf(Term::con("r")));
        assert_eq!(print_term(&t), "(Prf p -> Prf q) -> Prf r");
    }

    #[test]
    fn dependent_product_names_binder() {
        // p : Prop -> Prf p
        let t = Term::pi(
            "p",
            Term::con("Prop"),
            Term::app(Term::con("Prf"), Term::bound(0)),
        );
        assert_eq!(print_term(&t), "p : Prop -> Prf p");
    }

    #[test]
    fn binder_renamed_away_from_constant() {
        // lam p. p Prop, where "p" would shadow nothing, stays p; but a
        // binder hinted "Prop" must not capture the constant Prop.
        let t = Term::lam(
            "Prop",
            Some(Term::sort_type()),
            Term::apps(Term::bound(0), [Term::con("Prop")]),
        );
        assert_eq!(print_term(&t), "Prop1 : Type => Prop1 Prop");
    }

    #[test]
    fn application_grouping() {
        let t = Term::apps(
            Term::con("imp_i"),
            [
                Term::con("p"),
                Term::con("p"),
                Term::lam("H", None, Term::bound(0)),
            ],
        );
        assert_eq!(print_term(&t), "imp_i p p (H => H)");
    }
}
