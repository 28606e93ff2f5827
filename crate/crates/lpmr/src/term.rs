//! Core term syntax: one AST for objects, types, kinds and the two sorts.
//!
//! Binding is nameless: bound variables are de Bruijn indices carrying a
//! printing hint, free variables are named. Equality on terms ignores the
//! hints, so `==` is alpha-equivalence.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub type Name = String;
pub type TermRef = Arc<Term>;

#[derive(Debug, Clone)]
pub enum Term {
    /// The sort of types.
    Type,
    /// The sort of kinds. Only ever a classifier, never a subterm.
    Kind,
    /// A constant declared by a theory.
    Const(Name),
    /// A free variable (context variable or rewrite pattern variable).
    Var(Name),
    /// A bound variable, counting binders inside out from zero.
    Bound(u32),
    /// Abstraction. The domain may be omitted in surface syntax and is then
    /// recovered by checking against an expected product.
    Lam {
        hint: Name,
        domain: Option<TermRef>,
        body: TermRef,
    },
    /// Dependent product.
    Pi {
        hint: Name,
        domain: TermRef,
        codomain: TermRef,
    },
    App {
        head: TermRef,
        arg: TermRef,
    },
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        use Term::*;
        match (self, other) {
            (Type, Type) | (Kind, Kind) => true,
            (Const(a), Const(b)) | (Var(a), Var(b)) => a == b,
            (Bound(a), Bound(b)) => a == b,
            (
                Lam { domain: d1, body: b1, .. },
                Lam { domain: d2, body: b2, .. },
            ) => d1 == d2 && b1 == b2,
            (
                Pi { domain: d1, codomain: c1, .. },
                Pi { domain: d2, codomain: c2, .. },
            ) => d1 == d2 && c1 == c2,
            (App { head: h1, arg: a1 }, App { head: h2, arg: a2 }) => h1 == h2 && a1 == a2,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        use Term::*;
        match self {
            Type => state.write_u8(0),
            Kind => state.write_u8(1),
            Const(n) => {
                state.write_u8(2);
                n.hash(state);
            }
            Var(n) => {
                state.write_u8(3);
                n.hash(state);
            }
            Bound(i) => {
                state.write_u8(4);
                i.hash(state);
            }
            Lam { domain, body, .. } => {
                state.write_u8(5);
                domain.hash(state);
                body.hash(state);
            }
            Pi { domain, codomain, .. } => {
                state.write_u8(6);
                domain.hash(state);
                codomain.hash(state);
            }
            App { head, arg } => {
                state.write_u8(7);
                head.hash(state);
                arg.hash(state);
            }
        }
    }
}

impl Term {
    pub fn rc(self) -> TermRef {
        Arc::new(self)
    }

    pub fn con(name: impl Into<Name>) -> TermRef {
        Term::Const(name.into()).rc()
    }

    pub fn var(name: impl Into<Name>) -> TermRef {
        Term::Var(name.into()).rc()
    }

    pub fn bound(i: u32) -> TermRef {
        Term::Bound(i).rc()
    }

    pub fn sort_type() -> TermRef {
        Term::Type.rc()
    }

    pub fn sort_kind() -> TermRef {
        Term::Kind.rc()
    }

    pub fn lam(hint: impl Into<Name>, domain: Option<TermRef>, body: TermRef) -> TermRef {
        Term::Lam { hint: hint.into(), domain, body }.rc()
    }

    pub fn pi(hint: impl Into<Name>, domain: TermRef, codomain: TermRef) -> TermRef {
        Term::Pi { hint: hint.into(), domain, codomain }.rc()
    }

    /// Non-dependent product `a -> b`.
    pub fn arrow(domain: TermRef, codomain: TermRef) -> TermRef {
        Term::pi("", domain, shift(&codomain, 1, 0))
    }

    pub fn app(head: TermRef, arg: TermRef) -> TermRef {
        Term::App { head, arg }.rc()
    }

    pub fn apps(head: TermRef, args: impl IntoIterator<Item = TermRef>) -> TermRef {
        args.into_iter().fold(head, Term::app)
    }

    /// Splits an application spine: `f a b c` gives `(f, [a, b, c])`.
    pub fn spine(self: &TermRef) -> (TermRef, Vec<TermRef>) {
        let mut args = Vec::new();
        let mut head = self.clone();
        while let Term::App { head: h, arg } = &*head {
            args.push(arg.clone());
            let h = h.clone();
            head = h;
        }
        args.reverse();
        (head, args)
    }

    pub fn head_const<'a>(self: &'a TermRef) -> Option<&'a Name> {
        let mut t = self;
        loop {
            match &**t {
                Term::App { head, .. } => t = head,
                Term::Const(c) => return Some(c),
                _ => return None,
            }
        }
    }

    /// True if no de Bruijn index escapes the term.
    pub fn is_locally_closed(&self) -> bool {
        fn go(t: &Term, depth: u32) -> bool {
            match t {
                Term::Bound(i) => *i < depth,
                Term::Lam { domain, body, .. } => {
                    domain.as_deref().is_none_or(|d| go(d, depth)) && go(body, depth + 1)
                }
                Term::Pi { domain, codomain, .. } => go(domain, depth) && go(codomain, depth + 1),
                Term::App { head, arg } => go(head, depth) && go(arg, depth),
                _ => true,
            }
        }
        go(self, 0)
    }

    /// True if the term mentions no free variables at all.
    pub fn is_closed(&self) -> bool {
        free_vars(self).is_empty()
    }

    pub fn contains_const(&self, name: &str) -> bool {
        match self {
            Term::Const(c) => c == name,
            Term::Lam { domain, body, .. } => {
                domain.as_deref().is_some_and(|d| d.contains_const(name))
                    || body.contains_const(name)
            }
            Term::Pi { domain, codomain, .. } => {
                domain.contains_const(name) || codomain.contains_const(name)
            }
            Term::App { head, arg } => head.contains_const(name) || arg.contains_const(name),
            _ => false,
        }
    }
}

/// Alpha-equivalence. Bound names are hints only, so this is plain equality.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    t == u
}

/// The set of free variable names of a term.
pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_free_vars(t, &mut out);
    out
}

fn collect_free_vars(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Lam { domain, body, .. } => {
            if let Some(d) = domain {
                collect_free_vars(d, out);
            }
            collect_free_vars(body, out);
        }
        Term::Pi { domain, codomain, .. } => {
            collect_free_vars(domain, out);
            collect_free_vars(codomain, out);
        }
        Term::App { head, arg } => {
            collect_free_vars(head, out);
            collect_free_vars(arg, out);
        }
        _ => {}
    }
}

/// Shifts dangling indices at or above `cutoff` by `by`.
pub fn shift(t: &TermRef, by: u32, cutoff: u32) -> TermRef {
    if by == 0 || t.is_locally_closed() {
        return t.clone();
    }
    match &**t {
        Term::Bound(i) => {
            if *i >= cutoff {
                Term::bound(i + by)
            } else {
                t.clone()
            }
        }
        Term::Lam { hint, domain, body } => Term::lam(
            hint.clone(),
            domain.as_ref().map(|d| shift(d, by, cutoff)),
            shift(body, by, cutoff + 1),
        ),
        Term::Pi { hint, domain, codomain } => Term::pi(
            hint.clone(),
            shift(domain, by, cutoff),
            shift(codomain, by, cutoff + 1),
        ),
        Term::App { head, arg } => Term::app(shift(head, by, cutoff), shift(arg, by, cutoff)),
        _ => t.clone(),
    }
}

/// Replaces index `depth` in `t` with `arg`, closing one binder level.
/// This is the beta step for a body taken out of its binder.
pub fn instantiate(t: &TermRef, arg: &TermRef) -> TermRef {
    fn go(t: &TermRef, depth: u32, arg: &TermRef) -> TermRef {
        match &**t {
            Term::Bound(i) => {
                if *i == depth {
                    shift(arg, depth, 0)
                } else if *i > depth {
                    Term::bound(i - 1)
                } else {
                    t.clone()
                }
            }
            Term::Lam { hint, domain, body } => Term::lam(
                hint.clone(),
                domain.as_ref().map(|d| go(d, depth, arg)),
                go(body, depth + 1, arg),
            ),
            Term::Pi { hint, domain, codomain } => Term::pi(
                hint.clone(),
                go(domain, depth, arg),
                go(codomain, depth + 1, arg),
            ),
            Term::App { head, arg: a } => Term::app(go(head, depth, arg), go(a, depth, arg)),
            _ => t.clone(),
        }
    }
    go(t, 0, arg)
}

/// Opens a binder body by replacing index zero with the free variable `name`.
pub fn open_with(body: &TermRef, name: &str) -> TermRef {
    instantiate(body, &Term::var(name))
}

/// Inverse of [`open_with`]: turns `Var(name)` back into a bound index,
/// ready to sit under one more binder.
pub fn close_over(t: &TermRef, name: &str) -> TermRef {
    fn go(t: &TermRef, depth: u32, name: &str) -> TermRef {
        match &**t {
            Term::Var(x) if x == name => Term::bound(depth),
            Term::Bound(i) if *i >= depth => Term::bound(i + 1),
            Term::Lam { hint, domain, body } => Term::lam(
                hint.clone(),
                domain.as_ref().map(|d| go(d, depth, name)),
                go(body, depth + 1, name),
            ),
            Term::Pi { hint, domain, codomain } => Term::pi(
                hint.clone(),
                go(domain, depth, name),
                go(codomain, depth + 1, name),
            ),
            Term::App { head, arg } => Term::app(go(head, depth, name), go(arg, depth, name)),
            _ => t.clone(),
        }
    }
    go(t, 0, name)
}

/// A finite simultaneous substitution on free variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Substitution {
    entries: Vec<(Name, TermRef)>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn singleton(name: impl Into<Name>, t: TermRef) -> Self {
        let mut s = Substitution::new();
        s.insert(name, t);
        s
    }

    /// Adds a binding. Later bindings for the same name are ignored; the
    /// domain stays duplicate-free.
    pub fn insert(&mut self, name: impl Into<Name>, t: TermRef) {
        let name = name.into();
        if self.lookup(&name).is_none() {
            self.entries.push((name, t));
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&TermRef> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(n, _)| n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &TermRef)> {
        self.entries.iter().map(|(n, t)| (n, t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(Name, TermRef)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Name, TermRef)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (n, t) in iter {
            s.insert(n, t);
        }
        s
    }
}

/// Capture-avoiding simultaneous substitution. Binders are nameless, so the
/// only care needed is shifting replacements that carry dangling indices as
/// they move under binders.
pub fn subst(t: &TermRef, theta: &Substitution) -> TermRef {
    if theta.is_empty() {
        return t.clone();
    }
    fn go(t: &TermRef, depth: u32, theta: &Substitution) -> TermRef {
        match &**t {
            Term::Var(x) => match theta.lookup(x) {
                Some(r) => shift(r, depth, 0),
                None => t.clone(),
            },
            Term::Lam { hint, domain, body } => Term::lam(
                hint.clone(),
                domain.as_ref().map(|d| go(d, depth, theta)),
                go(body, depth + 1, theta),
            ),
            Term::Pi { hint, domain, codomain } => Term::pi(
                hint.clone(),
                go(domain, depth, theta),
                go(codomain, depth + 1, theta),
            ),
            Term::App { head, arg } => Term::app(go(head, depth, theta), go(arg, depth, theta)),
            _ => t.clone(),
        }
    }
    go(t, 0, theta)
}

/// Contracts every visible beta redex, bottom up, within a step budget.
/// Used when emitting translated terms, whose inlined parameters otherwise
/// leave unannotated redex heads that cannot be re-inferred.
pub fn beta_simplify(t: &TermRef) -> TermRef {
    fn go(t: &TermRef, budget: &mut u32) -> TermRef {
        match &**t {
            Term::App { head, arg } => {
                let head = go(head, budget);
                let arg = go(arg, budget);
                if let Term::Lam { body, .. } = &*head {
                    if *budget > 0 {
                        *budget -= 1;
                        return go(&instantiate(body, &arg), budget);
                    }
                }
                Term::app(head, arg)
            }
            Term::Lam { hint, domain, body } => Term::lam(
                hint.clone(),
                domain.as_ref().map(|d| go(d, budget)),
                go(body, budget),
            ),
            Term::Pi { hint, domain, codomain } => {
                Term::pi(hint.clone(), go(domain, budget), go(codomain, budget))
            }
            _ => t.clone(),
        }
    }
    go(t, &mut 10_000)
}

/// Replaces constants by locally closed terms. Constants sit under no
/// binder discipline, so no shifting is involved.
pub fn replace_consts(
    t: &TermRef,
    map: &std::collections::HashMap<Name, TermRef>,
) -> TermRef {
    if map.is_empty() {
        return t.clone();
    }
    match &**t {
        Term::Const(c) => match map.get(c) {
            Some(r) => {
                debug_assert!(r.is_locally_closed());
                r.clone()
            }
            None => t.clone(),
        },
        Term::Lam { hint, domain, body } => Term::lam(
            hint.clone(),
            domain.as_ref().map(|d| replace_consts(d, map)),
            replace_consts(body, map),
        ),
        Term::Pi { hint, domain, codomain } => Term::pi(
            hint.clone(),
            replace_consts(domain, map),
            replace_consts(codomain, map),
        ),
        Term::App { head, arg } => {
            Term::app(replace_consts(head, map), replace_consts(arg, map))
        }
        _ => t.clone(),
    }
}

/// Renames free variables according to `f`. Constants and binders untouched.
pub fn rename_free_vars(t: &TermRef, f: &dyn Fn(&str) -> Name) -> TermRef {
    match &**t {
        Term::Var(x) => Term::var(f(x)),
        Term::Lam { hint, domain, body } => Term::lam(
            hint.clone(),
            domain.as_ref().map(|d| rename_free_vars(d, f)),
            rename_free_vars(body, f),
        ),
        Term::Pi { hint, domain, codomain } => Term::pi(
            hint.clone(),
            rename_free_vars(domain, f),
            rename_free_vars(codomain, f),
        ),
        Term::App { head, arg } => {
            Term::app(rename_free_vars(head, f), rename_free_vars(arg, f))
        }
        _ => t.clone(),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::pretty::print_term(self))
    }
}

/// An ordered typing context of named free variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Context {
    entries: Vec<(Name, TermRef)>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn lookup(&self, name: &str) -> Option<&TermRef> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    pub fn push(&mut self, name: impl Into<Name>, ty: TermRef) {
        let name = name.into();
        debug_assert!(!self.contains(&name), "duplicate context entry {name}");
        self.entries.push((name, ty));
    }

    pub fn extended(&self, name: impl Into<Name>, ty: TermRef) -> Self {
        let mut ctx = self.clone();
        ctx.push(name, ty);
        ctx
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &TermRef)> {
        self.entries.iter().map(|(n, t)| (n, t))
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(n, _)| n)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(Name, TermRef)> for Context {
    fn from_iter<I: IntoIterator<Item = (Name, TermRef)>>(iter: I) -> Self {
        let mut ctx = Context::new();
        for (n, t) in iter {
            ctx.push(n, t);
        }
        ctx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam_x_x(dom: TermRef) -> TermRef {
        Term::lam("x", Some(dom), Term::bound(0))
    }

    #[test]
    fn alpha_eq_ignores_hints() {
        let a = Term::con("A");
        let t = Term::lam("x", Some(a.clone()), Term::bound(0));
        let u = Term::lam("y", Some(a.clone()), Term::bound(0));
        assert_eq!(t, u);
        let v = Term::lam("x", Some(a), Term::con("c"));
        assert_ne!(t, v);
    }

    #[test]
    fn alpha_eq_products() {
        // Pi x : iota. x = x   vs   Pi z : iota. z = z
        let iota = Term::con("iota");
        let body = |v: TermRef| Term::apps(Term::con("eq"), [v.clone(), v]);
        let t = Term::pi("x", iota.clone(), body(Term::bound(0)));
        let u = Term::pi("z", iota, body(Term::bound(0)));
        assert_eq!(t, u);
    }

    #[test]
    fn empty_subst_is_identity() {
        let t = Term::apps(Term::con("f"), [Term::var("x"), Term::con("c")]);
        assert_eq!(subst(&t, &Substitution::new()), t);
    }

    #[test]
    fn subst_avoids_capture() {
        // (lam x. y)[y <- x]  must keep the binder and the substituted x apart:
        // the result body is the free variable x, not the bound one.
        let t = Term::lam("x", Some(Term::con("A")), Term::var("y"));
        let r = subst(&t, &Substitution::singleton("y", Term::var("x")));
        match &*r {
            Term::Lam { body, .. } => assert_eq!(**body, *Term::var("x")),
            _ => panic!("expected lambda"),
        }
        // and it is not alpha-equal to lam x. x
        assert_ne!(r, lam_x_x(Term::con("A")));
    }

    #[test]
    fn subst_shifts_dangling_indices() {
        // under a binder, a replacement with a dangling index must be shifted
        let t = Term::lam("z", Some(Term::con("A")), Term::var("y"));
        let r = subst(&t, &Substitution::singleton("y", Term::bound(0)));
        match &*r {
            Term::Lam { body, .. } => assert_eq!(**body, Term::Bound(1)),
            _ => panic!("expected lambda"),
        }
    }

    #[test]
    fn free_vars_examples() {
        let x = Term::var("x");
        let t = Term::apps(Term::con("times"), [x.clone(), Term::app(Term::con("inv"), x)]);
        assert_eq!(free_vars(&t), BTreeSet::from(["x".to_string()]));

        let u = Term::lam(
            "x",
            Some(Term::con("iota")),
            Term::apps(Term::con("times"), [Term::bound(0), Term::var("y")]),
        );
        assert_eq!(free_vars(&u), BTreeSet::from(["y".to_string()]));

        assert!(free_vars(&Term::con("one")).is_empty());
    }

    #[test]
    fn open_close_round_trip() {
        let body = Term::apps(Term::con("f"), [Term::bound(0), Term::var("y")]);
        let opened = open_with(&body, "fresh");
        assert_eq!(close_over(&opened, "fresh"), body);
    }

    #[test]
    fn instantiate_beta() {
        // (lam x : A. f x c) applied to v
        let body = Term::apps(Term::con("f"), [Term::bound(0), Term::con("c")]);
        let r = instantiate(&body, &Term::var("v"));
        assert_eq!(r, Term::apps(Term::con("f"), [Term::var("v"), Term::con("c")]));
    }
}
