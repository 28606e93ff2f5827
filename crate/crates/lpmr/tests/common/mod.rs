//! Shared generators and helpers for the randomized suites. Everything is
//! seeded explicitly so failures reproduce.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use lpmr::reduce::{apply_rule_at_root, whnf, ReductionConfig};
use lpmr::term::{instantiate, Context, Name, Substitution, Term, TermRef};
use lpmr::theory::Theory;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A raw (not necessarily well-typed) term over the given constants and
/// free variables, with well-scoped indices.
pub fn raw_term(rng: &mut ChaCha8Rng, depth: u32, consts: &[&str], vars: &[&str]) -> TermRef {
    fn go(
        rng: &mut ChaCha8Rng,
        depth: u32,
        binders: u32,
        consts: &[&str],
        vars: &[&str],
    ) -> TermRef {
        let leaf = depth == 0;
        let choice = if leaf { rng.gen_range(0..3) } else { rng.gen_range(0..6) };
        match choice {
            0 => Term::con(*consts.choose(rng).unwrap()),
            1 if !vars.is_empty() => Term::var(*vars.choose(rng).unwrap()),
            1 => Term::con(*consts.choose(rng).unwrap()),
            2 if binders > 0 => Term::bound(rng.gen_range(0..binders)),
            2 => Term::con(*consts.choose(rng).unwrap()),
            3 => Term::app(
                go(rng, depth - 1, binders, consts, vars),
                go(rng, depth - 1, binders, consts, vars),
            ),
            4 => Term::lam(
                format!("v{}", rng.gen_range(0..4)),
                if rng.gen_bool(0.7) {
                    Some(go(rng, depth - 1, binders, consts, vars))
                } else {
                    None
                },
                go(rng, depth - 1, binders + 1, consts, vars),
            ),
            _ => Term::pi(
                format!("v{}", rng.gen_range(0..4)),
                go(rng, depth - 1, binders, consts, vars),
                go(rng, depth - 1, binders + 1, consts, vars),
            ),
        }
    }
    go(rng, depth, 0, consts, vars)
}

/// A closed raw term whose every abstraction is annotated, so it survives
/// a print/parse round trip and conversion compares its binders fully.
pub fn printable_term(rng: &mut ChaCha8Rng, depth: u32, consts: &[&str]) -> TermRef {
    fn go(rng: &mut ChaCha8Rng, depth: u32, binders: u32, consts: &[&str]) -> TermRef {
        let choice = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..6) };
        match choice {
            0 => Term::con(*consts.choose(rng).unwrap()),
            1 if binders > 0 => Term::bound(rng.gen_range(0..binders)),
            1 => Term::con(*consts.choose(rng).unwrap()),
            2 | 3 => Term::app(
                go(rng, depth - 1, binders, consts),
                go(rng, depth - 1, binders, consts),
            ),
            4 => Term::lam(
                // hints may collide with constants on purpose; the printer
                // must rename
                (*consts.choose(rng).unwrap()).to_string(),
                Some(go(rng, depth - 1, binders, consts)),
                go(rng, depth - 1, binders + 1, consts),
            ),
            _ => Term::pi(
                format!("x{}", rng.gen_range(0..3)),
                go(rng, depth - 1, binders, consts),
                go(rng, depth - 1, binders + 1, consts),
            ),
        }
    }
    go(rng, depth, 0, consts)
}

/// A well-typed individual of the multiplicative group theory, over the
/// free variables in `ctx_vars`, with occasional beta redexes.
pub fn group_term(rng: &mut ChaCha8Rng, depth: u32, ctx_vars: &[&str], div_style: bool) -> TermRef {
    if depth == 0 || rng.gen_range(0..10) < 2 {
        return if !ctx_vars.is_empty() && rng.gen_bool(0.6) {
            Term::var(*ctx_vars.choose(rng).unwrap())
        } else {
            Term::con("one")
        };
    }
    match rng.gen_range(0..10) {
        0 | 1 | 2 | 3 => {
            let op = if div_style { "div" } else { "times" };
            Term::apps(
                Term::con(op),
                [
                    group_term(rng, depth - 1, ctx_vars, div_style),
                    group_term(rng, depth - 1, ctx_vars, div_style),
                ],
            )
        }
        4 | 5 => {
            if div_style {
                Term::apps(
                    Term::con("div"),
                    [Term::con("one"), group_term(rng, depth - 1, ctx_vars, div_style)],
                )
            } else {
                Term::app(Term::con("inv"), group_term(rng, depth - 1, ctx_vars, div_style))
            }
        }
        6 => {
            // a beta redex of type iota
            let body = {
                let inner = group_term(rng, depth - 1, ctx_vars, div_style);
                // splice the bound variable in occasionally
                if rng.gen_bool(0.5) {
                    let op = if div_style { "div" } else { "times" };
                    Term::apps(Term::con(op), [Term::bound(0), inner])
                } else {
                    inner
                }
            };
            Term::app(
                Term::lam("w", Some(Term::con("iota")), body),
                group_term(rng, depth - 1, ctx_vars, div_style),
            )
        }
        _ => group_term(rng, depth - 1, ctx_vars, div_style),
    }
}

/// The standing context for group terms.
pub fn group_ctx() -> Context {
    let mut ctx = Context::new();
    for v in ["x", "y", "z"] {
        ctx.push(v, Term::con("iota"));
    }
    ctx
}

/// A well-typed list over a free sort `a` with elements `e1`, `e2`.
pub fn list_term(rng: &mut ChaCha8Rng, depth: u32) -> TermRef {
    let a = Term::var("a");
    if depth == 0 || rng.gen_range(0..8) < 2 {
        return if rng.gen_bool(0.5) {
            Term::app(Term::con("nil"), a)
        } else {
            Term::var("l0")
        };
    }
    match rng.gen_range(0..8) {
        0 | 1 | 2 => Term::apps(
            Term::con("cons"),
            [a, list_elem(rng), list_term(rng, depth - 1)],
        ),
        3 | 4 => Term::apps(
            Term::con("concat"),
            [a, list_term(rng, depth - 1), list_term(rng, depth - 1)],
        ),
        5 => Term::apps(Term::con("tl"), [a, list_term(rng, depth - 1)]),
        _ => list_term(rng, depth - 1),
    }
}

fn list_elem(rng: &mut ChaCha8Rng) -> TermRef {
    Term::var(if rng.gen_bool(0.5) { "e1" } else { "e2" })
}

pub fn list_ctx() -> Context {
    let mut ctx = Context::new();
    ctx.push("a", Term::con("Set"));
    ctx.push("e1", Term::app(Term::con("El"), Term::var("a")));
    ctx.push("e2", Term::app(Term::con("El"), Term::var("a")));
    ctx.push(
        "l0",
        Term::app(Term::con("El"), Term::app(Term::con("list"), Term::var("a"))),
    );
    ctx
}

/// All redex occurrences reachable without crossing a binder whose
/// instantiation we cannot see; used to take single random steps.
fn step_positions(theory: &Theory, t: &TermRef, config: &ReductionConfig) -> Vec<TermRef> {
    // returns the possible one-step reducts of the whole term
    let mut reducts = Vec::new();
    // beta at the root
    let (head, args) = t.spine();
    if let Term::Lam { body, .. } = &*head {
        if !args.is_empty() {
            let contracted = instantiate(body, &args[0]);
            reducts.push(Term::apps(contracted, args[1..].iter().cloned()));
        }
    }
    // rules at the root
    if let Some(hc) = head.head_const() {
        for rule in theory.rules_for(hc) {
            let k = rule.lhs.spine().1.len();
            if args.len() < k {
                continue;
            }
            let prefix = Term::apps(head.clone(), args[..k].iter().cloned());
            if let Ok(Some(reduct)) = apply_rule_at_root(theory, rule, &prefix, config) {
                reducts.push(Term::apps(reduct, args[k..].iter().cloned()));
            }
        }
    }
    // inside subterms
    match &**t {
        Term::App { head, arg } => {
            for r in step_positions(theory, head, config) {
                reducts.push(Term::app(r, arg.clone()));
            }
            for r in step_positions(theory, arg, config) {
                reducts.push(Term::app(head.clone(), r));
            }
        }
        Term::Lam { hint, domain, body } => {
            if let Some(d) = domain {
                for r in step_positions(theory, d, config) {
                    reducts.push(Term::lam(hint.clone(), Some(r), body.clone()));
                }
            }
            for r in step_positions(theory, body, config) {
                reducts.push(Term::lam(hint.clone(), domain.clone(), r));
            }
        }
        Term::Pi { hint, domain, codomain } => {
            for r in step_positions(theory, domain, config) {
                reducts.push(Term::pi(hint.clone(), r, codomain.clone()));
            }
            for r in step_positions(theory, codomain, config) {
                reducts.push(Term::pi(hint.clone(), domain.clone(), r));
            }
        }
        _ => {}
    }
    reducts
}

/// Applies up to `steps` random reduction steps; the result is convertible
/// with the input by construction.
pub fn random_reduct(
    theory: &Theory,
    t: &TermRef,
    config: &ReductionConfig,
    rng: &mut ChaCha8Rng,
    steps: u32,
) -> TermRef {
    let mut current = t.clone();
    for _ in 0..steps {
        let options = step_positions(theory, &current, config);
        if options.is_empty() {
            break;
        }
        current = options.choose(rng).unwrap().clone();
    }
    current
}

/// A random substitution over some of the given variables.
pub fn random_subst(
    rng: &mut ChaCha8Rng,
    vars: &[&str],
    consts: &[&str],
) -> Substitution {
    let mut theta = Substitution::new();
    for v in vars {
        if rng.gen_bool(0.6) {
            let depth = rng.gen_range(0..3);
            theta.insert((*v).to_string(), raw_term(rng, depth, consts, &[]));
        }
    }
    theta
}

/// Head-reduction sanity helper.
pub fn whnf_ok(theory: &Theory, t: &TermRef, config: &ReductionConfig) -> Option<TermRef> {
    whnf(theory, t, config).ok()
}

pub type Names = Vec<Name>;
