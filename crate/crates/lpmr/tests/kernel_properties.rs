//! Property tests for the term kernel: substitution composition,
//! alpha-equivalence as an equivalence relation, free-variable bounds, and
//! the print/parse round trip.

use std::collections::BTreeSet;

use proptest::prelude::*;

use lpmr::parse::parse_term_str;
use lpmr::pretty::print_term;
use lpmr::term::{alpha_eq, free_vars, subst, Substitution, Term, TermRef};

const CONSTS: &[&str] = &["imp", "and", "Prop", "one", "times"];
const VARS: &[&str] = &["u", "v", "w"];

fn leaf() -> impl Strategy<Value = TermRef> {
    prop_oneof![
        proptest::sample::select(CONSTS).prop_map(Term::con),
        proptest::sample::select(VARS).prop_map(Term::var),
    ]
}

/// Raw terms with well-scoped indices; binders are introduced by the
/// recursive cases closing over a leaf variable name.
fn term_strategy() -> impl Strategy<Value = TermRef> {
    leaf().prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (inner.clone(), inner.clone(), proptest::sample::select(VARS)).prop_map(
                |(dom, body, x)| Term::lam(x, Some(dom), lpmr::term::close_over(&body, x))
            ),
            (inner.clone(), inner.clone(), proptest::sample::select(VARS)).prop_map(
                |(dom, cod, x)| Term::pi(x, dom, lpmr::term::close_over(&cod, x))
            ),
            (inner.clone(), proptest::sample::select(VARS)).prop_map(|(body, x)| Term::lam(
                x,
                None,
                lpmr::term::close_over(&body, x)
            )),
        ]
    })
}

fn closed_term_strategy() -> impl Strategy<Value = TermRef> {
    proptest::sample::select(CONSTS).prop_map(Term::con).prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (inner.clone(), inner.clone(), proptest::sample::select(CONSTS)).prop_map(
                |(dom, body, x)| {
                    // hint collides with a constant on purpose
                    Term::lam(x, Some(dom), body)
                }
            ),
            (inner.clone(), inner.clone()).prop_map(|(dom, cod)| Term::arrow(dom, cod)),
        ]
    })
}

fn subst_strategy() -> impl Strategy<Value = Substitution> {
    proptest::collection::vec(
        (proptest::sample::select(VARS), closed_term_strategy()),
        0..3,
    )
    .prop_map(|pairs| {
        pairs
            .into_iter()
            .map(|(v, t)| (v.to_string(), t))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn subst_composes(t in term_strategy(), s1 in subst_strategy(), s2 in subst_strategy()) {
        // applying s1 then s2 equals applying the composed substitution,
        // for closed-range substitutions
        let lhs = subst(&subst(&t, &s1), &s2);
        let composed: Substitution = s1
            .iter()
            .map(|(x, u)| (x.clone(), subst(u, &s2)))
            .chain(s2.iter().map(|(x, u)| (x.clone(), u.clone())))
            .collect();
        let rhs = subst(&t, &composed);
        prop_assert!(alpha_eq(&lhs, &rhs), "{} vs {}", print_term(&lhs), print_term(&rhs));
    }

    #[test]
    fn alpha_equivalence_relation(t in term_strategy(), u in term_strategy(), v in term_strategy()) {
        prop_assert!(alpha_eq(&t, &t));
        prop_assert_eq!(alpha_eq(&t, &u), alpha_eq(&u, &t));
        if alpha_eq(&t, &u) && alpha_eq(&u, &v) {
            prop_assert!(alpha_eq(&t, &v));
        }
    }

    #[test]
    fn free_vars_of_substitution(t in term_strategy(), u in closed_term_strategy()) {
        let theta = Substitution::singleton("u", u.clone());
        let after = free_vars(&subst(&t, &theta));
        let mut bound: BTreeSet<String> = free_vars(&t);
        bound.remove("u");
        bound.extend(free_vars(&u));
        prop_assert!(after.is_subset(&bound), "{:?} not within {:?}", after, bound);
    }

    #[test]
    fn print_parse_round_trip(t in closed_term_strategy()) {
        let text = print_term(&t);
        let back = parse_term_str(&text).unwrap();
        prop_assert!(alpha_eq(&t, &back), "round trip differs for {}", text);
    }
}
