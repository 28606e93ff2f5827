//! The bundled theories, morphisms and logical relations used by the
//! examples and the test suites. Everything here is also available as
//! plain `.dk` files under `fixtures/`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::diag::has_errors;
use crate::loader::{load_module, LoadedModule, MapResolver};
use crate::morphism::Morphism;
use crate::parse::parse_term_str;
use crate::reduce::ReductionConfig;
use crate::relation::LogicalRelation;
use crate::term::{Name, TermRef};
use crate::theory::Theory;

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name, ".dk")))),*]
    };
}

/// Theory sources, in dependency order.
pub const THEORY_SOURCES: &[(&str, &str)] = fixtures![
    "pl",
    "pleq",
    "mulgr",
    "divgr",
    "computational_pl",
    "deduction",
    "computation",
    "sorts",
    "list",
    "tree",
    "ufol",
    "sfol",
    "sfolp",
    "hfol",
    "computational_hfol",
    "ufolp",
    "nat",
    "int",
    "intp",
    "q0",
    "mulgr_irr",
    "smoke3",
];

/// Filled translation skeletons, each requiring its target theory.
pub const FILLED_MORPHISM_SOURCES: &[(&str, &str)] = &[
    (
        "deduction_computation",
        include_str!("../fixtures/morphisms/deduction_computation.dk"),
    ),
    ("mul_div", include_str!("../fixtures/morphisms/mul_div.dk")),
    ("div_mul", include_str!("../fixtures/morphisms/div_mul.dk")),
    (
        "pl_computational",
        include_str!("../fixtures/morphisms/pl_computational.dk"),
    ),
    ("list_tree", include_str!("../fixtures/morphisms/list_tree.dk")),
    ("hs", include_str!("../fixtures/morphisms/hs.dk")),
    ("su", include_str!("../fixtures/morphisms/su.dk")),
    ("ni", include_str!("../fixtures/morphisms/ni.dk")),
];

/// A resolver over every bundled module.
pub fn resolver() -> MapResolver {
    let mut r = MapResolver::new();
    for (name, src) in THEORY_SOURCES {
        r.insert(*name, *src);
    }
    for (name, src) in FILLED_MORPHISM_SOURCES {
        r.insert(*name, *src);
    }
    r
}

/// Loads and checks a bundled module; panics if it does not check, since
/// the corpus is expected to be sound.
pub fn theory(name: &str) -> Arc<Theory> {
    Arc::new(load(name).theory)
}

pub fn load(name: &str) -> LoadedModule {
    let module = load_module(name, &resolver(), &ReductionConfig::default())
        .unwrap_or_else(|e| panic!("corpus module {name} fails to load: {e}"));
    assert!(
        !has_errors(&module.diagnostics),
        "corpus module {name} has errors: {:#?}",
        module.diagnostics
    );
    module
}

fn assignment(pairs: &[(&str, &str)]) -> HashMap<Name, TermRef> {
    pairs
        .iter()
        .map(|(c, t)| {
            (
                c.to_string(),
                parse_term_str(t).unwrap_or_else(|e| panic!("bad corpus term {t}: {e}")),
            )
        })
        .collect()
}

const PLEQ_IDENTITY: &[(&str, &str)] = &[
    ("Prop", "Prop"),
    ("Prf", "Prf"),
    ("imp", "imp"),
    ("and", "and"),
    ("imp_i", "imp_i"),
    ("imp_e", "imp_e"),
    ("and_i", "and_i"),
    ("and_el", "and_el"),
    ("and_er", "and_er"),
    ("iota", "iota"),
    ("eq", "eq"),
    ("refl", "refl"),
    ("leib", "leib"),
];

fn with_pleq_identity(extra: &[(&str, &str)]) -> HashMap<Name, TermRef> {
    let mut map = assignment(PLEQ_IDENTITY);
    map.extend(assignment(extra));
    map
}

/// Multiplication in terms of division.
pub fn mul_div_gr() -> Morphism {
    Morphism::new(
        "MulDivGr",
        theory("mulgr"),
        theory("divgr"),
        with_pleq_identity(&[
            ("times", "x : iota => y : iota => div x (div one y)"),
            ("one", "one"),
            ("inv", "x : iota => div one x"),
        ]),
    )
    .expect("MulDivGr assignment is well-formed")
}

/// Division in terms of multiplication.
pub fn div_mul_gr() -> Morphism {
    Morphism::new(
        "DivMulGr",
        theory("divgr"),
        theory("mulgr"),
        with_pleq_identity(&[
            ("div", "x : iota => y : iota => times x (inv y)"),
            ("one", "one"),
        ]),
    )
    .expect("DivMulGr assignment is well-formed")
}

/// The sabotaged variant whose inverse image forgets to invert; its rule
/// conditions must fail.
pub fn mul_div_gr_sabotaged() -> Morphism {
    Morphism::new(
        "MulDivGr_sabotaged",
        theory("mulgr"),
        theory("divgr"),
        with_pleq_identity(&[
            ("times", "x : iota => y : iota => div x (div one y)"),
            ("one", "one"),
            ("inv", "x : iota => x"),
        ]),
    )
    .expect("assignment shape is still fine")
}

/// Deduction-style propositional logic into its computational variant.
pub fn pl_to_computational() -> Morphism {
    Morphism::new(
        "PLComputational",
        theory("pl"),
        theory("computational_pl"),
        assignment(&[
            ("Prop", "Prop"),
            ("Prf", "Prf"),
            ("imp", "imp"),
            ("and", "and"),
            ("imp_i", "p => q => H => H"),
            ("imp_e", "p => q => H => H"),
            ("and_i", "p => Hp => q => Hq => r => f => f Hp Hq"),
            ("and_el", "p => q => H => H p (Hp => Hq => Hp)"),
            ("and_er", "p => q => H => H q (Hp => Hq => Hq)"),
        ]),
    )
    .expect("assignment is well-formed")
}

/// Propositional logic into the equality-only higher-order logic.
pub fn pl_to_q0() -> Morphism {
    Morphism::new(
        "PLQ0",
        theory("pl"),
        theory("q0"),
        assignment(&[
            ("Prop", "El o"),
            ("Prf", "Prf"),
            ("imp", "impq"),
            ("and", "and"),
            ("imp_i", "imp_i_q0"),
            ("imp_e", "imp_e_q0"),
            ("and_i", "and_i"),
            ("and_el", "and_el"),
            ("and_er", "and_er"),
        ]),
    )
    .expect("assignment is well-formed")
}

/// Lists as left-spine binary trees.
pub fn list_to_tree() -> Morphism {
    Morphism::new(
        "ListTree",
        theory("list"),
        theory("tree"),
        assignment(&[
            ("Set", "Set"),
            ("El", "El"),
            ("list", "tree"),
            ("nil", "leaf"),
            (
                "cons",
                "a : Set => x : El a => l : El (tree a) => node a x l (leaf a)",
            ),
            ("hd", "a : Set => l : El (tree a) => root a l"),
            ("tl", "a : Set => l : El (tree a) => left a l"),
            (
                "concat",
                "a : Set => l1 : El (tree a) => l2 : El (tree a) => compo a l1 l2",
            ),
        ]),
    )
    .expect("assignment is well-formed")
}

/// Hard-sorted logic into soft-sorted logic with pairs.
pub fn hfol_to_sfolp() -> Morphism {
    Morphism::new(
        "hs",
        theory("hfol"),
        theory("sfolp"),
        assignment(&[
            ("Set", "Set"),
            ("El", "a : Set => pair a"),
            ("Prop", "Prop"),
            ("Prf", "Prf"),
            ("imp", "imp"),
            (
                "all",
                "a : Set => p : (pair a -> Prop) => all a (x => h => p (mk_pair a x h))",
            ),
            (
                "all_i",
                "a : Set => p : (pair a -> Prop) => H : (m : pair a -> Prf (p m)) => \
                 x => h => H (mk_pair a x h)",
            ),
            (
                "all_e",
                "a : Set => p : (pair a -> Prop) => \
                 H : Prf (all a (x => h => p (mk_pair a x h))) => \
                 m : pair a => H (fst a m) (snd a m)",
            ),
        ]),
    )
    .expect("assignment is well-formed")
}

/// The same shape from the computational variant of hard-sorted logic;
/// its quantifier rule condition cannot hold (curried against uncurried).
pub fn computational_hfol_to_sfolp() -> Morphism {
    Morphism::new(
        "hs_computational",
        theory("computational_hfol"),
        theory("sfolp"),
        assignment(&[
            ("Set", "Set"),
            ("El", "a : Set => pair a"),
            ("Prop", "Prop"),
            ("Prf", "Prf"),
            ("imp", "imp"),
            (
                "all",
                "a : Set => p : (pair a -> Prop) => all a (x => h => p (mk_pair a x h))",
            ),
        ]),
    )
    .expect("assignment is well-formed")
}

/// Soft-sorted logic into unsorted logic with dependent implication.
pub fn sfol_to_ufolp() -> Morphism {
    Morphism::new(
        "su",
        theory("sfol"),
        theory("ufolp"),
        assignment(&[
            ("tm", "tm"),
            ("Set", "tm -> Prop"),
            ("Prop", "Prop"),
            ("Prf", "Prf"),
            ("oft", "x : tm => a : (tm -> Prop) => Prf (a x)"),
            ("imp", "p : Prop => q : Prop => impd p (h => q)"),
            (
                "all",
                "a : (tm -> Prop) => p : (x : tm -> Prf (a x) -> Prop) => \
                 all (x => impd (a x) (h => p x h))",
            ),
        ]),
    )
    .expect("assignment is well-formed")
}

/// Natural numbers as non-negative integers.
pub fn nat_to_intp() -> Morphism {
    Morphism::new(
        "NI",
        theory("nat"),
        theory("intp"),
        assignment(&[
            ("Set", "Set"),
            ("El", "El"),
            ("Prop", "Prop"),
            ("Prf", "Prf"),
            ("imp", "imp"),
            ("all", "all"),
            ("nat", "natp"),
            ("zero", "zerop"),
            ("succ", "succp"),
            ("geq", "geqp"),
            ("ax_refl", "m => ax_refl (fst int pos m)"),
            (
                "ax_trans",
                "m1 => m2 => m3 => h12 => h23 => \
                 ax_trans (fst int pos m1) (fst int pos m2) (fst int pos m3) h12 h23",
            ),
            ("ax_succ", "m => ax_succ (fst int pos m)"),
            ("ax_absurd", "m => h => ax_absurd (fst int pos m) h"),
            ("rec", "rec_pair"),
        ]),
    )
    .expect("assignment is well-formed")
}

/// The composition of the two group morphisms, back on the multiplicative
/// side. With eta it agrees definitionally with the identity.
pub fn mul_gr_round_trip() -> Morphism {
    mul_div_gr()
        .compose(&div_mul_gr())
        .expect("targets and sources line up")
}

/// The binary logical relation stating that the group round trip agrees
/// with the identity, up to provable equality on individuals and
/// equivalence on propositions. The target extends the group theory with
/// a unit type and a proof irrelevance axiom; proof-level rule conditions
/// hold modulo that irrelevance.
pub fn binary_group_relation() -> LogicalRelation {
    let mulgr = theory("mulgr");
    let target = theory("mulgr_irr");
    let incl = Morphism::inclusion(mulgr.clone(), target.clone());
    let round_trip = mul_gr_round_trip()
        .compose(&incl)
        .expect("round trip lands in the group theory");
    let ident = Morphism::identity(mulgr.clone())
        .compose(&incl)
        .expect("identity lands in the group theory");
    let star_after = |n: usize| -> String {
        // n leading binders, then the unit witness
        let binders: Vec<String> = (0..n).map(|i| format!("v{i} => ")).collect();
        format!("{}star", binders.join(""))
    };
    let lr = LogicalRelation::new(
        "MulGrRoundTrip",
        vec![round_trip, ident],
        assignment(&[
            ("Prop", "p1 : Prop => p2 : Prop => Prf (and (imp p1 p2) (imp p2 p1))"),
            (
                "Prf",
                "p1 : Prop => p2 : Prop => H : Prf (and (imp p1 p2) (imp p2 p1)) => \
                 H1 : Prf p1 => H2 : Prf p2 => unit",
            ),
            ("imp", "iff_imp_cong"),
            ("and", "iff_and_cong"),
            ("iota", "x1 : iota => x2 : iota => Prf (eq x1 x2)"),
            ("eq", "iff_eq_cong"),
            ("refl", &star_after(3)),
            ("leib", &star_after(15)),
            ("imp_i", &star_after(9)),
            ("imp_e", &star_after(12)),
            ("and_i", &star_after(12)),
            ("and_el", &star_after(9)),
            ("and_er", &star_after(9)),
            ("times", "times_cong"),
            ("one", "refl one"),
            ("inv", "inv_cong"),
        ]),
        vec!["Prf".to_string()],
    )
    .expect("relation assignment is well-formed");
    lr
}

/// A unary relation over the identity of propositional logic whose
/// predicate is a tautology everywhere.
pub fn unary_pl_relation() -> LogicalRelation {
    let pl = theory("pl");
    LogicalRelation::new(
        "TrivialPL",
        vec![Morphism::identity(pl)],
        assignment(&[
            ("Prop", "p : Prop => Prf (imp p p)"),
            (
                "Prf",
                "p : Prop => p_r : Prf (imp p p) => H : Prf p => Prf (imp p p)",
            ),
            (
                "imp",
                "p1 => p_r => q1 => q_r => imp_i (imp p1 q1) (imp p1 q1) (H => H)",
            ),
            (
                "and",
                "p1 => p_r => q1 => q_r => imp_i (and p1 q1) (and p1 q1) (H => H)",
            ),
            (
                "imp_i",
                "p1 => p_r => q1 => q_r => f1 => f_r => \
                 imp_i (imp p1 q1) (imp p1 q1) (H => H)",
            ),
            (
                "imp_e",
                "p1 => p_r => q1 => q_r => f1 => f_r => H1 => H_r => imp_i q1 q1 (K => K)",
            ),
            (
                "and_i",
                "p1 => p_r => H1 => H_r => q1 => q_r => K1 => K_r => \
                 imp_i (and p1 q1) (and p1 q1) (H => H)",
            ),
            (
                "and_el",
                "p1 => p_r => q1 => q_r => H1 => H_r => imp_i p1 p1 (K => K)",
            ),
            (
                "and_er",
                "p1 => p_r => q1 => q_r => H1 => H_r => imp_i q1 q1 (K => K)",
            ),
        ]),
        vec![],
    )
    .expect("relation assignment is well-formed")
}

/// A ternary smoke relation over three identity morphisms of a tiny
/// theory with an explicit ternary relation symbol. The witness for the
/// relation symbol itself is the constantly-`b` family, so its own
/// witnesses are plain elements.
pub fn ternary_smoke_relation() -> LogicalRelation {
    let thy = theory("smoke3");
    let id = || Morphism::identity(thy.clone());
    let lambdas = |n: usize, body: &str| -> String {
        let binders: Vec<String> = (0..n).map(|i| format!("v{i} => ")).collect();
        format!("{}{body}", binders.join(""))
    };
    LogicalRelation::new(
        "Smoke3",
        vec![id(), id(), id()],
        assignment(&[
            ("b", "rel3"),
            ("e", "rel3_e"),
            ("f", "rel3_f"),
            // 12 duplicated arguments, then the three relation witnesses
            ("rel3", &lambdas(15, "b")),
            ("rel3_e", "e"),
            // four binder groups of four: three arguments and a hypothesis
            ("rel3_f", &lambdas(16, "e")),
        ]),
        vec![],
    )
    .expect("relation assignment is well-formed")
}
