//! The acceptance suite: one test per criterion, each printing a pass/fail
//! line. Randomized suites are seed-pinned and sized at 500+ cases.

mod common;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use rand::prelude::*;

use lpmr::corpus;
use lpmr::diag::has_errors;
use lpmr::loader::{load_module, MapResolver};
use lpmr::morphism::{
    check_morphism, morphisms_convertible, transport_definitions, Morphism,
};
use lpmr::parse::parse_open_term_str;
use lpmr::pretty::print_term;
use lpmr::reduce::{convertible, normalize, normalize_with, ReductionConfig, Strategy};
use lpmr::relation::{check_relation, LogicalRelation};
use lpmr::template::{check_files, generate_skeleton, ingest_morphism, TemplateKind};
use lpmr::term::{alpha_eq, subst, Context, Term, TermRef};
use lpmr::typing::{check_theory, Checker};
use lpmr::{parse_file, Theory};

fn criterion(n: u32, name: &str, run: impl FnOnce() -> Result<(), String>) {
    match run() {
        Ok(()) => println!("criterion {n} PASS: {name}"),
        Err(e) => {
            println!("criterion {n} FAIL: {name}: {e}");
            panic!("criterion {n} failed: {e}");
        }
    }
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

const CONFIG: ReductionConfig = ReductionConfig { eta: false, fuel: 100_000 };
const CONFIG_ETA: ReductionConfig = ReductionConfig { eta: true, fuel: 100_000 };

#[test]
fn criterion_1_corpus_soundness() {
    criterion(1, "all corpus theories pass check with exit 0", || {
        let dir = fixtures_dir();
        let mut files: Vec<PathBuf> = corpus::THEORY_SOURCES
            .iter()
            .map(|(name, _)| dir.join(format!("{name}.dk")))
            .collect();
        files.push(dir.join("empty.dk"));
        let outcome = check_files(&files, &[], &CONFIG);
        if outcome.exit_code() != 0 {
            return Err(format!(
                "exit {} with diagnostics: {:#?}",
                outcome.exit_code(),
                outcome.diagnostics
            ));
        }
        Ok(())
    });
}

#[test]
fn criterion_2_morphism_fixtures() {
    criterion(2, "all corpus morphisms valid with their anchors", || {
        // identity morphism on every corpus theory
        for (name, _) in corpus::THEORY_SOURCES {
            let report = check_morphism(&Morphism::identity(corpus::theory(name)), &CONFIG);
            if !report.is_valid() {
                return Err(format!("identity on {name}: {report}"));
            }
        }
        // the named translations
        let named = [
            corpus::mul_div_gr(),
            corpus::div_mul_gr(),
            corpus::pl_to_computational(),
            corpus::pl_to_q0(),
            corpus::list_to_tree(),
            corpus::hfol_to_sfolp(),
            corpus::sfol_to_ufolp(),
            corpus::nat_to_intp(),
        ];
        for m in &named {
            let report = check_morphism(m, &CONFIG);
            if !report.is_valid() {
                return Err(format!("{report}"));
            }
        }
        // composition, with eta on
        let composed = corpus::mul_gr_round_trip();
        let report = check_morphism(&composed, &CONFIG_ETA);
        if !report.is_valid() {
            return Err(format!("round trip: {report}"));
        }
        // the ingested reference pair from the demo listing
        let module = corpus::load("deduction_computation");
        let m = ingest_morphism(&module, "deduction_computation", &corpus::theory("deduction"))
            .map_err(|e| e.to_string())?;
        let report = check_morphism(&m, &CONFIG);
        if !report.is_valid() {
            return Err(format!("deduction/computation: {report}"));
        }

        // anchor: the image of x * inv x is convertible with one
        let mdg = corpus::mul_div_gr();
        let lhs = parse_open_term_str("times x (inv x)", &["x"]).map_err(|e| e.to_string())?;
        let image = mdg.apply(&lhs).map_err(|e| e.to_string())?;
        if !convertible(mdg.target(), &image, &Term::con("one"), &CONFIG).unwrap_or(false) {
            return Err("image of x * inv x is not 1 in the division theory".into());
        }

        // anchor: the concat/cons derivation chain for lists as trees
        let lt = corpus::list_to_tree();
        let vars = ["a", "x", "l1", "l2"];
        let lhs = parse_open_term_str("concat a (cons a x l1) l2", &vars).unwrap();
        let rhs = parse_open_term_str("cons a x (concat a l1 l2)", &vars).unwrap();
        let expected =
            parse_open_term_str("node a x (compo a l1 l2) (leaf a)", &vars).unwrap();
        let li = lt.apply(&lhs).unwrap();
        let ri = lt.apply(&rhs).unwrap();
        let lnf = normalize(lt.target(), &li, &CONFIG).map_err(|e| e.to_string())?;
        let rnf = normalize(lt.target(), &ri, &CONFIG).map_err(|e| e.to_string())?;
        if lnf != expected || rnf != expected {
            return Err(format!(
                "concat chain: {} vs {} (expected {})",
                print_term(&lnf),
                print_term(&rnf),
                print_term(&expected)
            ));
        }

        // anchor: the universal-eliminator image typechecks (pair eta is
        // what closes it), visible as its constant condition
        let hs = check_morphism(&corpus::hfol_to_sfolp(), &CONFIG);
        let all_e_ok = hs
            .constants
            .iter()
            .any(|(n, r)| n == "all_e" && r.is_ok());
        if !all_e_ok {
            return Err("all_e image fails its condition".into());
        }

        // anchor: the quantifier rule condition holds for the soft-to-
        // unsorted translation
        let su = check_morphism(&corpus::sfol_to_ufolp(), &CONFIG);
        let all_rule_ok = su
            .rules
            .iter()
            .any(|(rule, r)| rule.contains("all") && r.is_ok());
        if !all_rule_ok {
            return Err("quantifier rule condition fails for the sort-erasure".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_3_negative_suite() {
    criterion(3, "sabotages fail exactly where they should", || {
        // sabotaged inverse: conditions 1/2 fine, condition 3 fails
        let report = check_morphism(&corpus::mul_div_gr_sabotaged(), &CONFIG);
        if report.constants.iter().any(|(_, r)| !r.is_ok()) {
            return Err("sabotage leaked into constant conditions".into());
        }
        let bad_rule = report
            .rules
            .iter()
            .find(|(rule, r)| rule.contains("inv") && !r.is_ok());
        if bad_rule.is_none() || report.is_valid() {
            return Err(format!("sabotaged morphism not caught: {report}"));
        }

        // computational hard-sorted source: the quantifier rule cannot be
        // preserved (curried against uncurried), the implication rule can
        let report = check_morphism(&corpus::computational_hfol_to_sfolp(), &CONFIG);
        if report.constants.iter().any(|(_, r)| !r.is_ok()) {
            return Err("constant conditions should hold".into());
        }
        let imp_ok = report
            .rules
            .iter()
            .any(|(rule, r)| rule.contains("imp") && r.is_ok());
        let all_bad = report
            .rules
            .iter()
            .any(|(rule, r)| rule.contains("all") && !r.is_ok());
        if !imp_ok || !all_bad {
            return Err(format!("wrong failure profile: {report}"));
        }

        // rule shape rejections
        let (_, diags) = check_fragment(
            "iota : Type.\none : iota.\nc : iota -> iota.\n[x] x --> one.\n[x] c x --> y.\n",
        );
        let errors: Vec<_> = diags.iter().filter(|d| d.is_error()).collect();
        if errors.len() != 2 {
            return Err(format!("expected both rules rejected, got {errors:#?}"));
        }

        // a misdeclared axiom makes check exit 1
        let outcome = check_files(&[fixtures_dir().join("bad_pl.dk")], &[], &CONFIG);
        if outcome.exit_code() != 1 {
            return Err(format!("bad_pl should exit 1, got {}", outcome.exit_code()));
        }

        // the eta-dependent comparison of the composed morphism
        let composed = corpus::mul_gr_round_trip();
        let ident = Morphism::identity(corpus::theory("mulgr"));
        let with_eta = morphisms_convertible(&composed, &ident, &CONFIG_ETA)
            .map_err(|e| e.to_string())?;
        let without_eta = morphisms_convertible(&composed, &ident, &CONFIG)
            .map_err(|e| e.to_string())?;
        if !with_eta || without_eta {
            return Err(format!(
                "round trip vs identity: eta on {with_eta}, eta off {without_eta}"
            ));
        }
        Ok(())
    });
}

#[test]
fn criterion_4_relation_fixtures() {
    criterion(4, "corpus logical relations valid", || {
        let binary = check_relation(&corpus::binary_group_relation(), &CONFIG);
        if !binary.is_valid() {
            return Err(format!("{binary}"));
        }
        // every rule condition of the binary relation holds modulo the
        // declared proof irrelevance
        let modulo = binary
            .rules
            .iter()
            .all(|(_, r)| matches!(r, lpmr::morphism::ConditionResult::OkModuloIrrelevance { .. }));
        if !modulo {
            return Err("expected rule conditions to use irrelevance".into());
        }
        let unary = check_relation(&corpus::unary_pl_relation(), &CONFIG);
        if !unary.is_valid() {
            return Err(format!("{unary}"));
        }
        let ternary = check_relation(&corpus::ternary_smoke_relation(), &CONFIG);
        if !ternary.is_valid() {
            return Err(format!("{ternary}"));
        }
        Ok(())
    });
}

#[test]
fn criterion_5_metatheorem_property_suites() {
    criterion(5, "randomized metatheorem suites (seed-pinned)", || {
        substitution_lemma_morphism()?;
        substitution_lemma_relation()?;
        conversion_lemma_morphism()?;
        conversion_lemma_relation()?;
        judgment_preservation_by_transport()?;
        abstraction_theorem_on_definitions()?;
        strategy_independence()?;
        parse_pretty_round_trip()?;
        context_size_identity()?;
        subject_reduction_and_determinism()?;
        conversion_vs_normal_forms()?;
        Ok(())
    });
}

#[test]
fn criterion_6_tool_reproduction() {
    criterion(6, "skeleton generation reproduces the reference listing", || {
        let source = corpus::theory("deduction");
        let target = corpus::theory("computation");
        let skeleton = generate_skeleton(&source, &target, TemplateKind::Morphism)
            .map_err(|e| e.to_string())?;
        let rendered = skeleton.render();
        let expected = "\
#REQUIRE computation.
def Prop_mu : Type := TODO.
def Prf_mu : Prop_mu -> Type := TODO.
def imp_mu : Prop_mu -> Prop_mu -> Prop_mu := TODO.
def imp_i_mu : p : Prop_mu -> q : Prop_mu -> (Prf_mu p -> Prf_mu q) -> Prf_mu (imp_mu p q) := TODO.
def imp_e_mu : p : Prop_mu -> q : Prop_mu -> Prf_mu (imp_mu p q) -> Prf_mu p -> Prf_mu q := TODO.
thm lemma_imp_mu : p : Prop_mu -> Prf_mu (imp_mu p p) := p => imp_i_mu p p (H => H).
";
        let canon = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
        if canon(&rendered) != canon(expected) {
            return Err(format!("skeleton mismatch:\n{rendered}"));
        }
        if rendered.matches("_mu").count() < 6 || !rendered.contains("thm lemma_imp_mu") {
            return Err("expected six suffixed entries and the copied theorem".into());
        }

        // the filled skeleton checks as a file
        let filled = fixtures_dir().join("morphisms").join("deduction_computation.dk");
        let outcome = check_files(&[filled.clone()], &[fixtures_dir()], &CONFIG);
        if outcome.exit_code() != 0 {
            return Err(format!("filled skeleton fails: {:#?}", outcome.diagnostics));
        }

        // and the copied theorem transports and rechecks via the batch path
        let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("lemma_transport.dk");
        lpmr::template::cmd_transport(
            &filled,
            &fixtures_dir().join("deduction.dk"),
            &fixtures_dir().join("computation.dk"),
            &out,
            &CONFIG,
        )
        .map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
        if !text.contains("lemma_imp_mu") {
            return Err("transport output misses the theorem".into());
        }
        Ok(())
    });
}

// ---------------------------------------------------------------------
// criterion 5 suites

const CASES: usize = 500;

fn group_consts() -> Vec<&'static str> {
    vec!["one", "times", "inv"]
}

fn substitution_lemma_morphism() -> Result<(), String> {
    let mut rng = common::rng(0x5331);
    let m = corpus::mul_div_gr();
    let consts = group_consts();
    let vars = ["v1", "v2", "v3"];
    for i in 0..CASES {
        let t = common::raw_term(&mut rng, 4, &consts, &vars);
        let theta = common::random_subst(&mut rng, &vars, &consts);
        let lhs = m.apply(&subst(&t, &theta)).map_err(|e| e.to_string())?;
        let rhs = subst(
            &m.apply(&t).map_err(|e| e.to_string())?,
            &m.apply_subst(&theta).map_err(|e| e.to_string())?,
        );
        if !alpha_eq(&lhs, &rhs) {
            return Err(format!(
                "substitution lemma fails at case {i}: {} vs {}",
                print_term(&lhs),
                print_term(&rhs)
            ));
        }
    }
    Ok(())
}

fn substitution_lemma_relation() -> Result<(), String> {
    let mut rng = common::rng(0x4331);
    let lr = corpus::binary_group_relation();
    let consts = group_consts();
    let vars = ["v1", "v2", "v3"];
    for i in 0..CASES {
        let t = common::raw_term(&mut rng, 3, &consts, &vars);
        let theta = common::random_subst(&mut rng, &vars, &consts);
        let lhs = lr
            .translate_term(&subst(&t, &theta))
            .map_err(|e| e.to_string())?;
        let rhs = subst(
            &lr.translate_term(&t).map_err(|e| e.to_string())?,
            &lr.translate_subst(&theta).map_err(|e| e.to_string())?,
        );
        if !alpha_eq(&lhs, &rhs) {
            return Err(format!("relation substitution lemma fails at case {i}"));
        }
    }
    Ok(())
}

fn conversion_lemma_morphism() -> Result<(), String> {
    let mut rng = common::rng(0x3313);
    let cases = CASES;
    let morphisms = [corpus::mul_div_gr(), corpus::div_mul_gr()];
    for i in 0..cases {
        let div_style = i % 2 == 1;
        let m = &morphisms[i % 2];
        let t = common::group_term(&mut rng, 4, &["x", "y", "z"], div_style);
        let u = common::random_reduct(m.source(), &t, &CONFIG, &mut rng, 4);
        let ti = m.apply(&t).map_err(|e| e.to_string())?;
        let ui = m.apply(&u).map_err(|e| e.to_string())?;
        match convertible(m.target(), &ti, &ui, &CONFIG) {
            Ok(true) => {}
            Ok(false) => {
                return Err(format!(
                    "conversion not preserved at case {i}: {} vs {}",
                    print_term(&t),
                    print_term(&u)
                ))
            }
            Err(e) => return Err(format!("case {i}: {e}")),
        }
    }
    // the list-to-tree chain too
    let m = corpus::list_to_tree();
    for i in 0..200 {
        let t = common::list_term(&mut rng, 4);
        let u = common::random_reduct(m.source(), &t, &CONFIG, &mut rng, 4);
        let ti = m.apply(&t).map_err(|e| e.to_string())?;
        let ui = m.apply(&u).map_err(|e| e.to_string())?;
        if !convertible(m.target(), &ti, &ui, &CONFIG).map_err(|e| e.to_string())? {
            return Err(format!("list conversion not preserved at case {i}"));
        }
    }
    Ok(())
}

fn conversion_lemma_relation() -> Result<(), String> {
    // relations whose rule conditions hold literally preserve conversion
    // literally; sources here are rule-free so conversion is beta
    let mut rng = common::rng(0x4414);
    let lr = corpus::unary_pl_relation();
    let thy = lr.source().clone();
    for i in 0..CASES {
        let t = prop_term(&mut rng, 4);
        let u = common::random_reduct(&thy, &t, &CONFIG, &mut rng, 4);
        let ti = lr.translate_term(&t).map_err(|e| e.to_string())?;
        let ui = lr.translate_term(&u).map_err(|e| e.to_string())?;
        if !convertible(lr.target(), &ti, &ui, &CONFIG).map_err(|e| e.to_string())? {
            return Err(format!(
                "relation conversion not preserved at case {i}: {} vs {}",
                print_term(&t),
                print_term(&u)
            ));
        }
    }
    Ok(())
}

/// A Prop-typed term over p, q with beta redexes.
fn prop_term(rng: &mut rand_chacha::ChaCha8Rng, depth: u32) -> TermRef {
    if depth == 0 || rng.gen_range(0..8) < 2 {
        return Term::var(if rng.gen_bool(0.5) { "p" } else { "q" });
    }
    match rng.gen_range(0..8) {
        0..=3 => Term::apps(
            Term::con(if rng.gen_bool(0.5) { "imp" } else { "and" }),
            [prop_term(rng, depth - 1), prop_term(rng, depth - 1)],
        ),
        4 | 5 => Term::app(
            Term::lam(
                "r",
                Some(Term::con("Prop")),
                Term::apps(Term::con("imp"), [Term::bound(0), prop_term(rng, depth - 1)]),
            ),
            prop_term(rng, depth - 1),
        ),
        _ => prop_term(rng, depth - 1),
    }
}

fn judgment_preservation_by_transport() -> Result<(), String> {
    for m in [
        corpus::mul_div_gr(),
        corpus::div_mul_gr(),
        corpus::pl_to_computational(),
        corpus::pl_to_q0(),
        corpus::list_to_tree(),
        corpus::hfol_to_sfolp(),
        corpus::sfol_to_ufolp(),
        corpus::nat_to_intp(),
    ] {
        transport_definitions(&m, "_mu", &CONFIG)
            .map_err(|e| format!("{}: {e}", m.name))?;
    }
    Ok(())
}

fn abstraction_theorem_on_definitions() -> Result<(), String> {
    for lr in [corpus::binary_group_relation(), corpus::unary_pl_relation()] {
        let source = lr.source().clone();
        let source_checker = Checker::new(&source, &CONFIG);
        let target = lr.target().clone();
        let checker = Checker::new(&target, &CONFIG);
        for (name, classifier, body, _) in source.definitions() {
            // object-level definitions only
            let sort = source_checker
                .infer(&Context::new(), classifier)
                .map_err(|e| e.to_string())?;
            if !matches!(&*sort, Term::Type) {
                continue;
            }
            let witness = lr.translate_term(body).map_err(|e| e.to_string())?;
            let mut expected = lr.translate_term(classifier).map_err(|e| e.to_string())?;
            for i in 1..=lr.arity() {
                expected = Term::app(
                    expected,
                    lr.morphisms()[i - 1].apply(body).map_err(|e| e.to_string())?,
                );
            }
            checker
                .check(&Context::new(), &witness, &expected)
                .map_err(|e| format!("{}: {name}: {e}", lr.name))?;
        }
    }
    Ok(())
}

fn strategy_independence() -> Result<(), String> {
    let mut rng = common::rng(0x57a7);
    let mulgr = corpus::theory("mulgr");
    let divgr = corpus::theory("divgr");
    let list = corpus::theory("list");
    for i in 0..1000 {
        let div_style = i % 2 == 1;
        let thy: &Arc<Theory> = if div_style { &divgr } else { &mulgr };
        let t = common::group_term(&mut rng, 6, &["x", "y", "z"], div_style);
        let lo = normalize_with(thy, &t, &CONFIG, Strategy::LeftmostOutermost)
            .map_err(|e| format!("case {i}: {e}"))?;
        let ri = normalize_with(thy, &t, &CONFIG, Strategy::RightmostInnermost)
            .map_err(|e| format!("case {i}: {e}"))?;
        if !alpha_eq(&lo, &ri) {
            return Err(format!(
                "strategies disagree on {}: {} vs {}",
                print_term(&t),
                print_term(&lo),
                print_term(&ri)
            ));
        }
    }
    for i in 0..500 {
        let t = common::list_term(&mut rng, 6);
        let lo = normalize_with(&list, &t, &CONFIG, Strategy::LeftmostOutermost)
            .map_err(|e| format!("list case {i}: {e}"))?;
        let ri = normalize_with(&list, &t, &CONFIG, Strategy::RightmostInnermost)
            .map_err(|e| format!("list case {i}: {e}"))?;
        if !alpha_eq(&lo, &ri) {
            return Err(format!("list strategies disagree on {}", print_term(&t)));
        }
    }
    Ok(())
}

fn parse_pretty_round_trip() -> Result<(), String> {
    let mut rng = common::rng(0x9a55);
    let consts = ["imp", "and", "Prop", "Prf", "one", "times"];
    for i in 0..CASES {
        let t = common::printable_term(&mut rng, 5, &consts);
        let text = print_term(&t);
        let back = lpmr::parse_term_str(&text)
            .map_err(|e| format!("case {i}: reparse of `{text}` fails: {e}"))?;
        if !alpha_eq(&t, &back) {
            return Err(format!("round trip differs for `{text}`"));
        }
    }
    Ok(())
}

fn context_size_identity() -> Result<(), String> {
    let mut rng = common::rng(0xc0de);
    for lr in [
        corpus::unary_pl_relation(),
        corpus::binary_group_relation(),
        corpus::ternary_smoke_relation(),
    ] {
        let ty: TermRef = match lr.arity() {
            2 => Term::con("iota"),
            3 => Term::con("b"),
            _ => Term::con("Prop"),
        };
        for _ in 0..170 {
            let len = rng.gen_range(0..8);
            let mut ctx = Context::new();
            for k in 0..len {
                ctx.push(format!("w{k}"), ty.clone());
            }
            let out = lr.translate_context(&ctx).map_err(|e| e.to_string())?;
            if out.len() != (lr.arity() + 1) * ctx.len() {
                return Err(format!(
                    "duplicated context length {} for |ctx| = {} at arity {}",
                    out.len(),
                    ctx.len(),
                    lr.arity()
                ));
            }
        }
    }
    Ok(())
}

fn subject_reduction_and_determinism() -> Result<(), String> {
    let mut rng = common::rng(0x5e7);
    let mulgr = corpus::theory("mulgr");
    let list = corpus::theory("list");
    let group_ctx = common::group_ctx();
    let list_ctx = common::list_ctx();
    for i in 0..CASES {
        let (thy, ctx, t) = if i % 3 == 2 {
            (&list, &list_ctx, common::list_term(&mut rng, 5))
        } else {
            (&mulgr, &group_ctx, common::group_term(&mut rng, 5, &["x", "y", "z"], false))
        };
        let checker = Checker::new(thy, &CONFIG);
        let ty = checker
            .infer(ctx, &t)
            .map_err(|e| format!("case {i}: {} untypable: {e}", print_term(&t)))?;
        // determinism
        let ty2 = checker.infer(ctx, &t).map_err(|e| e.to_string())?;
        if !alpha_eq(&ty, &ty2) {
            return Err(format!("inference nondeterministic at case {i}"));
        }
        // checking against the inferred classifier succeeds
        checker
            .check(ctx, &t, &ty)
            .map_err(|e| format!("case {i}: check against own classifier: {e}"))?;
        // subject reduction
        let nf = normalize(thy, &t, &CONFIG).map_err(|e| e.to_string())?;
        let nf_ty = checker
            .infer(ctx, &nf)
            .map_err(|e| format!("case {i}: normal form untypable: {e}"))?;
        if !convertible(thy, &ty, &nf_ty, &CONFIG).map_err(|e| e.to_string())? {
            return Err(format!(
                "classifier not preserved at case {i}: {} vs {}",
                print_term(&ty),
                print_term(&nf_ty)
            ));
        }
    }
    Ok(())
}

fn conversion_vs_normal_forms() -> Result<(), String> {
    let mut rng = common::rng(0xbeef);
    let mulgr = corpus::theory("mulgr");
    for i in 0..CASES {
        let t = common::group_term(&mut rng, 4, &["x", "y"], false);
        let u = if rng.gen_bool(0.5) {
            common::random_reduct(&mulgr, &t, &CONFIG, &mut rng, 3)
        } else {
            common::group_term(&mut rng, 4, &["x", "y"], false)
        };
        let conv = convertible(&mulgr, &t, &u, &CONFIG).map_err(|e| e.to_string())?;
        let tn = normalize(&mulgr, &t, &CONFIG).map_err(|e| e.to_string())?;
        let un = normalize(&mulgr, &u, &CONFIG).map_err(|e| e.to_string())?;
        let nf_eq = alpha_eq(&tn, &un);
        if conv != nf_eq {
            return Err(format!(
                "conversion and normal forms disagree at case {i}: {} vs {}",
                print_term(&t),
                print_term(&u)
            ));
        }
        // symmetry
        if conv != convertible(&mulgr, &u, &t, &CONFIG).map_err(|e| e.to_string())? {
            return Err(format!("conversion asymmetric at case {i}"));
        }
    }
    // transitivity on sampled reduction triples
    for i in 0..200 {
        let t = common::group_term(&mut rng, 4, &["x", "y"], false);
        let u = common::random_reduct(&mulgr, &t, &CONFIG, &mut rng, 2);
        let v = common::random_reduct(&mulgr, &u, &CONFIG, &mut rng, 2);
        let tu = convertible(&mulgr, &t, &u, &CONFIG).map_err(|e| e.to_string())?;
        let uv = convertible(&mulgr, &u, &v, &CONFIG).map_err(|e| e.to_string())?;
        let tv = convertible(&mulgr, &t, &v, &CONFIG).map_err(|e| e.to_string())?;
        if tu && uv && !tv {
            return Err(format!("conversion not transitive at case {i}"));
        }
    }
    Ok(())
}

fn check_fragment(src: &str) -> (Theory, Vec<lpmr::Diagnostic>) {
    let file = parse_file(src).unwrap();
    let mut thy = Theory::new("fragment");
    for (entry, _) in file.entries {
        match entry {
            lpmr::parse::ParsedEntry::Decl { name, classifier, .. } => {
                thy.push(lpmr::Entry::Decl { name, classifier }).unwrap();
            }
            lpmr::parse::ParsedEntry::Def { name, classifier, body, opaque } => {
                thy.push(lpmr::Entry::Def { name, classifier, body, opaque }).unwrap();
            }
            lpmr::parse::ParsedEntry::Rule { vars, lhs, rhs } => {
                thy.push(lpmr::Entry::Rule(lpmr::RewriteRule::new(vars, lhs, rhs)))
                    .unwrap();
            }
            lpmr::parse::ParsedEntry::Pragma(_) => {}
        }
    }
    check_theory(&thy, &CONFIG)
}

// keep the map-based loader exercised from the acceptance target as well
#[test]
fn embedded_and_file_fixtures_agree() {
    let mut r = MapResolver::new();
    for (name, src) in corpus::THEORY_SOURCES {
        r.insert(*name, *src);
    }
    let from_map = load_module("mulgr", &r, &CONFIG).unwrap();
    assert!(!has_errors(&from_map.diagnostics));
    let from_files = check_files(&[fixtures_dir().join("mulgr.dk")], &[], &CONFIG);
    assert_eq!(from_files.exit_code(), 0);
    let _ = HashMap::<String, String>::new();
}
