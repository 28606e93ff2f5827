//! Every bundled theory checks; every bundled translation validates.

use lpmr::corpus;
use lpmr::morphism::{check_morphism, Morphism};
use lpmr::reduce::ReductionConfig;
use lpmr::relation::check_relation;

#[test]
fn all_theories_check() {
    for (name, _) in corpus::THEORY_SOURCES {
        let _ = corpus::theory(name); // panics with diagnostics on failure
    }
}

#[test]
fn identity_morphisms_valid_on_every_theory() {
    let config = ReductionConfig::default();
    for (name, _) in corpus::THEORY_SOURCES {
        let thy = corpus::theory(name);
        let report = check_morphism(&Morphism::identity(thy), &config);
        assert!(report.is_valid(), "identity on {name}: {report}");
    }
}

#[test]
fn group_morphisms_valid() {
    let config = ReductionConfig::default();
    for m in [corpus::mul_div_gr(), corpus::div_mul_gr()] {
        let report = check_morphism(&m, &config);
        assert!(report.is_valid(), "{report}");
    }
}

#[test]
fn logic_morphisms_valid() {
    let config = ReductionConfig::default();
    for m in [
        corpus::pl_to_computational(),
        corpus::pl_to_q0(),
        corpus::list_to_tree(),
        corpus::hfol_to_sfolp(),
        corpus::sfol_to_ufolp(),
        corpus::nat_to_intp(),
    ] {
        let report = check_morphism(&m, &config);
        assert!(report.is_valid(), "{report}");
    }
}

#[test]
fn relations_valid() {
    let config = ReductionConfig::default();
    for lr in [
        corpus::binary_group_relation(),
        corpus::unary_pl_relation(),
        corpus::ternary_smoke_relation(),
    ] {
        let report = check_relation(&lr, &config);
        assert!(report.is_valid(), "{report}");
    }
}

#[test]
fn relation_witness_sabotage() {
    use lpmr::parse::parse_term_str;
    use std::collections::HashMap;

    let config = ReductionConfig::default();
    let good = corpus::binary_group_relation();

    // replacing the witness for `one` by a reducible variant still checks:
    // refl (1*1*1) has classifier Prf (eq (1*1*1) (1*1*1)), convertible
    // with the required Prf (eq 1 1)
    let rebuild = |one_witness: &str| {
        let mut assignment: HashMap<_, _> = good.assignment().clone();
        assignment.insert("one".to_string(), parse_term_str(one_witness).unwrap());
        lpmr::relation::LogicalRelation::new(
            "sabotage",
            good.morphisms().to_vec(),
            assignment,
            good.irrelevant.clone(),
        )
        .unwrap()
    };

    let still_ok = rebuild("refl (times (times one one) one)");
    let report = check_relation(&still_ok, &config);
    assert!(report.is_valid(), "reducible witness should pass: {report}");

    // a witness at a fresh element has the wrong classifier
    let broken = rebuild("refl free_elem");
    let report = check_relation(&broken, &config);
    let one_entry = report
        .constants
        .iter()
        .find(|(n, _)| n == "one")
        .expect("entry for one");
    assert!(!one_entry.1.is_ok(), "{report}");
}
