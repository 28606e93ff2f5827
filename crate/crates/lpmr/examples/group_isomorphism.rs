//! Two presentations of groups translate into each other, and the round
//! trip agrees with the identity once eta enters the picture.
//!
//! ```bash
//! cargo run -p lpmr --example group_isomorphism
//! ```

use lpmr::corpus;
use lpmr::morphism::{check_morphism, morphisms_convertible, Morphism};
use lpmr::parse::parse_open_term_str;
use lpmr::pretty::print_term;
use lpmr::reduce::{normalize, ReductionConfig};

fn main() {
    let config = ReductionConfig::default();
    let eta = ReductionConfig { eta: true, ..config };

    let mul_div = corpus::mul_div_gr();
    let div_mul = corpus::div_mul_gr();
    for m in [&mul_div, &div_mul] {
        let report = check_morphism(m, &config);
        println!("{report}");
    }

    println!("image of a cancellation, normalized in the division theory:");
    let t = parse_open_term_str("times x (inv x)", &["x"]).unwrap();
    let image = mul_div.apply(&t).unwrap();
    let nf = normalize(mul_div.target(), &image, &config).unwrap();
    println!("  times x (inv x)  |->  {}  -->*  {}", print_term(&image), print_term(&nf));

    let composed = corpus::mul_gr_round_trip();
    println!("\nround trip assignments:");
    for c in ["times", "one", "inv"] {
        println!("  {c} |-> {}", print_term(&composed.assignment()[c]));
    }
    let report = check_morphism(&composed, &eta);
    println!("round trip valid: {}", report.is_valid());

    let ident = Morphism::identity(corpus::theory("mulgr"));
    println!(
        "round trip agrees with the identity: without eta {}, with eta {}",
        morphisms_convertible(&composed, &ident, &config).unwrap(),
        morphisms_convertible(&composed, &ident, &eta).unwrap(),
    );

    println!("\nand the sabotaged variant is caught:");
    let report = check_morphism(&corpus::mul_div_gr_sabotaged(), &config);
    for (rule, result) in report.rules.iter().filter(|(_, r)| !r.is_ok()).take(3) {
        println!("  {rule}: {result}");
    }
}
