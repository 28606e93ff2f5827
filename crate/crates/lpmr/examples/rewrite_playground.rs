//! Weak head forms, normal forms and conversion over the group theories.
//!
//! ```bash
//! cargo run -p lpmr --example rewrite_playground
//! ```

use lpmr::corpus;
use lpmr::parse::parse_open_term_str;
use lpmr::pretty::print_term;
use lpmr::reduce::{convertible, normalize, whnf, ReductionConfig};

fn main() {
    let config = ReductionConfig::default();
    let mulgr = corpus::theory("mulgr");
    let divgr = corpus::theory("divgr");
    let vars = ["x", "y", "z"];

    println!("multiplicative groups:");
    for src in [
        "times x one",
        "times (inv (inv x)) (times (inv x) y)",
        "inv (times x y)",
        "(w : iota => times w w) (inv one)",
    ] {
        let t = parse_open_term_str(src, &vars).unwrap();
        let w = whnf(&mulgr, &t, &config).unwrap();
        let n = normalize(&mulgr, &t, &config).unwrap();
        println!("  {src}");
        println!("    whnf      {}", print_term(&w));
        println!("    normal    {}", print_term(&n));
    }

    println!("\ndivision groups:");
    for src in [
        "div x x",
        "div one (div one (div x x))",
        "div (div x y) z",
    ] {
        let t = parse_open_term_str(src, &vars).unwrap();
        let n = normalize(&divgr, &t, &config).unwrap();
        println!("  {src:<28} -->* {}", print_term(&n));
    }

    println!("\nconversion:");
    let pairs = [
        ("times x (inv x)", "one", false),
        ("times x y", "times y x", false),
        ("x : iota => y : iota => times x y", "times", false),
        ("x : iota => y : iota => times x y", "times", true),
    ];
    for (lhs, rhs, eta) in pairs {
        let config = ReductionConfig { eta, ..config };
        let l = parse_open_term_str(lhs, &vars).unwrap();
        let r = parse_open_term_str(rhs, &vars).unwrap();
        let verdict = convertible(&mulgr, &l, &r, &config).unwrap();
        let mode = if eta { "with eta" } else { "beta-rules only" };
        println!("  {lhs}  ==  {rhs}   [{mode}]  ->  {verdict}");
    }
}
