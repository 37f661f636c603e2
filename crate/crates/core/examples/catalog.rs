//! Catalog entries, the text format, and report serialization.

use deform_forge::catalog::{builtin, emit, parse, BUILTIN_NAMES};
use deform_forge::report::{Provenance, Report};
use serde_json::json;

fn main() {
    for name in BUILTIN_NAMES {
        let e = builtin(name).unwrap();
        println!("{name:<18} n={} facts={}", e.algebra.n(), e.facts.len());
    }

    let iw = builtin("iwasawa").unwrap();
    let text = emit(&iw.algebra);
    println!("\n{text}");
    let reparsed = parse(&text).unwrap();
    println!("round trip exact: {}", reparsed.same_structure(&iw.algebra));

    let mut r = Report::new("example", "iwasawa");
    r.config("seed", 0);
    if let Some(kf) = iw.expected("classification") {
        r.fact_with("classification", json!(kf.fact.value()), kf.provenance);
    }
    r.fact_with("dim", json!(iw.algebra.n()), Provenance::Derived);
    r.check("round trip", reparsed.same_structure(&iw.algebra), "");
    let out = r.emit();
    println!("{out}");
    println!("report round trip exact: {}", Report::parse(&out).unwrap() == r);
}
