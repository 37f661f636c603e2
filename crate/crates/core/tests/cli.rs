//! End-to-end runs of the `deforge` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use deform_forge::catalog::{builtin, emit};
use deform_forge::report::Report;

fn deforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Report {
    Report::parse(std::str::from_utf8(&out.stdout).unwrap()).expect("stdout is a report")
}

fn fact<'a>(r: &'a Report, key: &str) -> &'a serde_json::Value {
    &r.facts.iter().find(|f| f.key == key).unwrap_or_else(|| panic!("no fact {key}")).value
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn mild_lemma_on_iwasawa_fails_with_witness_and_exit_zero() {
    let out = deforge(&["lemma", "iwasawa", "--kind", "mild"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(*fact(&r, "holds"), serde_json::json!(false));
    let witness = serde_json::to_string(fact(&r, "witness")).unwrap();
    assert!(witness.contains("w3~123"), "{witness}");
    assert!(witness.contains("w12~123"), "{witness}");
    assert!(r.emit().contains("PAPER"));
}

#[test]
fn kahler_extension_on_torus_has_zero_residuals() {
    let out = deforge(&["extend", "torus_3", "--structure", "kahler", "--order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r.all_passed());
    assert!(!r.checks.is_empty());
}

#[test]
fn fuzz_reports_are_byte_identical() {
    let args = ["fuzz", "iwasawa", "--identities", "all", "--cases", "100", "--seed", "7"];
    let a = deforge(&args);
    let b = deforge(&args);
    let c = Command::new(env!("CARGO_BIN_EXE_deforge"))
        .args(args)
        .env("DEFORGE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    // The literal forms of ext-old and 7for-3 fail for non-integrable φ.
    assert_eq!(a.status.code(), Some(1));
    let r = report(&a);
    let failing: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    assert_eq!(failing, ["ext-old", "7for-3"]);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["lemma", "iwasawa", "--kind", "medium"][..],
        &["cohomology", "no_such_algebra", "--theory", "bc", "--all"],
        &["cohomology", "iwasawa", "--theory", "bc", "--all", "--bidegree", "1,1"],
        &["classify", "iwasawa", "--backend", "float"],
        &["majorant", "--beta", "0", "--gamma", "1", "--order", "5"],
        &["frobnicate"],
    ] {
        assert_eq!(deforge(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn catalog_files_are_accepted_as_sources() {
    let path = scratch("iwasawa.alg", &emit(&builtin("iwasawa").unwrap().algebra));
    let from_file = deforge(&["classify", path.to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0));
    let r = report(&from_file);
    assert_eq!(*fact(&r, "classification"), serde_json::json!("complex_parallelizable"));

    let bad = scratch("bad.alg", "name=bad\nn=2\nd w1 = w~1^w~2\nd w2 = 0\n");
    assert_eq!(deforge(&["classify", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cohomology.json");
    let out = deforge(&["cohomology", "iwasawa", "--theory", "aeppli", "--all", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r = Report::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.command, "cohomology");
}

#[test]
fn float_backend_matches_exact_dimensions() {
    let exact = report(&deforge(&["cohomology", "iwasawa", "--theory", "bc", "--all"]));
    let float = report(&deforge(&["cohomology", "iwasawa", "--theory", "bc", "--all", "--backend", "float"]));
    let dims = |r: &Report| {
        r.facts
            .iter()
            .filter(|f| f.key.starts_with("h^"))
            .map(|f| (f.key.clone(), f.value.clone()))
            .collect::<Vec<_>>()
    };
    assert!(!dims(&exact).is_empty());
    assert_eq!(dims(&exact), dims(&float));
}

#[test]
fn positivity_and_majorant_from_files() {
    let form = scratch("omega.form", "n=2\ni*w1^w~1 + i*w2^w~2\n");
    let out = deforge(&["positivity", "--form", form.to_str().unwrap(), "--p", "1", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let built = deforge(&["positivity", "torus_3", "--p", "2", "--construct", "exact-index", "--samples", "200"]);
    assert_eq!(built.status.code(), Some(0), "{}", String::from_utf8_lossy(&built.stderr));

    let small = scratch("small.series", "0\n1/100\n1/1000\n");
    let out = deforge(&["majorant", "--beta", "3", "--gamma", "7", "--order", "20", "--against", small.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // A(0) = 0, so a nonzero constant term is never dominated.
    let big = scratch("big.series", "1\n1/2\n1/4\n");
    let out = deforge(&["majorant", "--beta", "3", "--gamma", "7", "--order", "20", "--against", big.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out).checks.iter().any(|c| !c.passed && c.detail.contains("degree 0")));
}

#[test]
fn kuranishi_and_balanced_runs() {
    let out = deforge(&["kuranishi", "iwasawa", "--order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let out = deforge(&["extend", "abelian_I0", "--structure", "balanced", "--order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out).all_passed());
}
